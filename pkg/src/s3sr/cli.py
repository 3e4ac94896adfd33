"""Command-line front end.

Subcommands: connect, geodesic, hamiltonian, shoot, check, frames.
Exit codes: 0 success, 2 usage or parse error, 3 construction failure,
4 shooting did not converge (the best-effort curve is still written).
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass

import numpy as np

from .charts import EulerAngles, from_cartesian
from .connect import ConstructionError, connect
from .curves import SampledCurve, fd_velocities, omega_fd_residuals
from .frames import I1, I3, frame_at
from .geodesics import (
    GeodesicParams,
    HamiltonianTrajectory,
    integrate_geodesic,
    integrate_hamiltonian,
    match_costate,
)
from .io import CurveRecord
from .quaternions import norm, normalize
from .shooting import ShootingConfig, shoot

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_CONSTRUCTION = 3
EXIT_NO_CONVERGENCE = 4


@dataclass(frozen=True)
class RunConfig:
    """Validated common options of a CLI invocation."""

    tol: float = 1e-6
    step: float = 1e-3
    samples: int = 256
    seed: int = 0
    format: str = "csv"

    def __post_init__(self):
        if not self.tol > 0.0:
            raise ValueError("tol must be positive")
        if not self.step > 0.0:
            raise ValueError("step must be positive")
        if self.samples < 2:
            raise ValueError("samples must be at least 2")
        if self.format not in ("csv", "json"):
            raise ValueError(f"unknown format {self.format!r}")

    @classmethod
    def from_args(cls, args) -> "RunConfig":
        return cls(
            tol=getattr(args, "tol", 1e-6),
            step=getattr(args, "step", 1e-3),
            samples=getattr(args, "samples", 256),
            seed=getattr(args, "seed", 0),
            format=getattr(args, "format", "csv"),
        )


def _floats(text: str) -> list[float]:
    try:
        values = [float(p) for p in text.split(",")]
    except ValueError:
        raise ValueError(f"could not parse {text!r} as comma-separated reals")
    if not all(np.isfinite(values)):
        raise ValueError(f"non-finite value in {text!r}")
    return values


def _parse_endpoint(text: str):
    """Either 'phi,psi,theta' angles or a 'w,x,y,z' quaternion."""
    values = _floats(text)
    if len(values) == 3:
        return to_point_from_angles(values)
    if len(values) == 4:
        return _sanitize_point(np.array(values))
    raise ValueError(f"expected 3 angles or 4 quaternion components, got {len(values)}")


def to_point_from_angles(values):
    from .charts import to_cartesian

    return to_cartesian(EulerAngles(*values))


def _sanitize_point(q: np.ndarray) -> np.ndarray:
    """Unit-norm policy: tiny drift accepted, moderate drift normalized."""
    dev = abs(float(norm(q)) - 1.0)
    if dev <= 1e-12:
        return q
    if dev <= 1e-8:
        return normalize(q)
    if dev <= 1e-3:
        print(f"warning: input renormalized, | |q| - 1 | = {dev:.3e}", file=sys.stderr)
        return normalize(q)
    raise ValueError(f"input is not a unit quaternion: | |q| - 1 | = {dev:.3e}")


def _write_record(curve: SampledCurve, args, cfg: RunConfig, **extra) -> str:
    record = CurveRecord.from_curve(curve, **extra)
    out = args.out or f"{args.command}.{cfg.format}"
    record.write(out, cfg.format)
    return out


# ---------------------------------------------------------------------------


def _cmd_connect(args) -> int:
    cfg = RunConfig.from_args(args)
    p = _parse_endpoint(getattr(args, "from"))
    q = _parse_endpoint(args.to)
    n = 2 if float(np.linalg.norm(p - q)) < 1e-13 else cfg.samples
    try:
        curve = connect(p, q, n=n)
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    out = _write_record(curve, args, cfg)
    print(f"endpoint_error={curve.meta['endpoint_error']:.17g}")
    print(f"max_omega_residual={curve.meta['max_omega_fd']:.17g}")
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_geodesic(args) -> int:
    cfg = RunConfig.from_args(args)
    q0 = _sanitize_point(np.array(_floats(args.q0)))
    if len(q0) != 4:
        raise ValueError("--q0 needs 4 components")
    params = GeodesicParams(args.r, args.theta0, getattr(args, "lambda"))
    curve = integrate_geodesic(q0, params, args.T, cfg.step)
    out = _write_record(curve, args, cfg)
    end = curve.end
    print("endpoint=" + ",".join(format(v, ".17g") for v in end))
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_hamiltonian(args) -> int:
    cfg = RunConfig.from_args(args)
    q0 = _sanitize_point(np.array(_floats(args.q0)))
    params = GeodesicParams(args.r, args.theta0, getattr(args, "lambda"))
    meta = {"tag": "hamiltonian", "T": args.T, "h": cfg.step}
    if args.xi0:
        xi0 = np.array(_floats(args.xi0))
        if len(xi0) != 4:
            raise ValueError("--xi0 needs 4 components")
    else:
        xi0 = match_costate(q0, params)
        # the control profile below is only valid for matched costates
        meta.update({"r": params.r, "theta0": params.theta0, "lambda": params.lam})
    traj = integrate_hamiltonian(q0, xi0, args.T, cfg.step)
    curve = SampledCurve(traj.s, traj.q, traj.qdot(), meta)
    out = _write_record(curve, args, cfg)
    energy = traj.energy()
    print(f"H_drift={float(np.max(np.abs(energy - energy[0]))):.17g}")
    print(f"norm_drift={float(np.max(np.abs(np.linalg.norm(traj.q, axis=1) - 1.0))):.17g}")
    print(f"wrote {out}")
    return EXIT_OK


def _cmd_shoot(args) -> int:
    cfg = RunConfig.from_args(args)
    p = _parse_endpoint(getattr(args, "from"))
    q = _parse_endpoint(args.to)
    result = shoot(p, q, ShootingConfig(tol=cfg.tol, seed=cfg.seed, curve_step=cfg.step))
    out = _write_record(result.curve, args, cfg, endpoint_error=result.endpoint_error)
    print(f"theta0={result.params.theta0:.17g}")
    print(f"lambda={result.params.lam:.17g}")
    print(f"T={result.T:.17g}")
    print(f"endpoint_error={result.endpoint_error:.17g}")
    print(f"converged={result.converged}")
    print(f"wrote {out}")
    return EXIT_OK if result.converged else EXIT_NO_CONVERGENCE


def _cmd_check(args) -> int:
    record = CurveRecord.read(args.file)
    record.validate(unit_tol=np.inf)  # norm deviation reported as its own check below
    curve = record.to_sampled_curve()
    tol = args.tol
    results = []

    norms = np.linalg.norm(curve.points, axis=1)
    results.append(("unit-norm", float(np.max(np.abs(norms - 1.0))), 1e-8))

    if curve.n >= 2:
        if np.any(np.diff(curve.s) <= 0.0):
            print("malformed curve: s not strictly increasing", file=sys.stderr)
            return EXIT_USAGE
        results.append(("horizontality", float(np.max(omega_fd_residuals(curve))), tol))
        if curve.n >= 3:
            # interior only: the one-sided end estimates are first order
            vel = fd_velocities(curve)[1:-1]
            a_col, b_col = record.data[1:-1, 5], record.data[1:-1, 6]
            energy_res = float(
                np.max(np.abs(np.sum(vel * vel, axis=1) - (a_col**2 + b_col**2)))
            )
            results.append(("velocity-energy", energy_res, tol))
    if curve.n >= 3:
        from .geodesics import acceleration_T_residual

        results.append(("acceleration-T", acceleration_T_residual(curve), tol))

    is_geodesic = record.header.get("tag") in ("geodesic", "hamiltonian")
    if is_geodesic and curve.n >= 3 and "lambda" in record.header:
        vel = fd_velocities(curve)
        va = np.sum(vel * (-(curve.points @ I1)), axis=1)
        vb = np.sum(vel * (-(curve.points @ I3)), axis=1)
        angles = np.unwrap(np.arctan2(vb, va))
        fit = np.polyfit(curve.s, angles, 1)
        slope_dev = abs(float(fit[0]) - 2.0 * float(record.header["lambda"]))
        results.append(("angle-linearity", slope_dev, max(tol, 1e-3)))
    else:
        print("SKIP angle-linearity (not a geodesic record)")

    all_pass = True
    for name, value, bound in results:
        ok = value <= bound
        all_pass &= ok
        print(f"{'PASS' if ok else 'FAIL'} {name} max_residual={value:.6e} tol={bound:.1e}")
    return EXIT_OK if all_pass else 1


def _cmd_frames(args) -> int:
    q = _sanitize_point(_parse_endpoint(args.at))
    f = frame_at(q)
    for name, vec in zip("XYTN", f):
        print(f"{name}=" + ",".join(format(v, ".17g") for v in vec))
    e = from_cartesian(q)
    print(f"euler phi={e.phi:.17g} psi={e.psi:.17g} theta={e.theta:.17g} pole={e.pole}")
    return EXIT_OK


# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="s3sr",
        description="Horizontal curves and geodesics on the unit-quaternion sphere",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, samples=False, step=False):
        p.add_argument("--out", default=None, help="output file (default <command>.<format>)")
        p.add_argument("--format", choices=("csv", "json"), default="csv")
        p.add_argument("--tol", type=float, default=1e-6)
        p.add_argument("--seed", type=int, default=0)
        if samples:
            p.add_argument("--samples", type=int, default=256)
        if step:
            p.add_argument("--step", type=float, default=1e-3)

    p = sub.add_parser("connect", help="horizontal curve between two points")
    p.add_argument("--from", required=True, help="phi,psi,theta or w,x,y,z")
    p.add_argument("--to", required=True)
    common(p, samples=True)
    p.set_defaults(func=_cmd_connect)

    p = sub.add_parser("geodesic", help="integrate a geodesic from initial data")
    p.add_argument("--q0", required=True)
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--lambda", type=float, default=0.0)
    p.add_argument("--T", type=float, required=True)
    common(p, step=True)
    p.set_defaults(func=_cmd_geodesic)

    p = sub.add_parser("hamiltonian", help="integrate the Hamiltonian flow")
    p.add_argument("--q0", required=True)
    p.add_argument("--xi0", default=None, help="explicit costate (else matched from r,theta0,lambda)")
    p.add_argument("--r", type=float, default=1.0)
    p.add_argument("--theta0", type=float, default=0.0)
    p.add_argument("--lambda", type=float, default=0.0)
    p.add_argument("--T", type=float, required=True)
    common(p, step=True)
    p.set_defaults(func=_cmd_hamiltonian)

    p = sub.add_parser("shoot", help="solve the two-point geodesic problem")
    p.add_argument("--from", required=True)
    p.add_argument("--to", required=True)
    common(p, step=True)
    p.set_defaults(func=_cmd_shoot)

    p = sub.add_parser("check", help="validate a curve file")
    p.add_argument("file")
    p.add_argument("--tol", type=float, default=1e-4)
    p.set_defaults(func=_cmd_check)

    p = sub.add_parser("frames", help="print the frame at a point")
    p.add_argument("--at", required=True)
    p.set_defaults(func=_cmd_frames)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except ConstructionError as exc:
        print(f"construction failed: {exc}", file=sys.stderr)
        return EXIT_CONSTRUCTION
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
