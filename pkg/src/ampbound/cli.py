"""Command line front end.

Subcommands:

* ``check``     one-point bound evaluation, machine-parseable exit code
* ``map``       contour-map data grid over one of five parameter planes
* ``verify``    oracle sweep comparing closed forms against the Fock engine
* ``spectrum``  per-mode field scan for a pump profile

All numeric output uses 17 significant digits with '.' as decimal separator;
identical invocations produce byte-identical files.  Exit codes: 0 success
(bound satisfied for ``check``, report passing for ``verify``), 2 bound
violated / report failing, 1 usage or runtime error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from . import analytic, dynamics, field_modes, fock_oracle

__all__ = ["main", "ScanConfig", "build_parser", "scan_rows", "scan_csv"]

PLANES = ("N_vs_omegaT", "nbar_vs_nq", "omegaT_vs_nq", "nbar_vs_r", "omegaT_vs_r")


class CliError(Exception):
    """Usage or runtime failure that should exit with status 1."""


def _fmt(x: float) -> str:
    return f"{x:.17g}"


def _axis(lo: float, hi: float, points: int, scale: str) -> np.ndarray:
    if points < 2:
        raise CliError("each axis needs at least 2 points")
    if lo >= hi:
        raise CliError(f"axis range must have min < max, got [{lo}, {hi}]")
    if scale == "linear":
        return np.linspace(lo, hi, points)
    if scale == "log10":
        if lo <= 0:
            raise CliError("log10 scale requires a positive range")
        return np.logspace(math.log10(lo), math.log10(hi), points)
    raise CliError(f"unknown axis scale {scale!r}")


class ScanConfig:
    """Grid description for ``map``; see the README for the file schema."""

    def __init__(self, plane: str, x_range, y_range, mu: float = 0.0,
                 output_path: str | None = None):
        if plane not in PLANES:
            raise CliError(f"unknown plane {plane!r}; choose from {PLANES}")
        self.plane = plane
        self.x_range = tuple(x_range)
        self.y_range = tuple(y_range)
        self.mu = mu
        self.output_path = output_path

    @classmethod
    def from_dict(cls, spec: dict) -> "ScanConfig":
        def rng(d):
            return (d["min"], d["max"], d["points"], d.get("scale", "linear"))
        return cls(plane=spec["plane"], x_range=rng(spec["x"]),
                   y_range=rng(spec["y"]), mu=spec.get("mu", 0.0),
                   output_path=spec.get("output_path"))

    def axes(self):
        return (_axis(*self.x_range), _axis(*self.y_range))


def _ratio_at(plane: str, x: float, y: float, mu: float) -> float:
    """Bound ratio at one grid cell.

    For the occupation planes the ratio depends only on the occupations
    themselves, so the chemical potential drops out identically (it only
    shifts how a given ``n_bar`` arises from bath parameters).  For the
    omega/T planes ``mu`` is in units of T and shifts the axis value.
    """
    if plane == "N_vs_omegaT":
        return analytic.ratio_from_temperature(1.0, y, mu, x)
    if plane == "nbar_vs_nq":
        return analytic.ratio_from_occupation(x, y * (x + 1.0))
    if plane == "omegaT_vs_nq":
        return analytic.ratio_from_temperature(1.0, x, mu, y * (1.0 / np.expm1(x - mu) + 1.0))
    if plane == "nbar_vs_r":
        return analytic.ratio_from_occupation(x, float(np.sinh(y) ** 2) * (x + 1.0))
    if plane == "omegaT_vs_r":
        n_q = float(np.sinh(y) ** 2)
        return analytic.ratio_from_temperature(1.0, x, mu, n_q * (1.0 / np.expm1(x - mu) + 1.0))
    raise CliError(f"unknown plane {plane!r}")


def scan_rows(config: ScanConfig):
    """Grid cells in row-major order, y fastest: (x, y, ratio)."""
    xs, ys = config.axes()
    if config.plane in ("N_vs_omegaT",):
        if min(ys) - config.mu <= 0:
            raise CliError("omega/T axis must stay above mu/T")
    if config.plane in ("omegaT_vs_nq", "omegaT_vs_r"):
        if min(xs) - config.mu <= 0:
            raise CliError("omega/T axis must stay above mu/T")
    for x in xs:
        for y in ys:
            yield float(x), float(y), _ratio_at(config.plane, float(x), float(y), config.mu)


def scan_csv(config: ScanConfig) -> str:
    """CSV with columns x, y, log10_ratio, satisfied.

    A vanishing ratio (no amplification) writes an empty log10 field and
    counts as satisfied.
    """
    lines = ["x,y,log10_ratio,satisfied"]
    for x, y, ratio in scan_rows(config):
        log10 = "" if ratio == 0.0 else _fmt(math.log10(ratio))
        lines.append(f"{_fmt(x)},{_fmt(y)},{log10},{'true' if ratio <= 1.0 else 'false'}")
    return "\n".join(lines) + "\n"


def _emit(text: str, out_path: str | None) -> None:
    if out_path:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def cmd_check(args) -> int:
    if (args.nq is None) == (args.r is None):
        raise CliError("supply exactly one of --nq or --r")
    if args.from_thermal == (args.nbar is not None):
        raise CliError("supply exactly one of --nbar or --from-thermal")
    thermal = analytic.ThermalSpec(T=args.T, omega=args.omega, mu=args.mu)
    n_bar = analytic.nbar_from_thermal(thermal) if args.from_thermal else args.nbar
    if args.r is not None:
        mult = analytic.Multiplicities.from_squeeze(n_bar, args.r)
    else:
        mult = analytic.Multiplicities(n_bar, args.nq)
    report = analytic.bound_ratio(thermal, mult)
    payload = {
        "delta_S_nats": report.delta_S,
        "delta_S_bits": report.delta_S / math.log(2.0),
        "delta_Q": report.delta_Q,
        "delta_N": report.delta_N,
        "ratio": report.ratio,
        "satisfied": report.satisfied,
    }
    if args.json:
        _emit(json.dumps(payload, sort_keys=True, indent=2) + "\n", args.out)
    else:
        lines = [f"{key} = {_fmt(val) if isinstance(val, float) else str(val).lower()}"
                 for key, val in payload.items()]
        _emit("\n".join(lines) + "\n", args.out)
    return 0 if report.satisfied else 2


def cmd_map(args) -> int:
    if args.config:
        with open(args.config, encoding="utf-8") as fh:
            config = ScanConfig.from_dict(json.load(fh))
        if args.out:
            config.output_path = args.out
    else:
        required = (args.plane, args.x_min, args.x_max, args.y_min, args.y_max)
        if any(v is None for v in required):
            raise CliError("map needs --config or --plane with full x/y ranges")
        config = ScanConfig(
            plane=args.plane,
            x_range=(args.x_min, args.x_max, args.x_points, args.x_scale),
            y_range=(args.y_min, args.y_max, args.y_points, args.y_scale),
            mu=args.mu,
            output_path=args.out,
        )
    _emit(scan_csv(config), config.output_path)
    return 0


def _parse_points(specs) -> list[tuple[float, float]]:
    points = []
    for spec in specs:
        try:
            a, b = spec.split(",")
            points.append((float(a), float(b)))
        except ValueError as exc:
            raise CliError(f"bad --point {spec!r}, expected 'n_bar,r'") from exc
    return points


def cmd_verify(args) -> int:
    points = _parse_points(args.point)
    if not points:
        raise CliError("verify needs at least one --point n_bar,r")
    report = fock_oracle.verify_grid(
        points,
        tolerance=args.tolerance,
        omega=args.omega,
        truncation_tolerance=args.trunc_tolerance,
    )
    _emit(json.dumps(report, sort_keys=True, indent=2) + "\n", args.out)
    return 0 if report["pass"] else 2


def cmd_spectrum(args) -> int:
    if args.tau_fin < args.tau_in:
        raise CliError("--tau-fin must not precede --tau-in")
    pump = dynamics.PumpProfile.from_config(args.pump)
    thermal = analytic.ThermalSpec(T=args.T, omega=args.thermal_omega, mu=args.mu)
    kgrid = _axis(args.k_min, args.k_max, args.k_points, args.k_scale)
    polarizations = 2 if args.graviton else 1
    results = field_modes.spectrum(
        kgrid, pump, thermal, args.tau_in, args.tau_fin, tol=args.tol,
        polarizations=polarizations, convention=args.omega_convention,
        threads=args.threads,
    )
    _emit(field_modes.spectrum_csv(results, polarizations), args.out)
    return 0


def _add_common_flags(parser, suppress: bool) -> None:
    # registered on the root and on every subcommand so the flags are
    # accepted in either position; the subcommand copies suppress their
    # defaults so they never clobber values parsed at the root
    d = argparse.SUPPRESS if suppress else None
    parser.add_argument("--out", default=d,
                        help="write output to this path instead of stdout")
    parser.add_argument("--json", action="store_true",
                        default=argparse.SUPPRESS if suppress else False,
                        help="JSON output where applicable")
    parser.add_argument("--threads", type=int,
                        default=argparse.SUPPRESS if suppress else 1,
                        help="worker threads for scans")
    parser.add_argument("--seed", type=int,
                        default=argparse.SUPPRESS if suppress else None,
                        help="reserved; no randomness is used")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ampbound",
        description="Entropy/heat/particle-flow bounds for parametric "
                    "amplification, with oracle verification and field scans.",
    )
    _add_common_flags(parser, suppress=False)
    sub = parser.add_subparsers(dest="command", required=True)

    check = sub.add_parser("check", help="evaluate the bound at one point")
    _add_common_flags(check, suppress=True)
    check.add_argument("--nbar", type=float, default=None, help="thermal occupation")
    check.add_argument("--from-thermal", action="store_true",
                       help="derive the occupation from --T/--omega/--mu")
    check.add_argument("--nq", type=float, default=None, help="produced-quanta occupation")
    check.add_argument("--r", type=float, default=None, help="squeeze amplitude (implies --nq)")
    check.add_argument("--omega", type=float, required=True, help="environment frequency")
    check.add_argument("--T", type=float, required=True, help="environment temperature")
    check.add_argument("--mu", type=float, default=0.0, help="chemical potential")
    check.set_defaults(func=cmd_check)

    cmap = sub.add_parser("map", help="write a contour-map CSV grid")
    _add_common_flags(cmap, suppress=True)
    cmap.add_argument("--config", help="JSON scan config (see README)")
    cmap.add_argument("--plane", choices=PLANES, default=None)
    cmap.add_argument("--x-min", type=float, default=None)
    cmap.add_argument("--x-max", type=float, default=None)
    cmap.add_argument("--x-points", type=int, default=101)
    cmap.add_argument("--x-scale", choices=("log10", "linear"), default="log10")
    cmap.add_argument("--y-min", type=float, default=None)
    cmap.add_argument("--y-max", type=float, default=None)
    cmap.add_argument("--y-points", type=int, default=101)
    cmap.add_argument("--y-scale", choices=("log10", "linear"), default="log10")
    cmap.add_argument("--mu", type=float, default=0.0,
                      help="chemical potential; in units of T on omega/T planes, "
                           "inert on occupation planes")
    cmap.set_defaults(func=cmd_map)

    verify = sub.add_parser("verify", help="oracle sweep against the closed forms")
    _add_common_flags(verify, suppress=True)
    verify.add_argument("--point", action="append", default=[],
                        metavar="NBAR,R", help="grid point; repeatable")
    verify.add_argument("--tolerance", type=float, default=1e-8,
                        help="gating tolerance for oracle/analytic agreement")
    verify.add_argument("--trunc-tolerance", type=float, default=1e-12,
                        help="truncation tail mass for the oracle")
    verify.add_argument("--omega", type=float, default=1.0)
    verify.set_defaults(func=cmd_verify)

    spect = sub.add_parser("spectrum", help="per-mode field scan")
    _add_common_flags(spect, suppress=True)
    spect.add_argument("--pump", required=True, help="pump profile JSON path")
    spect.add_argument("--T", type=float, required=True)
    spect.add_argument("--mu", type=float, default=0.0)
    spect.add_argument("--thermal-omega", type=float, default=1.0,
                       help="placeholder frequency of the bath spec; per-mode "
                            "occupations use each mode's own frequency")
    spect.add_argument("--omega-convention", choices=sorted(field_modes.OMEGA_CONVENTIONS),
                       default="k")
    spect.add_argument("--k-min", type=float, required=True)
    spect.add_argument("--k-max", type=float, required=True)
    spect.add_argument("--k-points", type=int, default=50)
    spect.add_argument("--k-scale", choices=("log10", "linear"), default="log10")
    spect.add_argument("--tau-in", type=float, required=True)
    spect.add_argument("--tau-fin", type=float, required=True)
    spect.add_argument("--tol", type=float, default=1e-10)
    spect.add_argument("--graviton", action="store_true",
                       help="two tensor polarizations; doubles extensive columns")
    spect.set_defaults(func=cmd_spectrum)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 2 on usage problems; the contract reserves 2 for a
        # violated bound, so usage errors are remapped to 1
        return 0 if exc.code in (0, None) else 1
    try:
        return args.func(args)
    except (CliError, ValueError, OSError, dynamics.PumpError,
            dynamics.IntegrationError, fock_oracle.TruncationError,
            fock_oracle.TruncationInfeasibleError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
