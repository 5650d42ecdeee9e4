#!/usr/bin/env python3
"""Command-line orchestrator for urn analyses."""

import argparse
import json
import logging
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional

from urnlab import __version__
from urnlab.engines import deviation, elliptic, exact, kernel, moments, series, simulate
from urnlab.engines.urn import UrnSpec, validate
from urnlab.errors import DegenerateDistribution, SpecParseError, UrnLabError
from urnlab.utils.config import data_dir
from urnlab.utils.formatting import fmt_complex, fmt_rational, fmt_real
from urnlab.utils.io import RunManifest, load_spec_json, save_json, write_csv

logger = logging.getLogger("urnlab")

INLINE_KEYS = ("a", "b", "s", "a0", "b0")


class UrnArgumentParser(argparse.ArgumentParser):
    """argparse with usage errors mapped to exit code 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def resolve_spec(args: argparse.Namespace) -> UrnSpec:
    """Spec from --spec FILE or from the five inline flags."""
    inline = {key: getattr(args, key) for key in INLINE_KEYS}
    if args.spec:
        if any(v is not None for v in inline.values()):
            raise SpecParseError("give either --spec or the inline flags, not both")
        spec = UrnSpec.from_dict(load_spec_json(Path(args.spec)))
    else:
        missing = [f"--{key}" for key, value in inline.items() if value is None]
        if missing:
            raise SpecParseError(f"no spec: pass --spec FILE or {' '.join(missing)}")
        spec = UrnSpec(**inline)
    validate(spec)
    return spec


# Commands. Each returns the list of files it wrote.

def cmd_analyze(spec: UrnSpec, args: argparse.Namespace, out: Path) -> List[Path]:
    constants = validate(spec)
    print(f"[Spec] {spec.label()} is tenable: t0={constants.t0}, h={constants.h}, h/a={constants.balance_class}")

    profile = kernel.analytic_profile(spec)
    print(f"[Rho] Beta formula: {fmt_real(profile.rho)}")
    print(f"[Rho] quadrature:   {fmt_real(profile.rho_quadrature)}")

    slopes = moments.asymptotic_moments(spec)
    print(f"[Moments] mean slope {fmt_rational(slopes.mean_slope)}, "
          f"variance slope {fmt_rational(slopes.variance_slope)}")
    print(f"[Singularity] Puiseux exponent h/s = {fmt_rational(profile.puiseux_exponent)}, "
          f"prefactor exponent -t0/s = {fmt_rational(profile.singular_exponent)}")

    verdict = elliptic.classify(spec)
    label = f"elliptic, case {verdict.matched_case}" if verdict.is_elliptic else "not elliptic"
    print(f"[Elliptic] {label} ({verdict.reason})")

    geometry = kernel.kite(spec)
    print(f"[Kite] {geometry.polygon_vertex_count}-kite polygon, vertices:")
    for z in geometry.vertices:
        print(f"    {fmt_complex(z)}")

    report = {
        "spec": spec.to_dict(),
        "t0": constants.t0,
        "h": constants.h,
        "balance_class": constants.balance_class,
        "profile": profile.to_dict(),
        "asymptotics": slopes.to_dict(),
        "elliptic": verdict.to_dict(),
        "kite": geometry.to_dict(),
    }
    path = out / "analyze.json"
    save_json(path, report)
    return [path]


def cmd_dist(spec: UrnSpec, args: argparse.Namespace, out: Path) -> List[Path]:
    dist = exact.exact_distribution(spec, args.n)
    print(f"[Dist] X_{args.n}: {len(dist.probs)} support points, mean {fmt_rational(dist.mean())}")
    if args.format == "json":
        path = out / f"dist_n{args.n}.json"
        save_json(path, dist.to_dict())
    else:
        path = out / f"dist_n{args.n}.csv"
        write_csv(path, ("x", "numerator", "denominator", "float"),
                  ((x, num, den, fmt_real(p)) for x, num, den, p in dist.to_rows()))
    return [path]


def cmd_moments(spec: UrnSpec, args: argparse.Namespace, out: Path) -> List[Path]:
    slopes = moments.asymptotic_moments(spec)
    print(f"[Moments] mean slope {fmt_rational(slopes.mean_slope)}, "
          f"variance slope {fmt_rational(slopes.variance_slope)}")
    for poly in moments.moment_polynomials(spec, args.r_max)[1:]:
        print(f"[Moments] P_{poly.r}(v) = {poly}")
    rows = moments.moment_table(spec, args.r_max, args.n_max)
    path = out / "moments.csv"
    count = write_csv(
        path, ("n", "r", "exact", "closed_form", "difference"),
        ((n, r, fmt_rational(e), fmt_rational(c), fmt_rational(d)) for n, r, e, c, d in rows),
    )
    exact_rows = sum(1 for row in rows if row[4] == 0)
    print(f"[Moments] {count} rows, {exact_rows} with zero difference")
    return [path]


def cmd_rate(spec: UrnSpec, args: argparse.Namespace, out: Path) -> List[Path]:
    target = spec.swapped() if args.right else spec
    side = "right" if args.right else "left"
    points = deviation.rate_curve(target, args.grid)
    for p in points:
        print(f"[Rate] {side} xi={fmt_real(p.xi)} lambda0={fmt_real(p.lambda0)} R={fmt_real(p.rate)}")
    path = out / f"rate_{side}.csv"
    write_csv(path, ("xi", "lambda0", "rate"),
              ((fmt_real(p.xi), fmt_real(p.lambda0), fmt_real(p.rate)) for p in points))
    return [path]


def cmd_simulate(spec: UrnSpec, args: argparse.Namespace, out: Path) -> List[Path]:
    config = simulate.SimConfig(trials=args.trials, horizon=args.horizon, seed=args.seed)
    empirical = simulate.simulate(spec, config)
    print(f"[Simulate] {config.trials} trials to n={config.horizon}: "
          f"mean {fmt_real(empirical.mean())}, {len(empirical.counts)} distinct values")
    hist = out / f"simulate_n{config.horizon}.csv"
    write_csv(hist, ("x", "count", "frequency"),
              ((x, c, fmt_real(f)) for x, c, f in empirical.to_rows()))
    written = [hist]
    try:
        report = simulate.clt_report(spec, config.horizon)
    except DegenerateDistribution as e:
        print(f"[CLT] skipped: {e}")
    else:
        print(f"[CLT] KS distance to the normal law: {fmt_real(report.ks_distance)}")
        clt = out / f"clt_n{config.horizon}.json"
        save_json(clt, report.to_dict())
        written.append(clt)
    return written


def cmd_classify(spec: Optional[UrnSpec], args: argparse.Namespace, out: Path) -> List[Path]:
    verdicts = [elliptic.classify(candidate) for candidate in elliptic.enumerate_elliptic(args.s_max)]
    for v in verdicts:
        print(f"[Classify] case {v.matched_case}: {v.spec}")
    print(f"[Classify] {len(verdicts)} elliptic urns with s <= {args.s_max}")
    path = out / "classify.json"
    save_json(path, [v.to_dict() for v in verdicts])
    return [path]


def cmd_kite(spec: UrnSpec, args: argparse.Namespace, out: Path) -> List[Path]:
    geometry = kernel.kite(spec)
    boundary = kernel.polygon_boundary(spec, args.samples)
    print(f"[Kite] {geometry.polygon_vertex_count} kites, {len(boundary)} boundary points")
    kite_path = out / "kite.json"
    save_json(kite_path, geometry.to_dict())
    csv_path = out / "polygon.csv"
    write_csv(csv_path, ("re", "im", "segment"),
              ((fmt_real(z.real), fmt_real(z.imag), label) for z, label in boundary))
    return [kite_path, csv_path]


def cmd_series(spec: UrnSpec, args: argparse.Namespace, out: Path) -> List[Path]:
    psi = series.psi_series_at_zero(spec, args.order)
    print(f"[Series] psi(z) = {psi.truncate(4)} + ...")
    report = {"psi_at_zero": psi.to_json(), "k_at_one": series.k_series_at_one(spec, args.order).to_json()}
    try:
        expansion = series.singular_expansion(spec, args.order)
    except UrnLabError as e:
        print(f"[Series] singular expansion failed: {e}")
    else:
        print(f"[Series] a_1, a_2 = {', '.join(fmt_rational(c) for c in expansion.a_k[1:3])}")
        report["singular_expansion"] = expansion.to_dict()
    path = out / "series.json"
    save_json(path, report)
    return [path]


COMMANDS: Dict[str, Callable] = {
    "analyze": cmd_analyze,
    "dist": cmd_dist,
    "moments": cmd_moments,
    "rate": cmd_rate,
    "simulate": cmd_simulate,
    "classify": cmd_classify,
    "kite": cmd_kite,
    "series": cmd_series,
}

SPEC_FREE = {"classify"}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--spec", help="JSON file with keys a, b, s, a0, b0")
    for key in INLINE_KEYS:
        common.add_argument(f"--{key}", type=int, help=f"urn parameter {key}")
    common.add_argument("--out", type=Path, help="output directory (default: URNLAB_DATA_DIR)")
    common.add_argument("--verbose", action="store_true", help="debug logging")

    parser = UrnArgumentParser(prog="urnlab", description="Exact and asymptotic analysis of subtractive urns")
    parser.add_argument("--version", action="version", version=f"urnlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=UrnArgumentParser)

    sub.add_parser("analyze", parents=[common], help="constants, rho, slopes, verdict, kite")

    p = sub.add_parser("dist", parents=[common], help="exact law of X_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--format", choices=("csv", "json"), default="csv")

    p = sub.add_parser("moments", parents=[common], help="factorial moments, exact vs closed form")
    p.add_argument("--r-max", type=int, default=3)
    p.add_argument("--n-max", type=int, default=20)

    p = sub.add_parser("rate", parents=[common], help="large-deviation rate curve")
    p.add_argument("--grid", type=int, default=10)
    p.add_argument("--right", action="store_true", help="rate of the white count instead")

    p = sub.add_parser("simulate", parents=[common], help="Monte Carlo histories and CLT distance")
    p.add_argument("--trials", type=int, default=100000)
    p.add_argument("--horizon", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("classify", parents=[common], help="enumerate the elliptic urns")
    p.add_argument("--s-max", type=int, default=10)

    p = sub.add_parser("kite", parents=[common], help="kite vertices and polygon boundary")
    p.add_argument("--samples", type=int, default=64)

    p = sub.add_parser("series", parents=[common], help="psi at 0, K at 1, expansion at rho")
    p.add_argument("--order", type=int, default=series.DEFAULT_ORDER)

    return parser


def _parameters(args: argparse.Namespace) -> dict:
    skip = {"command", "out", "verbose", "spec"} | set(INLINE_KEYS)
    return {key: value for key, value in sorted(vars(args).items()) if key not in skip}


def run(args: argparse.Namespace) -> int:
    out = args.out if args.out is not None else data_dir()
    print("=" * 60)
    print(f"urnlab {__version__} - {args.command}")
    print(f"Started: {datetime.now(timezone.utc).isoformat()}")
    print("=" * 60)

    try:
        spec = None if args.command in SPEC_FREE else resolve_spec(args)
        written = COMMANDS[args.command](spec, args, out)
        manifest = RunManifest(
            spec=spec.to_dict() if spec else {},
            command=args.command,
            parameters=_parameters(args),
            tool_version=__version__,
            outputs=[path.name for path in written],
        )
        manifest_path = out / f"{args.command}_manifest.json"
        manifest.save(manifest_path)
    except UrnLabError as e:
        print(f"[{args.command}] ERROR: {e}")
        print(json.dumps(e.to_dict()), file=sys.stderr)
        return e.exit_code

    print(f"\n{'=' * 60}")
    print(f"Completed: {args.command}")
    for path in written + [manifest_path]:
        print(f"Wrote {path}")
    print("=" * 60)
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    """Parse arguments and run one command; returns the process exit code."""
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
    )
    return run(args)


if __name__ == "__main__":
    sys.exit(main())
