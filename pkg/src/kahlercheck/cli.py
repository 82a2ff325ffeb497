"""Command-line front end.

Commands::

    check <name> [--manifold URI|PATH] [--immersion PATH|builtin:NAME]
                 [--points N] [--samples K] [--tol T] [--seed S] [--json PATH]
    suite --manifold URI|PATH [--tol T] [--seed S] [--points N] [--samples K]
                 [--json PATH]
    parse --expr TEXT --dim M [--kinds z,zb,u]

Exit status: 0 when every requested check passes, 1 on a failed verdict,
2 on configuration or evaluation errors.

All randomness flows from one seeded generator per check, drawn
sequentially, so a report is a deterministic function of its RunConfig
(up to the timestamp field).
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass

import numpy as np

from . import expr as ex
from . import geometry as geo
from . import invariants as inv
from . import models
from . import submanifold as sub
from .invariants import CheckReport, WorstCase

MANIFOLD_CHECKS = (
    "bochner",
    "lemma",
    "basis-sum",
    "einstein",
    "ricci-offdiag",
    "chsc",
    "reconstruct-2-3",
)
IMMERSION_CHECKS = ("umbilical", "parallel-h", "codazzi-general", "codazzi-umbilical")
ALL_CHECKS = MANIFOLD_CHECKS + IMMERSION_CHECKS


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    manifold: str | None
    check: str
    immersion: str | None = None
    points: int = 5
    samples: int = 200
    tol: float = 1e-8
    seed: int = 0
    output: str | None = None

    def __post_init__(self):
        if self.check not in ALL_CHECKS:
            raise ConfigError(
                f"unknown check {self.check!r}; known: {', '.join(ALL_CHECKS)}"
            )
        if self.points < 1 or self.samples < 1:
            raise ConfigError("points and samples must be >= 1")
        if not self.tol > 0:
            raise ConfigError("tolerance must be positive")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("seed must be a 64-bit unsigned integer")


def _finish(
    cfg: RunConfig,
    name: str,
    residuals: list[float],
    worst: list[WorstCase],
) -> CheckReport:
    return CheckReport(
        manifold=name,
        check=cfg.check,
        seed=cfg.seed,
        points=cfg.points,
        samples=cfg.samples,
        tolerance=cfg.tol,
        max_residual=float(np.max(residuals)),
        mean_residual=float(np.mean(residuals)),
        worst_cases=worst,
    )


def _vecs(*vectors: geo.RealTangentVector) -> list[np.ndarray]:
    return [v.components for v in vectors]


def _per_point_quadruple_check(cfg, manifold, rng, residual_fn) -> CheckReport:
    residuals = []
    worst_cases = []
    for _ in range(cfg.points):
        p = manifold.sample_point(rng)
        pd = inv.point_data(manifold, p)
        best = None
        for _ in range(cfg.samples):
            vectors = [
                geo.random_unit_tangent(pd.metric, pd.m, rng) for _ in range(4)
            ]
            r = abs(residual_fn(pd, *vectors))
            residuals.append(r)
            if best is None or r > best.residual:
                best = WorstCase(point=p, frame=_vecs(*vectors), residual=r)
        worst_cases.append(best)
    return _finish(cfg, manifold.name, residuals, worst_cases)


def _run_bochner(cfg, manifold, rng) -> CheckReport:
    return _per_point_quadruple_check(cfg, manifold, rng, inv.bochner_at)


def _run_reconstruct(cfg, manifold, rng) -> CheckReport:
    def identity_residual(pd, x, y, z, u):
        r = geo.real_curvature(pd.curvature, x, y, z, u)
        rhs = inv.reconstruct_curvature_from_ricci(pd, x, y, z, u)
        b = inv.bochner_at(pd, x, y, z, u)
        return abs(r - rhs) - abs(b)

    return _per_point_quadruple_check(cfg, manifold, rng, identity_residual)


def _run_lemma(cfg, manifold, rng) -> CheckReport:
    if manifold.m < 3:
        raise ConfigError(
            "the 3-frame criterion needs complex dimension >= 3 "
            f"(got m={manifold.m})"
        )
    residuals = []
    worst_cases = []
    for _ in range(cfg.points):
        p = manifold.sample_point(rng)
        pd = inv.point_data(manifold, p)
        best = None
        for _ in range(cfg.samples):
            x, y, z = geo.orthonormal_antiholomorphic_frame(
                manifold, p, 3, rng, pd.metric
            )
            r = abs(inv.lemma_residual(pd, x, y, z))
            residuals.append(r)
            if best is None or r > best.residual:
                best = WorstCase(point=p, frame=_vecs(x, y, z), residual=r)
        worst_cases.append(best)
    return _finish(cfg, manifold.name, residuals, worst_cases)


def _run_basis_sum(cfg, manifold, rng) -> CheckReport:
    # Residual per point: sample standard deviation of the basis sums.
    residuals = []
    worst_cases = []
    for _ in range(cfg.points):
        p = manifold.sample_point(rng)
        pd = inv.point_data(manifold, p)
        sums = []
        bases = []
        for _ in range(cfg.samples):
            basis = geo.orthonormal_holomorphic_basis(manifold, p, rng, pd.metric)
            bases.append(basis)
            sums.append(inv.basis_sum(pd, basis))
        sums = np.array(sums)
        spread = float(sums.std())
        residuals.append(spread)
        outlier = int(np.argmax(np.abs(sums - sums.mean())))
        worst_cases.append(
            WorstCase(point=p, frame=_vecs(*bases[outlier]), residual=spread)
        )
    return _finish(cfg, manifold.name, residuals, worst_cases)


def _run_einstein(cfg, manifold, rng) -> CheckReport:
    residuals = []
    worst_cases = []
    for _ in range(cfg.points):
        p = manifold.sample_point(rng)
        pd = inv.point_data(manifold, p)
        lam = pd.tau / (2.0 * pd.m)
        best = None
        for _ in range(cfg.samples):
            x = geo.random_unit_tangent(pd.metric, pd.m, rng)
            y = geo.random_unit_tangent(pd.metric, pd.m, rng)
            r = abs(pd.ricci(x, y) - lam * pd.metric.inner(x, y))
            residuals.append(r)
            if best is None or r > best.residual:
                best = WorstCase(point=p, frame=_vecs(x, y), residual=r)
        worst_cases.append(best)
    return _finish(cfg, manifold.name, residuals, worst_cases)


def _run_ricci_offdiag(cfg, manifold, rng) -> CheckReport:
    if manifold.m < 2:
        raise ConfigError("the off-diagonal Ricci check needs m >= 2")
    residuals = []
    worst_cases = []
    for _ in range(cfg.points):
        p = manifold.sample_point(rng)
        pd = inv.point_data(manifold, p)
        best = None
        for _ in range(cfg.samples):
            y, z = geo.orthonormal_antiholomorphic_frame(
                manifold, p, 2, rng, pd.metric
            )
            r = abs(pd.ricci(y, z))
            residuals.append(r)
            if best is None or r > best.residual:
                best = WorstCase(point=p, frame=_vecs(y, z), residual=r)
        worst_cases.append(best)
    return _finish(cfg, manifold.name, residuals, worst_cases)


def _run_chsc(cfg, manifold, rng) -> CheckReport:
    values = []
    records = []
    for _ in range(cfg.points):
        p = manifold.sample_point(rng)
        pd = inv.point_data(manifold, p)
        for _ in range(cfg.samples):
            x = geo.random_unit_tangent(pd.metric, pd.m, rng)
            values.append(inv.holomorphic_sectional_curvature(pd, x))
            records.append((p, x))
    arr = np.array(values)
    mean = float(arr.mean())
    spread = float(arr.max() - arr.min()) / max(abs(mean), 1e-12)
    outlier = int(np.argmax(np.abs(arr - mean)))
    p, x = records[outlier]
    worst = [WorstCase(point=p, frame=_vecs(x), residual=spread)]
    return _finish(cfg, manifold.name, [spread], worst)


def _sample_immersion_points(cfg, immersion, rng) -> list[np.ndarray]:
    return [immersion.domain.sample(rng) for _ in range(cfg.points)]


def _immersion_report(cfg, immersion, residual_rows) -> CheckReport:
    residuals = []
    worst_cases = []
    for u, res in residual_rows:
        residuals.append(res)
        point = immersion.value(u)
        frame = [row for row in immersion.jacobian(u)]
        worst_cases.append(WorstCase(point=point, frame=frame, residual=res))
    name = f"{immersion.ambient.name}::{immersion.name}"
    return _finish(cfg, name, residuals, worst_cases)


def _run_umbilical(cfg, immersion, rng) -> CheckReport:
    rows = [
        (u, sub.umbilical_residual(immersion, u))
        for u in _sample_immersion_points(cfg, immersion, rng)
    ]
    return _immersion_report(cfg, immersion, rows)


def _run_codazzi(cfg, immersion, rng, umbilical: bool) -> CheckReport:
    rows = []
    n = immersion.n
    for u in _sample_immersion_points(cfg, immersion, rng):
        worst = 0.0
        for a in range(n):
            for b in range(a + 1, n):
                for c in range(n):
                    if umbilical:
                        r = sub.codazzi_residual_umbilical(immersion, u, a, b, c)
                    else:
                        r = sub.codazzi_residual_general(immersion, u, a, b, c)
                    worst = max(worst, r)
        rows.append((u, worst))
    return _immersion_report(cfg, immersion, rows)


_MANIFOLD_RUNNERS = {
    "bochner": _run_bochner,
    "lemma": _run_lemma,
    "basis-sum": _run_basis_sum,
    "einstein": _run_einstein,
    "ricci-offdiag": _run_ricci_offdiag,
    "chsc": _run_chsc,
    "reconstruct-2-3": _run_reconstruct,
}


def run_check(cfg: RunConfig) -> CheckReport:
    """Run one named check deterministically from its configuration."""
    rng = np.random.default_rng(cfg.seed)
    if cfg.check in MANIFOLD_CHECKS:
        if cfg.manifold is None:
            raise ConfigError(f"check {cfg.check!r} needs --manifold")
        manifold = models.load_manifold(cfg.manifold)
        report = _MANIFOLD_RUNNERS[cfg.check](cfg, manifold, rng)
    else:
        if cfg.immersion is None:
            raise ConfigError(f"check {cfg.check!r} needs --immersion")
        immersion = models.load_immersion(cfg.immersion)
        if cfg.check == "umbilical":
            report = _run_umbilical(cfg, immersion, rng)
        elif cfg.check == "parallel-h":
            rows = [
                (u, sub.parallel_h_residual_at(immersion, u))
                for u in _sample_immersion_points(cfg, immersion, rng)
            ]
            report = _immersion_report(cfg, immersion, rows)
        else:
            report = _run_codazzi(cfg, immersion, rng, cfg.check == "codazzi-umbilical")
    if cfg.output:
        with open(cfg.output, "w") as fh:
            json.dump(report.to_json_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")
    return report


def run_suite(
    manifold_source: str,
    tol: float = 1e-8,
    seed: int = 0,
    points: int = 5,
    samples: int = 200,
) -> tuple[list[CheckReport], list[str]]:
    """Run every manifold-level check and summarize the verification pipeline.

    Returns the reports plus human-readable summary lines stating whether
    the manifold is (at sampling fidelity) Bochner-flat, Einstein, and of
    constant holomorphic sectional curvature.
    """
    manifold = models.load_manifold(manifold_source)
    min_dim = {"lemma": 3, "ricci-offdiag": 2}
    reports = []
    skipped = []
    for name in MANIFOLD_CHECKS:
        if manifold.m < min_dim.get(name, 1):
            skipped.append(name)
            continue
        cfg = RunConfig(
            manifold=manifold_source,
            check=name,
            points=points,
            samples=samples,
            tol=tol,
            seed=seed,
        )
        reports.append(run_check(cfg))
    by_name = {r.check: r for r in reports}

    def ok(name: str) -> bool:
        return name in skipped or (name in by_name and by_name[name].passed)

    bochner_flat = ok("bochner") and ok("basis-sum") and ok("lemma")
    einstein = ok("einstein") and ok("ricci-offdiag")
    constant = ok("chsc")
    c_value, _ = inv.chsc_fit(
        manifold, points=2, samples=50, rng=np.random.default_rng(seed)
    )
    lines = []
    for name in skipped:
        lines.append(f"skipped {name} (needs complex dimension >= {min_dim[name]})")
    lines.append(f"Bochner-flat at sampling fidelity: {'yes' if bochner_flat else 'no'}")
    lines.append(f"Einstein at sampling fidelity: {'yes' if einstein else 'no'}")
    lines.append(
        "constant holomorphic sectional curvature: "
        + (f"yes (c = {c_value:.6g})" if constant else "no")
    )
    return reports, lines


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kahlercheck",
        description="Numerical verification of curvature identities for "
        "Kähler charts defined by symbolic potentials.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    check = commands.add_parser("check", help="run one named check")
    check.add_argument("name", choices=ALL_CHECKS)
    check.add_argument("--manifold", help="builtin URI or manifold spec file")
    check.add_argument("--immersion", help="immersion spec file or builtin:<name>")
    check.add_argument("--points", type=int, default=5)
    check.add_argument("--samples", type=int, default=200)
    check.add_argument("--tol", type=float, default=1e-8)
    check.add_argument("--seed", type=int, default=0)
    check.add_argument("--json", dest="output", help="write the report as JSON")

    suite = commands.add_parser("suite", help="run all manifold checks")
    suite.add_argument("--manifold", required=True)
    suite.add_argument("--points", type=int, default=5)
    suite.add_argument("--samples", type=int, default=200)
    suite.add_argument("--tol", type=float, default=1e-8)
    suite.add_argument("--seed", type=int, default=0)
    suite.add_argument("--json", dest="output")

    parse = commands.add_parser("parse", help="parse an expression (debugging aid)")
    parse.add_argument("--expr", required=True)
    parse.add_argument("--dim", type=int, required=True)
    parse.add_argument("--kinds", default="z,zb,u")
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "parse":
            tree = ex.parse_expression(args.expr, args.dim, args.kinds.split(","))
            print(ex.unparse(tree))
            print(f"nodes: {ex.node_count(tree)}")
            names = sorted(ex.unparse(v) for v in ex.variables(tree))
            print(f"variables: {', '.join(names) if names else '(none)'}")
            return 0
        if args.command == "check":
            cfg = RunConfig(
                manifold=args.manifold,
                check=args.name,
                immersion=args.immersion,
                points=args.points,
                samples=args.samples,
                tol=args.tol,
                seed=args.seed,
                output=args.output,
            )
            report = run_check(cfg)
            print(report.summary_line())
            if not report.passed and report.worst_cases:
                worst = max(report.worst_cases, key=lambda w: w.residual)
                print(f"  worst residual {worst.residual:.3e} at point "
                      f"{np.array2string(np.asarray(worst.point), precision=4)}")
            return 0 if report.passed else 1
        # suite
        reports, lines = run_suite(
            args.manifold,
            tol=args.tol,
            seed=args.seed,
            points=args.points,
            samples=args.samples,
        )
        for report in reports:
            print(report.summary_line())
        for line in lines:
            print(line)
        if args.output:
            payload = [r.to_json_dict() for r in reports]
            with open(args.output, "w") as fh:
                json.dump(payload, fh, indent=2, sort_keys=True)
                fh.write("\n")
        return 0 if all(r.passed for r in reports) else 1
    except BrokenPipeError:
        raise
    except Exception as err:  # config, parse, domain and numeric errors -> 2
        print(f"error: {err}", file=sys.stderr)
        return 2


def console_main() -> None:
    sys.exit(main())


if __name__ == "__main__":
    console_main()
