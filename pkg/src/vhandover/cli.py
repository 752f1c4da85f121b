"""Command-line entry point: ``vhandover {run,estimate,solve,rank}``.

Exit codes: 0 success, 1 validation or parse failure, 2 I/O or numeric
failure.
"""

from __future__ import annotations

import argparse
import csv
import math
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import cost_engine, estimator, solver
from .errors import ConvergenceError, DimensionError, DomainError, ScenarioError
from .sim import band_occupancy, load_scenario, ping_pong_count
from .sim.io import fmt, write_events, write_trace

EXIT_OK, EXIT_INVALID, EXIT_IO = 0, 1, 2


class ParseError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_INVALID, f"{self.prog}: error: {message}\n")


def _read_rows(path: Path) -> list[tuple[int, list[str]]]:
    """Nonblank CSV rows with their 1-based line numbers."""
    with path.open(encoding="utf-8", newline="") as fh:
        return [(i, [c.strip() for c in row]) for i, row in enumerate(csv.reader(fh), start=1)
                if row and any(c.strip() for c in row) and not row[0].lstrip().startswith("#")]


def _float(text: str, path: Path, line: int) -> float:
    try:
        v = float(text)
    except ValueError:
        raise ParseError(f"{path}:{line}: not a number: {text!r}") from None
    if not math.isfinite(v):
        raise ParseError(f"{path}:{line}: non-finite value {text!r}")
    return v


def read_samples(path: Path) -> np.ndarray:
    vals = []
    for line, row in _read_rows(path):
        if len(row) != 1:
            raise ParseError(f"{path}:{line}: expected one value per line")
        v = _float(row[0], path, line)
        if v < 0:
            raise ParseError(f"{path}:{line}: negative amplitude {v!r}")
        vals.append(v)
    if not vals:
        raise ParseError(f"{path}: no samples")
    return np.asarray(vals)


def read_matrix(path: Path) -> np.ndarray:
    rows = [[_float(c, path, line) for c in row] for line, row in _read_rows(path)]
    if not rows:
        raise ParseError(f"{path}: empty matrix")
    widths = {len(r) for r in rows}
    if len(widths) != 1:
        raise ParseError(f"{path}: rows have differing lengths {sorted(widths)}")
    return np.asarray(rows)


def read_candidates(path: Path) -> list[cost_engine.NetworkProfile]:
    out = []
    for line, row in _read_rows(path):
        if row[0].lower() == "id":
            continue
        if len(row) < 5:
            raise ParseError(f"{path}:{line}: expected id,technology,rss_dbm,latency_ms,coverage_radius_m")
        try:
            out.append(cost_engine.NetworkProfile(
                id=row[0], technology=row[1],
                rss_dbm=_float(row[2], path, line),
                latency_ms=_float(row[3], path, line),
                coverage_radius_m=_float(row[4], path, line),
                bandwidth_kbps=_float(row[5], path, line) if len(row) > 5 and row[5] else None,
            ))
        except ParseError:
            raise
        except ValueError as exc:
            raise ParseError(f"{path}:{line}: {exc}") from None
    if not out:
        raise ParseError(f"{path}: no candidates")
    return out


def read_weights(path: Path) -> cost_engine.WeightMatrix:
    rows = _read_rows(path)
    params = cost_engine.DEFAULT_PARAMETERS
    if rows and rows[0][1] and not _is_number(rows[0][1][0]):
        params = tuple(rows[0][1])
        rows = rows[1:]
    data = [[_float(c, path, line) for c in row] for line, row in rows]
    if not data:
        raise ParseError(f"{path}: no weight rows")
    if any(len(r) != len(params) for r in data):
        raise ParseError(f"{path}: every weight row needs {len(params)} entries ({', '.join(params)})")
    return cost_engine.WeightMatrix(np.asarray(data), params)


def _is_number(text: str) -> bool:
    try:
        float(text)
    except ValueError:
        return False
    return True


def _run_one(scenario, out_prefix: str, label: str = "") -> str:
    trace, events = scenario.run()
    ids = [n.id for n in scenario.networks]
    with open(f"{out_prefix}.trace.csv", "w", encoding="utf-8", newline="") as fh:
        write_trace(fh, trace, ids)
    with open(f"{out_prefix}.events.csv", "w", encoding="utf-8", newline="") as fh:
        write_events(fh, events)
    rep = scenario.report
    occ = band_occupancy(trace, rep.band_db)
    lines = [
        f"{label}seed={scenario.seed}",
        f"{label}handovers={len(events)}",
        f"{label}ping_pong={ping_pong_count(events, rep.ping_pong_window_s)}",
        f"{label}band_db={fmt(rep.band_db[0])},{fmt(rep.band_db[1])}",
        f"{label}band_occupancy={fmt(occ)}",
        f"{label}band_floor={fmt(rep.band_floor)}",
    ]
    return "\n".join(lines)


def cmd_run(args) -> int:
    path = Path(args.scenario)
    try:
        scenario = load_scenario(path)
    except OSError as exc:
        print(f"error: cannot read scenario {path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ScenarioError as exc:
        print(f"error: scenario {path} is invalid:", file=sys.stderr)
        for v in exc.violations:
            print(f"  - {v}", file=sys.stderr)
        return EXIT_INVALID
    if args.seed is not None:
        scenario = scenario.with_overrides(seed=args.seed)
    prefix = args.out or path.stem
    try:
        scenario.validate()
        if args.sweep and args.sweep > 1:
            seeds = [scenario.seed + i for i in range(args.sweep)]
            jobs = [(scenario.with_overrides(seed=s), f"{prefix}.seed{s}", f"seed{s}.") for s in seeds]
            with ThreadPoolExecutor() as pool:
                summaries = list(pool.map(lambda j: _run_one(*j), jobs))
        else:
            summaries = [_run_one(scenario, prefix)]
    except ScenarioError as exc:
        for v in exc.violations:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_INVALID
    except OSError as exc:
        print(f"error: cannot write output {prefix}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    print("\n".join(summaries))
    return EXIT_OK


def cmd_estimate(args) -> int:
    path = Path(args.samples)
    try:
        xs = read_samples(path)
    except OSError as exc:
        print(f"error: cannot read {path}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    try:
        summary = estimator.summarize(xs)
        ref_lam = args.ref_lambda if args.ref_lambda is not None else summary.mle_lambda
        c = estimator.threshold_for_alpha(ref_lam, args.alpha)
        k = args.k if args.k is not None else 0.1 * summary.population_mean
        bound = estimator.chebyshev_bound(summary.mle_lambda, summary.n, k)
        interval = estimator.mean_interval(summary.mle_lambda, k)
    except DomainError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    print(f"n={summary.n}")
    print(f"sample_mean={fmt(summary.sample_mean)}")
    print(f"mle_lambda={fmt(summary.mle_lambda)}")
    print(f"population_mean={fmt(summary.population_mean)}")
    print(f"population_sd={fmt(summary.population_sd)}")
    print(f"alpha={fmt(args.alpha)}")
    print(f"threshold={fmt(c)}")
    print(f"k={fmt(k)}")
    print(f"chebyshev_bound={fmt(bound)}")
    print(f"mean_interval={fmt(interval.lower)},{fmt(interval.upper)}")
    print(f"verdict={'accept' if estimator.accept_signal(summary, c) else 'reject'}")
    return EXIT_OK


def cmd_solve(args) -> int:
    try:
        a = read_matrix(Path(args.a))
        b = read_matrix(Path(args.b))
    except OSError as exc:
        print(f"error: cannot read {exc.filename}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    # a single row of b values is read as a column vector
    if b.shape[0] == 1 and b.shape[1] == a.shape[0] and a.shape[0] != 1:
        b = b.T
    try:
        x = solver.pinv_solve(a, b, args.tol)
    except (DimensionError, ConvergenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for row in x.reshape(-1, 1) if x.ndim == 1 else x:
        print(",".join(fmt(v) for v in row))
    return EXIT_OK


def cmd_rank(args) -> int:
    try:
        cands = read_candidates(Path(args.candidates))
        w = read_weights(Path(args.weights))
    except OSError as exc:
        print(f"error: cannot read {exc.filename}: {exc.strerror or exc}", file=sys.stderr)
        return EXIT_IO
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    problems = cost_engine.validate_weights(w)
    if problems:
        for v in problems:
            print(f"error: {v}", file=sys.stderr)
        return EXIT_INVALID
    try:
        ranked = cost_engine.rank_networks(cands, w, serving=args.serving)
    except (KeyError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    for nid, z in ranked:
        print(f"{nid},{fmt(z)}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="vhandover", description="Cost-based vertical handover simulator and estimation tools.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    r = sub.add_parser("run", help="simulate a scenario and write trace/events CSV")
    r.add_argument("--scenario", required=True, metavar="PATH", help="JSON scenario file")
    r.add_argument("--seed", type=int, metavar="U64", help="override the scenario seed")
    r.add_argument("--out", metavar="PREFIX", help="output prefix (default: scenario file stem)")
    r.add_argument("--sweep", type=int, metavar="N", help="run N consecutive seeds")
    r.set_defaults(func=cmd_run)

    e = sub.add_parser("estimate", help="estimate the Rayleigh scale from amplitude samples")
    e.add_argument("samples", metavar="SAMPLES", help="CSV with one amplitude per line")
    e.add_argument("--alpha", type=float, default=estimator.DEFAULT_ALPHA, help="rejection level (default 0.05)")
    e.add_argument("--k", type=float, help="Chebyshev slack (default: 10%% of the estimated mean)")
    e.add_argument("--lambda", dest="ref_lambda", type=float, metavar="FLOAT",
                   help="reference scale for the acceptance threshold (default: the estimate)")
    e.set_defaults(func=cmd_estimate)

    s = sub.add_parser("solve", help="minimum-norm least-squares solve of A x = b")
    s.add_argument("a", metavar="A_CSV")
    s.add_argument("b", metavar="B_CSV")
    s.add_argument("--tol", type=float, help="singular-value cutoff")
    s.set_defaults(func=cmd_solve)

    k = sub.add_parser("rank", help="rank candidate networks by cost")
    k.add_argument("candidates", metavar="CANDIDATES_CSV")
    k.add_argument("weights", metavar="WEIGHTS_CSV")
    k.add_argument("--serving", metavar="ID", help="currently serving network (wins ties)")
    k.set_defaults(func=cmd_rank)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
