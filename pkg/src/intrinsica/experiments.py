"""Experiment configuration, seeded scenes and the acceptance suite.

Every criterion writes a CSV table ``criterion_NN.csv`` whose body depends
only on the configuration (seed included); wall-clock times go to
``summary.txt`` and ``report.json`` instead, so that re-runs compare
byte for byte.
"""

from __future__ import annotations

import json
import math
import os
import tempfile
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import __version__
from .fractals import (
    CantorProduct,
    FatCantorProduct,
    HoleyStaircase,
    ObstacleSet,
    TaborGrid,
    box_dimension,
    fat_cantor_measure,
    generate,
)
from .geometry import AxisRect, Point, chord_cone_check
from .interchange import write_csv
from .monotonicity import delta_report, min_inner_product, sample_identity, sample_neg_inverse_sector, sample_x_plus_unit
from .shortest_path import (
    PathResult,
    detour_bound,
    detour_construct,
    esp_grid_oracle,
    esp_visibility,
    lemma_bound,
    path_is_valid,
    removability_sweep,
)
from .thinness import claim1_certificate, claim1_sample_lines, cone_reach_feasible, segment_witness

DEFAULT_SEED = 7
TITLES = {
    1: "fat product lower bound",
    2: "removability convergence",
    3: "length-estimate inequality",
    4: "detour construction",
    5: "grid oracle agreement",
    6: "staircase blocking",
    7: "tabor grid blocking",
    8: "monotonicity",
    9: "box dimension",
    10: "determinism",
}
RUNTIME_LIMITS = {1: 120.0, 2: 300.0, 4: 60.0, 6: 60.0, 7: 600.0}
CANTOR_GAP_THRESHOLD = 0.15
ORACLE_RESOLUTION = Fraction(1, 243)


@dataclass
class ExperimentConfig:
    seed: int = DEFAULT_SEED
    threads: int = 1
    output: Optional[Path] = None
    arithmetic: str = "exact"
    scale: float = 1.0  # sample counts multiplier, for quick runs; 1.0 is the acceptance setting

    @classmethod
    def from_env(cls, **kwargs) -> "ExperimentConfig":
        threads = int(os.environ.get("INTRINSICA_THREADS", "1") or 1)
        kwargs.setdefault("threads", max(1, threads))
        return cls(**kwargs)

    def substream(self, *keys: int) -> int:
        """Deterministic 63-bit seed for a sub-experiment."""
        return int(np.random.SeedSequence([self.seed, *keys]).generate_state(1, np.uint64)[0]) >> 1

    def count(self, n: int) -> int:
        return max(1, int(round(n * self.scale)))

    def map(self, fn: Callable, items: Sequence) -> list:
        items = list(items)
        if self.threads <= 1 or len(items) <= 1:
            return [fn(x) for x in items]
        with ThreadPoolExecutor(max_workers=self.threads) as pool:
            return list(pool.map(fn, items))


@dataclass
class CriterionResult:
    number: int
    title: str
    passed: bool
    detail: str
    header: tuple = ()
    rows: list = field(default_factory=list)
    seconds: float = 0.0

    def line(self) -> str:
        return f"criterion {self.number:2d} [{'PASS' if self.passed else 'FAIL'}] {self.title}: {self.detail}"


# -- scenes ------------------------------------------------------------------------


def random_scene(seed: int, max_rects: int, grid: int, max_cells: int = 4) -> tuple[Point, Point, ObstacleSet]:
    """Seeded disjoint rectangles on the lattice ``Z^2 / grid`` inside ``[1/16, 15/16]^2``.

    Closures are kept disjoint by requiring at least one lattice step between
    rectangles.  Endpoints sit on the lines ``x = 0`` and ``x = 1``.
    """
    rng = np.random.default_rng(seed)
    target = int(rng.integers(1, max_rects + 1))
    lo, hi = grid // 16, grid - grid // 16
    placed: list[tuple[int, int, int, int]] = []
    attempts = 0
    while len(placed) < target and attempts < 50 * target:
        attempts += 1
        w, h = (int(v) for v in rng.integers(1, max_cells + 1, 2))
        x0 = int(rng.integers(lo, hi - w + 1))
        y0 = int(rng.integers(lo, hi - h + 1))
        box = (x0, y0, x0 + w, y0 + h)
        if all(box[2] < q[0] or q[2] < box[0] or box[3] < q[1] or q[3] < box[1] for q in placed):
            placed.append(box)
    rects = [AxisRect(*(Fraction(v, grid) for v in q)) for q in placed]
    ya = Fraction(int(rng.integers(grid // 8, grid - grid // 8 + 1)), grid)
    yb = Fraction(int(rng.integers(grid // 8, grid - grid // 8 + 1)), grid)
    return Point(Fraction(0), ya), Point(Fraction(1), yb), ObstacleSet.from_rects(rects)


class SuiteContext:
    """Memoised experiment results shared between criteria."""

    def __init__(self, config: ExperimentConfig):
        self.config = config
        self._cache: dict = {}

    def memo(self, key, fn):
        if key not in self._cache:
            self._cache[key] = fn()
        return self._cache[key]

    def fat_runs(self):
        def run():
            out = []
            for n in range(1, 6):
                obs = generate(FatCantorProduct(Fraction(2, 25), n))
                out.append((n, obs, esp_visibility((0, 0), (1, 1), obs)))
            return out

        return self.memo("fat", run)

    def cantor_rows(self):
        return self.memo("cantor", lambda: removability_sweep(CantorProduct(Fraction(1, 3), 1), range(1, 6), (0, 0), (1, 1), self.config.map))

    def cantor_oracle(self):
        def run():
            obs = generate(CantorProduct(Fraction(1, 3), 5))
            return esp_grid_oracle((0, 0), (1, 1), obs, ORACLE_RESOLUTION, seed=self.config.substream(2))

        return self.memo("cantor-oracle", run)

    def scenes(self, tag: int, count: int, max_rects: int, grid: int, max_cells: int):
        def build():
            def one(i):
                seed = self.config.substream(tag, i)
                a, b, obs = random_scene(seed, max_rects, grid, max_cells)
                return i, seed, a, b, obs, esp_visibility(a, b, obs)

            return self.config.map(one, range(count))

        return self.memo(("scenes", tag), build)


# -- criteria ----------------------------------------------------------------------


def criterion_1(ctx: SuiteContext) -> CriterionResult:
    rows, ok = [], True
    for n, obs, res in ctx.fat_runs():
        m = fat_cantor_measure(Fraction(2, 25), n)
        lower = 2 * float(m)
        good = res.length >= lower - 1e-9
        if n >= 2:
            good = good and res.length > 1.8 and res.gap > 1.8 - math.sqrt(2)
        ok &= good
        rows.append((n, len(obs), res.length, lower, res.gap, good))
    worst = min(r[2] - r[3] for r in rows)
    return CriterionResult(1, TITLES[1], ok, f"min(length - 2 m_n) = {worst:.6g}", ("stage", "rects", "length", "lowerBound", "gap", "ok"), rows)


def criterion_2(ctx: SuiteContext) -> CriterionResult:
    sweep = ctx.cantor_rows()
    oracle = ctx.cantor_oracle()
    gaps = {r.stage: r.gap for r in sweep}
    ok = all(g > 0 for g in gaps.values()) and gaps[5] < gaps[1] / 2 and gaps[5] < CANTOR_GAP_THRESHOLD
    ok = ok and oracle.gap >= gaps[5] - 1e-12
    rows = [r.values() for r in sweep]
    rows.append(("oracle-5", sweep[-1].rects, oracle.length, oracle.gap, "", "", ""))
    detail = f"gap1 = {gaps[1]:.6g}, gap5 = {gaps[5]:.6g}, threshold {CANTOR_GAP_THRESHOLD}, oracle gap5 @1/243 = {oracle.gap:.6g}"
    return CriterionResult(2, TITLES[2], ok, detail, ("stage", "rects", "length", "gap", "boundH1", "lemmaBound", "ratio"), rows)


def criterion_3(ctx: SuiteContext) -> CriterionResult:
    experiments: list[tuple[str, Point, Point, ObstacleSet, PathResult]] = []
    for n, obs, res in ctx.fat_runs():
        experiments.append((f"fat-{n}", Point(0, 0), Point(1, 1), obs, res))
    for r in ctx.cantor_rows():
        obs = generate(CantorProduct(Fraction(1, 3), r.stage))
        experiments.append((f"cantor-{r.stage}", Point(0, 0), Point(1, 1), obs, esp_visibility((0, 0), (1, 1), obs)))
    for tag, scenes in ((4, _detour_scenes(ctx)), (5, _oracle_scenes(ctx))):
        for i, _, a, b, obs, res in scenes:
            experiments.append((f"scene-{tag}-{i}", a, b, obs, res))
    rows, ok, worst = [], True, 0.0
    for name, a, b, obs, res in experiments:
        chk = lemma_bound(a, b, obs, res.gap)
        ok &= chk.holds
        worst = max(worst, chk.ratio)
        rows.append((name, res.gap, chk.bound, chk.boundary_h1, chk.ratio, chk.holds))
    detail = f"{len(rows)} experiments; max gap/H1(boundary) = {worst:.6g} (conjectured constant 1, not asserted)"
    return CriterionResult(3, TITLES[3], ok, detail, ("experiment", "gap", "lemmaBound", "boundH1", "ratio", "ok"), rows)


def _detour_scenes(ctx: SuiteContext):
    return ctx.scenes(4, 50, 200, 128, 6)


def _oracle_scenes(ctx: SuiteContext):
    return ctx.scenes(5, 20, 50, 32, 4)


def criterion_4(ctx: SuiteContext) -> CriterionResult:
    rows, ok = [], True
    for i, seed, a, b, obs, res in _detour_scenes(ctx):
        det = detour_construct(a, b, obs)
        bound = detour_bound(a, b, obs)
        valid = path_is_valid(det.path, obs) and det.path.first == a and det.path.last == b
        good = valid and det.length >= res.length - 1e-12 and det.length <= bound + 1e-12
        ok &= good
        rows.append((i, seed, len(obs), res.length, det.length, bound, valid, good))
    return CriterionResult(
        4, TITLES[4], ok, f"{len(rows)} scenes", ("scene", "seed", "rects", "esp", "detour", "bound", "valid", "ok"), rows
    )


def criterion_5(ctx: SuiteContext) -> CriterionResult:
    rows, ok, worst = [], True, 1.0
    res_list = _oracle_scenes(ctx)

    def one(item):
        i, seed, a, b, obs, res = item
        return esp_grid_oracle(a, b, obs, Fraction(1, 256), seed=seed)

    oracles = ctx.config.map(one, res_list)
    for (i, seed, a, b, obs, res), orc in zip(res_list, oracles):
        ratio = orc.length / res.length
        good = 1.0 - 1e-12 <= ratio <= 1.015 and path_is_valid(orc.path, obs)
        ok &= good
        worst = max(worst, ratio)
        rows.append((i, seed, len(obs), res.length, orc.length, ratio, good))
    return CriterionResult(
        5, TITLES[5], ok, f"max oracle/exact = {worst:.6g}", ("scene", "seed", "rects", "esp", "oracle", "ratio", "ok"), rows
    )


def criterion_6(ctx: SuiteContext) -> CriterionResult:
    a, b = (Fraction(0), Fraction(1, 3)), (Fraction(1), Fraction(2, 3))
    rows, ok = [], True
    for n in range(2, 7):
        r = cone_reach_feasible(a, b, Fraction(31, 100), HoleyStaircase(n), witness=False)
        ok &= not r.feasible
        rows.append((n, "31/100", r.feasible, r.event_count, ""))
    obs = generate(HoleyStaircase(4))
    r = cone_reach_feasible(a, b, Fraction(1), obs)
    certified = r.feasible and r.witness is not None
    if certified:
        certified = chord_cone_check(r.witness, math.atan(1.0) + 1e-9) and path_is_valid(r.witness, obs)
    ok &= certified
    rows.append((4, "1", r.feasible, r.event_count, certified))
    return CriterionResult(
        6, TITLES[6], ok, "slope 31/100 blocked on stages 2..6; slope 1 witness on stage 4 " + ("verified" if certified else "missing"),
        ("stage", "slope", "feasible", "eventCount", "witnessVerified"), rows,
    )


def criterion_7(ctx: SuiteContext) -> CriterionResult:
    cfg = ctx.config
    spec = TaborGrid(7, 8, Fraction(1, 32))
    cert_a, cert_b = claim1_certificate(Fraction(1, 32)), claim1_certificate(Fraction(1, 24))
    lines = claim1_sample_lines(spec, cfg.count(10_000), cfg.substream(7, 1))
    wit = segment_witness((Fraction(-1, 2), Fraction(1, 2)), (Fraction(3, 2), Fraction(1, 2)), Fraction(1, 4), spec,
                          cfg.count(100_000), cfg.substream(7, 2))
    ok = cert_a and not cert_b and lines.all_hit and not wit.found
    rows = [
        ("certificate", "1/32", cert_a, ""),
        ("certificate", "1/24", cert_b, ""),
        ("lines", lines.count, lines.all_hit, lines.seed),
        ("witness", wit.samples, wit.found, wit.seed),
    ]
    detail = f"{lines.count} lines all hit = {lines.all_hit}; witness in {wit.samples} samples: {wit.found}"
    return CriterionResult(7, TITLES[7], ok, detail, ("check", "parameter", "result", "seed"), rows)


def criterion_8(ctx: SuiteContext) -> CriterionResult:
    cfg = ctx.config
    n = cfg.count(1000)
    ident = delta_report(sample_identity(n, cfg.substream(8, 1)))
    sector = delta_report(sample_neg_inverse_sector(n, cfg.substream(8, 2)))
    skew_sample = sample_x_plus_unit(n, cfg.substream(8, 3))
    skew = delta_report(skew_sample)
    inner = min_inner_product(skew_sample)
    ok = ident.delta == 1.0 and sector.delta >= 0.5 - 1e-9 and skew.delta < 0.05 and inner > 0
    rows = [
        ("identity", ident.pairs, ident.delta, ""),
        ("neg-inverse-sector", sector.pairs, sector.delta, ""),
        ("x-plus-unit", skew.pairs, skew.delta, inner),
    ]
    detail = f"identity {ident.delta:.12g}, -1/z {sector.delta:.6g}, x+x/|x| {skew.delta:.3g} (min inner {inner:.3g})"
    return CriterionResult(8, TITLES[8], ok, detail, ("map", "pairs", "deltaHat", "minInner"), rows)


def criterion_9(ctx: SuiteContext) -> CriterionResult:
    sizes = [Fraction(1, 3**k) for k in range(1, 6)]
    slope, counts = box_dimension(CantorProduct(Fraction(1, 3), 5), sizes)
    target = math.log(4) / math.log(3)
    ok = abs(slope - 1.2619) <= 0.01
    rows = [(k, str(h), c) for k, (h, c) in enumerate(zip(sizes, counts), start=1)]
    rows.append(("slope", "", slope))
    return CriterionResult(9, TITLES[9], ok, f"slope {slope:.6g} vs log4/log3 = {target:.6g}", ("k", "gridSize", "count"), rows)


CRITERIA: dict[int, Callable[[SuiteContext], CriterionResult]] = {
    1: criterion_1,
    2: criterion_2,
    3: criterion_3,
    4: criterion_4,
    5: criterion_5,
    6: criterion_6,
    7: criterion_7,
    8: criterion_8,
    9: criterion_9,
}


# -- suite driver ------------------------------------------------------------------


@dataclass
class Report:
    config: dict
    results: list[CriterionResult]
    version: str = __version__
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.results)

    def summary(self) -> str:
        lines = [r.line() + f" ({r.seconds:.1f}s)" for r in self.results]
        lines.append(f"overall: {'PASS' if self.passed else 'FAIL'} in {self.seconds:.1f}s (seed {self.config['seed']})")
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "version": self.version,
            "config": self.config,
            "seconds": self.seconds,
            "passed": self.passed,
            "criteria": [
                {"number": r.number, "title": r.title, "passed": r.passed, "detail": r.detail, "seconds": r.seconds}
                for r in self.results
            ],
        }


def _timed(number: int, fn, ctx: SuiteContext) -> CriterionResult:
    t0 = time.perf_counter()
    res = fn(ctx)
    res.seconds = time.perf_counter() - t0
    limit = RUNTIME_LIMITS.get(number)
    if limit is not None and ctx.config.scale >= 1.0 and res.seconds >= limit:
        res.passed = False
        res.detail += f"; runtime {res.seconds:.1f}s exceeds {limit:.0f}s"
    return res


def write_tables(results: Sequence[CriterionResult], out: Path) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for r in results:
        write_csv(r.header, r.rows, out / f"criterion_{r.number:02d}.csv")


def run_criteria(config: ExperimentConfig, only: Optional[Sequence[int]] = None, ctx: Optional[SuiteContext] = None) -> list[CriterionResult]:
    ctx = ctx or SuiteContext(config)
    wanted = sorted(set(only or CRITERIA)) if only else sorted(CRITERIA)
    return [_timed(n, CRITERIA[n], ctx) for n in wanted if n in CRITERIA]


def compare_tables(first: Path, second: Path) -> list[str]:
    """Names of CSV files whose bytes differ (or exist on one side only)."""
    names = sorted({p.name for p in first.glob("*.csv")} | {p.name for p in second.glob("*.csv")})
    return [n for n in names if not ((first / n).exists() and (second / n).exists() and (first / n).read_bytes() == (second / n).read_bytes())]


def determinism_check(config: ExperimentConfig, reference: Path, only: Sequence[int]) -> CriterionResult:
    """Re-run the given criteria into a scratch directory and compare against ``reference``."""
    t0 = time.perf_counter()
    with tempfile.TemporaryDirectory() as tmp:
        again = run_criteria(config, only)
        write_tables(again, Path(tmp))
        diff = compare_tables(reference, Path(tmp))
    rows = [(f"criterion_{n:02d}.csv", f"criterion_{n:02d}.csv" not in diff) for n in sorted(only)]
    detail = "identical CSV bodies" if not diff else f"differing: {', '.join(diff)}"
    res = CriterionResult(10, TITLES[10], not diff, detail, ("file", "identical"), rows)
    res.seconds = time.perf_counter() - t0
    return res


def run_suite(config: ExperimentConfig, only: Optional[Sequence[int]] = None) -> Report:
    """Run the requested criteria (all by default), write CSVs and the report."""
    if config.arithmetic != "exact":
        raise ValueError("only exact arithmetic is supported by the acceptance suite")
    t0 = time.perf_counter()
    wanted = sorted(set(only)) if only else list(range(1, 11))
    base = [n for n in wanted if n != 10]
    out = config.output or Path(tempfile.mkdtemp(prefix="intrinsica-accept-"))
    out = Path(out)
    results = run_criteria(config, base) if base else []
    write_tables(results, out)
    if 10 in wanted:
        ref = base or sorted(CRITERIA)
        if not base:
            write_tables(run_criteria(config, ref), out)
        results.append(determinism_check(config, out, ref))
        write_tables(results[-1:], out)
    cfg = {k: (str(v) if isinstance(v, Path) else v) for k, v in asdict(config).items()}
    cfg["output"] = str(out)
    report = Report(cfg, results, seconds=time.perf_counter() - t0)
    (out / "summary.txt").write_text(report.summary())
    (out / "report.json").write_text(json.dumps(report.to_json(), indent=2) + "\n")
    return report
