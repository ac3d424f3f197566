"""Command-line front end.

Exit codes: 0 success, 1 a checked assertion failed, 2 usage or input error.
"""

from __future__ import annotations

import math
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional

import click

from .errors import DomainError, ExpansionLimitError, InvalidEndpointError, UnreachableError, UndefinedResultError
from .experiments import ExperimentConfig, run_suite
from .fractals import DEFAULT_LIMIT, HoleyStaircase, ObstacleSet, TaborGrid, obstacle_set, rect_count, stage_measures
from .interchange import dump_json, fmt, load_obstacles, obstacles_to_json, parse_point, parse_spec, spec_to_string, write_csv
from .monotonicity import builtin_sample, cone_image_check, delta_report, read_map_sample
from .shortest_path import detour_bound, detour_construct, esp_grid_oracle, esp_visibility, lemma_bound, removability_sweep
from .thinness import claim1_certificate, claim1_sample_lines, cone_reach_feasible, segment_witness, slope_from_angle

_INPUT_ERRORS = (DomainError, InvalidEndpointError, ExpansionLimitError, UndefinedResultError, ValueError, ZeroDivisionError)


def _round(x):
    if isinstance(x, float):
        return float(fmt(x)) if math.isfinite(x) else x
    if isinstance(x, dict):
        return {k: _round(v) for k, v in x.items()}
    if isinstance(x, list):
        return [_round(v) for v in x]
    return x


def _emit(text: str, out: Optional[str]) -> None:
    if out:
        Path(out).write_text(text)
    else:
        click.echo(text, nl=False)


def _range(text: str) -> list[int]:
    try:
        if ":" in text:
            lo, hi = text.split(":")
            return list(range(int(lo), int(hi) + 1))
        return [int(v) for v in text.split(",")]
    except ValueError:
        raise click.BadParameter(f"expected 'lo:hi' or a comma list, got {text!r}") from None


def _obstacles(spec: Optional[str], path: Optional[str], limit: int = DEFAULT_LIMIT) -> ObstacleSet:
    if spec and path:
        raise click.UsageError("give either --spec or --obstacles, not both")
    if path:
        return load_obstacles(path)
    return obstacle_set(parse_spec(spec or "empty"), limit)


def _guard(fn):
    """Translate domain errors into exit code 2 with a one-line diagnostic."""

    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except click.ClickException:
            raise
        except UnreachableError as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
        except _INPUT_ERRORS as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(2)

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


_spec_opt = click.option("--spec", help="Generator string, e.g. cantor-product:1/3:3, fat-cantor:0.08:4, holey-staircase:4, tabor:7:8:1/32.")
_obs_opt = click.option("--obstacles", "obstacles_path", type=click.Path(exists=True, dir_okay=False), help="JSON obstacle file.")
_from_opt = click.option("--from", "a", required=True, help="Start point x,y (rationals as p/q).")
_to_opt = click.option("--to", "b", required=True, help="End point x,y.")
_out_opt = click.option("--out", type=click.Path(dir_okay=False), help="Write output to a file instead of stdout.")


@click.group()
@click.version_option(package_name="artifact")
def cli():
    """Intrinsic-metric experiments on finite-stage fractal obstacles."""


@cli.command()
@click.option("--spec", required=True)
@click.option("--limit", type=int, default=DEFAULT_LIMIT, show_default=True, help="Maximum explicit rectangle count.")
@_out_opt
@_guard
def generate(spec, limit, out):
    """Expand a spec to a JSON obstacle file (implicit handle above the limit)."""
    fs = parse_spec(spec)
    obs = obstacle_set(fs, limit)
    m = stage_measures(fs)
    body = obstacles_to_json(obs)
    body["meta"] = {
        "spec": spec_to_string(fs),
        "count": rect_count(fs),
        "implicit": obs.implicit,
        "linear": None if m.linear is None else str(m.linear),
        "planar": str(m.planar),
        "boundary": str(m.boundary),
        "coverSum": float(fmt(m.cover_sum)),
    }
    _emit(dump_json(body), out)


@cli.command()
@_spec_opt
@_obs_opt
@_from_opt
@_to_opt
@click.option("--method", type=click.Choice(["visibility", "grid"]), default="visibility", show_default=True)
@click.option("--resolution", default="1/256", show_default=True, help="Grid cell size for --method grid.")
@click.option("--seed", type=int, default=0, show_default=True)
@_out_opt
@_guard
def esp(spec, obstacles_path, a, b, method, resolution, seed, out):
    """Shortest obstacle-avoiding path as JSON {length, gap, vertices}."""
    obs = _obstacles(spec, obstacles_path)
    pa, pb = parse_point(a), parse_point(b)
    if method == "grid":
        res = esp_grid_oracle(pa, pb, obs, Fraction(resolution), seed=seed)
    else:
        res = esp_visibility(pa, pb, obs)
    body = res.to_json()
    chk = lemma_bound(pa, pb, obs, res.gap)
    body["lemmaBound"] = chk.bound
    if method == "grid":
        body["seed"] = seed
    _emit(dump_json(_round(body)), out)


@cli.command()
@_spec_opt
@_obs_opt
@_from_opt
@_to_opt
@_out_opt
@_guard
def detour(spec, obstacles_path, a, b, out):
    """Straight segment with each crossed rectangle replaced by its shorter perimeter arc."""
    obs = _obstacles(spec, obstacles_path)
    pa, pb = parse_point(a), parse_point(b)
    res = detour_construct(pa, pb, obs)
    body = res.to_json()
    body["bound"] = detour_bound(pa, pb, obs)
    _emit(dump_json(_round(body)), out)
    if res.length > body["bound"] + 1e-12:
        sys.exit(1)


@cli.command()
@click.option("--spec", required=True, help="Family with any stage, e.g. cantor-product:1/3:1.")
@click.option("--stages", default="1:5", show_default=True)
@_from_opt
@_to_opt
@_out_opt
@_guard
def sweep(spec, stages, a, b, out):
    """Exact gaps over stages: CSV stage, rects, length, gap, boundH1, lemmaBound, ratio."""
    fs = parse_spec(spec)
    cfg = ExperimentConfig.from_env()
    rows = removability_sweep(fs, _range(stages), parse_point(a), parse_point(b), cfg.map)
    _emit(write_csv(rows[0].HEADER if rows else (), [r.values() for r in rows]), out)
    if any(r.gap > r.lemma_bound for r in rows):
        sys.exit(1)


def _slope(slope: Optional[str], angle: Optional[float]) -> Fraction:
    if (slope is None) == (angle is None):
        raise click.UsageError("give exactly one of --slope or --angle")
    if slope is not None:
        return Fraction(slope)
    s = slope_from_angle(angle)
    click.echo(f"angle {angle!r} replaced by rational slope {s} (tan = {math.tan(angle):.12g})", err=True)
    return s


@cli.command()
@_spec_opt
@_obs_opt
@_from_opt
@_to_opt
@click.option("--slope", help="Cone slope tan(eps) as a rational p/q.")
@click.option("--angle", type=float, help="Cone half-angle in radians (converted to a rational slope).")
@click.option("--witness-out", type=click.Path(dir_okay=False), help="Write the feasible polyline as JSON.")
@_out_opt
@_guard
def lipthin(spec, obstacles_path, a, b, slope, angle, witness_out, out):
    """Exact cone-path feasibility: CSV slope, feasible, eventCount."""
    obs = _obstacles(spec, obstacles_path)
    s = _slope(slope, angle)
    res = cone_reach_feasible(parse_point(a), parse_point(b), s, obs)
    _emit(write_csv(("slope", "feasible", "eventCount"), [(res.slope, res.feasible, res.event_count)]), out)
    if witness_out and res.witness is not None:
        Path(witness_out).write_text(dump_json({"vertices": [[str(v.x), str(v.y)] for v in res.witness.vertices]}))


@cli.command("interval-thin")
@_spec_opt
@_obs_opt
@_from_opt
@_to_opt
@click.option("--radius", default="1/4", show_default=True, help="Ball radius around each endpoint.")
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_out_opt
@_guard
def interval_thin(spec, obstacles_path, a, b, radius, samples, seed, out):
    """Search for an avoiding segment between two balls: CSV found, samples, seed."""
    target = parse_spec(spec) if spec and not obstacles_path else _obstacles(spec, obstacles_path)
    res = segment_witness(parse_point(a), parse_point(b), Fraction(radius), target, samples, seed)
    rows = [(res.found, res.samples, res.seed)]
    text = write_csv(("found", "samples", "seed"), rows)
    if res.found:
        text += f"# witness {res.segment.p.x},{res.segment.p.y} -> {res.segment.q.x},{res.segment.q.y}\n"
    _emit(text, out)


@cli.command()
@click.option("--levels", default="7:8", show_default=True, help="minLevel:maxLevel of the Tabor grid.")
@click.option("--delta", default="1/32", show_default=True)
@click.option("--lines", type=int, default=10_000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@_out_opt
@_guard
def claim1(levels, delta, lines, seed, out):
    """Blocking certificate plus exact line sampling: CSV count, allHit, certificate."""
    lv = _range(levels)
    spec = TaborGrid(lv[0], lv[-1], Fraction(delta))
    cert = claim1_certificate(spec.delta)
    res = claim1_sample_lines(spec, lines, seed)
    text = write_csv(("count", "allHit", "certificate", "seed"), [(res.count, res.all_hit, cert, seed)])
    if res.counterexample is not None:
        c = res.counterexample
        text += f"# miss {c.p.x},{c.p.y} -> {c.q.x},{c.q.y}\n"
    _emit(text, out)
    if not res.all_hit:
        sys.exit(1)


@cli.command()
@click.option("--stages", default="2:6", show_default=True)
@click.option("--slope", default="31/100", show_default=True)
@click.option("--from", "a", default="0,1/3", show_default=True)
@click.option("--to", "b", default="1,2/3", show_default=True)
@_out_opt
@_guard
def staircase(stages, slope, a, b, out):
    """Cone-path decisions across staircase stages: CSV stage, slope, feasible, eventCount."""
    s = Fraction(slope)
    rows = []
    for n in _range(stages):
        r = cone_reach_feasible(parse_point(a), parse_point(b), s, HoleyStaircase(n), witness=False)
        rows.append((n, r.slope, r.feasible, r.event_count))
    _emit(write_csv(("stage", "slope", "feasible", "eventCount"), rows), out)


@cli.command()
@click.option("--map", "name", default="neg-inverse-sector", show_default=True, help="Builtin: identity, neg-inverse-sector, x-plus-unit.")
@click.option("--input", "input_path", type=click.Path(exists=True, dir_okay=False), help="CSV sample x1,x2,f1,f2 (overrides --map).")
@click.option("--samples", type=int, default=1000, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--cone", help="Also check cone images: theta,delta with the first sample point as apex and axis (1,0).")
@_out_opt
@_guard
def monotone(name, input_path, samples, seed, cone, out):
    """Empirical delta-monotonicity: CSV map, seed, pairs, degenerate, deltaHat[, coneImage]."""
    s = read_map_sample(input_path) if input_path else builtin_sample(name, samples, seed)
    rep = delta_report(s)
    header = ["map", "seed", "pairs", "degenerate", "deltaHat"]
    row = [s.name, "" if input_path else seed, rep.pairs, rep.degenerate, rep.delta]
    if cone:
        theta, delta = (float(v) for v in cone.split(","))
        header.append("coneImage")
        row.append(cone_image_check(s, s.x[0], (1.0, 0.0), theta, delta))
    _emit(write_csv(header, [row]), out)


@cli.command()
@click.option("--seed", type=int, default=7, show_default=True)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), help="Directory for CSV tables and the report.")
@click.option("--only", help="Comma list of criterion numbers (default: all ten).")
@click.option("--scale", type=float, default=1.0, show_default=True, help="Sample-count multiplier; below 1 skips runtime limits.")
@click.option("--arithmetic", type=click.Choice(["exact"]), default="exact", show_default=True)
def accept(seed, out_dir, only, scale, arithmetic):
    """Run the acceptance suite; exit 1 if any criterion fails."""
    wanted = _range(only) if only else None
    cfg = ExperimentConfig.from_env(seed=seed, output=Path(out_dir) if out_dir else None, scale=scale, arithmetic=arithmetic)
    report = run_suite(cfg, wanted)
    for r in report.results:
        click.echo(r.line())
    click.echo(f"tables: {report.config['output']}")
    sys.exit(0 if report.passed else 1)


def main():
    cli(prog_name="intrinsica")


if __name__ == "__main__":
    main()
