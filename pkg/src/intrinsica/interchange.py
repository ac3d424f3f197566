"""Text formats: spec strings, JSON obstacle files, and CSV tables."""

from __future__ import annotations

import csv
import io
import json
from dataclasses import fields
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterable, Sequence, TextIO, Union

from .errors import DomainError
from .fractals import (
    CantorProduct,
    CustomRects,
    FatCantorProduct,
    FractalSpec,
    HoleyStaircase,
    ObstacleSet,
    TaborGrid,
    obstacle_set,
)
from .geometry import AxisRect, Point, rational

_SPEC_NAMES = {
    "cantor-product": CantorProduct,
    "fat-cantor": FatCantorProduct,
    "holey-staircase": HoleyStaircase,
    "tabor": TaborGrid,
    "custom": CustomRects,
}
_NAME_OF = {v: k for k, v in _SPEC_NAMES.items()}


def fmt(value: Any) -> str:
    """Report formatting: floats to 12 significant digits, rationals as ``p/q``."""
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "%.12g" % value
    if isinstance(value, Fraction):
        return str(value)
    if value is None:
        return ""
    return str(value)


def parse_point(text: str) -> Point:
    """``"x,y"`` with each coordinate an integer, decimal or ``p/q``."""
    parts = text.split(",")
    if len(parts) != 2:
        raise DomainError(f"expected a point 'x,y', got {text!r}")
    try:
        return Point(rational(parts[0]), rational(parts[1]))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad point {text!r}: {exc}") from None


def parse_spec(text: str) -> FractalSpec:
    """Parse ``cantor-product:1/3:3``, ``fat-cantor:0.08:4``, ``holey-staircase:4``, ``tabor:7:8:1/32`` or ``empty``."""
    name, *args = text.strip().split(":")
    try:
        if name == "empty":
            return CustomRects(())
        if name == "cantor-product":
            ratio, stage = args if len(args) == 2 else ("1/3", args[0])
            return CantorProduct(rational(ratio), int(stage))
        if name == "fat-cantor":
            gap, stage = args if len(args) == 2 else ("2/25", args[0])
            return FatCantorProduct(rational(gap), int(stage))
        if name == "holey-staircase":
            (stage,) = args
            return HoleyStaircase(int(stage))
        if name == "tabor":
            lo, hi, *rest = args
            return TaborGrid(int(lo), int(hi), rational(rest[0]) if rest else Fraction(1, 32))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"bad spec {text!r}: {exc}") from None
    raise DomainError(f"unknown spec {text!r}; expected one of cantor-product, fat-cantor, holey-staircase, tabor, empty")


def spec_to_string(spec: FractalSpec) -> str:
    if isinstance(spec, CantorProduct):
        return f"cantor-product:{spec.ratio}:{spec.stage}"
    if isinstance(spec, FatCantorProduct):
        return f"fat-cantor:{spec.total_gap}:{spec.stage}"
    if isinstance(spec, HoleyStaircase):
        return f"holey-staircase:{spec.stage}"
    if isinstance(spec, TaborGrid):
        return f"tabor:{spec.min_level}:{spec.max_level}:{spec.delta}"
    if isinstance(spec, CustomRects):
        return "empty" if not spec.rects else f"custom:{len(spec.rects)}"
    raise TypeError(spec)


def spec_to_json(spec: FractalSpec) -> dict:
    if isinstance(spec, CustomRects):
        return {"rects": [_rect_json(r) for r in spec.rects]}
    body: dict[str, Any] = {"variant": _NAME_OF[type(spec)]}
    for f in fields(spec):
        v = getattr(spec, f.name)
        body[f.name] = str(v) if isinstance(v, Fraction) else v
    return {"spec": body}


def spec_from_json(body: dict) -> FractalSpec:
    body = dict(body)
    cls = _SPEC_NAMES.get(body.pop("variant", None))
    if cls is None or cls is CustomRects:
        raise DomainError(f"unknown spec variant in {body!r}")
    kwargs = {}
    for f in fields(cls):
        if f.name in body:
            v = body[f.name]
            kwargs[f.name] = int(v) if f.name in ("stage", "min_level", "max_level") else rational(v)
    return cls(**kwargs)


def _rect_json(r: AxisRect) -> list[str]:
    return [str(rational(v)) for v in (r.x0, r.y0, r.x1, r.y1)]


def obstacles_to_json(obs: Union[ObstacleSet, FractalSpec]) -> dict:
    if isinstance(obs, ObstacleSet):
        if obs.implicit:
            return spec_to_json(obs.spec)
        return {"rects": [_rect_json(r) for r in obs.rects]}
    return spec_to_json(obs)


def obstacles_from_json(data: dict) -> ObstacleSet:
    """Load ``{"rects": [...]}`` (validated disjoint) or ``{"spec": {...}}``."""
    if "rects" in data:
        try:
            rects = [AxisRect.exact(*r) for r in data["rects"]]
        except (TypeError, ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"bad rectangle list: {exc}") from None
        return ObstacleSet.from_rects(rects, CustomRects(tuple(rects)))
    if "spec" in data:
        return obstacle_set(spec_from_json(data["spec"]))
    raise DomainError("obstacle JSON needs a 'rects' or 'spec' key")


def load_obstacles(path: Union[str, Path]) -> ObstacleSet:
    with open(path) as fh:
        return obstacles_from_json(json.load(fh))


def dump_json(data: Any) -> str:
    return json.dumps(data, indent=2, sort_keys=False) + "\n"


def write_csv(header: Sequence[str], rows: Iterable[Sequence[Any]], out: Union[str, Path, TextIO, None] = None) -> str:
    """Write a CSV table with fixed column order; returns the text."""
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([fmt(v) for v in row])
    text = buf.getvalue()
    if out is None:
        return text
    if isinstance(out, (str, Path)):
        Path(out).write_text(text)
    else:
        out.write(text)
    return text
