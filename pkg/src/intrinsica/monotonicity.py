"""Empirical delta-monotonicity of sampled planar maps.

A map is delta-monotone when ``<f(x) - f(y), x - y> >= delta |f(x) - f(y)| |x - y|``
for every pair of points.  :func:`delta_infimum` returns the largest such
delta supported by a finite sample, that is, the minimum pairwise cosine.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .errors import DomainError, UndefinedResultError

_CHUNK_ROWS = 512


@dataclass(frozen=True, eq=False)
class MapSample:
    """Sample points ``x`` (shape ``(n, 2)``) and their images ``fx``."""

    x: np.ndarray
    fx: np.ndarray
    name: str = "sample"

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).reshape(-1, 2)
        fx = np.asarray(self.fx, dtype=float).reshape(-1, 2)
        if x.shape != fx.shape:
            raise DomainError("points and images differ in count")
        if not np.isfinite(x).all() or not np.isfinite(fx).all():
            raise DomainError("sample contains non-finite values")
        if len(np.unique(x, axis=0)) != len(x):
            raise DomainError("sample points must be distinct")
        x.setflags(write=False)
        fx.setflags(write=False)
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "fx", fx)

    def __len__(self) -> int:
        return len(self.x)

    @classmethod
    def from_map(cls, f: Callable[[np.ndarray], np.ndarray], x: np.ndarray, name: str = "sample") -> "MapSample":
        x = np.asarray(x, dtype=float).reshape(-1, 2)
        return cls(x, f(x), name)

    def subset(self, idx) -> "MapSample":
        return MapSample(self.x[idx], self.fx[idx], self.name)

    def transformed(self, lam: float = 1.0, c=(0.0, 0.0), mu: float = 1.0, c2=(0.0, 0.0)) -> "MapSample":
        """Sample of ``mu f((x - c) / lam) + c2`` at the points ``lam x + c``."""
        return MapSample(lam * self.x + np.asarray(c, float), mu * self.fx + np.asarray(c2, float), self.name)


@dataclass(frozen=True)
class DeltaReport:
    delta: float
    pairs: int
    degenerate: int
    argmin: tuple[int, int]


def _cosine(u: np.ndarray, v: np.ndarray, ok: np.ndarray) -> np.ndarray:
    """Cosine of the angle between ``u`` and ``v`` as ``1 - |u/|u| - v/|v||^2 / 2``.

    Exact (1.0) when the two directions agree bit for bit.
    """
    nu = np.hypot(u[..., 0], u[..., 1])
    nv = np.hypot(v[..., 0], v[..., 1])
    nu = np.where(ok, nu, 1.0)[..., None]
    nv = np.where(ok, nv, 1.0)[..., None]
    w = u / nu - v / nv
    return 1.0 - 0.5 * (w * w).sum(axis=-1)


def delta_report(s: MapSample) -> DeltaReport:
    """Minimum of ``<df, dx> / (|df| |dx|)`` over pairs ``i < j`` with ``df != 0``."""
    n = len(s)
    if n < 2:
        raise DomainError("need at least two sample pairs")
    best, arg, used, degen = math.inf, (-1, -1), 0, 0
    x, fx = s.x, s.fx
    for start in range(0, n - 1, _CHUNK_ROWS):
        rows = np.arange(start, min(n - 1, start + _CHUNK_ROWS))
        dx = x[rows, None, :] - x[None, :, :]
        df = fx[rows, None, :] - fx[None, :, :]
        upper = np.arange(n)[None, :] > rows[:, None]
        zero = (df[..., 0] == 0) & (df[..., 1] == 0)
        ok = upper & ~zero
        degen += int((upper & zero).sum())
        used += int(ok.sum())
        if not ok.any():
            continue
        cos = np.where(ok, _cosine(dx, df, ok), np.inf)
        k = int(np.argmin(cos))
        i, j = divmod(k, n)
        if cos[i, j] < best:
            best, arg = float(cos[i, j]), (int(rows[i]), int(j))
    if used == 0:
        raise UndefinedResultError("every pair has f(x) = f(y)")
    return DeltaReport(max(-1.0, min(1.0, best)), used, degen, arg)


def delta_infimum(s: MapSample) -> float:
    return delta_report(s).delta


def min_inner_product(s: MapSample) -> float:
    """Minimum of ``<f(x) - f(y), x - y>`` over all pairs (strict monotonicity probe)."""
    n = len(s)
    best = math.inf
    for start in range(0, n - 1, _CHUNK_ROWS):
        rows = np.arange(start, min(n - 1, start + _CHUNK_ROWS))
        dx = s.x[rows, None, :] - s.x[None, :, :]
        df = s.fx[rows, None, :] - s.fx[None, :, :]
        ip = (dx * df).sum(axis=-1)
        ip = np.where(np.arange(n)[None, :] > rows[:, None], ip, np.inf)
        best = min(best, float(ip.min()))
    return best


def _angle(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    return np.arctan2(np.abs(u[:, 0] * v[1] - u[:, 1] * v[0]), u @ v)


def cone_image_violations(s: MapSample, p, v, theta: float, delta: float, slack: float = 1e-12) -> list[int]:
    """Indices of sample points in ``C(p, v, theta)`` whose images leave ``C(f(p), v, theta + arccos(delta))``."""
    if not -1.0 <= delta <= 1.0:
        raise DomainError("delta must lie in [-1, 1]")
    alpha = theta + math.acos(delta)
    if not alpha < math.pi / 2:
        raise DomainError("theta + arccos(delta) must be below pi/2")
    v = np.asarray(v, dtype=float)
    if not np.any(v):
        raise DomainError("cone axis must be nonzero")
    p = np.asarray(p, dtype=float)
    hit = np.flatnonzero((s.x == p).all(axis=1))
    if not len(hit):
        raise DomainError("cone apex must be one of the sample points")
    k = int(hit[0])
    dx = s.x - p
    df = s.fx - s.fx[k]
    others = np.flatnonzero((np.arange(len(s)) != k) & dx.any(axis=1))
    inside = others[_angle(dx[others], v) <= theta]
    moved = inside[df[inside].any(axis=1)]
    bad = moved[_angle(df[moved], v) > alpha + slack]
    return [int(i) for i in bad]


def cone_image_check(s: MapSample, p, v, theta: float, delta: float) -> bool:
    return not cone_image_violations(s, p, v, theta, delta)


# -- builtin maps ------------------------------------------------------------------


def identity(x: np.ndarray) -> np.ndarray:
    return np.array(x, dtype=float)


def neg_inverse(x: np.ndarray) -> np.ndarray:
    z = x[:, 0] + 1j * x[:, 1]
    w = -1.0 / z
    return np.stack([w.real, w.imag], axis=1)


def x_plus_unit(x: np.ndarray) -> np.ndarray:
    r = np.hypot(x[:, 0], x[:, 1])[:, None]
    return x + x / r


def sample_identity(n: int = 1000, seed: int = 0) -> MapSample:
    rng = np.random.default_rng(seed)
    return MapSample.from_map(identity, rng.uniform(-1.0, 1.0, (n, 2)), "identity")


def sample_neg_inverse_sector(n: int = 1000, seed: int = 0) -> MapSample:
    """``-1/z`` on ``|arg z| < pi/6`` with log-uniform modulus in ``[1e-3, 1e3]``."""
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(math.log(1e-3), math.log(1e3), n))
    th = rng.uniform(-math.pi / 6, math.pi / 6, n)
    th = np.where(th <= -math.pi / 6, 0.0, th)
    x = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    return MapSample.from_map(neg_inverse, x, "neg-inverse-sector")


def adversarial_points(ts: Sequence[float]) -> np.ndarray:
    """Pairs ``t^2 (1, 0)`` and ``t^4 (cos t, sin t)``; their cosine behaves like ``1.5 t``."""
    out = []
    for t in ts:
        out.append((t * t, 0.0))
        out.append((t**4 * math.cos(t), t**4 * math.sin(t)))
    return np.array(out, dtype=float)


def sample_x_plus_unit(n: int = 1000, seed: int = 0, adversarial: bool = True) -> MapSample:
    """``x + x/|x|`` on the annulus ``1e-3 <= |x| <= 10``, plus near-degenerate pairs."""
    rng = np.random.default_rng(seed)
    r = np.exp(rng.uniform(math.log(1e-3), math.log(10.0), n))
    th = rng.uniform(0.0, 2 * math.pi, n)
    x = np.stack([r * np.cos(th), r * np.sin(th)], axis=1)
    if adversarial:
        x = np.concatenate([x, adversarial_points(10.0 ** -np.linspace(1.0, 3.0, 9))])
    return MapSample.from_map(x_plus_unit, x, "x-plus-unit")


BUILTINS: dict[str, Callable[..., MapSample]] = {
    "identity": sample_identity,
    "neg-inverse-sector": sample_neg_inverse_sector,
    "x-plus-unit": sample_x_plus_unit,
}


def builtin_sample(name: str, n: int = 1000, seed: int = 0) -> MapSample:
    try:
        gen = BUILTINS[name]
    except KeyError:
        raise DomainError(f"unknown builtin map {name!r}; choose from {sorted(BUILTINS)}") from None
    return gen(n, seed)


# -- CSV ---------------------------------------------------------------------------

CSV_HEADER = ("x1", "x2", "f1", "f2")


def write_map_sample(s: MapSample, path: Union[str, Path], header: bool = True) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        if header:
            w.writerow(CSV_HEADER)
        for (x1, x2), (f1, f2) in zip(s.x.tolist(), s.fx.tolist()):
            w.writerow([repr(x1), repr(x2), repr(f1), repr(f2)])


def read_map_sample(path: Union[str, Path], name: Optional[str] = None) -> MapSample:
    rows = []
    with open(path, newline="") as fh:
        for row in csv.reader(fh):
            if not row or row[0].strip().startswith("#"):
                continue
            if tuple(c.strip() for c in row) == CSV_HEADER:
                continue
            if len(row) != 4:
                raise DomainError(f"expected 4 columns x1,x2,f1,f2, got {row!r}")
            rows.append([float(c) for c in row])
    arr = np.array(rows, dtype=float).reshape(-1, 4)
    return MapSample(arr[:, :2], arr[:, 2:], name or Path(path).stem)
