"""Shortest paths in the complement of a finite union of closed rectangles.

Paths may run along obstacle boundaries: a polyline is valid when none of its
edges meets an open rectangle interior.  Three solvers are provided.

* :func:`esp_visibility` is exact.  It runs A* on the reduced visibility
  graph: nodes are the endpoints plus rectangle corners, and edges must be
  tangent to the rectangles at their corner endpoints.
* :func:`esp_grid_oracle` runs an any-angle (Theta*) search on a square
  lattice with exact line of sight.  It is an independent upper bound.
* :func:`detour_construct` walks the straight segment and replaces each
  crossed rectangle by the shorter arc of its perimeter.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, replace
from fractions import Fraction
from typing import Callable, Optional, Sequence, Union

import numpy as np

from . import _exact
from .errors import DomainError, InvalidEndpointError, UnreachableError
from .fractals import CustomRects, FractalSpec, ObstacleSet, generate
from .geometry import AxisRect, Point, Polyline, dist, rational

_TIE = 1e-12
_CHUNK = 64


@dataclass(frozen=True)
class PathResult:
    path: Polyline
    length: float
    straight_distance: float
    gap: float

    @classmethod
    def from_path(cls, path: Polyline) -> "PathResult":
        length = path.length
        straight = dist(path.first, path.last)
        return cls(path, length, straight, max(0.0, length - straight))

    def to_json(self) -> dict:
        return {
            "length": self.length,
            "gap": self.gap,
            "vertices": [[_rstr(v.x), _rstr(v.y)] for v in self.path.vertices],
        }


def _rstr(v) -> str:
    return str(rational(v))


def _as_obstacles(obs: Union[ObstacleSet, FractalSpec, Sequence[AxisRect], None]) -> ObstacleSet:
    if obs is None:
        return ObstacleSet.from_rects(())
    if isinstance(obs, ObstacleSet):
        if obs.implicit:
            raise DomainError("shortest-path solvers need an explicit obstacle set")
        return obs
    if isinstance(obs, (list, tuple)):
        return ObstacleSet.from_rects(obs)
    return generate(obs)


class _Scene:
    """Rectangles and query endpoints scaled to one integer lattice."""

    def __init__(self, obs: ObstacleSet, a: Point, b: Point, extra: Sequence[Point] = ()):
        self.obs = obs
        self.a, self.b = a, b
        pts = [a, b, *extra]
        if obs.rects:
            self.lattice, self.rects = obs.arrays_for(pts)
        else:
            self.lattice = _exact.lattice_for((), pts)
            self.rects = _exact.RectArrays((), self.lattice)
        lat = self.lattice
        self.ax, self.ay = lat.scale(a.x), lat.scale(a.y)
        self.bx, self.by = lat.scale(b.x), lat.scale(b.y)

    def check_endpoints(self):
        if not len(self.rects):
            return
        for name, (x, y) in (("a", (self.ax, self.ay)), ("b", (self.bx, self.by))):
            if _exact.points_inside(x, y, self.rects, "open").any():
                raise InvalidEndpointError(f"endpoint {name} lies inside an obstacle")

    def blocked(self, px, py, qx, qy, rects: Optional[_exact.RectArrays] = None) -> np.ndarray:
        """Per-segment flag: does the segment meet an open rectangle interior?"""
        rects = self.rects if rects is None else rects
        m = max(np.size(px), np.size(qx))
        if not len(rects):
            return np.zeros(m, dtype=bool)
        return _exact.segments_hit(px, py, qx, qy, rects, "open").any(axis=1)

    def point(self, x, y) -> Point:
        return Point(self.lattice.unscale(x), self.lattice.unscale(y))


def path_is_valid(path: Polyline, obs) -> bool:
    """True iff no edge of ``path`` meets an open obstacle interior."""
    obs = _as_obstacles(obs)
    if not obs.rects:
        return True
    verts = [Point(rational(v.x), rational(v.y)) for v in path.vertices]
    scene = _Scene(obs, verts[0], verts[-1], verts[1:-1])
    lat = scene.lattice
    xs = np.array([lat.scale(v.x) for v in verts], dtype=lat.dtype)
    ys = np.array([lat.scale(v.y) for v in verts], dtype=lat.dtype)
    return not scene.blocked(xs[:-1], ys[:-1], xs[1:], ys[1:]).any()


# -- visibility graph --------------------------------------------------------------


@dataclass(frozen=True)
class VisibilityGraph:
    """Nodes: ``a``, ``b`` then rectangle corners; edges ``(u, v, weight)`` with ``u < v``."""

    nodes: tuple[Point, ...]
    edges: tuple[tuple[int, int, float], ...]


class _Nodes:
    def __init__(self, scene: _Scene):
        r = scene.rects
        k = len(r)
        # corner order per rectangle: lower-left, lower-right, top-right, top-left
        cx = np.stack([r.x0, r.x1, r.x1, r.x0], axis=1).reshape(-1) if k else np.zeros(0, dtype=r.x0.dtype)
        cy = np.stack([r.y0, r.y0, r.y1, r.y1], axis=1).reshape(-1) if k else np.zeros(0, dtype=r.x0.dtype)
        ctype = np.tile(np.arange(4), k)
        keep = ~(((cx == scene.ax) & (cy == scene.ay)) | ((cx == scene.bx) & (cy == scene.by)))
        dtype = r.x0.dtype
        self.x = np.concatenate([np.array([scene.ax, scene.bx], dtype=dtype), cx[keep]])
        self.y = np.concatenate([np.array([scene.ay, scene.by], dtype=dtype), cy[keep]])
        # -1 marks the query endpoints, exempt from tangency
        self.kind = np.concatenate([[-1, -1], ctype[keep]])
        scale = float(scene.lattice.denominator)
        self.fx = self.x.astype(float) / scale
        self.fy = self.y.astype(float) / scale

    def __len__(self):
        return len(self.x)

    def tangent_ok(self, u: int, cand: np.ndarray) -> np.ndarray:
        dx = self.x[cand] - self.x[u]
        dy = self.y[cand] - self.y[u]
        prod = np.sign(dx) * np.sign(dy)
        ok = np.ones(len(cand), dtype=bool)
        ku = self.kind[u]
        if ku >= 0:
            ok &= prod <= 0 if ku % 2 == 0 else prod >= 0
        kv = self.kind[cand]
        ok &= (kv < 0) | ((kv % 2 == 0) & (prod <= 0)) | ((kv % 2 == 1) & (prod >= 0))
        return ok


def _visible_from(scene: _Scene, nodes: _Nodes, u: int, cand: np.ndarray) -> np.ndarray:
    """Subset of ``cand`` visible from node ``u``; rectangles tested nearest first."""
    if not len(cand) or not len(scene.rects):
        return cand
    ux, uy = nodes.x[u], nodes.y[u]
    d2 = scene.rects.dist2_from(ux, uy)
    order = np.argsort(d2, kind="stable")
    dx = nodes.x[cand] - ux
    dy = nodes.y[cand] - uy
    reach = dx * dx + dy * dy
    alive = np.arange(len(cand))
    for start in range(0, len(order), _CHUNK):
        idx = order[start : start + _CHUNK]
        if d2[idx[0]] >= reach[alive].max():
            break
        hit = scene.blocked(ux, uy, nodes.x[cand[alive]], nodes.y[cand[alive]], scene.rects.take(idx))
        alive = alive[~hit]
        if not len(alive):
            break
    return cand[alive]


def visibility_graph(a, b, obs) -> VisibilityGraph:
    """Full (unreduced) visibility graph; quadratic, intended for small scenes and checks."""
    obs = _as_obstacles(obs)
    a, b = Point(rational(a[0]), rational(a[1])), Point(rational(b[0]), rational(b[1]))
    scene = _Scene(obs, a, b)
    scene.check_endpoints()
    nodes = _Nodes(scene)
    n = len(nodes)
    edges = []
    for u in range(n):
        cand = np.arange(u + 1, n)
        for v in _visible_from(scene, nodes, u, cand):
            w = math.hypot(nodes.fx[v] - nodes.fx[u], nodes.fy[v] - nodes.fy[u])
            edges.append((u, int(v), w))
    pts = tuple(scene.point(x, y) for x, y in zip(nodes.x, nodes.y))
    return VisibilityGraph(pts, tuple(edges))


# -- exact solver ------------------------------------------------------------------


def _endpoints(a, b) -> tuple[Point, Point]:
    a = Point(rational(a[0]), rational(a[1]))
    b = Point(rational(b[0]), rational(b[1]))
    if a == b:
        raise DomainError("endpoints coincide")
    return a, b


def _chain(parent: list[int], v: int) -> tuple[int, ...]:
    seq = []
    while v >= 0:
        seq.append(v)
        v = parent[v]
    return tuple(reversed(seq))


def esp_visibility(a, b, obs, upper_bound: Optional[float] = None) -> PathResult:
    """Exact Euclidean shortest path from ``a`` to ``b`` avoiding open obstacle interiors.

    Equal-length alternatives (within 1e-12) resolve to the lexicographically
    smallest node-index sequence, with ``a = 0``, ``b = 1`` and corners
    numbered in rectangle order.
    """
    obs = _as_obstacles(obs)
    a, b = _endpoints(a, b)
    scene = _Scene(obs, a, b)
    scene.check_endpoints()
    if not scene.blocked(scene.ax, scene.ay, scene.bx, scene.by)[0]:
        return PathResult.from_path(Polyline((a, b)))
    nodes = _Nodes(scene)
    n = len(nodes)
    if upper_bound is None:
        upper_bound = detour_construct(a, b, obs).length
    cap = upper_bound * (1 + _TIE) + _TIE
    hx = np.hypot(nodes.fx - nodes.fx[1], nodes.fy - nodes.fy[1])
    g = np.full(n, np.inf)
    g[0] = 0.0
    parent = [-1] * n
    closed = np.zeros(n, dtype=bool)
    heap = [(hx[0], 0)]
    everything = np.arange(n)
    while heap:
        _, u = heapq.heappop(heap)
        if closed[u]:
            continue
        closed[u] = True
        if u == 1:
            break
        w = np.hypot(nodes.fx - nodes.fx[u], nodes.fy - nodes.fy[u])
        ng = g[u] + w
        mask = ~closed & (ng + hx <= cap) & (ng <= g + _TIE)
        cand = everything[mask]
        cand = cand[nodes.tangent_ok(u, cand)]
        for v in _visible_from(scene, nodes, u, cand):
            v = int(v)
            if ng[v] < g[v] - _TIE:
                g[v] = ng[v]
                parent[v] = u
                heapq.heappush(heap, (ng[v] + hx[v], v))
            elif ng[v] <= g[v] + _TIE and _chain(parent, u) + (v,) < _chain(parent, v):
                parent[v] = u
                g[v] = min(g[v], ng[v])
    if not closed[1]:
        raise UnreachableError("no obstacle-avoiding path found")
    verts = [scene.point(nodes.x[v], nodes.y[v]) for v in _chain(parent, 1)]
    return PathResult.from_path(Polyline(tuple(verts)))


# -- detour construction -----------------------------------------------------------


def crossed_rects(a, b, obs) -> list[int]:
    """Indices of rectangles whose open interior meets the segment [a, b]."""
    obs = _as_obstacles(obs)
    a, b = _endpoints(a, b)
    if not obs.rects:
        return []
    scene = _Scene(obs, a, b)
    hit = _exact.segments_hit(scene.ax, scene.ay, scene.bx, scene.by, scene.rects, "open")[0]
    return [int(i) for i in np.flatnonzero(hit)]


def detour_bound(a, b, obs) -> float:
    """Right-hand side ``|a-b| + sum(perimeters of crossed rectangles) / 2``."""
    obs = _as_obstacles(obs)
    per = math.fsum(float(obs.rects[i].perimeter) for i in crossed_rects(a, b, obs))
    return dist(a, b) + per / 2


def _arc(r: AxisRect, p: Point, q: Point) -> list[Point]:
    """Intermediate corners of the shorter boundary arc from ``p`` to ``q`` (ties: counter-clockwise)."""
    per = r.perimeter
    sp, sq = r.boundary_position(p), r.boundary_position(q)
    ccw = (sq - sp) % per
    corners = r.corners()
    cpos = [Fraction(0), r.width, r.width + r.height, 2 * r.width + r.height]
    offs = [((c - sp) % per, k) for k, c in enumerate(cpos)]
    if ccw <= per - ccw:
        return [corners[k] for o, k in sorted(offs) if 0 < o < ccw]
    back = [((sp - c) % per, k) for k, c in enumerate(cpos)]
    return [corners[k] for o, k in sorted(back) if 0 < o < per - ccw]


def detour_construct(a, b, obs) -> PathResult:
    """Replace every crossing of [a, b] through a rectangle by the shorter perimeter arc."""
    obs = _as_obstacles(obs)
    a, b = _endpoints(a, b)
    if obs.rects:
        scene = _Scene(obs, a, b)
        scene.check_endpoints()
    crossings = []
    for i in crossed_rects(a, b, obs):
        r = obs.rects[i]
        t0, t1 = r.clip_params(a, b)
        crossings.append((t0, t1, i))
    crossings.sort()
    seg = lambda t: Point(a.x + t * (b.x - a.x), a.y + t * (b.y - a.y))
    pts: list[Point] = [a]
    for t0, t1, i in crossings:
        p, q = seg(t0), seg(t1)
        pts.append(p)
        pts.extend(_arc(obs.rects[i], p, q))
        pts.append(q)
    pts.append(b)
    return PathResult.from_path(Polyline.from_points(pts))


# -- grid oracle -------------------------------------------------------------------


class _Grid:
    """Lattice ``origin + H * (i, j)`` in scaled integers, with exact edge validity.

    ``edge[d][i, j]`` is True when the unit move from ``(i, j)`` in direction
    ``_DIRS[d]`` crosses an open rectangle interior.
    """

    def __init__(self, scene: _Scene, H: int):
        r = scene.rects
        self.H = H
        xs = [scene.ax, scene.bx] + ([int(r.x0.min()), int(r.x1.max())] if len(r) else [])
        ys = [scene.ay, scene.by] + ([int(r.y0.min()), int(r.y1.max())] if len(r) else [])
        self.ox = (min(xs) // H - 1) * H
        self.oy = (min(ys) // H - 1) * H
        self.nx = (max(xs) - self.ox) // H + 2
        self.ny = (max(ys) - self.oy) // H + 2
        self.edge = [np.zeros((self.nx, self.ny), dtype=bool) for _ in _DIRS]
        dtype = scene.lattice.dtype
        for k in range(len(r)):
            one = r.take([k])
            i0 = max(0, (int(r.x0[k]) - self.ox) // H - 1)
            i1 = min(self.nx - 1, -((self.ox - int(r.x1[k])) // H) + 1)
            j0 = max(0, (int(r.y0[k]) - self.oy) // H - 1)
            j1 = min(self.ny - 1, -((self.oy - int(r.y1[k])) // H) + 1)
            ii, jj = np.meshgrid(np.arange(i0, i1 + 1), np.arange(j0, j1 + 1), indexing="ij")
            ii, jj = ii.ravel(), jj.ravel()
            px = np.array([self.ox + int(i) * H for i in ii], dtype=dtype)
            py = np.array([self.oy + int(j) * H for j in jj], dtype=dtype)
            for d, (di, dj) in enumerate(_DIRS):
                hit = _exact.segments_hit(px, py, px + di * H, py + dj * H, one, "open")[:, 0]
                self.edge[d][ii[hit], jj[hit]] = True

    def xy(self, i: int, j: int) -> tuple[int, int]:
        return self.ox + i * self.H, self.oy + j * self.H

    def move_blocked(self, i: int, j: int, di: int, dj: int) -> bool:
        if di < 0 or (di == 0 and dj < 0):
            i, j, di, dj = i + di, j + dj, -di, -dj
        return bool(self.edge[_DIR_INDEX[di, dj]][i, j])

    def near(self, px: int, py: int) -> list[tuple[int, int]]:
        """Lattice nodes within one cell of ``(px, py)`` in both coordinates."""
        H = self.H
        i0, j0 = -((self.ox - px) // H) - 1, -((self.oy - py) // H) - 1
        out = []
        for i in range(i0, i0 + 3):
            for j in range(j0, j0 + 3):
                if 0 <= i < self.nx and 0 <= j < self.ny:
                    x, y = self.xy(i, j)
                    if abs(x - px) <= H and abs(y - py) <= H:
                        out.append((i, j))
        return out


_DIRS = ((1, 0), (0, 1), (1, 1), (1, -1))
_DIR_INDEX = {d: k for k, d in enumerate(_DIRS)}
_STEPS = [(di, dj) for di in (-1, 0, 1) for dj in (-1, 0, 1) if di or dj]


def esp_grid_oracle(a, b, obs, resolution, seed: int = 0) -> PathResult:
    """Any-angle search (Lazy Theta*) on the lattice ``resolution * Z^2``, then string pulling.

    The lattice covers the bounding box of the scene plus one cell; every
    sight check is exact.  The seed only randomises tie-breaking among equal
    priorities.
    """
    obs = _as_obstacles(obs)
    a, b = _endpoints(a, b)
    h = rational(resolution)
    if h <= 0:
        raise DomainError("resolution must be positive")
    scene = _Scene(obs, a, b, extra=[Point(h, h)])
    scene.check_endpoints()
    if not scene.blocked(scene.ax, scene.ay, scene.bx, scene.by)[0]:
        return PathResult.from_path(Polyline((a, b)))
    lat = scene.lattice
    grid = _Grid(scene, lat.scale(h))
    r = scene.rects
    scale = float(lat.denominator)
    A, B = "a", "b"
    pos = {A: (scene.ax, scene.ay), B: (scene.bx, scene.by)}

    def xy(node):
        return pos[node] if isinstance(node, str) else grid.xy(*node)

    def length(p, q) -> float:
        return math.hypot(float(q[0] - p[0]), float(q[1] - p[1])) / scale

    tuples = list(zip(r.x0.tolist(), r.y0.tolist(), r.x1.tolist(), r.y1.tolist()))

    def sight(p, q) -> bool:
        if p == q:
            return True
        if len(tuples) <= 4 * _CHUNK:
            return not _exact.segment_blocked(p[0], p[1], q[0], q[1], tuples)
        tx = np.array([q[0]], dtype=lat.dtype)
        ty = np.array([q[1]], dtype=lat.dtype)
        return not scene.blocked(p[0], p[1], tx, ty, _near_rects(r, p, tx, ty))[0]

    # Moves touching a or b are not lattice moves; check them exactly once.
    special: dict = {}
    for s in (A, B):
        for node in grid.near(*pos[s]):
            if sight(pos[s], grid.xy(*node)):
                special.setdefault(s, []).append(node)
                special.setdefault(node, []).append(s)
    if abs(scene.ax - scene.bx) <= grid.H and abs(scene.ay - scene.by) <= grid.H:
        special.setdefault(A, []).append(B)

    def neighbours(node):
        out = list(special.get(node, ()))
        if isinstance(node, tuple):
            i, j = node
            for di, dj in _STEPS:
                ii, jj = i + di, j + dj
                if 0 <= ii < grid.nx and 0 <= jj < grid.ny and not grid.move_blocked(i, j, di, dj):
                    out.append((ii, jj))
        return out

    rng = np.random.default_rng(seed)
    goal = pos[B]
    g = {A: 0.0}
    parent = {A: A}
    closed: set = set()
    counter = 0
    heap = [(length(pos[A], goal), rng.random(), counter, A)]
    while heap:
        _, _, _, s = heapq.heappop(heap)
        if s in closed:
            continue
        cs = xy(s)
        par = parent[s]
        adjacent = isinstance(par, tuple) and isinstance(s, tuple) and max(abs(par[0] - s[0]), abs(par[1] - s[1])) <= 1
        if not adjacent and not sight(xy(par), cs):
            # Lazy Theta*: the assumed shortcut is blocked; fall back to the best closed neighbour.
            best = min(((g[v] + length(xy(v), cs), v) for v in neighbours(s) if v in closed), key=lambda t: t[0])
            g[s], parent[s] = best
        closed.add(s)
        if s == B:
            break
        par = parent[s]
        cp = xy(par)
        base = g[par]
        for v in neighbours(s):
            if v in closed:
                continue
            cand = base + length(cp, xy(v))
            if cand < g.get(v, math.inf):
                g[v] = cand
                parent[v] = par
                counter += 1
                heapq.heappush(heap, (cand + length(xy(v), goal), rng.random(), counter, v))
    if B not in closed:
        raise UnreachableError("grid oracle found no path; refine the resolution")
    chain = [B]
    while chain[-1] != A:
        chain.append(parent[chain[-1]])
    pts = [xy(v) for v in reversed(chain)]
    # Greedy string pulling: jump to the farthest visible vertex.
    pulled = [pts[0]]
    i = 0
    while i < len(pts) - 1:
        j = len(pts) - 1
        while j > i + 1 and not sight(pts[i], pts[j]):
            j -= 1
        pulled.append(pts[j])
        i = j
    return PathResult.from_path(Polyline.from_points(scene.point(x, y) for x, y in pulled))


def _near_rects(r: _exact.RectArrays, p, tx, ty) -> _exact.RectArrays:
    """Rectangles meeting the bounding box of all segments from ``p`` to the targets."""
    if len(r) <= _CHUNK:
        return r
    lox, hix = min(p[0], tx.min()), max(p[0], tx.max())
    loy, hiy = min(p[1], ty.min()), max(p[1], ty.max())
    mask = (r.x1 > lox) & (r.x0 < hix) & (r.y1 > loy) & (r.y0 < hiy)
    return r.take(np.flatnonzero(mask))


# -- lemma bound and sweeps --------------------------------------------------------


def boundary_length_in_disk(obs, center, radius: float) -> float:
    """Total length of rectangle boundaries inside the closed disk ``B(center, radius)``."""
    obs = _as_obstacles(obs)
    if not obs.rects:
        return 0.0
    cx, cy = float(center[0]), float(center[1])
    arr = np.array([[float(v) for v in (r.x0, r.y0, r.x1, r.y1)] for r in obs.rects])
    x0, y0, x1, y1 = arr.T
    px = np.concatenate([x0, x1, x1, x0]) - cx
    py = np.concatenate([y0, y0, y1, y1]) - cy
    qx = np.concatenate([x1, x1, x0, x0]) - cx
    qy = np.concatenate([y0, y1, y1, y0]) - cy
    dx, dy = qx - px, qy - py
    aa = dx * dx + dy * dy
    bb = 2 * (px * dx + py * dy)
    cc = px * px + py * py - radius * radius
    disc = bb * bb - 4 * aa * cc
    ok = disc > 0
    root = np.sqrt(np.where(ok, disc, 0.0))
    t0 = np.clip((-bb - root) / (2 * aa), 0.0, 1.0)
    t1 = np.clip((-bb + root) / (2 * aa), 0.0, 1.0)
    frac = np.where(ok, t1 - t0, 0.0)
    return float(math.fsum((frac * np.sqrt(aa)).tolist()))


@dataclass(frozen=True)
class LengthBoundCheck:
    gap: float
    bound: float
    boundary_h1: float
    radius: float

    @property
    def holds(self) -> bool:
        return self.gap <= self.bound

    @property
    def ratio(self) -> float:
        """``gap / H1(boundary)``, compared against the conjectured constant 1."""
        return self.gap / self.boundary_h1 if self.boundary_h1 else 0.0


def lemma_bound(a, b, obs, gap: float) -> LengthBoundCheck:
    """Check ``gap <= (pi/2) H1(boundary within B(a, L))`` with ``L = |a-b| + (pi/2) H1(boundary)``."""
    obs = _as_obstacles(obs)
    total = float(obs.boundary_length)
    radius = dist(a, b) + math.pi / 2 * total
    inside = boundary_length_in_disk(obs, a, radius)
    return LengthBoundCheck(gap, math.pi / 2 * inside, total, radius)


@dataclass(frozen=True)
class SweepRow:
    stage: int
    rects: int
    length: float
    gap: float
    bound_h1: float
    lemma_bound: float
    ratio: float

    HEADER = ("stage", "rects", "length", "gap", "boundH1", "lemmaBound", "ratio")

    def values(self) -> tuple:
        return (self.stage, self.rects, self.length, self.gap, self.bound_h1, self.lemma_bound, self.ratio)


def sweep_row(stage: int, a, b, obs: ObstacleSet) -> SweepRow:
    res = esp_visibility(a, b, obs)
    chk = lemma_bound(a, b, obs, res.gap)
    return SweepRow(stage, len(obs), res.length, res.gap, chk.boundary_h1, chk.bound, chk.ratio)


def removability_sweep(
    family: Union[FractalSpec, Callable[[int], FractalSpec]],
    stages: Sequence[int],
    a,
    b,
    map_fn: Callable = map,
) -> list[SweepRow]:
    """Exact gaps over a range of stages, sorted by stage.

    ``family`` is a spec whose ``stage`` field is replaced, or a callable
    returning the spec for each stage.  ``map_fn`` may be an executor's map.
    """

    def spec_for(n: int) -> FractalSpec:
        if callable(family):
            return family(n)
        if isinstance(family, CustomRects):
            return family
        return replace(family, stage=n)

    def one(n: int) -> SweepRow:
        return sweep_row(n, a, b, generate(spec_for(n)))

    rows = list(map_fn(one, list(stages)))
    return sorted(rows, key=lambda row: row.stage)


def lemma_upper(obs) -> float:
    """``(pi/2) H1(boundary)``, the unclipped form of the lemma bound."""
    return math.pi / 2 * float(_as_obstacles(obs).boundary_length)


__all__ = [
    "PathResult",
    "VisibilityGraph",
    "LengthBoundCheck",
    "SweepRow",
    "visibility_graph",
    "esp_visibility",
    "esp_grid_oracle",
    "detour_construct",
    "detour_bound",
    "crossed_rects",
    "path_is_valid",
    "boundary_length_in_disk",
    "lemma_bound",
    "lemma_upper",
    "sweep_row",
    "removability_sweep",
]
