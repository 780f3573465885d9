"""Planar geometry: bounded Voronoi partitions and minimax relay transfer points.

Coordinates are continuous workspace units. The discrete grid overlay is a
separate concern owned by the world module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import (
    DegenerateEdge,
    DegenerateSites,
    EmptySites,
    PointOutsideWorkspace,
    SitesTooClose,
    SiteOutsideWorkspace,
    UnknownRobotId,
)

# absolute tolerance for equidistance / on-segment tests at ~20-unit scale
EPS_GEOM = 1e-9
# minimum pairwise site separation accepted by compute_voronoi
EPS_SITE = 1e-6
# relative threshold below which an edge counts as parallel to the bisector
EPS_PARALLEL = 1e-9


@dataclass(frozen=True)
class Point:
    x: float
    y: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y)):
            raise ValueError(f"non-finite point ({self.x}, {self.y})")


def dist(a: Point, b: Point) -> float:
    return math.hypot(a.x - b.x, a.y - b.y)


def dist_sq(a: Point, b: Point) -> float:
    dx = a.x - b.x
    dy = a.y - b.y
    return dx * dx + dy * dy


@dataclass(frozen=True)
class Workspace:
    min_corner: Point
    max_corner: Point
    grid_cols: int
    grid_rows: int

    def __post_init__(self) -> None:
        if not (self.min_corner.x < self.max_corner.x and self.min_corner.y < self.max_corner.y):
            raise ValueError("min_corner must be strictly below max_corner componentwise")
        if self.grid_cols < 1 or self.grid_rows < 1:
            raise ValueError("grid dimensions must be >= 1")

    @property
    def width(self) -> float:
        return self.max_corner.x - self.min_corner.x

    @property
    def height(self) -> float:
        return self.max_corner.y - self.min_corner.y

    def contains(self, p: Point) -> bool:
        """Closed containment test (boundary points count as inside)."""
        return (
            self.min_corner.x <= p.x <= self.max_corner.x
            and self.min_corner.y <= p.y <= self.max_corner.y
        )

    def contains_strict(self, p: Point) -> bool:
        return (
            self.min_corner.x < p.x < self.max_corner.x
            and self.min_corner.y < p.y < self.max_corner.y
        )

    def corners_ccw(self) -> list[Point]:
        return [
            Point(self.min_corner.x, self.min_corner.y),
            Point(self.max_corner.x, self.min_corner.y),
            Point(self.max_corner.x, self.max_corner.y),
            Point(self.min_corner.x, self.max_corner.y),
        ]


@dataclass(frozen=True)
class VoronoiCell:
    site_id: int
    site: Point
    vertices: tuple[Point, ...]  # counter-clockwise convex polygon


@dataclass(frozen=True)
class VoronoiDiagram:
    cells: tuple[VoronoiCell, ...]  # sorted by site_id
    workspace: Workspace

    def cell(self, site_id: int) -> VoronoiCell:
        for c in self.cells:
            if c.site_id == site_id:
                return c
        raise UnknownRobotId(f"no cell for robot id {site_id}")


@dataclass(frozen=True)
class SharedEdge:
    site_a: int
    site_b: int
    p1: Point
    p2: Point


def _clip_halfplane(poly: list[Point], nx: float, ny: float, c: float) -> list[Point]:
    """Clip a convex polygon to the half-plane n.v >= c (Sutherland-Hodgman)."""
    out: list[Point] = []
    m = len(poly)
    for k in range(m):
        cur = poly[k]
        nxt = poly[(k + 1) % m]
        cur_in = nx * cur.x + ny * cur.y >= c
        nxt_in = nx * nxt.x + ny * nxt.y >= c
        if cur_in:
            out.append(cur)
        if cur_in != nxt_in:
            # intersection of edge cur->nxt with the boundary line n.v = c
            denom = nx * (nxt.x - cur.x) + ny * (nxt.y - cur.y)
            t = (c - (nx * cur.x + ny * cur.y)) / denom
            out.append(Point(cur.x + t * (nxt.x - cur.x), cur.y + t * (nxt.y - cur.y)))
    # drop near-duplicate consecutive vertices produced by clipping
    cleaned: list[Point] = []
    for p in out:
        if not cleaned or dist_sq(cleaned[-1], p) > 1e-24:
            cleaned.append(p)
    if len(cleaned) >= 2 and dist_sq(cleaned[0], cleaned[-1]) <= 1e-24:
        cleaned.pop()
    return cleaned


def compute_voronoi(sites: list[tuple[int, Point]], workspace: Workspace) -> VoronoiDiagram:
    """Partition the workspace rectangle among sites by half-plane intersection.

    Each cell is the rectangle clipped against the bisector half-plane of
    every other site, so equidistance holds exactly by construction.
    """
    if not sites:
        raise EmptySites("need at least one site")
    ids = [sid for sid, _ in sites]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate robot ids")
    for sid, p in sites:
        if not workspace.contains_strict(p):
            raise SiteOutsideWorkspace(f"site {sid} at ({p.x}, {p.y}) not strictly inside workspace")
    for a in range(len(sites)):
        for b in range(a + 1, len(sites)):
            if dist(sites[a][1], sites[b][1]) < EPS_SITE:
                raise SitesTooClose(f"sites {sites[a][0]} and {sites[b][0]} closer than {EPS_SITE}")

    rect = workspace.corners_ccw()
    cells = []
    for sid, si in sorted(sites, key=lambda t: t[0]):
        poly = rect
        for sjd, sj in sites:
            if sjd == sid:
                continue
            # keep points closer to si than sj:  (si - sj) . x >= (|si|^2 - |sj|^2)/2
            nx = si.x - sj.x
            ny = si.y - sj.y
            c = (si.x * si.x + si.y * si.y - sj.x * sj.x - sj.y * sj.y) / 2.0
            poly = _clip_halfplane(poly, nx, ny, c)
            if len(poly) < 3:
                break
        cells.append(VoronoiCell(site_id=sid, site=si, vertices=tuple(poly)))
    return VoronoiDiagram(cells=tuple(cells), workspace=workspace)


def locate(point: Point, diagram: VoronoiDiagram) -> int:
    """Nearest-site owner of a workspace point; exact ties go to the lowest id."""
    if not diagram.workspace.contains(point):
        raise PointOutsideWorkspace(f"({point.x}, {point.y}) outside workspace")
    best_id = -1
    best = math.inf
    px = point.x
    py = point.y
    for cell in diagram.cells:  # sorted by id, so strict < keeps the lowest on ties
        dx = px - cell.site.x
        dy = py - cell.site.y
        d2 = dx * dx + dy * dy
        if d2 < best:
            best = d2
            best_id = cell.site_id
    return best_id


def _clip_line_to_convex(
    origin: Point, direction: Point, poly: tuple[Point, ...]
) -> tuple[float, float] | None:
    """Parameter interval of the line origin + s*direction inside a CCW convex polygon."""
    s_lo = -math.inf
    s_hi = math.inf
    m = len(poly)
    if m < 3:
        return None
    for k in range(m):
        v1 = poly[k]
        v2 = poly[(k + 1) % m]
        # interior lies left of each CCW edge: inward normal
        nx = -(v2.y - v1.y)
        ny = v2.x - v1.x
        num = nx * (origin.x - v1.x) + ny * (origin.y - v1.y)
        den = nx * direction.x + ny * direction.y
        if abs(den) < 1e-15:
            if num < -EPS_GEOM:
                return None
            continue
        s = -num / den
        if den > 0:
            s_lo = max(s_lo, s)
        else:
            s_hi = min(s_hi, s)
    if s_lo >= s_hi:
        return None
    return (s_lo, s_hi)


def shared_edge(diagram: VoronoiDiagram, i: int, j: int) -> SharedEdge | None:
    """Positive-length common boundary of cells i and j, or None."""
    if i == j:
        raise UnknownRobotId("shared_edge requires two distinct robot ids")
    ci = diagram.cell(i)
    cj = diagram.cell(j)
    mid = Point((ci.site.x + cj.site.x) / 2.0, (ci.site.y + cj.site.y) / 2.0)
    d = Point(cj.site.x - ci.site.x, cj.site.y - ci.site.y)
    b = Point(-d.y, d.x)  # bisector direction
    ival_i = _clip_line_to_convex(mid, b, ci.vertices)
    ival_j = _clip_line_to_convex(mid, b, cj.vertices)
    if ival_i is None or ival_j is None:
        return None
    s_lo = max(ival_i[0], ival_j[0])
    s_hi = min(ival_i[1], ival_j[1])
    blen = math.hypot(b.x, b.y)
    if (s_hi - s_lo) * blen <= EPS_GEOM:
        return None
    p1 = Point(mid.x + s_lo * b.x, mid.y + s_lo * b.y)
    p2 = Point(mid.x + s_hi * b.x, mid.y + s_hi * b.y)
    return SharedEdge(site_a=i, site_b=j, p1=p1, p2=p2)


def project_clamp(point: Point, p1: Point, p2: Point) -> Point:
    """Orthogonal projection of point onto segment p1-p2, clamped to the segment."""
    ex = p2.x - p1.x
    ey = p2.y - p1.y
    len2 = ex * ex + ey * ey
    if len2 == 0.0:
        raise DegenerateEdge("segment endpoints coincide")
    t = ((point.x - p1.x) * ex + (point.y - p1.y) * ey) / len2
    t = min(1.0, max(0.0, t))
    return Point(p1.x + t * ex, p1.y + t * ey)


def relay_point(x_i: Point, x_j: Point, edge: SharedEdge) -> tuple[Point, float]:
    """Minimax transfer point on a segment for two agent positions.

    Minimizes max(|z - x_i|, |z - x_j|) over the segment. The objective is
    the max of two convex distance functions, so the minimum sits at an
    endpoint, at the equidistance crossing, or at the clamped projection of
    one of the sites (or the midpoint, when the segment parallels the
    bisector); evaluating that candidate set is exact.
    """
    if x_i == x_j:
        raise DegenerateSites("agent positions coincide")
    p1, p2 = edge.p1, edge.p2
    ex = p2.x - p1.x
    ey = p2.y - p1.y
    elen2 = ex * ex + ey * ey
    if elen2 == 0.0:
        raise DegenerateEdge("edge endpoints coincide")

    candidates = [0.0, 1.0]

    dx = x_j.x - x_i.x
    dy = x_j.y - x_i.y
    mid = Point((x_i.x + x_j.x) / 2.0, (x_i.y + x_j.y) / 2.0)
    bx, by = -dy, dx  # bisector direction
    cross = ex * by - ey * bx
    elen = math.sqrt(elen2)
    blen = math.hypot(bx, by)
    if abs(cross) >= EPS_PARALLEL * elen * blen:
        # transversal crossing of the bisector: equidistance is linear in t
        c = (x_j.x * x_j.x + x_j.y * x_j.y - x_i.x * x_i.x - x_i.y * x_i.y) / 2.0
        num = c - (dx * p1.x + dy * p1.y)
        den = dx * ex + dy * ey
        if den != 0.0:
            t_cross = num / den
            if 0.0 <= t_cross <= 1.0:
                candidates.append(t_cross)
    for q in (x_i, x_j, mid):
        t = ((q.x - p1.x) * ex + (q.y - p1.y) * ey) / elen2
        candidates.append(min(1.0, max(0.0, t)))

    def value_at(t: float) -> float:
        zx = p1.x + t * ex
        zy = p1.y + t * ey
        return max(math.hypot(zx - x_i.x, zy - x_i.y), math.hypot(zx - x_j.x, zy - x_j.y))

    best_t = min(sorted(candidates), key=value_at)
    z = Point(p1.x + best_t * ex, p1.y + best_t * ey)
    return z, value_at(best_t)


# --- serialization -----------------------------------------------------------


def diagram_to_dict(diagram: VoronoiDiagram) -> dict:
    ws = diagram.workspace
    return {
        "workspace": {
            "min": [ws.min_corner.x, ws.min_corner.y],
            "max": [ws.max_corner.x, ws.max_corner.y],
            "cols": ws.grid_cols,
            "rows": ws.grid_rows,
        },
        "cells": [
            {
                "site_id": c.site_id,
                "site": [c.site.x, c.site.y],
                "vertices": [[v.x, v.y] for v in c.vertices],
            }
            for c in diagram.cells
        ],
    }


def diagram_to_json(diagram: VoronoiDiagram) -> str:
    import json

    return json.dumps(diagram_to_dict(diagram), indent=2, sort_keys=True) + "\n"


def diagram_from_dict(data: dict) -> VoronoiDiagram:
    ws_raw = data["workspace"]
    workspace = Workspace(
        min_corner=Point(*ws_raw["min"]),
        max_corner=Point(*ws_raw["max"]),
        grid_cols=int(ws_raw["cols"]),
        grid_rows=int(ws_raw["rows"]),
    )
    cells = tuple(
        VoronoiCell(
            site_id=int(c["site_id"]),
            site=Point(*c["site"]),
            vertices=tuple(Point(*v) for v in c["vertices"]),
        )
        for c in data["cells"]
    )
    return VoronoiDiagram(cells=cells, workspace=workspace)


def diagram_from_json(text: str) -> VoronoiDiagram:
    import json

    return diagram_from_dict(json.loads(text))
