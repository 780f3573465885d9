"""Global A* planning, active-agent selection, and relay plan assembly."""

from __future__ import annotations

import heapq
import json
from dataclasses import dataclass

from .errors import BlockedEndpoint, CellOutOfBounds, NoPath
from .geometry import (
    Point,
    VoronoiDiagram,
    locate,
    relay_point,
    shared_edge,
)
from .nlu import TaskSpec
from .world import GridCell, OccupancyGrid, cell_of, center_of


@dataclass(frozen=True)
class GridPath:
    cells: tuple[GridCell, ...]

    @property
    def length(self) -> int:
        """Number of moves (cells minus one)."""
        return len(self.cells) - 1


@dataclass(frozen=True)
class RelayPlan:
    task: TaskSpec
    active: tuple[int, ...]
    transfers: tuple[Point, ...]
    segments: tuple[tuple[Point, ...], ...]  # one waypoint list per active agent
    baseline: bool
    # True where a consecutive pair had no positive-length shared Voronoi edge
    # and the transfer fell back to the path's region-crossing midpoint
    transfer_fallback: tuple[bool, ...] = ()


def astar(grid: OccupancyGrid, start: GridCell, goal: GridCell) -> GridPath:
    """Shortest 4-connected path, unit costs, Manhattan heuristic.

    Ties broken by (f, h, row-major cell index) so results are deterministic.
    """
    for c in (start, goal):
        if not grid.in_bounds(c):
            raise CellOutOfBounds(f"{c} out of bounds")
        if grid.is_blocked(c):
            raise BlockedEndpoint(f"{c} is blocked")
    cols = grid.cols

    def h(c: GridCell) -> int:
        return abs(c.col - goal.col) + abs(c.row - goal.row)

    def idx(c: GridCell) -> int:
        return c.row * cols + c.col

    open_heap: list[tuple[int, int, int, GridCell]] = [(h(start), h(start), idx(start), start)]
    g = {start: 0}
    came: dict[GridCell, GridCell] = {}
    closed: set[GridCell] = set()
    while open_heap:
        _, _, _, cur = heapq.heappop(open_heap)
        if cur in closed:
            continue
        if cur == goal:
            path = [cur]
            while cur in came:
                cur = came[cur]
                path.append(cur)
            path.reverse()
            return GridPath(cells=tuple(path))
        closed.add(cur)
        gc = g[cur]
        for dc, dr in ((0, 1), (0, -1), (1, 0), (-1, 0)):
            nb = GridCell(cur.col + dc, cur.row + dr)
            if not grid.in_bounds(nb) or grid.is_blocked(nb) or nb in closed:
                continue
            ng = gc + 1
            if ng < g.get(nb, 1 << 60):
                g[nb] = ng
                came[nb] = cur
                hn = h(nb)
                heapq.heappush(open_heap, (ng + hn, hn, idx(nb), nb))
    raise NoPath(f"no path from {start} to {goal}")


def endpoint_agents(task: TaskSpec, diagram: VoronoiDiagram) -> tuple[int, int]:
    return locate(task.pickup, diagram), locate(task.drop, diagram)


def select_active_agents(
    path: GridPath, diagram: VoronoiDiagram, grid: OccupancyGrid
) -> list[int]:
    """Owners of path-cell centers, ordered by first appearance on the path."""
    active: list[int] = []
    seen: set[int] = set()
    for cell in path.cells:
        owner = locate(center_of(cell, grid), diagram)
        if owner not in seen:
            seen.add(owner)
            active.append(owner)
    return active


def _crossing_midpoint(
    owners: list[int], path: GridPath, grid: OccupancyGrid, next_agent: int, start_idx: int
) -> tuple[Point, int]:
    """Midpoint of the path-cell centers where ownership first reaches next_agent."""
    for i in range(start_idx, len(owners)):
        if owners[i] == next_agent:
            a = center_of(path.cells[i - 1], grid)
            b = center_of(path.cells[i], grid)
            return Point((a.x + b.x) / 2.0, (a.y + b.y) / 2.0), i
    raise NoPath(f"agent {next_agent} never owns a path cell")  # unreachable for valid chains


def build_relay_plan(
    task: TaskSpec,
    robots: list[tuple[int, Point]],
    diagram: VoronoiDiagram,
    grid: OccupancyGrid,
) -> RelayPlan:
    if not robots:
        raise ValueError("need at least one robot")
    pos = {rid: p for rid, p in robots}
    path = astar(grid, cell_of(task.pickup, grid), cell_of(task.drop, grid))
    active = select_active_agents(path, diagram, grid)
    owners = [locate(center_of(c, grid), diagram) for c in path.cells]

    transfers: list[Point] = []
    fallback: list[bool] = []
    scan_idx = 1
    for j in range(len(active) - 1):
        a, b = active[j], active[j + 1]
        edge = shared_edge(diagram, a, b)
        if edge is not None:
            z, _ = relay_point(pos[a], pos[b], edge)
            transfers.append(z)
            fallback.append(False)
        else:
            z, scan_idx = _crossing_midpoint(owners, path, grid, b, scan_idx)
            transfers.append(z)
            fallback.append(True)

    segments: list[tuple[Point, ...]] = []
    if len(active) == 1:
        segments.append((pos[active[0]], task.pickup, task.drop))
    else:
        for j, rid in enumerate(active):
            if j == 0:
                segments.append((pos[rid], task.pickup, transfers[0]))
            elif j == len(active) - 1:
                segments.append((pos[rid], transfers[j - 1], task.drop))
            else:
                segments.append((pos[rid], transfers[j - 1], transfers[j]))

    return RelayPlan(
        task=task,
        active=tuple(active),
        transfers=tuple(transfers),
        segments=tuple(segments),
        baseline=False,
        transfer_fallback=tuple(fallback),
    )


def single_agent_baseline(
    task: TaskSpec,
    robots: list[tuple[int, Point]],
    diagram: VoronoiDiagram,
    grid: OccupancyGrid,
) -> RelayPlan:
    """Comparison plan: the pickup-region owner performs the whole task alone."""
    if not robots:
        raise ValueError("need at least one robot")
    pos = {rid: p for rid, p in robots}
    rid = locate(task.pickup, diagram)
    # validate reachability of both legs up front
    astar(grid, cell_of(pos[rid], grid), cell_of(task.pickup, grid))
    astar(grid, cell_of(task.pickup, grid), cell_of(task.drop, grid))
    return RelayPlan(
        task=task,
        active=(rid,),
        transfers=(),
        segments=((pos[rid], task.pickup, task.drop),),
        baseline=True,
        transfer_fallback=(),
    )


# --- serialization -----------------------------------------------------------


def _point_to_list(p: Point) -> list[float]:
    return [p.x, p.y]


def plan_to_dict(plan: RelayPlan) -> dict:
    return {
        "task": {
            "pickup": _point_to_list(plan.task.pickup),
            "drop": _point_to_list(plan.task.drop),
            "item": plan.task.item,
            "source_text": plan.task.source_text,
        },
        "active": list(plan.active),
        "transfers": [_point_to_list(z) for z in plan.transfers],
        "segments": [[_point_to_list(p) for p in seg] for seg in plan.segments],
        "baseline": plan.baseline,
        "transfer_fallback": list(plan.transfer_fallback),
    }


def plan_to_json(plan: RelayPlan) -> str:
    return json.dumps(plan_to_dict(plan), indent=2, sort_keys=True) + "\n"


def plan_from_dict(data: dict) -> RelayPlan:
    task = TaskSpec(
        pickup=Point(*data["task"]["pickup"]),
        drop=Point(*data["task"]["drop"]),
        item=data["task"]["item"],
        source_text=data["task"]["source_text"],
    )
    return RelayPlan(
        task=task,
        active=tuple(int(r) for r in data["active"]),
        transfers=tuple(Point(*z) for z in data["transfers"]),
        segments=tuple(tuple(Point(*p) for p in seg) for seg in data["segments"]),
        baseline=bool(data["baseline"]),
        transfer_fallback=tuple(bool(f) for f in data.get("transfer_fallback", [])),
    )


def plan_from_json(text: str) -> RelayPlan:
    return plan_from_dict(json.loads(text))
