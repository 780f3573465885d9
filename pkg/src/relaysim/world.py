"""Discrete grid overlay, occupancy, and the named-zone semantic map."""

from __future__ import annotations

import json
import math
import re
from dataclasses import dataclass, field
from pathlib import Path

from .errors import CellOutOfBounds, PointOutsideWorkspace, UnknownZone
from .geometry import Point, Workspace

_WS_RE = re.compile(r"\s+")


@dataclass(frozen=True, order=True)
class GridCell:
    col: int
    row: int


@dataclass(frozen=True)
class OccupancyGrid:
    workspace: Workspace
    blocked: frozenset[GridCell] = frozenset()

    def __post_init__(self) -> None:
        for c in self.blocked:
            if not self.in_bounds(c):
                raise CellOutOfBounds(f"blocked cell {c} out of bounds")

    @property
    def cols(self) -> int:
        return self.workspace.grid_cols

    @property
    def rows(self) -> int:
        return self.workspace.grid_rows

    @property
    def cell_width(self) -> float:
        return self.workspace.width / self.cols

    @property
    def cell_height(self) -> float:
        return self.workspace.height / self.rows

    def in_bounds(self, cell: GridCell) -> bool:
        return 0 <= cell.col < self.cols and 0 <= cell.row < self.rows

    def is_blocked(self, cell: GridCell) -> bool:
        return cell in self.blocked


def cell_of(point: Point, grid: OccupancyGrid) -> GridCell:
    """Cell whose half-open extent [x, x+w) x [y, y+h) contains the point."""
    ws = grid.workspace
    if not (
        ws.min_corner.x <= point.x < ws.max_corner.x
        and ws.min_corner.y <= point.y < ws.max_corner.y
    ):
        raise PointOutsideWorkspace(
            f"({point.x}, {point.y}) outside half-open workspace extent"
        )
    col = int(math.floor((point.x - ws.min_corner.x) / grid.cell_width))
    row = int(math.floor((point.y - ws.min_corner.y) / grid.cell_height))
    # guard float roundoff at the upper edge
    col = min(col, grid.cols - 1)
    row = min(row, grid.rows - 1)
    return GridCell(col, row)


def center_of(cell: GridCell, grid: OccupancyGrid) -> Point:
    if not grid.in_bounds(cell):
        raise CellOutOfBounds(f"cell {cell} out of bounds")
    ws = grid.workspace
    return Point(
        ws.min_corner.x + (cell.col + 0.5) * grid.cell_width,
        ws.min_corner.y + (cell.row + 0.5) * grid.cell_height,
    )


def normalize_zone_name(name: str) -> str:
    return _WS_RE.sub(" ", name.strip().lower())


@dataclass(frozen=True)
class SemanticMap:
    zones: dict[str, Point] = field(default_factory=dict)  # keys normalized

    @staticmethod
    def from_raw(raw: dict[str, Point]) -> "SemanticMap":
        zones: dict[str, Point] = {}
        for name, anchor in raw.items():
            key = normalize_zone_name(name)
            if key in zones:
                raise ValueError(f"duplicate zone name after normalization: {key!r}")
            zones[key] = anchor
        return SemanticMap(zones=zones)

    def zone_names(self) -> list[str]:
        return sorted(self.zones)


def resolve_zone(name: str, smap: SemanticMap) -> Point:
    key = normalize_zone_name(name)
    try:
        return smap.zones[key]
    except KeyError:
        raise UnknownZone(f"unknown zone {name!r}") from None


def load_semantic_map(path: str | Path) -> tuple[SemanticMap, Workspace]:
    """Load the zones + workspace JSON file."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    ws_raw = data["workspace"]
    workspace = Workspace(
        min_corner=Point(float(ws_raw["min"][0]), float(ws_raw["min"][1])),
        max_corner=Point(float(ws_raw["max"][0]), float(ws_raw["max"][1])),
        grid_cols=int(ws_raw["cols"]),
        grid_rows=int(ws_raw["rows"]),
    )
    raw_zones = {
        name: Point(float(xy[0]), float(xy[1])) for name, xy in data["zones"].items()
    }
    smap = SemanticMap.from_raw(raw_zones)
    for name, anchor in smap.zones.items():
        if not workspace.contains(anchor):
            raise PointOutsideWorkspace(f"zone {name!r} anchor outside workspace")
    return smap, workspace


def dump_semantic_map(smap: SemanticMap, workspace: Workspace) -> str:
    data = {
        "zones": {name: [p.x, p.y] for name, p in sorted(smap.zones.items())},
        "workspace": {
            "min": [workspace.min_corner.x, workspace.min_corner.y],
            "max": [workspace.max_corner.x, workspace.max_corner.y],
            "cols": workspace.grid_cols,
            "rows": workspace.grid_rows,
        },
    }
    return json.dumps(data, indent=2, sort_keys=True) + "\n"


def save_semantic_map(smap: SemanticMap, workspace: Workspace, path: str | Path) -> None:
    Path(path).write_text(dump_semantic_map(smap, workspace), encoding="utf-8")


def load_occupancy(path: str | Path, workspace: Workspace) -> OccupancyGrid:
    """Optional occupancy file: JSON list of [col, row] blocked cells."""
    cells = json.loads(Path(path).read_text(encoding="utf-8"))
    blocked = frozenset(GridCell(int(c), int(r)) for c, r in cells)
    return OccupancyGrid(workspace=workspace, blocked=blocked)
