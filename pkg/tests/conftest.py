import pytest

from relaysim.geometry import Point, Workspace
from relaysim.world import OccupancyGrid, SemanticMap


@pytest.fixture
def workspace20() -> Workspace:
    return Workspace(Point(0.0, 0.0), Point(20.0, 20.0), 20, 20)


@pytest.fixture
def grid20(workspace20) -> OccupancyGrid:
    return OccupancyGrid(workspace=workspace20)


@pytest.fixture
def five_zone_map() -> SemanticMap:
    return SemanticMap.from_raw(
        {
            "Kitchen": Point(2.5, 17.5),
            "Living Area": Point(10.5, 10.5),
            "Storage Area": Point(17.5, 17.5),
            "Bedroom": Point(17.5, 2.5),
            "Bathroom": Point(2.5, 2.5),
        }
    )
