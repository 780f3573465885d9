"""Deterministic tick-based relay execution and the randomized batch harness.

One trial: place robots, partition the workspace, build a relay plan, then
step every robot one grid cell per tick until the item is delivered or the
tick budget runs out. Trials are fully determined by (config, seed).
"""

from __future__ import annotations

import json
import math
import random
from dataclasses import dataclass, field, replace
from statistics import mean, pstdev

from .coordination import (
    EventKind,
    FsmEvent,
    HandoffMessage,
    LedStatus,
    MessageBus,
    MessageKind,
    RobotFsm,
    RobotState,
    Role,
    fsm_step,
)
from .errors import NoCompletedTrials, PlacementExhausted
from .geometry import Point, Workspace, compute_voronoi, dist
from .nlu import TaskSpec
from .planning import RelayPlan, astar, build_relay_plan, single_agent_baseline
from .world import GridCell, OccupancyGrid, cell_of, center_of

# ticks a robot waits behind an occupied cell before replanning around it
_REPLAN_AFTER = 3

_NEIGHBOR_OFFSETS = ((0, 1), (1, 0), (0, -1), (-1, 0), (1, 1), (1, -1), (-1, 1), (-1, -1))


@dataclass(frozen=True)
class SimConfig:
    grid_cols: int = 20
    grid_rows: int = 20
    team_sizes: tuple[int, ...] = (1, 3, 5, 7, 10)
    trials_per_size: int = 100
    min_task_separation: float = 8.0
    seed: int = 0
    message_delay: int = 0
    tick_budget: int | None = None  # defaults to 10 * grid area

    def __post_init__(self) -> None:
        diam = math.hypot(self.grid_cols, self.grid_rows)
        if self.min_task_separation >= diam:
            raise ValueError("min_task_separation must be below the grid diameter")
        if self.trials_per_size < 1:
            raise ValueError("trials_per_size must be >= 1")

    @property
    def budget(self) -> int:
        if self.tick_budget is not None:
            return self.tick_budget
        return 10 * self.grid_cols * self.grid_rows

    def workspace(self) -> Workspace:
        return Workspace(
            min_corner=Point(0.0, 0.0),
            max_corner=Point(float(self.grid_cols), float(self.grid_rows)),
            grid_cols=self.grid_cols,
            grid_rows=self.grid_rows,
        )

    @staticmethod
    def from_dict(data: dict) -> "SimConfig":
        kwargs = dict(data)
        if "team_sizes" in kwargs:
            kwargs["team_sizes"] = tuple(int(n) for n in kwargs["team_sizes"])
        return SimConfig(**kwargs)


@dataclass
class TrialRecord:
    trial_id: str
    team_size: int
    seed: str
    task: TaskSpec
    active_count: int
    per_agent_moves: dict[int, int]
    total_moves: int
    baseline_total_moves: int
    ticks: int
    completed: bool

    def to_dict(self) -> dict:
        return {
            "trial_id": self.trial_id,
            "team_size": self.team_size,
            "seed": self.seed,
            "task": {
                "pickup": [self.task.pickup.x, self.task.pickup.y],
                "drop": [self.task.drop.x, self.task.drop.y],
                "item": self.task.item,
                "source_text": self.task.source_text,
            },
            "active_count": self.active_count,
            "per_agent_moves": {str(k): v for k, v in sorted(self.per_agent_moves.items())},
            "total_moves": self.total_moves,
            "baseline_total_moves": self.baseline_total_moves,
            "ticks": self.ticks,
            "completed": self.completed,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


@dataclass(frozen=True)
class SizeStats:
    team_size: int
    trials: int
    completed: int
    mean_total: float
    std_total: float
    mean_per_agent: float
    mean_active: float
    reduction: float


@dataclass(frozen=True)
class BatchSummary:
    per_size: dict[int, SizeStats]
    reduction_vs_baseline: float
    completion_rate: float


@dataclass(frozen=True)
class TickTrace:
    tick: int
    carriers: tuple[int, ...]
    positions: dict[int, GridCell]


@dataclass
class TrialOutcome:
    record: TrialRecord
    plan: RelayPlan
    messages: list[HandoffMessage]
    trace: list[TickTrace] | None = None


# --- trial generation --------------------------------------------------------


def generate_trial(
    team_size: int, config: SimConfig, rng: random.Random
) -> tuple[list[tuple[int, Point]], TaskSpec]:
    """Random distinct robot cells plus a pickup/drop pair split by the
    configured minimum separation; task cells never coincide with a robot's
    start cell so every goal cell stays physically reachable."""
    if team_size < 1:
        raise ValueError("team_size must be >= 1")
    cols, rows = config.grid_cols, config.grid_rows
    all_cells = [GridCell(c, r) for r in range(rows) for c in range(cols)]
    robot_cells = rng.sample(all_cells, team_size)
    taken = set(robot_cells)
    grid = OccupancyGrid(workspace=config.workspace())

    def rand_cell() -> GridCell:
        return GridCell(rng.randrange(cols), rng.randrange(rows))

    for _ in range(10_000):
        pickup_cell = rand_cell()
        drop_cell = rand_cell()
        if pickup_cell in taken or drop_cell in taken or pickup_cell == drop_cell:
            continue
        p = center_of(pickup_cell, grid)
        d = center_of(drop_cell, grid)
        if dist(p, d) >= config.min_task_separation:
            placements = [
                (i, center_of(cell, grid)) for i, cell in enumerate(robot_cells)
            ]
            task = TaskSpec(
                pickup=p,
                drop=d,
                item="package",
                source_text=(
                    f"deliver package from cell {pickup_cell.col},{pickup_cell.row} "
                    f"to cell {drop_cell.col},{drop_cell.row}"
                ),
            )
            return placements, task
    raise PlacementExhausted("could not satisfy task placement constraints")


# --- single-trial executor ---------------------------------------------------


@dataclass
class _Goal:
    point: Point
    kind: str  # "pickup" | "transfer_out" | "transfer_in" | "drop"
    cell: GridCell


@dataclass
class _Robot:
    rid: int
    cell: GridCell
    fsm: RobotFsm
    goals: list[_Goal] = field(default_factory=list)
    goal_idx: int = 0
    route: list[GridCell] = field(default_factory=list)
    blocked_ticks: int = 0
    moves: int = 0
    arrived: bool = False  # arrival event fired for the current goal
    deferred: list[HandoffMessage] = field(default_factory=list)
    # task-critical cells (pickup/drop) a robot must never rest on at a transfer
    critical: frozenset[GridCell] = frozenset()

    @property
    def goal(self) -> _Goal | None:
        if self.goal_idx < len(self.goals):
            return self.goals[self.goal_idx]
        return None


def _chebyshev(a: GridCell, b: GridCell) -> int:
    return max(abs(a.col - b.col), abs(a.row - b.row))


def _build_robots(
    plan: RelayPlan,
    placements: list[tuple[int, Point]],
    grid: OccupancyGrid,
    task_id: str,
) -> dict[int, _Robot]:
    task = plan.task
    active = plan.active
    k = len(active)
    pickup_cell = cell_of(task.pickup, grid)
    drop_cell = cell_of(task.drop, grid)
    critical = frozenset((pickup_cell, drop_cell))

    robots: dict[int, _Robot] = {}
    for rid, pos in placements:
        robots[rid] = _Robot(
            rid=rid, cell=cell_of(pos, grid), fsm=RobotFsm(robot_id=rid), critical=critical
        )

    for j, rid in enumerate(active):
        first = j == 0
        last = j == k - 1
        if k == 1:
            role = Role.INITIATOR
        else:
            role = Role.INITIATOR if first else Role.FINAL if last else Role.INTERMEDIATE
        incoming = plan.transfers[j - 1] if not first else None
        outgoing = plan.transfers[j] if not last else None
        fsm = RobotFsm(
            robot_id=rid,
            role=role,
            task_id=task_id,
            item=task.item,
            pickup_at=task.pickup if first else None,
            drop_at=task.drop if last else None,
            incoming_transfer=incoming,
            outgoing_transfer=outgoing,
            peer_prev=active[j - 1] if not first else None,
            peer_next=active[j + 1] if not last else None,
        )
        goals: list[_Goal] = []
        if first:
            goals.append(_Goal(task.pickup, "pickup", pickup_cell))
        else:
            goals.append(_Goal(incoming, "transfer_in", cell_of(incoming, grid)))
        if not last:
            goals.append(_Goal(outgoing, "transfer_out", cell_of(outgoing, grid)))
        else:
            goals.append(_Goal(task.drop, "drop", drop_cell))
        rb = robots[rid]
        rb.fsm = fsm
        rb.goals = goals
    return robots


def _plan_route(
    robot: _Robot,
    grid: OccupancyGrid,
    occupied: dict[GridCell, int] | None = None,
) -> list[GridCell]:
    goal = robot.goal
    if goal is None:
        return []
    if goal.kind in ("transfer_in", "transfer_out"):
        # any non-critical cell within one diagonal of the transfer cell works
        targets = [goal.cell] if goal.cell not in robot.critical else []
        for dc, dr in _NEIGHBOR_OFFSETS:
            cand = GridCell(goal.cell.col + dc, goal.cell.row + dr)
            if (
                grid.in_bounds(cand)
                and not grid.is_blocked(cand)
                and cand not in robot.critical
            ):
                targets.append(cand)
    else:
        targets = [goal.cell]
    extra = set()
    if occupied:
        extra = {c for c, rid in occupied.items() if rid != robot.rid}
    for target in targets:
        if target == robot.cell:
            return []
        if target in extra:
            continue
        work = grid
        if extra:
            try:
                work = OccupancyGrid(
                    workspace=grid.workspace,
                    blocked=grid.blocked | frozenset(extra - {target, robot.cell}),
                )
            except Exception:
                work = grid
        try:
            path = astar(work, robot.cell, target)
        except Exception:
            continue
        return list(path.cells[1:])
    return []


def _goal_arrived(robot: _Robot, grid: OccupancyGrid) -> bool:
    goal = robot.goal
    if goal is None:
        return False
    if goal.kind in ("transfer_in", "transfer_out"):
        # stop within one cell diagonal, but never rest on the pickup/drop cell
        return _chebyshev(robot.cell, goal.cell) <= 1 and robot.cell not in robot.critical
    return robot.cell == goal.cell


def simulate(
    plan: RelayPlan,
    placements: list[tuple[int, Point]],
    grid: OccupancyGrid,
    config: SimConfig,
    task_id: str = "task",
    record_trace: bool = False,
) -> TrialOutcome:
    """Run one relay plan to completion (or budget exhaustion)."""
    bus = MessageBus(delay=config.message_delay)
    robots = _build_robots(plan, placements, grid, task_id)
    order = sorted(robots)
    occupied: dict[GridCell, int] = {robots[r].cell: r for r in order}
    if len(occupied) != len(robots):
        raise ValueError("robots must start on distinct cells")

    completed = False
    done_tick = 0
    trace: list[TickTrace] | None = [] if record_trace else None

    def emit(msgs: list[HandoffMessage]) -> None:
        nonlocal completed
        for m in msgs:
            if m.kind is MessageKind.TASK_COMPLETE:
                completed = True
                bus.log.append(m)
            else:
                bus.send(m)

    def step_fsm(rb: _Robot, event: FsmEvent) -> None:
        rb.fsm, msgs = fsm_step(rb.fsm, event)
        emit(msgs)

    def process_arrivals(rb: _Robot, tick: int) -> None:
        # a single tick can chain arrivals when consecutive goals share a cell
        while True:
            goal = rb.goal
            if goal is None or rb.fsm.state is not RobotState.NAVIGATE:
                return
            if not _goal_arrived(rb, grid):
                return
            if rb.arrived:
                return
            rb.arrived = True
            rb.route = []
            step_fsm(rb, FsmEvent(EventKind.ARRIVED_WAYPOINT, tick=tick, at=goal.point))
            if rb.fsm.state is RobotState.PICKUP:
                step_fsm(rb, FsmEvent(EventKind.PICKUP_DONE, tick=tick))
                rb.goal_idx += 1
                rb.arrived = False
                continue
            if rb.fsm.state is RobotState.DELIVER:
                step_fsm(rb, FsmEvent(EventKind.DROP_DONE, tick=tick))
                rb.goal_idx += 1
                rb.arrived = False
                return
            if goal.kind == "transfer_out":
                return  # Relay state: wait for the ack
            if goal.kind == "transfer_in":
                return  # wait for HandoffReady before advancing
            return

    def deliver_messages(tick: int) -> None:
        progress = True
        while progress:
            progress = False
            for rid in order:
                rb = robots[rid]
                pending = rb.deferred + bus.poll(rid, tick)
                rb.deferred = []
                for msg in pending:
                    if msg.kind is MessageKind.HANDOFF_READY:
                        goal = rb.goal
                        at_transfer = (
                            goal is not None
                            and goal.kind == "transfer_in"
                            and rb.arrived
                        )
                        if not at_transfer:
                            rb.deferred.append(msg)
                            continue
                        here = center_of(rb.cell, grid)
                        step_fsm(
                            rb,
                            FsmEvent(
                                EventKind.MESSAGE_RECEIVED, tick=tick, at=here, message=msg
                            ),
                        )
                        # possession received: move on to the next leg
                        rb.goal_idx += 1
                        rb.arrived = False
                        process_arrivals(rb, tick)
                        progress = True
                    elif msg.kind is MessageKind.HANDOFF_ACK:
                        step_fsm(
                            rb,
                            FsmEvent(EventKind.MESSAGE_RECEIVED, tick=tick, message=msg),
                        )
                        progress = True
                    else:  # TASK_COMPLETE is a notification, not an FSM input
                        progress = True

    # tick 0: assign segments, then settle arrivals already satisfied
    for rid in order:
        rb = robots[rid]
        if rb.fsm.role is not Role.BYSTANDER:
            seg = plan.segments[plan.active.index(rid)]
            step_fsm(
                rb,
                FsmEvent(EventKind.ASSIGN_SEGMENT, tick=0, waypoints=tuple(seg[1:])),
            )
            process_arrivals(rb, 0)
    deliver_messages(0)
    if trace is not None:
        trace.append(
            TickTrace(
                tick=0,
                carriers=tuple(r for r in order if robots[r].fsm.carrying is not None),
                positions={r: robots[r].cell for r in order},
            )
        )

    tick = 0
    while not completed and tick < config.budget:
        tick += 1
        # movement phase: lower ids move first; occupied next cells mean waiting
        for rid in order:
            rb = robots[rid]
            if rb.fsm.state is not RobotState.NAVIGATE or rb.goal is None or rb.arrived:
                continue
            if _goal_arrived(rb, grid):
                continue
            if not rb.route:
                rb.route = _plan_route(rb, grid)
            if rb.blocked_ticks >= _REPLAN_AFTER:
                detour = _plan_route(rb, grid, occupied)
                if detour:
                    rb.route = detour
                    rb.blocked_ticks = 0
            if not rb.route:
                rb.blocked_ticks += 1
                continue
            nxt = rb.route[0]
            if nxt in occupied:
                rb.blocked_ticks += 1
                continue
            del occupied[rb.cell]
            rb.cell = nxt
            occupied[nxt] = rid
            rb.route.pop(0)
            rb.moves += 1
            rb.blocked_ticks = 0
        # arrival + FSM phase
        for rid in order:
            process_arrivals(robots[rid], tick)
        # message cascade (delay 0 resolves a full handoff within the tick)
        deliver_messages(tick)
        if trace is not None:
            trace.append(
                TickTrace(
                    tick=tick,
                    carriers=tuple(
                        r for r in order if robots[r].fsm.carrying is not None
                    ),
                    positions={r: robots[r].cell for r in order},
                )
            )
        if completed:
            done_tick = tick

    per_agent = {rid: robots[rid].moves for rid in plan.active}
    record = TrialRecord(
        trial_id=task_id,
        team_size=len(placements),
        seed="",
        task=plan.task,
        active_count=len(plan.active),
        per_agent_moves=per_agent,
        total_moves=sum(per_agent.values()),
        baseline_total_moves=0,
        ticks=done_tick if completed else tick,
        completed=completed,
    )
    return TrialOutcome(record=record, plan=plan, messages=bus.log, trace=trace)


def run_trial(
    placements: list[tuple[int, Point]],
    task: TaskSpec,
    config: SimConfig,
    baseline: bool = False,
    task_id: str = "task",
    record_trace: bool = False,
) -> TrialOutcome:
    """Plan and execute one trial end to end."""
    workspace = config.workspace()
    grid = OccupancyGrid(workspace=workspace)
    diagram = compute_voronoi(placements, workspace)
    if baseline:
        plan = single_agent_baseline(task, placements, diagram, grid)
    else:
        plan = build_relay_plan(task, placements, diagram, grid)
    return simulate(plan, placements, grid, config, task_id=task_id, record_trace=record_trace)


# --- batch harness -----------------------------------------------------------


def trial_seed(master_seed: int, team_size: int, trial_index: int) -> str:
    """Counter-based per-trial seed key, stable across runs and platforms."""
    return f"{master_seed}/{team_size}/{trial_index}"


def run_batch(
    config: SimConfig, record_trace: bool = False
) -> tuple[BatchSummary, list[TrialRecord], list[TrialOutcome]]:
    records: list[TrialRecord] = []
    outcomes: list[TrialOutcome] = []
    for size in config.team_sizes:
        for i in range(config.trials_per_size):
            seed_key = trial_seed(config.seed, size, i)
            rng = random.Random(seed_key)
            placements, task = generate_trial(size, config, rng)
            tid = f"trial-{size}-{i}"
            outcome = run_trial(
                placements, task, config, task_id=tid, record_trace=record_trace
            )
            base = run_trial(
                placements, task, config, baseline=True, task_id=tid + "-baseline"
            )
            rec = outcome.record
            rec.seed = seed_key
            rec.baseline_total_moves = base.record.total_moves
            records.append(rec)
            outcomes.append(outcome)
    return summarize(records), records, outcomes


def summarize(records: list[TrialRecord]) -> BatchSummary:
    """Aggregate per-team-size statistics over completed trials."""
    by_size: dict[int, list[TrialRecord]] = {}
    for rec in records:
        by_size.setdefault(rec.team_size, []).append(rec)
    per_size: dict[int, SizeStats] = {}
    for size in sorted(by_size):
        recs = by_size[size]
        done = [r for r in recs if r.completed]
        if not done:
            raise NoCompletedTrials(f"no completed trials for team size {size}")
        totals = [r.total_moves for r in done]
        per_agent = [r.total_moves / r.active_count for r in done]
        actives = [r.active_count for r in done]
        baselines = [r.baseline_total_moves for r in done]
        mean_base = mean(baselines)
        reduction = 1.0 - (mean(per_agent) / mean_base) if mean_base > 0 else 0.0
        per_size[size] = SizeStats(
            team_size=size,
            trials=len(recs),
            completed=len(done),
            mean_total=mean(totals),
            std_total=pstdev(totals) if len(totals) > 1 else 0.0,
            mean_per_agent=mean(per_agent),
            mean_active=mean(actives),
            reduction=reduction,
        )
    largest = max(per_size)
    total_trials = sum(s.trials for s in per_size.values())
    total_done = sum(s.completed for s in per_size.values())
    return BatchSummary(
        per_size=per_size,
        reduction_vs_baseline=per_size[largest].reduction,
        completion_rate=total_done / total_trials,
    )


def summary_to_csv(summary: BatchSummary) -> str:
    lines = ["team_size,mean_total,std_total,mean_per_agent,mean_active,reduction"]
    for size in sorted(summary.per_size):
        s = summary.per_size[size]
        lines.append(
            f"{size},{s.mean_total:.6f},{s.std_total:.6f},"
            f"{s.mean_per_agent:.6f},{s.mean_active:.6f},{s.reduction:.6f}"
        )
    return "\n".join(lines) + "\n"
