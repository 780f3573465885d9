"""Per-robot finite-state machine and the in-process handoff message bus."""

from __future__ import annotations

import dataclasses
import json
from collections import deque
from dataclasses import dataclass, field
from enum import Enum

from .errors import IllegalTransition
from .geometry import Point, dist

# points closer than this count as the same waypoint
WAYPOINT_TOL = 1e-9


class RobotState(str, Enum):
    IDLE = "Idle"
    NAVIGATE = "Navigate"
    PICKUP = "Pickup"
    RELAY = "Relay"
    DELIVER = "Deliver"


class Role(str, Enum):
    INITIATOR = "initiator"
    INTERMEDIATE = "intermediate"
    FINAL = "final"
    BYSTANDER = "bystander"


class MessageKind(str, Enum):
    HANDOFF_READY = "HandoffReady"
    HANDOFF_ACK = "HandoffAck"
    TASK_COMPLETE = "TaskComplete"


class LedStatus(str, Enum):
    GREEN = "green"  # carrying the item
    BLUE = "blue"  # waiting at a transfer point
    OFF = "off"


@dataclass(frozen=True)
class HandoffMessage:
    kind: MessageKind
    task_id: str
    from_id: int
    to_id: int
    at: Point
    tick: int
    status_led: LedStatus = LedStatus.OFF

    def to_dict(self) -> dict:
        return {
            "kind": self.kind.value,
            "task_id": self.task_id,
            "from": self.from_id,
            "to": self.to_id,
            "at": [self.at.x, self.at.y],
            "tick": self.tick,
            "status_led": self.status_led.value,
        }

    def to_json_line(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)


class EventKind(str, Enum):
    ASSIGN_SEGMENT = "AssignSegment"
    ARRIVED_WAYPOINT = "ArrivedWaypoint"
    PICKUP_DONE = "PickupDone"
    MESSAGE_RECEIVED = "MessageReceived"
    DROP_DONE = "DropDone"


@dataclass(frozen=True)
class FsmEvent:
    kind: EventKind
    tick: int
    at: Point | None = None  # ArrivedWaypoint location
    message: HandoffMessage | None = None  # MessageReceived payload
    waypoints: tuple[Point, ...] = ()  # AssignSegment payload


@dataclass(frozen=True)
class RobotFsm:
    robot_id: int
    state: RobotState = RobotState.IDLE
    role: Role = Role.BYSTANDER
    waypoints: tuple[Point, ...] = ()
    carrying: str | None = None
    status_led: LedStatus = LedStatus.OFF
    task_id: str = ""
    item: str = ""
    pickup_at: Point | None = None
    drop_at: Point | None = None
    outgoing_transfer: Point | None = None
    incoming_transfer: Point | None = None
    peer_prev: int | None = None  # robot handing the item to us
    peer_next: int | None = None  # robot we hand the item to


def _same_point(a: Point | None, b: Point | None) -> bool:
    return a is not None and b is not None and dist(a, b) <= WAYPOINT_TOL


def fsm_step(fsm: RobotFsm, event: FsmEvent) -> tuple[RobotFsm, list[HandoffMessage]]:
    """Apply one event to the FSM; returns the successor and emitted messages.

    An event not covered by the transition table is a protocol bug and
    raises IllegalTransition.
    """
    k = event.kind
    s = fsm.state

    if k == EventKind.ASSIGN_SEGMENT:
        if s is not RobotState.IDLE or fsm.role is Role.BYSTANDER:
            raise IllegalTransition(f"AssignSegment in state {s} role {fsm.role}")
        return dataclasses.replace(
            fsm, state=RobotState.NAVIGATE, waypoints=event.waypoints
        ), []

    if k == EventKind.ARRIVED_WAYPOINT:
        if s is not RobotState.NAVIGATE:
            raise IllegalTransition(f"ArrivedWaypoint in state {s}")
        remaining = fsm.waypoints
        if remaining and _same_point(remaining[0], event.at):
            remaining = remaining[1:]
        nxt = dataclasses.replace(fsm, waypoints=remaining)
        if _same_point(event.at, fsm.pickup_at) and fsm.carrying is None:
            return dataclasses.replace(nxt, state=RobotState.PICKUP), []
        if _same_point(event.at, fsm.outgoing_transfer) and fsm.carrying is not None:
            ready = HandoffMessage(
                kind=MessageKind.HANDOFF_READY,
                task_id=fsm.task_id,
                from_id=fsm.robot_id,
                to_id=fsm.peer_next if fsm.peer_next is not None else fsm.robot_id,
                at=event.at,
                tick=event.tick,
                status_led=LedStatus.BLUE,
            )
            return dataclasses.replace(
                nxt, state=RobotState.RELAY, status_led=LedStatus.BLUE
            ), [ready]
        if _same_point(event.at, fsm.drop_at) and fsm.carrying is not None:
            return dataclasses.replace(nxt, state=RobotState.DELIVER), []
        return nxt, []  # ordinary intermediate waypoint

    if k == EventKind.PICKUP_DONE:
        if s is not RobotState.PICKUP:
            raise IllegalTransition(f"PickupDone in state {s}")
        return dataclasses.replace(
            fsm, state=RobotState.NAVIGATE, carrying=fsm.item, status_led=LedStatus.GREEN
        ), []

    if k == EventKind.MESSAGE_RECEIVED:
        msg = event.message
        if msg is None:
            raise IllegalTransition("MessageReceived without a message")
        if s is RobotState.RELAY and msg.kind is MessageKind.HANDOFF_ACK:
            return dataclasses.replace(
                fsm, state=RobotState.IDLE, carrying=None, status_led=LedStatus.OFF
            ), []
        if s is RobotState.NAVIGATE and msg.kind is MessageKind.HANDOFF_READY:
            # receiver side: must already be at its incoming transfer point
            ack = HandoffMessage(
                kind=MessageKind.HANDOFF_ACK,
                task_id=fsm.task_id,
                from_id=fsm.robot_id,
                to_id=msg.from_id,
                at=event.at if event.at is not None else msg.at,
                tick=event.tick,
                status_led=LedStatus.GREEN,
            )
            return dataclasses.replace(
                fsm, carrying=fsm.item, status_led=LedStatus.GREEN
            ), [ack]
        raise IllegalTransition(f"{msg.kind} in state {s}")

    if k == EventKind.DROP_DONE:
        if s is not RobotState.DELIVER:
            raise IllegalTransition(f"DropDone in state {s}")
        done = HandoffMessage(
            kind=MessageKind.TASK_COMPLETE,
            task_id=fsm.task_id,
            from_id=fsm.robot_id,
            to_id=fsm.robot_id,
            at=fsm.drop_at if fsm.drop_at is not None else Point(0.0, 0.0),
            tick=event.tick,
            status_led=LedStatus.OFF,
        )
        return dataclasses.replace(
            fsm, state=RobotState.IDLE, carrying=None, status_led=LedStatus.OFF
        ), [done]

    raise IllegalTransition(f"unhandled event kind {k}")


@dataclass
class MessageBus:
    """Reliable FIFO bus with an optional fixed delivery delay in ticks."""

    delay: int = 0
    _queues: dict[int, deque[tuple[int, int, HandoffMessage]]] = field(default_factory=dict)
    _seq: int = 0
    log: list[HandoffMessage] = field(default_factory=list)

    def send(self, message: HandoffMessage) -> None:
        q = self._queues.setdefault(message.to_id, deque())
        q.append((message.tick + self.delay, self._seq, message))
        self._seq += 1
        self.log.append(message)

    def poll(self, robot_id: int, tick: int) -> list[HandoffMessage]:
        """Deliverable messages for robot_id, FIFO, each exactly once."""
        q = self._queues.get(robot_id)
        if not q:
            return []
        out: list[HandoffMessage] = []
        while q and q[0][0] <= tick:
            out.append(q.popleft()[2])
        return out
