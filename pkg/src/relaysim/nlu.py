"""Natural-language command parsing into structured pickup/delivery tasks.

Two routes: a deterministic grammar parser, and a pluggable HTTP client for
an external interpreter that speaks a small JSON contract.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import requests

from .errors import (
    EndpointUnreachable,
    MalformedResponse,
    PointOutsideWorkspace,
    SameZone,
    UnknownZone,
    UnparsableCommand,
)
from .geometry import Point, Workspace
from .world import SemanticMap, normalize_zone_name, resolve_zone

_VERBS = ("bring", "take", "deliver", "carry", "move")
_COMMAND_RE = re.compile(
    r"^(?:please\s+)?(?P<verb>" + "|".join(_VERBS) + r")\s+"
    r"(?P<item>.+?)\s+from\s+(?P<pickup>.+?)\s+to\s+(?P<drop>.+?)$",
    re.IGNORECASE,
)
_ARTICLE_RE = re.compile(r"^(?:the|a|an)\s+", re.IGNORECASE)


@dataclass(frozen=True)
class TaskSpec:
    pickup: Point
    drop: Point
    item: str
    source_text: str


@dataclass(frozen=True)
class InterpreterConfig:
    mode: str = "grammar"  # "grammar" | "external"
    endpoint: str | None = None
    timeout: float = 5.0
    fallback: bool = True

    def __post_init__(self) -> None:
        if self.mode not in ("grammar", "external"):
            raise ValueError(f"unknown interpreter mode {self.mode!r}")
        if self.mode == "external" and not self.endpoint:
            raise ValueError("external mode requires an endpoint")


def _strip_article(phrase: str) -> str:
    return _ARTICLE_RE.sub("", phrase.strip())


def parse_command(text: str, smap: SemanticMap) -> TaskSpec:
    """Grammar route: '<verb> <item> from <zone> to <zone>'."""
    if not text or not text.strip():
        raise UnparsableCommand("empty command")
    cleaned = re.sub(r"\s+", " ", text.strip()).rstrip(".!?").strip()
    m = _COMMAND_RE.match(cleaned)
    if m is None:
        raise UnparsableCommand(f"command does not match the grammar: {text!r}")
    item = normalize_zone_name(_strip_article(m.group("item")))
    pickup_name = _strip_article(m.group("pickup"))
    drop_name = _strip_article(m.group("drop"))
    if not item:
        raise UnparsableCommand("missing item")
    pickup = resolve_zone(pickup_name, smap)
    drop = resolve_zone(drop_name, smap)
    if pickup == drop:
        raise SameZone(f"pickup and drop both resolve to {pickup_name!r}")
    return TaskSpec(pickup=pickup, drop=drop, item=item, source_text=text)


def interpret_external(
    text: str, smap: SemanticMap, config: InterpreterConfig
) -> TaskSpec:
    """External route: POST the command and known zones, resolve the reply.

    Falls back to the grammar parser on transport failures or malformed
    replies when config.fallback is on; unknown zones are semantic errors
    and always raise.
    """
    if config.mode != "external":
        raise ValueError("interpret_external requires mode='external'")
    payload = {"command": text, "zones": smap.zone_names()}
    try:
        resp = requests.post(config.endpoint, json=payload, timeout=config.timeout)
        body = resp.json()
        pickup_name = body["pickup"]
        drop_name = body["drop"]
        item = str(body["item"])
    except (requests.RequestException, ValueError, KeyError, TypeError) as exc:
        if config.fallback:
            return parse_command(text, smap)
        if isinstance(exc, requests.RequestException):
            raise EndpointUnreachable(str(exc)) from exc
        raise MalformedResponse(str(exc)) from exc
    pickup = resolve_zone(pickup_name, smap)
    drop = resolve_zone(drop_name, smap)
    if pickup == drop:
        raise SameZone(f"interpreter returned identical zones {pickup_name!r}")
    return TaskSpec(pickup=pickup, drop=drop, item=item, source_text=text)


def interpret(text: str, smap: SemanticMap, config: InterpreterConfig) -> TaskSpec:
    if config.mode == "external":
        return interpret_external(text, smap, config)
    return parse_command(text, smap)


def validate_task(task: TaskSpec, workspace: Workspace) -> TaskSpec:
    if not workspace.contains(task.pickup):
        raise PointOutsideWorkspace("pickup outside workspace")
    if not workspace.contains(task.drop):
        raise PointOutsideWorkspace("drop outside workspace")
    if task.pickup == task.drop:
        raise SameZone("pickup equals drop")
    return task
