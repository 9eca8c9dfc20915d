"""In-memory object-centric event log, JSON-OCEL I/O, flattening and traces.

Events are kept in a total order: ascending timestamp, ties broken by the
lexicographic event id. Every consumer downstream (traces, sub-logs, DFG
discovery) relies on ``OCEL.events`` iterating in that order.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Iterable, Mapping

__all__ = [
    "OcelError",
    "OcelParseError",
    "DanglingReferenceError",
    "UnknownObjectTypeError",
    "Event",
    "ObjectRecord",
    "OCEL",
    "FlattenedLog",
    "Trace",
    "parse_ocel",
    "load_ocel",
    "dump_ocel",
    "write_ocel",
    "flatten",
    "extract_trace",
    "all_traces",
    "parse_timestamp",
    "format_timestamp",
]

ATTRIBUTE_TYPES = ("string", "integer", "float", "boolean")
# extension key inside ocel:global-log; the OCEL 1.0 JSON layout has no slot for types
ATTRIBUTE_TYPES_KEY = "ocel:attribute-types"


class OcelError(ValueError):
    pass


class OcelParseError(OcelError):
    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


class DanglingReferenceError(OcelParseError):
    def __init__(self, path: str, object_id: str):
        self.object_id = object_id
        super().__init__(path, f"reference to undeclared object {object_id!r}")


class UnknownObjectTypeError(OcelError, KeyError):
    def __init__(self, otype: str, known: Iterable[str]):
        self.otype = otype
        self.known = sorted(known)
        super().__init__(f"unknown object type {otype!r}; known types: {', '.join(self.known) or '(none)'}")

    __str__ = ValueError.__str__


def parse_timestamp(value: Any) -> datetime:
    """Parse an ISO-8601 timestamp, truncated to milliseconds.

    Naive timestamps are read as UTC.
    """
    if not isinstance(value, str):
        raise ValueError(f"expected a string, got {type(value).__name__}")
    text = value.strip()
    if text.endswith(("Z", "z")):
        text = text[:-1] + "+00:00"
    ts = datetime.fromisoformat(text)
    if ts.tzinfo is None:
        ts = ts.replace(tzinfo=timezone.utc)
    return ts.replace(microsecond=ts.microsecond // 1000 * 1000)


def format_timestamp(ts: datetime) -> str:
    return ts.isoformat(sep=" ", timespec="milliseconds")


@dataclass(frozen=True)
class Event:
    id: str
    activity: str
    timestamp: datetime
    omap: frozenset[str]
    vmap: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class ObjectRecord:
    id: str
    otype: str
    ovmap: dict[str, Any] = field(default_factory=dict)


@dataclass(frozen=True)
class OCEL:
    """An object-centric event log.

    ``events`` maps event id to :class:`Event` and iterates in the log's total
    order. Treat instances as immutable; use :meth:`restrict` to derive
    sub-logs.
    """

    events: dict[str, Event]
    objects: dict[str, ObjectRecord]
    object_types: frozenset[str]
    attribute_types: dict[str, str]
    global_log: dict[str, Any] = field(default_factory=dict)

    @property
    def order(self) -> tuple[str, ...]:
        return tuple(self.events)

    def objects_of_type(self, otype: str) -> list[str]:
        return sorted(oid for oid, rec in self.objects.items() if rec.otype == otype)

    def restrict(self, event_ids: Iterable[str], global_log: Mapping[str, Any] | None = None) -> "OCEL":
        """Sub-log holding ``event_ids`` with full omaps/vmaps.

        Objects are restricted to those referenced by the kept events.
        """
        keep = set(event_ids)
        events = {eid: ev for eid, ev in self.events.items() if eid in keep}
        referenced = set().union(*(ev.omap for ev in events.values())) if events else set()
        objects = {oid: rec for oid, rec in self.objects.items() if oid in referenced}
        return OCEL(
            events=events,
            objects=objects,
            object_types=frozenset(rec.otype for rec in objects.values()),
            attribute_types=dict(self.attribute_types),
            global_log=dict(self.global_log if global_log is None else global_log),
        )

    def check(self) -> None:
        """Raise :class:`OcelError` if a structural invariant is violated."""
        for eid, ev in self.events.items():
            missing = ev.omap - self.objects.keys()
            if missing:
                raise OcelError(f"event {eid!r} references undeclared objects {sorted(missing)}")
            if not ev.activity:
                raise OcelError(f"event {eid!r} has an empty activity")
        for oid, rec in self.objects.items():
            if rec.otype not in self.object_types:
                raise OcelError(f"object {oid!r} has type {rec.otype!r} outside object_types")
        keys = [(ev.timestamp, eid) for eid, ev in self.events.items()]
        if keys != sorted(keys):
            raise OcelError("events are not in (timestamp, event id) order")


def _infer_type(values: list[Any]) -> str:
    if values and all(isinstance(v, bool) for v in values):
        return "boolean"
    if values and all(isinstance(v, int) and not isinstance(v, bool) for v in values):
        return "integer"
    if values and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in values):
        return "float"
    return "string"


def _conform(value: Any, atype: str, path: str) -> Any:
    if atype == "string":
        return value if isinstance(value, str) else json.dumps(value) if isinstance(value, (dict, list)) else str(value)
    if atype == "boolean":
        if isinstance(value, bool):
            return value
        raise OcelParseError(path, f"value {value!r} is not a boolean")
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        try:
            value = float(value) if atype == "float" else int(value)
        except (TypeError, ValueError):
            raise OcelParseError(path, f"value {value!r} does not conform to type {atype}") from None
    if atype == "integer":
        if isinstance(value, float) and not value.is_integer():
            raise OcelParseError(path, f"value {value!r} does not conform to type integer")
        return int(value)
    value = float(value)
    if not math.isfinite(value):
        raise OcelParseError(path, f"non-finite value {value!r}")
    return value


def _require(mapping: Mapping[str, Any], key: str, path: str) -> Any:
    if key not in mapping:
        raise OcelParseError(f"{path}/{key}", "missing mandatory key")
    return mapping[key]


class _KeyedObject(dict):
    """JSON object that remembers keys seen more than once."""

    duplicates: list[str]


def _keyed_object(pairs: list[tuple[str, Any]]) -> _KeyedObject:
    out = _KeyedObject()
    out.duplicates = []
    for key, value in pairs:
        if key in out:
            out.duplicates.append(key)
        out[key] = value
    return out


def parse_ocel(source: bytes | str | Mapping[str, Any]) -> OCEL:
    """Parse a JSON-OCEL document into an :class:`OCEL`."""
    if isinstance(source, Mapping):
        doc = source
    else:
        try:
            doc = json.loads(source, object_pairs_hook=_keyed_object)
        except json.JSONDecodeError as exc:
            raise OcelParseError("$", f"invalid JSON: {exc}") from None
    if not isinstance(doc, Mapping):
        raise OcelParseError("$", "top-level value must be an object")

    global_log = dict(doc.get("ocel:global-log") or {})
    raw_events = _require(doc, "ocel:events", "$")
    raw_objects = _require(doc, "ocel:objects", "$")
    if not isinstance(raw_events, Mapping):
        raise OcelParseError("ocel:events", "must be an object keyed by event id")
    if not isinstance(raw_objects, Mapping):
        raise OcelParseError("ocel:objects", "must be an object keyed by object id")
    for section, body in (("ocel:events", raw_events), ("ocel:objects", raw_objects)):
        dups = getattr(body, "duplicates", None)
        if dups:
            kind = "event" if section == "ocel:events" else "object"
            raise OcelParseError(f"{section}/{dups[0]}", f"duplicate {kind} id {dups[0]!r}")

    objects_raw: dict[str, tuple[str, dict[str, Any]]] = {}
    for oid, body in raw_objects.items():
        path = f"ocel:objects/{oid}"
        if not isinstance(body, Mapping):
            raise OcelParseError(path, "object entry must be a JSON object")
        otype = _require(body, "ocel:type", path)
        if not isinstance(otype, str) or not otype:
            raise OcelParseError(f"{path}/ocel:type", "object type must be a non-empty string")
        ovmap = body.get("ocel:ovmap") or {}
        if not isinstance(ovmap, Mapping):
            raise OcelParseError(f"{path}/ocel:ovmap", "must be a JSON object")
        objects_raw[str(oid)] = (otype, dict(ovmap))

    events_raw = []
    for eid, body in raw_events.items():
        path = f"ocel:events/{eid}"
        if not isinstance(body, Mapping):
            raise OcelParseError(path, "event entry must be a JSON object")
        activity = _require(body, "ocel:activity", path)
        if not isinstance(activity, str) or not activity:
            raise OcelParseError(f"{path}/ocel:activity", "activity must be a non-empty string")
        raw_ts = _require(body, "ocel:timestamp", path)
        try:
            ts = parse_timestamp(raw_ts)
        except ValueError:
            raise OcelParseError(f"{path}/ocel:timestamp", f"unparseable timestamp {raw_ts!r}") from None
        omap = _require(body, "ocel:omap", path)
        if not isinstance(omap, list) or not all(isinstance(o, str) for o in omap):
            raise OcelParseError(f"{path}/ocel:omap", "must be a list of object ids")
        for oid in omap:
            if oid not in objects_raw:
                raise DanglingReferenceError(f"{path}/ocel:omap", oid)
        vmap = body.get("ocel:vmap") or {}
        if not isinstance(vmap, Mapping):
            raise OcelParseError(f"{path}/ocel:vmap", "must be a JSON object")
        events_raw.append((str(eid), activity, ts, frozenset(omap), dict(vmap)))

    declared = global_log.get(ATTRIBUTE_TYPES_KEY) or {}
    observed: dict[str, list[Any]] = {}
    for *_, vmap in events_raw:
        for name, value in vmap.items():
            observed.setdefault(name, []).append(value)
    for _, ovmap in objects_raw.values():
        for name, value in ovmap.items():
            observed.setdefault(name, []).append(value)
    attribute_types: dict[str, str] = {}
    for name in sorted(set(observed) | set(declared)):
        atype = declared.get(name)
        if atype is None:
            atype = _infer_type(observed.get(name, []))
        elif atype not in ATTRIBUTE_TYPES:
            atype = "string"
        attribute_types[name] = atype

    objects = {
        oid: ObjectRecord(
            oid,
            otype,
            {k: _conform(v, attribute_types[k], f"ocel:objects/{oid}/ocel:ovmap/{k}") for k, v in ovmap.items()},
        )
        for oid, (otype, ovmap) in objects_raw.items()
    }
    events_raw.sort(key=lambda r: (r[2], r[0]))
    events = {
        eid: Event(
            eid,
            activity,
            ts,
            omap,
            {k: _conform(v, attribute_types[k], f"ocel:events/{eid}/ocel:vmap/{k}") for k, v in vmap.items()},
        )
        for eid, activity, ts, omap, vmap in events_raw
    }
    object_types = set(global_log.get("ocel:object-types") or ())
    object_types.update(rec.otype for rec in objects.values())
    return OCEL(events, objects, frozenset(object_types), attribute_types, global_log)


def load_ocel(path: str | Path) -> OCEL:
    return parse_ocel(Path(path).read_bytes())


def dump_ocel(log: OCEL) -> dict[str, Any]:
    """JSON-ready dict of ``log`` in the JSON-OCEL layout."""
    global_log = dict(log.global_log)
    global_log["ocel:attribute-names"] = sorted(log.attribute_types)
    global_log["ocel:object-types"] = sorted(log.object_types)
    global_log[ATTRIBUTE_TYPES_KEY] = dict(sorted(log.attribute_types.items()))
    global_log.setdefault("ocel:version", "1.0")
    global_log.setdefault("ocel:ordering", "timestamp")
    return {
        "ocel:global-log": global_log,
        "ocel:events": {
            ev.id: {
                "ocel:activity": ev.activity,
                "ocel:timestamp": format_timestamp(ev.timestamp),
                "ocel:omap": sorted(ev.omap),
                "ocel:vmap": dict(sorted(ev.vmap.items())),
            }
            for ev in log.events.values()
        },
        "ocel:objects": {
            oid: {"ocel:type": rec.otype, "ocel:ovmap": dict(sorted(rec.ovmap.items()))}
            for oid, rec in sorted(log.objects.items())
        },
    }


def write_ocel(log: OCEL, path: str | Path) -> None:
    Path(path).write_text(json.dumps(dump_ocel(log), indent=2, ensure_ascii=False) + "\n", encoding="utf-8")


@dataclass(frozen=True)
class FlattenedLog:
    otype: str
    events: tuple[Event, ...]
    case_map: dict[str, frozenset[str]]

    def cases(self) -> list[str]:
        return sorted(set().union(*self.case_map.values())) if self.case_map else []


@dataclass(frozen=True)
class Trace:
    object_id: str
    activities: tuple[str, ...]

    def __len__(self) -> int:
        return len(self.activities)


def flatten(log: OCEL, otype: str) -> FlattenedLog:
    """Project ``log`` onto one object type.

    Keeps the events that carry at least one object of ``otype`` and maps
    each to exactly those objects. Flattened events follow the global order.
    """
    if otype not in log.object_types:
        raise UnknownObjectTypeError(otype, log.object_types)
    events = []
    case_map = {}
    for ev in log.events.values():
        cases = frozenset(o for o in ev.omap if log.objects[o].otype == otype)
        if cases:
            events.append(ev)
            case_map[ev.id] = cases
    return FlattenedLog(otype, tuple(events), case_map)


def extract_trace(fl: FlattenedLog, object_id: str) -> Trace:
    acts = tuple(ev.activity for ev in fl.events if object_id in fl.case_map[ev.id])
    if not acts:
        raise OcelError(f"object {object_id!r} does not occur in the {fl.otype!r}-flattened log")
    return Trace(object_id, acts)


def all_traces(fl: FlattenedLog) -> dict[str, Trace]:
    """Traces of every case in ``fl`` in one pass, keyed by object id."""
    acts: dict[str, list[str]] = {}
    for ev in fl.events:
        for oid in fl.case_map[ev.id]:
            acts.setdefault(oid, []).append(ev.activity)
    return {oid: Trace(oid, tuple(acts[oid])) for oid in sorted(acts)}
