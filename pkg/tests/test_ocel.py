import json
from datetime import timedelta

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ocelcluster.ocel import (
    DanglingReferenceError,
    OcelError,
    OcelParseError,
    UnknownObjectTypeError,
    all_traces,
    dump_ocel,
    extract_trace,
    flatten,
    parse_ocel,
)
from ocelcluster.synthetic import random_ocel_doc
from oracles import sorted_trace


def test_running_example_parses(example_log):
    assert len(example_log.events) == 3
    assert len(example_log.objects) >= 4
    assert {"batch", "order", "customer"} <= example_log.object_types
    assert example_log.order == ("e1", "e2", "e3")
    e1 = example_log.events["e1"]
    assert e1.activity == "order creation"
    assert e1.omap == {"o1", "c1"}
    assert e1.vmap["net price"] == 146.8
    assert e1.timestamp.utcoffset() == timedelta(hours=1)
    assert e1.timestamp.microsecond == 527000
    assert example_log.attribute_types["net price"] == "float"
    assert example_log.attribute_types["treatment"] == "string"
    example_log.check()


def test_empty_log():
    log = parse_ocel(b'{"ocel:global-log": {}, "ocel:events": {}, "ocel:objects": {}}')
    assert log.events == {} and log.objects == {}


def test_dangling_reference_names_object(example_doc):
    example_doc["ocel:events"]["e2"]["ocel:omap"].append("x9")
    with pytest.raises(DanglingReferenceError, match="x9") as info:
        parse_ocel(json.dumps(example_doc))
    assert "e2" in info.value.path


@pytest.mark.parametrize("key", ["ocel:activity", "ocel:timestamp", "ocel:omap"])
def test_missing_mandatory_key(example_doc, key):
    del example_doc["ocel:events"]["e3"][key]
    with pytest.raises(OcelParseError) as info:
        parse_ocel(json.dumps(example_doc))
    assert info.value.path == f"ocel:events/e3/{key}"


def test_unparseable_timestamp(example_doc):
    example_doc["ocel:events"]["e1"]["ocel:timestamp"] = "yesterday"
    with pytest.raises(OcelParseError, match="e1/ocel:timestamp"):
        parse_ocel(json.dumps(example_doc))


def test_duplicate_event_id():
    text = """{"ocel:events": {
        "e1": {"ocel:activity": "a", "ocel:timestamp": "2020-01-01 00:00:00", "ocel:omap": []},
        "e1": {"ocel:activity": "b", "ocel:timestamp": "2020-01-01 00:00:00", "ocel:omap": []}},
      "ocel:objects": {}}"""
    with pytest.raises(OcelParseError, match="duplicate event id 'e1'"):
        parse_ocel(text)


def test_declared_attribute_type_is_enforced(example_doc):
    example_doc["ocel:global-log"]["ocel:attribute-types"] = {"net price": "float"}
    example_doc["ocel:events"]["e1"]["ocel:vmap"]["net price"] = "cheap"
    with pytest.raises(OcelParseError, match="net price"):
        parse_ocel(json.dumps(example_doc))


def test_unknown_declared_type_defaults_to_string(example_doc):
    example_doc["ocel:global-log"]["ocel:attribute-types"] = {"treatment": "colour"}
    assert parse_ocel(json.dumps(example_doc)).attribute_types["treatment"] == "string"


def test_ties_broken_by_event_id():
    doc = {
        "ocel:events": {
            "e2": {"ocel:activity": "b", "ocel:timestamp": "2020-01-01T00:00:00Z", "ocel:omap": []},
            "e1": {"ocel:activity": "a", "ocel:timestamp": "2020-01-01T01:00:00+01:00", "ocel:omap": []},
            "e0": {"ocel:activity": "c", "ocel:timestamp": "2020-01-01T00:00:01Z", "ocel:omap": []},
        },
        "ocel:objects": {},
    }
    assert parse_ocel(json.dumps(doc)).order == ("e1", "e2", "e0")


def test_flatten_on_order(example_log):
    fl = flatten(example_log, "order")
    assert [e.id for e in fl.events] == ["e1", "e2", "e3"]
    assert fl.case_map["e1"] == {"o1"}


def test_flatten_on_batch(example_log):
    fl = flatten(example_log, "batch")
    assert [e.id for e in fl.events] == ["e2", "e3"]
    assert fl.case_map["e2"] == {"b1", "b2"}
    assert fl.case_map["e3"] == {"b1", "b3"}


def test_flatten_unknown_type(example_log):
    with pytest.raises(UnknownObjectTypeError, match="known types: batch, customer, order"):
        flatten(example_log, "item")


def test_trace_of_b1(example_log):
    trace = extract_trace(flatten(example_log, "batch"), "b1")
    assert trace.activities == ("print of production order", "Loading")


def test_singleton_trace(example_log):
    assert extract_trace(flatten(example_log, "batch"), "b2").activities == ("print of production order",)


def test_trace_of_absent_object(example_log):
    with pytest.raises(OcelError):
        extract_trace(flatten(example_log, "batch"), "o1")


def test_trace_follows_total_order_not_file_order():
    doc = {
        "ocel:events": {
            "e9": {"ocel:activity": "first", "ocel:timestamp": "2021-01-01 08:00:00.000+00:00", "ocel:omap": ["x"]},
            "e1": {"ocel:activity": "third", "ocel:timestamp": "2021-01-03 08:00:00.000+00:00", "ocel:omap": ["x"]},
            "e5": {"ocel:activity": "second", "ocel:timestamp": "2021-01-02 09:00:00.000+01:00", "ocel:omap": ["x"]},
        },
        "ocel:objects": {"x": {"ocel:type": "t"}},
    }
    log = parse_ocel(json.dumps(doc))
    got = extract_trace(flatten(log, "t"), "x").activities
    assert got == sorted_trace(doc, "x") == ("first", "second", "third")


seeds = st.integers(min_value=0, max_value=2**32 - 1)


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_flatten_properties(seed):
    doc = random_ocel_doc(np.random.default_rng(seed))
    log = parse_ocel(json.dumps(doc))
    log.check()
    for ot in log.object_types:
        fl = flatten(log, ot)
        expected = [eid for eid, ev in log.events.items() if any(log.objects[o].otype == ot for o in ev.omap)]
        assert [e.id for e in fl.events] == expected
        for ev in fl.events:
            assert fl.case_map[ev.id] == {o for o in ev.omap if log.objects[o].otype == ot}
        traces = all_traces(fl)
        touched = set()
        for oid, trace in traces.items():
            assert trace.activities == sorted_trace(doc, oid)
            assert extract_trace(fl, oid) == trace
            touched |= {e.id for e in fl.events if oid in fl.case_map[e.id]}
        assert touched == {e.id for e in fl.events}


@settings(max_examples=60, deadline=None)
@given(seeds)
def test_round_trip(seed):
    log = parse_ocel(json.dumps(random_ocel_doc(np.random.default_rng(seed))))
    again = parse_ocel(json.dumps(dump_ocel(log)))
    assert again.order == log.order
    assert again.events == log.events
    assert again.objects == log.objects
    assert again.attribute_types == log.attribute_types
    assert again.object_types == log.object_types


def test_round_trip_running_example(example_log):
    again = parse_ocel(json.dumps(dump_ocel(example_log)))
    assert again.events == example_log.events
    assert again.objects == example_log.objects
