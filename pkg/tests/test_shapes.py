#!/usr/bin/env python

# Copyright 2024 The meds-graph authors. All rights reserved.
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.
import pytest
from rdflib.namespace import SH

from meds_graph.common.datasets.synth import generate
from meds_graph.common.mapping.configuration_mapping import MappingContext
from meds_graph.common.mapping.mapping import convert, convert_shardwise
from meds_graph.common.rdf.graph import Graph
from meds_graph.common.rdf.terms import IRI, Literal, Triple
from meds_graph.common.rdf.vocabulary import RDF_TYPE
from meds_graph.common.shapes.factory import make_suite
from meds_graph.common.shapes.shacl_export import suite_to_shacl, validate_with_pyshacl
from meds_graph.common.shapes.shape_file import (
    BUILTIN_SHAPES_PATH,
    ShapeSyntaxError,
    dump_suite,
    load_suite,
    parse_suite,
)
from meds_graph.common.shapes.shapes import (
    ConstraintKind,
    ExclusiveGroup,
    NodeShape,
    PropertyConstraint,
    ShapeSuite,
    builtin_meds_suite,
)
from meds_graph.common.shapes.validate import validate, validate_pieces
from meds_graph.common.utils.utils import init_hydra_config
from tests.utils import DEFAULT_CONFIG_PATH, require_package, varied_synth_config


@pytest.fixture
def suite():
    return builtin_meds_suite()


def _event(ctx, shard_name="0", row_index=0) -> IRI:
    return ctx.iris.event_iri(shard_name, row_index)


def _only_violation(report):
    assert not report.conforms
    assert len(report.violations) == 1, report.to_dict()
    return report.violations[0]


def test_conversions_conform(tiny_graph, synth_dataset, suite):
    assert validate(tiny_graph, suite).conforms
    graph = convert(synth_dataset, MappingContext.for_dataset("synthetic"))
    report = validate(graph, suite)
    assert report.conforms
    assert report.num_focus_nodes > synth_dataset.num_events


@pytest.mark.parametrize("seed", range(200))
def test_random_conversions_conform(seed, suite):
    cfg = varied_synth_config(seed)
    report = validate(convert(generate(cfg), MappingContext.for_dataset(cfg.dataset_name)), suite)
    assert report.conforms, report.to_dict()


def test_validate_pieces(tiny_dataset, tiny_ctx, suite):
    v = tiny_ctx.vocab
    pieces = []
    rest = convert_shardwise(tiny_dataset, tiny_ctx, pieces.append)
    union = Graph()
    for graph in [rest, *pieces]:
        union |= graph
    assert validate_pieces(rest, pieces, suite).to_dict() == validate(union, suite).to_dict()

    # A dangling code in a shard, and a subject that lost its type outside the shards.
    event = sorted(pieces[0].instances_of(v.Event))[0]
    pieces[0].add(Triple(event, v.hasCode, IRI("https://example.org/not-a-code")))
    rest.remove(Triple(tiny_ctx.iris.subject_iri("1"), RDF_TYPE, v.Subject))
    union = Graph()
    for graph in [rest, *pieces]:
        union |= graph
    report = validate_pieces(rest, pieces, suite)
    assert not report.conforms
    assert report.to_dict() == validate(union, suite).to_dict()




def test_min_count(tiny_graph, tiny_ctx, suite):
    event = _event(tiny_ctx)
    tiny_graph.remove(Triple(event, tiny_ctx.vocab.hasSubject, tiny_ctx.iris.subject_iri("1")))
    violation = _only_violation(validate(tiny_graph, suite))
    assert violation.kind == ConstraintKind.MIN_COUNT
    assert violation.focus_node == event
    assert violation.path == tiny_ctx.vocab.hasSubject.value
    assert violation.observed == "0"


def test_max_count(tiny_graph, tiny_ctx, suite):
    code = tiny_ctx.iris.code_iri("LAB:GLUCOSE")
    tiny_graph.add(Triple(code, tiny_ctx.vocab.codeString, Literal.from_str("LAB:GLUCOSE-2")))
    violation = _only_violation(validate(tiny_graph, suite))
    assert violation.kind == ConstraintKind.MAX_COUNT
    assert violation.target_class == tiny_ctx.vocab.Code
    assert violation.observed == "2"


def test_datatype(tiny_graph, tiny_ctx, suite):
    v = tiny_ctx.vocab
    event = _event(tiny_ctx, "0", 1)
    [value] = tiny_graph.objects(event, v.numericValue)
    tiny_graph.remove(Triple(event, v.numericValue, value))
    tiny_graph.add(Triple(event, v.numericValue, Literal.from_str("5.5")))
    violation = _only_violation(validate(tiny_graph, suite))
    assert violation.kind == ConstraintKind.DATATYPE
    assert violation.observed == '"5.5"^^<http://www.w3.org/2001/XMLSchema#string>'


def test_class(tiny_graph, tiny_ctx, suite):
    v = tiny_ctx.vocab
    event = _event(tiny_ctx)
    tiny_graph.remove(Triple(event, v.hasCode, tiny_ctx.iris.code_iri("ICD10:I63")))
    tiny_graph.add(Triple(event, v.hasCode, IRI("https://example.org/not-a-code")))
    violation = _only_violation(validate(tiny_graph, suite))
    assert violation.kind == ConstraintKind.CLASS
    assert violation.observed == "<https://example.org/not-a-code>"


@pytest.mark.parametrize("extra_values", [0, 1])
def test_exclusive_group(tiny_graph, tiny_ctx, suite, extra_values):
    v = tiny_ctx.vocab
    label = tiny_ctx.iris.label_iri("1", 0)
    if extra_values:
        tiny_graph.add(Triple(label, v.integerValue, Literal.from_int(3)))
    else:
        tiny_graph.remove(Triple(label, v.booleanValue, Literal.from_bool(True)))
    violation = _only_violation(validate(tiny_graph, suite))
    assert violation.kind == ConstraintKind.EXCLUSIVE_GROUP
    assert violation.observed == ("2" if extra_values else "0")


def test_split_membership(tiny_graph, tiny_ctx, suite):
    v = tiny_ctx.vocab
    subject = tiny_ctx.iris.subject_iri("1")
    tiny_graph.add(Triple(subject, v.assignedSplit, tiny_ctx.iris.split_iri("held_out")))
    violation = _only_violation(validate(tiny_graph, suite))
    assert violation.kind == ConstraintKind.SPLIT_MEMBERSHIP
    assert violation.target_class is None
    assert violation.focus_node == subject

    # Another split experiment is fine.
    tiny_graph.remove(Triple(subject, v.assignedSplit, tiny_ctx.iris.split_iri("held_out")))
    other = MappingContext(dataset_slug=tiny_ctx.dataset_slug, split_table_id="fold-2")
    tiny_graph.add(Triple(subject, v.assignedSplit, other.iris.split_iri("held_out")))
    assert validate(tiny_graph, suite).conforms


def test_report(tiny_graph, tiny_ctx, suite):
    v = tiny_ctx.vocab
    for row_index in range(3):
        event = _event(tiny_ctx, "0", row_index)
        tiny_graph.remove(Triple(event, RDF_TYPE, v.Event))
        tiny_graph.add(Triple(event, RDF_TYPE, v.SubjectLabel))
    report = validate(tiny_graph, suite)
    data = report.to_dict()
    assert data["conforms"] is False
    assert data["num_violations"] == len(data["violations"])
    assert sum(data["violations_by_constraint"].values()) == data["num_violations"]
    assert list(data["violations"][0]) == [
        "focus_node",
        "target_class",
        "path",
        "constraint",
        "observed",
        "message",
    ]
    # Violations are sorted, so the report does not depend on insertion order.
    keys = [(d["focus_node"], d["target_class"] or "", d["path"]) for d in data["violations"]]
    assert keys == sorted(keys)


def test_builtin_shape_file(suite):
    assert load_suite(BUILTIN_SHAPES_PATH) == suite


def test_dump_suite(suite, vocab):
    text = dump_suite(suite, {"meds": vocab.namespace, "xsd": "http://www.w3.org/2001/XMLSchema#"})
    assert parse_suite(text) == suite
    prefixes = {"meds": vocab.namespace}
    assert dump_suite(parse_suite(text), prefixes) == dump_suite(suite, prefixes)
    # Without prefixes every IRI is written in full.
    assert parse_suite(dump_suite(suite)) == suite


def test_parse_suite():
    text = """
prefix ex: <https://example.org/>
prefix : <https://example.org/default#>
# comment
shape ex:A   # trailing comment
  prop ex:p min=1 max=*
prop <https://example.org/q> datatype=<http://www.w3.org/2001/XMLSchema#string>
    group min=0 max=2 {ex:p, <https://example.org/q>}
shape :B
  prop :r class=ex:A
"""
    parsed = parse_suite(text)
    ex = "https://example.org/"
    a = NodeShape(
        IRI(ex + "A"),
        (
            PropertyConstraint(IRI(ex + "p"), 1, None),
            PropertyConstraint(IRI(ex + "q"), datatype=IRI("http://www.w3.org/2001/XMLSchema#string")),
        ),
        (ExclusiveGroup((IRI(ex + "p"), IRI(ex + "q")), 0, 2),),
    )
    b = NodeShape(
        IRI(ex + "default#B"), (PropertyConstraint(IRI(ex + "default#r"), class_of_object=a.target_class),)
    )
    assert parsed == ShapeSuite((a, b))


@pytest.mark.parametrize(
    "text, line",
    [
        ("prop <https://e.org/p>", 1),
        ("shape <https://e.org/A>\nwhat <https://e.org/p>", 2),
        ("shape ex:A", 1),
        ("shape <https://e.org/A>\nshape <https://e.org/A>", 2),
        ("shape <https://e.org/A>\n  prop <https://e.org/p> min=-1", 2),
        ("shape <https://e.org/A>\n  prop <https://e.org/p> min=2 max=1", 2),
        ("shape <https://e.org/A>\n  prop <https://e.org/p> size=1", 2),
        ("shape <https://e.org/A>\n  prop <https://e.org/p>\n  prop <https://e.org/p>", 3),
        ("shape <https://e.org/A>\n\n  group exactly=1 {<https://e.org/p>}", 3),
        ("shape <https://e.org/A>\n  group exactly=1 min=0 {<https://e.org/p>, <https://e.org/q>}", 2),
        ("split-membership <https://e.org/p> max=0", 1),
        ("prefix ex <https://e.org/>", 1),
    ],
)
def test_parse_suite_errors(text, line):
    with pytest.raises(ShapeSyntaxError) as excinfo:
        parse_suite(text, source="bad.shapes")
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"bad.shapes:{line}: ")


def test_load_suite_rejects_invalid_utf8(tmp_path):
    path = tmp_path / "bad.shapes"
    path.write_bytes(b"shape <https://e.org/\xff>\n")
    with pytest.raises(ShapeSyntaxError):
        load_suite(path)


def test_make_suite(tmp_path, tiny_graph, vocab):
    cfg = init_hydra_config(DEFAULT_CONFIG_PATH)
    assert make_suite(cfg) == builtin_meds_suite()

    # Tightened suite: static events are rejected.
    text = BUILTIN_SHAPES_PATH.read_text().replace(
        "prop meds:time min=0 max=1", "prop meds:time min=1 max=1"
    )
    path = tmp_path / "strict.shapes"
    path.write_text(text)
    cfg = init_hydra_config(DEFAULT_CONFIG_PATH, overrides=[f"shapes.path='{path}'"])
    report = validate(tiny_graph, make_suite(cfg))
    assert report.by_kind() == {"minCount": 1}
    assert report.violations[0].path == vocab.time.value


@require_package("pyshacl")
def test_pyshacl_agrees(tiny_graph, tiny_ctx, suite):
    conforms, _ = validate_with_pyshacl(tiny_graph, suite)
    assert conforms

    label = tiny_ctx.iris.label_iri("1", 0)
    tiny_graph.add(Triple(label, tiny_ctx.vocab.integerValue, Literal.from_int(3)))
    conforms, text = validate_with_pyshacl(tiny_graph, suite)
    assert not conforms
    assert "Conforms: False" in text


def test_suite_to_shacl(suite, caplog):
    shacl = suite_to_shacl(suite)
    assert len(list(shacl.subjects(predicate=SH.targetClass))) == len(suite.shapes)
    assert len(list(shacl.objects(predicate=SH.xone))) == 1
    assert "split-membership" in caplog.text
