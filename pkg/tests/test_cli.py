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
import dataclasses
import json
from datetime import datetime

import pytest

from meds_graph.common.datasets.factory import make_synth_config
from meds_graph.common.datasets.meds_dataset import MedsDataset, load_dataset
from meds_graph.common.datasets.records import CodeRecord, LabelRecord
from meds_graph.common.datasets.synth import generate
from meds_graph.common.datasets.utils import save_dataset
from meds_graph.common.rdf.serialization import read_graph
from meds_graph.common.shapes.shape_file import BUILTIN_SHAPES_PATH
from meds_graph.common.utils.utils import init_hydra_config
from meds_graph.scripts.cli import main, parse_run_config
from meds_graph.scripts.run_config import ExitCode
from tests.utils import DEFAULT_CONFIG_PATH, make_tiny_dataset


def _save(dataset: MedsDataset, root) -> str:
    save_dataset(dataset, root)
    return str(root)


@pytest.fixture
def tiny_root(tmp_path):
    return _save(make_tiny_dataset(), tmp_path / "tiny")


@pytest.fixture
def two_valued_label_root(tmp_path):
    tiny = make_tiny_dataset()
    labels = [LabelRecord("1", datetime(2021, 4, 1), boolean_value=True, integer_value=1)]
    shards = dict(tiny.iter_shards())
    dataset = MedsDataset.from_preloaded(tiny.metadata, shards, tiny.codes, tiny.splits, labels)
    return _save(dataset, tmp_path / "two_valued")


def test_convert(tmp_path, tiny_root, tiny_graph):
    output = tmp_path / "out" / "graph.nt"
    stats = tmp_path / "out" / "stats.json"
    assert main(["convert", "--input", tiny_root, "--output", str(output), "--stats-out", str(stats)]) == 0
    assert read_graph(output) == tiny_graph
    assert json.loads(stats.read_text())["triple_count"] == len(tiny_graph)
    # Nothing to report on a conforming graph unless asked.
    assert not (tmp_path / "out" / "graph.nt.report.json").exists()


def test_convert_turtle(tmp_path, tiny_root, tiny_graph):
    output = tmp_path / "graph.ttl"
    assert main(["convert", "--input", tiny_root, "--output", str(output), "--format", "turtle"]) == 0
    assert output.read_bytes().startswith(b"@prefix ")
    assert read_graph(output) == tiny_graph


def test_convert_base_iri(tmp_path, tiny_root, monkeypatch):
    monkeypatch.setenv("MEDS_GRAPH_BASE_IRI", "https://env.example/kg/")
    output = tmp_path / "graph.nt"
    assert main(["convert", "--input", tiny_root, "--output", str(output)]) == 0
    assert b"<https://env.example/kg/tiny-cohort/subject/1>" in output.read_bytes()

    # The flag wins over the environment.
    args = ["--base-iri", "https://flag.example/kg/", "--no-event-provenance"]
    assert main(["convert", "--input", tiny_root, "--output", str(output), *args]) == 0
    text = output.read_text()
    assert "<https://flag.example/kg/tiny-cohort/subject/1>" in text
    assert "wasDerivedFrom" not in text


def test_convert_is_independent_of_threads(tmp_path, meds_root):
    outputs = []
    for threads in (1, 8):
        output = tmp_path / f"graph-{threads}.nt"
        args = ["convert", "--input", str(meds_root), "--output", str(output), "--threads", str(threads)]
        assert main(args) == 0
        outputs.append(output.read_bytes())
    assert outputs[0] == outputs[1]


def test_convert_validation_failure(tmp_path, two_valued_label_root):
    output = tmp_path / "graph.nt"
    assert main(["convert", "--input", two_valued_label_root, "--output", str(output)]) == 3
    assert not output.exists()
    report = json.loads((tmp_path / "graph.nt.report.json").read_text())
    assert report["conforms"] is False
    assert report["violations_by_constraint"] == {"exclusiveGroup": 1}

    assert main(["convert", "--input", two_valued_label_root, "--output", str(output), "--no-validate"]) == 0
    assert output.exists()


def test_convert_mapping_errors(tmp_path):
    tiny = make_tiny_dataset()
    codes = [CodeRecord("A", None, ("A",)), CodeRecord("B", None, ("B",))]
    root = _save(MedsDataset.from_preloaded(tiny.metadata, dict(tiny.iter_shards()), codes), tmp_path / "bad")
    output = tmp_path / "graph.nt"
    report_path = tmp_path / "errors.json"

    args = ["convert", "--input", root, "--output", str(output), "--report", str(report_path)]
    assert main([*args, "--strict"]) == 2
    assert json.loads(report_path.read_text())["num_errors"] == 1

    assert main([*args, "--collect"]) == 2
    report = json.loads(report_path.read_text())
    assert report["status"] == "mapping_error"
    assert [e["coordinates"] for e in report["errors"]] == [[0], [1]]
    assert not output.exists()


def test_convert_rejects_location_uris_with_spaces(tmp_path):
    tiny = make_tiny_dataset()
    metadata = dataclasses.replace(tiny.metadata, location_uris=("https://x.org/my data.parquet",))
    root = _save(MedsDataset.from_preloaded(metadata, dict(tiny.iter_shards()), tiny.codes), tmp_path / "bad")
    output = tmp_path / "graph.nt"
    assert main(["convert", "--input", root, "--output", str(output)]) == 2
    assert not output.exists()


def test_convert_missing_input(tmp_path):
    args = ["convert", "--input", str(tmp_path / "nowhere"), "--output", str(tmp_path / "graph.nt")]
    assert main(args) == 2


def test_validate(tmp_path, tiny_root, capsys):
    graph = tmp_path / "graph.nt"
    assert main(["convert", "--input", tiny_root, "--output", str(graph)]) == 0
    capsys.readouterr()

    assert main(["validate", "--input", str(graph)]) == 0
    report = json.loads(capsys.readouterr().out)
    assert report["conforms"] is True

    # Static events are rejected by a tightened suite.
    shapes = tmp_path / "strict.shapes"
    shapes.write_text(
        BUILTIN_SHAPES_PATH.read_text().replace("prop meds:time min=0 max=1", "prop meds:time min=1 max=1")
    )
    report_path = tmp_path / "violations.json"
    args = ["validate", "--input", str(graph), "--shapes", str(shapes), "--report", str(report_path)]
    assert main(args) == 3
    assert json.loads(report_path.read_text())["violations_by_constraint"] == {"minCount": 1}


def test_validate_errors(tmp_path):
    bad_graph = tmp_path / "bad.nt"
    bad_graph.write_text("<https://e.org/s> <https://e.org/p> .\n")
    assert main(["validate", "--input", str(bad_graph)]) == 2

    bad_shapes = tmp_path / "bad.shapes"
    bad_shapes.write_text("prop <https://e.org/p>\n")
    good_graph = tmp_path / "good.nt"
    good_graph.write_text("")
    assert main(["validate", "--input", str(good_graph), "--shapes", str(bad_shapes)]) == 1

    assert main(["validate", "--input", str(tmp_path / "missing.nt")]) == 4


def test_stats(tmp_path, meds_root):
    graph = tmp_path / "graph.nt"
    from_root = tmp_path / "from_root.json"
    from_graph = tmp_path / "from_graph.json"
    assert main(["convert", "--input", str(meds_root), "--output", str(graph)]) == 0
    assert main(["stats", "--input", str(meds_root), "--stats-out", str(from_root)]) == 0
    assert main(["stats", "--input", str(graph), "--stats-out", str(from_graph)]) == 0
    assert from_root.read_bytes() == from_graph.read_bytes()
    assert json.loads(from_graph.read_text())["blank_node_count"] == 0


def test_stats_of_a_synthetic_dataset(capsys):
    overrides = ["synth.n_subjects=3", "synth.events_per_subject=[0,0]"]
    assert main(["stats", "--verbosity", "WARNING", *overrides]) == 0
    captured = capsys.readouterr()
    stats = json.loads(captured.out)
    assert stats["event_triple_distribution"] is None
    assert "no event nodes" in captured.err


def test_roundtrip(tmp_path, meds_root, tiny_root, two_valued_label_root):
    report_path = tmp_path / "fidelity.json"
    assert main(["roundtrip", "--input", str(meds_root), "--report", str(report_path)]) == 0
    assert json.loads(report_path.read_text())["lossless"] is True

    assert main(["roundtrip", "--input", tiny_root, "--output", str(report_path)]) == 0
    assert json.loads(report_path.read_text())["rows_compared"]["events"] == 4

    assert main(["roundtrip", "--input", two_valued_label_root, "--report", str(report_path)]) == 3
    assert json.loads(report_path.read_text())["conforms"] is False


def test_synth(tmp_path):
    root = tmp_path / "synthetic"
    assert main(["synth", "--output", str(root), "--seed", "3", "synth.n_subjects=5"]) == 0
    cfg = init_hydra_config(DEFAULT_CONFIG_PATH, overrides=["synth.n_subjects=5", "synth.seed=3"])
    assert load_dataset(root) == generate(make_synth_config(cfg))


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["frobnicate"],
        ["convert"],
        ["validate"],
        ["synth"],
        ["convert", "--output", "x.nt", "--threads", "0"],
        ["convert", "--output", "x.nt", "--format", "rdfxml"],
        ["convert", "--output", "x.nt", "--base-iri", "relative/"],
        ["convert", "--output", "x.nt", "--strict", "--collect"],
        ["stats", "--verbosity", "LOUD"],
    ],
)
def test_usage_errors(argv):
    assert main(argv) == ExitCode.USAGE


def test_bad_overrides(tmp_path):
    assert main(["synth", "--output", str(tmp_path / "x"), "synth=no_such_preset"]) == 1
    assert main(["synth", "--output", str(tmp_path / "x"), "synth.n_shards=0"]) == 1


def test_parse_run_config(tmp_path):
    run_cfg = parse_run_config(["stats", "--input", str(tmp_path), "--threads", "2", "synth.seed=1"])
    assert run_cfg.subcommand == "stats"
    assert run_cfg.reads_meds_root
    assert run_cfg.threads == 2
    assert run_cfg.overrides == ["synth.seed=1"]
    assert run_cfg.strict is None
    assert run_cfg.event_provenance is None
    assert run_cfg.progress
