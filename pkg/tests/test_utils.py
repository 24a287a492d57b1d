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
import json
import logging
from dataclasses import dataclass

import pytest

from meds_graph.common.logger import cfg_to_group
from meds_graph.common.utils.import_utils import is_package_available
from meds_graph.common.utils.io_utils import atomic_writer, dump_json_bytes, write_bytes_atomic, write_json
from meds_graph.common.utils.utils import dataclass_from_cfg, format_big_number, init_hydra_config
from meds_graph.scripts.display_sys_info import display_sys_info
from tests.utils import DEFAULT_CONFIG_PATH


@dataclass
class _Knobs:
    alpha: int = 1
    beta: str = "b"


def test_init_hydra_config():
    cfg = init_hydra_config(DEFAULT_CONFIG_PATH, overrides=["num_workers=3", "synth=mimic_like"])
    assert cfg.num_workers == 3
    assert cfg.synth.dataset_name == "mimic_like"
    assert cfg.conversion.format == "ntriples"
    assert cfg_to_group(cfg) == "synth:seed=0-workers:3-provenance:True"


def test_dataclass_from_cfg(caplog):
    assert dataclass_from_cfg(_Knobs, {"alpha": 2}) == _Knobs(alpha=2)
    assert dataclass_from_cfg(_Knobs, {"alpha": 2}, beta="c") == _Knobs(2, "c")
    with caplog.at_level(logging.WARNING):
        assert dataclass_from_cfg(_Knobs, {"gamma": 0}) == _Knobs()
    assert "gamma" in caplog.text


def test_write_bytes_atomic(tmp_path):
    path = tmp_path / "nested" / "out.bin"
    write_bytes_atomic(path, b"first")
    write_bytes_atomic(path, b"second")
    assert path.read_bytes() == b"second"
    assert [p.name for p in path.parent.iterdir()] == ["out.bin"]


def test_atomic_writer_keeps_the_old_file_on_errors(tmp_path):
    path = tmp_path / "out.bin"
    write_bytes_atomic(path, b"first")
    with pytest.raises(RuntimeError), atomic_writer(path) as f:
        f.write(b"partial")
        raise RuntimeError("interrupted")
    assert path.read_bytes() == b"first"
    assert [p.name for p in tmp_path.iterdir()] == ["out.bin"]



def test_write_json(tmp_path):
    path = tmp_path / "report.json"
    write_json(path, {"b": 1, "a": ["é"]})
    assert path.read_bytes() == dump_json_bytes({"b": 1, "a": ["é"]})
    assert path.read_text(encoding="utf-8").endswith("}\n")
    assert list(json.loads(path.read_text(encoding="utf-8"))) == ["b", "a"]
    with pytest.raises(ValueError):
        dump_json_bytes({"x": float("nan")})


@pytest.mark.parametrize(
    "num, precision, expected",
    [(0, 0, "0"), (999, 0, "999"), (1_234, 1, "1.2K"), (5_310_000, 2, "5.31M"), (-2_000_000_000, 0, "-2B")],
)
def test_format_big_number(num, precision, expected):
    assert format_big_number(num, precision) == expected


def test_is_package_available():
    assert is_package_available("rdflib")
    assert is_package_available("hydra", dist_name="hydra-core")
    assert not is_package_available("surely_not_a_package_name")
    available, version = is_package_available("numpy", return_version=True)
    assert available and version != "N/A"


def test_display_sys_info(capsys):
    info = display_sys_info()
    assert "rdflib version" in info
    assert "rdflib" in capsys.readouterr().out
