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
"""Options of a command-line run, and the exit codes it ends with."""

import sys
from dataclasses import dataclass, field
from enum import IntEnum
from pathlib import Path

from omegaconf import DictConfig, OmegaConf

from meds_graph.common.logger import log_output_path
from meds_graph.common.rdf.serialization import RDF_FORMATS
from meds_graph.common.rdf.terms import IRI
from meds_graph.common.utils.io_utils import write_bytes_atomic

DEFAULT_CONFIG_PATH = Path(__file__).parents[1] / "configs" / "default.yaml"
SUBCOMMANDS = ("convert", "validate", "stats", "roundtrip", "synth")
VERBOSITIES = ("DEBUG", "INFO", "WARNING", "ERROR")
REPORT_SUFFIX = ".report.json"


class ExitCode(IntEnum):
    OK = 0
    USAGE = 1
    INGEST_ERROR = 2
    VALIDATION_FAILED = 3
    IO_ERROR = 4
    FIDELITY_LOSS = 5


@dataclass
class RunConfig:
    """Command-line options of a run. Options left to None keep the value of the Hydra configuration.

    Args:
        subcommand: One of `SUBCOMMANDS`.
        input: MEDS root (convert, roundtrip, stats) or RDF file (validate, stats).
        output: Graph file (convert), MEDS root (synth) or JSON report (stats, roundtrip).
        format: Serialization of the graph written by convert, one of `RDF_FORMATS`.
        base_iri: Namespace of minted IRIs. Falls back to MEDS_GRAPH_BASE_IRI, then to the config default.
        event_provenance: Whether events link back to the dataset node.
        shapes: Shape file replacing the builtin suite.
        stats_out: Where convert writes graph statistics.
        report: Where the violation / error / fidelity report is written.
        strict: Stop at the first record that can't be mapped (`--strict`) or report them all (`--collect`).
        validate: Validate before writing. `--no-validate` writes the graph unchecked.
        threads: Threads used to read and map shards.
        seed: Seed of the synthetic generator.
        verbosity: Log level.
        overrides: Extra `key=value` Hydra overrides.
    """

    subcommand: str
    input: Path | None = None
    output: Path | None = None
    format: str = "ntriples"
    base_iri: str | None = None
    event_provenance: bool | None = None
    shapes: Path | None = None
    stats_out: Path | None = None
    report: Path | None = None
    strict: bool | None = None
    validate: bool = True
    threads: int | None = None
    seed: int | None = None
    verbosity: str = "INFO"
    overrides: list[str] = field(default_factory=list)

    def __post_init__(self):
        if self.subcommand not in SUBCOMMANDS:
            raise ValueError(f"`subcommand` must be one of {SUBCOMMANDS}. Got {self.subcommand!r}.")
        if self.format not in RDF_FORMATS:
            raise ValueError(f"`format` must be one of {RDF_FORMATS}. Got {self.format!r}.")
        if self.base_iri is not None:
            try:
                IRI(self.base_iri)
            except ValueError as e:
                raise ValueError(f"`base_iri` must be an absolute IRI. Got {self.base_iri!r}.") from e
        if self.threads is not None and self.threads < 1:
            raise ValueError(f"`threads` must be at least 1. Got {self.threads}.")
        if self.verbosity not in VERBOSITIES:
            raise ValueError(f"`verbosity` must be one of {VERBOSITIES}. Got {self.verbosity!r}.")
        if self.subcommand in ("convert", "synth") and self.output is None:
            raise ValueError(f"`{self.subcommand}` needs an `--output` path.")
        if self.subcommand == "validate" and self.input is None:
            raise ValueError("`validate` needs an `--input` RDF file.")

    @property
    def progress(self) -> bool:
        return self.verbosity in ("DEBUG", "INFO")

    @property
    def reads_meds_root(self) -> bool:
        if self.input is None or self.subcommand in ("validate", "synth"):
            return False
        return self.subcommand != "stats" or self.input.is_dir()


def default_report_path(output: str | Path) -> Path:
    return Path(str(output) + REPORT_SUFFIX)


def apply_run_config(cfg: DictConfig, run: RunConfig):
    """Write the command-line options into the composed configuration. Command-line options win over both
    the config files and the Hydra overrides."""
    updates = {
        "verbosity": run.verbosity,
        "conversion.format": run.format,
        "conversion.validate": run.validate,
    }
    if run.reads_meds_root:
        updates["input_root"] = str(run.input)
    if run.output is not None:
        updates["conversion.output_path"] = str(run.output)
    if run.report is not None:
        updates["conversion.report_path"] = str(run.report)
    if run.stats_out is not None:
        updates["conversion.stats_path"] = str(run.stats_out)
    if run.strict is not None:
        updates["conversion.strict"] = run.strict
    if run.threads is not None:
        updates["num_workers"] = run.threads
    if run.base_iri is not None:
        updates["mapping.base_iri"] = run.base_iri
    if run.event_provenance is not None:
        updates["mapping.include_event_provenance"] = run.event_provenance
    if run.shapes is not None:
        updates["shapes.path"] = str(run.shapes)
    if run.seed is not None:
        updates["synth.seed"] = run.seed
    for key, value in updates.items():
        OmegaConf.update(cfg, key, value, merge=False)


def write_report(data: bytes, path: str | Path | None, kind: str):
    """Write a JSON report to `path`, or to stdout when no path is given."""
    if path:
        write_bytes_atomic(path, data)
        log_output_path(kind, path)
    else:
        sys.stdout.write(data.decode("utf-8"))
        sys.stdout.flush()
