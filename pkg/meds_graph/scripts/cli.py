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
"""Command-line entry point of meds-graph.

```bash
meds-graph convert --input data/meds_root --output out/graph.nt
meds-graph validate --input out/graph.nt
meds-graph stats --input out/graph.nt
meds-graph roundtrip --input data/meds_root
meds-graph synth --output data/synthetic --seed 3
```

Every subcommand composes `meds_graph/configs/default.yaml` with Hydra first. Trailing `key=value` arguments
are Hydra overrides (`synth=neurovasc_like synth.n_subjects=100`); flags are applied on top of them.

Exit codes: 0 ok, 1 usage, 2 ingest / parse / mapping error, 3 validation violations, 4 I/O error,
5 round-trip fidelity loss.
"""

import argparse
import logging
import sys
from pathlib import Path

from hydra.errors import HydraException
from omegaconf.errors import OmegaConfBaseException

from meds_graph.common.datasets.utils import MedsIngestError
from meds_graph.common.mapping.mapping import MappingError
from meds_graph.common.rdf.utils import RdfSerializationError, RdfSyntaxError
from meds_graph.common.rdf.serialization import RDF_FORMATS
from meds_graph.common.roundtrip.invert import InversionError
from meds_graph.common.shapes.shape_file import ShapeSyntaxError
from meds_graph.common.utils.utils import init_hydra_config, init_logging
from meds_graph.scripts.convert import run_convert
from meds_graph.scripts.roundtrip import run_roundtrip
from meds_graph.scripts.run_config import (
    DEFAULT_CONFIG_PATH,
    SUBCOMMANDS,
    VERBOSITIES,
    ExitCode,
    RunConfig,
    apply_run_config,
)
from meds_graph.scripts.stats import run_stats
from meds_graph.scripts.synth import run_synth
from meds_graph.scripts.validate import run_validate

RUNNERS = {
    "convert": run_convert,
    "validate": run_validate,
    "stats": run_stats,
    "roundtrip": run_roundtrip,
    "synth": run_synth,
}

HELP = {
    "convert": "Convert a MEDS dataset to a validated RDF graph.",
    "validate": "Validate an RDF graph against the MEDS-OWL shapes.",
    "stats": "Compute statistics of a graph, or of the conversion of a MEDS dataset.",
    "roundtrip": "Convert a MEDS dataset, convert it back and report what was lost.",
    "synth": "Write a synthetic MEDS dataset.",
}


class UsageError(Exception):
    pass


class _ArgumentParser(argparse.ArgumentParser):
    def error(self, message: str):
        raise UsageError(f"{self.prog}: {message}")


def _common_arguments() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(add_help=False)
    parser.add_argument("--input", type=Path, help="MEDS root directory, or RDF file for validate / stats.")
    parser.add_argument("--output", type=Path, help="Output graph, MEDS root or JSON report.")
    parser.add_argument("--format", choices=RDF_FORMATS, default="ntriples", help="Output graph format.")
    parser.add_argument("--base-iri", help="Namespace of minted IRIs. Defaults to $MEDS_GRAPH_BASE_IRI.")
    parser.add_argument("--shapes", type=Path, help="Shape file replacing the builtin MEDS-OWL suite.")
    parser.add_argument("--stats-out", type=Path, help="Where to write graph statistics (JSON).")
    parser.add_argument("--report", type=Path, help="Where to write the JSON report.")
    parser.add_argument(
        "--no-validate", dest="validate", action="store_false", help="Write the graph without validating it."
    )
    parser.add_argument(
        "--no-event-provenance",
        dest="event_provenance",
        action="store_false",
        default=None,
        help="Don't link events to the dataset node.",
    )
    strictness = parser.add_mutually_exclusive_group()
    strictness.add_argument(
        "--strict", dest="strict", action="store_true", default=None, help="Stop at the first bad record."
    )
    strictness.add_argument(
        "--collect", dest="strict", action="store_false", help="Report every bad record at the end."
    )
    parser.add_argument("--threads", type=int, help="Threads used to read and map shards.")
    parser.add_argument("--seed", type=int, help="Seed of the synthetic generator.")
    parser.add_argument("--verbosity", choices=VERBOSITIES, default="INFO")
    parser.add_argument(
        "overrides",
        nargs="*",
        help="Any key=value arguments to override config values (use dots for.nested=overrides)",
    )
    return parser


def make_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(prog="meds-graph", description="MEDS to MEDS-OWL RDF conversion toolkit.")
    subparsers = parser.add_subparsers(dest="subcommand", required=True)
    common = _common_arguments()
    for name in SUBCOMMANDS:
        subparsers.add_parser(name, parents=[common], help=HELP[name], description=HELP[name])
    return parser


def parse_run_config(argv: list[str] | None = None) -> RunConfig:
    """Parse the command line into a `RunConfig`. Raises `UsageError` on bad arguments."""
    args = make_parser().parse_args(argv)
    try:
        return RunConfig(**vars(args))
    except ValueError as e:
        raise UsageError(str(e)) from e


def run(run_cfg: RunConfig) -> ExitCode:
    """Compose the configuration of `run_cfg` and dispatch it to its subcommand.

    Errors are turned into exit codes here; the subcommands only return the codes of outcomes that are not
    errors (violations, fidelity loss).
    """
    try:
        cfg = init_hydra_config(str(DEFAULT_CONFIG_PATH), run_cfg.overrides)
        apply_run_config(cfg, run_cfg)
        return RUNNERS[run_cfg.subcommand](cfg, run_cfg)
    except (HydraException, OmegaConfBaseException, ShapeSyntaxError) as e:
        logging.error(str(e))
        return ExitCode.USAGE
    except (MedsIngestError, RdfSyntaxError, RdfSerializationError, MappingError, InversionError) as e:
        logging.error(f"{type(e).__name__}: {e}")
        return ExitCode.INGEST_ERROR
    except OSError as e:
        logging.error(f"{type(e).__name__}: {e}")
        return ExitCode.IO_ERROR
    except ValueError as e:
        logging.error(str(e))
        return ExitCode.USAGE


def main(argv: list[str] | None = None) -> int:
    init_logging()
    try:
        run_cfg = parse_run_config(argv)
    except UsageError as e:
        logging.error(str(e))
        return int(ExitCode.USAGE)
    init_logging(run_cfg.verbosity)
    return int(run(run_cfg))


if __name__ == "__main__":
    sys.exit(main())
