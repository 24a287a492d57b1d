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
"""Convert a MEDS dataset to a MEDS-OWL graph.

The dataset is mapped, validated against the shape suite and written only if it conforms. Records that can't
be mapped and violations of the shapes are written to a JSON report, `<output>.report.json` by default.

N-Triples output is streamed: each shard's event triples are spooled to disk as a sorted run and merged
into the output at the end, so memory follows the shard size rather than the dataset size. Turtle output is
built in memory.

Usage example:

```bash
meds-graph convert --input data/meds_root --output out/graph.nt --stats-out out/stats.json
```

Without `--input`, a synthetic dataset is converted (see `meds_graph/configs/synth/`).
"""

import logging
import sys
from dataclasses import dataclass
from pathlib import Path

from omegaconf import DictConfig

from meds_graph.common.datasets.factory import make_dataset
from meds_graph.common.datasets.meds_dataset import MedsDataset
from meds_graph.common.logger import cfg_to_group, log_output_path
from meds_graph.common.mapping.configuration_mapping import MappingContext
from meds_graph.common.mapping.factory import make_mapping_context
from meds_graph.common.mapping.mapping import ConversionError, convert, convert_shardwise
from meds_graph.common.rdf.graph import Graph
from meds_graph.common.rdf.ntriples import NTriplesSpool
from meds_graph.common.rdf.serialization import write_graph
from meds_graph.common.shapes.factory import make_suite
from meds_graph.common.shapes.shapes import ShapeSuite
from meds_graph.common.shapes.validate import ValidationReport, validate, validate_pieces
from meds_graph.common.stats.compute_stats import (
    GraphStats,
    StatsAccumulator,
    compute_stats,
    emit_stats_report,
    format_stats_table,
)
from meds_graph.common.utils.io_utils import write_bytes_atomic, write_json
from meds_graph.scripts.run_config import ExitCode, RunConfig, default_report_path


@dataclass
class ConversionResult:
    # 0 when nothing was written.
    num_triples: int
    # None when validation is disabled.
    report: ValidationReport | None
    stats: GraphStats | None


def convert_to_ntriples(
    ds: MedsDataset,
    ctx: MappingContext,
    output_path: str | Path,
    suite: ShapeSuite | None = None,
    with_stats: bool = False,
    strict: bool = True,
    num_workers: int = 1,
    progress: bool = False,
) -> ConversionResult:
    """Convert `ds` to a canonical N-Triples file with one event shard in memory at a time.

    Shard runs are validated one by one against `suite` when given, and nothing is written unless the graph
    conforms. Statistics are exact, so they keep one entry per node when `with_stats` is set.
    """
    accumulator = StatsAccumulator(ctx.vocab.Event) if with_stats else None
    with NTriplesSpool() as spool:

        def on_shard(events: Graph):
            spool.add(events)
            if accumulator is not None:
                accumulator.update_all(events)

        graph = convert_shardwise(ds, ctx, on_shard, strict, num_workers, progress)
        report = None
        if suite is not None:
            report = validate_pieces(graph, spool.iter_graphs(), suite, progress)
            if not report.conforms:
                return ConversionResult(0, report, None)
        num_triples = spool.write_merged(output_path, graph)
    logging.info(f"Wrote {num_triples} triples from {len(spool.run_paths)} shard run(s)")
    stats = accumulator.update_all(graph).finalize() if accumulator is not None else None
    return ConversionResult(num_triples, report, stats)


def convert_in_memory(
    ds: MedsDataset,
    ctx: MappingContext,
    output_path: str | Path,
    fmt: str,
    suite: ShapeSuite | None = None,
    with_stats: bool = False,
    strict: bool = True,
    num_workers: int = 1,
    progress: bool = False,
) -> ConversionResult:
    graph = convert(ds, ctx, strict=strict, num_workers=num_workers, progress=progress)
    report = validate(graph, suite, progress) if suite is not None else None
    if report is not None and not report.conforms:
        return ConversionResult(0, report, None)
    write_graph(graph, output_path, fmt, ctx.vocab.prefixes())
    stats = compute_stats(graph, ctx.vocab_namespace) if with_stats else None
    return ConversionResult(len(graph), report, stats)


def mapping_error_report(e: ConversionError) -> dict:
    return {
        "status": "mapping_error",
        "num_errors": len(e.errors),
        "errors": [
            {"table": err.table, "coordinates": list(err.coordinates), "message": err.message}
            for err in e.errors
        ],
    }


def run_convert(cfg: DictConfig, run: RunConfig) -> ExitCode:
    output_path = Path(cfg.conversion.output_path)
    report_path = cfg.conversion.report_path or default_report_path(output_path)

    ds = make_dataset(cfg, run.progress)
    ctx = make_mapping_context(cfg, ds.metadata)
    suite = make_suite(cfg) if cfg.conversion.validate else None
    if suite is None:
        logging.warning("Validation is disabled; the graph is written unchecked")

    logging.info(f"Converting {ds.num_shards} shard(s) ({cfg_to_group(cfg)})")
    options = {
        "suite": suite,
        "with_stats": bool(cfg.conversion.stats_path),
        "strict": cfg.conversion.strict,
        "num_workers": cfg.num_workers,
        "progress": run.progress,
    }
    try:
        if cfg.conversion.format == "ntriples":
            result = convert_to_ntriples(ds, ctx, output_path, **options)
        else:
            result = convert_in_memory(ds, ctx, output_path, cfg.conversion.format, **options)
    except ConversionError as e:
        write_json(report_path, mapping_error_report(e))
        log_output_path("Error report", report_path)
        logging.error(str(e))
        return ExitCode.INGEST_ERROR

    report = result.report
    if report is not None and (not report.conforms or cfg.conversion.report_path):
        write_json(report_path, report.to_dict())
        log_output_path("Validation report", report_path)
    if report is not None and not report.conforms:
        logging.error(f"Nothing was written to {output_path}. Use --no-validate to write it anyway.")
        return ExitCode.VALIDATION_FAILED
    log_output_path("Graph", output_path)

    if result.stats is not None:
        write_bytes_atomic(cfg.conversion.stats_path, emit_stats_report(result.stats))
        log_output_path("Stats", cfg.conversion.stats_path)
        sys.stderr.write(format_stats_table(result.stats))
    return ExitCode.OK
