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
"""Deterministic synthetic MEDS datasets.

The generator only offers distributional knobs (presence probabilities of the optional event fields, table
sizes, split fractions). It makes no attempt at clinical realism.

Randomness comes from numpy's PCG64 bit generator (`numpy.random.default_rng(seed)`), consumed in a fixed
order: subjects in increasing index, and for each subject its events, then its split, then its labels. Two
runs with the same config produce identical datasets.
"""

import math
from dataclasses import dataclass, field
from datetime import datetime, timedelta

import numpy as np

from meds_graph.common.datasets.meds_dataset import MedsDataset
from meds_graph.common.datasets.records import (
    LABEL_VALUE_KINDS,
    CodeRecord,
    DatasetMetadataRecord,
    EventRecord,
    LabelRecord,
    SplitAssignment,
)
from meds_graph.common.rdf.terms import parse_datetime

CODE_PREFIX = "SYN"
# Children per parent code at every level of the synthetic hierarchy.
CODE_FANOUT = 4
CATEGORICAL_LABELS = ("home", "rehabilitation", "deceased")


@dataclass
class SynthConfig:
    """Knobs of the synthetic generator.

    Args:
        seed: Seed of the PCG64 generator.
        n_subjects: Number of subjects with events.
        events_per_subject: Inclusive (min, max) range of events per subject. A subject drawing 0 events
            only appears in the split table.
        p_time, p_numeric, p_text: Presence probability of each optional event field.
        n_codes: Number of leaf codes used by events.
        code_hierarchy_depth: Number of ancestor levels above the leaf codes (0 means a flat code table).
        split_fractions: Split name to fraction of the subjects. Fractions sum to 1.
        n_labels_per_subject: Inclusive (min, max) range of labels per subject.
        label_kind: Value kind of every label, one of `LABEL_VALUE_KINDS`.
        n_shards: Number of event shards; subjects are dealt to shards in contiguous blocks.
        with_license, with_etl: Whether the metadata carries a license and an ETL activity.
        n_location_uris, n_description_uris: Number of distribution download / access URLs.
        start_date, max_days: Event times are drawn uniformly from `max_days` days after `start_date`.
    """

    seed: int = 0
    n_subjects: int = 10
    events_per_subject: tuple[int, int] = (1, 10)
    p_time: float = 0.8
    p_numeric: float = 0.3
    p_text: float = 0.1
    n_codes: int = 20
    code_hierarchy_depth: int = 1
    split_fractions: dict[str, float] = field(
        default_factory=lambda: {"train": 0.8, "tuning": 0.1, "held_out": 0.1}
    )
    n_labels_per_subject: tuple[int, int] = (0, 1)
    label_kind: str = "boolean"
    n_shards: int = 1
    with_license: bool = True
    with_etl: bool = True
    n_location_uris: int = 1
    n_description_uris: int = 1
    start_date: str = "2020-01-01T00:00:00Z"
    max_days: int = 365
    dataset_name: str = "synthetic"
    meds_version: str = "0.3.3"

    def __post_init__(self):
        self.events_per_subject = tuple(self.events_per_subject)
        self.n_labels_per_subject = tuple(self.n_labels_per_subject)
        self.split_fractions = dict(self.split_fractions)

        if not 0 <= self.seed < 2**64:
            raise ValueError(f"`seed` must be a 64-bit unsigned integer. Got {self.seed}.")
        for name in ("p_time", "p_numeric", "p_text"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"`{name}` must be a probability in [0, 1]. Got {value}.")
        for name in ("events_per_subject", "n_labels_per_subject"):
            low, high = getattr(self, name)
            if not 0 <= low <= high:
                raise ValueError(f"`{name}` must be a range with 0 <= min <= max. Got {low}, {high}.")
        if not self.split_fractions:
            raise ValueError("`split_fractions` needs at least one split.")
        if any(f < 0 for f in self.split_fractions.values()):
            raise ValueError(f"`split_fractions` must be non-negative. Got {self.split_fractions}.")
        if not math.isclose(sum(self.split_fractions.values()), 1.0, rel_tol=0.0, abs_tol=1e-9):
            raise ValueError(f"`split_fractions` must sum to 1. Got {sum(self.split_fractions.values())}.")
        if self.label_kind not in LABEL_VALUE_KINDS:
            raise ValueError(f"`label_kind` must be one of {LABEL_VALUE_KINDS}. Got {self.label_kind!r}.")
        if self.n_subjects < 0 or self.n_codes < 1 or self.code_hierarchy_depth < 0:
            raise ValueError("`n_subjects` and `code_hierarchy_depth` must be >= 0, `n_codes` >= 1.")
        if self.n_shards < 1:
            raise ValueError(f"`n_shards` must be at least 1. Got {self.n_shards}.")
        if self.n_location_uris < 0 or self.n_description_uris < 0:
            raise ValueError("`n_location_uris` and `n_description_uris` must be non-negative.")
        if self.n_description_uris > 0 and self.n_location_uris == 0:
            raise ValueError("Description URIs need at least one location URI to attach to.")
        if self.max_days < 1:
            raise ValueError(f"`max_days` must be at least 1. Got {self.max_days}.")
        parse_datetime(self.start_date)

    @property
    def expected_event_triples(self) -> float:
        """Expected triples per event under the default mapping context."""
        return 5 + self.p_time + self.p_numeric + self.p_text


def leaf_code(index: int) -> str:
    return f"{CODE_PREFIX}:{index:05d}"


def group_code(level: int, index: int) -> str:
    return f"{CODE_PREFIX}:G{level}.{index}"


def generate_codes(n_codes: int, depth: int) -> list[CodeRecord]:
    """Leaf codes, then the ancestor codes of each level, each pointing at its single parent."""
    codes = []
    for i in range(n_codes):
        parents = (group_code(1, i // CODE_FANOUT),) if depth >= 1 else ()
        codes.append(CodeRecord(leaf_code(i), f"Synthetic code {i}", parents))
    level_size = n_codes
    for level in range(1, depth + 1):
        level_size = math.ceil(level_size / CODE_FANOUT)
        for j in range(level_size):
            parents = (group_code(level + 1, j // CODE_FANOUT),) if level < depth else ()
            codes.append(CodeRecord(group_code(level, j), f"Synthetic group {level}.{j}", parents))
    return codes


def generate_metadata(cfg: SynthConfig) -> DatasetMetadataRecord:
    start = parse_datetime(cfg.start_date)
    base_url = f"https://example.org/{cfg.dataset_name}"
    return DatasetMetadataRecord(
        dataset_name=cfg.dataset_name,
        meds_version=cfg.meds_version,
        created_at=start + timedelta(days=cfg.max_days),
        dataset_version=f"seed-{cfg.seed}",
        license="CC-BY-4.0" if cfg.with_license else None,
        location_uris=tuple(f"{base_url}/download/{i}.tar.gz" for i in range(cfg.n_location_uris)),
        description_uris=tuple(f"{base_url}/docs/{i}.html" for i in range(cfg.n_description_uris)),
        etl_name="meds-graph-synth" if cfg.with_etl else None,
        etl_version="1.0" if cfg.with_etl else None,
    )


def _subject_events(
    rng: np.random.Generator, cfg: SynthConfig, subject_id: str, start: datetime, horizon_s: int
) -> list[EventRecord]:
    low, high = cfg.events_per_subject
    n = int(rng.integers(low, high + 1))
    if n == 0:
        return []
    presence = rng.random((n, 3)) < np.array([cfg.p_time, cfg.p_numeric, cfg.p_text])
    codes = rng.integers(0, cfg.n_codes, n)
    offsets = np.sort(rng.integers(0, horizon_s, n))
    numeric = rng.normal(50.0, 15.0, n)
    notes = rng.integers(0, 1000, n)

    events = [
        EventRecord(
            subject_id=subject_id,
            code_string=leaf_code(int(codes[i])),
            time=start + timedelta(seconds=int(offsets[i])) if presence[i, 0] else None,
            numeric_value=float(numeric[i]) if presence[i, 1] else None,
            text_value=f"note-{int(notes[i])}" if presence[i, 2] else None,
        )
        for i in range(n)
    ]
    # MEDS order inside a subject: timeless rows first, then by time.
    events.sort(key=lambda e: (e.time is not None, e.time or start))
    return events


def _label_value(rng: np.random.Generator, kind: str):
    match kind:
        case "boolean":
            return bool(rng.random() < 0.5)
        case "integer":
            return int(rng.integers(0, 10))
        case "float":
            return float(rng.normal(0.0, 1.0))
        case _:
            return CATEGORICAL_LABELS[int(rng.integers(0, len(CATEGORICAL_LABELS)))]


def generate(cfg: SynthConfig) -> MedsDataset:
    rng = np.random.default_rng(cfg.seed)
    start = parse_datetime(cfg.start_date)
    horizon_s = cfg.max_days * 24 * 3600
    split_names = list(cfg.split_fractions)
    split_p = np.array([cfg.split_fractions[name] for name in split_names], dtype=np.float64)
    split_p /= split_p.sum()

    shards: dict[str, list[EventRecord]] = {str(k): [] for k in range(cfg.n_shards)}
    splits = []
    labels = []
    subjects_per_shard = max(1, math.ceil(cfg.n_subjects / cfg.n_shards))
    for index in range(cfg.n_subjects):
        subject_id = str(index)
        shard = str(min(index // subjects_per_shard, cfg.n_shards - 1))
        shards[shard].extend(_subject_events(rng, cfg, subject_id, start, horizon_s))

        split_name = split_names[int(rng.choice(len(split_names), p=split_p))]
        splits.append(SplitAssignment(subject_id, split_name))

        low, high = cfg.n_labels_per_subject
        for _ in range(int(rng.integers(low, high + 1))):
            prediction_time = start + timedelta(seconds=int(rng.integers(0, horizon_s)))
            value = _label_value(rng, cfg.label_kind)
            labels.append(LabelRecord.with_value(subject_id, prediction_time, cfg.label_kind, value))

    return MedsDataset.from_preloaded(
        metadata=generate_metadata(cfg),
        events=shards,
        codes=generate_codes(cfg.n_codes, cfg.code_hierarchy_depth),
        splits=splits,
        labels=labels,
    )
