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
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path
from typing import Iterable, Iterator

from tqdm import tqdm

from meds_graph.common.datasets.records import (
    CodeRecord,
    DatasetMetadataRecord,
    EventRecord,
    LabelRecord,
    SplitAssignment,
)
from meds_graph.common.datasets.utils import (
    DEFAULT_BATCH_SIZE,
    iter_shard_events,
    list_event_shards,
    load_codes,
    load_dataset_metadata,
    load_labels,
    load_shard_events,
    load_splits,
)

DEFAULT_SHARD_NAME = "0"


class MedsDataset:
    """A MEDS dataset: a metadata record, event shards, and the code, split and label tables.

    Loaded from a MEDS root, events are either parsed eagerly (shards in parallel with `num_workers` threads,
    kept in shard order) or, with `streaming=True`, re-read from disk each time they are iterated so memory
    does not grow with the number of events. The small tables are always loaded eagerly.
    """

    def __init__(
        self,
        root: str | Path,
        streaming: bool = False,
        num_workers: int = 1,
        batch_size: int = DEFAULT_BATCH_SIZE,
        progress: bool = False,
    ):
        self.root = Path(root)
        self.streaming = streaming
        self.batch_size = batch_size
        self.metadata = load_dataset_metadata(self.root)
        self._shard_paths = list_event_shards(self.root)
        self.codes = load_codes(self.root)
        self.splits = load_splits(self.root)
        self.labels = load_labels(self.root)

        self._shards: dict[str, list[EventRecord]] | None = None
        if not streaming:
            paths = [path for _, path in self._shard_paths]
            with ThreadPoolExecutor(max_workers=max(1, num_workers)) as executor:
                # `map` keeps the shard order whatever the completion order.
                loaded = list(
                    tqdm(
                        executor.map(lambda p: load_shard_events(p, batch_size), paths),
                        total=len(paths),
                        desc="Loading shards",
                        disable=not progress,
                    )
                )
            self._shards = {name: events for (name, _), events in zip(self._shard_paths, loaded, strict=True)}

    @classmethod
    def from_preloaded(
        cls,
        metadata: DatasetMetadataRecord,
        events: Iterable[EventRecord] | dict[str, Iterable[EventRecord]] = (),
        codes: Iterable[CodeRecord] = (),
        splits: Iterable[SplitAssignment] = (),
        labels: Iterable[LabelRecord] = (),
        root: Path | None = None,
    ) -> "MedsDataset":
        """Create a dataset from in-memory records instead of loading it from the filesystem.

        `events` is either a mapping from shard name to records, or a flat sequence of records that becomes a
        single shard named `DEFAULT_SHARD_NAME`.
        """
        obj = cls.__new__(cls)
        obj.root = root
        obj.streaming = False
        obj.batch_size = DEFAULT_BATCH_SIZE
        obj.metadata = metadata
        obj._shard_paths = []
        if isinstance(events, dict):
            obj._shards = {name: list(events[name]) for name in sorted(events)}
        else:
            obj._shards = {DEFAULT_SHARD_NAME: list(events)}
        obj.codes = list(codes)
        obj.splits = list(splits)
        obj.labels = list(labels)
        return obj

    @property
    def shard_names(self) -> list[str]:
        if self._shards is not None:
            return list(self._shards)
        return [name for name, _ in self._shard_paths]

    def iter_shards(self) -> Iterator[tuple[str, list[EventRecord]]]:
        if self._shards is not None:
            yield from self._shards.items()
            return
        for name, path in self._shard_paths:
            yield name, load_shard_events(path, self.batch_size)

    def iter_shard(self, shard_name: str) -> Iterator[tuple[int, EventRecord]]:
        """Yield (row_index, record) over one shard. Streaming datasets read it batch by batch."""
        if self._shards is not None:
            yield from enumerate(self._shards[shard_name])
            return
        path = dict(self._shard_paths)[shard_name]
        yield from iter_shard_events(path, self.batch_size)

    def iter_events(self) -> Iterator[tuple[str, int, EventRecord]]:
        """Yield (shard_name, row_index, record) in shard order, then row order."""
        if self._shards is not None:
            for name, events in self._shards.items():
                for row_index, event in enumerate(events):
                    yield name, row_index, event
            return
        for name, path in self._shard_paths:
            for row_index, event in iter_shard_events(path, self.batch_size):
                yield name, row_index, event

    @property
    def events(self) -> list[EventRecord]:
        """All events, concatenated in shard order. Materializes the events of a streaming dataset."""
        return [event for _, _, event in self.iter_events()]

    @property
    def num_events(self) -> int:
        if self._shards is not None:
            return sum(len(events) for events in self._shards.values())
        return sum(1 for _ in self.iter_events())

    @property
    def num_shards(self) -> int:
        return len(self.shard_names)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, MedsDataset):
            return NotImplemented
        return (
            self.metadata == other.metadata
            and list(self.iter_shards()) == list(other.iter_shards())
            and self.codes == other.codes
            and self.splits == other.splits
            and self.labels == other.labels
        )

    __hash__ = None

    def __repr__(self):
        return (
            f"{self.__class__.__name__}(\n"
            f"  Dataset Name: '{self.metadata.dataset_name}',\n"
            f"  MEDS Version: '{self.metadata.meds_version}',\n"
            f"  Root: {self.root},\n"
            f"  Streaming: {self.streaming},\n"
            f"  Number of Shards: {self.num_shards},\n"
            f"  Number of Codes: {len(self.codes)},\n"
            f"  Number of Split Assignments: {len(self.splits)},\n"
            f"  Number of Labels: {len(self.labels)},\n"
            f")"
        )


def load_dataset(root: str | Path, num_workers: int = 1, progress: bool = False) -> MedsDataset:
    return MedsDataset(root, streaming=False, num_workers=num_workers, progress=progress)
