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
"""Minting of instance IRIs.

Every IRI lives under `{base_iri}{dataset_slug}/` and is built from the natural key of its node:

| node         | IRI                                            |
|--------------|------------------------------------------------|
| subject      | `subject/{subject_id}`                         |
| event        | `event/{shard_name}/{row_index}`               |
| code         | `code/{code_string}`                           |
| dataset      | `dataset`                                      |
| ETL activity | `etl`                                          |
| split        | `split/{split_table_id}/{split_name}`          |
| label        | `label/{subject_id}/{ordinal}`                 |
| distribution | `distribution/{ordinal}`                       |
| license      | the license itself if it is an absolute IRI, else `license/{license}` |

String keys are percent-encoded with everything outside the URI unreserved set escaped (including '/'), so
distinct keys give distinct IRIs.
"""

import re
from functools import lru_cache
from typing import TYPE_CHECKING
from urllib.parse import quote, unquote

from meds_graph.common.rdf.terms import IRI

if TYPE_CHECKING:
    from meds_graph.common.mapping.configuration_mapping import MappingContext

_ABSOLUTE_LICENSE_RE = re.compile(r"^(?:[A-Za-z][A-Za-z0-9+.\-]*://[^\s<>\"{}|^`\\]+|urn:[^\s<>\"{}|^`\\]+)$")
# Subject and code IRIs minted per `IriScheme` that are kept for reuse.
IRI_CACHE_SIZE = 65_536


def encode_key(key: str) -> str:
    return quote(key, safe="")


class IriScheme:
    def __init__(self, ctx: "MappingContext"):
        self.prefix = f"{ctx.base_iri}{ctx.dataset_slug}/"
        self.split_table_id = ctx.split_table_id
        self.subject_iri = lru_cache(maxsize=IRI_CACHE_SIZE)(self._subject_iri)
        self.code_iri = lru_cache(maxsize=IRI_CACHE_SIZE)(self._code_iri)

    def _subject_iri(self, subject_id: str) -> IRI:
        return IRI(f"{self.prefix}subject/{encode_key(subject_id)}")

    def event_iri(self, shard_name: str, row_index: int) -> IRI:
        return IRI(f"{self.prefix}event/{encode_key(shard_name)}/{int(row_index)}")

    def _code_iri(self, code_string: str) -> IRI:
        return IRI(f"{self.prefix}code/{encode_key(code_string)}")

    def dataset_iri(self) -> IRI:
        return IRI(f"{self.prefix}dataset")

    def etl_iri(self) -> IRI:
        return IRI(f"{self.prefix}etl")

    def split_iri(self, split_name: str) -> IRI:
        return IRI(f"{self.prefix}split/{encode_key(self.split_table_id)}/{encode_key(split_name)}")

    def label_iri(self, subject_id: str, ordinal: int) -> IRI:
        return IRI(f"{self.prefix}label/{encode_key(subject_id)}/{int(ordinal)}")

    def distribution_iri(self, ordinal: int) -> IRI:
        return IRI(f"{self.prefix}distribution/{int(ordinal)}")

    def license_iri(self, license: str) -> IRI:
        if is_absolute_license(license):
            return IRI(license)
        return IRI(f"{self.prefix}license/{encode_key(license)}")


def is_absolute_license(license: str) -> bool:
    if _ABSOLUTE_LICENSE_RE.match(license) is None:
        return False
    try:
        IRI(license)
    except ValueError:
        return False
    return True


def license_from_iri(iri: IRI, dataset_iri: IRI) -> str:
    """Inverse of `IriScheme.license_iri`, given the dataset node minted under the same prefix."""
    minted_prefix = dataset_iri.value.removesuffix("dataset") + "license/"
    if iri.value.startswith(minted_prefix):
        return unquote(iri.value[len(minted_prefix) :])
    return iri.value


def split_group(split_iri: IRI) -> str:
    """The split experiment a split node belongs to: its IRI up to the last '/'."""
    return split_iri.value.rsplit("/", 1)[0]
