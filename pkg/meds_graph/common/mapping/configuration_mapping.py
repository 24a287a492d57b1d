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
import re
from dataclasses import dataclass
from functools import cached_property

from meds_graph.common.mapping.iri_scheme import IriScheme
from meds_graph.common.rdf.terms import IRI
from meds_graph.common.rdf.vocabulary import DEFAULT_MEDS_NAMESPACE, MedsVocabulary, make_vocabulary

# Placeholder namespace for minted instance IRIs; set `base_iri` (or MEDS_GRAPH_BASE_IRI) for real datasets.
DEFAULT_BASE_IRI = "https://w3id.org/meds-graph/data/"

_SLUG_RE = re.compile(r"[^a-z0-9]+")


def slugify(name: str) -> str:
    """URL-safe slug of a dataset name: lowercase ASCII letters and digits, other runs become one '-'."""
    slug = _SLUG_RE.sub("-", name.lower()).strip("-")
    return slug or "dataset"


@dataclass(frozen=True)
class MappingContext:
    """Everything besides the records themselves that the mapping depends on.

    Two conversions with equal contexts and equal inputs produce equal graphs.

    Args:
        base_iri: Namespace under which instance IRIs are minted. Must be absolute and end with '/'.
        dataset_slug: URL-safe name of the dataset, the first path segment of every minted IRI. Usually
            built from the dataset name with `MappingContext.for_dataset`.
        include_event_provenance: Whether every event gets a `prov:wasDerivedFrom` link to the dataset node.
            Disabling it gives the bare event templates, one triple less per event.
        split_table_id: Name of the split experiment. Subjects may belong to one split per experiment, so
            independent experiments need distinct ids.
        vocab_namespace: Namespace of the MEDS-OWL vocabulary.
    """

    base_iri: str = DEFAULT_BASE_IRI
    dataset_slug: str = "dataset"
    include_event_provenance: bool = True
    split_table_id: str = "default"
    vocab_namespace: str = DEFAULT_MEDS_NAMESPACE

    def __post_init__(self):
        try:
            IRI(self.base_iri)
        except ValueError as e:
            raise ValueError(f"`base_iri` must be an absolute IRI. Got {self.base_iri!r}.") from e
        if not self.base_iri.endswith("/"):
            raise ValueError(f"`base_iri` must end with '/'. Got {self.base_iri!r}.")
        if not self.dataset_slug or slugify(self.dataset_slug) != self.dataset_slug:
            raise ValueError(
                f"`dataset_slug` must be a non-empty slug of lowercase letters, digits and '-'. "
                f"Got {self.dataset_slug!r}."
            )
        if not self.split_table_id:
            raise ValueError("`split_table_id` must be non-empty.")

    @classmethod
    def for_dataset(cls, dataset_name: str, **kwargs) -> "MappingContext":
        return cls(dataset_slug=slugify(dataset_name), **kwargs)

    @cached_property
    def vocab(self) -> MedsVocabulary:
        return make_vocabulary(self.vocab_namespace)

    @cached_property
    def iris(self) -> IriScheme:
        return IriScheme(self)
