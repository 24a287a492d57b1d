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
"""Constraint types of the shape suite and the builtin MEDS-OWL suite.

The constraint kinds are a subset of SHACL core (`sh:targetClass`, `sh:minCount`, `sh:maxCount`,
`sh:datatype`, `sh:class`) plus two constructs SHACL core has no direct equivalent for: exclusive groups of
properties whose values are counted together, and the split-membership rule.
"""

from dataclasses import dataclass, field
from enum import Enum

from meds_graph.common.rdf.terms import (
    IRI,
    XSD_BOOLEAN,
    XSD_DATETIME,
    XSD_DOUBLE,
    XSD_INTEGER,
    XSD_STRING,
)
from meds_graph.common.rdf.vocabulary import (
    DCT_CREATED,
    DCT_HAS_VERSION,
    DCT_TITLE,
    DEFAULT_MEDS_NAMESPACE,
    make_vocabulary,
)


class ConstraintKind(str, Enum):
    MIN_COUNT = "minCount"
    MAX_COUNT = "maxCount"
    DATATYPE = "datatype"
    CLASS = "class"
    EXCLUSIVE_GROUP = "exclusiveGroup"
    SPLIT_MEMBERSHIP = "splitMembership"


@dataclass(frozen=True)
class PropertyConstraint:
    path: IRI
    min_count: int = 0
    max_count: int | None = None
    datatype: IRI | None = None
    class_of_object: IRI | None = None

    def __post_init__(self):
        if self.min_count < 0:
            raise ValueError(f"min_count of {self.path} must be non-negative. Got {self.min_count}.")
        if self.max_count is not None and self.max_count < self.min_count:
            raise ValueError(
                f"min_count must not exceed max_count for {self.path}. "
                f"Got {self.min_count} > {self.max_count}."
            )
        if self.datatype is not None and self.class_of_object is not None:
            raise ValueError(f"datatype and class are mutually exclusive for {self.path}.")


@dataclass(frozen=True)
class ExclusiveGroup:
    """Properties whose values are counted together: a focus node has between `min_total` and `max_total`
    values over all of `paths`."""

    paths: tuple[IRI, ...]
    min_total: int = 1
    max_total: int = 1

    def __post_init__(self):
        object.__setattr__(self, "paths", tuple(self.paths))
        if len(self.paths) < 2 or len(set(self.paths)) != len(self.paths):
            raise ValueError(f"An exclusive group needs at least 2 distinct paths. Got {self.paths}.")
        if not 0 <= self.min_total <= self.max_total:
            raise ValueError(
                "Exclusive group bounds must satisfy 0 <= min <= max. "
                f"Got {self.min_total}, {self.max_total}."
            )


@dataclass(frozen=True)
class NodeShape:
    target_class: IRI
    constraints: tuple[PropertyConstraint, ...] = ()
    exclusive_groups: tuple[ExclusiveGroup, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "constraints", tuple(self.constraints))
        object.__setattr__(self, "exclusive_groups", tuple(self.exclusive_groups))
        paths = [c.path for c in self.constraints]
        if len(set(paths)) != len(paths):
            raise ValueError(f"Property paths must be unique within the shape of {self.target_class}.")

    def constraint(self, path: IRI) -> PropertyConstraint | None:
        return next((c for c in self.constraints if c.path == path), None)


@dataclass(frozen=True)
class SplitMembershipRule:
    """A subject has at most `max_per_group` values of `path` per split experiment.

    The experiment of a split node is its IRI up to the last '/'.
    """

    path: IRI
    max_per_group: int = 1

    def __post_init__(self):
        if self.max_per_group < 1:
            raise ValueError(f"max_per_group must be at least 1. Got {self.max_per_group}.")


@dataclass(frozen=True)
class ShapeSuite:
    shapes: tuple[NodeShape, ...] = ()
    split_membership: tuple[SplitMembershipRule, ...] = field(default=())

    def __post_init__(self):
        object.__setattr__(self, "shapes", tuple(self.shapes))
        object.__setattr__(self, "split_membership", tuple(self.split_membership))
        targets = [s.target_class for s in self.shapes]
        if len(set(targets)) != len(targets):
            raise ValueError("A shape suite has at most one shape per target class.")

    def shape_for(self, target_class: IRI) -> NodeShape | None:
        return next((s for s in self.shapes if s.target_class == target_class), None)


def builtin_meds_suite(namespace: str = DEFAULT_MEDS_NAMESPACE) -> ShapeSuite:
    """The MEDS-OWL constraints: cardinalities of every table mapping, value datatypes, referential closure of
    object properties, exactly one value per label, and one split per subject and experiment."""
    v = make_vocabulary(namespace)
    P = PropertyConstraint  # noqa: N806
    return ShapeSuite(
        shapes=(
            NodeShape(
                v.Event,
                (
                    P(v.hasSubject, 1, 1, class_of_object=v.Subject),
                    P(v.hasCode, 1, 1, class_of_object=v.Code),
                    P(v.codeString, 1, 1, datatype=XSD_STRING),
                    P(v.time, 0, 1, datatype=XSD_DATETIME),
                    P(v.numericValue, 0, 1, datatype=XSD_DOUBLE),
                    P(v.textValue, 0, 1, datatype=XSD_STRING),
                ),
            ),
            NodeShape(v.Subject, (P(v.subjectId, 1, 1, datatype=XSD_STRING),)),
            NodeShape(
                v.Code,
                (
                    P(v.codeString, 1, 1, datatype=XSD_STRING),
                    P(v.codeDescription, 0, 1, datatype=XSD_STRING),
                    P(v.parentCode, 0, None, class_of_object=v.Code),
                ),
            ),
            NodeShape(
                v.DatasetMetadata,
                (
                    P(DCT_TITLE, 1, 1, datatype=XSD_STRING),
                    P(v.medsVersion, 1, 1, datatype=XSD_STRING),
                    P(DCT_CREATED, 1, 1, datatype=XSD_DATETIME),
                    P(DCT_HAS_VERSION, 0, 1, datatype=XSD_STRING),
                ),
            ),
            NodeShape(
                v.SubjectLabel,
                (
                    P(v.hasSubject, 1, 1, class_of_object=v.Subject),
                    P(v.predictionTime, 1, 1, datatype=XSD_DATETIME),
                    P(v.booleanValue, 0, 1, datatype=XSD_BOOLEAN),
                    P(v.integerValue, 0, 1, datatype=XSD_INTEGER),
                    P(v.floatValue, 0, 1, datatype=XSD_DOUBLE),
                    P(v.categoricalValue, 0, 1, datatype=XSD_STRING),
                ),
                (ExclusiveGroup(v.label_value_properties, 1, 1),),
            ),
        ),
        split_membership=(SplitMembershipRule(v.assignedSplit, 1),),
    )
