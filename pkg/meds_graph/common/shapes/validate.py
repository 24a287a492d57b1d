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
import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable

from termcolor import colored
from tqdm import tqdm

from meds_graph.common.mapping.iri_scheme import split_group
from meds_graph.common.rdf.graph import Graph
from meds_graph.common.rdf.terms import IRI, Literal, Term
from meds_graph.common.shapes.shapes import (
    ConstraintKind,
    ExclusiveGroup,
    NodeShape,
    PropertyConstraint,
    ShapeSuite,
    SplitMembershipRule,
)


@dataclass(frozen=True)
class Violation:
    focus_node: IRI
    # None for suite-level rules, which have no target class.
    target_class: IRI | None
    path: str
    kind: ConstraintKind
    observed: str
    message: str

    def to_dict(self) -> dict:
        return {
            "focus_node": self.focus_node.value,
            "target_class": self.target_class.value if self.target_class is not None else None,
            "path": self.path,
            "constraint": self.kind.value,
            "observed": self.observed,
            "message": self.message,
        }


@dataclass
class ValidationReport:
    violations: list[Violation] = field(default_factory=list)
    num_focus_nodes: int = 0

    @property
    def conforms(self) -> bool:
        return not self.violations

    def by_kind(self) -> dict[str, int]:
        counts = Counter(v.kind.value for v in self.violations)
        return dict(sorted(counts.items()))

    def to_dict(self) -> dict:
        return {
            "conforms": self.conforms,
            "num_focus_nodes": self.num_focus_nodes,
            "num_violations": len(self.violations),
            "violations_by_constraint": self.by_kind(),
            "violations": [v.to_dict() for v in self.violations],
        }

    def summary(self) -> str:
        if self.conforms:
            verdict = colored("Conforms", "green", attrs=["bold"])
            return f"{verdict} ({self.num_focus_nodes} focus nodes checked)"
        kinds = ", ".join(f"{kind}={count}" for kind, count in self.by_kind().items())
        verdict = colored("Does not conform", "red", attrs=["bold"])
        return f"{verdict}: {len(self.violations)} violations ({kinds})"


def _describe(term: Term) -> str:
    return term.n3()


def _has_type(g: Graph, background: Graph | None, node: Term, cls: IRI) -> bool:
    return g.has_type(node, cls) or (background is not None and background.has_type(node, cls))


def _check_constraint(
    g: Graph, focus: IRI, shape: NodeShape, c: PropertyConstraint, background: Graph | None = None
) -> list[Violation]:
    violations = []
    objects = g.objects(focus, c.path)
    path = c.path.value

    def violation(kind: ConstraintKind, observed: str, message: str):
        violations.append(Violation(focus, shape.target_class, path, kind, observed, message))

    if len(objects) < c.min_count:
        violation(
            ConstraintKind.MIN_COUNT, str(len(objects)), f"{len(objects)} value(s) < minCount {c.min_count}"
        )
    if c.max_count is not None and len(objects) > c.max_count:
        violation(
            ConstraintKind.MAX_COUNT, str(len(objects)), f"{len(objects)} value(s) > maxCount {c.max_count}"
        )
    for obj in objects:
        if c.datatype is not None and not (isinstance(obj, Literal) and obj.datatype == c.datatype):
            violation(ConstraintKind.DATATYPE, _describe(obj), f"value is not a literal of {c.datatype.n3()}")
        if c.class_of_object is not None and not _has_type(g, background, obj, c.class_of_object):
            message = f"value is not an instance of {c.class_of_object.n3()}"
            violation(ConstraintKind.CLASS, _describe(obj), message)
    return violations


def _check_group(g: Graph, focus: IRI, shape: NodeShape, group: ExclusiveGroup) -> list[Violation]:
    total = sum(len(g.objects(focus, path)) for path in group.paths)
    if group.min_total <= total <= group.max_total:
        return []
    bounds = (
        f"exactly {group.min_total}"
        if group.min_total == group.max_total
        else f"between {group.min_total} and {group.max_total}"
    )
    return [
        Violation(
            focus,
            shape.target_class,
            " | ".join(path.value for path in group.paths),
            ConstraintKind.EXCLUSIVE_GROUP,
            str(total),
            f"{total} value(s) over the exclusive group, expected {bounds}",
        )
    ]


def _check_split_membership(g: Graph, rule: SplitMembershipRule) -> list[Violation]:
    violations = []
    for subject in sorted(g.subjects(rule.path)):
        groups = Counter(split_group(obj) for obj in g.objects(subject, rule.path) if isinstance(obj, IRI))
        for group, count in sorted(groups.items()):
            if count > rule.max_per_group:
                violations.append(
                    Violation(
                        subject,
                        None,
                        rule.path.value,
                        ConstraintKind.SPLIT_MEMBERSHIP,
                        str(count),
                        f"assigned to {count} splits of <{group}>, at most {rule.max_per_group} allowed",
                    )
                )
    return violations


def _validate(
    g: Graph, suite: ShapeSuite, background: Graph | None, progress: bool
) -> tuple[list[Violation], int]:
    focus_nodes = [
        (shape, focus) for shape in suite.shapes for focus in sorted(g.instances_of(shape.target_class))
    ]
    violations: list[Violation] = []
    for shape, focus in tqdm(focus_nodes, desc="Validating", disable=not progress):
        for constraint in shape.constraints:
            violations.extend(_check_constraint(g, focus, shape, constraint, background))
        for group in shape.exclusive_groups:
            violations.extend(_check_group(g, focus, shape, group))
    for rule in suite.split_membership:
        violations.extend(_check_split_membership(g, rule))
    return violations, len(focus_nodes)


def validate(g: Graph, suite: ShapeSuite, progress: bool = False) -> ValidationReport:
    """Check every instance of a targeted class against its shape, then the suite-level rules.

    Problems are collected in the report, never raised. The report is sorted so it does not depend on how
    the graph was built.
    """
    violations, num_focus_nodes = _validate(g, suite, None, progress)
    report = ValidationReport(sorted(violations, key=_sort_key), num_focus_nodes)
    logging.info(report.summary())
    return report


def validate_pieces(
    main: Graph, pieces: Iterable[Graph], suite: ShapeSuite, progress: bool = False
) -> ValidationReport:
    """Validate the union of `main` and `pieces` while holding a single piece at a time.

    Each piece is checked alone, looking the types of the nodes it points to up in `main` too. The report is
    the one `validate` gives for the union as long as no node has triples in two of the graphs, which holds
    for the output of `convert_shardwise`.
    """
    violations, num_focus_nodes = _validate(main, suite, None, progress)
    for piece in pieces:
        piece_violations, piece_focus_nodes = _validate(piece, suite, main, False)
        violations.extend(piece_violations)
        num_focus_nodes += piece_focus_nodes
    report = ValidationReport(sorted(violations, key=_sort_key), num_focus_nodes)
    logging.info(report.summary())
    return report



def _sort_key(v: Violation) -> tuple:
    target = v.target_class.value if v.target_class is not None else ""
    return (v.focus_node.value, target, v.path, v.kind.value, v.observed)
