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
"""Export of a shape suite as standard SHACL, and validation of a graph with pySHACL.

Property constraints map one to one to `sh:property` shapes. An exclusive group requiring exactly one value
becomes an `sh:xone` over one `sh:minCount 1` shape per path; combined with the `sh:maxCount 1` of each path
this is the same constraint. Other groups and the split-membership rules have no SHACL core equivalent and
are left out with a warning.
"""

import logging

import rdflib
from rdflib.collection import Collection
from rdflib.namespace import RDF, SH, XSD

from meds_graph.common.rdf.graph import Graph
from meds_graph.common.rdf.terms import IRI
from meds_graph.common.rdf.utils import to_rdflib
from meds_graph.common.shapes.shapes import ExclusiveGroup, NodeShape, PropertyConstraint, ShapeSuite
from meds_graph.common.utils.import_utils import _pyshacl_available


def _uri(iri: IRI) -> rdflib.URIRef:
    return rdflib.URIRef(iri.value)


def _count(value: int) -> rdflib.Literal:
    return rdflib.Literal(value, datatype=XSD.integer)


def _add_property_shape(shacl: rdflib.Graph, node_shape: rdflib.URIRef, c: PropertyConstraint):
    prop = rdflib.BNode()
    shacl.add((node_shape, SH.property, prop))
    shacl.add((prop, SH.path, _uri(c.path)))
    if c.min_count > 0:
        shacl.add((prop, SH.minCount, _count(c.min_count)))
    if c.max_count is not None:
        shacl.add((prop, SH.maxCount, _count(c.max_count)))
    if c.datatype is not None:
        shacl.add((prop, SH.datatype, _uri(c.datatype)))
    if c.class_of_object is not None:
        shacl.add((prop, SH["class"], _uri(c.class_of_object)))


def _add_exclusive_group(
    shacl: rdflib.Graph, node_shape: rdflib.URIRef, shape: NodeShape, group: ExclusiveGroup
):
    if (group.min_total, group.max_total) != (1, 1):
        logging.warning(
            f"The exclusive group {[p.value for p in group.paths]} of {shape.target_class} allows "
            f"{group.min_total} to {group.max_total} values and has no SHACL core equivalent; skipped."
        )
        return
    alternatives = []
    for path in group.paths:
        alternative = rdflib.BNode()
        prop = rdflib.BNode()
        shacl.add((alternative, SH.property, prop))
        shacl.add((prop, SH.path, _uri(path)))
        shacl.add((prop, SH.minCount, _count(1)))
        alternatives.append(alternative)
    head = rdflib.BNode()
    Collection(shacl, head, alternatives)
    shacl.add((node_shape, SH.xone, head))


def suite_to_shacl(suite: ShapeSuite) -> rdflib.Graph:
    """SHACL shapes graph of `suite`. The node shape of class `C` is named `<CShape>`."""
    shacl = rdflib.Graph()
    shacl.bind("sh", SH)
    for shape in suite.shapes:
        node_shape = rdflib.URIRef(shape.target_class.value + "Shape")
        shacl.add((node_shape, RDF.type, SH.NodeShape))
        shacl.add((node_shape, SH.targetClass, _uri(shape.target_class)))
        for constraint in shape.constraints:
            _add_property_shape(shacl, node_shape, constraint)
        for group in shape.exclusive_groups:
            _add_exclusive_group(shacl, node_shape, shape, group)
    for rule in suite.split_membership:
        logging.warning(f"The split-membership rule on {rule.path} has no SHACL core equivalent; skipped.")
    return shacl


def validate_with_pyshacl(g: Graph, suite: ShapeSuite) -> tuple[bool, str]:
    """Validate `g` with pySHACL against the SHACL export of `suite`.

    Returns (conforms, pySHACL's text report). Only the constraints that survive the export are checked.
    """
    if not _pyshacl_available:
        raise ImportError("pySHACL is not installed. Install it with `pip install 'meds-graph[shacl]'`.")
    from pyshacl import validate

    conforms, _, results_text = validate(
        to_rdflib(g),
        shacl_graph=suite_to_shacl(suite),
        inference="none",
        abort_on_first=False,
        meta_shacl=False,
        advanced=False,
        debug=False,
    )
    logging.info(f"pySHACL conforms={conforms}")
    return bool(conforms), results_text
