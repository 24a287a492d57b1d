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
"""IRI constants of the MEDS-OWL vocabulary and of the DCTERMS / DCAT / PROV-O / RDF(S) terms it reuses.

The MEDS-OWL namespace is not fixed by the ontology release we target, so it is a parameter: build a
`MedsVocabulary` with `make_vocabulary(namespace)`. The imported vocabularies come from rdflib's namespace
definitions and are module constants.

Example:
    ```python
    vocab = make_vocabulary()
    vocab.Event        # IRI("https://w3id.org/meds-owl#Event")
    vocab.hasSubject   # IRI("https://w3id.org/meds-owl#hasSubject")
    RDF_TYPE           # IRI("http://www.w3.org/1999/02/22-rdf-syntax-ns#type")
    ```
"""

from dataclasses import dataclass, fields
from functools import lru_cache

import rdflib
from rdflib.namespace import DCAT, DCTERMS, PROV, RDF, RDFS, XSD

from meds_graph.common.rdf.terms import IRI

# Placeholder: the ontology release does not publish its namespace IRI. Override it per run with
# `vocab_namespace` in the config.
DEFAULT_MEDS_NAMESPACE = "https://w3id.org/meds-owl#"


def _iri(term: rdflib.URIRef) -> IRI:
    return IRI(str(term))


RDF_TYPE = _iri(RDF.type)
RDFS_LABEL = _iri(RDFS.label)

DCT_TITLE = _iri(DCTERMS.title)
DCT_HAS_VERSION = _iri(DCTERMS.hasVersion)
DCT_CREATED = _iri(DCTERMS.created)
DCT_LICENSE = _iri(DCTERMS.license)
DCT_LICENSE_DOCUMENT = _iri(DCTERMS.LicenseDocument)

DCAT_DISTRIBUTION = _iri(DCAT.distribution)
DCAT_DOWNLOAD_URL = _iri(DCAT.downloadURL)
DCAT_ACCESS_URL = _iri(DCAT.accessURL)

PROV_ACTIVITY = _iri(PROV.Activity)
PROV_WAS_GENERATED_BY = _iri(PROV.wasGeneratedBy)
PROV_WAS_DERIVED_FROM = _iri(PROV.wasDerivedFrom)

# Namespaces bound in Turtle output and shape files, besides `meds`.
STANDARD_PREFIXES = {
    "rdf": str(RDF),
    "rdfs": str(RDFS),
    "xsd": str(XSD),
    "dct": str(DCTERMS),
    "dcat": str(DCAT),
    "prov": str(PROV),
}


@dataclass(frozen=True)
class MedsVocabulary:
    namespace: str

    # Classes.
    Subject: IRI
    Event: IRI
    Code: IRI
    DatasetMetadata: IRI
    SubjectSplit: IRI
    SubjectLabel: IRI
    # Not instantiated by the mapping; kept so shapes and queries can refer to it.
    ValueModality: IRI

    # Object properties.
    hasSubject: IRI
    hasCode: IRI
    assignedSplit: IRI
    parentCode: IRI

    # Datatype properties.
    subjectId: IRI
    time: IRI
    codeString: IRI
    codeDescription: IRI
    numericValue: IRI
    textValue: IRI
    medsVersion: IRI
    predictionTime: IRI
    booleanValue: IRI
    integerValue: IRI
    floatValue: IRI
    categoricalValue: IRI

    @property
    def label_value_properties(self) -> tuple[IRI, IRI, IRI, IRI]:
        return (self.booleanValue, self.integerValue, self.floatValue, self.categoricalValue)

    def prefixes(self) -> dict[str, str]:
        """Prefix map used for Turtle output and shape files."""
        return {"meds": self.namespace, **STANDARD_PREFIXES}


@lru_cache
def make_vocabulary(namespace: str = DEFAULT_MEDS_NAMESPACE) -> MedsVocabulary:
    if not namespace or namespace[-1] not in "#/":
        raise ValueError(f"The MEDS-OWL namespace must end with '#' or '/'. Got {namespace!r}.")
    ns = rdflib.Namespace(IRI(namespace).value)
    terms = {f.name: _iri(ns[f.name]) for f in fields(MedsVocabulary) if f.name != "namespace"}
    return MedsVocabulary(namespace=namespace, **terms)
