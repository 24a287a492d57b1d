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
"""RDF terms and statements.

Only two kinds of terms exist: `IRI` and `Literal`. There is no blank node class, so a blank node cannot be
put into a `Triple` or a `Graph` in the first place.

Literals compare by (lexical form, datatype). `1.0` and `1.00` typed `xsd:double` are different literals:
this is what makes byte-exact round-trips possible.
"""

import math
import re
from dataclasses import dataclass
from datetime import datetime, timezone

from rdflib.namespace import XSD

_SCHEME_RE = re.compile(r"^[A-Za-z][A-Za-z0-9+.\-]*:")
# Characters RFC 3987 excludes from IRIs: controls, space and the delimiters of N-Triples and Turtle.
_IRI_FORBIDDEN = set('<>"{}|^`\\') | {chr(c) for c in range(0x21)} | {chr(c) for c in range(0x7F, 0xA0)}


@dataclass(frozen=True, slots=True, order=True)
class IRI:
    value: str

    def __post_init__(self):
        if not isinstance(self.value, str) or not _SCHEME_RE.match(self.value):
            raise ValueError(f"IRIs must be absolute (start with a scheme). Got {self.value!r}.")
        forbidden = sorted({ch for ch in self.value if ch in _IRI_FORBIDDEN})
        if forbidden:
            raise ValueError(f"IRIs can't contain {''.join(forbidden)!r}. Got {self.value!r}.")

    def n3(self) -> str:
        return f"<{self.value}>"

    def __str__(self) -> str:
        return self.value


XSD_STRING = IRI(str(XSD.string))
XSD_DATETIME = IRI(str(XSD.dateTime))
XSD_DOUBLE = IRI(str(XSD.double))
XSD_BOOLEAN = IRI(str(XSD.boolean))
XSD_INTEGER = IRI(str(XSD.integer))

SUPPORTED_DATATYPES = frozenset({XSD_STRING, XSD_DATETIME, XSD_DOUBLE, XSD_BOOLEAN, XSD_INTEGER})

_ECHAR = {
    "\\": "\\\\",
    '"': '\\"',
    "\n": "\\n",
    "\r": "\\r",
    "\t": "\\t",
    "\b": "\\b",
    "\f": "\\f",
}


def escape_string(value: str) -> str:
    return "".join(_ECHAR.get(ch, ch) for ch in value)


@dataclass(frozen=True, slots=True, order=True)
class Literal:
    lexical: str
    datatype: IRI = XSD_STRING

    def __post_init__(self):
        if not isinstance(self.lexical, str):
            raise ValueError(f"Literal lexical forms are strings. Got {type(self.lexical).__name__}.")
        if self.datatype not in SUPPORTED_DATATYPES:
            raise ValueError(
                f"Unsupported literal datatype {self.datatype}. Expected one of "
                f"{sorted(dt.value for dt in SUPPORTED_DATATYPES)}."
            )

    def n3(self) -> str:
        return f'"{escape_string(self.lexical)}"^^{self.datatype.n3()}'

    def __str__(self) -> str:
        return self.lexical

    # Constructors from python values. Each one fixes the canonical lexical form of its datatype.

    @classmethod
    def from_str(cls, value: str) -> "Literal":
        return cls(value, XSD_STRING)

    @classmethod
    def from_double(cls, value: float) -> "Literal":
        return cls(format_double(value), XSD_DOUBLE)

    @classmethod
    def from_datetime(cls, value: datetime) -> "Literal":
        return cls(format_datetime(value), XSD_DATETIME)

    @classmethod
    def from_bool(cls, value: bool) -> "Literal":
        return cls("true" if value else "false", XSD_BOOLEAN)

    @classmethod
    def from_int(cls, value: int) -> "Literal":
        return cls(str(int(value)), XSD_INTEGER)

    def to_python(self) -> str | float | datetime | bool | int:
        if self.datatype == XSD_DOUBLE:
            return parse_double(self.lexical)
        if self.datatype == XSD_DATETIME:
            return parse_datetime(self.lexical)
        if self.datatype == XSD_BOOLEAN:
            if self.lexical not in {"true", "false", "1", "0"}:
                raise ValueError(f"Invalid xsd:boolean lexical form {self.lexical!r}.")
            return self.lexical in {"true", "1"}
        if self.datatype == XSD_INTEGER:
            return int(self.lexical)
        return self.lexical


Term = IRI | Literal


@dataclass(frozen=True, slots=True, order=True)
class Triple:
    subject: IRI
    predicate: IRI
    object: Term

    def __post_init__(self):
        if not isinstance(self.subject, IRI):
            raise ValueError(f"Triple subjects must be IRIs. Got {self.subject!r}.")
        if not isinstance(self.predicate, IRI):
            raise ValueError(f"Triple predicates must be IRIs. Got {self.predicate!r}.")
        if not isinstance(self.object, (IRI, Literal)):
            raise ValueError(f"Triple objects must be IRIs or literals. Got {self.object!r}.")

    def n3(self) -> str:
        return f"{self.subject.n3()} {self.predicate.n3()} {self.object.n3()} ."


def format_double(value: float) -> str:
    """Shortest decimal string that parses back to the same double (python's `repr`), in xsd spelling."""
    value = float(value)
    if math.isnan(value):
        return "NaN"
    if math.isinf(value):
        return "INF" if value > 0 else "-INF"
    return repr(value)


def parse_double(lexical: str) -> float:
    match lexical:
        case "NaN":
            return math.nan
        case "INF" | "+INF":
            return math.inf
        case "-INF":
            return -math.inf
        case _:
            return float(lexical)


def to_naive_utc(value: datetime) -> datetime:
    """Aware datetimes are moved to UTC, then every datetime is made naive."""
    if value.tzinfo is not None:
        value = value.astimezone(timezone.utc).replace(tzinfo=None)
    return value


def format_datetime(value: datetime) -> str:
    """ISO 8601 in UTC with a `Z` suffix; microseconds are kept when non-zero."""
    return to_naive_utc(value).isoformat() + "Z"


def parse_datetime(lexical: str) -> datetime:
    text = lexical[:-1] + "+00:00" if lexical.endswith("Z") else lexical
    return to_naive_utc(datetime.fromisoformat(text))
