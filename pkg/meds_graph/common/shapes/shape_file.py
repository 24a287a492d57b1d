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
"""Reader and writer of the line-oriented shape-file format.

```
file      := line*
line      := (statement)? (comment)?
statement := "prefix" NAME ":" IRIREF
           | "shape" term
           | "prop" term ("min=" INT)? ("max=" (INT | "*"))? ("datatype=" term | "class=" term)?
           | "group" ("exactly=" INT | "min=" INT "max=" INT) "{" term ("," term)+ "}"
           | "split-membership" term ("max=" INT)?
term      := IRIREF | NAME? ":" LOCAL
IRIREF    := "<" absolute IRI ">"
comment   := "#" up to the end of the line, at the start of a line or after whitespace, outside "<...>"
```

`prop` and `group` lines belong to the closest `shape` line above them; indentation is free. `prop` defaults
are `min=0` and `max=*`. A prefix must be declared before it is used. Files are UTF-8.
"""

import re
from pathlib import Path

from meds_graph.common.rdf.terms import IRI
from meds_graph.common.shapes.shapes import (
    ExclusiveGroup,
    NodeShape,
    PropertyConstraint,
    ShapeSuite,
    SplitMembershipRule,
)

BUILTIN_SHAPES_PATH = Path(__file__).parent / "meds_owl.shapes"

_PREFIX_RE = re.compile(r"^prefix\s+([A-Za-z][\w\-.]*)?:\s+<([^<>\s]*)>$")
_GROUP_RE = re.compile(r"^group\s+([^{}]*?)\s*\{([^{}]*)\}$")
_PREFIXED_NAME_RE = re.compile(r"^([A-Za-z][\w\-.]*)?:([\w\-.]*)$")
_LOCAL_NAME_RE = re.compile(r"^[\w\-.]*$")
_INT_RE = re.compile(r"^\d+$")
_GROUP_MEMBER_RE = re.compile(r"<[^<>]*>|[^,\s<>]+")


class ShapeSyntaxError(ValueError):
    def __init__(self, message: str, source: str = "<string>", line: int | None = None):
        self.source = source
        self.line = line
        location = f"{source}:{line}" if line is not None else source
        super().__init__(f"{location}: {message}")


def _strip_comment(line: str) -> str:
    inside_iri = False
    for i, ch in enumerate(line):
        if ch == "<":
            inside_iri = True
        elif ch == ">":
            inside_iri = False
        elif ch == "#" and not inside_iri and (i == 0 or line[i - 1].isspace()):
            return line[:i]
    return line


class _Parser:
    def __init__(self, source: str):
        self.source = source
        self.line_no = 0
        self.prefixes: dict[str, str] = {}
        self.shapes: list[NodeShape] = []
        self.split_membership: list[SplitMembershipRule] = []
        # The shape being read: target class, constraints and groups.
        self.current: tuple[IRI, list[PropertyConstraint], list[ExclusiveGroup]] | None = None

    def error(self, message: str) -> ShapeSyntaxError:
        return ShapeSyntaxError(message, self.source, self.line_no)

    def term(self, token: str) -> IRI:
        if token.startswith("<") and token.endswith(">"):
            value = token[1:-1]
        else:
            match = _PREFIXED_NAME_RE.match(token)
            if match is None:
                raise self.error(f"Expected an IRI or a prefixed name. Got {token!r}.")
            prefix = match.group(1) or ""
            if prefix not in self.prefixes:
                raise self.error(f"Undeclared prefix {prefix + ':'!r}.")
            value = self.prefixes[prefix] + match.group(2)
        try:
            return IRI(value)
        except ValueError as e:
            raise self.error(str(e)) from e

    def integer(self, key: str, text: str) -> int:
        if not _INT_RE.match(text):
            raise self.error(f"`{key}` must be a non-negative integer. Got {text!r}.")
        return int(text)

    def options(self, tokens: list[str], allowed: set[str]) -> dict[str, str]:
        options = {}
        for token in tokens:
            key, sep, value = token.partition("=")
            if not sep or key not in allowed:
                raise self.error(f"Unexpected option {token!r}. Expected one of {sorted(allowed)}.")
            if key in options:
                raise self.error(f"Option `{key}` is given twice.")
            options[key] = value
        return options

    def close_shape(self):
        if self.current is None:
            return
        target, constraints, groups = self.current
        self.shapes.append(NodeShape(target, tuple(constraints), tuple(groups)))
        self.current = None

    def parse_line(self, line: str):
        statement = _strip_comment(line).strip()
        if not statement:
            return
        keyword = statement.split(maxsplit=1)[0]
        match keyword:
            case "prefix":
                self.parse_prefix(statement)
            case "shape":
                self.parse_shape(statement.split())
            case "prop":
                self.parse_prop(statement.split())
            case "group":
                self.parse_group(statement)
            case "split-membership":
                self.parse_split_membership(statement.split())
            case _:
                raise self.error(f"Unknown statement {keyword!r}.")

    def parse_prefix(self, statement: str):
        match = _PREFIX_RE.match(statement)
        if match is None:
            raise self.error(f"Expected `prefix <name>: <IRI>`. Got {statement!r}.")
        self.prefixes[match.group(1) or ""] = match.group(2)

    def parse_shape(self, tokens: list[str]):
        if len(tokens) != 2:
            raise self.error("Expected `shape <ClassIRI>`.")
        self.close_shape()
        target = self.term(tokens[1])
        if any(shape.target_class == target for shape in self.shapes):
            raise self.error(f"Duplicate shape for {target}.")
        self.current = (target, [], [])

    def parse_prop(self, tokens: list[str]):
        if self.current is None:
            raise self.error("`prop` outside of a shape.")
        if len(tokens) < 2:
            raise self.error("Expected `prop <PredicateIRI> [options]`.")
        path = self.term(tokens[1])
        _, constraints, _ = self.current
        if any(c.path == path for c in constraints):
            raise self.error(f"Duplicate property {path} in the same shape.")
        options = self.options(tokens[2:], {"min", "max", "datatype", "class"})
        min_count = self.integer("min", options.get("min", "0"))
        max_text = options.get("max", "*")
        max_count = None if max_text == "*" else self.integer("max", max_text)
        datatype = self.term(options["datatype"]) if "datatype" in options else None
        class_of_object = self.term(options["class"]) if "class" in options else None
        try:
            constraints.append(PropertyConstraint(path, min_count, max_count, datatype, class_of_object))
        except ValueError as e:
            raise self.error(str(e)) from e

    def parse_group(self, statement: str):
        if self.current is None:
            raise self.error("`group` outside of a shape.")
        match = _GROUP_RE.match(statement)
        if match is None:
            raise self.error("Expected `group exactly=<n> {<IRI>, ...}` or `group min=<n> max=<n> {...}`.")
        options = self.options(match.group(1).split(), {"exactly", "min", "max"})
        if "exactly" in options:
            if "min" in options or "max" in options:
                raise self.error("`exactly` can't be combined with `min` or `max`.")
            min_total = max_total = self.integer("exactly", options["exactly"])
        elif "min" in options and "max" in options:
            min_total = self.integer("min", options["min"])
            max_total = self.integer("max", options["max"])
        else:
            raise self.error("A group needs either `exactly=<n>` or both `min=<n>` and `max=<n>`.")
        paths = tuple(self.term(token) for token in _GROUP_MEMBER_RE.findall(match.group(2)))
        try:
            self.current[2].append(ExclusiveGroup(paths, min_total, max_total))
        except ValueError as e:
            raise self.error(str(e)) from e

    def parse_split_membership(self, tokens: list[str]):
        if len(tokens) < 2:
            raise self.error("Expected `split-membership <PredicateIRI> [max=<n>]`.")
        self.close_shape()
        options = self.options(tokens[2:], {"max"})
        max_per_group = self.integer("max", options.get("max", "1"))
        try:
            self.split_membership.append(SplitMembershipRule(self.term(tokens[1]), max_per_group))
        except ValueError as e:
            raise self.error(str(e)) from e

    def parse(self, text: str) -> ShapeSuite:
        for line_no, line in enumerate(text.split("\n"), start=1):
            self.line_no = line_no
            self.parse_line(line.rstrip("\r"))
        self.close_shape()
        return ShapeSuite(tuple(self.shapes), tuple(self.split_membership))


def parse_suite(text: str, source: str = "<string>") -> ShapeSuite:
    return _Parser(source).parse(text)


def load_suite(path: str | Path) -> ShapeSuite:
    """Load a shape suite from a shape file. Raises `ShapeSyntaxError` with the location of the problem."""
    path = Path(path)
    try:
        text = path.read_bytes().decode("utf-8")
    except UnicodeDecodeError as e:
        raise ShapeSyntaxError(f"Shape files are UTF-8: {e}", str(path)) from e
    return parse_suite(text, source=str(path))


def _compact(iri: IRI, prefixes: dict[str, str]) -> str:
    best = None
    for name, namespace in prefixes.items():
        local = iri.value[len(namespace) :]
        if (
            iri.value.startswith(namespace)
            and _LOCAL_NAME_RE.match(local)
            and (best is None or len(namespace) > len(prefixes[best]))
        ):
            best = name
    if best is None:
        return iri.n3()
    return f"{best}:{iri.value[len(prefixes[best]) :]}"


def dump_suite(suite: ShapeSuite, prefixes: dict[str, str] | None = None) -> str:
    """Textual form of a suite, loaded back as an equal suite by `parse_suite` / `load_suite`."""
    prefixes = dict(prefixes or {})
    lines = [f"prefix {name}: <{namespace}>" for name, namespace in sorted(prefixes.items())]

    def term(iri: IRI) -> str:
        return _compact(iri, prefixes)

    for shape in suite.shapes:
        if lines:
            lines.append("")
        lines.append(f"shape {term(shape.target_class)}")
        for c in shape.constraints:
            max_text = "*" if c.max_count is None else str(c.max_count)
            parts = [f"  prop {term(c.path)}", f"min={c.min_count}", f"max={max_text}"]
            if c.datatype is not None:
                parts.append(f"datatype={term(c.datatype)}")
            if c.class_of_object is not None:
                parts.append(f"class={term(c.class_of_object)}")
            lines.append(" ".join(parts))
        for group in shape.exclusive_groups:
            if group.min_total == group.max_total:
                bounds = f"exactly={group.min_total}"
            else:
                bounds = f"min={group.min_total} max={group.max_total}"
            members = ", ".join(term(path) for path in group.paths)
            lines.append(f"  group {bounds} {{{members}}}")

    if suite.split_membership and lines:
        lines.append("")
    for rule in suite.split_membership:
        lines.append(f"split-membership {term(rule.path)} max={rule.max_per_group}")
    return "\n".join(lines) + "\n"
