"""Line-oriented input/output formats.

Ontology files carry one statement per line::

    CLASS <id>
    SUBCLASS <child> <parent>
    DISJOINT <a> <b>

`#` starts a comment, blank lines are ignored, and ids are any
whitespace-free tokens.  Alignments are tab-separated::

    source<TAB>target<TAB>relation<TAB>confidence

with relation one of `=`, `<`, `>` and an optional confidence defaulting
to 1.0.  Writing is canonical (sorted, fixed confidence formatting), so
write(parse(write(x))) == write(x).
"""

from __future__ import annotations

from .model import (
    Alignment,
    AlignmentError,
    ClassId,
    Mapping,
    Ontology,
    Relation,
    build_ontology,
)


class FormatError(ValueError):
    """Syntactically invalid input file."""


def parse_ontology_file(text: str, side: int) -> Ontology:
    """Parse ontology statements; semantic checks run in build_ontology."""
    classes: list[str] = []
    edges: list[tuple[str, str]] = []
    disjoint: list[tuple[str, str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        keyword = tokens[0]
        args = tokens[1:]
        if keyword == "CLASS":
            if len(args) != 1:
                raise FormatError(f"line {lineno}: CLASS takes one id")
            classes.append(args[0])
        elif keyword == "SUBCLASS":
            if len(args) != 2:
                raise FormatError(f"line {lineno}: SUBCLASS takes child and parent")
            edges.append((args[0], args[1]))
        elif keyword == "DISJOINT":
            if len(args) != 2:
                raise FormatError(f"line {lineno}: DISJOINT takes two ids")
            disjoint.append((args[0], args[1]))
        else:
            raise FormatError(f"line {lineno}: unknown statement {keyword!r}")
    return build_ontology(side, classes, edges, disjoint)


def write_ontology_file(onto: Ontology) -> str:
    lines = [f"CLASS {c.id}" for c in onto.classes]
    lines += [f"SUBCLASS {child.id} {parent.id}" for child, parent in onto.subclass_edges]
    lines += [f"DISJOINT {a.id} {b.id}" for a, b in onto.disjointness]
    return "\n".join(lines) + "\n"


_RELATIONS = {r.value: r for r in Relation}


def parse_alignment_tsv(text: str) -> Alignment:
    """Parse a tab-separated alignment; duplicates by identity are errors."""
    mappings: list[Mapping] = []
    seen: set[tuple] = set()
    for lineno, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip() or raw.lstrip().startswith("#"):
            continue
        fields = raw.rstrip("\n").split("\t")
        if len(fields) not in (3, 4):
            raise FormatError(
                f"line {lineno}: expected 3 or 4 tab-separated fields, "
                f"got {len(fields)}"
            )
        source, target, rel_token = fields[0], fields[1], fields[2]
        if not source or not target:
            raise FormatError(f"line {lineno}: empty class id")
        if rel_token not in _RELATIONS:
            raise FormatError(
                f"line {lineno}: relation must be one of =, <, > "
                f"(got {rel_token!r})"
            )
        confidence = 1.0
        if len(fields) == 4:
            try:
                confidence = float(fields[3])
            except ValueError:
                raise FormatError(
                    f"line {lineno}: bad confidence {fields[3]!r}"
                ) from None
            if not 0.0 <= confidence <= 1.0:
                raise FormatError(
                    f"line {lineno}: confidence {confidence} outside [0, 1]"
                )
        mapping = Mapping(
            source=ClassId(source, 1),
            target=ClassId(target, 2),
            relation=_RELATIONS[rel_token],
            confidence=confidence,
        )
        if mapping.key in seen:
            raise FormatError(
                f"line {lineno}: duplicate mapping {mapping.describe()!r}"
            )
        seen.add(mapping.key)
        mappings.append(mapping)
    try:
        return Alignment(mappings)
    except AlignmentError as exc:  # pragma: no cover - duplicates caught above
        raise FormatError(str(exc)) from None


def format_confidence(value: float) -> str:
    """Up to six decimal digits, at least one, no other trailing zeros."""
    text = f"{value:.6f}".rstrip("0")
    if text.endswith("."):
        text += "0"
    return text


def write_alignment_tsv(alignment: Alignment) -> str:
    lines = [
        f"{m.source.id}\t{m.target.id}\t{m.relation.value}\t"
        f"{format_confidence(m.confidence)}"
        for m in alignment
    ]
    return "\n".join(lines) + ("\n" if lines else "")
