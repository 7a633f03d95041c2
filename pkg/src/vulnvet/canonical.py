"""Canonical tree form shared by fingerprinting and tree differencing.

Every construct body is lowered to a ``CTree``: an ordered, labeled tree
whose serialization is whitespace- and comment-free. Equal trees serialize
identically, so a digest over the serialization is a content fingerprint.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field


@dataclass(frozen=True)
class CTree:
    label: str
    children: tuple["CTree", ...] = field(default=())

    def size(self) -> int:
        return 1 + sum(c.size() for c in self.children)

    def preorder(self):
        yield self
        for c in self.children:
            yield from c.preorder()


def _escape(label: str) -> str:
    return label.replace("\\", "\\\\").replace("(", "\\(").replace(")", "\\)").replace(" ", "\\s")


def serialize(tree: CTree) -> str:
    """Pre-order s-expression serialization; injective on trees."""
    if not tree.children:
        return _escape(tree.label)
    return "(%s %s)" % (_escape(tree.label), " ".join(serialize(c) for c in tree.children))


def _unescape_token(tok: str) -> str:
    out = []
    i = 0
    while i < len(tok):
        ch = tok[i]
        if ch == "\\" and i + 1 < len(tok):
            nxt = tok[i + 1]
            out.append(" " if nxt == "s" else nxt)
            i += 2
        else:
            out.append(ch)
            i += 1
    return "".join(out)


def deserialize(text: str) -> CTree:
    """Inverse of :func:`serialize`. Raises ValueError on malformed input."""
    pos = 0

    def skip_ws():
        nonlocal pos
        while pos < len(text) and text[pos] == " ":
            pos += 1

    def parse_node() -> CTree:
        nonlocal pos
        skip_ws()
        if pos >= len(text):
            raise ValueError("unexpected end of canonical form")
        if text[pos] == "(":
            pos += 1
            label = parse_token()
            kids = []
            while True:
                skip_ws()
                if pos >= len(text):
                    raise ValueError("unterminated canonical node")
                if text[pos] == ")":
                    pos += 1
                    return CTree(label, tuple(kids))
                kids.append(parse_node())
        return CTree(parse_token())

    def parse_token() -> str:
        nonlocal pos
        skip_ws()
        start = pos
        raw = []
        while pos < len(text) and text[pos] not in " ()":
            if text[pos] == "\\" and pos + 1 < len(text):
                raw.append(text[pos:pos + 2])
                pos += 2
            else:
                raw.append(text[pos])
                pos += 1
        if pos == start:
            raise ValueError("empty label at offset %d" % pos)
        return _unescape_token("".join(raw))

    node = parse_node()
    skip_ws()
    if pos != len(text):
        raise ValueError("trailing data in canonical form")
    return node


def digest(tree: CTree) -> str:
    """256-bit content hash of the canonical serialization, as hex."""
    return hashlib.sha256(serialize(tree).encode("utf-8")).hexdigest()
