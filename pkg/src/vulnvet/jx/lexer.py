"""Hand-rolled lexer for JX. Comments (// and /* */) and whitespace are dropped."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError

KEYWORDS = {
    "package", "class", "interface", "extends", "implements", "static",
    "int", "boolean", "text", "void", "if", "else", "while", "return",
    "new", "this", "true", "false",
}

PUNCT = ("==", "!=", "{", "}", "(", ")", ";", ",", ".", "=", "+", "-", "*", "/", "<", ">")


@dataclass(frozen=True)
class Token:
    kind: str  # ID, INT, TEXT, keyword text, or punctuation text; EOF
    value: str
    line: int
    col: int


def tokenize(source: str, origin: str = "<source>") -> list:
    tokens = []
    i = 0
    line = 1
    col = 1
    n = len(source)

    def err(msg):
        raise ParseError(msg, line, col, origin)

    while i < n:
        ch = source[i]
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "\n":
            i += 1
            line += 1
            col = 1
            continue
        if source.startswith("//", i):
            while i < n and source[i] != "\n":
                i += 1
            continue
        if source.startswith("/*", i):
            end = source.find("*/", i + 2)
            if end < 0:
                err("unterminated block comment")
            skipped = source[i:end + 2]
            nl = skipped.count("\n")
            if nl:
                line += nl
                col = len(skipped) - skipped.rfind("\n")
            else:
                col += len(skipped)
            i = end + 2
            continue
        if ch.isalpha() or ch == "_":
            start = i
            while i < n and (source[i].isalnum() or source[i] == "_"):
                i += 1
            word = source[start:i]
            kind = word if word in KEYWORDS else "ID"
            tokens.append(Token(kind, word, line, col))
            col += i - start
            continue
        if ch.isdigit():
            start = i
            while i < n and source[i].isdigit():
                i += 1
            tokens.append(Token("INT", source[start:i], line, col))
            col += i - start
            continue
        if ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            buf = []
            while True:
                if i >= n:
                    raise ParseError("unterminated text literal", start_line, start_col, origin)
                c = source[i]
                if c == "\n":
                    raise ParseError("newline in text literal", line, col, origin)
                if c == "\\":
                    if i + 1 >= n or source[i + 1] not in ('"', "\\"):
                        raise ParseError("unknown escape in text literal", line, col, origin)
                    buf.append(source[i + 1])
                    i += 2
                    col += 2
                    continue
                if c == '"':
                    i += 1
                    col += 1
                    break
                buf.append(c)
                i += 1
                col += 1
            tokens.append(Token("TEXT", "".join(buf), start_line, start_col))
            continue
        matched = None
        for p in PUNCT:
            if source.startswith(p, i):
                matched = p
                break
        if matched is None:
            err("unexpected character %r" % ch)
        tokens.append(Token(matched, matched, line, col))
        i += len(matched)
        col += len(matched)

    tokens.append(Token("EOF", "", line, col))
    return tokens
