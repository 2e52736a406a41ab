"""Reading and writing polynomials in the ``name:=expr;`` text format.

Grammar (whitespace and ``#`` comments are ignored between tokens)::

    defs    := def*
    def     := [IDENT ":="] expr ";"
    expr    := term (("+" | "-") term)*
    term    := ["-"] factor ("*" factor)*
    factor  := IDENT ["^" UINT] | UINT ["/" UINT] | "(" expr ")" ["^" UINT]

``IDENT`` is ``[~A-Za-z][A-Za-z0-9]*``.  Implicit multiplication is rejected.
"""
from __future__ import annotations

import hashlib
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from gmpy2 import mpq

from .polyring import EL, Polynomial, RingSignature, render_rational

__all__ = [
    "ParseError",
    "CorpusIntegrityError",
    "DefinitionSet",
    "parse_definitions",
    "parse_expression",
    "render",
    "render_definitions",
    "load_kernel_corpus",
    "KERNEL_SHA256",
    "KERNEL_NAMES",
]

KERNEL_SHA256 = "7f02e5fff1845d4664329e117be1f2f97b95502cefe67672eb2904cbb85e5b88"
KERNEL_NAMES = tuple(f"~q{i}" for i in range(1, 15))


class ParseError(ValueError):
    def __init__(self, message: str, line: int, column: int, token: str):
        super().__init__(f"{line}:{column}: {message} (at {token!r})")
        self.message = message
        self.line = line
        self.column = column
        self.token = token


class CorpusIntegrityError(RuntimeError):
    """The embedded kernel corpus does not match its recorded checksum."""


_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r\n]+|\#[^\n]*)
  | (?P<ident>[~A-Za-z][A-Za-z0-9]*)
  | (?P<uint>[0-9]+)
  | (?P<op>:=|[;+\-*^/()])
    """,
    re.VERBOSE,
)


@dataclass(frozen=True)
class _Tok:
    kind: str  # ident, uint, op, eof
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    pos, line, line_start = 0, 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN_RE.match(text, pos)
        if m is None:
            raise ParseError("unexpected character", line, pos - line_start + 1, text[pos])
        kind = m.lastgroup
        s = m.group()
        if kind != "ws":
            toks.append(_Tok(kind, s, line, pos - line_start + 1))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    toks.append(_Tok("eof", "", line, pos - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str, ring: RingSignature):
        self.toks = _tokenize(text)
        self.i = 0
        self.ring = ring
        self._vars = {v: ring.var(v) for v in ring.variables}

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg: str, tok: _Tok | None = None):
        tok = tok or self.tok
        raise ParseError(msg, tok.line, tok.col, tok.text or "<end of input>")

    def accept(self, text: str) -> bool:
        if self.tok.kind == "op" and self.tok.text == text:
            self.i += 1
            return True
        return False

    def expect(self, text: str, what: str | None = None):
        if not self.accept(text):
            self.error(f"expected {what or repr(text)}")

    def uint(self) -> int:
        if self.tok.kind != "uint":
            self.error("expected an unsigned integer")
        v = int(self.tok.text)
        self.i += 1
        return v

    def definitions(self) -> list[tuple[str | None, Polynomial, int]]:
        out = []
        while self.tok.kind != "eof":
            line = self.tok.line
            name = None
            nxt = self.toks[self.i + 1]
            if self.tok.kind == "ident" and nxt.kind == "op" and nxt.text == ":=":
                name = self.tok.text
                self.i += 2
            poly = self.expr()
            if self.tok.kind == "eof":
                self.error("unterminated definition, expected ';'")
            self.expect(";", "'+', '-', '*' or ';'")
            out.append((name, poly, line))
        return out

    def expr(self) -> Polynomial:
        acc = self.term()
        while True:
            if self.accept("+"):
                acc = acc + self.term()
            elif self.accept("-"):
                acc = acc - self.term()
            else:
                return acc

    def term(self) -> Polynomial:
        neg = self.accept("-")
        acc = self.factor()
        while self.accept("*"):
            acc = acc * self.factor()
        if self.tok.kind in ("ident", "uint") or (self.tok.kind == "op" and self.tok.text == "("):
            self.error("implicit multiplication is not allowed")
        return -acc if neg else acc

    def factor(self) -> Polynomial:
        tok = self.tok
        if tok.kind == "ident":
            if tok.text not in self._vars:
                self.error(f"unknown variable for ring {self.ring.name}")
            self.i += 1
            base = self._vars[tok.text]
            if self.accept("^"):
                return base ** self.uint()
            return base
        if tok.kind == "uint":
            num = self.uint()
            if self.accept("/"):
                den_tok = self.tok
                den = self.uint()
                if den == 0:
                    self.error("zero denominator", den_tok)
                return self.ring.const(mpq(num, den))
            return self.ring.const(num)
        if self.accept("("):
            inner = self.expr()
            self.expect(")")
            if self.accept("^"):
                return inner ** self.uint()
            return inner
        self.error("expected a variable, number or '('")


@dataclass
class DefinitionSet:
    """Ordered ``name -> Polynomial`` map plus a provenance note."""

    ring: RingSignature
    entries: dict[str, Polynomial] = field(default_factory=dict)
    source: str = ""

    def __getitem__(self, name: str) -> Polynomial:
        return self.entries[name]

    def __iter__(self):
        return iter(self.entries)

    def __len__(self) -> int:
        return len(self.entries)

    def items(self):
        return self.entries.items()

    def names(self) -> list[str]:
        return list(self.entries)


def parse_definitions(text: str, ring: RingSignature, source: str = "") -> DefinitionSet:
    """Parse a sequence of ``name:=expr;`` entries.

    Anonymous ``expr;`` entries are accepted and named ``_1``, ``_2``, ... by
    their position in the file.
    """
    parser = _Parser(text, ring)
    out = DefinitionSet(ring=ring, source=source)
    for idx, (name, poly, line) in enumerate(parser.definitions(), start=1):
        if name is None:
            name = f"_{idx}"
        if name in out.entries:
            raise ParseError("duplicate definition name", line, 1, name)
        out.entries[name] = poly
    return out


def parse_expression(text: str, ring: RingSignature) -> Polynomial:
    parser = _Parser(text, ring)
    poly = parser.expr()
    parser.accept(";")
    if parser.tok.kind != "eof":
        parser.error("unexpected trailing input")
    return poly


def render(p: Polynomial) -> str:
    """Canonical text: descending grevlex terms, ``*`` and ``^``, ``n/d`` coefficients."""
    if p.is_zero():
        return "0"
    names = p.ring.variables
    parts = []
    for exps, c in p.terms():
        mono = "*".join(
            name if e == 1 else f"{name}^{e}" for name, e in zip(names, exps) if e
        )
        sign = "-" if c < 0 else "+"
        mag = render_rational(abs(c))
        if not mono:
            body = mag
        elif mag == "1":
            body = mono
        else:
            body = f"{mag}*{mono}"
        parts.append((sign, body))
    first_sign, first = parts[0]
    out = ["-" + first if first_sign == "-" else first]
    out.extend(s + b for s, b in parts[1:])
    return "".join(out)


def render_definitions(defs: dict[str, Polynomial]) -> str:
    return "".join(f"{name}:={render(p)};\n" for name, p in defs.items())


def _read_embedded_corpus() -> bytes:
    return resources.files("cuboid_eform").joinpath("data/kernel_basis.poly").read_bytes()


def load_kernel_corpus(path: str | Path | None = None) -> DefinitionSet:
    """The 14 kernel polynomials ``~q1 .. ~q14`` over ``EL``.

    With no ``path`` the embedded corpus is used and checked against
    :data:`KERNEL_SHA256`; an explicit ``path`` skips the check.
    """
    if path is None:
        raw = _read_embedded_corpus()
        digest = hashlib.sha256(raw).hexdigest()
        if digest != KERNEL_SHA256:
            raise CorpusIntegrityError(
                f"embedded kernel corpus checksum mismatch: {digest} != {KERNEL_SHA256}"
            )
        source = f"embedded kernel_basis.poly sha256={digest}"
    else:
        raw = Path(path).read_bytes()
        source = f"{path} sha256={hashlib.sha256(raw).hexdigest()}"
    return parse_definitions(raw.decode("utf-8"), EL, source=source)
