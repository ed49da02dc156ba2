"""Problem files (``.gq``) and the polynomial / vector-field expression grammar.

Expressions::

    polynomial ::= ['+'|'-'] term {('+'|'-') term}
    term       ::= rational ['*' monomial] | monomial
    monomial   ::= var ['^' int] {'*' var ['^' int]}
    field      ::= ['+'|'-'] fterm {('+'|'-') fterm}
    fterm      ::= [coeff '*'] 'd(' var ')'
    coeff      ::= term | '(' polynomial ')'
    rational   ::= int ['/' positive-int]

Whitespace is ignored.  Problem files are ``key: value`` lines; ``#``
starts a comment.  Repeated ``h`` / ``twist`` keys accumulate, and ``h``
values may also be separated by ``;``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from gmpy2 import mpq

from .errors import UsageError
from .polyalg import Derivation, Polynomial, WeightedPolyRing


class ParseError(UsageError):
    def __init__(self, message, line=None, col=None, source=None):
        loc = ""
        if line is not None:
            loc = f"line {line}, column {col}: "
        super().__init__(f"{source + ': ' if source else ''}{loc}{message}")
        self.message = message
        self.line = line
        self.col = col
        self.source = source


_TOKEN = re.compile(r"\s*(?:(?P<int>\d+)|(?P<d>d\()|(?P<name>[A-Za-z_][A-Za-z0-9_']*)|(?P<op>[-+*/^()]))")


@dataclass
class _Tok:
    kind: str
    text: str
    col: int  # 1-based


def _tokenize(s: str, line: int, col0: int):
    toks = []
    pos = 0
    while pos < len(s):
        if s[pos:].strip() == "":
            break
        m = _TOKEN.match(s, pos)
        if not m:
            j = pos
            while j < len(s) and s[j].isspace():
                j += 1
            raise ParseError(f"unexpected character {s[j]!r}", line, col0 + j)
        kind = m.lastgroup
        start = m.start(kind)
        toks.append(_Tok(kind, m.group(kind), col0 + start))
        pos = m.end()
    toks.append(_Tok("end", "", col0 + len(s)))
    return toks


class _Parser:
    def __init__(self, text: str, ring: WeightedPolyRing, line: int = 1, col0: int = 1,
                 allow_base: bool = True):
        self.text = text
        self.ring = ring
        self.line = line
        self.toks = _tokenize(text, line, col0)
        self.i = 0
        self.allow_base = allow_base

    # helpers ---------------------------------------------------------------
    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def err(self, msg, tok=None):
        tok = tok or self.tok
        raise ParseError(msg, self.line, tok.col)

    def take(self, kind=None, text=None) -> _Tok:
        t = self.tok
        if (kind and t.kind != kind) or (text is not None and t.text != text):
            want = text or kind
            got = "end of input" if t.kind == "end" else repr(t.text)
            self.err(f"expected {want!r}, found {got}")
        self.i += 1
        return t

    def at(self, kind, text=None) -> bool:
        t = self.tok
        return t.kind == kind and (text is None or t.text == text)

    def var(self) -> int:
        t = self.take("name")
        if t.text not in self.ring.names:
            self.err(f"undeclared variable {t.text!r}", t)
        return self.ring.index(t.text)

    # grammar ---------------------------------------------------------------
    def rational(self) -> mpq:
        num = int(self.take("int").text)
        if self.at("op", "/"):
            self.take()
            t = self.take("int")
            den = int(t.text)
            if den == 0:
                self.err("zero denominator", t)
            return mpq(num, den)
        return mpq(num)

    def monomial(self) -> Polynomial:
        R = self.ring
        out = R.one()
        while True:
            v = self.var()
            k = 1
            if self.at("op", "^"):
                self.take()
                k = int(self.take("int").text)
            out = out * R.var(v) ** k
            if self.at("op", "*") and self.toks[self.i + 1].kind == "name":
                self.take()
                continue
            return out

    def term(self) -> Polynomial:
        R = self.ring
        if self.at("int"):
            c = self.rational()
            if self.at("op", "*") and self.toks[self.i + 1].kind == "name":
                self.take()
                return self.monomial() * c
            return R.const(c)
        if self.at("name"):
            return self.monomial()
        self.err("expected a number or a variable"
                 if self.tok.kind != "end" else "unexpected end of input")

    def polynomial(self) -> Polynomial:
        sign = 1
        if self.at("op", "+") or self.at("op", "-"):
            sign = -1 if self.take().text == "-" else 1
        out = self.term() * sign
        while self.at("op", "+") or self.at("op", "-"):
            sign = -1 if self.take().text == "-" else 1
            out = out + self.term() * sign
        return out

    def dpart(self) -> int:
        open_tok = self.take("d")
        name = self.take("name")
        if not self.at("op", ")"):
            self.err("unclosed parenthesis in 'd('", open_tok if self.tok.kind == "end" else None)
        self.take()
        if name.text not in self.ring.names:
            self.err(f"undeclared variable {name.text!r}", name)
        return self.ring.index(name.text)

    def fterm(self) -> Derivation:
        R = self.ring
        coeff = R.one()
        if self.at("d"):
            v = self.dpart()
            return Derivation(R, {v: coeff})
        if self.at("op", "("):
            open_tok = self.take()
            coeff = self.polynomial()
            if not self.at("op", ")"):
                self.err("unclosed parenthesis", open_tok if self.tok.kind == "end" else None)
            self.take()
        else:
            coeff = self.term()
        self.take("op", "*")
        if not self.at("d"):
            self.err("expected 'd(' after coefficient")
        v = self.dpart()
        return Derivation(R, {v: coeff})

    def field(self) -> Derivation:
        sign = 1
        if self.at("op", "+") or self.at("op", "-"):
            sign = -1 if self.take().text == "-" else 1
        out = self.fterm() * sign
        while self.at("op", "+") or self.at("op", "-"):
            sign = -1 if self.take().text == "-" else 1
            out = out + self.fterm() * sign
        return out

    def done(self):
        if self.tok.kind != "end":
            self.err(f"unexpected {self.tok.text!r}")


def parse_polynomial(text: str, ring: WeightedPolyRing, line: int = 1, col: int = 1) -> Polynomial:
    p = _Parser(text, ring, line, col)
    out = p.polynomial()
    p.done()
    return out


def parse_field(text: str, ring: WeightedPolyRing, line: int = 1, col: int = 1,
                allow_base: bool = False) -> Derivation:
    """Parse a vector field; ∂ along a weight-zero variable is refused unless allowed."""
    p = _Parser(text, ring, line, col)
    out = p.field()
    p.done()
    if not allow_base:
        for v in out.coeffs:
            if all(a == 0 for a in ring.weights[v]):
                raise ParseError(f"d({ring.names[v]}) differentiates along a zero-weight variable",
                                 line, col)
    return out


# ---------------------------------------------------------------- problem files

KINDS = ("graded_quotient", "dvb", "double_normal", "weighted_normal")
_KEYS = {"kind", "n", "vars", "h", "ranks", "dim", "I1", "I2", "I", "J", "twist", "method"}


@dataclass
class Entry:
    value: str
    line: int
    col: int


@dataclass
class ProblemFile:
    path: str
    kind: str
    entries: dict = field(default_factory=dict)  # key -> list[Entry]
    n: int = 1
    ring: WeightedPolyRing | None = None
    generators: list = field(default_factory=list)  # (text, Derivation)
    ranks: tuple | None = None
    dim: int | None = None
    sets: dict = field(default_factory=dict)  # I1, I2, I, J
    twist: dict = field(default_factory=dict)  # name -> image Polynomial (chart ring)
    method: str | None = None
    header: list = field(default_factory=list)  # leading comment lines

    def echo(self) -> dict:
        out = {"path": self.path, "kind": self.kind, "n": self.n}
        if self.ring is not None:
            out["vars"] = [[nm, ",".join(str(x) for x in w)] for nm, w in zip(self.ring.names, self.ring.weights)]
        if self.generators:
            out["h"] = [str(X) for _, X in self.generators]
        if self.ranks is not None:
            out["ranks"] = list(self.ranks)
        if self.dim is not None:
            out["dim"] = self.dim
        for k, v in sorted(self.sets.items()):
            out[k] = sorted(v)
        if self.twist:
            out["twist"] = {k: str(v) for k, v in sorted(self.twist.items())}
        if self.method:
            out["method"] = self.method
        return out


def _parse_weight(text: str, n: int, line: int, col: int) -> tuple:
    t = text.strip()
    if t.startswith("(") and t.endswith(")"):
        parts = [p.strip() for p in t[1:-1].split(",")]
    else:
        parts = [t]
    try:
        w = tuple(int(p) for p in parts)
    except ValueError:
        raise ParseError(f"bad weight {text!r}", line, col) from None
    if len(w) != n:
        raise ParseError(f"weight {text!r} has {len(w)} entries, expected n = {n}", line, col)
    if any(a < 0 for a in w):
        raise ParseError(f"negative weight {text!r}", line, col)
    return w


def _split_top(text: str, sep: str):
    """Split on ``sep`` outside parentheses, returning (piece, offset) pairs."""
    out, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        elif ch == sep and depth == 0:
            out.append((text[start:i], start))
            start = i + 1
    out.append((text[start:], start))
    return out


def _parse_int(e: Entry, key: str) -> int:
    try:
        return int(e.value.strip())
    except ValueError:
        raise ParseError(f"{key} must be an integer", e.line, e.col) from None


def _parse_set(e: Entry, key: str) -> frozenset:
    v = e.value.strip().strip("{}")
    if not v:
        return frozenset()
    try:
        return frozenset(int(x) for x in v.replace(" ", "").split(",") if x)
    except ValueError:
        raise ParseError(f"{key} must be a comma-separated list of integers", e.line, e.col) from None


def parse_text(text: str, path: str = "<string>") -> ProblemFile:
    entries: dict = {}
    header = []
    seen_content = False
    for ln, raw in enumerate(text.splitlines(), start=1):
        stripped = raw.strip()
        if stripped.startswith("#") and not seen_content:
            header.append(stripped.lstrip("#").strip())
        content = raw.split("#", 1)[0]
        if not content.strip():
            continue
        seen_content = True
        if ":" not in content:
            raise ParseError("expected 'key: value'", ln, len(raw) - len(raw.lstrip()) + 1, path)
        key, value = content.split(":", 1)
        key = key.strip()
        if key not in _KEYS:
            raise ParseError(f"unknown key {key!r}", ln, raw.index(key) + 1, path)
        col = len(key) + raw.index(key) + 2
        entries.setdefault(key, []).append(Entry(value, ln, col))
    if "kind" not in entries:
        raise ParseError("missing 'kind'", None, None, path)
    ke = entries["kind"][0]
    kind = ke.value.strip()
    if kind not in KINDS:
        raise ParseError(f"unknown kind {kind!r} (expected one of {', '.join(KINDS)})", ke.line, ke.col, path)
    pf = ProblemFile(path, kind, entries, header=header)
    try:
        _fill(pf)
    except ParseError as exc:
        if path and not exc.source:
            raise ParseError(exc.message, exc.line, exc.col, path) from None
        raise
    return pf


def _one(pf, key):
    lst = pf.entries.get(key)
    if not lst:
        return None
    if len(lst) > 1:
        raise ParseError(f"duplicate key {key!r}", lst[1].line, lst[1].col)
    return lst[0]


def _fill(pf: ProblemFile):
    e = _one(pf, "n")
    pf.n = _parse_int(e, "n") if e else (2 if pf.kind in ("dvb", "double_normal") else 1)
    if pf.n < 1:
        raise ParseError("n must be ≥ 1", e.line, e.col)
    e = _one(pf, "ranks")
    if e:
        parts = e.value.replace(" ", "").split(",")
        try:
            pf.ranks = tuple(int(x) for x in parts)
        except ValueError:
            raise ParseError("ranks must be a,b,c", e.line, e.col) from None
        if len(pf.ranks) != 3 or min(pf.ranks) < 0:
            raise ParseError("ranks must be three non-negative integers a,b,c", e.line, e.col)
    e = _one(pf, "dim")
    if e:
        pf.dim = _parse_int(e, "dim")
        if pf.dim < 0:
            raise ParseError("dim must be ≥ 0", e.line, e.col)
    for key in ("I1", "I2", "I", "J"):
        e = _one(pf, key)
        if e:
            pf.sets[key] = _parse_set(e, key)
            if pf.dim is not None and any(not 1 <= i <= pf.dim for i in pf.sets[key]):
                raise ParseError(f"{key} has entries outside 1..{pf.dim}", e.line, e.col)
    e = _one(pf, "method")
    if e:
        pf.method = e.value.strip()
        if pf.method not in ("gr", "subquotient", "both"):
            raise ParseError("method must be gr, subquotient or both", e.line, e.col)

    e = _one(pf, "vars")
    if e:
        vars_ = []
        for piece, off in _split_top(e.value, ","):
            if not piece.strip():
                continue
            if ":" not in piece:
                raise ParseError(f"variable declaration {piece.strip()!r} needs name:weight",
                                 e.line, e.col + off)
            nm, w = piece.split(":", 1)
            nm = nm.strip()
            if not re.fullmatch(r"[A-Za-z_][A-Za-z0-9_']*", nm):
                raise ParseError(f"bad variable name {nm!r}", e.line, e.col + off)
            vars_.append((nm, _parse_weight(w, pf.n, e.line, e.col + off)))
        try:
            pf.ring = WeightedPolyRing(vars_)
        except UsageError as exc:
            raise ParseError(str(exc), e.line, e.col) from None
    elif pf.kind == "dvb" and pf.ranks is not None:
        from .dvb import DVBFiber
        pf.ring = DVBFiber(*pf.ranks).ring
    if pf.kind == "dvb" and pf.ranks is None:
        raise ParseError("dvb problems need 'ranks: a,b,c'")
    if pf.kind == "dvb":
        from .dvb import DVBFiber
        if pf.ring != DVBFiber(*pf.ranks).ring:
            raise ParseError("dvb problems use the variables x1.., y1.., z1.. implied by 'ranks'")
    if pf.kind in ("double_normal", "weighted_normal"):
        if pf.dim is None:
            raise ParseError(f"{pf.kind} problems need 'dim'")
        need = ("I1", "I2") if pf.kind == "double_normal" else ("I", "J")
        for k in need:
            if k not in pf.sets:
                raise ParseError(f"{pf.kind} problems need '{k}'")
    if pf.kind == "graded_quotient" and pf.ring is None:
        raise ParseError("graded_quotient problems need 'vars'")

    for e in pf.entries.get("h", []):
        if pf.ring is None:
            raise ParseError("'h' given before any variables are known", e.line, e.col)
        for piece, off in _split_top(e.value, ";"):
            if piece.strip():
                X = parse_field(piece, pf.ring, e.line, e.col + off)
                pf.generators.append((piece.strip(), X))

    for e in pf.entries.get("twist", []):
        if pf.dim is None:
            raise ParseError("'twist' needs 'dim'", e.line, e.col)
        from .geom.jets import chart_ring
        from .geom.normal import chart_names
        names = chart_names(pf.dim)
        C = chart_ring(names, 2 if pf.kind == "double_normal" else 1)
        if "->" not in e.value:
            raise ParseError("twist must read 'u_k -> polynomial'", e.line, e.col)
        lhs, rhs = e.value.split("->", 1)
        nm = lhs.strip()
        if nm not in names:
            raise ParseError(f"unknown chart coordinate {nm!r}", e.line, e.col)
        if nm in pf.twist:
            raise ParseError(f"twist of {nm} given twice", e.line, e.col)
        pf.twist[nm] = parse_polynomial(rhs, C, e.line, e.col + len(lhs) + 2)


def parse_problem(path) -> ProblemFile:
    p = Path(path)
    try:
        text = p.read_text(encoding="utf-8")
    except OSError as exc:
        raise UsageError(f"cannot read {path}: {exc.strerror}") from None
    return parse_text(text, str(path))
