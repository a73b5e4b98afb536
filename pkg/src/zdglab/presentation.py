"""Ring presentations ``GF(p)[x1,...,xn]/(f1,...,fm)``.

Text is parsed into a :class:`PresentationAST`, a reduced Gröbner basis is
computed under degrevlex with Buchberger's algorithm, and the quotient is
compiled to a :class:`~zdglab.algebra.FiniteAlgebra` on the standard
monomials.

Polynomials are plain dicts mapping exponent tuples to nonzero residues.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from . import gflin
from .algebra import FiniteAlgebra
from .errors import InfiniteQuotient, PresentationError

MAX_QUOTIENT_DIM = 4096

Monomial = tuple[int, ...]


def degrevlex_key(m: Monomial):
    """Sort key: a larger key means a larger monomial in degrevlex."""
    return (sum(m), tuple(-e for e in reversed(m)))


def basis_key(m: Monomial):
    """Order for quotient bases: by degree, then descending within a degree (x before y)."""
    return (sum(m), tuple(reversed(m)))


def format_monomial(m: Monomial, names) -> str:
    parts = []
    for e, v in zip(m, names):
        if e == 1:
            parts.append(v)
        elif e > 1:
            parts.append(f"{v}^{e}")
    return "*".join(parts) if parts else "1"


@dataclass(frozen=True)
class Poly:
    """A polynomial over F_p in ``nvars`` variables."""

    p: int
    nvars: int
    terms: dict = field(default_factory=dict, compare=False, hash=False)

    def __post_init__(self):
        clean = {tuple(m): c % self.p for m, c in self.terms.items() if c % self.p}
        object.__setattr__(self, "terms", clean)

    def __eq__(self, other):
        if not isinstance(other, Poly):
            return NotImplemented
        return (self.p, self.nvars, self.terms) == (other.p, other.nvars, other.terms)

    def __hash__(self):
        return hash((self.p, self.nvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: degrevlex_key(t[0]), reverse=True)

    def leading_monomial(self) -> Monomial:
        return max(self.terms, key=degrevlex_key)

    def format(self, names) -> str:
        if not self.terms:
            return "0"
        out = []
        for m, c in self.sorted_terms():
            mono = format_monomial(m, names)
            if mono == "1":
                out.append(str(c))
            elif c == 1:
                out.append(mono)
            else:
                out.append(f"{c}*{mono}")
        return " + ".join(out)


@dataclass(frozen=True)
class PresentationAST:
    p: int
    vars: tuple[str, ...]
    relations: tuple[Poly, ...]

    def format(self) -> str:
        rels = ", ".join(r.format(self.vars) for r in self.relations)
        return f"GF({self.p})[{','.join(self.vars)}]/({rels})"


# -- parsing ------------------------------------------------------------------

_TOKEN = re.compile(r"(\d+)|([A-Za-z_][A-Za-z0-9_]*)|(\s+)|(.)", re.S)


@dataclass
class _Tok:
    kind: str  # INT, ID, SYM, EOF
    text: str
    line: int
    col: int


def _tokenize(text: str) -> list[_Tok]:
    toks = []
    line, line_start = 1, 0
    for m in _TOKEN.finditer(text):
        col = m.start() - line_start + 1
        if m.group(1):
            toks.append(_Tok("INT", m.group(1), line, col))
        elif m.group(2):
            toks.append(_Tok("ID", m.group(2), line, col))
        elif m.group(3):
            for k, ch in enumerate(m.group(3)):
                if ch == "\n":
                    line, line_start = line + 1, m.start() + k + 1
        else:
            ch = m.group(4)
            if ch not in "()[],/+-*^":
                raise PresentationError(f"unexpected character {ch!r}", line, col)
            toks.append(_Tok("SYM", ch, line, col))
    toks.append(_Tok("EOF", "", line, len(text) - line_start + 1))
    return toks


class _Parser:
    def __init__(self, text: str):
        self.toks = _tokenize(text)
        self.i = 0

    @property
    def tok(self) -> _Tok:
        return self.toks[self.i]

    def error(self, msg, tok=None):
        tok = tok or self.tok
        found = tok.text or "end of input"
        return PresentationError(f"{msg}, found {found!r}", tok.line, tok.col)

    def expect(self, kind, text=None) -> _Tok:
        tok = self.tok
        if tok.kind != kind or (text is not None and tok.text != text):
            raise self.error(f"expected {text or kind}")
        self.i += 1
        return tok

    def at(self, text) -> bool:
        return self.tok.kind == "SYM" and self.tok.text == text

    def parse(self) -> PresentationAST:
        head = self.expect("ID")
        if head.text != "GF":
            raise self.error("expected 'GF'", head)
        self.expect("SYM", "(")
        ptok = self.expect("INT")
        try:
            p = gflin.check_prime(int(ptok.text))
        except ValueError as exc:
            raise PresentationError(str(exc), ptok.line, ptok.col) from None
        self.expect("SYM", ")")
        self.expect("SYM", "[")
        names = [self.expect("ID").text]
        while self.at(","):
            self.i += 1
            names.append(self.expect("ID").text)
        self.expect("SYM", "]")
        if len(set(names)) != len(names):
            raise PresentationError(f"duplicate variable in {names}", head.line, head.col)
        self.p, self.names = p, names
        self.expect("SYM", "/")
        self.expect("SYM", "(")
        rels = []
        if not self.at(")"):
            rels.append(self.poly())
            while self.at(","):
                self.i += 1
                rels.append(self.poly())
        self.expect("SYM", ")")
        if self.tok.kind != "EOF":
            raise self.error("trailing input")
        if not rels:
            raise InfiniteQuotient("infinite quotient: empty relation list", head.line, head.col)
        return PresentationAST(p, tuple(names), tuple(rels))

    def poly(self) -> Poly:
        terms: dict = {}
        sign = 1
        if self.at("+") or self.at("-"):
            sign = -1 if self.tok.text == "-" else 1
            self.i += 1
        while True:
            mono, coef = self.term()
            terms[mono] = (terms.get(mono, 0) + sign * coef) % self.p
            if self.at("+") or self.at("-"):
                sign = -1 if self.tok.text == "-" else 1
                self.i += 1
                continue
            break
        return Poly(self.p, len(self.names), terms)

    def term(self):
        exps = [0] * len(self.names)
        coef = 1
        while True:
            tok = self.tok
            if tok.kind == "INT":
                self.i += 1
                coef = coef * int(tok.text) % self.p
            elif tok.kind == "ID":
                self.i += 1
                if tok.text not in self.names:
                    raise PresentationError(f"unknown identifier {tok.text!r}", tok.line, tok.col)
                e = 1
                if self.at("^"):
                    self.i += 1
                    e = int(self.expect("INT").text)
                exps[self.names.index(tok.text)] += e
            else:
                raise self.error("expected a coefficient or variable")
            if self.at("*"):
                self.i += 1
                continue
            if self.tok.kind in ("INT", "ID"):
                raise self.error("expected '*' (implicit multiplication is not allowed)")
            return tuple(exps), coef


def parse(text: str) -> PresentationAST:
    """Parse presentation text; raises :class:`PresentationError` with line/column."""
    return _Parser(text).parse()


# -- Gröbner bases ------------------------------------------------------------


def _divides(a: Monomial, b: Monomial) -> bool:
    return all(x <= y for x, y in zip(a, b))


def _lcm(a: Monomial, b: Monomial) -> Monomial:
    return tuple(max(x, y) for x, y in zip(a, b))


def _sub_mono(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x - y for x, y in zip(a, b))


def _add_mono(a: Monomial, b: Monomial) -> Monomial:
    return tuple(x + y for x, y in zip(a, b))


def _lead(f: dict) -> Monomial:
    return max(f, key=degrevlex_key)


def _monic(f: dict, p: int) -> dict:
    inv = gflin.inv_mod(f[_lead(f)], p)
    return {m: c * inv % p for m, c in f.items()}


def _axpy(f: dict, c: int, shift: Monomial, g: dict, p: int) -> dict:
    """f - c * x^shift * g."""
    out = dict(f)
    for m, gc in g.items():
        mm = _add_mono(m, shift)
        v = (out.get(mm, 0) - c * gc) % p
        if v:
            out[mm] = v
        else:
            out.pop(mm, None)
    return out


def reduce_poly(f: dict, basis: list[dict], p: int) -> dict:
    """Full reduction of ``f`` by monic ``basis`` (every term, not just the lead)."""
    f = dict(f)
    remainder: dict = {}
    leads = [_lead(g) for g in basis]
    while f:
        m = _lead(f)
        c = f[m]
        for g, lm in zip(basis, leads):
            if _divides(lm, m):
                f = _axpy(f, c, _sub_mono(m, lm), g, p)
                break
        else:
            remainder[m] = c
            del f[m]
    return remainder


def _spoly(f: dict, g: dict, p: int) -> dict:
    lf, lg = _lead(f), _lead(g)
    l = _lcm(lf, lg)
    s = {_add_mono(m, _sub_mono(l, lf)): c for m, c in f.items()}
    return _axpy(s, 1, _sub_mono(l, lg), g, p)


@dataclass(frozen=True)
class GroebnerBasis:
    p: int
    vars: tuple[str, ...]
    polys: tuple[Poly, ...]
    order: str = "degrevlex"

    def leading_monomials(self) -> list[Monomial]:
        return [f.leading_monomial() for f in self.polys]

    def normal_form(self, f: Poly) -> Poly:
        return Poly(self.p, len(self.vars), reduce_poly(f.terms, [g.terms for g in self.polys], self.p))

    def format(self) -> str:
        return "[" + ", ".join(g.format(self.vars) for g in self.polys) + "]"


def buchberger(ast: PresentationAST) -> GroebnerBasis:
    """Reduced degrevlex Gröbner basis (normal selection strategy, coprime criterion)."""
    p = ast.p
    basis = [_monic(f.terms, p) for f in ast.relations if f.terms]
    pairs = {(i, j) for j in range(len(basis)) for i in range(j)}
    while pairs:
        i, j = min(pairs, key=lambda ij: (degrevlex_key(_lcm(_lead(basis[ij[0]]), _lead(basis[ij[1]]))), ij))
        pairs.discard((i, j))
        li, lj = _lead(basis[i]), _lead(basis[j])
        if all(a == 0 or b == 0 for a, b in zip(li, lj)):
            continue
        r = reduce_poly(_spoly(basis[i], basis[j], p), basis, p)
        if r:
            basis.append(_monic(r, p))
            k = len(basis) - 1
            pairs.update((i, k) for i in range(k))
    return GroebnerBasis(p, ast.vars, tuple(_interreduce(basis, p, len(ast.vars))))


def _interreduce(basis: list[dict], p: int, nvars: int) -> list[Poly]:
    basis = sorted(basis, key=lambda f: degrevlex_key(_lead(f)))
    minimal: list[dict] = []
    for f in basis:
        lf = _lead(f)
        if any(_divides(_lead(g), lf) for g in minimal):
            continue
        minimal = [g for g in minimal if not _divides(lf, _lead(g))]
        minimal.append(f)
    reduced = []
    for idx, f in enumerate(minimal):
        others = minimal[:idx] + minimal[idx + 1 :]
        lf = _lead(f)
        tail = reduce_poly({m: c for m, c in f.items() if m != lf}, others, p)
        tail[lf] = 1
        reduced.append(tail)
    reduced.sort(key=lambda f: degrevlex_key(_lead(f)))
    return [Poly(p, nvars, f) for f in reduced]


def is_finite_quotient(gb: GroebnerBasis) -> bool:
    """Every variable has a pure power among the leading monomials.

    The unit ideal (leading monomial 1) counts as finite: its quotient is zero.
    """
    leads = gb.leading_monomials()
    n = len(gb.vars)
    if any(sum(m) == 0 for m in leads):
        return True
    for v in range(n):
        if not any(m[v] > 0 and sum(m) == m[v] for m in leads):
            return False
    return True


def _pure_power_bounds(gb: GroebnerBasis) -> list[int]:
    n = len(gb.vars)
    if any(sum(m) == 0 for m in gb.leading_monomials()):
        return [0] * n
    bounds = []
    for v in range(n):
        degs = [m[v] for m in gb.leading_monomials() if m[v] > 0 and sum(m) == m[v]]
        bounds.append(min(degs))
    return bounds


def standard_monomials(gb: GroebnerBasis) -> list[Monomial]:
    """Monomials divisible by no leading monomial, in quotient-basis order."""
    if not is_finite_quotient(gb):
        raise InfiniteQuotient("infinite quotient: some variable has no pure-power leading term")
    leads = gb.leading_monomials()
    bounds = _pure_power_bounds(gb)
    box = 1
    for b in bounds:
        box *= b
    # the staircase is inside the box; only guard when the box itself is big
    std = []
    for m in itertools.product(*(range(b) for b in bounds)):
        if not any(_divides(l, m) for l in leads):
            std.append(m)
            if len(std) > MAX_QUOTIENT_DIM:
                raise PresentationError(f"quotient dimension exceeds {MAX_QUOTIENT_DIM}")
    std.sort(key=basis_key)
    return std


def to_algebra(gb: GroebnerBasis) -> FiniteAlgebra:
    """Compile the quotient to structure constants on the standard monomials."""
    std = standard_monomials(gb)
    if not std:
        raise PresentationError("presentation defines the zero ring")
    index = {m: i for i, m in enumerate(std)}
    n = len(std)
    polys = [g.terms for g in gb.polys]
    table = np.zeros((n, n, n), dtype=np.int64)
    cache: dict = {}
    for i in range(n):
        for j in range(i, n):
            prod = _add_mono(std[i], std[j])
            if prod not in cache:
                cache[prod] = reduce_poly({prod: 1}, polys, gb.p)
            for m, c in cache[prod].items():
                table[i, j, index[m]] = c
                table[j, i, index[m]] = c
    one = np.zeros(n, dtype=np.int64)
    one[index[tuple([0] * len(gb.vars))]] = 1
    labels = [format_monomial(m, gb.vars) for m in std]
    return FiniteAlgebra(gb.p, table, one, labels)


def compile_presentation(text: str) -> FiniteAlgebra:
    """``parse`` + ``buchberger`` + ``to_algebra``."""
    return to_algebra(buchberger(parse(text)))


def expand_product(p: int, factors: list[dict], nvars: int) -> Poly:
    """Multiply out polynomials given as term dicts (used to write CRT presentations)."""
    acc = {tuple([0] * nvars): 1}
    for f in factors:
        out: dict = {}
        for m1, c1 in acc.items():
            for m2, c2 in f.items():
                mm = _add_mono(m1, m2)
                out[mm] = (out.get(mm, 0) + c1 * c2) % p
        acc = out
    return Poly(p, nvars, acc)
