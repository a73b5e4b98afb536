"""Finite-dimensional commutative unital algebras over F_p.

An algebra is stored as structure constants: ``table[i, j]`` holds the
coordinates of ``e_i * e_j``.  Ideals are subspaces of the coordinate
space closed under multiplication by every basis element.  The local-ring
invariants (maximal ideal, Hilbert function, socle, ...) are computed by
linear algebra on multiplication matrices and cached on the algebra.
"""

from __future__ import annotations

import enum
import os
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from . import gflin
from .errors import AlgebraError, NotLocalError, ResourceBoundExceeded, StructuralImpossibility
from .gflin import Matrix, Subspace

DEFAULT_MAX_ELEMS = 2**21


def max_elements() -> int:
    """Enumeration bound, overridable through ``ZDGLAB_MAX_ELEMS``."""
    raw = os.environ.get("ZDGLAB_MAX_ELEMS")
    return int(raw) if raw else DEFAULT_MAX_ELEMS


class FiniteAlgebra:
    """A commutative unital F_p-algebra given by structure constants.

    The constructor verifies commutativity, associativity on every basis
    triple and the identity law, raising :class:`AlgebraError` with the
    offending indices otherwise.
    """

    def __init__(self, p, table, one, labels=None, check=True):
        self.p = gflin.check_prime(p)
        table = np.asarray(table, dtype=np.int64)
        if table.ndim != 3 or len(set(table.shape)) != 1:
            raise AlgebraError(f"table must have shape (dim, dim, dim), got {table.shape}")
        self.dim = table.shape[0]
        if self.dim < 1:
            raise AlgebraError("algebra dimension must be at least 1")
        if check and ((table < 0) | (table >= p)).any():
            idx = tuple(int(i) for i in np.argwhere((table < 0) | (table >= p))[0])
            raise AlgebraError(f"table entry at {idx} outside [0, {p})")
        self.table = gflin._frozen(table % p)
        one = np.asarray(one, dtype=np.int64) % p
        if one.shape != (self.dim,):
            raise AlgebraError(f"identity vector must have length {self.dim}")
        self.one = gflin._frozen(one)
        if labels is None:
            labels = [f"e{i}" for i in range(self.dim)]
        labels = [str(s) for s in labels]
        if len(labels) != self.dim:
            raise AlgebraError(f"expected {self.dim} labels, got {len(labels)}")
        self.labels = tuple(labels)
        # left[i] is the matrix of x -> e_i * x
        self._left = gflin._frozen(np.transpose(self.table, (0, 2, 1)))
        if check:
            self._check_axioms()

    def _check_axioms(self):
        t, p = self.table, self.p
        bad = np.argwhere(t != np.transpose(t, (1, 0, 2)))
        if bad.size:
            i, j, k = (int(x) for x in bad[0])
            raise AlgebraError(
                f"non-commutative table: e{i}*e{j} != e{j}*e{i} in coordinate {k} (triple {(i, j, k)})"
            )
        for i in range(self.dim):
            # (e_i e_j) e_k  versus  e_i (e_j e_k)
            lhs = np.einsum("jl,lkm->jkm", t[i], t) % p
            rhs = np.einsum("jkl,lm->jkm", t, t[i]) % p
            bad = np.argwhere(lhs != rhs)
            if bad.size:
                j, k, _ = (int(x) for x in bad[0])
                raise AlgebraError(
                    f"non-associative table: (e{i}*e{j})*e{k} != e{i}*(e{j}*e{k}) (triple {(i, j, k)})"
                )
        ident = np.einsum("i,ijk->jk", self.one, t) % p
        bad = np.argwhere(ident != np.eye(self.dim, dtype=np.int64))
        if bad.size:
            j = int(bad[0][0])
            raise AlgebraError(f"identity law fails: one*e{j} != e{j}")

    # -- elements -----------------------------------------------------------

    def element(self, coords) -> "Element":
        return Element(self, coords)

    @property
    def zero(self) -> "Element":
        return Element(self, np.zeros(self.dim, dtype=np.int64))

    @property
    def unit(self) -> "Element":
        return Element(self, self.one)

    def basis_element(self, i: int) -> "Element":
        v = np.zeros(self.dim, dtype=np.int64)
        v[i] = 1
        return Element(self, v)

    def gen(self, label: str) -> "Element":
        return self.basis_element(self.labels.index(label))

    @property
    def size(self) -> int:
        return self.p**self.dim

    def all_elements(self, bound: int | None = None) -> np.ndarray:
        """Every element as a row of coordinates, coordinate-lexicographic."""
        bound = max_elements() if bound is None else bound
        if self.size > bound:
            raise ResourceBoundExceeded(f"|R| = {self.p}^{self.dim} exceeds the enumeration bound {bound}")
        return gflin.all_vectors(self.p, self.dim)

    def format_vector(self, v) -> str:
        terms = []
        for c, label in zip(np.asarray(v).tolist(), self.labels):
            if c == 0:
                continue
            if label == "1":
                terms.append(str(c))
            else:
                terms.append(label if c == 1 else f"{c}*{label}")
        return " + ".join(terms) if terms else "0"

    # -- arithmetic on coordinate arrays -------------------------------------

    def mul_vectors(self, a, b) -> np.ndarray:
        """Row-wise products of two coordinate arrays, ``(dim,)`` or ``(N, dim)``."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        return np.einsum("...i,...j,ijk->...k", a, b, self.table, optimize=True) % self.p

    def mult_matrix_array(self, a) -> np.ndarray:
        return np.einsum("i,ikj->kj", np.asarray(a, dtype=np.int64), self._left) % self.p

    def mult_matrices(self, a) -> np.ndarray:
        """Stacked multiplication matrices for the rows of ``a``."""
        return np.einsum("ni,ikj->nkj", np.asarray(a, dtype=np.int64), self._left, optimize=True) % self.p

    # -- cached structure ----------------------------------------------------

    @cached_property
    def locality(self) -> "Locality":
        return _locality(self)

    @cached_property
    def frobenius_matrix(self) -> Matrix:
        """Matrix of the F_p-linear map x -> x^p."""
        cols = [power_vector(self, self.basis_element(j).coords, self.p) for j in range(self.dim)]
        return Matrix(self.p, np.array(cols).T)

    @cached_property
    def nilradical(self) -> "IdealSub":
        """Nilpotent elements: the kernel of x -> x^(p^k) with p^k >= dim."""
        f = self.frobenius_matrix
        fk = f
        reach = self.p
        while reach < self.dim:
            fk = fk @ f
            reach *= self.p
        return IdealSub(self, gflin.kernel(fk))

    @cached_property
    def maximal_powers(self) -> tuple["IdealSub", ...]:
        """(m^0, m^1, ..., m^n) with m^n = 0 the first zero power."""
        m = require_local(self).max_ideal
        powers = [unit_ideal(self), m]
        while powers[-1].dim > 0:
            powers.append(ideal_product(powers[-1], m))
        return tuple(powers)

    @cached_property
    def invariant_record(self) -> "RingInvariants":
        return _invariants(self)

    def __repr__(self):
        return f"FiniteAlgebra(p={self.p}, dim={self.dim}, labels={list(self.labels)})"

    def same_structure(self, other: "FiniteAlgebra") -> bool:
        return (
            self.p == other.p
            and self.dim == other.dim
            and np.array_equal(self.table, other.table)
            and np.array_equal(self.one, other.one)
        )


class Element:
    """An element of a :class:`FiniteAlgebra`, immutable."""

    __slots__ = ("algebra", "coords")

    def __init__(self, algebra: FiniteAlgebra, coords):
        coords = np.asarray(coords, dtype=np.int64) % algebra.p
        if coords.shape != (algebra.dim,):
            raise AlgebraError(f"element needs {algebra.dim} coordinates, got shape {coords.shape}")
        coords.setflags(write=False)
        object.__setattr__(self, "algebra", algebra)
        object.__setattr__(self, "coords", coords)

    def __setattr__(self, name, value):
        raise AttributeError("Element is immutable")

    def _coerce(self, other) -> "Element":
        if isinstance(other, Element):
            if other.algebra is not self.algebra:
                raise AlgebraError("elements belong to different algebras")
            return other
        if isinstance(other, (int, np.integer)):
            return Element(self.algebra, self.algebra.one * int(other))
        raise TypeError(f"cannot combine Element with {type(other).__name__}")

    def __add__(self, other):
        other = self._coerce(other)
        return Element(self.algebra, self.coords + other.coords)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        return Element(self.algebra, self.coords - other.coords)

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return Element(self.algebra, -self.coords)

    def __mul__(self, other):
        return mul(self, self._coerce(other))

    __rmul__ = __mul__

    def __pow__(self, n: int):
        return Element(self.algebra, power_vector(self.algebra, self.coords, n))

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return other.algebra is self.algebra and np.array_equal(self.coords, other.coords)

    def __hash__(self):
        return hash((id(self.algebra), self.coords.tobytes()))

    def __bool__(self):
        return bool(self.coords.any())

    def __str__(self):
        return self.algebra.format_vector(self.coords)

    def __repr__(self):
        return f"Element({self})"


def power_vector(alg: FiniteAlgebra, v, n: int) -> np.ndarray:
    result = alg.one.copy()
    base = np.asarray(v, dtype=np.int64)
    while n:
        if n & 1:
            result = alg.mult_matrix_array(base) @ result % alg.p
        base = alg.mult_matrix_array(base) @ base % alg.p
        n >>= 1
    return result


def mul(a: Element, b: Element) -> Element:
    if a.algebra is not b.algebra:
        raise AlgebraError("elements belong to different algebras")
    alg = a.algebra
    return Element(alg, alg.mult_matrix_array(a.coords) @ b.coords % alg.p)


def mult_matrix(a: Element) -> Matrix:
    """Matrix of the F_p-linear map ``x -> a*x``."""
    return Matrix(a.algebra.p, a.algebra.mult_matrix_array(a.coords))


def is_unit(a: Element) -> bool:
    return gflin.rank(mult_matrix(a)) == a.algebra.dim


@dataclass(frozen=True, eq=False)
class IdealSub:
    """An ideal, stored as its underlying subspace."""

    algebra: FiniteAlgebra
    space: Subspace

    def __post_init__(self):
        alg = self.algebra
        if self.space.ambient_dim != alg.dim or self.space.p != alg.p:
            raise AlgebraError("ideal subspace does not live in the algebra's coordinate space")
        if self.space.dim:
            prods = np.einsum("bi,ijk->bjk", self.space.basis, alg.table).reshape(-1, alg.dim) % alg.p
            if gflin.rank(Matrix(alg.p, np.concatenate([self.space.basis, prods]))) != self.space.dim:
                raise AlgebraError("subspace is not closed under multiplication")

    @property
    def dim(self) -> int:
        return self.space.dim

    @property
    def basis(self) -> np.ndarray:
        return self.space.basis

    def contains(self, a) -> bool:
        coords = a.coords if isinstance(a, Element) else a
        return self.space.contains(coords)

    def generators(self) -> list[Element]:
        return [Element(self.algebra, row) for row in self.space.basis]

    def key(self) -> bytes:
        return self.space.key()

    def __eq__(self, other):
        if not isinstance(other, IdealSub):
            return NotImplemented
        return self.algebra is other.algebra and self.space == other.space

    def __hash__(self):
        return hash(self.space)

    def __le__(self, other: "IdealSub") -> bool:
        return gflin.subspace_le(self.space, other.space)

    def __repr__(self):
        return f"IdealSub(dim={self.dim}, gens={[str(g) for g in self.generators()]})"


def unit_ideal(alg: FiniteAlgebra) -> IdealSub:
    return IdealSub(alg, Subspace.full(alg.p, alg.dim))


def zero_ideal(alg: FiniteAlgebra) -> IdealSub:
    return IdealSub(alg, Subspace.zero(alg.p, alg.dim))


def annihilator(a: Element) -> IdealSub:
    """``{x : a*x = 0}`` as the kernel of the multiplication matrix."""
    return IdealSub(a.algebra, gflin.kernel(mult_matrix(a)))


def _span_products(alg: FiniteAlgebra, left: np.ndarray, right: np.ndarray) -> Subspace:
    if len(left) == 0 or len(right) == 0:
        return Subspace.zero(alg.p, alg.dim)
    prods = np.einsum("ai,bj,ijk->abk", left, right, alg.table, optimize=True).reshape(-1, alg.dim)
    return Subspace.span(alg.p, alg.dim, prods % alg.p)


def ideal_generated(alg: FiniteAlgebra, gens) -> IdealSub:
    """Smallest ideal containing ``gens`` (span of all ``g * e_j``)."""
    rows = [g.coords if isinstance(g, Element) else np.asarray(g) for g in gens]
    if not rows:
        return zero_ideal(alg)
    return IdealSub(alg, _span_products(alg, np.array(rows), np.eye(alg.dim, dtype=np.int64)))


def ideal_product(i: IdealSub, j: IdealSub) -> IdealSub:
    if i.algebra is not j.algebra:
        raise AlgebraError("ideals of different algebras")
    return IdealSub(i.algebra, _span_products(i.algebra, i.basis, j.basis))


def ideal_power(i: IdealSub, n: int) -> IdealSub:
    if n < 0:
        raise ValueError("negative ideal power")
    result = unit_ideal(i.algebra)
    for _ in range(n):
        result = ideal_product(result, i)
    return result


# -- locality -----------------------------------------------------------------


@dataclass(frozen=True)
class Locality:
    is_local: bool
    max_ideal: IdealSub | None
    residue_degree: int | None
    idempotent: np.ndarray | None = None  # a nontrivial idempotent when not local


def idempotents_by_scan(alg: FiniteAlgebra, bound: int | None = None) -> np.ndarray:
    """All idempotents, by squaring every element (lexicographic order)."""
    elems = alg.all_elements(bound)
    found = []
    for start in range(0, len(elems), 1 << 15):
        chunk = elems[start : start + (1 << 15)]
        sq = alg.mul_vectors(chunk, chunk)
        found.append(chunk[(sq == chunk).all(axis=1)])
    return np.concatenate(found)


def idempotents_by_frobenius(alg: FiniteAlgebra) -> np.ndarray:
    """All idempotents, found inside the fixed space of x -> x^p.

    Idempotents satisfy e^p = e, and the fixed space is a copy of F_p^s where
    s is the number of local factors, so only p^s candidates are squared.
    """
    fixed = gflin.kernel(Matrix(alg.p, alg.frobenius_matrix.data - np.eye(alg.dim, dtype=np.int64)))
    cand = fixed.elements()
    sq = alg.mul_vectors(cand, cand)
    return cand[(sq == cand).all(axis=1)]


def local_factor_count(alg: FiniteAlgebra) -> int:
    """Number of local factors: dimension of the fixed space of Frobenius."""
    return gflin.kernel(Matrix(alg.p, alg.frobenius_matrix.data - np.eye(alg.dim, dtype=np.int64))).dim


def _locality(alg: FiniteAlgebra) -> Locality:
    if alg.size <= max_elements():
        idem = idempotents_by_scan(alg)
    else:
        idem = idempotents_by_frobenius(alg)
    nontrivial = [e for e in idem if e.any() and not np.array_equal(e, alg.one)]
    if nontrivial:
        return Locality(False, None, None, gflin._frozen(nontrivial[0]))
    m = _maximal_ideal(alg)
    return Locality(True, m, alg.dim - m.dim)


def _maximal_ideal(alg: FiniteAlgebra) -> IdealSub:
    p = alg.p
    vecs = []
    for i in range(alg.dim):
        e = alg.basis_element(i).coords
        shifted = [(e - c * alg.one) % p for c in range(p)]
        mats = alg.mult_matrices(np.array(shifted))
        _, ranks = gflin.batch_rref(mats, p)
        singular = np.nonzero(ranks < alg.dim)[0]
        if singular.size != 1:
            # residue field bigger than F_p: use the nilradical instead
            return alg.nilradical
        vecs.append(shifted[singular[0]])
    return IdealSub(alg, Subspace.span(p, alg.dim, vecs))


def require_local(alg: FiniteAlgebra) -> Locality:
    loc = alg.locality
    if not loc.is_local:
        raise NotLocalError("algebra is not local")
    return loc


def locality(alg: FiniteAlgebra) -> tuple[bool, IdealSub | None, int | None]:
    loc = alg.locality
    return loc.is_local, loc.max_ideal, loc.residue_degree


def socle(alg: FiniteAlgebra) -> IdealSub:
    """``(0 : m)``; the zero ideal for a field."""
    m = require_local(alg).max_ideal
    if m.dim == 0:
        return zero_ideal(alg)
    stacked = alg.mult_matrices(m.basis).reshape(-1, alg.dim)
    return IdealSub(alg, gflin.kernel(Matrix(alg.p, stacked)))


# -- invariants ---------------------------------------------------------------


@dataclass(frozen=True)
class RingInvariants:
    is_local: bool
    length: int
    dim: int
    residue_degree: int | None = None
    hilbert: tuple[int, ...] = ()
    embdim: int | None = None
    socle_dim: int | None = None
    is_gorenstein: bool | None = None
    nilpotency_index: int | None = None

    def to_json(self) -> dict:
        return {
            "is_local": self.is_local,
            "length": self.length,
            "dim_over_Fp": self.dim,
            "residue_degree": self.residue_degree,
            "hilbert": list(self.hilbert),
            "embdim": self.embdim,
            "socle_dim": self.socle_dim,
            "is_gorenstein": self.is_gorenstein,
            "nilpotency_index": self.nilpotency_index,
        }


def invariants(alg: FiniteAlgebra) -> RingInvariants:
    return alg.invariant_record


def _invariants(alg: FiniteAlgebra) -> RingInvariants:
    loc = alg.locality
    if not loc.is_local:
        length = sum(invariants(f).length for f in local_decomposition(alg))
        return RingInvariants(is_local=False, length=length, dim=alg.dim)
    d = loc.residue_degree
    powers = alg.maximal_powers
    hilbert = []
    for a, b in zip(powers, powers[1:]):
        diff = a.dim - b.dim
        if diff % d:
            raise StructuralImpossibility(f"dim(m^i/m^(i+1)) = {diff} not divisible by residue degree {d}")
        hilbert.append(diff // d)
    soc = socle(alg)
    if soc.dim % d:
        raise StructuralImpossibility("socle dimension not divisible by residue degree")
    socle_dim = soc.dim // d
    return RingInvariants(
        is_local=True,
        length=sum(hilbert),
        dim=alg.dim,
        residue_degree=d,
        hilbert=tuple(hilbert),
        embdim=hilbert[1] if len(hilbert) > 1 else 0,
        socle_dim=socle_dim,
        is_gorenstein=socle_dim == 1,
        nilpotency_index=len(powers) - 1,
    )


class Length5Case(str, enum.Enum):
    PIR_CHAIN = "PIR_CHAIN"
    H131 = "H131"
    H122 = "H122"
    H1211 = "H1211"


_LENGTH5_CASES = {
    (1, 1, 1, 1, 1): Length5Case.PIR_CHAIN,
    (1, 3, 1): Length5Case.H131,
    (1, 2, 2): Length5Case.H122,
    (1, 2, 1, 1): Length5Case.H1211,
}


def classify_length5(inv: RingInvariants) -> Length5Case:
    if not inv.is_local or inv.length != 5:
        raise ValueError("classify_length5 needs a local ring of length 5")
    try:
        return _LENGTH5_CASES[tuple(inv.hilbert)]
    except KeyError:
        raise StructuralImpossibility(f"impossible Hilbert function {inv.hilbert} for a length-5 local ring") from None


# -- constructions ------------------------------------------------------------


def product(r1: FiniteAlgebra, r2: FiniteAlgebra) -> FiniteAlgebra:
    """Direct product with block structure constants on the concatenated basis."""
    if r1.p != r2.p:
        raise AlgebraError(f"prime mismatch: {r1.p} vs {r2.p}")
    n1, n2 = r1.dim, r2.dim
    n = n1 + n2
    table = np.zeros((n, n, n), dtype=np.int64)
    table[:n1, :n1, :n1] = r1.table
    table[n1:, n1:, n1:] = r2.table
    labels = [f"({s},0)" for s in r1.labels] + [f"(0,{s})" for s in r2.labels]
    return FiniteAlgebra(r1.p, table, np.concatenate([r1.one, r2.one]), labels)


def subalgebra_on_ideal(alg: FiniteAlgebra, e) -> FiniteAlgebra:
    """The ring ``eR`` for an idempotent ``e``, with identity ``e``."""
    e = np.asarray(e, dtype=np.int64)
    space = Subspace.span(alg.p, alg.dim, alg.mult_matrix_array(e).T)
    basis = space.basis
    piv = list(space.pivots)
    prods = np.einsum("ai,bj,ijk->abk", basis, basis, alg.table, optimize=True) % alg.p
    table = prods[:, :, piv]
    one = space.coordinates(e)
    labels = [alg.format_vector(b) for b in basis]
    return FiniteAlgebra(alg.p, table, one, labels)


def local_decomposition(alg: FiniteAlgebra) -> list[FiniteAlgebra]:
    """Split along nontrivial idempotents until every factor is local."""
    loc = alg.locality
    if loc.is_local:
        return [alg]
    e = loc.idempotent
    f = (alg.one - e) % alg.p
    return local_decomposition(subalgebra_on_ideal(alg, e)) + local_decomposition(subalgebra_on_ideal(alg, f))


def trivial_extension(a: FiniteAlgebra) -> FiniteAlgebra:
    """``A ⋉ Hom(A, F_p)`` with ``(a, f)(a', f') = (aa', a.f' + a'.f)``.

    The dual basis vector of ``e_j`` is labelled ``D(label_j)``; the module
    action is ``(e_i . D_j)(e_k) = D_j(e_i e_k)``.
    """
    loc = require_local(a)
    if loc.residue_degree != 1:
        raise AlgebraError("trivial_extension needs residue degree 1")
    n = a.dim
    t = a.table
    table = np.zeros((2 * n, 2 * n, 2 * n), dtype=np.int64)
    table[:n, :n, :n] = t
    # e_i * D_j = sum_k t[i, k, j] D_k
    action = np.transpose(t, (0, 2, 1))
    table[:n, n:, n:] = action
    table[n:, :n, n:] = np.transpose(action, (1, 0, 2))
    one = np.concatenate([a.one, np.zeros(n, dtype=np.int64)])
    labels = list(a.labels) + [f"D({s})" for s in a.labels]
    return FiniteAlgebra(a.p, table, one, labels)
