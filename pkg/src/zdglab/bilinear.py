"""Symmetric bilinear spaces over F_p and the form on m/m^2.

When a local ring has ``m^2 = (l) != 0`` and ``m^3 = 0``, every product of
two elements of ``m`` is a scalar multiple ``u*l`` and ``(a, b) -> u``
is a symmetric bilinear form on ``m/m^2`` whose orthogonality is exactly
``ab = 0``.  :func:`build_phi` constructs it and :func:`socle_radical_check`
checks the resulting socle/radical/Gorenstein correspondences on the ring.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import gflin
from .algebra import Element, FiniteAlgebra, IdealSub, socle
from .errors import BudgetExceeded, DimensionMismatch, PhiPreconditionError, StructuralImpossibility, UnsupportedCharacteristic
from .gflin import Matrix, Subspace

DEFAULT_BUDGET = 10**9
EXHAUSTIVE_RING_SIZE = 3**6
SAMPLE_CAP = 2048


@dataclass(frozen=True, eq=False)
class BilinearSpace:
    p: int
    gram: Matrix

    def __post_init__(self):
        if self.gram.p != self.p:
            raise DimensionMismatch("Gram matrix lives over a different prime")
        if self.gram.rows != self.gram.cols:
            raise DimensionMismatch("Gram matrix must be square")
        if not np.array_equal(self.gram.data, self.gram.data.T):
            raise ValueError("Gram matrix is not symmetric")

    @classmethod
    def from_rows(cls, p: int, rows) -> "BilinearSpace":
        rows = [list(r) for r in rows]
        return cls(p, Matrix.from_rows(p, rows, cols=len(rows)))

    @classmethod
    def diagonal(cls, p: int, entries) -> "BilinearSpace":
        return cls(p, Matrix(p, np.diag(np.asarray(entries, dtype=np.int64))))

    @property
    def dim(self) -> int:
        return self.gram.rows

    def restrict(self, basis) -> "BilinearSpace":
        """The form on the span of ``basis`` (rows), in that basis."""
        b = np.asarray(basis, dtype=np.int64).reshape(-1, self.dim)
        return BilinearSpace(self.p, Matrix(self.p, b @ self.gram.data @ b.T))

    def to_json(self) -> dict:
        return self.gram.to_json()


def eval_form(space: BilinearSpace, u, v) -> int:
    """``u^T G v`` mod p."""
    u = np.asarray(u, dtype=np.int64)
    v = np.asarray(v, dtype=np.int64)
    if u.shape != (space.dim,) or v.shape != (space.dim,):
        raise DimensionMismatch(f"vectors must have length {space.dim}")
    return int(u @ space.gram.data @ v % space.p)


def radical(space: BilinearSpace) -> Subspace:
    return gflin.kernel(space.gram)


def is_nondegenerate(space: BilinearSpace) -> bool:
    return gflin.rank(space.gram) == space.dim


def orthogonal_basis(space: BilinearSpace) -> list[np.ndarray]:
    """A basis with pairwise-orthogonal vectors; needs odd characteristic."""
    if space.p == 2:
        raise UnsupportedCharacteristic("orthogonal bases need characteristic != 2")
    p = space.p
    g = space.gram.data
    out: list[np.ndarray] = []
    basis = np.eye(space.dim, dtype=np.int64)
    while len(basis):
        local = basis @ g @ basis.T % p
        if not (local - np.diag(np.diag(local))).any():
            out.extend(basis)
            break
        diag = np.nonzero(np.diag(local))[0]
        if diag.size:
            v = basis[diag[0]]
        else:
            i, j = (int(x) for x in np.argwhere(local)[0])
            # phi(b_i + b_j, b_i + b_j) = 2 phi(b_i, b_j) != 0 in odd characteristic
            v = (basis[i] + basis[j]) % p
        out.append(v)
        # orthogonal complement of v inside span(basis)
        row = (basis @ g @ v % p).reshape(1, -1)
        coeffs = gflin.kernel_array(row, p, len(basis)).basis
        basis = coeffs @ basis % p
    return [np.asarray(v) % p for v in out]


@dataclass(frozen=True)
class RadicalSplit:
    radical: Subspace
    complement: BilinearSpace
    complement_basis: np.ndarray


def split_radical(space: BilinearSpace) -> RadicalSplit:
    """``V = rad V (+) W`` with the form on ``W`` nondegenerate.

    ``W`` is spanned by the standard basis vectors that extend a basis of
    the radical, taken in index order.
    """
    rad = radical(space)
    chosen: list[np.ndarray] = []
    current = rad
    for i in range(space.dim):
        e = np.zeros(space.dim, dtype=np.int64)
        e[i] = 1
        if not current.contains(e):
            chosen.append(e)
            current = gflin.subspace_sum(current, Subspace.span(space.p, space.dim, [e]))
    basis = np.array(chosen, dtype=np.int64).reshape(-1, space.dim)
    return RadicalSplit(rad, space.restrict(basis), basis)


def isotropic_family(space: BilinearSpace, v, m: int) -> list[np.ndarray]:
    """``{a_1 v, ..., a_m v}`` for distinct nonzero scalars; pairwise orthogonal."""
    v = np.asarray(v, dtype=np.int64) % space.p
    if not v.any():
        raise ValueError("isotropic_family needs a nonzero vector")
    if eval_form(space, v, v) != 0:
        raise ValueError("vector is not isotropic")
    if not 1 <= m <= space.p - 1:
        raise ValueError(f"need 1 <= m <= p - 1 = {space.p - 1}, got {m}")
    return [(a * v) % space.p for a in range(1, m + 1)]


def search_orthogonal_sets(
    space: BilinearSpace,
    size: int,
    pairwise_nonparallel: bool = True,
    budget: int = DEFAULT_BUDGET,
    limit: int | None = None,
) -> list[list[np.ndarray]]:
    """Enumerate sets of ``size`` distinct nonzero pairwise-orthogonal vectors.

    Vectors are taken up to scaling: each line is represented by its
    pivot-1 vector.  With ``pairwise_nonparallel=False`` a line may occur
    several times (as ``v, 2v, ...``) but only when it is isotropic, since
    ``v`` and ``a*v`` are orthogonal exactly then.  Witnesses come out in
    lexicographic order of their line indices.  ``budget`` bounds the
    number of orthogonality checks; :class:`BudgetExceeded` is raised past it.
    """
    p = space.p
    pts = gflin.projective_points(p, space.dim)
    n = len(pts)
    ortho = (pts @ space.gram.data @ pts.T % p) == 0
    isotropic = np.diag(ortho).copy()
    masks = [0] * n
    for i in range(n):
        for j in np.nonzero(ortho[i])[0]:
            if j != i:
                masks[i] |= 1 << int(j)
    checks = 0
    found: list[list[np.ndarray]] = []

    def charge(k):
        nonlocal checks
        checks += k
        if checks > budget:
            raise BudgetExceeded(f"orthogonal-set search exceeded {budget} candidate checks")

    def emit(chosen):
        vecs = []
        for idx, mult in chosen:
            vecs.extend((a * pts[idx]) % p for a in range(1, mult + 1))
        found.append(vecs)

    def grow(chosen, remaining, cand):
        if limit is not None and len(found) >= limit:
            return
        if remaining == 0:
            emit(chosen)
            return
        while cand:
            low = cand & -cand
            v = low.bit_length() - 1
            cand ^= low
            max_mult = 1 if pairwise_nonparallel or not isotropic[v] else min(p - 1, remaining)
            charge(bin(cand).count("1") + 1)
            nxt = cand & masks[v]
            for mult in range(1, max_mult + 1):
                grow(chosen + [(v, mult)], remaining - mult, nxt)
                if limit is not None and len(found) >= limit:
                    return

    if size <= 0:
        return [[]]
    grow([], size, (1 << n) - 1)
    return found


def symmetric_grams(p: int, dim: int):
    """Every symmetric ``dim x dim`` Gram matrix over F_p."""
    iu = np.triu_indices(dim)
    for entries in itertools.product(range(p), repeat=len(iu[0])):
        g = np.zeros((dim, dim), dtype=np.int64)
        g[iu] = entries
        g = g + np.triu(g, 1).T
        yield g


def nondegenerate_grams(p: int, dim: int):
    for g in symmetric_grams(p, dim):
        if gflin.determinant(Matrix(p, g)) != 0:
            yield BilinearSpace(p, Matrix(p, g))


def smallest_nonsquare(p: int) -> int:
    squares = {x * x % p for x in range(1, p)}
    return next(a for a in range(2, p) if a not in squares)


def congruence_representatives(p: int, dim: int) -> list[BilinearSpace]:
    """One Gram per congruence class of nondegenerate symmetric forms.

    Odd p: two classes, distinguished by whether the determinant is a
    square.  p = 2: the identity, plus the hyperbolic (alternating) form
    in even dimension.
    """
    if dim == 0:
        return [BilinearSpace(p, Matrix.zeros(p, 0, 0))]
    if p == 2:
        reps = [BilinearSpace.diagonal(2, [1] * dim)]
        if dim % 2 == 0:
            g = np.zeros((dim, dim), dtype=np.int64)
            for k in range(0, dim, 2):
                g[k, k + 1] = g[k + 1, k] = 1
            reps.append(BilinearSpace(2, Matrix(2, g)))
        return reps
    return [
        BilinearSpace.diagonal(p, [1] * dim),
        BilinearSpace.diagonal(p, [1] * (dim - 1) + [smallest_nonsquare(p)]),
    ]


# -- the form on m/m^2 --------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PhiConstruction:
    """The symmetric form on ``m/m^2`` of a local ring with ``m^2 = (l)``, ``m^3 = 0``."""

    space: BilinearSpace
    ring: FiniteAlgebra
    l: Element
    coset_basis: tuple[Element, ...]
    maximal_ideal: IdealSub
    # right inverse of the basis (coset_basis, l): coords = a @ lift
    lift: np.ndarray = field(repr=False)

    def project(self, a) -> np.ndarray:
        """Coordinates of the image of ``a`` (an element of m) in m/m^2."""
        coords = a.coords if isinstance(a, Element) else np.asarray(a, dtype=np.int64)
        return coords @ self.lift[:, :-1] % self.ring.p

    def project_many(self, rows) -> np.ndarray:
        return np.asarray(rows, dtype=np.int64) @ self.lift[:, :-1] % self.ring.p


def build_phi(ring: FiniteAlgebra, check: bool = True) -> PhiConstruction:
    """Construct the form on ``m/m^2``.

    Raises :class:`PhiPreconditionError` with code NOT_LOCAL, RESIDUE_DEG,
    M3_NONZERO or M2_NOT_PRINCIPAL.  With ``check`` the orthogonality
    equivalence is verified on the ring before returning.
    """
    loc = ring.locality
    if not loc.is_local:
        raise PhiPreconditionError("NOT_LOCAL", "ring is not local")
    if loc.residue_degree != 1:
        raise PhiPreconditionError("RESIDUE_DEG", f"residue degree {loc.residue_degree} > 1")
    powers = ring.maximal_powers
    m = powers[1]
    m2 = powers[2] if len(powers) > 2 else powers[-1]
    m3 = powers[3] if len(powers) > 3 else powers[-1]
    if m3.dim != 0:
        raise PhiPreconditionError("M3_NONZERO", "m^3 != 0")
    if m2.dim != 1:
        what = "m^2 = 0" if m2.dim == 0 else f"dim m^2 = {m2.dim}"
        raise PhiPreconditionError("M2_NOT_PRINCIPAL", f"m^2 is not a nonzero principal ideal ({what})")
    p = ring.p
    l_vec = m2.basis[0]
    l_pivot = m2.space.pivots[0]
    chosen: list[np.ndarray] = []
    span = m2.space
    for row in m.basis:
        if not span.contains(row):
            chosen.append(row)
            span = gflin.subspace_sum(span, Subspace.span(p, ring.dim, [row]))
    full = np.array(chosen + [l_vec], dtype=np.int64)
    _, pivots = gflin.rref_array(full, p)
    lift = np.zeros((ring.dim, len(full)), dtype=np.int64)
    lift[pivots] = gflin.inverse(Matrix(p, full[:, pivots])).data
    cos = np.array(chosen, dtype=np.int64).reshape(-1, ring.dim)
    prods = np.einsum("ai,bj,ijk->abk", cos, cos, ring.table, optimize=True) % p
    gram = prods[:, :, l_pivot]
    if not np.array_equal(prods, gram[:, :, None] * l_vec[None, None, :] % p):
        raise StructuralImpossibility("product of coset representatives outside (l)")
    phi = PhiConstruction(
        space=BilinearSpace(p, Matrix(p, gram)),
        ring=ring,
        l=Element(ring, l_vec),
        coset_basis=tuple(Element(ring, c) for c in cos),
        maximal_ideal=m,
        lift=gflin._frozen(lift),
    )
    if check:
        bad = orthogonality_counterexample(phi)
        if bad is not None:
            raise StructuralImpossibility(f"phi(a,b) = 0 <=> ab = 0 fails at {bad}")
    return phi


def maximal_ideal_sample(phi: PhiConstruction, cap: int = SAMPLE_CAP) -> tuple[np.ndarray, bool]:
    """Elements of m: all of them when small, else an evenly strided subset.

    Returns ``(rows, exhaustive)``.
    """
    m = phi.maximal_ideal
    count = phi.ring.p**m.dim
    if phi.ring.size <= EXHAUSTIVE_RING_SIZE or count <= cap:
        return m.space.elements(), True
    idx = np.linspace(0, count - 1, cap).astype(np.int64)
    idx = np.unique(idx)
    coeffs = (idx[:, None] // (phi.ring.p ** np.arange(m.dim - 1, -1, -1))[None, :]) % phi.ring.p
    return coeffs @ m.basis % phi.ring.p, False


def orthogonality_counterexample(phi: PhiConstruction):
    """First pair ``(a, b)`` of m with ``phi(a, b) = 0`` disagreeing with ``ab = 0``, or None."""
    ring = phi.ring
    elems, _ = maximal_ideal_sample(phi)
    proj = phi.project_many(elems)
    form = proj @ phi.space.gram.data @ proj.T % ring.p
    step = max(1, 4_000_000 // max(1, len(elems) * ring.dim))
    for start in range(0, len(elems), step):
        block = elems[start : start + step]
        prods = np.einsum("ai,bj,ijk->abk", block, elems, ring.table, optimize=True) % ring.p
        zero = ~prods.any(axis=2)
        bad = np.argwhere(zero != (form[start : start + step] == 0))
        if bad.size:
            i, j = bad[0]
            return ring.format_vector(block[i]), ring.format_vector(elems[j])
    return None


@dataclass
class ClauseResult:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class PhiReport:
    radical_dim: int
    socle_dim: int
    nondegenerate: bool
    gorenstein: bool
    exhaustive: bool
    clauses: list[ClauseResult]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.clauses)


def socle_radical_check(phi: PhiConstruction) -> PhiReport:
    """Check socle membership, the dimension formula and the Gorenstein criterion on the ring."""
    ring = phi.ring
    rad = radical(phi.space)
    soc = socle(ring)
    elems, exhaustive = maximal_ideal_sample(phi)
    proj = phi.project_many(elems)
    clauses = []

    orth = orthogonality_counterexample(phi)
    clauses.append(
        ClauseResult("orthogonality", orth is None, "" if orth is None else f"counterexample a={orth[0]}, b={orth[1]}")
    )

    mismatch = None
    for row, pr in zip(elems, proj):
        if soc.contains(row) != rad.contains(pr):
            mismatch = ring.format_vector(row)
            break
    clauses.append(
        ClauseResult("socle_iff_radical", mismatch is None, "" if mismatch is None else f"counterexample a={mismatch}")
    )

    socle_dim = soc.dim  # residue degree is 1 here
    ok = socle_dim == rad.dim + 1
    clauses.append(ClauseResult("socle_dim_formula", ok, f"socle_dim={socle_dim}, radical_dim={rad.dim}"))

    nondeg = is_nondegenerate(phi.space)
    gor = socle_dim == 1
    clauses.append(ClauseResult("gorenstein_iff_nondegenerate", gor == nondeg, f"gorenstein={gor}, nondegenerate={nondeg}"))
    return PhiReport(rad.dim, socle_dim, nondeg, gor, exhaustive, clauses)


def orthogonality_relation(phi: PhiConstruction) -> np.ndarray:
    """Boolean matrix over the lines of m/m^2: True where the lines are orthogonal."""
    pts = gflin.projective_points(phi.ring.p, phi.space.dim)
    return (pts @ phi.space.gram.data @ pts.T % phi.ring.p) == 0
