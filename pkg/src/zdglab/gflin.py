"""Exact linear algebra over prime fields F_p.

Matrices are thin wrappers around ``numpy`` integer arrays whose entries
live in ``[0, p)``.  Subspaces are always stored as the nonzero rows of a
reduced row echelon form, so two subspaces are equal exactly when their
bases are equal, and :func:`canonical_key` is a plain byte string.

Everything here is immutable: arrays handed out are flagged read-only.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionMismatch

MAX_PRIME = 97


@lru_cache(maxsize=None)
def check_prime(p: int) -> int:
    """Return ``p`` if it is a prime in ``[2, 97]``, else raise ValueError."""
    if not isinstance(p, (int, np.integer)) or isinstance(p, bool):
        raise ValueError(f"prime must be an integer, got {p!r}")
    p = int(p)
    if p < 2 or p > MAX_PRIME:
        raise ValueError(f"prime must lie in [2, {MAX_PRIME}], got {p}")
    if any(p % d == 0 for d in range(2, int(p**0.5) + 1)):
        raise ValueError(f"{p} is not prime")
    return p


@lru_cache(maxsize=None)
def inverse_table(p: int) -> np.ndarray:
    """``table[a]`` is the inverse of ``a`` mod p (``table[0] = 0``)."""
    table = np.zeros(p, dtype=np.int64)
    for a in range(1, p):
        table[a] = pow(a, p - 2, p)
    table.setflags(write=False)
    return table


def inv_mod(a: int, p: int) -> int:
    a %= p
    if a == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {p}")
    return pow(a, p - 2, p)


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.int64)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Matrix:
    """A dense ``rows x cols`` matrix over F_p."""

    p: int
    data: np.ndarray

    def __post_init__(self):
        check_prime(self.p)
        arr = np.asarray(self.data, dtype=np.int64)
        if arr.ndim != 2:
            raise ValueError("matrix data must be two-dimensional")
        object.__setattr__(self, "data", _frozen(arr % self.p))

    @classmethod
    def from_rows(cls, p: int, rows, cols: int | None = None) -> "Matrix":
        rows = [list(r) for r in rows]
        if not rows:
            return cls(p, np.zeros((0, cols or 0), dtype=np.int64))
        if len({len(r) for r in rows}) != 1:
            raise ValueError("ragged rows")
        return cls(p, np.array(rows, dtype=np.int64))

    @classmethod
    def zeros(cls, p: int, rows: int, cols: int) -> "Matrix":
        return cls(p, np.zeros((rows, cols), dtype=np.int64))

    @classmethod
    def identity(cls, p: int, n: int) -> "Matrix":
        return cls(p, np.eye(n, dtype=np.int64))

    @property
    def rows(self) -> int:
        return self.data.shape[0]

    @property
    def cols(self) -> int:
        return self.data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.data.shape

    def tolist(self) -> list[list[int]]:
        return self.data.tolist()

    def transpose(self) -> "Matrix":
        return Matrix(self.p, self.data.T)

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if not isinstance(other, Matrix):
            return NotImplemented
        if other.p != self.p:
            raise DimensionMismatch("matrices over different primes")
        if self.cols != other.rows:
            raise DimensionMismatch(f"cannot multiply {self.shape} by {other.shape}")
        return Matrix(self.p, self.data @ other.data)

    def apply(self, v) -> np.ndarray:
        """Return ``self @ v`` for a coordinate vector ``v``."""
        v = np.asarray(v, dtype=np.int64)
        if v.shape != (self.cols,):
            raise DimensionMismatch(f"vector of length {v.shape} for {self.shape} matrix")
        return (self.data @ v) % self.p

    def __eq__(self, other):
        if not isinstance(other, Matrix):
            return NotImplemented
        return self.p == other.p and np.array_equal(self.data, other.data)

    def __hash__(self):
        return hash((self.p, self.data.shape, self.data.tobytes()))

    def __repr__(self):
        return f"Matrix(p={self.p}, {self.tolist()})"

    def to_json(self) -> dict:
        return {"p": self.p, "rows": self.rows, "cols": self.cols, "entries": self.tolist()}

    @classmethod
    def from_json(cls, obj: dict) -> "Matrix":
        m = cls.from_rows(obj["p"], obj["entries"], cols=obj["cols"])
        if m.shape != (obj["rows"], obj["cols"]):
            raise ValueError("matrix JSON shape does not match its entries")
        return m


def rref_array(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Row-reduce a 2-d array mod p.  Returns ``(rref, pivot_columns)``."""
    a = np.array(a, dtype=np.int64) % p
    rows, cols = a.shape
    inv = inverse_table(p)
    pivots: list[int] = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(a[r:, c])[0]
        if nz.size == 0:
            continue
        k = r + nz[0]
        if k != r:
            a[[r, k]] = a[[k, r]]
        a[r] = (a[r] * inv[a[r, c]]) % p
        col = a[:, c].copy()
        col[r] = 0
        nzr = np.nonzero(col)[0]
        if nzr.size:
            a[nzr] = (a[nzr] - np.outer(col[nzr], a[r])) % p
        pivots.append(c)
        r += 1
    return a, pivots


def rref(m: Matrix) -> tuple[Matrix, int]:
    """Reduced row echelon form of ``m`` and its rank."""
    red, pivots = rref_array(m.data, m.p)
    return Matrix(m.p, red), len(pivots)


def rank(m: Matrix) -> int:
    return len(rref_array(m.data, m.p)[1])


def batch_rref(a: np.ndarray, p: int) -> tuple[np.ndarray, np.ndarray]:
    """Row-reduce a stack of matrices ``a[N, rows, cols]`` simultaneously.

    Returns the stack of reduced row echelon forms and the rank of each.
    Equivalent to calling :func:`rref_array` on every slice.
    """
    a = np.array(a, dtype=np.int64) % p
    n, rows, cols = a.shape
    inv = inverse_table(p)
    ranks = np.zeros(n, dtype=np.int64)
    row_idx = np.arange(rows)
    for c in range(cols):
        cand = (a[:, :, c] != 0) & (row_idx[None, :] >= ranks[:, None])
        has = cand.any(axis=1)
        if not has.any():
            continue
        b = np.nonzero(has)[0]
        piv = cand[b].argmax(axis=1)
        r = ranks[b]
        prow = a[b, piv].copy()
        a[b, piv] = a[b, r]
        prow = (prow * inv[prow[:, c]][:, None]) % p
        a[b, r] = prow
        factors = a[b, :, c].copy()
        factors[np.arange(b.size), r] = 0
        a[b] = (a[b] - factors[:, :, None] * prow[:, None, :]) % p
        ranks[b] += 1
        if (ranks == rows).all():
            break
    return a, ranks


def inverse(m: Matrix) -> Matrix:
    """Inverse of a square matrix; raises ValueError when singular."""
    if m.rows != m.cols:
        raise DimensionMismatch("inverse of a non-square matrix")
    n = m.rows
    aug = np.concatenate([m.data, np.eye(n, dtype=np.int64)], axis=1)
    red, pivots = rref_array(aug, m.p)
    if pivots[:n] != list(range(n)) or len(pivots) < n:
        raise ValueError("matrix is singular")
    return Matrix(m.p, red[:, n:])


def determinant(m: Matrix) -> int:
    if m.rows != m.cols:
        raise DimensionMismatch("determinant of a non-square matrix")
    p = m.p
    a = m.data.copy()
    n = m.rows
    det = 1
    for c in range(n):
        nz = np.nonzero(a[c:, c])[0]
        if nz.size == 0:
            return 0
        k = c + nz[0]
        if k != c:
            a[[c, k]] = a[[k, c]]
            det = -det
        det = det * int(a[c, c]) % p
        inv = inv_mod(int(a[c, c]), p)
        for r in range(c + 1, n):
            if a[r, c]:
                a[r] = (a[r] - a[r, c] * inv * a[c]) % p
    return det % p


@dataclass(frozen=True, eq=False)
class Subspace:
    """A subspace of F_p^n, stored as an RREF basis (one vector per row)."""

    p: int
    ambient_dim: int
    basis: np.ndarray
    pivots: tuple[int, ...]

    @classmethod
    def span(cls, p: int, ambient_dim: int, vectors) -> "Subspace":
        vecs = np.asarray(vectors, dtype=np.int64).reshape(-1, ambient_dim)
        red, pivots = rref_array(vecs, p)
        return cls(p, ambient_dim, _frozen(red[: len(pivots)]), tuple(pivots))

    @classmethod
    def zero(cls, p: int, ambient_dim: int) -> "Subspace":
        return cls(p, ambient_dim, _frozen(np.zeros((0, ambient_dim))), ())

    @classmethod
    def full(cls, p: int, ambient_dim: int) -> "Subspace":
        return cls(p, ambient_dim, _frozen(np.eye(ambient_dim)), tuple(range(ambient_dim)))

    @property
    def dim(self) -> int:
        return len(self.pivots)

    @property
    def basis_matrix(self) -> Matrix:
        return Matrix(self.p, self.basis.reshape(self.dim, self.ambient_dim))

    def key(self) -> bytes:
        return canonical_key(self)

    def contains(self, v) -> bool:
        return subspace_contains(self, v)

    def coordinates(self, v) -> np.ndarray:
        """Coordinates of ``v`` in this basis (``v`` must lie in the span)."""
        v = np.asarray(v, dtype=np.int64) % self.p
        coords = v[list(self.pivots)]
        if not np.array_equal((coords @ self.basis) % self.p, v):
            raise ValueError("vector is not in the subspace")
        return coords

    def elements(self) -> np.ndarray:
        """All ``p**dim`` vectors, lexicographic in the coordinates."""
        coeffs = all_vectors(self.p, self.dim)
        return (coeffs @ self.basis) % self.p

    def complement(self) -> "Subspace":
        """The dot-product orthogonal complement ``{x : b.x = 0 for all b}``."""
        return kernel_array(self.basis.reshape(self.dim, self.ambient_dim), self.p, self.ambient_dim)

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return canonical_key(self) == canonical_key(other)

    def __hash__(self):
        return hash(canonical_key(self))

    def __repr__(self):
        return f"Subspace(p={self.p}, n={self.ambient_dim}, basis={self.basis.tolist()})"


def kernel_array(a: np.ndarray, p: int, cols: int | None = None) -> Subspace:
    a = np.asarray(a, dtype=np.int64)
    if cols is None:
        cols = a.shape[1]
    a = a.reshape(-1, cols)
    red, pivots = rref_array(a, p)
    free = [c for c in range(cols) if c not in pivots]
    basis = np.zeros((len(free), cols), dtype=np.int64)
    for i, f in enumerate(free):
        basis[i, f] = 1
        for r, pc in enumerate(pivots):
            basis[i, pc] = (-red[r, f]) % p
    return Subspace.span(p, cols, basis)


def kernel(m: Matrix) -> Subspace:
    """Null space ``{x : m x = 0}`` of ``m``."""
    return kernel_array(m.data, m.p, m.cols)


def _check_pair(a: Subspace, b: Subspace):
    if a.p != b.p:
        raise DimensionMismatch("subspaces over different primes")
    if a.ambient_dim != b.ambient_dim:
        raise DimensionMismatch(f"ambient dimensions differ: {a.ambient_dim} vs {b.ambient_dim}")


def subspace_sum(a: Subspace, b: Subspace) -> Subspace:
    _check_pair(a, b)
    return Subspace.span(a.p, a.ambient_dim, np.concatenate([a.basis, b.basis]))


def subspace_intersect(a: Subspace, b: Subspace) -> Subspace:
    _check_pair(a, b)
    # (A^perp + B^perp)^perp
    perp = np.concatenate([a.complement().basis, b.complement().basis])
    return kernel_array(perp, a.p, a.ambient_dim)


def subspace_contains(a: Subspace, v) -> bool:
    v = np.asarray(v, dtype=np.int64) % a.p
    if v.shape != (a.ambient_dim,):
        raise DimensionMismatch(f"vector of length {v.shape[0]} in F_p^{a.ambient_dim}")
    if a.dim == 0:
        return not v.any()
    residual = (v - v[list(a.pivots)] @ a.basis) % a.p
    return not residual.any()


def subspace_le(a: Subspace, b: Subspace) -> bool:
    """True when ``a`` is contained in ``b``."""
    _check_pair(a, b)
    return all(subspace_contains(b, row) for row in a.basis)


def canonical_key(a: Subspace) -> bytes:
    header = bytes([a.p, a.ambient_dim & 0xFF, a.ambient_dim >> 8, a.dim & 0xFF, a.dim >> 8])
    return header + a.basis.astype(np.uint8).tobytes()


def all_vectors(p: int, n: int) -> np.ndarray:
    """Every vector of F_p^n as rows, lexicographic with coordinate 0 most significant."""
    if n == 0:
        return np.zeros((1, 0), dtype=np.int64)
    idx = np.arange(p**n, dtype=np.int64)
    powers = p ** np.arange(n - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // powers[None, :]) % p


def projective_points(p: int, n: int) -> np.ndarray:
    """One representative per line of F_p^n, scaled so the first nonzero entry is 1."""
    pts = [v for v in itertools.product(range(p), repeat=n) if any(v) and v[next(i for i, x in enumerate(v) if x)] == 1]
    return np.array(pts, dtype=np.int64).reshape(-1, n)


def normalize_vector(v, p: int) -> np.ndarray:
    """Scale a nonzero vector so that its first nonzero entry is 1."""
    v = np.asarray(v, dtype=np.int64) % p
    nz = np.nonzero(v)[0]
    if nz.size == 0:
        return v
    return (v * inv_mod(int(v[nz[0]]), p)) % p
