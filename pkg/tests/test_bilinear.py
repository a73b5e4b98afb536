import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zdglab import gflin
from zdglab.algebra import invariants, socle
from zdglab.bilinear import (
    BilinearSpace,
    build_phi,
    congruence_representatives,
    eval_form,
    is_nondegenerate,
    isotropic_family,
    nondegenerate_grams,
    orthogonal_basis,
    orthogonality_relation,
    radical,
    search_orthogonal_sets,
    smallest_nonsquare,
    socle_radical_check,
    split_radical,
    symmetric_grams,
)
from zdglab.catalog import corpus_specs, generate
from zdglab.errors import BudgetExceeded, DimensionMismatch, PhiPreconditionError, UnsupportedCharacteristic
from zdglab.gflin import Matrix
from zdglab.presentation import compile_presentation as C

GOR3 = "GF(3)[x,y,z]/(x*y,x*z,y*z,x^2-y^2,x^2-z^2)"
SOC2_3 = "GF(3)[x,y,z]/(x^2,x*y,x*z,y*z,y^2-z^2)"
SOC3_2 = "GF(2)[x,y,z]/(x^2,x*y,x*z,y^2,y*z,z^3)"


@st.composite
def spaces(draw, primes=(2, 3, 5), max_dim=4):
    p = draw(st.sampled_from(primes))
    n = draw(st.integers(1, max_dim))
    g = np.zeros((n, n), dtype=np.int64)
    for i in range(n):
        for j in range(i, n):
            g[i, j] = g[j, i] = draw(st.integers(0, p - 1))
    return BilinearSpace(p, Matrix(p, g))


def brute_orthogonal_sets(space, size, nonparallel):
    """Sets of distinct nonzero vectors, pairwise orthogonal, scanned over all vector subsets."""
    vecs = [v for v in gflin.all_vectors(space.p, space.dim) if v.any()]
    found = set()
    for combo in itertools.combinations(range(len(vecs)), size):
        chosen = [vecs[i] for i in combo]
        if any(eval_form(space, a, b) for a, b in itertools.combinations(chosen, 2)):
            continue
        lines = [gflin.normalize_vector(v, space.p).tobytes() for v in chosen]
        if nonparallel and len(set(lines)) < size:
            continue
        # canonical: the multiset of lines with multiplicities
        found.add(tuple(sorted(lines)))
    return found


def test_gram_must_be_symmetric_and_square():
    with pytest.raises(ValueError):
        BilinearSpace.from_rows(3, [[1, 1], [0, 1]])
    with pytest.raises(DimensionMismatch):
        BilinearSpace(3, Matrix(3, np.zeros((2, 3), dtype=np.int64)))


def test_eval_examples():
    ident = BilinearSpace.diagonal(3, [1, 1, 1])
    assert eval_form(ident, [1, 0, 0], [0, 1, 0]) == 0
    assert eval_form(ident, [1, 0, 0], [1, 0, 0]) == 1
    iso = BilinearSpace.diagonal(5, [1, 1, 4])
    assert eval_form(iso, [1, 2, 0], [1, 2, 0]) == 0
    with pytest.raises(DimensionMismatch):
        eval_form(ident, [1, 0], [1, 0, 0])


@given(spaces(), st.data())
def test_eval_symmetric_and_bilinear(space, data):
    p, n = space.p, space.dim
    vec = st.lists(st.integers(0, p - 1), min_size=n, max_size=n)
    u, v, w = (np.array(data.draw(vec)) for _ in range(3))
    a = data.draw(st.integers(0, p - 1))
    assert eval_form(space, u, v) == eval_form(space, v, u)
    assert eval_form(space, (a * u + w) % p, v) == (a * eval_form(space, u, v) + eval_form(space, w, v)) % p


def test_radical_examples():
    assert radical(BilinearSpace.diagonal(3, [1, 1, 1])).dim == 0
    assert radical(BilinearSpace.diagonal(3, [0, 0, 0])).dim == 3
    rad = radical(BilinearSpace.diagonal(3, [1, 1, 0]))
    assert rad == gflin.Subspace.span(3, 3, [[0, 0, 1]])
    assert is_nondegenerate(BilinearSpace.diagonal(3, [1, 1, 1]))
    assert not is_nondegenerate(BilinearSpace.diagonal(3, [0, 0, 0]))
    assert not is_nondegenerate(BilinearSpace.diagonal(3, [1, 1, 0]))


@given(spaces())
def test_nondegenerate_iff_trivial_radical(space):
    assert is_nondegenerate(space) == (radical(space).dim == 0)


def test_orthogonal_basis_examples():
    d = BilinearSpace.diagonal(5, [1, 2, 3])
    assert [v.tolist() for v in orthogonal_basis(d)] == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    hyp = BilinearSpace.from_rows(3, [[0, 1], [1, 0]])
    basis = orthogonal_basis(hyp)
    g = hyp.restrict(basis).gram.data
    assert not (g - np.diag(np.diag(g))).any() and np.count_nonzero(np.diag(g)) == 2
    zero = BilinearSpace.diagonal(3, [0, 0])
    assert len(orthogonal_basis(zero)) == 2
    with pytest.raises(UnsupportedCharacteristic):
        orthogonal_basis(BilinearSpace.diagonal(2, [1, 1]))


@given(spaces(primes=(3, 5, 7)))
def test_orthogonal_basis_diagonalizes(space):
    basis = orthogonal_basis(space)
    assert gflin.rank(Matrix(space.p, np.array(basis))) == space.dim
    g = space.restrict(basis).gram.data
    assert not (g - np.diag(np.diag(g))).any()
    assert int(np.sum(np.diag(g) == 0)) == radical(space).dim


def test_split_radical_examples():
    nd = BilinearSpace.diagonal(3, [1, 2])
    s = split_radical(nd)
    assert s.radical.dim == 0 and s.complement.dim == 2
    s = split_radical(BilinearSpace.diagonal(2, [1, 0]))
    assert s.radical == gflin.Subspace.span(2, 2, [[0, 1]])
    assert s.complement.gram.tolist() == [[1]]
    s = split_radical(BilinearSpace.diagonal(3, [0, 0, 0]))
    assert s.radical.dim == 3 and s.complement.dim == 0


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("dim", [1, 2, 3, 4])
def test_split_radical_exhaustive(p, dim):
    if p == 3 and dim == 4:
        grams = itertools.islice(symmetric_grams(p, dim), 0, None, 7)
    else:
        grams = symmetric_grams(p, dim)
    for g in grams:
        space = BilinearSpace(p, Matrix(p, g))
        s = split_radical(space)
        assert is_nondegenerate(s.complement)
        assert s.radical.dim + s.complement.dim == dim


def test_isotropic_family_examples():
    space = BilinearSpace.diagonal(5, [1, 1, 4])
    fam = isotropic_family(space, [1, 2, 0], 4)
    assert len(fam) == 4 and all(v.any() for v in fam)
    assert all(eval_form(space, a, b) == 0 for a, b in itertools.combinations(fam, 2))
    assert [v.tolist() for v in isotropic_family(space, [1, 2, 0], 1)] == [[1, 2, 0]]
    with pytest.raises(ValueError):
        isotropic_family(space, [1, 0, 0], 2)
    with pytest.raises(ValueError):
        isotropic_family(space, [1, 2, 0], 5)


def test_search_examples():
    assert search_orthogonal_sets(BilinearSpace.diagonal(3, [1, 1, 1]), 4, True) == []
    iso = BilinearSpace.diagonal(5, [1, 1, 4])
    assert search_orthogonal_sets(iso, 4, pairwise_nonparallel=False)
    assert search_orthogonal_sets(BilinearSpace.diagonal(3, [1]), 2, True) == []


def test_search_budget():
    with pytest.raises(BudgetExceeded):
        search_orthogonal_sets(BilinearSpace.diagonal(7, [1, 1, 1, 1]), 4, False, budget=50)


@given(spaces(primes=(2, 3), max_dim=3), st.integers(2, 4), st.booleans())
def test_search_matches_bruteforce(space, size, nonparallel):
    found = search_orthogonal_sets(space, size, nonparallel)
    for w in found:
        assert len(w) == size
        assert all(eval_form(space, a, b) == 0 for a, b in itertools.combinations(w, 2))
    got = {tuple(sorted(gflin.normalize_vector(v, space.p).tobytes() for v in w)) for w in found}
    assert got == brute_orthogonal_sets(space, size, nonparallel)


@pytest.mark.parametrize("p", [2, 3])
def test_dimension3_lemma_all_grams(p):
    count = 0
    for space in nondegenerate_grams(p, 3):
        count += 1
        assert search_orthogonal_sets(space, 4, True) == []
    assert count == {2: 28, 3: 468}[p]


def test_dimension3_lemma_representatives_p5():
    for space in congruence_representatives(5, 3):
        assert search_orthogonal_sets(space, 4, True) == []


def test_congruence_representatives_cover_classes():
    assert smallest_nonsquare(3) == 2 and smallest_nonsquare(5) == 2 and smallest_nonsquare(7) == 3
    for p in (3, 5):
        reps = congruence_representatives(p, 3)
        squares = {x * x % p for x in range(1, p)}
        classes = {gflin.determinant(r.gram) in squares for r in reps}
        assert classes == {True, False}
    assert len(congruence_representatives(2, 3)) == 1
    assert len(congruence_representatives(2, 2)) == 2


@given(spaces(primes=(3,), max_dim=3), st.data())
def test_orthogonal_set_count_is_congruence_invariant(space, data):
    n, p = space.dim, space.p
    # invertible change of basis as lower-unitriangular * diagonal * upper-unitriangular
    tri = st.lists(st.integers(0, p - 1), min_size=n * n, max_size=n * n)
    low = np.tril(np.array(data.draw(tri)).reshape(n, n), -1) + np.eye(n, dtype=np.int64)
    up = np.triu(np.array(data.draw(tri)).reshape(n, n), 1) + np.eye(n, dtype=np.int64)
    diag = np.diag(data.draw(st.lists(st.integers(1, p - 1), min_size=n, max_size=n)))
    P = Matrix(p, low @ diag @ up)
    moved = BilinearSpace(p, P @ space.gram @ P.transpose())
    for size in (2, 3):
        assert len(search_orthogonal_sets(space, size, True)) == len(search_orthogonal_sets(moved, size, True))


# -- the form on m/m^2 ------------------------------------------------------------


def test_build_phi_gorenstein_example():
    r = C(GOR3)
    phi = build_phi(r)
    assert phi.l == r.gen("x") ** 2
    assert phi.space.gram.tolist() == [[1, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert [str(b) for b in phi.coset_basis] == ["x", "y", "z"]
    rep = socle_radical_check(phi)
    assert rep.passed and rep.radical_dim == 0 and rep.nondegenerate and rep.gorenstein and rep.exhaustive


def test_build_phi_socle2_example():
    r = C(SOC2_3)
    phi = build_phi(r)
    assert phi.l == r.gen("y") ** 2
    assert phi.space.gram.tolist() == [[0, 0, 0], [0, 1, 0], [0, 0, 1]]
    assert radical(phi.space) == gflin.Subspace.span(3, 3, [[1, 0, 0]])
    rep = socle_radical_check(phi)
    assert rep.passed and rep.radical_dim == 1 and rep.socle_dim == 2


def test_build_phi_socle3_example():
    rep = socle_radical_check(build_phi(C(SOC3_2)))
    assert rep.passed and rep.radical_dim == 2 and rep.socle_dim == 3


@pytest.mark.parametrize(
    "text, code",
    [
        ("GF(2)[x]/(x^4)", "M3_NONZERO"),
        ("GF(2)[x,y]/(x*y, x^3, y^3)", "M2_NOT_PRINCIPAL"),
        ("GF(2)[x,y]/(x^2, x*y, y^2)", "M2_NOT_PRINCIPAL"),
        ("GF(2)[x]/(x^2 + x)", "NOT_LOCAL"),
        ("GF(2)[t]/(t^2 + t + 1)", "RESIDUE_DEG"),
    ],
)
def test_build_phi_preconditions(text, code):
    with pytest.raises(PhiPreconditionError) as info:
        build_phi(C(text))
    assert info.value.code == code


def _eligible_rings():
    out = []
    for spec in corpus_specs((2, 3, 5)):
        try:
            ring, _ = generate(spec)
            build_phi(ring, check=False)
        except PhiPreconditionError:
            continue
        if ring.size <= 3**6:
            out.append((spec.ident, ring))
    return out


@pytest.mark.parametrize("ident, ring", _eligible_rings(), ids=lambda x: x if isinstance(x, str) else "")
def test_phi_orthogonality_exhaustive(ident, ring):
    """phi(a,b) = 0 iff ab = 0 over all of m x m, checked without the library's own checker."""
    phi = build_phi(ring, check=False)
    m = phi.maximal_ideal.space.elements()
    proj = phi.project_many(m)
    form = proj @ phi.space.gram.data @ proj.T % ring.p
    prods = np.einsum("ai,bj,ijk->abk", m, m, ring.table) % ring.p
    assert np.array_equal(form == 0, ~prods.any(axis=2))
    soc = socle(ring)
    rad = radical(phi.space)
    assert soc.dim == rad.dim + 1
    assert invariants(ring).is_gorenstein == is_nondegenerate(phi.space)


def test_orthogonality_relation_independent_of_generator():
    r = C(SOC2_3)
    phi = build_phi(r)
    rel = orthogonality_relation(phi)
    # rescale l by 2: the Gram scales by 2^{-1}, the zero pattern does not
    scaled = BilinearSpace(3, Matrix(3, phi.space.gram.data * gflin.inv_mod(2, 3)))
    pts = gflin.projective_points(3, 3)
    rel2 = (pts @ scaled.gram.data @ pts.T % 3) == 0
    assert np.array_equal(rel, rel2)
    # and it matches products of lifted representatives in the ring
    lifts = pts @ np.array([b.coords for b in phi.coset_basis]) % 3
    prods = np.einsum("ai,bj,ijk->abk", lifts, lifts, r.table) % 3
    assert np.array_equal(rel, ~prods.any(axis=2))
