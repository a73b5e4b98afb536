import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from zdglab.algebra import FiniteAlgebra, annihilator, product
from zdglab.catalog import chain_clique_bruteforce, corpus_specs, generate
from zdglab.errors import ResourceBoundExceeded
from zdglab.presentation import compile_presentation as C
from zdglab.zdgraph import (
    build_gamma,
    build_gamma_e,
    class_of,
    clique_number,
    export_dot,
    export_json,
    is_clique,
    load_graph_json,
    max_clique,
    naive_clique_number,
    oracle_gamma_e,
    same_graph,
    zero_divisor_classes,
)


def field(p):
    return FiniteAlgebra(p, [[[1]]], [1], ["1"])


def labels(graph, idx=None):
    idx = range(graph.vertex_count) if idx is None else idx
    return [graph.vertices[i].label for i in idx]


def bruteforce_clique(masks):
    n = len(masks)
    for k in range(n, 0, -1):
        for sub in itertools.combinations(range(n), k):
            if all(masks[a] >> b & 1 for a, b in itertools.combinations(sub, 2)):
                return k
    return 0


@st.composite
def random_graphs(draw, max_n=14):
    n = draw(st.integers(0, max_n))
    masks = [0] * n
    for i, j in itertools.combinations(range(n), 2):
        if draw(st.booleans()):
            masks[i] |= 1 << j
            masks[j] |= 1 << i
    return masks


# -- vertex classes ---------------------------------------------------------------


def test_classes_examples():
    assert zero_divisor_classes(field(5)) == []
    g = build_gamma_e(C("GF(3)[x]/(x^5)"))
    assert sorted(labels(g), key=len) == ["x", "x^2", "x^3", "x^4"]
    assert build_gamma_e(C("GF(2)[x,y,z]/(x^2,x*y,x*z,y^2,y*z,z^2)")).vertex_count == 1


def test_vertices_sorted_by_key_and_distinct():
    g = build_gamma_e(C("GF(3)[x,y,z]/(x*y,x*z,y*z,x^2-y^2,x^2-z^2)"))
    keys = [v.ann_key for v in g.vertices]
    assert keys == sorted(keys) and len(set(keys)) == len(keys)


def test_representative_is_lexicographically_first():
    r = C("GF(3)[x]/(x^5)")
    g = build_gamma_e(r)
    for v in g.vertices:
        members = [tuple(a) for a in r.all_elements() if annihilator(r.element(a)).key() == v.ann_key]
        assert v.representative == min(members)
        assert v.class_size == len(members)


def test_build_examples():
    g = build_gamma_e(C("GF(3)[x]/(x^5)"))
    exps = {v.label: (1 if v.label == "x" else int(v.label.split("^")[1])) for v in g.vertices}
    for i, j in itertools.combinations(range(4), 2):
        a, b = exps[g.vertices[i].label], exps[g.vertices[j].label]
        assert g.adjacency[i, j] == (a + b >= 5)
    g = build_gamma_e(C("GF(2)[x]/(x^2)"))
    assert g.vertex_count == 1 and g.edge_count == 0
    g = build_gamma_e(product(field(2), field(2)))
    assert sorted(v.representative for v in g.vertices) == [(0, 1), (1, 0)]
    assert g.edge_count == 1


def test_bound_guard(monkeypatch):
    monkeypatch.setenv("ZDGLAB_MAX_ELEMS", "100")
    with pytest.raises(ResourceBoundExceeded):
        build_gamma_e(C("GF(3)[x]/(x^5)"))
    with pytest.raises(ResourceBoundExceeded):
        build_gamma(C("GF(3)[x]/(x^8)"))
    with pytest.raises(ResourceBoundExceeded):
        oracle_gamma_e(C("GF(3)[x]/(x^7)"))


# -- cliques -------------------------------------------------------------------------


def test_clique_examples():
    assert clique_number(build_gamma_e(field(5))).clique_number == 0
    assert clique_number(build_gamma_e(C("GF(2)[x]/(x^2)"))).clique_number == 1
    g = build_gamma_e(C("GF(3)[x]/(x^5)"))
    rep = clique_number(g)
    assert rep.clique_number == 3 and set(labels(g, rep.witness_clique)) == {"x^2", "x^3", "x^4"}
    assert rep.naive_checked
    r = C("GF(2)[x,y]/(x*y, x^3, y^3)")
    g = build_gamma_e(r)
    rep = clique_number(g)
    x, y = r.gen("x"), r.gen("y")
    assert rep.clique_number == 3
    assert set(rep.witness_clique) == {class_of(g, x), class_of(g, y), class_of(g, x**2)}


@given(random_graphs())
def test_clique_solvers_agree(masks):
    best = max_clique(masks)
    assert all(masks[a] >> b & 1 for a, b in itertools.combinations(best, 2))
    assert len(best) == naive_clique_number(masks) == bruteforce_clique(masks)


@given(random_graphs(max_n=20))
def test_branch_and_bound_matches_subset_dp_at_20(masks):
    assert len(max_clique(masks)) == naive_clique_number(masks)


def test_naive_guard():
    with pytest.raises(ResourceBoundExceeded):
        naive_clique_number([0] * 21)


@pytest.mark.parametrize("p", [2, 3])
@pytest.mark.parametrize("n", range(2, 9))
def test_chain_formula(p, n):
    g = build_gamma_e(C(f"GF({p})[x]/(x^{n})"))
    rep = clique_number(g)
    assert g.vertex_count == n - 1
    assert rep.clique_number == n - math.ceil((n - 1) / 2) == chain_clique_bruteforce(n)


# -- oracle and compression map --------------------------------------------------------


def _small_catalog():
    out = []
    for spec in corpus_specs((2, 3)):
        ring, _ = generate(spec)
        if ring.size <= 3**5:
            out.append(pytest.param(ring, id=spec.ident))
    return out


@pytest.mark.parametrize("ring", _small_catalog())
def test_fast_and_oracle_agree(ring):
    fast, slow = build_gamma_e(ring), oracle_gamma_e(ring)
    assert same_graph(fast, slow)
    assert clique_number(fast).clique_number == clique_number(slow).clique_number


def test_oracle_examples():
    assert same_graph(build_gamma_e(C("GF(2)[x]/(x^4)")), oracle_gamma_e(C("GF(2)[x]/(x^4)")))
    r = C("GF(3)[x,y,z]/(x^2,x*y,x*z,y*z,y^2-z^2)")
    assert same_graph(build_gamma_e(r), oracle_gamma_e(r))


@pytest.mark.parametrize(
    "text",
    ["GF(2)[x,y]/(x*y, x^3, y^3)", "GF(3)[x]/(x^4)", "GF(2)[x]/(x^3 + x)", "GF(2)[x,y]/(x^2, y^2)"],
)
def test_compression_map_contract(text):
    r = C(text)
    full = build_gamma(r)
    comp = build_gamma_e(r)
    idx = [class_of(comp, r.element(v.representative)) for v in full.vertices]
    assert sorted(set(idx)) == list(range(comp.vertex_count))
    for i, j in itertools.combinations(range(full.vertex_count), 2):
        if full.adjacency[i, j] and idx[i] != idx[j]:
            assert comp.adjacency[idx[i], idx[j]]
        if full.vertices[i].ann_key == full.vertices[j].ann_key:
            assert idx[i] == idx[j]
    assert comp.vertex_count == len({v.ann_key for v in full.vertices})


# -- export ----------------------------------------------------------------------------


def test_dot_examples():
    assert export_dot(build_gamma_e(C("GF(2)[x]/(x^2)"))) == 'graph G {\n  "x";\n}\n'
    text = export_dot(build_gamma_e(product(field(2), field(2))))
    assert text.count("--") == 1
    g = build_gamma_e(C("GF(3)[x]/(x^5)"))
    text = export_dot(g)
    edges = {tuple(line.strip().rstrip(";").replace('"', "").split(" -- ")) for line in text.splitlines() if "--" in line}
    assert edges == {("x", "x^4"), ("x^2", "x^3"), ("x^2", "x^4"), ("x^3", "x^4")}
    assert export_dot(g) == text


@pytest.mark.parametrize("text", ["GF(3)[x]/(x^5)", "GF(2)[x,y]/(x*y, x^3, y^3)", "GF(5)[x]/(x)"])
def test_json_roundtrip(text):
    g = build_gamma_e(C(text))
    rep = clique_number(g)
    out = export_json(g, rep)
    g2, rep2 = load_graph_json(out)
    assert export_json(g2, rep2) == out
    assert [v.ann_key for v in g2.vertices] == [v.ann_key for v in g.vertices]
    assert np.array_equal(g2.adjacency, g.adjacency)
    if g.vertex_count:
        assert rep2.clique_number == rep.clique_number and is_clique(g2, rep2.witness_clique)
    with pytest.raises(ValueError):
        load_graph_json('{"format": "other"}')
