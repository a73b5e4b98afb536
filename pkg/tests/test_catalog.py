import pytest

from zdglab.algebra import classify_length5, invariants
from zdglab.catalog import (
    CatalogMismatch,
    ExpectedRecord,
    Family,
    FamilySpec,
    LENGTH5_FAMILIES,
    chain_clique_bruteforce,
    corpus_specs,
    expected_record,
    generate,
    parse_family_params,
    sweep,
)
from zdglab.zdgraph import build_gamma_e, clique_number


def omega(ring):
    return clique_number(build_gamma_e(ring)).clique_number


def test_generate_examples():
    ring, exp = generate(FamilySpec(Family.CHAIN, 3, (("n", 5),)))
    assert exp.hilbert == (1, 1, 1, 1, 1) and exp.socle_dim == 1 and exp.omega_exact == 3
    assert omega(ring) == 3
    ring, exp = generate(FamilySpec(Family.LEN5_H131_GOR, 3))
    assert exp.socle_dim == 1 and exp.omega_exact == 4 and omega(ring) == 4
    ring, exp = generate(FamilySpec(Family.LEN5_H131_SOC3, 2))
    assert exp.socle_dim == 3 and exp.omega_exact == 2 and omega(ring) == 2
    ring, exp = generate(FamilySpec(Family.TRIVEXT_LEN6, 3))
    assert invariants(ring).length == 6


def test_sweep_examples():
    items = sweep({2, 3}, LENGTH5_FAMILIES + (Family.CHAIN,))
    assert all(i.error is None for i in items)
    local5 = [i for i in items if invariants(i.ring).is_local and invariants(i.ring).length == 5]
    assert len(local5) >= 12
    cases = {classify_length5(invariants(i.ring)) for i in local5}
    assert len(cases) == 4
    assert len(sweep({2}, [Family.CHAIN], range(2, 9))) == 7
    assert sweep({2, 3}, []) == []


def test_sweep_collects_errors():
    bad = sweep({4}, [Family.CHAIN])
    assert len(bad) == 1 and bad[0].error and bad[0].ring is None


def test_expected_record_invariant():
    with pytest.raises(ValueError):
        ExpectedRecord(5, omega_bound=3, omega_exact=4)


def test_mismatch_is_reported(monkeypatch):
    import zdglab.catalog as cat

    real = cat.expected_record
    monkeypatch.setattr(cat, "expected_record", lambda s: ExpectedRecord(5, True, (1, 3, 1), 2, False, 3))
    with pytest.raises(CatalogMismatch):
        cat.generate(FamilySpec(Family.LEN5_H122, 2))
    monkeypatch.setattr(cat, "expected_record", real)


def test_chain_bruteforce_oracle():
    # independent enumeration of subsets of {1..n-1} with pairwise sums >= n
    import math

    assert [chain_clique_bruteforce(n) for n in range(2, 9)] == [1, 2, 2, 3, 3, 4, 4]
    assert all(chain_clique_bruteforce(n) == n - math.ceil((n - 1) / 2) for n in range(2, 9))


@pytest.mark.parametrize("spec", corpus_specs((2, 3, 5)), ids=lambda s: s.ident)
def test_every_record_matches(spec):
    ring, exp = generate(spec)
    inv = invariants(ring)
    if inv.is_local and inv.length == 5:
        classify_length5(inv)
    if ring.size <= 5**5 and exp.is_local:
        w = omega(ring)
        if exp.omega_bound is not None:
            assert w <= exp.omega_bound
        if exp.omega_exact is not None:
            assert w == exp.omega_exact
        if exp.omega_lower is not None:
            assert w >= exp.omega_lower


@pytest.mark.parametrize("p", [2, 3, 5])
def test_len5_h122_values(p):
    ring, _ = generate(FamilySpec(Family.LEN5_H122, p))
    assert invariants(ring).socle_dim == 2 and omega(ring) == 3


@pytest.mark.parametrize("p", [2, 3, 5])
def test_len5_h1211_soc1_bound(p):
    ring, _ = generate(FamilySpec(Family.LEN5_H1211_SOC1, p))
    inv = invariants(ring)
    assert inv.hilbert == (1, 2, 1, 1) and inv.socle_dim == 1 and omega(ring) <= 4


def test_product_family_is_nonlocal_with_crt_presentation():
    spec = FamilySpec(Family.PRODUCT, 3, parse_family_params(Family.PRODUCT, {"a": 2, "b": 3}))
    ring, exp = generate(spec)
    assert not invariants(ring).is_local and invariants(ring).length == 5
    assert spec.presentation.startswith("GF(3)[x]/(x^5")


def test_param_parsing():
    assert parse_family_params(Family.CHAIN, {"n": 7}) == (("n", 7),)
    assert parse_family_params(Family.LEN4_H121, {}) == (("variant", "gor"),)
    with pytest.raises(ValueError):
        parse_family_params(Family.LEN4_H121, {"variant": "nope"})
    assert expected_record(FamilySpec(Family.LEN4_H121, 2, (("variant", "soc2"),))).socle_dim == 2
