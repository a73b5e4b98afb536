"""Verification suites: every bound and equivalence checked over the catalog.

All checks are exhaustive within their declared bounds; nothing is random.
A suite is a list of tasks, each a top-level function plus arguments that
returns check items, so tasks can be farmed out to worker processes and
reassembled in order.
"""

from __future__ import annotations

import enum
import hashlib
import json
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import __version__, gflin
from .algebra import Element, classify_length5, invariants
from .bilinear import (
    BilinearSpace,
    build_phi,
    congruence_representatives,
    eval_form,
    isotropic_family,
    nondegenerate_grams,
    search_orthogonal_sets,
    socle_radical_check,
)
from .catalog import (
    Family,
    FamilySpec,
    H131_FAMILIES,
    chain_clique_bruteforce,
    corpus_specs,
    generate,
    length4_specs,
    length5_specs,
    specs_for,
)
from .errors import PhiPreconditionError, ZdglabError
from .zdgraph import build_gamma_e, clique_number, oracle_gamma_e, same_graph

REPORT_FORMAT = "zdglab-report-v1"

# claim key -> citation text carried by every item checking that claim
CLAIMS = {
    "main_bound": "main theorem: a length-5 ring satisfies omega(Gamma_E(R)) <= 5 - dim_k soc R",
    "case_split": "length-5 Hilbert functions: only (1,1,1,1,1), (1,3,1), (1,2,2), (1,2,1,1) occur",
    "corollary": "corollary: for H = (1,3,1) and char k != 2, omega(Gamma_E(R)) = 5 - dim_k soc R",
    "case_iii": "H = (1,3,1) with dim_k soc R = 3: omega(Gamma_E(R)) = 2",
    "len4_bound": "length-4 proposition: a local ring of length 4 has omega(Gamma_E(R)) <= 3",
    "len4_h13": "length-4 proposition, H = (1,3): Gamma_E(R) has exactly one vertex",
    "len4_chain": "length-4 proposition, chain ring: Gamma_E(R) has exactly three vertices",
    "phi_orthogonality": "form on m/m^2: phi(a,b) = 0 iff ab = 0",
    "phi_socle": "form on m/m^2: a in soc R iff its class lies in the radical",
    "phi_socle_dim": "form on m/m^2: dim_k soc R = dim radical + 1",
    "phi_gorenstein": "form on m/m^2: R Gorenstein iff the form is nondegenerate",
    "ortho_lemma": "dimension-3 lemma: no orthogonal set of 4 nonzero pairwise non-parallel vectors",
    "isotropic_family": "isotropic family: {a_1 v, ..., a_m v} is an orthogonal set when v is isotropic",
    "socle_range": "socle lemma (i): length 5 and H(1) = 3 give 1 <= dim_k soc R <= 3",
    "socle_lines": "socle lemma (ii): distinct annihilators give distinct lines in m/m^2",
    "oracle_equiv": "compression map: Gamma_E classes are the distinct annihilators of nonzero zero-divisors",
    "chain_formula": "chain ring F_p[x]/(x^n): n - 1 vertices and omega = n - ceil((n-1)/2)",
    "length_sum": "length remark: l(R) equals the sum of the Hilbert function",
    "trivext_growth": "trivial extension of (x,y)^2-quotient: omega(Gamma_E) >= p + 1 at length 6",
}


class Suite(str, enum.Enum):
    LEN4 = "LEN4"
    LEN5 = "LEN5"
    PROP_PHI = "PROP_PHI"
    LEMMA_ORTHO = "LEMMA_ORTHO"
    LEMMA_SOCLE = "LEMMA_SOCLE"
    ORACLE_EQUIV = "ORACLE_EQUIV"
    HILBERT = "HILBERT"
    TRIVEXT_GROWTH = "TRIVEXT_GROWTH"


@dataclass
class CheckItem:
    subject: str
    claim: str
    passed: bool
    details: dict = field(default_factory=dict)

    @property
    def citation(self) -> str:
        return CLAIMS[self.claim]

    def to_json(self) -> dict:
        return {
            "subject": self.subject,
            "claim": self.claim,
            "citation": self.citation,
            "pass": self.passed,
            "details": self.details,
        }


@dataclass
class SuiteResult:
    name: str
    items: list[CheckItem]
    seconds: float = 0.0

    @property
    def passed(self) -> bool:
        return all(i.passed for i in self.items)

    def to_json(self) -> dict:
        return {"name": self.name, "pass": self.passed, "items": [i.to_json() for i in self.items]}


def _error_item(subject: str, claim: str, exc: Exception) -> CheckItem:
    return CheckItem(subject, claim, False, {"error": f"{type(exc).__name__}: {exc}"})


def _omega(ring):
    return clique_number(build_gamma_e(ring))


# -- task functions (top level so worker processes can import them) ----------


def task_length4(spec: FamilySpec) -> list[CheckItem]:
    try:
        ring, _ = generate(spec)
        rep = _omega(ring)
    except ZdglabError as exc:
        return [_error_item(spec.ident, "len4_bound", exc)]
    items = [CheckItem(spec.ident, "len4_bound", rep.clique_number <= 3, {"omega": rep.clique_number})]
    if spec.name == Family.LEN4_H13:
        items.append(CheckItem(spec.ident, "len4_h13", rep.vertex_count == 1, {"vertices": rep.vertex_count}))
    if spec.name == Family.CHAIN:
        items.append(CheckItem(spec.ident, "len4_chain", rep.vertex_count == 3, {"vertices": rep.vertex_count}))
    return items


def task_length5(spec: FamilySpec, exact_claims: bool) -> list[CheckItem]:
    """Bound and case checks; with ``exact_claims`` also the pinned equalities."""
    try:
        ring, exp = generate(spec)
        inv = invariants(ring)
        case = classify_length5(inv)
        rep = _omega(ring)
    except ZdglabError as exc:
        return [_error_item(spec.ident, "main_bound", exc)]
    omega, soc = rep.clique_number, inv.socle_dim
    base = {"omega": omega, "socle_dim": soc}
    items = [
        CheckItem(spec.ident, "case_split", True, {"case": case.value, "hilbert": list(inv.hilbert)}),
        CheckItem(spec.ident, "main_bound", omega <= 5 - soc, dict(base, bound=5 - soc)),
    ]
    if exact_claims and spec.name in H131_FAMILIES:
        if soc == 3:
            items.append(CheckItem(spec.ident, "case_iii", omega == 2, base))
        elif spec.p != 2:
            items.append(CheckItem(spec.ident, "corollary", omega == 5 - soc, dict(base, expected=5 - soc)))
    return items


def task_phi(spec: FamilySpec) -> list[CheckItem]:
    try:
        ring, _ = generate(spec)
        phi = build_phi(ring, check=False)
    except PhiPreconditionError:
        return []
    except ZdglabError as exc:
        return [_error_item(spec.ident, "phi_orthogonality", exc)]
    report = socle_radical_check(phi)
    claim_of = {
        "orthogonality": "phi_orthogonality",
        "socle_iff_radical": "phi_socle",
        "socle_dim_formula": "phi_socle_dim",
        "gorenstein_iff_nondegenerate": "phi_gorenstein",
    }
    items = []
    for clause in report.clauses:
        details = {"exhaustive": report.exhaustive, "ring_size": ring.size}
        if clause.detail:
            details["detail"] = clause.detail
        items.append(CheckItem(spec.ident, claim_of[clause.name], clause.passed, details))
    return items


def _gram_id(space: BilinearSpace) -> str:
    return f"p={space.p} gram={space.gram.data.tolist()}"


def task_ortho_all(p: int, dim: int = 3, size: int = 4) -> list[CheckItem]:
    """Every nondegenerate symmetric Gram of the dimension, summarized in one item."""
    count, failures = 0, []
    for space in nondegenerate_grams(p, dim):
        count += 1
        found = search_orthogonal_sets(space, size, pairwise_nonparallel=True, limit=1)
        if found:
            failures.append({"gram": space.gram.data.tolist(), "witness": [v.tolist() for v in found[0]]})
    details = {"forms_checked": count, "witnesses": failures[:3], "scope": "all nondegenerate Grams"}
    return [CheckItem(f"p={p} dim={dim}", "ortho_lemma", not failures, details)]


def task_ortho_reps(p: int, dim: int = 3, size: int = 4) -> list[CheckItem]:
    items = []
    for space in congruence_representatives(p, dim):
        found = search_orthogonal_sets(space, size, pairwise_nonparallel=True, limit=1)
        details = {"scope": "congruence representative"}
        if found:
            details["witness"] = [v.tolist() for v in found[0]]
        items.append(CheckItem(_gram_id(space), "ortho_lemma", not found, details))
    return items


def task_isotropic_sanity(p: int = 5) -> list[CheckItem]:
    """diag(1,1,-1) with v = (1,2,0): four multiples of v are pairwise orthogonal."""
    space = BilinearSpace.diagonal(p, [1, 1, p - 1])
    v = np.array([1, 2, 0], dtype=np.int64)
    fam = isotropic_family(space, v, 4)
    pairwise = all(eval_form(space, a, b) == 0 for i, a in enumerate(fam) for b in fam[i + 1 :])
    found = search_orthogonal_sets(space, 4, pairwise_nonparallel=False, limit=1)
    details = {"family": [f.tolist() for f in fam], "search_witness": [w.tolist() for w in found[0]] if found else None}
    return [CheckItem(_gram_id(space), "isotropic_family", pairwise and bool(found), details)]


def socle_line_violation(ring) -> tuple[str, str] | None:
    """Two elements of m outside m^2 on one line of m/m^2 with different annihilators.

    Reducing against the RREF basis of m^2 gives a canonical coset
    representative, so lines are compared on the reduced vectors.
    """
    p = ring.p
    m, m2 = ring.maximal_powers[1], ring.maximal_powers[2]
    elems = m.space.elements()
    red = elems.copy()
    for row, piv in zip(m2.basis, m2.space.pivots):
        red = (red - np.outer(red[:, piv], row)) % p
    keep = red.any(axis=1)
    elems, red = elems[keep], red[keep]
    if len(elems) == 0:
        return None
    keys, _ = gflin.batch_rref(ring.mult_matrices(elems), p)
    seen: dict[bytes, tuple[bytes, int]] = {}
    for i, v in enumerate(red):
        line = gflin.normalize_vector(v, p).tobytes()
        kb = keys[i].astype(np.uint8).tobytes()
        if line not in seen:
            seen[line] = (kb, i)
        elif seen[line][0] != kb:
            return ring.format_vector(elems[seen[line][1]]), ring.format_vector(elems[i])
    return None


def task_socle(spec: FamilySpec) -> list[CheckItem]:
    try:
        ring, _ = generate(spec)
        inv = invariants(ring)
    except ZdglabError as exc:
        return [_error_item(spec.ident, "socle_range", exc)]
    items = []
    if inv.is_local and inv.length == 5 and inv.embdim == 3:
        items.append(CheckItem(spec.ident, "socle_range", 1 <= inv.socle_dim <= 3, {"socle_dim": inv.socle_dim}))
    # hypothesis: m^2 != 0 and m^3 = 0, i.e. powers m^0..m^3 with m^3 = 0
    if inv.is_local and inv.residue_degree == 1 and len(ring.maximal_powers) == 4:
        bad = socle_line_violation(ring)
        details = {} if bad is None else {"counterexample": list(bad)}
        items.append(CheckItem(spec.ident, "socle_lines", bad is None, details))
    return items


def task_oracle(spec: FamilySpec) -> list[CheckItem]:
    try:
        ring, _ = generate(spec)
        fast = build_gamma_e(ring)
        slow = oracle_gamma_e(ring)
        rf = clique_number(fast)
        rs = clique_number(slow)
    except ZdglabError as exc:
        return [_error_item(spec.ident, "oracle_equiv", exc)]
    ok = same_graph(fast, slow) and rf.clique_number == rs.clique_number and rf.naive_checked == (fast.vertex_count <= 20)
    details = {"vertices": fast.vertex_count, "edges": fast.edge_count, "omega": rf.clique_number, "naive_checked": rf.naive_checked}
    items = [CheckItem(spec.ident, "oracle_equiv", ok, details)]
    if spec.name == Family.CHAIN:
        n = spec.param_dict["n"]
        want_omega = n - math.ceil((n - 1) / 2)
        brute = chain_clique_bruteforce(n)
        ok = fast.vertex_count == n - 1 and rf.clique_number == want_omega == brute
        items.append(
            CheckItem(spec.ident, "chain_formula", ok, {"vertices": fast.vertex_count, "omega": rf.clique_number, "expected_omega": want_omega, "bruteforce": brute})
        )
    return items


def task_hilbert(spec: FamilySpec) -> list[CheckItem]:
    try:
        ring, _ = generate(spec)
        inv = invariants(ring)
    except ZdglabError as exc:
        return [_error_item(spec.ident, "length_sum", exc)]
    items = []
    if inv.is_local:
        items.append(CheckItem(spec.ident, "length_sum", inv.length == sum(inv.hilbert), {"length": inv.length, "hilbert": list(inv.hilbert)}))
        if inv.length == 5:
            try:
                case = classify_length5(inv)
                items.append(CheckItem(spec.ident, "case_split", True, {"case": case.value}))
            except ZdglabError as exc:
                items.append(_error_item(spec.ident, "case_split", exc))
    return items


def lines_in_m_clique(ring) -> list[Element]:
    """Classes of (v, 0) over the p + 1 lines of the degree-one part of the base ring.

    Used on A x D for A = F_p[x,y]/(x,y)^2: the elements (v, 0) with v in
    span{x, y} multiply to zero pairwise and have pairwise distinct annihilators.
    """
    p = ring.p
    x = ring.gen("x").coords
    y = ring.gen("y").coords
    lines = [np.array([0, 1])] + [np.array([1, a]) for a in range(p)]
    return [Element(ring, (c[0] * x + c[1] * y) % p) for c in lines]


def task_trivext(p: int) -> list[CheckItem]:
    spec = FamilySpec(Family.TRIVEXT_LEN6, p)
    try:
        ring, exp = generate(spec)
        graph = build_gamma_e(ring)
        rep = clique_number(graph, check_naive=False)
    except ZdglabError as exc:
        return [_error_item(spec.ident, "trivext_growth", exc)]
    # independent lower-bound witness from the lines-in-m construction
    fam = lines_in_m_clique(ring)
    from .algebra import annihilator

    anns = {annihilator(e).key() for e in fam}
    pairwise_zero = all(not (a * b) for i, a in enumerate(fam) for b in fam[i + 1 :])
    witness_ok = pairwise_zero and len(anns) == p + 1
    ok = witness_ok and rep.clique_number >= p + 1 and invariants(ring).length == 6
    details = {"omega": rep.clique_number, "lower_bound": p + 1, "lines_witness_valid": witness_ok, "vertices": rep.vertex_count}
    return [CheckItem(spec.ident, "trivext_growth", ok, details)]


# -- suite assembly -----------------------------------------------------------


DEFAULT_PRIMES = {
    Suite.LEN4: (2, 3, 5),
    Suite.LEN5: (2, 3),
    Suite.PROP_PHI: (2, 3, 5),
    Suite.LEMMA_ORTHO: (2, 3, 5),
    Suite.LEMMA_SOCLE: (2, 3, 5),
    Suite.ORACLE_EQUIV: (2, 3),
    Suite.HILBERT: (2, 3, 5),
    Suite.TRIVEXT_GROWTH: (2, 3, 5),
}
COROLLARY_PRIMES = (3, 5)
ORACLE_SIZE_LIMIT = 3**5
PHI_SIZE_LIMIT = 3**6


def suite_tasks(suite: Suite, primes=None) -> list[tuple]:
    suite = Suite(suite)
    primes = tuple(sorted(primes or DEFAULT_PRIMES[suite]))
    if suite == Suite.LEN4:
        return [(task_length4, s) for s in length4_specs(primes)]
    if suite == Suite.LEN5:
        tasks = [(task_length5, s, False) for s in length5_specs(primes)]
        tasks += [(task_length5, s, True) for s in specs_for(sorted(set(primes) | set(COROLLARY_PRIMES)), H131_FAMILIES)]
        return tasks
    if suite == Suite.PROP_PHI:
        specs = [s for s in corpus_specs(primes) if _size(s) <= PHI_SIZE_LIMIT]
        return [(task_phi, s) for s in specs]
    if suite == Suite.LEMMA_ORTHO:
        tasks = []
        for p in primes:
            tasks.append((task_ortho_all, p) if p <= 3 else (task_ortho_reps, p))
        if 5 in primes:
            tasks.append((task_isotropic_sanity, 5))
        return tasks
    if suite == Suite.LEMMA_SOCLE:
        return [(task_socle, s) for s in corpus_specs(primes) if _size(s) <= PHI_SIZE_LIMIT]
    if suite == Suite.ORACLE_EQUIV:
        specs = [s for s in corpus_specs(primes) if _size(s) <= ORACLE_SIZE_LIMIT]
        return [(task_oracle, s) for s in specs]
    if suite == Suite.HILBERT:
        return [(task_hilbert, s) for s in corpus_specs(primes)]
    if suite == Suite.TRIVEXT_GROWTH:
        return [(task_trivext, p) for p in primes]
    raise ValueError(suite)


def _size(spec: FamilySpec) -> int:
    """|R| for a catalog spec without compiling it."""
    p, prm = spec.p, spec.param_dict
    length = {
        Family.CHAIN: prm.get("n", 0),
        Family.LEN4_H13: 4,
        Family.LEN4_H121: 4,
        Family.TRIVEXT_LEN6: 6,
        Family.PRODUCT: prm.get("a", 1) + prm.get("b", 4),
    }.get(spec.name, 5)
    return p**length


def _run_task(task):
    fn, *args = task
    return fn(*args)


def run_suite(suite: Suite, primes=None, jobs: int = 1) -> SuiteResult:
    tasks = suite_tasks(suite, primes)
    start = time.perf_counter()
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunks = list(pool.map(_run_task, tasks))
    else:
        chunks = [_run_task(t) for t in tasks]
    items = [item for chunk in chunks for item in chunk]
    return SuiteResult(Suite(suite).value, items, time.perf_counter() - start)


def config_hash(config: dict) -> str:
    return hashlib.sha256(json.dumps(config, sort_keys=True, separators=(",", ":")).encode()).hexdigest()


def build_report(results: list[SuiteResult], config: dict) -> dict:
    """Deterministic report: no timings, ordered as run."""
    return {
        "format": REPORT_FORMAT,
        "tool_version": __version__,
        "config": config,
        "config_hash": config_hash(config),
        "pass": all(r.passed for r in results),
        "suites": [r.to_json() for r in results],
    }


def dump_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=False) + "\n"
