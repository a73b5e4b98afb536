"""Named ring families with pinned invariant expectations.

Each family is a presentation template (or, for the length-6 example, a
construction) plus the record its compiled ring must match.  Exact clique
numbers are pinned only where an independent argument fixes them; otherwise
only the upper bound is recorded.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

from .algebra import FiniteAlgebra, invariants, trivial_extension
from .errors import StructuralImpossibility, ZdglabError
from .presentation import compile_presentation, expand_product


class Family(str, enum.Enum):
    CHAIN = "CHAIN"
    LEN4_H13 = "LEN4_H13"
    LEN4_H121 = "LEN4_H121"
    LEN5_H131_GOR = "LEN5_H131_GOR"
    LEN5_H131_SOC2 = "LEN5_H131_SOC2"
    LEN5_H131_SOC3 = "LEN5_H131_SOC3"
    LEN5_H122 = "LEN5_H122"
    LEN5_H1211_SOC1 = "LEN5_H1211_SOC1"
    LEN5_H1211_SOC2 = "LEN5_H1211_SOC2"
    TRIVEXT_LEN6 = "TRIVEXT_LEN6"
    PRODUCT = "PRODUCT"


LENGTH5_FAMILIES = (
    Family.LEN5_H131_GOR,
    Family.LEN5_H131_SOC2,
    Family.LEN5_H131_SOC3,
    Family.LEN5_H122,
    Family.LEN5_H1211_SOC1,
    Family.LEN5_H1211_SOC2,
)
H131_FAMILIES = (Family.LEN5_H131_GOR, Family.LEN5_H131_SOC2, Family.LEN5_H131_SOC3)

_TEMPLATES = {
    Family.LEN4_H13: "GF({p})[x,y,z]/(x^2, x*y, x*z, y^2, y*z, z^2)",
    Family.LEN5_H131_GOR: "GF({p})[x,y,z]/(x*y, x*z, y*z, x^2 - y^2, x^2 - z^2)",
    Family.LEN5_H131_SOC2: "GF({p})[x,y,z]/(x^2, x*y, x*z, y*z, y^2 - z^2)",
    Family.LEN5_H131_SOC3: "GF({p})[x,y,z]/(x^2, x*y, x*z, y^2, y*z, z^3)",
    Family.LEN5_H122: "GF({p})[x,y]/(x*y, x^3, y^3)",
    Family.LEN5_H1211_SOC1: "GF({p})[x,y]/(x*y, y^2 - x^3, x^4)",
    Family.LEN5_H1211_SOC2: "GF({p})[x,y]/(x*y, y^2, x^4)",
}
_LEN4_H121_VARIANTS = {
    "gor": "GF({p})[x,y]/(x^2, y^2)",
    "soc2": "GF({p})[x,y]/(x^2, x*y, y^3)",
}
TRIVEXT_BASE = "GF({p})[x,y]/(x^2, x*y, y^2)"


@dataclass(frozen=True)
class ExpectedRecord:
    length: int
    is_local: bool = True
    hilbert: tuple[int, ...] = ()
    socle_dim: int | None = None
    gorenstein: bool | None = None
    omega_bound: int | None = None
    omega_exact: int | None = None
    omega_provenance: str = ""
    omega_lower: int | None = None

    def __post_init__(self):
        if self.omega_exact is not None and self.omega_bound is not None and self.omega_exact > self.omega_bound:
            raise ValueError("pinned clique number exceeds its bound")


@dataclass(frozen=True)
class FamilySpec:
    name: Family
    p: int
    params: tuple = field(default=())

    @property
    def param_dict(self) -> dict:
        return dict(self.params)

    @property
    def ident(self) -> str:
        extra = "".join(f",{k}={v}" for k, v in self.params)
        return f"{self.name.value}(p={self.p}{extra})"

    @property
    def presentation(self) -> str | None:
        """Presentation text, or None for the constructed length-6 ring."""
        p, prm = self.p, self.param_dict
        if self.name == Family.CHAIN:
            return f"GF({p})[x]/(x^{prm['n']})"
        if self.name == Family.LEN4_H121:
            return _LEN4_H121_VARIANTS[prm.get("variant", "gor")].format(p=p)
        if self.name == Family.PRODUCT:
            a, b = prm.get("a", 1), prm.get("b", 4)
            # F_p[x]/(x^a (x-1)^b) splits as F_p[x]/(x^a) x F_p[x]/((x-1)^b)
            poly = expand_product(p, [{(1,): 1}] * a + [{(1,): 1, (0,): p - 1}] * b, 1)
            return f"GF({p})[x]/({poly.format(['x'])})"
        if self.name == Family.TRIVEXT_LEN6:
            return None
        return _TEMPLATES[self.name].format(p=p)

    @property
    def description(self) -> str:
        if self.name == Family.TRIVEXT_LEN6:
            return f"trivial_extension({TRIVEXT_BASE.format(p=self.p)})"
        return self.presentation


def chain_clique_bruteforce(n: int) -> int:
    """Largest subset of {1..n-1} with pairwise sums >= n (x^i x^j = 0 iff i + j >= n)."""
    exps = range(1, n)
    best = 0
    for k in range(1, n):
        for subset in itertools.combinations(exps, k):
            if all(i + j >= n for i, j in itertools.combinations(subset, 2)):
                best = k
                break
    return best


def expected_record(spec: FamilySpec) -> ExpectedRecord:
    p, prm, f = spec.p, spec.param_dict, spec.name
    if f == Family.CHAIN:
        n = prm["n"]
        bound = {4: 3, 5: 4}.get(n)
        return ExpectedRecord(n, True, (1,) * n, 1, True, bound, chain_clique_bruteforce(n), "sum-condition enumeration")
    if f == Family.LEN4_H13:
        return ExpectedRecord(4, True, (1, 3), 3, False, 3, 1, "m^2 = 0 gives a single vertex")
    if f == Family.LEN4_H121:
        soc = 1 if prm.get("variant", "gor") == "gor" else 2
        return ExpectedRecord(4, True, (1, 2, 1), soc, soc == 1, 3)
    if f in H131_FAMILIES:
        soc = {Family.LEN5_H131_GOR: 1, Family.LEN5_H131_SOC2: 2, Family.LEN5_H131_SOC3: 3}[f]
        exact, prov = None, ""
        if soc == 3:
            exact, prov = 2, "socle dimension 3 forces clique number 2"
        elif p != 2:
            exact, prov = 5 - soc, "equality 5 - socle_dim in odd characteristic"
        return ExpectedRecord(5, True, (1, 3, 1), soc, soc == 1, 5 - soc, exact, prov)
    if f == Family.LEN5_H122:
        return ExpectedRecord(5, True, (1, 2, 2), 2, False, 3)
    if f == Family.LEN5_H1211_SOC1:
        return ExpectedRecord(5, True, (1, 2, 1, 1), 1, True, 4)
    if f == Family.LEN5_H1211_SOC2:
        return ExpectedRecord(5, True, (1, 2, 1, 1), 2, False, 3)
    if f == Family.TRIVEXT_LEN6:
        return ExpectedRecord(6, True, (1, 4, 1), 1, True, omega_lower=p + 1)
    if f == Family.PRODUCT:
        return ExpectedRecord(prm.get("a", 1) + prm.get("b", 4), False)
    raise ValueError(f"unknown family {f}")


class CatalogMismatch(StructuralImpossibility):
    pass


def build_ring(spec: FamilySpec) -> FiniteAlgebra:
    if spec.name == Family.TRIVEXT_LEN6:
        return trivial_extension(compile_presentation(TRIVEXT_BASE.format(p=spec.p)))
    return compile_presentation(spec.presentation)


def generate(spec: FamilySpec) -> tuple[FiniteAlgebra, ExpectedRecord]:
    """Compile ``spec`` and check its invariants against the pinned record."""
    ring = build_ring(spec)
    exp = expected_record(spec)
    inv = invariants(ring)
    got = (inv.length, inv.is_local)
    want = (exp.length, exp.is_local)
    if exp.is_local:
        got += (inv.hilbert, inv.socle_dim, inv.is_gorenstein)
        want += (exp.hilbert, exp.socle_dim, exp.gorenstein)
    if got != want:
        raise CatalogMismatch(f"{spec.ident}: expected {want}, computed {got}")
    return ring, exp


@dataclass
class CatalogItem:
    spec: FamilySpec
    ring: FiniteAlgebra | None
    expected: ExpectedRecord | None
    error: str | None = None


def default_params(family: Family, chain_lengths=(5,)) -> list[tuple]:
    if family == Family.CHAIN:
        return [(("n", n),) for n in chain_lengths]
    if family == Family.LEN4_H121:
        return [(("variant", v),) for v in _LEN4_H121_VARIANTS]
    if family == Family.PRODUCT:
        return [(("a", 1), ("b", 4)), (("a", 2), ("b", 3))]
    return [()]


def specs_for(primes, families, chain_lengths=(5,)) -> list[FamilySpec]:
    out = []
    for fam in families:
        fam = Family(fam)
        for p in sorted(primes):
            for params in default_params(fam, chain_lengths):
                out.append(FamilySpec(fam, p, params))
    return out


def sweep(primes, families, chain_lengths=(5,)) -> list[CatalogItem]:
    """Generate every (family, prime, params) combination; failures are kept per item."""
    items = []
    for spec in specs_for(primes, families, chain_lengths):
        try:
            ring, exp = generate(spec)
            items.append(CatalogItem(spec, ring, exp))
        except ZdglabError as exc:
            items.append(CatalogItem(spec, None, None, str(exc)))
    return items


def length5_specs(primes=(2, 3)) -> list[FamilySpec]:
    return specs_for(primes, [Family.CHAIN], (5,)) + specs_for(primes, LENGTH5_FAMILIES)


def length4_specs(primes=(2, 3, 5)) -> list[FamilySpec]:
    return specs_for(primes, [Family.CHAIN], (4,)) + specs_for(primes, [Family.LEN4_H13, Family.LEN4_H121])


def corpus_specs(primes=(2, 3, 5)) -> list[FamilySpec]:
    """Every family over ``primes``, chains of length 2..8 included."""
    specs = specs_for(primes, [Family.CHAIN], range(2, 9))
    specs += specs_for(primes, [f for f in Family if f != Family.CHAIN])
    return specs


def parse_family_params(family: Family, raw: dict) -> tuple:
    """Normalize CLI-style parameters for ``family``."""
    if family == Family.CHAIN:
        return (("n", int(raw.get("n") or 5)),)
    if family == Family.LEN4_H121:
        variant = raw.get("variant") or "gor"
        if variant not in _LEN4_H121_VARIANTS:
            raise ValueError(f"unknown LEN4_H121 variant {variant!r}")
        return (("variant", variant),)
    if family == Family.PRODUCT:
        return (("a", int(raw.get("a") or 1)), ("b", int(raw.get("b") or 4)))
    return ()
