"""Anticanonical degree, graded dimensions and the Hilbert series numerator.

Dimensions of graded pieces of the Cox ring are counted as for a complete
intersection: monomials of the target degree, with inclusion-exclusion over
the relations.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from math import comb, prod

from .construction import (
    FamilyInput,
    Grading,
    assemble_P,
    fake_weights,
    grading,
    relation_degrees,
    relation_template,
)
from .criteria import (
    GorensteinCertificate,
    anticanonical_class,
    is_gorenstein_closed_form,
    nontoric_constraints,
)
from .exact_arith import AbelElem


class NonIntegerDegree(ArithmeticError):
    pass


@dataclass
class FamilyRecord:
    input: FamilyInput
    grading: Grading = field(repr=False)
    relation_degrees: list
    anti_k: AbelElem
    degree_cubed: int = 0
    hilbert_values: tuple = ()
    hilbert_numerator: tuple = ()
    template: list = field(default_factory=list)
    g_flags: tuple = ()
    certificate: GorensteinCertificate | None = field(default=None, repr=False)
    id: int | None = None

    @property
    def type(self) -> str:
        return self.input.type

    @property
    def weights(self) -> list[AbelElem]:
        return list(self.grading.degrees.values())

    def degree_matrix(self) -> list[list[int]]:
        """Free row followed by one row per torsion factor."""
        w = self.weights
        rows = [[x.free[0] for x in w]]
        for k in range(len(self.grading.K.torsion)):
            rows.append([x.torsion[k] for x in w])
        return rows


def _context(fam) -> tuple[FamilyInput, Grading, list, AbelElem]:
    if isinstance(fam, FamilyRecord):
        return fam.input, fam.grading, fam.relation_degrees, fam.anti_k
    g = grading(assemble_P(fam))
    return fam, g, relation_degrees(fam, g), anticanonical_class(fam, g)


def degree_cubed(fam) -> int:
    inp, g, rels, k = _context(fam)
    wx = k.free[0]
    value = Fraction(wx**3 * prod(r.free[0] for r in rels), g.K.order_torsion * prod(g.free_parts()))
    if value.denominator != 1:
        raise NonIntegerDegree(f"{inp}: -K^3 = {value}")
    return int(value)


def degree_cubed_product(fam) -> Fraction:
    """The per-type product formula for -K^3; for type C it differs from the CI value."""
    inp, g, _, k = _context(fam)
    wx = k.free[0]
    w = {lab: g[lab].free[0] for lab in inp.labels}
    l = dict(zip(inp.labels, inp.l))
    n, tors = inp.n, g.K.order_torsion
    if inp.type == "A":
        num = prod(l[f"{i}1"] for i in range(3, n + 1))
        den = w["01"] * w["11"] * w["21"] * w["S1"]
    elif inp.type == "B":
        num = prod(l[f"{i}1"] for i in range(3, n + 1))
        den = w["01"] * w["02"] * w["11"] * w["21"]
    else:
        num = l["31"] * l["32"] * prod(l[f"{i}1"] for i in range(4, n + 1))
        den = w["01"] * w["11"] * w["21"]
    return Fraction(wx**3 * num, tors * den)


class _Counter:
    """Number of monomials of each degree up to a free bound, for one grading."""

    def __init__(self, g: Grading, bound: int):
        self.mods = g.K.torsion
        self.size = prod(self.mods) if self.mods else 1
        self.bound = bound
        table = [[0] * self.size for _ in range(bound + 1)]
        table[0][0] = 1
        for w in g.degrees.values():
            step, shift = w.free[0], self._index(w.torsion)
            if step <= 0:
                raise ValueError("free weights must be positive")
            for f in range(step, bound + 1):
                src, dst = table[f - step], table[f]
                for t in range(self.size):
                    c = src[t]
                    if c:
                        dst[self._add(t, shift)] += c
        self.table = table

    def _index(self, tors) -> int:
        idx = 0
        for x, a in zip(tors, self.mods):
            idx = idx * a + x % a
        return idx

    def _digits(self, idx):
        out = []
        for a in reversed(self.mods):
            out.append(idx % a)
            idx //= a
        return out[::-1]

    def _add(self, i, j):
        return self._index([x + y for x, y in zip(self._digits(i), self._digits(j))])

    def count(self, e: AbelElem) -> int:
        f = e.free[0]
        if f < 0:
            return 0
        if f > self.bound:
            raise ValueError("degree beyond the precomputed bound")
        return self.table[f][self._index(e.torsion)]


@lru_cache(maxsize=512)
def _counter(key, bound):
    fam = FamilyInput(*key)
    return _Counter(grading(assemble_P(fam)), bound)


def graded_dimension(fam, target: AbelElem) -> int:
    inp, g, rels, _ = _context(fam)
    if target.free[0] < 0:
        return 0
    counter = _counter(inp.key(), max(target.free[0], 1))
    total = 0
    for r in range(len(rels) + 1):
        for sub in combinations(rels, r):
            shifted = target
            for h in sub:
                shifted = shifted - h
            total += (-1) ** r * counter.count(shifted)
    return total


def hilbert_values(fam, top: int = 3) -> tuple[int, ...]:
    _, _, _, k = _context(fam)
    return tuple(graded_dimension(fam, k.scale(m)) for m in range(top + 1))


def numerator_from_values(h) -> tuple[int, ...]:
    """Coefficients n_0..n_3 of N(t) with sum h(m) t^m = N(t)/(1-t)^4."""
    return tuple(sum((-1) ** j * comb(4, j) * h[k - j] for j in range(k + 1)) for k in range(4))


def values_from_numerator(num, top: int = 3) -> tuple[int, ...]:
    # coefficient of t^m in 1/(1-t)^4 is C(m+3, 3)
    return tuple(sum(num[j] * comb(m - j + 3, 3) for j in range(min(m, len(num) - 1) + 1)) for m in range(top + 1))


def hilbert_numerator(fam) -> tuple[int, ...]:
    h = hilbert_values(fam)
    num = numerator_from_values(h)
    assert values_from_numerator(num) == h
    return num


def rr_value(m: int, degree: int) -> Fraction:
    return (2 * m + 1) * (1 + Fraction(m * (m + 1) * degree, 12))


def rr_check(fam) -> bool:
    deg = fam.degree_cubed if isinstance(fam, FamilyRecord) else degree_cubed(fam)
    h = fam.hilbert_values if isinstance(fam, FamilyRecord) and fam.hilbert_values else hilbert_values(fam)
    return all(h[m] == rr_value(m, deg) for m in range(4))


def build_record(fam: FamilyInput) -> FamilyRecord:
    gm = assemble_P(fam)
    fake_weights(gm)
    g = grading(gm)
    rels = relation_degrees(fam, g)
    k = anticanonical_class(fam, g)
    rec = FamilyRecord(fam, g, rels, k)
    rec.degree_cubed = degree_cubed(rec)
    rec.hilbert_values = hilbert_values(rec)
    rec.hilbert_numerator = numerator_from_values(rec.hilbert_values)
    rec.template = relation_template(fam)
    rec.g_flags = nontoric_constraints(fam).g_flags
    rec.certificate = is_gorenstein_closed_form(fam)[1]
    return rec
