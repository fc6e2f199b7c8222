"""Bounded searches reproducing the classification.

Type A reduces to one unit fraction equation per (k, degree vector) and is
complete without any cap. Types B and C are parametrised by their single
arms; everything else is then forced into a finite set through divisibility,
so the only cap is on the exponents of single arms (see ``arm_cap``).

Notation shared by B and C: the double arm has exponents l_a < l_b
(01, 02 in B; 31, 32 in C) and c = 1 (B) or c = d_3 (C). F is the sum of
coefficient/exponent over the single arms, m - D is the free part of -K in
units of the common weight, and x = m - F must satisfy c/l_b < x < c/l_a.
"""

from __future__ import annotations

import logging
from collections import Counter
from fractions import Fraction
from itertools import combinations_with_replacement
from math import gcd, lcm

from .construction import ConstructionError, FamilyInput, assemble_P
from .criteria import (
    is_fano,
    is_gorenstein_closed_form,
    is_gorenstein_cone_oracle,
    nontoric_constraints,
    normal_form,
)
from .invariants import FamilyRecord, build_record, rr_check

log = logging.getLogger(__name__)

F = Fraction

# counts per (n, sorted d) -> (A, B, C)
EXPECTED_TABLE = {
    (3, (1,)): (17, 56, 0),
    (3, (2,)): (14, 8, 22),
    (3, (3,)): (7, 2, 6),
    (3, (4,)): (2, 0, 3),
    (3, (5,)): (1, 0, 0),
    (3, (6,)): (0, 0, 1),
    (4, (1, 1)): (4, 3, 0),
    (4, (1, 2)): (1, 0, 1),
    (4, (2, 2)): (2, 0, 1),
    (4, (2, 3)): (1, 0, 1),
    (5, (1, 1, 1)): (1, 0, 0),
}

DEFAULT_ARM_CAP = 60
DEFAULT_D3_CAP = 12


class CountMismatch(AssertionError):
    def __init__(self, expected, got):
        super().__init__(f"expected {expected}, got {got}")
        self.expected = expected
        self.got = got


# ---------------------------------------------------------------- unit fractions

def unit_fraction_solutions(a, q, lower=None) -> set[tuple[int, ...]]:
    """All positive integer x with sum a_i/x_i = q and x_i >= lower_i.

    At every step the variable carrying the largest remaining term is
    guessed; that term is at least (remaining target)/(variables left),
    which bounds the variable, as in the classical sorted recursion.
    """
    a = tuple(int(x) for x in a)
    q = F(q)
    lower = tuple(lower) if lower is not None else (1,) * len(a)
    if not a or q <= 0 or any(x < 1 for x in a):
        raise ValueError("need positive coefficients and a positive target")
    out: set[tuple[int, ...]] = set()

    def rec(free, r, cap, partial):
        k = len(free)
        if k == 1:
            i = free[0]
            x = F(a[i]) / r
            if x.denominator == 1 and x >= lower[i] and (cap is None or F(a[i], x.numerator) <= cap):
                sol = dict(partial)
                sol[i] = x.numerator
                out.add(tuple(sol[j] for j in range(len(a))))
            return
        for i in free:
            rest = tuple(j for j in free if j != i)
            # a_i/x >= r/k  and  a_i/x < r  and  a_i/x <= cap
            hi = (k * a[i]) // r
            lo = max(lower[i], a[i] // r + 1)
            if cap is not None:
                lo = max(lo, -(-a[i] // cap))
            for x in range(int(lo), int(hi) + 1):
                term = F(a[i], x)
                r2 = r - term
                # remaining terms are at most `term` each
                if r2 <= 0 or r2 > (k - 1) * term:
                    continue
                rec(rest, r2, term, partial + ((i, x),))

    rec(tuple(range(len(a))), q, None, ())
    return out


# ---------------------------------------------------------------- shared helpers

def _passes(fam: FamilyInput) -> bool:
    try:
        assemble_P(fam)
    except ConstructionError:
        return False
    if not nontoric_constraints(fam) or not is_fano(fam):
        return False
    ok, _ = is_gorenstein_closed_form(fam)
    if ok != is_gorenstein_cone_oracle(fam):
        raise AssertionError(f"closed form and cone oracle disagree on {fam}")
    return ok


def _degree_vectors(total_max, min_entry=1):
    """Sorted degree vectors with entries >= min_entry and sum <= total_max."""
    out = []
    for length in range(1, total_max + 1):
        for d in combinations_with_replacement(range(min_entry, total_max + 1), length):
            if sum(d) <= total_max:
                out.append(d)
    return out


def _factor(n: int) -> Counter:
    f = Counter()
    p = 2
    while p * p <= n:
        while n % p == 0:
            f[p] += 1
            n //= p
        p += 1
    if n > 1:
        f[n] += 1
    return f


def _divisors(*factors: int) -> list[int]:
    f = Counter()
    for x in factors:
        f += _factor(abs(x))
    divs = [1]
    for p, e in f.items():
        divs = [d * p**k for d in divs for k in range(e + 1)]
    return divs


def _inverse(a: int, m: int) -> int | None:
    if m == 1:
        return 0
    if gcd(a, m) != 1:
        return None
    return pow(a, -1, m)


# ---------------------------------------------------------------- type A

def enumerate_type_a() -> list[FamilyInput]:
    """Complete list of normal-form type A families.

    With k = (1 + d01)/l01, E = #{i in 1,2 : l_i1 = 1}, D = sum d_j and
    N = k + E - D (the free part of -K in units of the common weight) the
    Gorenstein and Fano conditions become N >= 1 and

        1/l01 + sum_{i=1,2; l_i1>1} 1/l_i1 + sum_j d_j/l_j1 + N/alpha = k

    with alpha a positive multiple of lcm(l11, ..., ln1). Since every term
    except possibly 1/l01 is at most half its coefficient, k <= 2 + 2/l01.
    """
    found: dict[tuple, FamilyInput] = {}
    patterns = [(1, 1), (1, 2), (2, 2)]  # which of l11, l21 are 1 (1) or >= 2 (2)
    for p11, p21 in patterns:
        E = (p11 == 1) + (p21 == 1)
        free_l01 = E == 0
        for k in range(1, 5):
            for d in _degree_vectors(k + E - 1):
                N = k + E - sum(d)
                if N < 1:
                    continue
                coeffs, lows, names = [], [], []
                target = F(k)
                if free_l01:
                    coeffs.append(1); lows.append(1); names.append("l01")
                else:
                    target -= 1
                for nm, p in (("l11", p11), ("l21", p21)):
                    if p == 2:
                        coeffs.append(1); lows.append(2); names.append(nm)
                for j, dj in enumerate(d):
                    coeffs.append(dj); lows.append(2); names.append(f"l{j + 3}1")
                coeffs.append(N); lows.append(2); names.append("alpha")
                if target <= 0:
                    continue
                for sol in unit_fraction_solutions(coeffs, target, lows):
                    val = dict(zip(names, sol))
                    l01 = val.get("l01", 1)
                    l11 = val.get("l11", 1)
                    l21 = val.get("l21", 1)
                    if not (l21 >= l11 >= l01):
                        continue
                    lj = [val[f"l{j + 3}1"] for j in range(len(d))]
                    if val["alpha"] % lcm(l11, l21, *lj):
                        continue
                    ls = (l01, l11, l21, *lj)
                    shifts = (k * l01 - 1, min(1, l11 - 1), min(1, l21 - 1)) + (1,) * len(d)
                    fam = FamilyInput("A", d, ls, shifts)
                    if _passes(fam):
                        nf = normal_form(fam)
                        found[nf.key()] = nf
    return [found[k] for k in sorted(found)]


# ---------------------------------------------------------------- types B and C

def _single_shift(mu: int, l: int, plus: bool):
    """Shift d in [0, l) with mu*d = 1 (plus=False) or -1 (plus=True) mod l, and lambda."""
    inv = _inverse(mu % l if l > 1 else 0, l)
    if inv is None:
        return None
    d = (-inv) % l if plus else inv % l
    lam = (mu * d + 1) // l if plus else (mu * d - 1) // l
    return d, lam


def _double_arm_search(singles, c, D, build, lcm_with_double):
    """Candidates for fixed single arms, as FamilyInputs (unvalidated).

    ``singles`` is a list of (l, coef). The integer A = mu (m - D)/(c/l_a - x)
    must be a multiple of lcm(L, l_a) (type C) or L (type B), where L is the
    lcm of the single exponents; likewise B = mu (m - D)/(x - c/l_b) with l_b.
    Writing x = p/q and t = p l_b - c q, integrality of B forces t to divide
    (c q - p l_a) c q^2 (m - D), which bounds l_b. Then mu divides l_b - l_a.
    """
    Fsum = sum(F(coef, l) for l, coef in singles)
    L = lcm(*(l for l, _ in singles))
    m = D + 1
    while m < Fsum + c:
        x = m - Fsum
        m += 1
        if x <= 0:
            continue
        p, q = x.numerator, x.denominator
        k = m - 1 - D
        la = 1
        while F(c, la) > x:
            E = c * q - p * la
            Ma = lcm(L, la) if lcm_with_double else L
            mu0 = F(Ma * E, k * q * la).numerator
            for t in _divisors(E, c, q, q, k):
                if (t + c * q) % p:
                    continue
                lb = (t + c * q) // p
                if lb <= la:
                    continue
                Mb = lcm(L, lb) if lcm_with_double else L
                for mu in _divisors(lb - la):
                    if mu % mu0:
                        continue
                    Bq = F(mu * k * q * lb, t)
                    if Bq.denominator != 1 or Bq.numerator % Mb:
                        continue
                    fam = build(la, lb, mu, (lb - la) // mu, m - 1)
                    if fam is not None:
                        yield fam
            la += 1


def _arm_tuples(coefs, lows, chain, cap, threshold):
    """Exponent tuples with sum coef/l > threshold, l <= cap.

    ``chain[i]`` is an index j < i with l_i >= l_j, or None.
    """
    best_rest = [sum(F(c, lo) for c, lo in zip(coefs[i:], lows[i:])) for i in range(len(coefs) + 1)]

    def rec(i, acc, partial):
        if i == len(coefs):
            if acc > threshold:
                yield tuple(partial)
            return
        lo = lows[i] if chain[i] is None else max(lows[i], partial[chain[i]])
        for l in range(lo, cap + 1):
            if acc + F(coefs[i], l) + best_rest[i + 1] <= threshold:
                break
            partial.append(l)
            yield from rec(i + 1, acc + F(coefs[i], l), partial)
            partial.pop()

    yield from rec(0, F(0), [])


def _tail_chain(d, offset):
    """Within blocks of equal degree the exponents are non-decreasing."""
    return [offset + i - 1 if i > 0 and d[i] == d[i - 1] else None for i in range(len(d))]


def _build_b(d, l11, l21, lj):
    singles = [(l11, 1), (l21, 1)] + [(l, dj) for l, dj in zip(lj, d)]

    def make(la, lb, mu, s, m):
        shifts, Lam = [], 0
        for l, coef in singles:
            r = _single_shift(mu, l, plus=False)
            if r is None:
                return None
            shifts.append(r[0])
            Lam += coef * r[1]
        nu = m + Lam
        if (la * nu - 1) % mu:
            return None
        da = (la * nu - 1) // mu
        db = da + s * nu
        return FamilyInput("B", d, (la, lb, l11, l21, *lj), (da, db, *shifts))

    return singles, make


def _build_c(d, l01, l11, l21, lj):
    d3, rest = d[0], d[1:]
    singles = [(l01, 1), (l11, 1), (l21, 1)] + [(l, di) for l, di in zip(lj, rest)]

    def make(la, lb, mu, s, m):
        shifts, Lam = [], 0
        for l, coef in singles[1:]:
            r = _single_shift(mu, l, plus=True)
            if r is None:
                return None
            shifts.append(r[0])
            Lam += coef * r[1]
        r = _single_shift(mu, la, plus=True)
        if r is None:
            return None
        d31, nu = r[0], (mu * r[0] + 1) // la
        lam0 = d3 * nu + Lam - m
        if (l01 * lam0 + 1) % mu:
            return None
        d01 = (l01 * lam0 + 1) // mu
        d32 = d31 + s * nu
        return FamilyInput("C", d, (l01, l11, l21, la, lb, *lj),
                           (d01, shifts[0], shifts[1], d31, d32, *shifts[2:]))

    return singles, make


def _collect(fams, found):
    for fam in fams:
        if _passes(fam):
            nf = normal_form(fam)
            found[nf.key()] = nf


def enumerate_type_b(arm_cap: int = DEFAULT_ARM_CAP) -> list[FamilyInput]:
    """Type B families whose single-arm exponents are at most ``arm_cap``.

    F > D is forced (Fano) and F <= 2 + D/2, so D <= 3.
    """
    found: dict[tuple, FamilyInput] = {}
    for d in _degree_vectors(3):
        D = sum(d)
        coefs = [1, 1, *d]
        lows = [1, 2 if 1 in d else 1] + [2] * len(d)
        chain = [None, 0] + _tail_chain(d, 2)
        for ls in _arm_tuples(coefs, lows, chain, arm_cap, D):
            l11, l21, *lj = ls
            singles, make = _build_b(d, l11, l21, lj)
            if sum(F(c, l) for l, c in singles).denominator == 1:
                continue
            _collect(_double_arm_search(singles, 1, D, make, False), found)
    return [found[k] for k in sorted(found)]


def _type_c_equal_arms(d3_cap):
    """Double arm with l31 = l32: everything else is forced to exponent one."""
    for d3 in range(2, d3_cap + 1):
        for s in range(1, 7):
            for d01 in range(1, d3 * s):
                yield FamilyInput("C", (d3,), (1, 1, 1, 1, 1), (d01, 0, 0, 0, s))


def enumerate_type_c(arm_cap: int = DEFAULT_ARM_CAP, d3_cap: int = DEFAULT_D3_CAP) -> list[FamilyInput]:
    """Type C families with single-arm exponents <= arm_cap and d3 <= d3_cap.

    With x < d3/l31 and m >= D + 1 one gets F > D' + 1 where D' = d4 + ... + dn,
    so D' <= 3; and d3 <= 3 unless l31 = 1.
    """
    found: dict[tuple, FamilyInput] = {}
    _collect(_type_c_equal_arms(d3_cap), found)
    for tail in [()] + _degree_vectors(3):
        Dp = sum(tail)
        coefs = [1, 1, 1, *tail]
        lows = [1, 1, 1] + [2] * len(tail)
        chain = [None, 0, 1] + _tail_chain(tail, 3)  # l11 <= l21 <= l01
        for l11, l21, l01, *lj in _arm_tuples(coefs, lows, chain, arm_cap, Dp + 1):
            if 1 in tail and sum(x >= 2 for x in (l01, l11, l21)) < 2:
                continue
            for d3 in range(2, d3_cap + 1):
                d = (d3, *tail)
                singles, make = _build_c(d, l01, l11, l21, lj)
                _collect(_double_arm_search(singles, d3, d3 + Dp, make, True), found)
    return [found[k] for k in sorted(found)]


# ---------------------------------------------------------------- classification

def invariant_key(rec: FamilyRecord) -> tuple:
    """Isomorphism invariants used to merge families found more than once."""
    inp = rec.input
    slots = sorted(zip(inp.labels, inp.l), key=lambda t: t[0])
    return (inp.type, inp.n, tuple(sorted(inp.d)), tuple(sorted(inp.l)),
            tuple(l for _, l in slots if _.startswith(("0", "1", "2"))),
            rec.grading.K.torsion, rec.degree_cubed, rec.hilbert_numerator)


def sort_key(rec: FamilyRecord) -> tuple:
    inp = rec.input
    return (inp.type, inp.n, inp.d, -rec.degree_cubed, rec.hilbert_numerator, tuple(sorted(inp.l)), inp.key())


def count_table(records) -> dict:
    """(n, d) -> (#A, #B, #C), over every row of the expected table and any extra row."""
    table = {key: [0, 0, 0] for key in EXPECTED_TABLE}
    for rec in records:
        row = table.setdefault((rec.input.n, tuple(sorted(rec.input.d))), [0, 0, 0])
        row["ABC".index(rec.type)] += 1
    return {k: tuple(v) for k, v in table.items()}


def count_differences(counts: dict) -> dict:
    """Rows where ``counts`` and the expected table disagree: key -> (expected, got)."""
    out = {}
    for key in sorted(set(counts) | set(EXPECTED_TABLE)):
        want, got = EXPECTED_TABLE.get(key, (0, 0, 0)), counts.get(key, (0, 0, 0))
        if want != got:
            out[key] = (want, got)
    return out


def totals(counts: dict) -> tuple[int, int, int]:
    return tuple(sum(row[i] for row in counts.values()) for i in range(3))


def classify_all(arm_cap: int = DEFAULT_ARM_CAP, d3_cap: int = DEFAULT_D3_CAP, check: bool = True):
    """Records of all families in stable id order, and the count table.

    With ``check`` a CountMismatch is raised when the counts differ from
    EXPECTED_TABLE; pass ``check=False`` to inspect the result anyway.
    """
    fams = enumerate_type_a() + enumerate_type_b(arm_cap) + enumerate_type_c(arm_cap, d3_cap)
    merged: dict[tuple, FamilyRecord] = {}
    for fam in fams:
        rec = build_record(fam)
        if not rr_check(rec):
            raise AssertionError(f"Riemann-Roch fails for {fam}")
        key = invariant_key(rec)
        if key in merged:
            log.debug("merging %s into %s", fam, merged[key].input)
            continue
        merged[key] = rec
    records = sorted(merged.values(), key=sort_key)
    for i, rec in enumerate(records, 1):
        rec.id = i
    counts = count_table(records)
    if check and count_differences(counts):
        diff = count_differences(counts)
        raise CountMismatch({k: v[0] for k, v in diff.items()}, {k: v[1] for k, v in diff.items()})
    return records, counts
