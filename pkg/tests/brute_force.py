"""Naive Type A search over a raw box, judged by the cone oracle.

Box: sorted degree vectors with d_3 + ... + d_n <= 7, every exponent at most
a cap depending on n, and (1 + d01)/l01 <= 6. Shifts of the arms 1..n are
taken in [0, l), which every family can be brought to. Two single-cone
Cartier conditions are read off directly instead of being looped over: the
cone spanned by v11, ..., vn1 and the S1 ray forces d_i1 = kappa_i mod l_i1,
and the cone without v11 forces l01 | 1 + d01.

Cheap integer prefilters (positivity, Fano, Cartier on the cone over all
arms) run first; survivors go through the library checks and the full
cone oracle.
"""

from itertools import combinations_with_replacement, product
from math import lcm

from kstar_fano.construction import ConstructionError, FamilyInput, assemble_P
from kstar_fano.criteria import is_fano, is_gorenstein_cone_oracle, nontoric_constraints, normal_form

CAPS = {3: 42, 4: 24, 5: 12}
DEFAULT_CAP = 8


def degree_vectors(total=7):
    for n in range(1, total + 1):
        for d in combinations_with_replacement(range(1, total + 1), n):
            if sum(d) <= total:
                yield d


def tails(d, cap):
    """Exponent tuples >= 2, non-decreasing inside blocks of equal degree."""
    def rec(i, prev, acc):
        if i == len(d):
            yield tuple(acc)
            return
        lo = prev if i and d[i] == d[i - 1] else 2
        for l in range(lo, cap + 1):
            yield from rec(i + 1, l, acc + [l])
    yield from rec(0, 2, [])


def _prefilter(dd, ls, shifts, L):
    """Positivity, Fano and Cartier on the all-arms cone, scaled by L."""
    l0, s0 = ls[0], shifts[0]
    rest = range(1, len(ls))
    ds = sum(dd[i] * shifts[i] * (L // ls[i]) for i in rest)
    if s0 * (L // l0) <= ds:
        return False
    D = sum(dd[3:])
    fano = (s0 + 1) * (L // l0) - sum(dd[i] * (shifts[i] - 1) * (L // ls[i]) for i in rest) - D * L
    if fano <= 0:
        return False
    # with u_n = t: u_{i-1} = (kappa_i - s_i t)/l_i and the v01 row fixes t
    kappa = [1, 1, 1] + [1 - x for x in ls[3:]]
    num = L + l0 * sum(dd[i] * kappa[i] * (L // ls[i]) for i in rest)
    den = l0 * ds - s0 * L
    if den == 0 or num % den:
        return False
    t = num // den
    return all((kappa[i] - shifts[i] * t) % ls[i] == 0 for i in rest)


def brute_force_type_a(caps=CAPS, default_cap=DEFAULT_CAP):
    """Normal forms found, keyed by FamilyInput.key(), and the number of boxes points visited."""
    found = {}
    visited = 0
    for d in degree_vectors():
        n = len(d) + 2
        dd = (1, 1, 1) + d
        cap = caps.get(n, default_cap)
        for l0, l1, l2 in product(range(1, cap + 1), repeat=3):
            if not l0 <= l1 <= l2:
                continue
            for lt in tails(d, cap):
                ls = (l0, l1, l2, *lt)
                L = lcm(*ls)
                kappa = [1, 1] + [1 - l for l in lt]
                rest = tuple(k % l for k, l in zip(kappa, ls[1:]))
                for k in range(1, 7):
                    visited += 1
                    shifts = (k * l0 - 1, *rest)
                    if not _prefilter(dd, ls, shifts, L):
                        continue
                    fam = FamilyInput("A", d, ls, shifts)
                    try:
                        assemble_P(fam)
                    except ConstructionError:
                        continue
                    if not is_fano(fam) or not nontoric_constraints(fam):
                        continue
                    if is_gorenstein_cone_oracle(fam):
                        nf = normal_form(fam)
                        found[nf.key()] = nf
    return found, visited
