"""Random constructible inputs for property tests."""

import random
from fractions import Fraction as F
from math import ceil, floor

from hypothesis import strategies as st

from kstar_fano.construction import ConstructionError, FamilyInput, assemble_P
from kstar_fano.criteria import nontoric_constraints


def _draw(rng: random.Random, t: str) -> FamilyInput:
    n = rng.choice([3, 3, 3, 4])
    d = [rng.randint(2 if (t == "C" and k == 0) else 1, 4) for k in range(n - 2)]
    dd = [1, 1, 1] + d
    top = rng.choice([2, 4, 6, 12])
    r = lambda: rng.randint(1, top)  # noqa: E731
    if t == "A":
        l = [r() for _ in range(n + 1)]
        s = [0] + [rng.randrange(x) for x in l[1:]]
        if rng.random() < 0.5:
            for i in range(3, n + 1):
                s[i] = 1 % l[i]
        S = sum(F(dd[i] * s[i], l[i]) for i in range(1, n + 1))
        lo = floor(S * l[0]) + 1
        s[0] = rng.randint(lo, lo + 3 * l[0])
    elif t == "B":
        l = [r() for _ in range(n + 2)]
        s = [0, 0] + [rng.randrange(x) for x in l[2:]]
        S = sum(F(dd[i] * s[i + 1], l[i + 1]) for i in range(1, n + 1))
        hi = ceil(S * l[0]) - 1
        s[0] = rng.randint(hi - 3 * l[0], hi)
        lo = floor(S * l[1]) + 1
        s[1] = rng.randint(lo, lo + 3 * l[1])
    else:
        l = [r() for _ in range(n + 2)]
        s = [0] + [rng.randrange(x) for x in l[1:]]
        pos = {1: 1, 2: 2, **{i: i + 1 for i in range(4, n + 1)}}
        s[0] = rng.randint(0, 4 * l[0])
        M = F(s[0], l[0]) - F(s[1], l[1]) - F(s[2], l[2])
        M -= sum(F(dd[i] * s[pos[i]], l[pos[i]]) for i in range(4, n + 1))
        lo = floor(M * l[4] / d[0]) + 1
        s[4] = rng.randint(lo, lo + 3 * l[4])
    return FamilyInput(t, tuple(d), tuple(l), tuple(s))


def random_family(rng: random.Random, types="ABC", nontoric=True) -> FamilyInput:
    """A constructible input (primitive, distinct columns, positivity holds)."""
    while True:
        t = rng.choice(types)
        try:
            fam = _draw(rng, t)
            assemble_P(fam)
        except (ConstructionError, ValueError):
            continue
        if nontoric and not nontoric_constraints(fam):
            continue
        return fam


def families(types="ABC", nontoric=True):
    return st.integers(0, 2**32 - 1).map(lambda seed: random_family(random.Random(seed), types, nontoric))
