"""Exact integer matrix tools: Smith normal form, cokernels, maximal minors.

Matrices are plain lists of rows of Python ints. Nothing here touches floats.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import gcd
from typing import Sequence

Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a: Sequence[Sequence[int]], b: Sequence[Sequence[int]]) -> Matrix:
    if not a or len(a[0]) != len(b):
        raise ValueError("dimension mismatch")
    cols = list(zip(*b))
    return [[sum(x * y for x, y in zip(row, col)) for col in cols] for row in a]


def transpose(m: Sequence[Sequence[int]]) -> Matrix:
    return [list(c) for c in zip(*m)]


def _check(m: Sequence[Sequence[int]]) -> Matrix:
    if not m or not m[0]:
        raise ValueError("matrix must be nonempty")
    width = len(m[0])
    if any(len(r) != width for r in m):
        raise ValueError("ragged matrix")
    return [[int(x) for x in r] for r in m]


@dataclass(frozen=True)
class SnfResult:
    U: Matrix
    D: Matrix
    V: Matrix

    @property
    def diagonal(self) -> list[int]:
        return [self.D[i][i] for i in range(min(len(self.D), len(self.D[0])))]


def snf(m: Sequence[Sequence[int]]) -> SnfResult:
    """Smith normal form with U*M*V = D.

    The pivot is always the smallest nonzero absolute value in the remaining
    block, ties going to the lowest (row, col), so output is deterministic.
    """
    a = _check(m)
    rows, cols = len(a), len(a[0])
    u = identity(rows)
    v = identity(cols)

    def swap_rows(i, j):
        a[i], a[j] = a[j], a[i]
        u[i], u[j] = u[j], u[i]

    def swap_cols(i, j):
        for r in a:
            r[i], r[j] = r[j], r[i]
        for r in v:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, c):
        # row dst += c * row src
        a[dst] = [x + c * y for x, y in zip(a[dst], a[src])]
        u[dst] = [x + c * y for x, y in zip(u[dst], u[src])]

    def add_col(src, dst, c):
        for r in a:
            r[dst] += c * r[src]
        for r in v:
            r[dst] += c * r[src]

    for t in range(min(rows, cols)):
        while True:
            best = None
            for i in range(t, rows):
                for j in range(t, cols):
                    x = abs(a[i][j])
                    if x and (best is None or x < best[0]):
                        best = (x, i, j)
            if best is None:
                return SnfResult(u, a, v)
            _, i, j = best
            if i != t:
                swap_rows(i, t)
            if j != t:
                swap_cols(j, t)
            p = a[t][t]
            dirty = False
            for i in range(t + 1, rows):
                if a[i][t]:
                    add_row(t, i, -(a[i][t] // p))
                    dirty = dirty or a[i][t] != 0
            for j in range(t + 1, cols):
                if a[t][j]:
                    add_col(t, j, -(a[t][j] // p))
                    dirty = dirty or a[t][j] != 0
            if dirty:
                continue
            bad = next(
                (i for i in range(t + 1, rows) for j in range(t + 1, cols) if a[i][j] % p),
                None,
            )
            if bad is None:
                break
            add_row(bad, t, 1)
        if a[t][t] < 0:
            a[t] = [-x for x in a[t]]
            u[t] = [-x for x in u[t]]
    return SnfResult(u, a, v)


def invariant_factors(m: Sequence[Sequence[int]]) -> list[int]:
    """Nonzero diagonal entries of the Smith form."""
    return [d for d in snf(m).diagonal if d]


@dataclass(frozen=True)
class AbelGroup:
    rank: int
    torsion: tuple[int, ...] = ()

    def __post_init__(self):
        if self.rank < 0 or any(a < 2 for a in self.torsion):
            raise ValueError("bad abelian group data")
        for a, b in zip(self.torsion, self.torsion[1:]):
            if b % a:
                raise ValueError("torsion must form a divisibility chain")

    @property
    def order_torsion(self) -> int:
        out = 1
        for a in self.torsion:
            out *= a
        return out

    def elem(self, free: Sequence[int], torsion: Sequence[int] = ()) -> "AbelElem":
        if len(free) != self.rank or len(torsion) != len(self.torsion):
            raise ValueError("element does not fit group")
        return AbelElem(tuple(free), tuple(x % a for x, a in zip(torsion, self.torsion)), self.torsion)

    def zero(self) -> "AbelElem":
        return self.elem([0] * self.rank, [0] * len(self.torsion))

    def __str__(self):
        parts = ["Z"] * self.rank + [f"Z/{a}" for a in self.torsion]
        return " + ".join(parts) if parts else "0"


@dataclass(frozen=True)
class AbelElem:
    free: tuple[int, ...]
    torsion: tuple[int, ...]
    moduli: tuple[int, ...]

    def __add__(self, other: "AbelElem") -> "AbelElem":
        self._same(other)
        return AbelElem(
            tuple(x + y for x, y in zip(self.free, other.free)),
            tuple((x + y) % a for x, y, a in zip(self.torsion, other.torsion, self.moduli)),
            self.moduli,
        )

    def __neg__(self) -> "AbelElem":
        return self.scale(-1)

    def __sub__(self, other: "AbelElem") -> "AbelElem":
        return self + (-other)

    def scale(self, c: int) -> "AbelElem":
        return AbelElem(
            tuple(c * x for x in self.free),
            tuple((c * x) % a for x, a in zip(self.torsion, self.moduli)),
            self.moduli,
        )

    def __rmul__(self, c: int) -> "AbelElem":
        return self.scale(c)

    def is_zero(self) -> bool:
        return not any(self.free) and not any(self.torsion)

    def _same(self, other):
        if self.moduli != other.moduli or len(self.free) != len(other.free):
            raise ValueError("elements live in different groups")

    def __str__(self):
        bits = [str(x) for x in self.free] + [f"{x}bar" for x in self.torsion]
        return "(" + ", ".join(bits) + ")"


@dataclass(frozen=True)
class Projection:
    """Linear map Z^cols -> cokernel, given by the columns of V that survive."""

    group: AbelGroup
    free_cols: tuple[tuple[int, ...], ...]  # one coefficient vector per free coordinate
    tors_cols: tuple[tuple[int, ...], ...]

    def __call__(self, x: Sequence[int]) -> AbelElem:
        free = [sum(a * b for a, b in zip(x, c)) for c in self.free_cols]
        tors = [sum(a * b for a, b in zip(x, c)) for c in self.tors_cols]
        return self.group.elem(free, tors)

    def basis_images(self, n: int) -> list[AbelElem]:
        return [self([int(i == j) for j in range(n)]) for i in range(n)]

    def negate_free(self) -> "Projection":
        return Projection(
            self.group, tuple(tuple(-x for x in c) for c in self.free_cols), self.tors_cols
        )


def cokernel(m: Sequence[Sequence[int]]) -> tuple[AbelGroup, Projection]:
    """Z^cols modulo the row space of m."""
    res = snf(m)
    cols = len(res.V)
    diag = res.diagonal
    diag = diag + [0] * (cols - len(diag))
    vcols = transpose(res.V)
    free, tors, mods = [], [], []
    for k, dk in enumerate(diag):
        if dk == 0:
            free.append(tuple(vcols[k]))
        elif dk > 1:
            tors.append(tuple(vcols[k]))
            mods.append(dk)
    group = AbelGroup(len(free), tuple(mods))
    return group, Projection(group, tuple(free), tuple(tors))


def det(m: Sequence[Sequence[int]]) -> int:
    """Fraction-free Bareiss elimination."""
    a = [list(r) for r in m]
    n = len(a)
    if any(len(r) != n for r in a):
        raise ValueError("matrix must be square")
    if n == 0:
        return 1
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def max_minors(m: Sequence[Sequence[int]]) -> list[int]:
    """Absolute values of the minors obtained by deleting one column each."""
    a = _check(m)
    rows, cols = len(a), len(a[0])
    if cols != rows + 1:
        raise ValueError("need exactly one more column than rows")
    return [abs(det([r[:i] + r[i + 1:] for r in a])) for i in range(cols)]


def vec_gcd(v: Sequence[int]) -> int:
    g = 0
    for x in v:
        g = gcd(g, x)
    return g


def is_primitive(v: Sequence[int]) -> bool:
    g = vec_gcd(v)
    if g == 0:
        raise ValueError("zero vector")
    return g == 1
