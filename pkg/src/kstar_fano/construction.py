"""Generator matrices, fake weights, gradings and relation degrees.

Column orders (exponents ``l`` and shifts are given in the same order):

    A: 01, 11, 21, 31, ..., n1, then the extra ray S1 = (0, ..., 0, 1)
    B: 01, 02, 11, 21, 31, ..., n1
    C: 01, 11, 21, 31, 32, 41, ..., n1

Entry ``d[k]`` of a degree vector is d_{k+3}.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import prod
from typing import Sequence

from .exact_arith import (
    AbelElem,
    AbelGroup,
    Matrix,
    Projection,
    cokernel,
    is_primitive,
    max_minors,
    vec_gcd,
)


class ConstructionError(ValueError):
    pass


class NonPrimitiveColumn(ConstructionError):
    def __init__(self, label: str):
        super().__init__(f"column v{label} is not primitive")
        self.label = label


class DuplicateColumns(ConstructionError):
    pass


class PositivityViolated(ConstructionError):
    def __init__(self, which: str):
        super().__init__(f"positivity inequality fails: {which}")
        self.which = which


class RankNotOne(ConstructionError):
    pass


class HomogeneityViolated(ConstructionError):
    pass


def labels(type_tag: str, n: int) -> list[str]:
    if type_tag == "A":
        return [f"{i}1" for i in range(n + 1)] + ["S1"]
    if type_tag == "B":
        return ["01", "02"] + [f"{i}1" for i in range(1, n + 1)]
    if type_tag == "C":
        return ["01", "11", "21", "31", "32"] + [f"{i}1" for i in range(4, n + 1)]
    raise ValueError(f"unknown type {type_tag!r}")


@dataclass(frozen=True)
class FamilyInput:
    type: str
    d: tuple[int, ...]
    l: tuple[int, ...]
    shifts: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "type", str(self.type).upper())
        object.__setattr__(self, "d", tuple(int(x) for x in self.d))
        object.__setattr__(self, "l", tuple(int(x) for x in self.l))
        object.__setattr__(self, "shifts", tuple(int(x) for x in self.shifts))
        if self.type not in "ABC" or len(self.type) != 1:
            raise ValueError(f"unknown type {self.type!r}")
        if not self.d or any(x < 1 for x in self.d):
            raise ValueError("degree vector needs positive entries")
        want = self.n + 1 if self.type == "A" else self.n + 2
        if len(self.l) != want or len(self.shifts) != want:
            raise ValueError(f"type {self.type} with n={self.n} needs {want} exponents and shifts")
        if any(x < 1 for x in self.l):
            raise ValueError("exponents must be positive")
        if self.type == "C" and self.d[0] < 2:
            raise ValueError("type C needs d_3 >= 2")

    @property
    def n(self) -> int:
        return len(self.d) + 2

    @property
    def labels(self) -> list[str]:
        return labels(self.type, self.n)

    def slot(self, label: str) -> tuple[int, int]:
        k = self.labels.index(label)
        return self.l[k], self.shifts[k]

    def dd(self, i: int) -> int:
        """d_i with d_0 = d_1 = d_2 = 1."""
        return 1 if i < 3 else self.d[i - 3]

    def key(self) -> tuple:
        return (self.type, self.d, self.l, self.shifts)

    def __str__(self):
        j = lambda v: ",".join(map(str, v))  # noqa: E731
        return f"{self.type} d={j(self.d)} l={j(self.l)} s={j(self.shifts)}"


def base_matrix(d: Sequence[int]) -> Matrix:
    if not d:
        raise ValueError("empty degree vector")
    n = len(d) + 2
    u0 = [-1, -1] + [-int(x) for x in d]
    return [[u0[r]] + [int(r == c) for c in range(n)] for r in range(n)]


def _slot_index(label: str) -> int:
    return int(label[0])


def columns(fam: FamilyInput) -> list[list[int]]:
    n = fam.n
    u0 = [-1, -1] + [-x for x in fam.d]
    cols = []
    for lab, l, s in zip(fam.labels, fam.l, fam.shifts):
        i = _slot_index(lab)
        if i == 0:
            cols.append([l * x for x in u0] + [-s])
        else:
            cols.append([l * int(r == i - 1) for r in range(n)] + [s])
    if fam.type == "A":
        cols.append([0] * n + [1])
    return cols


def positivity_margin(fam: FamilyInput) -> tuple[Fraction, ...]:
    """Quantities that must all be > 0 for the columns to span the space."""
    F = Fraction
    t = fam.type
    if t == "A":
        l, s = fam.l, fam.shifts
        q = F(s[0], l[0]) - sum(F(fam.dd(i) * s[i], l[i]) for i in range(1, fam.n + 1))
        return (q,)
    if t == "B":
        l, s = fam.l, fam.shifts
        S = sum(F(fam.dd(i) * s[i + 1], l[i + 1]) for i in range(1, fam.n + 1))
        return (S - F(s[0], l[0]), F(s[1], l[1]) - S)
    l, s = fam.l, fam.shifts
    d3 = fam.d[0]
    M = F(s[0], l[0]) - F(s[1], l[1]) - F(s[2], l[2])
    M -= sum(F(fam.dd(i) * s[i + 1], l[i + 1]) for i in range(4, fam.n + 1))
    return (M - F(d3 * s[3], l[3]), F(d3 * s[4], l[4]) - M)


def positivity_ok(fam: FamilyInput) -> bool:
    return all(x > 0 for x in positivity_margin(fam))


@dataclass(frozen=True)
class GeneratorMatrix:
    family: FamilyInput
    P: Matrix
    labels: tuple[str, ...]


def assemble_P(fam: FamilyInput) -> GeneratorMatrix:
    cols = columns(fam)
    for lab, c in zip(fam.labels, cols):
        if not is_primitive(c):
            raise NonPrimitiveColumn(lab)
    if len({tuple(c) for c in cols}) != len(cols):
        raise DuplicateColumns("columns are not pairwise distinct")
    names = {"A": ["Q"], "B": ["S > d01/l01", "d02/l02 > S"], "C": ["M > d3 d31/l31", "d3 d32/l32 > M"]}
    for name, x in zip(names[fam.type], positivity_margin(fam)):
        if x <= 0:
            raise PositivityViolated(name)
    P = [list(r) for r in zip(*cols)]
    return GeneratorMatrix(fam, P, tuple(fam.labels))


def fake_weights_closed_form(fam: FamilyInput) -> list[int]:
    """Maximal minors of P predicted from the family data alone."""
    F = Fraction
    l, s, n = fam.l, fam.shifts, fam.n
    if fam.type == "A":
        pi = prod(l)
        w = [fam.dd(i) * pi // l[i] for i in range(n + 1)]
        w.append(pi * positivity_margin(fam)[0])
    elif fam.type == "B":
        single = l[2:]
        pi = prod(single)
        S = sum(F(fam.dd(i) * s[i + 1], l[i + 1]) for i in range(1, n + 1))
        det = l[0] * s[1] - l[1] * s[0]
        w = [l[1] * pi * (F(s[1], l[1]) - S), l[0] * pi * (S - F(s[0], l[0]))]
        w += [fam.dd(i) * pi // l[i + 1] * det for i in range(1, n + 1)]
    else:
        d3 = fam.d[0]
        single = [l[0], l[1], l[2]] + list(l[5:])
        pi = prod(single)
        M = F(s[0], l[0]) - F(s[1], l[1]) - F(s[2], l[2])
        M -= sum(F(fam.dd(i) * s[i + 1], l[i + 1]) for i in range(4, n + 1))
        det = l[3] * s[4] - l[4] * s[3]
        rest = [fam.dd(i) * pi // single[k] * det for k, i in enumerate([0, 1, 2] + list(range(4, n + 1)))]
        w = rest[:3] + [l[4] * pi * (F(d3 * s[4], l[4]) - M), l[3] * pi * (M - F(d3 * s[3], l[3]))] + rest[3:]
    out = []
    for x in w:
        x = Fraction(x)
        if x.denominator != 1:
            raise AssertionError("fake weight closed form is not integral")
        out.append(int(x))
    return out


def fake_weights(gm: GeneratorMatrix) -> tuple[list[int], list[int]]:
    tilde = fake_weights_closed_form(gm.family)
    minors = max_minors(gm.P)
    if tilde != minors:
        raise AssertionError(f"closed form {tilde} disagrees with minors {minors}")
    g = vec_gcd(tilde)
    return tilde, [x // g for x in tilde]


@dataclass(frozen=True)
class Grading:
    K: AbelGroup
    degrees: dict = field(hash=False)
    projection: Projection = field(hash=False, repr=False)

    def __getitem__(self, label: str) -> AbelElem:
        return self.degrees[label]

    def free_parts(self) -> list[int]:
        return [self.degrees[k].free[0] for k in self.degrees]


def grading(gm: GeneratorMatrix) -> Grading:
    K, proj = cokernel(gm.P)
    if K.rank != 1:
        raise RankNotOne(f"class group {K} does not have rank one")
    images = proj.basis_images(len(gm.labels))
    if images[0].free[0] < 0:
        proj = proj.negate_free()
        images = proj.basis_images(len(gm.labels))
    return Grading(K, dict(zip(gm.labels, images)), proj)


def relation_degrees(fam: FamilyInput, g: Grading) -> list[AbelElem]:
    """Degrees of h_3, ..., h_n after checking all homogeneity identities."""
    w = {lab: g[lab].scale(l) for lab, l in zip(fam.labels, fam.l)}
    t = fam.type
    if t == "A":
        base = w["01"]
        linear = [w["01"], w["11"], w["21"]]
    elif t == "B":
        base = w["11"]
        linear = [w["01"] + w["02"], w["11"], w["21"]]
    else:
        base = w["01"]
        linear = [w["01"], w["11"], w["21"]]
    if any(x != base for x in linear):
        raise HomogeneityViolated("the three P2 coordinates have different degrees")
    out = []
    for i in range(3, fam.n + 1):
        target = base.scale(fam.dd(i))
        mono = w["31"] + w["32"] if (t == "C" and i == 3) else w[f"{i}1"]
        if mono != target:
            raise HomogeneityViolated(f"h_{i} is not homogeneous")
        out.append(target)
    return out


def relation_template(fam: FamilyInput) -> list[str]:
    def mon(*pairs):
        bits = [f"T{lab}" + (f"^{e}" if e != 1 else "") for lab, e in pairs]
        return "*".join(bits)

    l = dict(zip(fam.labels, fam.l))
    if fam.type == "B":
        args = [mon(("01", l["01"]), ("02", l["02"])), mon(("11", l["11"])), mon(("21", l["21"]))]
    else:
        args = [mon((k, l[k])) for k in ("01", "11", "21")]
    out = []
    for i in range(3, fam.n + 1):
        head = mon(("31", l["31"]), ("32", l["32"])) if (fam.type == "C" and i == 3) else mon((f"{i}1", l[f"{i}1"]))
        out.append(f"{head} + f{fam.dd(i)}({', '.join(args)})")
    return out
