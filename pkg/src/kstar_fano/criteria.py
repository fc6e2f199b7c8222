"""Fano, Gorenstein and non-toricity tests, plus the normal form used for deduplication.

The Gorenstein test exists twice. ``is_gorenstein_closed_form`` evaluates
integrality conditions on the family data. ``is_gorenstein_cone_oracle``
solves the Cartier systems on the cones directly. They must agree.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from itertools import permutations
from math import lcm
from typing import Sequence

from .construction import FamilyInput, assemble_P, columns, grading
from .exact_arith import AbelElem, snf

F = Fraction


def _is_int(x: Fraction) -> bool:
    return Fraction(x).denominator == 1


# ---------------------------------------------------------------- canonical class

def kappa_coefficients(fam: FamilyInput) -> list[int]:
    """Coefficients of the generator degrees in -K, in column order."""
    out = []
    for lab, l in zip(fam.labels, list(fam.l) + [1]):
        if lab == "S1":
            out.append(1)
        elif fam.type == "C" and lab == "32":
            out.append(1 - l)
        elif int(lab[0]) >= 3:
            out.append(1 - l)
        else:
            out.append(1)
    return out


def anticanonical_class(fam: FamilyInput, g=None) -> AbelElem:
    g = g or grading(assemble_P(fam))
    total = g.K.zero()
    for c, lab in zip(kappa_coefficients(fam), fam.labels):
        total = total + g[lab].scale(c)
    return total


def fano_value(fam: FamilyInput) -> Fraction:
    """Rational number whose sign decides the Fano property.

    It is the free part of -K measured in units where a single arm with
    exponent l and coefficient d has weight d/l.
    """
    l, s, n, dd = fam.l, fam.shifts, fam.n, fam.dd
    D = sum(fam.d)
    if fam.type == "A":
        v = F(s[0] + 1, l[0]) - F(s[1] - 1, l[1]) - F(s[2] - 1, l[2])
        v -= sum(F(dd(i) * (s[i] - 1), l[i]) for i in range(3, n + 1))
        return v - D
    if fam.type == "B":
        det = l[0] * s[1] - l[1] * s[0]
        nu, mu = F(s[1] - s[0], det), F(l[1] - l[0], det)
        S = sum(F(dd(i) * s[i + 1], l[i + 1]) for i in range(1, n + 1))
        return nu - mu * S + sum(F(dd(i), l[i + 1]) for i in range(1, n + 1)) - D
    d3 = fam.d[0]
    det = l[3] * s[4] - l[4] * s[3]
    nu, mu = F(s[4] - s[3], det), F(l[4] - l[3], det)
    single = [0, 1, 2] + list(range(4, n + 1))
    pos = {0: 0, 1: 1, 2: 2, **{i: i + 1 for i in range(4, n + 1)}}
    M = F(s[0], l[0]) - F(s[1], l[1]) - F(s[2], l[2])
    M -= sum(F(dd(i) * s[pos[i]], l[pos[i]]) for i in range(4, n + 1))
    return d3 * nu - mu * M + sum(F(dd(i), l[pos[i]]) for i in single) - D


def is_fano(fam: FamilyInput) -> bool:
    return fano_value(fam) > 0


# ---------------------------------------------------------------- Gorenstein, closed form

@dataclass
class GorensteinCertificate:
    type: str
    values: dict = field(default_factory=dict)
    checks: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> list[str]:
        return [k for k, v in self.checks.items() if not v]

    def as_dict(self) -> dict:
        return {
            "type": self.type,
            "values": {k: str(v) for k, v in self.values.items()},
            "checks": dict(self.checks),
        }


def _gorenstein_a(fam, cert):
    l, s, n = fam.l, fam.shifts, fam.n
    k = F(1 + s[0], l[0])
    cert.values["(1+d01)/l01"] = k
    cert.checks["(1+d01)/l01 in Z>0"] = _is_int(k) and k > 0
    for i in (1, 2):
        cert.checks[f"d{i}1 = min(1, l{i}1 - 1)"] = s[i] == min(1, l[i] - 1)
    for i in range(3, n + 1):
        cert.checks[f"d{i}1 = 1"] = s[i] == 1
    D = sum(fam.d)
    num = k + F(1 - s[1], l[1]) + F(1 - s[2], l[2]) - D
    den = F(s[0], l[0]) - F(s[1], l[1]) - F(s[2], l[2]) - sum(F(fam.dd(i), l[i]) for i in range(3, n + 1))
    L = lcm(*l[1:])
    alpha = num / den if den else None
    cert.values["alpha"] = alpha
    cert.values["lcm"] = L
    cert.checks["alpha in lcm*Z"] = alpha is not None and _is_int(alpha / L)


def _double_arm_common(cert, la, da, lb, db):
    det = la * db - lb * da
    nu, mu = F(db - da, det), F(lb - la, det)
    cert.values["nu"], cert.values["mu"] = nu, mu
    cert.checks["nu in Z"] = _is_int(nu)
    return nu, mu


def _gorenstein_b(fam, cert):
    l, s, n, dd = fam.l, fam.shifts, fam.n, fam.dd
    nu, mu = _double_arm_common(cert, l[0], s[0], l[1], s[1])
    cert.checks["mu in Z"] = _is_int(mu)
    D = sum(fam.d)
    S = sum(F(dd(i) * s[i + 1], l[i + 1]) for i in range(1, n + 1))
    top = sum(F(dd(i), l[i + 1]) for i in range(1, n + 1)) - D
    alphas = []
    for j in (0, 1):
        a = (F(1, l[j]) + top) / (S - F(s[j], l[j]))
        cert.values[f"alpha{j + 1}"] = a
        cert.checks[f"alpha{j + 1} in Z"] = _is_int(a)
        alphas.append(a)
    for i in range(1, n + 1):
        li, di = l[i + 1], s[i + 1]
        for name, x in (("lambda", mu), ("beta", alphas[0]), ("gamma", alphas[1])):
            v = (x * di - 1) / li
            cert.values[f"{name}{i}"] = v
            cert.checks[f"{name}{i} in Z"] = _is_int(v)


def _gorenstein_c(fam, cert):
    l, s, n, dd = fam.l, fam.shifts, fam.n, fam.dd
    d3 = fam.d[0]
    nu, mu = _double_arm_common(cert, l[3], s[3], l[4], s[4])
    cert.checks["mu in Z"] = _is_int(mu)
    D = sum(fam.d)
    pos = {0: 0, 1: 1, 2: 2, **{i: i + 1 for i in range(4, n + 1)}}
    M = F(s[0], l[0]) - F(s[1], l[1]) - F(s[2], l[2])
    M -= sum(F(dd(i) * s[pos[i]], l[pos[i]]) for i in range(4, n + 1))
    top = F(1, l[0]) + F(1, l[1]) + F(1, l[2]) + sum(F(dd(i), l[pos[i]]) for i in range(4, n + 1)) - D
    alphas = []
    for j, k in ((1, 3), (2, 4)):
        a = (top + F(d3, l[k])) / (F(d3 * s[k], l[k]) - M)
        cert.values[f"alpha{j}"] = a
        cert.checks[f"alpha{j} in Z"] = _is_int(a)
        alphas.append(a)
    a1, a2 = alphas
    checks = {
        "lambda0": (mu * s[0] - 1) / l[0],
        "beta0": (a1 * s[0] + 1) / l[0],
        "gamma0": (a2 * s[0] + 1) / l[0],
        # the double arm: v31 lies in the cones through alpha1, v32 in those through alpha2
        "beta31": (a1 * s[3] - 1) / l[3],
        "gamma32": (a2 * s[4] - 1) / l[4],
    }
    for i in [1, 2] + list(range(4, n + 1)):
        li, di = l[pos[i]], s[pos[i]]
        checks[f"lambda{i}"] = (mu * di + 1) / li
        checks[f"beta{i}"] = (a1 * di - 1) / li
        checks[f"gamma{i}"] = (a2 * di - 1) / li
    for k, v in checks.items():
        cert.values[k] = v
        cert.checks[f"{k} in Z"] = _is_int(v)


def is_gorenstein_closed_form(fam: FamilyInput) -> tuple[bool, GorensteinCertificate]:
    cert = GorensteinCertificate(fam.type)
    {"A": _gorenstein_a, "B": _gorenstein_b, "C": _gorenstein_c}[fam.type](fam, cert)
    return cert.ok, cert


# ---------------------------------------------------------------- Gorenstein, cone oracle

def x_cones(fam: FamilyInput) -> tuple[list[frozenset], list[frozenset]]:
    labs = fam.labels
    n = fam.n
    fs = frozenset
    if fam.type == "A":
        arms = [f"{i}1" for i in range(n + 1)]
        witness = [fs(arms)] + [fs({a, "S1"}) for a in arms]
        maximal = [fs(arms)] + [fs(labs) - {f"{i}1"} for i in range(3)]
    elif fam.type == "B":
        singles = [f"{i}1" for i in range(1, n + 1)]
        witness = [fs(["01"] + singles), fs(["02"] + singles)]
        witness += [fs({"01", "02", a}) for a in singles]
        maximal = witness[:2] + [fs(labs) - {"11"}, fs(labs) - {"21"}]
    else:
        others = [x for x in labs if x not in ("31", "32")]
        witness = [fs(labs) - {"32"}, fs(labs) - {"31"}]
        witness += [fs({"31", "32", a}) for a in others]
        maximal = [fs(labs) - {"32"}, fs(labs) - {"31"}, fs(labs) - {"11"}, fs(labs) - {"21"}]
    return witness, maximal


def cartier_targets(fam: FamilyInput) -> dict:
    """<u, v> must equal the coefficient of the generator in -K."""
    return dict(zip(fam.labels, kappa_coefficients(fam)))


def solve_integer(rows: Sequence[Sequence[int]], rhs: Sequence[int]):
    """An integer u with rows*u = rhs, or None."""
    res = snf(rows)
    k, m = len(rows), len(rows[0])
    c = [sum(a * b for a, b in zip(r, rhs)) for r in res.U]
    y = [0] * m
    for i in range(k):
        dii = res.D[i][i] if i < m else 0
        if dii:
            if c[i] % dii:
                return None
            y[i] = c[i] // dii
        elif c[i]:
            return None
    return [sum(res.V[r][j] * y[j] for j in range(m)) for r in range(m)]


@dataclass
class ConeSystem:
    cone: tuple
    rows: list
    rhs: list
    solution: list | None


def cone_systems(fam: FamilyInput, which: str = "maximal") -> list[ConeSystem]:
    witness, maximal = x_cones(fam)
    cones = maximal if which == "maximal" else witness
    cols = dict(zip(fam.labels, columns(fam)))
    target = cartier_targets(fam)
    out = []
    for cone in cones:
        labs = tuple(x for x in fam.labels if x in cone)
        rows = [cols[x] for x in labs]
        rhs = [target[x] for x in labs]
        out.append(ConeSystem(labs, rows, rhs, solve_integer(rows, rhs)))
    return out


def is_gorenstein_cone_oracle(fam: FamilyInput, which: str = "maximal") -> bool:
    return all(sys.solution is not None for sys in cone_systems(fam, which))


# ---------------------------------------------------------------- non-toricity

@dataclass(frozen=True)
class NontoricResult:
    ok: bool
    g_flags: tuple[str, ...] = ()
    reasons: tuple[str, ...] = ()

    def __bool__(self):
        return self.ok


def nontoric_constraints(fam: FamilyInput) -> NontoricResult:
    """Discrete conditions for the relations to have no linear term.

    For d_i = 1 the relation reads T_i^l + (linear form in T0, T1, T2). A
    coefficient may only be nonzero on coordinates T_j = T_j1^l_j1 with
    l_j1 >= 2, and the form needs two nonzero coefficients to differ from
    the coordinates themselves. The coefficients that must vanish are
    reported as flags.
    """
    n = fam.n
    reasons, flags = [], []
    lab = dict(zip(fam.labels, fam.l))
    first = 4 if fam.type == "C" else 3
    for i in range(first, n + 1):
        if lab[f"{i}1"] < 2:
            reasons.append(f"l{i}1 = 1 gives a linear term")
    if fam.type == "B":
        allowed = {0: True, 1: lab["11"] >= 2, 2: lab["21"] >= 2}
    else:
        allowed = {j: lab[f"{j}1"] >= 2 for j in range(3)}
    for i in range(3, n + 1):
        if fam.dd(i) != 1:
            continue
        if sum(allowed.values()) < 2:
            reasons.append(f"g{i} is linear but fewer than two coordinates may appear in it")
        for j, ok in allowed.items():
            if not ok:
                flags.append(f"g{i}: coefficient of T{j} = 0")
    return NontoricResult(not reasons, tuple(flags), tuple(reasons))


# ---------------------------------------------------------------- normal form

def _slots(fam: FamilyInput):
    """Split the data into arms: {slot: [(l, signed bottom entry), ...]}."""
    arms: dict[int, list[list[int]]] = {}
    for lab, l, s in zip(fam.labels, fam.l, fam.shifts):
        i = int(lab[0])
        arms.setdefault(i, []).append([l, -s if i == 0 else s])
    return arms


def _rebuild(type_tag, d, arms) -> FamilyInput:
    n = len(d) + 2
    dd = [1, 1, 1] + list(d)
    # fix the unimodular freedom: first column of each arm k >= 1 gets 0 <= b < l
    for k in range(1, n + 1):
        l0, b0 = arms[k][0]
        c = -(b0 // l0)
        for col in arms[k]:
            col[1] += c * col[0]
        for col in arms[0]:
            col[1] -= c * col[0] * dd[k]
    ls, ss = [], []
    for k in range(n + 1):
        for l, b in arms[k]:
            ls.append(l)
            ss.append(-b if k == 0 else b)
    return FamilyInput(type_tag, d, ls, ss)


def _ordered(fam: FamilyInput) -> bool:
    arms = _slots(fam)
    first = lambda k: arms[k][0][0]  # noqa: E731
    n = fam.n
    if fam.type == "A":
        ok = first(2) >= first(1) >= first(0)
        start = 3
    elif fam.type == "B":
        ok = first(2) >= first(1) and arms[0][1][0] >= arms[0][0][0]
        start = 3
    else:
        ok = first(0) >= first(2) >= first(1) and arms[3][1][0] >= arms[3][0][0]
        start = 4
    d = fam.d
    for i in range(start, n):
        a, b = d[i - 3], d[i - 2]
        if a > b or (a == b and first(i) > first(i + 1)):
            return False
    return ok


def _relation_arms_ok(fam: FamilyInput) -> bool:
    first = 4 if fam.type == "C" else 3
    lab = dict(zip(fam.labels, fam.l))
    return all(lab[f"{i}1"] >= 2 for i in range(first, fam.n + 1))


def _candidates(fam: FamilyInput):
    n = fam.n
    dd = [1, 1, 1] + list(fam.d)
    double = {"A": None, "B": 0, "C": 3}[fam.type]
    first_tail = 4 if fam.type == "C" else 3
    # sort the tail arms by degree first; afterwards only arms of equal
    # coefficient are exchanged, which keeps the degree vector fixed
    tail = sorted(range(first_tail, n + 1), key=lambda k: dd[k])
    order = {k: k for k in range(first_tail)} | dict(zip(range(first_tail, n + 1), tail))
    arms0 = _slots(fam)
    arms = {k: arms0[order[k]] for k in range(n + 1)}
    dd = [dd[order[k]] for k in range(n + 1)]
    groups: dict[int, list[int]] = {}
    for k in range(n + 1):
        if k != double:
            groups.setdefault(dd[k], []).append(k)
    keys = sorted(groups)
    d = tuple(dd[3:])

    def perms(i):
        if i == len(keys):
            yield {}
            return
        g = groups[keys[i]]
        for rest in perms(i + 1):
            for p in permutations(g):
                yield rest | dict(zip(g, p))

    for flip in (False, True) if double is not None else (False,):
        for perm in perms(0):
            new = {k: [list(c) for c in arms[perm.get(k, k)]] for k in range(n + 1)}
            if flip:
                for cols in new.values():
                    for c in cols:
                        c[1] = -c[1]
                new[double].reverse()
            yield _rebuild(fam.type, d, new)


def normal_form(fam: FamilyInput) -> FamilyInput:
    """Lexicographically smallest ordered representative of the symmetry orbit.

    The orbit is generated by permuting single arms whose coordinates have
    the same coefficient in the relation sum d_i u_i = 0 (so arms with
    d_i = 1 mix with those over T0, T1, T2), and for double arms by
    inverting the torus action. Representatives must keep exponents >= 2
    on the arms that carry a relation.
    """
    best = None
    for cand in _candidates(fam):
        if not _ordered(cand) or not _relation_arms_ok(cand):
            continue
        key = (cand.d, cand.l, cand.shifts)
        if best is None or key < best[0]:
            best = (key, cand)
    if best is None:
        raise AssertionError(f"no ordered representative for {fam}")
    return best[1]
