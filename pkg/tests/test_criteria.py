import random

from hypothesis import given, settings

from kstar_fano.construction import FamilyInput, assemble_P, grading
from kstar_fano.criteria import (
    anticanonical_class,
    cone_systems,
    fano_value,
    is_fano,
    is_gorenstein_closed_form,
    is_gorenstein_cone_oracle,
    kappa_coefficients,
    nontoric_constraints,
    normal_form,
    solve_integer,
)
from strategies import families, random_family

EX_A = FamilyInput("A", (2,), (2, 2, 2, 2), (5, 1, 1, 1))
EX_B = FamilyInput("B", (2,), (1, 2, 1, 4, 2), (1, 3, 0, 1, 1))
EX_C = FamilyInput("C", (2,), (4, 1, 2, 1, 4), (3, 0, 1, 0, 1))


def test_kappa():
    assert kappa_coefficients(EX_A) == [1, 1, 1, -1, 1]
    assert kappa_coefficients(EX_C) == [1, 1, 1, 0, -3]


def test_anticanonical_example_a():
    k = anticanonical_class(EX_A)
    assert k.free == (2,) and not any(k.torsion)


def test_examples_are_fano_gorenstein():
    for fam in (EX_A, EX_B, EX_C):
        assert is_fano(fam) and fano_value(fam) > 0
        ok, cert = is_gorenstein_closed_form(fam)
        assert ok and cert.ok and not cert.failed()
        assert is_gorenstein_cone_oracle(fam)
        assert is_gorenstein_cone_oracle(fam, "witness")


def test_non_gorenstein_certificate_names_failure():
    fam = FamilyInput("A", (2,), (2, 2, 2, 2), (7, 1, 1, 1))
    ok, cert = is_gorenstein_closed_form(fam)
    assert not ok and cert.failed()
    assert not is_gorenstein_cone_oracle(fam)
    assert any(cs.solution is None for cs in cone_systems(fam))


def test_solve_integer():
    assert solve_integer([[2, 0], [0, 3]], [4, 9]) == [2, 3]
    assert solve_integer([[2, 0], [0, 3]], [1, 9]) is None


def test_nontoric_rules():
    # linear relation in only one allowed coordinate is toric
    fam = FamilyInput("A", (1,), (1, 1, 2, 2), (1, 0, 1, 1))
    res = nontoric_constraints(fam)
    assert not res and res.reasons
    # relation arm with exponent one
    fam = FamilyInput("A", (2,), (1, 1, 1, 1), (2, 0, 0, 1))
    assert not nontoric_constraints(fam)
    res = nontoric_constraints(FamilyInput("A", (1,), (1, 2, 3, 7), (1, 1, 1, 1)))
    assert res and res.g_flags == ("g3: coefficient of T0 = 0",)


def test_closed_form_matches_oracle_on_10k_random_inputs():
    rng = random.Random(20240601)
    agree = 0
    for _ in range(10_000):
        fam = random_family(rng)
        assert is_gorenstein_closed_form(fam)[0] == is_gorenstein_cone_oracle(fam), str(fam)
        agree += 1
    assert agree == 10_000


def test_witness_and_maximal_cones_agree():
    rng = random.Random(7)
    for _ in range(1000):
        fam = random_family(rng)
        assert is_gorenstein_cone_oracle(fam, "witness") == is_gorenstein_cone_oracle(fam)


def _invariants(fam):
    g = grading(assemble_P(fam))
    return (g.K, sorted(g.free_parts()), anticanonical_class(fam, g).free, fano_value(fam),
            is_fano(fam), is_gorenstein_cone_oracle(fam), is_gorenstein_closed_form(fam)[0])


@settings(max_examples=150, deadline=None)
@given(families())
def test_normal_form_idempotent_and_invariant(fam):
    nf = normal_form(fam)
    assert normal_form(nf) == nf
    assert _invariants(nf) == _invariants(fam)


def test_normal_form_merges_relabelings():
    # swapping the arms 1 and 2 and shifting an arm gives the same normal form
    a = FamilyInput("A", (1,), (1, 3, 2, 7), (1, 1, 1, 1))
    b = FamilyInput("A", (1,), (1, 2, 3, 7), (1, 1, 1, 1))
    c = FamilyInput("A", (1,), (1, 2, 3, 7), (2, 3, 1, 1))
    assert normal_form(a) == normal_form(b) == normal_form(c)
    assert grading(assemble_P(c)).free_parts() == grading(assemble_P(b)).free_parts()
