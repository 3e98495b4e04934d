from fractions import Fraction

import pytest
from hypothesis import given, settings

from trinion.betti import (
    JORDAN_A1,
    JORDAN_A1_TILDE,
    PUBLISHED_TABLE,
    UNIFORMIZATION_GAMMA3,
    NormalFormCase,
    RepPair,
    character_map,
    conjugate_pair,
    degenerate_normal_form,
    generic_normal_form,
    invert_character,
    is_integral,
    is_irreducible,
    level2_generators,
    normalize_pair,
    sym_square,
    uniformization_rep,
)
from trinion.errors import (
    NotUnipotentError,
    OffSurfaceError,
    ReducibleError,
    UnsupportedJordanTypeError,
)
from trinion.exact import Matrix, SL3Matrix, identity, is_unipotent, unipotency_index
from trinion.surface import CharacterPoint, ParamPoint, on_surface, psi

from strategies import param_points
from test_exact import unimodular


def test_uniformization_character():
    assert character_map(uniformization_rep()) == CharacterPoint(35, 35, 323)


def test_uniformization_generators_maximally_unipotent():
    r = uniformization_rep()
    assert [unipotency_index(g) for g in r.generators()] == [3, 3, 3]
    assert r.a3 == UNIFORMIZATION_GAMMA3
    assert is_integral(r)
    assert is_irreducible(r)


def test_sym_square_of_level2_generator():
    u1, _ = level2_generators()
    assert sym_square(u1) == Matrix([[1, 2, 4], [0, 1, 4], [0, 0, 1]])


def test_sym_square_has_uniformization_character():
    pair = RepPair(*(sym_square(g) for g in level2_generators()))
    assert character_map(pair) == CharacterPoint(35, 35, 323)


def test_sym_square_is_a_homomorphism():
    u1, u2 = level2_generators()
    assert sym_square(u1 @ u2) == sym_square(u1) @ sym_square(u2)


def test_rep_pair_rejects_non_unipotent():
    with pytest.raises(NotUnipotentError):
        RepPair(JORDAN_A1, SL3Matrix([[2, 0, 0], [0, 1, 0], [0, 0, Fraction(1, 2)]]))
    with pytest.raises(NotUnipotentError):
        # a1, a2 unipotent but a2 a1 has trace 5
        RepPair(JORDAN_A1, SL3Matrix([[1, 0, 0], [1, 1, 0], [0, 1, 1]]))


def test_invert_generic_point():
    p = CharacterPoint(35, 99, 643)
    pair = invert_character(p)
    assert pair.a1 == JORDAN_A1
    assert pair.a2 == generic_normal_form(35, 99, 643)
    assert character_map(pair) == p
    # (1,2) entry is (3x + 3y + z - 21) / (y - 3)^2 = 1024/9216
    assert pair.a2[0, 1] == Fraction(1, 9)
    assert not is_integral(pair)


def test_invert_trivial_point():
    pair = invert_character(CharacterPoint(3, 3, 3))
    assert pair.a1 == identity(3) and pair.a2 == identity(3)


def test_invert_degenerate_point():
    # b21 = 1 gives x = 3 - 1, y = 3, z = 3 + 3 - 1
    p = CharacterPoint(2, 3, 5)
    assert on_surface(p)
    pair = invert_character(p)
    assert pair.a2 == degenerate_normal_form(Fraction(1))
    assert character_map(pair) == p


@pytest.mark.parametrize("b21", [Fraction(1), Fraction(-2), Fraction(3, 7)])
def test_degenerate_family_characters(b21):
    pair = RepPair(JORDAN_A1, degenerate_normal_form(b21))
    b2 = b21 * b21
    assert character_map(pair) == CharacterPoint(3 - b2, 3, 3 + 3 * b2 - b2 * b21)


def test_invert_rejects_off_surface():
    with pytest.raises(OffSurfaceError):
        invert_character(CharacterPoint(84, 84, 256))


def test_table_rows():
    s_row, t_row, last = PUBLISHED_TABLE
    # printed z = 256 for (1, 3) is off the surface; 246 is the value of Psi
    assert not on_surface(CharacterPoint(*s_row.printed_character))
    assert psi(ParamPoint(1, 3)) == CharacterPoint(84, 84, 246)
    assert character_map(RepPair(s_row.gamma1, s_row.gamma2)) == CharacterPoint(84, 84, 246)
    assert character_map(RepPair(t_row.gamma1, t_row.gamma2)) == CharacterPoint(35, 99, 643)
    assert last.gamma2.det() == 17
    pair = RepPair(last.gamma1, last.amended_gamma2)
    assert character_map(pair) == CharacterPoint(*last.printed_character)
    for row in PUBLISHED_TABLE:
        assert psi(ParamPoint(row.s, row.t)).astuple()[:2] == row.printed_character[:2]


def test_normalize_uniformization():
    r = uniformization_rep()
    nf = normalize_pair(r)
    assert nf.case is NormalFormCase.GENERIC
    assert nf.pair.a1 == JORDAN_A1
    assert nf.pair.a2 == generic_normal_form(35, 35, 323)
    g = nf.conjugator
    assert g.inverse() @ r.a1 @ g == nf.pair.a1
    assert g.inverse() @ r.a2 @ g == nf.pair.a2
    assert next(v for v in g.flat() if v) == 1


def test_normalize_degenerate_reports_b21():
    r = conjugate_pair(RepPair(JORDAN_A1, degenerate_normal_form(Fraction(1))),
                       [[1, 2, 0], [0, 1, 0], [3, 0, 1]])
    nf = normalize_pair(r)
    assert nf.case is NormalFormCase.DEGENERATE and nf.b21 == 1


def test_normalize_rejects_unsupported_inputs():
    with pytest.raises(UnsupportedJordanTypeError):
        normalize_pair(RepPair(JORDAN_A1_TILDE, identity(3)))
    # reducible: a1 maximal, a2 chosen so every trace is 3
    reducible = RepPair(JORDAN_A1, JORDAN_A1.inverse())
    assert character_map(reducible) == CharacterPoint(3, 3, 3)
    with pytest.raises(ReducibleError):
        normalize_pair(reducible)


@settings(max_examples=200)
@given(param_points)
def test_round_trip_through_parameterization(p):
    q = psi(p)
    pair = invert_character(q)
    assert character_map(pair) == q
    assert all(is_unipotent(g) for g in pair.generators())
    # real points invert to real (rational) matrices
    assert all(isinstance(v, Fraction) for g in pair.generators() for v in g.flat())


@settings(max_examples=100)
@given(unimodular())
def test_character_is_conjugation_invariant(g):
    r = uniformization_rep()
    conj = conjugate_pair(r, g)
    assert is_integral(conj)
    assert character_map(conj) == character_map(r)


@settings(max_examples=60)
@given(unimodular(), param_points)
def test_normal_form_is_conjugation_invariant(g, p):
    pair = invert_character(psi(p))
    if pair.a1 == identity(3):
        return
    nf = normalize_pair(conjugate_pair(pair, g))
    assert nf.pair == pair
