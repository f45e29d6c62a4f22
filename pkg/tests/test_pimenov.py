"""Unit and property tests for the nilpotent coefficient algebra."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ckq.pimenov import (
    KERNELS,
    NotInvertible,
    ParameterSignature,
    PimenovElement,
    format_element,
    jfactor_square,
    parse_element,
    pim_apply,
    scaled_trig,
)

from oracles import grassmann_product, lift_fd, lift_taylor


def rand_element(rng, n, base=None):
    coeffs = {m: complex(rng.normal(), rng.normal()) for m in range(2**n)}
    if base is not None:
        coeffs[0] = base
    return PimenovElement(n, coeffs)


# -- ring structure ---------------------------------------------------------


def test_tags_square_to_zero():
    for n in (1, 2, 3):
        for k in range(1, n + 1):
            t = PimenovElement.tag(n, k)
            assert (t * t).is_zero()


def test_tags_commute():
    t1 = PimenovElement.tag(2, 1)
    t2 = PimenovElement.tag(2, 2)
    assert (t1 * t2 - t2 * t1).is_zero()


def test_mixed_products_survive():
    t1 = PimenovElement.tag(2, 1)
    t2 = PimenovElement.tag(2, 2)
    p = (1 + 2 * t1) * (3 + t2)
    assert p.coeffs[0b11] == 2.0


coeff_st = st.complex_numbers(
    min_magnitude=0, max_magnitude=10, allow_nan=False, allow_infinity=False
)


@st.composite
def elements(draw, n=3):
    coeffs = {m: draw(coeff_st) for m in range(2**n)}
    return PimenovElement(n, coeffs)


@given(elements(), elements(), elements())
@settings(max_examples=60, deadline=None)
def test_ring_axioms(a, b, c):
    assert ((a + b) * c).isclose(a * c + b * c, tol=1e-6)
    assert (a * (b * c)).isclose((a * b) * c, tol=1e-6)
    assert (a * b).isclose(b * a, tol=1e-6)


@given(elements())
@settings(max_examples=60, deadline=None)
def test_inverse_property(a):
    if a.scalar_part == 0:
        with pytest.raises(NotInvertible):
            a.inv()
    elif abs(a.scalar_part) >= 1e-3:
        assert (a * a.inv() - 1).max_abs() <= 1e-6 * max(1.0, a.max_abs() ** 3)


def test_nilpotent_part_not_invertible():
    with pytest.raises(NotInvertible):
        PimenovElement.tag(2, 1).inv()


# -- Grassmann embedding ----------------------------------------------------


def test_grassmann_oracle_products_exact():
    rng = np.random.default_rng(7)
    for _ in range(100):
        a = PimenovElement(
            2, {m: complex(rng.integers(-5, 6), rng.integers(-5, 6)) for m in range(4)}
        )
        b = PimenovElement(
            2, {m: complex(rng.integers(-5, 6), rng.integers(-5, 6)) for m in range(4)}
        )
        direct = a * b
        oracle = grassmann_product(a, b)
        assert (direct - oracle).max_abs() == 0


# -- analytic lifting -------------------------------------------------------


@pytest.mark.parametrize("name", sorted(KERNELS))
def test_lifting_matches_taylor_oracle(name):
    rng = np.random.default_rng(11)
    for _ in range(100):
        base = complex(rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5))
        a = rand_element(rng, 3, base=base)
        lifted = pim_apply(KERNELS[name], a)
        oracle = lift_taylor(name, a)
        assert (lifted - oracle).max_abs() <= 1e-12 * max(1.0, oracle.max_abs())


@pytest.mark.parametrize("name", sorted(KERNELS))
def test_lifting_matches_finite_differences(name):
    rng = np.random.default_rng(13)
    for _ in range(100):
        base = complex(rng.uniform(0.5, 2.0), rng.uniform(-0.5, 0.5))
        a = rand_element(rng, 2, base=base)
        lifted = pim_apply(KERNELS[name], a)
        oracle = lift_fd(name, a)
        scale = max(1.0, lifted.max_abs())
        assert (lifted - oracle).max_abs() <= 1e-6 * scale


def test_exp_is_multiplicative_on_nilpotents():
    t1 = PimenovElement.tag(2, 1)
    t2 = PimenovElement.tag(2, 2)
    a, b = t1 * 0.7, t2 * (-1.3)
    lhs = pim_apply(KERNELS["exp"], a + b)
    rhs = pim_apply(KERNELS["exp"], a) * pim_apply(KERNELS["exp"], b)
    assert (lhs - rhs).max_abs() <= 1e-14


def test_log_inverts_exp():
    rng = np.random.default_rng(3)
    a = rand_element(rng, 3, base=0.8)
    back = pim_apply(KERNELS["log"], pim_apply(KERNELS["exp"], a))
    assert (back - a).max_abs() <= 1e-12


# -- signatures and j-factors ----------------------------------------------


def test_signature_parse_and_properties():
    sig = ParameterSignature.parse("1,n,i")
    assert sig.n_slots == 3
    assert not sig.quantum_allowed
    assert ParameterSignature.parse("1,n").quantum_allowed
    with pytest.raises(ValueError):
        ParameterSignature.parse("1,x")


def test_jfactor_square_values():
    assert jfactor_square(ParameterSignature.parse("1,1").jfactor(1, 3)) == 1
    assert jfactor_square(ParameterSignature.parse("n,1").jfactor(1, 3)) == 0
    assert jfactor_square(ParameterSignature.parse("i,1").jfactor(1, 3)) == -1


def test_scaled_trig_limits():
    sig = ParameterSignature.parse("n")
    j = sig.jfactor(1, 2)
    sin_el, sin_over, cos_val = scaled_trig(j, 0.4)
    # flat slot: sin(j phi)/j -> phi and cos(j phi) -> 1
    assert abs(sin_over - 0.4) <= 1e-14
    assert abs(cos_val - 1.0) <= 1e-14
    sig1 = ParameterSignature.parse("1")
    _, s_over, c_val = scaled_trig(sig1.jfactor(1, 2), 0.4)
    assert abs(s_over - math.sin(0.4)) <= 1e-14
    assert abs(c_val - math.cos(0.4)) <= 1e-14


# -- text round trip --------------------------------------------------------


def test_parse_format_round_trip():
    text = "1 + 2*i1 - 0.5*i1*i2"
    a = parse_element(text, 2)
    b = parse_element(format_element(a), 2)
    assert (a - b).max_abs() == 0
