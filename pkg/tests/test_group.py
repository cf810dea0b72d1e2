import cmath
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from mharm.group import (
    ComplexGroupPoint,
    GroupElement,
    act_complex,
    compose,
    embed_matrix,
    inverse,
    wrap_angle,
)
from oracles import cos_sin_series

coord = st.floats(-10, 10, allow_nan=False)
angle = st.floats(-20, 20, allow_nan=False)
elements = st.builds(lambda a, b, c: GroupElement((a, b), c), coord, coord, angle)


def test_identity_composition():
    g = GroupElement((1.5, -2.0), 0.7)
    assert compose(GroupElement.identity(), g).isclose(g)
    assert compose(g, GroupElement.identity()).isclose(g)


def test_compose_quarter_turns():
    r = compose(GroupElement((1, 0), math.pi / 2), GroupElement((0, 1), math.pi / 2))
    assert r.isclose(GroupElement((0, 0), math.pi))


def test_inverse_examples():
    assert inverse(GroupElement.identity()).isclose(GroupElement.identity())
    assert inverse(GroupElement((1, 0), math.pi / 2)).isclose(GroupElement((0, 1), -math.pi / 2))


def test_inverse_random():
    rng = np.random.default_rng(0)
    for _ in range(100):
        g = GroupElement(rng.uniform(-5, 5, 2), rng.uniform(-math.pi, math.pi))
        assert compose(g, inverse(g)).isclose(GroupElement.identity(), 1e-12)


@given(elements)
def test_inverse_involution(g):
    assert inverse(inverse(g)).isclose(g, 1e-11)


@given(elements, elements, elements)
def test_associativity(g, h, k):
    assert compose(compose(g, h), k).isclose(compose(g, compose(h, k)), 1e-10)


@given(elements, elements)
def test_embedding_is_homomorphism(g, h):
    np.testing.assert_allclose(embed_matrix(compose(g, h)), embed_matrix(g) @ embed_matrix(h), atol=1e-11)


def test_embed_examples():
    np.testing.assert_allclose(embed_matrix(GroupElement.identity()), np.eye(2))
    np.testing.assert_allclose(embed_matrix(GroupElement((1, 0), math.pi)), [[-1, 1], [0, 1]], atol=1e-15)


@given(angle)
def test_wrap_angle_range(a):
    w = wrap_angle(a)
    assert -math.pi <= w < math.pi
    assert abs(cmath.exp(1j * w) - cmath.exp(1j * a)) < 1e-12


def test_act_complex_examples():
    z = np.array([0.3 - 1j, 2 + 0.5j])
    np.testing.assert_allclose(act_complex((0.0, 0.0), z), z)
    np.testing.assert_allclose(act_complex((0.0, math.pi / 2), [1.0, 2.0]), [-2.0, 1.0], atol=1e-15)


def test_act_complex_real_dilation():
    # w = e: zeta = -i, so the image of (1, 0) is (cos(-i), sin(-i))
    c, s = cos_sin_series(-1j)
    np.testing.assert_allclose(act_complex((1.0, 0.0), [1.0, 0.0]), [c, s], rtol=1e-14)
    np.testing.assert_allclose([c, s], [math.cosh(1), -1j * math.sinh(1)], rtol=1e-14)


@given(st.floats(-2, 2), angle, st.floats(-2, 2), angle)
def test_act_complex_is_an_action(u1, t1, u2, t2):
    z = np.array([0.4 + 0.1j, -1.2 + 0.3j])
    lhs = act_complex((u1 + u2, t1 + t2), z)
    rhs = act_complex((u1, t1), act_complex((u2, t2), z))
    np.testing.assert_allclose(lhs, rhs, rtol=1e-10, atol=1e-10)


@given(angle, coord, coord)
def test_unit_circle_preserves_real_plane(t, a, b):
    assert np.max(np.abs(act_complex((0.0, t), [a, b]).imag)) < 1e-12


def test_complex_point_from_w():
    p = ComplexGroupPoint.from_w([1j, 0], 2.0 * cmath.exp(0.4j))
    assert p.rho == pytest.approx(2.0)
    assert p.w == pytest.approx(2.0 * cmath.exp(0.4j))
    with pytest.raises(ValueError):
        ComplexGroupPoint.from_w([0, 0], 0)
