import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_matrix
from strategies import generator, seeds

from dshift.cayley import AutomorphismSpec, ball_cone_roundtrip, cayley, psi_automorphism
from dshift.errors import DomainError, InputError
from dshift.linalg import opnorm, posdef_invertible


def _in_ball(g, n, radius):
    X = random_matrix(g, n)
    return radius * X / opnorm(X)


def test_zero_maps_to_identity():
    for n in (1, 3):
        assert np.allclose(cayley(np.zeros((n, n))), np.eye(n))


def test_scalar_third():
    assert cayley([[1 / 3]])[0, 0] == pytest.approx(0.5, abs=1e-15)


def test_singular():
    with pytest.raises(DomainError, match="Cayley undefined"):
        cayley(-np.eye(2))


@given(seeds, st.integers(1, 6), st.floats(0.0, 0.99))
@settings(max_examples=80, deadline=None)
def test_involution(seed, n, radius):
    X = _in_ball(generator(seed), n, radius)
    assert opnorm(cayley(cayley(X)) - X) <= 1e-10 * (1 + opnorm(X))


@given(seeds, st.integers(2, 6), st.floats(0.0, 0.999))
@settings(max_examples=80, deadline=None)
def test_ball_to_cone(seed, n, radius):
    X = _in_ball(generator(seed), n, radius)
    assert ball_cone_roundtrip(X).strictly_positive


@given(seeds, st.integers(2, 6))
@settings(max_examples=80, deadline=None)
def test_cone_to_ball(seed, n):
    g = generator(seed)
    A = random_matrix(g, n)
    K = random_matrix(g, n)
    Y = A @ A.conj().T + 0.05 * np.eye(n) + (K - K.conj().T)
    assert posdef_invertible(Y).strictly_positive
    assert opnorm(cayley(Y)) < 1


def test_roundtrip_examples(rng):
    assert ball_cone_roundtrip(np.zeros((2, 2))).min_eigenvalue == pytest.approx(1)
    r = ball_cone_roundtrip([[0.99]])
    assert r.strictly_positive and r.min_eigenvalue == pytest.approx(0.01 / 1.99)
    assert ball_cone_roundtrip(_in_ball(rng, 4, 0.95)).strictly_positive
    with pytest.raises(InputError):
        ball_cone_roundtrip([[1.0]])


def test_spec_validation():
    with pytest.raises(InputError, match="invertible"):
        AutomorphismSpec(np.zeros((2, 2)), np.zeros((2, 2)))
    with pytest.raises(InputError, match="Re B"):
        AutomorphismSpec(np.eye(2), np.eye(2))
    with pytest.raises(InputError):
        AutomorphismSpec(np.eye(2), np.zeros((3, 3)))
    # tiny Hermitian defect is discarded
    s = AutomorphismSpec(np.eye(2), 1e-12 * np.eye(2) + 1j * np.eye(2))
    assert np.allclose(s.B, 1j * np.eye(2), atol=0)


def test_identity_automorphism(rng):
    spec = AutomorphismSpec(np.eye(3), np.zeros((3, 3)))
    X = _in_ball(rng, 3, 0.7)
    assert np.allclose(psi_automorphism(spec, X), X, atol=1e-13)


def test_scalar_mobius_on_grid():
    spec = AutomorphismSpec([[0.7 + 0.2j]], [[0.4j]])
    r = np.linspace(0, 0.999, 15)
    t = np.linspace(0, 2 * np.pi, 16)
    for rr in r:
        for tt in t:
            assert abs(psi_automorphism(spec, [[rr * np.exp(1j * tt)]])[0, 0]) < 1


@given(seeds, st.integers(1, 4), st.floats(0.0, 0.95))
@settings(max_examples=50, deadline=None)
def test_sending_zero_to(seed, n, radius):
    X0 = _in_ball(generator(seed), n, radius)
    spec = AutomorphismSpec.sending_zero_to(X0)
    assert np.allclose(psi_automorphism(spec, np.zeros((n, n))), X0, atol=1e-10)


@given(seeds, st.integers(1, 4), st.floats(0.0, 0.95))
@settings(max_examples=50, deadline=None)
def test_maps_ball_and_inverse(seed, n, radius):
    g = generator(seed)
    A = random_matrix(g, n) + 1.5 * np.eye(n)
    K = random_matrix(g, n)
    spec = AutomorphismSpec(A, (K - K.conj().T) / 2)
    X = _in_ball(g, n, radius)
    Y = psi_automorphism(spec, X)
    assert opnorm(Y) < 1
    if opnorm(Y) < 1 - 1e-6:
        assert np.allclose(psi_automorphism(spec.inverse(), Y), X, atol=1e-9)


def test_psi_input_checks():
    spec = AutomorphismSpec(np.eye(2), np.zeros((2, 2)))
    with pytest.raises(InputError):
        psi_automorphism(spec, np.eye(3) * 0.1)
    with pytest.raises(InputError):
        psi_automorphism(spec, np.eye(2))
