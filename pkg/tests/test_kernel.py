import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import (
    cauchy_coefficients,
    fd_derivative,
    kernel_term_series,
    kernel_vector_series,
    random_point,
    random_unit_vector,
    separated_points,
    series_inner,
)
from strategies import generator, seeds

from dshift.errors import InputError, PoleError
from dshift.kernel import (
    BallPoint,
    JetFunctional,
    JetSpace,
    KernelTerm,
    KernelVector,
    Polynomial,
    apply_functional,
    fantappie_vector,
    gram,
    jet_expand,
    jet_space,
    kernel_eval,
    multi_indices,
)
from dshift.linalg import posdef_invertible


def _random_poly(g, d, degree=3):
    terms = {a: complex(*g.normal(size=2)) for a in multi_indices(d, degree) if g.uniform() < 0.6}
    return Polynomial(d, terms or {(0,) * d: 1.0})


def _random_kernel_vector(g, d, nterms=3):
    terms = []
    for _ in range(nterms):
        alpha = tuple(int(v) for v in g.integers(0, 3, size=d))
        terms.append(KernelTerm(complex(*g.normal(size=2)), alpha,
                                BallPoint(random_point(g, d, 0.6)), int(g.integers(1, 4))))
    return KernelVector(d, terms)


class TestBallPoint:
    def test_outside_rejected(self):
        with pytest.raises(InputError, match="outside"):
            BallPoint([1.0, 0.5])

    def test_sphere_not_interior(self):
        assert not BallPoint([0.6, 0.8]).interior
        assert BallPoint([0.6, 0.79]).interior

    def test_equality_and_hash(self):
        assert BallPoint([0.1, 0.2j]) == BallPoint([0.1, 0.2j])
        assert len({BallPoint([0.1]), BallPoint([0.1])}) == 1

    def test_padded(self):
        p = BallPoint([0.3 + 0.1j]).padded(3)
        assert p.d == 3 and p.coords[1] == 0

    def test_non_finite(self):
        with pytest.raises(InputError):
            BallPoint([np.nan])


def test_multi_indices_order():
    idx = multi_indices(3, 2)
    assert idx[0] == (0, 0, 0) and len(idx) == 10
    assert [sum(a) for a in idx] == sorted(sum(a) for a in idx)


class TestKernelEval:
    def test_origin(self, rng):
        for _ in range(5):
            assert kernel_eval([0, 0], random_point(rng, 2)) == 1

    def test_half(self):
        assert kernel_eval([0.5], [0.5]) == pytest.approx(4 / 3, abs=1e-15)

    def test_pole_and_boundary(self):
        with pytest.raises(InputError):
            kernel_eval([1.0], [1.0])
        assert kernel_eval([1.0], [0.5]) == pytest.approx(2)

    def test_gram_pairing(self, rng):
        x, y = random_point(rng, 3), random_point(rng, 3)
        B = gram([x, y])
        assert B[0, 1] == pytest.approx(kernel_eval(y, x), abs=1e-15)
        assert B[1, 0] == pytest.approx(kernel_eval(x, y), abs=1e-15)


class TestGram:
    def test_single_origin(self):
        assert np.array_equal(gram([[0]]), [[1]])

    def test_two_points(self):
        r = 0.7
        assert np.allclose(gram([[0], [r]]), [[1, 1], [1, 1 / (1 - r**2)]], atol=1e-15)

    def test_errors(self):
        with pytest.raises(InputError, match="coincide"):
            gram([[0.2], [0.2 + 1e-10]])
        with pytest.raises(InputError, match="boundary split"):
            gram([[0.2], [1.0]])
        with pytest.raises(InputError):
            gram([])

    @given(seeds, st.integers(1, 4), st.integers(1, 6))
    @settings(max_examples=40, deadline=None)
    def test_hermitian_posdef(self, seed, d, m):
        B = gram(separated_points(generator(seed), m, d, sep=0.1))
        assert np.array_equal(B, B.conj().T)
        assert posdef_invertible(B, 1e-14).strictly_positive

    def test_padding_bit_identical(self, rng):
        pts = separated_points(rng, 4, 2)
        padded = [np.concatenate([p, [0]]) for p in pts]
        assert np.array_equal(gram(pts), gram(padded))


class TestFantappie:
    def test_evaluation_at_origin(self):
        lam = fantappie_vector(JetFunctional.evaluation([0, 0]))
        assert lam([0.3, 0.4j]) == pytest.approx(1)

    def test_first_derivative_at_origin(self, rng):
        lam = fantappie_vector(JetFunctional.derivative([0, 0], (1, 0)))
        z = random_point(rng, 2)
        assert lam(z) == pytest.approx(z[0], abs=1e-15)

    def test_second_derivative_closed_form(self, rng):
        a = random_point(rng, 2, 0.5)
        lam = fantappie_vector(JetFunctional.derivative(a, (2, 0)))
        for _ in range(5):
            z = random_point(rng, 2, 0.8)
            closed = 2 * z[0] ** 2 * (1 - np.vdot(a, z)) ** -3
            assert lam(z) == pytest.approx(closed, rel=1e-13)
            # conj of the functional applied to y -> (1 - <y, z>)^{-1}
            fd = np.conj(fd_derivative(lambda y: 1 / (1 - np.vdot(z, y)), a, (2, 0)))
            assert abs(lam(z) - fd) <= 1e-6

    @given(seeds)
    @settings(max_examples=30, deadline=None)
    def test_linearity(self, seed):
        g = generator(seed)
        a = random_point(g, 2, 0.7)
        l1 = JetFunctional(a, {(0, 0): complex(*g.normal(size=2)), (1, 1): 1.0})
        l2 = JetFunctional(a, {(1, 0): complex(*g.normal(size=2)), (0, 2): 2.0})
        beta = complex(*g.normal(size=2))
        combined = fantappie_vector(l1 + l2.scaled(beta))
        split = fantappie_vector(l1) + fantappie_vector(l2).scaled(np.conj(beta))
        for _ in range(3):
            z = random_point(g, 2, 0.9)
            assert combined(z) == pytest.approx(split(z), rel=1e-12, abs=1e-12)

    def test_boundary_base_rejected(self):
        with pytest.raises(InputError):
            fantappie_vector(JetFunctional.evaluation([1.0]))


class TestJets:
    def test_constant(self, rng):
        j = jet_expand(Polynomial.constant(2), random_point(rng, 2), 3)
        assert j.coeffs[0] == 1 and not np.any(j.coeffs[1:])

    def test_geometric_series(self):
        a = 0.3 + 0.4j
        kv = KernelVector(1, [KernelTerm(1.0, (0,), BallPoint([a]), 1)])
        j = jet_expand(kv, [0], 2)
        assert np.allclose(j.coeffs, [1, np.conj(a), np.conj(a) ** 2], atol=1e-15)

    def test_reciprocal_and_power(self, rng):
        sp = JetSpace(2, 4)
        x = rng.normal(size=sp.size) + 1j * rng.normal(size=sp.size)
        x[0] = 2.0
        one = sp.mul(x, sp.reciprocal(x))
        assert np.allclose(one, sp.constant(1), atol=1e-12)
        assert np.allclose(sp.power(x, 3), sp.mul(x, sp.mul(x, x)), atol=1e-12)

    def test_extended_dtype(self):
        sp = jet_space(1, 2, np.clongdouble)
        assert sp.constant(1).dtype == np.clongdouble

    def test_pole_error(self):
        kv = KernelVector(1, [KernelTerm(1.0, (0,), BallPoint([0.5]), 1)])
        with pytest.raises(PoleError):
            kv([2.0])

    @given(seeds, st.integers(1, 3))
    @settings(max_examples=20, deadline=None)
    def test_matches_cauchy_integral(self, seed, d):
        g = generator(seed)
        kv = _random_kernel_vector(g, d)
        base = random_point(g, d, 0.2)
        order = 3
        exact = jet_expand(kv, base, order).as_dict()
        ref = cauchy_coefficients(kv, base, order, radius=0.05, samples=16 if d == 3 else 24)
        for a, c in ref.items():
            assert abs(exact[a] - c) <= 1e-8 * max(1, abs(c))

    @given(seeds)
    @settings(max_examples=10, deadline=None)
    def test_derivatives_match_finite_differences(self, seed):
        g = generator(seed)
        kv = _random_kernel_vector(g, 2, 2)
        base = random_point(g, 2, 0.3)
        jet = jet_expand(kv, base, 2)
        for alpha in [(1, 0), (0, 1), (2, 0), (1, 1)]:
            fd = fd_derivative(kv, base, alpha)
            assert abs(jet.derivative(alpha) - fd) <= 1e-6 * max(1, abs(fd))
            l = JetFunctional.derivative(base, alpha)
            assert apply_functional(l, kv) == pytest.approx(jet.derivative(alpha), rel=1e-13)

    def test_polynomial_jet(self, rng):
        p = _random_poly(rng, 2)
        base = random_point(rng, 2)
        j = jet_expand(p, base, 3)
        assert j.coefficient((0, 0)) == pytest.approx(p(base), rel=1e-13, abs=1e-13)


class TestApplyFunctional:
    def test_evaluation_pairing(self, rng):
        x, y = random_point(rng, 3, 0.8), random_point(rng, 3, 0.8)
        lam = fantappie_vector(JetFunctional.evaluation(y))
        val = apply_functional(JetFunctional.evaluation(x), lam)
        assert val == pytest.approx(1 / (1 - np.vdot(y, x)), rel=1e-14)

    def test_simple_derivatives(self):
        l = JetFunctional.derivative([0], (1,))
        assert apply_functional(l, Polynomial.monomial((1,))) == 1
        assert apply_functional(l, Polynomial.monomial((2,))) == 0

    def test_jet_value_input(self, rng):
        base = random_point(rng, 2)
        p = _random_poly(rng, 2)
        l = JetFunctional(base, {(1, 1): 2.0, (0, 0): 1j})
        assert apply_functional(l, jet_expand(p, base, 2)) == apply_functional(l, p)
        with pytest.raises(InputError):
            apply_functional(l, jet_expand(p, base, 1))

    @given(seeds, st.integers(1, 3))
    @settings(max_examples=30, deadline=None)
    def test_reproducing_property(self, seed, d):
        g = generator(seed)
        f = _random_poly(g, d)
        x = random_point(g, d, 0.8)
        ux = kernel_term_series(1.0, (0,) * d, x, 1, 3)
        # <f, u_x> in the power-series inner product equals f(x)
        assert series_inner(f.terms, ux) == pytest.approx(f(x), rel=1e-10, abs=1e-10)
        assert apply_functional(JetFunctional.evaluation(x), f) == pytest.approx(f(x), rel=1e-12, abs=1e-12)

    @given(seeds)
    @settings(max_examples=10, deadline=None)
    def test_functional_of_kernel_vector_is_inner_product(self, seed):
        # l_i(lambda_j) = <lambda_j, lambda_i>, checked against power series at 0
        g = generator(seed)
        d = 2
        a, b = random_point(g, d, 0.4), random_point(g, d, 0.4)
        li = JetFunctional(a, {(0, 0): 1.0, (1, 0): complex(*g.normal(size=2))})
        lj = JetFunctional(b, {(0, 1): 1.0, (1, 1): complex(*g.normal(size=2))})
        lam_i = kernel_vector_series(fantappie_vector(li), 30)
        lam_j = kernel_vector_series(fantappie_vector(lj), 30)
        assert apply_functional(li, fantappie_vector(lj)) == pytest.approx(
            series_inner(lam_j, lam_i), rel=1e-9)
