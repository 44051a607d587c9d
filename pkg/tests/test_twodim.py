import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import random_matrix, random_unitary
from strategies import generator, seeds

from dshift.errors import DegenerateError, DomainError, InputError, NotAnAlgebraError
from dshift.linalg import opnorm
from dshift.twodim import (
    HomSpec,
    classify_two_dim,
    cond2x2,
    h,
    hom_norm,
    iota_similarity,
    tc_matrix,
    tilde_tc,
)

unit_c = st.floats(0.01, 1.0)


class TestTc:
    def test_endpoints(self):
        assert np.array_equal(tc_matrix(0), [[0, 1], [0, 0]])
        assert np.array_equal(tc_matrix(1), [[0, 0], [0, 1]])

    def test_point_six(self):
        T = tc_matrix(0.6)
        assert np.allclose(T, [[0, 0.8], [0, 0.6]], atol=1e-15)
        assert opnorm(T) == pytest.approx(1, abs=1e-14)

    @pytest.mark.parametrize("c", [-0.1, 1.1, float("nan")])
    def test_range(self, c):
        with pytest.raises(InputError):
            tc_matrix(c)

    @given(st.floats(0, 1))
    def test_relation(self, c):
        T = tc_matrix(c)
        assert np.abs(T @ T - c * T).max() <= 1e-12


class TestClassify:
    @given(st.floats(0, 1))
    def test_fixed_point(self, c):
        assert classify_two_dim(tc_matrix(c)).c == pytest.approx(c, abs=1e-10)

    def test_nilpotent_and_idempotent(self):
        assert classify_two_dim([[0, 1], [0, 0]]).c == 0
        assert classify_two_dim(np.diag([0, 1])).c == pytest.approx(1)

    def test_errors(self):
        with pytest.raises(DegenerateError):
            classify_two_dim(3 * np.eye(2))
        with pytest.raises(NotAnAlgebraError):
            classify_two_dim(np.diag([0, 1, 2]))

    @given(seeds, unit_c)
    @settings(max_examples=60, deadline=None)
    def test_invariance(self, seed, c):
        g = generator(seed)
        U = random_unitary(g, 2)
        a = complex(*g.normal(size=2)) + 0.1
        b = complex(*g.normal(size=2))
        G = a * (U @ tc_matrix(c) @ U.conj().T) + b * np.eye(2)
        assert classify_two_dim(G).c == pytest.approx(c, abs=1e-9)

    def test_embedded_in_larger_space(self):
        # a 3x3 generator of Q_c: the direct sum with a repeated eigenvalue
        c = 0.4
        G = np.zeros((3, 3), dtype=complex)
        G[:2, :2] = tc_matrix(c)
        assert classify_two_dim(G).c == pytest.approx(c, abs=1e-12)


class TestH:
    def test_values(self):
        assert h(1) == 1
        assert h(0.6) == pytest.approx(3, abs=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            h(0)

    @given(unit_c)
    def test_equals_norm(self, c):
        assert opnorm(tilde_tc(c)) == pytest.approx(h(c), rel=1e-10)

    @given(unit_c, unit_c)
    def test_decreasing(self, c1, c2):
        lo, hi = sorted((c1, c2))
        assert h(lo) >= h(hi)


class TestHomNorm:
    def test_examples(self):
        assert hom_norm(HomSpec("m_lambda", lam=2)) == 2
        assert hom_norm(HomSpec("m_lambda", lam=0.5j)) == 1
        assert hom_norm(HomSpec("theta", source_c=0.5)) == 1
        assert hom_norm(HomSpec("iota", source_c=0.8, target_c=0.6)) == pytest.approx(1.5, abs=1e-14)

    def test_invalid(self):
        with pytest.raises(InputError):
            HomSpec("bogus")
        with pytest.raises(InputError):
            HomSpec("m_lambda")
        with pytest.raises(InputError):
            HomSpec("iota", source_c=0.0, target_c=0.5)

    @given(unit_c, unit_c, unit_c)
    def test_composition(self, c, c1, c2):
        direct = hom_norm(HomSpec("iota", source_c=c, target_c=c2))
        via = hom_norm(HomSpec("iota", source_c=c1, target_c=c2)) * hom_norm(
            HomSpec("iota", source_c=c, target_c=c1))
        assert direct <= via * (1 + 1e-12)

    @given(st.floats(0, 1))
    def test_theta_involution(self, c):
        # coordinates (a, b) of a + b T_c; theta sends T_c to c - T_c
        theta = np.array([[1, c], [0, -1]])
        assert np.array_equal(theta @ theta, np.eye(2))

    @given(unit_c, unit_c)
    @settings(max_examples=60)
    def test_similarity(self, c1, c2):
        cp, c = sorted((c1, c2))
        if c - cp < 1e-6:
            return
        S = iota_similarity(c, cp)
        Sinv = np.linalg.inv(S)
        assert np.abs(S @ tc_matrix(c) @ Sinv - (c / cp) * tc_matrix(cp)).max() <= 1e-12 * h(cp) ** 2
        assert opnorm(S) * opnorm(Sinv) == pytest.approx(h(cp) / h(c), rel=1e-9)

    def test_witness_lower_bound(self, rng):
        # ||iota|| is at least the ratio of norms at a witness element
        c, cp = 0.8, 0.6
        x = tilde_tc(c)
        image = -np.eye(2) + 2 / c * (c / cp) * tc_matrix(cp)
        assert opnorm(image) / opnorm(x) == pytest.approx(hom_norm(HomSpec("iota", source_c=c, target_c=cp)))


class TestCond:
    def test_examples(self):
        assert cond2x2(1, 0) == pytest.approx(1)
        assert cond2x2(0.5, 0) == pytest.approx(2)
        with pytest.raises(DomainError):
            cond2x2(0, 1)

    @given(seeds)
    @settings(max_examples=100, deadline=None)
    def test_svd_oracle(self, seed):
        g = generator(seed)
        x, y = complex(*g.normal(size=2)), complex(*g.normal(size=2))
        s = np.linalg.svd(np.array([[1, y], [0, x]]), compute_uv=False)
        assert cond2x2(x, y) == pytest.approx(s[0] / s[-1], rel=1e-10)


def test_unitization_scaling():
    # scaling T_0 by M > 1 is realized by the similarity diag(sqrt M, 1/sqrt M)
    for M in (1.5, 4.0, 10.0):
        S = np.diag([math.sqrt(M), 1 / math.sqrt(M)])
        T0 = tc_matrix(0)
        assert np.allclose(S @ T0 @ np.linalg.inv(S), M * T0)
        s = np.linalg.svd(S, compute_uv=False)
        assert s[0] / s[-1] == pytest.approx(M, rel=1e-10)
