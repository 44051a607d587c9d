import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import phi_sdp, random_matrix
from strategies import generator, seeds

from dshift.counterexamples import (
    E11,
    E12,
    alpha_l22_witness,
    column_block,
    phi_bounds,
    phi_bruteforce,
    q0q0_block,
    q0q0_quotient_norm,
    row_block,
    shift2zero_norms,
)
from dshift.errors import InputError
from dshift.linalg import opnorm

SQRT2 = math.sqrt(2)


class TestShift2Zero:
    def test_scalars(self):
        w = shift2zero_norms([[0.6]], [[0.8j]])
        assert w.column_norm == pytest.approx(1) and w.row_norm == pytest.approx(1)

    def test_witness(self):
        w = shift2zero_norms(E11, E12)
        assert w.column_norm == pytest.approx(1, abs=1e-10)
        assert w.row_norm == pytest.approx(SQRT2, abs=1e-10)
        assert alpha_l22_witness() == pytest.approx(SQRT2, abs=1e-10)

    def test_zero(self):
        w = shift2zero_norms(np.zeros((2, 2)), np.zeros((2, 2)))
        assert w.column_norm == 0 and w.row_norm == 0

    def test_block_shapes(self):
        assert column_block(E11, E12).shape == (6, 6)
        assert row_block(E11, E12).shape == (6, 6)

    def test_size_mismatch(self):
        with pytest.raises(InputError):
            shift2zero_norms(np.eye(2), np.eye(3))

    @given(seeds, st.integers(1, 3))
    @settings(max_examples=100, deadline=None)
    def test_closed_forms_and_ratio_bound(self, seed, n):
        g = generator(seed)
        A, B = random_matrix(g, n), random_matrix(g, n)
        w = shift2zero_norms(A, B)
        assert w.column_norm == pytest.approx(w.closed_form_column, rel=1e-10)
        assert w.row_norm == pytest.approx(w.closed_form_row, rel=1e-10)
        if n <= 2:
            assert w.ratio <= SQRT2 + 1e-9
            assert 1 / w.ratio <= SQRT2 + 1e-9

    @given(seeds)
    @settings(max_examples=50, deadline=None)
    def test_scalar_ratio_is_one(self, seed):
        g = generator(seed)
        a, b = complex(*g.normal(size=2)), complex(*g.normal(size=2))
        assert shift2zero_norms([[a]], [[b]]).ratio == pytest.approx(1, abs=1e-12)


class TestQ0Q0:
    def test_examples(self):
        assert q0q0_quotient_norm(np.zeros((1, 1)), np.zeros((1, 1))) == 0
        assert q0q0_quotient_norm([[1]], [[1]]) == pytest.approx(SQRT2)
        assert q0q0_quotient_norm(E11, E12) == pytest.approx(SQRT2)

    @given(seeds, st.integers(1, 3))
    @settings(max_examples=60, deadline=None)
    def test_block_and_perturbations(self, seed, n):
        g = generator(seed)
        A, B = random_matrix(g, n), random_matrix(g, n)
        q = q0q0_quotient_norm(A, B)
        assert opnorm(q0q0_block(A, B)) == pytest.approx(q, abs=1e-9)
        for _ in range(5):
            assert opnorm(q0q0_block(A, B, random_matrix(g, n))) >= q - 1e-9

    @given(seeds)
    @settings(max_examples=30, deadline=None)
    def test_symmetric(self, seed):
        g = generator(seed)
        A, B = random_matrix(g, 2), random_matrix(g, 2)
        assert q0q0_quotient_norm(A, B) == q0q0_quotient_norm(B, A)

    def test_c_shape(self):
        with pytest.raises(InputError):
            q0q0_block(np.eye(2), np.eye(2), np.eye(3))


class TestPhi:
    def test_bounds_examples(self):
        assert phi_bounds(1, 1) == (1.0, 1.0)
        lo, hi = phi_bounds(0.5, 0.5)
        assert lo == 0.5 and hi == pytest.approx(math.sqrt(0.4375))
        lo, hi = phi_bounds(0.6, 1e-9)
        assert lo == 0.6 and hi == pytest.approx(0.6, abs=1e-8)

    def test_bounds_domain(self):
        with pytest.raises(InputError):
            phi_bounds(0, 0.5)
        with pytest.raises(InputError):
            phi_bounds(0.5, 1.2)

    @given(st.floats(0.01, 1), st.floats(0.01, 1))
    def test_bounds_ordered(self, c, d):
        lo, hi = phi_bounds(c, d)
        assert lo <= hi <= 1

    def test_unit_case(self):
        assert phi_bruteforce(1, 1).value == pytest.approx(1, abs=1e-3)

    @pytest.mark.parametrize("c,d", [(0.3, 0.3), (0.5, 0.8), (0.9, 0.2), (0.7, 0.7)])
    def test_against_sdp(self, c, d):
        est = phi_bruteforce(c, d)
        assert est.certified
        assert est.value == pytest.approx(phi_sdp(c, d), abs=1e-6)
        lo, hi = phi_bounds(c, d)
        assert lo - 1e-3 <= est.value <= hi + 1e-3

    def test_symmetric_in_arguments(self):
        assert phi_bruteforce(0.4, 0.7).value == pytest.approx(phi_bruteforce(0.7, 0.4).value, abs=1e-7)

    def test_monotone(self):
        axis = [0.2, 0.5, 0.8]
        vals = np.array([[phi_bruteforce(c, d).value for d in axis] for c in axis])
        assert np.all(np.diff(vals, axis=0) >= -1e-7)
        assert np.all(np.diff(vals, axis=1) >= -1e-7)

    def test_small_budget_flags(self):
        est = phi_bruteforce(0.5, 0.6, budget=3)
        assert not est.certified
        assert est.value >= 0.6 - 1e-3
