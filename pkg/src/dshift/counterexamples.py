"""Quantitative counterexamples and tensor-product bounds.

* The quotient ``Shift_2(0) = S_2 / I(0)^2`` sends ``(A, B)`` to the column
  block ``[[0, 0, A], [0, 0, B], [0, 0, 0]]`` of norm ``||A*A + B*B||^{1/2}``;
  in the transposed algebra the same element becomes a row block of norm
  ``||AA* + BB*||^{1/2}``.  The witness ``(e11, e12)`` gives 1 and sqrt(2).
* The quotient ``Q_0 (x) Q_0`` has the closed-form norm
  ``max(||AA* + BB*||^{1/2}, ||A*A + B*B||^{1/2})``.
* ``phi(c, d)``, the quotient distance of ``Q_c (x) Q_d`` between the
  characters ``(0, 0)`` and ``(c, d)``, is only known to lie in a bracket;
  :func:`phi_bruteforce` estimates it numerically.

All norms are operator norms, so the scalar case reads
``||(a, b)|| = sqrt(|a|^2 + |b|^2)``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from scipy.optimize import minimize_scalar

from .errors import InputError
from .linalg import as_square, opnorm
from .twodim import tc_matrix


def _pair(A, B):
    A, B = as_square(A, "A"), as_square(B, "B")
    if A.shape != B.shape:
        raise InputError(f"A and B must have equal shapes, got {A.shape} and {B.shape}")
    return A, B


def column_block(A, B) -> np.ndarray:
    """``[[0, 0, A], [0, 0, B], [0, 0, 0]]``."""
    A, B = _pair(A, B)
    n = A.shape[0]
    M = np.zeros((3 * n, 3 * n), dtype=complex)
    M[:n, 2 * n:] = A
    M[n:2 * n, 2 * n:] = B
    return M


def row_block(A, B) -> np.ndarray:
    """``[[0, A, B], [0, 0, 0], [0, 0, 0]]``, the image in the transposed algebra."""
    A, B = _pair(A, B)
    n = A.shape[0]
    M = np.zeros((3 * n, 3 * n), dtype=complex)
    M[:n, n:2 * n] = A
    M[:n, 2 * n:] = B
    return M


@dataclass(frozen=True)
class GapWitness:
    A: np.ndarray
    B: np.ndarray
    column_norm: float
    row_norm: float
    closed_form_column: float
    closed_form_row: float

    @property
    def ratio(self) -> float:
        """``row_norm / column_norm`` (1 for the zero pair)."""
        return self.row_norm / self.column_norm if self.column_norm > 0 else 1.0


def shift2zero_norms(A, B) -> GapWitness:
    """Norms of ``(A, B)`` in ``Shift_2(0)_(n)`` and in its transpose.

    >>> w = shift2zero_norms([[1, 0], [0, 0]], [[0, 1], [0, 0]])
    >>> round(w.column_norm, 12), round(w.row_norm ** 2, 12)
    (1.0, 2.0)
    """
    A, B = _pair(A, B)
    Ah, Bh = A.conj().T, B.conj().T
    return GapWitness(
        A=A,
        B=B,
        column_norm=opnorm(column_block(A, B)),
        row_norm=opnorm(row_block(A, B)),
        closed_form_column=math.sqrt(opnorm(Ah @ A + Bh @ B)),
        closed_form_row=math.sqrt(opnorm(A @ Ah + B @ Bh)),
    )


E11 = np.array([[1, 0], [0, 0]], dtype=complex)
E12 = np.array([[0, 1], [0, 0]], dtype=complex)


def alpha_l22_witness() -> float:
    """Transposition gap ``row_norm / column_norm`` at ``(e11, e12)``, equal to sqrt(2)."""
    return shift2zero_norms(E11, E12).ratio


def q0q0_quotient_norm(A, B) -> float:
    """Closed-form norm of ``A [T_0 (x) 1] + B [1 (x) T_0]`` in ``Q_0 (x) Q_0``."""
    w = shift2zero_norms(A, B)
    return max(w.closed_form_row, w.closed_form_column)


def q0q0_block(A, B, C=None) -> np.ndarray:
    """``[[0, A, B, C], [0, 0, 0, B], [0, 0, 0, A]]``; ``C`` is the free ideal component."""
    A, B = _pair(A, B)
    n = A.shape[0]
    C = np.zeros((n, n), dtype=complex) if C is None else as_square(C, "C")
    if C.shape != A.shape:
        raise InputError("C must match A and B", "C")
    Z = np.zeros((n, n), dtype=complex)
    return np.block([[Z, A, B, C], [Z, Z, Z, B], [Z, Z, Z, A]])


def phi_bounds(c: float, d: float) -> tuple[float, float]:
    """Bracket ``(max(c, d), min(sqrt(c^2 + d^2 - c^2 d^2), (c + d) / (1 + c d)))`` for ``phi``.

    >>> phi_bounds(1, 1)
    (1.0, 1.0)
    """
    c, d = _check_unit(c, "c"), _check_unit(d, "d")
    lower = max(c, d)
    upper = min(math.sqrt(c * c + d * d - c * c * d * d), (c + d) / (1 + c * d))
    return lower, max(upper, lower)


def _check_unit(c, name):
    c = float(c)
    if not 0 < c <= 1:
        raise InputError(f"{name} = {c} must lie in (0, 1]", name)
    return c


@dataclass(frozen=True)
class PhiEstimate:
    value: float
    coefficients: tuple[float, float, float]
    certified: bool
    evaluations: int


def _phi_ratio(coef, c, d, basis):
    """``|f(c, d)| / ||f||`` for ``f = a T_c(x)1 + b 1(x)T_d + e T_c(x)T_d``."""
    a, b, e = coef
    nrm = opnorm(a * basis[0] + b * basis[1] + e * basis[2])
    if nrm == 0:
        return 0.0
    return abs(a * c + b * d + e * c * d) / nrm


def _convex_argmin(f, xatol, maxiter):
    """Minimize a convex function of one variable; returns ``(x, f(x), converged)``.

    The bracket is grown until both ends exceed the value at the origin,
    so the minimizer lies inside it.
    """
    f0 = f(0.0)
    h = 1.0
    while (f(-h) < f0 or f(h) < f0) and h < 1e8:
        h *= 4
    res = minimize_scalar(f, bounds=(-h, h), method="bounded",
                          options={"xatol": xatol, "maxiter": maxiter})
    if res.fun > f0:
        return 0.0, f0, bool(res.success)
    return float(res.x), float(res.fun), bool(res.success)


def phi_bruteforce(c: float, d: float, budget: int = 200, grid: int = 17) -> PhiEstimate:
    """Numerical estimate of ``phi(c, d)``.

    Maximizes ``|f(c, d)| / ||f||`` over ``f`` in the span of ``T_c (x) 1``,
    ``1 (x) T_d`` and ``T_c (x) T_d``; these are exactly the elements with
    ``f(0, 0) = 0``.  The algebra is invariant under entrywise conjugation,
    and the objective is a ratio of a linear form and a norm, so real
    coefficients suffice.

    A coarse grid on ``[-1, 1]^3`` supplies a start.  The refinement
    minimizes the norm on the plane ``f(c, d) = 1``.  The norm is convex
    but not smooth there (the top singular value is typically double at the
    optimum), so the plane is searched by nested bounded scalar
    minimizations, each limited to ``budget`` iterations.  ``certified`` is
    false if any of them hit that limit.
    """
    c, d = _check_unit(c, "c"), _check_unit(d, "d")
    Tc, Td = tc_matrix(c).real, tc_matrix(d).real
    eye = np.eye(2)
    basis = (np.kron(Tc, eye), np.kron(eye, Td), np.kron(Tc, Td))
    axis = np.linspace(-1, 1, grid)
    best, best_val = None, -1.0
    evals = 0
    for coef in itertools.product(axis, repeat=3):
        val = _phi_ratio(coef, c, d, basis)
        evals += 1
        if val > best_val:
            best, best_val = np.array(coef), val

    ell = np.array([c, d, c * d])
    x0 = best / (ell @ best)
    _, _, Vt = np.linalg.svd(ell[None, :])
    u, v = Vt[1], Vt[2]
    counter = [0]
    certified = [True]

    def norm_at(s, t):
        counter[0] += 1
        x = x0 + s * u + t * v
        return opnorm(x[0] * basis[0] + x[1] * basis[1] + x[2] * basis[2])

    def inner_min(s):
        t, val, ok = _convex_argmin(lambda t: norm_at(s, t), 1e-12, budget)
        certified[0] &= ok
        return val, t

    s, val, ok = _convex_argmin(lambda s: inner_min(s)[0], 1e-12, budget)
    certified[0] &= ok
    _, t = inner_min(s)
    x = x0 + s * u + t * v
    value = max(1 / val, best_val)
    return PhiEstimate(float(value), tuple(float(w) for w in x / val), certified[0], evals + counter[0])
