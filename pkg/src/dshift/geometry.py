"""Quotient distance and metric of the d-shift algebra.

For ``S_d`` the quotient distance ``c*(x, y) = sup{|f(y)| : ||f|| <= 1, f(x) = 0}``
has the closed form

    ``c*(x, y)^2 = 1 - (1 - |x|^2)(1 - |y|^2) / |1 - <x, y>|^2``

and the quotient metric at ``a`` in direction ``X`` is

    ``gamma(a; X)^2 = |X|^2 / (1 - |a|^2) + |<a, X>|^2 / (1 - |a|^2)^2``.

Both are cross-checked here by bisection on Pick feasibility.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InputError, PoleError
from .kernel import BallPoint, JetFunctional, as_point, inner
from .pick import PickProblem, pick_matrix

BRACKET_TOP = 1 - 1e-12
BISECTION_STEPS = 60
DECOMPOSABLE_TOL = 1e-9


class _Unbounded:
    """Sentinel for an infinite distance; serialized as ``"inf"``."""

    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self):
        return "UNBOUNDED"

    def __str__(self):
        return "inf"

    def __reduce__(self):
        return (_Unbounded, ())


UNBOUNDED = _Unbounded()


def mobius_distance(l1: complex, l2: complex) -> float:
    """``|l1 - l2| / |1 - l1 conj(l2)|``.

    >>> mobius_distance(0.5, -0.5)
    0.8
    """
    l1, l2 = complex(l1), complex(l2)
    if abs(l1) > 1 + 1e-12 or abs(l2) > 1 + 1e-12:
        raise InputError("arguments must lie in the closed unit disk")
    denom = abs(1 - l1 * l2.conjugate())
    if denom <= 1e-15:
        raise PoleError("Moebius distance undefined (1 - l1 conj(l2) = 0)")
    return abs(l1 - l2) / denom


def _pair(x, y):
    x, y = as_point(x), as_point(y)
    if x.d != y.d:
        raise InputError("points must have equal dimension")
    return x, y


def cstar_shift(x, y) -> float:
    """Closed-form quotient distance of ``S_d``; 1 if a point is on the sphere."""
    x, y = _pair(x, y)
    if x == y:
        return 0.0
    if not (x.interior and y.interior):
        return 1.0
    if (y.norm2, y.coords.tobytes()) < (x.norm2, x.coords.tobytes()):
        x, y = y, x  # canonical order keeps the result exactly symmetric
    # 1 - (1-|x|^2)(1-|y|^2)/|1-<x,y>|^2 rewritten without cancellation:
    # |1-<x,y>|^2 - (1-|x|^2)(1-|y|^2) = (1-|x|^2)|h|^2 + |<h,x>|^2, h = y - x
    h = y.coords - x.coords
    num = (1 - x.norm2) * float(np.vdot(h, h).real) + abs(inner(h, x.coords)) ** 2
    return min(math.sqrt(num) / abs(1 - inner(x.coords, y.coords)), 1.0)


def c_shift(x, y):
    """``arctanh(cstar_shift(x, y))`` or :data:`UNBOUNDED`."""
    c = cstar_shift(x, y)
    return UNBOUNDED if c >= 1 else math.atanh(c)


def _min_eig(problem) -> float:
    return float(np.linalg.eigvalsh(pick_matrix(problem))[0])


def cstar_oracle(x, y, tol: float = 0.0) -> float:
    """Largest ``t`` with ``{x -> 0, y -> t}`` strictly feasible, by bisection.

    A target ``t`` counts as feasible when the least eigenvalue of the Pick
    matrix exceeds ``tol`` (default: a plain sign test).
    """
    x, y = _pair(x, y)
    if not (x.interior and y.interior):
        raise InputError("oracle requires interior points")
    if x == y:
        raise InputError("oracle requires distinct points")
    lo, hi = 0.0, BRACKET_TOP
    for _ in range(BISECTION_STEPS):
        t = (lo + hi) / 2
        if _min_eig(PickProblem([x, y], [[[0]], [[t]]])) > tol:
            lo = t
        else:
            hi = t
    return (lo + hi) / 2


@dataclass(frozen=True, eq=False)
class TangentVector:
    base: BallPoint
    direction: np.ndarray

    def __post_init__(self):
        base = as_point(self.base)
        if not base.interior:
            raise InputError("tangent vectors need an interior base point", "base")
        X = np.asarray(self.direction, dtype=complex).ravel()
        if X.shape != (base.d,) or not np.all(np.isfinite(X)):
            raise InputError(f"direction must be a finite vector of length {base.d}", "direction")
        if not np.any(X):
            raise InputError("direction must be nonzero", "direction")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "direction", X)


def metric_shift(v: TangentVector) -> float:
    """Closed-form quotient metric of ``S_d``."""
    a, X = v.base.coords, v.direction
    s = 1 - v.base.norm2
    nX2 = float(np.vdot(X, X).real)
    return math.sqrt(nX2 / s + abs(inner(a, X)) ** 2 / s**2)


def ball_automorphism(a):
    """The involutive automorphism ``phi_a`` of the ball exchanging ``0`` and ``a``.

    ``phi_a(z) = (a - P_a z - s_a Q_a z) / (1 - <z, a>)`` with ``P_a`` the
    orthogonal projection onto ``span{a}``, ``Q_a = 1 - P_a`` and
    ``s_a = sqrt(1 - |a|^2)``.
    """
    a = as_point(a)
    if not a.interior:
        raise InputError("automorphism center must lie in the open ball")
    av = a.coords
    na2 = a.norm2
    s_a = math.sqrt(1 - na2)

    def phi(z) -> BallPoint:
        z = as_point(z)
        if z.d != a.d:
            raise InputError("dimension mismatch")
        zv = z.coords
        denom = 1 - inner(zv, av)
        if abs(denom) <= 1e-15:
            raise PoleError("automorphism evaluated at its pole")
        Pz = (inner(zv, av) / na2) * av if na2 > 0 else np.zeros_like(zv)
        w = (av - Pz - s_a * (zv - Pz)) / denom
        # rounding may push images of sphere points marginally outside
        n2 = float(np.vdot(w, w).real)
        if n2 > 1:
            w = w / math.sqrt(n2)
        return BallPoint(w)

    return phi


def pair_decomposable(x, y, tol: float = DECOMPOSABLE_TOL) -> bool:
    """Whether the two-point quotient is the orthogonal sum ``C + C``."""
    x, y = _pair(x, y)
    if x == y:
        raise InputError("points must be distinct")
    return cstar_shift(x, y) >= 1 - tol
