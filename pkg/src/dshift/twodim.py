"""Two-dimensional unital operator algebras ``Q_c = span{1, T_c}``.

Every such algebra is completely isometric to exactly one ``Q_c`` with
``T_c = [[0, sqrt(1 - c^2)], [0, c]]`` and ``c`` in ``[0, 1]``.  The module
computes ``c`` for a given generator and the closed-form norms of the
homomorphisms between these algebras.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateError, DomainError, InputError, NotAnAlgebraError
from .linalg import as_square, opnorm

ALGEBRA_RESIDUAL = 1e-10


def _check_c(c, lo_open=False, name="c"):
    try:
        c = float(c)
    except (TypeError, ValueError):
        raise InputError(f"{name} must be a real number") from None
    if not math.isfinite(c) or c > 1 or c < 0 or (lo_open and c == 0):
        interval = "(0, 1]" if lo_open else "[0, 1]"
        raise InputError(f"{name} = {c} must lie in {interval}")
    return c


def tc_matrix(c: float) -> np.ndarray:
    """The canonical generator ``T_c``; ``||T_c|| = 1`` and ``T_c^2 = c T_c``."""
    c = _check_c(c)
    T = np.array([[0, math.sqrt(1 - c * c)], [0, c]], dtype=complex)
    assert abs(opnorm(T) - 1) <= 1e-12
    assert np.max(np.abs(T @ T - c * T)) <= 1e-12
    return T


@dataclass(frozen=True)
class TwoDimAlgebra:
    """The algebra ``Q_c``."""

    c: float

    def __post_init__(self):
        object.__setattr__(self, "c", _check_c(self.c))

    @property
    def generator(self) -> np.ndarray:
        return tc_matrix(self.c)


def classify_two_dim(G) -> TwoDimAlgebra:
    """Invariant ``c`` of the unital algebra spanned by ``1`` and ``G``.

    ``G^2 = alpha G + beta`` is found by least squares.  For a root ``mu`` of
    ``x^2 - alpha x - beta`` the shift ``G' = G - mu`` satisfies
    ``G'^2 = gamma G'`` with ``gamma = alpha - 2 mu``; normalizing and rotating
    gives ``c = |gamma| / ||G'||``.  Either root yields the same ``c``.

    Examples
    --------
    >>> classify_two_dim([[0, 1], [0, 0]]).c
    0.0
    >>> round(classify_two_dim(np.diag([0, 1])).c, 12)
    1.0
    """
    A = as_square(G, "G")
    n = A.shape[0]
    eye = np.eye(n, dtype=complex)
    scale = max(opnorm(A), 1.0)
    centered = A - (np.trace(A) / n) * eye
    if opnorm(centered) <= 1e-12 * scale:
        raise DegenerateError("G is a scalar multiple of the identity")
    basis = np.column_stack([A.ravel(), eye.ravel()])
    target = (A @ A).ravel()
    (alpha, beta), *_ = np.linalg.lstsq(basis, target, rcond=None)
    residual = np.linalg.norm(basis @ np.array([alpha, beta]) - target)
    if residual > ALGEBRA_RESIDUAL * scale**2:
        raise NotAnAlgebraError(f"G^2 is not in span{{1, G}} (residual {residual:.3e})")
    disc = np.sqrt(alpha * alpha + 4 * beta + 0j)
    mu = (alpha - disc) / 2
    shifted = A - mu * eye
    gamma = alpha - 2 * mu
    c = min(abs(gamma) / opnorm(shifted), 1.0)
    return TwoDimAlgebra(float(c))


def h(c: float) -> float:
    """``h(c) = (1 + sqrt(1 - c^2)) / c``, the norm of ``-1 + 2 T_c / c``."""
    c = float(c)
    if not c > 0:
        raise DomainError("h(c) requires c > 0")
    c = _check_c(c, lo_open=True)
    return (1 + math.sqrt(1 - c * c)) / c


def tilde_tc(c: float) -> np.ndarray:
    """``-1 + 2 T_c / c``, the image of ``T_c`` under the swap of the two characters."""
    c = _check_c(c, lo_open=True)
    return -np.eye(2) + (2 / c) * tc_matrix(c)


class HomKind(str, enum.Enum):
    M_LAMBDA = "m_lambda"
    THETA = "theta"
    IOTA = "iota"


@dataclass(frozen=True)
class HomSpec:
    """A unital homomorphism between two-dimensional algebras.

    * ``m_lambda`` on ``Q_0``: ``T_0 -> lambda T_0``.
    * ``theta`` on ``Q_c``: ``T_c -> c - T_c``.
    * ``iota`` from ``Q_c`` to ``Q_c'``: ``T_c -> (c / c') T_c'``.
    """

    kind: HomKind
    lam: complex | None = None
    source_c: float | None = None
    target_c: float | None = None

    def __post_init__(self):
        try:
            kind = HomKind(self.kind)
        except ValueError:
            raise InputError(f"unknown homomorphism kind {self.kind!r}", "kind") from None
        object.__setattr__(self, "kind", kind)
        if kind is HomKind.M_LAMBDA:
            if self.lam is None:
                raise InputError("m_lambda needs lambda", "lambda")
            lam = complex(self.lam)
            if not np.isfinite(lam):
                raise InputError("lambda must be finite", "lambda")
            object.__setattr__(self, "lam", lam)
        elif kind is HomKind.THETA:
            if self.source_c is None:
                raise InputError("theta needs source_c", "source_c")
            object.__setattr__(self, "source_c", _check_c(self.source_c, name="source_c"))
        else:
            if self.source_c is None or self.target_c is None:
                raise InputError("iota needs source_c and target_c")
            object.__setattr__(self, "source_c", _check_c(self.source_c, True, "source_c"))
            object.__setattr__(self, "target_c", _check_c(self.target_c, True, "target_c"))


def hom_norm(spec: HomSpec) -> float:
    """Closed-form (completely bounded) norm of the homomorphism.

    >>> round(hom_norm(HomSpec("iota", source_c=0.8, target_c=0.6)), 12)
    1.5
    """
    if spec.kind is HomKind.M_LAMBDA:
        return max(1.0, abs(spec.lam))
    if spec.kind is HomKind.THETA:
        return 1.0
    return max(1.0, h(spec.target_c) / h(spec.source_c))


def s_gamma(g: float) -> np.ndarray:
    """``S_g = [[1, sqrt(1 - g^2)], [0, g]]`` (invertible for ``g > 0``)."""
    g = _check_c(g, lo_open=True, name="gamma")
    return np.array([[1, math.sqrt(1 - g * g)], [0, g]], dtype=complex)


def iota_similarity(c: float, c_prime: float) -> np.ndarray:
    """Similarity ``S = S_{c'} S_c^{-1}`` with ``S T_c S^{-1} = (c/c') T_{c'}``."""
    return s_gamma(c_prime) @ np.linalg.inv(s_gamma(c))


def cond2x2(x: complex, y: complex) -> float:
    """Condition number of ``[[1, y], [0, x]]`` in closed form.

    >>> cond2x2(0.5, 0)
    2.0
    """
    x, y = complex(x), complex(y)
    if x == 0:
        raise DomainError("matrix [[1, y], [0, 0]] is singular")
    ax = abs(x)
    s = 1 + ax * ax + abs(y) ** 2
    return (s + math.sqrt(max(s * s - 4 * ax * ax, 0.0))) / (2 * ax)
