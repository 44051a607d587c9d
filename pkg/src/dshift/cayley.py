"""Cayley transform between the open unit ball and the positive cone.

``cayley(X) = (1 - X)(1 + X)^{-1}`` is an involution.  It maps matrices of
norm < 1 to matrices with positive definite real part and back.  The maps
``X -> A X A* + B`` with ``A`` invertible and ``B`` skew-Hermitian preserve
the cone, so conjugating them by the Cayley transform gives
automorphisms of the open unit ball.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DomainError, InputError
from .linalg import (
    DEFAULT_TOL,
    PosDefReport,
    as_square,
    hermitian_part,
    herm_sqrt,
    opnorm,
    posdef_invertible,
    skew_part,
)

INVERTIBLE_RTOL = 1e-12


def _check_invertible(M, what):
    s = np.linalg.svd(M, compute_uv=False)
    if not s[-1] > INVERTIBLE_RTOL * max(s[0], 1.0):
        raise DomainError(f"{what}: smallest singular value {s[-1]:.3e}")


def cayley(X) -> np.ndarray:
    """Return ``(1 - X)(1 + X)^{-1}``.

    Raises :class:`DomainError` ("Cayley undefined") when ``1 + X`` is
    numerically singular.
    """
    A = as_square(X, "X")
    eye = np.eye(A.shape[0], dtype=complex)
    _check_invertible(eye + A, "Cayley undefined (1 + X singular)")
    # 1 - X and 1 + X commute, so the order of the factors is irrelevant
    return np.linalg.solve(eye + A, eye - A)


def ball_cone_roundtrip(X, tol: float = DEFAULT_TOL) -> PosDefReport:
    """Positivity report for ``Re cayley(X)``, requiring ``||X|| < 1``."""
    A = as_square(X, "X")
    if opnorm(A) >= 1:
        raise InputError("X must lie in the open unit ball")
    return posdef_invertible(cayley(A), tol)


@dataclass(frozen=True)
class AutomorphismSpec:
    """Parameters ``(A, B)`` of the cone map ``X -> A X A* + B``.

    ``A`` must be invertible and ``B`` skew-Hermitian.  A Hermitian
    component of ``B`` below ``tol * max(||B||, 1)`` is discarded; larger
    defects are rejected.
    """

    A: np.ndarray
    B: np.ndarray
    tol: float = DEFAULT_TOL

    def __post_init__(self):
        A = as_square(self.A, "A")
        B = as_square(self.B, "B")
        if A.shape != B.shape:
            raise InputError(f"A and B must have equal shapes, got {A.shape} and {B.shape}")
        s = np.linalg.svd(A, compute_uv=False)
        if not s[-1] > INVERTIBLE_RTOL * s[0]:
            raise InputError("A must be invertible")
        defect = opnorm(hermitian_part(B))
        if defect > self.tol * max(opnorm(B), 1.0):
            raise InputError(f"Re B must vanish, got ||Re B|| = {defect:.3e}")
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "B", skew_part(B))

    @property
    def n(self) -> int:
        return self.A.shape[0]

    def cone_map(self, X) -> np.ndarray:
        return self.A @ X @ self.A.conj().T + self.B

    def inverse(self) -> "AutomorphismSpec":
        Ainv = np.linalg.inv(self.A)
        return AutomorphismSpec(Ainv, -Ainv @ self.B @ Ainv.conj().T, self.tol)

    @classmethod
    def sending_zero_to(cls, X0, tol: float = DEFAULT_TOL) -> "AutomorphismSpec":
        """The parameters with ``psi_automorphism(spec, 0) == X0``.

        ``Psi(0) = Cay(A A* + B)``, so ``A A* + B`` must equal ``Y = Cay(X0)``:
        take ``A = (Re Y)^{1/2}`` and ``B = i Im Y``.
        """
        Y = cayley(X0)
        return cls(herm_sqrt(hermitian_part(Y)), skew_part(Y), tol)


def psi_automorphism(spec: AutomorphismSpec, X) -> np.ndarray:
    """``Cay(A Cay(X) A* + B)``, an automorphism of the open unit ball."""
    M = as_square(X, "X")
    if M.shape[0] != spec.n:
        raise InputError(f"X must be {spec.n}x{spec.n}")
    if opnorm(M) >= 1:
        raise InputError("X must lie in the open unit ball")
    try:
        return cayley(spec.cone_map(cayley(M)))
    except DomainError as exc:  # pragma: no cover - excluded by the cone invariance
        raise AssertionError(f"cone map left the cone: {exc}") from exc
