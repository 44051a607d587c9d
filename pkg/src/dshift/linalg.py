"""Dense complex linear algebra used throughout the package.

Matrices are plain ``numpy`` arrays of dtype ``complex128``.  Every public
function validates its input with :func:`as_matrix`, which rejects ragged,
empty and non-finite data.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError

DEFAULT_TOL = 1e-9
HERMITICITY_WARN = 1e-8
# Below this size the largest singular value comes from the Gram matrix.
_NORMAL_EQUATIONS_LIMIT = 64


def as_matrix(M, name="matrix") -> np.ndarray:
    """Return ``M`` as a finite, nonempty 2-D complex array."""
    try:
        A = np.asarray(M, dtype=complex)
    except (TypeError, ValueError) as exc:
        raise InputError(f"cannot interpret {name} as a complex matrix: {exc}") from None
    if A.ndim == 0:
        A = A.reshape(1, 1)
    if A.ndim != 2 or A.size == 0:
        raise InputError(f"{name} must be a nonempty 2-D array, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise InputError(f"{name} has non-finite entries")
    return A


def as_square(M, name="matrix") -> np.ndarray:
    A = as_matrix(M, name)
    if A.shape[0] != A.shape[1]:
        raise InputError(f"{name} must be square, got shape {A.shape}")
    return A


def hermitian_part(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    return (A + A.conj().T) / 2


def skew_part(M) -> np.ndarray:
    A = np.asarray(M, dtype=complex)
    return (A - A.conj().T) / 2


def hermitian_eig(H) -> tuple[np.ndarray, np.ndarray]:
    """Ascending eigenvalues and eigenvectors of the Hermitian part of ``H``."""
    return np.linalg.eigh(hermitian_part(H))


def opnorm(M) -> float:
    """Operator norm (largest singular value) of ``M``."""
    A = as_matrix(M)
    rows, cols = A.shape
    if max(rows, cols) < _NORMAL_EQUATIONS_LIMIT:
        G = A.conj().T @ A if cols <= rows else A @ A.conj().T
        top = np.linalg.eigvalsh(hermitian_part(G))[-1]
        return float(np.sqrt(max(top, 0.0)))
    return float(np.linalg.norm(A, 2))


def smallest_singular_value(M) -> float:
    A = as_matrix(M)
    return float(np.linalg.svd(A, compute_uv=False)[-1])


def is_invertible(M, rtol=1e-12) -> bool:
    """Smallest singular value exceeds ``rtol`` times the largest."""
    s = np.linalg.svd(as_square(M), compute_uv=False)
    return bool(s[-1] > rtol * s[0]) if s[0] > 0 else False


def cond(M) -> float:
    s = np.linalg.svd(as_square(M), compute_uv=False)
    return float(s[0] / s[-1]) if s[-1] > 0 else float("inf")


class Positivity(str, enum.Enum):
    STRICT = "strictly_positive"
    BOUNDARY = "boundary"
    NOT_POSITIVE = "not_positive"


@dataclass(frozen=True)
class PosDefReport:
    """Verdict on whether the Hermitian part of a matrix is positive definite.

    ``scale`` is the operator norm of the Hermitian part and
    ``hermiticity_defect`` that of the skew part.  The threshold separating
    the three verdicts is ``tol * max(scale, 1)``.
    """

    verdict: Positivity
    min_eigenvalue: float
    hermiticity_defect: float
    scale: float
    tol: float
    eigenvalues: np.ndarray = field(repr=False, compare=False)
    warnings: tuple[str, ...] = ()

    @property
    def strictly_positive(self) -> bool:
        return self.verdict is Positivity.STRICT

    @property
    def threshold(self) -> float:
        return self.tol * max(self.scale, 1.0)


def classify_min_eigenvalue(min_eig: float, scale: float, tol: float) -> Positivity:
    band = tol * max(scale, 1.0)
    if min_eig > band:
        return Positivity.STRICT
    if abs(min_eig) <= band:
        return Positivity.BOUNDARY
    return Positivity.NOT_POSITIVE


def posdef_invertible(M, tol: float = DEFAULT_TOL) -> PosDefReport:
    """Decide whether ``(M + M*)/2`` is positive definite (hence invertible).

    Examples
    --------
    >>> posdef_invertible(np.eye(2)).verdict.value
    'strictly_positive'
    >>> posdef_invertible([[2, 1], [1, 2]]).min_eigenvalue
    1.0
    """
    A = as_square(M)
    if tol < 0:
        raise InputError("tol must be nonnegative")
    H = hermitian_part(A)
    w = np.linalg.eigvalsh(H)
    scale = float(max(abs(w[0]), abs(w[-1])))
    defect = opnorm(skew_part(A)) if np.any(A != A.conj().T) else 0.0
    warnings = ()
    if defect > HERMITICITY_WARN * max(scale, 1.0):
        warnings = (f"hermiticity defect {defect:.3e} exceeds {HERMITICITY_WARN:g}*scale",)
    min_eig = float(w[0])
    return PosDefReport(
        verdict=classify_min_eigenvalue(min_eig, scale, tol),
        min_eigenvalue=min_eig,
        hermiticity_defect=defect,
        scale=scale,
        tol=tol,
        eigenvalues=w,
        warnings=warnings,
    )


def _require_posdef(B, tol, name):
    report = posdef_invertible(B, tol)
    if not report.strictly_positive:
        raise DomainError(
            f"{name} is not positive definite: min eigenvalue {report.min_eigenvalue:.6e}"
            f" (threshold {report.threshold:.3e})"
        )
    return report


def _spectral_power(B, power, tol):
    A = as_square(B)
    _require_posdef(A, tol, "matrix")
    w, V = hermitian_eig(A)
    return (V * w**power) @ V.conj().T


def herm_sqrt(B, tol: float = 1e-14) -> np.ndarray:
    """Hermitian positive square root of a positive definite matrix.

    The positivity check uses a much smaller tolerance than
    :func:`posdef_invertible`'s default so that Gram matrices with
    condition numbers up to ~1e12 are still accepted.
    """
    return _spectral_power(B, 0.5, tol)


def herm_inv_sqrt(B, tol: float = 1e-14) -> np.ndarray:
    """Inverse of :func:`herm_sqrt`."""
    return _spectral_power(B, -0.5, tol)


def kron(A, B) -> np.ndarray:
    """Kronecker product; block ``(i, j)`` equals ``A[i, j] * B``."""
    return np.kron(as_matrix(A, "A"), as_matrix(B, "B"))


def block_diag(*blocks) -> np.ndarray:
    mats = [as_matrix(b, "block") for b in blocks]
    rows = sum(m.shape[0] for m in mats)
    cols = sum(m.shape[1] for m in mats)
    out = np.zeros((rows, cols), dtype=complex)
    r = c = 0
    for m in mats:
        out[r:r + m.shape[0], c:c + m.shape[1]] = m
        r += m.shape[0]
        c += m.shape[1]
    return out


def frame_positivity(T, frame, tol: float = DEFAULT_TOL) -> PosDefReport:
    """Positivity of the real part of ``T`` tested on a frame.

    Builds the matrix with entries ``<T xi_j, xi_i> + <xi_j, T xi_i>`` and
    returns its :class:`PosDefReport`.  For a frame spanning the space,
    ``T`` has positive real part iff this matrix is positive; if the frame
    is a basis the same holds for "positive and invertible".

    Parameters
    ----------
    T : (n, n) array_like
    frame : sequence of length-n vectors
    """
    A = as_square(T, "T")
    vectors = [np.asarray(v, dtype=complex).ravel() for v in frame]
    if not vectors:
        raise InputError("frame must be nonempty")
    if any(v.shape != (A.shape[0],) for v in vectors):
        raise InputError(f"frame vectors must have length {A.shape[0]}")
    Xi = np.column_stack(vectors)
    if not np.all(np.isfinite(Xi)):
        raise InputError("frame has non-finite entries")
    # entry (i, j) = xi_i^* T xi_j + xi_i^* T^* xi_j
    Ttilde = Xi.conj().T @ (A + A.conj().T) @ Xi
    return posdef_invertible(Ttilde, tol)


EXTENDED = np.clongdouble
_JACOBI_SWEEPS = 12


def hermitian_eig_extended(H, dtype=EXTENDED) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition of a Hermitian matrix refined in extended precision.

    The double-precision ``eigh`` result is polished by cyclic complex Jacobi
    rotations carried out in ``dtype`` (80-bit on x86 Linux; on platforms
    where ``longdouble`` is plain double this reduces to ``eigh``).  Returns
    ascending real eigenvalues and unitary eigenvectors in ``dtype``.
    """
    Hx = np.asarray(H).astype(dtype)
    Hx = (Hx + Hx.conj().T) / 2
    _, V0 = np.linalg.eigh(Hx.astype(complex))
    V = V0.astype(dtype)
    eye = np.eye(V.shape[0], dtype=dtype)
    for _ in range(2):
        # Newton-Schulz step towards the nearest unitary
        V = V @ (3 * eye - V.conj().T @ V) / 2
    A = V.conj().T @ Hx @ V
    A = (A + A.conj().T) / 2
    n = A.shape[0]
    eps = np.finfo(np.longdouble).eps
    scale = np.max(np.abs(A)) if n else 0
    for _ in range(_JACOBI_SWEEPS):
        # relative criterion, so that small eigenvalues are resolved accurately
        diag = np.sqrt(np.abs(np.diagonal(A).real))
        rel = np.abs(np.triu(A, 1)) / np.maximum(np.outer(diag, diag), eps * scale)
        if not np.any(rel > eps):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                b = abs(apq)
                if b <= eps * np.sqrt(abs(A[p, p].real * A[q, q].real)):
                    continue
                phase = apq / b
                a, d = A[p, p].real, A[q, q].real
                tau = (d - a) / (2 * b)
                t = (1 if tau >= 0 else -1) / (abs(tau) + np.sqrt(1 + tau * tau))
                c = 1 / np.sqrt(1 + t * t)
                s = t * c
                # U = diag(1, conj(phase)) @ [[c, s], [-s, c]]
                U = np.array([[c, s], [-s * phase.conjugate(), c * phase.conjugate()]], dtype=dtype)
                idx = [p, q]
                A[:, idx] = A[:, idx] @ U
                A[idx, :] = U.conj().T @ A[idx, :]
                A[p, q] = A[q, p] = 0
                V[:, idx] = V[:, idx] @ U
    w = np.diagonal(A).real.copy()
    order = np.argsort(w)
    return w[order], V[:, order]


def herm_inv_sqrt_extended(B, tol: float = 1e-14, dtype=EXTENDED) -> np.ndarray:
    """:func:`herm_inv_sqrt` computed via :func:`hermitian_eig_extended`; result in ``dtype``."""
    A = as_square(np.asarray(B).astype(complex))
    _require_posdef(A, tol, "matrix")
    w, V = hermitian_eig_extended(B, dtype)
    return (V * (1 / np.sqrt(w))) @ V.conj().T
