"""Matrix-valued Nevanlinna-Pick feasibility for point ideals.

For nodes ``x_1, ..., x_m`` in the open ball and targets ``y_j`` in
``M_n`` an interpolant of norm < 1 (ball) or with positive invertible real
part (cone) exists iff the corresponding block Pick matrix is positive
definite.  The transposed variants decide the same questions for the
transposed algebra.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import InputError
from .kernel import BallPoint, as_point, gram
from .linalg import (
    DEFAULT_TOL,
    Positivity,
    as_square,
    cond,
    herm_inv_sqrt,
    herm_sqrt,
    kron,
    opnorm,
    posdef_invertible,
)

ILL_CONDITIONED = 1e12


class Variant(str, enum.Enum):
    BALL = "ball"
    CONE = "cone"


class Verdict(str, enum.Enum):
    STRICTLY_FEASIBLE = "strictly_feasible"
    BOUNDARY = "boundary"
    INFEASIBLE = "infeasible"

    @classmethod
    def from_positivity(cls, p: Positivity) -> "Verdict":
        return {
            Positivity.STRICT: cls.STRICTLY_FEASIBLE,
            Positivity.BOUNDARY: cls.BOUNDARY,
            Positivity.NOT_POSITIVE: cls.INFEASIBLE,
        }[p]


def _nodes(nodes) -> list[BallPoint]:
    try:
        pts = [as_point(x) for x in nodes]
    except InputError as exc:
        raise InputError(str(exc), "nodes") from None
    if not pts:
        raise InputError("need at least one node", "nodes")
    return pts


def _targets(targets, m) -> list[np.ndarray]:
    ys = [as_square(y, f"targets[{j}]") for j, y in enumerate(targets)]
    if len(ys) != m:
        raise InputError(f"expected {m} targets, got {len(ys)}", "targets")
    if len({y.shape for y in ys}) != 1:
        raise InputError("targets must share a common size", "targets")
    return ys


@dataclass(frozen=True, eq=False)
class PickProblem:
    """Interpolation data ``x_j -> y_j`` with a variant and transposition flag."""

    nodes: list
    targets: list
    variant: Variant = Variant.BALL
    transposed: bool = False
    d: int | None = None

    def __post_init__(self):
        pts = _nodes(self.nodes)
        d = pts[0].d if self.d is None else int(self.d)
        if any(p.d != d for p in pts):
            raise InputError(f"every node must have {d} coordinates", "nodes")
        ys = _targets(self.targets, len(pts))
        try:
            variant = Variant(self.variant)
        except ValueError:
            raise InputError(f"unknown variant {self.variant!r}", "variant") from None
        object.__setattr__(self, "nodes", pts)
        object.__setattr__(self, "targets", ys)
        object.__setattr__(self, "variant", variant)
        object.__setattr__(self, "transposed", bool(self.transposed))
        object.__setattr__(self, "d", d)
        self.gram  # validates interior and distinct nodes

    @property
    def m(self) -> int:
        return len(self.nodes)

    @property
    def n(self) -> int:
        return self.targets[0].shape[0]

    @property
    def gram(self) -> np.ndarray:
        try:
            return gram(self.nodes)
        except InputError as exc:
            raise InputError(str(exc), "nodes") from None

    def padded(self, d: int) -> "PickProblem":
        return PickProblem([p.padded(d) for p in self.nodes], self.targets,
                           self.variant, self.transposed, d)

    def mapped(self, U) -> "PickProblem":
        """Nodes replaced by ``U x_j``."""
        U = np.asarray(U, dtype=complex)
        return PickProblem([U @ p.coords for p in self.nodes], self.targets,
                           self.variant, self.transposed, self.d)


@dataclass(frozen=True)
class FeasibilityReport:
    verdict: Verdict
    pick_matrix: np.ndarray = field(repr=False, compare=False)
    min_eigenvalue: float
    margin: float
    scale: float
    tol: float
    ill_conditioned: bool = False
    warnings: tuple[str, ...] = ()

    @property
    def strictly_feasible(self) -> bool:
        return self.verdict is Verdict.STRICTLY_FEASIBLE


def report_from_matrix(P, tol, gram_cond=1.0, warnings=()) -> FeasibilityReport:
    """Three-way verdict for a Hermitian test matrix ``P``."""
    r = posdef_invertible(P, tol)
    warns = list(warnings) + list(r.warnings)
    ill = gram_cond > ILL_CONDITIONED
    if ill:
        warns.append(f"Gram matrix condition number {gram_cond:.3e} exceeds {ILL_CONDITIONED:g}; "
                     "margins are unreliable")
    return FeasibilityReport(
        verdict=Verdict.from_positivity(r.verdict),
        pick_matrix=np.asarray(P),
        min_eigenvalue=r.min_eigenvalue,
        margin=r.min_eigenvalue / max(r.scale, 1.0),
        scale=r.scale,
        tol=tol,
        ill_conditioned=ill,
        warnings=tuple(warns),
    )


def pick_matrix(problem: PickProblem) -> np.ndarray:
    """Block Pick matrix of the problem; exactly Hermitian.

    Block ``(i, j)`` is ``(1 - y_i y_j^*) B_ij`` (ball) or
    ``(y_i + y_j^*) B_ij`` (cone) with ``B_ij = (1 - <x_i, x_j>)^{-1}``.
    The transposed variants use ``y_i^* y_j`` resp. ``y_i^* + y_j`` and
    ``B_ji``.
    """
    B = problem.gram
    ys = problem.targets
    m, n = problem.m, problem.n
    eye = np.eye(n, dtype=complex)
    P = np.zeros((m * n, m * n), dtype=complex)
    for i in range(m):
        for j in range(i, m):
            yi, yj = ys[i], ys[j]
            if problem.transposed:
                yi, yj, b = yi.conj().T, yj.conj().T, B[j, i]
            else:
                b = B[i, j]
            if problem.variant is Variant.BALL:
                block = (eye - yi @ yj.conj().T) * b
            else:
                block = (yi + yj.conj().T) * b
            if i == j:
                block = (block + block.conj().T) / 2
            P[i * n:(i + 1) * n, j * n:(j + 1) * n] = block
            if i != j:
                P[j * n:(j + 1) * n, i * n:(i + 1) * n] = block.conj().T
    return P


def feasible(problem: PickProblem, tol: float = DEFAULT_TOL) -> FeasibilityReport:
    """Strict feasibility verdict from the Pick matrix."""
    return report_from_matrix(pick_matrix(problem), tol, cond(problem.gram))


def _blockdiag(ys):
    n = ys[0].shape[0]
    m = len(ys)
    Y = np.zeros((m * n, m * n), dtype=complex)
    for j, y in enumerate(ys):
        Y[j * n:(j + 1) * n, j * n:(j + 1) * n] = y
    return Y


def quotient_norm(nodes, targets) -> float:
    """``||(B x 1)^{-1/2} diag(y) (B x 1)^{1/2}||``, the quotient norm of the data.

    >>> quotient_norm([[0.0]], [[[0.5]]])
    0.5
    """
    pts = _nodes(nodes)
    ys = _targets(targets, len(pts))
    B = gram(pts)
    eye = np.eye(ys[0].shape[0])
    return opnorm(kron(herm_inv_sqrt(B), eye) @ _blockdiag(ys) @ kron(herm_sqrt(B), eye))


def compressed_rep(nodes, f_values) -> np.ndarray:
    """``B^{-1/2} diag(f(x_j)) B^{1/2}``, the action of ``[f]`` on an orthonormal frame."""
    pts = _nodes(nodes)
    vals = np.asarray(f_values, dtype=complex).ravel()
    if vals.size != len(pts):
        raise InputError(f"expected {len(pts)} values, got {vals.size}", "f_values")
    B = gram(pts)
    return herm_inv_sqrt(B) @ np.diag(vals) @ herm_sqrt(B)
