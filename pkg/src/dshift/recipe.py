"""Finite-dimensional models of quotients of the d-shift algebra.

An ideal of finite codimension is described by point-supported
differential functionals ``l_1, ..., l_r`` (the conditions ``l_i(f) = 0``)
together with polynomials ``g_1, ..., g_r`` whose classes span the
quotient.  The kernel vectors ``lambda_j`` of the functionals span the
orthocomplement of the ideal, and the compression of multiplication by
``g_k`` to that span is

    ``Gamma_k[i, j] = l_i(g_k lambda_j)``,  ``B[i, j] = l_i(lambda_j)``,

in the (non-orthonormal) basis ``lambda``.  ``R_k = B^{-1/2} Gamma_k B^{-1/2}``
is the same operator on an orthonormal basis.  A matrix element
``F = sum_k F^k [g_k]`` is then represented by ``sum_k R_k (x) F^k``.

Evaluations at points of the sphere split off as orthogonal
one-dimensional summands.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, InputError, RankError, UnsupportedError
from .kernel import (
    BallPoint,
    DISTINCT_EPS,
    JetFunctional,
    Polynomial,
    fantappie_vector,
    jet_space,
    multi_indices,
)
from .linalg import (
    DEFAULT_TOL,
    as_square,
    block_diag,
    cond,
    EXTENDED,
    herm_inv_sqrt_extended,
    hermitian_part,
    kron,
    opnorm,
    posdef_invertible,
)
from .pick import ILL_CONDITIONED, FeasibilityReport, report_from_matrix

CLOSURE_TOL = 1e-9
RANK_TOL = 1e-10
GENERATOR_RULE = "graded_lex_greedy"


# --------------------------------------------------------------------------
# ideal description


def _coefficient_vector(l: JetFunctional, indices) -> np.ndarray:
    pos = {a: i for i, a in enumerate(indices)}
    v = np.zeros(len(indices), dtype=complex)
    for a, c in l.terms.items():
        v[pos[a]] = c
    return v


def _check_closure(group: list[JetFunctional], where: str):
    """Span of functionals at one point must be closed under ``l -> l((z_k - a_k) .)``.

    In coefficients this is ``c'_beta = (beta_k + 1) c_{beta + e_k}``.  Closure
    is equivalent to the annihilated set being an ideal, and implies that
    the union of the supports is downward closed.
    """
    d = group[0].d
    order = max(l.order for l in group)
    idx = multi_indices(d, order)
    pos = {a: i for i, a in enumerate(idx)}
    C = np.column_stack([_coefficient_vector(l, idx) for l in group])
    if np.linalg.matrix_rank(C, tol=RANK_TOL * max(np.abs(C).max(), 1.0)) < len(group):
        raise RankError(f"functionals at {where} are linearly dependent")
    for l, k in itertools.product(group, range(d)):
        shifted = np.zeros(len(idx), dtype=complex)
        for a, c in l.terms.items():
            if a[k] > 0:
                b = list(a)
                b[k] -= 1
                shifted[pos[tuple(b)]] += a[k] * c
        size = np.linalg.norm(shifted)
        if size == 0:
            continue
        coef, *_ = np.linalg.lstsq(C, shifted, rcond=None)
        if np.linalg.norm(C @ coef - shifted) > CLOSURE_TOL * size:
            raise InputError(
                f"functionals at {where} do not define an ideal: multiplying by "
                f"z_{k + 1} - a_{k + 1} leads out of their span"
            )


def _greedy_generators(functionals, boundary, d) -> list[Polynomial]:
    """Graded-lex monomials that raise the rank of the evaluation matrix."""
    r = len(functionals) + len(boundary)
    chosen: list[Polynomial] = []
    cols: list[np.ndarray] = []
    Q = np.zeros((r, 0), dtype=complex)
    for alpha in multi_indices(d, max(r - 1, 0)):
        g = Polynomial.monomial(alpha)
        v = _evaluations(functionals, boundary, g)
        res = v - Q @ (Q.conj().T @ v)
        if np.linalg.norm(res) > 1e-8 * max(np.linalg.norm(v), 1.0):
            chosen.append(g)
            cols.append(v)
            Q, _ = np.linalg.qr(np.column_stack(cols))
            if len(chosen) == r:
                return chosen
    raise RankError("could not find generators spanning the quotient")  # pragma: no cover


def _evaluations(functionals, boundary, poly: Polynomial) -> np.ndarray:
    vals = [l(poly) for l in functionals] + [poly(w.coords) for w in boundary]
    return np.array(vals, dtype=complex)


@dataclass(frozen=True, eq=False)
class IdealSpec:
    """Functionals defining an ideal, generators of the quotient, boundary nodes.

    Evaluation functionals based on the sphere are moved to
    ``boundary_nodes``.  When ``generators`` is omitted, monomials are chosen
    greedily in graded lex order (see ``metadata['generator_rule']``).
    """

    d: int
    functionals: list
    generators: list | None = None
    boundary_nodes: list = field(default_factory=list)
    metadata: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        d = int(self.d)
        if d < 1:
            raise InputError("d must be positive", "d")
        interior, boundary = [], []
        for i, l in enumerate(self.functionals):
            if not isinstance(l, JetFunctional):
                raise InputError("expected JetFunctional", f"functionals[{i}]")
            if l.d != d:
                raise InputError(f"functional has dimension {l.d}, expected {d}", f"functionals[{i}]")
            if l.base.interior:
                interior.append(l)
            elif l.order == 0:
                boundary.append(l.base)
            else:
                raise UnsupportedError(
                    "derivative conditions at boundary points are not supported "
                    "(the tangent space of the quotient there is zero)",
                    f"functionals[{i}]",
                )
        for j, w in enumerate(self.boundary_nodes):
            w = w if isinstance(w, BallPoint) else BallPoint(w)
            if w.d != d:
                raise InputError(f"boundary node must have {d} coordinates", f"boundary_nodes[{j}]")
            if w.interior:
                raise InputError("boundary node lies in the open ball", f"boundary_nodes[{j}]")
            boundary.append(w)
        if not interior and not boundary:
            raise InputError("ideal needs at least one functional or boundary node", "functionals")
        points = [l.base for l in interior]
        bases = list(dict.fromkeys(points))
        for a, b in itertools.combinations(bases + boundary, 2):
            if np.linalg.norm(a.coords - b.coords) <= DISTINCT_EPS:
                if a in boundary or b in boundary or a != b:
                    raise InputError(f"points {a} and {b} coincide or are too close")
        for base in bases:
            _check_closure([l for l in interior if l.base == base], repr(base))

        meta = dict(self.metadata)
        if self.generators is None:
            gens = _greedy_generators(interior, boundary, d)
            meta.setdefault("generator_rule", GENERATOR_RULE)
        else:
            gens = []
            for k, g in enumerate(self.generators):
                if not isinstance(g, Polynomial):
                    raise InputError("expected Polynomial", f"generators[{k}]")
                if g.d != d:
                    raise InputError(f"generator has dimension {g.d}", f"generators[{k}]")
                gens.append(g)
            if len(gens) != len(interior) + len(boundary):
                raise InputError(
                    f"need {len(interior) + len(boundary)} generators, got {len(gens)}", "generators"
                )
            meta.setdefault("generator_rule", "user")
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "functionals", interior)
        object.__setattr__(self, "boundary_nodes", boundary)
        object.__setattr__(self, "generators", gens)
        object.__setattr__(self, "metadata", meta)
        E = self.evaluation_matrix
        s = np.linalg.svd(E, compute_uv=False)
        if not s[-1] > 1e-12 * s[0]:
            raise RankError("generator classes are linearly dependent modulo the ideal", "generators")

    @property
    def r(self) -> int:
        """Codimension of the ideal."""
        return len(self.functionals) + len(self.boundary_nodes)

    @property
    def evaluation_matrix(self) -> np.ndarray:
        """``E[i, k] = l_i(g_k)``; boundary evaluations follow the interior rows."""
        return np.column_stack([
            _evaluations(self.functionals, self.boundary_nodes, g) for g in self.generators
        ])

    def max_order(self) -> int:
        return max((l.order for l in self.functionals), default=0)

    @classmethod
    def points(cls, nodes, generators=None) -> "IdealSpec":
        """Ideal of functions vanishing at the given points."""
        fs = [JetFunctional.evaluation(x) for x in nodes]
        return cls(fs[0].d, fs, generators)


@dataclass(frozen=True)
class BoundarySplit:
    """Interior ideal plus one scalar summand per boundary node."""

    interior: IdealSpec | None
    boundary_nodes: tuple[BallPoint, ...]

    @property
    def summands(self) -> int:
        return (self.interior is not None) + len(self.boundary_nodes)


def boundary_split(spec: IdealSpec) -> BoundarySplit:
    """Decompose the quotient as an interior model plus ``C`` per boundary node."""
    interior = None
    if spec.functionals:
        interior = IdealSpec(spec.d, list(spec.functionals))
    return BoundarySplit(interior, tuple(spec.boundary_nodes))


# --------------------------------------------------------------------------
# model


class _JetCache:
    """Jets of the kernel vectors and of polynomials at every base point.

    Computed in extended precision; the model matrices are rounded to
    double only at the end.
    """

    def __init__(self, functionals, dtype=EXTENDED):
        self.dtype = dtype
        self.functionals = functionals
        self.bases = list(dict.fromkeys(l.base for l in functionals))
        self.order = {b: max(l.order for l in functionals if l.base == b) for b in self.bases}
        self.rows = {b: [i for i, l in enumerate(functionals) if l.base == b] for b in self.bases}
        self.kernel_vectors = [fantappie_vector(l) for l in functionals]
        self.L = {}
        self.lam = {}
        for b in self.bases:
            space = jet_space(b.d, self.order[b], dtype)
            L = np.zeros((len(self.rows[b]), space.size), dtype=dtype)
            for row, i in enumerate(self.rows[b]):
                for a, c in functionals[i].terms.items():
                    L[row, space.position[a]] = c * space.factorials[space.position[a]]
            self.L[b] = L
            self.lam[b] = [v.jet(b, space) for v in self.kernel_vectors]

    def gram(self) -> np.ndarray:
        r = len(self.functionals)
        B = np.zeros((r, r), dtype=self.dtype)
        for b in self.bases:
            B[self.rows[b], :] = self.L[b] @ np.column_stack(self.lam[b])
        return B

    def gamma(self, poly: Polynomial) -> np.ndarray:
        r = len(self.functionals)
        G = np.zeros((r, r), dtype=self.dtype)
        for b in self.bases:
            space = jet_space(b.d, self.order[b], self.dtype)
            g = poly.jet(b, space)
            prods = np.column_stack([space.mul(g, lam) for lam in self.lam[b]])
            G[self.rows[b], :] = self.L[b] @ prods
        return G


@dataclass(frozen=True, eq=False)
class QuotientModel:
    """Completely isometric finite-dimensional model of ``S_d / I``.

    ``R[k]`` acts on the orthonormalized interior model space and
    ``boundary_values[b, k] = g_k(omega_b)``.
    """

    spec: IdealSpec
    B: np.ndarray = field(repr=False)
    Gamma: list = field(repr=False)
    R: list = field(repr=False)
    boundary_values: np.ndarray = field(repr=False)
    B_inv_sqrt: np.ndarray = field(repr=False)
    ill_conditioned: bool = False
    warnings: tuple[str, ...] = ()
    _cache: object = field(default=None, repr=False)

    @property
    def boundary_count(self) -> int:
        return len(self.spec.boundary_nodes)

    @property
    def r(self) -> int:
        return self.spec.r

    @property
    def interior_dim(self) -> int:
        return len(self.spec.functionals)

    @property
    def d(self) -> int:
        return self.spec.d

    def action(self, poly: Polynomial) -> np.ndarray:
        """Full representation matrix (interior block plus boundary diagonal) of ``[poly]``."""
        blocks = []
        if self.interior_dim:
            Bs = self._cache.inv_sqrt
            blocks.append((Bs @ self._cache.gamma(poly) @ Bs).astype(complex))
        blocks.extend([[poly(w.coords)]] for w in self.spec.boundary_nodes)
        return block_diag(*blocks)

    def coordinates(self, poly: Polynomial) -> np.ndarray:
        """Coefficients ``q`` with ``[poly] = sum_k q_k [g_k]``."""
        v = _evaluations(self.spec.functionals, self.spec.boundary_nodes, poly)
        return np.linalg.solve(self.spec.evaluation_matrix, v)

    def generator_actions(self) -> list[np.ndarray]:
        """Matrices of ``[g_k]`` on the whole model, boundary included."""
        out = []
        for k in range(self.r):
            blocks = [self.R[k]] if self.interior_dim else []
            blocks.extend([[self.boundary_values[b, k]]] for b in range(self.boundary_count))
            out.append(block_diag(*blocks))
        return out


def build_model(spec: IdealSpec) -> QuotientModel:
    """Gram matrix, compressed generator actions and their orthonormal forms."""
    warnings = []
    r_int = len(spec.functionals)
    if r_int:
        cache = _JetCache(spec.functionals)
        Bx = cache.gram()
        Bx = (Bx + Bx.conj().T) / 2
        B = Bx.astype(complex)
        report = posdef_invertible(B, 1e-14)
        if not report.strictly_positive:
            raise DomainError(
                f"Gram matrix of the kernel vectors is not positive definite "
                f"(min eigenvalue {report.min_eigenvalue:.3e})"
            )
        kappa = cond(B)
        ill = kappa > ILL_CONDITIONED
        if ill:
            warnings.append(f"Gram matrix condition number {kappa:.3e} exceeds {ILL_CONDITIONED:g}")
        Xs = herm_inv_sqrt_extended(Bx)
        cache.inv_sqrt = Xs
        Bs = Xs.astype(complex)
        Gx = [cache.gamma(g) for g in spec.generators]
        Gamma = [G.astype(complex) for G in Gx]
        R = [(Xs @ G @ Xs).astype(complex) for G in Gx]
    else:
        cache, ill = None, False
        B = Bs = np.zeros((0, 0), dtype=complex)
        Gamma = [np.zeros((0, 0), dtype=complex) for _ in spec.generators]
        R = list(Gamma)
    bvals = np.array(
        [[g(w.coords) for g in spec.generators] for w in spec.boundary_nodes], dtype=complex
    ).reshape(len(spec.boundary_nodes), spec.r)
    return QuotientModel(spec, B, Gamma, R, bvals, Bs, ill, tuple(warnings), cache)


# --------------------------------------------------------------------------
# elements and membership


@dataclass(frozen=True, eq=False)
class QuotientElement:
    """``F = sum_k F^k [g_k]`` with ``n x n`` coefficient matrices ``F^k``."""

    coefficients: list

    def __post_init__(self):
        Fs = [as_square(F, f"coefficients[{k}]") for k, F in enumerate(self.coefficients)]
        if not Fs:
            raise InputError("element needs coefficients", "coefficients")
        if len({F.shape for F in Fs}) != 1:
            raise InputError("coefficient matrices must share a size", "coefficients")
        object.__setattr__(self, "coefficients", Fs)

    @property
    def n(self) -> int:
        return self.coefficients[0].shape[0]

    @classmethod
    def unit(cls, model: QuotientModel, n: int = 1, scale=1.0) -> "QuotientElement":
        return cls.from_polynomial_matrix(model, {(0,) * model.d: scale * np.eye(n)})

    @classmethod
    def from_polynomial_matrix(cls, model: QuotientModel, terms) -> "QuotientElement":
        """Class of ``sum_alpha C_alpha z^alpha`` reduced modulo the ideal."""
        terms = {tuple(a): as_square(C, "C") for a, C in dict(terms).items()}
        if not terms:
            raise InputError("empty polynomial matrix")
        n = next(iter(terms.values())).shape[0]
        Fs = [np.zeros((n, n), dtype=complex) for _ in range(model.r)]
        for alpha, C in terms.items():
            q = model.coordinates(Polynomial.monomial(alpha))
            for k in range(model.r):
                Fs[k] = Fs[k] + q[k] * C
        return cls(Fs)

    def __mul__(self, other: "QuotientElement"):
        raise TypeError("multiply representations, or build the product polynomial")


def _check_element(model: QuotientModel, F: QuotientElement):
    if len(F.coefficients) != model.r:
        raise InputError(f"element has {len(F.coefficients)} coefficients, model has {model.r}")


def _m_of_f(model, F):
    """``M(F) = sum_k Gamma_k (x) F^k``; outer index functional, inner index matrix."""
    r_int = model.interior_dim
    M = np.zeros((r_int * F.n, r_int * F.n), dtype=complex)
    for G, Fk in zip(model.Gamma, F.coefficients):
        M += np.kron(G, Fk)
    return M


def _boundary_blocks(model, F):
    return [
        sum(model.boundary_values[b, k] * F.coefficients[k] for k in range(model.r))
        for b in range(model.boundary_count)
    ]


def represent(model: QuotientModel, F: QuotientElement) -> np.ndarray:
    """Matrix of ``[F]`` on the orthonormal model space; its norm is ``||[F]||_(n)``."""
    _check_element(model, F)
    blocks = []
    if model.interior_dim:
        R = sum(kron(Rk, Fk) for Rk, Fk in zip(model.R, F.coefficients))
        blocks.append(R)
    blocks.extend(_boundary_blocks(model, F))
    return block_diag(*blocks)


def membership_ball(model: QuotientModel, F: QuotientElement, tol: float = DEFAULT_TOL) -> FeasibilityReport:
    """Is ``||[F]||_(n) < 1``?  Tests ``B (x) 1 - M(F) (B^{-1} (x) 1) M(F)^*`` for positivity."""
    _check_element(model, F)
    n = F.n
    blocks = []
    if model.interior_dim:
        M = _m_of_f(model, F)
        W = M @ np.kron(model.B_inv_sqrt, np.eye(n))
        blocks.append(hermitian_part(np.kron(model.B, np.eye(n)) - W @ W.conj().T))
    for V in _boundary_blocks(model, F):
        blocks.append(hermitian_part(np.eye(n) - V @ V.conj().T))
    return report_from_matrix(block_diag(*blocks), tol, cond(model.B) if model.interior_dim else 1.0,
                              model.warnings)


def membership_cone(model: QuotientModel, F: QuotientElement, tol: float = DEFAULT_TOL) -> FeasibilityReport:
    """Does ``[F]`` have positive invertible real part?  Tests ``M(F) + M(F)^*``."""
    _check_element(model, F)
    blocks = []
    if model.interior_dim:
        M = _m_of_f(model, F)
        blocks.append(M + M.conj().T)
    for V in _boundary_blocks(model, F):
        blocks.append(V + V.conj().T)
    return report_from_matrix(block_diag(*blocks), tol, cond(model.B) if model.interior_dim else 1.0,
                              model.warnings)


def quotient_element_norm(model: QuotientModel, F: QuotientElement) -> float:
    return opnorm(represent(model, F))


# --------------------------------------------------------------------------
# structural checks


def coordinate_actions(model: QuotientModel) -> list[np.ndarray]:
    return [model.action(Polynomial.coordinate(k, model.d)) for k in range(model.d)]


def row_contraction_norm(model: QuotientModel) -> float:
    """Norm of the row ``[R_{z_1} ... R_{z_d}]``; at most one for a d-contraction."""
    return opnorm(np.hstack(coordinate_actions(model)))


def commutator_defect(model: QuotientModel) -> float:
    """Largest ``||R_j R_k - R_k R_j|| / (||R_j|| ||R_k||)`` over the generator actions."""
    acts = model.generator_actions()
    worst = 0.0
    for X, Y in itertools.combinations(acts, 2):
        scale = opnorm(X) * opnorm(Y)
        if scale > 0:
            worst = max(worst, opnorm(X @ Y - Y @ X) / scale)
    return worst


def joint_spectrum(model: QuotientModel, seed: int = 0, cluster_tol: float = 1e-3) -> np.ndarray:
    """Joint eigenvalues of the coordinate actions, one row per eigenvalue.

    Eigenvalues of a generic combination of the commuting actions are
    grouped by single linkage at ``cluster_tol`` times the spectral scale.
    Each group spans an invariant subspace obtained from a reordered Schur
    form; every action restricted there has a single eigenvalue, estimated
    by its trace.  Traces are stable even when individual eigenvalues of a
    derogatory block are not.
    """
    from scipy.cluster.hierarchy import fcluster, linkage
    from scipy.linalg import schur

    acts = coordinate_actions(model)
    n = acts[0].shape[0]
    rng = np.random.default_rng(seed)
    t = rng.normal(size=len(acts)) + 1j * rng.normal(size=len(acts))
    A = sum(ti * Ai for ti, Ai in zip(t, acts))
    eigs = np.linalg.eigvals(A)
    if n == 1:
        labels = np.array([1])
    else:
        scale = max(np.max(np.abs(eigs)), 1.0)
        pts = np.column_stack([eigs.real, eigs.imag])
        labels = fcluster(linkage(pts, "single"), cluster_tol * scale, "distance")
    rows = []
    for lab in np.unique(labels):
        members = eigs[labels == lab]
        k = len(members)
        center = members.mean()
        radius = np.max(np.abs(members - center)) + 0.5 * cluster_tol * max(abs(center), 1.0)
        _, Z, sdim = schur(A, output="complex", sort=lambda z: abs(z - center) <= radius)
        Zk = Z[:, :sdim]
        rows.extend([[np.trace(Zk.conj().T @ Ai @ Zk) / sdim for Ai in acts]] * k)
    return np.array(rows)
