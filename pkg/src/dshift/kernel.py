"""Reproducing kernel of the Drury-Arveson space and jet arithmetic.

The kernel is ``u_x(z) = (1 - <z, x>)^{-1}`` with ``<z, x> = sum z_k conj(x_k)``.
A point-supported differential functional ``l = sum c_alpha d^alpha|_a`` is
represented by :class:`JetFunctional`; its kernel vector
``lambda(z) = conj(l(u_z))`` is a finite sum of terms
``coeff * z^alpha * (1 - <z, a>)^{-p}`` (:class:`KernelVector`).

Functionals are applied exactly through truncated multivariate Taylor
series (:class:`JetSpace`).  Derivatives are raw partials, not divided by
``alpha!``.  Jets store plain series coefficients and the factorial is
applied in :func:`apply_functional`.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import InputError, PoleError

BOUNDARY_TOL = 1e-12
DISTINCT_EPS = 1e-8
POLE_TOL = 1e-12


def inner(z, x) -> complex:
    """``<z, x> = sum_k z_k conj(x_k)``, linear in the first argument."""
    return complex(np.vdot(np.asarray(x, dtype=complex), np.asarray(z, dtype=complex)))


# --------------------------------------------------------------------------
# points and multi-indices


@dataclass(frozen=True, eq=False)
class BallPoint:
    """A point of the closed Euclidean unit ball in ``C^d``."""

    coords: np.ndarray

    def __post_init__(self):
        try:
            c = np.array(self.coords, dtype=complex).ravel()
        except (TypeError, ValueError) as exc:
            raise InputError(f"invalid point coordinates: {exc}") from None
        if c.size == 0:
            raise InputError("a point needs at least one coordinate")
        if not np.all(np.isfinite(c)):
            raise InputError("point coordinates must be finite")
        if float(np.vdot(c, c).real) > 1 + BOUNDARY_TOL:
            raise InputError(f"point {c} lies outside the closed unit ball")
        c.setflags(write=False)
        object.__setattr__(self, "coords", c)

    @property
    def d(self) -> int:
        return self.coords.size

    @property
    def norm2(self) -> float:
        return float(np.vdot(self.coords, self.coords).real)

    @property
    def interior(self) -> bool:
        return self.norm2 < 1 - BOUNDARY_TOL

    def __eq__(self, other):
        if not isinstance(other, BallPoint):
            return NotImplemented
        return self.d == other.d and bool(np.all(self.coords == other.coords))

    def __hash__(self):
        return hash(self.coords.tobytes())

    def __repr__(self):
        return f"BallPoint({[complex(v) for v in self.coords]})"

    def padded(self, d: int) -> "BallPoint":
        """The same point viewed in ``C^d`` (``d >= self.d``) with zero coordinates appended."""
        return BallPoint(np.concatenate([self.coords, np.zeros(d - self.d, dtype=complex)]))


def as_point(p) -> BallPoint:
    return p if isinstance(p, BallPoint) else BallPoint(p)


def multi_indices(d: int, order: int) -> list[tuple[int, ...]]:
    """All multi-indices of length ``d`` with ``|alpha| <= order`` in graded lex order.

    >>> multi_indices(2, 2)
    [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    """
    out = []
    for deg in range(order + 1):
        level = [a for a in itertools.product(range(deg, -1, -1), repeat=d) if sum(a) == deg]
        out.extend(sorted(level, reverse=True))
    return out


def alpha_factorial(alpha) -> int:
    return math.prod(math.factorial(a) for a in alpha)


def _as_alpha(alpha, d, path="alpha"):
    try:
        a = tuple(int(v) for v in alpha)
    except (TypeError, ValueError):
        raise InputError("multi-index must be a list of integers", path) from None
    if len(a) != d or any(v < 0 for v in a):
        raise InputError(f"multi-index {list(alpha)} must have {d} nonnegative entries", path)
    return a


# --------------------------------------------------------------------------
# truncated Taylor arithmetic


class JetSpace:
    """Truncated Taylor series in ``d`` variables up to total degree ``order``.

    A jet is a complex vector indexed by :attr:`indices`; entry ``alpha`` is
    the coefficient of ``w^alpha`` in the expansion around the base point.
    """

    def __init__(self, d: int, order: int, dtype=complex):
        if d < 1 or order < 0:
            raise InputError("jet space needs d >= 1 and order >= 0")
        self.d = d
        self.order = order
        self.dtype = np.dtype(dtype)
        self.indices = multi_indices(d, order)
        self.position = {a: i for i, a in enumerate(self.indices)}
        self.size = len(self.indices)
        self.factorials = np.array([alpha_factorial(a) for a in self.indices], dtype=float)
        rows, cols, dest = [], [], []
        for i, a in enumerate(self.indices):
            for j, b in enumerate(self.indices):
                s = tuple(x + y for x, y in zip(a, b))
                k = self.position.get(s)
                if k is not None:
                    rows.append(i)
                    cols.append(j)
                    dest.append(k)
        self._mul = (np.array(rows, dtype=int), np.array(cols, dtype=int), np.array(dest, dtype=int))

    def constant(self, c) -> np.ndarray:
        out = np.zeros(self.size, dtype=self.dtype)
        out[0] = c
        return out

    def coordinate(self, k: int, base) -> np.ndarray:
        """Jet of ``z_k = base_k + w_k``."""
        out = self.constant(base[k])
        if self.order >= 1:
            e = [0] * self.d
            e[k] = 1
            out[self.position[tuple(e)]] = 1
        return out

    def mul(self, a, b) -> np.ndarray:
        i, j, k = self._mul
        out = np.zeros(self.size, dtype=self.dtype)
        np.add.at(out, k, a[i] * b[j])
        return out

    def power(self, a, p: int) -> np.ndarray:
        result = self.constant(1)
        base = a
        while p:
            if p & 1:
                result = self.mul(result, base)
            p >>= 1
            if p:
                base = self.mul(base, base)
        return result

    def reciprocal(self, a) -> np.ndarray:
        """Inverse of a unit jet (nonzero constant term).

        With ``a = a0 (1 + n)`` and ``n`` nilpotent of index ``order + 1`` the
        Neumann series ``sum (-n)^j`` terminates.
        """
        a0 = a[0]
        if abs(a0) <= POLE_TOL:
            raise PoleError("jet is not a unit (vanishing constant term)")
        n = a / a0
        n[0] = 0
        term = self.constant(1)
        total = self.constant(1)
        for _ in range(self.order):
            term = -self.mul(term, n)
            total = total + term
        return total / a0


@lru_cache(maxsize=64)
def jet_space(d: int, order: int, dtype=complex) -> JetSpace:
    """Shared :class:`JetSpace`; ``dtype`` may be an extended complex type."""
    return JetSpace(d, order, dtype)


@dataclass(frozen=True, eq=False)
class JetValue:
    """Taylor coefficients of a function at ``base`` up to ``order``."""

    base: BallPoint
    order: int
    coeffs: np.ndarray = field(repr=False)

    @property
    def space(self) -> JetSpace:
        return jet_space(self.base.d, self.order)

    def coefficient(self, alpha) -> complex:
        return complex(self.coeffs[self.space.position[tuple(alpha)]])

    def derivative(self, alpha) -> complex:
        """Raw partial derivative ``d^alpha f(base)``."""
        return self.coefficient(alpha) * alpha_factorial(alpha)

    def as_dict(self) -> dict[tuple[int, ...], complex]:
        return {a: complex(c) for a, c in zip(self.space.indices, self.coeffs)}


# --------------------------------------------------------------------------
# polynomials and kernel vectors


class Polynomial:
    """Polynomial in ``z_1, ..., z_d`` stored as ``{alpha: coefficient}``."""

    __slots__ = ("d", "terms")

    def __init__(self, d: int, terms: Mapping | Iterable = ()):
        self.d = int(d)
        items = terms.items() if isinstance(terms, Mapping) else terms
        acc: dict[tuple[int, ...], complex] = {}
        for alpha, coeff in items:
            a = _as_alpha(alpha, self.d)
            acc[a] = acc.get(a, 0j) + complex(coeff)
        self.terms = {a: c for a, c in acc.items() if c != 0}

    @classmethod
    def constant(cls, d, c=1.0):
        return cls(d, {(0,) * d: c})

    @classmethod
    def monomial(cls, alpha, coeff=1.0):
        alpha = tuple(alpha)
        return cls(len(alpha), {alpha: coeff})

    @classmethod
    def coordinate(cls, k: int, d: int):
        e = [0] * d
        e[k] = 1
        return cls(d, {tuple(e): 1.0})

    @property
    def degree(self) -> int:
        return max((sum(a) for a in self.terms), default=0)

    def __add__(self, other):
        other = self._coerce(other)
        return Polynomial(self.d, list(self.terms.items()) + list(other.terms.items()))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-1) * self._coerce(other)

    def __mul__(self, other):
        if isinstance(other, KernelVector):
            return other.times(self)
        if not isinstance(other, Polynomial):
            return Polynomial(self.d, {a: c * complex(other) for a, c in self.terms.items()})
        self._check_d(other)
        out = []
        for (a, c), (b, e) in itertools.product(self.terms.items(), other.terms.items()):
            out.append((tuple(x + y for x, y in zip(a, b)), c * e))
        return Polynomial(self.d, out)

    def __rmul__(self, other):
        return self * other

    def _coerce(self, other):
        if isinstance(other, Polynomial):
            self._check_d(other)
            return other
        return Polynomial.constant(self.d, complex(other))

    def _check_d(self, other):
        if other.d != self.d:
            raise InputError(f"dimension mismatch: {self.d} vs {other.d}")

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        return complex(sum(c * np.prod(z ** np.array(a)) for a, c in self.terms.items()))

    def jet(self, base: BallPoint, space: JetSpace) -> np.ndarray:
        coord = [space.coordinate(k, base.coords) for k in range(self.d)]
        out = np.zeros(space.size, dtype=space.dtype)
        for alpha, c in self.terms.items():
            m = space.constant(1)
            for k, e in enumerate(alpha):
                if e:
                    m = space.mul(m, space.power(coord[k], e))
            out += c * m
        return out

    def __repr__(self):
        return f"Polynomial({self.d}, {self.terms})"


@dataclass(frozen=True, eq=False)
class KernelTerm:
    """``coeff * z^alpha * (1 - <z, center>)^(-pole_order)``."""

    coeff: complex
    alpha: tuple[int, ...]
    center: BallPoint
    pole_order: int

    def __post_init__(self):
        if self.pole_order < 1:
            raise InputError("pole_order must be >= 1")
        if not self.center.interior:
            raise InputError("kernel pole centers must lie in the open ball")


class KernelVector:
    """A finite linear combination of :class:`KernelTerm` in ``d`` variables."""

    def __init__(self, d: int, terms: Iterable[KernelTerm]):
        self.d = int(d)
        self.terms = tuple(t for t in terms if t.coeff != 0)
        for t in self.terms:
            if len(t.alpha) != self.d or t.center.d != self.d:
                raise InputError("kernel term dimension mismatch")

    def __add__(self, other: "KernelVector") -> "KernelVector":
        return KernelVector(self.d, self.terms + other.terms)

    def scaled(self, s) -> "KernelVector":
        s = complex(s)
        return KernelVector(
            self.d, (KernelTerm(t.coeff * s, t.alpha, t.center, t.pole_order) for t in self.terms)
        )

    def times(self, poly: Polynomial) -> "KernelVector":
        """Symbolic product with a polynomial, expanded into kernel terms."""
        if poly.d != self.d:
            raise InputError("dimension mismatch")
        out = []
        for (a, c), t in itertools.product(poly.terms.items(), self.terms):
            alpha = tuple(x + y for x, y in zip(a, t.alpha))
            out.append(KernelTerm(c * t.coeff, alpha, t.center, t.pole_order))
        return KernelVector(self.d, out)

    def __call__(self, z) -> complex:
        z = np.asarray(z, dtype=complex)
        total = 0j
        for t in self.terms:
            denom = 1 - inner(z, t.center.coords)
            if abs(denom) <= POLE_TOL:
                raise PoleError("kernel vector evaluated at a pole")
            total += t.coeff * np.prod(z ** np.array(t.alpha)) * denom ** (-t.pole_order)
        return complex(total)

    def jet(self, base: BallPoint, space: JetSpace) -> np.ndarray:
        coord = [space.coordinate(k, base.coords) for k in range(self.d)]
        out = np.zeros(space.size, dtype=space.dtype)
        b = base.coords.astype(space.dtype)
        recips: dict = {}
        for t in self.terms:
            key = (t.center, t.pole_order)
            if key not in recips:
                c = t.center.coords.astype(space.dtype)
                # 1 - <z, c> = (1 - <base, c>) - sum_k conj(c_k) w_k
                lin = space.constant(1 - np.sum(b * np.conj(c)))
                for k in range(self.d):
                    lin[1:] -= np.conj(c[k]) * coord[k][1:]
                if abs(lin[0]) <= POLE_TOL:
                    raise PoleError(f"pole of kernel vector at base point {base}")
                recips[key] = space.power(space.reciprocal(lin), t.pole_order)
            m = recips[key]
            for k, e in enumerate(t.alpha):
                if e:
                    m = space.mul(m, space.power(coord[k], e))
            out += t.coeff * m
        return out

    def __repr__(self):
        return f"KernelVector(d={self.d}, {len(self.terms)} terms)"


# --------------------------------------------------------------------------
# functionals


@dataclass(frozen=True, eq=False)
class JetFunctional:
    """``l(f) = sum_alpha c_alpha (d^alpha f)(base)``.

    The base may lie on the sphere only for pure evaluations; such
    functionals are split off by the recipe's boundary handling.
    """

    base: BallPoint
    terms: Mapping[tuple[int, ...], complex]

    def __post_init__(self):
        base = as_point(self.base)
        terms = {}
        for alpha, c in dict(self.terms).items():
            a = _as_alpha(alpha, base.d)
            if complex(c) != 0:
                terms[a] = terms.get(a, 0j) + complex(c)
        terms = {a: c for a, c in terms.items() if c != 0}
        if not terms:
            raise InputError("functional needs at least one nonzero coefficient")
        if not all(np.isfinite(c) for c in terms.values()):
            raise InputError("functional coefficients must be finite")
        object.__setattr__(self, "base", base)
        object.__setattr__(self, "terms", terms)

    @property
    def d(self) -> int:
        return self.base.d

    @property
    def order(self) -> int:
        return max(sum(a) for a in self.terms)

    @classmethod
    def evaluation(cls, x) -> "JetFunctional":
        x = as_point(x)
        return cls(x, {(0,) * x.d: 1.0})

    @classmethod
    def derivative(cls, x, alpha, coeff=1.0) -> "JetFunctional":
        return cls(as_point(x), {tuple(alpha): coeff})

    def __add__(self, other: "JetFunctional") -> "JetFunctional":
        if other.base != self.base:
            raise InputError("can only add functionals with a common base point")
        merged = dict(self.terms)
        for a, c in other.terms.items():
            merged[a] = merged.get(a, 0j) + c
        return JetFunctional(self.base, merged)

    def scaled(self, s) -> "JetFunctional":
        return JetFunctional(self.base, {a: c * complex(s) for a, c in self.terms.items()})

    def __call__(self, f) -> complex:
        return apply_functional(self, f)


# --------------------------------------------------------------------------
# operations


def kernel_eval(x, z) -> complex:
    """``u_x(z) = (1 - <z, x>)^{-1}``."""
    x, z = as_point(x), as_point(z)
    if x.d != z.d:
        raise InputError("points must have equal dimension")
    if not (x.interior or z.interior):
        raise InputError("at least one point must lie in the open ball")
    denom = 1 - inner(z.coords, x.coords)
    if abs(denom) <= POLE_TOL:
        raise PoleError("kernel evaluated at its pole")
    return 1 / denom


def gram(points) -> np.ndarray:
    """Gram matrix ``B_ij = <u_{x_j}, u_{x_i}> = (1 - <x_i, x_j>)^{-1}``.

    Only the upper triangle is computed; the lower one is its mirror, so
    the result is exactly Hermitian.
    """
    pts = [as_point(p) for p in points]
    if not pts:
        raise InputError("need at least one point")
    d = pts[0].d
    if any(p.d != d for p in pts):
        raise InputError("points must have equal dimension")
    for i, p in enumerate(pts):
        if not p.interior:
            raise InputError(
                f"point {i} lies on the sphere; use the boundary split of the recipe module"
            )
    X = np.array([p.coords for p in pts])
    for i, j in itertools.combinations(range(len(pts)), 2):
        if np.linalg.norm(X[i] - X[j]) <= DISTINCT_EPS:
            raise InputError(f"points {i} and {j} coincide")
    # G_ij = <x_i, x_j>, accumulated coordinate by coordinate so that
    # appending zero coordinates leaves every entry bit-identical
    G = np.zeros((len(pts), len(pts)), dtype=complex)
    for k in range(d):
        G += np.outer(X[:, k], X[:, k].conj())
    B = 1 / (1 - G)
    upper = np.triu(B, 1)
    return upper + upper.conj().T + np.diag(B.diagonal().real)


def fantappie_vector(l: JetFunctional) -> KernelVector:
    """Kernel vector ``lambda(z) = conj(l(u_z))`` of a functional.

    Differentiating ``(1 - <y, z>)^{-1}`` in ``y`` gives
    ``lambda(z) = sum conj(c_alpha) |alpha|! z^alpha (1 - <z, a>)^{-1-|alpha|}``.
    """
    if not l.base.interior:
        raise InputError("kernel vectors exist only for functionals based in the open ball")
    terms = [
        KernelTerm(np.conj(c) * math.factorial(sum(a)), a, l.base, 1 + sum(a))
        for a, c in l.terms.items()
    ]
    return KernelVector(l.d, terms)


def jet_expand(f, base, order: int) -> JetValue:
    """Exact Taylor coefficients of a polynomial or kernel vector at ``base``."""
    base = as_point(base)
    if not base.interior:
        raise InputError("jets are expanded only at interior points")
    if f.d != base.d:
        raise InputError("dimension mismatch between function and base point")
    space = jet_space(base.d, int(order))
    return JetValue(base, int(order), f.jet(base, space))


def apply_functional(l: JetFunctional, f) -> complex:
    """``l(f) = sum c_alpha alpha! * (Taylor coefficient of f at alpha)``.

    ``f`` may be a :class:`Polynomial`, a :class:`KernelVector` or a
    precomputed :class:`JetValue` at ``l.base`` of sufficient order.
    """
    if isinstance(f, JetValue):
        jet = f
        if jet.base != l.base or jet.order < l.order:
            raise InputError("jet does not match the functional's base point or order")
    else:
        jet = jet_expand(f, l.base, l.order)
    space = jet.space
    return complex(
        sum(c * space.factorials[space.position[a]] * jet.coeffs[space.position[a]]
            for a, c in l.terms.items())
    )
