"""Self-verification suite behind the ``verify`` command.

Each check recomputes a known identity or bound and reports the observed
value next to the expected one.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .counterexamples import (
    E11,
    E12,
    alpha_l22_witness,
    phi_bounds,
    phi_bruteforce,
    q0q0_block,
    q0q0_quotient_norm,
    shift2zero_norms,
)
from .kernel import JetFunctional, Polynomial
from .linalg import opnorm
from .pick import PickProblem, feasible
from .recipe import IdealSpec, build_model
from .twodim import classify_two_dim, h, tilde_tc


@dataclass(frozen=True)
class Check:
    name: str
    observed: float
    expected: str
    passed: bool


SEED = 20240101


def _gap_checks(rng):
    w = shift2zero_norms(E11, E12)
    yield Check("gap witness column norm", w.column_norm, "1 +- 1e-10", abs(w.column_norm - 1) <= 1e-10)
    yield Check("gap witness row norm", w.row_norm, "sqrt(2) +- 1e-10",
                abs(w.row_norm - math.sqrt(2)) <= 1e-10)
    yield Check("transposition gap ratio", alpha_l22_witness(), "sqrt(2) +- 1e-10",
                abs(alpha_l22_witness() - math.sqrt(2)) <= 1e-10)
    worst = 0.0
    for _ in range(1000):
        A = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        B = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        worst = max(worst, shift2zero_norms(A, B).ratio)
    yield Check("sampled gap ratio maximum", worst, "<= sqrt(2) + 1e-9", worst <= math.sqrt(2) + 1e-9)


def _q0q0_checks(rng):
    err, slack = 0.0, math.inf
    for _ in range(100):
        n = int(rng.integers(1, 4))
        A = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        B = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
        q = q0q0_quotient_norm(A, B)
        err = max(err, abs(opnorm(q0q0_block(A, B)) - q))
        for _ in range(2):
            C = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
            slack = min(slack, opnorm(q0q0_block(A, B, C)) - q)
    yield Check("Q0xQ0 block norm at C = 0", err, "<= 1e-9", err <= 1e-9)
    yield Check("Q0xQ0 perturbed block norm excess", slack, ">= -1e-9", slack >= -1e-9)


def _phi_checks():
    worst = math.inf
    for c in (0.3, 0.6, 1.0):
        for d in (0.3, 0.6, 1.0):
            lo, hi = phi_bounds(c, d)
            v = phi_bruteforce(c, d).value
            worst = min(worst, v - (lo - 1e-3), (hi + 1e-3) - v)
    yield Check("phi estimate inside bracket (slack)", worst, ">= 0", worst >= 0)


def _twodim_checks():
    err = max(abs(opnorm(tilde_tc(c)) - h(c)) for c in np.linspace(0.01, 0.99, 99))
    yield Check("||-1 + 2 T_c / c|| = h(c)", err, "<= 1e-10", err <= 1e-10)


def _pick_checks():
    err = 0.0
    for r in np.arange(1, 10) / 10:
        verdict = feasible(PickProblem([[0], [r]], [[[0]], [[r / 2]]])).verdict.value
        err = max(err, 0.0 if verdict == "strictly_feasible" else 1.0)
    yield Check("Schwarz-Pick instances at t = r/2 feasible", err, "0", err == 0)


def _recipe_checks():
    m = build_model(IdealSpec(1, [JetFunctional.evaluation([0]), JetFunctional.derivative([0], (1,))]))
    c = classify_two_dim(m.action(Polynomial.coordinate(0, 1))).c
    yield Check("first-order jet at 0 gives Q_0", c, "0", abs(c) <= 1e-12)
    fs = [JetFunctional.evaluation([0, 0]), JetFunctional.derivative([0, 0], (1, 0)),
          JetFunctional.derivative([0, 0], (0, 1))]
    m = build_model(IdealSpec(2, fs))
    a, b = 0.6, 0.8j
    val = opnorm(a * m.R[1] + b * m.R[2])
    yield Check("I(0)^2 in d = 2 is l2 (norm of 0.6 z1 + 0.8i z2)", val, "1 +- 1e-10", abs(val - 1) <= 1e-10)


def run_suite(seed: int = SEED) -> list[Check]:
    rng = np.random.default_rng(seed)
    checks = []
    for group in (_gap_checks(rng), _q0q0_checks(rng), _twodim_checks(), _pick_checks(),
                  _recipe_checks(), _phi_checks()):
        checks.extend(group)
    return checks
