"""Mutual information, quantum discord and its distinguishability bound.

Measurements are projective and performed on Bob's qubit. All quantities
are in bits.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import sphere
from .errors import Indeterminate, OutOfDomain, PureBobMarginal
from .state import (BlochState, binary_entropy, from_density_matrix,
                    marginal_entropy, von_neumann_entropy)
from .steering import (Branch, MeasurementDirection, OptimizationResult,
                       _vec, max_distance, steer)

ZERO_DISCORD_TOL = 1e-10
PURE_Y_TOL = 1e-10
_LN2 = math.log(2.0)


@dataclass(frozen=True)
class CorrelationReport:
    mutual_info: float
    classical_corr: float
    discord: float
    q_star: float
    n_discord: MeasurementDirection
    n_star: MeasurementDirection
    branch: Branch
    d2_max: float

    CSV_HEADER = ("I", "C", "Q", "Qstar", "theta_Q", "phi_Q",
                  "theta_star", "phi_star", "branch")

    def to_csv_row(self):
        return [self.mutual_info, self.classical_corr, self.discord, self.q_star,
                self.n_discord.theta, self.n_discord.phi,
                self.n_star.theta, self.n_star.phi, str(self.branch)]


def _h(p):
    # -p log2 p with 0 log 0 = 0; scalar fast path
    return -p * math.log(p) / _LN2 if p > 0.0 else 0.0


def _h2(p):
    return _h(p) + _h(1.0 - p)


def mutual_information(s):
    """S(rho_A) + S(rho_B) - S(rho_AB)."""
    return (marginal_entropy(s.x) + marginal_entropy(s.y)
            - von_neumann_entropy(s.eigenvalues))


def conditional_entropy(s, n):
    """Average entropy of Alice's steered states when Bob measures along ``n``.

    ``sum_k p_k h2((1 + |x~_k|) / 2)``.
    """
    pair = steer(s, n)
    total = 0.0
    for p, xt in ((pair.p0, pair.x_tilde_0), (pair.p1, pair.x_tilde_1)):
        r = min(float(np.linalg.norm(xt)), 1.0)
        total += p * _h2((1 + r) / 2)
    return total


def _cond_entropy_fast(x, y, T, n):
    # same as conditional_entropy without the dataclass round trip
    yn = y[0] * n[0] + y[1] * n[1] + y[2] * n[2]
    Tn = T @ n
    total = 0.0
    for sgn in (1.0, -1.0):
        p = 1.0 + sgn * yn
        if p <= 0.0:
            continue
        v = x + sgn * Tn
        r = min(math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]) / p, 1.0)
        total += 0.5 * p * _h2((1 + r) / 2)
    return total


def conditional_entropy_batch(s, pts):
    """Vectorised conditional entropy over the rows of ``pts``."""
    yn = pts @ s.y
    Tn = pts @ s.T.T
    total = np.zeros(len(pts))
    for sgn in (1.0, -1.0):
        p = 1.0 + sgn * yn
        v = s.x + sgn * Tn
        with np.errstate(divide="ignore", invalid="ignore"):
            r = np.minimum(np.linalg.norm(v, axis=1) / p, 1.0)
        total += np.where(p > 0, 0.5 * p * binary_entropy((1 + r) / 2), 0.0)
    return total


def _discord_seeds(s):
    seeds = list(np.eye(3))
    if np.linalg.norm(s.y) > 0:
        seeds.append(s.y)
    _, _, Vt = np.linalg.svd(s.T)
    seeds.extend(Vt)
    m = s.T - np.outer(s.x, s.y)
    _, V = np.linalg.eigh(m.T @ m)
    seeds.extend(V.T)
    Tx = s.T.T @ s.x
    if np.linalg.norm(Tx) > 1e-12:
        seeds.append(Tx)
    return seeds


def _check_bob(s):
    if np.linalg.norm(s.y) >= 1 - PURE_Y_TOL:
        raise PureBobMarginal(f"|y| = {np.linalg.norm(s.y):.12f}")


def min_conditional_entropy(s):
    """Minimum of the conditional entropy over projective directions.

    Returns ``(value, MeasurementDirection)``.
    """
    _check_bob(s)
    x, y, T = s.x, s.y, s.T
    n, v, _ = sphere.minimize_on_sphere(
        lambda n: _cond_entropy_fast(x, y, T, n),
        lambda pts: conditional_entropy_batch(s, pts),
        extra_seeds=_discord_seeds(s))
    return v, MeasurementDirection(n)


def _base_entropy(s):
    return marginal_entropy(s.y) - von_neumann_entropy(s.eigenvalues)


def discord(s):
    """Quantum discord with measurements on Bob, and the optimal direction.

    ``S(rho_B) - S(rho_AB) + min_n S(A | n)``, minimised by lattice search
    plus local refinement.
    """
    v, n = min_conditional_entropy(s)
    return _base_entropy(s) + v, n


def steered_probabilities(s, n):
    """The length-4 vector ``w`` and length-2 vector ``p`` for direction ``n``.

    ``w_kl = (1 + (-)^k y.n + (-)^l |x + (-)^k T n|) / 4``,
    ``p_k = (1 + (-)^k y.n) / 2``.
    """
    n = _vec(n)
    yn = float(s.y @ n)
    w, p = [], []
    for sgn in (1.0, -1.0):
        r = float(np.linalg.norm(s.x + sgn * (s.T @ n)))
        w.extend([(1 + sgn * yn + r) / 4, (1 + sgn * yn - r) / 4])
        p.append((1 + sgn * yn) / 2)
    return np.array(w), np.array(p)


def q_star_at(s, n):
    """``[h2(q) - h4(lambda)] + [h4(w) - h2(p)]`` evaluated for direction ``n``."""
    w, p = steered_probabilities(s, n)
    ny = min(float(np.linalg.norm(s.y)), 1.0)
    q = np.array([(1 + ny) / 2, (1 - ny) / 2])
    return ((von_neumann_entropy(q) - von_neumann_entropy(s.eigenvalues))
            + (von_neumann_entropy(w) - von_neumann_entropy(p)))


def q_star(s, opt: OptimizationResult | None = None):
    """Discord-like quantity at the maximum-distinguishability direction.

    Returns ``(value, MeasurementDirection)``; ``value >= discord(s)``.
    """
    _check_bob(s)
    if opt is None:
        opt = max_distance(s)
    return q_star_at(s, opt.n_star), opt.n_star


def correlation_report(s):
    """All correlation quantities of ``s`` in one pass."""
    _check_bob(s)
    opt = max_distance(s)
    qs, n_star = q_star(s, opt)
    v, n_q = min_conditional_entropy(s)
    mi = mutual_information(s)
    Q = _base_entropy(s) + v
    return CorrelationReport(mi, mi - Q, Q, qs, n_q, n_star, opt.branch, opt.value)


def is_zero_discord(s):
    """Structural zero-discord test (measurements on Bob).

    True iff T = 0, or T has rank one and y lies along its Bob-side singular
    direction.
    """
    _, S, Vt = np.linalg.svd(s.T)
    if S[0] <= ZERO_DISCORD_TOL:
        return True
    if S[1] > ZERO_DISCORD_TOL:
        return False
    k = Vt[0]
    return bool(np.linalg.norm(s.y - (s.y @ k) * k) <= ZERO_DISCORD_TOL)


# -- two-parameter family -----------------------------------------------------

def _check_two_param(a, b, tol=1e-12):
    if not (-tol <= a <= 1 + tol and a - 1 - tol <= b <= 1 - a + tol):
        raise OutOfDomain(f"(a, b) = ({a}, {b}) outside 0<=a<=1, a-1<=b<=1-a")


def two_param_matrix(a, b):
    _check_two_param(a, b)
    return 0.5 * np.array([[a, 0, 0, a],
                           [0, 1 - a - b, 0, 0],
                           [0, 0, 1 - a + b, 0],
                           [a, 0, 0, a]], dtype=complex)


def two_param_state(a, b):
    """Bloch form of the (a, b) family: x = -y = (0, 0, -b), T = diag(a, -a, 2a-1)."""
    return from_density_matrix(two_param_matrix(a, b))


def two_param_q_literal(a, b):
    """``q`` written as four logarithms; loses accuracy as 1-a-|b| -> 0."""
    r = math.sqrt(a * a + b * b)
    lg = math.log2
    return (a / 2 * lg(4 * a * a / ((1 - a) ** 2 - b * b))
            - b / 2 * lg((1 + b) * (1 - a - b) / ((1 - b) * (1 - a + b)))
            + 0.5 * lg(4 * ((1 - a) ** 2 - b * b) / ((1 - b * b) * (1 - a * a - b * b)))
            - r / 2 * lg((1 + r) / (1 - r)))


def two_param_q(a, b):
    """The x-measurement candidate ``q`` of the (a, b) family's discord.

    Same expression as :func:`two_param_q_literal` with every logarithm split
    into single factors. Each factor's collected prefactor vanishes together
    with the factor, so 0 log 0 = 0 applies factor by factor and the value is
    finite and well conditioned on the closed domain.

    Raises
    ------
    OutOfDomain
    Indeterminate
        If a vanishing factor keeps a nonzero prefactor.
    """
    _check_two_param(a, b)
    a = min(max(float(a), 0.0), 1.0)
    b = float(b)
    r = min(math.sqrt(a * a + b * b), 1.0)

    def flog(c, f):
        if f <= 0.0:
            if abs(c) <= 1e-15:
                return 0.0
            raise Indeterminate(f"log of zero with prefactor {c} at (a, b) = ({a}, {b})")
        return c * math.log2(f)

    lo, hi = max(1 - a - b, 0.0), max(1 - a + b, 0.0)
    val = (a + 1 + flog(a, a)
           + flog(lo / 2, lo) + flog(hi / 2, hi)
           - flog((1 + b) / 2, 1 + b) - flog((1 - b) / 2, 1 - b)
           - flog((1 + r) / 2, 1 + r) - flog((1 - r) / 2, 1 - r))
    if not math.isfinite(val):
        raise Indeterminate(f"q undefined at (a, b) = ({a}, {b})")
    return val


def two_param_discord_closed_form(a, b):
    """``min{a, q}`` for the (a, b) family.

    ``a`` and ``q`` are the values for measurements along z and x. For
    ``b != 0`` the true optimum leaves both axes in a narrow window around
    ``a = q``, where this is only an upper bound on :func:`discord`.
    """
    return min(float(a), two_param_q(a, b))
