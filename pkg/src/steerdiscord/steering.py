"""Steered Alice states and the maximum-distinguishability measurement.

When Bob measures along ``n`` (outcomes ``n_0 = n``, ``n_1 = -n``), Alice is
steered to Bloch vectors ``(x + T n_k) / (1 + y.n_k)`` with probabilities
``(1 + y.n_k) / 2``. The squared Euclidean (trace) distance between the two
steered points is ``4 n'Mn / (1 - n'Yn)^2`` with ``M = m'm``,
``m = T - x y'`` and ``Y = y y'``; :func:`max_distance` maximises it.
"""

from __future__ import annotations

import enum
import logging
import math
from dataclasses import dataclass

import numpy as np

from . import sphere
from .errors import (DegenerateOutcome, NotCanonical, OptimizationFailure,
                     PureBobMarginal)

log = logging.getLogger(__name__)

CANONICAL_TOL = 1e-10
STRUCT_TOL = 1e-10
ANGULAR_TOL = 1e-9
PURE_Y_TOL = 1e-10
RESIDUAL_TOL = 1e-8
GUARD_TOL = 1e-9


class Branch(str, enum.Enum):
    CANONICAL = "Canonical"
    Y_EIGVEC = "YEigvec"
    XSTATE_SIGMA_Z = "XStateSigmaZ"
    XSTATE_SIGMA_X = "XStateSigmaX"
    XSTATE_INTERIOR = "XStateInterior"
    NUMERIC = "Numeric"

    def __str__(self):
        return self.value


@dataclass(frozen=True, eq=False)
class MeasurementDirection:
    """Unit vector ``n`` of Bob's projective measurement (``n`` and ``-n``
    describe the same measurement)."""

    n: np.ndarray

    def __post_init__(self):
        v = np.array(self.n, dtype=float)
        norm = np.linalg.norm(v)
        if v.shape != (3,) or norm == 0:
            raise ValueError("measurement direction must be a nonzero 3-vector")
        v = v / norm
        v.setflags(write=False)
        object.__setattr__(self, "n", v)

    @classmethod
    def from_angles(cls, theta, phi):
        return cls(sphere.direction(theta, phi))

    @property
    def theta(self):
        return sphere.angles(self.n)[0]

    @property
    def phi(self):
        return sphere.angles(self.n)[1]

    def __repr__(self):
        return f"MeasurementDirection(n={self.n.tolist()})"


def _vec(n):
    if isinstance(n, MeasurementDirection):
        return n.n
    return np.asarray(n, dtype=float)


@dataclass(frozen=True)
class SteeredPair:
    x_tilde_0: np.ndarray
    x_tilde_1: np.ndarray
    p0: float
    p1: float

    @property
    def distance_squared(self):
        d = self.x_tilde_0 - self.x_tilde_1
        return float(d @ d)


@dataclass(frozen=True, eq=False)
class DistanceKernel:
    """Quadratic forms of the squared-distance objective."""

    M: np.ndarray
    Y: np.ndarray

    @classmethod
    def from_state(cls, s):
        m = s.T - np.outer(s.x, s.y)
        return cls(m.T @ m, np.outer(s.y, s.y))


@dataclass(frozen=True)
class OptimizationResult:
    n_star: MeasurementDirection
    value: float
    branch: Branch


def steer(s, n):
    """Alice's post-measurement Bloch vectors and outcome probabilities.

    Raises
    ------
    DegenerateOutcome
        If either outcome probability is below 1e-12.
    """
    n = _vec(n)
    yn = float(s.y @ n)
    if abs(yn) >= 1 - 2e-12:
        raise DegenerateOutcome(f"y.n = {yn:.15f}; one outcome has zero probability")
    Tn = s.T @ n
    return SteeredPair((s.x + Tn) / (1 + yn), (s.x - Tn) / (1 - yn),
                       0.5 * (1 + yn), 0.5 * (1 - yn))


def canonical_ellipsoid(s):
    """Centre, semi-axes and axes of the steering ellipsoid of a canonical state.

    Returns
    -------
    center : ndarray, shape (3,)
    semiaxes : ndarray, shape (3,)
        Singular values of T, descending.
    axes : ndarray, shape (3, 3)
        Row ``i`` is the unit axis (left singular vector) for ``semiaxes[i]``.
    """
    if np.linalg.norm(s.y) > CANONICAL_TOL:
        raise NotCanonical(f"|y| = {np.linalg.norm(s.y):.3e}; apply to_canonical first")
    U, S, _ = np.linalg.svd(s.T)
    return s.x.copy(), S, U.T.copy()


def ellipsoid_csv_row(center, semiaxes, axes):
    """Flat row: centre (3), semi-axes (3), axes row-major (9)."""
    return [*map(float, center), *map(float, semiaxes), *map(float, np.ravel(axes))]


def d_squared(k, n):
    """Squared distance between the two steered points for direction ``n``."""
    n = _vec(n)
    den = 1.0 - n @ k.Y @ n
    if den <= 1e-12:
        raise PureBobMarginal(f"1 - n'Yn = {den:.3e}")
    return float(4.0 * (n @ k.M @ n) / (den * den))


def d_squared_batch(k, pts):
    """Vectorised :func:`d_squared` over rows of ``pts`` (no domain check)."""
    num = np.einsum("ni,ij,nj->n", pts, k.M, pts)
    den = 1.0 - np.einsum("ni,ij,nj->n", pts, k.Y, pts)
    return 4.0 * num / (den * den)


def _script_m(k, n):
    nMn = n @ k.M @ n
    return k.M + (2.0 * nMn / (1.0 - n @ k.Y @ n)) * k.Y


def stationary_residual(k, n):
    """Norm of the part of ``M(n) n`` orthogonal to ``n``.

    ``M(n) = M + 2 n'Mn / (1 - n'Yn) Y``; the residual vanishes exactly at
    stationary points of the squared distance.
    """
    n = _vec(n)
    g = _script_m(k, n) @ n
    return float(np.linalg.norm(g - (n @ g) * n))


def _gradient(k, n):
    """Euclidean gradient of d_squared at unit ``n``."""
    den = 1.0 - n @ k.Y @ n
    return 8.0 * (_script_m(k, n) @ n) / (den * den)


def _newton_polish(k, n, iters=12, h=1e-5):
    """Newton iterations on the tangent gradient to tighten a maximiser."""
    best_n, best_v = n, d_squared(k, n)
    best_r = stationary_residual(k, n)
    for _ in range(iters):
        if best_r < 1e-14:
            break
        e1, e2 = sphere.tangent_basis(best_n)
        E = np.column_stack([e1, e2])

        def tangent_grad(u):
            v = best_n + E @ u
            nv = np.linalg.norm(v)
            m = v / nv
            J = (np.eye(3) - np.outer(m, m)) @ E / nv
            return J.T @ _gradient(k, m), m

        g0, _ = tangent_grad(np.zeros(2))
        H = np.empty((2, 2))
        for j in range(2):
            du = np.zeros(2)
            du[j] = h
            H[:, j] = (tangent_grad(du)[0] - tangent_grad(-du)[0]) / (2 * h)
        H = 0.5 * (H + H.T)
        try:
            step = -np.linalg.solve(H, g0)
        except np.linalg.LinAlgError:
            break
        if not np.all(np.isfinite(step)) or np.linalg.norm(step) > 0.1:
            break
        cand = best_n + E @ step
        cand /= np.linalg.norm(cand)
        v, r = d_squared(k, cand), stationary_residual(k, cand)
        if v < best_v - 1e-13 or r >= best_r:
            break
        best_n, best_v, best_r = cand, v, r
    return best_n


def _is_x_state(s):
    return (max(abs(s.x[0]), abs(s.x[1]), abs(s.y[0]), abs(s.y[1])) <= STRUCT_TOL
            and np.max(np.abs(s.T - np.diag(np.diag(s.T)))) <= STRUCT_TOL)


def x_state_regime(M1, M3, y2):
    """Regime of an X state with ``M1 >= M3`` on its dominant in-plane axis.

    Returns ``"sigma_x"``, ``"interior"`` or ``"sigma_z"`` from the bounds
    ``(M1-M3)/(2 M1) <= y^2 <= (M1-M3)/(M1+M3)`` on the interior solution.
    """
    if M1 <= M3:
        return "sigma_z"
    lo = (M1 - M3) / (2 * M1)
    hi = (M1 - M3) / (M1 + M3)
    if y2 < lo:
        regime = "sigma_x"
    elif y2 > hi:
        regime = "sigma_z"
    else:
        regime = "interior"
    # equivalent form in terms of (1 - y^2)^2; disagreement away from the
    # regime boundaries means a formula bug
    w = (1 - y2) ** 2
    a2 = (2 * M3 / (M1 + M3)) ** 2
    b2 = ((M1 + M3) / (2 * M1)) ** 2
    alt = "sigma_x" if w > b2 else ("sigma_z" if w < a2 else "interior")
    near = min(abs(w - a2), abs(w - b2), abs(y2 - lo), abs(y2 - hi)) < 1e-12
    assert alt == regime or near, (regime, alt, M1, M3, y2)
    return regime


def _x_state_axes(s, k):
    """Dominant in-plane axis index and (M1, M3) for an X state."""
    axis = 0 if abs(s.T[0, 0]) >= abs(s.T[1, 1]) else 1
    return axis, float(k.M[axis, axis]), float(k.M[2, 2])


def _y_is_top_eigvec(s, k):
    ny = np.linalg.norm(s.y)
    yh = s.y / ny
    lam_max = float(np.linalg.eigvalsh(k.M)[-1])
    My = k.M @ yh
    yMy = float(yh @ My)
    resid = np.linalg.norm(My - yMy * yh)
    return resid <= ANGULAR_TOL * np.linalg.norm(My) and yMy >= lam_max * (1 - ANGULAR_TOL)


def classify_branch(s, kernel=None):
    """Which closed-form case (if any) gives the maximiser for ``s``.

    Precedence: Canonical > YEigvec > X state > Numeric.
    """
    k = kernel or DistanceKernel.from_state(s)
    if np.linalg.norm(s.y) <= CANONICAL_TOL:
        return Branch.CANONICAL
    if _y_is_top_eigvec(s, k):
        return Branch.Y_EIGVEC
    if _is_x_state(s):
        _, M1, M3 = _x_state_axes(s, k)
        regime = x_state_regime(M1, M3, float(s.y[2]) ** 2)
        return {"sigma_z": Branch.XSTATE_SIGMA_Z, "sigma_x": Branch.XSTATE_SIGMA_X,
                "interior": Branch.XSTATE_INTERIOR}[regime]
    return Branch.NUMERIC


def _top_singular_direction(T):
    """Right singular direction of the largest singular value of T.

    Degenerate top values: the vector of the top eigenspace of T'T closest to
    z (then y, then x), for determinism.
    """
    w, V = np.linalg.eigh(T.T @ T)
    top = w[-1]
    span = V[:, w >= top - 1e-12 * max(top, 1.0)]
    if span.shape[1] == 1:
        return span[:, 0]
    for e in np.eye(3)[::-1]:
        proj = span @ (span.T @ e)
        if np.linalg.norm(proj) > 1e-8:
            return proj / np.linalg.norm(proj)
    return span[:, 0]


def _analytic_direction(s, k, branch):
    if branch is Branch.CANONICAL:
        return _top_singular_direction(s.T)
    if branch is Branch.Y_EIGVEC:
        return s.y / np.linalg.norm(s.y)
    axis, M1, M3 = _x_state_axes(s, k)
    e_axis = np.eye(3)[axis]
    if branch is Branch.XSTATE_SIGMA_Z:
        return np.array([0.0, 0.0, 1.0])
    if branch is Branch.XSTATE_SIGMA_X:
        return e_axis
    y2 = float(s.y[2]) ** 2
    c = (2 * M1 * y2 - (M1 - M3)) / ((M1 - M3) * y2)
    c = min(max(c, 0.0), 1.0)
    n = math.sqrt(1 - c) * e_axis
    n[2] = math.sqrt(c)
    return n


def _numeric_max(s, k):
    if np.max(np.abs(k.M)) <= 1e-300:
        n = s.y / np.linalg.norm(s.y) if np.linalg.norm(s.y) > 0 else np.array([0, 0, 1.0])
        return sphere.canonical_sign(n)
    _, V = np.linalg.eigh(k.M)
    seeds = [V[:, 2], V[:, 1]]
    if np.linalg.norm(s.y) > 0:
        seeds.append(s.y)
    n, _, _ = sphere.minimize_on_sphere(
        lambda v: -d_squared(k, v), lambda p: -d_squared_batch(k, p), extra_seeds=seeds,
        fine=False)
    n = _newton_polish(k, n)
    return sphere.canonical_sign(n)


def max_distance(s):
    """Measurement direction maximising the distance between steered states.

    Dispatches to a closed form when the state belongs to one of the solvable
    classes; every closed-form answer is checked against a 2048-point
    hemisphere lattice and replaced by the numeric search if the lattice
    beats it by more than 1e-9.

    Raises
    ------
    PureBobMarginal
        If ``|y| >= 1 - 1e-10``.
    OptimizationFailure
        If the numeric maximiser does not reach a stationary residual of 1e-8.
    """
    if np.linalg.norm(s.y) >= 1 - PURE_Y_TOL:
        raise PureBobMarginal(f"|y| = {np.linalg.norm(s.y):.12f}")
    k = DistanceKernel.from_state(s)
    branch = classify_branch(s, k)
    if branch is not Branch.NUMERIC:
        n = sphere.canonical_sign(_analytic_direction(s, k, branch))
        grid_max = float(np.max(d_squared_batch(k, sphere.fibonacci_hemisphere())))
        if d_squared(k, n) < grid_max - GUARD_TOL:
            log.warning("closed form %s beaten by lattice for %r; using numeric search",
                        branch, s)
            branch = Branch.NUMERIC
    if branch is Branch.NUMERIC:
        n = _numeric_max(s, k)
        r = stationary_residual(k, n)
        if r >= RESIDUAL_TOL:
            raise OptimizationFailure(f"stationary residual {r:.3e} at {n} for {s!r}")
    return OptimizationResult(MeasurementDirection(n), d_squared(k, n), branch)
