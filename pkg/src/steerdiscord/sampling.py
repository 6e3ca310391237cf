"""Seeded random two-qubit states, unconstrained or restricted to a class.

Every state ``i`` of a batch is drawn from its own PCG64 stream seeded with
``SeedSequence(seed, spawn_key=(i,))``, so a batch can be generated in any
order (or in parallel) and still be identical element by element.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from .errors import ExhaustedRejection, SingularFilter
from .state import _PA, _PAB, _PB, BlochState, from_density_matrix, to_canonical

RNG_ALGORITHM = "PCG64 seeded by numpy SeedSequence(seed, spawn_key=(index,))"

BATCH = 256
MAX_DRAWS = 1_000_000
MIN_ACCEPTANCE = 1e-4
MIN_Y = 1e-6  # categories that must not be canonical keep |y| above this
MAX_Y = 1 - 1e-9


class Category(str, enum.Enum):
    GENERIC = "Generic"
    CANONICAL = "Canonical"
    CANONICAL_TX0 = "Canonical_Tx0"
    BELL_DIAGONAL = "BellDiagonal"
    Y_TOP_EIGVEC = "YTopEigvec"
    XSTATE_M1_LE_M3 = "XState_M1leM3"
    XSTATE_M1_GE_M3_INTERIOR = "XState_M1geM3_interior"
    XSTATE_M1_GE_M3_EDGE = "XState_M1geM3_edge"
    ZERO_DISCORD_T0 = "ZeroDiscord_T0"
    ZERO_DISCORD_RANK1 = "ZeroDiscord_rank1"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class SamplerConfig:
    seed: int
    category: Category = Category.GENERIC
    count: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ValueError("count must be >= 1")
        object.__setattr__(self, "category", Category(self.category))


def stream(seed, index):
    """The generator used for state ``index`` of a batch seeded with ``seed``."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,))))


def ginibre_density_matrix(rng, dim=4):
    """``G G^dagger / Tr(G G^dagger)`` with standard complex Gaussian ``G``."""
    g = rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))
    m = g @ g.conj().T
    return m / np.real(np.trace(m))


def _min_eigs(x, y, T):
    rho = np.broadcast_to(np.eye(4, dtype=complex), (len(x), 4, 4)).copy()
    rho += np.einsum("bk,kij->bij", x, _PA)
    rho += np.einsum("bk,kij->bij", y, _PB)
    rho += np.einsum("bkl,klij->bij", T, _PAB)
    return np.linalg.eigvalsh(rho / 4)[:, 0]


def _in_ball(rng, n):
    v = rng.standard_normal((n, 3))
    v /= np.linalg.norm(v, axis=1, keepdims=True)
    return v * rng.random((n, 1)) ** (1 / 3)


def _unit(rng, n):
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def _diag(d):
    T = np.zeros((len(d), 3, 3))
    T[:, [0, 1, 2], [0, 1, 2]] = d
    return T


# Each candidate generator returns (x, y, T, ok) for a batch of draws.

def _bell_diagonal(rng, n):
    t = rng.uniform(-1, 1, (n, 3))
    z = np.zeros((n, 3))
    return z, z, _diag(t), np.ones(n, bool)


def _canonical_tx0(rng, n):
    # x along z, third row of T zero, then independent local rotations;
    # half the draws use x = 0 with a full-rank T instead
    z = np.zeros((n, 3))
    T0 = rng.uniform(-1, 1, (n, 3, 3))
    xz = rng.uniform(-1, 1, n)
    rank2 = rng.random(n) < 0.5
    T0[rank2, 2, :] = 0.0
    x0 = z.copy()
    x0[rank2, 2] = xz[rank2]
    Ra = Rotation.random(n, random_state=rng).as_matrix()
    Rb = Rotation.random(n, random_state=rng).as_matrix()
    x = np.einsum("bij,bj->bi", Ra, x0)
    T = Ra @ T0 @ np.transpose(Rb, (0, 2, 1))
    return x, z, T, np.ones(n, bool)


def _y_top_eigvec(rng, n):
    xv, yv, t1, t2 = rng.uniform(-1, 1, (4, n))
    z = np.zeros((n, 3))
    x, y = z.copy(), z.copy()
    x[:, 2] = xv
    y[:, 0] = yv
    T = _diag(np.column_stack([t1, t2, np.zeros(n)]))
    ok = (t1**2 + xv**2 * yv**2 >= t2**2) & (np.abs(yv) >= MIN_Y)
    return x, y, T, ok


def _x_state(rng, n):
    xv, yv, t1, t2, t3 = rng.uniform(-1, 1, (5, n))
    z = np.zeros((n, 3))
    x, y = z.copy(), z.copy()
    x[:, 2] = xv
    y[:, 2] = yv
    return x, y, _diag(np.column_stack([t1, t2, t3])), np.abs(yv) >= MIN_Y


def _x_regime(x, y, T):
    t1, t2, t3 = T[:, 0, 0], T[:, 1, 1], T[:, 2, 2]
    y2 = y[:, 2] ** 2
    M1 = np.maximum(t1**2, t2**2)
    M3 = (t3 - x[:, 2] * y[:, 2]) ** 2
    with np.errstate(divide="ignore", invalid="ignore"):
        lo = (M1 - M3) / (2 * M1)
        hi = (M1 - M3) / (M1 + M3)
    return M1, M3, y2, lo, hi


def _x_le(rng, n):
    x, y, T, ok = _x_state(rng, n)
    M1, M3, *_ = _x_regime(x, y, T)
    return x, y, T, ok & (M1 <= M3)


def _x_interior(rng, n):
    x, y, T, ok = _x_state(rng, n)
    M1, M3, y2, lo, hi = _x_regime(x, y, T)
    return x, y, T, ok & (M1 > M3) & (lo <= y2) & (y2 <= hi)


def _x_edge(rng, n):
    x, y, T, ok = _x_state(rng, n)
    M1, M3, y2, lo, hi = _x_regime(x, y, T)
    return x, y, T, ok & (M1 > M3) & ((y2 < lo) | (y2 > hi))


def _zero_t0(rng, n):
    x, y = _in_ball(rng, n), _in_ball(rng, n)
    ok = np.linalg.norm(x, axis=1) + np.linalg.norm(y, axis=1) <= 1
    return x, y, np.zeros((n, 3, 3)), ok


def _zero_rank1(rng, n):
    # T = t u k', y = y k: classical on Bob's side in the k basis
    k, u = _unit(rng, n), _unit(rng, n)
    t, yv = rng.uniform(-1, 1, (2, n))
    x = _in_ball(rng, n)
    T = t[:, None, None] * np.einsum("bi,bj->bij", u, k)
    return x, yv[:, None] * k, T, np.ones(n, bool)


_GENERATORS = {
    Category.BELL_DIAGONAL: _bell_diagonal,
    Category.CANONICAL_TX0: _canonical_tx0,
    Category.Y_TOP_EIGVEC: _y_top_eigvec,
    Category.XSTATE_M1_LE_M3: _x_le,
    Category.XSTATE_M1_GE_M3_INTERIOR: _x_interior,
    Category.XSTATE_M1_GE_M3_EDGE: _x_edge,
    Category.ZERO_DISCORD_T0: _zero_t0,
    Category.ZERO_DISCORD_RANK1: _zero_rank1,
}


class _Budget:
    """Tracks acceptance over a batch and aborts hopeless categories."""

    def __init__(self, category):
        self.category = category
        self.draws = 0
        self.accepts = 0

    def update(self, draws, accepts):
        self.draws += draws
        self.accepts += accepts
        if self.draws >= MAX_DRAWS and self.accepts / self.draws < MIN_ACCEPTANCE:
            raise ExhaustedRejection(
                f"{self.category}: {self.accepts} accepted of {self.draws} draws")


def _rejection_one(category, rng, budget):
    gen = _GENERATORS[category]
    while True:
        x, y, T, ok = gen(rng, BATCH)
        ok &= np.linalg.norm(y, axis=1) < MAX_Y
        idx = np.flatnonzero(ok)
        if len(idx):
            good = idx[_min_eigs(x[idx], y[idx], T[idx]) >= 0.0]
            if len(good):
                i = good[0]
                budget.update(i + 1, 1)
                return BlochState(x[i], y[i], T[i])
        budget.update(BATCH, 0)


def sample_one(category, seed, index, budget=None):
    """State ``index`` of the batch ``(seed, category)``."""
    category = Category(category)
    budget = budget or _Budget(category)
    rng = stream(seed, index)
    if category is Category.GENERIC:
        return from_density_matrix(ginibre_density_matrix(rng))
    if category is Category.CANONICAL:
        while True:
            try:
                return to_canonical(from_density_matrix(ginibre_density_matrix(rng)))
            except SingularFilter:
                budget.update(1, 0)
    return _rejection_one(category, rng, budget)


def sample_generic(cfg):
    """Hilbert-Schmidt random states (``count`` of them)."""
    return [sample_one(Category.GENERIC, cfg.seed, i) for i in range(cfg.count)]


def sample_category(cfg):
    """``cfg.count`` states of ``cfg.category``.

    Raises
    ------
    ExhaustedRejection
        If fewer than 1 in 10^4 of at least 10^6 draws were accepted.
    """
    budget = _Budget(cfg.category)
    return [sample_one(cfg.category, cfg.seed, i, budget) for i in range(cfg.count)]


def category_predicate(category, s, tol=1e-10):
    """Whether ``s`` satisfies the defining condition of ``category``."""
    category = Category(category)
    x, y, T = s.x, s.y, s.T
    off = np.abs(T - np.diag(np.diag(T))).max()
    if category is Category.GENERIC:
        return True
    if category is Category.CANONICAL:
        return np.linalg.norm(y) <= tol
    if category is Category.CANONICAL_TX0:
        return np.linalg.norm(y) <= tol and np.linalg.norm(T.T @ x) <= tol
    if category is Category.BELL_DIAGONAL:
        return not x.any() and not y.any() and off == 0
    if category is Category.Y_TOP_EIGVEC:
        return (off == 0 and T[2, 2] == 0 and x[0] == x[1] == 0 and y[1] == y[2] == 0
                and T[0, 0] ** 2 + (x[2] * y[0]) ** 2 >= T[1, 1] ** 2)
    if category is Category.ZERO_DISCORD_T0:
        return not T.any()
    if category is Category.ZERO_DISCORD_RANK1:
        _, S, Vt = np.linalg.svd(T)
        return S[1] <= tol and np.linalg.norm(y - (y @ Vt[0]) * Vt[0]) <= tol
    # X states
    if off != 0 or x[0] or x[1] or y[0] or y[1]:
        return False
    M1, M3, y2, lo, hi = (float(v[0]) for v in _x_regime(x[None], y[None], T[None]))
    if category is Category.XSTATE_M1_LE_M3:
        return M1 <= M3
    if category is Category.XSTATE_M1_GE_M3_INTERIOR:
        return M1 > M3 and lo <= y2 <= hi
    return M1 > M3 and (y2 < lo or y2 > hi)
