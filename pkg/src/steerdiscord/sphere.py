"""Global search over unit directions with n ~ -n identified.

Both the distance maximisation and the discord minimisation use the same
protocol: evaluate a Fibonacci lattice on the upper hemisphere, keep the
best few well-separated points, refine each coarsely with Nelder-Mead in a
local tangent chart, then polish the winner until the simplex is below
1e-12 (or 500 iterations).
"""

from __future__ import annotations

import math
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize

GRID_POINTS = 2048
N_SEEDS = 3
SEED_SEPARATION = 0.3  # radians, between kept seeds
NM_MAXITER = 500
NM_XATOL = 1e-12
COARSE_XATOL = 1e-3
COARSE_FATOL = 1e-7
NEAR_TIE = 1e-4  # coarse candidates this close to the best all get polished


@lru_cache(maxsize=8)
def fibonacci_hemisphere(n=GRID_POINTS):
    """``n`` nearly uniform unit vectors with z >= 0 (read-only array)."""
    i = np.arange(n) + 0.5
    z = 1.0 - i / n
    r = np.sqrt(1.0 - z * z)
    phi = np.pi * (3.0 - np.sqrt(5.0)) * i
    pts = np.column_stack([r * np.cos(phi), r * np.sin(phi), z])
    pts.setflags(write=False)
    return pts


def unit(v):
    v = np.asarray(v, dtype=float)
    return v / np.linalg.norm(v)


def canonical_sign(n):
    """Representative of {n, -n}: n3 >= 0, then n1 >= 0, then n2 >= 0."""
    n = np.array(n, dtype=float)
    for k in (2, 0, 1):
        if abs(n[k]) > 1e-15:
            return n if n[k] > 0 else -n
    return n


def angles(n):
    """(theta, phi) of a unit vector, theta in [0, pi], phi in [0, 2 pi)."""
    theta = float(np.arccos(np.clip(n[2], -1.0, 1.0)))
    phi = float(np.arctan2(n[1], n[0])) % (2 * np.pi)
    return theta, phi


def direction(theta, phi):
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def tangent_basis(n):
    """Two unit vectors completing ``n`` to an orthonormal frame."""
    a = np.array([1.0, 0.0, 0.0]) if abs(n[0]) < 0.9 else np.array([0.0, 1.0, 0.0])
    e1 = a - np.dot(a, n) * n
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(n, e1)
    return e1, e2


def _chart(n0):
    e1, e2 = tangent_basis(n0)

    def to_sphere(u):
        v = n0 + u[0] * e1 + u[1] * e2
        return v / math.sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2])

    return to_sphere


def refine(f, n0, step=0.05, maxiter=NM_MAXITER, xatol=NM_XATOL, fatol=1e-15):
    """Minimise ``f`` near ``n0`` with Nelder-Mead in tangent coordinates.

    Returns ``(n, f(n))``.
    """
    to_sphere = _chart(np.asarray(n0, dtype=float))
    simplex = np.array([[0.0, 0.0], [step, 0.0], [0.0, step]])
    res = minimize(lambda u: f(to_sphere(u)), np.zeros(2), method="Nelder-Mead",
                   options={"initial_simplex": simplex, "xatol": xatol,
                            "fatol": fatol, "maxiter": maxiter})
    n = to_sphere(res.x)
    return n, float(f(n))


def pick_seeds(points, values, k=N_SEEDS, separation=SEED_SEPARATION):
    """Indices of the ``k`` lowest values whose directions are mutually apart."""
    order = np.argsort(values, kind="stable")
    cos_sep = np.cos(separation)
    kept = []
    for idx in order:
        p = points[idx]
        if all(abs(np.dot(p, points[j])) < cos_sep for j in kept):
            kept.append(idx)
            if len(kept) == k:
                break
    return kept


def minimize_on_sphere(f, f_batch, extra_seeds=(), n_seeds=N_SEEDS, grid=GRID_POINTS,
                       fine=True):
    """Global minimum of an even function on the unit sphere.

    Parameters
    ----------
    f : callable
        Scalar objective taking a unit 3-vector.
    f_batch : callable
        Vectorised objective taking an ``(N, 3)`` array.
    extra_seeds : iterable of 3-vectors
        Structurally motivated directions pooled with the lattice before the
        refinement starts are chosen.
    fine : bool
        Run the final tight Nelder-Mead pass. Callers with their own
        derivative-based polish can skip it.

    Returns
    -------
    n : ndarray
        Best direction found (sign-normalised).
    value : float
    grid_best : float
        Smallest objective value on the lattice; ``value <= grid_best`` holds.
    """
    lattice = fibonacci_hemisphere(grid)
    lattice_vals = f_batch(lattice)
    grid_best = float(np.min(lattice_vals))
    extras = [canonical_sign(unit(e)) for e in extra_seeds]
    if extras:
        pts = np.vstack([lattice, extras])
        vals = np.concatenate([lattice_vals, f_batch(np.array(extras))])
    else:
        pts, vals = lattice, lattice_vals
    coarse = [refine(f, pts[i], xatol=COARSE_XATOL, fatol=COARSE_FATOL)
              for i in pick_seeds(pts, vals, n_seeds)]
    best_n, best_v = min(coarse, key=lambda c: c[1])
    if fine:
        polished = []
        for n0, v0 in sorted(coarse, key=lambda c: c[1]):
            if v0 > best_v + NEAR_TIE or any(abs(n0 @ p) > 0.9999 for p in polished):
                continue
            polished.append(n0)
            n, v = refine(f, n0, step=1e-3)
            if v < best_v:
                best_n, best_v = n, v
    return canonical_sign(best_n), best_v, grid_best
