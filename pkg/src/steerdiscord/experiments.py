"""Data generators behind the command-line experiments.

Each function returns plain rows (lists of floats/strings) plus a summary
dict; writing CSV is left to :mod:`steerdiscord.cli`.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .correlations import (conditional_entropy_batch, correlation_report,
                           discord, q_star, two_param_discord_closed_form,
                           two_param_state)
from .errors import OutOfDomain
from .sampling import Category, sample_one
from .state import BlochState
from .steering import DistanceKernel, d_squared_batch

MISMATCH_TOL = 1e-6
BOUND_TOL = 1e-9

SURFACE_HEADER = ("theta", "phi", "conditional_entropy", "D2")
SCATTER_HEADER = ("Q", "Qstar", "branch", "abs_err", "rel_err")
TWOPARAM_HEADER = ("a", "Q_closed", "Q_numeric", "Qstar")


def bell_diagonal(t):
    return BlochState(np.zeros(3), np.zeros(3), np.diag(t))


def surface(t, grid_n):
    """Conditional entropy and squared distance over a (theta, phi) grid.

    ``grid_n`` values of theta in [0, pi] (endpoints included) times
    ``2 grid_n`` values of phi in [0, 2 pi).
    """
    s = bell_diagonal(t).check_physical()
    theta = np.linspace(0.0, np.pi, grid_n)
    phi = np.linspace(0.0, 2 * np.pi, 2 * grid_n, endpoint=False)
    TH, PH = np.meshgrid(theta, phi, indexing="ij")
    TH, PH = TH.ravel(), PH.ravel()
    pts = np.column_stack([np.sin(TH) * np.cos(PH), np.sin(TH) * np.sin(PH), np.cos(TH)])
    ce = conditional_entropy_batch(s, pts)
    d2 = d_squared_batch(DistanceKernel.from_state(s), pts)
    rows = np.column_stack([TH, PH, ce, d2])
    i_min, i_max = int(np.argmin(ce)), int(np.argmax(d2))
    summary = {
        "min_entropy": float(ce[i_min]), "argmin_entropy": pts[i_min],
        "max_D2": float(d2[i_max]), "argmax_D2": pts[i_max],
        "theta_argmax_D2": float(TH[i_max]), "phi_argmax_D2": float(PH[i_max]),
    }
    return rows, summary


def relative_error(q, qs):
    return abs(qs - q) / max(q, 1e-12)


def scatter_row(category, seed, index):
    s = sample_one(category, seed, index)
    rep = correlation_report(s)
    err = abs(rep.q_star - rep.discord)
    return [rep.discord, rep.q_star, str(rep.branch), err, relative_error(rep.discord, rep.q_star)]


def _scatter_task(args):
    return scatter_row(*args)


def scatter(category, count, seed, workers=1):
    """Discord vs. its bound for ``count`` states of ``category``.

    Rows come back in sample order whatever the number of workers.
    """
    category = Category(category)
    tasks = [(category, seed, i) for i in range(count)]
    if workers > 1:
        with ProcessPoolExecutor(workers) as ex:
            rows = list(ex.map(_scatter_task, tasks, chunksize=max(1, count // (4 * workers))))
    else:
        rows = [_scatter_task(t) for t in tasks]
    q = np.array([r[0] for r in rows])
    qs = np.array([r[1] for r in rows])
    summary = {
        "count": count,
        "max_abs_err": float(max(r[3] for r in rows)),
        "max_rel_err": float(max(r[4] for r in rows)),
        "bound_fraction": float(np.mean(q <= qs + BOUND_TOL)),
        "on_bisector": int(np.sum(np.abs(qs - q) <= MISMATCH_TOL)),
        "above_bisector": int(np.sum(qs - q > MISMATCH_TOL)),
    }
    return rows, summary


def longest_run(mask):
    """(start, stop) indices of the longest run of True, or None."""
    best, start = None, None
    for i, m in enumerate(list(mask) + [False]):
        if m and start is None:
            start = i
        elif not m and start is not None:
            if best is None or i - start > best[1] - best[0]:
                best = (start, i)
            start = None
    return best


def twoparam(b, steps):
    """Sweep ``a`` over the admissible range for fixed ``b``.

    Returns rows ``(a, Q_closed, Q_numeric, Qstar)`` and a summary with the
    longest contiguous run of samples where ``|Q - Q*| > 1e-6``.
    """
    if not abs(b) < 1:
        raise OutOfDomain(f"|b| must be < 1, got {b}")
    a_vals = np.linspace(0.0, 1.0 - abs(b), steps)
    rows = []
    for a in a_vals:
        s = two_param_state(a, b)
        rows.append([float(a), two_param_discord_closed_form(a, b), discord(s)[0], q_star(s)[0]])
    r = np.array(rows)
    run = longest_run(np.abs(r[:, 3] - r[:, 1]) > MISMATCH_TOL)
    summary = {
        "b": b,
        "max_closed_vs_numeric": float(np.max(np.abs(r[:, 1] - r[:, 2]))),
        "max_qstar_vs_q": float(np.max(np.abs(r[:, 3] - r[:, 1]))),
        "mismatch_interval": None if run is None else (float(r[run[0], 0]), float(r[run[1] - 1, 0])),
    }
    summary["mismatch_width"] = (0.0 if run is None
                                 else summary["mismatch_interval"][1] - summary["mismatch_interval"][0])
    return rows, summary
