"""Two-qubit states in density-matrix and Bloch (x, y, T) form.

Conventions: Pauli ordering (X, Y, Z), tensor order Alice (x) Bob, all
entropies in bits.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path

import numpy as np
from scipy.special import entr

from .errors import InvalidState, NonPhysical, SingularFilter, SteeringError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-12
PSD_TOL = 1e-10
EIG_CLAMP_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (SX, SY, SZ)

# sigma_i (x) 1, 1 (x) sigma_j, sigma_i (x) sigma_j
_PA = np.array([np.kron(s, I2) for s in PAULI])
_PB = np.array([np.kron(I2, s) for s in PAULI])
_PAB = np.array([[np.kron(si, sj) for sj in PAULI] for si in PAULI])


class StateFileError(SteeringError, ValueError):
    """A state file could not be parsed into a two-qubit state."""


def _readonly(a):
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BlochState:
    """Two-qubit state as Alice/Bob coherence vectors and correlation matrix.

    ``rho = 1/4 (1(x)1 + x.sigma(x)1 + 1(x)y.sigma + sum_ij T_ij sigma_i(x)sigma_j)``

    Construction does not check physicality; use :func:`to_density_matrix`
    or :meth:`check_physical` for that.
    """

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    def __post_init__(self):
        x, y, T = _readonly(self.x), _readonly(self.y), _readonly(self.T)
        if x.shape != (3,) or y.shape != (3,) or T.shape != (3, 3):
            raise InvalidState("shape", 0.0, "x, y must be 3-vectors and T a 3x3 matrix")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "T", T)

    @cached_property
    def rho(self):
        """Assembled 4x4 density matrix (no physicality check)."""
        m = np.eye(4, dtype=complex)
        m += np.tensordot(self.x, _PA, axes=1)
        m += np.tensordot(self.y, _PB, axes=1)
        m += np.tensordot(self.T, _PAB, axes=2)
        return m / 4.0

    @cached_property
    def eigenvalues(self):
        """Eigenvalues of rho, descending and clamped (see eigenvalues_hermitian)."""
        return eigenvalues_hermitian(self.rho)

    @property
    def min_eigenvalue(self):
        return float(np.linalg.eigvalsh(self.rho)[0])

    def check_physical(self, tol=PSD_TOL):
        lam = self.min_eigenvalue
        if lam < -tol:
            raise NonPhysical(lam)
        return self

    def is_physical(self, tol=PSD_TOL):
        return self.min_eigenvalue >= -tol

    def to_dict(self):
        return {"x": self.x.tolist(), "y": self.y.tolist(), "T": self.T.tolist()}

    def __repr__(self):
        return (f"BlochState(x={self.x.tolist()}, y={self.y.tolist()}, "
                f"T={self.T.tolist()})")


@dataclass(frozen=True)
class SingleQubitState:
    """Qubit state given by its Bloch vector."""

    bloch: np.ndarray = field(default_factory=lambda: np.zeros(3))

    def __post_init__(self):
        b = _readonly(self.bloch)
        if np.linalg.norm(b) > 1 + 1e-12:
            raise NonPhysical(1 - np.linalg.norm(b), "Bloch vector longer than 1")
        object.__setattr__(self, "bloch", b)

    @property
    def eigenvalues(self):
        r = min(float(np.linalg.norm(self.bloch)), 1.0)
        return np.array([(1 + r) / 2, (1 - r) / 2])

    @property
    def rho(self):
        return 0.5 * (I2 + np.tensordot(self.bloch, np.array(PAULI), axes=1))

    def entropy(self):
        return von_neumann_entropy(self.eigenvalues)


def validate_density_matrix(m):
    """Check a 4x4 density matrix and return it as a Hermitian complex array.

    Raises
    ------
    InvalidState
        Naming the violated invariant (shape, hermitian, unit_trace) and the
        size of the violation.
    NonPhysical
        If the smallest eigenvalue is below ``-1e-10``.
    """
    m = np.asarray(m, dtype=complex)
    if m.shape != (4, 4):
        raise InvalidState("shape", 0.0, f"expected a 4x4 matrix, got shape {m.shape}")
    asym = float(np.max(np.abs(m - m.conj().T)))
    if asym > HERMITIAN_TOL:
        raise InvalidState("hermitian", asym)
    tr_err = abs(np.trace(m) - 1)
    if tr_err > TRACE_TOL:
        raise InvalidState("unit_trace", tr_err)
    m = 0.5 * (m + m.conj().T)
    lam = float(np.linalg.eigvalsh(m)[0])
    if lam < -PSD_TOL:
        raise NonPhysical(lam)
    return m


def _bloch_components(m):
    x = np.real(np.einsum("kij,ji->k", _PA, m))
    y = np.real(np.einsum("kij,ji->k", _PB, m))
    T = np.real(np.einsum("klij,ji->kl", _PAB, m))
    return x, y, T


def from_density_matrix(m):
    """Decompose a validated density matrix into its :class:`BlochState`.

    ``x_i = Tr[m sigma_i(x)1]``, ``y_j = Tr[m 1(x)sigma_j]``,
    ``T_ij = Tr[m sigma_i(x)sigma_j]``.
    """
    m = validate_density_matrix(m)
    return BlochState(*_bloch_components(m))


def to_density_matrix(s):
    """Assemble the 4x4 matrix of ``s``; raises NonPhysical if not PSD."""
    s.check_physical()
    return s.rho.copy()


def partial_trace(m, side):
    """Reduced state of the kept side (``"A"`` or ``"B"``)."""
    m = validate_density_matrix(m)
    r = m.reshape(2, 2, 2, 2)
    if side == "A":
        red = np.einsum("ijkj->ik", r)
    elif side == "B":
        red = np.einsum("ijil->jl", r)
    else:
        raise ValueError(f"side must be 'A' or 'B', got {side!r}")
    bloch = [np.real(np.trace(red @ s)) for s in PAULI]
    return SingleQubitState(np.array(bloch))


def eigenvalues_hermitian(m):
    """Eigenvalues of a Hermitian matrix, descending.

    Values within 1e-10 of 0 or 1 are clamped onto the boundary, so that
    rounding noise from sampling or filtering does not leak into entropies.
    """
    lam = np.linalg.eigvalsh(np.asarray(m))[::-1].copy()
    lam[(lam < 0) & (lam > -EIG_CLAMP_TOL)] = 0.0
    lam[(lam > 1) & (lam < 1 + EIG_CLAMP_TOL)] = 1.0
    return lam


def von_neumann_entropy(eigs):
    """Shannon entropy in bits of a probability vector (0 log 0 = 0).

    Tiny negative entries (rounding) are treated as zero.

    >>> von_neumann_entropy([0.5, 0.5])
    1.0
    """
    p = np.clip(np.asarray(eigs, dtype=float), 0.0, None)
    return float(np.sum(entr(p)) / np.log(2))


shannon_entropy = von_neumann_entropy


def binary_entropy(p):
    """h(p) = -p log2 p - (1-p) log2 (1-p); vectorised over ``p``."""
    p = np.clip(p, 0.0, 1.0)
    return (entr(p) + entr(1.0 - p)) / np.log(2)


def marginal_entropy(v):
    """Entropy of the qubit with Bloch vector ``v``."""
    r = min(float(np.linalg.norm(v)), 1.0)
    return float(binary_entropy((1 + r) / 2))


def to_canonical(s):
    """Apply Bob's local filter ``1 (x) (2 rho_B)^(-1/2)`` and return the result.

    The output has a maximally mixed Bob marginal (y = 0) and the same Alice
    steering ellipsoid as ``s``.

    Raises
    ------
    SingularFilter
        If ``|y| >= 1 - 1e-10``.
    """
    ny = float(np.linalg.norm(s.y))
    if ny >= 1 - 1e-10:
        raise SingularFilter(f"|y| = {ny:.12f}; Bob marginal is nearly pure")
    if ny == 0.0:
        return s
    rho_b = 0.5 * (I2 + np.tensordot(s.y, np.array(PAULI), axes=1))
    w, v = np.linalg.eigh(2 * rho_b)
    f = (v / np.sqrt(w)) @ v.conj().T
    F = np.kron(I2, f)
    m = F @ s.rho @ F
    m = 0.5 * (m + m.conj().T)
    m /= np.real(np.trace(m))
    x, _, T = _bloch_components(m)
    out = BlochState(x, np.zeros(3), T)
    out.check_physical()
    return out


# -- JSON state files -------------------------------------------------------

def _parse_complex(entry):
    if isinstance(entry, (int, float)):
        return complex(entry)
    if isinstance(entry, (list, tuple)) and len(entry) == 2:
        return complex(float(entry[0]), float(entry[1]))
    raise StateFileError(f"cannot read matrix entry {entry!r}; expected [re, im]")


def state_from_dict(d):
    """Build a validated BlochState from either accepted JSON shape.

    ``{"rho": [[[re, im], ...] x 4]}`` or ``{"x": [...], "y": [...], "T": [[...]]}``.
    """
    if not isinstance(d, dict):
        raise StateFileError("state JSON must be an object")
    if "rho" in d:
        try:
            m = np.array([[_parse_complex(e) for e in row] for row in d["rho"]])
        except TypeError as exc:
            raise StateFileError(f"malformed 'rho': {exc}") from exc
        if m.shape != (4, 4):
            raise StateFileError(f"'rho' must be 4x4, got shape {m.shape}")
        return from_density_matrix(m)
    if {"x", "y", "T"} <= d.keys():
        try:
            s = BlochState(d["x"], d["y"], d["T"])
        except (TypeError, ValueError) as exc:
            if isinstance(exc, InvalidState):
                raise StateFileError(str(exc)) from exc
            raise StateFileError(f"malformed Bloch triple: {exc}") from exc
        return s.check_physical()
    raise StateFileError("state JSON needs either 'rho' or all of 'x', 'y', 'T'")


def load_state(path):
    """Read a JSON state file (see :func:`state_from_dict`)."""
    try:
        d = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise StateFileError(f"cannot read {path}: {exc}") from exc
    return state_from_dict(d)
