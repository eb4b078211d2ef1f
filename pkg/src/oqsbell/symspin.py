"""Collective spin operators and reference states on the symmetric Dicke block.

All matrices are dense ``(N+1, N+1)`` complex arrays indexed by the Dicke
excitation number ``k = 0..N`` (number of qubits in ``|1>``).  The ``S_z``
eigenvalue of ``|D^N_k>`` is ``(N - 2k)/2``, so ``k = 0`` is the fully
polarised state along ``+z``.
"""

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy.special import comb

from .errors import InvalidDimensionError, NumericalError, PreconditionError

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10


class SpinOps(NamedTuple):
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    plus: np.ndarray
    minus: np.ndarray


def _check_n(n_qubits):
    if int(n_qubits) != n_qubits or n_qubits < 1:
        raise InvalidDimensionError(f"n_qubits must be a positive integer, got {n_qubits!r}")
    return int(n_qubits)


def n_qubits_of(matrix):
    """Number of qubits N for an operator on the (N+1)-dimensional block."""
    d = np.shape(matrix)[0]
    if d < 2 or np.shape(matrix) != (d, d):
        raise InvalidDimensionError(f"expected a square matrix of size >= 2, got shape {np.shape(matrix)}")
    return d - 1


def collective_spin_ops(n_qubits):
    """Return ``S_x, S_y, S_z, S_+, S_-`` on the spin-N/2 irrep.

    ``S_-|s,m> = sqrt(s(s+1) - m(m-1)) |s,m-1>`` with ``m = N/2 - k``, so
    ``S_-`` raises the excitation number by one.
    """
    n = _check_n(n_qubits)
    s = n / 2
    k = np.arange(n + 1)
    m = s - k
    sz = np.diag(m).astype(complex)
    # amplitude of |k+1><k|
    lower = np.sqrt(s * (s + 1) - m[:-1] * (m[:-1] - 1))
    sminus = np.zeros((n + 1, n + 1), dtype=complex)
    sminus[k[1:], k[:-1]] = lower
    splus = sminus.T.copy()
    sx = (splus + sminus) / 2
    sy = (splus - sminus) / 2j
    return SpinOps(sx, sy, sz, splus, sminus)


@dataclass(frozen=True)
class LMG:
    """``H = (J/N) S_z^2 - h S_x``."""

    n_qubits: int
    J: float = 1.0
    h: float = 0.0


@dataclass(frozen=True)
class SquaredZ:
    """``H = -omega S_z^2 + (omega N / 2)(N/2 + 1)``, the ``h = 0`` variant."""

    n_qubits: int
    omega: float = 1.0


def build_hamiltonian(spec):
    n = _check_n(spec.n_qubits)
    ops = collective_spin_ops(n)
    if isinstance(spec, LMG):
        return (spec.J / n) * ops.z @ ops.z - spec.h * ops.x
    if isinstance(spec, SquaredZ):
        shift = spec.omega * n / 2 * (n / 2 + 1)
        return -spec.omega * ops.z @ ops.z + shift * np.eye(n + 1)
    raise TypeError(f"unknown Hamiltonian spec {spec!r}")


def energy_basis(hamiltonian):
    """Eigen-decomposition of ``H`` with a reproducible phase convention.

    Eigenvalues ascend; each eigenvector (a column of the returned matrix) is
    rotated so that its largest-magnitude component is real and positive.
    Magnitudes within ``1e-10`` of the largest count as ties, which go to the
    lowest Dicke index.
    """
    check_hermitian(hamiltonian)
    evals, evecs = np.linalg.eigh(hamiltonian)
    mags = np.abs(evecs)
    pivot = np.argmax(mags > mags.max(axis=0) - 1e-10, axis=0)
    cols = np.arange(evecs.shape[1])
    phase = evecs[pivot, cols] / mags[pivot, cols]
    return evals, evecs / phase


def _pure(vec):
    return np.outer(vec, vec.conj())


def dicke_state(n_qubits, k):
    n = _check_n(n_qubits)
    if not 0 <= k <= n:
        raise InvalidDimensionError(f"excitation number k={k} outside 0..{n}")
    rho = np.zeros((n + 1, n + 1), dtype=complex)
    rho[k, k] = 1.0
    return rho


def dicke_superposition(n_qubits, k1, k2):
    """Pure state ``(|D_k1> + |D_k2>)/sqrt(2)``."""
    n = _check_n(n_qubits)
    if not (0 <= k1 <= n and 0 <= k2 <= n) or k1 == k2:
        raise InvalidDimensionError(f"need distinct k1, k2 in 0..{n}, got {k1}, {k2}")
    vec = np.zeros(n + 1, dtype=complex)
    vec[[k1, k2]] = 1 / np.sqrt(2)
    return _pure(vec)


def gaussian_dicke_amplitudes(n_qubits, variance):
    n = _check_n(n_qubits)
    if not variance > 0:
        raise PreconditionError(f"variance must be positive, got {variance}")
    k = np.arange(n + 1)
    amps = np.exp(-((k - n / 2) ** 2) / (4 * variance))
    return amps / np.linalg.norm(amps)


def gaussian_dicke_state(n_qubits, variance):
    """Pure Gaussian superposition of Dicke states centred on ``k = N/2``.

    The amplitudes are normalised exactly instead of with the approximate
    ``(2 pi sigma^2)^(-1/4)`` prefactor.
    """
    return _pure(gaussian_dicke_amplitudes(n_qubits, variance).astype(complex))


def coherent_spin_state(n_qubits, polar, azimuth=0.0):
    """Spin coherent state with Bloch angles ``(polar, azimuth)``.

    ``polar = pi/2, azimuth = 0`` points along ``+x``.
    """
    n = _check_n(n_qubits)
    k = np.arange(n + 1)
    amps = (np.sqrt(comb(n, k)) * np.cos(polar / 2) ** (n - k)
            * (np.exp(1j * azimuth) * np.sin(polar / 2)) ** k)
    return _pure(amps / np.linalg.norm(amps))


def gibbs_state(hamiltonian, beta):
    if beta < 0:
        raise PreconditionError(f"inverse temperature must be >= 0, got {beta}")
    check_hermitian(hamiltonian)
    evals, evecs = np.linalg.eigh(hamiltonian)
    weights = np.exp(-beta * (evals - evals[0]))
    weights /= weights.sum()
    rho = (evecs * weights) @ evecs.conj().T
    return (rho + rho.conj().T) / 2


def maximally_mixed(n_qubits):
    n = _check_n(n_qubits)
    return np.eye(n + 1, dtype=complex) / (n + 1)


def check_hermitian(op, tol=HERMITIAN_TOL):
    op = np.asarray(op)
    if op.ndim != 2 or op.shape[0] != op.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {op.shape}")
    dev = np.max(np.abs(op - op.conj().T)) if op.size else 0.0
    if dev > tol * max(1.0, np.max(np.abs(op))):
        raise PreconditionError(f"operator is not Hermitian (max deviation {dev:.3e})")


def check_state(rho, herm_tol=HERMITIAN_TOL, trace_tol=TRACE_TOL, psd_tol=PSD_TOL):
    """Raise :class:`NumericalError` unless ``rho`` is a valid density matrix."""
    rho = np.asarray(rho)
    if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
        raise InvalidDimensionError(f"expected a square matrix, got shape {rho.shape}")
    herm = np.max(np.abs(rho - rho.conj().T))
    if herm > herm_tol:
        raise NumericalError(f"state not Hermitian (max deviation {herm:.3e})")
    tr = np.trace(rho)
    if abs(tr - 1) > trace_tol:
        raise NumericalError(f"state trace is {tr}, expected 1")
    lam_min = np.linalg.eigvalsh((rho + rho.conj().T) / 2)[0]
    if lam_min < -psd_tol:
        raise NumericalError(f"state has negative eigenvalue {lam_min:.3e}")
    return rho


def expect(op, rho):
    return np.trace(op @ rho)


def trace_distance(rho, sigma):
    """``1/2 ||rho - sigma||_1`` for Hermitian arguments."""
    diff = rho - sigma
    return 0.5 * np.sum(np.abs(np.linalg.eigvalsh((diff + diff.conj().T) / 2)))


def purity(rho):
    return float(np.real(np.trace(rho @ rho)))
