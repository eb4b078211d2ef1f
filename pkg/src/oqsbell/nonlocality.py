"""Two-body permutationally invariant Bell inequality on symmetric states.

The N-qubit symmetric state enters only through its two-qubit marginal, so
everything here works with 4x4 matrices in the ``|00>, |01>, |10>, |11>``
ordering (qubit 0 is the most significant bit, ``|1>`` is an excitation).
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.optimize import minimize
from scipy.special import comb

from .errors import InvalidDimensionError, NumericalError
from .symspin import n_qubits_of

TWO_PI = 2 * np.pi
IMAG_TOL = 1e-10
GRID_SIZE = 64
SIMPLEX_TOL = 1e-8

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
IDENTITY_2 = np.eye(2, dtype=complex)


@dataclass(frozen=True)
class MeasurementSettings:
    phi: float
    theta: float


@dataclass(frozen=True)
class BellReport:
    q_v: float
    settings: MeasurementSettings

    @property
    def is_nonlocal(self):
        return self.q_v < 0


@lru_cache(maxsize=None)
def _reduction_weights(n):
    # w[a, b, k] multiplies rho[k + a, k + b], a and b the Hamming weights
    k = np.arange(n - 1)
    w = np.zeros((3, 3, n - 1))
    for a in range(3):
        for b in range(3):
            w[a, b] = comb(n - 2, k) / np.sqrt(comb(n, k + a) * comb(n, k + b))
    return w


_HAMMING = np.array([0, 1, 1, 2])


def reduce_two_qubit(rho):
    """Two-qubit marginal of a symmetric N-qubit state given on the Dicke block."""
    n = n_qubits_of(rho)
    if n < 2:
        raise InvalidDimensionError("two-qubit reduction needs N >= 2")
    w = _reduction_weights(n)
    k = np.arange(n - 1)
    block = np.empty((3, 3), dtype=complex)
    for a in range(3):
        for b in range(3):
            block[a, b] = np.dot(w[a, b], rho[k + a, k + b])
    return block[np.ix_(_HAMMING, _HAMMING)]


def measurement_observable(angle):
    """``cos(angle) sigma_z + sin(angle) sigma_x``."""
    return np.cos(angle) * SIGMA_Z + np.sin(angle) * SIGMA_X


def bell_operator(n_qubits, settings):
    n = n_qubits
    if n < 2:
        raise InvalidDimensionError("Bell operator needs N >= 2")
    m0 = measurement_observable(settings.phi)
    m1 = measurement_observable(settings.theta)
    one = np.kron(IDENTITY_2, IDENTITY_2)
    local = np.kron(m0, IDENTITY_2) + np.kron(IDENTITY_2, m0)
    pair = np.kron(m0, m0) + np.kron(m1, m1) - np.kron(m0, m1) - np.kron(m1, m0)
    return 2 * n * one + (n / 2) * (-2 * local) + (n * (n - 1) / 2) * pair


def bell_value(rho, settings):
    """``tr[B_2 rho_2]`` for the symmetric state ``rho``; negative certifies non-locality."""
    n = n_qubits_of(rho)
    value = np.trace(bell_operator(n, settings) @ reduce_two_qubit(rho))
    if abs(value.imag) > IMAG_TOL:
        raise NumericalError(f"Bell value has imaginary residue {value.imag:.3e}")
    return float(value.real)


class _BellLandscape:
    """Bell value as a closed-form function of the two angles.

    Expanding the operator gives
    ``2N - 2N (cos(phi) z + sin(phi) x) + N(N-1)/2 u^T T u`` with
    ``u = (cos phi - cos theta, sin phi - sin theta)`` and ``T`` the
    symmetrised zz/zx/xx correlation matrix of the marginal.
    """

    def __init__(self, rho2, n):
        self.n = n
        ev = lambda op: np.real(np.trace(op @ rho2))
        self.z = 0.5 * (ev(np.kron(SIGMA_Z, IDENTITY_2)) + ev(np.kron(IDENTITY_2, SIGMA_Z)))
        self.x = 0.5 * (ev(np.kron(SIGMA_X, IDENTITY_2)) + ev(np.kron(IDENTITY_2, SIGMA_X)))
        self.tzz = ev(np.kron(SIGMA_Z, SIGMA_Z))
        self.txx = ev(np.kron(SIGMA_X, SIGMA_X))
        self.tzx = 0.5 * (ev(np.kron(SIGMA_Z, SIGMA_X)) + ev(np.kron(SIGMA_X, SIGMA_Z)))

    def __call__(self, phi, theta):
        n = self.n
        uz = np.cos(phi) - np.cos(theta)
        ux = np.sin(phi) - np.sin(theta)
        quad = self.tzz * uz**2 + 2 * self.tzx * uz * ux + self.txx * ux**2
        return 2 * n - 2 * n * (np.cos(phi) * self.z + np.sin(phi) * self.x) + n * (n - 1) / 2 * quad


def optimize_violation(rho, grid_size=GRID_SIZE, simplex_tol=SIMPLEX_TOL):
    """Minimise the Bell value over equal settings ``(phi, theta)``.

    A uniform ``grid_size x grid_size`` scan of ``[0, 2pi)^2`` is refined by
    Nelder-Mead from the best grid point.  Global optimality is not
    guaranteed; the result is deterministic for a given state.
    """
    n = n_qubits_of(rho)
    if n < 2:
        raise InvalidDimensionError("Bell optimisation needs N >= 2")
    landscape = _BellLandscape(reduce_two_qubit(rho), n)
    angles = np.arange(grid_size) * (TWO_PI / grid_size)
    values = landscape(angles[:, None], angles[None, :])
    # argmin returns the first hit in row-major order: ties go to smallest (phi, theta)
    i, j = np.unravel_index(np.argmin(values), values.shape)
    start = np.array([angles[i], angles[j]])
    best_val = values[i, j]

    res = minimize(lambda a: landscape(a[0], a[1]), start, method="Nelder-Mead",
                   options={"xatol": simplex_tol, "fatol": 1e-14, "maxiter": 4000,
                            "initial_simplex": start + np.array([[0, 0], [0.05, 0], [0, 0.05]])})
    if res.fun < best_val:
        phi, theta = np.mod(res.x, TWO_PI)
    else:
        phi, theta = start
    settings = MeasurementSettings(float(phi), float(theta))
    return BellReport(bell_value(rho, settings), settings)
