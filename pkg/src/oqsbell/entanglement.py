"""Entanglement witnesses: two-qubit concurrence and collective spin squeezing."""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import NumericalError
from .nonlocality import reduce_two_qubit
from .symspin import collective_spin_ops, n_qubits_of

_SIGMA_Y = np.array([[0, -1j], [1j, 0]])
_YY = np.kron(_SIGMA_Y, _SIGMA_Y)

EIGEN_TOL = 1e-10
# eigenvalues of rho * rho_tilde below this fraction of the largest are rounding noise
NOISE_FLOOR = 1e-14
MEAN_SPIN_TOL = 1e-12


def concurrence(rho2):
    """Wootters concurrence of a two-qubit density matrix.

    Uses the square roots of the eigenvalues of ``rho2 @ rho2_tilde``.  The
    square root amplifies rounding noise on exact zeros (every symmetric
    marginal has one on the singlet), so eigenvalues below ``NOISE_FLOOR``
    times the largest are set to zero.
    """
    rho2 = np.asarray(rho2)
    flipped = _YY @ rho2.conj() @ _YY
    lam = np.linalg.eigvals(rho2 @ flipped)
    if np.min(lam.real) < -EIGEN_TOL:
        raise NumericalError(f"rho * rho_tilde has eigenvalue {np.min(lam.real):.3e} < 0")
    lam = lam.real
    lam[lam < NOISE_FLOOR * max(lam.max(), 0.0)] = 0.0
    roots = np.sort(np.sqrt(lam))[::-1]
    return float(min(1.0, max(0.0, roots[0] - roots[1] - roots[2] - roots[3])))


def spin_squeezing(rho):
    """``N Var(S_z) / (<S_x>^2 + <S_y>^2)``, or ``None`` if the mean transverse spin vanishes."""
    n = n_qubits_of(rho)
    ops = collective_spin_ops(n)
    ev = lambda op: np.real(np.trace(op @ rho))
    transverse = ev(ops.x) ** 2 + ev(ops.y) ** 2
    if transverse < MEAN_SPIN_TOL:
        return None
    var_z = ev(ops.z @ ops.z) - ev(ops.z) ** 2
    return float(n * var_z / transverse)


@dataclass(frozen=True)
class WitnessReport:
    concurrence: float
    spin_squeezing: Optional[float]

    @property
    def entangled_by_concurrence(self):
        return self.concurrence > 0

    @property
    def entangled_by_squeezing(self):
        return self.spin_squeezing is not None and self.spin_squeezing < 1


def witnesses(rho):
    return WitnessReport(concurrence(reduce_two_qubit(rho)), spin_squeezing(rho))


def partial_transpose_min_eig(rho2):
    """Smallest eigenvalue of the partial transpose on the second qubit."""
    t = np.asarray(rho2).reshape(2, 2, 2, 2).transpose(0, 3, 2, 1).reshape(4, 4)
    return float(np.linalg.eigvalsh((t + t.conj().T) / 2)[0])
