"""Lindblad generators on the Dicke block, steady states and time evolution.

Density matrices are vectorised column-major (``vec`` stacks columns), so
``vec(A rho B) = (B^T kron A) vec(rho)``.  Every generator is stored as a
Hamiltonian plus a list of ``(jump, rate)`` channels,

    L[rho] = -i[H, rho] + sum_k rate_k (J_k rho J_k^+ - 1/2 {J_k^+ J_k, rho}),

and the dense superoperator matrix is built once at construction.
"""

import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg
from scipy.integrate import solve_ivp

from .errors import (ConvergenceError, DegenerateSteadyStateError, InvalidDimensionError,
                     NumericalError, PreconditionError)
from .symspin import check_hermitian, collective_spin_ops, energy_basis, n_qubits_of

logger = logging.getLogger(__name__)

RESIDUAL_TOL = 1e-8
NULL_TOL = 1e-10
DRIFT_TOL = 1e-8
NEGATIVITY_TOL = 1e-8
EIG_COND_LIMIT = 1e8
RK_RTOL = 1e-9
SHORT_TIME_LIMIT = 0.1
COMMUTATOR_TOL = 1e-8


def vec(rho):
    return np.asarray(rho).reshape(-1, order="F")


def unvec(v, dim):
    return np.asarray(v).reshape(dim, dim, order="F")


class Liouvillian:
    """GKSL generator ``-i[H, .] + sum_k rate_k D[J_k]``.

    ``channels`` is a sequence of ``(jump, rate)`` pairs with ``rate >= 0``.
    """

    def __init__(self, hamiltonian, channels=()):
        hamiltonian = np.asarray(hamiltonian, dtype=complex)
        check_hermitian(hamiltonian)
        self.dim = hamiltonian.shape[0]
        checked = []
        for jump, rate in channels:
            jump = np.asarray(jump, dtype=complex)
            if jump.shape != hamiltonian.shape:
                raise InvalidDimensionError(
                    f"jump operator of shape {jump.shape} does not match Hamiltonian {hamiltonian.shape}")
            if rate < 0:
                raise PreconditionError(f"dissipation rate must be >= 0, got {rate}")
            checked.append((jump, float(rate)))
        self.hamiltonian = hamiltonian
        self.channels = tuple(checked)
        self.matrix = self._superoperator()
        self.matrix.setflags(write=False)

    @property
    def n_qubits(self):
        return self.dim - 1

    def _superoperator(self):
        d = self.dim
        eye = np.eye(d)
        h = self.hamiltonian
        sup = -1j * (np.kron(eye, h) - np.kron(h.T, eye))
        if not self.channels:
            return sup
        jumps = np.array([j for j, _ in self.channels])
        rates = np.array([r for _, r in self.channels])
        flat = jumps.reshape(len(rates), d * d)
        # sum_k rate_k kron(conj(J_k), J_k) as one matrix product
        sandwich = ((flat.conj() * rates[:, None]).T @ flat).reshape(d, d, d, d)
        sup += sandwich.transpose(0, 2, 1, 3).reshape(d * d, d * d)
        anti = np.einsum("k,kji,kjl->il", rates, jumps.conj(), jumps)
        sup -= 0.5 * (np.kron(eye, anti) + np.kron(anti.T, eye))
        return sup

    def __call__(self, rho):
        return unvec(self.matrix @ vec(rho), self.dim)

    def residual(self, rho):
        """Max-norm of ``L[rho]``."""
        return float(np.max(np.abs(self(rho))))


def jump_dissipator(hamiltonian, channels=()):
    return Liouvillian(hamiltonian, channels)


@dataclass(frozen=True)
class DaviesSpec:
    """Thermal bath coupled through ``coupling_operator`` (``S_y`` when None).

    ``secular_tol`` groups energies and Bohr frequencies; None means
    ``1e-9`` times the spectral range of the Hamiltonian.
    """

    beta: float
    gamma0: float = 0.01
    coupling_operator: Optional[np.ndarray] = None
    secular_tol: Optional[float] = None

    def __post_init__(self):
        if not self.beta > 0:
            raise PreconditionError(f"Davies generator needs beta > 0 (Ohmic zero-frequency rate diverges), got {self.beta}")
        if not self.gamma0 > 0:
            raise PreconditionError(f"gamma0 must be positive, got {self.gamma0}")


def ohmic_rate(omega, beta, gamma0):
    """Ohmic emission/absorption rate obeying detailed balance.

    ``gamma0 omega (1 + n_B(omega))`` for emission (``omega > 0``),
    ``gamma0 |omega| n_B(|omega|)`` for absorption and ``gamma0 / beta`` at zero.
    """
    if omega == 0:
        return gamma0 / beta
    x = beta * abs(omega)
    n_B = np.exp(-x) / -np.expm1(-x)  # no overflow at large x
    if omega > 0:
        return gamma0 * omega * (1 + n_B)
    return gamma0 * abs(omega) * n_B


def _cluster(values, tol):
    """Group sorted values into runs whose neighbours differ by at most tol."""
    groups = [[0]]
    for i in range(1, len(values)):
        if values[i] - values[i - 1] <= tol:
            groups[-1].append(i)
        else:
            groups.append([i])
    return groups


def bohr_decomposition(hamiltonian, operator, tol=None):
    """Split ``operator`` into Bohr-frequency components ``A(omega)``.

    Returns ``[(omega, A(omega)), ...]`` for ``omega >= 0`` with
    ``A(omega) = sum_{e' - e = omega} P(e) A P(e')``; the negative-frequency
    components of a Hermitian operator are the adjoints.
    """
    evals, evecs = np.linalg.eigh(hamiltonian)
    span = evals[-1] - evals[0]
    if tol is None:
        tol = 1e-9 * span if span > 0 else 1e-9
    levels = _cluster(evals, tol)
    energies = np.array([evals[g].mean() for g in levels])
    label = np.empty(len(evals), dtype=int)
    for i, g in enumerate(levels):
        label[g] = i
    a_energy = evecs.conj().T @ operator @ evecs

    pairs = [(l, lp) for l in range(len(levels)) for lp in range(l + 1, len(levels))]
    freqs = np.array([energies[lp] - energies[l] for l, lp in pairs])
    order = np.argsort(freqs, kind="stable")
    components = [(0.0, label[:, None] == label[None, :])]
    if len(pairs):
        for group in _cluster(freqs[order], tol):
            members = [pairs[order[i]] for i in group]
            mask = np.zeros(a_energy.shape, dtype=bool)
            for l, lp in members:
                mask[np.ix_(label == l, label == lp)] = True
            components.append((float(np.mean(freqs[order[group]])), mask))
    out = []
    for omega, mask in components:
        comp = evecs @ np.where(mask, a_energy, 0) @ evecs.conj().T
        if np.max(np.abs(comp)) > 0:
            out.append((omega, comp))
    return out


def davies_generator(hamiltonian, spec):
    """Secular weak-coupling generator for an Ohmic bosonic bath.

    The Gibbs state of ``hamiltonian`` at ``spec.beta`` is stationary.  The
    Lamb-shift correction is not included.
    """
    hamiltonian = np.asarray(hamiltonian, dtype=complex)
    check_hermitian(hamiltonian)
    coupling = spec.coupling_operator
    if coupling is None:
        coupling = collective_spin_ops(n_qubits_of(hamiltonian)).y
    check_hermitian(coupling)
    channels = []
    for omega, comp in bohr_decomposition(hamiltonian, coupling, spec.secular_tol):
        channels.append((comp, ohmic_rate(omega, spec.beta, spec.gamma0)))
        if omega > 0:
            channels.append((comp.conj().T, ohmic_rate(-omega, spec.beta, spec.gamma0)))
    logger.debug("Davies generator: %d channels, beta=%g", len(channels), spec.beta)
    return Liouvillian(hamiltonian, channels)


def rotated_ladder_jump(hamiltonian, zeta):
    """``cos(zeta) S+ + sin(zeta) S-`` with the ladders acting on energy eigenstates.

    The ladder operators are transported to the eigenbasis of ``hamiltonian``
    (ascending energies, phase convention of :func:`energy_basis`), so
    ``S+`` moves the ``j``-th eigenstate to the ``(j-1)``-th and annihilates
    the ground state.
    """
    _, u = energy_basis(hamiltonian)
    ops = collective_spin_ops(n_qubits_of(hamiltonian))
    plus = u @ ops.plus @ u.conj().T
    minus = u @ ops.minus @ u.conj().T
    return np.cos(zeta) * plus + np.sin(zeta) * minus


@dataclass(frozen=True)
class MeasurementSpec:
    """Continuous measurement of ``observable`` (``S_z`` when None) at rate ``kappa``."""

    kappa: float
    observable: Optional[np.ndarray] = None
    degeneracy_tol: float = 1e-9

    def __post_init__(self):
        if self.kappa < 0:
            raise PreconditionError(f"measurement rate must be >= 0, got {self.kappa}")


def eigenprojectors(observable, rel_tol=1e-9):
    check_hermitian(observable)
    evals, evecs = np.linalg.eigh(observable)
    span = evals[-1] - evals[0]
    tol = rel_tol * span if span > 0 else rel_tol
    return [evecs[:, g] @ evecs[:, g].conj().T for g in _cluster(evals, tol)]


def _measurement_projectors(dim, spec):
    observable = spec.observable
    if observable is None:
        observable = collective_spin_ops(dim - 1).z
    return eigenprojectors(observable, spec.degeneracy_tol)


def measurement_dephasing(hamiltonian, spec):
    """``-i[H, rho] + kappa (sum_k P_k rho P_k - rho)``.

    Because the projectors resolve the identity, the dephasing term is a
    GKSL dissipator with jumps ``P_k`` at rate ``kappa``.
    """
    hamiltonian = np.asarray(hamiltonian, dtype=complex)
    projectors = _measurement_projectors(hamiltonian.shape[0], spec)
    if spec.kappa == 0:
        return Liouvillian(hamiltonian)
    return Liouvillian(hamiltonian, [(p, spec.kappa) for p in projectors])


def _hermitize_normalize(rho):
    rho = (rho + rho.conj().T) / 2
    tr = np.trace(rho).real
    return rho / tr, tr


def steady_state(liouvillian, reference=None, null_tol=NULL_TOL, residual_tol=RESIDUAL_TOL):
    """Stationary state of ``liouvillian`` from a dense eigendecomposition.

    If the null space is degenerate a :class:`DegenerateSteadyStateError` is
    raised, unless ``reference`` is given: then the state returned is the
    spectral projection of ``reference`` onto the null space, i.e. the
    long-time limit reached from ``reference``.
    """
    d = liouvillian.dim
    mat = liouvillian.matrix
    evals, left, right = scipy.linalg.eig(mat, left=True, right=True)
    order = np.argsort(np.abs(evals), kind="stable")
    scale = max(1.0, float(np.max(np.abs(evals))))
    null = order[np.abs(evals[order]) < null_tol * scale]
    if len(null) == 0:
        null = order[:1]
    if len(null) > 1:
        if reference is None:
            raise DegenerateSteadyStateError(len(null), evals[null])
        r = right[:, null]
        l_h = left[:, null].conj().T
        v = r @ np.linalg.solve(l_h @ r, l_h @ vec(reference))
    else:
        v = right[:, null[0]]
    rho = unvec(v, d)
    tr = np.trace(rho)
    if abs(tr) < 1e-14:
        raise ConvergenceError("null vector of the Liouvillian is traceless")
    rho, _ = _hermitize_normalize(rho / tr)
    res = liouvillian.residual(rho)
    if res > residual_tol:
        raise ConvergenceError(f"steady-state residual {res:.3e} exceeds {residual_tol:.1e}")
    return rho


def null_space_dimension(liouvillian, null_tol=NULL_TOL):
    evals = np.linalg.eigvals(liouvillian.matrix)
    scale = max(1.0, float(np.max(np.abs(evals))))
    return int(np.sum(np.abs(evals) < null_tol * scale))


def _finish(rho, t):
    rho, tr = _hermitize_normalize(rho)
    drift = abs(tr - 1)
    if drift > DRIFT_TOL:
        raise NumericalError(f"trace drifted to {tr:.12g} at t={t}")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -NEGATIVITY_TOL:
        raise NumericalError(f"evolved state has eigenvalue {lam_min:.3e} at t={t}")
    return rho, drift


def _check_times(times):
    times = np.asarray(times, dtype=float)
    if times.ndim != 1:
        raise PreconditionError("times must be a 1-d sequence")
    if len(times) and (times[0] < 0 or np.any(np.diff(times) < 0)):
        raise PreconditionError("times must be non-negative and ascending")
    return times


def _evolve_eig(mat, v0, times):
    evals, right = np.linalg.eig(mat)
    if np.linalg.cond(right) > EIG_COND_LIMIT:
        return None
    coeff = np.linalg.solve(right, v0)
    # t = 0 returns the input exactly rather than V V^-1 v0
    return [v0 if t == 0 else right @ (np.exp(evals * t) * coeff) for t in times]


def _evolve_expm(mat, v0, times):
    out, v, t_prev = [], v0, 0.0
    for t in times:
        if t > t_prev:
            v = scipy.linalg.expm(mat * (t - t_prev)) @ v
        out.append(v)
        t_prev = t
    return out


def _evolve_rk(mat, v0, times, rtol):
    if len(times) == 0:
        return []
    sol = solve_ivp(lambda _, y: mat @ y, (0.0, times[-1]), v0, method="DOP853",
                    t_eval=times, rtol=rtol, atol=rtol * 1e-3)
    if not sol.success:
        raise ConvergenceError(f"adaptive integration failed: {sol.message}")
    return list(sol.y.T)


def evolve(liouvillian, rho0, times, method="eig", rtol=RK_RTOL, return_drift=False):
    """States ``exp(L t)[rho0]`` at each of ``times``.

    ``method`` is ``"eig"`` (diagonalise the superoperator, falling back to
    ``"expm"`` when its eigenvectors are ill-conditioned), ``"expm"`` or
    ``"rk"`` (adaptive DOP853 at relative tolerance ``rtol``).  Each state is
    hermitised and renormalised; with ``return_drift`` the pre-normalisation
    trace errors are returned as a second list.
    """
    times = _check_times(times)
    d = liouvillian.dim
    if np.shape(rho0) != (d, d):
        raise InvalidDimensionError(f"state shape {np.shape(rho0)} does not match generator dimension {d}")
    v0 = vec(np.asarray(rho0, dtype=complex))
    mat = liouvillian.matrix
    if method == "eig":
        vs = _evolve_eig(mat, v0, times)
        if vs is None:
            logger.info("superoperator eigenbasis ill-conditioned; using matrix exponential")
            vs = _evolve_expm(mat, v0, times)
    elif method == "expm":
        vs = _evolve_expm(mat, v0, times)
    elif method == "rk":
        vs = _evolve_rk(mat, v0, times, rtol)
    else:
        raise ValueError(f"unknown evolution method {method!r}")
    finished = [_finish(unvec(v, d), t) for v, t in zip(vs, times)]
    states = [rho for rho, _ in finished]
    if return_drift:
        return states, [float(drift) for _, drift in finished]
    return states


def dephase(rho, spec):
    """``sum_k P_k rho P_k`` for the eigenprojectors of the measured observable."""
    return sum(p @ rho @ p for p in _measurement_projectors(np.shape(rho)[0], spec))


def short_time_mixture(rho0, spec, t, hamiltonian):
    """First-order approximant ``(1 - p) rho0 + p sum_k P_k rho0 P_k`` with ``p = kappa t``.

    Valid only for ``[H, rho0] = 0`` and ``kappa t <= 0.1``.
    """
    rho0 = np.asarray(rho0, dtype=complex)
    comm = np.max(np.abs(hamiltonian @ rho0 - rho0 @ hamiltonian))
    if comm > COMMUTATOR_TOL:
        raise PreconditionError(f"initial state does not commute with H (||[H, rho0]|| = {comm:.3e})")
    p = spec.kappa * t
    if t < 0 or p > SHORT_TIME_LIMIT:
        raise PreconditionError(f"short-time expansion needs 0 <= kappa t <= {SHORT_TIME_LIMIT}, got {p}")
    if p == 0:
        return rho0.copy()
    return (1 - p) * rho0 + p * dephase(rho0, spec)


def relaxation_rate(liouvillian, null_tol=NULL_TOL):
    """Smallest non-zero decay rate ``-Re(lambda)`` of the generator."""
    evals = np.linalg.eigvals(liouvillian.matrix)
    scale = max(1.0, float(np.max(np.abs(evals))))
    decay = -evals.real[np.abs(evals) >= null_tol * scale]
    decay = decay[decay > 0]
    return float(decay.min()) if len(decay) else 0.0
