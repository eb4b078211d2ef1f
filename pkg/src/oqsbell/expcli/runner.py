"""Sweep execution: steady-state phase diagrams, trajectories, measurement attacks."""

import copy
import itertools
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from threadpoolctl import threadpool_limits

from .. import __version__
from ..entanglement import spin_squeezing, concurrence
from ..errors import DegenerateSteadyStateError, OQSBellError
from ..liouville import (COMMUTATOR_TOL, DRIFT_TOL, RESIDUAL_TOL, SHORT_TIME_LIMIT, DaviesSpec,
                         MeasurementSpec, davies_generator, evolve, jump_dissipator,
                         measurement_dephasing, rotated_ladder_jump, short_time_mixture,
                         steady_state)
from ..nonlocality import GRID_SIZE, SIMPLEX_TOL, optimize_violation, reduce_two_qubit
from ..symspin import (LMG, SquaredZ, build_hamiltonian, check_state, collective_spin_ops,
                       dicke_state, dicke_superposition, gaussian_dicke_state, gibbs_state)
from .config import resolve_axis_target

logger = logging.getLogger(__name__)

THREADS_ENV = "OQSBELL_THREADS"
SURVIVAL_TOL = 1e-9
METRIC_COLUMNS = ["q_v", "phi_star", "theta_star", "concurrence", "xi2", "xi2_defined",
                  "residual", "status"]


@dataclass
class SweepResult:
    metadata: dict
    columns: list
    rows: list = field(default_factory=list)

    @property
    def all_ok(self):
        return all(not str(r["status"]).startswith("failed") for r in self.rows)

    def to_dict(self):
        return {"metadata": self.metadata, "columns": list(self.columns), "rows": self.rows}

    @classmethod
    def from_dict(cls, data):
        return cls(metadata=data["metadata"], columns=list(data["columns"]), rows=list(data["rows"]))


def resolve_threads(threads=None):
    env = os.environ.get(THREADS_ENV)
    if env:
        try:
            threads = int(env)
        except ValueError:
            logger.warning("ignoring non-integer %s=%r", THREADS_ENV, env)
    return max(1, int(threads or 1))


def _map(fn, items, threads):
    # single-threaded BLAS keeps results bit-identical across pool widths
    with threadpool_limits(limits=1):
        if threads <= 1 or len(items) <= 1:
            return [fn(item) for item in items]
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(fn, items))


# -- building library objects from config sections ---------------------------

def _spin_operator(name, n):
    return getattr(collective_spin_ops(n), {"splus": "plus", "sminus": "minus"}.get(name, name[1:]))


def _scale(value, n):
    if isinstance(value, str):
        table = {"1/sqrt(N)": 1 / np.sqrt(n), "1/N": 1 / n, "1": 1.0}
        if value not in table:
            raise OQSBellError(f"unknown jump scale {value!r}; use a number or one of {sorted(table)}")
        return table[value]
    return float(value)


def hamiltonian_from(section, n):
    if section["model"] == "lmg":
        return build_hamiltonian(LMG(n, float(section["J"]), float(section["h"])))
    return build_hamiltonian(SquaredZ(n, float(section["omega"])))


def generator_from(section, hamiltonian, n):
    """Return ``(liouvillian, reference)``; ``reference`` resolves a degenerate null space."""
    kind = section["kind"]
    if kind == "davies":
        beta = float(section["beta"])
        spec = DaviesSpec(beta=beta, gamma0=float(section["gamma0"]),
                          coupling_operator=_spin_operator(section["coupling"], n),
                          secular_tol=section["secular_tol"])
        return davies_generator(hamiltonian, spec), gibbs_state(hamiltonian, beta)
    if kind == "rotated_ladder":
        jump = rotated_ladder_jump(hamiltonian, float(section["zeta"]))
        return jump_dissipator(hamiltonian, [(jump, float(section["gamma"]))]), None
    if kind == "jump":
        jump = _scale(section["scale"], n) * _spin_operator(section["operator"], n)
        return jump_dissipator(hamiltonian, [(jump, float(section["gamma"]))]), None
    spec = MeasurementSpec(kappa=float(section["kappa"]),
                           observable=_spin_operator(section["observable"], n))
    return measurement_dephasing(hamiltonian, spec), None


def solve_steady(section, hamiltonian, n):
    """Steady state of a dissipator section: ``(rho, residual, status)``."""
    liouvillian, reference = generator_from(section, hamiltonian, n)
    status = "ok"
    try:
        rho = steady_state(liouvillian)
    except DegenerateSteadyStateError as exc:
        if reference is None:
            raise
        logger.info("degenerate null space (dimension %d); projecting the Gibbs state", exc.multiplicity)
        rho = steady_state(liouvillian, reference=reference)
        status = "degenerate"
    return rho, liouvillian.residual(rho), status


def initial_state_from(section, hamiltonian, n):
    """Initial state: ``(rho, status)``."""
    kind = section["kind"]
    if kind == "dicke":
        return dicke_state(n, int(section["k"])), "ok"
    if kind == "dicke_superposition":
        return dicke_superposition(n, int(section["k1"]), int(section["k2"])), "ok"
    if kind == "gaussian":
        return gaussian_dicke_state(n, float(section["variance"])), "ok"
    if kind == "thermal":
        return gibbs_state(hamiltonian, float(section["beta"])), "ok"
    if kind == "file":
        rho = np.load(section["path"]).astype(complex)
        if rho.shape != (n + 1, n + 1):
            raise OQSBellError(f"state in {section['path']} has shape {rho.shape}, expected {(n + 1, n + 1)}")
        return check_state(rho), "ok"
    rho, _, status = solve_steady(section["dissipator"], hamiltonian, n)
    return rho, status


# -- grid handling -----------------------------------------------------------

def grid_points(spec):
    """Row-major list of ``{axis name: value}`` dictionaries."""
    if not spec.axes:
        return [{}]
    values = [axis.values() for axis in spec.axes]
    names = [axis.name for axis in spec.axes]
    return [dict(zip(names, map(float, combo))) for combo in itertools.product(*values)]


def apply_point(spec, point):
    """Copies of the hamiltonian / dissipator / initial-state sections with axis overrides."""
    sections = {"hamiltonian": copy.deepcopy(spec.hamiltonian),
                "dissipator": copy.deepcopy(spec.dissipator),
                "initial_state": copy.deepcopy(spec.initial_state)}
    for name, value in point.items():
        section, fld = resolve_axis_target(spec, name)
        if section == "initial_state.dissipator":
            sections["initial_state"]["dissipator"][fld] = value
        else:
            sections[section][fld] = value
    return sections


def evaluate_state(rho):
    report = optimize_violation(rho)
    xi2 = spin_squeezing(rho)
    return {
        "q_v": report.q_v,
        "phi_star": report.settings.phi,
        "theta_star": report.settings.theta,
        "concurrence": concurrence(reduce_two_qubit(rho)),
        "xi2": xi2,
        "xi2_defined": xi2 is not None,
    }


def _failed(exc):
    row = {c: None for c in METRIC_COLUMNS}
    row["status"] = f"failed: {type(exc).__name__}: {exc}"
    return row


_CAUGHT = (OQSBellError, np.linalg.LinAlgError, ValueError)


def _metadata(spec, extra=None):
    meta = {
        "tool": "oqsbell",
        "version": __version__,
        "spec": spec.resolved(),
        "model_choices": {
            "bath_spectral_density": "ohmic",
            "davies_rates": "gamma0*w*(1+n_B(w)) emission, gamma0*|w|*n_B(|w|) absorption, gamma0/beta at w=0",
            "lamb_shift": "omitted",
            "davies_gamma0_default": 0.01,
            "rotated_ladder_gamma_default": 1.0,
            "degenerate_davies_null_space": "projection of the Gibbs state (status=degenerate)",
            "bell_settings": "equal settings for all parties, angles in the x-z plane",
        },
        "tolerances": {
            "steady_state_residual": RESIDUAL_TOL,
            "trace_drift": DRIFT_TOL,
            "short_time_commutator": COMMUTATOR_TOL,
            "short_time_max_p": SHORT_TIME_LIMIT,
        },
        "optimizer": {"grid": GRID_SIZE, "refinement": "nelder-mead", "simplex_diameter": SIMPLEX_TOL},
        "figure_transforms": {"concurrence_scaled_by": "n_qubits", "undefined_xi2_plotted_as": 1.0},
    }
    if extra:
        meta.update(extra)
    return meta


def _param_columns(spec, extra=()):
    return ["experiment"] + [a.name for a in spec.axes] + list(extra) + ["t"]


# -- experiments -----------------------------------------------------------------

def run_steady_phase_diagram(spec, threads=1):
    n = spec.n_qubits
    points = grid_points(spec)

    def work(point):
        sections = apply_point(spec, point)
        row = {"experiment": spec.experiment_id, **point, "t": None}
        try:
            h = hamiltonian_from(sections["hamiltonian"], n)
            rho, residual, status = solve_steady(sections["dissipator"], h, n)
            row.update(evaluate_state(rho), residual=residual, status=status)
        except _CAUGHT as exc:
            row.update(_failed(exc))
        return row

    rows = _map(work, points, resolve_threads(threads))
    return SweepResult(_metadata(spec), _param_columns(spec) + METRIC_COLUMNS, rows)


def run_trajectory(spec, threads=1):
    n = spec.n_qubits
    times = np.asarray(spec.times, dtype=float)

    def work(point):
        sections = apply_point(spec, point)
        base = {"experiment": spec.experiment_id, **point}
        try:
            h = hamiltonian_from(sections["hamiltonian"], n)
            liouvillian, _ = generator_from(sections["dissipator"], h, n)
            rho0, status = initial_state_from(sections["initial_state"], h, n)
            states, drifts = evolve(liouvillian, rho0, times, method=spec.evolution_method,
                                    return_drift=True)
        except _CAUGHT as exc:
            return [dict(base, t=float(t), **_failed(exc)) for t in times]
        rows = []
        for t, rho, drift in zip(times, states, drifts):
            row = dict(base, t=float(t))
            try:
                row.update(evaluate_state(rho), residual=drift, status=status)
            except _CAUGHT as exc:
                row.update(_failed(exc))
            rows.append(row)
        return rows

    blocks = _map(work, grid_points(spec), resolve_threads(threads))
    rows = [row for block in blocks for row in block]
    return SweepResult(_metadata(spec), _param_columns(spec) + METRIC_COLUMNS, rows)


def survival_p(rows, tol=SURVIVAL_TOL):
    """Smallest p after which every row has ``q_v >= -tol``; None if non-locality persists."""
    last_violation = None
    for i, row in enumerate(rows):
        if row["q_v"] is None or row["q_v"] < -tol:
            last_violation = i
    if last_violation is None:
        return rows[0]["p"] if rows else None
    if last_violation == len(rows) - 1:
        return None
    return rows[last_violation + 1]["p"]


def run_measurement_attack(spec, threads=1):
    n = spec.n_qubits
    p_values = np.asarray(spec.p_values, dtype=float)
    tasks = [(point, kappa) for point in grid_points(spec) for kappa in spec.kappas()]

    def work(task):
        point, kappa = task
        sections = apply_point(spec, point)
        section = dict(sections["dissipator"], kappa=kappa)
        base = {"experiment": spec.experiment_id, **point, "kappa": kappa}
        times = p_values / kappa
        try:
            h = hamiltonian_from(sections["hamiltonian"], n)
            rho0, status = initial_state_from(sections["initial_state"], h, n)
            liouvillian, _ = generator_from(section, h, n)
            states, drifts = evolve(liouvillian, rho0, times, method=spec.evolution_method,
                                    return_drift=True)
        except _CAUGHT as exc:
            return [dict(base, p=float(p), t=float(t), q_v_mixture=None, **_failed(exc))
                    for p, t in zip(p_values, times)]
        mspec = MeasurementSpec(kappa=kappa, observable=_spin_operator(section["observable"], n))
        commutes = np.max(np.abs(h @ rho0 - rho0 @ h)) <= COMMUTATOR_TOL
        rows = []
        for p, t, rho, drift in zip(p_values, times, states, drifts):
            row = dict(base, p=float(p), t=float(t))
            try:
                row.update(evaluate_state(rho), residual=drift, status=status)
                mix = None
                if commutes and p <= SHORT_TIME_LIMIT:
                    mix = optimize_violation(short_time_mixture(rho0, mspec, t, h)).q_v
                row["q_v_mixture"] = mix
            except _CAUGHT as exc:
                row.update(_failed(exc), q_v_mixture=None)
            rows.append(row)
        return rows

    blocks = _map(work, tasks, resolve_threads(threads))
    rows = [row for block in blocks for row in block]
    survival = []
    for (point, kappa), block in zip(tasks, blocks):
        survival.append({**point, "kappa": kappa, "p_survival": survival_p(block)})
    meta = _metadata(spec, {"survival": survival})
    columns = _param_columns(spec, extra=("kappa", "p")) + METRIC_COLUMNS + ["q_v_mixture"]
    return SweepResult(meta, columns, rows)


RUNNERS = {
    "steady": run_steady_phase_diagram,
    "trajectory": run_trajectory,
    "attack": run_measurement_attack,
}


def run(spec, threads=1):
    return RUNNERS[spec.experiment](spec, threads=threads)
