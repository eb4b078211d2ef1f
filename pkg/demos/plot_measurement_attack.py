"""
Repeated measurement of a non-local steady state
================================================

An eavesdropper measures ``S_z`` at rate ``kappa``.  Plotted against
``p = kappa t`` the curves for different rates collapse near ``p = 0``, and
for small ``p`` the state is close to the mixture ``(1 - p) rho + p rho_bar``
of the initial state and its dephased version.
"""

import matplotlib.pyplot as plt
import numpy as np

from oqsbell import (LMG, DaviesSpec, MeasurementSpec, build_hamiltonian, davies_generator, evolve,
                     measurement_dephasing, optimize_violation, short_time_mixture, steady_state)

n = 30
ham = build_hamiltonian(LMG(n, J=1, h=0.02))
rho0 = steady_state(davies_generator(ham, DaviesSpec(beta=30)))
p = np.linspace(0, 1, 41)

fig, ax = plt.subplots()
for kappa in (1.0, 0.1, 0.01):
    spec = MeasurementSpec(kappa=kappa)
    states = evolve(measurement_dephasing(ham, spec), rho0, p / kappa)
    ax.plot(p, [optimize_violation(rho).q_v for rho in states], label=f"kappa = {kappa:g}")

small = p[p <= 0.1]
mixture = [optimize_violation(short_time_mixture(rho0, MeasurementSpec(1.0), t, ham)).q_v
           for t in small]
ax.plot(small, mixture, "k--", label="first-order mixture")
ax.axhline(0, color="k", lw=0.8)
ax.set_xlabel("p = kappa t")
ax.set_ylabel("Q_v")
ax.legend()
fig.savefig("measurement_attack.png", dpi=120)
