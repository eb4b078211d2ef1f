"""
Thermal and non-thermal steady-state phase diagrams
===================================================

A register of N qubits with LMG Hamiltonian ``H = (J/N) S_z^2 - h S_x`` is
coupled to a bath.  For each field ``h`` we compute the stationary state and
minimise the two-body Bell expression over the measurement angles.  Negative
``Q_v`` certifies non-locality.
"""

import matplotlib.pyplot as plt
import numpy as np
from matplotlib.colors import TwoSlopeNorm

from oqsbell import (LMG, DaviesSpec, build_hamiltonian, davies_generator, gibbs_state,
                     jump_dissipator, optimize_violation, rotated_ladder_jump, steady_state)

n = 20
fields = np.linspace(0.0, 0.25, 11)

###############################################################################
# Thermal bath
# ------------
# The Davies generator relaxes to the Gibbs state.  At ``h = 0`` it has two
# stationary states (the coupling and H share a parity symmetry), so we pass
# the Gibbs state as reference to pick the thermal one.

betas = np.geomspace(0.1, 10, 7)
thermal = np.empty((len(betas), len(fields)))
for i, beta in enumerate(betas):
    for j, h in enumerate(fields):
        ham = build_hamiltonian(LMG(n, J=1, h=h))
        rho = steady_state(davies_generator(ham, DaviesSpec(beta=beta)),
                           reference=gibbs_state(ham, beta))
        thermal[i, j] = optimize_violation(rho).q_v

###############################################################################
# Rotated ladder dissipator
# -------------------------
# ``J(zeta) = cos(zeta) S_+ + sin(zeta) S_-`` with the ladders acting on the
# energy eigenstates.  At ``zeta = 0`` the ground state is dark, so the steady
# state is pure.

zetas = np.linspace(0.0, 1.0, 9)
ladder = np.empty((len(zetas), len(fields)))
for i, zeta in enumerate(zetas):
    for j, h in enumerate(fields):
        ham = build_hamiltonian(LMG(n, J=1, h=h))
        rho = steady_state(jump_dissipator(ham, [(rotated_ladder_jump(ham, zeta), 1.0)]))
        ladder[i, j] = optimize_violation(rho).q_v

fig, axes = plt.subplots(1, 2, figsize=(10, 4))
for ax, data, ys, label in ((axes[0], thermal, betas, "beta"), (axes[1], ladder, zetas, "zeta")):
    # white at Q_v = 0, full colour range on each side
    norm = TwoSlopeNorm(vcenter=0.0, vmin=min(data.min(), -1e-9), vmax=data.max())
    mesh = ax.pcolormesh(fields, ys, data, cmap="RdBu", norm=norm, shading="nearest")
    ax.contour(fields, ys, data, levels=[0.0], colors="k")
    ax.set_xlabel("h")
    ax.set_ylabel(label)
    fig.colorbar(mesh, ax=ax, label="Q_v")
axes[0].set_yscale("log")
fig.tight_layout()
fig.savefig("phase_diagram.png", dpi=120)
