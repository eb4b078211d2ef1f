"""
Recurring non-locality
======================

With ``H = -omega S_z^2 + const`` every Bohr frequency is an integer multiple
of ``omega``, so the unitary part of the dynamics has period ``2 pi / omega``.
A weak ``S_y / sqrt(N)`` channel slowly damps the revivals, but ``Q_v`` keeps
dipping below zero.
"""

import matplotlib.pyplot as plt
import numpy as np

from oqsbell import (SquaredZ, build_hamiltonian, collective_spin_ops, dicke_superposition, evolve,
                     jump_dissipator, optimize_violation)

n = 20
ham = build_hamiltonian(SquaredZ(n, omega=1))
jump = collective_spin_ops(n).y / np.sqrt(n)
gen = jump_dissipator(ham, [(jump, 0.001)])

times = np.linspace(0, 4 * np.pi, 201)
rho0 = dicke_superposition(n, n // 2, n // 2 + 1)
q_v = np.array([optimize_violation(rho).q_v for rho in evolve(gen, rho0, times)])

neg = q_v < 0
print("negative windows:", int(np.sum(neg[1:] & ~neg[:-1]) + neg[0]))

fig, ax = plt.subplots()
ax.plot(times, q_v)
ax.fill_between(times, q_v.min(), q_v.max(), where=neg, color="lightblue", alpha=0.5)
ax.axhline(0, color="k", lw=0.8)
ax.set_xlabel("t")
ax.set_ylabel("Q_v")
fig.savefig("recurrence.png", dpi=120)
