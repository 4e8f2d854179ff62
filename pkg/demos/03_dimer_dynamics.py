# Coherent vs dephased population transfer in a dimer.
#
# Without dephasing the excitation oscillates between the two sites.
# Dephasing damps the oscillation and drives both populations to 1/2.
import numpy as np

from holsim.dynamics import ChannelSpec, IntegratorConfig, density_matrix, evolve_open, localized_state
from holsim.model import SiteNetwork, build_system_hamiltonian
from _plot import plt, save

J = 1.0
net = SiteNetwork(2, [0.0, 0.0], [(0, 1, J)])
H = build_system_hamiltonian(net)
rho0 = density_matrix(localized_state(2, 0))
cfg = IntegratorConfig(dt=0.05, t_final=10.0)

runs = {}
for gamma in (0.0, 0.5, 2.0):
    runs[gamma] = evolve_open(H, ChannelSpec.from_network(net, gamma), rho0, cfg)
    traj = runs[gamma]
    print(f"gamma = {gamma}: P2(T) = {traj.populations[-1, 1]:.4f}, "
          f"l1 coherence(T) = {traj.coherence[-1]:.4f}")

if plt is not None:
    fig, ax = plt.subplots(figsize=(6, 4))
    for gamma, traj in runs.items():
        ax.plot(traj.times, traj.populations[:, 1], label=f"gamma = {gamma}")
    ax.set_xlabel("t")
    ax.set_ylabel("P2(t)")
    ax.legend()
    save(fig, "dimer_dynamics.png")
