# Classical vs coined quantum walk on a line.
#
# The classical walker's spread grows like sqrt(M); the Hadamard walker's
# grows linearly in M.  Both distributions are computed exactly.
import numpy as np

from holsim.walks import CoinSpec, classical_walk, fit_spreading_exponent, quantum_walk
from _plot import plt, save

M = 100
c = classical_walk(M)
q = quantum_walk(M, CoinSpec.hadamard("symmetric"))
print(f"M = {M}: classical std = {c.std():.4f}, quantum std = {q.std():.4f}")

# the |0> coin alone gives a lopsided walk; (|0> + i|1>)/sqrt(2) is symmetric
print("coin |0>, M = 3:", {x: round(p, 6) for x, p in quantum_walk(3).as_dict().items()})

steps = [16, 32, 64, 128, 256, 512, 1024]
cfit = fit_spreading_exponent([(m, classical_walk(m).std()) for m in steps])
qfit = fit_spreading_exponent([(m, quantum_walk(m).std()) for m in steps])
print(f"fitted exponents: classical {cfit.alpha:.4f}, quantum {qfit.alpha:.4f}")

if plt is not None:
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(10, 4))
    even = c.positions % 2 == 0
    ax1.plot(c.positions[even], c.probabilities[even], label="classical")
    ax1.plot(q.positions[even], q.probabilities[even], label="Hadamard")
    ax1.set_xlabel("position")
    ax1.set_ylabel("probability")
    ax1.legend()
    ax2.loglog(steps, [classical_walk(m).std() for m in steps], "o-", label="classical")
    ax2.loglog(steps, [quantum_walk(m).std() for m in steps], "s-", label="Hadamard")
    ax2.set_xlabel("steps M")
    ax2.set_ylabel("std dev")
    ax2.legend()
    save(fig, "random_walks.png")
