# Spectrum of a single site coupled to one vibrational mode.
#
# The joint ground energy converges to the polaron-shifted value
# E1 - g^2/nu as the Fock cutoff grows.
import numpy as np

from holsim.memory import format_bits, product_basis_bits
from holsim.model import BathSpec, ProductBasis, SiteNetwork, build_total_hamiltonian

E1, nu, g = 0.3, 1.0, 0.5
net = SiteNetwork(1, [E1])
print(f"exact polaron ground energy: {E1 - g**2 / nu:.12f}")
for nmax in (1, 2, 4, 8, 16, 32):
    bath = BathSpec(modes=[(nu, nmax)], couplings=[[g]])
    H = build_total_hamiltonian(net, bath)
    e0 = np.linalg.eigvalsh(H.toarray())[0]
    print(f"  n_max = {nmax:2d}: E0 = {e0:.12f}")

# a seven-site network with three modes per site already needs a sizeable basis
bath = BathSpec(modes=[(1.0, 4)] * 3, couplings=[[0.1] * 3] * 7)
basis = ProductBasis.for_bath(7, bath)
bits = product_basis_bits(basis)
print(f"7 sites x 3 modes (n_max 4): dim {basis.total_dim}, {bits} bits ({format_bits(bits)})")
