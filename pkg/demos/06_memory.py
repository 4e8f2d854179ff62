# Classical memory needed to hold a state vector.
#
# Each amplitude takes two 32-bit components, so n qubits need 2^(n+6) bits.
from holsim.memory import format_bits, max_qubits, qubit_state_bits

for n in (10, 20, 30, 31, 40, 50):
    bits = qubit_state_bits(n)
    print(f"{n:2d} qubits: {bits} bits ({format_bits(bits)})")

for label, budget in (("16 GiB", 2**37), ("1 TiB", 2**43), ("1 PiB", 2**53)):
    print(f"{label} budget holds at most {max_qubits(budget)} qubits")
