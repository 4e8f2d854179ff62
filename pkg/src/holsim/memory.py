"""Classical memory needed to store a state vector, in exact integer arithmetic."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ValidationError

__all__ = [
    "MAX_BITS",
    "MemoryModel",
    "qubit_state_bits",
    "max_qubits",
    "product_basis_bits",
    "format_bits",
]

# Counts above this are treated as overflow (they no longer fit a double).
MAX_BITS = 2**1023


@dataclass(frozen=True)
class MemoryModel:
    """Storage cost of one complex amplitude: two real components of ``bits_per_component`` bits."""

    bits_per_component: int = 32
    components_per_amplitude: int = 2

    def __post_init__(self):
        if not isinstance(self.bits_per_component, int) or self.bits_per_component <= 0:
            raise ValidationError(
                f"bits_per_component must be a positive integer, got {self.bits_per_component!r}")
        if self.components_per_amplitude != 2:
            raise ValidationError("an amplitude has exactly two real components")

    @property
    def bits_per_amplitude(self):
        return self.components_per_amplitude * self.bits_per_component


def _guard(bits):
    if bits > MAX_BITS:
        raise OverflowError("bit count exceeds the supported range (2**1023)")
    return bits


def qubit_state_bits(n, model=MemoryModel()):
    """Bits to store all 2**n amplitudes of an n-qubit state; 2**(n + 6) by default."""
    if not isinstance(n, int) or n < 0:
        raise ValidationError(f"qubit count must be a nonnegative integer, got {n!r}")
    if n > 1023:
        raise OverflowError(f"{n} qubits exceed the supported range")
    return _guard((1 << n) * model.bits_per_amplitude)


def max_qubits(budget_bits, model=MemoryModel()):
    """Largest n whose state fits in ``budget_bits``."""
    if not isinstance(budget_bits, int):
        raise ValidationError(f"budget must be an integer number of bits, got {budget_bits!r}")
    per_amp = model.bits_per_amplitude
    if budget_bits < per_amp:
        raise ValidationError(
            f"budget of {budget_bits} bits is below one amplitude ({per_amp} bits)")
    # floor(log2(budget // per_amp)), exact for big integers
    return (budget_bits // per_amp).bit_length() - 1


def product_basis_bits(basis, model=MemoryModel()):
    """Bits to store one amplitude vector over a site (x) Fock product basis."""
    return _guard(basis.total_dim * model.bits_per_amplitude)


def format_bits(bits):
    """Human-readable size using binary prefixes, e.g. 2**37 bits -> '16 GiB'."""
    size = bits / 8
    for unit in ("B", "KiB", "MiB", "GiB", "TiB", "PiB", "EiB"):
        if size < 1024 or unit == "EiB":
            break
        size /= 1024
    text = f"{size:.2f}".rstrip("0").rstrip(".")
    return f"{text} {unit}"
