"""Interface contracts for local density functions.

Contracts define what every residue-indexed density must satisfy (mass
identity, multiplicativity over coprime moduli, agreement with the
double-loop oracle) so alternative implementations can be checked
automatically.
"""

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Protocol, runtime_checkable

from src.analysis.local_factors import mass_identity, rho_bruteforce
from src.models.density import DensityKind


# ============================================================================
# Protocol Definitions (Duck Typing Interfaces)
# ============================================================================


@runtime_checkable
class ResidueDensityProtocol(Protocol):
    """A count indexed by (residue, modulus), such as ρ, ρ̃ or r."""

    def __call__(self, a: int, q: int) -> int:
        ...


@runtime_checkable
class SieveDensityProtocol(Protocol):
    """A multiplicative density evaluated at primes."""

    def __call__(self, p: int) -> Fraction:
        ...


@runtime_checkable
class LaboratoryProtocol(Protocol):
    """Anything that runs one experiment configuration."""

    def run(self, config, progress_callback=None):
        ...


# ============================================================================
# Contract Dataclasses (For Testing & Validation)
# ============================================================================


@dataclass
class MassIdentityContract:
    """Σ_a f(a;q) equals φ(q)², qφ(q) or q² depending on the kind."""

    kind: DensityKind
    moduli: list[int] = field(default_factory=lambda: list(range(1, 41)))

    def validate(self, instance: object) -> tuple[bool, list[str]]:
        errors = []
        if not isinstance(instance, ResidueDensityProtocol):
            return False, ["Density is not callable as f(a, q)"]
        for q in self.moduli:
            total = sum(instance(a, q) for a in range(q))
            expected = mass_identity(self.kind, q)
            if total != expected:
                errors.append(f"mass at q={q}: {total} != {expected}")
        return len(errors) == 0, errors


@dataclass
class MultiplicativityContract:
    """f(a;q₁q₂) = f(a;q₁)·f(a;q₂) for coprime q₁, q₂."""

    pairs: list[tuple[int, int]] = field(
        default_factory=lambda: [(3, 4), (4, 5), (5, 8), (7, 9), (8, 9), (9, 25)]
    )

    def validate(self, instance: object) -> tuple[bool, list[str]]:
        errors = []
        for q1, q2 in self.pairs:
            if math.gcd(q1, q2) != 1:
                errors.append(f"pair ({q1}, {q2}) is not coprime")
                continue
            q = q1 * q2
            for a in range(q):
                joint = instance(a, q)
                split = instance(a % q1, q1) * instance(a % q2, q2)
                if joint != split:
                    errors.append(f"f({a};{q}) = {joint} but split gives {split}")
                    break
        return len(errors) == 0, errors


@dataclass
class OracleContract:
    """f(a;q) matches the brute-force count for every residue."""

    kind: DensityKind
    moduli: list[int] = field(default_factory=lambda: list(range(1, 61)))

    def validate(self, instance: object) -> tuple[bool, list[str]]:
        errors = []
        for q in self.moduli:
            for a in range(q):
                got = instance(a, q)
                want = rho_bruteforce(a, q, self.kind)
                if got != want:
                    errors.append(f"{self.kind.value}({a};{q}) = {got}, oracle {want}")
        return len(errors) == 0, errors


# ============================================================================
# Contract Registry
# ============================================================================


def density_contracts(kind: DensityKind, max_modulus: int = 60) -> dict[str, object]:
    """All contracts a residue density of this kind must pass."""
    moduli = list(range(1, max_modulus + 1))
    return {
        "mass_identity": MassIdentityContract(kind=kind, moduli=moduli),
        "multiplicativity": MultiplicativityContract(),
        "oracle": OracleContract(kind=kind, moduli=moduli),
    }


CONTRACTS = {kind.value: density_contracts(kind) for kind in (
    DensityKind.RHO,
    DensityKind.RHO_TILDE,
    DensityKind.R_UNRESTRICTED,
)}


def validate_all_contracts(
    functions: dict[str, object],
    max_modulus: int = 60,
) -> dict[str, tuple[bool, list[str]]]:
    """
    Validate density functions against their contracts.

    Args:
        functions: Dict mapping density kind name to its implementation
        max_modulus: Largest modulus checked by the mass and oracle contracts

    Returns:
        Dict mapping "kind/contract" to (is_valid, errors) tuple
    """
    results = {}

    for name, instance in functions.items():
        if name not in CONTRACTS:
            results[name] = (False, [f"Unknown contract: {name}"])
            continue
        contracts = density_contracts(DensityKind.from_string(name), max_modulus)
        for contract_name, contract in contracts.items():
            results[f"{name}/{contract_name}"] = contract.validate(instance)

    return results
