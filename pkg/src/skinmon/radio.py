"""First-order radio energy model and battery accounting.

    E_tx(k, d) = E_trx * k + eps_amp * k * d**2      (d in metres)
    E_rx(k)    = E_rec * k

Defaults follow the nRF24L01-derived constants: E_trx = 16.7 nJ/bit,
E_rec = 36.1 nJ/bit, eps_amp = 1.97 nJ/bit/m^2.
"""

from __future__ import annotations

from dataclasses import dataclass

from .types import EnergyBudget, SimConfig

CM_PER_M = 100.0


@dataclass(frozen=True)
class RadioParams:
    e_trx: float = 16.7
    e_rec: float = 36.1
    eps_amp: float = 1.97

    def __post_init__(self) -> None:
        if min(self.e_trx, self.e_rec, self.eps_amp) <= 0:
            raise ValueError("radio constants must be strictly positive")

    @classmethod
    def from_config(cls, cfg: SimConfig) -> RadioParams:
        return cls(cfg.e_trx, cfg.e_rec, cfg.eps_amp)


def tx_energy(params: RadioParams, bits: int, distance: float) -> float:
    """Energy in nJ to transmit `bits` over `distance` metres."""
    if bits < 0 or distance < 0:
        raise ValueError("bits and distance must be non-negative")
    return params.e_trx * bits + params.eps_amp * bits * distance * distance


def rx_energy(params: RadioParams, bits: int) -> float:
    if bits < 0:
        raise ValueError("bits must be non-negative")
    return params.e_rec * bits


def debit(budget: EnergyBudget, cost: float) -> tuple[EnergyBudget, bool]:
    """Charge `cost` nJ against a battery.

    The budget clamps at zero; `died` is true only on the debit that empties it,
    so an already-dead node never dies twice.
    """
    if cost < 0:
        raise ValueError("cost must be non-negative")
    remaining = max(0.0, budget.remaining - cost)
    died = budget.remaining > 0.0 and remaining == 0.0
    return EnergyBudget(remaining, budget.initial), died
