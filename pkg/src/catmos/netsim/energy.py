"""Joule accounting per node.

Counters are integers (bits, readings); joules are derived on read, so
``tx_J == tx_bits * e_tx`` holds exactly and nothing is lost to
accumulated rounding.
"""

from __future__ import annotations

from dataclasses import dataclass, field

TX_J_PER_BIT = 0.4e-6
COMPRESS_J_PER_BIT = 0.86e-9


@dataclass(frozen=True)
class EnergyModel:
    e_tx: float = TX_J_PER_BIT
    e_compress: float = COMPRESS_J_PER_BIT
    e_rx: float = 0.0
    e_sense: float = 0.0

    def __post_init__(self):
        for name in ("e_tx", "e_compress", "e_rx", "e_sense"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def tx_compress_ratio(self) -> float:
        return self.e_tx / self.e_compress


@dataclass
class NodeLedger:
    tx_bits: int = 0
    rx_bits: int = 0
    compress_bits: int = 0
    readings: int = 0


@dataclass
class EnergyLedger:
    model: EnergyModel
    nodes: list[NodeLedger] = field(default_factory=list)

    @classmethod
    def for_nodes(cls, n: int, model: EnergyModel) -> "EnergyLedger":
        return cls(model, [NodeLedger() for _ in range(n)])

    def tx(self, node: int, bits: int) -> None:
        self.nodes[node].tx_bits += bits

    def rx(self, node: int, bits: int) -> None:
        self.nodes[node].rx_bits += bits

    def compress(self, node: int, bits: int) -> None:
        self.nodes[node].compress_bits += bits

    def sense(self, node: int, count: int = 1) -> None:
        self.nodes[node].readings += count

    def node_joules(self, node: int) -> dict[str, float]:
        n, m = self.nodes[node], self.model
        parts = {
            "tx_J": n.tx_bits * m.e_tx,
            "rx_J": n.rx_bits * m.e_rx,
            "compress_J": n.compress_bits * m.e_compress,
            "sense_J": n.readings * m.e_sense,
        }
        parts["total_J"] = sum(parts.values())
        return parts

    @property
    def tx_bits(self) -> int:
        return sum(n.tx_bits for n in self.nodes)

    @property
    def rx_bits(self) -> int:
        return sum(n.rx_bits for n in self.nodes)

    @property
    def compress_bits(self) -> int:
        return sum(n.compress_bits for n in self.nodes)

    @property
    def readings(self) -> int:
        return sum(n.readings for n in self.nodes)

    def totals(self) -> dict[str, float]:
        m = self.model
        parts = {
            "tx_J": self.tx_bits * m.e_tx,
            "rx_J": self.rx_bits * m.e_rx,
            "compress_J": self.compress_bits * m.e_compress,
            "sense_J": self.readings * m.e_sense,
        }
        parts["total_J"] = sum(parts.values())
        return parts

    @property
    def total_J(self) -> float:
        return self.totals()["total_J"]
