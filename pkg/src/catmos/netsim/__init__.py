"""Tick-driven sensor network simulator and its energy accounting."""

from .energy import COMPRESS_J_PER_BIT, TX_J_PER_BIT, EnergyLedger, EnergyModel
from .sim import MODES, SimReport, parse_records, run, tokenize_stream
from .topology import ROOT, Topology, build_tree, line

__all__ = [
    "COMPRESS_J_PER_BIT", "TX_J_PER_BIT", "EnergyLedger", "EnergyModel", "MODES",
    "ROOT", "SimReport", "Topology", "build_tree", "line", "parse_records", "run",
    "tokenize_stream",
]
