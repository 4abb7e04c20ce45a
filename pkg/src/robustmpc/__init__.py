"""Simulator for multiparty computation robust against a general adversary structure."""
from .adversary import Strategy, library
from .circuit import Circuit
from .orchestrator import RunReport, Scenario, aposteriori_security, run
from .scenario import load_scenario, parse_scenario
from .structures import AdversaryStructure, ConflictGraph, identify_cheaters

__all__ = ["AdversaryStructure", "Circuit", "ConflictGraph", "RunReport", "Scenario", "Strategy",
           "aposteriori_security", "identify_cheaters", "library", "load_scenario", "parse_scenario", "run"]
