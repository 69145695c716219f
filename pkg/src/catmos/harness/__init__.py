"""Scenario files, experiment runner, reference tables and the command line."""

from .scenario import Scenario, load_scenario, loads_scenario, scenario_from_queries

__all__ = ["Scenario", "load_scenario", "loads_scenario", "scenario_from_queries"]
