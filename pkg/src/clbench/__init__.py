"""Counterstrategy simulation, unit-tree analysis and CL15 proof construction
for the ⫰/⫯ fragment of computability logic."""

__version__ = "0.1.0"
