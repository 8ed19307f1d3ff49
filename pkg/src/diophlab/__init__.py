"""Counting Diophantine quadruples, moving-target discrepancy bounds and congruence-root equidistribution."""

__version__ = "0.1.0"
