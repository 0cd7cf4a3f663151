"""Thermoelectrochemical electrolysis-cell simulator and existence-certificate engine."""

__version__ = "0.1.0"
