"""Vekua-type hierarchic plate models and the Karman-type iteration."""

__version__ = "0.1.0"
