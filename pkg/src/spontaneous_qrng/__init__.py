"""Intrinsic-randomness calculators, oracles and simulators for spontaneous-emission QRNGs."""

__version__ = "0.1.0"
