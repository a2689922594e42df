"""Displacemon: qubit-gated matter-wave interferometry of a clamped beam.

Forward models for the mechanical mode, qubit coupling, decoherence channels
and two-grating qubit statistics, plus independent oracles and a CLI.
"""

__version__ = "0.1.0"
