"""Entanglement analysis for two-qubit mixed states produced by a cloning-style
noise channel, witness-based detection, and a secret-sharing protocol on top.

Subpackages are imported lazily by the user; the compiled eigensolver backend
(if available) is selected inside :mod:`qshare.qmath`.
"""

__version__ = "0.1.0"

__all__ = [
    "qmath",
    "entanglement",
    "noise",
    "witness",
    "protocol",
    "cli",
]
