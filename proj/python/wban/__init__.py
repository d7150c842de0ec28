"""WBAN end-to-end authentication testbed.

Thin wrapper over the C++ core: crypto primitives, the five-step handshake
simulator with its adversary scenarios, the cost accounting, and the
BAN-logic engine.
"""

from wban._core import (
    ban_case_study_source,
    ban_verify,
    costs,
    decrypt,
    derive_key,
    encrypt,
    handshake_jsonl,
    hash160,
    measure,
    run_attack,
    run_handshake,
    wire_size_bits,
    wire_sizes,
)

__all__ = [
    "ban_case_study_source",
    "ban_verify",
    "costs",
    "decrypt",
    "derive_key",
    "encrypt",
    "handshake_jsonl",
    "hash160",
    "measure",
    "run_attack",
    "run_handshake",
    "wire_size_bits",
    "wire_sizes",
]
