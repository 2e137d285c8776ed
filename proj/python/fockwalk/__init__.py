"""Damped Jaynes-Cummings walk and cavity Fock-state protocol."""

from ._core import *  # noqa: F401,F403
from ._core import (
    DecayCoupling,
    DimensionError,
    FockwalkError,
    JcPhaseModel,
    NotStationaryError,
    ProtocolParams,
    TruncationFault,
    ValidationError,
)

__all__ = [
    "DecayCoupling",
    "DimensionError",
    "FockwalkError",
    "JcPhaseModel",
    "NotStationaryError",
    "ProtocolParams",
    "TruncationFault",
    "ValidationError",
    "analytic_fidelity",
    "balance_fidelity",
    "coin_damping",
    "emit_probability",
    "expm",
    "fidelity_curve",
    "jc_unitary",
    "liouvillian",
    "partial_trace_coin",
    "propagate",
    "protocol_step",
    "reduced_walker_map",
    "run_protocol",
    "run_walk",
    "stabilization_step",
    "trapping_time",
    "validate",
    "walk_step",
]
