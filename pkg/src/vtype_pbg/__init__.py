"""Spontaneous emission, quantum Fisher information and non-Markovianity of a
V-type three-level atom in free space and in an isotropic photonic band gap."""

__version__ = "0.1.0"

from .free import FreeParams, free_track, propagator_free
from .metrology import QFIMatrix, SigmaMin, cramer_rao_single, qfim, sigma_min, sld
from .pbg import PbgParams, find_mode_roots, pbg_track, propagator_pbg
from .propagator import Propagator, PropagatorTrack
from .quantumness import ObservableTrack, coherence_l1, hss, hss_witness
from .state import (InitialAmplitudes, StateKind, amplitude_derivatives,
                    density_matrix, drho_dparam, initial_amplitudes)

__all__ = [
    "FreeParams", "free_track", "propagator_free",
    "PbgParams", "find_mode_roots", "pbg_track", "propagator_pbg",
    "Propagator", "PropagatorTrack",
    "InitialAmplitudes", "StateKind", "initial_amplitudes", "amplitude_derivatives",
    "density_matrix", "drho_dparam",
    "QFIMatrix", "SigmaMin", "qfim", "sld", "sigma_min", "cramer_rao_single",
    "ObservableTrack", "coherence_l1", "hss", "hss_witness",
]
