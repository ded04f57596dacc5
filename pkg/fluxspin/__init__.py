"""Decoherence of a nuclear spin coupled to a classical N-state fluctuator."""

from __future__ import annotations

from .analysis import CrossoverTemplate, crossover_scan, extract_spectral, fit_time_domain
from .const import VERSION
from .data import DecayAnalysis, EnsembleResult
from .experiments import EnsembleSpec, anisotropy_scenario, reproduce_fig2, sweet_spot
from .fluctuator import FluctuatorSpec, asymptotic_rates, compose, stationary_distribution
from .propagator import Occupation, build_generator, initial_joint_state, propagate, reduce
from .quantum import BlochVector, DensityMatrix, PrecessionVector
from .sampler import ensemble_average, sample_trajectory

__version__ = VERSION

__all__ = [
    "BlochVector",
    "CrossoverTemplate",
    "DecayAnalysis",
    "DensityMatrix",
    "EnsembleResult",
    "EnsembleSpec",
    "FluctuatorSpec",
    "Occupation",
    "PrecessionVector",
    "anisotropy_scenario",
    "asymptotic_rates",
    "build_generator",
    "compose",
    "crossover_scan",
    "ensemble_average",
    "extract_spectral",
    "fit_time_domain",
    "initial_joint_state",
    "propagate",
    "reduce",
    "reproduce_fig2",
    "sample_trajectory",
    "stationary_distribution",
    "sweet_spot",
]
