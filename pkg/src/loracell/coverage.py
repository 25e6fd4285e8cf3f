"""Closed-form uplink coverage of a ring-structured LoRaWAN cell.

For a typical node at distance d1 in SF ring i, transmitting over Rayleigh
fading with path loss g(d) = (lambda / 4 pi d)^eta:

  connection  H1 = P(SNR > gamma_i) = exp(-gamma_i sigma_w^2 / (Ptx g1))
  per-ring    P_SIRj = P(SIR_j > delta_ij)
            = exp{-pi alpha_j [ l_j^2  2F1(1, 2/eta; 1+2/eta; -l_j^eta / (d1^eta delta_ij))
                              - l_j-1^2 2F1(1, 2/eta; 1+2/eta; -l_j-1^eta / (d1^eta delta_ij)) ]}
  capture     Q1 = prod_j P_SIRj
  coverage    C1 = H1 * Q1

where alpha_j is the active-interferer intensity of ring j and delta_ij the
capture threshold of SF i against SF j. Everything here is linear-scale;
dB values are converted once by the scenario types.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hypergeom import hyp2f1
from .scenario import (
    SF_RANGE,
    RadioConfig,
    RingTopology,
    Scenario,
    ThresholdSet,
)


@dataclass(frozen=True)
class TypicalNode:
    """The probed uplink: distance to the gateway and its SF ring."""

    distance_m: float
    sf: int


@dataclass(frozen=True)
class CoverageBreakdown:
    h1: float                       # connection probability
    p_sir: tuple[float, ...]        # per interfering SF ring 7..12
    q1: float                       # capture probability
    c1: float                       # coverage = h1 * q1


def typical_at(topology: RingTopology, distance_m: float) -> TypicalNode:
    """Typical node at a distance, SF taken from the containing ring."""
    return TypicalNode(distance_m=distance_m, sf=topology.sf_at(distance_m))


def path_gain(distance_m: float, radio: RadioConfig) -> float:
    """Linear path gain (lambda / (4 pi d))^eta."""
    if distance_m <= 0:
        raise ValueError("distance_m must be positive")
    return (radio.wavelength_m / (4.0 * math.pi * distance_m)) ** radio.path_loss_exponent


def noise_power_dbm(radio: RadioConfig) -> float:
    """Thermal noise power -174 + F + 10 log10(B) in dBm."""
    if radio.bandwidth_hz <= 0:
        raise ValueError("bandwidth_hz must be positive")
    return -174.0 + radio.noise_figure_db + 10.0 * math.log10(radio.bandwidth_hz)


def noise_power_mw(radio: RadioConfig) -> float:
    return 10.0 ** (noise_power_dbm(radio) / 10.0)


def connection_probability(typical: TypicalNode, radio: RadioConfig,
                           thresholds: ThresholdSet) -> float:
    gamma = float(thresholds.snr_floor_linear[typical.sf - SF_RANGE[0]])
    g1 = path_gain(typical.distance_m, radio)
    rx = radio.tx_power_mw * radio.antenna_gain_linear * g1
    return math.exp(-gamma * noise_power_mw(radio) / rx)


def capture_probability_ring(typical: TypicalNode, ring_sf: int,
                             topology: RingTopology, thresholds: ThresholdSet,
                             radio: RadioConfig) -> float:
    """P(SIR against ring `ring_sf` exceeds its capture threshold)."""
    j = ring_sf - SF_RANGE[0]
    alpha = float(topology.intensities[j])
    if alpha == 0.0:
        return 1.0
    delta = thresholds.sir(typical.sf, ring_sf)
    eta = radio.path_loss_exponent
    b = 2.0 / eta
    lo = topology.boundaries_m[j]
    hi = topology.boundaries_m[j + 1]
    scale = typical.distance_m ** eta * delta

    def weighted(l: float) -> float:
        if l == 0.0:
            return 0.0
        return l * l * hyp2f1(1.0, b, 1.0 + b, -(l ** eta) / scale)

    exponent = -math.pi * alpha * (weighted(hi) - weighted(lo))
    return math.exp(exponent)


def capture_probability(typical: TypicalNode, topology: RingTopology,
                        thresholds: ThresholdSet,
                        radio: RadioConfig) -> tuple[float, tuple[float, ...]]:
    """Q1 and the per-ring factors it is the product of."""
    per_ring = tuple(
        capture_probability_ring(typical, sf, topology, thresholds, radio)
        for sf in SF_RANGE
    )
    q1 = 1.0
    for p in per_ring:
        q1 *= p
    return q1, per_ring


def coverage_probability(typical: TypicalNode, scenario: Scenario) -> CoverageBreakdown:
    h1 = connection_probability(typical, scenario.radio, scenario.thresholds)
    q1, per_ring = capture_probability(
        typical, scenario.topology, scenario.thresholds, scenario.radio
    )
    return CoverageBreakdown(h1=h1, p_sir=per_ring, q1=q1, c1=h1 * q1)


def coverage_sweep(scenario: Scenario, distances_m) -> list[CoverageBreakdown]:
    """Coverage breakdown at each distance (SF from the containing ring)."""
    out = []
    for d in np.asarray(distances_m, dtype=float):
        out.append(coverage_probability(typical_at(scenario.topology, float(d)), scenario))
    return out
