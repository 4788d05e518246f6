"""Received-signal gain, spectral efficiency and the complexity model."""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .beamformers import BASELINE, KF, TOT, BeamformingSolution
from .channel import DomainDims


@dataclass(frozen=True)
class LinkBudget:
    tx_power: float = 1.0
    noise_power: float = 1.0

    def __post_init__(self):
        if not (self.tx_power > 0 and self.noise_power > 0):
            raise ValueError(
                f"powers must be positive, got P_t={self.tx_power}, sigma_n^2={self.noise_power}"
            )

    @classmethod
    def from_snr_db(cls, snr_db: float, tx_power: float = 1.0) -> "LinkBudget":
        """Budget with ``tx_power / noise_power`` equal to ``snr_db``."""
        return cls(tx_power, tx_power * 10.0 ** (-snr_db / 10.0))

    @property
    def snr(self) -> float:
        return self.tx_power / self.noise_power


def effective_gain(sol: BeamformingSolution, H, G) -> complex:
    """``w^H G diag(theta) H q``."""
    H = np.asarray(H)
    G = np.asarray(G)
    if G.shape != (sol.w.size, sol.theta.size) or H.shape != (sol.theta.size, sol.q.size):
        raise ValueError(
            f"solution (K={sol.w.size}, N={sol.theta.size}, M={sol.q.size}) does not fit "
            f"H {H.shape} and G {G.shape}"
        )
    return complex(sol.w.conj() @ (G @ (sol.theta * (H @ sol.q))))


def effective_gain_combined(sol: BeamformingSolution, F) -> complex:
    """Same gain through the combined channel: ``(q^T kron w^H) F theta``."""
    return complex(np.kron(sol.q, sol.w.conj()) @ (np.asarray(F) @ sol.theta))


def spectral_efficiency(gain: complex, budget: LinkBudget) -> float:
    """``log2(1 + |gain|^2 P_t / sigma_n^2)`` in bit/s/Hz."""
    return float(np.log2(1.0 + abs(gain) ** 2 * budget.snr))


class FactorizedSE(NamedTuple):
    se: float
    snr_y: float
    snr_z: float


def factorized_se(s_y: complex, s_z: complex, budget: LinkBudget) -> FactorizedSE:
    """SE of a separable link from its horizontal and vertical signal terms.

    The per-domain SNRs split the noise evenly, ``|s_t|^2 sqrt(P_t) / sigma_n``,
    so that ``snr_y * snr_z`` is the link SNR.
    """
    root = np.sqrt(budget.snr)
    snr_y = abs(s_y) ** 2 * root
    snr_z = abs(s_z) ** 2 * root
    return FactorizedSE(spectral_efficiency(s_y * s_z, budget), float(snr_y), float(snr_z))


def domain_gains(sol: BeamformingSolution, H_y, H_z, G_y, G_z) -> tuple[complex, complex]:
    """``(s_y, s_z)`` of a factored solution on per-domain channels."""
    if not sol.factored:
        raise ValueError(f"{sol.method} solution carries no per-domain factors")
    s_y = sol.w_y.conj() @ (np.asarray(G_y) @ (sol.theta_y * (np.asarray(H_y) @ sol.q_y)))
    s_z = sol.w_z.conj() @ (np.asarray(G_z) @ (sol.theta_z * (np.asarray(H_z) @ sol.q_z)))
    return complex(s_y), complex(s_z)


@dataclass(frozen=True)
class ComplexityReport:
    """Model operation count of one designer (unit big-O constants)."""

    method: str
    op_count: float
    dims: DomainDims


def complexity_count(method: str, dims: DomainDims) -> ComplexityReport:
    """Operation count of a designer for the given array sizes.

    baseline: N (M + K); kf: N_y (M_y + K_y) + N_z (M_z + K_z);
    tot: 3 (K_y M_y N_y + K_z M_z N_z). Sizes may be non-integer, e.g. a
    sqrt(N) x sqrt(N) IRS split used for extrapolation.
    """
    if any(d <= 0 for d in dims):
        raise ValueError(f"all array sizes must be positive, got {dims}")
    d = dims
    if method == BASELINE:
        count = d.N * (d.M + d.K)
    elif method == KF:
        count = d.n_y * (d.m_y + d.k_y) + d.n_z * (d.m_z + d.k_z)
    elif method == TOT:
        count = 3 * (d.k_y * d.m_y * d.n_y + d.k_z * d.m_z * d.n_z)
    else:
        raise ValueError(f"unknown method {method!r}")
    return ComplexityReport(method, count, dims)

