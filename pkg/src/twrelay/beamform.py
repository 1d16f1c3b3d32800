"""Relay beamformer construction and end-to-end SNR evaluation.

Three schemes share one evaluation path:

* ``proposed`` -- diagonal matrix whose m-th entry rotates by minus the sum
  of the two channel phases at antenna m, so the relayed paths add
  coherently at both sources.
* ``selection`` -- single-antenna relay matrix; the antenna maximizing the
  worse of the two end-to-end SNRs is kept (max-min rule, ties to the
  smallest index).
* ``direct`` -- identity matrix, i.e. plain amplify-and-forward.

SNRs are linear power ratios; dB conversion belongs to the CLI boundary.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .channel import ChannelPair
from .errors import DegenerateChannelError, DimensionError, DomainError

SCHEME_PROPOSED = "proposed"
SCHEME_SELECTION = "selection"
SCHEME_DIRECT = "direct"
SCHEMES = (SCHEME_PROPOSED, SCHEME_SELECTION, SCHEME_DIRECT)


@dataclass(frozen=True)
class Beamformer:
    """N x N relay matrix plus the scheme that produced it."""

    q: np.ndarray
    scheme: str
    antenna: int | None = None  # selected index, selection scheme only


@dataclass(frozen=True)
class SnrPair:
    """End-to-end receive SNRs at source 1 and source 2 (linear)."""

    snr1: float
    snr2: float


def build_proposed(ch: ChannelPair) -> Beamformer:
    """Phase-aligning diagonal beamformer exp(-j(arg h_m + arg g_m)).

    Zero-magnitude entries get phase 0 (np.angle(0) is already 0).
    """
    phases = np.angle(ch.h) + np.angle(ch.g)
    return Beamformer(np.diag(np.exp(-1j * phases)), SCHEME_PROPOSED)


def build_direct_af(n: int) -> Beamformer:
    """Identity relay matrix: amplify-and-forward without spatial processing."""
    if n < 1:
        raise DimensionError("antenna count must be >= 1")
    return Beamformer(np.eye(n, dtype=np.complex128), SCHEME_DIRECT)


def _selection_matrix(ch: ChannelPair, k: int) -> np.ndarray:
    q = np.zeros((ch.n, ch.n), dtype=np.complex128)
    q[k, k] = np.exp(-1j * (np.angle(ch.h[k]) + np.angle(ch.g[k])))
    return q


def build_antenna_selection(ch: ChannelPair, rho: float) -> Beamformer:
    """Single-antenna beamformer maximizing min(SNR1, SNR2) over antennas."""
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    best_k = 0
    best = -1.0
    for k in range(ch.n):
        bf = Beamformer(_selection_matrix(ch, k), SCHEME_SELECTION, antenna=k)
        pair = snr_pair_general(ch, bf, rho)
        worse = min(pair.snr1, pair.snr2)
        if worse > best:
            best = worse
            best_k = k
    return Beamformer(_selection_matrix(ch, best_k), SCHEME_SELECTION, antenna=best_k)


def snr_pair_general(ch: ChannelPair, bf: Beamformer, rho: float) -> SnrPair:
    """Receive SNRs for an arbitrary relay matrix.

    SNR1 = |h^T Q g|^2 rho / (2|Qh|^2 + |Qg|^2 + ||Q||_F^2 / rho), and
    symmetrically for SNR2 with the roles of h and g swapped.  The relay
    power normalization is already folded into the denominator.
    """
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    q = np.asarray(bf.q)
    if q.shape != (ch.n, ch.n):
        raise DimensionError(f"beamformer shape {q.shape} does not match n={ch.n}")
    qh = q @ ch.h
    qg = q @ ch.g
    pow_qh = float(np.sum(np.abs(qh) ** 2))
    pow_qg = float(np.sum(np.abs(qg) ** 2))
    fro = float(np.sum(np.abs(q) ** 2))
    sig1 = abs(np.dot(ch.h, qg)) ** 2  # |h^T Q g|^2
    sig2 = abs(np.dot(ch.g, qh)) ** 2
    snr1 = sig1 * rho / (2.0 * pow_qh + pow_qg + fro / rho)
    snr2 = sig2 * rho / (2.0 * pow_qg + pow_qh + fro / rho)
    return SnrPair(snr1, snr2)


def snr_pair_proposed(ch: ChannelPair, rho: float) -> SnrPair:
    """Closed form of the general SNR under the phase-aligning beamformer.

    SNR1 = (sum_m |h_m||g_m|)^2 rho / (2|h|^2 + |g|^2 + n/rho); SNR2 swaps
    the factor of two onto |g|^2.
    """
    if rho <= 0:
        raise DomainError(f"rho must be positive, got {rho}")
    s = float(np.sum(np.abs(ch.h) * np.abs(ch.g))) ** 2
    x1 = float(np.sum(np.abs(ch.h) ** 2))
    x2 = float(np.sum(np.abs(ch.g) ** 2))
    extra = ch.n / rho
    return SnrPair(s * rho / (2.0 * x1 + x2 + extra),
                   s * rho / (2.0 * x2 + x1 + extra))


def w_statistic(ch: ChannelPair) -> float:
    """Coherent-combining statistic (sum |h_m||g_m|)^2 / ((1/n)|h|^2|g|^2).

    Bounded by Cauchy-Schwarz: 0 <= w <= n, with w = n iff the modulus
    vectors are proportional.
    """
    x1 = float(np.sum(np.abs(ch.h) ** 2))
    x2 = float(np.sum(np.abs(ch.g) ** 2))
    if x1 == 0.0 or x2 == 0.0:
        raise DegenerateChannelError("w statistic needs both channel norms positive")
    s = float(np.sum(np.abs(ch.h) * np.abs(ch.g)))
    return s * s / (x1 * x2 / ch.n)
