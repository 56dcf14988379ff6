"""Interferometer rotation in the Dicke basis.

The whole lossless two-port interferometer acts as exp(-i phi J_y) with
J_y = (a^dag b - b^dag a)/(2i).  Within a fixed total photon number N the
Dicke states |J, mu> = |J+mu>_a |J-mu>_b (J = N/2) carry a tridiagonal J_y
block, and -i phi J_y is a real antisymmetric matrix, so every rotation
block is a real orthogonal (Wigner small-d) matrix.

Basis ordering everywhere: row/column index k counts photons in port b,
so index k corresponds to mu = J - k (descending mu).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import eigh_tridiagonal

from .errors import SizeExceeded
from .states import AmplitudeTable, NPhotonState, generation_probability, postselect

__all__ = [
    "MAX_BLOCK_SIZE",
    "DickeIndex",
    "RotationBlock",
    "OutcomeDistribution",
    "wigner_d_block",
    "conditional_probabilities",
    "probability_derivatives",
    "full_outcome_distribution",
]

# Orthogonality error of the eigendecomposition route stays below 1e-8 here.
MAX_BLOCK_SIZE = 512


@dataclass(frozen=True)
class DickeIndex:
    """Total photon number N and twice the imbalance 2*mu = N_a - N_b."""

    total_n: int
    mu_twice: int

    def __post_init__(self):
        if self.total_n < 0:
            raise ValueError("total_n must be nonnegative")
        if abs(self.mu_twice) > self.total_n or (self.mu_twice - self.total_n) % 2 != 0:
            raise ValueError("mu_twice must satisfy |2 mu| <= N with the parity of N")

    @property
    def n_a(self) -> int:
        return (self.total_n + self.mu_twice) // 2

    @property
    def n_b(self) -> int:
        return (self.total_n - self.mu_twice) // 2


def _jy_couplings(total_n: int) -> np.ndarray:
    """Off-diagonal couplings t_k = sqrt((k+1)(N-k))/2 between k and k+1."""
    k = np.arange(total_n)
    return 0.5 * np.sqrt((k + 1.0) * (total_n - k))


@dataclass(frozen=True)
class RotationBlock:
    """Real orthogonal rotation matrix for one total photon number.

    ``d[j, k]`` is the amplitude connecting k input photons in port b to j
    output photons in port b (mu = J - index).
    """

    total_n: int
    phi: float
    d: np.ndarray = field(repr=False)

    def entry(self, row: DickeIndex, col: DickeIndex) -> float:
        if row.total_n != self.total_n or col.total_n != self.total_n:
            raise ValueError("index total_n does not match block")
        return float(self.d[row.n_b, col.n_b])


def wigner_d_block(total_n: int, phi: float) -> RotationBlock:
    """Wigner small-d matrix exp(-i phi J_y) for total photon number N.

    Computed from the eigendecomposition of the tridiagonal J_y block (its
    eigenvalues are mu = -J..J), which keeps rows orthonormal for large N
    where recursion schemes lose accuracy.  phi = 0 returns the identity
    exactly.
    """
    if total_n < 0:
        raise ValueError("total_n must be nonnegative")
    if total_n > MAX_BLOCK_SIZE:
        raise SizeExceeded(f"rotation block for N={total_n} exceeds ceiling {MAX_BLOCK_SIZE}")
    dim = total_n + 1
    if phi == 0.0 or total_n == 0:
        return RotationBlock(total_n=total_n, phi=phi, d=np.eye(dim))
    # J_y = D S D^dag with D = diag(i^k) and S real symmetric tridiagonal, so
    # d = D W e^{-i phi m} W^T D^dag reduces to real combinations below.
    m, w = eigh_tridiagonal(np.zeros(dim), _jy_couplings(total_n))
    cos_part = (w * np.cos(phi * m)) @ w.T
    sin_part = (w * np.sin(phi * m)) @ w.T
    jk = np.subtract.outer(np.arange(dim), np.arange(dim)) % 4
    d = np.where(jk == 0, cos_part, 0.0)
    d += np.where(jk == 1, sin_part, 0.0)
    d -= np.where(jk == 2, cos_part, 0.0)
    d -= np.where(jk == 3, sin_part, 0.0)
    return RotationBlock(total_n=total_n, phi=phi, d=d)


def apply_jy_generator(vec: np.ndarray, total_n: int) -> np.ndarray:
    """Apply the real antisymmetric generator -i J_y to a coefficient vector."""
    t = _jy_couplings(total_n)
    out = np.zeros_like(vec)
    if total_n == 0:
        return out
    out[1:] += t * vec[:-1]
    out[:-1] -= t * vec[1:]
    return out


def conditional_probabilities(state: NPhotonState, phi: float) -> np.ndarray:
    """Outcome probabilities over k = photons in port b after the rotation."""
    block = wigner_d_block(state.total_n, phi)
    amp = block.d @ state.coeffs
    return amp**2


def probability_derivatives(state: NPhotonState, phi: float) -> np.ndarray:
    """Analytic d/dphi of the conditional probabilities (same indexing).

    Uses dP_k = 2 psi_k (G psi)_k with G = -i J_y applied tridiagonally to
    the rotated vector; the entries sum to zero by antisymmetry.
    """
    block = wigner_d_block(state.total_n, phi)
    amp = block.d @ state.coeffs
    return 2.0 * amp * apply_jy_generator(amp, state.total_n)


@dataclass(frozen=True)
class OutcomeDistribution:
    """Joint probabilities of all detectable photon-count pairs plus overflow.

    Rows are sorted by total photon number N, then by mu ascending (i.e.
    ``n_a`` ascending within each N).  ``overflow_prob`` aggregates every
    event with n_a + n_b > n_res; it carries no phase dependence.
    """

    n_res: int
    phi: float
    totals: np.ndarray = field(repr=False)
    n_a: np.ndarray = field(repr=False)
    n_b: np.ndarray = field(repr=False)
    probs: np.ndarray = field(repr=False)
    overflow_prob: float


def full_outcome_distribution(amps: AmplitudeTable, n_res: int, phi: float) -> OutcomeDistribution:
    """Distribution of photon-count outcomes up to the resolution threshold.

    Detectable events are all pairs with n_a + n_b <= n_res; the rest are
    lumped into the overflow outcome, whose probability 1 - sum_N G_N does
    not depend on phi.
    """
    if n_res < 0:
        raise ValueError("n_res must be nonnegative")
    if n_res > amps.cutoff:
        raise ValueError(f"n_res={n_res} exceeds table cutoff {amps.cutoff}")
    totals, n_a_list, n_b_list, probs = [], [], [], []
    for n in range(n_res + 1):
        g = generation_probability(amps, n)
        if g > 0.0:
            p_by_k = g * conditional_probabilities(postselect(amps, n), phi)
        else:
            p_by_k = np.zeros(n + 1)
        # index k = n_b; mu ascending means n_a ascending, so reverse.
        js = np.arange(n + 1)
        totals.append(np.full(n + 1, n))
        n_a_list.append(js)
        n_b_list.append(n - js)
        probs.append(p_by_k[::-1])
    probs_flat = np.concatenate(probs)
    overflow = max(0.0, 1.0 - math.fsum(probs_flat))
    return OutcomeDistribution(
        n_res=n_res,
        phi=phi,
        totals=np.concatenate(totals),
        n_a=np.concatenate(n_a_list),
        n_b=np.concatenate(n_b_list),
        probs=probs_flat,
        overflow_prob=overflow,
    )
