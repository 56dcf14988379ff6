"""Fock-space description of the coherent + squeezed-vacuum input.

Amplitudes are tabulated at zero optical phases (the canonical phase-matched
form); any matched phase pair only multiplies a fixed-total-photon-number
component by a global phase, which cancels in every probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import CutoffOverflow, ZeroProbability
from .numerics import LogSigned, log_factorial, log_factorial_array

__all__ = [
    "LightSource",
    "AmplitudeTable",
    "NPhotonState",
    "coherent_amplitude",
    "squeezed_amplitude",
    "squeezed_number_distribution",
    "generation_probability",
    "postselect",
    "build_amplitude_table",
    "DEFAULT_TAIL_TOL",
    "HARD_MAX_CUTOFF",
]

DEFAULT_TAIL_TOL = 1e-12
HARD_MAX_CUTOFF = 4096

# Generation probabilities below this floor are reported as exact zero.
_PROB_FLOOR = 1e-300

_PHASE_TOL = 1e-12


def _wrap_angle(a: float) -> float:
    return (a + math.pi) % (2.0 * math.pi) - math.pi


@dataclass(frozen=True)
class LightSource:
    """Coherent amplitude (magnitude, phase) and squeezing (magnitude, phase)."""

    alpha_mag: float
    theta_a: float = 0.0
    xi_mag: float = 0.0
    theta_b: float = 0.0

    def __post_init__(self):
        if self.alpha_mag < 0 or self.xi_mag < 0:
            raise ValueError("alpha_mag and xi_mag must be nonnegative")

    @classmethod
    def from_mean_photons(cls, n_bar: float, alpha2: float) -> "LightSource":
        """Phase-matched source with mean photon number split alpha2 / (n_bar - alpha2)."""
        if not 0.0 <= alpha2 <= n_bar:
            raise ValueError("need 0 <= alpha2 <= n_bar")
        return cls(alpha_mag=math.sqrt(alpha2), xi_mag=math.asinh(math.sqrt(n_bar - alpha2)))

    @property
    def n_bar_a(self) -> float:
        return self.alpha_mag**2

    @property
    def n_bar_b(self) -> float:
        return math.sinh(self.xi_mag) ** 2

    @property
    def n_bar(self) -> float:
        return self.n_bar_a + self.n_bar_b

    @property
    def phase_matched(self) -> bool:
        """True when cos(theta_b - 2 theta_a) = +1 within angle tolerance."""
        return abs(_wrap_angle(self.theta_b - 2.0 * self.theta_a)) <= _PHASE_TOL


def coherent_amplitude(alpha_mag: float, n: int) -> LogSigned:
    """Fock amplitude <n|alpha> at zero phase: e^{-a^2/2} a^n / sqrt(n!)."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    if alpha_mag == 0.0:
        return LogSigned.one() if n == 0 else LogSigned.zero()
    log = -0.5 * alpha_mag**2 + n * math.log(alpha_mag) - 0.5 * log_factorial(n)
    return LogSigned(log, 1)


def squeezed_amplitude(xi_mag: float, k: int) -> LogSigned:
    """Fock amplitude <k|xi> at zero phase; zero for odd k.

    For k = 2m the value is (-1)^m sqrt((2m)!)/m! (tanh xi / 2)^m / sqrt(cosh xi).
    """
    if k < 0:
        raise ValueError("k must be nonnegative")
    if k % 2 == 1:
        return LogSigned.zero()
    if k == 0:
        return LogSigned(-0.5 * math.log(math.cosh(xi_mag)), 1)
    if xi_mag == 0.0:
        return LogSigned.zero()
    m = k // 2
    log = (
        0.5 * log_factorial(k)
        - log_factorial(m)
        + m * (math.log(math.tanh(xi_mag)) - math.log(2.0))
        - 0.5 * math.log(math.cosh(xi_mag))
    )
    return LogSigned(log, 1 if m % 2 == 0 else -1)


def _coherent_log_probs(alpha_mag: float, n_max: int) -> np.ndarray:
    """ln(c_n^2) for n in [0, n_max]."""
    if alpha_mag == 0.0:
        out = np.full(n_max + 1, -np.inf)
        out[0] = 0.0
        return out
    n = np.arange(n_max + 1)
    return -alpha_mag**2 + 2.0 * n * math.log(alpha_mag) - log_factorial_array(n_max)


def _squeezed_log_probs(xi_mag: float, n_max: int) -> np.ndarray:
    """ln(s_n^2) for n in [0, n_max]; -inf on odd n."""
    out = np.full(n_max + 1, -np.inf)
    out[0] = -math.log(math.cosh(xi_mag))
    if xi_mag == 0.0 or n_max < 2:
        return out
    m = np.arange(1, n_max // 2 + 1)
    lf = log_factorial_array(n_max)
    out[2 * m] = (
        lf[2 * m]
        - 2.0 * lf[m]
        + 2.0 * m * (math.log(math.tanh(xi_mag)) - math.log(2.0))
        - math.log(math.cosh(xi_mag))
    )
    return out


@dataclass(frozen=True)
class AmplitudeTable:
    """Log-domain Fock amplitudes of both inputs, tabulated at zero phases.

    ``coherent_log[n]`` / ``coherent_sign[n]`` encode c_n, and likewise
    ``squeezed_log`` / ``squeezed_sign`` encode s_k; signs are 0 exactly where
    the amplitude vanishes (odd k, or beyond a vacuum input).
    """

    alpha_mag: float
    xi_mag: float
    cutoff: int
    coherent_log: np.ndarray = field(repr=False)
    coherent_sign: np.ndarray = field(repr=False)
    squeezed_log: np.ndarray = field(repr=False)
    squeezed_sign: np.ndarray = field(repr=False)

    def coherent(self, n: int) -> LogSigned:
        s = int(self.coherent_sign[n])
        return LogSigned(float(self.coherent_log[n]) if s else float("-inf"), s)

    def squeezed(self, k: int) -> LogSigned:
        s = int(self.squeezed_sign[k])
        return LogSigned(float(self.squeezed_log[k]) if s else float("-inf"), s)


def build_amplitude_table(
    src: LightSource,
    tail_tol: float = DEFAULT_TAIL_TOL,
    cutoff: int | None = None,
    hard_max: int = HARD_MAX_CUTOFF,
) -> AmplitudeTable:
    """Tabulate both amplitude sequences up to a common cutoff.

    The cutoff is the smallest index at which both marginal photon-number
    tails drop below ``tail_tol`` (or the explicit ``cutoff`` if given, for
    truncated sums that never look past a detector threshold).  Raises
    :class:`CutoffOverflow` when the tail requirement cannot be met below
    ``hard_max``.
    """
    if cutoff is None:
        if not 0.0 < tail_tol <= 1e-3:
            raise ValueError("tail_tol must lie in (0, 1e-3]")
        cutoff = _required_cutoff(src, tail_tol, hard_max)
    elif cutoff > hard_max:
        raise CutoffOverflow(f"explicit cutoff {cutoff} exceeds hard maximum {hard_max}")

    c_log = _coherent_log_probs(src.alpha_mag, cutoff) / 2.0
    s_log = _squeezed_log_probs(src.xi_mag, cutoff) / 2.0
    c_sign = np.where(np.isfinite(c_log), 1, 0).astype(np.int8)
    k = np.arange(cutoff + 1)
    s_sign = np.where(np.isfinite(s_log), np.where((k // 2) % 2 == 0, 1, -1), 0).astype(np.int8)
    return AmplitudeTable(
        alpha_mag=src.alpha_mag,
        xi_mag=src.xi_mag,
        cutoff=cutoff,
        coherent_log=c_log,
        coherent_sign=c_sign,
        squeezed_log=s_log,
        squeezed_sign=s_sign,
    )


def _required_cutoff(src: LightSource, tail_tol: float, hard_max: int) -> int:
    probe = hard_max
    pc = np.exp(_coherent_log_probs(src.alpha_mag, probe))
    ps = np.exp(_squeezed_log_probs(src.xi_mag, probe))
    need_c = _tail_index(pc, tail_tol)
    need_s = _tail_index(ps, tail_tol)
    if need_c is None or need_s is None:
        raise CutoffOverflow(
            f"tail_tol={tail_tol:g} needs a cutoff beyond hard maximum {hard_max} "
            f"(alpha^2={src.n_bar_a:g}, sinh^2 xi={src.n_bar_b:g})"
        )
    return max(need_c, need_s)


def _tail_index(probs: np.ndarray, tail_tol: float) -> int | None:
    cum = np.cumsum(probs)
    idx = np.nonzero(cum >= 1.0 - tail_tol)[0]
    if idx.size == 0:
        return None
    return int(idx[0])


def squeezed_number_distribution(xi_mag: float, k_max: int, mode: str = "exact") -> np.ndarray:
    """Photon-number distribution of the squeezed vacuum up to index k_max.

    ``exact`` squares the amplitudes; ``stirling`` uses the factorial-free
    closed form (1/cosh xi) tanh^{2k} xi / sqrt(pi k) for pair index k >= 1.
    The k = 0 entry is exact in both modes (the closed form diverges there).
    Odd entries are identically zero.
    """
    if k_max < 0:
        raise ValueError("k_max must be nonnegative")
    if mode not in ("exact", "stirling"):
        raise ValueError(f"unknown mode {mode!r}")
    if mode == "exact":
        return np.exp(_squeezed_log_probs(xi_mag, k_max))
    out = np.zeros(k_max + 1)
    out[0] = 1.0 / math.cosh(xi_mag)
    if xi_mag > 0.0:
        m = np.arange(1, k_max // 2 + 1)
        out[2 * m] = np.exp(2.0 * m * math.log(math.tanh(xi_mag))) / (math.cosh(xi_mag) * np.sqrt(math.pi * m))
    return out


def _pair_log_weights(amps: AmplitudeTable, total_n: int) -> tuple[np.ndarray, np.ndarray]:
    """Log weights ln|c_{N-k} s_k|^2 over k for photon-number pairs summing to total_n."""
    lo = max(0, total_n - amps.cutoff)
    hi = min(total_n, amps.cutoff)
    if hi < lo:
        return np.empty(0, dtype=int), np.empty(0)
    k = np.arange(lo, hi + 1)
    logs = 2.0 * (amps.coherent_log[total_n - k] + amps.squeezed_log[k])
    valid = (amps.coherent_sign[total_n - k] != 0) & (amps.squeezed_sign[k] != 0)
    return k[valid], logs[valid]


def _log_generation_probability(amps: AmplitudeTable, total_n: int) -> float:
    _, logs = _pair_log_weights(amps, total_n)
    if logs.size == 0:
        return -math.inf
    m = float(np.max(logs))
    return m + math.log(math.fsum(np.exp(logs - m)))


def generation_probability(amps: AmplitudeTable, total_n: int) -> float:
    """Probability G_N that the input carries exactly ``total_n`` photons.

    Computed in log domain with a single final exponentiation; values below
    1e-300 are reported as 0.
    """
    if total_n < 0:
        raise ValueError("total_n must be nonnegative")
    log_g = _log_generation_probability(amps, total_n)
    if log_g == -math.inf or log_g < math.log(_PROB_FLOOR):
        return 0.0
    return math.exp(log_g)


@dataclass(frozen=True)
class NPhotonState:
    """Normalized component with fixed total photon number.

    ``coeffs[k]`` is the amplitude of k photons in the squeezed port (and
    total_n - k in the coherent port); odd-k entries vanish for a squeezed
    vacuum input.
    """

    total_n: int
    coeffs: np.ndarray = field(repr=False)
    gen_prob: float

    def __post_init__(self):
        if len(self.coeffs) != self.total_n + 1:
            raise ValueError("coeffs must have length total_n + 1")


def postselect(amps: AmplitudeTable, total_n: int) -> NPhotonState:
    """Normalized fixed-total-photon-number component and its weight G_N.

    The component is faithful only for ``total_n <= amps.cutoff``; beyond
    that the pair sum is clipped to the table's support (acceptable for the
    vanishing-weight tail, not for per-component physics).  Raises
    :class:`ZeroProbability` when the component has zero weight (e.g. odd
    totals for a pure squeezed-vacuum input).
    """
    ks, logs = _pair_log_weights(amps, total_n)
    if logs.size == 0:
        raise ZeroProbability(f"no {total_n}-photon component in this input")
    m = float(np.max(logs))
    norm = math.fsum(np.exp(logs - m))
    log_g = m + math.log(norm)
    if log_g < math.log(_PROB_FLOOR):
        raise ZeroProbability(f"{total_n}-photon component has weight below {_PROB_FLOOR:g}")
    coeffs = np.zeros(total_n + 1)
    signs = amps.coherent_sign[total_n - ks] * amps.squeezed_sign[ks]
    coeffs[ks] = signs * np.exp(0.5 * (logs - m) - 0.5 * math.log(norm))
    return NPhotonState(total_n=total_n, coeffs=coeffs, gen_prob=math.exp(log_g))
