"""Optimization studies: best single-component detection events, best coherent
fraction of the input at a fixed detector threshold, and power-law fits of the
optima against the mean photon number."""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, NamedTuple, Sequence

import numpy as np

from .errors import InsufficientData
from .fisher import qfi_per_n_operator_oracle, total_fisher_approx, total_fisher_ideal, truncated_total_qfi
from .states import (
    DEFAULT_TAIL_TOL,
    LightSource,
    build_amplitude_table,
    generation_probability,
    postselect,
)

__all__ = [
    "ComponentOptimum",
    "ScanResult",
    "ScanRow",
    "ComponentScanRow",
    "PowerLawFit",
    "optimize_single_component",
    "optimize_alpha",
    "scaling_scan",
    "component_scan",
    "fit_power_law",
]


class ComponentOptimum(NamedTuple):
    n_opt: int
    alpha2_opt: float
    value: float


@dataclass(frozen=True)
class ScanResult:
    """Grid of (control value, objective) pairs with the refined argmax."""

    grid: tuple[tuple[float, float], ...]
    argmax: float
    max_value: float
    resolution: float


class ScanRow(NamedTuple):
    n_bar: float
    n_res: int | None
    alpha2_opt: float
    fq_opt: float
    fq_ideal: float


class ComponentScanRow(NamedTuple):
    n_bar: float
    n_opt: int
    alpha2_opt: float
    value: float


@dataclass(frozen=True)
class PowerLawFit:
    """Least-squares fit of value = c * n^p on log-log axes."""

    prefactor: float
    exponent: float
    residual: float
    n_range: tuple[float, float]

    def to_json_dict(self) -> dict:
        return {
            "c": self.prefactor,
            "p": self.exponent,
            "rms": self.residual,
            "n_min": self.n_range[0],
            "n_max": self.n_range[1],
        }


def default_component_n_max(n_bar: float) -> int:
    """Largest component worth scanning; optima sit near 1.3 n_bar."""
    return max(16, math.ceil(2.5 * n_bar) + 8)


def optimize_single_component(
    n_bar: float,
    grid_alpha: float = 0.01,
    n_max: int | None = None,
) -> ComponentOptimum:
    """Joint maximum of (component weight) x (per-component Fisher information)
    over the component size N and the coherent fraction alpha^2.

    alpha^2 runs over [0, n_bar] in steps of ``grid_alpha * n_bar``; ties are
    broken toward smaller N, then smaller alpha^2.  The objective uses the
    operator-based per-component value.
    """
    if n_bar <= 0:
        raise ValueError("n_bar must be positive")
    if n_max is None:
        n_max = default_component_n_max(n_bar)
    num = round(1.0 / grid_alpha) + 1
    alphas = np.linspace(0.0, n_bar, num)
    objective = np.zeros((n_max + 1, num))
    for i, a2 in enumerate(alphas):
        amps = build_amplitude_table(LightSource.from_mean_photons(n_bar, float(a2)), cutoff=n_max)
        for n in range(n_max + 1):
            g = generation_probability(amps, n)
            if g > 0.0:
                objective[n, i] = g * qfi_per_n_operator_oracle(postselect(amps, n))
    flat = int(np.argmax(objective))  # C order: first max = smallest N, then smallest alpha^2
    n_opt, i_opt = divmod(flat, num)
    return ComponentOptimum(n_opt=int(n_opt), alpha2_opt=float(alphas[i_opt]), value=float(objective[n_opt, i_opt]))


def _exact_objective(n_bar: float, n_res: int | None, tail_tol: float) -> Callable[[float], float]:
    def f(alpha2: float) -> float:
        src = LightSource.from_mean_photons(n_bar, alpha2)
        if n_res is None:
            amps = build_amplitude_table(src, tail_tol=tail_tol)
        else:
            amps = build_amplitude_table(src, cutoff=n_res)
        return truncated_total_qfi(amps, n_res)

    return f


def _approx_objective(n_bar: float, n_res: int | None) -> Callable[[float], float]:
    def f(alpha2: float) -> float:
        return total_fisher_approx(LightSource.from_mean_photons(n_bar, alpha2), n_res)

    return f


def _golden_max(f: Callable[[float], float], lo: float, hi: float, tol: float) -> tuple[float, float]:
    """Golden-section maximization tracking the best point actually evaluated."""
    invphi = (math.sqrt(5.0) - 1.0) / 2.0
    c = hi - invphi * (hi - lo)
    d = lo + invphi * (hi - lo)
    fc, fd = f(c), f(d)
    best_x, best_f = (c, fc) if fc >= fd else (d, fd)
    while hi - lo > tol:
        if fc >= fd:
            hi, d, fd = d, c, fc
            c = hi - invphi * (hi - lo)
            fc = f(c)
            x, fx = c, fc
        else:
            lo, c, fc = c, d, fd
            d = lo + invphi * (hi - lo)
            fd = f(d)
            x, fx = d, fd
        if fx > best_f:
            best_x, best_f = x, fx
    return best_x, best_f


def optimize_alpha(
    n_bar: float,
    n_res: int | None,
    engine: str = "exact",
    grid_step: float = 0.01,
    refine: bool = True,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> ScanResult:
    """Maximize the total Fisher information over the coherent fraction alpha^2
    at fixed mean photon number and detector threshold.

    A grid scan with step ``grid_step * n_bar`` is followed by golden-section
    refinement inside the winning bracket (the objective can be flat-topped,
    so the grid stage is kept).  ``engine`` picks the double-sum evaluation
    ("exact") or the erfc closed form ("approx"); the closed form's invalid
    region (alpha^2 - 1 > n_res, or no squeezing at all) is excluded from the
    grid.  ``n_res=None`` means unlimited resolution.
    """
    if n_bar <= 0:
        raise ValueError("n_bar must be positive")
    if engine == "exact":
        f = _exact_objective(n_bar, n_res, tail_tol)
    elif engine == "approx":
        f = _approx_objective(n_bar, n_res)
    else:
        raise ValueError(f"unknown engine {engine!r}")
    num = round(1.0 / grid_step) + 1
    alphas = np.linspace(0.0, n_bar, num)
    if engine == "approx":
        keep = alphas < n_bar  # need a squeezed component
        if n_res is not None:
            keep &= alphas <= n_res + 1.0
        alphas = alphas[keep]
        if alphas.size == 0:
            raise ValueError("closed form is invalid on the whole grid")
    values = np.array([f(float(a)) for a in alphas])
    i = int(np.argmax(values))  # first occurrence = smallest alpha^2 on ties
    best_x, best_f = float(alphas[i]), float(values[i])
    if refine and alphas.size > 1:
        lo = float(alphas[max(0, i - 1)])
        hi = float(alphas[min(alphas.size - 1, i + 1)])
        x, fx = _golden_max(f, lo, hi, tol=1e-3 * grid_step * n_bar)
        if fx > best_f:
            best_x, best_f = x, fx
    return ScanResult(
        grid=tuple((float(a), float(v)) for a, v in zip(alphas, values)),
        argmax=best_x,
        max_value=best_f,
        resolution=grid_step * n_bar,
    )


def scaling_scan(
    n_values: Sequence[float],
    n_res_factor: float | None,
    engine: str = "exact",
    grid_step: float = 0.01,
    threads: int = 1,
    tail_tol: float = DEFAULT_TAIL_TOL,
) -> list[ScanRow]:
    """One optimize_alpha result per mean photon number.

    ``n_res_factor`` scales the threshold with the mean photon number
    (n_res = round(factor * n_bar)); ``None`` scans with unlimited resolution.
    Rows come back in input order regardless of worker count.
    """
    if list(n_values) != sorted(n_values):
        raise ValueError("n_values must be sorted ascending")

    def one(n_bar: float) -> ScanRow:
        n_res = None if n_res_factor is None else int(round(n_res_factor * n_bar))
        res = optimize_alpha(n_bar, n_res, engine=engine, grid_step=grid_step, tail_tol=tail_tol)
        ideal = total_fisher_ideal(LightSource.from_mean_photons(n_bar, res.argmax))
        return ScanRow(n_bar=n_bar, n_res=n_res, alpha2_opt=res.argmax, fq_opt=res.max_value, fq_ideal=ideal)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, n_values))
    return [one(float(n)) for n in n_values]


def component_scan(
    n_values: Sequence[float],
    grid_alpha: float = 0.01,
    threads: int = 1,
) -> list[ComponentScanRow]:
    """Single-component joint optimum for each mean photon number."""
    def one(n_bar: float) -> ComponentScanRow:
        opt = optimize_single_component(n_bar, grid_alpha=grid_alpha)
        return ComponentScanRow(n_bar=n_bar, n_opt=opt.n_opt, alpha2_opt=opt.alpha2_opt, value=opt.value)

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(one, n_values))
    return [one(float(n)) for n in n_values]


def fit_power_law(points: Iterable[tuple[float, float]]) -> PowerLawFit:
    """Least-squares fit of log(value) = log(c) + p log(n).

    Needs at least five points with positive abscissae and values; the
    residual is the RMS of the log-domain misfit.
    """
    pts = [(float(n), float(v)) for n, v in points]
    if len(pts) < 5:
        raise InsufficientData(f"power-law fit needs >= 5 points, got {len(pts)}")
    ns = np.array([p[0] for p in pts])
    vs = np.array([p[1] for p in pts])
    if np.any(ns <= 0) or np.any(vs <= 0):
        raise ValueError("power-law fit requires positive n and values")
    ln_n = np.log(ns)
    ln_v = np.log(vs)
    exponent, log_c = np.polyfit(ln_n, ln_v, 1)
    resid = ln_v - (log_c + exponent * ln_n)
    return PowerLawFit(
        prefactor=float(np.exp(log_c)),
        exponent=float(exponent),
        residual=float(np.sqrt(np.mean(resid**2))),
        n_range=(float(ns.min()), float(ns.max())),
    )
