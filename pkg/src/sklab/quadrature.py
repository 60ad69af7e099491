"""Radial power integrals, divergence detection, and principal-value limits.

Three layers:

* `power_integral` / `zero_end_integral`: exact closed forms for
  int r^a dr over (r0, r1), including the logarithmic a = -1 case and the
  convergence verdicts at the zero and infinity endpoints.
* `detect_by_radius_doubling`: an observational detector that watches partial
  integrals under truncation-radius doubling and declares convergence or
  divergence from the increment behaviour alone.
* `cpv_limit`: principal-value limits by polynomial extrapolation in
  epsilon^gamma, with the rate gamma fitted from the data.

Plus a seeded polar-form Monte Carlo integrator for weighted L^p kernel
integrals, used to cross-validate the closed-form radial reductions.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .domains import RadialDomain, WeightedMeasure, LEBESGUE, radial_measure, radial_reduction
from .kernels import KernelSpec, kernel_norms

DEFAULT_SEED = 0x5EED

# Divergence is declared when increments fail to decay across this many
# consecutive doubling steps (or the running value passes the growth cap).
GROWTH_CAP = 1e12
CONVERGE_RATIO = 0.95
DIVERGE_RATIO = 0.99
CONSECUTIVE_STEPS = 3

DEFAULT_GAMMA_GRID = tuple(round(0.1 * k, 10) for k in range(1, 20))

_MC_CHUNK = 1 << 18


class DivergenceEnd(str, enum.Enum):
    AT_ZERO = "at_zero"
    AT_INFINITY = "at_infinity"
    NONE = "none"


@dataclass(frozen=True)
class ConvergenceReport:
    """Verdict on an improper integral or limit.

    `value` is present exactly when the quantity converges. `tail_exponent`
    is the radial exponent for closed forms, or the fitted extrapolation
    rate gamma for principal-value limits.
    """

    converges: bool
    value: float | None
    divergence_end: DivergenceEnd
    closed_form_used: bool
    tail_exponent: float
    numeric_estimate: float | None = None


def power_integral(a, r0: float, r1: float) -> ConvergenceReport:
    """int_{r0}^{r1} r^a dr in closed form, r1 = inf allowed.

    r0 must be positive; behaviour at the zero endpoint is a separate query
    (`zero_end_integral` / `converges_at_zero`).
    """
    if r0 <= 0:
        raise ValueError(f"lower limit must be positive, got {r0}")
    if not r0 < r1:
        raise ValueError(f"need r0 < r1, got ({r0}, {r1})")
    is_log = a == -1
    a_f = float(a)
    if math.isinf(r1):
        if is_log or a_f > -1:
            return ConvergenceReport(
                converges=False,
                value=None,
                divergence_end=DivergenceEnd.AT_INFINITY,
                closed_form_used=True,
                tail_exponent=a_f,
            )
        value = -(r0 ** (a_f + 1)) / (a_f + 1)
    elif is_log:
        value = math.log(r1 / r0)
    else:
        value = (r1 ** (a_f + 1) - r0 ** (a_f + 1)) / (a_f + 1)
    return ConvergenceReport(
        converges=True,
        value=value,
        divergence_end=DivergenceEnd.NONE,
        closed_form_used=True,
        tail_exponent=a_f,
    )


def converges_at_zero(a) -> bool:
    """Whether int_0 r^a dr is finite at the zero endpoint: a > -1."""
    return a > -1


def zero_end_integral(a, r1: float) -> ConvergenceReport:
    """int_0^{r1} r^a dr: finite iff a > -1, else divergence at zero."""
    if not 0 < r1 < math.inf:
        raise ValueError(f"upper limit must be positive and finite, got {r1}")
    a_f = float(a)
    if not converges_at_zero(a):
        return ConvergenceReport(
            converges=False,
            value=None,
            divergence_end=DivergenceEnd.AT_ZERO,
            closed_form_used=True,
            tail_exponent=a_f,
        )
    value = r1 ** (a_f + 1) / (a_f + 1)
    return ConvergenceReport(
        converges=True,
        value=value,
        divergence_end=DivergenceEnd.NONE,
        closed_form_used=True,
        tail_exponent=a_f,
    )


# ---------------------------------------------------------------------------
# Principal-value limits


def _neville_at_zero(t: np.ndarray, v: np.ndarray) -> tuple[float, float]:
    """Polynomial extrapolation of (t_i, v_i) to t = 0.

    Returns (estimate, error_estimate) where the error estimate is the last
    diagonal correction of the Neville tableau.
    """
    m = len(t)
    tableau = v.astype(float).copy()
    prev_diag = tableau[m - 1]
    for order in range(1, m):
        for i in range(m - 1, order - 1, -1):
            denom = t[i - order] - t[i]
            tableau[i] = (t[i - order] * tableau[i] - t[i] * tableau[i - 1]) / denom
        correction = abs(tableau[m - 1] - prev_diag)
        prev_diag = tableau[m - 1]
    return float(tableau[m - 1]), float(correction)


def cpv_limit(
    evaluator: Callable[[float], float],
    schedule: Sequence[float],
    gamma_grid: Sequence[float] = DEFAULT_GAMMA_GRID,
    growth_cap: float = GROWTH_CAP,
    growth_ratio: float = CONVERGE_RATIO,
) -> ConvergenceReport:
    """Limit of evaluator(eps) as eps -> 0 by extrapolation on a schedule.

    The schedule must decrease strictly to 0 with at least 4 entries. The
    model is value(eps) ~ L + C eps^gamma with gamma chosen from `gamma_grid`
    by extrapolation self-consistency. Divergence is declared when the
    successive differences fail to decay (their last three ratios all reach
    `growth_ratio`, which covers logarithmic blow-up) or any value passes
    `growth_cap` in magnitude.
    """
    eps = np.asarray(list(schedule), dtype=float)
    if len(eps) < 4:
        raise ValueError("schedule needs at least 4 entries")
    if not (np.all(eps > 0) and np.all(np.diff(eps) < 0)):
        raise ValueError("schedule must decrease strictly to 0")
    values = np.array([float(evaluator(e)) for e in eps])

    def _divergent() -> ConvergenceReport:
        return ConvergenceReport(
            converges=False,
            value=None,
            divergence_end=DivergenceEnd.AT_ZERO,
            closed_form_used=False,
            tail_exponent=math.nan,
            numeric_estimate=float(values[-1]),
        )

    if np.any(~np.isfinite(values)) or np.any(np.abs(values) > growth_cap):
        return _divergent()

    deltas = np.abs(np.diff(values))
    if np.all(deltas == 0.0):
        return ConvergenceReport(
            converges=True,
            value=float(values[-1]),
            divergence_end=DivergenceEnd.NONE,
            closed_form_used=False,
            tail_exponent=0.0,
            numeric_estimate=float(values[-1]),
        )
    tail = deltas[-(CONSECUTIVE_STEPS + 1):]
    if np.all(tail > 0):
        ratios = tail[1:] / tail[:-1]
        if len(ratios) >= 2 and np.all(ratios >= growth_ratio):
            return _divergent()

    best_value, best_err, best_gamma = math.inf, math.inf, math.nan
    for gamma in gamma_grid:
        estimate, err = _neville_at_zero(eps**gamma, values)
        if math.isfinite(estimate) and err < best_err:
            best_value, best_err, best_gamma = estimate, err, gamma
    return ConvergenceReport(
        converges=True,
        value=best_value,
        divergence_end=DivergenceEnd.NONE,
        closed_form_used=False,
        tail_exponent=best_gamma,
        numeric_estimate=float(values[-1]),
    )


def geometric_schedule(start: float = 1e-1, stop: float = 1e-6, count: int = 6) -> list[float]:
    """Default strictly decreasing puncture schedule for cpv_limit."""
    return list(np.geomspace(start, stop, count))


# ---------------------------------------------------------------------------
# Radius-doubling divergence detection


class DoublingStatus(str, enum.Enum):
    CONVERGED = "converged"
    DIVERGENT = "divergent"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class DoublingReport:
    status: DoublingStatus
    estimate: float | None
    doublings: int
    last_ratio: float | None


def detect_by_radius_doubling(
    partial_integral: Callable[[float, float], float],
    r0: float,
    max_doublings: int = 20,
    converge_ratio: float = CONVERGE_RATIO,
    diverge_ratio: float = DIVERGE_RATIO,
    cap: float = GROWTH_CAP,
    consecutive: int = CONSECUTIVE_STEPS,
) -> DoublingReport:
    """Classify int_{r0}^inf by watching shell increments under R -> 2R.

    `partial_integral(lo, hi)` must return the (nonnegative) integral over a
    shell. Convergence is declared after `consecutive` increment ratios at or
    below `converge_ratio` (with a geometric tail estimate added), divergence
    after `consecutive` ratios at or above `diverge_ratio` (constant
    increments, i.e. logarithmic growth, included) or once the running total
    passes `cap`.
    """
    if r0 <= 0:
        raise ValueError(f"starting radius must be positive, got {r0}")
    total = 0.0
    prev_increment = None
    converge_run = diverge_run = 0
    ratio = None
    for k in range(1, max_doublings + 1):
        lo, hi = r0 * 2.0 ** (k - 1), r0 * 2.0**k
        increment = float(partial_integral(lo, hi))
        total += increment
        if total > cap:
            return DoublingReport(DoublingStatus.DIVERGENT, None, k, ratio)
        if prev_increment is not None:
            if prev_increment == 0.0:
                ratio = 0.0 if increment == 0.0 else math.inf
            else:
                ratio = increment / prev_increment
            if ratio <= converge_ratio:
                converge_run += 1
                diverge_run = 0
            elif ratio >= diverge_ratio:
                diverge_run += 1
                converge_run = 0
            else:
                converge_run = diverge_run = 0
            if converge_run >= consecutive:
                tail = increment * ratio / (1.0 - ratio) if ratio < 1.0 else 0.0
                return DoublingReport(DoublingStatus.CONVERGED, total + tail, k, ratio)
            if diverge_run >= consecutive:
                return DoublingReport(DoublingStatus.DIVERGENT, None, k, ratio)
        prev_increment = increment
    return DoublingReport(DoublingStatus.UNDECIDED, total, max_doublings, ratio)


# ---------------------------------------------------------------------------
# Polar-form Monte Carlo


@dataclass(frozen=True)
class MonteCarloEstimate:
    value: float
    std_error: float
    samples: int
    seed: int


def thread_cap() -> int:
    """Worker cap: SKL_THREADS when set, else machine parallelism."""
    env = os.environ.get("SKL_THREADS")
    if env:
        try:
            cap = int(env)
        except ValueError as exc:
            raise ValueError(f"SKL_THREADS must be an integer, got {env!r}") from exc
        if cap >= 1:
            return cap
    return os.cpu_count() or 1


def _mc_chunk_moments(
    spec: KernelSpec,
    p: float,
    s: float,
    r0: float,
    r1: float,
    count: int,
    seed: int,
    chunk_index: int,
) -> tuple[float, float]:
    rng = np.random.default_rng([seed, chunk_index])
    u = rng.random(count)
    # Radius from the exact radial density of mu: proportional to r^s.
    radii = (r0 ** (s + 1) + u * (r1 ** (s + 1) - r0 ** (s + 1))) ** (1.0 / (s + 1))
    if spec.n == 1:
        directions = rng.choice((-1.0, 1.0), size=(count, 1))
    else:
        directions = rng.standard_normal((count, spec.n))
        directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    g = kernel_norms(spec, radii[:, None] * directions) ** p
    return float(np.sum(g)), float(np.sum(g * g))


def numeric_lp_integral(
    spec: KernelSpec,
    p: float,
    measure: WeightedMeasure = LEBESGUE,
    domain: RadialDomain | None = None,
    budget: int = 1_000_000,
    seed: int = DEFAULT_SEED,
    max_workers: int | None = None,
) -> MonteCarloEstimate:
    """Monte Carlo estimate of int ||kernel||^p dmu over a bounded domain.

    Radii are drawn from the exact radial density of the weighted measure
    (no box rejection), directions uniformly on the sphere; the kernel is
    evaluated pointwise through its components. Deterministic for a fixed
    seed and budget: samples are split into fixed chunks with per-chunk
    counter-based RNG streams, so the result is independent of the worker
    count.
    """
    if domain is None:
        raise ValueError("a bounded (or truncated exterior) domain is required")
    if domain.n != spec.n:
        raise ValueError(f"domain dimension {domain.n} != kernel dimension {spec.n}")
    if budget < 1:
        raise ValueError(f"sample budget must be >= 1, got {budget}")
    r0, r1 = domain.truncated_extent()
    if r0 <= 0:
        raise ValueError("Monte Carlo integration requires a punctured domain (r_in > 0)")
    mass = radial_measure(spec.n, measure, r0, r1)
    s = spec.n - 1 + measure.w
    p = float(p)

    sizes = [_MC_CHUNK] * (budget // _MC_CHUNK)
    if budget % _MC_CHUNK:
        sizes.append(budget % _MC_CHUNK)
    workers = min(max_workers or thread_cap(), len(sizes))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            moments = list(
                pool.map(
                    lambda ic: _mc_chunk_moments(spec, p, s, r0, r1, ic[1], seed, ic[0]),
                    enumerate(sizes),
                )
            )
    else:
        moments = [
            _mc_chunk_moments(spec, p, s, r0, r1, size, seed, i)
            for i, size in enumerate(sizes)
        ]
    # Chunk-ordered reduction keeps the sum bit-stable across worker counts.
    total = sum(m[0] for m in moments)
    total_sq = sum(m[1] for m in moments)
    mean = total / budget
    variance = max(total_sq / budget - mean * mean, 0.0)
    return MonteCarloEstimate(
        value=mass * mean,
        std_error=mass * math.sqrt(variance / budget),
        samples=budget,
        seed=seed,
    )


def closed_form_lp_integral(
    spec: KernelSpec,
    p,
    measure: WeightedMeasure = LEBESGUE,
    domain: RadialDomain | None = None,
) -> ConvergenceReport:
    """Exact weighted L^p kernel integral via the radial reduction.

    Divergence (at either endpoint) is a result, not an error; the report
    carries the offending end.
    """
    if domain is None:
        raise ValueError("domain is required")
    form = radial_reduction(spec, p, measure, domain)
    r0, r1 = domain.radial_extent
    if r0 == 0.0:
        report = zero_end_integral(form.exponent, r1)
    else:
        report = power_integral(form.exponent, r0, r1)
    if not report.converges:
        return report
    return ConvergenceReport(
        converges=True,
        value=form.constant * report.value,
        divergence_end=DivergenceEnd.NONE,
        closed_form_used=True,
        tail_exponent=report.tail_exponent,
    )
