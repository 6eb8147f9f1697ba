"""Monte Carlo check that the implemented intervals reach their nominal coverage.

Trials run in fixed-size blocks. Block ``b`` draws its uniforms from a Philox
counter-based generator keyed by the scenario seed with the counter starting at
block ``b``, so each block's stream depends only on (seed, b). Blocks may run on any
number of worker threads and are reduced in block order, which keeps every result
bit-identical across degrees of parallelism.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.special import ndtri

from ..errors import DomainError, InvalidScenarioError
from ..models.simulation import MAX_SEED, CoverageResult, Method, SimulationScenario
from ..utils.logging import get_logger
from .intervals import arf_k_normal, arf_k_unknown
from .tdist import TCriticalQuery, t_quantile

LOGGER = get_logger("services.coverage")

BLOCK_SIZE = 8192
_PRIOR_STREAM = 1
_TINY = np.finfo(float).tiny

SWEEP_COLUMNS = ["n", "coverage", "mean_halfwidth", "relative_margin"]


@dataclass(frozen=True)
class _BlockOutcome:
    covered: int
    halfwidth_sum: float


def validate_scenario(scenario: SimulationScenario) -> None:
    if scenario.trials < 1:
        raise InvalidScenarioError(f"trials must be >= 1, got {scenario.trials}")
    if not scenario.true_stddev > 0:
        raise InvalidScenarioError(f"true_stddev must be positive, got {scenario.true_stddev}")
    if not 0.0 < scenario.confidence < 1.0:
        raise InvalidScenarioError(f"confidence must lie in (0, 1), got {scenario.confidence}")
    if not 0 <= scenario.seed < MAX_SEED:
        raise InvalidScenarioError(f"seed must lie in [0, 2**128), got {scenario.seed}")
    if scenario.method.is_arf:
        if scenario.n_observations != 1:
            raise InvalidScenarioError(
                f"{scenario.method.value} uses exactly one observation, got {scenario.n_observations}"
            )
        if scenario.prior_mean is None:
            raise InvalidScenarioError(f"{scenario.method.value} needs a prior_mean")
    elif scenario.n_observations < 2:
        raise InvalidScenarioError(
            f"T_INTERVAL needs n_observations >= 2, got {scenario.n_observations}"
        )


def _generator(seed: int, stream: int) -> np.random.Generator:
    # counter word 2 selects the stream; words 0-1 advance within it
    return np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, stream, 0]))


def _draw(rng: np.random.Generator, scenario: SimulationScenario, shape: Tuple[int, int]) -> np.ndarray:
    u = rng.random(shape)
    if scenario.population == "uniform":
        # same mean and standard deviation as the normal population
        half_range = math.sqrt(3.0) * scenario.true_stddev
        return scenario.true_mean + half_range * (2.0 * u - 1.0)
    return scenario.true_mean + scenario.true_stddev * ndtri(np.maximum(u, _TINY))


def _critical(scenario: SimulationScenario) -> float:
    alpha = 1.0 - scenario.confidence
    try:
        if scenario.method is Method.ARF_NORMAL:
            return arf_k_normal(alpha)
        if scenario.method is Method.ARF_UNKNOWN_FORMULA:
            return arf_k_unknown(alpha)
    except DomainError as exc:
        raise InvalidScenarioError(str(exc)) from exc
    return t_quantile(TCriticalQuery.confidence_level(scenario.n_observations - 1, scenario.confidence))


def _prior_mean(scenario: SimulationScenario) -> Optional[float]:
    if not scenario.method.is_arf:
        return None
    if scenario.prior_mode == "randomized":
        # drawn once per scenario, then held fixed for every trial
        z = float(ndtri(max(_generator(scenario.seed, _PRIOR_STREAM).random(), _TINY)))
        return float(scenario.prior_mean) + scenario.prior_spread * z
    return float(scenario.prior_mean)


def _run_block(
    scenario: SimulationScenario, critical: float, prior: Optional[float], block: int, size: int
) -> _BlockOutcome:
    # stream 0 and 1 are reserved, trial blocks start at 2
    rng = _generator(scenario.seed, block + 2)
    draws = _draw(rng, scenario, (size, scenario.n_observations))
    if scenario.method.is_arf:
        y = draws[:, 0]
        center = (y + prior) / 2.0
        half = critical * np.abs(y - prior)
    else:
        n = scenario.n_observations
        center = draws.mean(axis=1)
        half = critical * draws.std(axis=1, ddof=1) / math.sqrt(n)
    covered = int(np.count_nonzero(np.abs(center - scenario.true_mean) <= half))
    return _BlockOutcome(covered=covered, halfwidth_sum=float(half.sum()))


def run_coverage(scenario: SimulationScenario) -> CoverageResult:
    """Empirical coverage of the pre-clamp interval over ``scenario.trials`` draws."""

    validate_scenario(scenario)
    critical = _critical(scenario)
    prior = _prior_mean(scenario)

    blocks: List[Tuple[int, int]] = []
    remaining = scenario.trials
    index = 0
    while remaining > 0:
        size = min(BLOCK_SIZE, remaining)
        blocks.append((index, size))
        remaining -= size
        index += 1

    if scenario.workers > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=scenario.workers) as pool:
            outcomes = list(
                pool.map(lambda block: _run_block(scenario, critical, prior, *block), blocks)
            )
    else:
        outcomes = [_run_block(scenario, critical, prior, *block) for block in blocks]

    covered = sum(outcome.covered for outcome in outcomes)
    halfwidth_total = 0.0
    for outcome in outcomes:
        halfwidth_total += outcome.halfwidth_sum

    result = CoverageResult(
        empirical_coverage=covered / scenario.trials,
        covered_trials=covered,
        mean_halfwidth=halfwidth_total / scenario.trials,
        trials=scenario.trials,
        critical_value=critical,
        prior_mean_used=prior,
        scenario=scenario,
    )
    LOGGER.info(
        "coverage method=%s n=%s confidence=%s trials=%s coverage=%s",
        scenario.method.value,
        scenario.n_observations,
        scenario.confidence,
        scenario.trials,
        result.empirical_coverage,
    )
    return result


def width_vs_n_sweep(
    base: SimulationScenario,
    n_values: Sequence[int],
    include_single: Optional[bool] = None,
    single_method: Method = Method.ARF_NORMAL,
) -> pd.DataFrame:
    """Coverage and mean half-width of the t interval across sample sizes.

    When the base scenario carries a prior mean, an n = 1 ARF row built from the
    same population and confidence leads the table.
    """

    if not n_values:
        raise InvalidScenarioError("n_values must not be empty")
    bad = [n for n in n_values if n < 2]
    if bad:
        raise InvalidScenarioError(f"sweep sizes must be >= 2, got {bad}")
    if include_single is None:
        include_single = base.prior_mean is not None

    rows = []
    if include_single:
        single = base.model_copy(update={"method": single_method, "n_observations": 1})
        result = run_coverage(single)
        rows.append(_sweep_row(1, result, base.true_mean))
    for n in n_values:
        scenario = base.model_copy(update={"method": Method.T_INTERVAL, "n_observations": int(n)})
        rows.append(_sweep_row(int(n), run_coverage(scenario), base.true_mean))

    table = pd.DataFrame(rows, columns=SWEEP_COLUMNS)
    t_rows = table[table["n"] >= 2]["mean_halfwidth"]
    if not t_rows.is_monotonic_decreasing:
        LOGGER.warning("sweep_not_monotonic widths=%s", t_rows.round(4).tolist())
    return table


def coverage_table(result: CoverageResult) -> pd.DataFrame:
    """One-row frame in the sweep layout for a single coverage run."""

    row = _sweep_row(result.scenario.n_observations, result, result.scenario.true_mean)
    return pd.DataFrame([row], columns=SWEEP_COLUMNS)


def _sweep_row(n: int, result: CoverageResult, true_mean: float) -> dict:
    margin = result.mean_halfwidth / abs(true_mean) if true_mean else math.nan
    return {
        "n": n,
        "coverage": result.empirical_coverage,
        "mean_halfwidth": result.mean_halfwidth,
        "relative_margin": margin,
    }


__all__ = ["BLOCK_SIZE", "SWEEP_COLUMNS", "validate_scenario", "run_coverage", "coverage_table", "width_vs_n_sweep"]
