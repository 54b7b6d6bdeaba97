"""Preference settings, random profiles and the method comparison studies.

Every study cell is an independent unit of work, so sweeps can be spread
over processes; results always come back ordered by ``(n, case, method)``.
"""

import enum
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from typing import Iterable, List, Optional, Sequence

import numpy as np

from .core import PreferencePair, loss, maape
from .errors import (
    DeadEndError,
    DegenerateProductError,
    RejectionBudgetExceededError,
    TooFewOptionsError,
    UnknownCaseError,
    ZeroUsageError,
)
from .optimal import min_loss
from .optimize import OptimizerConfig, phom_pair_matrix
from .quantum import attenuation_expected_matrix
from .samplers import make_rng, random_order_matrix, uniform_random_matrix

REJECTION_BUDGET = 10**6
CASES = ("i", "ii", "iii", "iv")


class Method(str, enum.Enum):
    UNIFORM_RANDOM = "UniformRandom"
    OAM_ATTENUATION = "OamAttenuation"
    RANDOM_ORDER = "RandomOrder"
    PURE_HOM = "PureHom"
    OPTIMAL = "Optimal"

    def __str__(self):
        return self.value


#: methods compared against the optimum in the random-profile studies
STUDY_METHODS = (Method.OAM_ATTENUATION, Method.RANDOM_ORDER, Method.PURE_HOM)


class Constraint(str, enum.Enum):
    MAX_POP_LESS_THAN_1 = "lt1"
    MAX_POP_GREATER_THAN_1 = "gt1"

    def __str__(self):
        return self.value


@dataclass(frozen=True)
class ExperimentRecord:
    method: Method
    n: int
    case_id: str
    loss: float
    usage: Optional[float] = None
    maape: Optional[float] = None
    seed: int = 0
    wall_time: float = 0.0
    status: str = "ok"


def _case_number(case_id) -> int:
    key = str(case_id).strip().lower()
    names = {c: i for i, c in enumerate(CASES, 1)}
    names.update({str(i): i for i in range(1, 5)})
    if key not in names:
        raise UnknownCaseError(f"unknown preference case {case_id!r}; use one of {CASES}")
    return names[key]


def _from_log_weights(logw):
    w = np.exp(logw - logw.max())
    return w / w.sum()


def preference_case(case_id, n: int) -> PreferencePair:
    """The four fixed preference settings of the loss comparison.

    (i)   ``1 : 2 : ... : n`` for both players;
    (ii)  ``1 : 1 : 2 : 4 : ... : 2^(n-2)`` for both players;
    (iii) as (ii) but B holds the reversed sequence;
    (iv)  ``1 : 3 : ... : 3^(n-1)`` for both players.

    Geometric weights are normalised in log space so large ``n`` cannot overflow.
    """
    number = _case_number(case_id)
    if n < 3:
        raise TooFewOptionsError(f"preference cases need n >= 3, got {n}")
    k = np.arange(n, dtype=np.float64)
    if number == 1:
        a = (k + 1.0) / (n * (n + 1) / 2.0)
        return PreferencePair(a, a)
    if number == 4:
        a = _from_log_weights(k * np.log(3.0))
        return PreferencePair(a, a)
    logw = np.concatenate([[0.0], np.arange(n - 1) * np.log(2.0)])
    a = _from_log_weights(logw)
    if number == 2:
        return PreferencePair(a, a)
    return PreferencePair(a, a[::-1].copy())


def _flat_simplex(rng, n):
    e = rng.standard_exponential(n)
    return e / e.sum()


def _flat_simplex_max_above_half(rng, n):
    # Exact conditional law of the flat simplex given max > 1/2: at most one
    # coordinate can exceed 1/2, it is equally likely to be any index, and
    # P(x_i > 1 - s) = s^(n-1) for s <= 1/2, the rest being a scaled flat simplex.
    i = rng.integers(n)
    tail = 0.5 * rng.random() ** (1.0 / (n - 1))
    rest = _flat_simplex(rng, n - 1) * tail
    return np.insert(rest, i, 1.0 - tail)


def random_profile(n: int, constraint, rng: np.random.Generator) -> PreferencePair:
    """Symmetric pair ``A = B`` drawn from the flat simplex under a popularity constraint.

    ``lt1`` keeps draws with every popularity ``2 A_i`` below 1 by rejection.
    ``gt1`` samples the conditional law of ``max 2 A_i > 1`` directly, since
    plain rejection accepts only ``n / 2^(n-1)`` of draws.
    """
    constraint = Constraint(constraint)
    if n < 3:
        raise TooFewOptionsError(f"random profiles need n >= 3, got {n}")
    if constraint is Constraint.MAX_POP_GREATER_THAN_1:
        a = _flat_simplex_max_above_half(rng, n)
        return PreferencePair(a, a)
    for _ in range(REJECTION_BUDGET):
        a = _flat_simplex(rng, n)
        if 2.0 * a.max() < 1.0:
            return PreferencePair(a, a)
    raise RejectionBudgetExceededError(
        f"no profile with max popularity < 1 after {REJECTION_BUDGET} draws"
    )


def evaluate_methods(pair: PreferencePair, config: OptimizerConfig, methods=tuple(Method)):
    """Analytic loss of each method on ``pair``.

    Returns one ``(method, loss, usage, status, seconds)`` tuple per method.
    Failures that are properties of the model (dead ends, vanishing rates)
    are reported with a NaN loss and a status instead of raising.
    """
    out = []
    for method in methods:
        start = time.perf_counter()
        usage = None
        status = "ok"
        try:
            if method is Method.UNIFORM_RANDOM:
                value = loss(uniform_random_matrix(pair.n), pair)
            elif method is Method.OAM_ATTENUATION:
                value = loss(attenuation_expected_matrix(pair), pair)
            elif method is Method.RANDOM_ORDER:
                value = loss(random_order_matrix(pair), pair)
            elif method is Method.PURE_HOM:
                matrix, dist = phom_pair_matrix(pair, config)
                value = loss(matrix, pair)
                usage = dist.usage
            else:
                value = min_loss(pair)
        except DeadEndError:
            value, status = float("nan"), "dead-end"
        except ZeroUsageError:
            value, status = float("nan"), "zero-usage"
        except DegenerateProductError:
            value, status = float("nan"), "degenerate-product"
        out.append((method, float(value), usage, status, time.perf_counter() - start))
    return out


def _case_cell(args):
    n, case_id, config = args
    pair = preference_case(case_id, n)
    return [
        ExperimentRecord(method, n, case_id, value, usage, None, config.seed, seconds, status)
        for method, value, usage, status, seconds in evaluate_methods(pair, config)
    ]


def _map(fn, items, jobs):
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def compare_losses(
    n_range: Iterable[int],
    cases: Sequence = CASES,
    config: Optional[OptimizerConfig] = None,
    jobs: int = 1,
) -> List[ExperimentRecord]:
    """Loss of all five methods for every ``(n, case)`` cell.

    Pure HOM uses the realised matrix of both players' independently optimised
    settings; the other methods use their exact limiting matrices.
    """
    config = config or OptimizerConfig()
    cases = [CASES[_case_number(c) - 1] for c in cases]
    cells = [(n, c, config) for n in sorted(set(n_range)) for c in cases]
    for n, _, _ in cells:
        if n < 3:
            raise TooFewOptionsError(f"preference cases need n >= 3, got {n}")
    return [rec for block in _map(_case_cell, cells, jobs) for rec in block]


def _study_cell(args):
    n, constraint, profiles, seed, config = args
    rng = make_rng(seed, stream=n)
    losses = {m: [] for m in STUDY_METHODS}
    optimal = []
    usages = []
    statuses = {m: "ok" for m in STUDY_METHODS}
    seconds = dict.fromkeys(STUDY_METHODS, 0.0)
    for _ in range(profiles):
        pair = random_profile(n, constraint, rng)
        optimal.append(min_loss(pair))
        for method, value, usage, status, sec in evaluate_methods(pair, config, STUDY_METHODS):
            losses[method].append(value)
            seconds[method] += sec
            if status != "ok":
                statuses[method] = status
            if usage is not None:
                usages.append(usage)

    case_id = f"random-{constraint}"
    records = []
    for method in STUDY_METHODS:
        vals = np.asarray(losses[method])
        ok = np.isfinite(vals)
        score = None
        if constraint is Constraint.MAX_POP_GREATER_THAN_1:
            score = maape(np.asarray(optimal)[ok], vals[ok]) if ok.any() else float("nan")
        records.append(ExperimentRecord(
            method, n, case_id,
            float(np.mean(vals[ok])) if ok.any() else float("nan"),
            float(np.mean(usages)) if method is Method.PURE_HOM and usages else None,
            score, seed, seconds[method], statuses[method],
        ))
    return records


def phom_random_study(
    n_range: Iterable[int],
    constraint,
    profiles_per_n: int = 1000,
    seed: int = 0,
    config: Optional[OptimizerConfig] = None,
    jobs: int = 1,
) -> List[ExperimentRecord]:
    """Mean loss (``lt1``) or MAAPE against the optimum (``gt1``) on random profiles.

    Each ``n`` draws its profiles from its own seeded stream, so results do
    not depend on which other sizes are run or on the worker count.  The
    Pure HOM rows also carry the mean usage rate.
    """
    if profiles_per_n < 1:
        raise ValueError("profiles_per_n must be at least 1")
    constraint = Constraint(constraint)
    config = config or OptimizerConfig(seed=seed)
    cells = [(n, constraint, profiles_per_n, seed, config) for n in sorted(set(n_range))]
    return [rec for block in _map(_study_cell, cells, jobs) for rec in block]


def without_timing(records: Iterable[ExperimentRecord]) -> List[ExperimentRecord]:
    """Copies with ``wall_time`` zeroed, for byte-stable output."""
    return [replace(r, wall_time=0.0) for r in records]


__all__ = [
    "CASES", "Constraint", "ExperimentRecord", "Method", "STUDY_METHODS",
    "compare_losses", "evaluate_methods", "phom_random_study",
    "preference_case", "random_profile", "without_timing",
]
