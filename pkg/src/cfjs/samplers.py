"""Monte Carlo draws of conflict-free joint selections.

Every sampler comes in two flavours: a single-draw function that follows
the physical or classical procedure step by step and returns a
:class:`DrawOutcome`, and a vectorised ``*_batch`` function returning a
:class:`DrawBatch` for large experiments.  Both obey the same law.
"""

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import JointMatrix, PreferencePair
from .errors import DeadEndError, DimensionMismatchError, TooFewOptionsError
from .quantum import HomDistribution, attenuation_expected_matrix, require_usage

PhasePolicy = Callable[[np.random.Generator, int, int], np.ndarray]


def uniform_phases(rng: np.random.Generator, size: int, k: int) -> np.ndarray:
    """I.i.d. source phases on ``[0, 2 pi)``, shape ``(size, k)``."""
    return rng.uniform(0.0, 2.0 * np.pi, size=(size, k))


def make_rng(seed: Optional[int] = None, stream: int = 0) -> np.random.Generator:
    """Independent generator for ``(seed, stream)``."""
    return np.random.default_rng([stream, 0 if seed is None else seed])


@dataclass(frozen=True)
class DrawOutcome:
    choice_a: int
    choice_b: int
    attempts: int = 1

    def __post_init__(self):
        if self.choice_a == self.choice_b:
            raise AssertionError(f"conflicting draw on option {self.choice_a}")
        if self.attempts < 1:
            raise AssertionError("attempts must be at least 1")


@dataclass
class DrawBatch:
    """Vectorised draws.  ``failed`` counts dead-end draws that produced no choice."""

    choice_a: np.ndarray
    choice_b: np.ndarray
    attempts: np.ndarray
    failed: int = 0
    stats: dict = field(default_factory=dict)

    def __len__(self):
        return self.choice_a.size

    def outcomes(self):
        for i, j, t in zip(self.choice_a, self.choice_b, self.attempts):
            yield DrawOutcome(int(i), int(j), int(t))


@dataclass
class EmpiricalMatrix:
    counts: np.ndarray
    draws: int = 0

    @classmethod
    def empty(cls, n: int) -> "EmpiricalMatrix":
        return cls(np.zeros((n, n), dtype=np.int64), 0)

    def add(self, choice_a, choice_b) -> "EmpiricalMatrix":
        ia = np.atleast_1d(np.asarray(choice_a, dtype=np.int64))
        ib = np.atleast_1d(np.asarray(choice_b, dtype=np.int64))
        if np.any(ia == ib):
            raise AssertionError("conflicting draw in stream")
        np.add.at(self.counts, (ia, ib), 1)
        self.draws += ia.size
        return self

    def merge(self, other: "EmpiricalMatrix") -> "EmpiricalMatrix":
        return EmpiricalMatrix(self.counts + other.counts, self.draws + other.draws)

    def joint(self) -> JointMatrix:
        if self.draws == 0:
            raise ValueError("no draws accumulated")
        return JointMatrix(self.counts / self.draws).check()


def accumulate(outcomes, n: int) -> EmpiricalMatrix:
    """Tally draws (a :class:`DrawBatch` or an iterable of :class:`DrawOutcome`)."""
    emp = EmpiricalMatrix.empty(n)
    if isinstance(outcomes, DrawBatch):
        return emp.add(outcomes.choice_a, outcomes.choice_b)
    ia, ib = [], []
    for o in outcomes:
        ia.append(o.choice_a)
        ib.append(o.choice_b)
    if ia:
        emp.add(ia, ib)
    return emp


def _below(x, total):
    # keep u * total strictly under total so trailing zero-mass cells are never hit
    return np.minimum(x, np.nextafter(total, 0.0))


def _categorical(rng, cdf, size=None):
    u = _below(rng.random(size) * cdf[-1], cdf[-1])
    return np.searchsorted(cdf, u, side="right")


# ---------------------------------------------------------------- Pure HOM

def _hom_categories(dist: HomDistribution):
    # outcome table: n*n cross cells, then same-side A, then same-side B
    probs = np.concatenate([dist.cross.ravel(), [dist.same_side_aa, dist.same_side_bb]])
    return np.cumsum(probs)


def sample_phom(dist: HomDistribution, rng: np.random.Generator) -> DrawOutcome:
    """Fire photon pairs until they exit on opposite sides."""
    require_usage(dist)
    cdf = _hom_categories(dist)
    k = dist.k
    attempts = 0
    while True:
        attempts += 1
        c = int(_categorical(rng, cdf))
        if c < k * k:
            i, j = divmod(c, k)
            return DrawOutcome(i, j, attempts)


def sample_phom_batch(dist: HomDistribution, rng: np.random.Generator, size: int) -> DrawBatch:
    """Batch version: attempts are geometric with success probability ``U``."""
    u = require_usage(dist)
    k = dist.k
    cells = _categorical(rng, np.cumsum(dist.cross.ravel()), size)
    attempts = rng.geometric(min(u, 1.0), size)
    ia, ib = np.divmod(cells, k)
    return DrawBatch(ia, ib, attempts, stats={"usage": u})


# -------------------------------------------------------- OAM Attenuation

def _attenuation_attempts(pair, rng, m, phase_policy, splitter_loss):
    n = pair.n
    thetas = phase_policy(rng, m, n)
    # opposite-side probability of the flat source:
    # sum_ij sin^2(t_i - t_j) / n^2 = 1/2 - |sum_k exp(2i t_k)|^2 / (2 n^2)
    phasor = np.exp(2j * thetas).sum(axis=1)
    usage = 0.5 - (phasor.real**2 + phasor.imag**2) / (2.0 * n * n)
    u = rng.random(m)
    opposite = u < usage
    idx = np.flatnonzero(opposite)
    t = thetas[idx]
    sn, cs = np.sin(t), np.cos(t)
    cross = (sn[:, :, None] * cs[:, None, :] - cs[:, :, None] * sn[:, None, :]) ** 2 / (n * n)
    cdf = np.cumsum(cross.reshape(idx.size, n * n), axis=1)
    x = _below(u[idx], cdf[:, -1])
    cell = (x[:, None] >= cdf).sum(axis=1)
    ia = np.zeros(m, dtype=np.int64)
    ib = np.zeros(m, dtype=np.int64)
    ia[idx], ib[idx] = np.divmod(cell, n)
    survive_a = pair.a[ia[idx]]
    survive_b = pair.b[ib[idx]]
    if splitter_loss:
        survive_a = survive_a / n
        survive_b = survive_b / n
    det = (rng.random(idx.size) < survive_a) & (rng.random(idx.size) < survive_b)
    ok = np.zeros(m, dtype=bool)
    ok[idx[det]] = True
    return ok, ia, ib, opposite


def sample_attenuation(
    pair: PreferencePair,
    rng: np.random.Generator,
    phase_policy: PhasePolicy = uniform_phases,
    splitter_loss: bool = False,
) -> DrawOutcome:
    """One joint decision from the attenuation system.

    Each attempt draws fresh source phases, discards same-side pairs, and
    keeps the pair only if both photons pass their player's attenuator
    (``A_i`` resp. ``B_j``).  ``splitter_loss`` adds the ``1/N`` loss of a
    passive N-way splitter in front of each detector bank.
    """
    attenuation_expected_matrix(pair)  # raises DegenerateProductError
    attempts = 0
    while True:
        attempts += 1
        ok, ia, ib, _ = _attenuation_attempts(pair, rng, 1, phase_policy, splitter_loss)
        if ok[0]:
            return DrawOutcome(int(ia[0]), int(ib[0]), attempts)


def sample_attenuation_batch(
    pair: PreferencePair,
    rng: np.random.Generator,
    size: int,
    phase_policy: PhasePolicy = uniform_phases,
    splitter_loss: bool = False,
    chunk: Optional[int] = None,
) -> DrawBatch:
    """Simulate attempts in chunks until ``size`` decisions are collected.

    ``stats`` separates the two loss channels: ``source_discards`` (same-side
    pairs) and ``absorbed`` (at least one photon lost behind the source).
    """
    attenuation_expected_matrix(pair)
    if chunk is None:
        chunk = max(1024, (1 << 22) // pair.n**2)
    out_a, out_b, out_t = [], [], []
    got = 0
    carry = 0
    source_discards = absorbed = total = 0
    while got < size:
        ok, ia, ib, opposite = _attenuation_attempts(pair, rng, chunk, phase_policy, splitter_loss)
        pos = np.flatnonzero(ok)
        need = size - got
        if pos.size > need:
            # later attempts in this chunk never happened
            cut = pos[need - 1] + 1
            ok, opposite, pos = ok[:cut], opposite[:cut], pos[:need]
        used = ok.size
        total += used
        source_discards += int(np.count_nonzero(~opposite))
        absorbed += int(np.count_nonzero(opposite & ~ok))
        if pos.size:
            gaps = np.diff(pos, prepend=-1)
            gaps[0] += carry
            carry = used - 1 - pos[-1]
            out_a.append(ia[pos])
            out_b.append(ib[pos])
            out_t.append(gaps)
            got += pos.size
        else:
            carry += used
    stats = {
        "attempts": total,
        "source_discards": source_discards,
        "absorbed": absorbed,
        "throughput": size / total,
    }
    return DrawBatch(
        np.concatenate(out_a), np.concatenate(out_b), np.concatenate(out_t), stats=stats
    )


# ----------------------------------------------------------- Random Order

def _dead_end(pair: PreferencePair):
    """First (player, option) pair where Random Order can strand the second mover."""
    for i in range(pair.n):
        if pair.a[i] > 0 and pair.b[i] >= 1.0:
            return "B", i
        if pair.b[i] > 0 and pair.a[i] >= 1.0:
            return "A", i
    return None


def random_order_matrix(pair: PreferencePair) -> JointMatrix:
    """Limit of Random Order: a fair coin picks who chooses first.

    ``p[i, j] = (A_i B_j / (1 - B_i) + B_j A_i / (1 - A_j)) / 2`` for ``i != j``.
    """
    stuck = _dead_end(pair)
    if stuck is not None:
        player, option = stuck
        raise DeadEndError(
            f"player {player} has no admissible option once option {option} is taken",
            player=player, option=option,
        )
    a, b = pair.a, pair.b
    with np.errstate(divide="ignore", invalid="ignore"):
        first_a = np.where(a[:, None] > 0, a[:, None] * b[None, :] / (1.0 - b[:, None]), 0.0)
        first_b = np.where(b[None, :] > 0, b[None, :] * a[:, None] / (1.0 - a[None, :]), 0.0)
    p = 0.5 * (first_a + first_b)
    np.fill_diagonal(p, 0.0)
    return JointMatrix(p)


def sample_random_order(pair: PreferencePair, rng: np.random.Generator) -> DrawOutcome:
    """One Random Order draw; raises :class:`DeadEndError` when the second mover is stuck."""
    a_first = rng.random() < 0.5
    first, second = (pair.a, pair.b) if a_first else (pair.b, pair.a)
    pick = int(_categorical(rng, np.cumsum(first)))
    rest = np.array(second)
    rest[pick] = 0.0
    if not rest.sum() > 0:
        raise DeadEndError(
            f"player {'B' if a_first else 'A'} has no admissible option once option {pick} is taken",
            player="B" if a_first else "A", option=pick,
        )
    other = int(_categorical(rng, np.cumsum(rest)))
    return DrawOutcome(pick, other) if a_first else DrawOutcome(other, pick)


def sample_random_order_batch(pair: PreferencePair, rng: np.random.Generator, size: int) -> DrawBatch:
    """Batch version; dead-end draws are dropped and counted in ``failed``."""
    n = pair.n
    a_first = rng.random(size) < 0.5
    u1 = rng.random(size)
    u2 = rng.random(size)

    def conditional_cdf(pref):
        # row i: preference renormalised with option i removed
        m = np.tile(pref, (n, 1))
        np.fill_diagonal(m, 0.0)
        return np.cumsum(m, axis=1)

    ca, cb = np.cumsum(pair.a), np.cumsum(pair.b)
    cond_a, cond_b = conditional_cdf(pair.a), conditional_cdf(pair.b)

    first = np.where(
        a_first,
        np.searchsorted(ca, _below(u1 * ca[-1], ca[-1]), side="right"),
        np.searchsorted(cb, _below(u1 * cb[-1], cb[-1]), side="right"),
    )
    cond = np.where(a_first[:, None], cond_b[first], cond_a[first])
    mass = cond[:, -1]
    second = np.minimum((_below(u2 * mass, mass)[:, None] >= cond).sum(axis=1), n - 1)
    ok = mass > 0
    ia = np.where(a_first, first, second)[ok]
    ib = np.where(a_first, second, first)[ok]
    failed = int(size - np.count_nonzero(ok))
    return DrawBatch(ia, ib, np.ones(ia.size, dtype=np.int64), failed=failed,
                     stats={"failure_rate": failed / size})


# ---------------------------------------------------------- Uniform Random

def uniform_random_matrix(n: int) -> JointMatrix:
    if n < 2:
        raise TooFewOptionsError(f"need at least 2 options, got {n}")
    p = np.full((n, n), 1.0 / (n * (n - 1)))
    np.fill_diagonal(p, 0.0)
    return JointMatrix(p)


def sample_uniform(n: int, rng: np.random.Generator) -> DrawOutcome:
    if n < 2:
        raise TooFewOptionsError(f"need at least 2 options, got {n}")
    i = int(rng.integers(n))
    j = int(rng.integers(n - 1))
    return DrawOutcome(i, j + (j >= i))


def sample_uniform_batch(n: int, rng: np.random.Generator, size: int) -> DrawBatch:
    if n < 2:
        raise TooFewOptionsError(f"need at least 2 options, got {n}")
    i = rng.integers(n, size=size)
    j = rng.integers(n - 1, size=size)
    return DrawBatch(i, j + (j >= i), np.ones(size, dtype=np.int64))


def max_cell_deviation(empirical: JointMatrix, analytic: JointMatrix) -> float:
    if empirical.p.shape != analytic.p.shape:
        raise DimensionMismatchError("matrices differ in shape")
    return float(np.max(np.abs(empirical.p - analytic.p)))
