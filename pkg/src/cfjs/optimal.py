"""Loss-minimising joint selection matrices.

When every popularity is at most 1 a zero-loss matrix exists and
:func:`construct_zero_loss` builds one.  Otherwise the most popular option
has to absorb the excess, :func:`construct_capped` gives a minimiser and
:func:`min_loss` its loss in closed form.
"""

import logging

import numpy as np
from scipy.optimize import linprog

from .core import INTERNAL_TOL, JointMatrix, PreferencePair, loss, popularity
from .errors import (
    ConstructionFailedError,
    PreconditionMaxPopularityError,
    PreconditionPopularityExceedsOneError,
)

log = logging.getLogger(__name__)

#: residual mass below this is treated as placed
RESIDUAL_TOL = 1e-12
#: postcondition of construct_zero_loss
ZERO_LOSS_TOL = 1e-9


def min_loss(pair: PreferencePair) -> float:
    """Smallest loss any joint matrix can reach for ``pair``."""
    s_max = float(np.max(pair.a + pair.b))
    if s_max <= 1.0:
        return 0.0
    n = pair.n
    return n * (s_max - 1.0) ** 2 / (2.0 * (n - 1))


def construct_capped(pair: PreferencePair) -> JointMatrix:
    """Minimum-loss matrix when the most popular option has popularity above 1.

    All mass flows through the most popular option ``k``: row ``i`` puts
    ``A_i + eps`` in column ``k`` and row ``k`` puts ``B_j + eps`` in column
    ``j``, with ``eps = (S_k - 1) / (2 (n - 1))``.  Ties for the maximum go
    to the lowest index and are reported in ``meta["tie"]``.
    """
    pop = popularity(pair)
    if pop.max <= 1.0:
        raise PreconditionMaxPopularityError(
            f"max popularity {pop.max!r} <= 1; use construct_zero_loss"
        )
    n = pair.n
    k = pop.argmax
    eps = (pop.max - 1.0) / (2.0 * (n - 1))
    p = np.zeros((n, n))
    others = np.arange(n) != k
    p[others, k] = pair.a[others] + eps
    p[k, others] = pair.b[others] + eps
    tie = int(np.count_nonzero(pop.s == pop.max)) > 1
    return JointMatrix(p, meta={"pivot": k, "eps": eps, "tie": tie})


def _fill_three(p, idx, a, b):
    # three active options: six unknowns, one free parameter t = p[i0, i1]
    i0, i1, i2 = idx
    a0, a1, a2 = a[idx]
    b0, b1, b2 = b[idx]
    lo = max(0.0, b1 - a2, a0 - b2)
    hi = min(a0, b1, b0 + b1 - a2)
    t = min(lo, hi)
    cells = {
        (i0, i1): t,
        (i0, i2): a0 - t,
        (i2, i1): b1 - t,
        (i2, i0): a2 - b1 + t,
        (i1, i0): b0 - a2 + b1 - t,
        (i1, i2): a1 - b0 + a2 - b1 + t,
    }
    for (i, j), v in cells.items():
        p[i, j] += max(v, 0.0)


def _greedy_zero_loss(a, b):
    """Place all mass by repeatedly retiring the least popular option.

    The retiring option ``l`` is first paired with the most popular option
    ``k`` (``p[l, k] = min(a_l, b_k)``, ``p[k, l] = min(a_k, b_l)``), which
    keeps every residual popularity within the residual mass; what is left
    of ``l`` is spread over the remaining options.
    """
    a = a.copy()
    b = b.copy()
    n = a.size
    p = np.zeros((n, n))
    while True:
        s = a + b
        act = np.flatnonzero(s > RESIDUAL_TOL)
        if act.size <= 1:
            break
        if act.size == 2:
            i, j = act
            p[i, j] += a[i]
            p[j, i] += a[j]
            break
        if act.size == 3:
            _fill_three(p, act, a, b)
            break
        l = act[np.argmin(s[act])]
        rest = act[act != l]
        k = rest[np.argmax(s[rest])]

        x = min(b[k], a[l])
        y = min(a[k], b[l])
        p[l, k] += x
        p[k, l] += y
        b[k] -= x
        a[k] -= y
        ra = a[l] - x
        rb = b[l] - y
        # spread the remainder, most popular first (stable sort keeps index order on ties)
        order = rest[np.argsort(-s[rest], kind="stable")]
        for j in order:
            if ra <= RESIDUAL_TOL:
                break
            d = min(b[j], ra)
            p[l, j] += d
            b[j] -= d
            ra -= d
        for i in order:
            if rb <= RESIDUAL_TOL:
                break
            d = min(a[i], rb)
            p[i, l] += d
            a[i] -= d
            rb -= d
        a[l] = b[l] = 0.0
        np.maximum(a, 0.0, out=a)
        np.maximum(b, 0.0, out=b)
    return p


def _transport_zero_loss(a, b):
    """Exact feasibility solve of the transportation problem with a forbidden diagonal."""
    n = a.size
    rows = np.zeros((n, n * n))
    cols = np.zeros((n, n * n))
    for i in range(n):
        rows[i, i * n:(i + 1) * n] = 1.0
        cols[i, i::n] = 1.0
    a_eq = np.vstack([rows, cols])
    b_eq = np.concatenate([a / a.sum(), b / b.sum()])
    bounds = [(0.0, 0.0) if i == j else (0.0, None) for i in range(n) for j in range(n)]
    res = linprog(np.zeros(n * n), A_eq=a_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status != 0:
        raise ConstructionFailedError(f"transportation solve failed: {res.message}")
    return np.maximum(res.x.reshape(n, n), 0.0)


def construct_zero_loss(pair: PreferencePair) -> JointMatrix:
    """A joint matrix whose marginals reproduce both preferences exactly.

    Requires every popularity to be at most 1 (up to 1e-12).
    """
    pop = popularity(pair)
    if pop.max > 1.0 + INTERNAL_TOL:
        raise PreconditionPopularityExceedsOneError(
            f"option {pop.argmax} has popularity {pop.max!r} > 1"
        )
    method = "greedy"
    p = _greedy_zero_loss(pair.a, pair.b)
    np.fill_diagonal(p, 0.0)
    if not _acceptable(p, pair):
        log.warning("greedy construction stranded mass; solving transportation problem")
        method = "transport"
        p = _transport_zero_loss(pair.a, pair.b)
        np.fill_diagonal(p, 0.0)
        if not _acceptable(p, pair):
            raise ConstructionFailedError("no zero-loss matrix found")
    p /= p.sum()
    return JointMatrix(p, meta={"method": method})


def _acceptable(p, pair):
    total = p.sum()
    if not np.isfinite(total) or total <= 0 or np.any(p < 0):
        return False
    return loss(p / total, pair) < ZERO_LOSS_TOL


def optimal_matrix(pair: PreferencePair) -> JointMatrix:
    """Dispatch to the zero-loss or capped construction by max popularity."""
    if np.max(pair.a + pair.b) > 1.0:
        return construct_capped(pair)
    return construct_zero_loss(pair)
