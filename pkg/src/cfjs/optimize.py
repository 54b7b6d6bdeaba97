"""Choosing Pure HOM input states from a player's own preference.

Each player assumes the other holds the same preference and uses the same
settings.  Under that assumption both photons carry squared amplitudes
``w`` and the opposite-side rates are ``w_i w_j sin^2((theta_i - theta_j)/2)``
where ``theta_k`` is the interference phase ``phi_k - psi_k``.
"""

from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np
from scipy.optimize import minimize
from scipy.special import softmax

from .core import PreferencePair, _frozen, validate_pref
from .errors import (
    DegeneratePhasesError,
    DimensionMismatchError,
    HalfPreferenceSingularityError,
    ZeroUsageError,
)
from .quantum import HomDistribution, PhotonInput, hom_distribution, hom_rates_symmetric, phom_joint_matrix

SINGULARITY_TOL = 1e-9
#: losses below this are ties; the earlier start wins
LOSS_FLOOR = 1e-15
_TINY_WEIGHT = 1e-300


@dataclass(frozen=True)
class OptimizerConfig:
    max_iter: int = 500
    restarts: int = 4
    seed: int = 0
    tol: float = 1e-12
    method: str = "SLSQP"
    # co-optimise the phases instead of keeping the evenly spaced grid
    optimize_phases: bool = False
    # when zero loss is reachable, then raise the usage rate while holding it
    maximize_usage: bool = True


@dataclass(frozen=True)
class PhomSettings:
    """One player's photon settings.  ``thetas`` are intended interference phases."""

    amps: np.ndarray
    thetas: np.ndarray
    achieved_loss: float
    converged: bool
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen(self.amps))
        object.__setattr__(self, "thetas", _frozen(self.thetas))

    @property
    def weights(self) -> np.ndarray:
        return self.amps**2


def default_thetas(n: int) -> np.ndarray:
    """Interference phases evenly spread over the full circle."""
    return 2.0 * np.pi * np.arange(n) / n


def theorem3_amplitudes(pref, thetas) -> np.ndarray:
    """Closed-form zero-loss amplitudes for three options.

    ``a_i^2`` is proportional to ``sin^2((theta_j - theta_k)/2) / (1 - 2 A_i)``
    with ``(i, j, k)`` cyclic.  Needs every preference below 1/2.
    """
    pref = np.asarray(pref, dtype=np.float64).ravel()
    thetas = np.asarray(thetas, dtype=np.float64).ravel()
    if pref.size != 3 or thetas.size != 3:
        raise DimensionMismatchError("closed form exists for exactly three options")
    denom = 1.0 - 2.0 * pref
    if np.any(denom <= SINGULARITY_TOL):
        i = int(np.argmin(denom))
        raise HalfPreferenceSingularityError(
            f"preference {float(pref[i])!r} of option {i} is not below 1/2"
        )
    opposite = np.sin((np.roll(thetas, -1) - np.roll(thetas, -2)) / 2.0) ** 2
    if np.any(opposite <= 1e-15):
        raise DegeneratePhasesError("phases must be pairwise distinct mod 2 pi")
    w = opposite / denom
    return np.sqrt(w / w.sum())


def _model_marginal(weights, thetas):
    r = hom_rates_symmetric(weights, thetas)
    total = r.sum()
    if not total > 0:
        raise ZeroUsageError("all opposite-side rates vanish")
    return r.sum(axis=1) / total


def symmetric_model_loss(amps, thetas, pref) -> float:
    """Loss a player predicts assuming the other player mirrors them exactly."""
    amps = np.asarray(amps, dtype=np.float64)
    pref = np.asarray(pref, dtype=np.float64)
    if amps.shape != pref.shape or np.shape(thetas) != pref.shape:
        raise DimensionMismatchError("amps, thetas and pref must have equal length")
    pi = _model_marginal(amps**2, thetas)
    # both marginals coincide in the mirrored model
    return float(2.0 * np.sum((pi - pref) ** 2))


def _loss_and_grad(x, pref, fixed_thetas):
    n = pref.size
    w = softmax(x[:n])
    thetas = fixed_thetas if fixed_thetas is not None else x[n:]
    diff = thetas[:, None] - thetas[None, :]
    s = np.sin(diff / 2.0) ** 2
    sw = s @ w
    pihat = w * sw
    total = pihat.sum()
    if total < 1e-300:
        return 8.0, np.zeros_like(x)
    pi = pihat / total
    err = pi - pref
    value = 2.0 * err @ err
    g = 4.0 * err
    h = (g - g @ pi) / total
    dw = h * sw + s @ (h * w)
    dz = w * (dw - dw @ w)
    if fixed_thetas is not None:
        return value, dz
    q = np.sin(diff)
    dtheta = 0.5 * w * (h * (q @ w) + q @ (h * w))
    return value, np.concatenate([dz, dtheta])


def symmetric_model_gradient(logits, thetas, pref):
    """Loss and gradient w.r.t. ``(logits, thetas)`` with ``a^2 = softmax(logits)``."""
    pref = np.asarray(pref, dtype=np.float64)
    x = np.concatenate([np.asarray(logits, float), np.asarray(thetas, float)])
    return _loss_and_grad(x, pref, None)


def mirrored_usage(weights, thetas) -> float:
    """Usage rate when both players use ``weights`` and ``thetas``.

    Equals ``(1 - |sum_k w_k exp(i theta_k)|^2) / 2``, so it never exceeds 1/2.
    """
    return float(hom_rates_symmetric(weights, thetas).sum())


def _split(x, n):
    w = softmax(x[:n])
    diff = x[n:, None] - x[None, n:]
    return w, diff, np.sin(diff / 2.0) ** 2


def _neg_usage_and_grad(x, n):
    w, diff, s = _split(x, n)
    sw = s @ w
    dw = 2.0 * sw
    dz = w * (dw - dw @ w)
    dtheta = w * (np.sin(diff) @ w)
    return -float(w @ sw), -np.concatenate([dz, dtheta])


def _marginal_residual(x, n, pref):
    w, _, s = _split(x, n)
    pihat = w * (s @ w)
    # the last component is implied by normalisation
    return (pihat / pihat.sum() - pref)[:-1]


def _marginal_jacobian(x, n, pref):
    w, diff, s = _split(x, n)
    sw = s @ w
    total = w @ sw
    pi = w * sw / total
    jw = (np.diag(sw) + w[:, None] * s - np.outer(pi, 2.0 * sw)) / total
    jz = jw * w[None, :] - np.outer(jw @ w, w)
    q = np.outer(w, w) * np.sin(diff)
    jt = -0.5 * q
    np.fill_diagonal(jt, 0.5 * q.sum(axis=1))
    jt = (jt - np.outer(pi, w * (np.sin(diff) @ w))) / total
    return np.hstack([jz, jt])[:-1]


def _refine_usage(x0, pref, config):
    """Maximise the usage rate over amplitudes and phases with the marginals held at ``pref``."""
    n = pref.size
    # trial points with vanishing usage give NaN; the caller rejects such results
    with np.errstate(divide="ignore", invalid="ignore"):
        res = minimize(
            _neg_usage_and_grad, x0, args=(n,), jac=True, method="SLSQP",
            constraints=[{
                "type": "eq", "fun": _marginal_residual, "jac": _marginal_jacobian,
                "args": (n, pref),
            }],
            options={"maxiter": config.max_iter, "ftol": config.tol},
        )
    return res.x


def _run(x0, pref, fixed_thetas, config):
    if config.method.upper() == "SLSQP":
        options = {"maxiter": config.max_iter, "ftol": config.tol}
    else:
        options = {"maxiter": config.max_iter, "gtol": config.tol}
    res = minimize(
        _loss_and_grad, x0, args=(pref, fixed_thetas), jac=True,
        method=config.method, options=options,
    )
    value, _ = _loss_and_grad(res.x, pref, fixed_thetas)
    return res.x, value, bool(res.success)


def optimize_settings(pref, config: Optional[OptimizerConfig] = None) -> PhomSettings:
    """Minimise the mirrored-model loss over the squared amplitudes (and optionally phases).

    Starts from ``a^2 = pref`` on the evenly spaced phase grid, then tries
    ``config.restarts`` seeded random starts and keeps the best result.
    If every preference is below 1/2 (so zero loss is reachable) and
    ``config.maximize_usage`` is set, a second constrained solve moves the
    amplitudes and phases towards the largest usage rate that keeps the
    marginals on ``pref``.  Never returns a loss above the initial one.
    """
    config = config or OptimizerConfig()
    pref = validate_pref(pref)
    n = pref.size
    grid = default_thetas(n)
    fixed = None if config.optimize_phases else grid

    z0 = np.log(np.maximum(pref, _TINY_WEIGHT))
    x_init = z0 if fixed is not None else np.concatenate([z0, grid])
    init_value, _ = _loss_and_grad(x_init, pref, fixed)

    rng = np.random.default_rng(config.seed)
    starts = [x_init]
    for _ in range(config.restarts):
        z = rng.standard_normal(n)
        if fixed is None:
            z = np.concatenate([z, rng.uniform(0.0, 2.0 * np.pi, n)])
        starts.append(z)

    best = (x_init, init_value, False, -1)
    for idx, x0 in enumerate(starts):
        x, value, ok = _run(x0, pref, fixed, config)
        if max(value, LOSS_FLOOR) < max(best[1], LOSS_FLOOR):
            best = (x, value, ok, idx)
        if best[1] <= LOSS_FLOOR:
            break

    x, value, ok, idx = best
    w = softmax(x[:n])
    thetas = grid if fixed is not None else x[n:]
    refined = False
    if config.maximize_usage and 2.0 * pref.max() < 1.0 - SINGULARITY_TOL:
        x_full = np.concatenate([x[:n], thetas])
        y = _refine_usage(x_full, pref, config)
        with np.errstate(divide="ignore", invalid="ignore"):
            new_value, _ = _loss_and_grad(y, pref, None)
        w_new = softmax(y[:n])
        if (
            np.all(np.isfinite(y))
            and new_value <= max(value, LOSS_FLOOR)
            and mirrored_usage(w_new, y[n:]) >= mirrored_usage(w, thetas)
        ):
            w, thetas, value, refined = w_new, y[n:], new_value, True
    return PhomSettings(
        amps=np.sqrt(w),
        thetas=np.array(thetas),
        achieved_loss=float(value),
        converged=ok or value <= LOSS_FLOOR,
        meta={
            "start": idx,
            "phases": "optimized" if fixed is None else "fixed-grid",
            "method": config.method,
            "usage_refined": refined,
            "mirrored_usage": mirrored_usage(w, thetas),
        },
    )


def player_inputs(settings_a: PhomSettings, settings_b: PhomSettings):
    """Photon inputs when A sets ``phi = theta_A / 2`` and B sets ``psi = -theta_B / 2``.

    The realised interference phase is the mean of both intended phases and
    equals each of them when the players agree.
    """
    in_a = PhotonInput.from_weights(settings_a.weights, settings_a.thetas / 2.0)
    in_b = PhotonInput.from_weights(settings_b.weights, -settings_b.thetas / 2.0)
    return in_a, in_b


def realized_distribution(settings_a: PhomSettings, settings_b: PhomSettings) -> HomDistribution:
    return hom_distribution(*player_inputs(settings_a, settings_b))


def phom_pair_matrix(pair: PreferencePair, config: Optional[OptimizerConfig] = None):
    """Both players optimise on their own preference; returns ``(matrix, distribution)``."""
    sa = optimize_settings(pair.a, config)
    sb = sa if np.array_equal(pair.a, pair.b) else optimize_settings(pair.b, config)
    dist = realized_distribution(sa, sb)
    return phom_joint_matrix(dist), dist
