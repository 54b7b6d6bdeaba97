"""Probability models of the two photonic samplers.

Pure HOM: each player prepares one photon in an OAM superposition
``sum_k a_k exp(i phi_k) |+k>`` (player B uses ``|-k>`` and ``b, psi``) and
both photons meet at a beam splitter.  Detecting ``+i`` on side A and
``-j`` on side B has rate

    r[i, j] = |(a_i b_j e^{i(phi_i + psi_j)} - a_j b_i e^{i(psi_i + phi_j)}) / 2|^2

which vanishes for ``i == j``; the remaining probability goes to both
photons leaving on the same side.  With the interference phase
``theta_k = phi_k - psi_k`` this expands to

    r[i, j] = (a_i^2 b_j^2 + a_j^2 b_i^2 - 2 a_i a_j b_i b_j cos(theta_i - theta_j)) / 4

OAM Attenuation: a neutral source emits the same kind of pair with flat
amplitudes and each player's attenuators let option ``i`` through with
probability ``A_i`` (resp. ``B_i``).
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .core import INTERNAL_TOL, JointMatrix, PreferencePair, _frozen
from .errors import (
    DegenerateProductError,
    DimensionMismatchError,
    IndexOutOfRangeError,
    NegativeEntryError,
    NotNormalizedError,
    TooFewOptionsError,
    ZeroUsageError,
)


@dataclass(frozen=True)
class PhotonInput:
    """Amplitudes and phases (radians) of a single-photon OAM superposition."""

    amps: np.ndarray
    phases: np.ndarray

    def __post_init__(self):
        amps = _frozen(np.ravel(self.amps))
        phases = _frozen(np.ravel(self.phases))
        if amps.shape != phases.shape:
            raise DimensionMismatchError(
                f"{amps.size} amplitudes but {phases.size} phases"
            )
        if np.any(amps < 0):
            raise NegativeEntryError("amplitudes must be nonnegative")
        norm = float(np.sum(amps**2))
        if abs(norm - 1.0) > INTERNAL_TOL:
            raise NotNormalizedError(f"sum of squared amplitudes is {norm!r}")
        object.__setattr__(self, "amps", amps)
        object.__setattr__(self, "phases", phases)

    @property
    def k(self) -> int:
        return self.amps.size

    @classmethod
    def from_weights(cls, weights, phases) -> "PhotonInput":
        """Build from squared amplitudes, renormalising tiny float drift."""
        w = np.clip(np.asarray(weights, dtype=np.float64), 0.0, None)
        return cls(np.sqrt(w / w.sum()), phases)


@dataclass(frozen=True)
class HomDistribution:
    """Outcome distribution of the beam splitter.

    ``cross[i, j]`` is the rate of ``+i`` on side A with ``-j`` on side B;
    ``same_aa`` / ``same_bb`` are ``K x K`` upper-triangular tables (diagonal
    included) of both photons leaving on side A / B in modes ``(k1, k2)``.
    ``scale`` is the opposite-side probability distinguishable photons would
    have; it sets the size of rounding noise in ``cross``.
    """

    cross: np.ndarray
    same_aa: np.ndarray
    same_bb: np.ndarray
    scale: Optional[float] = None

    def __post_init__(self):
        for name in ("cross", "same_aa", "same_bb"):
            object.__setattr__(self, name, _frozen(getattr(self, name)))

    @property
    def k(self) -> int:
        return self.cross.shape[0]

    @property
    def usage(self) -> float:
        """Fraction of photon pairs yielding a conflict-free decision."""
        return float(self.cross.sum())

    @property
    def same_side_aa(self) -> float:
        return float(self.same_aa.sum())

    @property
    def same_side_bb(self) -> float:
        return float(self.same_bb.sum())

    def total(self) -> float:
        return self.usage + self.same_side_aa + self.same_side_bb


def pair_amplitudes(amps_a, phases_a, amps_b, phases_b):
    """``z[..., i, j] = a_i b_j exp(i(phi_i + psi_j))``, broadcasting over leading axes."""
    za = np.asarray(amps_a) * np.exp(1j * np.asarray(phases_a))
    zb = np.asarray(amps_b) * np.exp(1j * np.asarray(phases_b))
    return za[..., :, None] * zb[..., None, :]


def cross_rates(z):
    """Opposite-side rates from pair amplitudes; the diagonal is exactly zero."""
    d = z - np.swapaxes(z, -1, -2)
    return 0.25 * (d.real**2 + d.imag**2)


def hom_distribution(in_a: PhotonInput, in_b: PhotonInput) -> HomDistribution:
    if in_a.k != in_b.k:
        raise DimensionMismatchError(f"K differs: {in_a.k} vs {in_b.k}")
    z = pair_amplitudes(in_a.amps, in_a.phases, in_b.amps, in_b.phases)
    cross = cross_rates(z)

    s = z + z.T
    same = 0.25 * (s.real**2 + s.imag**2)
    # both photons in the same mode: amplitude a_k b_k / 2 with bosonic factor 2
    diag = 2.0 * 0.25 * np.abs(np.diag(z)) ** 2
    same = np.triu(same, k=1)
    same[np.diag_indices_from(same)] = diag
    mag = z.real**2 + z.imag**2
    scale = 0.5 * float(mag.sum() - np.trace(mag))
    # the output state is symmetric under exchanging the sides
    return HomDistribution(cross, same, same.copy(), scale)


def hom_rates_symmetric(weights, thetas):
    """Cross rates when both players use squared amplitudes ``weights``.

    Reduces to ``r[i, j] = w_i w_j sin^2((theta_i - theta_j) / 2)`` with
    interference phases ``theta``.
    """
    w = np.asarray(weights, dtype=np.float64)
    t = np.asarray(thetas, dtype=np.float64)
    return np.outer(w, w) * np.sin((t[:, None] - t[None, :]) / 2.0) ** 2


def hom_rates_cos(in_a: PhotonInput, in_b: PhotonInput):
    """Cross rates from the expanded cosine form (independent of :func:`cross_rates`)."""
    a2, b2 = in_a.amps**2, in_b.amps**2
    ab = in_a.amps * in_b.amps
    theta = in_a.phases - in_b.phases
    r = 0.25 * (
        np.outer(a2, b2) + np.outer(b2, a2)
        - 2.0 * np.outer(ab, ab) * np.cos(theta[:, None] - theta[None, :])
    )
    np.fill_diagonal(r, 0.0)
    return np.maximum(r, 0.0)


#: usage below this fraction of ``HomDistribution.scale`` is rounding noise
ZERO_USAGE_RTOL = 1e-24


def require_usage(dist: HomDistribution) -> float:
    """Return the usage rate, raising :class:`ZeroUsageError` if it is zero.

    Usage that is zero up to rounding (relative to ``dist.scale``) counts as
    zero; tiny but genuine usage is kept.
    """
    u = dist.usage
    floor = ZERO_USAGE_RTOL * dist.scale if dist.scale is not None else 0.0
    if not u > floor:
        raise ZeroUsageError("all opposite-side rates vanish")
    return u


def phom_joint_matrix(dist: HomDistribution) -> JointMatrix:
    """Normalise the opposite-side rates into a joint selection matrix."""
    u = require_usage(dist)
    return JointMatrix(dist.cross / u, meta={"usage": u})


def attenuation_rates(thetas, pair: PreferencePair):
    """Detection rates of the attenuation system for fixed source phases.

    ``r[i, j] = sin^2(theta_i - theta_j) * A_i * B_j / K^2`` where the source
    phase setting is ``theta_k = (phi_k - psi_k) / 2``, half the interference
    phase used by the Pure HOM formulas.
    """
    t = np.asarray(thetas, dtype=np.float64).ravel()
    if t.size != pair.n:
        raise DimensionMismatchError(f"{t.size} phases for {pair.n} options")
    k = t.size
    r = np.sin(t[:, None] - t[None, :]) ** 2 * np.outer(pair.a, pair.b) / k**2
    np.fill_diagonal(r, 0.0)
    return r


def attenuation_source(thetas) -> tuple:
    """Flat-amplitude source inputs realising the phase setting ``thetas``.

    Uses ``phi = theta`` and ``psi = -theta``; the cross rates are then
    ``sin^2(theta_i - theta_j) / K^2``.
    """
    t = np.asarray(thetas, dtype=np.float64).ravel()
    amps = np.full(t.size, 1.0 / np.sqrt(t.size))
    return PhotonInput(amps, t), PhotonInput(amps, -t)


def attenuation_expected_matrix(pair: PreferencePair) -> JointMatrix:
    """Phase-averaged limit of OAM Attenuation: ``p[i, j] ~ A_i B_j`` off the diagonal."""
    r = np.outer(pair.a, pair.b)
    np.fill_diagonal(r, 0.0)
    total = r.sum()
    if not total > 0:
        raise DegenerateProductError(
            "both players are certain of the same option; no off-diagonal mass"
        )
    return JointMatrix(r / total)


def detection_rate(pref, i: int) -> float:
    """Detection rate ``d_i / N^2`` of option ``i`` (0-based) behind attenuator ``d_i = pref_i``.

    Assumes a flat superposition enters the attenuation system.
    """
    pref = np.asarray(pref, dtype=np.float64).ravel()
    n = pref.size
    if n < 2:
        raise TooFewOptionsError(f"need at least 2 options, got {n}")
    if not 0 <= i < n:
        raise IndexOutOfRangeError(f"option {i} outside 0..{n - 1}")
    return float(pref[i]) / n**2
