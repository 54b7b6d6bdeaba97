"""Preference profiles, joint selection matrices and the scalar metrics on them.

Options are indexed from 0 to ``n - 1`` throughout the package.
"""

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import (
    DimensionMismatchError,
    DivisionByZeroOptimalLossError,
    LengthMismatchError,
    NegativeEntryError,
    NotNormalizedError,
    TooFewOptionsError,
)

#: tolerance for user supplied vectors (may come from text files)
INPUT_TOL = 1e-9
#: tolerance for vectors and matrices built internally
INTERNAL_TOL = 1e-12


def _frozen(x):
    arr = np.array(x, dtype=np.float64)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class PreferencePair:
    """Probabilistic preferences of players A and B over ``n`` options."""

    a: np.ndarray
    b: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "a", _frozen(self.a))
        object.__setattr__(self, "b", _frozen(self.b))

    @property
    def n(self) -> int:
        return self.a.shape[0]

    @property
    def popularity(self) -> np.ndarray:
        return self.a + self.b

    def swapped(self) -> "PreferencePair":
        return PreferencePair(self.b, self.a)


@dataclass(frozen=True)
class JointMatrix:
    """Joint selection probabilities ``p[i, j]``: A takes i while B takes j.

    ``meta`` carries free-form notes about how the matrix was produced.
    """

    p: np.ndarray
    meta: Mapping[str, object] = field(default_factory=dict, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "p", _frozen(self.p))

    @property
    def n(self) -> int:
        return self.p.shape[0]

    def check(self, tol: float = INTERNAL_TOL) -> "JointMatrix":
        """Assert the joint-matrix invariants and return ``self``."""
        p = self.p
        if p.ndim != 2 or p.shape[0] != p.shape[1]:
            raise DimensionMismatchError(f"joint matrix must be square, got {p.shape}")
        if np.any(p < 0):
            raise NegativeEntryError("joint matrix has negative entries")
        if np.any(np.diag(p) != 0):
            raise NotNormalizedError("joint matrix has nonzero diagonal")
        total = p.sum()
        if abs(total - 1.0) > tol:
            raise NotNormalizedError(f"joint matrix sums to {float(total)!r}")
        return self


@dataclass(frozen=True)
class Popularity:
    """Per-option popularity ``s[i] = A_i + B_i``; sums to 2."""

    s: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "s", _frozen(self.s))

    @property
    def max(self) -> float:
        return float(self.s.max())

    @property
    def argmax(self) -> int:
        # np.argmax returns the first maximal index
        return int(np.argmax(self.s))


def _check_prob_vector(v, name, tol):
    if np.any(~np.isfinite(v)):
        raise NotNormalizedError(f"{name} has non-finite entries")
    if np.any(v < 0):
        i = int(np.flatnonzero(v < 0)[0])
        raise NegativeEntryError(f"{name}[{i}] = {float(v[i])!r} is negative")
    total = v.sum()
    if abs(total - 1.0) > tol:
        raise NotNormalizedError(f"{name} sums to {float(total)!r}, expected 1")
    if np.any(v > 1.0 + tol):
        raise NotNormalizedError(f"{name} has entries above 1")


def validate_pair(a, b, tol: float = INPUT_TOL) -> PreferencePair:
    """Validate two raw preference vectors and wrap them in a :class:`PreferencePair`.

    Raises
    ------
    LengthMismatchError, TooFewOptionsError, NegativeEntryError, NotNormalizedError
    """
    a = np.asarray(a, dtype=np.float64).ravel()
    b = np.asarray(b, dtype=np.float64).ravel()
    if a.shape != b.shape:
        raise LengthMismatchError(f"preference lengths differ: {a.size} vs {b.size}")
    if a.size < 2:
        raise TooFewOptionsError(f"need at least 2 options, got {a.size}")
    _check_prob_vector(a, "A", tol)
    _check_prob_vector(b, "B", tol)
    return PreferencePair(a, b)


def validate_pref(v, tol: float = INPUT_TOL) -> np.ndarray:
    """Single-player counterpart of :func:`validate_pair`."""
    v = np.asarray(v, dtype=np.float64).ravel()
    if v.size < 2:
        raise TooFewOptionsError(f"need at least 2 options, got {v.size}")
    _check_prob_vector(v, "preference", tol)
    return v


def popularity(pair: PreferencePair) -> Popularity:
    return Popularity(pair.a + pair.b)


def satisfied_preferences(m: JointMatrix):
    """Row and column marginals ``(pi_A, pi_B)`` of a joint matrix."""
    p = m.p if isinstance(m, JointMatrix) else np.asarray(m, dtype=np.float64)
    return p.sum(axis=1), p.sum(axis=0)


def loss(m: JointMatrix, pair: PreferencePair) -> float:
    """Squared deviation of the satisfied preferences from the stated ones."""
    p = m.p if isinstance(m, JointMatrix) else np.asarray(m, dtype=np.float64)
    if p.shape != (pair.n, pair.n):
        raise DimensionMismatchError(
            f"matrix shape {p.shape} does not match {pair.n} options"
        )
    pi_a, pi_b = p.sum(axis=1), p.sum(axis=0)
    return float(np.sum((pi_a - pair.a) ** 2) + np.sum((pi_b - pair.b) ** 2))


def _paired(optimal_losses, method_losses):
    ref = np.asarray(optimal_losses, dtype=np.float64).ravel()
    got = np.asarray(method_losses, dtype=np.float64).ravel()
    if ref.shape != got.shape:
        raise LengthMismatchError(f"{ref.size} optimal losses vs {got.size} method losses")
    if ref.size == 0:
        raise LengthMismatchError("need at least one loss pair")
    return ref, got


def mape(optimal_losses, method_losses) -> float:
    """Mean absolute percentage error of method losses against optimal ones."""
    ref, got = _paired(optimal_losses, method_losses)
    if np.any(ref == 0):
        raise DivisionByZeroOptimalLossError(
            "MAPE is undefined when an optimal loss equals 0; use maape()"
        )
    return float(np.mean(np.abs((ref - got) / ref)))


def maape(optimal_losses, method_losses) -> float:
    """Mean arctangent absolute percentage error, bounded in ``[0, pi/2]``.

    A zero optimal loss contributes ``pi/2`` when the method loss is positive
    and 0 when it is zero as well.
    """
    ref, got = _paired(optimal_losses, method_losses)
    diff = np.abs(ref - got)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.arctan(diff / np.abs(ref))
    zero = ref == 0
    terms[zero] = np.where(diff[zero] > 0, np.pi / 2, 0.0)
    return float(np.mean(terms))
