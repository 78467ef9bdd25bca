"""Bipartite logarithmic negativity from the 6x6 covariance matrix."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import NonPhysical

__all__ = ["MODES", "PAIRS", "ModePair", "NegativityResult", "submatrix", "log_negativity", "pairwise_all"]

MODES = ("mech", "cav1", "cav2")
_SLOTS = {"mech": (0, 1), "cav1": (2, 3), "cav2": (4, 5)}
_CLAMP = 1e-12
_KINK = 64 * np.finfo(float).eps


@dataclass(frozen=True)
class ModePair:
    """Unordered pair of distinct modes, stored in canonical order."""

    k: str
    l: str

    def __post_init__(self):
        if self.k not in MODES or self.l not in MODES:
            raise ValueError(f"modes must be among {MODES}")
        if self.k == self.l:
            raise ValueError("a mode pair needs two distinct modes")
        if MODES.index(self.k) > MODES.index(self.l):
            k, l = self.l, self.k
            object.__setattr__(self, "k", k)
            object.__setattr__(self, "l", l)

    @property
    def label(self) -> str:
        return f"{self.k}_{self.l}"


PAIRS = (ModePair("mech", "cav1"), ModePair("mech", "cav2"), ModePair("cav1", "cav2"))


@dataclass(frozen=True)
class NegativityResult:
    e_n: float
    eta: float
    sigma: float


def submatrix(v, k: str, l: str) -> np.ndarray:
    """The 4x4 block ``[[V_k, V_kl], [V_kl^T, V_l]]`` in the order given."""
    v = getattr(v, "v", v)
    idx = list(_SLOTS[k]) + list(_SLOTS[l])
    return np.asarray(v)[np.ix_(idx, idx)]


_W = np.array([[0.0, 1.0], [-1.0, 0.0]])


def _det2(m) -> float:
    return float(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])


def log_negativity(v_s) -> NegativityResult:
    """Logarithmic negativity (natural log) of a two-mode covariance matrix.

    ``eta`` is the smallest symplectic eigenvalue of the partial transpose,
    computed from the local invariants
    ``sigma = det A + det B - 2 det C`` and ``det V_s``.

    Raises
    ------
    NonPhysical
        If ``det V_s`` or the discriminant is negative beyond round-off.
    """
    v_s = np.asarray(v_s, dtype=float)
    a, b, c = v_s[:2, :2], v_s[2:, 2:], v_s[:2, 2:]
    det_a, det_b, det_c = _det2(a), _det2(b), _det2(c)
    # det V_s = det A det B + det C^2 - x, which lets the discriminant be
    # written without the cancellation in sigma^2 - 4 det V_s
    x = float(np.trace(a @ _W @ c @ _W @ b @ _W @ c.T @ _W))
    det_v = det_a * det_b + det_c * det_c - x
    sigma = det_a + det_b - 2.0 * det_c
    scale = max(1.0, sigma * sigma)
    if det_v < -_CLAMP * scale:
        raise NonPhysical(f"det V_s = {det_v:.3e} < 0")
    disc = (det_a - det_b) ** 2 - 4.0 * det_c * (det_a + det_b) + 4.0 * x
    if disc < -_CLAMP * scale:
        raise NonPhysical(f"negative discriminant {disc:.3e}")
    root = math.sqrt(max(disc, 0.0))
    if sigma > 0:
        # product of the two squared eigenvalues is det V_s; avoids cancellation
        eta_sq = 2.0 * det_v / (sigma + root)
    else:
        eta_sq = (sigma - root) / 2.0
    if eta_sq < -_CLAMP * scale:
        raise NonPhysical(f"negative squared symplectic eigenvalue {eta_sq:.3e}")
    eta = math.sqrt(max(eta_sq, 0.0))
    if eta == 0.0:
        raise NonPhysical("vanishing symplectic eigenvalue")
    # round-off just below the separability edge 2 eta = 1 is not entanglement
    e_n = 0.0 if 2.0 * eta >= 1.0 - _KINK else -math.log(2.0 * eta)
    return NegativityResult(e_n, eta, sigma)


def pairwise_all(v) -> dict:
    """``{ModePair: NegativityResult}`` for the three pairs of one covariance matrix."""
    return {pair: log_negativity(submatrix(v, pair.k, pair.l)) for pair in PAIRS}
