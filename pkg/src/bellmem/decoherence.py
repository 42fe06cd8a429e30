"""Storage-time decay of the atomic coherence.

A residual magnetic-field gradient across the ensemble spreads the
Zeeman splitting of the ground and storage sublevels.  With the
detuning of each stored coherence uniformly distributed over the
ensemble length, every coherence dephases as an unnormalized sinc, and
the ensemble-averaged factor is the branching-weighted sum over the
populated (m_g, m_s) coherences.  The broadening scale is
K = mu_B * g_Fg * L * b / h in kHz.
"""

from dataclasses import dataclass

import numpy as np
from scipy.constants import h as PLANCK_H
from scipy.constants import physical_constants

from .branching import BranchingTable

BOHR_MAGNETON = physical_constants["Bohr magneton"][0]

LANDE_G_GROUND = 0.25    # F = 4 hyperfine ground level
LANDE_G_STORAGE = -0.25  # F = 3 storage level

_K_REL_TOL = 1e-6


def broadening_from_gradient(length_m: float, gradient_t_per_m: float,
                             lande_g_ground: float = LANDE_G_GROUND) -> float:
    """K in kHz from ensemble length (m) and field gradient (T/m)."""
    return abs(BOHR_MAGNETON * lande_g_ground * length_m * gradient_t_per_m / PLANCK_H) / 1e3


@dataclass(frozen=True)
class DecoherenceParams:
    """Zeeman-broadening scale and the per-configuration amplitude scaling."""

    k_khz: float = 12.0
    xi: float = 1.0
    lande_g_ground: float = LANDE_G_GROUND
    lande_g_storage: float = LANDE_G_STORAGE
    length_m: float | None = None
    gradient_t_per_m: float | None = None

    def __post_init__(self):
        if self.k_khz < 0:
            raise ValueError(f"broadening scale K={self.k_khz} kHz must be >= 0")
        if self.xi <= 0:
            raise ValueError(f"scaling xi={self.xi} must be > 0")
        if (self.length_m is None) != (self.gradient_t_per_m is None):
            raise ValueError("length and gradient must be given together")
        if self.length_m is not None:
            derived = broadening_from_gradient(self.length_m, self.gradient_t_per_m,
                                               self.lande_g_ground)
            if abs(derived - self.k_khz) > _K_REL_TOL * max(abs(self.k_khz), 1e-30):
                raise ValueError(
                    f"K={self.k_khz} kHz inconsistent with L*b (gives {derived:.6g} kHz)")

    @classmethod
    def from_gradient(cls, length_m: float, gradient_t_per_m: float, xi: float = 1.0,
                      lande_g_ground: float = LANDE_G_GROUND,
                      lande_g_storage: float = LANDE_G_STORAGE) -> "DecoherenceParams":
        k = broadening_from_gradient(length_m, gradient_t_per_m, lande_g_ground)
        return cls(k_khz=k, xi=xi, lande_g_ground=lande_g_ground,
                   lande_g_storage=lande_g_storage,
                   length_m=length_m, gradient_t_per_m=gradient_t_per_m)


@dataclass(frozen=True)
class CoherenceTable:
    """Weights and detuning multipliers of the stored Zeeman coherences.

    Each populated (m_g, m_s) coherence detunes at
    |m_g * g_Fg - m_s * g_Fs| / |g_Fg| times the reference rate K.
    """

    weights: np.ndarray
    multipliers: np.ndarray

    def __post_init__(self):
        w = np.asarray(self.weights, dtype=float)
        m = np.asarray(self.multipliers, dtype=float)
        if w.shape != m.shape:
            raise ValueError("weights and multipliers must have equal length")
        if np.any(w < 0) or np.any(m < 0):
            raise ValueError("weights and multipliers must be non-negative")
        if abs(w.sum() - 1.0) > 1e-9:
            raise ValueError(f"coherence weights sum to {w.sum()!r}, expected 1")
        object.__setattr__(self, "weights", w)
        object.__setattr__(self, "multipliers", m)


def coherence_table(branching: BranchingTable,
                    lande_g_ground: float = LANDE_G_GROUND,
                    lande_g_storage: float = LANDE_G_STORAGE) -> CoherenceTable:
    """One entry per populated (m_g, m_s) coherence of the branching table."""
    weights, mults = [], []
    for e in branching.entries:
        if e.p_plus > 0:  # sigma+ pathway stores (m_g=mf, m_s=mf)
            weights.append(e.p_plus)
            mults.append(_multiplier(e.mf, e.mf, lande_g_ground, lande_g_storage))
        if e.p_minus > 0:  # sigma- pathway stores (m_g=mf, m_s=mf+2)
            weights.append(e.p_minus)
            mults.append(_multiplier(e.mf, e.mf + 2, lande_g_ground, lande_g_storage))
    return CoherenceTable(weights=np.array(weights), multipliers=np.array(mults))


def _multiplier(mg: int, ms: int, g_ground: float, g_storage: float) -> float:
    return abs(mg * g_ground - ms * g_storage) / abs(g_ground)


def dephasing_factor(tau_us, params: DecoherenceParams, table: CoherenceTable):
    """Ensemble dephasing factor d(tau) in [0, 1]; d(0) = 1.

    Uniform-gradient model: d = |sum_k w_k sinc(pi K nu_k tau)|.
    Accepts scalar or array tau in microseconds.
    """
    tau = np.asarray(tau_us, dtype=float)
    if np.any(tau < 0):
        raise ValueError("storage time must be >= 0")
    # np.sinc(x) = sin(pi x)/(pi x); K [kHz] * tau [us] carries a 1e-3 factor
    x = params.k_khz * tau[..., None] * 1e-3 * table.multipliers
    d = np.abs(np.sum(table.weights * np.sinc(x), axis=-1))
    return float(d) if np.ndim(tau_us) == 0 else d


def dephasing_factor_mc(tau_us: float, params: DecoherenceParams, table: CoherenceTable,
                        n_samples: int = 10_000) -> float:
    """Brute-force oracle for d(tau): average the accumulated phase over a
    uniform grid of positions across the ensemble."""
    z = (np.arange(n_samples) + 0.5) / n_samples - 0.5
    acc = 0.0
    for w, nu in zip(table.weights, table.multipliers):
        acc += w * np.mean(np.cos(2.0 * np.pi * params.k_khz * 1e-3 * nu * z * tau_us))
    return abs(float(acc))


def retrieval_efficiency(tau_us, params: DecoherenceParams, table: CoherenceTable,
                         base: float):
    """Conditional retrieval probability base * d(tau)^2 (amplitude decay squared)."""
    if not 0.0 < base <= 1.0:
        raise ValueError(f"base efficiency {base} outside (0, 1]")
    return base * dephasing_factor(tau_us, params, table) ** 2


def p12_theory(tau_us, params: DecoherenceParams, table: CoherenceTable,
               base_p12: float):
    """Modeled joint detection probability xi * base_p12 * d(tau)^2."""
    return params.xi * base_p12 * dephasing_factor(tau_us, params, table) ** 2


def g12_decay_model(tau_us, k_khz: float, xi, table: CoherenceTable):
    """Normalized cross-correlation model g12(tau) = 1 + xi * d(tau)^2.

    The unit floor is the uncorrelated-coincidence limit (g12 -> 1 when
    the memory has fully dephased); xi is the correlated amplitude at
    tau = 0, one value per polarization configuration.
    """
    params = DecoherenceParams(k_khz=abs(k_khz), xi=1.0)
    return 1.0 + np.asarray(xi) * dephasing_factor(tau_us, params, table) ** 2
