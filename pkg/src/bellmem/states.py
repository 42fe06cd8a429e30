"""Two-qubit polarization state and Born-rule detection probabilities.

Basis order is {H1H2, H1V2, V1H2, V1V2} after the quarter-wave mapping
sigma+ -> H, sigma- -> V on the heralding photon.  The retrieved photon
carries the orthogonal polarization, so the transmitted port of its
analyzer at angle theta2 projects onto theta2 + 90 deg; with that
convention the correlated ports at theta1 = theta2 = 0 are (T1, T2) and
(R1, R2).
"""

from dataclasses import dataclass
from math import pi, radians, sin, sqrt
from typing import NamedTuple

import numpy as np

_HERM_TOL = 1e-12
_TRACE_TOL = 1e-12
_EIG_FLOOR = -1e-10

# qubit-2 basis label (0 = H, 1 = V) for each joint basis index
_Q2 = np.array([0, 1, 0, 1])


@dataclass(frozen=True)
class AnalyzerSettings:
    """Polarizer angles in degrees, with the primed pair used for CHSH."""

    theta1: float = -22.5
    theta1_prime: float = 22.5
    theta2: float = 0.0
    theta2_prime: float = 45.0

    def chsh_pairs(self) -> list[tuple[float, float]]:
        """The four (theta1, theta2) combinations, in the S = E1+E2+E3-E4 order."""
        return [
            (self.theta1, self.theta2),
            (self.theta1_prime, self.theta2),
            (self.theta1, self.theta2_prime),
            (self.theta1_prime, self.theta2_prime),
        ]


class CoincidenceProbs(NamedTuple):
    tt: float
    tr: float
    rt: float
    rr: float


@dataclass(frozen=True)
class TwoQubitState:
    """Density matrix over the two polarization qubits plus the pair weight.

    ``pair_probability`` is the chance per excitation event that the
    non-vacuum component is present at all; the vacuum part is not
    represented explicitly.
    """

    rho: np.ndarray
    pair_probability: float = 1.0

    def __post_init__(self):
        rho = np.asarray(self.rho, dtype=complex)
        if rho.shape != (4, 4):
            raise ValueError(f"density matrix must be 4x4, got {rho.shape}")
        object.__setattr__(self, "rho", rho)
        if np.max(np.abs(rho - rho.conj().T)) > _HERM_TOL:
            raise ValueError("density matrix is not Hermitian")
        if abs(np.trace(rho).real - 1.0) > _TRACE_TOL:
            raise ValueError(f"density matrix trace is {np.trace(rho).real!r}, expected 1")
        if np.min(np.linalg.eigvalsh(rho)) < _EIG_FLOOR:
            raise ValueError("density matrix has a negative eigenvalue")
        if not 0.0 <= self.pair_probability <= 1.0:
            raise ValueError(f"pair_probability {self.pair_probability} outside [0, 1]")


def ideal_state(eta, phase: float = 0.0, pair_probability: float = 1.0) -> TwoQubitState:
    """Pure two-pathway state cos(eta)|H1 V2> + e^{i phase} sin(eta)|V1 H2>."""
    eta_rad = getattr(eta, "eta", eta)
    psi = np.zeros(4, dtype=complex)
    psi[1] = np.cos(eta_rad)
    psi[2] = np.exp(1j * phase) * np.sin(eta_rad)
    return TwoQubitState(rho=np.outer(psi, psi.conj()), pair_probability=pair_probability)


def apply_dephasing(state: TwoQubitState, d: float) -> TwoQubitState:
    """Scale every coherence between the two retrieved-qubit basis states by d.

    Phase damping on qubit 2: elements whose qubit-2 labels differ are
    multiplied by d, the diagonal is untouched.  For the two-pathway
    state this is exactly the |H1 V2><V1 H2| coherence.
    """
    if not 0.0 <= d <= 1.0:
        raise ValueError(f"dephasing factor {d} outside [0, 1]")
    scale = np.where(_Q2[:, None] == _Q2[None, :], 1.0, d)
    return TwoQubitState(rho=state.rho * scale, pair_probability=state.pair_probability)


def _port_vectors(theta1_deg: float, theta2_deg: float) -> dict[str, np.ndarray]:
    a = radians(theta1_deg)
    b = radians(theta2_deg + 90.0)  # transmitted port of analyzer 2 is flipped
    return {
        "T1": np.array([np.cos(a), np.sin(a)]),
        "R1": np.array([-np.sin(a), np.cos(a)]),
        "T2": np.array([np.cos(b), np.sin(b)]),
        "R2": np.array([np.sin(b), -np.cos(b)]),
    }


def born_coincidence_probs(state: TwoQubitState, theta1_deg: float,
                           theta2_deg: float) -> CoincidenceProbs:
    """Joint probabilities of the four port pairings at (theta1, theta2).

    Each value is Tr[rho (|a><a| x |b><b|)] for the corresponding
    analyzer ports; the four sum to one.
    """
    v = _port_vectors(theta1_deg, theta2_deg)
    out = []
    for d1 in ("T1", "R1"):
        for d2 in ("T2", "R2"):
            vec = np.kron(v[d1], v[d2])
            out.append(float(np.real(vec @ state.rho @ vec)))
    tt, tr, rt, rr = out
    return CoincidenceProbs(tt=tt, tr=tr, rt=rt, rr=rr)


def born_correlation(state: TwoQubitState, theta1_deg: float, theta2_deg: float) -> float:
    """E(theta1, theta2) evaluated directly from the Born probabilities."""
    p = born_coincidence_probs(state, theta1_deg, theta2_deg)
    return (p.tt + p.rr - p.tr - p.rt) / (p.tt + p.rr + p.tr + p.rt)


def chsh_from_born(state: TwoQubitState, settings: AnalyzerSettings | None = None) -> float:
    """|S| from Born-rule E values at the four analyzer combinations."""
    settings = settings or AnalyzerSettings()
    e = [born_correlation(state, t1, t2) for t1, t2 in settings.chsh_pairs()]
    return abs(e[0] + e[1] + e[2] - e[3])


def chsh_max_canonical(eta) -> float:
    """|S| of the ideal dephasing-free state at the canonical settings.

    Closed form sqrt(2) * (1 + sin 2 eta); equals chsh_from_born on
    ideal_state(eta) with default AnalyzerSettings.
    """
    eta_rad = getattr(eta, "eta", eta)
    if not 0.0 <= eta_rad <= pi / 2 + 1e-12:
        raise ValueError(f"mixing angle {eta_rad} outside [0, pi/2]")
    return sqrt(2.0) * (1.0 + sin(2.0 * eta_rad))


def concurrence(state: TwoQubitState) -> float:
    """Wootters concurrence; used as an internal model check only."""
    sy = np.array([[0, -1j], [1j, 0]])
    yy = np.kron(sy, sy)
    rho = state.rho
    r = rho @ yy @ rho.conj() @ yy
    ev = np.sort(np.abs(np.linalg.eigvals(r).real))[::-1]
    lam = np.sqrt(np.clip(ev, 0.0, None))
    return float(max(0.0, lam[0] - lam[1] - lam[2] - lam[3]))
