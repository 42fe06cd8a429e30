"""Raman decay branching weights over Zeeman sublevels.

A circularly polarized write pulse drives ``|g, m> -> |e, m+1>`` and the
spontaneous decay into the storage level proceeds through two pathways,
emitting a sigma+ photon (landing on ``|s, m>``) or a sigma- photon
(landing on ``|s, m+2>``).  The relative pathway weights over an
unpolarized ensemble fix the mixing angle of the photon/atom
polarization state.
"""

from dataclasses import dataclass, field
from math import acos, sqrt

from .angular import clebsch_gordan

_SUM_TOL = 1e-12


@dataclass(frozen=True)
class BranchingEntry:
    """Pathway weights for one initial ground sublevel."""

    mf: int
    p_plus: float   # sigma+ emission, storage sublevel m_s = mf
    p_minus: float  # sigma- emission, storage sublevel m_s = mf + 2


@dataclass(frozen=True)
class BranchingTable:
    """Normalized per-sublevel decay weights for the write Raman process."""

    entries: tuple[BranchingEntry, ...]
    fg: int = 4
    fe: int = 4
    fs: int = 3
    mirror_symmetric: bool = field(default=False, compare=False)

    def __post_init__(self):
        total = 0.0
        for e in self.entries:
            if e.p_plus < 0 or e.p_minus < 0:
                raise ValueError(f"negative branching weight at mf={e.mf}")
            if abs(e.mf) > self.fs and e.p_plus != 0.0:
                raise ValueError(f"forbidden sigma+ final state mf={e.mf}")
            if abs(e.mf + 2) > self.fs and e.p_minus != 0.0:
                raise ValueError(f"forbidden sigma- final state mf={e.mf + 2}")
            total += e.p_plus + e.p_minus
        if abs(total - 1.0) > _SUM_TOL:
            raise ValueError(f"branching weights sum to {total!r}, expected 1")

    @property
    def sigma_plus_fraction(self) -> float:
        return sum(e.p_plus for e in self.entries)

    def p_plus(self, mf: int) -> float:
        for e in self.entries:
            if e.mf == mf:
                return e.p_plus
        return 0.0

    def p_minus(self, mf: int) -> float:
        for e in self.entries:
            if e.mf == mf:
                return e.p_minus
        return 0.0

    def mirror_defect(self) -> float:
        """Largest |p_plus(m) - p_minus(-m-2)| over the table.

        Zero when the table was built from decay amplitudes alone; the
        excitation weighting breaks the reflection pairing slightly.
        """
        return max(abs(e.p_plus - self.p_minus(-e.mf - 2)) for e in self.entries)


@dataclass(frozen=True)
class MixingAngle:
    """Pathway mixing angle in radians, in [0, pi/2]."""

    eta: float

    def __post_init__(self):
        if not 0.0 <= self.eta <= 3.14159265358979 / 2 + 1e-12:
            raise ValueError(f"mixing angle {self.eta} outside [0, pi/2]")


def cg_branching_weights(fg: int = 4, fe: int = 4, fs: int = 3,
                         include_excitation: bool = True) -> BranchingTable:
    """Branching table for sigma+ excitation fg -> fe and decay fe -> fs.

    Weights are |<e,m+1|g,m;1>|^2 * |<e,m+1|s,m_s;1>|^2 with a uniform
    initial population over the 2*fg+1 ground sublevels, normalized to
    unit total.  ``include_excitation=False`` drops the excitation
    factor (uniform excited population); that variant is exactly mirror
    symmetric under m -> -m-2 between the two pathways.
    """
    if abs(fg - fe) > 1:
        raise ValueError(f"no dipole transition between F={fg} and F'={fe}")
    if abs(fe - fs) > 1:
        raise ValueError(f"no dipole decay from F'={fe} to F={fs}")
    if fg < 0 or fe < 0 or fs < 0:
        raise ValueError("angular momentum labels must be non-negative")

    raw = []
    for m in range(-fg, fg + 1):
        me = m + 1
        if abs(me) > fe:
            continue
        exc = clebsch_gordan(fg, m, 1, 1, fe, me) ** 2 if include_excitation else 1.0
        p_plus = exc * clebsch_gordan(fs, m, 1, 1, fe, me) ** 2 if abs(m) <= fs else 0.0
        p_minus = exc * clebsch_gordan(fs, m + 2, 1, -1, fe, me) ** 2 if abs(m + 2) <= fs else 0.0
        raw.append((m, p_plus, p_minus))

    total = sum(p + q for _, p, q in raw)
    if total <= 0.0:
        raise ValueError("branching table is empty; check level labels")
    entries = tuple(
        BranchingEntry(m, p / total, q / total) for m, p, q in raw if p > 0 or q > 0
    )
    return BranchingTable(entries=entries, fg=fg, fe=fe, fs=fs,
                          mirror_symmetric=not include_excitation)


def effective_eta(table: BranchingTable) -> MixingAngle:
    """Global mixing angle: cos^2(eta) = sum p_plus / sum (p_plus + p_minus)."""
    plus = table.sigma_plus_fraction
    total = sum(e.p_plus + e.p_minus for e in table.entries)
    if total <= 0.0:
        raise ValueError("cannot derive a mixing angle from an all-zero table")
    return MixingAngle(acos(sqrt(plus / total)))
