"""Exact classical treatment of the longitudinal-field Ising chain.

With no transverse field the Hamiltonian

    E(s) = sum_{i<j} J_ij s_i s_j + B_x sum_i s_i        (s_i = +-1)

is diagonal in the x basis, so ground states can be found exactly by
enumeration.  The interaction energy depends only on which spins point up,
so for each up-spin count k the sector minimum E*_k is computed once; the
ground-state energy as a function of B_x is then the lower envelope of the
straight lines E*_k + B_x * m_k with m_k = 2k - N.  Envelope crossings are
the first-order transition fields, and the magnetization of the active
sector forms the staircase.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .couplings import CouplingMatrix
from .errors import CapacityError

ENUMERATION_CAP = 24
_CHUNK = 1 << 18

# Relative scale for degenerate-energy detection: float couplings never tie
# except via symmetry, and symmetric ties agree to rounding error.
DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class SpinConfiguration:
    """An N-spin x-basis state as a bitmask (bit i set means spin i is up)."""

    bits: int
    n: int

    def __post_init__(self):
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bitmask {self.bits} out of range for {self.n} spins")

    @property
    def m_x(self) -> int:
        """Net magnetization N_up - N_down."""
        return 2 * self.bits.bit_count() - self.n

    @property
    def n_up(self) -> int:
        return self.bits.bit_count()

    def spins(self) -> np.ndarray:
        """Eigenvalues s_i = +-1 as an integer array indexed by site."""
        bits = (self.bits >> np.arange(self.n)) & 1
        return 2 * bits - 1

    def pattern(self) -> str:
        """Site-ordered string, 'u' for up / 'd' for down, site 0 first."""
        return "".join("u" if (self.bits >> i) & 1 else "d" for i in range(self.n))

    @classmethod
    def from_pattern(cls, pattern: str) -> "SpinConfiguration":
        bits = 0
        for i, c in enumerate(pattern):
            if c == "u":
                bits |= 1 << i
            elif c != "d":
                raise ValueError(f"pattern must contain only 'u'/'d', got {pattern!r}")
        return cls(bits=bits, n=len(pattern))

    def mirrored(self) -> "SpinConfiguration":
        bits = 0
        for i in range(self.n):
            if (self.bits >> i) & 1:
                bits |= 1 << (self.n - 1 - i)
        return SpinConfiguration(bits=bits, n=self.n)

    def flipped(self) -> "SpinConfiguration":
        return SpinConfiguration(bits=~self.bits & ((1 << self.n) - 1), n=self.n)

    def __repr__(self):
        return f"SpinConfiguration({self.pattern()!r})"


def classical_energy(cm: CouplingMatrix, b_x: float, s: SpinConfiguration) -> float:
    """Diagonal energy of one configuration (rad/s)."""
    if s.n != cm.n:
        raise ValueError(f"configuration has {s.n} spins, couplings have {cm.n}")
    spins = s.spins().astype(float)
    return 0.5 * float(spins @ (cm.j @ spins)) + b_x * float(spins.sum())


def interaction_energies(cm: CouplingMatrix, masks: np.ndarray) -> np.ndarray:
    """Vectorized interaction part sum_{i<j} J_ij s_i s_j for many bitmasks."""
    shifts = np.arange(cm.n, dtype=np.uint64)
    spins = (((masks[:, None] >> shifts) & 1).astype(np.float64) * 2.0) - 1.0
    return 0.5 * np.einsum("ij,ij->i", spins @ cm.j, spins)


def _sector_mask_chunks(n: int, k: int):
    """Yield uint64 arrays covering all n-bit masks with popcount k (ascending)."""
    if k == 0:
        yield np.zeros(1, dtype=np.uint64)
        return
    if k == n:
        yield np.array([(1 << n) - 1], dtype=np.uint64)
        return
    mask = (1 << k) - 1
    limit = 1 << n
    buf = []
    while mask < limit:
        buf.append(mask)
        if len(buf) == _CHUNK:
            yield np.array(buf, dtype=np.uint64)
            buf = []
        # Gosper's hack: next integer with the same popcount.
        low = mask & -mask
        ripple = mask + low
        mask = ripple | (((mask ^ ripple) // low) >> 2)
    if buf:
        yield np.array(buf, dtype=np.uint64)


def sector_minimum(cm: CouplingMatrix, n_up: int) -> tuple[float, list[SpinConfiguration]]:
    """Exhaustive minimum of the interaction energy over a fixed up-spin count.

    Returns the sector energy and every exactly-degenerate minimizer (ties
    within DEGENERACY_RTOL * N * j_max are kept, e.g. mirror pairs).
    """
    n = cm.n
    if not 0 <= n_up <= n:
        raise ValueError(f"n_up={n_up} out of range for {n} spins")
    if n > ENUMERATION_CAP:
        raise CapacityError(
            f"sector enumeration capped at {ENUMERATION_CAP} spins, got {n}"
        )
    tol = DEGENERACY_RTOL * n * cm.j_max
    best = np.inf
    candidates: list[int] = []
    for masks in _sector_mask_chunks(n, n_up):
        energies = interaction_energies(cm, masks)
        chunk_min = energies.min()
        if chunk_min < best - tol:
            best = chunk_min
            candidates = []
        keep = energies <= best + tol
        candidates.extend(int(m) for m in masks[keep])
        best = min(best, chunk_min)
    # Re-evaluate candidates through the scalar energy so reported energies
    # match classical_energy exactly, then re-apply the tie tolerance.
    configs = [SpinConfiguration(bits=m, n=n) for m in sorted(candidates)]
    exact = [classical_energy(cm, 0.0, s) for s in configs]
    e_min = min(exact)
    states = [s for s, e in zip(configs, exact) if e <= e_min + tol]
    return e_min, states


@dataclass(frozen=True)
class Plateau:
    """One staircase step: the B_x interval where a sector is the ground state."""

    b_x_interval: tuple[float, float]
    magnetization: int
    ground_states: list[SpinConfiguration]
    sector_energy: float

    def as_dict(self) -> dict:
        return {
            "b_x_interval_rad_s": list(self.b_x_interval),
            "magnetization": self.magnetization,
            "ground_states": [s.pattern() for s in self.ground_states],
            "sector_energy_rad_s": self.sector_energy,
        }


@dataclass(frozen=True)
class StaircaseResult:
    """Plateaus and first-order transition fields over [0, b_x_max]."""

    plateaus: list[Plateau]
    transitions: list[float]
    b_x_max: float
    j_max: float

    @property
    def n_plateaus(self) -> int:
        return len(self.plateaus)

    def plateau_at(self, b_x: float) -> Plateau:
        if not 0.0 <= b_x <= self.b_x_max:
            raise ValueError(f"b_x={b_x} outside [0, {self.b_x_max}]")
        for p in self.plateaus:
            if b_x <= p.b_x_interval[1]:
                return p
        return self.plateaus[-1]

    def magnetization_at(self, b_x: float) -> int:
        return self.plateau_at(b_x).magnetization

    def as_dict(self) -> dict:
        return {
            "plateaus": [p.as_dict() for p in self.plateaus],
            "transitions_rad_s": list(self.transitions),
            "transitions_over_jmax": [t / self.j_max for t in self.transitions]
            if self.j_max > 0
            else [],
            "b_x_max_rad_s": self.b_x_max,
            "j_max_rad_s": self.j_max,
        }

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.as_dict(), f, indent=2, sort_keys=True)


def staircase(cm: CouplingMatrix, b_x_max: float | None = None) -> StaircaseResult:
    """Exact ground-state staircase from the lower envelope of sector lines.

    Transition fields are computed directly as crossings of the sector lines
    E*_k + B_x (2k - N), so there are no grid artifacts.
    """
    n = cm.n
    if n > ENUMERATION_CAP:
        raise CapacityError(f"staircase capped at {ENUMERATION_CAP} spins, got {n}")
    if b_x_max is None:
        b_x_max = 3.0 * n * cm.j_max if cm.j_max > 0 else 1.0
    if b_x_max <= 0:
        raise ValueError("b_x_max must be positive")

    sector_e = []
    sector_states = []
    for k in range(n + 1):
        e, states = sector_minimum(cm, k)
        sector_e.append(e)
        sector_states.append(states)
    magnetization = [2 * k - n for k in range(n + 1)]
    tol = DEGENERACY_RTOL * n * cm.j_max

    # Active sector at B_x = 0+: lowest intercept, ties going to the line
    # that stays lowest for B_x > 0 (most negative slope).
    e_min = min(sector_e)
    active = min(
        (k for k in range(n + 1) if sector_e[k] <= e_min + tol),
        key=lambda k: magnetization[k],
    )

    plateaus = []
    transitions = []
    b_cur = 0.0
    while True:
        m_a, e_a = magnetization[active], sector_e[active]
        crossings = []
        for k in range(n + 1):
            if magnetization[k] >= m_a:
                continue
            b = (sector_e[k] - e_a) / (m_a - magnetization[k])
            if b > b_cur:
                crossings.append((b, k))
        if not crossings:
            b_next, k_next = b_x_max, None
        else:
            b_min = min(b for b, _ in crossings)
            # Among (near-)simultaneous crossings take the steepest line so
            # degenerate multi-line intersections yield a single transition.
            b_tol = 1e-12 * max(b_min, 1.0)
            k_next = min(
                (k for b, k in crossings if b <= b_min + b_tol),
                key=lambda k: magnetization[k],
            )
            b_next = b_min
        if k_next is None or b_next >= b_x_max:
            plateaus.append(
                Plateau((b_cur, b_x_max), m_a, sector_states[active], e_a)
            )
            break
        plateaus.append(Plateau((b_cur, b_next), m_a, sector_states[active], e_a))
        transitions.append(b_next)
        b_cur = b_next
        active = k_next

    return StaircaseResult(
        plateaus=plateaus, transitions=transitions, b_x_max=b_x_max, j_max=cm.j_max
    )


@dataclass(frozen=True)
class GroundStateResult:
    """Ground states of the diagonal model at one field value."""

    b_x: float
    m_x: int | None  # None when b_x sits exactly on a transition
    states: list[SpinConfiguration]
    degenerate: bool


def ground_state_magnetization(cm: CouplingMatrix, b_x: float) -> GroundStateResult:
    """Evaluate the staircase at one field value.

    Exactly at a transition the two adjacent plateaus are both ground states;
    the result is flagged degenerate, pools both state sets, and carries no
    single magnetization.
    """
    if b_x < 0:
        raise ValueError("b_x must be non-negative (negative fields mirror by spin flip)")
    span = 3.0 * cm.n * cm.j_max if cm.j_max > 0 else 1.0
    sc = staircase(cm, b_x_max=max(span, 2.0 * b_x + span))
    for idx, t in enumerate(sc.transitions):
        if abs(b_x - t) <= 1e-12 * max(abs(t), 1.0):
            states = sc.plateaus[idx].ground_states + sc.plateaus[idx + 1].ground_states
            return GroundStateResult(b_x=b_x, m_x=None, states=states, degenerate=True)
    p = sc.plateau_at(b_x)
    return GroundStateResult(
        b_x=b_x, m_x=p.magnetization, states=p.ground_states, degenerate=False
    )
