"""Ion-chain equilibrium positions and transverse normal modes.

A linear chain of ions in a harmonic trap settles at the stationary point of
the dimensionless potential

    V(u) = sum_i u_i^2 / 2 + sum_{i<j} 1 / |u_i - u_j|

where the axial coordinates u_i are measured in units of the characteristic
length l = (e^2 / (4 pi eps0 M omega_z^2))^(1/3).  Small transverse
displacements about that equilibrium are governed by the symmetric matrix

    A_ii = 1 - (omega_z/omega_x)^2 * sum_{k != i} 1/|u_i - u_k|^3
    A_ij =     (omega_z/omega_x)^2 / |u_i - u_j|^3          (i != j)

whose eigenpairs (lam_m, b_m) give the transverse mode frequencies
omega_m = omega_x * sqrt(lam_m) and the orthonormal mode matrix b_{i,m}.
The uniform vector is always an eigenvector with lam = 1, so the highest
transverse mode is the center-of-mass mode at omega_x regardless of N.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass

import numpy as np

from .constants import ELEMENTARY_CHARGE, EPSILON_0, TWO_PI, YB171_ION_MASS_KG
from .errors import ChainUnstableError, EquilibriumError

EQUILIBRIUM_TOL = 1e-13
EQUILIBRIUM_MAX_ITER = 200


@dataclass(frozen=True)
class TrapConfig:
    """Trap frequencies (cyclic Hz) and ion properties for a linear chain."""

    n_ions: int
    f_z: float = 0.7e6
    f_x: float = 4.8e6
    f_y: float = 4.6e6
    ion_mass: float = YB171_ION_MASS_KG
    charge: int = 1

    def __post_init__(self):
        if self.n_ions < 1:
            raise ValueError(f"n_ions must be >= 1, got {self.n_ions}")
        if not (self.f_x > self.f_z > 0):
            raise ValueError(
                f"need f_x > f_z > 0 for a stable linear chain, got f_x={self.f_x}, f_z={self.f_z}"
            )

    @property
    def omega_z(self) -> float:
        return TWO_PI * self.f_z

    @property
    def omega_x(self) -> float:
        return TWO_PI * self.f_x

    def characteristic_length(self) -> float:
        """Length unit l of the dimensionless axial coordinates, in meters."""
        q = self.charge * ELEMENTARY_CHARGE
        return (q * q / (4.0 * math.pi * EPSILON_0 * self.ion_mass * self.omega_z**2)) ** (1.0 / 3.0)


@dataclass(frozen=True)
class ModeData:
    """Equilibrium positions plus transverse mode frequencies and vectors.

    positions are dimensionless (units of the characteristic length),
    mode_freqs are angular (rad/s) sorted descending, and mode_matrix holds
    one orthonormal mode per column, aligned with mode_freqs.
    """

    positions: np.ndarray
    mode_freqs: np.ndarray
    mode_matrix: np.ndarray

    @property
    def n(self) -> int:
        return len(self.positions)

    def as_dict(self) -> dict:
        return {
            "positions": list(self.positions),
            "mode_freqs_hz": list(self.mode_freqs / TWO_PI),
            "mode_matrix": [list(row) for row in self.mode_matrix],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModeData":
        return cls(
            positions=np.asarray(d["positions"], dtype=float),
            mode_freqs=TWO_PI * np.asarray(d["mode_freqs_hz"], dtype=float),
            mode_matrix=np.asarray(d["mode_matrix"], dtype=float),
        )

    def save(self, path) -> None:
        with open(path, "w") as f:
            json.dump(self.as_dict(), f, indent=2, sort_keys=True)

    @classmethod
    def load(cls, path) -> "ModeData":
        with open(path) as f:
            return cls.from_dict(json.load(f))


def _pair_differences(u: np.ndarray) -> np.ndarray:
    return u[:, None] - u[None, :]


def _gradient(u: np.ndarray) -> np.ndarray:
    """Gradient of the dimensionless chain potential."""
    du = _pair_differences(u)
    np.fill_diagonal(du, np.inf)
    coulomb = np.sign(du) / du**2
    return u - coulomb.sum(axis=1)


def _hessian(u: np.ndarray) -> np.ndarray:
    du = _pair_differences(u)
    np.fill_diagonal(du, np.inf)
    inv3 = 1.0 / np.abs(du) ** 3
    h = -2.0 * inv3
    np.fill_diagonal(h, 1.0 + 2.0 * inv3.sum(axis=1))
    return h


def solve_equilibrium(cfg: TrapConfig) -> np.ndarray:
    """Equilibrium positions of the chain, dimensionless and sorted ascending.

    Damped Newton iteration seeded from a uniformly spaced chain whose extent
    scales as N^0.56.  Raises EquilibriumError if the gradient norm does not
    drop below 1e-12 within the iteration cap.
    """
    n = cfg.n_ions
    if n == 1:
        return np.zeros(1)

    u = cfg.n_ions**0.56 * np.linspace(-1.0, 1.0, n)
    g = _gradient(u)
    for _ in range(EQUILIBRIUM_MAX_ITER):
        gnorm = np.linalg.norm(g)
        if gnorm < EQUILIBRIUM_TOL:
            return np.sort(u)
        step = np.linalg.solve(_hessian(u), g)
        # Backtrack until the step actually reduces the residual.
        scale = 1.0
        for _ in range(40):
            trial = u - scale * step
            g_trial = _gradient(trial)
            if np.linalg.norm(g_trial) < gnorm:
                break
            scale *= 0.5
        u, g = trial, g_trial
    raise EquilibriumError(
        f"equilibrium solver did not converge for N={n} "
        f"(residual {np.linalg.norm(g):.3e} after {EQUILIBRIUM_MAX_ITER} iterations)",
        residual=float(np.linalg.norm(g)),
    )


def transverse_hessian(cfg: TrapConfig, positions: np.ndarray) -> np.ndarray:
    """Dimensionless transverse curvature matrix A (eigenvalues (omega_m/omega_x)^2)."""
    ratio = (cfg.omega_z / cfg.omega_x) ** 2
    du = _pair_differences(positions)
    np.fill_diagonal(du, np.inf)
    inv3 = 1.0 / np.abs(du) ** 3
    a = ratio * inv3
    np.fill_diagonal(a, 1.0 - ratio * inv3.sum(axis=1))
    return a


def transverse_modes(cfg: TrapConfig, positions: np.ndarray) -> ModeData:
    """Transverse normal modes of the chain at the given equilibrium.

    Modes are sorted by descending frequency, so index 0 is the
    center-of-mass mode at omega_x.  Column signs are canonicalized so the
    largest-magnitude component of each mode is positive.  Raises
    ChainUnstableError if any eigenvalue is non-positive (the linear chain
    would buckle into a zigzag at these parameters).
    """
    positions = np.asarray(positions, dtype=float)
    n = cfg.n_ions
    if len(positions) != n:
        raise ValueError(f"expected {n} positions, got {len(positions)}")
    if n == 1:
        return ModeData(
            positions=np.zeros(1),
            mode_freqs=np.array([cfg.omega_x]),
            mode_matrix=np.ones((1, 1)),
        )
    residual = np.linalg.norm(_gradient(positions))
    if residual > 1e-8:
        raise ValueError(
            f"positions are not an equilibrium (gradient norm {residual:.3e})"
        )

    lam, vecs = np.linalg.eigh(transverse_hessian(cfg, positions))
    if lam[0] <= 0.0:
        raise ChainUnstableError(
            f"chain is transversely unstable for N={n}: lowest mode eigenvalue "
            f"{lam[0]:.3e} <= 0 (raise f_x or reduce the ion count)"
        )
    order = np.argsort(lam)[::-1]
    lam = lam[order]
    vecs = vecs[:, order]
    for m in range(n):
        col = vecs[:, m]
        if col[np.argmax(np.abs(col))] < 0:
            vecs[:, m] = -col
    return ModeData(
        positions=positions,
        mode_freqs=cfg.omega_x * np.sqrt(lam),
        mode_matrix=vecs,
    )


def chain_modes(cfg: TrapConfig) -> ModeData:
    """Convenience wrapper: solve the equilibrium, then the transverse modes."""
    return transverse_modes(cfg, solve_equilibrium(cfg))
