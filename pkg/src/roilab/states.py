"""Qubit states: canonical preparations, Bloch coordinates, samplers."""

from __future__ import annotations

import math

import numpy as np

from .errors import ConfigError
from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, expect

KET_H = np.array([1.0, 0.0], dtype=complex)
KET_V = np.array([0.0, 1.0], dtype=complex)
KET_PLUS = np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0)
KET_MINUS = np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0)
# Extremal-correlation pair: cos(pi/8)|H> -/+ sin(pi/8)|V>.
KET_PSI_PLUS = np.array([math.cos(math.pi / 8), -math.sin(math.pi / 8)], dtype=complex)
KET_PSI_MINUS = np.array([math.cos(math.pi / 8), math.sin(math.pi / 8)], dtype=complex)

NAMED_KETS = {
    "H": KET_H,
    "V": KET_V,
    "plus": KET_PLUS,
    "minus": KET_MINUS,
    "psi-minus": KET_PSI_MINUS,
    "psi-plus": KET_PSI_PLUS,
}

# The five preparations used throughout the reference experiment, in table order.
CANONICAL_STATES = ("H", "V", "plus", "minus", "psi-minus")


def ket(alpha: complex, beta: complex) -> np.ndarray:
    """Normalized alpha|H> + beta|V>."""
    v = np.array([alpha, beta], dtype=complex)
    n = float(np.sqrt(np.sum(np.abs(v) ** 2)))
    if n == 0.0:
        raise ConfigError("zero state vector")
    return v / n


def named_ket(name: str) -> np.ndarray:
    try:
        return NAMED_KETS[name]
    except KeyError:
        raise ConfigError(f"unknown state {name!r}; known: {', '.join(NAMED_KETS)}") from None


def dm(psi: np.ndarray) -> np.ndarray:
    """|psi><psi| as a density matrix."""
    return np.outer(psi, psi.conj())


def bloch(rho: np.ndarray) -> tuple[float, float, float]:
    """(r_x, r_y, r_z) of a qubit density matrix."""
    return expect(SIGMA_X, rho), expect(SIGMA_Y, rho), expect(SIGMA_Z, rho)


def from_bloch(rx: float, ry: float, rz: float) -> np.ndarray:
    return 0.5 * (np.eye(2, dtype=complex) + rx * SIGMA_X + ry * SIGMA_Y + rz * SIGMA_Z)


def random_pure_ket(rng: np.random.Generator, real: bool = False) -> np.ndarray:
    """Haar-random pure qubit ket; `real` restricts to real superpositions."""
    if real:
        theta = rng.uniform(0.0, 2.0 * math.pi)
        return np.array([math.cos(theta), math.sin(theta)], dtype=complex)
    v = rng.normal(size=2) + 1j * rng.normal(size=2)
    return v / np.sqrt(np.sum(np.abs(v) ** 2))


def random_state(rng: np.random.Generator) -> np.ndarray:
    """Random mixed qubit state, uniform over the Bloch ball."""
    r = rng.uniform() ** (1.0 / 3.0)
    u = rng.normal(size=3)
    u *= r / np.sqrt(np.sum(u * u))
    return from_bloch(u[0], u[1], u[2])
