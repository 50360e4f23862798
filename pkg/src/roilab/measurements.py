"""Binary POVMs, instruments, Heisenberg duals, and sequential joint observables.

Outcomes are the integers +1 and -1 throughout. The noisy-Z family
``noisy_z(gamma)`` and its Lueders instrument are the workhorses: for
gamma in [0, pi/4] the Kraus operators K(+/-gamma) are PSD, so a single
square root per outcome realises the minimally disturbing update.
"""

from __future__ import annotations

import json
import math
from dataclasses import InitVar, dataclass
from typing import Mapping

import numpy as np

from .errors import DimensionMismatch, OutOfRange, UnknownOutcome
from .linalg import (
    HERM_TOL,
    SIGMA_X,
    SIGMA_Z,
    as_cmatrix,
    check_effect,
    dagger,
    frob,
    psd_sqrt,
    schur,
)

OUTCOMES = (1, -1)


def _freeze(m: np.ndarray) -> np.ndarray:
    out = np.array(m, dtype=complex)
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class BinaryPovm:
    """Ordered effect pair (E_plus, E_minus) summing to the identity."""

    plus: np.ndarray
    minus: np.ndarray

    def __post_init__(self):
        p = check_effect(self.plus)
        m = check_effect(self.minus)
        if p.shape != m.shape:
            raise DimensionMismatch("effects differ in dimension")
        if frob(p + m - np.eye(p.shape[0])) > HERM_TOL:
            raise OutOfRange("effects do not sum to the identity")
        object.__setattr__(self, "plus", _freeze(p))
        object.__setattr__(self, "minus", _freeze(m))

    @property
    def dim(self) -> int:
        return self.plus.shape[0]

    def effect(self, a: int) -> np.ndarray:
        if a == 1:
            return self.plus
        if a == -1:
            return self.minus
        raise UnknownOutcome(f"outcome {a!r} not in {OUTCOMES}")


@dataclass(frozen=True)
class Instrument:
    """Per-outcome Kraus lists; the summed dual action preserves the trace.

    Kraus lists (rather than abstract maps) keep room for outcome-dependent
    noise channels as extra Kraus factors, although the constructions here
    only ever produce the bare single-Kraus Lueders form.
    """

    kraus: Mapping[int, tuple[np.ndarray, ...]]

    def __post_init__(self):
        frozen = {}
        total = None
        for a, ops in self.kraus.items():
            ops = tuple(_freeze(as_cmatrix(k)) for k in ops)
            if not ops:
                raise UnknownOutcome(f"outcome {a} has no Kraus operators")
            frozen[a] = ops
            for k in ops:
                contrib = dagger(k) @ k
                total = contrib if total is None else total + contrib
        if frob(total - np.eye(total.shape[0])) > HERM_TOL:
            raise OutOfRange("Kraus operators do not sum to a trace-preserving map")
        object.__setattr__(self, "kraus", frozen)

    @property
    def dim(self) -> int:
        return next(iter(self.kraus.values()))[0].shape[0]

    @property
    def outcomes(self) -> tuple[int, ...]:
        return tuple(self.kraus)

    def kraus_for(self, a: int) -> tuple[np.ndarray, ...]:
        try:
            return self.kraus[a]
        except KeyError:
            raise UnknownOutcome(f"outcome {a!r} not in {self.outcomes}") from None

    def induced_effect(self, a: int) -> np.ndarray:
        ops = self.kraus_for(a)
        return sum(dagger(k) @ k for k in ops)

    def induced_povm(self) -> BinaryPovm:
        return BinaryPovm(self.induced_effect(1), self.induced_effect(-1))


@dataclass(frozen=True)
class JointPovm:
    """Four effects G[a, b] over outcome pairs, summing to the identity.

    ``slack`` widens the construction tolerances for near-feasible
    quadruples coming out of iterative solvers; exact constructions use
    the strict default.
    """

    effects: Mapping[tuple[int, int], np.ndarray]
    slack: InitVar[float | None] = None

    def __post_init__(self, slack):
        sum_tol = HERM_TOL if slack is None else max(HERM_TOL, slack)
        frozen = {}
        total = None
        for key in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            if key not in self.effects:
                raise UnknownOutcome(f"missing joint outcome {key}")
            e = check_effect(self.effects[key], tol=sum_tol)
            frozen[key] = _freeze(e)
            total = e if total is None else total + e
        if frob(total - np.eye(total.shape[0])) > sum_tol:
            raise OutOfRange("joint effects do not sum to the identity")
        object.__setattr__(self, "effects", frozen)

    @property
    def dim(self) -> int:
        return self.effects[(1, 1)].shape[0]

    def effect(self, a: int, b: int) -> np.ndarray:
        try:
            return self.effects[(a, b)]
        except KeyError:
            raise UnknownOutcome(f"outcome pair {(a, b)!r}") from None

    def margins(self) -> tuple[BinaryPovm, BinaryPovm]:
        """First margin sums over b, second over a."""
        first = BinaryPovm(
            self.effects[(1, 1)] + self.effects[(1, -1)],
            self.effects[(-1, 1)] + self.effects[(-1, -1)],
        )
        second = BinaryPovm(
            self.effects[(1, 1)] + self.effects[(-1, 1)],
            self.effects[(1, -1)] + self.effects[(-1, -1)],
        )
        return first, second


def margins(joint: JointPovm) -> tuple[BinaryPovm, BinaryPovm]:
    return joint.margins()


def noisy_z(gamma: float) -> BinaryPovm:
    """Noisy Z observable: effects (1/2)[I +/- sin(2 gamma) sigma_z].

    gamma runs over [0, pi/4]: gamma = 0 is the trivial coin, gamma = pi/4
    the sharp Z. Outside that interval the Lueders Kraus operators would
    stop being PSD, so the angle is rejected instead.
    """
    if not 0.0 <= gamma <= math.pi / 4:
        raise OutOfRange(f"gamma = {gamma} outside [0, pi/4]")
    s = math.sin(2.0 * gamma)
    half = 0.5 * np.eye(2, dtype=complex)
    return BinaryPovm(half + 0.5 * s * SIGMA_Z, half - 0.5 * s * SIGMA_Z)


def noisy_x(eta: float) -> BinaryPovm:
    """Noisy X observable: effects (1/2)(I +/- eta sigma_x), eta in [0, 1]."""
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"visibility eta = {eta} outside [0, 1]")
    half = 0.5 * np.eye(2, dtype=complex)
    return BinaryPovm(half + 0.5 * eta * SIGMA_X, half - 0.5 * eta * SIGMA_X)


def sharp_z() -> BinaryPovm:
    return noisy_z(math.pi / 4)


def sharp_x() -> BinaryPovm:
    return noisy_x(1.0)


def lueders_instrument(povm: BinaryPovm) -> Instrument:
    """Minimally disturbing instrument: one Kraus sqrt(E_a) per outcome."""
    return Instrument({1: (psd_sqrt(povm.plus),), -1: (psd_sqrt(povm.minus),)})


def trivial_instrument(dim: int = 2) -> Instrument:
    """The no-measurement convention: each outcome maps rho to rho/2."""
    k = np.eye(dim, dtype=complex) / math.sqrt(2.0)
    return Instrument({1: (k,), -1: (k,)})


def apply_instrument(instr: Instrument, a: int, rho) -> np.ndarray:
    """Sub-normalized post-measurement state sum_k K rho K^dag."""
    r = as_cmatrix(rho)
    ops = instr.kraus_for(a)
    if ops[0].shape != r.shape:
        raise DimensionMismatch("instrument and state dimensions differ")
    return sum(k @ r @ dagger(k) for k in ops)


def heisenberg(instr: Instrument, a: int, op) -> np.ndarray:
    """Dual action sum_k K^dag M K; pairs with apply_instrument under the trace."""
    m = as_cmatrix(op)
    ops = instr.kraus_for(a)
    if ops[0].shape != m.shape:
        raise DimensionMismatch("instrument and operator dimensions differ")
    return sum(dagger(k) @ m @ k for k in ops)


def total_channel(instr: Instrument, rho) -> np.ndarray:
    """Unconditional output state: sum over outcomes of apply_instrument."""
    return sum(apply_instrument(instr, a, rho) for a in instr.outcomes)


def noisy_z_total_mask(gamma: float) -> np.ndarray:
    """Schur mask of the noisy-Z total channel: [[1, cos 2g], [cos 2g, 1]]."""
    c = math.cos(2.0 * gamma)
    return np.array([[1.0, c], [c, 1.0]], dtype=complex)


def sequential_joint(instr: Instrument, final: BinaryPovm) -> JointPovm:
    """Joint observable of a sequence: G[a, b] = dual_a(final_b).

    First margin is the instrument's induced POVM; second margin is the
    total-channel dual of the final POVM.
    """
    if instr.dim != final.dim:
        raise DimensionMismatch("instrument and final POVM dimensions differ")
    return JointPovm(
        {
            (a, b): heisenberg(instr, a, final.effect(b))
            for a in OUTCOMES
            for b in OUTCOMES
        }
    )


def joint_for_gamma(gamma: float) -> JointPovm:
    """Noisy-Z then sharp-X joint observable for the given angle."""
    return sequential_joint(lueders_instrument(noisy_z(gamma)), sharp_x())


def noisy_z_kraus(gamma: float, a: int) -> np.ndarray:
    """Closed-form Lueders Kraus: (1/sqrt2)[cos(g) I + a sin(g) sigma_z]."""
    if a not in OUTCOMES:
        raise UnknownOutcome(f"outcome {a!r}")
    return (math.cos(gamma) * np.eye(2, dtype=complex) + a * math.sin(gamma) * SIGMA_Z) / math.sqrt(2.0)


def apply_noisy_z_schur(gamma: float, a: int, rho) -> np.ndarray:
    """Schur-mask form of the noisy-Z Lueders update (equals K rho K)."""
    s = math.sin(2.0 * gamma)
    c = math.cos(2.0 * gamma)
    mask = 0.5 * np.array([[1.0 + a * s, c], [c, 1.0 - a * s]], dtype=complex)
    return schur(mask, as_cmatrix(rho))


# --- JSON serialization -----------------------------------------------------
#
# Documents carry the dimension, the outcome list, and row-major complex
# entries as [re, im] pairs; round-trips are exact to well below 1e-12.


def _mat_to_entries(m: np.ndarray) -> list[list[float]]:
    return [[float(z.real), float(z.imag)] for z in m.reshape(-1)]


def _entries_to_mat(entries, dim: int) -> np.ndarray:
    flat = np.array([complex(re, im) for re, im in entries], dtype=complex)
    if flat.size != dim * dim:
        raise DimensionMismatch(f"expected {dim * dim} entries, got {flat.size}")
    return flat.reshape(dim, dim)


def povm_to_dict(p: BinaryPovm) -> dict:
    return {
        "kind": "binary_povm",
        "dim": p.dim,
        "outcomes": [1, -1],
        "effects": [_mat_to_entries(p.plus), _mat_to_entries(p.minus)],
    }


def povm_from_dict(doc: Mapping) -> BinaryPovm:
    dim = int(doc["dim"])
    plus, minus = (_entries_to_mat(e, dim) for e in doc["effects"])
    return BinaryPovm(plus, minus)


def instrument_to_dict(instr: Instrument) -> dict:
    return {
        "kind": "instrument",
        "dim": instr.dim,
        "outcomes": list(instr.outcomes),
        "kraus": {str(a): [_mat_to_entries(k) for k in instr.kraus_for(a)] for a in instr.outcomes},
    }


def instrument_from_dict(doc: Mapping) -> Instrument:
    dim = int(doc["dim"])
    return Instrument(
        {int(a): tuple(_entries_to_mat(k, dim) for k in ops) for a, ops in doc["kraus"].items()}
    )


def joint_to_dict(j: JointPovm) -> dict:
    keys = [(1, 1), (1, -1), (-1, 1), (-1, -1)]
    return {
        "kind": "joint_povm",
        "dim": j.dim,
        "outcomes": [list(k) for k in keys],
        "effects": [_mat_to_entries(j.effect(*k)) for k in keys],
    }


def joint_from_dict(doc: Mapping) -> JointPovm:
    dim = int(doc["dim"])
    effects = {
        (int(a), int(b)): _entries_to_mat(entries, dim)
        for (a, b), entries in zip(doc["outcomes"], doc["effects"])
    }
    return JointPovm(effects)


def save_json(obj, path) -> None:
    to_dict = {
        BinaryPovm: povm_to_dict,
        Instrument: instrument_to_dict,
        JointPovm: joint_to_dict,
    }[type(obj)]
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(to_dict(obj), fh, indent=1, sort_keys=True)


def load_json(path):
    with open(path, encoding="utf-8") as fh:
        doc = json.load(fh)
    from_dict = {
        "binary_povm": povm_from_dict,
        "instrument": instrument_from_dict,
        "joint_povm": joint_from_dict,
    }[doc["kind"]]
    return from_dict(doc)
