"""Hidden-variable-level criteria on sequential probability tables.

Two levels live here:

* table-level tests -- no-signalling-in-time (does measuring first disturb
  the final statistics?) and the weaker retrieval condition (can the
  undisturbed statistics be recovered on average when the final setting
  may depend on the first outcome?);
* model-level constructions -- a classical model satisfying the retrieval
  premise embeds into a diagonal quantum model, and any quantum sequence
  built from an instrument plus a retrieving POVM unravels into a
  classical model over the eigenbasis of the state.

"No measurement" is the distinguished first setting "0", represented by
the trivial instrument rho -> rho/2 per outcome so that every table keeps
a uniform (a, b) layout.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import InvalidModel, MissingSetting, OutOfRange
from .linalg import check_state, expect, frob, herm_eig
from .measurements import (
    OUTCOMES,
    BinaryPovm,
    Instrument,
    apply_instrument,
    heisenberg,
    trivial_instrument,
)

NO_MEASUREMENT = "0"
TABLE_TOL = 1e-9


@dataclass(frozen=True)
class SequentialStats:
    """Probability table p(a, b | x, y) over outcome pairs and settings.

    ``table`` maps (a, b, x, y) to a probability; the first setting "0"
    denotes no measurement. ``check_normalization=False`` admits empirical
    tables (independent per-cell shot noise does not normalize exactly).
    """

    first_settings: tuple[str, ...]
    second_settings: tuple[str, ...]
    table: Mapping[tuple[int, int, str, str], float]
    check_normalization: bool = field(default=True)

    def __post_init__(self):
        object.__setattr__(self, "table", dict(self.table))
        if NO_MEASUREMENT not in self.first_settings:
            raise MissingSetting("first settings must include the distinguished '0'")
        contexts = set()
        for (a, b, x, y), prob in self.table.items():
            if a not in OUTCOMES or b not in OUTCOMES:
                raise OutOfRange(f"outcomes {(a, b)} must be +/-1")
            if not -1e-12 <= prob <= 1.0 + 1e-12:
                raise OutOfRange(f"p{(a, b, x, y)} = {prob} outside [0, 1]")
            contexts.add((x, y))
        if not self.check_normalization:
            return
        for x, y in contexts:
            total = sum(self.table[(a, b, x, y)] for a in OUTCOMES for b in OUTCOMES)
            if abs(total - 1.0) > TABLE_TOL:
                raise OutOfRange(f"context {(x, y)} sums to {total}, not 1")
            if x == NO_MEASUREMENT:
                for b in OUTCOMES:
                    gap = self.table[(1, b, x, y)] - self.table[(-1, b, x, y)]
                    if abs(gap) > TABLE_TOL:
                        raise OutOfRange(
                            "no-measurement rows must split evenly over the dummy outcome"
                        )

    def prob(self, a: int, b: int, x: str, y: str) -> float:
        try:
            return self.table[(a, b, x, y)]
        except KeyError:
            raise MissingSetting(f"no entry for (a={a}, b={b}, x={x!r}, y={y!r})") from None

    def second_marginal(self, b: int, x: str, y: str) -> float:
        return sum(self.prob(a, b, x, y) for a in OUTCOMES)

    def to_json(self) -> dict:
        return {
            "first_settings": list(self.first_settings),
            "second_settings": list(self.second_settings),
            "records": [
                {"a": a, "b": b, "x": x, "y": y, "p": float(p)}
                for (a, b, x, y), p in sorted(self.table.items(), key=lambda kv: repr(kv[0]))
            ],
        }

    @classmethod
    def from_json(cls, doc: Mapping, check_normalization: bool = True) -> "SequentialStats":
        table = {(r["a"], r["b"], r["x"], r["y"]): float(r["p"]) for r in doc["records"]}
        return cls(
            tuple(doc["first_settings"]),
            tuple(doc["second_settings"]),
            table,
            check_normalization,
        )


def sequential_stats(
    rho,
    first: Mapping[str, Instrument],
    second: Mapping[str, BinaryPovm],
) -> SequentialStats:
    """Exact quantum table for all (first instrument) x (final POVM) pairs.

    The no-measurement setting "0" is appended automatically.
    """
    r = check_state(rho)
    instruments = dict(first)
    if NO_MEASUREMENT not in instruments:
        instruments[NO_MEASUREMENT] = trivial_instrument(r.shape[0])
    table = {}
    for x, instr in instruments.items():
        posts = {a: apply_instrument(instr, a, r) for a in OUTCOMES}
        for y, povm in second.items():
            for a in OUTCOMES:
                for b in OUTCOMES:
                    table[(a, b, x, y)] = max(0.0, expect(povm.effect(b), posts[a]))
    return SequentialStats(tuple(instruments), tuple(second), table)


@dataclass(frozen=True)
class ConditionReport:
    """Outcome of a table-level test: worst spot and signed gap."""

    holds: bool
    max_violation: float
    worst_b: int
    signed_gap: float


def check_nsit(stats: SequentialStats, x: str, y: str, tol: float = TABLE_TOL) -> ConditionReport:
    """No-signalling in time: marginalizing the first outcome of (x, y)
    must reproduce the unmeasured-first statistics of y."""
    worst_b, worst_gap = 1, 0.0
    for b in OUTCOMES:
        gap = stats.second_marginal(b, x, y) - stats.second_marginal(b, NO_MEASUREMENT, y)
        if abs(gap) > abs(worst_gap):
            worst_b, worst_gap = b, gap
    return ConditionReport(abs(worst_gap) <= tol, abs(worst_gap), worst_b, worst_gap)


def check_roi(
    stats: SequentialStats,
    x: str,
    y_adaptive: Mapping[int, str] | str,
    y_reference: str,
    tol: float = TABLE_TOL,
) -> ConditionReport:
    """Average retrieval: the y_reference statistics without a first
    measurement must equal the outcome-wired sequence (x, y_a).

    ``y_adaptive`` maps each first outcome to a final setting; a bare
    string is the non-adaptive shorthand for both outcomes.
    """
    if isinstance(y_adaptive, str):
        y_adaptive = {a: y_adaptive for a in OUTCOMES}
    worst_b, worst_gap = 1, 0.0
    for b in OUTCOMES:
        wired = sum(stats.prob(a, b, x, y_adaptive[a]) for a in OUTCOMES)
        gap = stats.second_marginal(b, NO_MEASUREMENT, y_reference) - wired
        if abs(gap) > abs(worst_gap):
            worst_b, worst_gap = b, gap
    return ConditionReport(abs(worst_gap) <= tol, abs(worst_gap), worst_b, worst_gap)


@dataclass(frozen=True)
class HvModel:
    """Finite hidden-variable model for one wired sequence.

    weights: distribution over macrostates lambda.
    joint: (lambda, a, b) -> response probability for the wired sequence
        (first setting x, adaptive final y_a).
    null: (lambda, b) -> response probability for (no measurement, y).
    """

    weights: Mapping[int, float]
    joint: Mapping[tuple[int, int, int], float]
    null: Mapping[tuple[int, int], float]

    def __post_init__(self):
        object.__setattr__(self, "weights", dict(self.weights))
        object.__setattr__(self, "joint", dict(self.joint))
        object.__setattr__(self, "null", dict(self.null))
        total = sum(self.weights.values())
        if abs(total - 1.0) > TABLE_TOL:
            raise InvalidModel(f"weights sum to {total}, not 1")
        for key, val in list(self.joint.items()) + list(self.null.items()):
            if not -1e-12 <= val <= 1.0 + 1e-12:
                raise InvalidModel(f"response {key} = {val} outside [0, 1]")
        for lam in self.weights:
            joint_sum = sum(self.joint[(lam, a, b)] for a in OUTCOMES for b in OUTCOMES)
            null_sum = sum(self.null[(lam, b)] for b in OUTCOMES)
            if abs(joint_sum - 1.0) > TABLE_TOL or abs(null_sum - 1.0) > TABLE_TOL:
                raise InvalidModel(f"responses of lambda = {lam} are not distributions")

    @property
    def labels(self) -> tuple[int, ...]:
        return tuple(sorted(self.weights))

    def averaged_joint(self, a: int, b: int) -> float:
        return sum(self.weights[lam] * self.joint[(lam, a, b)] for lam in self.weights)

    def averaged_null(self, b: int) -> float:
        return sum(self.weights[lam] * self.null[(lam, b)] for lam in self.weights)

    def retrieval_premise_gap(self) -> float:
        """Max over b of |avg null - sum_a avg joint| (0 under the premise)."""
        return max(
            abs(self.averaged_null(b) - sum(self.averaged_joint(a, b) for a in OUTCOMES))
            for b in OUTCOMES
        )


def classical_to_quantum(model: HvModel):
    """Embed a retrieval-satisfying model into diagonal quantum objects.

    Returns (rho, joint_effects, final_povm) with rho = sum p(l) |l><l|,
    G[a, b] = sum_l p(a, b | l) |l><l| and B_b = sum_l p(b | 0, l) |l><l|.
    Raises InvalidModel when the averaged retrieval premise fails, and
    verifies the pointwise margin identity sum_a G[a, b] = B_b that the
    all-states argument guarantees for genuinely retrievable models.
    """
    gap = model.retrieval_premise_gap()
    if gap > TABLE_TOL:
        raise InvalidModel(f"retrieval premise fails by {gap:.3e}")
    labels = model.labels
    d = len(labels)
    rho = np.zeros((d, d), dtype=complex)
    for i, lam in enumerate(labels):
        rho[i, i] = model.weights[lam]
    joint_effects = {}
    for a in OUTCOMES:
        for b in OUTCOMES:
            g = np.zeros((d, d), dtype=complex)
            for i, lam in enumerate(labels):
                g[i, i] = model.joint[(lam, a, b)]
            joint_effects[(a, b)] = g
    final = {}
    for b in OUTCOMES:
        eff = np.zeros((d, d), dtype=complex)
        for i, lam in enumerate(labels):
            eff[i, i] = model.null[(lam, b)]
        final[b] = eff
    for b in OUTCOMES:
        margin = joint_effects[(1, b)] + joint_effects[(-1, b)]
        if frob(margin - final[b]) > 1e-10:
            raise InvalidModel(
                "margin identity sum_a G[a, b] = B_b fails pointwise; the"
                " model satisfies retrieval only on average for this weight"
            )
    from .measurements import JointPovm

    return rho, JointPovm(joint_effects), BinaryPovm(final[1], final[-1])


def quantum_to_classical(rho, instr: Instrument, retrieving: BinaryPovm) -> HvModel:
    """Unravel a quantum sequence over the eigenbasis of the state.

    Macrostates are the eigenvectors of rho with their eigenvalues as
    weights; responses are diagonal matrix elements of the wired effects
    dual_a(retrieving_b) and of the second margin. The averaged retrieval
    identity then holds by construction and is verified to 1e-10.
    """
    r = check_state(rho)
    if r.shape[0] != instr.dim or instr.dim != retrieving.dim:
        raise OutOfRange("state, instrument, and POVM dimensions differ")
    eig = herm_eig(r)
    wired = {
        (a, b): heisenberg(instr, a, retrieving.effect(b)) for a in OUTCOMES for b in OUTCOMES
    }
    second_margin = {b: wired[(1, b)] + wired[(-1, b)] for b in OUTCOMES}
    weights, joint, null = {}, {}, {}
    for lam in range(len(eig.eigenvalues)):
        weights[lam] = max(0.0, float(eig.eigenvalues[lam]))
        vec = eig.eigenvectors[:, lam]
        for a in OUTCOMES:
            for b in OUTCOMES:
                joint[(lam, a, b)] = max(0.0, float(np.vdot(vec, wired[(a, b)] @ vec).real))
        for b in OUTCOMES:
            null[(lam, b)] = max(0.0, float(np.vdot(vec, second_margin[b] @ vec).real))
    model = HvModel(weights, joint, null)
    gap = model.retrieval_premise_gap()
    if gap > 1e-10:
        raise InvalidModel(f"chained retrieval identity failed by {gap:.3e}")
    return model
