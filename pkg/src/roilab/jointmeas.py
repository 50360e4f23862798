"""Joint-measurability feasibility for pairs of binary POVMs.

Decision procedure, in order:

1. identical pair -> diagonal witness G[a, a] = P_a (every measurement is
   jointly measurable with itself);
2. sequential Lueders candidate sqrt(P_a) Q_b sqrt(P_a) -> accepted when
   its second margin already matches Q;
3. unbiased qubit pair (effects (1/2)[I +/- m.sigma]) -> closed-form
   criterion |m_P + m_Q| + |m_P - m_Q| <= 2, with an explicit witness on
   the feasible side;
4. alternating projections between the PSD cone and the affine margin
   constraints, warm-started from the Lueders candidate.

Step 4 dispatches to the compiled kernel when importable and the pair
is qubit-sized; the pure-Python twin covers everything else. Set
``ROILAB_PURE=1`` to force the fallback (used by the benchmark).
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import numpy as np

from . import _jm_pure
from .errors import DimensionMismatch, NoConvergence, OutOfRange
from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, expect, frob, psd_project, psd_sqrt
from .measurements import OUTCOMES, BinaryPovm, JointPovm

try:
    from . import _jm_kernel
except ImportError:
    _jm_kernel = None

HAVE_KERNEL = _jm_kernel is not None

MIN_TOL = 1e-8
DEFAULT_MAX_ITER = 100_000
# An explicit candidate witness short-circuits the iteration when its
# margins already sit within this multiple of the requested tolerance.
WITNESS_SLACK = 10.0


@dataclass(frozen=True)
class JmReport:
    """Feasibility verdict with diagnostics.

    residual: margin error of the returned witness when feasible; for an
    analytic infeasible verdict, the criterion excess (|m_P + m_Q| +
    |m_P - m_Q| - 2) / 2; otherwise the final iteration residual.
    """

    feasible: bool
    witness: JointPovm | None
    residual: float
    iterations: int


def _coords(m: np.ndarray) -> tuple[float, float, float, float]:
    return float(m[0, 0].real), float(m[0, 1].real), float(m[0, 1].imag), float(m[1, 1].real)


def _from_coords(a: float, re: float, im: float, d: float) -> np.ndarray:
    return np.array([[a, complex(re, im)], [complex(re, -im), d]], dtype=complex)


def _norm3(v: np.ndarray) -> float:
    return math.sqrt(float(np.dot(v, v)))


def unbiased_bloch(p: BinaryPovm, tol: float = 1e-10) -> np.ndarray | None:
    """Bloch vector m with E_plus = (1/2)(I + m.sigma), or None if biased."""
    if p.dim != 2:
        return None
    if abs(np.trace(p.plus).real - 1.0) > tol:
        return None
    e = p.plus
    return np.array([expect(SIGMA_X, e), expect(SIGMA_Y, e), expect(SIGMA_Z, e)])


def unbiased_criterion(m_p: np.ndarray, m_q: np.ndarray) -> tuple[bool, float]:
    """Closed-form verdict for unbiased qubit pairs; returns (feasible, slack).

    slack = |m_P + m_Q| + |m_P - m_Q| - 2 (<= 0 means feasible).
    """
    slack = _norm3(m_p + m_q) + _norm3(m_p - m_q) - 2.0
    return slack <= 1e-12, slack


def unbiased_witness(m_p: np.ndarray, m_q: np.ndarray) -> JointPovm:
    """Explicit parent POVM for a feasible unbiased qubit pair.

    G[a, b] = (1/4)[(1 + a b alpha) I + (a m_P + b m_Q).sigma] with
    alpha = (|m_P + m_Q| - |m_P - m_Q|) / 2, PSD exactly when the
    criterion holds; margins are P and Q identically.
    """
    alpha = (_norm3(m_p + m_q) - _norm3(m_p - m_q)) / 2.0
    eye = np.eye(2, dtype=complex)
    sig = (SIGMA_X, SIGMA_Y, SIGMA_Z)
    effects = {}
    for a in OUTCOMES:
        for b in OUTCOMES:
            vec = a * m_p + b * m_q
            mat = (1.0 + a * b * alpha) * eye
            for comp, s in zip(vec, sig):
                mat = mat + comp * s
            effects[(a, b)] = mat / 4.0
    return JointPovm(effects)


def lueders_candidate(p: BinaryPovm, q: BinaryPovm) -> JointPovm:
    """Sequential candidate sqrt(P_a) Q_b sqrt(P_a); always a valid joint
    POVM, with first margin exactly P."""
    roots = {1: psd_sqrt(p.plus), -1: psd_sqrt(p.minus)}
    return JointPovm(
        {(a, b): roots[a] @ q.effect(b) @ roots[a] for a in OUTCOMES for b in OUTCOMES}
    )


def witness_margin_error(g: JointPovm, p: BinaryPovm, q: BinaryPovm) -> float:
    first, second = g.margins()
    return max(
        frob(first.plus - p.plus),
        frob(first.minus - p.minus),
        frob(second.plus - q.plus),
        frob(second.minus - q.minus),
    )


def _joint_to_flat(g: JointPovm) -> list[float]:
    flat: list[float] = []
    for key in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
        flat.extend(_coords(g.effect(*key)))
    return flat


def _flat_to_joint(flat, slack: float | None = None) -> JointPovm:
    keys = ((1, 1), (1, -1), (-1, 1), (-1, -1))
    return JointPovm(
        {k: _from_coords(*flat[4 * i : 4 * i + 4]) for i, k in enumerate(keys)},
        slack=slack,
    )


def _use_kernel() -> bool:
    return HAVE_KERNEL and os.environ.get("ROILAB_PURE", "") != "1"


def alternate_qubit(g0: list[float], p4, q4, tol: float, max_iter: int):
    """Run the qubit AP kernel (compiled when available) on flat buffers."""
    if _use_kernel():
        g = np.array(g0, dtype=float)
        converged, residual, it = _jm_kernel.alternate(
            g, np.array(p4, dtype=float), np.array(q4, dtype=float), tol, max_iter
        )
        return bool(converged), float(residual), int(it), g.tolist()
    g = list(g0)
    converged, residual, it = _jm_pure.alternate(g, tuple(p4), tuple(q4), tol, max_iter)
    return converged, residual, it, g


def _alternate_general(g0: dict, p: BinaryPovm, q: BinaryPovm, tol: float, max_iter: int):
    """numpy alternating projections for dimensions above 2.

    Same procedure and stall rule as the qubit kernels, at matrix size.
    """
    eye = np.eye(p.dim, dtype=complex)
    targets_row = {1: p.plus, -1: p.minus}
    targets_col = {1: q.plus, -1: q.minus}
    g = {k: np.array(v, dtype=complex) for k, v in g0.items()}
    residual = math.inf
    best = math.inf
    best_at_window = math.inf
    it = 0
    while it < max_iter:
        it += 1
        for k in g:
            g[k] = psd_project(g[k])
        residual = 0.0
        for a in OUTCOMES:
            residual = max(residual, frob(g[(a, 1)] + g[(a, -1)] - targets_row[a]))
        for b in OUTCOMES:
            residual = max(residual, frob(g[(1, b)] + g[(-1, b)] - targets_col[b]))
        if residual <= tol:
            return True, residual, it, g
        best = min(best, residual)
        if it % _jm_pure.STALL_WINDOW == 0:
            if best_at_window - best < max(_jm_pure.STALL_ABS, _jm_pure.STALL_REL * best):
                break
            best_at_window = best
        rows = {a: g[(a, 1)] + g[(a, -1)] for a in OUTCOMES}
        cols = {b: g[(1, b)] + g[(-1, b)] for b in OUTCOMES}
        total = rows[1] + rows[-1]
        shift = (total - eye) / 4.0
        for a in OUTCOMES:
            for b in OUTCOMES:
                g[(a, b)] = (
                    g[(a, b)]
                    + (targets_row[a] - rows[a]) / 2.0
                    + (targets_col[b] - cols[b]) / 2.0
                    + shift
                )
    return False, residual, it, g


def _povms_equal(p: BinaryPovm, q: BinaryPovm, tol: float = 1e-12) -> bool:
    return frob(p.plus - q.plus) <= tol and frob(p.minus - q.minus) <= tol


def _diagonal_witness(p: BinaryPovm) -> JointPovm:
    zero = np.zeros((p.dim, p.dim), dtype=complex)
    return JointPovm({(1, 1): p.plus, (-1, -1): p.minus, (1, -1): zero, (-1, 1): zero})


def jm_feasible(
    p: BinaryPovm,
    q: BinaryPovm,
    tol: float = MIN_TOL,
    method: str = "auto",
    max_iter: int = DEFAULT_MAX_ITER,
) -> JmReport:
    """Decide whether two binary POVMs admit a parent joint POVM.

    method="auto" uses the full decision ladder; "analytic" restricts to
    the unbiased-qubit criterion; "numeric" runs only the alternating
    projections and equates feasibility with convergence (a non-converged
    numeric run is evidence, not proof, of infeasibility -- "auto" raises
    NoConvergence in that situation instead of guessing).
    """
    if tol < MIN_TOL:
        raise OutOfRange(f"tol = {tol} below the supported minimum {MIN_TOL}")
    if p.dim != q.dim:
        raise DimensionMismatch("POVM dimensions differ")
    if method not in ("auto", "analytic", "numeric"):
        raise OutOfRange(f"unknown method {method!r}")

    m_p = unbiased_bloch(p)
    m_q = unbiased_bloch(q)
    unbiased = m_p is not None and m_q is not None

    if method == "analytic":
        if not unbiased:
            raise OutOfRange("analytic criterion needs an unbiased qubit pair")
        ok, slack = unbiased_criterion(m_p, m_q)
        witness = unbiased_witness(m_p, m_q) if ok else None
        residual = witness_margin_error(witness, p, q) if ok else slack / 2.0
        return JmReport(ok, witness, residual, 0)

    candidate = None
    if method == "auto":
        if _povms_equal(p, q):
            witness = _diagonal_witness(p)
            return JmReport(True, witness, witness_margin_error(witness, p, q), 0)
        candidate = lueders_candidate(p, q)
        cand_err = witness_margin_error(candidate, p, q)
        if cand_err <= WITNESS_SLACK * tol:
            return JmReport(True, candidate, cand_err, 0)
        if unbiased:
            ok, slack = unbiased_criterion(m_p, m_q)
            if ok:
                witness = unbiased_witness(m_p, m_q)
                err = witness_margin_error(witness, p, q)
                if err <= WITNESS_SLACK * tol:
                    return JmReport(True, witness, err, 0)
            else:
                return JmReport(False, None, slack / 2.0, 0)

    if candidate is None:
        candidate = lueders_candidate(p, q)

    # converged AP witnesses are PSD exactly but meet the margin (and thus
    # identity-sum) constraints only to the working tolerance
    witness_slack = 2.0 * WITNESS_SLACK * tol
    if p.dim == 2:
        converged, residual, it, flat = alternate_qubit(
            _joint_to_flat(candidate),
            _coords(p.plus),
            _coords(q.plus),
            tol,
            max_iter,
        )
        witness = _flat_to_joint(flat, slack=witness_slack) if converged else None
    else:
        g0 = {k: candidate.effect(*k) for k in ((1, 1), (1, -1), (-1, 1), (-1, -1))}
        converged, residual, it, g = _alternate_general(g0, p, q, tol, max_iter)
        witness = JointPovm(g, slack=witness_slack) if converged else None

    if method == "numeric":
        return JmReport(converged, witness, residual, it)
    if converged:
        return JmReport(True, witness, residual, it)
    raise NoConvergence(
        f"residual {residual:.3e} above tol {tol} after {it} iterations "
        "and no analytic fallback applies"
    )
