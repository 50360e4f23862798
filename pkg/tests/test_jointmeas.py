"""Joint-measurability verdicts: analytic criterion, witnesses, kernels."""

import math

import numpy as np
import pytest

from roilab import _jm_pure
from roilab.errors import NoConvergence, OutOfRange
from roilab.jointmeas import (
    HAVE_KERNEL,
    JmReport,
    alternate_qubit,
    jm_feasible,
    lueders_candidate,
    unbiased_bloch,
    unbiased_criterion,
    unbiased_witness,
    witness_margin_error,
)
from roilab.linalg import ID2, SIGMA_X, SIGMA_Y, SIGMA_Z, frob
from roilab.measurements import BinaryPovm, joint_for_gamma, noisy_x, noisy_z, sharp_x, sharp_z


def unbiased_povm(m):
    e = 0.5 * (ID2 + m[0] * SIGMA_X + m[1] * SIGMA_Y + m[2] * SIGMA_Z)
    return BinaryPovm(e, ID2 - e)


def random_unbiased(rng):
    m = rng.normal(size=3)
    m *= rng.uniform() ** (1.0 / 3.0) / np.linalg.norm(m)
    return unbiased_povm(m), m


def test_sharp_pair_infeasible():
    report = jm_feasible(sharp_z(), sharp_x())
    assert not report.feasible
    assert report.witness is None
    # criterion excess (2 sqrt2 - 2) / 2
    assert abs(report.residual - (math.sqrt(2.0) - 1.0)) <= 1e-12


def test_optimal_noisy_pair_feasible_with_known_witness():
    report = jm_feasible(noisy_z(math.pi / 8), noisy_x(math.cos(math.pi / 4)))
    assert report.feasible
    g8 = joint_for_gamma(math.pi / 8)
    for a in (1, -1):
        for b in (1, -1):
            assert frob(report.witness.effect(a, b) - g8.effect(a, b)) <= 1e-12
    assert witness_margin_error(
        report.witness, noisy_z(math.pi / 8), noisy_x(math.cos(math.pi / 4))
    ) <= 1e-6


def test_self_pair_diagonal_witness():
    rng = np.random.default_rng(0)
    for _ in range(20):
        povm, _ = random_unbiased(rng)
        report = jm_feasible(povm, povm)
        assert report.feasible
        assert frob(report.witness.effect(1, 1) - povm.plus) <= 1e-12
        assert frob(report.witness.effect(1, -1)) <= 1e-12


def test_verdict_is_symmetric():
    rng = np.random.default_rng(17)
    for _ in range(50):
        p, _ = random_unbiased(rng)
        q, _ = random_unbiased(rng)
        assert jm_feasible(p, q).feasible == jm_feasible(q, p).feasible


def test_unbiased_witness_margins_exact():
    rng = np.random.default_rng(23)
    found = 0
    while found < 50:
        p, mp = random_unbiased(rng)
        q, mq = random_unbiased(rng)
        ok, _ = unbiased_criterion(mp, mq)
        if not ok:
            continue
        found += 1
        witness = unbiased_witness(mp, mq)
        assert witness_margin_error(witness, p, q) <= 1e-14


def test_numeric_agrees_with_analytic_on_random_pairs():
    rng = np.random.default_rng(99)
    for _ in range(300):
        p, mp = random_unbiased(rng)
        q, mq = random_unbiased(rng)
        ok, _ = unbiased_criterion(mp, mq)
        report = jm_feasible(p, q, method="numeric")
        assert report.feasible == ok
        if report.feasible:
            assert witness_margin_error(report.witness, p, q) <= 1e-7


def test_kernel_and_pure_twin_agree():
    rng = np.random.default_rng(5)
    for _ in range(20):
        p, _ = random_unbiased(rng)
        q, _ = random_unbiased(rng)
        candidate = lueders_candidate(p, q)
        flat = []
        for key in ((1, 1), (1, -1), (-1, 1), (-1, -1)):
            e = candidate.effect(*key)
            flat.extend([e[0, 0].real, e[0, 1].real, e[0, 1].imag, e[1, 1].real])
        p4 = (p.plus[0, 0].real, p.plus[0, 1].real, p.plus[0, 1].imag, p.plus[1, 1].real)
        q4 = (q.plus[0, 0].real, q.plus[0, 1].real, q.plus[0, 1].imag, q.plus[1, 1].real)
        pure = _jm_pure.alternate(list(flat), p4, q4, 1e-8, 20_000)
        fast = alternate_qubit(list(flat), p4, q4, 1e-8, 20_000)
        assert pure[0] == fast[0]
        assert pure[2] == fast[2]
        assert abs(pure[1] - fast[1]) <= 1e-12


@pytest.mark.skipif(not HAVE_KERNEL, reason="compiled kernel unavailable")
def test_pure_env_flag_forces_fallback(monkeypatch):
    monkeypatch.setenv("ROILAB_PURE", "1")
    report = jm_feasible(noisy_z(0.3), noisy_x(0.4), method="numeric")
    assert isinstance(report, JmReport)
    assert report.feasible


def test_lueders_candidate_first_margin_exact():
    rng = np.random.default_rng(31)
    for _ in range(20):
        p, _ = random_unbiased(rng)
        q, _ = random_unbiased(rng)
        first, _ = lueders_candidate(p, q).margins()
        assert frob(first.plus - p.plus) <= 1e-12


def test_biased_pair_runs_numerically():
    # biased effects: trace != 1, so the analytic path must not engage
    e1 = np.diag([0.9, 0.3]).astype(complex)
    e2 = 0.3 * ID2 + 0.2 * SIGMA_X
    p = BinaryPovm(e1, ID2 - e1)
    q = BinaryPovm(e2, ID2 - e2)
    assert unbiased_bloch(p) is None
    report = jm_feasible(p, q)
    assert report.feasible  # q is nearly trivial, compatible with anything here
    assert witness_margin_error(report.witness, p, q) <= 1e-7


def test_no_convergence_raised_for_stuck_biased_pair():
    # two nearly sharp, maximally skew, slightly biased POVMs: infeasible,
    # and with no analytic fallback the auto mode must raise
    e1 = 0.5 * ID2 + 0.49 * SIGMA_Z + 0.005 * ID2
    e2 = 0.5 * ID2 + 0.49 * SIGMA_X + 0.005 * ID2
    p = BinaryPovm(e1, ID2 - e1)
    q = BinaryPovm(e2, ID2 - e2)
    with pytest.raises(NoConvergence):
        jm_feasible(p, q, max_iter=20_000)
    report = jm_feasible(p, q, method="numeric", max_iter=20_000)
    assert not report.feasible


def test_dimension_three_infeasible_pair_reports_no_convergence():
    # sharp noncommuting projective pair on C^3: not jointly measurable
    e1 = np.diag([1.0, 0.0, 0.0]).astype(complex)
    u = np.array([1.0, 1.0, 0.0]) / math.sqrt(2.0)
    e2 = np.outer(u, u).astype(complex)
    p = BinaryPovm(e1, np.eye(3) - e1)
    q = BinaryPovm(e2, np.eye(3) - e2)
    with pytest.raises(NoConvergence):
        jm_feasible(p, q, max_iter=500)
    report = jm_feasible(p, q, method="numeric", max_iter=500)
    assert not report.feasible
    assert report.residual > 1e-3


def test_dimension_three_self_pair_via_general_path():
    effects = np.diag([0.7, 0.5, 0.2]).astype(complex)
    p = BinaryPovm(effects, np.eye(3) - effects)
    shifted = np.diag([0.6, 0.5, 0.3]).astype(complex)
    q = BinaryPovm(shifted, np.eye(3) - shifted)
    report = jm_feasible(p, q, method="numeric", max_iter=5_000)
    assert report.feasible  # commuting POVMs are always jointly measurable
    assert witness_margin_error(report.witness, p, q) <= 1e-7


def test_tol_floor_enforced():
    with pytest.raises(OutOfRange):
        jm_feasible(sharp_z(), sharp_x(), tol=1e-12)
