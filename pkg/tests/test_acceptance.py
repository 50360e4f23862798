"""Acceptance suite: one test per release criterion, at fixed tolerances.

Run with ``pytest tests/test_acceptance.py -v -s`` to get one PASS/FAIL
line per criterion on stdout.
"""

import math
import time
from contextlib import contextmanager

import numpy as np

from roilab.datasets import DATASET_IDS, load_dataset
from roilab.errors import UndefinedCorrelation
from roilab.harness import compare_dataset, dataset_theory, sample_probability
from roilab.hv import check_nsit, check_roi, classical_to_quantum, quantum_to_classical, sequential_stats
from roilab.jointmeas import jm_feasible, unbiased_criterion, witness_margin_error
from roilab.linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, born_prob, frob
from roilab.measurements import (
    BinaryPovm,
    joint_for_gamma,
    lueders_instrument,
    noisy_x,
    noisy_z,
    sharp_x,
    sharp_z,
)
from roilab.pipeline import TOMOGRAPHY_KETS, branch_output, pipeline_vs_lueders, tomography_prob_closed_form
from roilab.states import (
    KET_PSI_MINUS,
    KET_PSI_PLUS,
    bloch,
    dm,
    named_ket,
    random_pure_ket,
    random_state,
)
from roilab.uncertainty import (
    GLOBAL_MIN_SUM,
    blw_sum_scan,
    correlation,
    uncertainty_sum,
    worst_case_delta_sq,
)

SQRT2 = math.sqrt(2.0)
ID2 = np.eye(2, dtype=complex)


@contextmanager
def criterion(name):
    try:
        yield
    except Exception:
        print(f"ACCEPTANCE FAIL: {name}")
        raise
    print(f"ACCEPTANCE PASS: {name}")


def test_theory_table_reproduction():
    with criterion("theory tables (3 angles x 6 projectors x 5 states x 2 outcomes, 5e-4, < 1 s)"):
        start = time.perf_counter()
        checked = 0
        for dataset_id in ("gamma-0", "gamma-pi8", "gamma-pi4"):
            computed = dataset_theory(dataset_id)  # pipeline route
            gamma = {"gamma-0": 0.0, "gamma-pi8": math.pi / 8, "gamma-pi4": math.pi / 4}[dataset_id]
            for row in load_dataset(dataset_id):
                proj, state, sign = row.label.split("|")
                outcome = 1 if sign == "+" else -1
                closed = tomography_prob_closed_form(
                    named_ket(state), gamma, outcome, TOMOGRAPHY_KETS[proj]
                )
                assert abs(computed[row.label] - row.theory) <= 5e-4, row.label
                assert abs(closed - row.theory) <= 5e-4, row.label
                assert abs(computed[row.label] - closed) <= 1e-12, row.label
                checked += 1
        elapsed = time.perf_counter() - start
        assert checked == 3 * 6 * 5 * 2
        assert elapsed < 1.0, f"table regeneration took {elapsed:.3f} s"


def test_blw_optimum():
    with criterion("uncertainty-sum optimum 2(2 - sqrt2) at gamma = pi/8 (1e-9, 1e4-point grid)"):
        grid = np.linspace(0.0, math.pi / 4, 10_000)
        report = blw_sum_scan(grid)
        step = grid[1] - grid[0]
        assert abs(report.grid_argmin - math.pi / 8) <= step
        assert abs(report.min_sum - GLOBAL_MIN_SUM) <= 1e-15
        analytic_point = blw_sum_scan([0.0, math.pi / 8, math.pi / 4])
        assert abs(analytic_point.grid_min - 2.0 * (2.0 - SQRT2)) <= 1e-9
        assert abs(analytic_point.grid_min - 1.1715729) <= 1e-6


def test_minimum_uncertainty_states():
    with criterion("uncertainty sum at pi/8: 1.5 +/- 1e-12 on real superpositions, > 1.5 when |r_y| > 0.1"):
        rng = np.random.default_rng(2024)
        for _ in range(1000):
            rho = dm(random_pure_ket(rng, real=True))
            assert abs(uncertainty_sum(math.pi / 8, rho) - 1.5) <= 1e-12
        count = 0
        while count < 1000:
            rho = random_state(rng)
            _, ry, _ = bloch(rho)
            if abs(ry) <= 0.1:
                continue
            count += 1
            assert uncertainty_sum(math.pi / 8, rho) > 1.5


def test_correlation_extremes():
    with criterion("correlation bounds -/+1/3 (1e-10), envelope over 1e4 states, -0.28 from dataset (5e-3)"):
        joint = joint_for_gamma(math.pi / 8)
        assert abs(correlation(joint, dm(KET_PSI_MINUS)) - (-1.0 / 3.0)) <= 1e-10
        assert abs(correlation(joint, dm(KET_PSI_PLUS)) - (1.0 / 3.0)) <= 1e-10
        rng = np.random.default_rng(7)
        for _ in range(10_000):
            rho = random_state(rng)
            try:
                value = correlation(joint, rho)
            except UndefinedCorrelation:
                continue
            assert abs(value) <= 1.0 / 3.0 + 1e-9
        rows = {r.label: r for r in load_dataset("correlation-pi8")}
        mu = {s: rows[f"mu|{s}"].experimental for s in ("++", "+-", "-+", "--")}
        p = rows["p|psi-minus"].experimental
        q = rows["q|psi-minus"].experimental
        var_a = rows["var_a|psi-minus"].experimental
        var_b = rows["var_b|psi-minus"].experimental
        cross = mu["++"] + mu["--"] - mu["+-"] - mu["-+"]
        reproduced = (cross - (2 * p - 1) * (2 * q - 1)) / math.sqrt(var_a * var_b)
        assert abs(reproduced - rows["corr|psi-minus"].experimental) <= 0.005


def test_roi_holds_nsit_fails():
    with criterion("retrieval passes (1e-9) while no-signalling fails by (1 - cos 2g)|r_x|/2 (1e-9), 100 runs"):
        rng = np.random.default_rng(11)
        for _ in range(100):
            gamma = rng.uniform(0.0, math.pi / 4)
            rho = random_state(rng)
            eta = math.cos(2 * gamma)
            stats = sequential_stats(
                rho,
                {"noisyZ": lueders_instrument(noisy_z(gamma))},
                {"X": sharp_x(), "noisyX": noisy_x(eta)},
            )
            roi = check_roi(stats, "noisyZ", "X", "noisyX", tol=1e-9)
            assert roi.holds
            rx, _, _ = bloch(rho)
            nsit = check_nsit(stats, "noisyZ", "X")
            expected = 0.5 * (1.0 - eta) * abs(rx)
            assert abs(nsit.max_violation - expected) <= 1e-9
            assert (not nsit.holds) or expected <= 1e-9


def test_no_retrieving_gap():
    with criterion("gap rows (0, 0, 0.586, 0.586, 0.414) to 5e-4; worst case 2 - sqrt2 exactly (1e-12)"):
        expected = {"H": 0.0, "V": 0.0, "plus": 0.586, "minus": 0.586, "psi-minus": 0.414}
        b8 = noisy_x(1.0 / SQRT2)
        for state, want in expected.items():
            rho = dm(named_ket(state))
            gap = 4.0 * abs(born_prob(sharp_x().plus, rho) - born_prob(b8.plus, rho))
            assert abs(gap - want) <= 5e-4, state
        assert abs(worst_case_delta_sq(sharp_x(), b8) - (2.0 - SQRT2)) <= 1e-12


def test_pipeline_equals_lueders():
    with criterion("interferometer ~ Lueders update (residual <= 1e-10, norms sum to 1 +/- 1e-10, 1e3 grid)"):
        rng = np.random.default_rng(13)
        gammas = np.linspace(0.0, math.pi / 4, 20)
        count = 0
        for gamma in gammas:
            for _ in range(50):
                psi = random_pure_ket(rng)
                assert pipeline_vs_lueders(psi, gamma) <= 1e-10
                total = sum(
                    float(np.sum(np.abs(branch_output(psi, gamma, a)) ** 2)) for a in (1, -1)
                )
                assert abs(total - 1.0) <= 1e-10
                count += 1
        assert count == 1000


def test_joint_measurability_verdicts():
    with criterion("sharp pair infeasible; optimal pair feasible (witness 1e-6); 1e3 numeric agreements < 30 s"):
        start = time.perf_counter()
        assert not jm_feasible(sharp_z(), sharp_x()).feasible
        a8, b8 = noisy_z(math.pi / 8), noisy_x(1.0 / SQRT2)
        report = jm_feasible(a8, b8)
        assert report.feasible
        g8 = joint_for_gamma(math.pi / 8)
        first, second = report.witness.margins()
        ref_first, ref_second = g8.margins()
        assert frob(first.plus - ref_first.plus) <= 1e-6
        assert frob(second.plus - ref_second.plus) <= 1e-6
        rng = np.random.default_rng(17)
        for _ in range(1000):
            vecs = []
            povms = []
            for _ in range(2):
                m = rng.normal(size=3)
                m *= rng.uniform() ** (1.0 / 3.0) / np.linalg.norm(m)
                e = 0.5 * (ID2 + m[0] * SIGMA_X + m[1] * SIGMA_Y + m[2] * SIGMA_Z)
                povms.append(BinaryPovm(e, ID2 - e))
                vecs.append(m)
            analytic, _ = unbiased_criterion(*vecs)
            numeric = jm_feasible(povms[0], povms[1], method="numeric")
            assert numeric.feasible == analytic
            if numeric.feasible:
                assert witness_margin_error(numeric.witness, *povms) <= 1e-7
        elapsed = time.perf_counter() - start
        assert elapsed < 30.0, f"verdict batch took {elapsed:.1f} s"


def test_classical_quantum_roundtrip():
    with criterion("model round trip preserves statistics (1e-9); chained identity (1e-10); 100 runs"):
        rng = np.random.default_rng(19)
        for _ in range(100):
            gamma = rng.uniform(0.0, math.pi / 4)
            rho = random_state(rng)
            instr = lueders_instrument(noisy_z(gamma))
            model = quantum_to_classical(rho, instr, sharp_x())
            assert model.retrieval_premise_gap() <= 1e-10
            rho2, joint2, final2 = classical_to_quantum(model)
            joint = joint_for_gamma(gamma)
            for a in (1, -1):
                for b in (1, -1):
                    direct = born_prob(joint.effect(a, b), rho)
                    embedded = born_prob(joint2.effect(a, b), rho2)
                    assert abs(direct - embedded) <= 1e-9
            b_margin = noisy_x(math.cos(2 * gamma))
            for b in (1, -1):
                direct = born_prob(b_margin.effect(b), rho)
                embedded = born_prob(final2.effect(b), rho2)
                assert abs(direct - embedded) <= 1e-9


def test_reference_comparison_and_shot_noise_scale():
    with criterion("all shipped datasets gate-pass; counted rows within 0.05; 2% shot-noise scale (x1.5)"):
        worst_probability_dev = 0.0
        for dataset_id in DATASET_IDS:
            report = compare_dataset(dataset_id)
            assert report.passed, dataset_id
            for row in report.rows:
                if row.kind == "probability":
                    worst_probability_dev = max(worst_probability_dev, row.abs_dev_reference)
        assert worst_probability_dev <= 0.05
        draws = [
            sample_probability(seed, ("acceptance", "se-scale"), 0.5, 625) for seed in range(32)
        ]
        spread = float(np.std(draws))
        assert 0.02 / 1.5 <= spread <= 0.02 * 1.5, spread
