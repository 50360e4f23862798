"""POVM family, instruments, duals, sequential joints, serialization."""

import json
import math

import numpy as np
import pytest

from roilab.errors import OutOfRange, UnknownOutcome
from roilab.linalg import ID2, SIGMA_X, SIGMA_Z, born_prob, frob, psd_sqrt
from roilab.measurements import (
    BinaryPovm,
    Instrument,
    apply_instrument,
    apply_noisy_z_schur,
    heisenberg,
    instrument_from_dict,
    instrument_to_dict,
    joint_for_gamma,
    joint_from_dict,
    joint_to_dict,
    lueders_instrument,
    noisy_x,
    noisy_z,
    noisy_z_kraus,
    noisy_z_total_mask,
    povm_from_dict,
    povm_to_dict,
    sequential_joint,
    sharp_x,
    sharp_z,
    total_channel,
    trivial_instrument,
)
from roilab.states import KET_H, dm, random_pure_ket, random_state

RNG = np.random.default_rng(11)


def test_noisy_z_endpoints_and_midpoint():
    assert frob(noisy_z(0.0).plus - 0.5 * ID2) == 0.0
    assert frob(noisy_z(math.pi / 4).plus - dm(KET_H)) <= 1e-16
    mid = noisy_z(math.pi / 8)
    assert frob(mid.plus - 0.5 * (ID2 + SIGMA_Z / math.sqrt(2.0))) <= 1e-16
    with pytest.raises(OutOfRange):
        noisy_z(-0.01)
    with pytest.raises(OutOfRange):
        noisy_z(math.pi / 4 + 0.01)


def test_noisy_x_family():
    assert frob(noisy_x(1.0).plus - 0.5 * (ID2 + SIGMA_X)) == 0.0
    assert frob(noisy_x(0.0).plus - 0.5 * ID2) == 0.0
    b8 = noisy_x(1.0 / math.sqrt(2.0))
    assert frob(b8.plus - 0.5 * (ID2 + SIGMA_X / math.sqrt(2.0))) <= 1e-16
    with pytest.raises(OutOfRange):
        noisy_x(1.5)


def test_lueders_kraus_forms():
    proj = lueders_instrument(sharp_z())
    assert frob(proj.kraus_for(1)[0] - dm(KET_H)) <= 1e-12
    for gamma in (0.1, math.pi / 8, 0.7):
        instr = lueders_instrument(noisy_z(gamma))
        for a in (1, -1):
            assert frob(instr.kraus_for(a)[0] - noisy_z_kraus(gamma, a)) <= 1e-12
    flat = lueders_instrument(noisy_z(0.0))
    rho = random_state(RNG)
    assert frob(apply_instrument(flat, 1, rho) - rho / 2.0) <= 1e-14


def test_apply_examples():
    rho = dm(KET_H)
    sharp = lueders_instrument(noisy_z(math.pi / 4))
    assert frob(apply_instrument(sharp, 1, rho) - rho) <= 1e-12
    mid = lueders_instrument(noisy_z(math.pi / 8))
    out = apply_instrument(mid, 1, rho)
    assert frob(out - (2.0 + math.sqrt(2.0)) / 4.0 * rho) <= 1e-12
    with pytest.raises(UnknownOutcome):
        apply_instrument(mid, 0, rho)


def test_apply_trace_matches_born_probability():
    rng = np.random.default_rng(5)
    for _ in range(1000):
        gamma = rng.uniform(0.0, math.pi / 4)
        instr = lueders_instrument(noisy_z(gamma))
        rho = random_state(rng)
        a = 1 if rng.uniform() < 0.5 else -1
        lhs = float(np.trace(apply_instrument(instr, a, rho)).real)
        rhs = born_prob(instr.induced_effect(a), rho)
        assert abs(lhs - rhs) <= 1e-12


def test_schur_form_of_noisy_z_update():
    rng = np.random.default_rng(6)
    for _ in range(100):
        gamma = rng.uniform(0.0, math.pi / 4)
        rho = random_state(rng)
        a = 1 if rng.uniform() < 0.5 else -1
        instr = lueders_instrument(noisy_z(gamma))
        assert frob(apply_instrument(instr, a, rho) - apply_noisy_z_schur(gamma, a, rho)) <= 1e-12


def _random_instrument(rng):
    """Lueders update followed by an outcome-dependent unitary: exercises the
    general form (noise channel after the square root)."""
    gamma = rng.uniform(0.0, math.pi / 4)
    povm = noisy_z(gamma)
    theta = rng.uniform(0.0, 2 * math.pi)
    u = np.array(
        [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]],
        dtype=complex,
    )
    return Instrument({1: (psd_sqrt(povm.plus),), -1: (u @ psd_sqrt(povm.minus),)})


def test_heisenberg_duality():
    rng = np.random.default_rng(12)
    for _ in range(1000):
        instr = _random_instrument(rng)
        m = rng.normal(size=(2, 2)) + 1j * rng.normal(size=(2, 2))
        rho = random_state(rng)
        a = 1 if rng.uniform() < 0.5 else -1
        lhs = np.trace(heisenberg(instr, a, m) @ rho)
        rhs = np.trace(m @ apply_instrument(instr, a, rho))
        assert abs(lhs - rhs) <= 1e-12


def test_heisenberg_unit_recovers_induced_povm():
    for gamma in (0.0, 0.3, math.pi / 8, math.pi / 4):
        instr = lueders_instrument(noisy_z(gamma))
        for a in (1, -1):
            assert frob(heisenberg(instr, a, ID2) - noisy_z(gamma).effect(a)) <= 1e-12


def test_heisenberg_x_effect_closed_form():
    rng = np.random.default_rng(1)
    for _ in range(50):
        gamma = rng.uniform(0.0, math.pi / 4)
        instr = lueders_instrument(noisy_z(gamma))
        s, c = math.sin(2 * gamma), math.cos(2 * gamma)
        for a in (1, -1):
            for b in (1, -1):
                expected = 0.25 * (ID2 + a * s * SIGMA_Z + b * c * SIGMA_X)
                assert frob(heisenberg(instr, a, sharp_x().effect(b)) - expected) <= 1e-12


def test_total_channel_forms():
    rng = np.random.default_rng(2)
    rho = random_state(rng)
    ident = lueders_instrument(noisy_z(0.0))
    assert frob(total_channel(ident, rho) - rho) <= 1e-12
    decohere = lueders_instrument(noisy_z(math.pi / 4))
    assert frob(total_channel(decohere, rho) - np.diag(np.diag(rho))) <= 1e-12
    mid = lueders_instrument(noisy_z(math.pi / 8))
    masked = noisy_z_total_mask(math.pi / 8) * rho
    assert frob(total_channel(mid, rho) - masked) <= 1e-12
    assert abs(np.trace(total_channel(mid, rho)).real - 1.0) <= 1e-10


def test_sequential_joint_with_z_final_is_smeared_z():
    for gamma in (0.0, 0.4, math.pi / 8, math.pi / 4):
        joint = sequential_joint(lueders_instrument(noisy_z(gamma)), sharp_z())
        s = math.sin(2 * gamma)
        for a in (1, -1):
            for b in (1, -1):
                expected = 0.5 * (1 + a * b * s) * sharp_z().effect(b)
                assert frob(joint.effect(a, b) - expected) <= 1e-12
        _, second = joint.margins()
        assert frob(second.plus - dm(KET_H)) <= 1e-12  # sharp Z for every gamma


def test_sequential_joint_with_x_final_margins():
    for gamma in (0.0, 0.31, math.pi / 8, math.pi / 4):
        joint = sequential_joint(lueders_instrument(noisy_z(gamma)), sharp_x())
        first, second = joint.margins()
        assert frob(first.plus - noisy_z(gamma).plus) <= 1e-12
        assert frob(second.plus - noisy_x(math.cos(2 * gamma)).plus) <= 1e-12


def test_margins_of_trivial_joint():
    quarter = 0.25 * ID2
    from roilab.measurements import JointPovm

    joint = JointPovm({(a, b): quarter for a in (1, -1) for b in (1, -1)})
    first, second = joint.margins()
    assert frob(first.plus - 0.5 * ID2) == 0.0
    assert frob(second.minus - 0.5 * ID2) == 0.0


def test_margins_reproduce_induced_and_total_channel_forms():
    rng = np.random.default_rng(9)
    for _ in range(1000):
        instr = _random_instrument(rng)
        eta = rng.uniform()
        final = noisy_x(eta)
        joint = sequential_joint(instr, final)
        first, second = joint.margins()
        assert frob(first.plus - instr.induced_effect(1)) <= 1e-12
        dual_total = heisenberg(instr, 1, final.plus) + heisenberg(instr, -1, final.plus)
        assert frob(second.plus - dual_total) <= 1e-12


def test_outcome_sum_is_one_for_all_gamma():
    rng = np.random.default_rng(14)
    for _ in range(200):
        gamma = rng.uniform(0.0, math.pi / 4)
        instr = lueders_instrument(noisy_z(gamma))
        rho = random_state(rng)
        total = sum(
            float(np.trace(apply_instrument(instr, a, rho)).real) for a in (1, -1)
        )
        assert abs(total - 1.0) <= 1e-10


def test_povm_validation():
    with pytest.raises(OutOfRange):
        BinaryPovm(0.6 * ID2, 0.6 * ID2)


def test_json_roundtrips(tmp_path):
    povm = noisy_z(0.2345)
    doc = json.loads(json.dumps(povm_to_dict(povm)))
    back = povm_from_dict(doc)
    assert frob(back.plus - povm.plus) <= 1e-12

    instr = _random_instrument(np.random.default_rng(4))
    back_instr = instrument_from_dict(json.loads(json.dumps(instrument_to_dict(instr))))
    for a in (1, -1):
        for k1, k2 in zip(instr.kraus_for(a), back_instr.kraus_for(a)):
            assert frob(k1 - k2) <= 1e-12

    joint = joint_for_gamma(math.pi / 8)
    back_joint = joint_from_dict(json.loads(json.dumps(joint_to_dict(joint))))
    for a in (1, -1):
        for b in (1, -1):
            assert frob(back_joint.effect(a, b) - joint.effect(a, b)) <= 1e-12


def test_trivial_instrument_halves():
    rho = dm(random_pure_ket(np.random.default_rng(8)))
    instr = trivial_instrument()
    assert frob(apply_instrument(instr, 1, rho) - rho / 2) <= 1e-15
    assert frob(apply_instrument(instr, -1, rho) - rho / 2) <= 1e-15
