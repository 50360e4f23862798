"""Stage-by-stage polarization-interferometer model of the noisy-Z measurement.

A photon in alpha|H> + beta|V> traverses: a beam displacer that routes the
two polarizations onto separate paths, a vertical flip that erases the
polarization label, path-conditioned +/-gamma rotations, a shared
half-wave plate HWP(phi), a polarizing beam splitter that transmits only
the horizontal component (the single non-unitary, post-selecting stage),
a flip on the surviving upper-arm component, recombination, and a final
polarization swap. The two instrument outcomes correspond to the branch
angles phi = +pi/8 and -pi/8 (the reflected port is simulated by the sign
flip, matching the tabletop shortcut of measuring only the transmitted
arm).

The net effect on the input ket is the diagonal operator
diag(cos(2 phi - gamma), cos(2 phi + gamma)); at phi = +/-pi/8 this is the
Lueders Kraus operator of the noisy-Z effect, which is what
``pipeline_vs_lueders`` certifies numerically.

Stage labels follow the four-dimensional path (x) polarization basis
|0H>, |0V>, |1H>, |1V> while both arms are occupied.

A note on stage 4: hardware-wise it is a pair of wave plates often
described as a phase shift, but its action on the kets is the +/-gamma
polarization rotation written below; the formulas are authoritative here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InvalidBranch, OutOfRange
from .linalg import frob
from .measurements import noisy_x, noisy_z_kraus
from .states import dm

BRANCH_ANGLES = (math.pi / 8, -math.pi / 8)
# Tomography projector kets in table order.
TOMOGRAPHY_KETS = {
    "X+": np.array([1.0, 1.0], dtype=complex) / math.sqrt(2.0),
    "X-": np.array([1.0, -1.0], dtype=complex) / math.sqrt(2.0),
    "Y+": np.array([1.0, 1.0j], dtype=complex) / math.sqrt(2.0),
    "Y-": np.array([1.0, -1.0j], dtype=complex) / math.sqrt(2.0),
    "Z+": np.array([1.0, 0.0], dtype=complex),
    "Z-": np.array([0.0, 1.0], dtype=complex),
}


@dataclass(frozen=True)
class PathPolState:
    """Amplitudes over |0H>, |0V>, |1H>, |1V| (subnormalized allowed)."""

    amplitudes: np.ndarray

    def __post_init__(self):
        amp = np.asarray(self.amplitudes, dtype=complex)
        if amp.shape != (4,):
            raise OutOfRange(f"expected 4 amplitudes, got shape {amp.shape}")
        n = float(np.sum(np.abs(amp) ** 2))
        if n > 1.0 + 1e-12:
            raise OutOfRange(f"norm^2 = {n} exceeds 1")
        amp = amp.copy()
        amp.setflags(write=False)
        object.__setattr__(self, "amplitudes", amp)

    @property
    def norm_sq(self) -> float:
        return float(np.sum(np.abs(self.amplitudes) ** 2))


@dataclass(frozen=True)
class PipelineTrace:
    """Ordered (label, amplitude vector) stages for one branch.

    Stages while both arms are occupied carry 4 amplitudes, the rest 2;
    the last stage must be a pure polarization state (path factored out).
    """

    stages: tuple[tuple[str, np.ndarray], ...]
    gamma: float
    phi: float

    def __post_init__(self):
        if self.stages[-1][1].shape != (2,):
            raise InvalidBranch("final stage must be a pure polarization state")

    def stage(self, label: str) -> np.ndarray:
        for name, vec in self.stages:
            if name == label:
                return vec
        raise KeyError(label)

    @property
    def output(self) -> np.ndarray:
        return self.stages[-1][1]


def _check_inputs(psi_in: np.ndarray, gamma: float, phi: float | None = None) -> np.ndarray:
    psi = np.asarray(psi_in, dtype=complex)
    if psi.shape != (2,):
        raise OutOfRange(f"input ket must have 2 amplitudes, got {psi.shape}")
    if abs(float(np.sum(np.abs(psi) ** 2)) - 1.0) > 1e-10:
        raise OutOfRange("input ket must be normalized")
    if not 0.0 <= gamma <= math.pi / 4:
        raise OutOfRange(f"gamma = {gamma} outside [0, pi/4]")
    if phi is not None and not any(abs(phi - b) <= 1e-12 for b in BRANCH_ANGLES):
        raise InvalidBranch(f"phi = {phi} not in {{+pi/8, -pi/8}}")
    return psi


def _rot(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _hwp(phi: float) -> np.ndarray:
    c, s = math.cos(2.0 * phi), math.sin(2.0 * phi)
    return np.array([[c, s], [s, -c]], dtype=complex)


_FLIP = np.array([[0, 1], [1, 0]], dtype=complex)


def _per_arm(up: np.ndarray, down: np.ndarray) -> np.ndarray:
    """Block-diagonal action: `up` on path |0>, `down` on path |1>."""
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = up
    out[2:, 2:] = down
    return out


def propagate(psi_in, gamma: float, phi: float) -> PipelineTrace:
    """Trace the nine stages for one branch angle.

    The returned trace ends with the subnormalized polarization ket whose
    squared norm is the branch (outcome) probability.
    """
    psi = _check_inputs(psi_in, gamma, phi)
    eye = np.eye(2, dtype=complex)

    def two_arm(label: str, amplitudes: np.ndarray) -> np.ndarray:
        # PathPolState enforces the subnormalization invariant per stage
        state = PathPolState(amplitudes)
        stages.append((label, state.amplitudes))
        return state.amplitudes

    stages: list[tuple[str, np.ndarray]] = [("psi_in", psi)]
    # 2: beam displacer, |H> -> |0H>, |V> -> |1V>
    s2 = two_arm("psi2", np.array([psi[0], 0.0, 0.0, psi[1]], dtype=complex))
    # 3: vertical flip on the lower arm
    s3 = two_arm("psi3", _per_arm(eye, _FLIP) @ s2)
    # 4: polarization rotation +gamma (upper) / -gamma (lower)
    s4 = two_arm("psi4", _per_arm(_rot(gamma), _rot(-gamma)) @ s3)
    # 5: shared half-wave plate at the branch angle
    s5 = two_arm("psi5", _per_arm(_hwp(phi), _hwp(phi)) @ s4)
    # 6: polarizing beam splitter transmits |H> only (post-selection)
    keep_h = np.diag([1.0, 0.0, 1.0, 0.0]).astype(complex)
    s6 = two_arm("psi6", keep_h @ s5)
    # 7: horizontal flip on the upper arm
    s7 = two_arm("psi7", _per_arm(_FLIP, eye) @ s6)
    # 8: beam displacer merges |0V> and |1H> back onto one path
    s8 = np.array([s7[2], s7[1]], dtype=complex)
    stages.append(("psi8", s8))
    # 9: polarization swap
    stages.append(("psi9", _FLIP @ s8))
    return PipelineTrace(tuple(stages), gamma, phi)


def branch_output(psi_in, gamma: float, outcome: int) -> np.ndarray:
    """Subnormalized output ket of the +/- outcome branch."""
    phi = BRANCH_ANGLES[0] if outcome == 1 else BRANCH_ANGLES[1]
    return propagate(psi_in, gamma, phi).output


def composed_operator(gamma: float, phi: float) -> np.ndarray:
    """All nine stages collapsed into one 2x2 operator on the input ket."""
    _check_inputs(np.array([1.0, 0.0], dtype=complex), gamma, phi)
    return np.array(
        [
            [math.cos(2.0 * phi - gamma), 0.0],
            [0.0, math.cos(2.0 * phi + gamma)],
        ],
        dtype=complex,
    )


def pipeline_vs_lueders(psi_in, gamma: float) -> float:
    """Max Frobenius gap between branch outputs and the Lueders update.

    Contract: below 1e-10 for every normalized input and gamma in range.
    """
    psi = _check_inputs(psi_in, gamma)
    rho = dm(psi)
    worst = 0.0
    for outcome in (1, -1):
        out = branch_output(psi, gamma, outcome)
        k = noisy_z_kraus(gamma, outcome)
        worst = max(worst, frob(np.outer(out, out.conj()) - k @ rho @ k))
    return worst


def tomography_prob(psi_in, gamma: float, outcome: int, projector_ket) -> float:
    """Probability of passing the final rank-1 projector on one branch."""
    ket = np.asarray(projector_ket, dtype=complex)
    if ket.shape != (2,):
        raise OutOfRange("projector ket must have 2 amplitudes")
    if abs(float(np.sum(np.abs(ket) ** 2)) - 1.0) > 1e-10:
        raise OutOfRange("projector ket must be normalized")
    out = branch_output(psi_in, gamma, outcome)
    return float(abs(np.vdot(ket, out)) ** 2)


def tomography_prob_closed_form(psi_in, gamma: float, outcome: int, projector_ket) -> float:
    """Closed-form twin of tomography_prob, used for cross-checks."""
    psi = _check_inputs(psi_in, gamma)
    c, d = np.asarray(projector_ket, dtype=complex)
    alpha, beta = psi
    ac2 = abs(alpha) ** 2 * abs(c) ** 2
    bd2 = abs(beta) ** 2 * abs(d) ** 2
    interference = 2.0 * (alpha * np.conj(beta) * np.conj(c) * d).real
    return 0.5 * (
        ac2
        + bd2
        + interference * math.cos(2.0 * gamma)
        + outcome * (ac2 - bd2) * math.sin(2.0 * gamma)
    )


def tomography_table(gamma: float, kets: dict[str, np.ndarray]) -> dict[str, dict[str, float]]:
    """Full table: projector label -> state label:outcome -> probability."""
    table: dict[str, dict[str, float]] = {}
    for proj_label, proj in TOMOGRAPHY_KETS.items():
        row = {}
        for state_label, psi in kets.items():
            for outcome, sign in ((1, "+"), (-1, "-")):
                row[f"{state_label}:{sign}"] = tomography_prob(psi, gamma, outcome, proj)
        table[proj_label] = row
    return table


def mixed_noisy_x_prob(psi_in, eta: float) -> float:
    """Plus probability of noisy X at visibility eta, from gamma = 0 runs.

    Mixes the sharp-X marginal (both branches, X+ projector) with the
    trivial-coin probability recovered from the Y-projector pair on one
    branch; equals the direct Born probability of noisy_x(eta).
    """
    if not 0.0 <= eta <= 1.0:
        raise OutOfRange(f"eta = {eta} outside [0, 1]")
    psi = _check_inputs(psi_in, 0.0)
    x_marginal = sum(
        tomography_prob(psi, 0.0, a, TOMOGRAPHY_KETS["X+"]) for a in (1, -1)
    )
    trivial = tomography_prob(psi, 0.0, 1, TOMOGRAPHY_KETS["Y+"]) + tomography_prob(
        psi, 0.0, 1, TOMOGRAPHY_KETS["Y-"]
    )
    return eta * x_marginal + (1.0 - eta) * trivial


def direct_noisy_x_prob(psi_in, eta: float) -> float:
    """Born-rule reference value for mixed_noisy_x_prob."""
    from .linalg import born_prob

    return born_prob(noisy_x(eta).plus, dm(np.asarray(psi_in, dtype=complex)))


def trace_to_json(trace: PipelineTrace) -> dict:
    return {
        "gamma": trace.gamma,
        "phi": trace.phi,
        "stages": [
            {"label": label, "amplitudes": [[float(z.real), float(z.imag)] for z in vec]}
            for label, vec in trace.stages
        ],
    }
