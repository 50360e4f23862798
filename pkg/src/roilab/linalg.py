"""Dense complex linear algebra for small Hermitian and PSD matrices.

Matrices are numpy ``complex128`` arrays. Eigendecompositions are computed
without an external solver: 2x2 Hermitian matrices use the closed-form
Bloch parametrization, larger ones a cyclic Jacobi sweep. Both are
deterministic, which keeps every downstream table reproducible bit for bit.

All comparisons are absolute-tolerance; every operator handled here is O(1)
in norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch, NotEffect, NotHermitian, NotPSD, NotState

HERM_TOL = 1e-10
PSD_SLACK = 1e-10
STATE_TRACE_TOL = 1e-8

ID2 = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

_JACOBI_SWEEP_CAP = 60


def dagger(m: np.ndarray) -> np.ndarray:
    return m.conj().T


def frob(m: np.ndarray) -> float:
    """Frobenius norm."""
    return float(np.sqrt(np.sum(np.abs(m) ** 2)))


def as_cmatrix(m) -> np.ndarray:
    """Coerce to a square complex128 array."""
    a = np.asarray(m, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionMismatch(f"expected a square matrix, got shape {a.shape}")
    return a


def is_hermitian(m: np.ndarray, tol: float = HERM_TOL) -> bool:
    return frob(m - dagger(m)) <= tol


@dataclass(frozen=True)
class HermEig:
    """Spectral decomposition: ascending eigenvalues, orthonormal columns."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ dagger(v)


def _eig2(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Closed-form 2x2 Hermitian eigendecomposition.

    Writes M = c*I + w.sigma; eigenvalues are c -/+ |w|. The eigenvector
    branch is picked by whichever of |w| +/- w_z is larger, which avoids
    cancellation when w points near the -/+z pole.
    """
    c = (m[0, 0].real + m[1, 1].real) / 2.0
    wz = (m[0, 0].real - m[1, 1].real) / 2.0
    wx = m[1, 0].real
    wy = m[1, 0].imag
    r = math.sqrt(wx * wx + wy * wy + wz * wz)
    vals = np.array([c - r, c + r])
    if r == 0.0:
        return vals, np.eye(2, dtype=complex)
    w01 = complex(wx, -wy)  # upper off-diagonal entry of w.sigma
    if r + wz >= r - wz:
        up = np.array([wz + r, wx + 1j * wy], dtype=complex)
        up /= math.sqrt(2.0 * r * (r + wz))
    else:
        up = np.array([w01, r - wz], dtype=complex)
        up /= math.sqrt(2.0 * r * (r - wz))
    down = np.array([-np.conj(up[1]), np.conj(up[0])], dtype=complex)
    return vals, np.column_stack([down, up])


def _eig_jacobi(m: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Cyclic Jacobi for complex Hermitian matrices (d > 2)."""
    a = m.astype(complex).copy()
    d = a.shape[0]
    v = np.eye(d, dtype=complex)
    scale = max(1.0, frob(a))
    for _ in range(_JACOBI_SWEEP_CAP):
        off = math.sqrt(sum(abs(a[p, q]) ** 2 for p in range(d) for q in range(d) if p != q))
        if off <= 1e-15 * scale:
            break
        for p in range(d - 1):
            for q in range(p + 1, d):
                apq = a[p, q]
                mag = abs(apq)
                if mag <= 1e-18 * scale:
                    continue
                phase = apq / mag
                tau = (a[q, q].real - a[p, p].real) / (2.0 * mag)
                sgn = 1.0 if tau >= 0.0 else -1.0
                t = sgn / (abs(tau) + math.sqrt(1.0 + tau * tau))
                cth = 1.0 / math.sqrt(1.0 + t * t)
                sth = t * cth
                # columns: [p q] <- [p q] @ [[c, s*phase], [-s*conj(phase), c]]
                col_p = a[:, p] * cth - a[:, q] * sth * np.conj(phase)
                col_q = a[:, p] * sth * phase + a[:, q] * cth
                a[:, p], a[:, q] = col_p, col_q
                row_p = a[p, :] * cth - a[q, :] * sth * phase
                row_q = a[p, :] * sth * np.conj(phase) + a[q, :] * cth
                a[p, :], a[q, :] = row_p, row_q
                vcol_p = v[:, p] * cth - v[:, q] * sth * np.conj(phase)
                vcol_q = v[:, p] * sth * phase + v[:, q] * cth
                v[:, p], v[:, q] = vcol_p, vcol_q
    vals = np.diag(a).real.copy()
    order = np.argsort(vals, kind="stable")
    return vals[order], v[:, order]


def herm_eig(m) -> HermEig:
    """Spectral decomposition of a Hermitian matrix.

    Raises NotHermitian when ||M - M^dag||_F exceeds the tolerance; the
    Hermitian part is then decomposed, so tiny asymmetry from products of
    roots never leaks into the spectrum.
    """
    a = as_cmatrix(m)
    if not is_hermitian(a):
        raise NotHermitian(f"matrix deviates from Hermitian by more than {HERM_TOL}")
    a = (a + dagger(a)) / 2.0
    if a.shape[0] == 1:
        return HermEig(np.array([a[0, 0].real]), np.eye(1, dtype=complex))
    if a.shape[0] == 2:
        vals, vecs = _eig2(a)
    else:
        vals, vecs = _eig_jacobi(a)
    return HermEig(vals, vecs)


def psd_sqrt(m) -> np.ndarray:
    """PSD square root via the spectral decomposition.

    Eigenvalues in [-PSD_SLACK, 0) are clamped to zero; anything lower
    raises NotPSD.
    """
    eig = herm_eig(m)
    vals = eig.eigenvalues
    if vals[0] < -PSD_SLACK:
        raise NotPSD(f"minimum eigenvalue {vals[0]:.3e} below -{PSD_SLACK}")
    rooted = np.sqrt(np.clip(vals, 0.0, None))
    v = eig.eigenvectors
    return (v * rooted) @ dagger(v)


def psd_project(m) -> np.ndarray:
    """Nearest (Frobenius) PSD matrix: clip negative eigenvalues."""
    eig = herm_eig(m)
    clipped = np.clip(eig.eigenvalues, 0.0, None)
    v = eig.eigenvectors
    return (v * clipped) @ dagger(v)


def schur(m, n) -> np.ndarray:
    """Entrywise product of two equally sized matrices."""
    a, b = as_cmatrix(m), as_cmatrix(n)
    if a.shape != b.shape:
        raise DimensionMismatch(f"shapes {a.shape} and {b.shape} differ")
    return a * b


def check_effect(e, tol: float = PSD_SLACK) -> np.ndarray:
    """Validate 0 <= E <= 1 (within tol); returns the coerced array."""
    a = as_cmatrix(e)
    if not is_hermitian(a):
        raise NotEffect("effect must be Hermitian")
    vals = herm_eig(a).eigenvalues
    if vals[0] < -tol or vals[-1] > 1.0 + tol:
        raise NotEffect(f"effect spectrum [{vals[0]:.3e}, {vals[-1]:.3e}] outside [0, 1]")
    return a


def check_state(rho, tol: float = PSD_SLACK) -> np.ndarray:
    """Validate a density matrix (Hermitian, PSD, unit trace)."""
    a = as_cmatrix(rho)
    if not is_hermitian(a):
        raise NotState("state must be Hermitian")
    if abs(np.trace(a).real - 1.0) > STATE_TRACE_TOL or abs(np.trace(a).imag) > STATE_TRACE_TOL:
        raise NotState(f"state trace {np.trace(a):.6g} != 1")
    if herm_eig(a).eigenvalues[0] < -tol:
        raise NotState("state has a negative eigenvalue")
    return a


def born_prob(effect, rho) -> float:
    """Outcome probability tr[E rho], clamped to [0, 1]."""
    e = check_effect(effect)
    r = check_state(rho)
    if e.shape != r.shape:
        raise DimensionMismatch(f"effect {e.shape} vs state {r.shape}")
    p = float(np.trace(e @ r).real)
    if p < -PSD_SLACK or p > 1.0 + PSD_SLACK:
        raise NotEffect(f"tr[E rho] = {p:.3e} outside [0, 1] beyond slack")
    return min(1.0, max(0.0, p))


def expect(op: np.ndarray, rho: np.ndarray) -> float:
    """tr[op rho].real without validation (internal hot path)."""
    return float(np.trace(op @ rho).real)
