"""Pure-Python twin of the compiled feasibility kernel.

Alternating projections between the PSD cone (per joint effect) and the
affine margin constraints, specialised to qubit effect quadruples.

A 2x2 Hermitian matrix is carried as 4 doubles (a00, Re a01, Im a01, a11);
the iterate ``g`` is a flat list of 16 doubles ordered
(G++, G+-, G-+, G--). ``p`` and ``q`` hold the plus effects of the two
target margins (the minus effects are implied).

Kept free of numpy on purpose: the per-iteration state is tiny and scalar
arithmetic beats array dispatch overhead at this size. The compiled kernel
in ``_jm_kernel.pyx`` implements the identical procedure; tests and the
benchmark hold the two to byte-level agreement on verdicts.
"""

from __future__ import annotations

import math

# Improvement below max(STALL_ABS, STALL_REL * residual) per window means the
# iteration has plateaued short of the target: stop early, never declare
# feasible. Sub-linear boundary cases improve faster than this until far
# beyond any practical cap, so they are unaffected.
STALL_WINDOW = 2000
STALL_ABS = 1e-15
STALL_REL = 1e-7


def psd_project_coords(a: float, re: float, im: float, d: float) -> tuple[float, float, float, float]:
    """Clip negative eigenvalues of a 2x2 Hermitian in coordinate form."""
    c = 0.5 * (a + d)
    wz = 0.5 * (a - d)
    r = math.sqrt(re * re + im * im + wz * wz)
    lo = c - r
    if lo >= 0.0:
        return a, re, im, d
    hi = c + r
    if hi <= 0.0:
        return 0.0, 0.0, 0.0, 0.0
    s = hi / (2.0 * r)
    return s * (r + wz), s * re, s * im, s * (r - wz)


def _psd_violation(a: float, re: float, im: float, d: float) -> float:
    """Magnitude of the most negative eigenvalue (0 when PSD)."""
    c = 0.5 * (a + d)
    wz = 0.5 * (a - d)
    lo = c - math.sqrt(re * re + im * im + wz * wz)
    return -lo if lo < 0.0 else 0.0


def _margin_error(g: list[float], p: tuple[float, ...], q: tuple[float, ...]) -> float:
    """Max Frobenius error over the four margin constraints."""
    worst = 0.0
    # first margin: G[a,+] + G[a,-] vs P_a
    for a_idx, sign in ((0, 1.0), (2, -1.0)):
        base = a_idx * 4
        err = 0.0
        for c in range(4):
            tgt = p[c] if sign > 0 else ((1.0 if c in (0, 3) else 0.0) - p[c])
            dlt = g[base + c] + g[base + 4 + c] - tgt
            err += dlt * dlt if c in (0, 3) else 2.0 * dlt * dlt
        worst = max(worst, err)
    # second margin: G[+,b] + G[-,b] vs Q_b
    for b_idx, sign in ((0, 1.0), (1, -1.0)):
        base = b_idx * 4
        err = 0.0
        for c in range(4):
            tgt = q[c] if sign > 0 else ((1.0 if c in (0, 3) else 0.0) - q[c])
            dlt = g[base + c] + g[base + 8 + c] - tgt
            err += dlt * dlt if c in (0, 3) else 2.0 * dlt * dlt
        worst = max(worst, err)
    return math.sqrt(worst)


def _affine_project(g: list[float], p: tuple[float, ...], q: tuple[float, ...]) -> None:
    """Project onto {G : row sums = P_a, column sums = Q_b} in place."""
    for c in range(4):
        ident = 1.0 if c in (0, 3) else 0.0
        gpp, gpm, gmp, gmm = g[c], g[4 + c], g[8 + c], g[12 + c]
        rp = gpp + gpm
        rm = gmp + gmm
        cp = gpp + gmp
        cm = gpm + gmm
        s = rp + rm
        pp, pm = p[c], ident - p[c]
        qp, qm = q[c], ident - q[c]
        shift = (s - ident) * 0.25
        g[c] = gpp + (pp - rp) * 0.5 + (qp - cp) * 0.5 + shift
        g[4 + c] = gpm + (pp - rp) * 0.5 + (qm - cm) * 0.5 + shift
        g[8 + c] = gmp + (pm - rm) * 0.5 + (qp - cp) * 0.5 + shift
        g[12 + c] = gmm + (pm - rm) * 0.5 + (qm - cm) * 0.5 + shift


def alternate(
    g: list[float],
    p: tuple[float, ...],
    q: tuple[float, ...],
    tol: float,
    max_iter: int,
) -> tuple[bool, float, int]:
    """Run the alternating projections; mutates g to the final PSD iterate.

    Returns (converged, residual, iterations). The residual is the margin
    Frobenius error of the (exactly PSD) iterate, so a converged run hands
    back a valid witness at the requested tolerance.
    """
    best = math.inf
    best_at_window = math.inf
    residual = math.inf
    it = 0
    while it < max_iter:
        it += 1
        for e in range(0, 16, 4):
            g[e], g[e + 1], g[e + 2], g[e + 3] = psd_project_coords(
                g[e], g[e + 1], g[e + 2], g[e + 3]
            )
        residual = _margin_error(g, p, q)
        if residual <= tol:
            return True, residual, it
        if residual < best:
            best = residual
        if it % STALL_WINDOW == 0:
            if best_at_window - best < max(STALL_ABS, STALL_REL * best):
                break
            best_at_window = best
        _affine_project(g, p, q)
    return False, residual, it
