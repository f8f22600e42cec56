"""Two-point functionals on a closed curve.

For an ordered vertex pair (i, j): d is the chord length, l the arc length
from i to j in the direction of the parametrisation, psi = (L/pi) sin(pi l/L),
and theta the discrete integral of kappa ds from i to j.  theta uses half of
each endpoint's turning angle plus all angles strictly between, which makes
theta(i -> j) + theta(j -> i) = 2 pi * orientation exact and keeps the
discretisation second order.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from enum import Enum
from pathlib import Path

import numpy as np

from . import _kernels
from .errors import NotCriticalPairError, SelfTouchingError
from .geometry import DiscreteCurve, vertex_frames


@dataclass(frozen=True)
class PairRecord:
    i: int
    j: int
    d: float
    l: float
    psi: float
    ratio: float
    theta: float
    w: np.ndarray


class MinimizerCase(Enum):
    I = "I"
    II = "II"
    III = "III"


@dataclass(frozen=True)
class MinimizerClassification:
    case_id: MinimizerCase
    beta: float
    k: int
    residuals: dict


@dataclass(frozen=True)
class ThetaScan:
    theta_min: float
    theta_max: float
    argmin: tuple[int, int]
    argmax: tuple[int, int]


def psi_of_arc(l: float | np.ndarray, L: float):
    """psi = (L/pi) sin(pi l / L), evaluated at min(l, L-l) so the l <-> L-l
    symmetry holds bitwise."""
    lm = np.minimum(l, L - l)
    return (L / np.pi) * np.sin(np.pi * lm / L)


def theta_potential(curve: DiscreteCurve) -> np.ndarray:
    """Vector U with theta(i -> j) = U_j - U_i (+ 2 pi * orientation when the
    arc from i to j wraps past vertex 0)."""
    phi = curve.turning
    return np.cumsum(phi) - 0.5 * phi


def theta_pair(curve: DiscreteCurve, i: int, j: int) -> float:
    """Discrete integral of kappa ds from vertex i to vertex j (i != j)."""
    U = theta_potential(curve)
    val = U[j] - U[i]
    if j < i:
        val += 2.0 * np.pi * curve.orientation
    return float(val)


def arc_between(curve: DiscreteCurve, i: int, j: int) -> float:
    """Arc length from vertex i to vertex j in parametrisation direction."""
    cum = curve.arc_positions
    if j > i:
        return float(cum[j] - cum[i])
    return float(curve.length - (cum[i] - cum[j]))


def pair_record(curve: DiscreteCurve, i: int, j: int) -> PairRecord:
    """All two-point quantities for the ordered pair (i, j)."""
    if i == j:
        raise ValueError("pair requires two distinct vertices")
    i = int(i) % curve.n
    j = int(j) % curve.n
    diff = curve.vertices[j] - curve.vertices[i]
    d = float(np.hypot(diff[0], diff[1]))
    if d == 0.0:
        raise SelfTouchingError(i, j)
    L = curve.length
    l = arc_between(curve, i, j)
    psi = float(psi_of_arc(l, L))
    return PairRecord(
        i=i,
        j=j,
        d=d,
        l=l,
        psi=psi,
        ratio=d / psi,
        theta=theta_pair(curve, i, j),
        w=diff / d,
    )


def _prefix_argmin(values: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Running minimum of values and the index where it was first attained."""
    run = np.minimum.accumulate(values)
    fresh = np.concatenate(([True], values[1:] < run[:-1]))
    idx = np.where(fresh, np.arange(values.size), -1)
    return run, np.maximum.accumulate(idx)


def theta_scan(curve: DiscreteCurve) -> ThetaScan:
    """Extrema of theta over all ordered pairs i != j.

    Runs in O(N) on the cumulative-turning potential; agrees with the
    O(N^2) matrix scan because theta(i, j) depends only on U_j - U_i and
    the wrap constant.
    """
    U = theta_potential(curve)
    S = 2.0 * np.pi * curve.orientation
    n = U.size

    run_min, arg_min = _prefix_argmin(U)
    run_max, arg_max = _prefix_argmin(-U)
    run_max = -run_max

    best_max = -np.inf
    best_max_pair = (0, 1)
    best_min = np.inf
    best_min_pair = (0, 1)

    # pairs i < j (no wrap): theta = U_j - U_i
    diff_hi = U[1:] - run_min[:-1]
    k = int(np.argmax(diff_hi))
    if diff_hi[k] > best_max:
        best_max = float(diff_hi[k])
        best_max_pair = (int(arg_min[k]), k + 1)
    diff_lo = U[1:] - run_max[:-1]
    k = int(np.argmin(diff_lo))
    if diff_lo[k] < best_min:
        best_min = float(diff_lo[k])
        best_min_pair = (int(arg_max[k]), k + 1)

    # pairs j < i (wrap past vertex 0): theta = U_j - U_i + S
    wrap_hi = run_max[:-1] - U[1:] + S
    k = int(np.argmax(wrap_hi))
    if wrap_hi[k] > best_max:
        best_max = float(wrap_hi[k])
        best_max_pair = (k + 1, int(arg_max[k]))
    wrap_lo = run_min[:-1] - U[1:] + S
    k = int(np.argmin(wrap_lo))
    if wrap_lo[k] < best_min:
        best_min = float(wrap_lo[k])
        best_min_pair = (k + 1, int(arg_min[k]))

    return ThetaScan(
        theta_min=best_min,
        theta_max=best_max,
        argmin=best_min_pair,
        argmax=best_max_pair,
    )


def min_chord_arc(curve: DiscreteCurve) -> tuple[float, PairRecord]:
    """Global minimum of d/psi over unordered pairs, exact O(N^2) scan.

    The returned record is oriented so that l <= L/2 (psi is symmetric under
    l <-> L - l, so this is a pure convention); ties break to the smallest
    (i, then j).
    """
    L = curve.length
    best, i, j, touch = _kernels.chord_arc_scan(curve.vertices, curve.arc_positions, L)
    if touch:
        raise SelfTouchingError(int(i), int(j))
    i, j = int(i), int(j)
    if arc_between(curve, i, j) > 0.5 * L:
        i, j = j, i
    return float(best), pair_record(curve, i, j)


def ratio_matrix(curve: DiscreteCurve) -> np.ndarray:
    """Full d/psi matrix over ordered pairs (diagonal = +inf).  O(N^2) memory;
    intended for diagnostics and tests at moderate N."""
    V = curve.vertices
    L = curve.length
    cum = curve.arc_positions
    dx = V[None, :, 0] - V[:, None, 0]
    dy = V[None, :, 1] - V[:, None, 1]
    d = np.hypot(dx, dy)
    lf = (cum[None, :] - cum[:, None]) % L
    np.fill_diagonal(lf, 0.0)
    psi = psi_of_arc(lf, L)
    with np.errstate(divide="ignore", invalid="ignore"):
        r = d / psi
    np.fill_diagonal(r, np.inf)
    return r


def local_ratio_minima(curve: DiscreteCurve) -> list[tuple[int, int]]:
    """Pairs that are local minima of d/psi against index-neighbour moves.

    Neighbours of (i, j) are (i +- 1, j) and (i, j +- 1) on the cyclic grid.
    Only pairs with l <= L/2 are reported (the mirrored pair is equivalent).
    """
    r = ratio_matrix(curve)
    n = curve.n
    ok = np.ones_like(r, dtype=bool)
    for shift, axis in ((1, 0), (-1, 0), (1, 1), (-1, 1)):
        ok &= r <= np.roll(r, shift, axis=axis)
    cum = curve.arc_positions
    lf = (cum[None, :] - cum[:, None]) % curve.length
    ok &= (lf > 0) & (lf <= 0.5 * curve.length)
    pairs = np.argwhere(ok)
    return [(int(a), int(b)) for a, b in pairs]


def is_local_ratio_min(curve: DiscreteCurve, i: int, j: int) -> bool:
    """Neighbour comparison for a single pair (cheap, no full matrix)."""
    base = pair_record(curve, i, j).ratio
    n = curve.n
    for di, dj in ((1, 0), (-1, 0), (0, 1), (0, -1)):
        a, b = (i + di) % n, (j + dj) % n
        if a == b:
            continue
        if pair_record(curve, a, b).ratio < base:
            return False
    return True


def first_variation_residual(curve: DiscreteCurve, rec: PairRecord) -> float:
    """Deviation from the critical-pair identity
    <w, tau_p> = <w, tau_q> = (d/psi) cos(pi l / L)."""
    frames = vertex_frames(curve)
    L = curve.length
    target = rec.ratio * np.cos(np.pi * rec.l / L)
    tp = float(np.dot(rec.w, frames.tangent[rec.i]))
    tq = float(np.dot(rec.w, frames.tangent[rec.j]))
    return max(abs(tp - target), abs(tq - target))


def second_variation_check(curve: DiscreteCurve, rec: PairRecord) -> float:
    """Margin of <w, K_q - K_p> >= -4 pi^2 d / L^2 with K = -kappa nu.

    Non-negative (zero on circles) at spatial minima of d/psi; returns
    <w, K_q - K_p> + 4 pi^2 d / L^2.
    """
    frames = vertex_frames(curve)
    kp = -frames.kappa[rec.i] * frames.normal[rec.i]
    kq = -frames.kappa[rec.j] * frames.normal[rec.j]
    L = curve.length
    return float(np.dot(rec.w, kq - kp) + 4.0 * np.pi**2 * rec.d / L**2)


def classify_minimizer(
    curve: DiscreteCurve,
    rec: PairRecord,
    tol_first_variation: float = 0.05,
) -> MinimizerClassification:
    """Case I/II/III of theta = 2 pi k +- beta at a critical pair.

    beta comes from cos(beta/2) = <w, tau> (clamped); the case is selected
    from the signs of <w, nu_p> and <w, nu_q>, then k minimises the theta
    residual.  Raises when the two tangent projections disagree by more than
    tol_first_variation (pair not first-order critical).
    """
    frames = vertex_frames(curve)
    tp = float(np.dot(rec.w, frames.tangent[rec.i]))
    tq = float(np.dot(rec.w, frames.tangent[rec.j]))
    if abs(tp - tq) > tol_first_variation:
        raise NotCriticalPairError(
            f"<w,tau_p>={tp:+.4f} and <w,tau_q>={tq:+.4f} differ by more than "
            f"{tol_first_variation}"
        )
    c = min(1.0, max(-1.0, 0.5 * (tp + tq)))
    beta = 2.0 * float(np.arccos(c))
    sb = float(np.sin(0.5 * beta))
    wp = float(np.dot(rec.w, frames.normal[rec.i]))
    wq = float(np.dot(rec.w, frames.normal[rec.j]))

    degenerate = sb < 1e-8
    if degenerate or wp * wq >= 0.0:
        case = MinimizerCase.III
        k = int(np.rint(rec.theta / (2.0 * np.pi)))
        expected = 2.0 * np.pi * k
        exp_p, exp_q = (wp, wq)  # sign pattern carries no constraint beyond equality
    elif wp < 0.0:
        case = MinimizerCase.I
        k = int(np.rint((rec.theta - beta) / (2.0 * np.pi)))
        expected = 2.0 * np.pi * k + beta
        exp_p, exp_q = -sb, sb
    else:
        case = MinimizerCase.II
        k = int(np.rint((rec.theta + beta) / (2.0 * np.pi)))
        expected = 2.0 * np.pi * k - beta
        exp_p, exp_q = sb, -sb

    residuals = {
        "theta": abs(rec.theta - expected),
        "nu_p": abs(wp - exp_p),
        "nu_q": abs(wq - exp_q),
        "first_variation": abs(tp - tq),
    }
    return MinimizerClassification(case_id=case, beta=beta, k=k, residuals=residuals)


def write_pair_table(curve: DiscreteCurve, path: str | Path) -> None:
    """Full ordered-pair dump as CSV: i,j,d,l,psi,ratio,theta.  O(N^2) rows."""
    V = curve.vertices
    L = curve.length
    cum = curve.arc_positions
    U = theta_potential(curve)
    S = 2.0 * np.pi * curve.orientation
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["i", "j", "d", "l", "psi", "ratio", "theta"])
        for i in range(curve.n):
            dx = V[:, 0] - V[i, 0]
            dy = V[:, 1] - V[i, 1]
            d = np.hypot(dx, dy)
            lf = (cum - cum[i]) % L
            psi = psi_of_arc(lf, L)
            theta = U - U[i]
            theta[:i] += S
            for j in range(curve.n):
                if j == i:
                    continue
                writer.writerow(
                    [i, j, repr(float(d[j])), repr(float(lf[j])),
                     repr(float(psi[j])), repr(float(d[j]) / float(psi[j])),
                     repr(float(theta[j]))]
                )
