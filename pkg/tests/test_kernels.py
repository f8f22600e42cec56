from __future__ import annotations

import numpy as np
import pytest

from chordarc import _kernels
from chordarc.forcing import ForcingKind, ForcingSpec
from chordarc.generators import make_fourier, make_star
from chordarc.geometry import DiscreteCurve

from oracles import euler_step_reference


def test_integrate_chunk_euler_matches_numpy_reference():
    spec = ForcingSpec(ForcingKind.LENGTH_PRESERVING)
    X = make_fourier(512, seed=3, modes=4, amp=0.2)
    Xref = X.copy()
    for _ in range(20):
        Xref, dt, _ = euler_step_reference(Xref, spec, 0.4)
    Xk, tk, steps, status, h, dtk = _kernels.integrate_chunk(
        X, 0.0, np.inf, 20, 0, spec.kernel_code, 0.0, 0.4)
    assert steps == 20 and status == _kernels.S_OK
    assert np.allclose(Xk, Xref, atol=1e-12)


def test_integrate_chunk_respects_t_end():
    X = make_star(256)
    t_end = 1.7e-4
    Xk, tk, steps, status, _, dt = _kernels.integrate_chunk(
        X, 0.0, t_end, 1000, 1, _kernels.F_ZERO, 0.0, 0.4)
    assert status == _kernels.S_OK
    assert tk == pytest.approx(t_end, abs=1e-18)


def test_integrate_chunk_spread_status():
    # the star stretches its mesh quickly under plain shortening
    X = make_star(512)
    Xk, tk, steps, status, _, _ = _kernels.integrate_chunk(
        X, 0.0, np.inf, 10**6, 1, _kernels.F_ZERO, 0.0, 0.4)
    assert status == _kernels.S_SPREAD
    assert steps < 10**6
    e = np.hypot(*(np.roll(Xk, -1, axis=0) - Xk).T)
    assert e.max() / e.min() > 1.0 + _kernels.SPREAD_CAP


def test_integrate_chunk_stiffness():
    t = np.linspace(0.0, 2.0 * np.pi, 64, endpoint=False)
    X = 1e-7 * np.column_stack([np.cos(t), np.sin(t)])
    _, _, steps, status, _, _ = _kernels.integrate_chunk(
        X, 0.0, np.inf, 10, 1, _kernels.F_ZERO, 0.0, 0.4)
    assert status == _kernels.S_STIFF and steps == 0


def test_chord_arc_scan_tie_break_first_pair():
    # the unit square's mid-edge chords (1,5) and (3,7) tie bitwise; the scan
    # must report the smallest (i, j)
    X = np.array([[0, 0], [0.5, 0], [1, 0], [1, 0.5],
                  [1, 1], [0.5, 1], [0, 1], [0, 0.5]], dtype=float)
    e = np.hypot(*(np.roll(X, -1, axis=0) - X).T)
    cum = np.concatenate(([0.0], np.cumsum(e)))[:8]
    L = float(e.sum())
    r, i, j, touch = _kernels.chord_arc_scan(X, cum, L)
    assert touch == 0
    assert (i, j) == (1, 5)
    assert r == pytest.approx(1.0 / ((4.0 / np.pi) * np.sin(np.pi / 2)), rel=1e-12)


def test_segments_hit_cases():
    eps = 1e-12
    hit = _kernels.segments_hit
    assert hit(0, 0, 1, 1, 0, 1, 1, 0, eps)          # proper crossing
    assert hit(0, 0, 1, 0, 1, 0, 2, 1, eps)          # shared endpoint
    assert hit(0, 0, 2, 0, 1, 0, 1, 1, eps)          # T-touch
    assert hit(0, 0, 1, 0, 0.5, 1e-13, 1.5, 1e-13, eps)  # within epsilon band
    assert not hit(0, 0, 1, 0, 0, 1, 1, 1, eps)      # parallel, separated
    assert not hit(0, 0, 1, 0, 2, 0, 3, 0, eps)      # collinear, disjoint
    assert hit(0, 0, 1, 0, 0.5, 0, 2, 0, eps)        # collinear, overlapping


@pytest.mark.parametrize("seed", [0, 1])
def test_rk2_and_euler_disagree_at_second_order(seed):
    """Sanity: the two schemes differ by O(dt^2), not O(dt) and not zero."""
    X = make_fourier(256, seed=seed, modes=4, amp=0.2)
    Xe, te, *_ = _kernels.integrate_chunk(
        X, 0.0, np.inf, 1, 0, _kernels.F_ZERO, 0.0, 0.4)
    Xr, tr, *_ = _kernels.integrate_chunk(
        X, 0.0, np.inf, 1, 1, _kernels.F_ZERO, 0.0, 0.4)
    assert te == tr
    gap = np.max(np.abs(Xe - Xr))
    assert 0.0 < gap < 10.0 * te**2 * 1e4  # loose O(dt^2) envelope
