from __future__ import annotations

import numpy as np
import pytest

from chordarc.geometry import DiscreteCurve, resample_uniform
from chordarc.generators import (
    make_circle,
    make_dumbbell,
    make_ellipse,
    make_fourier,
    make_star,
)


def square_points(side: float = 1.0) -> np.ndarray:
    """Unit square as an 8-gon (corners plus edge midpoints), CCW from origin."""
    s = side
    return np.array([
        [0, 0], [s / 2, 0], [s, 0], [s, s / 2],
        [s, s], [s / 2, s], [0, s], [0, s / 2],
    ], dtype=float)


def limacon_points(n: int = 512) -> np.ndarray:
    """r = 1 + 1.5 cos(phi): the inner loop self-crosses."""
    ph = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    r = 1.0 + 1.5 * np.cos(ph)
    return np.column_stack([r * np.cos(ph), r * np.sin(ph)])


def bowtie_points() -> np.ndarray:
    """Figure-eight on 8 vertices; edges 0 and 5 cross transversally."""
    return np.array([
        [0.0, 0.0], [1.0, 1.0], [2.0, 2.0], [2.0, 1.0],
        [2.0, 0.0], [1.05, 0.9], [0.0, 2.0], [0.0, 1.0],
    ])


@pytest.fixture(scope="session")
def circle1024():
    return DiscreteCurve(make_circle(1024))


@pytest.fixture(scope="session")
def ellipse2048():
    return DiscreteCurve(make_ellipse(2048))


@pytest.fixture(scope="session")
def ellipse4096():
    return DiscreteCurve(make_ellipse(4096))


@pytest.fixture(scope="session")
def star2048():
    return DiscreteCurve(make_star(2048))


@pytest.fixture(scope="session")
def dumbbell1024():
    return DiscreteCurve(make_dumbbell(1024))


@pytest.fixture(scope="session")
def small_corpus(circle1024, ellipse2048, star2048, dumbbell1024):
    """Embedded test curves used by cross-cutting property tests."""
    fourier = DiscreteCurve(make_fourier(512, seed=11))
    return {
        "circle": resample_uniform(circle1024, 512),
        "ellipse": resample_uniform(ellipse2048, 512),
        "star": resample_uniform(star2048, 512),
        "dumbbell": resample_uniform(dumbbell1024, 512),
        "fourier": fourier,
    }
