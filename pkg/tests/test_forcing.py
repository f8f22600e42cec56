from __future__ import annotations

import numpy as np
import pytest

from chordarc.errors import ForcingDomainError
from chordarc.forcing import ForcingKind, ForcingSpec, evaluate_forcing, parse_forcing
from chordarc.geometry import DiscreteCurve
from chordarc.generators import make_circle

# integral of kappa^2 ds for the a=2, b=1 ellipse, frozen from adaptive
# quadrature of (ab)^2 (a^2 sin^2 + b^2 cos^2)^(-5/2) (1e-13 self-consistent).
ELLIPSE_KAPPA_SQ_INTEGRAL = 6.6360297521233

NONTRIVIAL = (ForcingKind.AREA_PRESERVING, ForcingKind.LENGTH_PRESERVING,
              ForcingKind.JIAN_PAN)


@pytest.mark.parametrize("kind", NONTRIVIAL)
def test_unit_circle_all_families_equal_one(kind, circle1024):
    h = evaluate_forcing(ForcingSpec(kind), circle1024)
    assert h == pytest.approx(1.0, abs=1e-5)


@pytest.mark.parametrize("radius", [0.5, 2.0, 5.0])
def test_circle_radius_scaling(radius):
    c = DiscreteCurve(make_circle(1024, radius=radius))
    h = evaluate_forcing(ForcingSpec(ForcingKind.AREA_PRESERVING), c)
    assert h == pytest.approx(1.0 / radius, abs=1e-5 / radius)


def test_length_preserving_matches_quadrature(ellipse4096):
    h = evaluate_forcing(ForcingSpec(ForcingKind.LENGTH_PRESERVING), ellipse4096)
    assert h == pytest.approx(ELLIPSE_KAPPA_SQ_INTEGRAL / (2.0 * np.pi), abs=1e-3)


def test_zero_and_constant():
    c = DiscreteCurve(make_circle(64))
    assert evaluate_forcing(ForcingSpec(ForcingKind.ZERO), c) == 0.0
    assert evaluate_forcing(
        ForcingSpec(ForcingKind.CONSTANT, 0.75), c) == 0.75


def test_nonnegative_on_corpus(small_corpus):
    for kind in NONTRIVIAL:
        for name, curve in small_corpus.items():
            assert evaluate_forcing(ForcingSpec(kind), curve) >= 0.0, (kind, name)


@pytest.mark.parametrize("lam", [0.5, 2.0, 10.0])
@pytest.mark.parametrize("kind", NONTRIVIAL)
def test_scaling_covariance(kind, lam, star2048):
    h1 = evaluate_forcing(ForcingSpec(kind), star2048)
    h2 = evaluate_forcing(ForcingSpec(kind), star2048.scaled(lam))
    assert h2 == pytest.approx(h1 / lam, rel=1e-10)


def test_jianpan_needs_positive_area():
    c = DiscreteCurve(make_circle(64)).reversed()
    with pytest.raises(ForcingDomainError):
        evaluate_forcing(ForcingSpec(ForcingKind.JIAN_PAN), c)


def test_constant_value_validation():
    with pytest.raises(ValueError):
        ForcingSpec(ForcingKind.CONSTANT, -0.5)
    with pytest.raises(ValueError):
        ForcingSpec(ForcingKind.CONSTANT, float("inf"))


@pytest.mark.parametrize("text,kind,value", [
    ("zero", ForcingKind.ZERO, 0.0),
    ("area", ForcingKind.AREA_PRESERVING, 0.0),
    ("length", ForcingKind.LENGTH_PRESERVING, 0.0),
    ("jianpan", ForcingKind.JIAN_PAN, 0.0),
    ("constant:0.5", ForcingKind.CONSTANT, 0.5),
    ("  AREA ", ForcingKind.AREA_PRESERVING, 0.0),
])
def test_parse_forcing(text, kind, value):
    spec = parse_forcing(text)
    assert spec.kind is kind
    assert spec.constant_value == value


def test_parse_forcing_rejects_unknown():
    with pytest.raises(ValueError):
        parse_forcing("gravity")
    with pytest.raises(ValueError):
        parse_forcing("constant")
