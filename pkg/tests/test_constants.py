import math

import pytest

from bubbletower import UniversalConstants, compute_constants, robin_center

import oracles


def test_exact_values_match_closed_forms():
    c = UniversalConstants.exact()
    assert c.alpha4 == pytest.approx(oracles.ALPHA4, rel=1e-15)
    assert c.sphere3_area == pytest.approx(oracles.SPHERE3_AREA, rel=1e-15)
    assert c.green_normalization == pytest.approx(oracles.GREEN_NORMALIZATION, rel=1e-15)
    assert c.bubble_cubic_integral == pytest.approx(oracles.CUBIC_CONST, rel=1e-15)
    assert c.bubble_quartic_integral == pytest.approx(oracles.QUARTIC_CONST, rel=1e-15)
    assert c.hole_energy_constant == pytest.approx(oracles.HOLE_CONST, rel=1e-15)
    assert c.pair_interaction_constant == pytest.approx(oracles.PAIR_CONST, rel=1e-15)


def test_quadrature_reproduces_closed_forms():
    c = compute_constants()
    assert c.bubble_cubic_integral == pytest.approx(oracles.CUBIC_CONST, rel=1e-10)
    assert c.bubble_quartic_integral == pytest.approx(oracles.QUARTIC_CONST, rel=1e-10)
    assert c.hole_energy_constant == pytest.approx(oracles.HOLE_CONST, rel=1e-10)
    assert c.pair_interaction_constant == pytest.approx(oracles.PAIR_CONST, rel=1e-10)


def test_cubic_oracle_quadrature():
    # independent adaptive quadrature of U^3 over all radii
    u = oracles.bubble(1.0)
    val = oracles.quad_radial(lambda r: u(r) ** 3, 0.0, float("inf"), points=(1.0,))
    assert val == pytest.approx(oracles.CUBIC_CONST, rel=1e-10)


def test_quartic_oracle_quadrature():
    u = oracles.bubble(1.0)
    val = oracles.quad_radial(lambda r: u(r) ** 4, 0.0, float("inf"), points=(1.0,))
    assert val == pytest.approx(oracles.QUARTIC_CONST, rel=1e-10)


def test_identity_residuals_tiny():
    res = UniversalConstants.exact().identity_residuals()
    assert res["cubic_vs_green"] < 1e-10
    assert res["squared_cubic_vs_hole"] < 1e-10


def test_identities_hold_in_closed_form():
    # cubic constant = alpha4 / green normalization; squared it gives the
    # hole constant times 1/green normalization... spelled out:
    assert oracles.CUBIC_CONST == pytest.approx(
        oracles.ALPHA4 / oracles.GREEN_NORMALIZATION, rel=1e-14
    )
    assert oracles.CUBIC_CONST**2 * oracles.GREEN_NORMALIZATION == pytest.approx(
        oracles.HOLE_CONST, rel=1e-14
    )


def test_robin_center_scales_inverse_square():
    assert robin_center(1.0) == pytest.approx(oracles.GREEN_NORMALIZATION, rel=1e-14)
    assert robin_center(2.0) == pytest.approx(oracles.GREEN_NORMALIZATION / 4.0, rel=1e-14)


def test_robin_center_rejects_nonpositive_radius():
    with pytest.raises(ValueError):
        robin_center(0.0)
