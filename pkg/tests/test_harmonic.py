import math

import numpy as np
import pytest

from unidisc.analytic.expressions import Affine, Constant, Identity, Koebe
from unidisc.errors import DegenerateDilatationError, InapplicableError
from unidisc.harmonic.maps import (
    HarmonicMap, SeparationQuery, dilatation, harmonic_becker_verdict, harmonic_pre_schwarzian, image_sup, jacobian,
    omega_map_check, separation_bound, separation_bound_at, separation_check,
)


def test_affine_shear():
    hmap = HarmonicMap(Identity(), Affine(0, 0.5))
    assert dilatation(hmap, 0.3 + 0.1j) == pytest.approx(0.5)
    assert jacobian(hmap, 0.3 + 0.1j) == pytest.approx(0.75)
    # constant dilatation leaves the pre-Schwarzian of h unchanged
    assert harmonic_pre_schwarzian(hmap, 0.3) == pytest.approx(0.0, abs=1e-14)
    assert harmonic_becker_verdict(hmap, depth=5).holds


def test_harmonic_pre_schwarzian_of_a_sense_preserving_koebe_shear():
    hmap = HarmonicMap(Koebe(), Affine(0, 0.25))
    z = np.array([0.2, -0.4j])
    omega = dilatation(hmap, z)
    assert np.all(np.abs(omega) < 1)
    assert harmonic_pre_schwarzian(hmap, z).shape == (2,)


def test_degenerate_dilatation():
    hmap = HarmonicMap(Identity(), Affine(0, 2))
    with pytest.raises(DegenerateDilatationError) as info:
        harmonic_pre_schwarzian(hmap, 0.5)
    assert info.value.point == 0.5

    report = harmonic_becker_verdict(hmap, depth=4)
    assert not report.holds
    assert "error" in report.details


def test_records_are_normalized():
    hmap = HarmonicMap.from_dict({"h": {"kind": "identity"}, "g": {"kind": "constant", "c": 0.3}})
    z = 0.2 - 0.1j
    assert hmap.values(0j) == pytest.approx(0.3)
    assert hmap.values(z) == pytest.approx(z + 0.3)
    assert HarmonicMap.from_dict({"h": {"kind": "koebe"}}).g == Constant(0)


def test_omega_map_flags_a_false_premise():
    assert omega_map_check(HarmonicMap(Identity(), Affine(0, 1.5)), samples=256)["flagged"]
    report = omega_map_check(HarmonicMap(Identity(), Affine(0, 0.5)), samples=256)
    assert not report["flagged"]
    assert report["max_modulus"] == pytest.approx(0.5)


def test_separation_bound_values():
    C = 2.0
    assert separation_bound_at(1 / (4 * C), C) == pytest.approx(math.log(3))
    assert separation_bound_at(1 / (9 * C), C) == pytest.approx(math.log(5))
    with pytest.raises(InapplicableError):
        separation_bound_at(1 / C, C)
    with pytest.raises(InapplicableError):
        separation_bound(SeparationQuery(0.5, 0.6, 0.0))


def test_separation_check_for_a_distant_pair():
    result = separation_check(HarmonicMap(), SeparationQuery(0.99, -0.99, 0.5))
    assert result["holds"]
    assert result["bound"] == pytest.approx(math.log((2 - math.sqrt(0.5)) / math.sqrt(0.5)))
    assert result["image_gap"] == pytest.approx(1.98)


def test_image_sup_of_the_identity():
    result = image_sup(HarmonicMap(), r_max=0.9)
    assert 0.85 <= result["sup"] <= 0.9
    assert result["points"] > 0
