import math

import numpy as np
import pytest

from unidisc.analytic.expressions import ExampleFamily, Identity, Koebe, Mobius, NegPower, OddPoly, Power
from unidisc.errors import ConditionViolatedError, DomainError, InapplicableError
from unidisc.geometry.regions import Annulus, UNIT_DISC
from unidisc.univalence import criteria
from unidisc.univalence.criteria import (
    CLUSTERING, LOCALLY_UNIVALENT, NO_CONCLUSION, becker_verdict, converse_bound_check, converse_disc_radius,
    criterion_verdict, horodisc_majorant_max, horodisc_transform_check, hv_reduction_max, hv_verdict,
    local_becker_limsup, majorant_critical_radius, majorant_profile_slope, nehari_verdict,
)
from unidisc.univalence.injectivity import injectivity_sample
from unidisc.univalence.reports import CriterionReport


def test_becker_holds_for_the_example_family():
    report = becker_verdict(ExampleFamily(1.0, 1), depth=8)
    assert report.holds
    assert report.worst_margin >= 0


def test_becker_fails_for_koebe():
    report = becker_verdict(Koebe(), depth=6)
    assert not report.holds
    assert report.worst_point is not None
    assert report.to_dict()["worst_point"] is not None


def test_nehari_verdicts():
    assert not nehari_verdict(Koebe(), depth=6).holds
    assert nehari_verdict(Mobius(0.5), depth=6).holds


def test_growth_condition_on_horodiscs():
    record = hv_verdict(ExampleFamily(3.0, -1j), 3.0, depth=8)
    assert record["condition"]["holds"]
    assert not record["holds_on_disc"]
    assert record["horodisc_a"] == pytest.approx(0.9375)
    assert "horodisc" in record["guarantee"]


def test_growth_condition_with_small_constant_covers_the_disc():
    record = hv_verdict(Identity(), 1.0, depth=6)
    assert record["holds_on_disc"]


def test_violated_growth_condition_names_a_witness():
    with pytest.raises(ConditionViolatedError) as info:
        hv_verdict(Koebe(), 0.5, depth=6)
    assert info.value.witness is not None
    assert info.value.margin < 0


def test_reduction_maximum():
    assert hv_reduction_max(1.0) <= 1 + 1e-12
    assert hv_reduction_max(3.0) == pytest.approx(4 / 3, rel=1e-6)


def test_horodisc_majorant_is_bounded():
    assert horodisc_majorant_max(3.0) <= 1 + 1e-9
    with pytest.raises(InapplicableError):
        horodisc_majorant_max(1.0)


@pytest.mark.parametrize("C", [1.5, 3.0, 10.0])
def test_critical_radius_zeroes_the_slope(C):
    t = majorant_critical_radius(C)
    assert 0 < t < 1
    assert majorant_profile_slope(C, t) == pytest.approx(0.0, abs=1e-12)


def test_converse_disc_radius():
    r = converse_disc_radius(0.9, 3.0)
    assert 0 < r < 1
    with pytest.raises(InapplicableError):
        converse_disc_radius(0.5, 3.0)


def test_converse_bound_for_koebe():
    report = converse_bound_check(Koebe(), "horodisc", {"a": 0.0}, depth=8)
    assert report.holds
    assert report.details["bound"] == 4.0


@pytest.mark.parametrize("criterion,alias,params", [
    ("th2-bound", "horodisc-bound", {"a": 0.0}),
    ("th3-bound", "tangent-disc-bound", {"C": 1.0}),
])
def test_converse_criteria_dispatch(criterion, alias, params):
    record = criterion_verdict(Koebe(), criterion, params=params, depth=6, sub_rings=0)
    assert record["criterion"] == criterion
    assert record["holds"]
    assert criterion_verdict(Koebe(), alias, params=params, depth=6, sub_rings=0) == record


def test_tangent_disc_bound():
    report = converse_bound_check(ExampleFamily(1.0, 1), "th3", {"C": 1.0}, depth=6)
    assert report.holds
    assert report.details["inner_radius"] == pytest.approx(0.5)
    assert report.region == {"kind": "annulus", "inner": 0.5, "outer": 1.0}


def test_converse_disc_radius_worked_value():
    assert converse_disc_radius(0.75, 1.0) == pytest.approx(0.730297, abs=1e-6)


@pytest.mark.parametrize("theta", [0.0, math.pi / 2, math.pi])
def test_horodisc_transform_stays_below_one(theta):
    report = horodisc_transform_check(ExampleFamily(3.0, -1j), 3.0, theta, depth=6)
    assert report.holds
    assert report.details["max"] <= 1 + 1e-6
    assert report.details["a"] == pytest.approx(0.9375)


def test_hv_record_fails_with_the_horodisc_chain(monkeypatch):
    failed = CriterionReport("horodisc-transform", UNIT_DISC.to_dict(), False, 0.5 + 0j, -0.1, 10)
    monkeypatch.setattr(criteria, "horodisc_transform_check", lambda *args, **kwargs: failed)
    record = criterion_verdict(ExampleFamily(3.0, -1j), "hv", params={"C": 3.0}, depth=6, sub_rings=0)
    assert record["condition"]["holds"]
    assert not record["horodisc_transform"]["holds"]
    assert not record["holds"]
def test_unknown_converse_mode():
    with pytest.raises(InapplicableError):
        converse_bound_check(Koebe(), "bieberbach", {})


def test_limsup_classifications():
    clustering = local_becker_limsup(OddPoly(2), 1)
    assert clustering["classification"] == CLUSTERING
    assert clustering["limsup_estimate"] == pytest.approx(8.0, abs=0.05)

    undecided = local_becker_limsup(NegPower(1), 1)
    assert undecided["classification"] == NO_CONCLUSION
    assert undecided["limsup_estimate"] == pytest.approx(4.0, abs=0.05)

    assert local_becker_limsup(Identity(), 1j)["classification"] == LOCALLY_UNIVALENT


def test_limsup_direction_must_be_on_the_circle():
    with pytest.raises(DomainError):
        local_becker_limsup(Koebe(), 0.5)


def test_hv_record_carries_the_majorant():
    record = criterion_verdict(ExampleFamily(3.0, -1j), "hv", params={"C": 3.0}, depth=6, sub_rings=0)
    assert record["majorant_max"] <= 1 + 1e-9
    assert record["horodisc_transform"]["holds"]
    assert record["holds"]


def test_criterion_on_a_subregion():
    record = criterion_verdict(Identity(), "becker", region=Annulus(0.5, 0.9), depth=6, sub_rings=0)
    assert record["holds"]
    assert record["region"] == {"kind": "annulus", "inner": 0.5, "outer": 0.9}
    assert record["samples_evaluated"] > 0


def test_unknown_criterion():
    with pytest.raises(InapplicableError):
        criterion_verdict(Koebe(), "bieberbach")


def test_no_collision_for_a_univalent_map():
    report = injectivity_sample(Koebe(), UNIT_DISC, n_pairs=2000, seed=3)
    assert not report.found
    assert report.pairs_tested > 0
    assert report.message == "no collision found"


def test_collision_for_the_square():
    report = injectivity_sample(Power(2), UNIT_DISC, n_pairs=2000, seed=3)
    assert report.found
    assert abs(report.z1 ** 2 - report.z2 ** 2) <= 1e-8
    assert abs(report.z1 - report.z2) > 1e-3
    assert np.isfinite(report.image_gap)
