import pytest

from unidisc.commands.reproduce import EXPERIMENT_RUNNERS, Check, ExperimentResult, bounded_ratio, run_experiment
from unidisc.errors import ConfigError


def checks_by_name(result):
    return {check.name: check for check in result.checks}


@pytest.mark.parametrize("experiment", [
    "harmonic-reduction",
    "distortion-envelopes",
    "sharp-bounds",
    "koebe-extremal",
    pytest.param("horodisc", marks=pytest.mark.slow),
    pytest.param("carleson-profile", marks=pytest.mark.slow),
    pytest.param("critical-C", marks=pytest.mark.slow),
    pytest.param("valence-sweep", marks=pytest.mark.slow),
])
def test_experiments_pass(experiment):
    result = run_experiment(experiment, seed=11)
    failed = [check.name for check in result.checks if not check.passed]
    assert result.passed, failed
    assert result.to_dict()["verdict"] == "PASS"


def test_koebe_extremal_values():
    checks = checks_by_name(run_experiment("koebe-extremal", seed=11))
    assert checks["max |nehari(k, x) - 6| on real points"].value <= 1e-10
    assert checks["||P(k)||"].value == pytest.approx(6.0, abs=1e-2)


@pytest.mark.slow
def test_critical_constant_lies_in_range():
    result = run_experiment("critical-C", seed=11)
    assert 2.16 <= checks_by_name(result)["critical C for zeta = -i"].value <= 2.26
    simple = [check.value for check in result.checks if check.name.startswith("boundary simple")]
    assert simple == [True, False, False]


@pytest.mark.slow
def test_valence_sweep_values():
    checks = checks_by_name(run_experiment("valence-sweep", seed=11))
    assert checks["valence at C=1"].value == 1
    assert checks["valence at C=2.5"].value >= 2
    assert checks["least-squares slope"].informational


@pytest.mark.slow
def test_horodisc_values():
    checks = checks_by_name(run_experiment("horodisc", seed=11))
    for C in (1.5, 2.0, 3.0, 5.0, 10.0, 50.0):
        assert checks[f"horodisc majorant max, C={C}"].value <= 1 + 1e-9
    collisions = [check for name, check in checks.items() if name.startswith("collision in horodisc")]
    assert len(collisions) == 3
    assert not any(check.value for check in collisions)


@pytest.mark.parametrize("earlier,later,bounded", [
    (1.0, 1.5, True),
    (1.0, 2.0, False),
    (2.0, 0.9, False),
    (0.0, 0.0, True),
    (0.0, 1.0, False),
    (1.0, 0.0, False),
])
def test_profile_ratio_is_two_sided(earlier, later, bounded):
    assert bounded_ratio(earlier, later) is bounded


def test_informational_checks_do_not_decide():
    result = ExperimentResult("demo", [Check("slope", 1.2, "reference 1.59", False, informational=True)])
    assert result.passed


def test_every_experiment_has_a_runner():
    assert set(EXPERIMENT_RUNNERS) == {
        "sharp-bounds", "koebe-extremal", "critical-C", "valence-sweep", "horodisc", "distortion-envelopes",
        "harmonic-reduction", "carleson-profile",
    }


def test_unknown_experiment():
    with pytest.raises(ConfigError):
        run_experiment("bieberbach")
