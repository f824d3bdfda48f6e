import os

import pytest

from unidisc.commands.handlers import EXIT_CONFIG, EXIT_FAIL, EXIT_SUCCESS
from unidisc.commands.parser import ConfigParser, ExperimentConfig
from unidisc.commands.validation import ConfigValidator, DescriptorValidator, ParameterValidator
from unidisc.errors import ConfigError
from unidisc.storage.models import RunStatus


@pytest.fixture
def parser():
    return ConfigParser()


def build(parser, command, overrides, output_dir, **kwargs):
    return parser.build(command, overrides=overrides, output_dir=output_dir, **kwargs)


class TestConfigParser:

    def test_overrides_are_read_as_json(self, parser):
        overrides = parser.parse_overrides(["map.kind:example", "map.C:2.21", 'map.zeta:"-i"', "params.tol:1e-6"])
        assert overrides == {"map.kind": "example", "map.C": 2.21, "map.zeta": "-i", "params.tol": 1e-6}

    def test_quoted_values_keep_spaces(self, parser):
        assert parser.parse_overrides(['params.label:"two words"']) == {"params.label": "two words"}

    def test_override_without_colon(self, parser):
        with pytest.raises(ConfigError):
            parser.parse_overrides(["nocolon"])

    def test_json_errors_carry_the_line(self, parser):
        with pytest.raises(ConfigError) as info:
            parser.parse_text('{\n  "command": "norms",\n  "map": }')
        assert info.value.line == 3

    def test_non_object_document(self, parser):
        with pytest.raises(ConfigError):
            parser.parse_text("[1, 2]")

    def test_apply_overrides_builds_nested_objects(self, parser):
        record = {"map": {"kind": "koebe"}}
        result = parser.apply_overrides(record, {"params.envelope.kind": "rational", "map.kind": "identity"})
        assert result == {"map": {"kind": "identity"}, "params": {"envelope": {"kind": "rational"}}}
        assert record == {"map": {"kind": "koebe"}}

    def test_apply_overrides_through_a_scalar(self, parser):
        with pytest.raises(ConfigError):
            parser.apply_overrides({"map": "koebe"}, {"map.kind": "identity"})

    def test_build_writes_the_default_seed(self, parser, tmp_path):
        path = tmp_path / "config.json"
        path.write_text('{"map": {"kind": "koebe"}, "command": "trace"}')
        config = parser.build("norms", path=str(path), overrides=["params.depth:6"])
        assert config.command == "norms"
        assert config.seed == parser.default_seed
        assert config.params == {"depth": 6}
        assert config.to_dict()["seed"] == parser.default_seed

    def test_params_must_be_an_object(self):
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"command": "norms", "params": [1]})


class TestConfigValidator:

    def test_descriptors(self):
        assert DescriptorValidator.validate_map({"kind": "koebe"}) == (True, None)
        valid, error = DescriptorValidator.validate_map({"kind": "weierstrass"})
        assert not valid
        assert "[kind]" in error
        assert not DescriptorValidator.validate_map(None)[0]
        assert DescriptorValidator.validate_map({"h": {"kind": "identity"}}, harmonic=True) == (True, None)

    def test_parameters(self):
        validator = ParameterValidator()
        assert validator.validate("norms", {"tol": 1e-6}) == (True, None)
        assert not validator.validate("norms", {"tol": -1})[0]
        assert not validator.validate("criteria", {"criteria": ["hv"]})[0]
        assert not validator.validate("criteria", {"criteria": "bieberbach"})[0]
        assert validator.validate("criteria", {"criteria": ["th2-bound", "horodisc-bound"]}) == (True, None)
        valid, error = validator.validate("criteria", {"criteria": ["th3-bound", "tangent-disc-bound"]})
        assert not valid
        assert "th3-bound" in error
        assert validator.validate("criteria", {"criteria": ["th3-bound"], "C": 1.0}) == (True, None)
        assert not validator.validate("valence", {"methods": ["preimage"]})[0]
        assert not validator.validate("distortion", {})[0]
        assert not validator.validate("distortion", {"envelope": {"kind": "rational"}, "r_list": [1.5]})[0]

    def test_configs(self):
        validator = ConfigValidator()
        assert not validator.validate_config(ExperimentConfig("integrate"))[0]
        assert not validator.validate_config(ExperimentConfig("reproduce", experiment="unknown"))[0]
        assert validator.validate_config(ExperimentConfig("reproduce", experiment="harmonic-reduction"))[0]
        assert not validator.validate_config(ExperimentConfig("norms", map={"kind": "koebe"}, seed=-1))[0]
        distortion = ExperimentConfig("distortion", params={"envelope": {"kind": "rational", "B": 2}})
        assert validator.validate_config(distortion) == (True, None)
        with pytest.raises(ConfigError):
            validator.require_valid(ExperimentConfig("criteria", map={"kind": "mobius", "a": [2, 0]}))


class TestExperimentCommandHandler:

    def test_norms_report_is_reproducible(self, handler, ledger, parser, output_dir):
        config = build(parser, "norms", ["map.kind:identity", "params.depth:6"], output_dir)
        first = handler.run(config)
        assert first["exit_code"] == EXIT_SUCCESS
        assert first["verdict"] == "PASS"
        path = os.path.join(output_dir, "norms.json")
        assert first["files"] == [path]
        with open(path, "rb") as handle:
            payload = handle.read()

        handler.run(config)
        with open(path, "rb") as handle:
            assert handle.read() == payload

        runs = ledger.recent_runs(2)
        assert [run.status for run in runs] == [RunStatus.PASSED, RunStatus.PASSED]
        assert runs[0].config_hash == runs[1].config_hash
        assert [artifact.path for artifact in runs[0].artifacts] == [path]

    def test_bad_map_is_a_config_error(self, handler, parser, output_dir):
        response = handler.run(build(parser, "norms", ["map.kind:weierstrass"], output_dir))
        assert response["exit_code"] == EXIT_CONFIG
        assert response["report"] is None
        assert not os.path.exists(output_dir)

    def test_failing_criterion(self, handler, parser, output_dir):
        response = handler.run(build(parser, "criteria", ["map.kind:koebe", "params.depth:6"], output_dir))
        assert response["exit_code"] == EXIT_FAIL
        assert not response["report"]["verdicts"]["becker-z"]["holds"]

    def test_violated_growth_condition_is_reported(self, handler, parser, output_dir):
        overrides = ["map.kind:koebe", 'params.criteria:["hv"]', "params.C:0.5", "params.depth:6"]
        response = handler.run(build(parser, "criteria", overrides, output_dir))
        assert response["exit_code"] == EXIT_FAIL
        assert response["report"]["verdicts"]["hv"]["witness"] is not None

    def test_distortion_without_a_map(self, handler, parser, output_dir):
        overrides = ["params.envelope.kind:rational", "params.envelope.B:2", "params.r_list:[0.5,0.9]"]
        response = handler.run(build(parser, "distortion", overrides, output_dir))
        assert response["exit_code"] == EXIT_SUCCESS
        report = response["report"]
        assert report["condition_i"]["finite"]
        assert report["condition_ii"]["divergent"]
        assert len(report["integrals"]) == 2

    def test_degenerate_harmonic_map(self, handler, parser, output_dir):
        overrides = ["map.h.kind:identity", "map.g.kind:affine", "map.g.a:0", "map.g.b:2", "params.depth:6",
                     "params.samples:256"]
        response = handler.run(build(parser, "harmonic", overrides, output_dir))
        assert response["exit_code"] == EXIT_FAIL
        assert "error" in response["report"]["becker"]["details"]
        assert response["report"]["omega_map"]["flagged"]

    def test_valence_of_the_identity(self, handler, parser, output_dir):
        overrides = ["map.kind:identity", 'params.methods:["sign-count","preimage"]', "params.w:0.25"]
        response = handler.run(build(parser, "valence", overrides, output_dir))
        assert response["exit_code"] == EXIT_SUCCESS
        estimates = response["report"]["estimates"]
        assert estimates["sign-count"]["value"] == 1
        assert estimates["preimage"]["value"] == 1
        assert response["report"]["methods_agree"]
        assert os.path.join(output_dir, "valence_trace.csv") in response["files"]
        assert os.path.join(output_dir, "valence_trace.svg") in response["files"]

    def test_reproduce_writes_a_named_report(self, handler, parser, output_dir):
        config = build(parser, "reproduce", [], output_dir, experiment="harmonic-reduction")
        response = handler.run(config)
        assert response["verdict"] == "PASS"
        assert response["files"] == [os.path.join(output_dir, "harmonic-reduction.json")]
