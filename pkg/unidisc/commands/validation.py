"""Validation of experiment configurations"""

import logging
import math
from typing import Any, Dict, Optional, Tuple

from unidisc.analytic.codec import decode_complex, decode_expr
from unidisc.commands.parser import COMMANDS, ExperimentConfig
from unidisc.commands.reproduce import EXPERIMENT_RUNNERS
from unidisc.distortion.envelopes import envelope_from_dict
from unidisc.errors import ConfigError
from unidisc.geometry.regions import region_from_dict
from unidisc.harmonic.maps import HarmonicMap
from unidisc.univalence.criteria import CONVERSE_CRITERIA

logger = logging.getLogger(__name__)

CRITERIA = ("becker", "becker-z", "nehari", "hv") + tuple(CONVERSE_CRITERIA)
NORMS = ("pre_schwarzian", "schwarzian", "bloch", "normal")
VALENCE_METHODS = ("winding", "sign-count", "preimage")
EXPERIMENTS = tuple(EXPERIMENT_RUNNERS)


def _failure(error: ConfigError) -> Tuple[bool, Optional[str]]:
    where = f" [{error.field}]" if error.field else ""
    return False, f"{error}{where}"


class DescriptorValidator:
    """Validate map, region and envelope descriptors"""

    @staticmethod
    def validate_map(record: Any, harmonic: bool = False) -> Tuple[bool, Optional[str]]:
        """
        Check that a map descriptor decodes

        Args:
            record: JSON descriptor
            harmonic: Expect an {"h": ..., "g": ...} pair

        Returns:
            Tuple of (is_valid, error_message)
        """
        if record is None:
            return False, "Missing map descriptor [map]"
        try:
            if harmonic:
                HarmonicMap.from_dict(record)
            else:
                decode_expr(record)
        except ConfigError as e:
            return _failure(e)
        return True, None

    @staticmethod
    def validate_region(record: Any) -> Tuple[bool, Optional[str]]:
        try:
            region_from_dict(record)
        except ConfigError as e:
            return _failure(e)
        return True, None

    @staticmethod
    def validate_envelope(record: Any) -> Tuple[bool, Optional[str]]:
        try:
            envelope_from_dict(record)
        except ConfigError as e:
            return _failure(e)
        return True, None


class ParameterValidator:
    """Validate numeric parameters per command"""

    @staticmethod
    def _positive(params: Dict[str, Any], key: str) -> Tuple[bool, Optional[str]]:
        if key not in params:
            return True, None
        value = params[key]
        if not isinstance(value, (int, float)) or isinstance(value, bool) or not value > 0 or not math.isfinite(value):
            return False, f"params.{key} must be a positive number, got {value!r}"
        return True, None

    @staticmethod
    def _choices(params: Dict[str, Any], key: str, allowed: Tuple[str, ...]) -> Tuple[bool, Optional[str]]:
        chosen = params.get(key)
        if chosen is None:
            return True, None
        if isinstance(chosen, str):
            chosen = [chosen]
        for item in chosen:
            if item not in allowed:
                return False, f"Unknown {key} entry '{item}' (choose from {', '.join(allowed)})"
        return True, None

    def validate(self, command: str, params: Dict[str, Any]) -> Tuple[bool, Optional[str]]:
        for key in ("tol", "C", "chord_tol", "collar", "n_pairs", "samples"):
            valid, error = self._positive(params, key)
            if not valid:
                return valid, error

        if command == "norms":
            return self._choices(params, "norms", NORMS)
        if command == "criteria":
            valid, error = self._choices(params, "criteria", CRITERIA)
            if not valid:
                return valid, error
            chosen = params.get("criteria", ["becker-z"])
            chosen = [chosen] if isinstance(chosen, str) else chosen
            needs_C = [name for name in chosen if name == "hv" or CONVERSE_CRITERIA.get(name) == "th3"]
            if needs_C and "C" not in params:
                return False, f"Criteria {', '.join(needs_C)} need params.C"
            return True, None
        if command == "valence":
            valid, error = self._choices(params, "methods", VALENCE_METHODS)
            if not valid:
                return valid, error
            methods = params.get("methods", [])
            if "preimage" in methods and "w" not in params:
                return False, "Valence method 'preimage' needs a target params.w"
            if "w" in params:
                try:
                    decode_complex(params["w"], "params.w")
                except ConfigError as e:
                    return _failure(e)
            return True, None
        if command == "distortion":
            if "envelope" not in params:
                return False, "Missing envelope descriptor [params.envelope]"
            valid, error = DescriptorValidator.validate_envelope(params["envelope"])
            if not valid:
                return valid, error
            for r in params.get("r_list", []):
                if not isinstance(r, (int, float)) or not 0 <= r < 1:
                    return False, f"params.r_list entries must lie in [0, 1), got {r!r}"
            return True, None
        return True, None


class ConfigValidator:
    """Main config validation system"""

    def __init__(self):
        self.descriptor_validator = DescriptorValidator()
        self.parameter_validator = ParameterValidator()

    def validate_config(self, config: ExperimentConfig) -> Tuple[bool, Optional[str]]:
        """
        Validate an experiment configuration

        Args:
            config: Parsed configuration

        Returns:
            Tuple of (is_valid, error_message)
        """
        if config.command not in COMMANDS:
            return False, f"Unknown command '{config.command}'"
        if config.seed is not None and (not isinstance(config.seed, int) or isinstance(config.seed, bool)
                                        or config.seed < 0):
            return False, f"seed must be a non-negative integer, got {config.seed!r}"

        if config.command == "reproduce":
            if config.experiment not in EXPERIMENTS:
                return False, f"Unknown experiment '{config.experiment}' (choose from {', '.join(EXPERIMENTS)})"
            return True, None

        map_required = config.command != "distortion" or "zeta" in config.params
        if map_required or config.map is not None:
            valid, error = self.descriptor_validator.validate_map(config.map, harmonic=config.command == "harmonic")
            if not valid:
                return valid, error
        valid, error = self.descriptor_validator.validate_region(config.region)
        if not valid:
            return valid, error
        return self.parameter_validator.validate(config.command, config.params)

    def require_valid(self, config: ExperimentConfig) -> ExperimentConfig:
        """Return the config or raise ConfigError with the validation message"""
        valid, error = self.validate_config(config)
        if not valid:
            logger.warning(f"Invalid {config.command} config: {error}")
            raise ConfigError(error)
        return config


# Global validator instance
config_validator = ConfigValidator()


def get_config_validator() -> ConfigValidator:
    """Get the config validator instance"""
    return config_validator
