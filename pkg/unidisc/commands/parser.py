"""Experiment configuration parsing"""

import copy
import json
import logging
import re
from dataclasses import dataclass, field
from typing import Any, Dict, Iterable, List, Optional

from config.settings import settings
from unidisc.errors import ConfigError

logger = logging.getLogger(__name__)

COMMANDS = ("norms", "criteria", "valence", "distortion", "harmonic", "reproduce", "trace")


@dataclass
class ExperimentConfig:
    """One experiment: a command, a map descriptor, a region and numeric parameters"""
    command: str
    map: Optional[Dict[str, Any]] = None
    region: Optional[Dict[str, Any]] = None
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None
    experiment: Optional[str] = None
    output_dir: Optional[str] = None

    def to_dict(self) -> Dict[str, Any]:
        """Serializable form; output_dir is left out so the hash only covers the computation"""
        record = {"command": self.command, "params": self.params}
        if self.map is not None:
            record["map"] = self.map
        if self.region is not None:
            record["region"] = self.region
        if self.seed is not None:
            record["seed"] = self.seed
        if self.experiment is not None:
            record["experiment"] = self.experiment
        return record

    @property
    def output(self) -> str:
        return self.output_dir or settings.OUTPUT_DIR

    @classmethod
    def from_dict(cls, record: Dict[str, Any]) -> "ExperimentConfig":
        params = record.get("params", {})
        if not isinstance(params, dict):
            raise ConfigError("'params' must be an object", field="params")
        return cls(
            command=record.get("command"),
            map=record.get("map"),
            region=record.get("region"),
            params=params,
            seed=record.get("seed"),
            experiment=record.get("experiment"),
            output_dir=record.get("output_dir"),
        )


class ConfigParser:
    """Read JSON experiment configs and apply key:value overrides"""

    def __init__(self):
        """Initialize config parser"""
        self.default_seed = settings.DEFAULT_SEED

    def parse_text(self, text: str) -> Dict[str, Any]:
        """
        Parse a JSON config document

        Raises:
            ConfigError: malformed JSON (with line number) or a non-object document
        """
        try:
            record = json.loads(text)
        except json.JSONDecodeError as e:
            raise ConfigError(f"Config is not valid JSON: {e.msg} (line {e.lineno}, column {e.colno})",
                              line=e.lineno)
        if not isinstance(record, dict):
            raise ConfigError("Config must be a JSON object")
        return record

    def load(self, path: str) -> Dict[str, Any]:
        try:
            with open(path, "r", encoding="utf-8") as handle:
                text = handle.read()
        except OSError as e:
            raise ConfigError(f"Cannot read config {path}: {e}")
        logger.debug(f"Loaded config from {path}")
        return self.parse_text(text)

    def parse_overrides(self, pairs: Iterable[str]) -> Dict[str, Any]:
        """
        Parse key:value overrides

        Example: map.kind:example map.C:2.21 map.zeta:"-i" params.tol:1e-6

        Values are read as JSON when they parse, else kept as strings.
        """
        overrides = {}
        for text in pairs:
            matches = self._parse_key_value_args(text)
            if not matches:
                raise ConfigError(f"Override '{text}' is not of the form key:value", field=text)
            for key, value in matches.items():
                overrides[key] = self._coerce(value)
        return overrides

    def _parse_key_value_args(self, text: str) -> Dict[str, str]:
        args = {}
        # Dotted keys; quoted values may hold spaces and colons
        pattern = r'([\w.]+):(?:(".*?")|([^\s]+))'
        for match in re.findall(pattern, text):
            key = match[0]
            value = match[1] or match[2]
            if value.startswith('"') and value.endswith('"'):
                value = value[1:-1]
            args[key] = value
        return args

    @staticmethod
    def _coerce(value: str) -> Any:
        try:
            return json.loads(value)
        except json.JSONDecodeError:
            return value

    def apply_overrides(self, record: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
        """Copy of the record with each dotted key set, creating objects on the way"""
        result = copy.deepcopy(record)
        for dotted, value in overrides.items():
            keys = dotted.split(".")
            node = result
            for key in keys[:-1]:
                child = node.get(key)
                if child is None:
                    child = node[key] = {}
                elif not isinstance(child, dict):
                    raise ConfigError(f"Cannot set '{dotted}': '{key}' is not an object", field=dotted)
                node = child
            node[keys[-1]] = value
        return result

    def build(self, command: str, path: Optional[str] = None, overrides: Optional[List[str]] = None,
              experiment: Optional[str] = None, output_dir: Optional[str] = None) -> ExperimentConfig:
        """
        Assemble the config of one subcommand

        Args:
            command: Subcommand name; wins over a 'command' field in the file
            path: Optional JSON config file
            overrides: key:value strings applied after the file
            experiment: Canned experiment id (reproduce only)
            output_dir: Report directory (settings.OUTPUT_DIR by default)

        Returns:
            ExperimentConfig
        """
        record = self.load(path) if path else {}
        record = self.apply_overrides(record, self.parse_overrides(overrides or []))
        record["command"] = command
        if experiment is not None:
            record["experiment"] = experiment
        if output_dir is not None:
            record["output_dir"] = output_dir
        if record.get("seed") is None:
            # Written into the config so the hash records it
            record["seed"] = self.default_seed
            logger.info(f"No seed given, using {self.default_seed}")
        return ExperimentConfig.from_dict(record)


# Global parser instance
config_parser = ConfigParser()
