"""Experiment command handlers"""

import logging
import os
from typing import Any, Callable, Dict, List, Optional, Tuple

import numpy as np

from config.settings import settings
from unidisc import __version__
from unidisc.analytic.codec import decode_complex, decode_expr
from unidisc.commands.parser import ExperimentConfig
from unidisc.commands.reproduce import run_experiment
from unidisc.commands.validation import config_validator
from unidisc.distortion.envelopes import (
    condition_i_estimate, condition_ii_integral, envelope_from_dict, envelope_integral, growth_bound_check,
)
from unidisc.errors import ConditionViolatedError, ConfigError, IndeterminateIntegralError, ToolkitError
from unidisc.geometry.regions import region_from_dict
from unidisc.harmonic.maps import (
    HarmonicMap, harmonic_becker_verdict, harmonic_separation_margin, image_sup, omega_map_check,
)
from unidisc.operators.norms import bloch_norm, normal_norm, norm_inequality_report, pre_schwarzian_norm, schwarzian_norm
from unidisc.storage.ledger import RunLedger
from unidisc.storage.models import RunStatus
from unidisc.univalence.criteria import criterion_verdict
from unidisc.utils.export import config_hash, write_report, write_trace_csv, write_trace_svg
from unidisc.valence.boundary import is_simple, trace_boundary
from unidisc.valence.counting import valence_estimate

logger = logging.getLogger(__name__)

EXIT_SUCCESS = 0
EXIT_FAIL = 1
EXIT_CONFIG = 2

NORM_FUNCTIONS = {
    "pre_schwarzian": pre_schwarzian_norm,
    "schwarzian": schwarzian_norm,
    "bloch": bloch_norm,
    "normal": normal_norm,
}

# (report, passed, [(kind, path, sha256), ...])
Outcome = Tuple[Dict[str, Any], bool, List[Tuple[str, str, str]]]


def _as_list(value: Any, default: List[str]) -> List[str]:
    if value is None:
        return list(default)
    return [value] if isinstance(value, str) else list(value)


def _norm_kwargs(params: Dict[str, Any]) -> Dict[str, Any]:
    kwargs = {}
    if "tol" in params:
        kwargs["tol"] = float(params["tol"])
    if "depth" in params:
        kwargs["depth"] = int(params["depth"])
    if "r_cap" in params:
        kwargs["r_cap"] = float(params["r_cap"])
    return kwargs


def _grid_kwargs(params: Dict[str, Any]) -> Dict[str, Any]:
    kwargs = {}
    if "sub_rings" in params:
        kwargs["sub_rings"] = int(params["sub_rings"])
    if "depth" in params:
        kwargs["depth"] = int(params["depth"])
    return kwargs


class ExperimentCommandHandler:
    """Handle toolkit subcommands"""

    def __init__(self, ledger: Optional[RunLedger] = None):
        """Initialize with an optional run ledger"""
        self.ledger = ledger

    def run(self, config: ExperimentConfig) -> Dict[str, Any]:
        """
        Validate a config, dispatch it and write its report

        Args:
            config: Parsed experiment configuration

        Returns:
            Response dictionary with exit_code, verdict, message, report and files
        """
        try:
            config_validator.require_valid(config)
        except ConfigError as e:
            return {"exit_code": EXIT_CONFIG, "verdict": "ERROR", "message": f"Config error: {e}",
                    "report": None, "files": []}

        handler = self._handlers()[config.command]
        record = config.to_dict()
        digest = config_hash(record)
        run = None
        if self.ledger is not None:
            run = self.ledger.start_run(config.command, record, digest, __version__,
                                        experiment=config.experiment, seed=config.seed)

        try:
            report, passed, files = handler(config)
            exit_code = EXIT_SUCCESS if passed else EXIT_FAIL
            verdict = "PASS" if passed else "FAIL"
        except ConfigError as e:
            logger.warning(f"{config.command}: config error: {e}")
            if run is not None:
                self.ledger.finish_run(run, RunStatus.ERROR, str(e))
            return {"exit_code": EXIT_CONFIG, "verdict": "ERROR", "message": f"Config error: {e}",
                    "report": None, "files": []}
        except ToolkitError as e:
            logger.warning(f"{config.command} failed: {type(e).__name__}: {e}")
            report = {"error": type(e).__name__, "message": str(e)}
            witness = getattr(e, "witness", getattr(e, "point", None))
            if witness is not None:
                report["witness"] = complex(witness)
            passed, files, exit_code, verdict = False, [], EXIT_FAIL, "FAIL"

        name = config.experiment if config.command == "reproduce" else config.command
        path = os.path.join(config.output, f"{name}.json")
        files = [("json", path, write_report(path, report, record, __version__))] + files
        if run is not None:
            for kind, file_path, sha in files:
                self.ledger.add_artifact(run, kind, file_path, sha)
            self.ledger.finish_run(run, RunStatus.PASSED if passed else RunStatus.FAILED, verdict)

        return {
            "exit_code": exit_code,
            "verdict": verdict,
            "message": f"{name}: {verdict} ({path})",
            "report": report,
            "files": [file_path for _, file_path, _ in files],
        }

    @staticmethod
    def _seed(config: ExperimentConfig) -> int:
        return settings.DEFAULT_SEED if config.seed is None else config.seed

    def _handlers(self) -> Dict[str, Callable[[ExperimentConfig], Outcome]]:
        return {
            "norms": self.handle_norms,
            "criteria": self.handle_criteria,
            "valence": self.handle_valence,
            "trace": self.handle_trace,
            "distortion": self.handle_distortion,
            "harmonic": self.handle_harmonic,
            "reproduce": self.handle_reproduce,
        }

    def handle_norms(self, config: ExperimentConfig) -> Outcome:
        """Weighted sup-norm estimates and the norm inequality report"""
        expr = decode_expr(config.map)
        kwargs = _norm_kwargs(config.params)
        report: Dict[str, Any] = {"map": config.map, "norms": {}}
        for name in _as_list(config.params.get("norms"), list(NORM_FUNCTIONS)):
            estimate = NORM_FUNCTIONS[name](expr, **kwargs)
            report["norms"][name] = estimate.to_dict()
        report["inequalities"] = norm_inequality_report(expr, **kwargs)
        report["converged"] = all(record["converged"] for record in report["norms"].values())
        if not report["converged"]:
            logger.warning("Some norm estimates did not converge on the radius ladder")
        return report, True, []

    def handle_criteria(self, config: ExperimentConfig) -> Outcome:
        """Verdicts for the selected criterion ids"""
        expr = decode_expr(config.map)
        region = region_from_dict(config.region)
        tol = config.params.get("tol")
        grid = _grid_kwargs(config.params)
        verdicts = {}
        for criterion in _as_list(config.params.get("criteria"), ["becker-z"]):
            try:
                verdicts[criterion] = criterion_verdict(expr, criterion, region, config.params, tol, **grid)
            except ConditionViolatedError as e:
                verdicts[criterion] = {"criterion": criterion, "holds": False, "error": str(e),
                                       "witness": e.witness, "margin": e.margin}
        passed = all(record.get("holds", False) for record in verdicts.values())
        return {"map": config.map, "region": region.to_dict(), "verdicts": verdicts}, passed, []

    def _trace_files(self, config: ExperimentConfig, trace, stem: str) -> List[Tuple[str, str, str]]:
        csv_path = os.path.join(config.output, f"{stem}.csv")
        svg_path = os.path.join(config.output, f"{stem}.svg")
        return [
            ("csv", csv_path, write_trace_csv(csv_path, trace.to_rows())),
            ("svg", svg_path, write_trace_svg(svg_path, trace.points)),
        ]

    def _trace(self, config: ExperimentConfig):
        expr = decode_expr(config.map)
        chord_tol = config.params.get("chord_tol")
        collar = config.params.get("collar")
        trace = trace_boundary(expr, chord_tol=chord_tol, collar=collar)
        return expr, trace

    def handle_trace(self, config: ExperimentConfig) -> Outcome:
        """Boundary trace export with the simpleness verdict"""
        expr, trace = self._trace(config)
        simple = is_simple(trace, expr)
        files = self._trace_files(config, trace, "trace")
        return {"map": config.map, "trace": trace.summary(), "simple": simple}, True, files

    def handle_valence(self, config: ExperimentConfig) -> Outcome:
        """Trace export, simpleness and valence by every requested method"""
        expr, trace = self._trace(config)
        simple = is_simple(trace, expr)
        w = decode_complex(config.params["w"], "params.w") if "w" in config.params else None
        default_methods = ["winding", "sign-count"] + (["preimage"] if w is not None else [])
        estimates = {}
        for method in _as_list(config.params.get("methods"), default_methods):
            estimates[method] = valence_estimate(expr, method, trace=trace, w=w, seed=self._seed(config)).to_dict()

        values = {method: record["value"] for method, record in estimates.items() if method != "sign-count"}
        agree = len(set(values.values())) <= 1
        if not agree:
            logger.warning(f"Valence methods disagree: {values}")
        files = self._trace_files(config, trace, "valence_trace")
        report = {
            "map": config.map,
            "trace": trace.summary(),
            "simple": simple,
            "estimates": estimates,
            "methods_agree": agree,
        }
        return report, True, files

    def handle_distortion(self, config: ExperimentConfig) -> Outcome:
        """Both envelope conditions, envelope integrals and an optional growth check"""
        params = config.params
        env = envelope_from_dict(params["envelope"])
        report: Dict[str, Any] = {"envelope": env.to_dict(), "condition_i": condition_i_estimate(env)}
        try:
            report["condition_ii"] = condition_ii_integral(env, float(params.get("tol", 1e-8)))
        except IndeterminateIntegralError as e:
            logger.warning(f"Condition (ii) indeterminate: {e}")
            report["condition_ii"] = {"convergent": False, "divergent": False, "indeterminate": True,
                                      "message": str(e)}
        r_list = params.get("r_list", [])
        report["integrals"] = [(float(r), envelope_integral(env, float(r))) for r in r_list if r >= env.start]

        passed = True
        if config.map is not None and "zeta" in params and r_list:
            expr = decode_expr(config.map)
            zeta = decode_complex(params["zeta"], "params.zeta")
            rho = float(params.get("rho", env.start))
            check = growth_bound_check(expr, env, zeta, rho, r_list)
            report["growth"] = check
            passed = bool(check["holds"])
        return report, passed, []

    def handle_harmonic(self, config: ExperimentConfig) -> Outcome:
        """Harmonic Becker verdict, Omega-map check and image size of f = h + conj(g)"""
        hmap = HarmonicMap.from_dict(config.map)
        region = region_from_dict(config.region)
        params = config.params
        verdict = harmonic_becker_verdict(hmap, region, params.get("tol"), **_grid_kwargs(params))
        report: Dict[str, Any] = {
            "map": hmap.to_dict(),
            "becker": verdict.to_dict(),
            "omega_map": omega_map_check(hmap, decode_complex(params.get("z0", 0), "params.z0"),
                                         int(params.get("samples", 4096)), self._seed(config)),
            "image": image_sup(hmap, float(params.get("r_max", 0.999))),
        }
        if "C" in params:
            points = region.sample(int(params.get("samples", 4096)), self._seed(config), method="halton")
            margins = harmonic_separation_margin(hmap, float(params["C"]), points,
                                                 params.get("delta0"), params.get("exponent"))
            k = int(np.argmin(margins))
            report["separation_margin"] = {"min": float(margins[k]), "at": complex(points[k]),
                                           "label_only": True}
        return report, verdict.holds, []

    def handle_reproduce(self, config: ExperimentConfig) -> Outcome:
        """Canned experiment with PASS/FAIL checks"""
        result = run_experiment(config.experiment, self._seed(config))
        return result.to_dict(), result.passed, []


# Helper function to get handler
def get_experiment_handler(ledger: Optional[RunLedger] = None) -> ExperimentCommandHandler:
    """Get an experiment command handler instance"""
    return ExperimentCommandHandler(ledger)
