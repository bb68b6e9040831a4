"""
Fusion Configuration System

Manages numeric tolerances, stochastic budgets and output settings for the
fusion toolkit. Defaults live in this module; fusion_config.template.json and
fusion_config.local.json are merged on top, followed by environment overrides.
"""

import copy
import os
import json
import logging
from pathlib import Path
from typing import Dict, Any, Optional

try:
    from dotenv import load_dotenv
    load_dotenv()
except ImportError:
    pass  # dotenv not available, environment should be set manually

logger = logging.getLogger(__name__)

_REPO_ROOT = Path(__file__).resolve().parent.parent


class FusionConfig:
    """Fusion toolkit configuration manager"""

    SOLVER_CONFIG = {
        "feasibility_tol": 1e-9,
        "optimality_tol": 1e-7,
        "max_iter": 10000,
        "brent_tol": 1e-8,
        "qn_reltol": 1e-16,
        "qn_maxiter": 10000,
        "lad_restarts": 10
    }

    GA_CONFIG = {
        "population_factor": 8,
        "iterations": 2000,
        "mutation_rate": 0.001
    }

    EXEMPLAR_CONFIG = {
        "k": 5,
        "restarts": 15,
        "exhaustive_below": 50,
        "cache_limit": 2000
    }

    MONTE_CARLO_CONFIG = {
        "samples": 100000,
        "breakdown_magnitude": 1e12
    }

    OUTPUT_CONFIG = {
        "format": "json",
        "significant_digits": 17
    }

    LOGGING_CONFIG = {
        "level": "WARNING"
    }

    SECTIONS = ("solver", "ga", "exemplar", "monte_carlo", "output", "logging")

    def __init__(self, template_file: Optional[str] = None, local_file: Optional[str] = None):
        self.template_file = Path(template_file) if template_file else _REPO_ROOT / "fusion_config.template.json"
        env_local = os.getenv("FUSIONKIT_CONFIG")
        self.local_file = Path(local_file or env_local or _REPO_ROOT / "fusion_config.local.json")
        self.config = self._load_config()

    def _defaults(self) -> Dict[str, Any]:
        return {
            "solver": copy.deepcopy(self.SOLVER_CONFIG),
            "ga": copy.deepcopy(self.GA_CONFIG),
            "exemplar": copy.deepcopy(self.EXEMPLAR_CONFIG),
            "monte_carlo": copy.deepcopy(self.MONTE_CARLO_CONFIG),
            "output": copy.deepcopy(self.OUTPUT_CONFIG),
            "logging": copy.deepcopy(self.LOGGING_CONFIG),
            "seed": None
        }

    def _load_config(self) -> Dict[str, Any]:
        """Load configuration from defaults, template, local file and environment"""
        config = self._defaults()

        for path, label in ((self.template_file, "template"), (self.local_file, "local")):
            if not path.exists():
                continue
            try:
                with open(path, 'r') as f:
                    loaded = json.load(f)
                config = self._merge_with_defaults(config, loaded)
                logger.info(f"Loaded {label} config from {path}")
            except Exception as e:
                logger.warning(f"Failed to load {label} config {path}: {e}")

        level = os.getenv("FUSIONKIT_LOG_LEVEL")
        if level:
            config["logging"]["level"] = level.upper()
        seed = os.getenv("FUSIONKIT_SEED")
        if seed:
            try:
                config["seed"] = int(seed)
            except ValueError:
                logger.warning(f"Ignoring non-integer FUSIONKIT_SEED: {seed}")

        return config

    def _merge_with_defaults(self, base: Dict[str, Any], overrides: Dict[str, Any]) -> Dict[str, Any]:
        """Merge a loaded config section by section"""
        merged = copy.deepcopy(base)
        for section in self.SECTIONS:
            if section in overrides and isinstance(overrides[section], dict):
                merged[section].update(overrides[section])
        if "seed" in overrides:
            merged["seed"] = overrides["seed"]
        return merged

    def get(self, section: str, key: str) -> Any:
        """Get a single setting"""
        return self.config[section][key]

    def get_solver_config(self) -> Dict[str, Any]:
        return self.config["solver"]

    def get_ga_config(self) -> Dict[str, Any]:
        return self.config["ga"]

    def get_exemplar_config(self) -> Dict[str, Any]:
        return self.config["exemplar"]

    def get_monte_carlo_config(self) -> Dict[str, Any]:
        return self.config["monte_carlo"]

    def get_output_config(self) -> Dict[str, Any]:
        return self.config["output"]

    def get_default_seed(self) -> Optional[int]:
        return self.config.get("seed")

    def save_config(self) -> bool:
        """Save the current settings to the local file"""
        try:
            with open(self.local_file, 'w') as f:
                json.dump(self.config, f, indent=2, sort_keys=True)
            logger.info(f"Saved config to {self.local_file}")
            return True
        except Exception as e:
            logger.error(f"Failed to save local config: {e}")
            return False

    def validate(self) -> Dict[str, Any]:
        """Validate tolerance settings and return status"""
        solver = self.config["solver"]
        for key in ("feasibility_tol", "optimality_tol", "brent_tol", "qn_reltol"):
            value = solver.get(key)
            if not isinstance(value, (int, float)) or value <= 0:
                return {"valid": False, "error": f"solver.{key} must be a positive number"}
        if solver["feasibility_tol"] > solver["optimality_tol"]:
            return {"valid": False, "error": "solver.feasibility_tol must not exceed solver.optimality_tol"}
        for section, key in (("ga", "iterations"), ("ga", "population_factor"),
                             ("exemplar", "k"), ("exemplar", "restarts"),
                             ("monte_carlo", "samples"), ("solver", "max_iter")):
            value = self.config[section].get(key)
            if not isinstance(value, int) or value < 1:
                return {"valid": False, "error": f"{section}.{key} must be a positive integer"}
        if self.config["output"].get("format") not in ("json", "csv"):
            return {"valid": False, "error": "output.format must be json or csv"}
        return {"valid": True}


# Global configuration instance
_config_instance = None


def get_fusion_config() -> FusionConfig:
    """Get global fusion configuration instance"""
    global _config_instance
    if _config_instance is None:
        _config_instance = FusionConfig()
    return _config_instance


def reload_fusion_config() -> FusionConfig:
    """Reload fusion configuration from files and environment"""
    global _config_instance
    _config_instance = None
    return get_fusion_config()
