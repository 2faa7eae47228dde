import os
import sys
import json
import logging
from typing import Optional, Dict, Any, List, Mapping

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from rfm import constants
from rfm.exceptions import RfmError

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

logger = logging.getLogger(__name__)

# Base paths - project root (parent of src/)
BASE_DIR = os.path.dirname(os.path.dirname(os.path.dirname(os.path.abspath(__file__))))
RESOURCES_DIR = os.path.join(BASE_DIR, 'resources')
CONFIGS_DIR = os.path.join(RESOURCES_DIR, 'configs')
RUNS_DIR = os.path.join(BASE_DIR, 'runs')

SEED_ENV_VAR = "AFCM_SEED"

# Artifact names
REPORT_FILE = "report.json"
TIMINGS_FILE = "timings.json"
ERRORS_FILE = "errors.csv"
SOLUTION_FILE = "solution.npz"
ADAPTATION_DIR = "adaptation"


class ConfigError(RfmError):
    """Configuration file cannot be read or holds invalid values."""
    phase = "config"


DEFAULT_SETTINGS: Dict[str, Any] = {
    "problem": "poisson_one_peak",
    # partition and discretization
    "nx": constants.DEFAULT_NX,
    "ny": constants.DEFAULT_NY,
    "J_n": constants.DEFAULT_FEATURES_PER_SUBDOMAIN,
    "qx": constants.DEFAULT_QX,
    "qy": constants.DEFAULT_QY,
    "I_n": None,
    # least squares
    "c": constants.RESCALE_CONSTANT,
    "rank_tol": constants.RANK_TOL,
    # adaptive loop
    "K": constants.ADAPT_ITERATIONS,
    "m": 1_260_000,
    "c1": constants.MONITOR_SMOOTHING,
    "c2": constants.SHAPE_SMOOTHING,
    "tau": constants.DENSITY_BANDWIDTH,
    "early_stop": False,
    # shape calibration
    "eta": constants.GRF_ETA,
    "L": constants.GRF_REALIZATIONS,
    "gamma_grid": list(constants.GAMMA_GRID),
    "grf_jitter": constants.GRF_JITTER,
    "grf_max_points": constants.GRF_MAX_POINTS,
    "shared_calibration": True,
    "workers": 1,
    # nonlinear and time-dependent problems
    "epsilon": 0.006,
    "picard_iterations": constants.PICARD_ITERATIONS,
    "picard_relaxation": 1.0,
    "picard_tol": None,
    "dt": 0.2,
    "N": 10,
    "alpha": 1000.0,
    # reporting
    "seed": 0,
    "eval_resolution": constants.EVAL_RESOLUTION,
    "density_resolution": constants.DENSITY_RESOLUTION,
    "field_resolution": constants.FIELD_RESOLUTION,
    "export_fields": True,
    "output_dir": RUNS_DIR,
}


class ExperimentConfig(BaseModel):
    """Fully resolved experiment configuration; every field has a default."""

    model_config = ConfigDict(extra="forbid")

    problem: str = Field(..., description="Registered problem name")
    nx: int = Field(..., gt=0, description="Subdomains along x")
    ny: int = Field(..., gt=0, description="Subdomains along y")
    J_n: int = Field(..., gt=0, description="Features per subdomain")
    qx: int = Field(..., ge=2, description="Collocation grid points per subdomain along x")
    qy: int = Field(..., ge=2, description="Collocation grid points per subdomain along y")
    I_n: Optional[int] = Field(None, gt=0, description="Interior points per subdomain; (qx-2)(qy-2) when unset")
    c: float = Field(..., gt=0, description="Row rescaling constant")
    rank_tol: float = Field(..., gt=0, description="Relative singular value cutoff")
    K: int = Field(..., ge=0, description="Adaptive iterations")
    m: int = Field(..., gt=0, description="Monitor sample count")
    c1: float = Field(..., gt=0, description="Monitor smoothing constant")
    c2: float = Field(..., gt=0, description="Shape amplification smoothing constant")
    tau: float = Field(..., gt=0, lt=1, description="Hyperplane density bandwidth")
    early_stop: bool = False
    eta: float = Field(..., gt=0, description="GRF correlation length")
    L: int = Field(..., gt=0, description="GRF realizations")
    gamma_grid: List[float] = Field(..., min_length=1, description="Candidate shape parameters")
    grf_jitter: float = Field(..., gt=0)
    grf_max_points: int = Field(..., ge=4)
    shared_calibration: bool = True
    workers: int = Field(1, ge=1)
    epsilon: float = Field(..., gt=0, description="Burgers viscosity")
    picard_iterations: int = Field(..., ge=1)
    picard_relaxation: float = Field(..., gt=0, le=1)
    picard_tol: Optional[float] = Field(None, gt=0)
    dt: float = Field(..., gt=0)
    N: int = Field(..., gt=0, description="Time steps")
    alpha: float = Field(..., gt=0, description="Heat diffusivity")
    seed: int = Field(..., ge=0)
    eval_resolution: int = Field(..., ge=2)
    density_resolution: int = Field(..., ge=2)
    field_resolution: int = Field(..., ge=2)
    export_fields: bool = True
    output_dir: str

    @field_validator("gamma_grid")
    @classmethod
    def _positive_grid(cls, value: List[float]) -> List[float]:
        if any(g <= 0 for g in value):
            raise ValueError("gamma_grid values must be positive")
        return [float(g) for g in value]

    @model_validator(mode="after")
    def _monitor_budget(self) -> "ExperimentConfig":
        if self.I_n is None:
            self.I_n = max(self.qx - 2, 0) * max(self.qy - 2, 0)
        budget = self.nx * self.ny * (self.J_n + self.I_n)
        if self.K > 0 and self.m < budget:
            raise ValueError(f"m={self.m} must be at least the feature plus interior budget {budget}")
        return self

    @property
    def subdomains(self) -> int:
        return self.nx * self.ny

    def to_dict(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _flatten(data: Mapping[str, Any], source: str) -> Dict[str, Any]:
    """Lift TOML section entries to the top level; sections only group keys."""
    flat: Dict[str, Any] = {}
    for key, value in data.items():
        items = value.items() if isinstance(value, dict) else [(key, value)]
        for name, item in items:
            if name in flat:
                raise ConfigError(f"Duplicate key '{name}' in {source}")
            flat[name] = item
    return flat


def load_settings(path: str) -> Dict[str, Any]:
    """
    Read a TOML or JSON experiment file into a flat dict.

    Raises:
        ConfigError: if the file is missing, unparseable or has an unknown extension
    """
    ext = os.path.splitext(path)[1].lower()
    try:
        if ext == ".toml":
            with open(path, 'rb') as f:
                data = tomllib.load(f)
        elif ext == ".json":
            with open(path, 'r', encoding='utf-8') as f:
                data = json.load(f)
        else:
            raise ConfigError(f"Unsupported config format '{ext}' (expected .toml or .json)", {"path": path})
    except OSError as e:
        raise ConfigError(f"Cannot read config {path}: {e}", {"path": path}) from e
    except (tomllib.TOMLDecodeError, json.JSONDecodeError) as e:
        raise ConfigError(f"Cannot parse config {path}: {e}", {"path": path}) from e
    if not isinstance(data, dict):
        raise ConfigError(f"Config {path} must hold a table of settings", {"path": path})
    return _flatten(data, path)


def resolve_config(raw: Optional[Mapping[str, Any]] = None,
                   overrides: Optional[Mapping[str, Any]] = None,
                   environ: Optional[Mapping[str, str]] = None) -> ExperimentConfig:
    """
    Layer defaults < problem defaults < file values < AFCM_SEED < explicit overrides.

    Raises:
        ConfigError: on invalid values
        UnknownProblemError: if the problem name is not registered
    """
    from app.problems import get_registry

    raw = dict(raw or {})
    environ = os.environ if environ is None else environ
    overrides = {k: v for k, v in (overrides or {}).items() if v is not None}
    name = overrides.get("problem", raw.get("problem", DEFAULT_SETTINGS["problem"]))
    problem_class = get_registry().require(name)

    settings = dict(DEFAULT_SETTINGS)
    settings.update(problem_class.default_overrides)
    settings.update(raw)
    if environ.get(SEED_ENV_VAR):
        try:
            settings["seed"] = int(environ[SEED_ENV_VAR])
        except ValueError as e:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer, got {environ[SEED_ENV_VAR]!r}") from e
    settings.update(overrides)
    settings["problem"] = name
    try:
        config = ExperimentConfig(**settings)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration: {e}", {"errors": e.errors(include_url=False)}) from e
    problem_class.check_config(config)
    return config
