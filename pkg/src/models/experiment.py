"""Experiment configuration, results and laboratory settings."""

import logging
from dataclasses import asdict, dataclass, field
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import polars as pl
import yaml

from src.errors import InvalidConfigError
from src.models.digitset import DigitSet

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = "config/lab.yaml"


class Mode(Enum):
    """Experiment modes the laboratory can run."""

    AVG_R2 = "avg-r2"
    BIAS_TABLE = "bias-table"
    OFFDIAG = "offdiag"
    NONZERO = "nonzero"
    ARCS = "arcs"
    FOURIER = "fourier"
    SIEVE_CHECK = "sieve-check"
    LOCALFACTORS = "localfactors"

    @classmethod
    def from_string(cls, value: str) -> "Mode":
        normalized = value.strip().lower().replace("_", "-")
        for mode in cls:
            if mode.value == normalized:
                return mode
        choices = ", ".join(m.value for m in cls)
        raise InvalidConfigError(f"unknown mode {value!r} (choose from {choices})")


@dataclass
class Budgets:
    """Desk budgets; every one is checked before work starts."""

    max_ledger_x: int = 10**11
    max_sieve_window: int = 200_000_000
    max_prime_bound: int = 10**12
    tilde_max_x: int = 10**8
    max_transform_x: int = 3_000_000_000
    max_quadratic_terms: int = 50_000_000
    max_bruteforce_modulus: int = 10**6
    max_plancherel_k: int = 6
    # work sizes travel with the budgets
    segment_size: int = 1 << 22
    certify_limit: int = 2000


@dataclass
class LabConfig:
    """Settings read from config/lab.yaml."""

    budgets: Budgets = field(default_factory=Budgets)
    width_exponent: float = 2.0
    eta_scale: float = 0.5
    dirichlet_exponent: float = 0.75
    theta_samples: int = 16
    refine_points: int = 8
    decay_denominators: list[int] = field(default_factory=lambda: [3, 7, 9, 11, 13])
    kappa: float = 4
    workers: int = 1
    chunk_size: int = 64
    output_directory: str = "output"
    cache_directory: str = ".cache"

    @classmethod
    def from_config(cls, config_path: str = DEFAULT_CONFIG_PATH) -> "LabConfig":
        """Load settings from YAML; missing file or keys fall back to defaults."""
        path = Path(config_path)
        if not path.exists():
            logger.warning(f"Config file {config_path} not found, using defaults")
            return cls()

        try:
            with open(path, "r", encoding="utf-8") as f:
                raw = yaml.safe_load(f) or {}
        except yaml.YAMLError as e:
            raise InvalidConfigError(f"cannot parse {config_path}: {e}") from e

        primes = raw.get("primes", {})
        limits = {k: int(v) for k, v in raw.get("budgets", {}).items()}
        limits.update({k: int(primes[k]) for k in ("segment_size", "certify_limit") if k in primes})
        try:
            budgets = Budgets(**limits)
        except TypeError as e:
            raise InvalidConfigError(f"unknown budget key in {config_path}: {e}") from e
        arcs = raw.get("arcs", {})
        fourier = raw.get("fourier", {})
        sieve = raw.get("sieve", {})
        experiments = raw.get("experiments", {})
        output = raw.get("output", {})
        defaults = cls()

        return cls(
            budgets=budgets,
            width_exponent=float(arcs.get("width_exponent", defaults.width_exponent)),
            eta_scale=float(arcs.get("eta_scale", defaults.eta_scale)),
            dirichlet_exponent=float(arcs.get("dirichlet_exponent", defaults.dirichlet_exponent)),
            theta_samples=int(fourier.get("theta_samples", defaults.theta_samples)),
            refine_points=int(fourier.get("refine_points", defaults.refine_points)),
            decay_denominators=[
                int(s) for s in fourier.get("decay_denominators", defaults.decay_denominators)
            ],
            kappa=float(sieve.get("kappa", defaults.kappa)),
            workers=int(experiments.get("workers", defaults.workers)),
            chunk_size=int(experiments.get("chunk_size", defaults.chunk_size)),
            output_directory=str(output.get("directory", defaults.output_directory)),
            cache_directory=str(output.get("cache_directory", defaults.cache_directory)),
        )

    def to_dict(self) -> dict:
        return asdict(self)


def parse_forbidden(text: str) -> frozenset[int]:
    """Parse a comma list of digits ("7" or "0,7"); empty means unrestricted."""
    try:
        return frozenset(int(d) for d in text.split(",") if d.strip())
    except ValueError as e:
        raise InvalidConfigError(f"forbidden digits must be integers, got {text!r}") from e


def parse_k_range(text: str) -> list[int]:
    """Parse "7", "4..8" or "4-8" into an inclusive list."""
    text = text.strip()
    for sep in ("..", "-"):
        if sep in text:
            lo, _, hi = text.partition(sep)
            try:
                a, b = int(lo), int(hi)
            except ValueError as e:
                raise InvalidConfigError(f"malformed k range {text!r}") from e
            if a < 1 or b < a:
                raise InvalidConfigError(f"k range {text!r} must satisfy 1 <= a <= b")
            return list(range(a, b + 1))
    try:
        k = int(text)
    except ValueError as e:
        raise InvalidConfigError(f"malformed k {text!r}") from e
    if k < 1:
        raise InvalidConfigError(f"k must be >= 1, got {k}")
    return [k]


@dataclass
class ExperimentConfig:
    """One run of the laboratory."""

    mode: Mode
    g: int = 10
    forbidden: frozenset[int] = field(default_factory=lambda: frozenset({7}))
    k_values: list[int] = field(default_factory=lambda: [4])
    output_dir: str = "output"
    workers: int = 1
    seed: int = 0
    use_cache: bool = True
    budget: Optional[int] = None
    params: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self):
        if not self.k_values:
            raise InvalidConfigError("at least one k is required")
        if self.workers < 1:
            raise InvalidConfigError(f"workers must be >= 1, got {self.workers}")
        # validates forbidden digits against g
        self.digit_set()

    def digit_set(self) -> DigitSet:
        return DigitSet(g=self.g, forbidden=self.forbidden)

    @property
    def tag(self) -> str:
        forbidden = "-".join(str(d) for d in sorted(self.forbidden)) or "none"
        ks = f"{self.k_values[0]}" if len(self.k_values) == 1 else f"{self.k_values[0]}-{self.k_values[-1]}"
        return f"g{self.g}_b{forbidden}_k{ks}"

    def to_dict(self) -> dict:
        return {
            "mode": self.mode.value,
            "g": self.g,
            "forbidden": sorted(self.forbidden),
            "digit_set": self.digit_set().to_text(),
            "k_values": list(self.k_values),
            "workers": self.workers,
            "seed": self.seed,
            "budget": self.budget,
            "params": {k: v for k, v in sorted(self.params.items())},
        }


@dataclass
class ExperimentResult:
    """Tables and summary produced by one mode."""

    config: ExperimentConfig
    table: pl.DataFrame
    extra_tables: dict[str, pl.DataFrame] = field(default_factory=dict)
    summary: dict[str, Any] = field(default_factory=dict)
    wall_time: float = 0.0

    def tables(self) -> dict[str, pl.DataFrame]:
        """Primary table first, then auxiliary tables by name."""
        return {"main": self.table, **self.extra_tables}

    def to_dict(self) -> dict:
        return {
            "config": self.config.to_dict(),
            "summary": self.summary,
            "wall_time_seconds": self.wall_time,
            "tables": {name: df.to_dicts() for name, df in self.tables().items()},
        }
