#!/usr/bin/env python3
"""
Run configuration for the vacuum workbench.

A RunConfig is read from JSON (--config), then overridden by the wrapper
script environment (SCHEME, NMAX, OUT_DIR) and finally by CLI flags.
Rationals are written as strings ("1/3") so they stay exact.
"""

import json
import logging
import os
from fractions import Fraction
from pathlib import Path
from typing import Annotated, Any, Dict, List, Literal, Optional, Sequence, Tuple

from pydantic import (
    AfterValidator,
    BaseModel,
    ConfigDict,
    Field,
    PlainSerializer,
    PlainValidator,
    ValidationError,
    field_validator,
    model_validator,
)

from errors import ConfigError, WorkbenchError
from field import ModeSet, PhysicalConstants
from opalgebra import CommutatorScheme, Role

logger = logging.getLogger(__name__)


def to_fraction(value: Any) -> Fraction:
    if isinstance(value, bool):
        raise ValueError("expected a rational, got a boolean")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, (int, str)):
        try:
            return Fraction(str(value).strip())
        except (ValueError, ZeroDivisionError):
            raise ValueError(f"not a rational: {value!r}")
    if isinstance(value, float):
        return Fraction(repr(value))
    raise ValueError(f"not a rational: {value!r}")


Rational = Annotated[Fraction, PlainValidator(to_fraction), PlainSerializer(str, return_type=str)]


def _positive(value: Fraction) -> Fraction:
    if value <= 0:
        raise ValueError(f"must be positive, got {value}")
    return value


PositiveRational = Annotated[Rational, AfterValidator(_positive)]


def parse_rationals(text: str) -> List[Fraction]:
    """'1/2,1/4,1/4' -> [1/2, 1/4, 1/4]"""
    return [to_fraction(v) for v in text.split(",") if v.strip()]


def build_scheme(kind: str, n: Optional[Sequence[Any]] = None, c: Optional[Sequence[Any]] = None,
                 roles: Optional[Sequence[str]] = None) -> CommutatorScheme:
    if kind == "standard":
        return CommutatorScheme.standard()
    if kind == "paper":
        return CommutatorScheme.paper(n) if n is not None else CommutatorScheme.paper()
    if kind == "custom":
        if c is None:
            raise ConfigError("custom scheme needs four constants", path="scheme.c")
        return CommutatorScheme.custom(c, [Role(r) for r in roles] if roles else None)
    raise ConfigError(f"unknown scheme kind {kind!r}", path="scheme.kind")


class SchemeConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    kind: Literal["standard", "paper", "custom"] = "paper"
    n: Optional[List[PositiveRational]] = None
    c: Optional[List[Rational]] = None
    roles: Optional[List[Literal["operator", "conjugate"]]] = None

    @field_validator("n")
    @classmethod
    def _check_n(cls, v):
        if v is None:
            return v
        if len(v) != 3:
            raise ValueError(f"need 3 weights, got {len(v)}")
        if sum(v) != 1:
            raise ValueError(f"n1 + n2 + n3 must equal 1, got {sum(v)}")
        return v

    @field_validator("c")
    @classmethod
    def _check_c(cls, v):
        if v is not None:
            if len(v) != 4:
                raise ValueError(f"need 4 constants, got {len(v)}")
            if any(value == 0 for value in v):
                raise ValueError("commutator constants must be nonzero")
        return v

    @field_validator("roles")
    @classmethod
    def _check_roles(cls, v):
        if v is not None and len(v) != 4:
            raise ValueError(f"need one vacuum role per polarization, got {len(v)}")
        return v

    @model_validator(mode="after")
    def _check_kind(self):
        if self.kind == "custom" and self.c is None:
            raise ValueError("custom scheme needs c")
        if self.kind != "custom" and (self.c is not None or self.roles is not None):
            raise ValueError(f"c and roles only apply to custom schemes, not {self.kind}")
        if self.kind != "paper" and self.n is not None:
            raise ValueError("n only applies to scheme kind 'paper'")
        return self

    def build(self) -> CommutatorScheme:
        return build_scheme(self.kind, self.n, self.c, self.roles)


class ConstantsConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    hbar: PositiveRational = Fraction(1)
    c: PositiveRational = Fraction(1)

    def build(self) -> PhysicalConstants:
        return PhysicalConstants(self.hbar, self.c)


class ModeSetConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    L: PositiveRational = Fraction(1)
    modes: List[Tuple[int, int, int]] = Field(default_factory=lambda: [(0, 0, 1), (0, 0, -1)])

    @field_validator("modes")
    @classmethod
    def _check_modes(cls, v):
        if not v:
            raise ValueError("mode set is empty")
        if (0, 0, 0) in v:
            raise ValueError("zero wavevector is excluded")
        if len(set(v)) != len(v):
            raise ValueError("duplicate modes")
        return v

    def build(self) -> ModeSet:
        return ModeSet(self.L, tuple(self.modes))


class CausalityConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    r_grid: List[float] = Field(default_factory=lambda: [0.5, 1.0, 2.0, 3.0])
    ct_grid: List[float] = Field(default_factory=lambda: [-2.0, -1.0, 0.0, 0.5, 1.0, 2.0])
    epsilons: List[float] = Field(default_factory=lambda: [0.05, 0.02, 0.01])
    points_per_period: int = Field(default=128, ge=10)

    @field_validator("r_grid")
    @classmethod
    def _positive_r(cls, v):
        if not v or any(r <= 0 for r in v):
            raise ValueError("r values must be positive")
        return v

    @field_validator("epsilons")
    @classmethod
    def _decreasing(cls, v):
        if not v or any(e <= 0 for e in v):
            raise ValueError("epsilons must be positive")
        if any(b >= a for a, b in zip(v, v[1:])):
            raise ValueError("epsilons must be strictly decreasing")
        return v


class RandomConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    seed: int = 20240917
    cases: int = Field(default=50, ge=0)


class OutputConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    dir: str = "reports"
    report_name: str = "report.json"
    scan_name: str = "lightcone_scan.csv"

    @property
    def report_path(self) -> Path:
        return Path(self.dir) / self.report_name

    @property
    def scan_path(self) -> Path:
        return Path(self.dir) / self.scan_name


class RunConfig(BaseModel):
    model_config = ConfigDict(extra="forbid")

    scheme: SchemeConfig = Field(default_factory=SchemeConfig)
    constants: ConstantsConfig = Field(default_factory=ConstantsConfig)
    modeset: ModeSetConfig = Field(default_factory=ModeSetConfig)
    n_max: int = Field(default=2, ge=1)
    fock_cap: int = Field(default=8192, ge=1)
    grid_n: int = Field(default=8, ge=2)
    causality: CausalityConfig = Field(default_factory=CausalityConfig)
    random: RandomConfig = Field(default_factory=RandomConfig)
    output: OutputConfig = Field(default_factory=OutputConfig)
    vev_expressions: List[str] = Field(default_factory=list)

    def echo(self) -> Dict[str, Any]:
        return self.model_dump(mode="json")


def _validation_to_config_error(e: ValidationError, source: Optional[str] = None) -> ConfigError:
    first = e.errors()[0]
    location = ".".join(str(part) for part in first["loc"])
    message = first["msg"]
    if source:
        message = f"{source}: {message}"
    return ConfigError(message, path=location or None)


def load_config(path: Optional[Path] = None) -> RunConfig:
    if path is None:
        return RunConfig()
    try:
        with open(path, "r") as f:
            data = json.load(f)
    except FileNotFoundError:
        raise ConfigError(f"config file not found: {path}")
    except json.JSONDecodeError as e:
        raise ConfigError(f"{path}: invalid JSON at line {e.lineno}, column {e.colno}: {e.msg}")
    try:
        cfg = RunConfig.model_validate(data)
    except ValidationError as e:
        raise _validation_to_config_error(e, str(path))
    logger.info(f"Loaded config from {path}")
    return cfg


def apply_overrides(cfg: RunConfig, scheme: Optional[str] = None, n_max: Optional[int] = None,
                    out_dir: Optional[str] = None) -> RunConfig:
    """Return a copy with the given overrides; a scheme override drops custom parameters"""
    data = cfg.model_dump(mode="json")
    if scheme is not None:
        data["scheme"] = {"kind": scheme} if scheme != cfg.scheme.kind else data["scheme"]
    if n_max is not None:
        data["n_max"] = n_max
    if out_dir is not None:
        data["output"]["dir"] = out_dir
    try:
        return RunConfig.model_validate(data)
    except ValidationError as e:
        raise _validation_to_config_error(e)


def environment_overrides() -> Dict[str, Any]:
    """SCHEME, NMAX and OUT_DIR as set by scripts/run_checks.sh"""
    overrides: Dict[str, Any] = {}
    if os.environ.get("SCHEME"):
        overrides["scheme"] = os.environ["SCHEME"]
    if os.environ.get("NMAX"):
        try:
            overrides["n_max"] = int(os.environ["NMAX"])
        except ValueError:
            raise ConfigError(f"NMAX must be an integer, got {os.environ['NMAX']!r}", path="n_max")
    if os.environ.get("OUT_DIR"):
        overrides["out_dir"] = os.environ["OUT_DIR"]
    return overrides


def resolve_config(path: Optional[Path] = None, scheme: Optional[str] = None, n_max: Optional[int] = None,
                   out_dir: Optional[str] = None) -> RunConfig:
    """defaults < JSON file < environment < CLI flags"""
    cfg = load_config(path)
    env = environment_overrides()
    if env:
        logger.info(f"Environment overrides: {env}")
        cfg = apply_overrides(cfg, **env)
    cfg = apply_overrides(cfg, scheme=scheme, n_max=n_max, out_dir=out_dir)
    try:
        cfg.scheme.build()
    except WorkbenchError as e:
        raise ConfigError(str(e), path="scheme")
    return cfg
