"""Scenario configuration schemas for the command-line front end.

Configs are JSON objects. Every tolerance must be positive. The environment
variable ``GFRAME_TOL`` overrides the ``tolerance`` field of any config.
"""

from __future__ import annotations

import json
import os
from pathlib import Path
from typing import Annotated, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator, model_validator

from .errors import ConfigError

TOL_ENV = "GFRAME_TOL"

PositiveFloat = Annotated[float, Field(gt=0)]
GroupSpec = Union[int, list[int]]
Element = Union[int, list[int]]

SUITES = ("group", "spaces", "symmetry", "alignment", "relframes", "dynamics", "lemma9", "oracle", "paradox")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


# -- state mini-language ----------------------------------------------------


class Term(_Strict):
    config: list[Element]
    amp: Union[float, list[float]] = 1.0

    @field_validator("amp")
    @classmethod
    def _pair(cls, v):
        if isinstance(v, list) and len(v) != 2:
            raise ValueError("complex amplitude must be [re, im]")
        return v


class ExplicitState(_Strict):
    kind: Literal["explicit"]
    terms: list[Term] = Field(min_length=1)
    normalize: bool = True


class BasisState(_Strict):
    kind: Literal["basis"]
    config: list[Element]


class SuperpositionState(_Strict):
    """Equal-weight superposition with optional phases in radians."""

    kind: Literal["superposition"]
    configs: list[list[Element]] = Field(min_length=1)
    phases: Optional[list[float]] = None

    @model_validator(mode="after")
    def _lengths(self):
        if self.phases is not None and len(self.phases) != len(self.configs):
            raise ValueError("phases must match configs in length")
        return self


class ParadoxState(_Strict):
    kind: Literal["paradox"]
    a: int = 1
    b: int = 2
    c: int = 0
    theta: float = 0.0


class TranslatedPairState(_Strict):
    kind: Literal["translated_pair"]


StateSpec = Annotated[
    Union[ExplicitState, BasisState, SuperpositionState, ParadoxState, TranslatedPairState],
    Field(discriminator="kind"),
]


# -- commands ---------------------------------------------------------------


class _Base(_Strict):
    seed: int = 0
    tolerance: PositiveFloat = 1e-10
    spectral_tolerance: PositiveFloat = 1e-9
    include_matrices: bool = False


class SpaceSpec(_Strict):
    group: GroupSpec
    N: int = Field(ge=1, le=4)


class VerifyConfig(_Base):
    command: Literal["verify"] = "verify"
    suites: list[str] = ["all"]
    spaces: list[SpaceSpec] = [
        SpaceSpec(group=2, N=2),
        SpaceSpec(group=3, N=2),
        SpaceSpec(group=2, N=3),
        SpaceSpec(group=4, N=2),
        SpaceSpec(group=3, N=3),
    ]
    lemma9_n: int = Field(4, ge=3, le=6)
    samples: int = Field(10, ge=1, le=1000)
    max_dim: int = Field(64, ge=1, le=4096)

    @field_validator("suites")
    @classmethod
    def _suites(cls, v):
        bad = [s for s in v if s != "all" and s not in SUITES]
        if bad:
            raise ValueError(f"unknown suite selector(s) {bad}; choose from all, {', '.join(SUITES)}")
        return v


class ParadoxConfig(_Base):
    command: Literal["paradox"] = "paradox"
    n: int = Field(16, ge=2, le=24)
    a: int = 1
    b: int = 2
    c: int = 0
    theta: float = 0.0
    theta_alt: float = 3.141592653589793
    tolerance: PositiveFloat = 1e-12
    gap: PositiveFloat = 1e-3


class DynamicsConfig(_Base):
    command: Literal["dynamics"] = "dynamics"
    group: GroupSpec = 5
    N: int = Field(2, ge=1, le=3)
    masses: Optional[list[PositiveFloat]] = None
    potentials: dict[str, list[float]] = {}
    times: list[float] = [round(0.1 * k, 10) for k in range(1, 31)]
    ratios: list[PositiveFloat] = [1.0, 10.0, 100.0, 1000.0]
    state: Optional[StateSpec] = None
    observables: list[Literal["position", "momentum"]] = ["position"]

    @model_validator(mode="after")
    def _masses(self):
        if self.masses is not None and len(self.masses) != self.N:
            raise ValueError(f"expected {self.N} masses, got {len(self.masses)}")
        for key in self.potentials:
            parse_pair(key)
        return self


class FramesConfig(_Base):
    command: Literal["frames"] = "frames"
    group: GroupSpec = 4
    N: int = Field(3, ge=2, le=4)
    state: StateSpec = TranslatedPairState(kind="translated_pair")
    frames: Optional[list[int]] = None
    orientation: Optional[Element] = None
    hops: Optional[list[list[int]]] = None
    masses: Optional[list[PositiveFloat]] = None


COMMANDS = {
    "verify": VerifyConfig,
    "paradox": ParadoxConfig,
    "dynamics": DynamicsConfig,
    "frames": FramesConfig,
}


def parse_pair(key: str) -> tuple[int, int]:
    """``"1,2"`` or ``"1-2"`` to ``(1, 2)``."""
    parts = key.replace("-", ",").split(",")
    try:
        i, j = (int(p) for p in parts)
    except ValueError as exc:
        raise ValueError(f"potential key {key!r} must look like '1,2'") from exc
    return i, j


def env_tolerance() -> Optional[float]:
    raw = os.environ.get(TOL_ENV)
    if raw is None or raw.strip() == "":
        return None
    try:
        tol = float(raw)
    except ValueError as exc:
        raise ConfigError(f"{TOL_ENV}={raw!r} is not a number") from exc
    if not tol > 0:
        raise ConfigError(f"{TOL_ENV} must be positive")
    return tol


def load_config(command: str, source: Union[str, Path, dict, None], seed: Optional[int] = None):
    """Validate a config for ``command`` from a path, a dict or nothing (defaults)."""
    if command not in COMMANDS:
        raise ConfigError(f"unknown command {command!r}")
    if source is None:
        payload = {}
    elif isinstance(source, dict):
        payload = dict(source)
    else:
        path = Path(source)
        try:
            payload = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file {path} not found") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ConfigError("config must be a JSON object")
    if payload.get("command", command) != command:
        raise ConfigError(f"config is for {payload['command']!r}, not {command!r}")
    payload["command"] = command
    if seed is not None:
        payload["seed"] = seed
    tol = env_tolerance()
    if tol is not None:
        payload["tolerance"] = tol
    try:
        return COMMANDS[command].model_validate(payload)
    except ValidationError as exc:
        raise ConfigError(str(exc)) from exc
