from __future__ import annotations

from pathlib import Path
from typing import Any, Literal

import yaml
from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from critical_halfspace.config.defaults import DEFAULTS
from critical_halfspace.fields.bubble import critical_p, critical_q


class RunConfig(BaseModel):
    """Validated settings for one subcommand run."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    subcommand: str
    n: int = Field(DEFAULTS["n"], ge=3)
    q: float | None = Field(DEFAULTS["q"], gt=1)
    p: float | None = Field(DEFAULTS["p"], gt=0)
    lam: float = Field(DEFAULTS["lam"], gt=0)
    y_prime: list[float] | None = DEFAULTS["y_prime"]
    family: Literal["bubble", "harmonic"] = DEFAULTS["family"]
    c: float = Field(DEFAULTS["c"], gt=0)

    samples: int = Field(DEFAULTS["samples"], ge=1)
    sample_radius: float = Field(DEFAULTS["sample_radius"], gt=0)
    tol: float = Field(DEFAULTS["tol"], gt=0)
    kelvin_center: list[float] | None = DEFAULTS["kelvin_center"]

    lambda_min: float = DEFAULTS["lambda_min"]
    lambda_max: float = DEFAULTS["lambda_max"]
    lambda_count: int = Field(DEFAULTS["lambda_count"], ge=2)
    sigma_samples: int = Field(DEFAULTS["sigma_samples"], ge=1)
    sigma_radius: float = Field(DEFAULTS["sigma_radius"], gt=0)
    plane_tol: float = Field(DEFAULTS["plane_tol"], gt=0)
    bisect_width: float = Field(DEFAULTS["bisect_width"], gt=0)
    axis_tol: float = Field(DEFAULTS["axis_tol"], gt=0)
    asymmetry_tol: float = Field(DEFAULTS["asymmetry_tol"], gt=0)

    radii: list[float] = Field(default_factory=lambda: list(DEFAULTS["radii"]))
    directions: int = Field(DEFAULTS["directions"], ge=1)
    mu_tol: float = Field(DEFAULTS["mu_tol"], gt=0)
    radial_tol: float = Field(DEFAULTS["radial_tol"], gt=0)
    grad_tol: float = Field(DEFAULTS["grad_tol"], gt=0)

    s_lo: float | None = Field(DEFAULTS["s_lo"], gt=0)
    s_hi: float | None = Field(DEFAULTS["s_hi"], gt=0)
    scale_tol: float = Field(DEFAULTS["scale_tol"], gt=0)
    step: float | None = Field(DEFAULTS["step"], gt=0)
    t_max: float | None = Field(DEFAULTS["t_max"], gt=0)

    mode: Literal["manufactured", "blind"] = DEFAULTS["mode"]
    extent: float = Field(DEFAULTS["extent"], gt=0)
    cells: int = Field(DEFAULTS["cells"], ge=2)
    grid_cells: list[int] = Field(default_factory=lambda: list(DEFAULTS["grid_cells"]))
    perturbation: float = Field(DEFAULTS["perturbation"], ge=0, lt=1)
    newton_tol: float = Field(DEFAULTS["newton_tol"], gt=0)
    max_iter: int = Field(DEFAULTS["max_iter"], ge=1)
    damping: float = Field(DEFAULTS["damping"], gt=0, le=1)
    continuation_steps: int = Field(DEFAULTS["continuation_steps"], ge=0)
    fit_rtol: float = Field(DEFAULTS["fit_rtol"], gt=0)
    order_target: float = DEFAULTS["order_target"]
    order_tol: float = Field(DEFAULTS["order_tol"], gt=0)
    skip_unresolved: bool = DEFAULTS["skip_unresolved"]

    seed: int = Field(DEFAULTS["seed"], ge=0)
    threads: int = Field(DEFAULTS["threads"], ge=1)
    dump_csv: bool = DEFAULTS["dump_csv"]
    output_dir: str = DEFAULTS["output_dir"]

    @field_validator("radii")
    @classmethod
    def _radii_increasing(cls, v: list[float]) -> list[float]:
        if not v or any(r <= 0 for r in v) or any(b <= a for a, b in zip(v, v[1:])):
            raise ValueError("radii must be positive and strictly increasing")
        return v

    @field_validator("grid_cells")
    @classmethod
    def _grid_cells(cls, v: list[int]) -> list[int]:
        if len(v) < 2 or any(m < 2 for m in v):
            raise ValueError("grid_cells needs at least two entries, each >= 2")
        return v

    @model_validator(mode="after")
    def _check_shapes(self) -> RunConfig:
        for name in ("y_prime", "kelvin_center"):
            value = getattr(self, name)
            if value is not None and len(value) > self.n - 1:
                raise ValueError(f"{name} has {len(value)} entries; at most n-1 = {self.n - 1}")
        if self.lambda_max <= self.lambda_min:
            raise ValueError("lambda_max must exceed lambda_min")
        if self.s_lo is not None and self.s_hi is not None and self.s_hi <= self.s_lo:
            raise ValueError("s_hi must exceed s_lo")
        return self

    @property
    def interior_q(self) -> float:
        return critical_q(self.n) if self.q is None else self.q

    @property
    def boundary_p(self) -> float:
        return critical_p(self.n) if self.p is None else self.p

    @property
    def tangential(self) -> list[float]:
        """y′ padded with zeros to n − 1 coordinates."""
        given = list(self.y_prime or [])
        return given + [0.0] * (self.n - 1 - len(given))

    @property
    def inversion_center(self) -> tuple[float, ...] | None:
        if self.kelvin_center is None:
            return None
        given = list(self.kelvin_center)
        return tuple(given + [0.0] * (self.n - len(given)))


def load_config_file(path: str | Path) -> dict[str, Any]:
    """Flat key-value YAML; an empty file is an empty mapping."""
    data = yaml.safe_load(Path(path).read_text())
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ValueError(f"config file {path} must hold a flat mapping")
    nested = [k for k, v in data.items() if isinstance(v, dict)]
    if nested:
        raise ValueError(f"config file {path} must be flat; nested keys: {nested}")
    return data


def build_run_config(
    subcommand: str,
    config_path: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Defaults, then the config file, then explicit flags (None means not given)."""
    values: dict[str, Any] = dict(DEFAULTS)
    if config_path is not None:
        values.update(load_config_file(config_path))
        if "subcommand" in values:
            raise ValueError("the subcommand is chosen on the command line, not in the config file")
    if overrides:
        values.update({k: v for k, v in overrides.items() if v is not None})
    return RunConfig(subcommand=subcommand, **values)
