"""Experiment configuration: a YAML document with one block per concern.

Only ``coefficient.kappa_plus`` and ``coefficient.kappa_minus`` are
required, and only by commands that build a coefficient (solve, sweep,
barrier); every other key has a default (see ``docs/config.md``).
"""
from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional

import yaml

from .errors import ConfigParse


@dataclass
class GeometryBlock:
    box: list = field(default_factory=lambda: [-4.0, 4.0, -7.0, 3.0])
    delta: float = 0.1
    deltas: list = field(default_factory=lambda: [0.2, 0.1, 0.05, 0.025])
    mu: float = 0.25
    delta0: float = 0.5


@dataclass
class CoefficientBlock:
    kappa_plus: float = None  # required
    kappa_minus: float = None  # required
    mode: str = "sharp"
    epsilon_fraction: float = 0.125
    profile: str = "cosine"


@dataclass
class SolverBlock:
    h: float = 0.025
    h_levels: list = field(default_factory=lambda: [0.00625, 0.003125])
    tol: float = 1e-10
    max_iter: Optional[int] = None
    threads: int = 1
    backend: str = "amg"
    quadrature: int = 16


@dataclass
class FieldsBlock:
    K: float = 4.0
    K_values: list = field(default_factory=lambda: [2.0, 6.0])
    C_scale: float = 4.0
    alpha_beta: str = "argmax"
    barrier_samples: int = 512


@dataclass
class BoundaryBlock:
    family: str = "X1"
    k: int = 1
    normalized: bool = True


@dataclass
class OutputBlock:
    directory: str = "out"
    formats: list = field(default_factory=lambda: ["csv", "json"])


@dataclass
class IdentitiesBlock:
    p_values: list = field(default_factory=lambda: [0.0, -1.0, 2.0])
    spacings: list = field(default_factory=lambda: [2.0**-7, 2.0**-8, 2.0**-9])
    n_points: int = 2000
    seed: int = 0


@dataclass
class OracleBlock:
    kappas: list = field(default_factory=lambda: [0.2, 5.0])
    h_levels: list = field(default_factory=lambda: [1 / 32, 1 / 64, 1 / 128])
    box: list = field(default_factory=lambda: [-8.0, 8.0, -8.0, 8.0])
    radial_h_levels: list = field(default_factory=lambda: [1 / 16, 1 / 32, 1 / 64, 1 / 128])
    radial_box: list = field(default_factory=lambda: [-2.0, 2.0, -2.0, 2.0])


@dataclass
class ThresholdsBlock:
    expect: str = "bounded"  # bounded | blowup | none
    bounded_factor: float = 1.5
    blowup_factor: float = 2.0
    refinement_tol: float = 0.05
    min_order: float = 1.8
    zero_residual: float = 1e-12
    oracle_ratio: float = 0.6
    n_vs_m_tol: float = 1e-12


@dataclass
class ExperimentConfig:
    geometry: GeometryBlock = field(default_factory=GeometryBlock)
    coefficient: CoefficientBlock = field(default_factory=CoefficientBlock)
    solver: SolverBlock = field(default_factory=SolverBlock)
    fields: FieldsBlock = field(default_factory=FieldsBlock)
    boundary: BoundaryBlock = field(default_factory=BoundaryBlock)
    output: OutputBlock = field(default_factory=OutputBlock)
    identities: IdentitiesBlock = field(default_factory=IdentitiesBlock)
    oracle: OracleBlock = field(default_factory=OracleBlock)
    thresholds: ThresholdsBlock = field(default_factory=ThresholdsBlock)

    def as_dict(self) -> dict:
        return dataclasses.asdict(self)


_REQUIRED = (("coefficient", "kappa_plus"), ("coefficient", "kappa_minus"))


def _set_path(doc: dict, dotted: str, value: Any) -> None:
    keys = dotted.split(".")
    node = doc
    for k in keys[:-1]:
        node = node.setdefault(k, {})
        if not isinstance(node, dict):
            raise ConfigParse(f"override {dotted!r} descends into a non-mapping")
    node[keys[-1]] = value


def apply_overrides(doc: dict, overrides) -> dict:
    for item in overrides or ():
        if "=" not in item:
            raise ConfigParse(f"override {item!r} is not key=value")
        key, raw = item.split("=", 1)
        try:
            value = yaml.safe_load(raw)
        except yaml.YAMLError as exc:
            raise ConfigParse(f"cannot parse override value {raw!r}: {exc}") from exc
        _set_path(doc, key.strip(), value)
    return doc


def from_dict(doc: dict, *, require_coefficient: bool = True) -> ExperimentConfig:
    if not isinstance(doc, dict):
        raise ConfigParse("configuration must be a mapping of blocks")
    cfg = ExperimentConfig()
    for block_name, block_doc in doc.items():
        if block_name not in cfg.__dataclass_fields__:
            raise ConfigParse(f"unknown block {block_name!r}")
        if block_doc is None:
            continue
        if not isinstance(block_doc, dict):
            raise ConfigParse(f"block {block_name!r} must be a mapping")
        block = getattr(cfg, block_name)
        for key, value in block_doc.items():
            if key not in block.__dataclass_fields__:
                raise ConfigParse(f"unknown key {block_name}.{key}")
            setattr(block, key, value)
    for block_name, key in _REQUIRED if require_coefficient else ():
        if getattr(getattr(cfg, block_name), key) is None:
            raise ConfigParse(f"missing required key {block_name}.{key}")
    _validate(cfg)
    return cfg


def _validate(cfg: ExperimentConfig) -> None:
    try:
        for name in ("kappa_plus", "kappa_minus"):
            if getattr(cfg.coefficient, name) is None:
                continue
            v = float(getattr(cfg.coefficient, name))
            if not v > 0:
                raise ConfigParse(f"coefficient.{name} must be positive")
            setattr(cfg.coefficient, name, v)
        if cfg.coefficient.mode not in ("sharp", "smooth"):
            raise ConfigParse(f"coefficient.mode must be sharp or smooth, got {cfg.coefficient.mode!r}")
        if len(cfg.geometry.box) != 4:
            raise ConfigParse("geometry.box needs four numbers")
        cfg.geometry.box = [float(v) for v in cfg.geometry.box]
        cfg.geometry.deltas = [float(v) for v in cfg.geometry.deltas]
        cfg.solver.h_levels = [float(v) for v in cfg.solver.h_levels]
        if cfg.thresholds.expect not in ("bounded", "blowup", "none"):
            raise ConfigParse("thresholds.expect must be bounded, blowup or none")
    except (TypeError, ValueError) as exc:
        raise ConfigParse(str(exc)) from exc


def load_config(path=None, overrides=(), *, require_coefficient: bool = True) -> ExperimentConfig:
    doc: dict = {}
    if path is not None:
        try:
            text = Path(path).read_text()
        except OSError as exc:
            raise ConfigParse(f"cannot read {path}: {exc}") from exc
        try:
            doc = yaml.safe_load(text) or {}
        except yaml.YAMLError as exc:
            raise ConfigParse(f"{path}: {exc}") from exc
    return from_dict(apply_overrides(doc, overrides), require_coefficient=require_coefficient)
