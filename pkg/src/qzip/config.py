"""Experiment configuration: one JSON document per run."""

from __future__ import annotations

import json
from dataclasses import asdict, dataclass, field, fields

import numpy as np

from .linalg import random_density_matrix
from .source import qubit_basis

MODES = ("rate", "truncate-sim", "lz", "theorem1", "search", "pipeline")


class ConfigError(ValueError):
    """Configuration failed validation."""


@dataclass(frozen=True)
class SourceSpec:
    """Either an explicit spectrum (with optional qubit eigenbasis angles) or a random state."""

    eigenvalues: tuple[float, ...] | None = None
    eigenbasis_angles: tuple[float, float] | None = None
    random_seed: int | None = None
    dim: int | None = None

    def __post_init__(self):
        if (self.eigenvalues is None) == (self.random_seed is None):
            raise ConfigError("source needs exactly one of 'eigenvalues' or 'random_seed'")
        if self.eigenvalues is not None:
            lam = np.asarray(self.eigenvalues, dtype=float)
            if lam.ndim != 1 or lam.size < 2:
                raise ConfigError("eigenvalues must list at least two numbers")
            if np.any(lam < 0) or abs(lam.sum() - 1.0) > 1e-12:
                raise ConfigError("eigenvalues must be non-negative and sum to 1")
            if self.dim is not None and self.dim != lam.size:
                raise ConfigError("dim disagrees with the number of eigenvalues")
            object.__setattr__(self, "eigenvalues", tuple(float(x) for x in lam))
        elif self.dim is None or self.dim < 2:
            raise ConfigError("a random source needs dim >= 2")
        if self.eigenbasis_angles is not None:
            if len(self.eigenbasis_angles) != 2 or self.dimension != 2:
                raise ConfigError("eigenbasis_angles are (theta, phi) for a qubit source")
            object.__setattr__(self, "eigenbasis_angles", tuple(float(a) for a in self.eigenbasis_angles))

    @property
    def dimension(self) -> int:
        return len(self.eigenvalues) if self.eigenvalues is not None else int(self.dim)

    def eigenbasis(self) -> np.ndarray:
        if self.eigenbasis_angles is not None:
            return qubit_basis(*self.eigenbasis_angles)
        if self.random_seed is not None:
            _, vecs = np.linalg.eigh(self.density_matrix())
            return vecs[:, ::-1]
        return np.eye(self.dimension, dtype=complex)

    def density_matrix(self) -> np.ndarray:
        if self.random_seed is not None:
            return random_density_matrix(self.dimension, np.random.default_rng(self.random_seed))
        w = self.eigenbasis()
        return w @ np.diag(self.eigenvalues) @ w.conj().T

    def to_dict(self) -> dict:
        return {k: list(v) if isinstance(v, tuple) else v for k, v in asdict(self).items() if v is not None}


@dataclass(frozen=True)
class ExperimentConfig:
    source: SourceSpec
    n: int
    Y: int = 32
    L: int | None = None
    delta: float = 0.05
    trials: int = 10
    seed: int = 0
    mode: str = "pipeline"
    basis_angles: tuple[float, float] | None = None  # computational frame; None = matched
    n_values: tuple[int, ...] | None = None
    k: int | None = None
    positions: int = 3
    extra: dict = field(default_factory=dict, compare=False, repr=False)

    def __post_init__(self):
        if self.mode not in MODES:
            raise ConfigError(f"unknown mode {self.mode!r}; expected one of {', '.join(MODES)}")
        for name in ("n", "Y", "trials", "positions"):
            if int(getattr(self, name)) < 1:
                raise ConfigError(f"{name} must be a positive integer")
        if self.L is not None and self.L < 1:
            raise ConfigError("L must be positive")
        if not self.delta > 0:
            raise ConfigError("delta must be positive")
        if self.seed < 0:
            raise ConfigError("seed must be non-negative")
        if self.basis_angles is not None:
            if len(self.basis_angles) != 2 or self.source.dimension != 2:
                raise ConfigError("basis_angles are (theta, phi) for a qubit source")
            object.__setattr__(self, "basis_angles", tuple(float(a) for a in self.basis_angles))
        if self.n_values is not None:
            if not self.n_values or any(int(v) < 1 for v in self.n_values):
                raise ConfigError("n_values must be positive integers")
            object.__setattr__(self, "n_values", tuple(int(v) for v in self.n_values))
        if self.k is not None and not 0 <= self.k <= self.n:
            raise ConfigError(f"k must lie in 0..{self.n}")
        if self.extra:
            raise ConfigError(f"unknown config keys: {', '.join(sorted(self.extra))}")

    @property
    def step(self) -> int:
        return self.Y + 1 if self.L is None else self.L

    def computational_basis(self) -> np.ndarray:
        if self.basis_angles is None:
            return self.source.eigenbasis()
        return qubit_basis(*self.basis_angles)

    def to_dict(self) -> dict:
        out = {"source": self.source.to_dict()}
        for f in fields(self):
            if f.name in ("source", "extra"):
                continue
            v = getattr(self, f.name)
            if v is not None:
                out[f.name] = list(v) if isinstance(v, tuple) else v
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("config must be a JSON object")
        data = dict(data)
        try:
            src = data.pop("source")
        except KeyError:
            raise ConfigError("config is missing 'source'") from None
        if "n" not in data:
            raise ConfigError("config is missing 'n'")
        if not isinstance(src, dict):
            raise ConfigError("'source' must be an object")
        unknown_src = set(src) - {f.name for f in fields(SourceSpec)}
        if unknown_src:
            raise ConfigError(f"unknown source keys: {', '.join(sorted(unknown_src))}")
        known = {f.name for f in fields(cls)} - {"source", "extra"}
        extra = {k: data.pop(k) for k in list(data) if k not in known}
        _check_types(data)
        return cls(source=SourceSpec(**src), extra=extra, **data)

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ExperimentConfig":
        try:
            data = json.loads(text)
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config is not valid JSON: {exc}") from None
        return cls.from_dict(data)


def _check_types(data: dict) -> None:
    ints = ("n", "Y", "L", "trials", "seed", "k", "positions")
    for name in ints:
        v = data.get(name)
        if v is not None and (isinstance(v, bool) or not isinstance(v, int)):
            raise ConfigError(f"{name} must be an integer")
    v = data.get("delta")
    if v is not None and (isinstance(v, bool) or not isinstance(v, (int, float))):
        raise ConfigError("delta must be a number")
    v = data.get("mode")
    if v is not None and not isinstance(v, str):
        raise ConfigError("mode must be a string")


def load_config(path) -> ExperimentConfig:
    with open(path, encoding="utf-8") as fh:
        return ExperimentConfig.from_json(fh.read())
