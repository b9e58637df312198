"""Job configuration: a single JSON document validated before any computation."""

import json
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from . import curves as cv
from .expr import Constant, SampleTable, parse_scalar

MODES = ("generate", "cauchy", "characteristic", "classify", "verify")


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class TableSource(_Strict):
    """Uniformly sampled ``t,value`` CSV (a header row is allowed)."""

    csv: str


Scalar = Union[float, str, TableSource]


class CurveSource(_Strict):
    named: Optional[str] = None
    params: Dict[str, float] = Field(default_factory=dict)
    x: Optional[str] = None
    y: Optional[str] = None
    z: Optional[str] = None
    csv: Optional[str] = None
    interval: Optional[Tuple[float, float]] = None
    samples: int = Field(2001, ge=16)

    @model_validator(mode="after")
    def _one_kind(self):
        kinds = [self.named is not None, self.csv is not None,
                 any(v is not None for v in (self.x, self.y, self.z))]
        if sum(kinds) != 1:
            raise ValueError("curve needs exactly one of: named, csv, or x/y/z expressions")
        if kinds[2] and (None in (self.x, self.y, self.z) or self.interval is None):
            raise ValueError("expression curves need x, y, z and interval")
        return self


class Domain(_Strict):
    chart: Literal["uv", "xy"] = "uv"
    a: Tuple[float, float] = (-1.0, 1.0)
    b: Tuple[float, float] = (-1.0, 1.0)

    @model_validator(mode="after")
    def _ordered(self):
        if not (self.a[0] < self.a[1] and self.b[0] < self.b[1]):
            raise ValueError("domain ranges must be increasing")
        return self


class ToleranceOverrides(_Strict):
    weak_tol: Optional[float] = Field(None, gt=0)
    zero_tol: Optional[float] = Field(None, gt=0)
    degeneracy_tol: Optional[float] = Field(None, gt=0)
    refine_tol: Optional[float] = Field(None, gt=0)
    characteristic_tol: Optional[float] = Field(None, gt=0)


class Output(_Strict):
    dir: str = "out"
    basename: str = "surface"
    formats: List[Literal["obj", "ply", "csv", "json"]] = ["obj", "ply", "csv", "json"]


class JobConfig(_Strict):
    mode: Literal["generate", "cauchy", "characteristic", "classify", "verify"]
    kappa: Optional[Scalar] = None
    tau: Optional[Scalar] = None
    curve: Optional[CurveSource] = None
    A: Optional[Scalar] = None
    B: Optional[Scalar] = None
    beta: Optional[Scalar] = None
    alpha: Optional[Scalar] = None
    bindings: Dict[str, float] = Field(default_factory=dict)
    domain: Optional[Domain] = None
    res: Union[int, Tuple[int, int]] = 101
    truncation: int = Field(12, ge=2, le=128)
    lambda0: float = 1.0
    epsilon: Optional[Literal[-1, 1]] = None
    branch: Literal["proof", "statement"] = "proof"
    v_half: Optional[float] = Field(None, gt=0)
    tolerances: ToleranceOverrides = Field(default_factory=ToleranceOverrides)
    output: Output = Field(default_factory=Output)
    run: Optional[str] = None
    checks: bool = True

    @model_validator(mode="after")
    def _mode_fields(self):
        if self.lambda0 == 0:
            raise ValueError("lambda0 must be nonzero")
        res = (self.res, self.res) if isinstance(self.res, int) else self.res
        if min(res) < 3:
            raise ValueError("res must be at least 3")
        need = {"generate": ("A", "B", "beta"), "characteristic": ("kappa", "alpha", "beta")}
        for name in need.get(self.mode, ()):
            if getattr(self, name) is None:
                raise ValueError(f"mode {self.mode!r} needs field {name!r}")
        if self.mode == "generate" and self.epsilon is None:
            raise ValueError("mode 'generate' needs epsilon")
        if self.mode == "cauchy":
            has_kt = self.kappa is not None and self.tau is not None
            if has_kt == (self.curve is not None):
                raise ValueError("mode 'cauchy' needs either kappa and tau, or a curve")
        if self.mode == "classify" and self.run is None:
            raise ValueError("mode 'classify' needs 'run' (a previous output directory)")
        if self.mode == "verify" and self.run is None and self.kappa is None \
                and self.curve is None:
            raise ValueError("mode 'verify' needs 'run' or curve data")
        return self


class ConfigError(ValueError):
    pass


def parse_config(doc):
    try:
        return JobConfig.model_validate(doc)
    except ValidationError as exc:
        lines = [f"{'.'.join(str(p) for p in e['loc']) or '<root>'}: {e['msg']}"
                 for e in exc.errors()]
        raise ConfigError("invalid configuration:\n  " + "\n  ".join(lines)) from None


def load_config(path):
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}:{exc.lineno}:{exc.colno}: {exc.msg}") from None
    return parse_config(doc)


def schema():
    return JobConfig.model_json_schema()


def load_table(path):
    """Uniform ``t,value`` samples from a CSV file as a spline-backed function."""
    try:
        data = np.genfromtxt(path, delimiter=",", comments="#")
    except OSError as exc:
        raise ConfigError(f"cannot read table {path}: {exc}") from None
    if data.ndim != 2 or data.shape[1] < 2:
        raise ConfigError(f"{path}: expected two columns t,value")
    data = data[~np.isnan(data).any(axis=1)]
    t, v = data[:, 0], data[:, 1]
    if t.size < 4:
        raise ConfigError(f"{path}: need at least 4 samples")
    h = (t[-1] - t[0]) / (t.size - 1)
    if h <= 0 or np.max(np.abs(np.diff(t) - h)) > 1e-9 * max(1.0, abs(h)) * t.size:
        raise ConfigError(f"{path}: t column must be increasing and uniformly spaced")
    return SampleTable(float(t[0]), float(h), v)


def scalar(value, variable, bindings):
    if value is None:
        return None
    if isinstance(value, TableSource):
        return load_table(value.csv)
    if isinstance(value, (int, float)):
        return Constant(float(value))
    return parse_scalar(value, variable, bindings)


def build_curve(src, bindings):
    if src.named is not None:
        return cv.named_curve(src.named, src.params or None, src.interval, src.samples)
    if src.csv is not None:
        return cv.curve_from_csv(src.csv, src.samples)
    return cv.curve_from_expressions(src.x, src.y, src.z, tuple(src.interval),
                                     src.samples, {**bindings, **src.params})
