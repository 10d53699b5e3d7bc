"""Parameter distributions and dotted-path access into project configs."""
import dataclasses
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Optional

import numpy as np
from scipy import stats

from errors import ConfigurationError, require_finite, require_whole

MAX_SEED = 2 ** 64 - 1


class DistributionKind(str, Enum):
    POINT = "point"
    UNIFORM = "uniform"
    TRIANGULAR = "triangular"
    NORMAL = "normal"


@dataclass(frozen=True)
class Distribution:
    """One input distribution.

    With `relative` set, draws are multipliers on the parameter's base value
    (e.g. triangular(0.8, 1.0, 1.2) for a ±20% cost band).
    """
    kind: DistributionKind
    value: Optional[float] = None  # point
    lo: Optional[float] = None
    mode: Optional[float] = None  # triangular
    hi: Optional[float] = None
    mean: Optional[float] = None  # normal
    sd: Optional[float] = None
    relative: bool = False

    def __post_init__(self):
        if not isinstance(self.kind, DistributionKind):
            try:
                object.__setattr__(self, 'kind', DistributionKind(self.kind))
            except ValueError:
                raise ConfigurationError('kind', f"unknown distribution {self.kind!r}")
        for name in ('value', 'lo', 'mode', 'hi', 'mean', 'sd'):
            require_finite(name, getattr(self, name))
        kind = self.kind
        if kind is DistributionKind.POINT:
            self._require('value')
        elif kind is DistributionKind.UNIFORM:
            self._require('lo', 'hi')
            if not self.lo < self.hi:
                raise ConfigurationError('lo', 'uniform requires lo < hi')
        elif kind is DistributionKind.TRIANGULAR:
            self._require('lo', 'mode', 'hi')
            if not self.lo <= self.mode <= self.hi:
                raise ConfigurationError('mode', 'triangular requires lo <= mode <= hi')
        else:
            self._require('mean', 'sd')
            if self.sd <= 0:
                raise ConfigurationError('sd', 'normal requires sd > 0')
            if self.lo is not None and self.hi is not None and not self.lo < self.hi:
                raise ConfigurationError('lo', 'truncation requires lo < hi')

    def _require(self, *names):
        for name in names:
            if getattr(self, name) is None:
                raise ConfigurationError(name, f'required for {self.kind.value} distribution')

    @classmethod
    def point(cls, value):
        return cls(DistributionKind.POINT, value=value)

    @classmethod
    def uniform(cls, lo, hi, relative=False):
        return cls(DistributionKind.UNIFORM, lo=lo, hi=hi, relative=relative)

    @classmethod
    def triangular(cls, lo, mode, hi, relative=False):
        return cls(DistributionKind.TRIANGULAR, lo=lo, mode=mode, hi=hi, relative=relative)

    @classmethod
    def normal(cls, mean, sd, lo=None, hi=None, relative=False):
        return cls(DistributionKind.NORMAL, mean=mean, sd=sd, lo=lo, hi=hi, relative=relative)

    def apply(self, draw, base):
        return base * draw if self.relative else draw


def sample_distribution(dist: Distribution, u):
    """Inverse-CDF draw for uniform variate(s) u in [0, 1).

    Truncated normals use the truncated inverse CDF, so every sample costs
    exactly one variate and streams stay aligned across parameters.
    """
    scalar = np.ndim(u) == 0
    u = np.asarray(u, dtype=float)
    kind = dist.kind

    if kind is DistributionKind.POINT:
        out = np.full_like(u, dist.value)
    elif kind is DistributionKind.UNIFORM:
        out = dist.lo + u * (dist.hi - dist.lo)
    elif kind is DistributionKind.TRIANGULAR:
        width = dist.hi - dist.lo
        if width == 0:
            out = np.full_like(u, dist.lo)
        else:
            out = stats.triang.ppf(u, (dist.mode - dist.lo) / width, loc=dist.lo, scale=width)
    elif dist.lo is None and dist.hi is None:
        # ppf(0) is -inf
        out = stats.norm.ppf(np.clip(u, np.finfo(float).tiny, 1.0), loc=dist.mean, scale=dist.sd)
    else:
        a = -np.inf if dist.lo is None else (dist.lo - dist.mean) / dist.sd
        b = np.inf if dist.hi is None else (dist.hi - dist.mean) / dist.sd
        out = stats.truncnorm.ppf(u, a, b, loc=dist.mean, scale=dist.sd)

    return float(out) if scalar else out


@dataclass(frozen=True)
class UncertaintySpec:
    parameters: Dict[str, Distribution] = field(default_factory=dict)
    samples: int = 10_000
    seed: int = 0

    def __post_init__(self):
        for name in ('samples', 'seed'):
            object.__setattr__(self, name, require_whole(name, getattr(self, name)))
        if self.samples < 1:
            raise ConfigurationError('samples', 'must be >= 1')
        if not 0 <= self.seed <= MAX_SEED:
            raise ConfigurationError('seed', 'must be a 64-bit unsigned integer')

    @property
    def paths(self):
        return sorted(self.parameters)

    def validate_paths(self, config):
        for path in self.paths:
            get_parameter(config, path)


def get_parameter(config, path: str) -> float:
    obj = config
    for part in path.split('.'):
        if part.startswith('_') or not hasattr(obj, part) or callable(getattr(obj, part)):
            raise ConfigurationError(path, 'does not resolve to a project field')
        obj = getattr(obj, part)
    if isinstance(obj, bool) or not isinstance(obj, (int, float)):
        raise ConfigurationError(path, 'is not a numeric field (unset or non-numeric)')
    return float(obj)


def set_parameter(config, path: str, value: float):
    """Copy of `config` with the field at `path` replaced; invariants re-checked."""
    head, _, rest = path.partition('.')
    if not hasattr(config, head):
        raise ConfigurationError(path, 'does not resolve to a project field')
    target = getattr(config, head)
    if not rest:
        if isinstance(target, int) and not isinstance(target, bool):
            value = int(round(value))
        return dataclasses.replace(config, **{head: value})
    try:
        if head == 'costs' and rest == 'capex':
            updated = target.with_capex(value)
        else:
            updated = set_parameter(target, rest, value)
    except ConfigurationError as e:
        raise e.with_prefix(head)
    return dataclasses.replace(config, **{head: updated})


def apply_parameters(config, values: Dict[str, float]):
    for path in sorted(values):
        config = set_parameter(config, path, values[path])
    return config
