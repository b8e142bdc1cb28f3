"""Inter-arrival laws with closed-form moments.

Every law is an immutable value object that knows its exact mean, variance and
raw ``p``-th moment. The normalizing constant of the Kac-Stroock process is
computed from these analytic values, never from Monte Carlo estimates.

Laws serialize to tagged records, e.g. ``{"kind": "gamma", "shape": 2.0,
"scale": 3.0}``; see :func:`law_from_spec`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Any, ClassVar

import numpy as np

from .errors import DegenerateLaw, InvalidLaw
from .rng import RngStream


class InterArrivalLaw:
    """Common interface of the inter-arrival law variants."""

    kind: ClassVar[str]

    @property
    def mean(self) -> float:
        raise NotImplementedError

    @property
    def variance(self) -> float:
        raise NotImplementedError

    def pth_moment(self, p: float) -> float:
        """Raw moment ``E[U**p]``; ``math.inf`` when it diverges."""
        raise NotImplementedError

    def draw(self, gen: np.random.Generator, size: int) -> np.ndarray:
        """``size`` i.i.d. draws as a float64 array."""
        raise NotImplementedError

    def scaled(self, divisor: float) -> "InterArrivalLaw":
        """Law of ``U / divisor`` (same variant, rescaled parameters)."""
        raise NotImplementedError

    def to_spec(self) -> dict[str, Any]:
        raise NotImplementedError

    def __str__(self) -> str:
        params = ", ".join(f"{k}={v}" for k, v in self.to_spec().items() if k != "kind")
        return f"{type(self).__name__}({params})"


def _positive(name: str, value: float) -> float:
    value = float(value)
    if not (math.isfinite(value) and value > 0):
        raise InvalidLaw(f"{name} must be a positive finite real, got {value!r}")
    return value


def _check_p(p: float) -> float:
    p = float(p)
    if not p > 2:
        raise ValueError(f"moment order p must exceed 2, got {p}")
    return p


@dataclass(frozen=True)
class Exponential(InterArrivalLaw):
    rate: float = 1.0
    kind: ClassVar[str] = "exponential"

    def __post_init__(self):
        object.__setattr__(self, "rate", _positive("rate", self.rate))

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    @property
    def variance(self) -> float:
        return 1.0 / self.rate**2

    def pth_moment(self, p: float) -> float:
        p = _check_p(p)
        return math.gamma(p + 1.0) / self.rate**p

    def draw(self, gen, size):
        return gen.exponential(1.0 / self.rate, size)

    def scaled(self, divisor):
        return Exponential(self.rate * divisor)

    def to_spec(self):
        return {"kind": self.kind, "rate": self.rate}


@dataclass(frozen=True)
class Gamma(InterArrivalLaw):
    shape: float
    scale: float = 1.0
    kind: ClassVar[str] = "gamma"

    def __post_init__(self):
        object.__setattr__(self, "shape", _positive("shape", self.shape))
        object.__setattr__(self, "scale", _positive("scale", self.scale))

    @property
    def mean(self) -> float:
        return self.shape * self.scale

    @property
    def variance(self) -> float:
        return self.shape * self.scale**2

    def pth_moment(self, p: float) -> float:
        p = _check_p(p)
        return self.scale**p * math.exp(math.lgamma(self.shape + p) - math.lgamma(self.shape))

    def draw(self, gen, size):
        return gen.gamma(self.shape, self.scale, size)

    def scaled(self, divisor):
        return Gamma(self.shape, self.scale / divisor)

    def to_spec(self):
        return {"kind": self.kind, "shape": self.shape, "scale": self.scale}


@dataclass(frozen=True)
class Uniform(InterArrivalLaw):
    lo: float = 0.0
    hi: float = 1.0
    kind: ClassVar[str] = "uniform"

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        if not (math.isfinite(lo) and math.isfinite(hi) and 0 <= lo < hi):
            raise InvalidLaw(f"uniform law needs 0 <= lo < hi, got lo={lo}, hi={hi}")
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)

    @property
    def mean(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def variance(self) -> float:
        return (self.hi - self.lo) ** 2 / 12.0

    def pth_moment(self, p: float) -> float:
        p = _check_p(p)
        return (self.hi ** (p + 1) - self.lo ** (p + 1)) / ((p + 1) * (self.hi - self.lo))

    def draw(self, gen, size):
        return gen.uniform(self.lo, self.hi, size)

    def scaled(self, divisor):
        return Uniform(self.lo / divisor, self.hi / divisor)

    def to_spec(self):
        return {"kind": self.kind, "lo": self.lo, "hi": self.hi}


@dataclass(frozen=True)
class DiscreteAtoms(InterArrivalLaw):
    """Finitely supported law; an atom at zero is allowed if it is not the whole mass."""

    values: tuple[float, ...]
    probs: tuple[float, ...]
    kind: ClassVar[str] = "atoms"
    _cdf: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        values = tuple(float(v) for v in self.values)
        probs = tuple(float(q) for q in self.probs)
        if not values or len(values) != len(probs):
            raise InvalidLaw("atoms law needs equally many (>= 1) values and probabilities")
        if any(not math.isfinite(v) or v < 0 for v in values):
            raise InvalidLaw("atom values must be non-negative and finite")
        if any(not math.isfinite(q) or q < 0 for q in probs) or abs(math.fsum(probs) - 1.0) > 1e-12:
            raise InvalidLaw("atom probabilities must be non-negative and sum to 1")
        if math.fsum(q for v, q in zip(values, probs) if v > 0) <= 0:
            raise InvalidLaw("law puts all its mass at 0 (P{U = 0} must be < 1)")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "probs", probs)
        cdf = np.cumsum(probs)
        cdf[-1] = 1.0
        object.__setattr__(self, "_cdf", cdf)

    @property
    def mean(self) -> float:
        return math.fsum(v * q for v, q in zip(self.values, self.probs))

    @property
    def variance(self) -> float:
        m = self.mean
        return math.fsum(q * (v - m) ** 2 for v, q in zip(self.values, self.probs))

    def pth_moment(self, p: float) -> float:
        p = _check_p(p)
        return math.fsum(q * v**p for v, q in zip(self.values, self.probs))

    def draw(self, gen, size):
        idx = np.searchsorted(self._cdf, gen.random(size), side="right")
        return np.asarray(self.values, dtype=float)[np.minimum(idx, len(self.values) - 1)]

    def scaled(self, divisor):
        return DiscreteAtoms(tuple(v / divisor for v in self.values), self.probs)

    def to_spec(self):
        return {"kind": self.kind, "values": list(self.values), "probs": list(self.probs)}


@dataclass(frozen=True)
class Pareto(InterArrivalLaw):
    """Pareto type I on ``[scale, inf)`` with tail index ``shape``.

    Kept to probe the moment condition: ``E[U**p]`` is infinite once
    ``p >= shape``. Laws with infinite mean (``shape <= 1``) are rejected.
    """

    shape: float
    scale: float = 1.0
    kind: ClassVar[str] = "pareto"

    def __post_init__(self):
        shape = _positive("shape", self.shape)
        if shape <= 1:
            raise InvalidLaw(f"pareto shape must exceed 1 (finite mean), got {shape}")
        object.__setattr__(self, "shape", shape)
        object.__setattr__(self, "scale", _positive("scale", self.scale))

    @property
    def mean(self) -> float:
        return self.shape * self.scale / (self.shape - 1)

    @property
    def variance(self) -> float:
        a = self.shape
        if a <= 2:
            return math.inf
        return self.scale**2 * a / ((a - 1) ** 2 * (a - 2))

    def pth_moment(self, p: float) -> float:
        p = _check_p(p)
        if self.shape <= p:
            return math.inf
        return self.shape * self.scale**p / (self.shape - p)

    def draw(self, gen, size):
        # numpy's pareto is the Lomax (shifted) form.
        return self.scale * (1.0 + gen.pareto(self.shape, size))

    def scaled(self, divisor):
        return Pareto(self.shape, self.scale / divisor)

    def to_spec(self):
        return {"kind": self.kind, "shape": self.shape, "scale": self.scale}


@dataclass(frozen=True)
class MomentCertificate:
    """Outcome of checking ``E[U**p] < inf`` for a given ``p > 2``."""

    p: float
    p_moment: float

    @property
    def finite(self) -> bool:
        return math.isfinite(self.p_moment)

    def to_dict(self) -> dict[str, Any]:
        return {"p": self.p, "p_moment": self.p_moment if self.finite else "infinite"}


_KINDS = {cls.kind: cls for cls in (Exponential, Gamma, Uniform, DiscreteAtoms, Pareto)}


def law_from_spec(spec: dict[str, Any]) -> InterArrivalLaw:
    """Build a law from its tagged-record form."""
    if not isinstance(spec, dict) or "kind" not in spec:
        raise InvalidLaw(f"law spec must be an object with a 'kind' field, got {spec!r}")
    params = dict(spec)
    kind = params.pop("kind")
    try:
        cls = _KINDS[kind]
    except KeyError:
        raise InvalidLaw(f"unknown law kind {kind!r}; expected one of {sorted(_KINDS)}") from None
    try:
        return cls(**params)
    except TypeError as exc:
        raise InvalidLaw(f"bad parameters for {kind} law: {exc}") from None


def sample(law: InterArrivalLaw, stream: RngStream) -> float:
    """One draw from ``law``, consuming state from ``stream``."""
    return float(law.draw(stream.generator, 1)[0])


def moments(law: InterArrivalLaw) -> tuple[float, float]:
    return law.mean, law.variance


def pth_moment(law: InterArrivalLaw, p: float) -> float:
    return law.pth_moment(p)


def certify(law: InterArrivalLaw, p: float) -> MomentCertificate:
    return MomentCertificate(float(p), law.pth_moment(p))


def kac_constant(law: InterArrivalLaw) -> float:
    """``C = sqrt(E[U] / Var(U))``.

    Raises :class:`DegenerateLaw` for deterministic laws (zero variance) and
    for laws with infinite variance, where ``C`` would collapse to 0.
    """
    mean, var = moments(law)
    if var == 0:
        raise DegenerateLaw(f"{law} has zero variance; the normalizing constant is undefined")
    if not math.isfinite(var):
        raise DegenerateLaw(f"{law} has infinite variance; the normalizing constant is undefined")
    return math.sqrt(mean / var)
