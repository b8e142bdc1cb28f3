"""Exact evaluation of the Kac-Stroock process and its decomposition.

For a renewal path with arrivals ``S_k`` and count ``L``,

    X_n(t) = C sqrt(n) * integral_0^t (-1)**L(n u) du
           = W_n(t) + R_n(t),
    W_n(t) = C/sqrt(n) * sum_{j <= L(nt)} (-1)**(j-1) U_j,
    R_n(t) = C/sqrt(n) * (-1)**L(nt) * (nt - S_{L(nt)}).

All values come from cached prefix sums and a binary search; there is no
numerical quadrature outside the test oracle :func:`evaluate_x_quadrature`.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from typing import IO, Any, Sequence

import numpy as np

from .distributions import InterArrivalLaw, kac_constant
from .errors import HorizonTooShort, InsufficientDraws
from .renewal import RenewalPath

DEFAULT_GRID = 1024


@dataclass(frozen=True)
class KacProcessParams:
    n: int
    C: float

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"scale index n must be a positive integer, got {self.n!r}")
        if not (math.isfinite(self.C) and self.C > 0):
            raise ValueError(f"normalizing constant C must be positive, got {self.C!r}")
        object.__setattr__(self, "n", int(self.n))
        object.__setattr__(self, "C", float(self.C))

    @classmethod
    def for_law(cls, law: InterArrivalLaw, n: int) -> "KacProcessParams":
        return cls(n, kac_constant(law))

    @property
    def amplitude(self) -> float:
        """``C / sqrt(n)``, the factor in front of every component."""
        return self.C / math.sqrt(self.n)


def scaled_floor(n: int, t: float) -> int:
    """``floor(n * t)`` for ``t >= 0``, robust to rounding of rational ``t``.

    A product within a few ulps of an integer is taken to be that integer, so
    ``t = k / n`` computed in floating point maps back to ``k``.
    """
    x = n * t
    k = round(x)
    if abs(x - k) <= 4 * math.ulp(max(1.0, abs(x))):
        return int(k)
    return math.floor(x)


def scaled_floor_array(n: int, t) -> np.ndarray:
    """Vectorized :func:`scaled_floor`."""
    x = n * np.asarray(t, dtype=float)
    k = np.rint(x)
    snap = np.abs(x - k) <= 4 * np.spacing(np.maximum(1.0, np.abs(x)))
    return np.where(snap, k, np.floor(x)).astype(np.int64)


def grid_times(grid_size: int) -> np.ndarray:
    return np.arange(grid_size + 1) / grid_size


def grid_scaled_times(n: int, grid_size: int) -> np.ndarray:
    """``n * i / G`` for ``i = 0..G``, each correctly rounded from the exact rational."""
    return (np.arange(grid_size + 1, dtype=np.int64) * n) / grid_size


def _scaled_time(path: RenewalPath, params: KacProcessParams, t) -> np.ndarray:
    t = np.asarray(t, dtype=float)
    if np.any(t < 0) or np.any(np.isnan(t)):
        raise ValueError("time arguments must be non-negative")
    s = params.n * t
    if np.any(s > path.horizon):
        raise HorizonTooShort(
            f"n*t = {np.max(s)} exceeds path horizon {path.horizon}; simulate to at least n*t"
        )
    return s


def _components(path: RenewalPath, params: KacProcessParams, s: np.ndarray):
    """Return ``(L, W, R)`` at scaled times ``s = n t`` (already checked)."""
    count = np.searchsorted(path.arrivals, s, side="right")
    amp = params.amplitude
    w = amp * path.alternating_sums[count]
    sign = np.where(count % 2 == 0, 1.0, -1.0)
    r = amp * sign * (s - path.partial_sums[count])
    return count, w, r


def evaluate_x(path: RenewalPath, params: KacProcessParams, t: float) -> float:
    """``X_n(t)`` via the closed-form split into ``W_n + R_n``.

    ``t`` is not clamped to ``[0, 1]``; any ``t`` with ``n t <= horizon`` is
    accepted (the scaling identity needs raw time arguments).
    """
    _, w, r = _components(path, params, _scaled_time(path, params, t))
    return float(w + r)


def w_component(path: RenewalPath, params: KacProcessParams, t: float) -> float:
    _, w, _ = _components(path, params, _scaled_time(path, params, t))
    return float(w)


def r_component(path: RenewalPath, params: KacProcessParams, t: float) -> float:
    _, _, r = _components(path, params, _scaled_time(path, params, t))
    return float(r)


def r_tilde(path: RenewalPath, params: KacProcessParams, t: float) -> float:
    """``C/sqrt(n) * U_{L(nt)+1}``, the overshoot bound on ``|R_n(t)|``."""
    s = _scaled_time(path, params, t)
    count = int(np.searchsorted(path.arrivals, s, side="right"))
    return params.amplitude * float(path.inter_arrivals[count])


def evaluate_x_quadrature(path: RenewalPath, params: KacProcessParams, t: float) -> float:
    """Test oracle: integrate the sign function segment by segment.

    ``[0, n t]`` is partitioned at the arrivals and the signed segment lengths
    are summed exactly with :func:`math.fsum`. Shares nothing with
    :func:`evaluate_x` except the stored arrival times.
    """
    s_end = float(_scaled_time(path, params, t))
    pieces = []
    left, sign = 0.0, 1.0
    for arrival in path.arrivals:
        if arrival > s_end:
            break
        pieces.append(sign * (arrival - left))
        left, sign = arrival, -sign
    pieces.append(sign * (s_end - left))
    return params.amplitude * math.fsum(pieces)


def r_tilde_tilde(inter_arrivals, params: KacProcessParams, t: float) -> float:
    """``C/sqrt(n) * U_{floor(n t)+1}`` at a deterministic index."""
    u = np.asarray(inter_arrivals, dtype=float)
    k = scaled_floor(params.n, t)
    if k + 1 > u.size:
        raise InsufficientDraws(f"need U_{k + 1}, only {u.size} inter-arrivals available")
    return params.amplitude * float(u[k])


def r_tilde_tilde_values(inter_arrivals, params: KacProcessParams, t) -> np.ndarray:
    """Vectorized :func:`r_tilde_tilde` over an array of times."""
    u = np.asarray(inter_arrivals, dtype=float)
    k = scaled_floor_array(params.n, t)
    if np.any(k + 1 > u.size):
        raise InsufficientDraws(f"need U_{int(np.max(k)) + 1}, only {u.size} inter-arrivals available")
    return params.amplitude * u[k]


def r_tilde_tilde_sup(inter_arrivals, params: KacProcessParams) -> float:
    """``sup_t C/sqrt(n) U_{[nt]+1} = C/sqrt(n) * max(U_1..U_{n+1})``."""
    u = np.asarray(inter_arrivals, dtype=float)
    if u.size < params.n + 1:
        raise InsufficientDraws(f"need {params.n + 1} inter-arrivals, got {u.size}")
    return params.amplitude * float(np.max(u[: params.n + 1]))


def sup_remainder(path: RenewalPath, params: KacProcessParams) -> float:
    """Exact ``sup_{t in [0,1]} |R_n(t)|`` (not grid based).

    On ``[S_k, S_{k+1})`` the overshoot ``nt - S_k`` increases towards
    ``min(S_{k+1}, n) - S_k``, so the supremum is the largest such gap.
    """
    n = params.n
    _scaled_time(path, params, 1.0)
    last = int(np.searchsorted(path.arrivals, n, side="right"))
    s = path.partial_sums
    gaps = np.minimum(s[1 : last + 2], n) - s[: last + 1]
    return params.amplitude * float(np.max(gaps))


def sup_r_tilde(path: RenewalPath, params: KacProcessParams) -> float:
    """Exact ``sup_{t in [0,1]} C/sqrt(n) U_{L(nt)+1}``."""
    _scaled_time(path, params, 1.0)
    last = int(np.searchsorted(path.arrivals, params.n, side="right"))
    return params.amplitude * float(np.max(path.inter_arrivals[: last + 1]))


def phi_branch_holds(path: RenewalPath, params: KacProcessParams) -> bool:
    """Whether ``L(n) / n <= 1`` on this path (first branch of the time change)."""
    _scaled_time(path, params, 1.0)
    return int(np.searchsorted(path.arrivals, params.n, side="right")) <= params.n


def phi_n(path: RenewalPath, params: KacProcessParams, mu: float, t):
    """Time change: ``L(nt)/n`` when ``L(n) <= n``, otherwise ``t / mu``.

    Accepts a scalar or an array of times; the branch is decided once from
    ``L(n)``.
    """
    scalar = np.ndim(t) == 0
    t = np.asarray(t, dtype=float)
    first = phi_branch_holds(path, params)
    s = _scaled_time(path, params, t)
    if first:
        out = np.searchsorted(path.arrivals, s, side="right") / params.n
    else:
        out = t / mu
    return float(out) if scalar else out


def scaled_coupling_check(
    path: RenewalPath, law: InterArrivalLaw, rho: float, n: int, t: float
) -> tuple[float, float]:
    """Both sides of ``X_n(t) = sqrt(rho mu) * X~_n(t / (rho mu))``.

    ``X~`` is built from the same draws rescaled to ``U_k / (rho mu)`` and
    normalized with the rescaled law's own constant. Returns ``(lhs, rhs)``.
    """
    if not 0 < rho < 1:
        raise ValueError(f"rho must lie in (0, 1), got {rho}")
    factor = rho * law.mean
    lhs = evaluate_x(path, KacProcessParams(n, kac_constant(law)), t)
    coupled = RenewalPath(path.inter_arrivals / factor, path.horizon / factor)
    tilde = KacProcessParams(n, kac_constant(law.scaled(factor)))
    rhs = math.sqrt(factor) * evaluate_x(coupled, tilde, t / factor)
    return lhs, rhs


@dataclass
class PathEvaluation:
    """``X_n``, ``W_n`` and ``R_n`` sampled on a time grid in ``[0, 1]``."""

    grid: np.ndarray
    x_values: np.ndarray
    w_values: np.ndarray
    r_values: np.ndarray
    r_tilde_values: np.ndarray | None = None
    params: KacProcessParams | None = None
    metadata: dict[str, Any] = field(default_factory=dict)

    def component(self, name: str) -> np.ndarray:
        return {"x": self.x_values, "w": self.w_values, "r": self.r_values}[name]

    def write_csv(self, fh: IO[str]) -> None:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["t", "x", "w", "r"])
        for row in zip(self.grid, self.x_values, self.w_values, self.r_values):
            writer.writerow([f"{v:.17g}" for v in row])

    def to_dict(self) -> dict[str, Any]:
        out: dict[str, Any] = {
            "t": self.grid.tolist(),
            "x": self.x_values.tolist(),
            "w": self.w_values.tolist(),
            "r": self.r_values.tolist(),
        }
        if self.params is not None:
            out["params"] = {"n": self.params.n, "C": self.params.C}
        out.update(self.metadata)
        return out

    def write_json(self, fh: IO[str]) -> None:
        json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")


def evaluate_path(
    path: RenewalPath,
    params: KacProcessParams,
    grid: int | np.ndarray = DEFAULT_GRID,
    metadata: dict[str, Any] | None = None,
    extra_times: Sequence[float] = (),
) -> PathEvaluation:
    """Evaluate all components on a grid.

    An integer ``grid`` means the uniform grid ``i / grid``; its scaled times
    ``n i / grid`` are formed from exact integers so that arrivals sitting on
    a grid point are hit exactly. ``extra_times`` not already on the grid are
    merged in (diagnostics probing e.g. ``t = 0.3`` need them).
    """
    if isinstance(grid, (int, np.integer)):
        if grid < 1:
            raise ValueError("grid size must be positive")
        times = grid_times(int(grid))
        s = grid_scaled_times(params.n, int(grid))
    else:
        times = np.asarray(grid, dtype=float)
        s = params.n * times
    extra = np.setdiff1d(np.asarray(extra_times, dtype=float), times)
    if extra.size:
        times = np.concatenate((times, extra))
        s = np.concatenate((s, params.n * extra))
        order = np.argsort(times, kind="stable")
        times, s = times[order], s[order]
    if np.any(times < 0) or np.any(s > path.horizon):
        raise HorizonTooShort(f"grid needs n*t up to {np.max(s)}, path horizon is {path.horizon}")
    count, w, r = _components(path, params, s)
    r_tilde_values = params.amplitude * path.inter_arrivals[count]
    return PathEvaluation(times, w + r, w, r, r_tilde_values, params, dict(metadata or {}))
