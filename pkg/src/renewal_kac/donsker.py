"""Paired-difference random walk and the auxiliary alternating sums.

The alternating sum over a deterministic index,

    W~_n(t) = C/sqrt(n) * sum_{j <= [nt]} (-1)**(j-1) U_j,

splits into a sum of i.i.d. centred pairs ``D_j = U_{2j-1} - U_{2j}`` plus a
single boundary term, and the pair sum is the walk ``B_n`` read through the
time change ``Psi_n(t) = [nt] / (2n)``. Everything here consumes the same
draws as the renewal path, so the identities hold path by path.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import InsufficientDraws
from .kac_stroock import KacProcessParams, scaled_floor
from .renewal import RenewalPath


def _draws(source) -> np.ndarray:
    if isinstance(source, RenewalPath):
        return source.inter_arrivals
    return np.asarray(source, dtype=float)


@dataclass(frozen=True)
class PairedDifferenceSeq:
    diffs: np.ndarray
    source_count: int

    def __post_init__(self):
        if self.source_count != 2 * len(self.diffs):
            raise ValueError("source_count must be twice the number of differences")

    def __len__(self) -> int:
        return len(self.diffs)


def paired_differences(inter_arrivals) -> PairedDifferenceSeq:
    """``D_j = U_{2j-1} - U_{2j}``; a trailing unpaired draw is dropped."""
    u = _draws(inter_arrivals)
    if u.size < 2:
        raise InsufficientDraws(f"need at least 2 inter-arrivals, got {u.size}")
    m = u.size // 2
    diffs = u[0 : 2 * m : 2] - u[1 : 2 * m : 2]
    return PairedDifferenceSeq(diffs, 2 * m)


def random_walk(diffs: PairedDifferenceSeq, n: int, t: float) -> float:
    """``B_n(t) = n**-0.5 * sum_{j <= [nt]} D_j``."""
    k = scaled_floor(n, t)
    if k > len(diffs):
        raise InsufficientDraws(f"B_n needs {k} differences, only {len(diffs)} available")
    return math.fsum(diffs.diffs[:k]) / math.sqrt(n)


def _index(source, params: KacProcessParams, t: float) -> tuple[np.ndarray, int]:
    u = _draws(source)
    k = scaled_floor(params.n, t)
    if k > u.size:
        raise InsufficientDraws(f"need {k} inter-arrivals, only {u.size} available")
    return u, k


def w_tilde(source, params: KacProcessParams, t: float) -> float:
    """Alternating sum of the first ``[nt]`` draws, scaled by ``C / sqrt(n)``."""
    u, k = _index(source, params, t)
    signed = u[:k].copy()
    signed[1::2] *= -1.0
    return params.amplitude * math.fsum(signed)


def w_tilde_split(source, params: KacProcessParams, t: float) -> tuple[float, float]:
    """``(pair_part, boundary_part)`` with ``pair_part + boundary_part = w_tilde``.

    ``pair_part`` sums ``D_j`` for ``j <= [[nt]/2]`` (zero when ``[nt] < 2``);
    ``boundary_part`` is ``C U_{[nt]} / sqrt(n)`` when ``[nt]`` is odd and zero
    otherwise, including ``[nt] = 0``.
    """
    u, k = _index(source, params, t)
    m = k // 2
    pair_part = params.amplitude * math.fsum(u[0 : 2 * m : 2] - u[1 : 2 * m : 2])
    boundary_part = params.amplitude * float(u[k - 1]) if k % 2 else 0.0
    return pair_part, boundary_part


def w_tilde_tilde(source, params: KacProcessParams, t: float) -> float:
    """Pair sum without the constant: ``pair_part / C``."""
    u, k = _index(source, params, t)
    m = k // 2
    return math.fsum(u[0 : 2 * m : 2] - u[1 : 2 * m : 2]) / math.sqrt(params.n)


def psi_n(n: int, t: float) -> float:
    """``[nt] / (2n)``; within ``1/(2n)`` of ``t/2`` on ``[0, 1]``."""
    if n < 1:
        raise ValueError(f"n must be a positive integer, got {n}")
    return scaled_floor(n, t) / (2 * n)


def boundary_sup(source, params: KacProcessParams) -> float:
    """``sup_{t in [0,1]}`` of the boundary term: largest odd-indexed ``U_k``, ``k <= n``."""
    u = _draws(source)
    if u.size < params.n:
        raise InsufficientDraws(f"need {params.n} inter-arrivals, got {u.size}")
    odd = u[: params.n : 2]
    return params.amplitude * float(np.max(odd)) if odd.size else 0.0
