"""Continuous phase tracking along a path in C.

``track_phase`` samples a function along a parametrised segment and bisects
every sub-interval whose phase increment is not safely below ``max_jump``.
Values may be vectors (one column per character); refinement is shared, and
columns that cannot be resolved down to ``min_step`` are reported as failed
instead of aborting the others.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import PathError

MAX_JUMP = math.pi / 4
MIN_STEP = 1e-7


@dataclass
class PhaseTrack:
    change: np.ndarray  # total phase change per column
    failed: np.ndarray  # bool per column
    where: list  # offending path point per failed column (None otherwise)
    evaluations: int
    samples: int
    start_values: np.ndarray
    end_values: np.ndarray


def track_phase(func, path, u0: float, u1: float, step: float, *, max_jump: float = MAX_JUMP,
                min_step: float = MIN_STEP, max_samples: int = 200000) -> PhaseTrack:
    """Track arg func(path(u)) for u from u0 to u1.

    ``func`` takes an array of m complex points and returns an (m,) or (m, k)
    array.  Returns the summed principal increments per column.
    """
    n0 = max(int(math.ceil(abs(u1 - u0) / step)), 1)
    u = np.linspace(u0, u1, n0 + 1)
    vals = np.asarray(func(path(u)))
    squeeze = vals.ndim == 1
    if squeeze:
        vals = vals[:, None]
    k = vals.shape[1]
    evaluations = len(u)
    failed = np.zeros(k, dtype=bool)
    where: list = [None] * k
    settled = np.zeros(len(u) - 1, dtype=bool)  # intervals accepted below min_step

    while True:
        with np.errstate(divide="ignore", invalid="ignore"):
            jumps = np.angle(vals[1:] / vals[:-1])
        zero_hit = ~np.isfinite(jumps) | (vals[1:] == 0) | (vals[:-1] == 0)
        bad_cells = (np.abs(jumps) >= max_jump) | zero_hit
        bad_cells[:, failed] = False
        bad = bad_cells.any(axis=1) & ~settled
        if not bad.any():
            break
        widths = np.abs(np.diff(u))
        tiny = bad & (widths < min_step)
        if tiny.any():
            for i in np.nonzero(tiny)[0]:
                cols = np.nonzero(bad_cells[i])[0]
                for c in cols:
                    if not failed[c]:
                        failed[c] = True
                        where[c] = complex(path(np.array([0.5 * (u[i] + u[i + 1])]))[0])
                settled[i] = True
            bad &= ~tiny
            if not bad.any():
                continue
        idx = np.nonzero(bad)[0]
        mids = 0.5 * (u[idx] + u[idx + 1])
        new = np.asarray(func(path(mids)))
        if squeeze:
            new = new[:, None]
        evaluations += len(mids)
        u = np.insert(u, idx + 1, mids)
        vals = np.insert(vals, idx + 1, new, axis=0)
        settled = np.insert(settled, idx + 1, settled[idx])
        if len(u) > max_samples:
            raise PathError("phase tracking exceeded the sample budget", where=complex(path(mids[:1])[0]))

    with np.errstate(divide="ignore", invalid="ignore"):
        jumps = np.angle(vals[1:] / vals[:-1])
    jumps[~np.isfinite(jumps)] = 0.0
    change = jumps.sum(axis=0)
    change[failed] = np.nan
    return PhaseTrack(
        change=change,
        failed=failed,
        where=where,
        evaluations=evaluations,
        samples=len(u),
        start_values=vals[0],
        end_values=vals[-1],
    )


def segment(a: complex, b: complex):
    """Path u -> a + u (b - a), u in [0, 1]."""
    a, b = complex(a), complex(b)
    return lambda u: a + np.asarray(u) * (b - a)


def rectangle_winding(func, sigma1: float, sigma2: float, t1: float, t2: float, step: float, **kw):
    """Total phase change of func around the positively oriented boundary of
    [sigma1, sigma2] x [t1, t2], divided by 2 pi.  Returns (raw winding per column, failed mask, per-side tracks)."""
    corners = [complex(sigma1, t1), complex(sigma2, t1), complex(sigma2, t2), complex(sigma1, t2)]
    min_step = kw.pop("min_step", MIN_STEP)
    tracks = []
    total = None
    for a, b in zip(corners, corners[1:] + corners[:1]):
        length = max(abs(b - a), 1e-300)
        tr = track_phase(func, segment(a, b), 0.0, 1.0, step / length,
                         min_step=min_step / length, **kw)
        tracks.append(tr)
        total = tr.change if total is None else total + tr.change
    failed = np.zeros_like(tracks[0].failed)
    for tr in tracks:
        failed |= tr.failed
    return total / (2 * math.pi), failed, tracks
