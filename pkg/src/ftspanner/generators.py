"""Deterministic point-set generators, including adversarial layouts."""
from __future__ import annotations

import math

import numpy as np

EXP_LINE_EPS = 2.0 ** -20


def uniform(n: int, dim: int, rng: np.random.Generator) -> np.ndarray:
    return rng.random((n, dim))


def clustered(n: int, dim: int, rng: np.random.Generator, spread: float = 0.01) -> np.ndarray:
    """Gaussian blobs around ``ceil(sqrt(n))`` uniform centres."""
    centres = rng.random((max(1, math.ceil(math.sqrt(n))), dim))
    pick = rng.integers(0, len(centres), size=n)
    return centres[pick] + spread * rng.standard_normal((n, dim))


def grid(n: int, dim: int, rng=None) -> np.ndarray:
    """First ``n`` nodes, lexicographically, of the smallest cube lattice that
    holds them, scaled to the unit cube."""
    side = 1
    while side ** dim < n:
        side += 1
    idx = np.indices((side,) * dim).reshape(dim, -1).T[:n]
    return idx / max(side - 1, 1)


def _pad(xy: np.ndarray, dim: int) -> np.ndarray:
    if dim < 2:
        raise ValueError("planar generators need dim >= 2")
    out = np.zeros((xy.shape[0], dim))
    out[:, :2] = xy
    return out


def exp_line(n: int, dim: int = 2, rng=None, eps: float = EXP_LINE_EPS) -> np.ndarray:
    """``(0,0)``, then ``(0, 2^i - eps)`` for ``i = 1..n-2``, then ``(0, -2^(n-2))``."""
    if n < 3:
        return _pad(np.array([[0.0, 0.0], [0.0, -1.0]])[:n], dim)
    m = n - 2
    ys = [0.0] + [2.0 ** i - eps for i in range(1, m + 1)] + [-(2.0 ** m)]
    return _pad(np.column_stack([np.zeros(n), ys]), dim)


def circle_center(n: int, dim: int = 2, rng=None) -> np.ndarray:
    """``n-1`` points evenly on the unit circle plus its centre."""
    ang = 2 * np.pi * np.arange(n - 1) / max(n - 1, 1)
    ring = np.column_stack([np.cos(ang), np.sin(ang)])
    return _pad(np.vstack([ring, [[0.0, 0.0]]]), dim)


def parallel_sides(n: int, dim: int = 2, rng=None) -> np.ndarray:
    """Half the points evenly on the bottom side of the unit square, the rest on the top."""
    rows = []
    for y, m in ((0.0, n - n // 2), (1.0, n // 2)):
        xs = np.linspace(0.0, 1.0, m) if m > 1 else np.full(m, 0.5)
        rows.append(np.column_stack([xs, np.full(m, y)]))
    return _pad(np.vstack(rows), dim)


GENERATORS = {
    "uniform": uniform,
    "clustered": clustered,
    "grid": grid,
    "exp-line": exp_line,
    "circle-center": circle_center,
    "parallel-sides": parallel_sides,
}


def generate(kind: str, n: int, dim: int = 2, seed: int = 0) -> np.ndarray:
    if kind not in GENERATORS:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    if n < 1:
        raise ValueError("n must be >= 1")
    return np.asarray(GENERATORS[kind](n, dim, np.random.default_rng(seed)), dtype=np.float64)
