"""Synthetic obstacle masks.

These stand in for geographic masks and are not copies of any real map:
``lakes`` scatters round water bodies, ``streets`` leaves only a street grid
open, ``canyon`` is a cluster of rectangular buildings used with line-of-sight pruning.
"""

from __future__ import annotations

import numpy as np

from .geometry import Mask

RESOLUTION = 200  # pixels per side; 5 m per pixel on the default 1000 m field


def lakes(seed: int = 7, size: int = RESOLUTION, hole_fraction: float = 0.2) -> Mask:
    rng = np.random.default_rng(seed)
    yy, xx = np.mgrid[0:size, 0:size]
    holes = np.zeros((size, size), dtype=bool)
    while holes.mean() < hole_fraction:
        cx, cy = rng.uniform(0, size, 2)
        rx, ry = rng.uniform(0.04, 0.12, 2) * size
        holes |= ((xx - cx) / rx) ** 2 + ((yy - cy) / ry) ** 2 <= 1.0
    return Mask(holes, name="lakes")


def streets(seed: int = 11, size: int = RESOLUTION, spacing: int = 20, width: int = 4, drop: float = 0.25) -> Mask:
    """Open corridors ``width`` pixels wide every ``spacing`` pixels.

    A fraction ``drop`` of the street segments between crossings is closed,
    which leaves dead-end alleys for greedy routing to run into.
    """
    rng = np.random.default_rng(seed)
    holes = np.ones((size, size), dtype=bool)
    lines = range(0, size, spacing)
    for i in lines:
        holes[i : i + width, :] = False
        holes[:, i : i + width] = False
    for i in lines:
        for j in lines:
            if rng.random() < drop:
                holes[i : i + width, j + width : j + spacing] = True
            if rng.random() < drop:
                holes[j + width : j + spacing, i : i + width] = True
    return Mask(holes, name="streets")


def canyon(seed: int = 13, size: int = RESOLUTION, hole_fraction: float = 0.55, lo: int = 10, hi: int = 30) -> Mask:
    """Overlapping rectangular buildings, ``lo``..``hi`` pixels a side, until
    ``hole_fraction`` of the area is built up; links must not cross them."""
    rng = np.random.default_rng(seed)
    holes = np.zeros((size, size), dtype=bool)
    while holes.mean() < hole_fraction:
        h, w = rng.integers(lo, hi, 2)
        y, x = rng.integers(0, size, 2)
        holes[y : y + h, x : x + w] = True
    return Mask(holes, edge_pruning=True, name="canyon")


BUILTIN = {"lakes": lakes, "streets": streets, "canyon": canyon}


def load_mask(spec: str, edge_pruning: bool | None = None) -> Mask:
    """A builtin name or a PGM path; ``edge_pruning`` overrides the default."""
    if spec in BUILTIN:
        mask = BUILTIN[spec]()
    else:
        mask = Mask.from_pgm(spec, edge_pruning=bool(edge_pruning))
    if edge_pruning is not None and mask.edge_pruning != edge_pruning:
        mask = Mask(mask.holes, edge_pruning=edge_pruning, name=mask.name)
    return mask
