"""Maximally stable extremal regions for glyph/icon detection.

Extremal regions are connected components of the threshold sets I <= t
(dark polarity) and of the inverted image (light polarity).  A region is
kept where its relative area growth across +-delta threshold steps is a
local minimum not exceeding max_variation.  Components are tracked across
thresholds by their anchor pixel (smallest flat index), which owns the
component from its birth until a merge hands it to a smaller anchor.
"""

from __future__ import annotations

import numpy as np
from scipy import ndimage

from ..errors import InvalidParamsError
from .components import FOUR_CONN, MapComponent, _component_from_mask


def _sweep_polarity(gray: np.ndarray, delta: int, min_area: int, max_area: int,
                    max_variation: float) -> list[tuple[int, int]]:
    """Return (anchor flat index, threshold) pairs of stable regions."""
    area_at: dict[int, np.ndarray] = {}  # anchor -> area of containing comp per level
    owns: dict[int, list[int]] = {}  # anchor -> levels where it is the comp minimum
    anchors: list[int] = []
    anchor_arr = np.empty(0, dtype=np.int64)

    for t in range(256):
        labels, n = ndimage.label(gray <= t, structure=FOUR_CONN)
        if n == 0:
            continue
        lf = labels.ravel()
        counts = np.bincount(lf, minlength=n + 1)
        uniq, first = np.unique(lf, return_index=True)
        for lab, idx in zip(uniq.tolist(), first.tolist()):
            if lab == 0:
                continue
            owns.setdefault(idx, []).append(t)
            if idx not in area_at:
                area_at[idx] = np.zeros(256, dtype=np.int64)
                anchors.append(idx)
                anchor_arr = np.asarray(anchors, dtype=np.int64)
        labs = lf[anchor_arr]
        areas = counts[labs]
        areas[labs == 0] = 0
        for idx, a in zip(anchors, areas.tolist()):
            area_at[idx][t] = a

    picked: list[tuple[int, int]] = []
    for anchor in sorted(area_at):
        series = area_at[anchor]
        var: dict[int, float] = {}
        for t in owns[anchor]:
            lo, hi = t - delta, t + delta
            if lo < 0 or hi > 255 or series[lo] <= 0 or series[t] <= 0:
                continue
            var[t] = (series[hi] - series[lo]) / series[t]
        for t, v in var.items():
            if v > max_variation or not (min_area <= series[t] <= max_area):
                continue
            vprev = var.get(t - 1, np.inf)
            vnext = var.get(t + 1, np.inf)
            # local minimum; an equal-value plateau counts once, at its start
            if v < vprev and v <= vnext:
                picked.append((anchor, t))
    return picked


def _jaccard(a: frozenset, b: frozenset) -> float:
    inter = len(a & b)
    if inter == 0:
        return 0.0
    return inter / (len(a) + len(b) - inter)


def detect_mser(
    image: np.ndarray,
    delta: int = 5,
    min_area: int = 15,
    max_area: int | None = None,
    max_variation: float = 0.25,
) -> list[MapComponent]:
    """Detect stable extremal regions of both polarities.

    max_area defaults to 1% of the image.  Near-duplicate nested regions
    (Jaccard >= 0.8) collapse to the first detected.  Inverting the image
    swaps the polarity tags but yields the same pixel sets.
    """
    if image.ndim != 2:
        raise InvalidParamsError("detect_mser expects a single-channel image")
    if max_area is None:
        max_area = max(min_area, int(0.01 * image.size))
    if min_area > max_area:
        raise InvalidParamsError(f"min_area {min_area} > max_area {max_area}")
    gray = image.astype(np.uint8)

    regions: list[MapComponent] = []
    for polarity, img in (("dark", gray), ("light", (255 - gray).astype(np.uint8))):
        h, w = img.shape
        for anchor, t in _sweep_polarity(img, delta, min_area, max_area, max_variation):
            labels, _ = ndimage.label(img <= t, structure=FOUR_CONN)
            ay, ax = divmod(anchor, w)
            comp = _component_from_mask(labels == labels[ay, ax], 0, polarity=polarity)
            regions.append(comp)

    kept: list[MapComponent] = []
    for comp in regions:
        if any(_jaccard(comp.pixels, other.pixels) >= 0.8 for other in kept):
            continue
        kept.append(comp)
    for i, comp in enumerate(kept):
        comp.id = i
    return kept
