"""Text/icon removal: component screening, RLSA grouping, diffusion inpaint."""

from __future__ import annotations

import numpy as np

from ..errors import NothingToAnchorError
from .components import MapComponent


def component_eccentricity(comp: MapComponent) -> float:
    """Eccentricity from second-order moments of the pixel set, in [0, 1)."""
    xs = np.array([p[0] for p in comp.pixels], dtype=np.float64)
    ys = np.array([p[1] for p in comp.pixels], dtype=np.float64)
    if xs.size < 2:
        return 0.0
    cov = np.cov(np.stack([xs, ys]))
    evals = np.linalg.eigvalsh(cov)
    lam2, lam1 = float(evals[0]), float(evals[1])
    if lam1 <= 0:
        return 0.0
    return float(np.sqrt(max(0.0, 1.0 - max(lam2, 0.0) / lam1)))


def filter_components(
    comps: list[MapComponent],
    size_range: tuple[int, int] = (15, 10**9),
    eccentricity_max: float = 0.995,
    aspect_range: tuple[float, float] = (0.1, 10.0),
) -> list[MapComponent]:
    """Keep components passing all of size, eccentricity and aspect checks.

    Size is the pixel count, aspect is bbox w/h.
    """
    kept = []
    for comp in comps:
        n = comp.pixel_count
        if not (size_range[0] <= n <= size_range[1]):
            continue
        w, h = comp.bbox[2], comp.bbox[3]
        aspect = w / h
        if not (aspect_range[0] <= aspect <= aspect_range[1]):
            continue
        if component_eccentricity(comp) > eccentricity_max:
            continue
        kept.append(comp)
    return kept


def _bbox_gap_overlap(a, b):
    ax, ay, aw, ah = a
    bx, by, bw, bh = b
    h_gap = max(ax, bx) - min(ax + aw, bx + bw)
    v_gap = max(ay, by) - min(ay + ah, by + bh)
    v_overlap = min(ay + ah, by + bh) - max(ay, by)
    h_overlap = min(ax + aw, bx + bw) - max(ax, bx)
    return h_gap, v_gap, h_overlap, v_overlap


def rlsa_cluster(
    comps: list[MapComponent], h_gap: int, v_gap: int
) -> list[list[MapComponent]]:
    """Run-length-smoothing style grouping of nearby components.

    Two components link when their bboxes are within h_gap horizontally
    while overlapping vertically, or within v_gap vertically while
    overlapping horizontally; links close transitively.  Group order
    follows the first member's input position.
    """
    n = len(comps)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            hg, vg, ho, vo = _bbox_gap_overlap(comps[i].bbox, comps[j].bbox)
            near_h = hg <= h_gap and vo > 0
            near_v = vg <= v_gap and ho > 0
            if near_h or near_v:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[max(ri, rj)] = min(ri, rj)

    groups: dict[int, list[MapComponent]] = {}
    for i, comp in enumerate(comps):
        groups.setdefault(find(i), []).append(comp)
    return [groups[r] for r in sorted(groups)]


def group_bbox(group: list[MapComponent]) -> tuple[int, int, int, int]:
    x0 = min(c.bbox[0] for c in group)
    y0 = min(c.bbox[1] for c in group)
    x1 = max(c.bbox[0] + c.bbox[2] for c in group)
    y1 = max(c.bbox[1] + c.bbox[3] for c in group)
    return (x0, y0, x1 - x0, y1 - y0)


def mask_from_components(
    comps: list[MapComponent], shape: tuple[int, int], grow: int = 1
) -> np.ndarray:
    """Union mask of component pixels, optionally grown by a square ring
    so anti-aliased fringes get inpainted too."""
    mask = np.zeros(shape, dtype=bool)
    for comp in comps:
        for x, y in comp.pixels:
            mask[y, x] = True
    for _ in range(grow):
        grown = mask.copy()
        grown[1:, :] |= mask[:-1, :]
        grown[:-1, :] |= mask[1:, :]
        grown[:, 1:] |= mask[:, :-1]
        grown[:, :-1] |= mask[:, 1:]
        mask = grown
    return mask


def inpaint_regions(
    image: np.ndarray, mask: np.ndarray, iters: int = 500, tol: float = 1e-3
) -> np.ndarray:
    """Fill masked pixels by iterative 4-neighbor average diffusion.

    Unmasked pixels are bit-identical to the input.  Stops when the
    largest per-iteration change drops below tol or after iters rounds.
    """
    if mask.shape != image.shape[:2]:
        raise NothingToAnchorError("mask shape differs from image")
    if bool(mask.all()):
        raise NothingToAnchorError("mask covers the whole image; nothing to anchor on")
    out = image.copy()
    if not mask.any():
        return out

    chans = image if image.ndim == 3 else image[..., None]
    filled = chans.astype(np.float64).copy()
    anchor_mean = chans[~mask].reshape(-1, filled.shape[2]).mean(axis=0)
    filled[mask] = anchor_mean

    for _ in range(iters):
        padded = np.pad(filled, ((1, 1), (1, 1), (0, 0)), mode="edge")
        avg = (
            padded[:-2, 1:-1] + padded[2:, 1:-1] + padded[1:-1, :-2] + padded[1:-1, 2:]
        ) / 4.0
        delta = np.abs(avg[mask] - filled[mask]).max() if mask.any() else 0.0
        filled[mask] = avg[mask]
        if delta < tol:
            break

    if np.issubdtype(image.dtype, np.integer):
        result = np.clip(np.rint(filled), 0, 255).astype(image.dtype)
    else:
        result = filled.astype(image.dtype)
    if image.ndim == 2:
        result = result[..., 0]
    out[mask] = result[mask]
    return out
