"""Connected pixel regions of the indicator map and their geometry."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import ndimage

from ..errors import MallnavError

FOUR_CONN = np.array([[0, 1, 0], [1, 1, 1], [0, 1, 0]], dtype=bool)
EIGHT_CONN = np.ones((3, 3), dtype=bool)


@dataclass
class MapComponent:
    """A connected region: pixel set plus the measurements the road score
    (coverage/area - holes - deviation) is built from."""

    id: int
    pixels: frozenset[tuple[int, int]]  # (x, y)
    bbox: tuple[int, int, int, int]  # x, y, w, h circumscribed rectangle
    centroid: tuple[float, float]
    holes: int = 0
    coverage: int = 0
    deviation: float = 0.0
    road_score: float = 0.0
    polarity: str | None = None
    mean_color: tuple[float, ...] | None = None
    label: str | None = None  # printed shop id once OCR assigns one

    @property
    def area(self) -> int:
        """Circumscribed-rectangle area."""
        return self.bbox[2] * self.bbox[3]

    @property
    def pixel_count(self) -> int:
        return len(self.pixels)

    def mask(self, shape: tuple[int, int] | None = None, local: bool = False) -> np.ndarray:
        """Boolean raster of the pixel set; local=True crops to the bbox."""
        if local:
            x0, y0, w, h = self.bbox
            m = np.zeros((h, w), dtype=bool)
            for x, y in self.pixels:
                m[y - y0, x - x0] = True
            return m
        if shape is None:
            raise MallnavError("shape required for a full-size mask")
        m = np.zeros(shape, dtype=bool)
        for x, y in self.pixels:
            m[y, x] = True
        return m


def count_holes(local_mask: np.ndarray) -> int:
    """Connected components of the complement fully enclosed in the bbox.

    Background connectivity is 8 so diagonal leaks do not create phantom
    holes.
    """
    comp = ~local_mask
    labels, n = ndimage.label(comp, structure=EIGHT_CONN)
    if n == 0:
        return 0
    border = np.unique(
        np.concatenate([labels[0, :], labels[-1, :], labels[:, 0], labels[:, -1]])
    )
    border = set(int(b) for b in border if b != 0)
    return n - len(border)


def _component_from_mask(mask: np.ndarray, comp_id: int, **extra) -> MapComponent:
    ys, xs = np.nonzero(mask)
    if xs.size == 0:
        raise MallnavError("component has no pixels")
    x0, x1 = int(xs.min()), int(xs.max())
    y0, y1 = int(ys.min()), int(ys.max())
    bbox = (x0, y0, x1 - x0 + 1, y1 - y0 + 1)
    local = mask[y0 : y1 + 1, x0 : x1 + 1]
    return MapComponent(
        id=comp_id,
        pixels=frozenset(zip(xs.tolist(), ys.tolist())),
        bbox=bbox,
        centroid=(float(xs.mean()), float(ys.mean())),
        holes=count_holes(local),
        **extra,
    )


def components_from_mask(mask: np.ndarray, start_id: int = 0) -> list[MapComponent]:
    """Split a boolean raster into 4-connected MapComponents."""
    labels, n = ndimage.label(mask, structure=FOUR_CONN)
    return [_component_from_mask(labels == i, start_id + i - 1) for i in range(1, n + 1)]


def components_from_labels(
    label_img: np.ndarray, image: np.ndarray | None = None
) -> list[MapComponent]:
    """One MapComponent per distinct label of a total segmentation.

    Labels are expected 4-connected (as produced by srm_segment); ids are
    assigned by ascending label.  When the source image is given, each
    component records its mean color for background screening.
    """
    comps = []
    for comp_id, lab in enumerate(np.unique(label_img)):
        mask = label_img == lab
        extra = {}
        if image is not None:
            if image.ndim == 2:
                extra["mean_color"] = (float(image[mask].mean()),)
            else:
                extra["mean_color"] = tuple(float(image[..., c][mask].mean()) for c in range(image.shape[2]))
        comps.append(_component_from_mask(mask, comp_id, **extra))
    return comps
