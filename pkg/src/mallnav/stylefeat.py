"""Per-image style features: random patch sampling + bin-wise max pooling.

Patch embeddings come either from MGFT feature files produced by the
exporter tool, or from the built-in color/gradient histogram descriptor so
the pipeline runs self-contained.  Bin-wise max is the aggregation; mean
pooling exists only behind a flag for ablation.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .errors import (
    EmptyInputError,
    FeatureDimensionMismatchError,
    ImageTooSmallError,
    MalformedFeatureFileError,
)

MGFT_MAGIC = b"MGFT"
MGFT_VERSION = 1
MGFT_VERSION_META = 2  # adds a JSON metadata block after the fixed header

BUILTIN_COLOR_BINS = 64  # 4 x 4 x 4 joint RGB histogram
BUILTIN_ORIENT_BINS = 64
BUILTIN_DIM = BUILTIN_COLOR_BINS + BUILTIN_ORIENT_BINS


@dataclass(frozen=True)
class PatchSpec:
    """How patches are drawn from an image.

    The exporter replicates this sampling procedure exactly: a fresh
    ``numpy.random.default_rng(seed)`` drawing, per patch, first the x
    then the y of the top-left corner as inclusive-range integers.
    """

    count: int = 16
    side_fraction: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.count < 1:
            raise ValueError(f"patch count must be >= 1, got {self.count}")
        if not (0.0 < self.side_fraction <= 1.0):
            raise ValueError(f"side_fraction must be in (0,1], got {self.side_fraction}")


@dataclass(frozen=True)
class StyleFeature:
    values: np.ndarray
    source: str  # exporter-file | builtin-descriptor

    def __post_init__(self):
        if not np.all(np.isfinite(self.values)):
            raise ValueError("style feature contains non-finite values")

    def __len__(self) -> int:
        return len(self.values)


def patch_side(width: int, height: int, spec: PatchSpec) -> int:
    return max(1, int(round(spec.side_fraction * min(width, height))))


def sample_patch_coords(width: int, height: int, spec: PatchSpec) -> list[tuple[int, int, int]]:
    """Seeded (x, y, side) boxes; identical inputs give identical boxes."""
    side = patch_side(width, height, spec)
    if width < side or height < side:
        raise ImageTooSmallError(f"image {width}x{height} smaller than patch {side}")
    rng = np.random.default_rng(spec.seed)
    coords = []
    for _ in range(spec.count):
        x = int(rng.integers(0, width - side + 1))
        y = int(rng.integers(0, height - side + 1))
        coords.append((x, y, side))
    return coords


def sample_patches(image: np.ndarray, spec: PatchSpec) -> list[np.ndarray]:
    """Cut spec.count square patches at seeded uniform positions."""
    h, w = image.shape[:2]
    return [image[y : y + s, x : x + s] for x, y, s in sample_patch_coords(w, h, spec)]


def builtin_descriptor(patch: np.ndarray) -> np.ndarray:
    """128-dim color + gradient-orientation histogram, L2-normalized.

    First 64 bins: joint 4x4x4 RGB histogram.  Last 64 bins: gradient
    orientation histogram over [0, pi), magnitude weighted, computed on
    the grayscale patch with central differences.  Deterministic.
    """
    if patch.size == 0:
        raise EmptyInputError("empty patch")
    if patch.ndim == 2:
        rgb = np.stack([patch] * 3, axis=-1).astype(np.float64)
    else:
        rgb = patch[..., :3].astype(np.float64)

    q = np.clip((rgb // 64).astype(np.int64), 0, 3)
    joint = (q[..., 0] * 16 + q[..., 1] * 4 + q[..., 2]).ravel()
    color_hist = np.bincount(joint, minlength=BUILTIN_COLOR_BINS).astype(np.float64)
    color_hist /= max(1, joint.size)

    gray = rgb @ np.array([0.299, 0.587, 0.114])
    if gray.shape[0] < 2 or gray.shape[1] < 2:
        gy = np.zeros_like(gray)
        gx = np.zeros_like(gray)
    else:
        gy, gx = np.gradient(gray)
    mag = np.hypot(gx, gy)
    orient = np.mod(np.arctan2(gy, gx), np.pi)
    bins = np.minimum(
        (orient / np.pi * BUILTIN_ORIENT_BINS).astype(np.int64), BUILTIN_ORIENT_BINS - 1
    )
    grad_hist = np.bincount(
        bins.ravel(), weights=mag.ravel(), minlength=BUILTIN_ORIENT_BINS
    )
    total = grad_hist.sum()
    if total > 0:
        grad_hist = grad_hist / total

    vec = np.concatenate([color_hist, grad_hist])
    norm = np.linalg.norm(vec)
    return vec / norm if norm > 0 else vec


def aggregate_style(patch_features: list[np.ndarray], mode: str = "max") -> StyleFeature:
    """Pool patch vectors into one style vector (component-wise max).

    ``mode='mean'`` is the ablation alternative only.
    """
    if not patch_features:
        raise EmptyInputError("no patch features to aggregate")
    dims = {len(v) for v in patch_features}
    if len(dims) != 1:
        raise FeatureDimensionMismatchError(f"mixed patch feature dimensions: {sorted(dims)}")
    stack = np.stack([np.asarray(v, dtype=np.float64) for v in patch_features])
    if mode == "max":
        values = stack.max(axis=0)
    elif mode == "mean":
        values = stack.mean(axis=0)
    else:
        raise ValueError(f"unknown aggregation mode {mode!r}")
    return StyleFeature(values=values, source="builtin-descriptor")


def style_feature_from_image(
    image: np.ndarray, spec: PatchSpec, mode: str = "max"
) -> StyleFeature:
    """Sample patches, embed with the built-in descriptor, pool."""
    feats = [builtin_descriptor(p) for p in sample_patches(image, spec)]
    return aggregate_style(feats, mode=mode)


# ---------------------------------------------------------------------------
# MGFT feature files (shared wire format with the exporter)
#
# header: magic "MGFT" | u16 version | u32 dim | u16 patch count
# version 2 only: u32 metadata length | UTF-8 JSON metadata
# per image: u16 id length | id UTF-8 bytes | patch_count * dim f32 LE
# ---------------------------------------------------------------------------

_HEADER = struct.Struct("<4sHIH")
_U16 = struct.Struct("<H")
_U32 = struct.Struct("<I")


def write_patch_features(
    path,
    entries: list[tuple[str, list[np.ndarray]]],
    metadata: dict | None = None,
) -> None:
    """Write per-image patch features in the MGFT format.

    Dimension and patch count are taken from the first entry and enforced
    on the rest.
    """
    if not entries:
        raise EmptyInputError("no entries to write")
    patch_count = len(entries[0][1])
    dim = len(entries[0][1][0])
    version = MGFT_VERSION_META if metadata is not None else MGFT_VERSION
    with open(path, "wb") as fh:
        fh.write(_HEADER.pack(MGFT_MAGIC, version, dim, patch_count))
        if metadata is not None:
            import json

            blob = json.dumps(metadata, sort_keys=True, separators=(",", ":")).encode("utf-8")
            fh.write(_U32.pack(len(blob)))
            fh.write(blob)
        for image_id, vectors in entries:
            if len(vectors) != patch_count:
                raise FeatureDimensionMismatchError(
                    f"{image_id}: {len(vectors)} patches, file fixes {patch_count}"
                )
            arr = np.stack([np.asarray(v, dtype=np.float32) for v in vectors])
            if arr.shape[1] != dim:
                raise FeatureDimensionMismatchError(
                    f"{image_id}: dimension {arr.shape[1]}, file fixes {dim}"
                )
            ident = image_id.encode("utf-8")
            fh.write(_U16.pack(len(ident)))
            fh.write(ident)
            fh.write(arr.astype("<f4").tobytes())


@dataclass
class FeatureFile:
    dim: int
    patch_count: int
    entries: list[tuple[str, list[np.ndarray]]]
    metadata: dict | None = None


def read_feature_file(path) -> FeatureFile:
    with open(path, "rb") as fh:
        raw = fh.read()
    if len(raw) < _HEADER.size:
        raise MalformedFeatureFileError(f"{path}: truncated header")
    magic, version, dim, patch_count = _HEADER.unpack_from(raw, 0)
    if magic != MGFT_MAGIC:
        raise MalformedFeatureFileError(f"{path}: bad magic {magic!r}")
    if version not in (MGFT_VERSION, MGFT_VERSION_META):
        raise MalformedFeatureFileError(f"{path}: unsupported version {version}")
    if dim == 0 or patch_count == 0:
        raise MalformedFeatureFileError(f"{path}: zero dimension or patch count")
    pos = _HEADER.size
    metadata = None
    if version == MGFT_VERSION_META:
        if pos + _U32.size > len(raw):
            raise MalformedFeatureFileError(f"{path}: truncated metadata length")
        (meta_len,) = _U32.unpack_from(raw, pos)
        pos += _U32.size
        if pos + meta_len > len(raw):
            raise MalformedFeatureFileError(f"{path}: truncated metadata block")
        import json

        try:
            metadata = json.loads(raw[pos : pos + meta_len].decode("utf-8"))
        except (UnicodeDecodeError, ValueError) as exc:
            raise MalformedFeatureFileError(f"{path}: bad metadata block: {exc}") from exc
        pos += meta_len

    block = 4 * dim * patch_count
    entries: list[tuple[str, list[np.ndarray]]] = []
    while pos < len(raw):
        if pos + _U16.size > len(raw):
            raise MalformedFeatureFileError(f"{path}: truncated id length at byte {pos}")
        (id_len,) = _U16.unpack_from(raw, pos)
        pos += _U16.size
        if pos + id_len + block > len(raw):
            raise MalformedFeatureFileError(f"{path}: truncated record at byte {pos}")
        image_id = raw[pos : pos + id_len].decode("utf-8")
        pos += id_len
        arr = np.frombuffer(raw[pos : pos + block], dtype="<f4").reshape(patch_count, dim)
        pos += block
        entries.append((image_id, [arr[i].astype(np.float32) for i in range(patch_count)]))
    return FeatureFile(dim=dim, patch_count=patch_count, entries=entries, metadata=metadata)


def load_patch_features(path) -> list[tuple[str, list[np.ndarray]]]:
    """Per-image patch feature lists, exactly as stored."""
    return read_feature_file(path).entries
