"""Indicator-map parsing: text removal, segmentation, road and node extraction."""

from .components import MapComponent, components_from_labels, components_from_mask, count_holes
from .cleanup import filter_components, inpaint_regions, mask_from_components, rlsa_cluster
from .mser import detect_mser
from .ocr import OcrResult, SidecarOcr, SubprocessOcr
from .roads import RoadNode, build_nodes, extract_shop_blocks, merge_small_nodes, score_road
from .srm import SrmParams, srm_segment

__all__ = [
    "MapComponent",
    "OcrResult",
    "RoadNode",
    "SidecarOcr",
    "SrmParams",
    "SubprocessOcr",
    "build_nodes",
    "components_from_labels",
    "components_from_mask",
    "count_holes",
    "detect_mser",
    "extract_shop_blocks",
    "filter_components",
    "inpaint_regions",
    "mask_from_components",
    "merge_small_nodes",
    "rlsa_cluster",
    "score_road",
    "srm_segment",
]
