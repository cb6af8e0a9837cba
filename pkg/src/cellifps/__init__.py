"""Point-cloud uniform downsampling (IFPS, cell sampling, Cell-IFPS) and
Chamfer-based completion metrics."""

from .core import (
    Aabb,
    NormalizationTransform,
    Point3,
    PointCloud,
    apply_inverse,
    bounding_box,
    centroid,
    normalize,
)
from .sampling import (
    CellIfpsConfig,
    SampleSelection,
    cell_ifps,
    cell_sample,
    ifps,
    multiscale_sample,
)

__version__ = "0.1.0"

__all__ = [
    "Aabb",
    "CellIfpsConfig",
    "NormalizationTransform",
    "Point3",
    "PointCloud",
    "SampleSelection",
    "apply_inverse",
    "bounding_box",
    "cell_ifps",
    "cell_sample",
    "centroid",
    "ifps",
    "multiscale_sample",
    "normalize",
]
