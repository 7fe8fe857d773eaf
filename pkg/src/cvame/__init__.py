"""Verification and simulation of AME and k-uniform continuous-variable states."""

__version__ = "0.1.0"

from .matcore import ExactMatrix, determinant, nullspace, rank, sqrt_spd, submatrix  # noqa: E402
from .uniformity import UniformityReport, is_k_uniform_cluster, max_uniformity  # noqa: E402

__all__ = [
    "ExactMatrix",
    "UniformityReport",
    "determinant",
    "is_k_uniform_cluster",
    "max_uniformity",
    "nullspace",
    "rank",
    "sqrt_spd",
    "submatrix",
]
