from .model import (
    PcaModel,
    backproject_values,
    pca_backproject,
    pca_denoise,
    pca_fit,
    pca_project,
    project_values,
)
from .whiteness import (
    auto_threshold,
    autocorrelation,
    component_scores,
    pca_component_planes,
    select_threshold,
    whiteness_score,
)

__all__ = [
    "PcaModel",
    "auto_threshold",
    "autocorrelation",
    "backproject_values",
    "component_scores",
    "pca_backproject",
    "pca_component_planes",
    "pca_denoise",
    "pca_fit",
    "pca_project",
    "project_values",
    "select_threshold",
    "whiteness_score",
]
