"""Visual extraction of hierarchical queries from deep-web query interfaces."""

from .clustering import build_hierarchy, dbscan, scope_density, select_eps
from .evaluation import EvalReport, evaluate_corpus, render_report
from .geometry import UNREACHABLE, AlignmentAxis, Rect, align_score, align_x, proximity, rect_min_distance
from .ingestion import generate_synthetic, load_layout, load_manifest
from .query_model import QueryTree, canonicalize, tree_equal

__all__ = [
    "UNREACHABLE",
    "AlignmentAxis",
    "EvalReport",
    "QueryTree",
    "Rect",
    "align_score",
    "align_x",
    "build_hierarchy",
    "canonicalize",
    "dbscan",
    "evaluate_corpus",
    "generate_synthetic",
    "load_layout",
    "load_manifest",
    "proximity",
    "rect_min_distance",
    "render_report",
    "scope_density",
    "select_eps",
    "tree_equal",
]
