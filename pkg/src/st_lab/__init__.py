"""Exact incidence geometry toolkit for rigidity of extremal
Szemeredi-Trotter configurations."""

__version__ = "0.1.0"

from .geometry import (  # noqa: E402
    Configuration,
    Line,
    Point,
    ProjectiveMap,
    apply_map,
    dualize,
    incident,
    intersect,
    line_through,
)
from .generators import gen_circle, gen_elekes, gen_random, gen_unbalanced  # noqa: E402
from .incidence import clean, count_incidences, st_ratio  # noqa: E402
from .recovery import PipelineParams, closure, run_pipeline  # noqa: E402
from .rigidity import dgos_bound, rigidity_certificate  # noqa: E402
from .triples import TripleSystem, consecutive_triples, in_cell_triples, triple_peel  # noqa: E402

__all__ = [
    "Configuration",
    "Line",
    "Point",
    "ProjectiveMap",
    "PipelineParams",
    "apply_map",
    "clean",
    "closure",
    "consecutive_triples",
    "count_incidences",
    "dgos_bound",
    "dualize",
    "gen_circle",
    "gen_elekes",
    "gen_random",
    "gen_unbalanced",
    "in_cell_triples",
    "incident",
    "intersect",
    "line_through",
    "rigidity_certificate",
    "run_pipeline",
    "st_ratio",
    "triple_peel",
    "TripleSystem",
]
