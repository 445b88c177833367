"""Configuration-model random multigraphs with almost-2-regular degree sequences."""

__version__ = "0.1.0"

from .components import ComponentReport, Topology, analyze, deficiency, s_process  # noqa: E402
from .degree_seq import DegreeSequence, Regime, build_lower, build_upper, diagnose  # noqa: E402
from .exploration import ExplorationTrace, Outcome, explore, explore_lazy  # noqa: E402
from .kernel import KernelGraph, contract, kernel_edge_identity  # noqa: E402
from .sampler import MultiGraph, enumerate_matchings, matching_count, sample  # noqa: E402

__all__ = [
    "ComponentReport",
    "DegreeSequence",
    "ExplorationTrace",
    "KernelGraph",
    "MultiGraph",
    "Outcome",
    "Regime",
    "Topology",
    "analyze",
    "build_lower",
    "build_upper",
    "contract",
    "deficiency",
    "diagnose",
    "enumerate_matchings",
    "explore",
    "explore_lazy",
    "kernel_edge_identity",
    "matching_count",
    "s_process",
    "sample",
]
