"""Echo-chamber analysis of news consumption on social media.

Bipartite user/page graphs, co-occurrence projections, community detection,
heavy-tail fitting, selective exposure, user localization, and a
trust-weighted bounded confidence simulator.
"""

__version__ = "0.1.0"

from .ingest import (
    Dataset,
    InteractionRecord,
    parse_interactions,
    summarize,
    filter_dataset,
)
from .graph import BipartiteGraph, WeightedGraph, build_bipartite, project_pages, project_users
from .community import (
    Partition,
    fastgreedy,
    multilevel,
    spinglass,
    modularity,
    rand_index,
)
from .polarization import localization, localization_distribution, polarization_rank

__all__ = [
    "Dataset",
    "InteractionRecord",
    "parse_interactions",
    "summarize",
    "filter_dataset",
    "BipartiteGraph",
    "WeightedGraph",
    "build_bipartite",
    "project_pages",
    "project_users",
    "Partition",
    "fastgreedy",
    "multilevel",
    "spinglass",
    "modularity",
    "rand_index",
    "localization",
    "localization_distribution",
    "polarization_rank",
]
