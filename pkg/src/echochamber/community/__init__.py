from .partition import Partition, modularity, rand_index, read_partition, write_partition
from .fastgreedy import fastgreedy
from .multilevel import multilevel
from .spinglass import (
    DisconnectedGraphError,
    SpinglassParams,
    spinglass,
    spinglass_by_component,
)

METHODS = ("fastgreedy", "multilevel", "spinglass")


def detect(g, method: str, seed: int = 0, params: SpinglassParams | None = None) -> Partition:
    """Dispatch by method name. Spinglass runs per component."""
    if method == "fastgreedy":
        return fastgreedy(g)
    if method == "multilevel":
        return multilevel(g, seed)
    if method == "spinglass":
        return spinglass_by_component(g, seed, params)
    raise ValueError(f"unknown method {method!r}; choose from {', '.join(METHODS)}")


__all__ = [
    "Partition",
    "modularity",
    "rand_index",
    "read_partition",
    "write_partition",
    "fastgreedy",
    "multilevel",
    "spinglass",
    "spinglass_by_component",
    "SpinglassParams",
    "DisconnectedGraphError",
    "detect",
    "METHODS",
]
