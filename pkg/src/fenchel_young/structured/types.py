from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np


@dataclass
class StructureVector:
    """A point of a marginal polytope, optionally with its decomposition.

    ``support`` lists ``(vertex, weight)`` pairs with nonnegative weights
    summing to one and ``sum_k weight_k * vertex_k == mu``.
    """

    mu: np.ndarray
    support: Optional[List[Tuple[np.ndarray, float]]] = None

    def reconstruct(self):
        if self.support is None:
            return None
        return sum(w * v for v, w in self.support)
