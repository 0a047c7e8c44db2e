"""Structured output polytopes: sequences, permutations and SparseMAP."""

from .losses import (sparsemap_loss, structured_hinge_loss, structured_margin_check,
                     structured_perceptron_loss)
from .permutahedron import (PermutahedronSpec, isotonic_decreasing, permutahedron_map,
                            permutahedron_project)
from .sequence import (crf_loss, enumerate_paths, forward_backward, path_to_tensor,
                       tensor_to_path, viterbi_map, viterbi_path)
from .sparsemap import (EnumerationOracle, MapOracle, PermutationOracle, SequenceOracle,
                        SimplexOracle, sparsemap)
from .types import StructureVector

__all__ = [
    "StructureVector", "PermutahedronSpec", "MapOracle", "SimplexOracle",
    "SequenceOracle", "PermutationOracle", "EnumerationOracle",
    "viterbi_map", "viterbi_path", "forward_backward", "crf_loss",
    "path_to_tensor", "tensor_to_path", "enumerate_paths",
    "permutahedron_map", "permutahedron_project", "isotonic_decreasing",
    "sparsemap", "sparsemap_loss", "structured_perceptron_loss",
    "structured_hinge_loss", "structured_margin_check",
]
