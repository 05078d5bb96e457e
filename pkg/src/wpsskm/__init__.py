"""Weighted position-specific scoring kernel for protein sequences."""
from .baselines import (
    ClassSimilarityMatrix,
    SpectrumVector,
    class_similarity_heatmap,
    gaussian_kernel,
    kmer_spectrum,
    spaced_kmer_spectrum,
)
from .errors import PsskmError
from .evaluation import (
    ClassifierSpec,
    EvalReport,
    Metrics,
    compute_metrics,
    knn_predict,
    logistic_regression,
    nearest_centroid_predict,
    repeated_eval,
    stratified_split,
)
from .kernel import KernelMatrix, kernel_distance, kernel_matrix, kernel_value, kernel_value_fast
from .pssm import Pssm, WeightVector, aa_index, compute_pssm, weight_vector
from .seqio import (
    PROTEIN,
    Alphabet,
    LabeledDataset,
    Sequence,
    attach_labels,
    pad_to_common_length,
    parse_fasta,
)
from .spectral import (
    EmbeddingMatrix,
    SpectralReport,
    center_kernel,
    check_symmetry,
    eigen_spectrum,
    kpca_embed,
)

__version__ = "0.1.0"
