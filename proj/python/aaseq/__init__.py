"""Sequence spectra and Anderson-accelerated linear classifier training."""

from ._core import (
    AaseqError,
    Alphabet,
    PcaModel,
    __version__,
    alpha_sweep,
    apply_pca,
    batch_gradient,
    cross_entropy,
    default_alpha_grid,
    embed,
    enumerate_kmers,
    fit_pca,
    init_weights,
    minimizer_of_kmer,
    normalize_prediction,
    parse_fasta,
    run_cli,
    spectrum,
    synth_dataset,
    train,
)

__all__ = [
    "AaseqError",
    "Alphabet",
    "PcaModel",
    "__version__",
    "alpha_sweep",
    "apply_pca",
    "batch_gradient",
    "cross_entropy",
    "default_alpha_grid",
    "embed",
    "enumerate_kmers",
    "fit_pca",
    "init_weights",
    "minimizer_of_kmer",
    "normalize_prediction",
    "parse_fasta",
    "run_cli",
    "spectrum",
    "synth_dataset",
    "train",
]
