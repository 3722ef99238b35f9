"""Binary hashing with satellite constellations (C++ core)."""

from ._ghs import (
    CodeMatrix,
    Constellation,
    EmbeddingKind,
    EmbeddingModel,
    GhsError,
    HashModel,
    bench,
    di_objective,
    embed,
    encode,
    evaluate,
    fit_cca,
    fit_pca,
    gps_solve_satellite,
    hamming,
    hash,
    make_synthetic,
    procrustes_rotation,
    rank,
    read_codes,
    read_model,
    read_vectors,
    set_thread_count,
    theorem1_test,
    train,
    write_codes,
    write_model,
    write_vectors,
)

__all__ = [name for name in dir() if not name.startswith("_")]
