"""Lossy compression for binary symmetric sources with reduced ultra-sparse
GF(q) parity-check codes."""

from ._gfqc import (
    Code,
    benchmark,
    binary_entropy,
    build_code,
    compress,
    decompress,
    distortion,
    gf_add,
    gf_inv,
    gf_mul,
    load_code,
    rd_distortion,
    rd_rate,
    wef_sweep,
    __version__,
)

__all__ = [
    "Code",
    "benchmark",
    "binary_entropy",
    "build_code",
    "compress",
    "decompress",
    "distortion",
    "gf_add",
    "gf_inv",
    "gf_mul",
    "load_code",
    "rd_distortion",
    "rd_rate",
    "wef_sweep",
    "__version__",
]
