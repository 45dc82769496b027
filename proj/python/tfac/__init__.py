"""Fast L1 schemes for the time-fractional Allen-Cahn equation."""

from ._core import (
    Soe,
    build_soe,
    caputo_kernel,
    composite_mesh,
    config_hash,
    convergence,
    fast_weights,
    free_energy,
    graded_mesh,
    kernel_check,
    kernel_triangle,
    l1_weights,
    manufactured_source,
    mbp_check,
    run,
    uniform_mesh,
)

__all__ = [
    "Soe",
    "build_soe",
    "caputo_kernel",
    "composite_mesh",
    "config_hash",
    "convergence",
    "fast_weights",
    "free_energy",
    "graded_mesh",
    "kernel_check",
    "kernel_triangle",
    "l1_weights",
    "manufactured_source",
    "mbp_check",
    "run",
    "uniform_mesh",
]
