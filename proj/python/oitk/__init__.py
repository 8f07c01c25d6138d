"""Optimal information transport on the flat torus."""

from ._core import (
    Error,
    Grid,
    InputError,
    InvalidArgument,
    IoError,
    SolverError,
    builtin_density,
    builtin_names,
    cdf_transport_1d,
    chi2_quantile,
    distances,
    fisher_rao_distance,
    fisher_rao_geodesic,
    laplacian,
    max_threads,
    normalize,
    read_raw_field,
    register,
    sample,
    solve_inexact,
    solve_oit,
    solve_poisson,
    write_raw_field,
)

__all__ = [
    "Error",
    "Grid",
    "InputError",
    "InvalidArgument",
    "IoError",
    "SolverError",
    "builtin_density",
    "builtin_names",
    "cdf_transport_1d",
    "chi2_quantile",
    "distances",
    "fisher_rao_distance",
    "fisher_rao_geodesic",
    "laplacian",
    "max_threads",
    "normalize",
    "read_raw_field",
    "register",
    "sample",
    "solve_inexact",
    "solve_oit",
    "solve_poisson",
    "write_raw_field",
]
