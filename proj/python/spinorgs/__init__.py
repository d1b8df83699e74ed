"""Ground states of rotating spin-orbit-coupled spin-1 condensates.

Fields are complex arrays of shape (3, *grid.points) holding
(phi_1, phi_0, phi_-1) on the grid of their Grid.
"""

from ._core import (
    Grid,
    Physics,
    SolverConfig,
    SpgsError,
    Trap,
    cm_pcg_solve,
    diagnose,
    energy,
    hamiltonian,
    initial_guess,
    normalize,
    pcg_solve,
    pgf_solve,
    prolongate,
    read_field,
    residual,
    sweep,
    write_field,
)

__all__ = [
    "Grid",
    "Physics",
    "SolverConfig",
    "SpgsError",
    "Trap",
    "cm_pcg_solve",
    "diagnose",
    "energy",
    "hamiltonian",
    "initial_guess",
    "normalize",
    "pcg_solve",
    "pgf_solve",
    "prolongate",
    "read_field",
    "residual",
    "sweep",
    "write_field",
]
