"""Boundary operator assembly and matrix I/O."""

from .assembly import (AssemblyOptions, Assembler, BoundaryOperatorMatrix, assemble_C,
                       assemble_C0_static, assemble_C0_star, assemble_M, assemble_pairing,
                       assemble_scalar_V, assemble_T0_star, assemble_V, get_assembler,
                       set_threads)
from .identities import (anticommutator_residual, antisymmetry_error, c0_star_check,
                         calderon_operator, calderon_residual, electric_map, magnetic_map,
                         smooth_probes, t0_square_residual)
from .matrix_io import load_matrix, save_matrix

__all__ = ["AssemblyOptions", "Assembler", "BoundaryOperatorMatrix", "assemble_C",
           "assemble_C0_static", "assemble_C0_star", "assemble_M", "assemble_pairing",
           "assemble_scalar_V", "assemble_T0_star", "assemble_V", "get_assembler",
           "set_threads", "load_matrix", "save_matrix", "anticommutator_residual",
           "antisymmetry_error", "c0_star_check", "calderon_operator", "calderon_residual",
           "electric_map", "magnetic_map", "smooth_probes", "t0_square_residual"]
