"""Non-half-sum Latin rectangles, placement delivery arrays and coded caching."""

from .delivery_sim import FileLibrary, DemandVector, simulate, worst_case_load
from .nhsdp import Nhsdp, nhsdp_to_nhslr, verify_nhsdp
from .nhslr import (
    AxbSpec,
    Nhslr,
    construct_axb,
    optimize_closed_form,
    optimize_exhaustive,
    scheme_params,
    verify_nhslr,
)
from .pda import Pda, conjugate, mn_pda, params, pda_from_nhslr, verify_pda
from .report import VerificationError, VerificationReport
from .scheme import ParameterError, SchemeParams
from .znum import Modulus, Residue, floor_root, half_sum

__all__ = [
    "AxbSpec",
    "DemandVector",
    "FileLibrary",
    "Modulus",
    "Nhsdp",
    "Nhslr",
    "ParameterError",
    "Pda",
    "Residue",
    "SchemeParams",
    "VerificationError",
    "VerificationReport",
    "conjugate",
    "construct_axb",
    "floor_root",
    "half_sum",
    "mn_pda",
    "nhsdp_to_nhslr",
    "optimize_closed_form",
    "optimize_exhaustive",
    "params",
    "pda_from_nhslr",
    "scheme_params",
    "simulate",
    "verify_nhsdp",
    "verify_nhslr",
    "verify_pda",
    "worst_case_load",
]
