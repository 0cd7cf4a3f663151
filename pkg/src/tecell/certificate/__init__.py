"""A priori constants, smallness conditions and radii of the existence certificate."""
from .constants import (APrioriBounds, APrioriData, DataNorms, EmbeddingConstants, SpeciesNorms,
                        a_priori_bounds, bound_functional, elliptic_constants, h_sharp, h_zero,
                        make_factors, species_constants, thermal_constants, z_factor)
from .norms import data_norms
from .regression import RegressionTable, nacl_regression
from .smallness import CertificateReport, check_smallness, recurrence

__all__ = [
    "APrioriBounds", "APrioriData", "CertificateReport", "DataNorms", "EmbeddingConstants",
    "RegressionTable", "SpeciesNorms", "a_priori_bounds", "bound_functional", "check_smallness",
    "data_norms", "elliptic_constants", "h_sharp", "h_zero", "make_factors", "nacl_regression",
    "recurrence", "species_constants", "thermal_constants", "z_factor",
]
