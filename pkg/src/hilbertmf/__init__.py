"""Exact arithmetic for Hilbert modular forms over real quadratic fields:
q-series, plus-space bases, Doi-Naganuma lifts, Borcherds products, and CM
value formulas."""

from .qseries import QSeries, eta_quotient, level1_forms
from .quadfield import (
    QuadElem,
    QuadField,
    QuadIdeal,
    enum_tp_dual,
    fundamental_unit,
    get_field,
    ideal_factor,
    siegel_zeta,
    sigma_ideal,
    zeta_value,
)
from .plusspace import (
    PlusForm,
    chi_p,
    dirichlet_L_value,
    eisenstein_plus,
    obstruction_check,
    pairing,
    plus_basis,
)
from .lifts import HilbertQExpansion, doi_naganuma, gundlach, hilbert_eisenstein
from .borcherds import (
    BorcherdsProduct,
    WeylChamber,
    borcherds_product,
    chamber_of,
    default_chamber,
    local_borcherds_data,
    psi_m,
    reduced_set,
    weyl_vector,
)
from .cmvalues import (
    CMFieldData,
    FactoredValue,
    GenusChar,
    bt,
    by_cm_value,
    cm_field_setup,
    genus_char,
    gross_zagier_J2,
    j_cm_oracle,
    prime_bound_check,
    rho,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
