"""Equivariant localization formulas and their numerical oracles."""

from .compact import (
    DHProblem,
    FixedPointDatum,
    bv_sum,
    dh_sum,
    hc_weyl_sum,
    iz_exact,
    iz_generic,
    sphere_dh_demo,
    symplectic_volume_generic,
    symplectic_volume_un,
    volume_limit,
)
from .haar import HaarEstimate, iz_mc, mc_expectation, sample_haar
from .matrix_core import Orientation, SkewForm, pfaffian, skew_canonical_form, sqrt_det, vandermonde
from .noncompact import Sl2Element, classify, f_alpha_const, flow_zeros, linearize
from .roots import CartanElement, RootSystemSpec, WeylPermutation, builtin_un_spec, load_spec

__version__ = "0.1.0"
