"""Quantum kicked top under a rank-1 kick: quasienergy anholonomy,
exceptional points in the complex kick-strength plane and the Riemann
sheets that connect them."""
from .cubic import EPRecord, ep_locations_J1, resultant_Dq
from .epfinder import classify_ep, discriminant_poly, ep_trajectory, find_eps
from .estimators import AnholonomyEstimator, ExceptionalPointAtlas, KickedTopSpectrum, RiemannSheets
from .exceptions import (
    KickedTopError, NumericalError, PreconditionError, ResonanceError, SingularParameterError,
    SolverError, TrackingError,
)
from .floquet import build_floquet, char_poly, companion_floquet
from .holonomy import check_nonresonance, itinerary, sweep_cycle
from .riemann import CyclePath, build_sheets, cycle_monodromy, emulation_suite
from .spectral import eigendecompose, spectrum
from .spin import HalfInt, KickVector, TopConfig, uniform_kick

__version__ = "0.1.0"

__all__ = [
    "AnholonomyEstimator", "CyclePath", "EPRecord", "ExceptionalPointAtlas", "HalfInt",
    "KickVector", "KickedTopError", "KickedTopSpectrum", "NumericalError", "PreconditionError",
    "ResonanceError", "RiemannSheets", "SingularParameterError", "SolverError", "TopConfig",
    "TrackingError", "build_floquet", "build_sheets", "char_poly", "check_nonresonance",
    "classify_ep", "companion_floquet", "cycle_monodromy", "discriminant_poly", "eigendecompose",
    "emulation_suite", "ep_locations_J1", "ep_trajectory", "find_eps", "itinerary",
    "resultant_Dq", "spectrum", "sweep_cycle", "uniform_kick",
]
