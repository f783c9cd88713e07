"""scikit-learn style wrappers around the functional API.

Constructor arguments are stored verbatim (``get_params``/``set_params``
work as usual); all validation happens in ``fit``. Fitted state lives in
attributes ending in an underscore.
"""
from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, TransformerMixin
from sklearn.utils.validation import check_is_fitted

from .epfinder import ep_trajectory, find_eps
from .holonomy import itinerary, sweep_cycle
from .riemann import CyclePath, cycle_monodromy, ep_junctions, sheet_values
from .spectral import quasienergies_ordered, spectrum
from .validation import check_lambda_array, check_omega_grid, make_config


class _ConfigMixin:
    def _build_config(self):
        self.config_ = make_config(self.two_j, self.omega, self.kick)
        self.d_ = self.config_.d
        return self.config_


class KickedTopSpectrum(_ConfigMixin, TransformerMixin, BaseEstimator):
    """Quasienergies of U(Lambda) as a transformer over Lambda values.

    Parameters
    ----------
    two_j : int
        Twice the spin.
    omega : float or str
        Precession angle; symbolic tokens such as ``"2pi/3"`` are exact.
    kick : str or sequence, default "uniform"
        Kick vector coefficients (normalised) or ``"uniform"``.

    Examples
    --------
    >>> est = KickedTopSpectrum(two_j=2, omega="2pi/3").fit()
    >>> est.transform([1.0]).shape
    (1, 3)
    """

    def __init__(self, two_j=2, omega=1.0, kick="uniform"):
        self.two_j = two_j
        self.omega = omega
        self.kick = kick

    def fit(self, X=None, y=None):
        self._build_config()
        return self

    def transform(self, X):
        """Complex quasienergies ranked by Re E in [0, 2 pi), shape (n, d)."""
        check_is_fitted(self, "config_")
        Ls = check_lambda_array(X)
        out = np.empty((Ls.size, self.d_), dtype=complex)
        for i, L in enumerate(Ls):
            out[i] = quasienergies_ordered(spectrum(self.config_, L)).energies
        return out


class AnholonomyEstimator(_ConfigMixin, BaseEstimator):
    """Permutation of quasienergies after one sweep around |Lambda| = 1.

    ``predict`` maps |J,M> labels at the start of the cycle to the labels
    reached at its end.
    """

    def __init__(self, two_j=2, omega=1.0, kick="uniform", steps=256):
        self.two_j = two_j
        self.omega = omega
        self.kick = kick
        self.steps = steps

    def fit(self, X=None, y=None):
        cfg = self._build_config()
        self.sweep_ = sweep_cycle(cfg, steps=int(self.steps))
        self.permutation_ = self.sweep_.permutation
        self.itinerary_ = self.sweep_.itinerary
        self.predicted_itinerary_ = itinerary(cfg)
        self.cycles_ = self.sweep_.cycles
        return self

    def predict(self, X):
        check_is_fitted(self, "itinerary_")
        labels = np.atleast_1d(np.asarray(X, dtype=float)).ravel()
        try:
            return np.array([self.itinerary_[float(m)] for m in labels])
        except KeyError as exc:
            raise ValueError(f"{exc.args[0]} is not a magnetic quantum number for 2J={self.two_j}") from None


class ExceptionalPointAtlas(BaseEstimator):
    """EP positions over a grid of omega values, fitted on that grid.

    Parameters
    ----------
    two_j : int
    kick : str or sequence
    monodromy : bool
        Also classify each EP by a monodromy loop (slower).
    link_threshold : float
        Largest chordal distance for linking EPs between neighbouring omegas.
    """

    def __init__(self, two_j=2, kick="uniform", monodromy=False, link_threshold=0.25):
        self.two_j = two_j
        self.kick = kick
        self.monodromy = monodromy
        self.link_threshold = link_threshold

    def fit(self, X, y=None):
        grid = check_omega_grid(X)
        self.config_ = make_config(self.two_j, float(grid[0]), self.kick)
        self.trajectory_ = ep_trajectory(self.config_, grid, link_threshold=self.link_threshold,
                                         monodromy=self.monodromy)
        self.omega_grid_ = grid
        self.eps_ = self.trajectory_.records
        self.merge_events_ = self.trajectory_.merge_events
        return self

    def predict(self, X):
        """EP records at new omega values (computed, not interpolated)."""
        check_is_fitted(self, "config_")
        return [find_eps(self.config_.with_omega(om), monodromy=self.monodromy)
                for om in check_omega_grid(X)]


class RiemannSheets(_ConfigMixin, TransformerMixin, BaseEstimator):
    """Re E_M on every sheet, continued from the unit circle.

    ``transform`` returns shape (n, d) with NaN where continuation failed.
    """

    def __init__(self, two_j=2, omega=1.0, kick="uniform", steps=64):
        self.two_j = two_j
        self.omega = omega
        self.kick = kick
        self.steps = steps

    def fit(self, X=None, y=None):
        cfg = self._build_config()
        self.eps_ = find_eps(cfg, monodromy=False)
        self.junctions_ = ep_junctions(cfg, self.eps_)
        return self

    def transform(self, X):
        check_is_fitted(self, "eps_")
        _, values = sheet_values(self.config_, check_lambda_array(X), steps=int(self.steps))
        return values

    def monodromy(self, waypoints, steps=256):
        check_is_fitted(self, "eps_")
        return cycle_monodromy(self.config_, CyclePath(waypoints), steps=steps, eps=self.eps_)
