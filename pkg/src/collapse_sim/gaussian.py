"""Gaussian states of the joint detector-field system.

A state is a symmetric 2M x 2M covariance matrix of symmetric two-point
correlators <A,B> = <AB + BA>/2 over the canonical phase-space vector

    z = (Q_1, P_1, ..., Q_nd, P_nd, Phi_1, pi_1, ..., Phi_n, pi_n),

one (position, momentum) pair per detector followed by one pair per lattice
site, plus an optional mean vector (zero in every scenario used for the
slicing comparisons).  The symplectic form is J = diag([[0,1],[-1,0]], ...).
Quantum validity is the uncertainty condition Sigma + (i hbar/2) J >= 0,
equivalently all symplectic eigenvalues >= hbar/2.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .lattice import HBAR, FieldKernel, LatticeSpec
from .geometry import ChartParams, slice_map_x_of_xi

__all__ = [
    "PhaseSpaceLayout",
    "CovarianceState",
    "Observable",
    "StateValidityReport",
    "LayoutMismatchError",
    "FrameMismatchError",
    "assemble_initial_state",
    "validate",
    "smeared_correlator_matrix",
    "marginal",
    "symplectic_form",
    "apply_J",
    "symplectic_eigenvalues",
    "uncertainty_defect",
    "field_window_observable",
    "momentum_window_observable",
    "detector_q_observable",
    "detector_p_observable",
]

FRAME_T = "t"
FRAME_ETA = "eta"


class LayoutMismatchError(ValueError):
    """Binary operation on states or operators with different layouts."""


class FrameMismatchError(ValueError):
    """Operation mixing states/propagators from different frames or times."""


@dataclass(frozen=True)
class PhaseSpaceLayout:
    """Index bookkeeping for the canonical pairs of detectors and sites."""

    n_detectors: int
    n_sites: int

    @property
    def n_pairs(self) -> int:
        return self.n_detectors + self.n_sites

    @property
    def dim(self) -> int:
        return 2 * self.n_pairs

    def q_index(self, detector: int) -> int:
        if not 0 <= detector < self.n_detectors:
            raise LayoutMismatchError(f"no detector {detector} in layout")
        return 2 * detector

    def p_index(self, detector: int) -> int:
        return self.q_index(detector) + 1

    def phi_index(self, site: int) -> int:
        if not 0 <= site < self.n_sites:
            raise LayoutMismatchError(f"no site {site} in layout")
        return 2 * self.n_detectors + 2 * site

    def pi_index(self, site: int) -> int:
        return self.phi_index(site) + 1

    @property
    def phi_indices(self) -> np.ndarray:
        return 2 * self.n_detectors + 2 * np.arange(self.n_sites)

    @property
    def pi_indices(self) -> np.ndarray:
        return self.phi_indices + 1

    def pair_indices(self, pairs) -> np.ndarray:
        """Phase-space indices (q then p, interleaved) of the given pair slots."""
        pairs = np.asarray(pairs, dtype=int)
        return np.column_stack([2 * pairs, 2 * pairs + 1]).ravel()


def symplectic_form(layout_or_dim) -> np.ndarray:
    dim = layout_or_dim.dim if hasattr(layout_or_dim, "dim") else int(layout_or_dim)
    J = np.zeros((dim, dim))
    idx = np.arange(0, dim, 2)
    J[idx, idx + 1] = 1.0
    J[idx + 1, idx] = -1.0
    return J


def apply_J(X: np.ndarray) -> np.ndarray:
    """J @ X without materializing J: (q,p) rows -> (p, -q)."""
    out = np.empty_like(X)
    out[0::2] = X[1::2]
    out[1::2] = -X[0::2]
    return out


def symplectic_eigenvalues(sigma: np.ndarray) -> np.ndarray:
    """Symplectic spectrum: moduli of the (paired) eigenvalues of J Sigma."""
    ev = np.linalg.eigvals(apply_J(sigma))
    nu = np.sort(np.abs(ev))
    return nu[::2]  # each symplectic eigenvalue appears as +/- i nu


def uncertainty_defect(sigma: np.ndarray, hbar: float = HBAR) -> float:
    """Smallest eigenvalue of the Hermitian form Sigma + (i hbar/2) J.

    Nonnegative (up to roundoff) iff the uncertainty relation holds.  This is
    a sign test, not the symplectic spectrum itself (the Hermitian form is
    related to the Williamson normal form by congruence, which preserves
    eigenvalue signs only); use `symplectic_eigenvalues` for the spectrum.
    """
    dim = sigma.shape[0]
    H = sigma.astype(complex) + 0.5j * hbar * symplectic_form(dim)
    lam = np.linalg.eigvalsh(H)
    return float(lam[0])


@dataclass
class CovarianceState:
    """Gaussian state: layout, covariance Sigma, mean, frame tag, slice time."""

    layout: PhaseSpaceLayout
    sigma: np.ndarray = field(repr=False)
    mean: np.ndarray = field(repr=False)
    frame: str
    time: float
    hbar: float = HBAR

    def __post_init__(self):
        dim = self.layout.dim
        if self.sigma.shape != (dim, dim):
            raise LayoutMismatchError(
                f"covariance shape {self.sigma.shape} does not match layout dim {dim}")
        if self.mean.shape != (dim,):
            raise LayoutMismatchError("mean vector length does not match layout")

    def copy(self) -> "CovarianceState":
        return replace(self, sigma=self.sigma.copy(), mean=self.mean.copy())

    def detector_block(self, detector: int) -> np.ndarray:
        iq = self.layout.q_index(detector)
        return self.sigma[iq:iq + 2, iq:iq + 2].copy()

    def expectation(self, obs_a: "Observable", obs_b: "Observable") -> float:
        return float(obs_a.coefficients @ self.sigma @ obs_b.coefficients)

    def save(self, path):
        np.savez_compressed(
            path, sigma=self.sigma, mean=self.mean,
            n_detectors=self.layout.n_detectors, n_sites=self.layout.n_sites,
            frame=self.frame, time=self.time, hbar=self.hbar)

    @staticmethod
    def load(path) -> "CovarianceState":
        data = np.load(path, allow_pickle=False)
        layout = PhaseSpaceLayout(int(data["n_detectors"]), int(data["n_sites"]))
        return CovarianceState(layout=layout, sigma=data["sigma"], mean=data["mean"],
                               frame=str(data["frame"]), time=float(data["time"]),
                               hbar=float(data["hbar"]))


@dataclass(frozen=True)
class Observable:
    """Linear phase-space observable O = c . z with coefficient vector c."""

    kind: str
    coefficients: np.ndarray = field(repr=False)
    label: str = ""


def field_window_observable(window_weights, lattice: LatticeSpec,
                            layout: PhaseSpaceLayout, label: str = "") -> Observable:
    """Smeared field amplitude int w(x) Phi(x) dx ~ sum_i w_i Phi_i dx."""
    c = np.zeros(layout.dim)
    c[layout.phi_indices] = np.asarray(window_weights, dtype=float) * lattice.dx
    return Observable("field-window", c, label)


def momentum_window_observable(weights, layout: PhaseSpaceLayout,
                               label: str = "") -> Observable:
    """Smeared momentum int v(x) Pi(x) dx ~ sum_i v_i pi_i (pi_i already carries dx)."""
    c = np.zeros(layout.dim)
    c[layout.pi_indices] = np.asarray(weights, dtype=float)
    return Observable("momentum-window", c, label)


def detector_q_observable(detector: int, layout: PhaseSpaceLayout,
                          label: str = "") -> Observable:
    c = np.zeros(layout.dim)
    c[layout.q_index(detector)] = 1.0
    return Observable("detector-Q", c, label or f"Q[{detector}]")


def detector_p_observable(detector: int, layout: PhaseSpaceLayout,
                          label: str = "") -> Observable:
    c = np.zeros(layout.dim)
    c[layout.p_index(detector)] = 1.0
    return Observable("detector-P", c, label or f"P[{detector}]")


def assemble_initial_state(lattice: LatticeSpec, detectors, kernel: FieldKernel,
                           frame: str, chart: ChartParams,
                           hbar: float = HBAR) -> CovarianceState:
    """Product of detector ground states and the field kernel on the initial slice.

    Detectors are (omega, position) pairs (extra entries of richer tuples are
    ignored); each contributes a diagonal ground-state block
    diag(hbar/2w, hbar w/2) and zero cross-correlations.

    In the t frame the kernel is sampled at the lattice sites.  In the eta
    frame the same physical state is written in the chart coordinates of the
    initial slice, xi = x - A sin x: field amplitudes pull back as scalars,
    Phi'(xi) = Phi(x(xi)), and momentum densities as Pi'(xi) = Pi(x) dx/dxi,
    so momentum legs pick up the slice Jacobian dx/dxi = 1/(1 - A cos x).
    """
    if frame not in (FRAME_T, FRAME_ETA):
        raise FrameMismatchError(f"unknown frame {frame!r}")
    dets = [(float(d[0]), float(d[1])) for d in detectors]
    layout = PhaseSpaceLayout(n_detectors=len(dets), n_sites=lattice.n_sites)
    sigma = np.zeros((layout.dim, layout.dim))
    for i, (omega, position) in enumerate(dets):
        lattice.site_index(position)  # detector must sit on an interior site
        if omega <= 0.0:
            raise ValueError(f"detector frequency must be positive, got {omega}")
        sigma[layout.q_index(i), layout.q_index(i)] = hbar / (2.0 * omega)
        sigma[layout.p_index(i), layout.p_index(i)] = hbar * omega / 2.0

    h = lattice.dx
    if frame == FRAME_T:
        points = lattice.sites
        mom_weight = np.full(lattice.n_sites, h)
    else:
        points = slice_map_x_of_xi(lattice.sites, 0.0, chart)
        mom_weight = h / (1.0 - chart.A * np.cos(points))

    kxx = kernel.phiphi(points)
    kpp = kernel.pipi(points)
    phi_idx = layout.phi_indices
    pi_idx = layout.pi_indices
    sigma[np.ix_(phi_idx, phi_idx)] = kxx
    sigma[np.ix_(pi_idx, pi_idx)] = kpp * np.outer(mom_weight, mom_weight)
    diag_phi = np.diag(sigma)[phi_idx]
    if np.any(diag_phi <= 0.0):
        raise ValueError("sampled field covariance is not positive on the diagonal")
    return CovarianceState(layout=layout, sigma=sigma, mean=np.zeros(layout.dim),
                           frame=frame, time=0.0, hbar=hbar)


@dataclass(frozen=True)
class StateValidityReport:
    symmetry_residual: float
    min_symplectic_eigenvalue: float
    uncertainty_ok: bool
    positive_diagonal: bool

    def __str__(self):
        status = "ok" if (self.uncertainty_ok and self.positive_diagonal) else "INVALID"
        return (f"state {status}: |Sigma - Sigma^T| = {self.symmetry_residual:.2e}, "
                f"min symplectic eigenvalue = {self.min_symplectic_eigenvalue:.12g}")


def validate(state: CovarianceState, tol: float = 1e-9) -> StateValidityReport:
    """Symmetry, positivity and uncertainty diagnostics; reports, never raises."""
    sym = float(np.max(np.abs(state.sigma - state.sigma.T)))
    nu_min = min_symplectic_eigenvalue(state.sigma, state.hbar)
    return StateValidityReport(
        symmetry_residual=sym,
        min_symplectic_eigenvalue=nu_min,
        uncertainty_ok=bool(nu_min >= state.hbar / 2.0 - tol),
        positive_diagonal=bool(np.all(np.diag(state.sigma) >= -tol)),
    )


def smeared_correlator_matrix(state: CovarianceState, observables) -> np.ndarray:
    """Symmetric correlator matrix <O_a, O_b> of linear observables."""
    C = np.stack([o.coefficients for o in observables])
    if C.shape[1] != state.layout.dim:
        raise LayoutMismatchError("observable coefficients do not match state layout")
    M = C @ state.sigma @ C.T
    return 0.5 * (M + M.T)


def marginal(state: CovarianceState, pairs) -> CovarianceState:
    """Gaussian partial trace: restrict Sigma and the mean to the given pair slots."""
    pairs = np.asarray(pairs, dtype=int)
    if pairs.size == 0:
        raise ValueError("marginal over an empty set of pairs")
    idx = state.layout.pair_indices(pairs)
    n_det = int(np.sum(pairs < state.layout.n_detectors))
    sub_layout = PhaseSpaceLayout(n_detectors=n_det, n_sites=pairs.size - n_det)
    return CovarianceState(layout=sub_layout,
                           sigma=state.sigma[np.ix_(idx, idx)].copy(),
                           mean=state.mean[idx].copy(),
                           frame=state.frame, time=state.time, hbar=state.hbar)
