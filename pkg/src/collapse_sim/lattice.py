"""Spatial lattice for the massless scalar field on a Dirichlet box.

The field lives on the interval (-L, L) with Phi = 0 at both walls and
L = N*pi for an integer N >= 2.  That choice does two jobs at once: the box
regularizes the infrared divergence of the massless vacuum in one space
dimension, and the walls x = +/-N*pi sit on worldlines that are static in
both slicing frames (sin(N*pi) = 0), so the identical physical box is shared
by the inertial and the alternative evolution.

Discretization: n interior sites x_i = -L + i*dx with dx = pi/m, which puts
the detector positions x = 0 and x = -pi exactly on lattice sites.  The
canonical lattice momentum carries the cell weight, pi_i ~ Pi(x_i)*dx, so
each (Phi_i, pi_i) pair is canonical and continuum momentum kernels are
sampled with a factor dx per momentum leg.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LatticeSpec",
    "FieldKernel",
    "LatticeError",
    "build_lattice",
    "box_vacuum_kernel",
    "lattice_ground_kernel",
    "squeezed_kernel",
    "smeared_window",
    "laplacian_matrix",
]

MIN_INTERIOR_SITES = 15

HBAR = 1.0


class LatticeError(ValueError):
    """Invalid lattice construction parameters."""


@dataclass(frozen=True)
class LatticeSpec:
    half_width: float          # L = N*pi
    n_sites: int               # interior sites
    dx: float                  # spacing = 2L/(n_sites+1)
    sites: np.ndarray = field(repr=False)  # interior site positions

    @property
    def boxes_in_pi(self) -> int:
        return int(round(self.half_width / np.pi))

    def site_index(self, position: float) -> int:
        """Index of the interior site at `position`; must land on the grid."""
        i = int(round((position + self.half_width) / self.dx)) - 1
        if i < 0 or i >= self.n_sites or abs(self.sites[i] - position) > 1e-9:
            raise LatticeError(f"position {position} is not an interior lattice site")
        return i

    def mode_wavenumbers(self) -> np.ndarray:
        """Continuum wavenumbers k_n = n*pi/(2L) of the box sine modes, n=1..n_sites."""
        n = np.arange(1, self.n_sites + 1)
        return n * np.pi / (2.0 * self.half_width)

    def mode_frequencies_lattice(self) -> np.ndarray:
        """Dispersion of the discrete wave operator, w_n = (2/dx) sin(k_n dx/2)."""
        k = self.mode_wavenumbers()
        return (2.0 / self.dx) * np.sin(k * self.dx / 2.0)

    def mode_matrix(self, points=None) -> np.ndarray:
        """Sine modes u_n(y) = sin(k_n (y+L)) / sqrt(L) sampled at `points`.

        Rows are points, columns are modes.  Defaults to the lattice sites,
        where the columns are discretely orthogonal: sum_i u_n u_m = delta/dx.
        """
        y = self.sites if points is None else np.asarray(points, dtype=float)
        k = self.mode_wavenumbers()
        return np.sin(np.outer(y + self.half_width, k)) / np.sqrt(self.half_width)


def build_lattice(half_width: float, target_dx: float) -> LatticeSpec:
    """Build the Dirichlet lattice with dx <= target_dx and dx dividing pi.

    Requires L = N*pi with N >= 2 (N = 1 would put the detector site x = -pi
    on a Dirichlet wall).  At least MIN_INTERIOR_SITES interior sites are
    enforced; a too-coarse target_dx is clamped accordingly.
    """
    N = int(round(half_width / np.pi))
    if abs(half_width - N * np.pi) > 1e-12 or N < 1:
        raise LatticeError(
            f"box half-width must be an integer multiple of pi, got {half_width}")
    if N < 2:
        raise LatticeError(
            "box half-width pi puts the detector position x = -pi on a Dirichlet "
            "boundary; use L >= 2*pi")
    if target_dx <= 0.0:
        raise LatticeError("target_dx must be positive")
    m = max(int(np.ceil(np.pi / target_dx - 1e-12)), 1)
    while 2 * N * m - 1 < MIN_INTERIOR_SITES:
        m += 1
    dx = np.pi / m
    n_sites = 2 * N * m - 1
    # anchor the grid on the x=0 site so detector sites are exact in floating point
    i0 = N * m  # 1-based index of the site at x = 0
    sites = (np.arange(1, n_sites + 1) - i0) * dx
    return LatticeSpec(half_width=N * np.pi, n_sites=n_sites, dx=dx, sites=sites)


def laplacian_matrix(lattice: LatticeSpec) -> np.ndarray:
    """Dirichlet second-difference matrix (no 1/dx^2; that lives in the Hamiltonian)."""
    n = lattice.n_sites
    lap = -2.0 * np.eye(n)
    idx = np.arange(n - 1)
    lap[idx, idx + 1] = 1.0
    lap[idx + 1, idx] = 1.0
    return lap


@dataclass(frozen=True)
class FieldKernel:
    """Continuum Gaussian field state given by a sine-mode expansion.

    The equal-time covariance kernels are

        K_PhiPhi(y, y') = sum_n c_phi[n] u_n(y) u_n(y'),
        K_PiPi(y, y')   = sum_n c_pi[n]  u_n(y) u_n(y'),
        K_PhiPi = 0,

    with u_n the Dirichlet sine modes of the box.  Mode-diagonal states with
    c_phi[n] * c_pi[n] = (hbar/2)^2 are pure.  Kernels are evaluated at
    arbitrary points, which is what the pulled-back initial data of the
    alternative frame needs.
    """

    half_width: float
    c_phi: np.ndarray = field(repr=False)
    c_pi: np.ndarray = field(repr=False)
    name: str = "custom"

    @property
    def n_modes(self) -> int:
        return len(self.c_phi)

    def _modes_at(self, points):
        y = np.asarray(points, dtype=float)
        n = np.arange(1, self.n_modes + 1)
        k = n * np.pi / (2.0 * self.half_width)
        return np.sin(np.outer(y + self.half_width, k)) / np.sqrt(self.half_width)

    def phiphi(self, points) -> np.ndarray:
        u = self._modes_at(points)
        return (u * self.c_phi) @ u.T

    def pipi(self, points) -> np.ndarray:
        u = self._modes_at(points)
        return (u * self.c_pi) @ u.T

    def phipi(self, points) -> np.ndarray:
        n = len(np.asarray(points))
        return np.zeros((n, n))


def box_vacuum_kernel(lattice: LatticeSpec, hbar: float = HBAR) -> FieldKernel:
    """Ground-state kernel of the continuum box field, truncated at the lattice Nyquist.

    Mode weights <Phi_n^2> = hbar/(2 w_n) and <Pi_n^2> = hbar w_n / 2 with the
    continuum dispersion w_n = k_n.  Sampled on the lattice sites this is an
    exactly pure Gaussian state (all symplectic eigenvalues hbar/2).
    """
    w = lattice.mode_wavenumbers()
    return FieldKernel(half_width=lattice.half_width,
                       c_phi=hbar / (2.0 * w), c_pi=hbar * w / 2.0,
                       name="box_vacuum")


def lattice_ground_kernel(lattice: LatticeSpec, hbar: float = HBAR) -> FieldKernel:
    """Exact ground state of the discrete wave operator (stationary on the lattice).

    Same sine modes, but weighted with the lattice dispersion
    w_n = (2/dx) sin(k_n dx/2); the free lattice evolution leaves this state
    invariant, which makes it the reference for stationarity checks.
    """
    w = lattice.mode_frequencies_lattice()
    return FieldKernel(half_width=lattice.half_width,
                       c_phi=hbar / (2.0 * w), c_pi=hbar * w / 2.0,
                       name="lattice_ground")


def squeezed_kernel(lattice: LatticeSpec, squeeze_r: float, hbar: float = HBAR) -> FieldKernel:
    """Uniformly squeezed box vacuum: Phi variances scaled by exp(-2r), Pi by exp(+2r)."""
    w = lattice.mode_wavenumbers()
    return FieldKernel(half_width=lattice.half_width,
                       c_phi=hbar / (2.0 * w) * np.exp(-2.0 * squeeze_r),
                       c_pi=hbar * w / 2.0 * np.exp(2.0 * squeeze_r),
                       name="squeezed")


def kernel_by_name(lattice: LatticeSpec, name: str, hbar: float = HBAR,
                   squeeze_r: float = 0.0) -> FieldKernel:
    if name == "box_vacuum":
        return box_vacuum_kernel(lattice, hbar)
    if name == "lattice_ground":
        return lattice_ground_kernel(lattice, hbar)
    if name == "squeezed":
        return squeezed_kernel(lattice, squeeze_r, hbar)
    raise LatticeError(f"unknown field kernel {name!r}")


def gaussian_window(x, center: float, width: float):
    """Unit-integral Gaussian bump; `width` is two standard deviations."""
    sigma = width / 2.0
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * ((x - center) / sigma) ** 2) / (sigma * np.sqrt(2.0 * np.pi))


def smeared_window(center: float, width: float, lattice: LatticeSpec) -> np.ndarray:
    """Quadrature weights of a Gaussian window, normalized so sum w_i dx = 1.

    The window must fit well inside the box (tails at the walls below 1e-14),
    otherwise the quadrature silently truncates; that case is rejected.
    """
    sigma = width / 2.0
    if (center - 8.0 * sigma <= -lattice.half_width
            or center + 8.0 * sigma >= lattice.half_width):
        raise LatticeError(
            f"window at {center} with width {width} is not supported inside the box")
    w = gaussian_window(lattice.sites, center, width)
    return w / (np.sum(w) * lattice.dx)
