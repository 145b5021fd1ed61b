"""Alternative time-slicing chart on (1+1)D Minkowski space.

Flat space in inertial coordinates (t, x) is re-sliced by the nonlinear chart

    eta = t - A sin(t) cos(x),      xi = x - A sin(x) cos(t),

with a constant amplitude 0 <= A < 1.  The metric in the new coordinates is
conformally flat, ds^2 = Omega(eta, xi) (-d eta^2 + d xi^2), with

    Omega = (1 - 2A cos t cos x + A^2 cos(t+x) cos(t-x))^(-1)
          = [(1 - A cos(t-x)) (1 - A cos(t+x))]^(-1),

which is strictly positive for A < 1, so the chart is regular everywhere.
Constant-eta slices are wavy curves in the (t, x) diagram; they coincide with
the flat constant-t slices exactly at t = eta = n*pi, the only moments where
states defined on whole slices in the two frames can be compared point by
point.  Worldlines x = n*pi are static in both frames (sin(n*pi) = 0), so
detectors are only ever placed there.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

__all__ = [
    "ChartParams",
    "EventTX",
    "EventEtaXi",
    "JacobianData",
    "ChartInversionError",
    "UnsupportedWorldlineError",
    "to_alt",
    "from_alt",
    "conformal_factor",
    "jacobian",
    "worldline_clock",
    "WorldlineClock",
    "overlap_slice",
    "slice_map_xi_of_x",
    "slice_map_x_of_xi",
    "grid_curves",
]

OVERLAP_TOL = 1e-12

_NEWTON_TOL = 1e-13
_NEWTON_MAXITER = 50


class ChartInversionError(RuntimeError):
    """Newton iteration for the inverse chart failed to converge."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class UnsupportedWorldlineError(ValueError):
    """Detector position whose worldline is not static in the eta frame."""


@dataclass(frozen=True)
class ChartParams:
    """Amplitude of the alternative chart; the identity chart is A = 0."""

    A: float

    def __post_init__(self):
        if not np.isfinite(self.A):
            raise ValueError("chart amplitude A must be finite")
        if self.A < 0.0 or self.A >= 1.0:
            raise ValueError(f"chart amplitude must satisfy 0 <= A < 1, got {self.A}")


@dataclass(frozen=True)
class EventTX:
    t: float
    x: float


@dataclass(frozen=True)
class EventEtaXi:
    eta: float
    xi: float


@dataclass(frozen=True)
class JacobianData:
    """Partials d(eta,xi)/d(t,x), their determinant, and the conformal factor."""

    matrix: np.ndarray  # 2x2, rows (eta, xi), columns (t, x)
    det: float
    omega: float


def to_alt(p: EventTX, c: ChartParams) -> EventEtaXi:
    """Map an inertial-frame event to the alternative coordinates."""
    eta = p.t - c.A * np.sin(p.t) * np.cos(p.x)
    xi = p.x - c.A * np.sin(p.x) * np.cos(p.t)
    return EventEtaXi(float(eta), float(xi))


def _chart_residual(t, x, eta, xi, A):
    return (t - A * np.sin(t) * np.cos(x) - eta,
            x - A * np.sin(x) * np.cos(t) - xi)


def from_alt(q: EventEtaXi, c: ChartParams) -> EventTX:
    """Invert the chart by damped Newton iteration.

    The chart is a bounded perturbation of the identity with a Jacobian
    determinant >= (1 - A)^2 > 0, so Newton started from (t, x) = (eta, xi)
    converges fast; step halving guards the few stiff spots at large A.
    Raises ChartInversionError if the residual does not drop below 1e-13.
    """
    A = c.A
    t, x = q.eta, q.xi
    rt, rx = _chart_residual(t, x, q.eta, q.xi, A)
    res = max(abs(rt), abs(rx))
    for _ in range(_NEWTON_MAXITER):
        if res <= _NEWTON_TOL:
            return EventTX(float(t), float(x))
        # analytic Jacobian of the forward map
        a = 1.0 - A * np.cos(t) * np.cos(x)   # d eta / d t
        b = A * np.sin(t) * np.sin(x)         # d eta / d x
        d = 1.0 - A * np.cos(x) * np.cos(t)   # d xi / d x
        det = a * d - b * b
        dt = (-rt * d + rx * b) / det
        dx = (rt * b - rx * a) / det
        step = 1.0
        for _ in range(30):
            t_new, x_new = t + step * dt, x + step * dx
            rt_new, rx_new = _chart_residual(t_new, x_new, q.eta, q.xi, A)
            res_new = max(abs(rt_new), abs(rx_new))
            if res_new < res or res_new <= _NEWTON_TOL:
                break
            step *= 0.5
        t, x, rt, rx, res = t_new, x_new, rt_new, rx_new, res_new
    if res > _NEWTON_TOL:
        raise ChartInversionError(
            f"chart inversion did not converge (residual {res:.3e})", residual=res)
    return EventTX(float(t), float(x))


def conformal_factor(p: EventTX, c: ChartParams) -> float:
    """Conformal factor Omega at an event, from the closed-form expression."""
    A = c.A
    denom = (1.0 - 2.0 * A * np.cos(p.t) * np.cos(p.x)
             + A * A * np.cos(p.t + p.x) * np.cos(p.t - p.x))
    return float(1.0 / denom)


def jacobian(p: EventTX, c: ChartParams) -> JacobianData:
    """Analytic partials of the forward chart at an event.

    The determinant factorizes as (1 - A cos(t-x))(1 - A cos(t+x)) and equals
    1/Omega pointwise, which doubles as a consistency check on the conformal
    factor.
    """
    A = c.A
    dedt = 1.0 - A * np.cos(p.t) * np.cos(p.x)
    dedx = A * np.sin(p.t) * np.sin(p.x)
    dxdt = A * np.sin(p.x) * np.sin(p.t)
    dxdx = 1.0 - A * np.cos(p.x) * np.cos(p.t)
    mat = np.array([[dedt, dedx], [dxdt, dxdx]])
    det = dedt * dxdx - dedx * dxdt
    return JacobianData(matrix=mat, det=float(det), omega=conformal_factor(p, c))


def overlap_slice(time: float) -> bool:
    """True iff the two frames' slices coincide at this coordinate time."""
    return abs(time - np.pi * np.round(time / np.pi)) <= OVERLAP_TOL


def _kepler_solve(targets, ecc, tol=1e-14, maxiter=100):
    """Solve u - ecc*sin(u) = target elementwise by safeguarded Newton.

    |ecc| < 1 makes the left side strictly monotone (derivative >= 1-|ecc|),
    so the solution is unique and Newton from u = target converges.
    """
    targets = np.asarray(targets, dtype=float)
    u = targets.copy()
    for _ in range(maxiter):
        f = u - ecc * np.sin(u) - targets
        if np.max(np.abs(f)) <= tol:
            break
        u = u - f / (1.0 - ecc * np.cos(u))
    else:
        res = float(np.max(np.abs(u - ecc * np.sin(u) - targets)))
        raise ChartInversionError(
            f"monotone slice-map inversion stalled (residual {res:.3e})", residual=res)
    return u


class WorldlineClock:
    """Proper time vs coordinate time along a static worldline x = n*pi.

    In the t frame the worldline clock is trivial, tau = t.  In the eta frame
    the coordinate time along the worldline is eta(tau) = tau - A cos(x) sin(tau)
    with cos(x) = +/-1, inverted by Newton for tau(eta).  The redshift
    d tau / d eta equals sqrt(Omega) on the worldline.
    """

    def __init__(self, detector_x: float, frame: str, chart: ChartParams):
        if frame not in ("t", "eta"):
            raise ValueError(f"unknown frame {frame!r}")
        n = np.round(detector_x / np.pi)
        if abs(detector_x - n * np.pi) > 1e-12:
            raise UnsupportedWorldlineError(
                f"detector at x={detector_x} is not static in the eta frame; "
                "only positions x = n*pi are supported")
        self.detector_x = float(detector_x)
        self.frame = frame
        self.chart = chart
        self.cos_x = float(np.cos(n * np.pi))  # exactly +/-1

    def coord_of_tau(self, tau):
        """Coordinate time of the frame at worldline proper time tau."""
        tau = np.asarray(tau, dtype=float)
        if self.frame == "t":
            out = tau
        else:
            out = tau - self.chart.A * self.cos_x * np.sin(tau)
        return out if out.ndim else float(out)

    def tau_of_coord(self, time):
        """Proper time at a given frame coordinate time (Newton inversion)."""
        time = np.asarray(time, dtype=float)
        if self.frame == "t":
            out = time
        else:
            out = _kepler_solve(time, self.chart.A * self.cos_x)
        return out if out.ndim else float(out)

    def redshift(self, time):
        """d tau / d(coordinate time) at a frame coordinate time."""
        if self.frame == "t":
            time = np.asarray(time, dtype=float)
            out = np.ones_like(time)
            return out if out.ndim else 1.0
        tau = self.tau_of_coord(time)
        out = 1.0 / (1.0 - self.chart.A * self.cos_x * np.cos(tau))
        return out if np.ndim(out) else float(out)


def worldline_clock(detector_x: float, frame: str, chart: ChartParams) -> WorldlineClock:
    return WorldlineClock(detector_x, frame, chart)


def slice_map_xi_of_x(x, T, chart: ChartParams):
    """xi as a function of x on the constant-t slice t = T (T = n*pi for overlaps)."""
    x = np.asarray(x, dtype=float)
    out = x - chart.A * np.sin(x) * np.cos(T)
    return out if out.ndim else float(out)


def slice_map_x_of_xi(xi, T, chart: ChartParams):
    """Inverse of the constant-t slice map, x(xi), on t = T."""
    return _kepler_solve(xi, chart.A * np.cos(T))


def grid_curves(chart: ChartParams, resolution: int = 33,
                t_range=(0.0, np.pi), x_range=(-2.0 * np.pi, np.pi),
                samples: int = 241):
    """Tabulate constant-eta and constant-xi curves over a (t, x) window.

    Returns an array of rows (t, x, eta, xi): for each of `resolution` levels
    of constant eta (resp. xi), the curve is sampled at `samples` points of x
    (resp. t), solving the remaining coordinate by Newton.  Useful for
    plotting the wavy slices of the alternative frame.
    """
    rows = []
    etas = np.linspace(t_range[0], t_range[1], resolution)
    xs = np.linspace(x_range[0], x_range[1], samples)
    for eta0 in etas:
        # solve t from eta(t, x) = eta0 at fixed x: t - (A cos x) sin t = eta0
        t = np.empty_like(xs)
        for i, xv in enumerate(xs):
            t[i] = _kepler_solve(eta0, chart.A * np.cos(xv))
        xi = xs - chart.A * np.sin(xs) * np.cos(t)
        rows.append(np.column_stack([t, xs, np.full_like(xs, eta0), xi]))
    xis = np.linspace(x_range[0], x_range[1], resolution)
    ts = np.linspace(t_range[0], t_range[1], samples)
    for xi0 in xis:
        x = np.empty_like(ts)
        for i, tv in enumerate(ts):
            x[i] = _kepler_solve(xi0, chart.A * np.cos(tv))
        eta = ts - chart.A * np.sin(ts) * np.cos(x)
        rows.append(np.column_stack([ts, x, eta, np.full_like(ts, xi0)]))
    return np.vstack(rows)
