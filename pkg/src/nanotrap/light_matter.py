"""Local polarization analysis, AC Stark shifts, fictitious magnetic fields,
and the assembled two-color trap with per-site magnetic environments.

Geometry: atoms sit in the plane P (phi = 0 "upper" site, phi = pi "lower"
site); the static offset field points along +y, perpendicular to P.  All
energies are returned in Hz (energy / h).
"""
from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np
from scipy import constants as cst

from . import atom_cs
from .atom_cs import (
    AtomicData,
    HyperfineState,
    breit_rabi_energy,
    default_atomic_data,
    mw_transition_frequency,
)
from .errors import DomainError, NoTrapError, SaddlePointError
from .fiber_mode import FiberSpec, LightField, field_at

__all__ = [
    "EllipticityVector",
    "MagneticEnvironment",
    "TrapConfig",
    "ClockSplitting",
    "ellipticity",
    "spherical_components",
    "fictitious_field",
    "scalar_shift",
    "vector_shift",
    "trap_potential",
    "find_trap_minimum",
    "trap_frequencies",
    "site_fields",
    "clock_splitting",
    "mw_splitting",
]

H_PLANCK = cst.h
MU_B_J_PER_G = atom_cs.MU_B_J_PER_G
Y_AXIS = np.array([0.0, 1.0, 0.0])

EllipticityVector = np.ndarray  # real 3-vector, |eps| <= 1


def ellipticity(e_field) -> EllipticityVector:
    """Ellipticity vector i(E x E*)/|E|^2 of a complex field amplitude.

    Zero for a purely linear local field, unit magnitude for a fully
    circular one; supports trailing-axis broadcasting over field arrays.
    """
    e = np.asarray(e_field, dtype=complex)
    norm = np.sum(np.abs(e) ** 2, axis=-1)
    if np.any(norm == 0.0):
        raise DomainError("ellipticity undefined at a zero of the field")
    return np.real(1j * np.cross(e, np.conj(e))) / norm[..., None]


def _orthonormal_triad(axis: np.ndarray):
    e3 = np.asarray(axis, dtype=float)
    n = np.linalg.norm(e3)
    if n == 0:
        raise DomainError("quantization axis must be a non-zero vector")
    e3 = e3 / n
    helper = np.array([1.0, 0.0, 0.0])
    if abs(e3 @ helper) > 0.9:
        helper = np.array([0.0, 0.0, 1.0])
    e1 = np.cross(helper, e3)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(e3, e1)
    return e1, e2, e3


def spherical_components(e_field, axis):
    """Spherical amplitudes (A_plus, A_zero, A_minus) about a quantization axis.

    |A_q|^2 is the intensity available to drive dm = q transitions;
    the three squared moduli sum to |E|^2.
    """
    e = np.asarray(e_field, dtype=complex)
    if np.sum(np.abs(e) ** 2) == 0.0:
        raise DomainError("spherical decomposition undefined for a zero field")
    e1, e2, e3 = _orthonormal_triad(axis)
    # components in the frame whose z axis is the quantization axis
    ex, ey, ez = e @ e1, e @ e2, e @ e3
    a_minus, a_zero, a_plus = atom_cs.spherical_amplitudes(np.array([ex, ey, ez]))
    return a_plus, a_zero, a_minus


def fictitious_field(e_field, wavelength_m: float, f: int = 4, data: AtomicData | None = None):
    """Fictitious magnetic field beta_v * i(E x E*) of a ground manifold, in G."""
    data = data or default_atomic_data()
    e = np.asarray(e_field, dtype=complex)
    beta_v = atom_cs.vector_shift_coefficient_g_per_v2m2(wavelength_m, f, data)
    return beta_v * np.real(1j * np.cross(e, np.conj(e)))


def scalar_shift(e_field, wavelength_m: float, data: AtomicData | None = None):
    """Scalar AC Stark shift -(1/4) alpha_s |E|^2 in Hz."""
    data = data or default_atomic_data()
    alpha_s = atom_cs.scalar_polarizability(wavelength_m, data)
    e = np.asarray(e_field, dtype=complex)
    intensity = np.sum(np.abs(e) ** 2, axis=-1)
    return -0.25 * alpha_s * intensity / H_PLANCK


def vector_shift(
    e_field,
    wavelength_m: float,
    state: HyperfineState,
    axis,
    data: AtomicData | None = None,
):
    """Vector AC Stark shift of one ground sublevel against a quantization axis, Hz.

    Computed from the vector polarizability as
    -(1/4) alpha_v |E|^2 (eps . axis) mF/(2F); identical (to rounding) to the
    linear Zeeman energy of the fictitious field.
    """
    data = data or default_atomic_data()
    if state.manifold != "ground":
        raise DomainError("vector_shift is defined for ground states")
    e = np.asarray(e_field, dtype=complex)
    alpha_v = atom_cs.vector_polarizability(wavelength_m, state.f, data)
    _, _, e3 = _orthonormal_triad(axis)
    spin_density = np.real(1j * np.cross(e, np.conj(e)))  # |E|^2 * eps
    projection = spin_density @ e3
    return -0.25 * alpha_v * projection * state.mf / (2.0 * state.f) / H_PLANCK


@dataclass(frozen=True)
class TrapConfig:
    """Two-color trap configuration plus optional extras.

    At phi_B = 0 the blue (running) polarization axis is orthogonal to the
    red (standing) one, which lies in plane P.  ``c3`` is the surface-
    potential coefficient in J m^3 (None disables the surface term);
    ``manipulation`` is an optional extra guided field.
    """

    fiber: FiberSpec
    blue: LightField
    red: LightField
    c3: float | None = None
    manipulation: LightField | None = None

    def fields(self):
        out = [self.blue, self.red]
        if self.manipulation is not None:
            out.append(self.manipulation)
        return out


@dataclass(frozen=True)
class MagneticEnvironment:
    """Static offset field plus the per-site fictitious fields, all in G."""

    offset_field: np.ndarray  # 3-vector, by convention along +y
    fictitious_field_upper: np.ndarray
    fictitious_field_lower: np.ndarray
    site_upper: tuple = ()
    site_lower: tuple = ()

    def total_magnitudes(self):
        b_up = float(np.linalg.norm(self.offset_field + self.fictitious_field_upper))
        b_lo = float(np.linalg.norm(self.offset_field + self.fictitious_field_lower))
        return b_up, b_lo


def _offset_vector(boff) -> np.ndarray:
    boff = np.asarray(boff, dtype=float)
    if boff.ndim == 0:
        return float(boff) * Y_AXIS
    if boff.shape != (3,):
        raise DomainError("offset field must be a scalar (along +y) or a 3-vector")
    return boff


def trap_potential(
    config: TrapConfig,
    position,
    state: HyperfineState | None = None,
    boff=0.0,
    data: AtomicData | None = None,
):
    """Total trap potential at (r, phi, z) for one ground sublevel, in Hz.

    Sum of the scalar shifts of every configured field, the exact
    hyperfine/Zeeman energy at the local total magnetic field (offset plus
    all fictitious contributions), and the optional surface term
    -C3/(r-a)^3.  ``state=None`` gives the mF-averaged potential (scalar
    shifts plus surface term only).  Positions inside the fiber are
    rejected.
    """
    data = data or default_atomic_data()
    r, phi, z = position
    a = config.fiber.radius
    r_arr = np.asarray(r, dtype=float)
    if np.any(r_arr <= a):
        raise DomainError("trap potential is defined outside the fiber surface")

    total = np.zeros(np.broadcast(r_arr, np.asarray(phi), np.asarray(z)).shape)
    bfict = np.zeros(total.shape + (3,))
    for field in config.fields():
        e = field_at(field, r, phi, z)
        total = total + scalar_shift(e, field.mode.wavelength, data)
        if state is not None:
            bfict = bfict + fictitious_field(e, field.mode.wavelength, state.f, data)

    if state is not None:
        boff_vec = _offset_vector(boff)
        b_total = np.linalg.norm(boff_vec + bfict, axis=-1)
        zeeman = np.vectorize(
            lambda b: breit_rabi_energy(state, b, data) - breit_rabi_energy(state, 0.0, data)
        )(b_total)
        total = total + zeeman

    if config.c3 is not None:
        total = total - config.c3 / ((r_arr - a) ** 3 * H_PLANCK)
    if total.ndim == 0:
        return float(total)
    return total


def _golden_minimize(f, lo, hi, tol):
    """Golden-section minimiser; deterministic, no derivatives."""
    invphi = (np.sqrt(5.0) - 1.0) / 2.0
    x1 = hi - invphi * (hi - lo)
    x2 = lo + invphi * (hi - lo)
    f1, f2 = f(x1), f(x2)
    while hi - lo > tol:
        if f1 < f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - invphi * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + invphi * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def find_trap_minimum(
    config: TrapConfig,
    state: HyperfineState | None = None,
    boff=0.0,
    data: AtomicData | None = None,
    phi_start: float = 0.0,
):
    """Locate the trap minimum near the upper site, to 0.1 nm.

    Starts from the analytic guess (red standing-wave antinode at z = 0,
    azimuth in plane P) and refines coordinate-wise by golden section.
    Raises NoTrapError when no bound radial minimum brackets.
    """
    data = data or default_atomic_data()
    a = config.fiber.radius

    def u_of(r, phi, z):
        return trap_potential(config, (r, phi, z), state, boff, data)

    r_scan = a + np.linspace(20e-9, 1200e-9, 250)
    u_scan = u_of(r_scan, phi_start, 0.0)
    interior = (u_scan[1:-1] < u_scan[:-2]) & (u_scan[1:-1] < u_scan[2:])
    candidates = np.nonzero(interior)[0] + 1
    if candidates.size == 0:
        raise NoTrapError("no bound radial minimum for this configuration")
    idx = int(candidates[np.argmin(u_scan[candidates])])

    tol_r = 0.1e-9
    z_half = 0.25 * config.red.mode.guided_wavelength
    r0, phi0, z0 = r_scan[idx], phi_start, 0.0
    for _ in range(40):
        r_prev, phi_prev, z_prev = r0, phi0, z0
        r0 = _golden_minimize(
            lambda r: u_of(r, phi0, z0), max(r0 - 50e-9, a + 1e-9), r0 + 50e-9, tol_r
        )
        phi0 = _golden_minimize(
            lambda p: u_of(r0, p, z0), phi0 - 0.5, phi0 + 0.5, tol_r / r0
        )
        z0 = _golden_minimize(lambda zz: u_of(r0, phi0, zz), z0 - z_half, z0 + z_half, tol_r)
        moved = max(abs(r0 - r_prev), r0 * abs(phi0 - phi_prev), abs(z0 - z_prev))
        if moved < tol_r:
            break
    return float(r0), float(phi0), float(z0)


def trap_frequencies(
    config: TrapConfig,
    state: HyperfineState | None = None,
    boff=0.0,
    minimum=None,
    data: AtomicData | None = None,
):
    """(nu_r, nu_phi, nu_z) harmonic frequencies at the trap minimum, in Hz.

    Central-difference Hessian (1 nm step) in local Cartesian displacements,
    eigenvalues divided by the Cs mass.  Raises SaddlePointError when the
    curvature matrix is not positive definite.
    """
    data = data or default_atomic_data()
    if minimum is None:
        minimum = find_trap_minimum(config, state, boff, data)
    r0, phi0, z0 = minimum
    step = 1e-9

    def u_local(d):
        dr, ds, dz = d
        return trap_potential(
            config, (r0 + dr, phi0 + ds / r0, z0 + dz), state, boff, data
        )

    hess = np.zeros((3, 3))
    u0 = u_local((0.0, 0.0, 0.0))
    for i in range(3):
        for j in range(i, 3):
            di = np.zeros(3)
            dj = np.zeros(3)
            di[i] = step
            dj[j] = step
            if i == j:
                val = (u_local(di) - 2.0 * u0 + u_local(-di)) / step**2
            else:
                val = (
                    u_local(di + dj) - u_local(di - dj) - u_local(-di + dj) + u_local(-di - dj)
                ) / (4.0 * step**2)
            hess[i, j] = hess[j, i] = val

    evals, evecs = np.linalg.eigh(hess * H_PLANCK / data.mass_kg)
    if np.any(evals <= 0):
        raise SaddlePointError("curvature matrix is not positive definite at the minimum")
    # map eigenvalues onto the (r, phi, z) axes by dominant eigenvector component
    order = np.argmax(np.abs(evecs), axis=0)
    freqs = np.zeros(3)
    for k in range(3):
        freqs[order[k]] = np.sqrt(evals[k]) / (2 * np.pi)
    return tuple(float(f) for f in freqs)


def site_fields(
    config: TrapConfig,
    boff,
    manipulation: LightField | None = None,
    phi_b: float = 0.0,
    red_imbalance: float = 1.0,
    data: AtomicData | None = None,
    f: int = 4,
) -> MagneticEnvironment:
    """Per-site fictitious fields for the active manipulation mechanism(s).

    ``phi_b`` tilts the blue polarization away from its nominal axis
    (orthogonal to plane P), ``red_imbalance`` is the backward/forward power
    ratio of the red standing wave, and ``manipulation`` adds an extra
    dedicated field (e.g. at the tune-out wavelength).  Trap sites are the
    minima of the mF-averaged potential; the lower site is the diametric
    image of the upper one.  The fictitious field is evaluated for the
    ground manifold ``f`` (manifold dependence is at the 0.3% level).
    """
    data = data or default_atomic_data()
    blue = replace(config.blue, polarization_angle=np.pi / 2 + phi_b)
    red = replace(config.red, backward_power=config.red.power * red_imbalance)
    effective = replace(config, blue=blue, red=red, manipulation=manipulation)

    upper = find_trap_minimum(effective, None, 0.0, data)
    r0, phi0, z0 = upper
    lower = (r0, phi0 + np.pi, z0)

    def bfict_at(site):
        total = np.zeros(3)
        for fld in effective.fields():
            e = field_at(fld, *site)
            total = total + fictitious_field(e, fld.mode.wavelength, f, data)
        return total

    return MagneticEnvironment(
        offset_field=_offset_vector(boff),
        fictitious_field_upper=bfict_at(upper),
        fictitious_field_lower=bfict_at(lower),
        site_upper=upper,
        site_lower=lower,
    )


@dataclass(frozen=True)
class ClockSplitting:
    """Clock-transition splitting between the two sites (exact and quadratic)."""

    exact_hz: float
    approximate_hz: float


def clock_splitting(env: MagneticEnvironment, data: AtomicData | None = None) -> ClockSplitting:
    """Difference of the per-site clock frequencies |4,0> - |3,0>, in Hz.

    Exact path: Breit-Rabi at each site's total field magnitude.  Also
    reports the quadratic approximation 4 alpha0 Boff Bfict.
    """
    data = data or default_atomic_data()
    b_up, b_lo = env.total_magnitudes()

    def clock(b):
        return mw_transition_frequency((3, 0), (4, 0), b, data)

    exact = float(clock(b_up) - clock(b_lo))
    boff = float(np.linalg.norm(env.offset_field))
    bfict = 0.5 * float(
        (env.fictitious_field_upper - env.fictitious_field_lower) @ Y_AXIS
    )
    approx = float(4.0 * data.alpha0_khz_per_g2 * 1e3 * boff * bfict)
    return ClockSplitting(exact_hz=exact, approximate_hz=approx)


def mw_splitting(env: MagneticEnvironment, lower, upper, data: AtomicData | None = None) -> float:
    """Upper-site minus lower-site frequency of one MW transition, in Hz."""
    data = data or default_atomic_data()
    b_up, b_lo = env.total_magnitudes()
    return float(
        mw_transition_frequency(lower, upper, b_up, data)
        - mw_transition_frequency(lower, upper, b_lo, data)
    )
