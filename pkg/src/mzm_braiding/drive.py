"""Time-dependent local drive coupling the defect site to two Majorana modes.

A drive segment is defined by coefficients (c1, c2) parametrised by angles
(theta, phi), a pulse envelope Omega(t), a piecewise-constant phase schedule
phi0(t), and the resonant carrier frequency omega (= defect energy).

Two matrix representations of the drive are provided by
:func:`build_drive_bdg`:

* ``form="mode_coupling"`` (default, used by the evolution engine):
  H(t) = F(t) |e_d><psi_B| + h.c. with psi_B = c1 psi_gamma1R + c2 psi_gamma2L
  and F(t) = 2 Omega(t) cos(omega t - phi0(t)).  This realises the 3-level
  Lambda dynamics on the lattice exactly: the bright combination couples to
  the defect level with Rabi rate Omega(t) and carrier phase e^{i phi0} in
  the rotating frame.
* ``form="quadratic"``: the particle-hole-symmetric quadratic-Hamiltonian
  representation 2 Omega(t) cos(omega t - phi0(t)) (c1 d^dag gamma_1R +
  c2 d^dag gamma_2L) + h.c. with physically normalised Majorana operators
  (gamma^2 = 1).  It is Hermitian and PHS-odd (Xi H Xi = -H) and carries
  exactly one hopping and one pairing entry per chain at the sweet spot.
  A PHS-odd drive commutes with Xi at the propagator level and therefore
  restricts to real-orthogonal gates on the Majorana doublet; it is kept for
  structural analysis, while the holonomic gates themselves are generated by
  the mode-coupling form.

With ``rwa=True`` the counter-rotating terms are dropped analytically: the
complex co-rotating amplitude Omega(t) e^{i(phi0 - omega t)} replaces F(t).
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Optional

import numpy as np

from .lattice import MajoranaMode

__all__ = [
    "DriveCoefficients",
    "PulseEnvelope",
    "PhaseSchedule",
    "TruncationSpec",
    "Segment",
    "DriveProtocol",
    "envelope_value",
    "envelope_naive_area",
    "measured_pulse_area",
    "calibrate_pulse_area",
    "drive_vector",
    "build_drive_bdg",
    "make_braid_protocol",
    "make_composite_protocol",
    "make_pi8_protocol",
    "reverse_protocol",
]


@dataclass(frozen=True)
class DriveCoefficients:
    """Drive coefficients c1, c2 with their nominal angles.

    ``from_angles`` produces the normalised pair c1 = cos(theta/2),
    c2 = sin(theta/2) e^{i phi}; error channels may rescale c1/c2 directly,
    in which case |c1|^2 + |c2|^2 = 1 no longer holds (by design).
    """

    theta: float
    phi: float
    c1: complex
    c2: complex

    @classmethod
    def from_angles(cls, theta: float, phi: float) -> "DriveCoefficients":
        return cls(
            theta=float(theta),
            phi=float(phi),
            c1=complex(np.cos(theta / 2.0)),
            c2=complex(np.sin(theta / 2.0) * np.exp(1j * phi)),
        )

    @property
    def normalised(self) -> bool:
        return abs(abs(self.c1) ** 2 + abs(self.c2) ** 2 - 1.0) < 1e-12


@dataclass(frozen=True)
class PulseEnvelope:
    """Rabi envelope Omega(t) on [0, duration].

    shapes: ``sin2`` -> amplitude_scale * (pi/T) * sin^2(2 pi t / T);
    ``constant`` -> amplitude_scale * area_target / T.
    """

    shape: str
    duration: float
    area_target: float
    amplitude_scale: float = 1.0

    def __post_init__(self) -> None:
        if self.duration <= 0:
            raise ValueError("duration must be > 0")
        if self.shape not in ("sin2", "constant"):
            raise ValueError(f"unknown envelope shape {self.shape!r}")


@dataclass(frozen=True)
class PhaseSchedule:
    """Piecewise-constant drive phase phi0(t) with one optional step.

    phi0(t) = base_phase + step_amount * Theta(t - step_time) when enabled.
    """

    base_phase: float
    step_time: float = 0.0
    step_amount: float = -np.pi / 2.0
    enabled: bool = False


@dataclass(frozen=True)
class TruncationSpec:
    """Keep only ``radius`` sites per chain, counted from the defect-adjacent
    edge, in the drive vector; the removed weight is NOT renormalised."""

    radius: int

    def __post_init__(self) -> None:
        if self.radius < 0:
            raise ValueError("radius must be >= 0")


@dataclass(frozen=True)
class Segment:
    coefficients: DriveCoefficients
    envelope: PulseEnvelope
    phase: PhaseSchedule
    drive_frequency: float
    truncation: Optional[TruncationSpec] = None
    rwa: bool = False
    site_multipliers: tuple[tuple[int, float], ...] = ()

    def __post_init__(self) -> None:
        if self.phase.enabled and not (
            0.0 < self.phase.step_time < self.envelope.duration
        ):
            raise ValueError("phase step_time must lie inside (0, duration)")


@dataclass(frozen=True)
class DriveProtocol:
    segments: tuple[Segment, ...]

    def __post_init__(self) -> None:
        if not self.segments:
            raise ValueError("protocol must contain at least one segment")

    @property
    def total_duration(self) -> float:
        return float(sum(s.envelope.duration for s in self.segments))


def envelope_value(env: PulseEnvelope, t: float) -> float:
    """Omega(t) for 0 <= t <= duration."""
    if t < -1e-12 or t > env.duration + 1e-12:
        raise ValueError(f"t = {t} outside [0, {env.duration}]")
    if env.shape == "sin2":
        return env.amplitude_scale * (np.pi / env.duration) * np.sin(
            2.0 * np.pi * t / env.duration
        ) ** 2
    return env.amplitude_scale * env.area_target / env.duration


def envelope_naive_area(env: PulseEnvelope) -> float:
    """Closed-form integral of Omega over [0, duration]."""
    if env.shape == "sin2":
        return env.amplitude_scale * np.pi / 2.0
    return env.amplitude_scale * env.area_target


def phase_value(sched: PhaseSchedule, t: float) -> float:
    if sched.enabled and t > sched.step_time:
        return sched.base_phase + sched.step_amount
    return sched.base_phase


def measured_pulse_area(env: PulseEnvelope, n_steps: int = 4000) -> float:
    """Effective Rabi area as accumulated by the rotating-frame 2-level model.

    The oracle Hamiltonian for a resonant drive is Omega(t) sigma_x / (phase
    factors); each midpoint step rotates the {B, d} doublet by
    Omega(t_mid) dt, so the total accumulated rotation angle is returned.
    The coupling norm of unit-normalised modes is 1, so no extra convention
    factor appears here; that this matches the lattice engine is what the
    oracle-equivalence tests establish.
    """
    dt = env.duration / n_steps
    t_mid = (np.arange(n_steps) + 0.5) * dt
    omegas = np.array([envelope_value(env, t) for t in t_mid])
    return float(np.sum(omegas) * dt)


def calibrate_pulse_area(env: PulseEnvelope, target_area: float) -> PulseEnvelope:
    """Set amplitude_scale so the effective pulse area equals target_area.

    Bisection on the scale (the area is monotone linear in it), tolerance
    1e-8.  For the sin^2 shape at target pi this converges to scale = 2.0
    (the bare shape integrates to pi/2); for a constant envelope of naive
    area pi it converges to 1.0.
    """
    if target_area == 0.0:
        return replace(env, amplitude_scale=0.0)
    base = measured_pulse_area(replace(env, amplitude_scale=1.0))
    if base <= 0:
        raise ValueError("envelope has non-positive integral; cannot calibrate")
    lo, hi = 0.0, 1.0
    while measured_pulse_area(replace(env, amplitude_scale=hi)) < target_area:
        hi *= 2.0
        if hi > 1e6:
            raise RuntimeError("pulse-area calibration failed to converge")
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if measured_pulse_area(replace(env, amplitude_scale=mid)) < target_area:
            lo = mid
        else:
            hi = mid
        if hi - lo < 1e-10 * max(1.0, abs(target_area)):
            break
    scale = 0.5 * (lo + hi)
    return replace(env, amplitude_scale=scale)


def _truncation_mask(m: int, defect_site: int, radius: int) -> np.ndarray:
    """Boolean mask over 2m Nambu components of the sites kept by truncation."""
    keep = np.zeros(m, dtype=bool)
    keep[max(defect_site - radius, 0) : defect_site] = True  # chain-1 right edge
    keep[defect_site + 1 : defect_site + 1 + radius] = True  # chain-2 left edge
    return np.concatenate([keep, keep])


def drive_vector(seg: Segment, modes: dict, defect_site: int) -> np.ndarray:
    """Bright-combination Nambu vector psi_B = c1 psi_1R + c2 psi_2L with the
    segment's truncation and per-site multipliers applied (no renormalisation).
    """
    g1r = modes["gamma1R"].vector
    g2l = modes["gamma2L"].vector
    m = g1r.shape[0] // 2
    b = seg.coefficients.c1 * g1r + seg.coefficients.c2 * g2l
    if seg.truncation is not None:
        mask = _truncation_mask(m, defect_site, seg.truncation.radius)
        b = np.where(mask, b, 0.0)
    if seg.site_multipliers:
        b = b.copy()
        for site, mult in seg.site_multipliers:
            b[site] *= mult
            b[m + site] *= mult
    return b


def drive_amplitude(seg: Segment, t: float, t_global: float | None = None) -> complex:
    """Scalar drive amplitude: envelope and phase schedule are evaluated at
    segment-local time t, the carrier at global protocol time t_global
    (defaults to t for single-segment use).  Real F(t) = 2 Omega cos(omega
    t_g - phi0) for the full drive; complex co-rotating amplitude
    Omega e^{i(phi0 - omega t_g)} when rwa."""
    if t_global is None:
        t_global = t
    omega_t = envelope_value(seg.envelope, t)
    phi0 = phase_value(seg.phase, t)
    if seg.rwa:
        return omega_t * np.exp(1j * (phi0 - seg.drive_frequency * t_global))
    return 2.0 * omega_t * np.cos(seg.drive_frequency * t_global - phi0)


def build_drive_bdg(
    seg: Segment,
    t: float,
    modes: dict,
    defect_site: int,
    form: str = "mode_coupling",
    t_global: float | None = None,
) -> np.ndarray:
    """Full 2M x 2M drive matrix at segment-local time t (see module docs).

    ``modes`` must contain "gamma1R" and "gamma2L"; both are required to
    have zero weight on the defect site (< 1e-10).
    """
    g1r = modes["gamma1R"].vector
    m = g1r.shape[0] // 2
    for key in ("gamma1R", "gamma2L"):
        v = modes[key].vector
        w = abs(v[defect_site]) + abs(v[m + defect_site])
        if w > 1e-10:
            raise ValueError(f"mode {key} has weight {w:.2e} on the defect site")
    b = drive_vector(seg, modes, defect_site)
    h = np.zeros((2 * m, 2 * m), dtype=complex)
    if form == "mode_coupling":
        z = drive_amplitude(seg, t, t_global)
        h[defect_site, :] = z * b.conj()
        h[:, defect_site] += np.conj(z) * b
        return h
    if form != "quadratic":
        raise ValueError(f"unknown drive form {form!r}")
    # PHS-odd quadratic representation; physical Majorana normalisation
    # (gamma^2 = 1) makes the entry magnitudes 2 Omega |cos| |c_i| exactly.
    f = drive_amplitude(seg, t, t_global)
    if seg.rwa:
        raise ValueError("rwa drives have no PHS-odd quadratic representation")
    bp = np.sqrt(2.0) * b[:m]  # particle components B_n
    bh = np.sqrt(2.0) * b[m:]  # hole components (pairing channel)
    a = np.zeros((m, m), dtype=complex)
    delta = np.zeros((m, m), dtype=complex)
    a[defect_site, :] = f * bp
    a[:, defect_site] = np.conj(f * bp)
    a[defect_site, defect_site] = 0.0
    delta[defect_site, :] = f * bh
    delta[:, defect_site] = -f * bh
    delta[defect_site, defect_site] = 0.0
    h[:m, :m] = a
    h[:m, m:] = delta
    h[m:, :m] = -delta.conj()
    h[m:, m:] = -a.T
    return h


def _calibrated_sin2(duration: float) -> PulseEnvelope:
    return calibrate_pulse_area(
        PulseEnvelope(shape="sin2", duration=duration, area_target=np.pi),
        np.pi,
    )


def make_braid_protocol(
    duration: float,
    theta: float,
    phi: float,
    drive_frequency: float,
    phi0: float = 0.0,
    rwa: bool = False,
) -> DriveProtocol:
    """Single-loop protocol: one sin^2 segment of effective area pi, constant
    drive phase phi0.  At theta = phi = pi/2 this is the elementary braid."""
    seg = Segment(
        coefficients=DriveCoefficients.from_angles(theta, phi),
        envelope=_calibrated_sin2(duration),
        phase=PhaseSchedule(base_phase=phi0),
        drive_frequency=drive_frequency,
        rwa=rwa,
    )
    return DriveProtocol(segments=(seg,))


def make_composite_protocol(
    duration: float,
    step_time: float,
    theta: float,
    phi: float,
    drive_frequency: float,
    order: str = "fig3",
    rwa: bool = False,
) -> DriveProtocol:
    """Four-segment composite protocol (first-order error cancellation).

    Each segment lasts ``duration`` and consists of two half-pulses of
    effective area pi/2 with drive phase phi on [0, step_time] and phi - pi/2
    afterwards.  Segment angles are (theta, theta, pi-theta, pi-theta) in
    time order for ``order="fig3"``, reversed for ``order="eq7"``.
    """
    if not 0.0 < step_time < duration:
        raise ValueError("step_time must lie inside (0, duration)")
    env = _calibrated_sin2(duration)
    angles = [theta, theta, np.pi - theta, np.pi - theta]
    if order == "eq7":
        angles = angles[::-1]
    elif order != "fig3":
        raise ValueError(f"unknown composite order {order!r}")
    segs = tuple(
        Segment(
            coefficients=DriveCoefficients.from_angles(angle, phi),
            envelope=env,
            phase=PhaseSchedule(
                base_phase=phi,
                step_time=step_time,
                step_amount=-np.pi / 2.0,
                enabled=True,
            ),
            drive_frequency=drive_frequency,
            rwa=rwa,
        )
        for angle in angles
    )
    return DriveProtocol(segments=segs)


def make_pi8_protocol(
    duration: float,
    step_time: float,
    drive_frequency: float,
    order: str = "fig3",
    rwa: bool = False,
) -> DriveProtocol:
    """Composite protocol at theta = 3 pi/8, phi = 0: a pi/4 rotation about
    the equatorial axis v (pi/8-gate analogue in this axis convention)."""
    return make_composite_protocol(
        duration, step_time, 3.0 * np.pi / 8.0, 0.0, drive_frequency,
        order=order, rwa=rwa,
    )


def reverse_protocol(protocol: DriveProtocol) -> DriveProtocol:
    """Time-mirrored, phase-negated protocol.

    Segments run in reverse order; within each segment the envelope is kept
    (sin^2 and constant shapes are mirror-symmetric) and the phase schedule
    is replaced by its mirror shifted by pi, which flips the sign of the
    rotating-frame drive.  Evolving forward and then with the reversed
    protocol (carrier time running on continuously) returns the initial
    computational-subspace state exactly for co-rotating (rwa) drives.
    """
    rev = []
    for seg in reversed(protocol.segments):
        sched = seg.phase
        if sched.enabled:
            new_sched = PhaseSchedule(
                base_phase=sched.base_phase + sched.step_amount + np.pi,
                step_time=seg.envelope.duration - sched.step_time,
                step_amount=-sched.step_amount,
                enabled=True,
            )
        else:
            new_sched = replace(sched, base_phase=sched.base_phase + np.pi)
        rev.append(replace(seg, phase=new_sched))
    return DriveProtocol(segments=tuple(rev))
