"""Physical parameters of the nuclear cavity model in natural units.

Rates and energies are measured in units of the single-nucleus linewidth
gamma (= 1), times in units of the mean lifetime tau0 (= 1) and lengths in
units of c * tau0, so that c = 1 as well.  Tesla only enters through
:func:`phi_from_field`.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError

# 57Fe, 14.4 keV Moessbauer transition
TAU0_NS = 141.0
# calibration point for the hyperfine splitting
B_REF_TESLA = 6.4
PHI_REF = 6.0
# resonant grazing angle of the reference cavity
PHI0_URAD = 3466.0
BAD_CAVITY_RATIO = 10.0


@dataclass(frozen=True)
class NaturalUnits:
    gamma: float = 1.0
    tau0: float = 1.0
    c_scaled: float = 1.0

    def __post_init__(self):
        if (self.gamma, self.tau0, self.c_scaled) != (1.0, 1.0, 1.0):
            raise ConfigError("natural units are fixed: gamma = tau0 = c = 1")

    @staticmethod
    def ns_to_tau0(t_ns: float) -> float:
        return t_ns / TAU0_NS


UNITS = NaturalUnits()


@dataclass(frozen=True)
class CavityParams:
    """Cavity mode and nuclear ensemble parameters (rates in units of gamma).

    ``bad_cavity_ratio`` is the minimum accepted value of kappa / (g sqrt(N));
    set it to 0 to switch the validity guard off.
    """

    kappa: float
    kappa_R: float
    delta_c: float = 0.0
    g: float = 0.0
    n_nuclei: float = 1.0
    a_in: complex = 1.0
    bad_cavity_ratio: float = field(default=BAD_CAVITY_RATIO, compare=False)

    def __post_init__(self):
        if not self.kappa > 0:
            raise ConfigError(f"kappa must be positive, got {self.kappa}")
        if not self.kappa_R > 0:
            raise ConfigError(f"kappa_R must be positive, got {self.kappa_R}")
        if self.kappa_R > self.kappa:
            raise ConfigError("kappa_R cannot exceed kappa")
        if not self.n_nuclei > 0:
            raise ConfigError(f"n_nuclei must be positive, got {self.n_nuclei}")
        if self.g < 0:
            raise ConfigError(f"g must be non-negative, got {self.g}")
        for name in ("kappa", "kappa_R", "delta_c", "g", "n_nuclei"):
            if not math.isfinite(getattr(self, name)):
                raise ConfigError(f"{name} must be finite")
        if self.bad_cavity_ratio < 0:
            raise ConfigError("bad_cavity_ratio must be non-negative")
        if self.kappa < self.bad_cavity_ratio * self.g_sqrt_n:
            raise ConfigError(
                f"bad-cavity condition violated: kappa={self.kappa:g} < "
                f"{self.bad_cavity_ratio:g} * g*sqrt(N)={self.g_sqrt_n:g}"
            )
        object.__setattr__(self, "a_in", complex(self.a_in))

    @property
    def g_sqrt_n(self) -> float:
        return self.g * math.sqrt(self.n_nuclei)

    @property
    def g2n(self) -> float:
        return self.g * self.g * self.n_nuclei


def phi_from_field(b_magnitude):
    """Hyperfine splitting parameter phi [gamma] produced by a field of ``b_magnitude`` Tesla."""
    b = np.asarray(b_magnitude, dtype=float)
    if np.any(b < 0):
        raise ConfigError(f"field magnitude must be non-negative, got {b_magnitude}")
    phi = PHI_REF * (b / B_REF_TESLA)
    return float(phi) if phi.ndim == 0 else phi


@dataclass(frozen=True)
class HyperfineField:
    b_magnitude: float
    orientation: int = 1
    delta_g: float | None = None
    delta_e: float | None = None

    def __post_init__(self):
        if self.orientation not in (1, -1):
            raise ConfigError(f"orientation must be +1 or -1, got {self.orientation}")
        phi = phi_from_field(self.b_magnitude)
        dg, de = self.delta_g, self.delta_e
        if dg is None and de is None:
            dg = de = phi
        elif dg is None or de is None:
            raise ConfigError("give both delta_g and delta_e or neither")
        elif not math.isclose((dg + de) / 2, phi, rel_tol=1e-12, abs_tol=1e-12):
            raise ConfigError("(delta_g + delta_e)/2 does not match the field magnitude")
        object.__setattr__(self, "delta_g", float(dg))
        object.__setattr__(self, "delta_e", float(de))

    @property
    def phi(self) -> float:
        return (self.delta_g + self.delta_e) / 2

    @classmethod
    def from_phi(cls, phi: float, orientation: int = 1) -> HyperfineField:
        return cls(B_REF_TESLA * phi / PHI_REF, orientation)


@dataclass(frozen=True)
class CollectiveQuantities:
    gamma_prime: float
    delta_prime_offset: float
    delta_ls: float
    zeta_s: float
    omega_drive: complex


def derive_collective(params: CavityParams) -> CollectiveQuantities:
    """Cavity-enhanced decay rate, collective Lamb shift and cavity drive."""
    k, dc = params.kappa, params.delta_c
    denom = k * k + dc * dc
    delta_ls = -dc / denom
    zeta_s = k / denom
    return CollectiveQuantities(
        gamma_prime=UNITS.gamma + 4.0 / 3.0 * params.g2n * zeta_s,
        delta_prime_offset=2.0 / 3.0 * params.g2n * delta_ls,
        delta_ls=delta_ls,
        zeta_s=zeta_s,
        omega_drive=math.sqrt(2 * params.kappa_R) * params.a_in / complex(k, dc),
    )


def mixing_angle(phi, g: float, n: float):
    """Return ``(cos_theta, sin_theta)`` of the dark-state polariton.

    ``phi`` may be a scalar or an array.  The angle is undefined when both
    the splitting and the collective coupling vanish.
    """
    phi = np.asarray(phi, dtype=float)
    if np.any(phi < 0):
        raise ConfigError("phi must be non-negative")
    coupling2 = 2.0 / 3.0 * g * g * n
    norm = np.sqrt(phi * phi + coupling2)
    if np.any(norm == 0):
        raise ConfigError("mixing angle undefined for phi = 0 and g*sqrt(N) = 0")
    cos_t = phi / norm
    sin_t = math.sqrt(coupling2) / norm
    if cos_t.ndim == 0:
        return float(cos_t), float(sin_t)
    return cos_t, sin_t


def group_velocity(phi, g: float, n: float):
    """Group velocity in units of c; exactly 0 at phi = 0."""
    phi = np.asarray(phi, dtype=float)
    if np.any(phi < 0):
        raise ConfigError("phi must be non-negative")
    # 3 phi^2 / (3 phi^2 + 2 g^2 N) equals 1 / (1 + 2 g^2 N / (3 phi^2)) without overflow at small phi
    p2 = 3.0 * phi * phi
    with np.errstate(invalid="ignore"):
        v = np.where(phi > 0, p2 / (p2 + 2.0 * g * g * n), 0.0)
    return float(v) if v.ndim == 0 else v


def delta_c_from_angle(angle_urad: float, coefficient: float) -> float:
    """Cavity detuning for an incidence angle, given a user-calibrated slope [gamma / urad]."""
    return coefficient * (angle_urad - PHI0_URAD)
