"""State generators for the two physical examples: the spin pair in a
nanopore and the thermal XXZ chain with a Dzyaloshinskii-Moriya term.

Units: hbar = k_B = 1. The nanopore temperature enters only through the
dimensionless beta = omega_0 / T.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import PSD_TOL, SX, SY, SZ, InvalidState, validate

ANGLE_TOL = 1e-12


class SingularAngles(ValueError):
    """The closed-form mixing angles are undefined (e.g. Dx = 0)."""


@dataclass(frozen=True)
class NanoporeParams:
    N: int = 100
    D: float = 1.0
    t: float = 0.0
    beta: float = 1.0

    def __post_init__(self):
        if int(self.N) != self.N or self.N < 2:
            raise ValueError("N must be an integer >= 2")
        if self.beta < 0:
            raise ValueError("beta must be nonnegative")

    @property
    def a(self) -> float:
        return 1.5 * self.D


@dataclass(frozen=True)
class NanoporeCorrelations:
    p: float
    q_plus: float   # q + r
    q_minus: float  # q - r
    u: float

    @property
    def q(self) -> float:
        return 0.5 * (self.q_plus + self.q_minus)

    @property
    def r(self) -> float:
        return 0.5 * (self.q_plus - self.q_minus)


@dataclass(frozen=True)
class XxzDmParams:
    J: float = 1.0
    Jz: float = 0.0
    Dx: float = 1.0
    T_temp: float = 1.0

    def __post_init__(self):
        if not self.T_temp > 0:
            raise ValueError("temperature must be positive")

    @property
    def beta(self) -> float:
        return 1.0 / self.T_temp

    @property
    def omega_prime(self) -> float:
        return math.hypot(self.J + self.Jz, 2 * self.Dx)

    @property
    def phi(self) -> float:
        return math.atan(2 * self.Dx / (self.J + self.Jz - self.omega_prime))

    @property
    def varphi(self) -> float:
        return math.atan(2 * self.Dx / (self.J + self.Jz + self.omega_prime))


def _signed_power(c: float, n: int) -> float:
    """c**n via exp(n ln|c|) with the sign tracked; exact 0 at c = 0."""
    if n == 0:
        return 1.0
    if c == 0.0:
        return 0.0
    mag = math.exp(n * math.log(abs(c)))
    return -mag if (c < 0 and n % 2) else mag


def nanopore_correlations(params: NanoporeParams) -> NanoporeCorrelations:
    N, at = params.N, params.a * params.t
    th = math.tanh(params.beta / 2)
    c, s = math.cos(at), math.sin(at)
    return NanoporeCorrelations(
        p=0.5 * th * _signed_power(c, N - 1),
        q_plus=0.25 * th * th,
        q_minus=0.25 * th * th * _signed_power(math.cos(2 * at), N - 2),
        u=0.25 * th * _signed_power(c, N - 2) * s,
    )


def nanopore_state(params: NanoporeParams) -> np.ndarray:
    """Reduced density matrix of one spin pair; centrosymmetric with
    p1 = 1/4, p2 = p4 = p/2, p3 = p5 = -u, p6 = q - r, p7 = q + r."""
    c = nanopore_correlations(params)
    lo = c.p / 2 - 1j * c.u
    hi = c.p / 2 + 1j * c.u
    rho = np.array([
        [0.25, lo, lo, c.q_minus],
        [hi, 0.25, c.q_plus, hi],
        [hi, c.q_plus, 0.25, hi],
        [c.q_minus, lo, lo, 0.25],
    ], dtype=complex)
    min_eig = validate(rho).min_eigenvalue
    if min_eig < -PSD_TOL:
        raise InvalidState(f"nanopore state not positive (min eigenvalue {min_eig:.3e})")
    return rho


def xxz_hamiltonian(J: float, Jz: float, Dx: float) -> np.ndarray:
    return (J * np.kron(SX, SX) + J * np.kron(SY, SY) + Jz * np.kron(SZ, SZ)
            + Dx * (np.kron(SY, SZ) - np.kron(SZ, SY)))


def thermal_state(H: np.ndarray, beta: float) -> np.ndarray:
    """exp(-beta H) / Z through the eigendecomposition of H, shifting by the
    ground energy so no exponent is positive."""
    if beta < 0:
        raise ValueError("beta must be nonnegative")
    H = np.asarray(H, dtype=complex)
    E, V = np.linalg.eigh(0.5 * (H + H.conj().T))
    w = np.exp(-beta * (E - E[0]))
    w /= w.sum()
    rho = (V * w) @ V.conj().T
    return 0.5 * (rho + rho.conj().T)


def xxz_thermal(params: XxzDmParams) -> np.ndarray:
    return thermal_state(xxz_hamiltonian(params.J, params.Jz, params.Dx), params.beta)


@dataclass(frozen=True)
class ClosedForm:
    rho: np.ndarray
    trace_defect: float  # |Tr - 1| of the matrix before renormalization


CLOSED_FORM_VARIANTS = ("printed", "corrected")


def xxz_closed_form_full(params: XxzDmParams, variant: str = "printed") -> ClosedForm:
    """Closed-form thermal matrix.

    ``"printed"`` keeps the reference expressions term by term: the second term of
    xi uses sin(varphi) cos(phi) and nu uses exp(-beta (Jz - 2J)).
    ``"corrected"`` uses sin(varphi) cos(varphi) and exp(-beta (2J - Jz)),
    the energy of that level; it agrees with exp(-beta H)/Z to rounding.
    """
    if variant not in CLOSED_FORM_VARIANTS:
        raise ValueError(f"unknown closed-form variant {variant!r}")
    printed = variant == "printed"
    J, Jz, b = params.J, params.Jz, params.beta
    w = params.omega_prime
    if abs(J + Jz - w) <= ANGLE_TOL or abs(J + Jz + w) <= ANGLE_TOL:
        raise SingularAngles(
            f"mixing angles undefined for J={J}, Jz={Jz}, Dx={params.Dx}")
    phi, vphi = params.phi, params.varphi
    e_lo = math.exp(b * (J - w))
    e_hi = math.exp(b * (J + w))
    sp, cp = math.sin(phi), math.cos(phi)
    sv, cv = math.sin(vphi), math.cos(vphi)
    mu_p = math.exp(-b * Jz) + (e_lo * sp**2 + e_hi * sv**2)
    mu_m = math.exp(-b * Jz) - (e_lo * sp**2 + e_hi * sv**2)
    e_nu = math.exp(-b * (Jz - 2 * J)) if printed else math.exp(-b * (2 * J - Jz))
    nu_p = e_nu + (e_lo * cp**2 + e_hi * cv**2)
    nu_m = e_nu - (e_lo * cp**2 + e_hi * cv**2)
    xi = 1j * e_lo * sp * cp + 1j * e_hi * sv * (cp if printed else cv)
    Zp = 2 * math.exp(-b * J) * math.cosh(b * (J - Jz)) + 2 * math.exp(b * J) * math.cosh(b * w)
    rho = np.array([
        [mu_p, -xi, xi, mu_m],
        [xi, nu_p, nu_m, -xi],
        [-xi, nu_m, nu_p, xi],
        [mu_m, xi, -xi, mu_p],
    ], dtype=complex) / (2 * Zp)
    tr = float(np.trace(rho).real)
    defect = abs(tr - 1.0)
    if defect > 1e-12:
        rho = rho / tr
    return ClosedForm(rho, defect)


def xxz_closed_form(params: XxzDmParams, variant: str = "printed") -> np.ndarray:
    """Closed-form thermal matrix, renormalized to unit trace when needed."""
    return xxz_closed_form_full(params, variant).rho


def closed_form_deviation(params: XxzDmParams, variant: str = "printed") -> float:
    """Largest elementwise gap between the closed form and exp(-beta H)/Z."""
    return float(np.max(np.abs(xxz_closed_form(params, variant) - xxz_thermal(params))))


def model_state(doc: dict) -> np.ndarray:
    """Build the state named by a model-parameter document."""
    model = doc.get("model")
    try:
        if model == "nanopore":
            return nanopore_state(NanoporeParams(
                N=int(doc.get("N", 100)), D=float(doc["D"]),
                t=float(doc["t"]), beta=float(doc["beta"])))
        if model == "xxzdm":
            return xxz_thermal(XxzDmParams(
                J=float(doc["J"]), Jz=float(doc["Jz"]), Dx=float(doc["Dx"]),
                T_temp=float(doc["T"])))
    except KeyError as exc:
        raise ValueError(f"missing model parameter {exc}") from None
    raise ValueError(f"unknown model {model!r}")
