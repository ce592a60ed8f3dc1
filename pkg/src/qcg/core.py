"""Two-qubit density matrices: CS/X parameterizations, Hadamard conjugation,
Pauli (Bloch) decomposition and validation.

Density matrices are plain 4x4 complex numpy arrays in the basis
|00>, |01>, |10>, |11>.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, fields

import numpy as np

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-10
PSD_TOL = 1e-10
PATTERN_TOL = 1e-10

I2 = np.eye(2, dtype=complex)
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = (I2, SX, SY, SZ)

# PAULI_PRODUCTS[mu, nu] = sigma_mu (x) sigma_nu
PAULI_PRODUCTS = np.array([[np.kron(a, b) for b in PAULI] for a in PAULI])

HADAMARD = np.array([[1, 1], [1, -1]], dtype=float) / np.sqrt(2)
# entries are exactly +-1/2
HH = 0.5 * np.kron(np.array([[1, 1], [1, -1]]), np.array([[1, 1], [1, -1]])).astype(float)

# order-reversal permutation |ij> -> |5-i,5-j> (1-based)
REVERSAL = np.fliplr(np.eye(4))

# entries allowed to be nonzero in an X state
X_MASK = np.eye(4, dtype=bool) | np.fliplr(np.eye(4, dtype=bool))


class NotCsForm(ValueError):
    pass


class NotXForm(ValueError):
    pass


class InvalidState(ValueError):
    pass


@dataclass(frozen=True)
class CsParams:
    p1: float = 0.25
    p2: float = 0.0
    p3: float = 0.0
    p4: float = 0.0
    p5: float = 0.0
    p6: float = 0.0
    p7: float = 0.0

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def is_physical(self, tol: float = PSD_TOL) -> bool:
        """Principal-minor screen followed by the full eigenvalue check."""
        if not (-tol <= self.p1 <= 0.5 + tol):
            return False
        if abs(self.p6) > self.p1 + tol or abs(self.p7) > 0.5 - self.p1 + tol:
            return False
        return validate(build_cs(self)).min_eigenvalue >= -tol


@dataclass(frozen=True)
class XParams:
    q1: float = 0.25
    q2: float = 0.25
    q3: float = 0.25
    q4: float = 0.0
    q5: float = 0.0
    q6: float = 0.0
    q7: float = 0.0

    @property
    def q44(self) -> float:
        return 1.0 - self.q1 - self.q2 - self.q3

    def as_tuple(self) -> tuple[float, ...]:
        return tuple(getattr(self, f.name) for f in fields(self))

    def is_physical(self, tol: float = PSD_TOL) -> bool:
        # exact PSD conditions for the X pattern: two independent 2x2 blocks
        q1, q2, q3, q44 = self.q1, self.q2, self.q3, self.q44
        if min(q1, q2, q3, q44) < -tol:
            return False
        return (self.q4**2 + self.q5**2 <= q1 * q44 + tol
                and self.q6**2 + self.q7**2 <= q2 * q3 + tol)


@dataclass(frozen=True)
class BlochForm:
    """Local Bloch vectors ``x`` (qubit A), ``y`` (qubit B) and the 3x3
    correlation matrix ``T``."""

    x: np.ndarray
    y: np.ndarray
    T: np.ndarray

    @property
    def R(self) -> np.ndarray:
        """The 4x4 matrix ``[[1, y^T], [x, T]]`` of Pauli expectations."""
        R = np.empty((4, 4))
        R[0, 0] = 1.0
        R[0, 1:] = self.y
        R[1:, 0] = self.x
        R[1:, 1:] = self.T
        return R

    @property
    def total_norm_sq(self) -> float:
        return float(self.x @ self.x + self.y @ self.y + np.sum(self.T**2))


@dataclass(frozen=True)
class ValidationReport:
    hermiticity_defect: float
    trace_defect: float
    min_eigenvalue: float
    is_cs: bool
    is_x: bool
    cs_defect: float
    x_defect: float

    @property
    def is_valid(self) -> bool:
        return (self.hermiticity_defect <= HERMITIAN_TOL
                and self.trace_defect <= TRACE_TOL
                and self.min_eigenvalue >= -PSD_TOL)

    def problems(self) -> list[str]:
        out = []
        if self.hermiticity_defect > HERMITIAN_TOL:
            out.append(f"hermiticity defect {self.hermiticity_defect:.3e}")
        if self.trace_defect > TRACE_TOL:
            out.append(f"trace defect {self.trace_defect:.3e}")
        if self.min_eigenvalue < -PSD_TOL:
            out.append(f"negative eigenvalue {self.min_eigenvalue:.3e}")
        return out


def build_cs(p: CsParams) -> np.ndarray:
    p1, p2, p3, p4, p5, p6, p7 = p.as_tuple()
    a = p2 + 1j * p3
    b = p4 + 1j * p5
    return np.array([
        [p1, a, b, p6],
        [a.conjugate(), 0.5 - p1, p7, b.conjugate()],
        [b.conjugate(), p7, 0.5 - p1, a.conjugate()],
        [p6, b, a, p1],
    ], dtype=complex)


def build_x(q: XParams) -> np.ndarray:
    a = q.q4 + 1j * q.q5
    b = q.q6 + 1j * q.q7
    return np.array([
        [q.q1, 0, 0, a],
        [0, q.q2, b, 0],
        [0, b.conjugate(), q.q3, 0],
        [a.conjugate(), 0, 0, q.q44],
    ], dtype=complex)


def extract_cs(rho: np.ndarray, tol: float = PATTERN_TOL) -> CsParams:
    """Read p1..p7 off ``rho``, averaging every redundant copy of each
    parameter. Raises NotCsForm if ``rho`` is not rebuilt within ``tol``."""
    r = np.asarray(rho, dtype=complex)
    p1 = 0.25 * (r[0, 0] + r[3, 3] + 1.0 - r[1, 1] - r[2, 2]).real
    a = 0.25 * (r[0, 1] + r[1, 0].conjugate() + r[3, 2] + r[2, 3].conjugate())
    b = 0.25 * (r[0, 2] + r[2, 0].conjugate() + r[3, 1] + r[1, 3].conjugate())
    p6 = 0.25 * (r[0, 3] + r[3, 0] + r[0, 3].conjugate() + r[3, 0].conjugate()).real
    p7 = 0.25 * (r[1, 2] + r[2, 1] + r[1, 2].conjugate() + r[2, 1].conjugate()).real
    p = CsParams(float(p1), float(a.real), float(a.imag), float(b.real),
                 float(b.imag), float(p6), float(p7))
    residual = np.max(np.abs(r - build_cs(p)))
    if residual > tol:
        raise NotCsForm(f"state is not centrosymmetric (residual {residual:.3e})")
    return p


def extract_x(rho: np.ndarray, tol: float = PATTERN_TOL) -> XParams:
    r = np.asarray(rho, dtype=complex)
    a = 0.5 * (r[0, 3] + r[3, 0].conjugate())
    b = 0.5 * (r[1, 2] + r[2, 1].conjugate())
    q = XParams(float(r[0, 0].real), float(r[1, 1].real), float(r[2, 2].real),
                float(a.real), float(a.imag), float(b.real), float(b.imag))
    residual = np.max(np.abs(r - build_x(q)))
    if residual > tol:
        raise NotXForm(f"state is not of X form (residual {residual:.3e})")
    return q


def hadamard_conjugate(rho: np.ndarray) -> np.ndarray:
    """(H x H) rho (H x H); maps CS states to X states and back."""
    return HH @ np.asarray(rho, dtype=complex) @ HH


def to_bloch(rho: np.ndarray) -> BlochForm:
    # Tr[rho A] = sum_ij rho_ij A_ji
    R = np.einsum("ij,mnji->mn", np.asarray(rho, dtype=complex), PAULI_PRODUCTS).real
    return BlochForm(x=R[1:, 0].copy(), y=R[0, 1:].copy(), T=R[1:, 1:].copy())


def from_bloch(b: BlochForm) -> np.ndarray:
    return 0.25 * np.einsum("mn,mnij->ij", b.R, PAULI_PRODUCTS)


def r_matrix(rho: np.ndarray) -> np.ndarray:
    return to_bloch(rho).R


def validate(rho: np.ndarray) -> ValidationReport:
    r = np.asarray(rho, dtype=complex)
    herm = float(np.max(np.abs(r - r.conj().T)))
    trace_defect = float(abs(np.trace(r) - 1.0))
    min_eig = float(np.linalg.eigvalsh(0.5 * (r + r.conj().T))[0])
    # the trace condition pins the CS diagonal to (p1, 1/2 - p1, 1/2 - p1, p1)
    cs_defect = max(float(np.max(np.abs(r - REVERSAL @ r @ REVERSAL))),
                    float(abs(r[0, 0] + r[1, 1] - 0.5)))
    x_defect = float(np.max(np.abs(r[~X_MASK])))
    return ValidationReport(
        hermiticity_defect=herm,
        trace_defect=trace_defect,
        min_eigenvalue=min_eig,
        is_cs=cs_defect <= PATTERN_TOL,
        is_x=x_defect <= PATTERN_TOL,
        cs_defect=cs_defect,
        x_defect=x_defect,
    )


def check_state(rho: np.ndarray) -> np.ndarray:
    """Return ``rho`` as an array or raise InvalidState naming the defects."""
    r = np.asarray(rho, dtype=complex)
    if r.shape != (4, 4):
        raise InvalidState(f"expected a 4x4 matrix, got shape {r.shape}")
    report = validate(r)
    if not report.is_valid:
        raise InvalidState("; ".join(report.problems()))
    return r


def random_dense(seed) -> np.ndarray:
    """GG^dagger / Tr(GG^dagger) with G a 4x4 complex Gaussian matrix."""
    rng = np.random.default_rng(seed)
    g = rng.standard_normal((4, 4)) + 1j * rng.standard_normal((4, 4))
    rho = g @ g.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.trace(rho).real


def random_cs(seed) -> CsParams:
    rho = random_dense(seed)
    return extract_cs(0.5 * (rho + REVERSAL @ rho @ REVERSAL))


def random_x(seed) -> XParams:
    rho = random_dense(seed)
    zz = np.kron(SZ, SZ)
    return extract_x(0.5 * (rho + zz @ rho @ zz))


# Printed R-matrix templates, kept only as cross-check vectors against the
# definitional to_bloch.

def printed_r_cs(p: CsParams) -> np.ndarray:
    p1, p2, p3, p4, p5, p6, p7 = p.as_tuple()
    return np.array([
        [1, 4 * p2, 0, 0],
        [4 * p4, 2 * (p6 + p7), 0, 0],
        [0, 0, 2 * (p6 - p7), -4 * p5],
        [0, 0, -4 * p3, 4 * p1 - 1],
    ], dtype=float)


def printed_r_x(q: XParams) -> np.ndarray:
    q1, q2, q3, q4, _, q6, _ = q.as_tuple()
    return np.array([
        [1, 0, 0, 2 * (q1 + q3) - 1],
        [0, 2 * (q6 + q4), 0, 0],
        [0, 0, 2 * (q6 - q4), 0],
        [2 * (q1 + q2) - 1, 0, 0, 1 - 2 * (q2 + q3)],
    ], dtype=float)


def r_discrepancies(printed: np.ndarray, definitional: np.ndarray,
                    tol: float = 1e-12) -> list[tuple[int, int]]:
    """Positions (mu, nu) where a printed R template disagrees with the
    definitional R matrix."""
    diff = np.abs(np.asarray(printed) - np.asarray(definitional)) > tol
    return [tuple(map(int, ij)) for ij in np.argwhere(diff)]


# -- state JSON ------------------------------------------------------------

def state_to_json(rho: np.ndarray, kind: str = "dense") -> dict:
    """Serialize ``rho`` as a cs/x/dense state document."""
    if kind == "cs":
        p = extract_cs(rho)
        return {"kind": "cs",
                "params": {f"p{i + 1}": v for i, v in enumerate(p.as_tuple())}}
    if kind == "x":
        q = extract_x(rho)
        return {"kind": "x",
                "params": {f"q{i + 1}": v for i, v in enumerate(q.as_tuple())}}
    if kind == "dense":
        r = np.asarray(rho, dtype=complex)
        return {"kind": "dense",
                "matrix": [[[float(z.real), float(z.imag)] for z in row] for row in r]}
    raise ValueError(f"unknown state kind {kind!r}")


def state_from_json(doc: dict) -> np.ndarray:
    """Build the matrix described by a state document. Raises ValueError on
    malformed input; physical validity is not checked here."""
    if not isinstance(doc, dict):
        raise ValueError("state document must be a JSON object")
    kind = doc.get("kind")
    if kind in ("cs", "x"):
        params = doc.get("params")
        if not isinstance(params, dict):
            raise ValueError("missing 'params' object")
        letter, cls, build = (("p", CsParams, build_cs) if kind == "cs"
                              else ("q", XParams, build_x))
        names = [f"{letter}{i}" for i in range(1, 8)]
        unknown = set(params) - set(names)
        if unknown:
            raise ValueError(f"unknown parameters {sorted(unknown)}")
        try:
            values = {n: float(params.get(n, cls.__dataclass_fields__[n].default))
                      for n in names}
        except (TypeError, ValueError) as exc:
            raise ValueError(f"non-numeric parameter: {exc}") from None
        return build(cls(**values))
    if kind == "dense":
        m = doc.get("matrix")
        try:
            arr = np.array(m, dtype=float)
        except (TypeError, ValueError) as exc:
            raise ValueError(f"malformed matrix: {exc}") from None
        if arr.shape != (4, 4, 2):
            raise ValueError(f"matrix must be 4x4 of [re, im] pairs, got {arr.shape}")
        return arr[..., 0] + 1j * arr[..., 1]
    raise ValueError(f"unknown state kind {kind!r}")


def dumps_state(rho: np.ndarray, kind: str = "dense") -> str:
    return json.dumps(state_to_json(rho, kind), indent=2)


def detect_kind(rho: np.ndarray, prefer: tuple[str, ...] = ("cs", "x")) -> str:
    """First kind in ``prefer`` whose pattern fits ``rho`` at PATTERN_TOL,
    else ``"dense"``."""
    for kind in prefer:
        try:
            (extract_cs if kind == "cs" else extract_x)(rho)
        except (NotCsForm, NotXForm):
            continue
        return kind
    return "dense"


PHI_PLUS = 0.5 * np.array([[1, 0, 0, 1], [0, 0, 0, 0], [0, 0, 0, 0], [1, 0, 0, 1]],
                          dtype=complex)
MAXIMALLY_MIXED = np.eye(4, dtype=complex) / 4


def werner(w: float) -> np.ndarray:
    return w * PHI_PLUS + (1 - w) * MAXIMALLY_MIXED


def product_state(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """|a><a| (x) |b><b| for Bloch directions ``a`` and ``b``."""
    ra = 0.5 * (I2 + a[0] * SX + a[1] * SY + a[2] * SZ)
    rb = 0.5 * (I2 + b[0] * SX + b[1] * SY + b[2] * SZ)
    return np.kron(ra, rb)
