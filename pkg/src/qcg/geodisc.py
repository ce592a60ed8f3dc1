"""Geometric measure of discord under two-sided von Neumann measurements.

For a state with Bloch form (x, y, T) and measurement axes (k, l) the squared
Hilbert-Schmidt distance to the measured (classical-classical) state is

    D^2 = 1/4 [ |x|^2 + |y|^2 + ||T||_F^2 - f(k, l) ],
    f(k, l) = (k.x)^2 + (l.y)^2 + (k^T T l)^2,

and G is its minimum over unit k, l. For fixed l the best k is the top
eigenvector of x x^T + (T l)(T l)^T (and symmetrically for l), so f is
maximized by alternating those two eigen-steps from many starting axes.
"""
from __future__ import annotations

import enum
import warnings
from dataclasses import dataclass, field

import numpy as np

from .core import (CsParams, BlochForm, I2, SX, SY, SZ, build_cs, check_state,
                   to_bloch)

EPS = 1e-12
CLAMP_TOL = 1e-12


class NoConvergence(RuntimeWarning):
    """Every optimizer start hit ``max_iters``; the best value found is
    still returned, flagged as unconverged."""


class CaseMismatch(ValueError):
    pass


class Case(enum.Enum):
    CASE1 = "Case1"
    CASE2 = "Case2"


@dataclass(frozen=True)
class MeasurementAxes:
    k: np.ndarray
    l: np.ndarray

    def __post_init__(self):
        for name in ("k", "l"):
            v = np.asarray(getattr(self, name), dtype=float)
            if v.shape != (3,) or abs(np.linalg.norm(v) - 1.0) > 1e-12:
                raise ValueError(f"axis {name} must be a unit 3-vector, got {v}")
            object.__setattr__(self, name, v)

    @classmethod
    def normalized(cls, k, l) -> "MeasurementAxes":
        k = np.asarray(k, dtype=float)
        l = np.asarray(l, dtype=float)
        return cls(k / np.linalg.norm(k), l / np.linalg.norm(l))


@dataclass(frozen=True)
class OptimizerConfig:
    """``restarts`` covering starts for the alternating ascent; ``sphere_grid``
    is the per-angle resolution of the coarse screen that seeds one more
    start, and of the grid methods."""
    restarts: int = 16
    sphere_grid: int = 24
    tol: float = 1e-13
    max_iters: int = 200

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError("restarts must be >= 1")
        if self.sphere_grid < 4:
            raise ValueError("sphere_grid must be >= 4")
        if not self.tol > 0:
            raise ValueError("tol must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")


@dataclass(frozen=True)
class GeoResult:
    value: float
    axes: MeasurementAxes
    method: str  # "alternating" | "grid" | "grid_polished"
    iterations: int
    objective_inner: float
    converged: bool = True


@dataclass
class _Ascent:
    f: float
    k: np.ndarray
    l: np.ndarray
    iterations: int
    converged: bool
    history: list = field(default_factory=list)


# -- measurement and distance ---------------------------------------------

def _projectors(n: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    ns = n[0] * SX + n[1] * SY + n[2] * SZ
    return 0.5 * (I2 + ns), 0.5 * (I2 - ns)


def micc(rho: np.ndarray, axes: MeasurementAxes) -> np.ndarray:
    """Measurement-induced classical-classical state: the sum over the four
    outcome projectors Pi_i^A (x) Pi_j^B applied to ``rho`` on both sides."""
    rho = np.asarray(rho, dtype=complex)
    chi = np.zeros((4, 4), dtype=complex)
    for pa in _projectors(axes.k):
        for pb in _projectors(axes.l):
            P = np.kron(pa, pb)
            chi += P @ rho @ P
    return chi


def hs_distance_sq(rho: np.ndarray, sigma: np.ndarray) -> float:
    d = np.asarray(rho, dtype=complex) - np.asarray(sigma, dtype=complex)
    return float(np.real(np.trace(d @ d.conj().T)))


def inner_objective(b: BlochForm, k: np.ndarray, l: np.ndarray) -> float:
    return float((k @ b.x) ** 2 + (l @ b.y) ** 2 + (k @ b.T @ l) ** 2)


def objective(b: BlochForm, axes: MeasurementAxes) -> float:
    return 0.25 * (b.total_norm_sq - inner_objective(b, axes.k, axes.l))


# -- single-axis eigen-step ------------------------------------------------

def _canonical_sign(v: np.ndarray) -> np.ndarray:
    """Flip rows of ``v`` so the first component above EPS is positive."""
    big = np.abs(v) > EPS
    first = np.argmax(big, axis=-1)
    lead = np.take_along_axis(v, first[..., None], axis=-1)[..., 0]
    sign = np.where(lead < 0, -1.0, 1.0)
    return v * sign[..., None]


def _top_rank2(a: np.ndarray, V: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Top eigenpair of a a^T + v v^T for every row v of ``V``.

    Works through the 2x2 Gram matrix of the columns [a, v]. On an exact
    tie the direction of ``a`` wins; when the matrix vanishes the axis
    falls back to z.
    """
    g11 = float(a @ a)
    g12 = V @ a
    g22 = np.einsum("ij,ij->i", V, V)
    half = 0.5 * (g11 - g22)
    lam = 0.5 * (g11 + g22) + np.hypot(half, g12)
    # two candidate eigenvectors of the Gram matrix; keep the better conditioned
    w1a, w2a = lam - g22, g12
    w1b, w2b = g12, lam - g11
    use_a = np.hypot(w1a, w2a) >= np.hypot(w1b, w2b)
    w1 = np.where(use_a, w1a, w1b)
    w2 = np.where(use_a, w2a, w2b)
    tied = np.hypot(w1, w2) <= EPS * np.maximum(lam, 1.0)
    w1 = np.where(tied, 1.0, w1)
    w2 = np.where(tied, 0.0, w2)
    k = w1[:, None] * a[None, :] + w2[:, None] * V
    norm = np.linalg.norm(k, axis=1)
    dead = norm <= EPS
    k = np.where(dead[:, None], np.array([0.0, 0.0, 1.0]),
                 k / np.where(dead, 1.0, norm)[:, None])
    return _canonical_sign(k), np.where(dead, 0.0, lam)


def optimal_axis_given(b: BlochForm, fixed_l: np.ndarray) -> tuple[np.ndarray, float]:
    """Best qubit-A axis for a fixed qubit-B axis, with the top eigenvalue
    of x x^T + (T l)(T l)^T."""
    l = np.asarray(fixed_l, dtype=float)
    if abs(np.linalg.norm(l) - 1.0) > 1e-12:
        raise ValueError("fixed_l must be a unit vector")
    k, lam = _top_rank2(b.x, (b.T @ l)[None, :])
    return k[0], float(lam[0])


def optimal_partner_given(b: BlochForm, fixed_k: np.ndarray) -> tuple[np.ndarray, float]:
    """Mirror of :func:`optimal_axis_given`: best l for a fixed k."""
    k = np.asarray(fixed_k, dtype=float)
    if abs(np.linalg.norm(k) - 1.0) > 1e-12:
        raise ValueError("fixed_k must be a unit vector")
    l, lam = _top_rank2(b.y, (b.T.T @ k)[None, :])
    return l[0], float(lam[0])


# -- alternating maximization ----------------------------------------------

def sphere_covering(n: int) -> np.ndarray:
    """Deterministic Fibonacci covering of the upper hemisphere (axes are
    only defined up to sign), ``n`` unit vectors."""
    i = np.arange(n) + 0.5
    z = 1.0 - i / n
    r = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    phi = np.pi * (3.0 - np.sqrt(5.0)) * np.arange(n)
    return np.column_stack([r * np.cos(phi), r * np.sin(phi), z])


def _batch_f(b: BlochForm, K: np.ndarray, L: np.ndarray) -> np.ndarray:
    return (K @ b.x) ** 2 + (L @ b.y) ** 2 + np.einsum("ij,jk,ik->i", K, b.T, L) ** 2


def _ascend(b: BlochForm, L0: np.ndarray, tol: float, max_iters: int,
            record: bool = False) -> list[_Ascent]:
    """Run the alternating eigen-steps from every row of ``L0`` at once.

    A start stops once one full (k, l) sweep raises f by less than ``tol``.
    With ``record`` the value after each half step is kept; it never decreases.
    """
    L = np.array(L0, dtype=float)
    n = len(L)
    K, _ = _top_rank2(b.x, L @ b.T.T)
    f = _batch_f(b, K, L)
    iters = np.zeros(n, dtype=int)
    active = np.ones(n, dtype=bool)
    history = [[float(v)] for v in f] if record else None
    for _ in range(max_iters):
        idx = np.flatnonzero(active)
        if idx.size == 0:
            break
        Ki = K[idx]
        Li, _ = _top_rank2(b.y, Ki @ b.T)
        if record:
            mid = _batch_f(b, Ki, Li)
        Ki, _ = _top_rank2(b.x, Li @ b.T.T)
        fi = _batch_f(b, Ki, Li)
        if record:
            for j, s in enumerate(idx):
                history[s].extend((float(mid[j]), float(fi[j])))
        done = fi - f[idx] < tol
        K[idx], L[idx], f[idx] = Ki, Li, fi
        iters[idx] += 1
        active[idx[done]] = False
    return [_Ascent(float(f[s]), K[s], L[s], int(iters[s]), not bool(active[s]),
                    history[s] if record else [])
            for s in range(n)]


def _best(runs: list[_Ascent]) -> _Ascent:
    # ties resolved by lowest start index
    best = runs[0]
    for r in runs[1:]:
        if r.f > best.f:
            best = r
    return best


def alternating_maximize(b: BlochForm, cfg: OptimizerConfig = OptimizerConfig(),
                         ) -> tuple[float, MeasurementAxes, int]:
    """Maximize f(k, l) from ``cfg.restarts`` covering starts.

    Returns ``(f_star, axes, iterations)``. If every start exhausts
    ``cfg.max_iters`` a NoConvergence warning is emitted.
    """
    f, axes, iters, converged = _alternating(b, cfg)
    if not converged:
        warnings.warn("alternating maximization hit max_iters in every start",
                      NoConvergence, stacklevel=2)
    return f, axes, iters


def _tangent_basis(v: np.ndarray) -> np.ndarray:
    e = np.zeros(3)
    e[np.argmin(np.abs(v))] = 1.0
    u1 = e - (e @ v) * v
    u1 /= np.linalg.norm(u1)
    return np.column_stack([u1, np.cross(v, u1)])


def _riemannian(b: BlochForm, k: np.ndarray, l: np.ndarray):
    """Gradient (4,) and Hessian (4, 4) of f on the product of two spheres,
    in tangent coordinates at (k, l)."""
    x, y, T = b.x, b.y, b.T
    tl, tk, c = T @ l, T.T @ k, k @ T @ l
    gk = 2 * (k @ x) * x + 2 * c * tl
    gl = 2 * (l @ y) * y + 2 * c * tk
    hkk = 2 * np.outer(x, x) + 2 * np.outer(tl, tl)
    hll = 2 * np.outer(y, y) + 2 * np.outer(tk, tk)
    hkl = 2 * np.outer(tl, tk) + 2 * c * T
    Uk, Ul = _tangent_basis(k), _tangent_basis(l)
    grad = np.concatenate([Uk.T @ gk, Ul.T @ gl])
    H = np.empty((4, 4))
    H[:2, :2] = Uk.T @ hkk @ Uk - (k @ gk) * np.eye(2)
    H[2:, 2:] = Ul.T @ hll @ Ul - (l @ gl) * np.eye(2)
    H[:2, 2:] = Uk.T @ hkl @ Ul
    H[2:, :2] = H[:2, 2:].T
    return grad, H, Uk, Ul


GRAD_TOL = 1e-10


def _newton_polish(b: BlochForm, k: np.ndarray, l: np.ndarray,
                   max_steps: int = 30) -> tuple[float, np.ndarray, np.ndarray, bool]:
    """Riemannian Newton ascent from (k, l); a step is kept only if f does
    not drop. Returns (f, k, l, stationary)."""
    f = inner_objective(b, k, l)
    for _ in range(max_steps):
        grad, H, Uk, Ul = _riemannian(b, k, l)
        if np.linalg.norm(grad) <= GRAD_TOL:
            return f, k, l, True
        evals = np.linalg.eigvalsh(H)
        if evals[-1] >= -1e-14:
            break  # not locally concave: leave it to the alternating steps
        s = np.linalg.solve(H, -grad)
        k2 = k + Uk @ s[:2]
        l2 = l + Ul @ s[2:]
        k2 /= np.linalg.norm(k2)
        l2 /= np.linalg.norm(l2)
        f2 = inner_objective(b, k2, l2)
        if f2 < f - 1e-15:
            break
        k, l, f = k2, l2, max(f, f2)
    grad, *_ = _riemannian(b, k, l)
    return f, k, l, bool(np.linalg.norm(grad) <= GRAD_TOL)


def _polished(b: BlochForm, runs: list[_Ascent], window: float = 1e-4) -> tuple[_Ascent, bool]:
    """Newton-polish every start that ended near the best value and return
    the winner. Converged means some start reached a stationary point."""
    top = max(r.f for r in runs)
    stationary = False
    out = []
    for r in runs:
        if r.f >= top - window:
            f, k, l, ok = _newton_polish(b, r.k, r.l)
            stationary |= ok or r.converged
            out.append(_Ascent(f, _canonical_sign(k[None])[0],
                               _canonical_sign(l[None])[0], r.iterations, ok))
        else:
            out.append(r)
    return _best(out), stationary


def _coarse_best_l(b: BlochForm, resolution: int) -> np.ndarray:
    G = hemisphere_grid(resolution)
    F = (G @ b.x)[:, None] ** 2 + (G @ b.y)[None, :] ** 2 + ((G @ b.T) @ G.T) ** 2
    return G[np.unravel_index(np.argmax(F), F.shape)[1]]


def _starts(b: BlochForm, cfg: OptimizerConfig) -> np.ndarray:
    """Covering starts plus state-derived ones: right singular vectors of T,
    the direction of y, and the best cell of a coarse grid screen."""
    extra = list(np.linalg.svd(b.T)[2])
    ny = np.linalg.norm(b.y)
    if ny > EPS:
        extra.append(b.y / ny)
    if cfg.sphere_grid >= 8:
        extra.append(_coarse_best_l(b, cfg.sphere_grid))
    return np.vstack([sphere_covering(cfg.restarts), np.array(extra)])


def _alternating(b: BlochForm, cfg: OptimizerConfig):
    runs = _ascend(b, _starts(b, cfg), cfg.tol, cfg.max_iters)
    best, converged = _polished(b, runs)
    return best.f, MeasurementAxes.normalized(best.k, best.l), best.iterations, converged


def hemisphere_grid(resolution: int) -> np.ndarray:
    theta = np.linspace(0.0, 0.5 * np.pi, resolution)
    phi = np.linspace(0.0, 2.0 * np.pi, resolution, endpoint=False)
    t, p = np.meshgrid(theta, phi, indexing="ij")
    return np.column_stack([(np.sin(t) * np.cos(p)).ravel(),
                            (np.sin(t) * np.sin(p)).ravel(),
                            np.cos(t).ravel()])


def grid_oracle(b: BlochForm, resolution: int = 48, polish: bool = True,
                cfg: OptimizerConfig = OptimizerConfig(),
                ) -> tuple[float, MeasurementAxes]:
    """Brute-force f over a (theta, phi) grid on both hemispheres, then
    polish the best cell by alternating ascent."""
    if resolution < 8:
        raise ValueError("resolution must be >= 8")
    G = hemisphere_grid(resolution)
    kx = (G @ b.x) ** 2
    ly = (G @ b.y) ** 2
    ktl = (G @ b.T) @ G.T
    F = kx[:, None] + ly[None, :] + ktl**2
    i, j = np.unravel_index(np.argmax(F), F.shape)
    f, k, l = float(F[i, j]), G[i], G[j]
    if polish:
        run, _ = _polished(b, _ascend(b, l[None, :], cfg.tol, cfg.max_iters))
        # the ascent re-optimizes k first, so it never ends below the grid cell
        if run.f >= f:
            f, k, l = run.f, run.k, run.l
    return f, MeasurementAxes.normalized(k, l)


def _finish(b: BlochForm, f_star: float) -> float:
    value = 0.25 * (b.total_norm_sq - f_star)
    if value < -CLAMP_TOL:
        raise ArithmeticError(f"negative geometric measure {value:.3e}")
    return max(value, 0.0)


def geometric_measure(rho: np.ndarray, cfg: OptimizerConfig = OptimizerConfig(),
                      method: str = "alternating") -> GeoResult:
    """G(rho) = min over axes of the squared HS distance to the measured state.

    ``method`` is ``"alternating"`` (multi-start ascent), ``"grid"`` (raw
    grid oracle at ``cfg.sphere_grid``) or ``"grid_polished"``.
    """
    b = to_bloch(check_state(rho))
    return geometric_measure_bloch(b, cfg, method)


def geometric_measure_bloch(b: BlochForm, cfg: OptimizerConfig = OptimizerConfig(),
                            method: str = "alternating") -> GeoResult:
    if method == "alternating":
        f, axes, iters, converged = _alternating(b, cfg)
        if not converged:
            warnings.warn("geometric measure did not converge", NoConvergence,
                          stacklevel=2)
    elif method in ("grid", "grid_polished"):
        res = max(cfg.sphere_grid, 8)
        f, axes = grid_oracle(b, res, polish=method == "grid_polished", cfg=cfg)
        iters, converged = 0, True
    else:
        raise ValueError(f"unknown method {method!r}")
    return GeoResult(value=_finish(b, f), axes=axes, method=method,
                     iterations=iters, objective_inner=f, converged=converged)


# -- closed-form l'^2 fast paths for CS states ------------------------------

CASE_TOL = 1e-12


def classify_case(p: CsParams) -> tuple[Case, bool]:
    """Case1 when p3 and p5 both vanish, else Case2; the flag marks the
    degenerate sub-case (p7 = 0 for Case1, p7 = -p3 for Case2)."""
    if abs(p.p3) <= CASE_TOL and abs(p.p5) <= CASE_TOL:
        return Case.CASE1, abs(p.p7) <= CASE_TOL
    return Case.CASE2, abs(p.p7 + p.p3) <= CASE_TOL


def lprime_sq_definitional(b: BlochForm, l: np.ndarray) -> float:
    l = np.asarray(l, dtype=float)
    if abs(np.linalg.norm(l) - 1.0) > 1e-12:
        raise ValueError("l must be a unit vector")
    tl = b.T @ l
    return float(tl @ tl)


def lprime_sq_case1(p: CsParams, l3: float) -> float:
    if classify_case(p)[0] is not Case.CASE1:
        raise CaseMismatch("case-1 formula needs p3 = p5 = 0")
    if not -1.0 <= l3 <= 1.0:
        raise ValueError("l3 must lie in [-1, 1]")
    return 4 * p.p6**2 - ((2 * p.p6) ** 2 - (4 * p.p1 - 1) ** 2) * l3**2


def lprime_sq_case2(p: CsParams, l: np.ndarray) -> float:
    if classify_case(p)[0] is not Case.CASE2:
        raise CaseMismatch("case-2 formula needs p3 or p5 nonzero")
    l1, l2, l3 = np.asarray(l, dtype=float)
    return float(4 * (p.p6 + p.p7) ** 2 * l1**2
                 + 4 * ((p.p6 - p.p7) - 2 * p.p3) ** 2 * l2**2
                 + (4 * p.p1 - 4 * p.p3 - 1) ** 2 * l3**2)


def lprime_case_deviation(p: CsParams, l: np.ndarray) -> float:
    """|fast-path formula - |T l|^2| for the CS state built from ``p``.

    Case 1 evaluates its formula at l3 with l taken in the (1, 3) plane.
    """
    b = to_bloch(build_cs(p))
    l = np.asarray(l, dtype=float)
    case, _ = classify_case(p)
    if case is Case.CASE1:
        l3 = float(np.clip(l[2], -1.0, 1.0))
        lp = np.array([np.sqrt(1.0 - l3 * l3), 0.0, l3])
        return abs(lprime_sq_case1(p, l3) - lprime_sq_definitional(b, lp))
    return abs(lprime_sq_case2(p, l) - lprime_sq_definitional(b, l))
