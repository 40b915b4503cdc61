"""Form-valued radial resolvent kernel on real hyperbolic space.

Pipeline, d = 1 only (the other fields multiply the bookkeeping without
new algorithmic content and are rejected):

1.  `build_tau_p_action` realizes the degree-p form representation of
    SO(n) on Lambda^p(R^n) with exact integer matrices, together with
    the n-1 root-space generators Y_r projected into the maximal compact
    subalgebra, and the relevant Casimir elements.

2.  `build_radial_operator` conjugates the radial Hodge-Laplacian
    operator by (sinh t)^((n-1)/2), which removes the first-derivative
    term and leaves

        -v'' + [rho^2 - alpha_p + s^2 + D + W(e^-t)] v = 0,

    where D acts by left multiplication by the SO(n-1) Casimir matrix
    and the perturbation W has *closed-form* coefficients:

        W_k(X) = 2k [ (beta^2-beta) X - A X - X A ]   (k even)
        W_k(X) = 4k * sum_r Y_r X Y_r                 (k odd)

    with beta = (n-1)/2 and A = sum_r Y_r^2.  The k = 0 identification
    with rho^2 - alpha_p + D is checked exactly in rational arithmetic.

3.  `frobenius_solve` builds the solution decaying at infinity as a sum
    of per-block series  e^(-mu_j t) sum_l (a_{j,l} + t b_{j,l}) e^(-lt)
    with exponents mu_j = sqrt(s^2 + e_j) over the eigenvalues e_j of
    the E element.  When two exponents differ by an exact integer the
    plain series is obstructed and the logarithmic (t-linear) terms are
    switched on; near-integer gaps inside the resonance floor raise
    ResonanceDetected instead of returning a poisoned series.

4.  `kernel_eval` / `form_ode_residual` / `decay_check` evaluate the
    reconstructed kernel, its exact derivatives, the residual of the
    original radial equation, and the far-field decay rate.

5.  `psi_extract` integrates the kernel down to small t and extracts
    the coefficient of the t^(2-n) singularity.  For p >= 1 the kernel
    also carries *stronger* transverse singular sectors (up to t^-n);
    the delta-function normalizer lives in the spherically averaged
    sector, i.e. the kernel of T(X) = A X + X A - 2 sum_r Y_r X Y_r,
    which coincides with the commutant of the full SO(n) action.  The
    extraction therefore projects onto ker T before fitting t^(2-n).
"""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import (
    AssemblyMismatch,
    BranchPoint,
    DegenerateFit,
    DomainError,
    FitFailure,
    ResonanceDetected,
    StiffIntegration,
    TailBoundExceeded,
    TruncationWarning,
    UnsupportedField,
)
from .green import decay_rate_fit, vol_sphere
from .spaces import Field, SpaceDescriptor, alpha_p, make_space

__all__ = [
    "TauPAction",
    "RadialOperator",
    "CoverPoint",
    "FrobeniusKernel",
    "build_tau_p_action",
    "build_radial_operator",
    "cover_point",
    "frobenius_solve",
    "kernel_eval",
    "kernel_derivatives",
    "form_ode_residual",
    "operator_series_error",
    "decay_check",
    "psi_extract",
]


def _exterior_matrix(Y: np.ndarray, n: int, p: int) -> np.ndarray:
    """Derivation extension of an n x n integer matrix to Lambda^p(R^n).

    Basis: p-element subsets of {0..n-1} in lexicographic order.
    """
    basis = list(itertools.combinations(range(n), p))
    index = {I: i for i, I in enumerate(basis)}
    dim = len(basis)
    out = np.zeros((dim, dim), dtype=np.int64)
    for col, I in enumerate(basis):
        for t, it in enumerate(I):
            for j in range(n):
                y = Y[j, it]
                if y == 0 or (j in I and j != it):
                    continue
                if j == it:
                    out[col, col] += y
                    continue
                J = list(I)
                J[t] = j
                sign = 1
                k = t
                while k > 0 and J[k] < J[k - 1]:
                    J[k], J[k - 1] = J[k - 1], J[k]
                    sign = -sign
                    k -= 1
                while k < p - 1 and J[k] > J[k + 1]:
                    J[k], J[k + 1] = J[k + 1], J[k]
                    sign = -sign
                    k += 1
                out[index[tuple(J)], col] += sign * y
    return out


def _so_generator(n: int, i: int, j: int) -> np.ndarray:
    Y = np.zeros((n, n), dtype=np.int64)
    Y[i, j] = 1
    Y[j, i] = -1
    return Y


@dataclass(frozen=True)
class TauPAction:
    """Exact matrices of the degree-p form representation and its Casimirs.

    y_matrices are the images of the n-1 root generators (antisymmetric,
    mutually orthonormal for the normalized invariant form); omega_m is
    the SO(n-1) Casimir (diagonal in the subset basis), omega_k the full
    SO(n) Casimir (a scalar).
    """

    n: int
    p: int
    dim_v: int
    y_matrices: tuple[np.ndarray, ...]
    omega_k: np.ndarray
    omega_m: np.ndarray
    omega_k_scalar: int
    e_diag: np.ndarray          # diagonal of E = c(sigma_max) + omega_m
    c_sigma_max: int
    e_values: tuple[int, ...]   # distinct eigenvalues of E, ascending

    def sandwich(self, X: np.ndarray) -> np.ndarray:
        """sum_r Y_r X Y_r."""
        out = np.zeros_like(X)
        for y in self._y_float:
            out += y @ X @ y
        return out

    @property
    def _y_float(self) -> tuple[np.ndarray, ...]:
        return self._yf

    def __post_init__(self) -> None:
        object.__setattr__(self, "_yf", tuple(y.astype(float) for y in self.y_matrices))


def build_tau_p_action(n: int, p: int) -> TauPAction:
    """Construct the representation data for Lambda^p of SO(n) in integers."""
    if n < 2:
        raise DomainError(f"need n >= 2, got {n}")
    if not 0 <= p <= n:
        raise DomainError(f"degree p={p} out of range [0, {n}]")
    ys = tuple(_exterior_matrix(_so_generator(n, 0, r), n, p) for r in range(1, n))
    dim = math.comb(n, p)
    omega_m = np.zeros((dim, dim), dtype=np.int64)
    for i in range(1, n):
        for j in range(i + 1, n):
            m = _exterior_matrix(_so_generator(n, i, j), n, p)
            omega_m += m @ m
    mA = np.zeros((dim, dim), dtype=np.int64)
    for y in ys:
        mA += y @ y
    omega_k = omega_m + mA
    if not np.array_equal(omega_m, np.diag(np.diag(omega_m))):
        raise AssemblyMismatch("SO(n-1) Casimir is not diagonal in the subset basis")
    diag_k = np.diag(omega_k)
    if not (np.array_equal(omega_k, np.diag(diag_k)) and np.all(diag_k == diag_k[0])):
        raise AssemblyMismatch("SO(n) Casimir is not scalar on Lambda^p")
    c_sigma_max = int(-np.diag(omega_m).min())
    e_diag = c_sigma_max + np.diag(omega_m)
    return TauPAction(
        n=n,
        p=p,
        dim_v=dim,
        y_matrices=ys,
        omega_k=omega_k,
        omega_m=omega_m,
        omega_k_scalar=int(-diag_k[0]),
        e_diag=e_diag.astype(np.int64),
        c_sigma_max=c_sigma_max,
        e_values=tuple(sorted(set(int(v) for v in e_diag))),
    )


@dataclass(frozen=True)
class RadialOperator:
    """Conjugated radial operator with its closed-form perturbation series."""

    n: int
    p: int
    taup: TauPAction
    beta: Fraction              # (n-1)/2
    alpha_p: Fraction
    L_w: int
    q_parity: frozenset[str]    # which parities of q-powers carry nonzero maps

    @property
    def end_dim(self) -> int:
        return self.taup.dim_v ** 2

    def w_apply(self, k: int, X: np.ndarray) -> np.ndarray:
        """Apply the order-k perturbation map to X."""
        tp = self.taup
        beta = float(self.beta)
        if k % 2 == 0:
            A = tp.omega_k.astype(float) - tp.omega_m.astype(float)  # sum Y_r^2
            return 2.0 * k * ((beta * beta - beta) * X - A @ X - X @ A)
        return 4.0 * k * tp.sandwich(X)

    def direct_apply(
        self, s: complex, F: np.ndarray, dF: np.ndarray, ddF: np.ndarray, t: float
    ) -> np.ndarray:
        """Radial Hodge-Laplacian equation applied to (F, F', F'') at t.

        Returns  (Delta_p - alpha_p + s^2) F(a_t); zero on the kernel.
        """
        tp = self.taup
        coth = 1.0 / math.tanh(t)
        sh2 = math.sinh(t) ** 2
        A = (tp.omega_k - tp.omega_m).astype(float)
        return (
            -ddF
            - (self.n - 1) * coth * dF
            - coth * coth * (A @ F)
            - (F @ A) / sh2
            + 2.0 * math.cosh(t) / sh2 * tp.sandwich(F)
            + tp.omega_k.astype(float) @ F
            + (s * s - float(self.alpha_p)) * F
        )


def build_radial_operator(n: int, p: int, L_w: int = 40) -> RadialOperator:
    """Assemble the conjugated radial operator for degree p on dimension n.

    The zeroth-order coefficient is identified exactly in rationals with
    rho^2 - alpha_p + D; a mismatch with the closed-form constant table
    raises AssemblyMismatch.
    """
    if L_w < 1:
        raise DomainError("perturbation order L_w must be >= 1")
    tp = build_tau_p_action(n, p)
    beta = Fraction(n - 1, 2)
    space = make_space(Field.REAL, n)
    alpha_table = alpha_p(space, p)
    alpha_machine = space.rho ** 2 - tp.c_sigma_max
    if alpha_machine != alpha_table:
        raise AssemblyMismatch(
            f"rho^2 - c(sigma_max) = {alpha_machine} != table value {alpha_table}"
        )
    parities = set()
    if beta != 1 or p not in (0, n):
        parities.add("even")
    if 0 < p < n:
        parities.add("odd")  # the two-sided sandwich maps sit at odd orders
    return RadialOperator(
        n=n,
        p=p,
        taup=tp,
        beta=beta,
        alpha_p=alpha_table,
        L_w=L_w,
        q_parity=frozenset(parities),
    )


def operator_series_error(
    op: RadialOperator, s: complex, t: float, X: Optional[np.ndarray] = None
) -> float:
    """Relative mismatch between the q-series form of the conjugated
    operator and its direct evaluation at time t, on a probe matrix."""
    tp = op.taup
    dim = tp.dim_v
    if X is None:
        X = np.eye(dim) + 0.1 * np.arange(dim * dim, dtype=float).reshape(dim, dim)
    X = X.astype(complex)
    beta = float(op.beta)
    q = math.exp(-t)
    # q^0 part: rho^2 - alpha_p + s^2 + D(left); rho = beta for d = 1
    series = (beta * beta - float(op.alpha_p) + s * s) * X + tp.omega_m.astype(float) @ X
    for k in range(1, op.L_w + 1):
        series += q ** k * op.w_apply(k, X)
    # direct: the conjugated operator without the -d^2/dt^2 term
    coth = 1.0 / math.tanh(t)
    sh2 = math.sinh(t) ** 2
    A = (tp.omega_k - tp.omega_m).astype(float)
    direct = (
        ((beta * beta - beta) * coth * coth + beta + s * s - float(op.alpha_p)) * X
        - coth * coth * (A @ X)
        - (X @ A) / sh2
        + 2.0 * math.cosh(t) / sh2 * tp.sandwich(X)
        + tp.omega_k.astype(float) @ X
    )
    return float(
        np.linalg.norm(series - direct, 2) / max(np.linalg.norm(direct, 2), 1e-300)
    )


@dataclass(frozen=True)
class CoverPoint:
    """A point on the branched cover: base parameter plus branch values.

    One branch value per distinct positive eigenvalue e_i of the E
    element, satisfying y_i^2 = s^2 + e_i; h is the minimum of the real
    parts of s and the y_i and governs the kernel decay rate rho + h.
    """

    s: complex
    e_values_pos: tuple[int, ...]
    branch_values: tuple[complex, ...]
    h: float
    on_physical_sheet: bool

    def exponent_for(self, e: int) -> complex:
        if e == 0:
            return self.s
        return self.branch_values[self.e_values_pos.index(e)]


def cover_point(
    space: SpaceDescriptor,
    p: int,
    s: complex,
    branch_signs: Optional[Sequence[int]] = None,
) -> CoverPoint:
    """Place the spectral parameter on the cover with chosen branch signs.

    branch_signs has one +1/-1 entry per distinct positive eigenvalue of
    the E element (ascending order); omitted entries default to +1
    (principal roots, the physical sheet for Re s > 0).
    """
    if space.field is not Field.REAL:
        raise UnsupportedField("the form-valued resolvent is implemented for the real field only")
    tp = build_tau_p_action(space.n, p)
    s = complex(s)
    e_pos = tuple(e for e in tp.e_values if e > 0)
    signs = list(branch_signs) if branch_signs is not None else [1] * len(e_pos)
    if len(signs) != len(e_pos):
        raise DomainError(
            f"need {len(e_pos)} branch signs (one per positive E eigenvalue), got {len(signs)}"
        )
    ys = []
    for e, sg in zip(e_pos, signs):
        w = s * s + e
        if abs(w) < 1e-14 * (1.0 + abs(s) ** 2):
            raise BranchPoint(f"s={s} is a ramification point (s^2 + {e} = 0)")
        y = np.sqrt(complex(w))
        if sg not in (1, -1):
            raise DomainError(f"branch signs must be +1 or -1, got {sg}")
        ys.append(sg * complex(y))
    h = min([s.real] + [y.real for y in ys])
    physical = s.real > 0 and all(y.real > 0 for y in ys)
    return CoverPoint(
        s=s,
        e_values_pos=e_pos,
        branch_values=tuple(ys),
        h=h,
        on_physical_sheet=physical,
    )


@dataclass
class FrobeniusKernel:
    """Truncated series solution decaying at infinity.

    Per block j: exponent mu_j, projector-seeded coefficients a (and the
    t-linear coefficients b, nonzero only when an integer resonance was
    absorbed logarithmically).
    """

    operator: RadialOperator
    cover: CoverPoint
    exponents: tuple[complex, ...]
    block_projectors: tuple[np.ndarray, ...]
    coeffs_a: tuple[tuple[np.ndarray, ...], ...]
    coeffs_b: tuple[tuple[np.ndarray, ...], ...]
    truncation: int
    resonance_margin: float
    has_log_terms: bool
    growth_ratio: float = field(default=1.0)
    tail_rtol: float = field(default=1e-6)

    @property
    def t_min(self) -> float:
        """Advisory smallest t at which the truncated tail stays below
        tail_rtol; evaluation re-checks the bound pointwise."""
        return max(
            math.log(max(self.growth_ratio, 1.0))
            - math.log(self.tail_rtol) / max(self.truncation, 1),
            0.02,
        )


def frobenius_solve(
    op: RadialOperator,
    cover: CoverPoint,
    L: int = 40,
    resonance_floor: Optional[float] = None,
    snap_tol: float = 1e-10,
) -> FrobeniusKernel:
    """Solve the block recursion for the decaying solution.

    Exponent gaps that are integers to within snap_tol are absorbed with
    t-linear (logarithmic in q) terms; gaps inside the resonance floor
    but not exactly integer raise ResonanceDetected.  A ratio test on
    the last coefficients emits TruncationWarning when the tail fails to
    decay.
    """
    s = cover.s
    if resonance_floor is None:
        resonance_floor = 1e-8 * (1.0 + abs(s) ** 2)
    tp = op.taup
    dim = tp.dim_v
    e_diag = tp.e_diag.astype(float)
    mus = [cover.exponent_for(e) for e in tp.e_values]
    scale = (1.0 + max(abs(m) for m in mus)) ** 2
    snap_abs = snap_tol * scale

    blocks_a: list[tuple[np.ndarray, ...]] = []
    blocks_b: list[tuple[np.ndarray, ...]] = []
    projectors: list[np.ndarray] = []
    has_log = False
    margin = math.inf
    for j, (e_j, mu) in enumerate(zip(tp.e_values, mus)):
        P = np.diag((tp.e_diag == e_j).astype(float)).astype(complex)
        projectors.append(P)
        a = [P.copy()]
        b = [np.zeros((dim, dim), dtype=complex)]
        any_b = False
        for l in range(1, L + 1):
            lam = mu + l
            rhs_a = np.zeros((dim, dim), dtype=complex)
            rhs_b = np.zeros((dim, dim), dtype=complex)
            for k in range(1, l + 1):
                rhs_a += op.w_apply(k, a[l - k])
                if any_b:
                    rhs_b += op.w_apply(k, b[l - k])
            # row-level solvability of [lam^2 - s^2 - E] X = rhs
            dvec = (lam * lam - s * s) - e_diag
            res_rows = np.abs(dvec) <= snap_abs
            if res_rows.any() and abs(lam) < resonance_floor:
                raise ResonanceDetected(
                    f"double root at exponent {lam} (level {l} of block {j})"
                )
            near = (~res_rows) & (np.abs(dvec) < resonance_floor)
            if near.any():
                raise ResonanceDetected(
                    f"recursion divisor {dvec[near][0]:.3g} at level {l} of block {j} "
                    f"is inside the resonance floor {resonance_floor:.3g}"
                )
            if (~res_rows).any():
                margin = min(margin, float(np.abs(dvec[~res_rows]).min()))
            ok = ~res_rows
            al = np.zeros((dim, dim), dtype=complex)
            bl = np.zeros((dim, dim), dtype=complex)
            if any_b or res_rows.any():
                bl[ok, :] = rhs_b[ok, :] / dvec[ok, None]
            if res_rows.any():
                if np.abs(rhs_b[res_rows, :]).max() > 1e-8 * max(1.0, np.abs(rhs_a).max()):
                    raise ResonanceDetected(
                        "repeated resonance in one block needs t^2 terms; not supported"
                    )
                bl[res_rows, :] = -rhs_a[res_rows, :] / (2.0 * lam)
                has_log = True
                any_b = True
            al[ok, :] = (rhs_a[ok, :] + 2.0 * lam * bl[ok, :]) / dvec[ok, None]
            # resonant rows of a stay zero: the freedom is a multiple of the
            # other block's solution, fixed to the minimal choice
            a.append(al)
            b.append(bl)
        blocks_a.append(tuple(a))
        blocks_b.append(tuple(b))

    # effective geometric growth of the coefficients, smoothed over a dozen
    # levels (parity of the perturbation makes consecutive ratios oscillate)
    growth = 1.0
    for a in blocks_a:
        norms = [float(np.linalg.norm(x)) for x in a]
        span = min(12, len(norms) - 1)
        if span >= 2 and norms[-1 - span] > 0 and norms[-1] > 0:
            growth = max(growth, (norms[-1] / norms[-1 - span]) ** (1.0 / span))
    if growth > 2.0:
        warnings.warn(
            f"series coefficients grow with ratio {growth:.3f}; tail bound shrinks",
            TruncationWarning,
        )
    return FrobeniusKernel(
        operator=op,
        cover=cover,
        exponents=tuple(mus),
        block_projectors=tuple(projectors),
        coeffs_a=tuple(blocks_a),
        coeffs_b=tuple(blocks_b),
        truncation=L,
        resonance_margin=margin if margin < math.inf else float("inf"),
        has_log_terms=has_log,
        growth_ratio=growth,
    )


def _series_eval(kernel: FrobeniusKernel, t: float):
    """(v, v', v'') of the conjugated series at t."""
    dim = kernel.operator.taup.dim_v
    v = np.zeros((dim, dim), dtype=complex)
    dv = np.zeros_like(v)
    ddv = np.zeros_like(v)
    for mu, a, b in zip(kernel.exponents, kernel.coeffs_a, kernel.coeffs_b):
        for l in range(len(a)):
            lam = mu + l
            E = np.exp(-lam * t)
            term = a[l] + t * b[l]
            v += term * E
            dv += (b[l] - lam * term) * E
            ddv += (lam * lam * term - 2.0 * lam * b[l]) * E
    return v, dv, ddv


def kernel_eval(kernel: FrobeniusKernel, t: float) -> np.ndarray:
    """Reconstructed kernel F_p at radial time t."""
    return kernel_derivatives(kernel, t)[0]


def kernel_derivatives(
    kernel: FrobeniusKernel, t: float
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(F, F', F'') at t; exact derivatives of the truncated series."""
    if t <= 0:
        raise DomainError(f"radial time must be positive, got t={t}")
    ratio = kernel.growth_ratio * math.exp(-t)
    if ratio >= 0.95:
        raise TailBoundExceeded(
            f"t={t} below the series validity threshold {kernel.t_min:.3f} "
            f"(coefficient growth {kernel.growth_ratio:.3f})"
        )
    beta = float(kernel.operator.beta)
    v, dv, ddv = _series_eval(kernel, t)
    tail = 0.0
    for mu, a in zip(kernel.exponents, kernel.coeffs_a):
        tail += (
            np.linalg.norm(a[-1])
            * math.exp(-(mu.real + kernel.truncation) * t)
            / (1.0 - ratio)
        )
    vnorm = float(np.linalg.norm(v))
    if vnorm > 0 and tail > kernel.tail_rtol * vnorm:
        raise TailBoundExceeded(
            f"truncated tail estimate {tail:.3g} exceeds {kernel.tail_rtol:.1g} "
            f"of the kernel at t={t} (threshold t ~ {kernel.t_min:.3f})"
        )
    coth = 1.0 / math.tanh(t)
    sig = math.sinh(t) ** (-beta)
    F = sig * v
    dF = sig * (dv - beta * coth * v)
    ddF = sig * (
        ddv - 2.0 * beta * coth * dv + ((beta * beta + beta) * coth * coth - beta) * v
    )
    return F, dF, ddF


def form_ode_residual(kernel: FrobeniusKernel, t: float) -> float:
    """Relative residual of the radial equation on the reconstructed kernel.

    Normalized by the largest of the individual operator-term norms, so
    the value is meaningful both in the far field and near the origin.
    """
    F, dF, ddF = kernel_derivatives(kernel, t)
    op = kernel.operator
    R = op.direct_apply(kernel.cover.s, F, dF, ddF, t)
    scale = max(np.linalg.norm(ddF, 2), np.linalg.norm(F, 2), 1e-300)
    return float(np.linalg.norm(R, 2) / scale)


def decay_check(kernel: FrobeniusKernel, t_grid: Sequence[float]) -> float:
    """Fitted exponential decay rate of the operator norm over t_grid."""
    samples = []
    for t in t_grid:
        norm = np.linalg.norm(kernel_eval(kernel, t), 2)
        if norm <= 0:
            raise DegenerateFit(f"kernel norm vanished at t={t}")
        samples.append((float(t), float(norm)))
    return decay_rate_fit(samples)


def _spherical_sector_basis(tp: TauPAction) -> np.ndarray:
    """Orthonormal basis (columns, flattened) of ker T, the commutant of
    the full rotation action inside End(V)."""
    dim = tp.dim_v
    A = (tp.omega_k - tp.omega_m).astype(float)
    T = np.zeros((dim * dim, dim * dim))
    for col in range(dim * dim):
        X = np.zeros((dim, dim))
        X.flat[col] = 1.0
        T[:, col] = (A @ X + X @ A - 2.0 * tp.sandwich(X)).ravel()
    w, V = np.linalg.eigh((T + T.T) / 2.0)
    null = V[:, np.abs(w) < 1e-9 * max(1.0, abs(w).max())]
    if null.shape[1] == 0:
        raise AssemblyMismatch("angular operator has no kernel; expected the identity sector")
    return null


def psi_extract(
    op: RadialOperator,
    kernel: FrobeniusKernel,
    t0: float = 1e-3,
    T: float = 4.0,
    rtol: float = 1e-11,
) -> tuple[np.ndarray, float]:
    """Extract the t^(2-n) singularity coefficient of the kernel.

    Integrates the radial system from T down to t0 with initial data
    from the series, projects onto the spherically averaged sector
    (ker T; for p >= 1 stronger transverse singularities are present
    and must be projected out), fits the power law, and extrapolates
    vol(S^(n-1)) t^(n-2) F(t) to t -> 0.

    Returns (psi, fitted_singularity_exponent).
    """
    if not 0 < t0 < T:
        raise DomainError("need 0 < t0 < T")
    tp = op.taup
    dim = tp.dim_v
    n = op.n
    s = kernel.cover.s
    F0, dF0, _ = kernel_derivatives(kernel, T)
    A = (tp.omega_k - tp.omega_m).astype(float)
    Ok = tp.omega_k.astype(float)
    alpha = float(op.alpha_p)

    def rhs(t: float, y: np.ndarray) -> np.ndarray:
        F = y[: dim * dim].reshape(dim, dim)
        dF = y[dim * dim:].reshape(dim, dim)
        coth = 1.0 / math.tanh(t)
        sh2 = math.sinh(t) ** 2
        ddF = (
            -(n - 1) * coth * dF
            - coth * coth * (A @ F)
            - (F @ A) / sh2
            + 2.0 * math.cosh(t) / sh2 * tp.sandwich(F)
            + Ok @ F
            + (s * s - alpha) * F
        )
        return np.concatenate([dF.ravel(), ddF.ravel()])

    t_eval = np.geomspace(t0, min(10 * t0, 0.8 * T), 8)[::-1]
    sol = solve_ivp(
        rhs,
        (T, t0),
        np.concatenate([F0.ravel(), dF0.ravel()]).astype(complex),
        method="DOP853",
        rtol=rtol,
        atol=1e-14,
        t_eval=t_eval,
    )
    if not sol.success:
        raise StiffIntegration(f"downward integration failed: {sol.message}")

    null = _spherical_sector_basis(tp)
    vol = vol_sphere(n)
    norms = []
    scaled = []
    for i, t in enumerate(sol.t):
        F = sol.y[: dim * dim, i].reshape(dim, dim)
        PF = (null @ (null.T.conj() @ F.ravel())).reshape(dim, dim)
        norms.append(np.linalg.norm(PF, 2))
        scaled.append(PF * vol * t ** (n - 2))
    logt = np.log(sol.t)
    logn = np.log(norms)
    slope, intercept = np.polyfit(logt, logn, 1)
    fit_res = float(np.max(np.abs(logn - (slope * logt + intercept))))
    if fit_res > 0.05:
        raise FitFailure(f"power-law fit residual {fit_res:.3g} exceeds tolerance")
    # two smallest t values, Richardson in t^2
    tA, tB = sol.t[-1], sol.t[-2]
    psi = (scaled[-1] * tB ** 2 - scaled[-2] * tA ** 2) / (tB ** 2 - tA ** 2)
    return psi, float(-slope)
