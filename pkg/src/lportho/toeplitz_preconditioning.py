"""Entrywise-lp-optimal circulant preconditioning of Toeplitz systems.

A banded symmetric Toeplitz matrix generated by a trigonometric polynomial
is approximated by the circulant that minimizes the entrywise p-norm of the
difference. The minimizer has a per-diagonal closed form (a weighted power
mean of the two Toeplitz offsets each circulant diagonal touches), so
constructing it costs O(n). Matrix-vector products use circulant embedding,
preconditioner applications use eigenvalue division, and the solver is a
standard preconditioned conjugate gradient with explicit failure reporting
for singular or indefinite preconditioners.

The quartic model family f(theta) = alpha + beta(2-2cos) + gamma(2-2cos)^2
gets dedicated support: pentadiagonal coefficients, a closed-form spectrum
for its minimizers, and benchmark drivers that sweep (n, p) grids into
iteration-count tables.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

import numpy as np
import scipy.fft

__all__ = [
    "PreconditionerSingular",
    "NotPositiveDefinite",
    "NoAdmissibleExponent",
    "UncorrectableSpectrum",
    "ToeplitzSymbol",
    "ToeplitzOperator",
    "CirculantMatrix",
    "SolveReport",
    "SpectrumDiagnostic",
    "BenchmarkConfig",
    "BenchmarkCell",
    "BenchmarkResult",
    "build_toeplitz",
    "lp_matrix_norm",
    "lp_circulant_minimizer",
    "circulant_spectrum",
    "model_spectrum_closed_form",
    "strang_type_correction",
    "toeplitz_matvec",
    "circulant_solve",
    "pcg_solve",
    "select_p_tilde",
    "preconditioned_spectrum_diagnostic",
    "run_benchmark",
    "render_table_csv",
    "render_table_markdown",
]

# Relative residual tolerance for the conjugate gradient solver. Chosen
# tight enough that iteration counts are dominated by preconditioner
# quality rather than by the stopping rule.
DEFAULT_PCG_TOL = 1e-9

# min|eigenvalue| at or below this fraction of max|eigenvalue| counts as
# singular to machine precision.
SINGULARITY_RTOL = 1e-13

DENSE_DIAGNOSTIC_LIMIT = 256


class PreconditionerSingular(ArithmeticError):
    """The circulant has an eigenvalue that is zero to machine precision."""


class NotPositiveDefinite(ValueError):
    """An operation requiring an SPD circulant received an indefinite one."""


class NoAdmissibleExponent(RuntimeError):
    """No exponent on the search grid yields an admissible preconditioner."""


class UncorrectableSpectrum(ValueError):
    """Spectral correction impossible: no eigenvalue exceeds the threshold."""


@dataclass(frozen=True)
class ToeplitzSymbol:
    """Generating function of a family of Toeplitz matrices.

    Stored as its Fourier coefficients {offset k: value}. The quartic model
    family alpha + beta(2-2cos theta) + gamma(2-2cos theta)^2 is banded with
    t_0 = alpha + 2 beta + 6 gamma, t_(+-1) = -beta - 4 gamma, t_(+-2) = gamma.
    """

    coefficients: Mapping[int, float]
    model_params: Optional[tuple[float, float, float]] = None

    def __post_init__(self) -> None:
        coeffs = {int(k): complex(v) for k, v in self.coefficients.items()}
        clean: dict[int, float | complex] = {}
        for k, v in coeffs.items():
            if not (math.isfinite(v.real) and math.isfinite(v.imag)):
                raise ValueError(f"coefficient at offset {k} is not finite")
            clean[k] = v.real if v.imag == 0.0 else v
        object.__setattr__(self, "coefficients", clean)

    @classmethod
    def from_model(cls, alpha: float, beta: float, gamma: float) -> "ToeplitzSymbol":
        phi = alpha + 2.0 * beta + 6.0 * gamma
        psi = -beta - 4.0 * gamma
        coeffs = {0: phi, 1: psi, -1: psi, 2: gamma, -2: gamma}
        return cls(coeffs, (float(alpha), float(beta), float(gamma)))

    @property
    def is_hermitian(self) -> bool:
        c = self.coefficients
        return all(k == 0 or (-k in c and c[-k] == np.conj(c[k])) for k in c)

    def evaluate(self, theta: np.ndarray) -> np.ndarray:
        """Pointwise values f(theta) = sum_k t_k exp(i k theta)."""
        theta = np.asarray(theta, dtype=float)
        out = np.zeros(theta.shape, dtype=complex)
        for k, v in self.coefficients.items():
            out += v * np.exp(1j * k * theta)
        if self.is_hermitian:
            return out.real
        return out


@dataclass(frozen=True)
class ToeplitzOperator:
    """Symmetric-storage Toeplitz matrix given by its diagonal coefficients.

    Matrix entries are A[i, j] = diagonals[i - j]; missing offsets are zero.
    Matvecs run through a cached circulant embedding of FFT-friendly length.
    """

    n: int
    diagonals: Mapping[int, float]
    symbol: Optional[ToeplitzSymbol] = None
    _embedding: Optional[tuple] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError(f"dimension must be >= 1, got {self.n}")
        diags = {int(k): v for k, v in self.diagonals.items() if abs(int(k)) < self.n}
        object.__setattr__(self, "diagonals", diags)

    @property
    def is_real(self) -> bool:
        return all(np.imag(v) == 0 for v in self.diagonals.values())

    @property
    def is_symmetric(self) -> bool:
        d = self.diagonals
        return self.is_real and all(d.get(k, 0) == d.get(-k, 0) for k in d)

    def _embed(self) -> tuple:
        """FFT of the length-m circulant embedding of the diagonals, cached."""
        if self._embedding is None:
            m = scipy.fft.next_fast_len(2 * self.n - 1)
            v = np.zeros(m, dtype=float if self.is_real else complex)
            for k, val in self.diagonals.items():
                if k >= 0:
                    v[k] = val
                else:
                    v[m + k] = val
            object.__setattr__(self, "_embedding", (np.fft.fft(v), m, self.is_real))
        return self._embedding

    def to_dense(self) -> np.ndarray:
        idx = np.subtract.outer(np.arange(self.n), np.arange(self.n))
        out = np.zeros((self.n, self.n), dtype=float if self.is_real else complex)
        for k, v in self.diagonals.items():
            out[idx == k] = v
        return out


def build_toeplitz(symbol: ToeplitzSymbol, n: int) -> ToeplitzOperator:
    """Materialize the n-by-n Toeplitz matrix of a symbol's coefficients."""
    if n < 1:
        raise ValueError(f"dimension must be >= 1, got {n}")
    return ToeplitzOperator(n, dict(symbol.coefficients), symbol)


@dataclass(frozen=True)
class CirculantMatrix:
    """Circulant matrix stored by first column, eigenvalues cached.

    Eigenvalues follow the convention lambda = sqrt(n) F* c (the unnormalized
    inverse DFT of the first column); a symmetric first column gives a real
    spectrum. p records the exponent used to build the matrix when it came
    from a minimization, None otherwise.
    """

    n: int
    first_column: np.ndarray
    p: Optional[float] = None
    symbol: Optional[ToeplitzSymbol] = None
    _eig: Optional[np.ndarray] = field(default=None, repr=False, compare=False)
    _eig_solve: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    def __post_init__(self) -> None:
        col = np.asarray(self.first_column)
        if col.ndim != 1 or col.size != self.n or self.n < 1:
            raise ValueError("first_column must be 1-d of length n >= 1")
        col = col.astype(complex) if np.iscomplexobj(col) else col.astype(float)
        col.setflags(write=False)
        object.__setattr__(self, "first_column", col)

    @property
    def has_symmetric_column(self) -> bool:
        c = self.first_column
        return bool(np.array_equal(c, np.roll(c[::-1], 1)))

    @property
    def eigenvalues(self) -> np.ndarray:
        if self._eig is None:
            lam = self.n * np.fft.ifft(self.first_column)
            if not np.iscomplexobj(self.first_column) and self.has_symmetric_column:
                lam = lam.real
            object.__setattr__(self, "_eig", lam)
        return self._eig

    @property
    def _solve_spectrum(self) -> np.ndarray:
        # Forward-DFT eigenvalue labeling, matching ifft(fft(c) * fft(x))
        # as the matvec factorization. Same multiset as `eigenvalues`.
        if self._eig_solve is None:
            object.__setattr__(self, "_eig_solve", np.fft.fft(self.first_column))
        return self._eig_solve

    @property
    def num_negative_eigenvalues(self) -> int:
        return int(np.sum(np.real(self.eigenvalues) < 0.0))

    def is_spd(self, rtol: float = 1e-12) -> bool:
        lam = self.eigenvalues
        scale = float(np.max(np.abs(lam))) or 1.0
        if float(np.max(np.abs(np.imag(lam)))) > rtol * scale:
            return False
        return bool(np.min(np.real(lam)) > 0.0)

    def to_dense(self) -> np.ndarray:
        idx = np.subtract.outer(np.arange(self.n), np.arange(self.n)) % self.n
        return np.asarray(self.first_column)[idx]


def lp_matrix_norm(X: np.ndarray, p: float) -> float:
    """Entrywise p-norm (sum of |entries|^p)^(1/p); p = 2 is Frobenius."""
    if p < 1:
        raise ValueError(f"entrywise norms need p >= 1, got {p}")
    X = np.asarray(X)
    return float(np.sum(np.abs(X) ** p) ** (1.0 / p))


def lp_circulant_minimizer(T: ToeplitzOperator, p: float) -> CirculantMatrix:
    """The circulant closest to T in the entrywise p-norm.

    Circulant diagonal class k overlays Toeplitz offsets k (n-k entries) and
    k-n (k entries), so the objective separates into scalar problems
    (n-k)|t_k - c|^p + k|t_(k-n) - c|^p. For p > 1 the optimum is the
    weighted power mean with weights count^(1/(p-1)); computed in ratio form
    so the exponent never overflows as p approaches 1. For p = 1 the entry
    with the larger count wins outright, ties keeping t_k.
    """
    if p < 1:
        raise ValueError(f"minimizer defined for p >= 1, got {p}")
    n = T.n
    k = np.arange(n)
    d = T.diagonals
    complex_vals = any(np.iscomplexobj(np.asarray(v)) for v in d.values())
    dtype = complex if complex_vals else float
    t_pos = np.array([d.get(int(j), 0) for j in k], dtype=dtype)
    t_neg = np.array([d.get(int(j) - n, 0) for j in k], dtype=dtype)

    count_pos = (n - k).astype(float)
    count_neg = k.astype(float)
    if p == 1.0:
        col = np.where(count_neg > count_pos, t_neg, t_pos)
    else:
        major_is_pos = count_pos >= count_neg
        val_major = np.where(major_is_pos, t_pos, t_neg)
        val_minor = np.where(major_is_pos, t_neg, t_pos)
        big = np.maximum(count_pos, count_neg)
        small = np.minimum(count_pos, count_neg)
        with np.errstate(divide="ignore"):
            w = np.where(small > 0, (small / big) ** (1.0 / (p - 1.0)), 0.0)
        col = (val_major + val_minor * w) / (1.0 + w)
    return CirculantMatrix(n, col, float(p), T.symbol)


def circulant_spectrum(C: CirculantMatrix) -> np.ndarray:
    """Eigenvalues of a circulant via the DFT of its first column."""
    return np.array(C.eigenvalues, copy=True)


def model_spectrum_closed_form(C: CirculantMatrix) -> np.ndarray:
    """Closed-form eigenvalues of a model-family minimizer.

    lambda_j = f(theta_j) + 2(c_1 - psi)cos(theta_j) + 2(c_2 - gamma)cos(2 theta_j)
    on theta_j = 2 pi j / n: the symbol's values plus the perturbation from
    the two wrapped diagonals. Requires the circulant to carry a model symbol.
    """
    if C.symbol is None or C.symbol.model_params is None:
        raise ValueError("closed-form spectrum needs a model-family symbol")
    if C.n < 5:
        raise ValueError("closed form assumes the five model diagonals are distinct classes")
    alpha, beta, gamma = C.symbol.model_params
    psi = -beta - 4.0 * gamma
    theta = 2.0 * np.pi * np.arange(C.n) / C.n
    c1 = float(np.real(C.first_column[1]))
    c2 = float(np.real(C.first_column[2]))
    f_vals = alpha + beta * (2.0 - 2.0 * np.cos(theta)) + gamma * (2.0 - 2.0 * np.cos(theta)) ** 2
    return f_vals + 2.0 * (c1 - psi) * np.cos(theta) + 2.0 * (c2 - gamma) * np.cos(2.0 * theta)


def strang_type_correction(C: CirculantMatrix, threshold: float = 0.0) -> CirculantMatrix:
    """Rebuild a circulant with its nonpositive eigenvalues replaced.

    Eigenvalues at or below the threshold become their absolute value when
    that clears the threshold, otherwise the smallest eigenvalue above it.
    The result is positive definite; if nothing clears the threshold the
    spectrum is uncorrectable.
    """
    lam = C.eigenvalues
    scale = float(np.max(np.abs(lam))) or 1.0
    if float(np.max(np.abs(np.imag(lam)))) > 1e-10 * scale:
        raise ValueError("spectral correction needs a real spectrum")
    lam = np.real(lam).copy()
    good = lam > threshold
    if not np.any(good):
        raise UncorrectableSpectrum("every eigenvalue is at or below the threshold")
    if np.all(good):
        return C
    floor = float(np.min(lam[good]))
    bad = ~good
    replacement = np.where(np.abs(lam[bad]) > threshold, np.abs(lam[bad]), floor)
    lam[bad] = replacement
    # invert lambda = n * ifft(c)
    col = np.fft.fft(lam) / C.n
    if not np.iscomplexobj(C.first_column):
        col = col.real
    return CirculantMatrix(C.n, col, C.p, C.symbol)


def toeplitz_matvec(T: ToeplitzOperator, x: np.ndarray) -> np.ndarray:
    """Product T @ x through the circulant embedding, O(n log n)."""
    x = np.asarray(x)
    if x.shape != (T.n,):
        raise ValueError(f"operand must have shape ({T.n},), got {x.shape}")
    vhat, m, operator_real = T._embed()
    y = np.fft.ifft(np.fft.fft(x, m) * vhat)[: T.n]
    if operator_real and not np.iscomplexobj(x):
        return y.real
    return y


def circulant_solve(C: CirculantMatrix, r: np.ndarray) -> np.ndarray:
    """Solve C z = r by eigenvalue division in the Fourier domain.

    Raises PreconditionerSingular when the smallest eigenvalue modulus does
    not exceed SINGULARITY_RTOL times the largest (singular to machine
    precision).
    """
    r = np.asarray(r)
    if r.shape != (C.n,):
        raise ValueError(f"operand must have shape ({C.n},), got {r.shape}")
    lam = C._solve_spectrum
    absl = np.abs(lam)
    lmax = float(np.max(absl))
    if lmax == 0.0 or float(np.min(absl)) <= SINGULARITY_RTOL * lmax:
        raise PreconditionerSingular(
            f"circulant is singular to machine precision (min |lambda| = {float(np.min(absl)):.3e}, max = {lmax:.3e})"
        )
    z = np.fft.ifft(np.fft.fft(r) / lam)
    if not np.iscomplexobj(r) and not np.iscomplexobj(C.first_column):
        return z.real
    return z


STATUS_CONVERGED = "converged"
STATUS_MAX_ITERATIONS = "max_iterations"
STATUS_SINGULAR = "preconditioner_singular"
STATUS_INDEFINITE = "preconditioner_indefinite"


@dataclass(frozen=True)
class SolveReport:
    """Outcome of one conjugate gradient run.

    relative_residuals starts at the initial residual and gains one entry
    per iteration; it is empty only when the preconditioner was rejected as
    singular before any work happened. p_used records the exponent behind
    the preconditioner, None for unpreconditioned runs.
    """

    iterations: int
    relative_residuals: tuple[float, ...]
    status: str
    p_used: Optional[float]
    solution: Optional[np.ndarray] = None


def pcg_solve(
    T: ToeplitzOperator,
    b: np.ndarray,
    M: Optional[CirculantMatrix] = None,
    tol: float = DEFAULT_PCG_TOL,
    maxit: Optional[int] = None,
) -> SolveReport:
    """Conjugate gradient on T x = b, optionally preconditioned by M.

    Stops when the relative residual ||b - T x||_2 / ||b||_2 drops to tol
    (residuals tracked recursively) or after maxit iterations, default 10n.
    A singular M is reported as preconditioner_singular without iterating;
    a nonpositive preconditioned inner product r.z reports
    preconditioner_indefinite at the iteration where it appears.
    """
    if not T.is_symmetric:
        raise ValueError("conjugate gradient requires a real symmetric operator")
    b = np.asarray(b, dtype=float)
    if b.shape != (T.n,):
        raise ValueError(f"right-hand side must have shape ({T.n},), got {b.shape}")
    if not np.all(np.isfinite(b)):
        raise ValueError("right-hand side must be finite")
    if not (tol > 0):
        raise ValueError("tol must be positive")
    if maxit is None:
        maxit = 10 * T.n
    p_used = M.p if M is not None else None

    bnorm = float(np.linalg.norm(b))
    if bnorm == 0.0:
        return SolveReport(0, (0.0,), STATUS_CONVERGED, p_used, np.zeros(T.n))

    lam = None
    if M is not None:
        absl = np.abs(M._solve_spectrum)
        lmax = float(np.max(absl))
        if lmax == 0.0 or float(np.min(absl)) <= SINGULARITY_RTOL * lmax:
            return SolveReport(0, (), STATUS_SINGULAR, p_used, None)
        lam = M._solve_spectrum

    def precondition(r: np.ndarray) -> np.ndarray:
        if lam is None:
            return r
        return np.fft.ifft(np.fft.fft(r) / lam).real

    x = np.zeros(T.n)
    r = b.copy()
    residuals = [1.0]
    if residuals[-1] <= tol:
        return SolveReport(0, tuple(residuals), STATUS_CONVERGED, p_used, x)

    z = precondition(r)
    rho = float(r @ z)
    if rho <= 0.0:
        return SolveReport(0, tuple(residuals), STATUS_INDEFINITE, p_used, None)
    d = z
    for it in range(1, maxit + 1):
        q = toeplitz_matvec(T, d)
        dq = float(d @ q)
        if not dq > 0.0:
            raise ArithmeticError("conjugate gradient breakdown: operator is not positive definite")
        alpha = rho / dq
        x = x + alpha * d
        r = r - alpha * q
        residuals.append(float(np.linalg.norm(r)) / bnorm)
        if residuals[-1] <= tol:
            return SolveReport(it, tuple(residuals), STATUS_CONVERGED, p_used, x)
        z = precondition(r)
        rho_next = float(r @ z)
        if rho_next <= 0.0:
            return SolveReport(it, tuple(residuals), STATUS_INDEFINITE, p_used, None)
        d = z + (rho_next / rho) * d
        rho = rho_next
    return SolveReport(maxit, tuple(residuals), STATUS_MAX_ITERATIONS, p_used, x)


def select_p_tilde(
    T: ToeplitzOperator,
    p_grid: Sequence[float],
    eps: float = 1e-6,
    exact: bool = False,
) -> float:
    """Smallest exponent on the grid giving an admissible preconditioner.

    Default mode accepts p when the minimizer's circulant spectrum is
    strictly positive (which forces a real positive preconditioned
    spectrum). Exact mode, restricted to n <= 256, instead inspects the
    preconditioned spectrum itself: eigenvalues of C^(-1/2) T C^(-1/2) when
    C is SPD, otherwise a dense eigensolve of C^(-1) T, accepting p when
    every eigenvalue has |imag| < eps and positive real part.
    """
    grid = [float(p) for p in p_grid]
    if not grid:
        raise ValueError("exponent grid must be nonempty")
    if any(b <= a for a, b in zip(grid, grid[1:])):
        raise ValueError("exponent grid must be strictly ascending")
    if not (eps > 0):
        raise ValueError("eps must be positive")
    if exact and T.n > DENSE_DIAGNOSTIC_LIMIT:
        raise ValueError(f"exact mode is dense; restricted to n <= {DENSE_DIAGNOSTIC_LIMIT}")

    for p in grid:
        C = lp_circulant_minimizer(T, p)
        lam = C.eigenvalues
        scale = float(np.max(np.abs(lam))) or 1.0
        near_real = float(np.max(np.abs(np.imag(lam)))) <= 1e-12 * scale
        if not exact:
            if near_real and float(np.min(np.real(lam))) > 0.0:
                return p
            continue
        # exact mode: look at the preconditioned spectrum itself
        absl = np.abs(C._solve_spectrum)
        if float(np.min(absl)) <= SINGULARITY_RTOL * float(np.max(absl)):
            continue
        if near_real and float(np.min(np.real(lam))) > 0.0:
            evals = preconditioned_spectrum_diagnostic(T, C).eigenvalues.astype(complex)
        else:
            evals = np.linalg.eigvals(np.linalg.solve(C.to_dense(), T.to_dense()))
        if float(np.max(np.abs(evals.imag))) < eps and float(np.min(evals.real)) > 0.0:
            return p
    raise NoAdmissibleExponent(f"no exponent in {grid} yields an admissible preconditioner")


@dataclass(frozen=True)
class SpectrumDiagnostic:
    """Preconditioned spectrum plus how much of it clusters at 1."""

    eigenvalues: np.ndarray
    cluster_fractions: dict[float, float]


def preconditioned_spectrum_diagnostic(T: ToeplitzOperator, C: CirculantMatrix) -> SpectrumDiagnostic:
    """Dense spectrum of C^(-1/2) T C^(-1/2) with clustering statistics.

    Only available at diagnostic scale (n <= 256) and for SPD C. Reports
    the fraction of eigenvalues within [1-rho, 1+rho] for rho in
    {0.1, 0.01}.
    """
    if T.n != C.n:
        raise ValueError("operator and circulant dimensions differ")
    if T.n > DENSE_DIAGNOSTIC_LIMIT:
        raise ValueError(f"dense diagnostic restricted to n <= {DENSE_DIAGNOSTIC_LIMIT}")
    if not C.is_spd():
        raise NotPositiveDefinite("diagnostic needs a symmetric positive definite circulant")
    dense_c = C.to_dense()
    if np.iscomplexobj(dense_c):
        dense_c = dense_c.real
    s, u = np.linalg.eigh(dense_c)
    inv_sqrt = (u / np.sqrt(s)) @ u.T
    middle = inv_sqrt @ T.to_dense() @ inv_sqrt
    evals = np.linalg.eigvalsh(0.5 * (middle + middle.T))
    fractions = {rho: float(np.mean(np.abs(evals - 1.0) <= rho)) for rho in (0.1, 0.01)}
    return SpectrumDiagnostic(evals, fractions)


# ---------------------------------------------------------------------------
# Benchmark driver: iteration-count tables over an (n, p) grid.


@dataclass(frozen=True)
class BenchmarkConfig:
    """One table's worth of solver runs for a single model symbol."""

    alpha: float
    beta: float
    gamma: float
    n_list: tuple[int, ...]
    p_list: tuple[float, ...]
    tol: float = DEFAULT_PCG_TOL
    maxit: Optional[int] = None  # per-cell default: 10n
    correction: str = "off"
    rhs: str = "ones"
    seed: Optional[int] = None

    _FIELDS = {"alpha", "beta", "gamma", "n_list", "p_list", "tol", "maxit", "correction", "rhs", "seed"}

    def __post_init__(self) -> None:
        if self.correction not in ("on", "off"):
            raise ValueError(f"correction must be 'on' or 'off', got {self.correction!r}")
        if self.rhs not in ("ones", "random"):
            raise ValueError(f"rhs must be 'ones' or 'random', got {self.rhs!r}")
        if not self.n_list or any(int(n) < 1 for n in self.n_list):
            raise ValueError("n_list must contain positive dimensions")
        if not self.p_list or any(float(p) < 1 for p in self.p_list):
            raise ValueError("p_list entries must be >= 1")
        if not (self.tol > 0):
            raise ValueError("tol must be positive")
        object.__setattr__(self, "n_list", tuple(int(n) for n in self.n_list))
        object.__setattr__(self, "p_list", tuple(float(p) for p in self.p_list))

    @classmethod
    def from_dict(cls, doc: dict) -> "BenchmarkConfig":
        unknown = set(doc) - cls._FIELDS
        if unknown:
            raise ValueError(f"unknown benchmark config keys: {sorted(unknown)}")
        missing = {"alpha", "beta", "gamma", "n_list", "p_list"} - set(doc)
        if missing:
            raise ValueError(f"benchmark config missing keys: {sorted(missing)}")
        kwargs = dict(doc)
        kwargs["n_list"] = tuple(kwargs["n_list"])
        kwargs["p_list"] = tuple(kwargs["p_list"])
        return cls(**kwargs)

    def to_dict(self) -> dict:
        return {
            "alpha": float(self.alpha),
            "beta": float(self.beta),
            "gamma": float(self.gamma),
            "n_list": list(self.n_list),
            "p_list": list(self.p_list),
            "tol": float(self.tol),
            "maxit": self.maxit,
            "correction": self.correction,
            "rhs": self.rhs,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class BenchmarkCell:
    """One (n, p) solver run; p is None for the unpreconditioned column."""

    n: int
    p: Optional[float]
    report: SolveReport
    circulant_eigenvalues: Optional[np.ndarray] = None


@dataclass(frozen=True)
class BenchmarkResult:
    config: BenchmarkConfig
    cells: tuple[BenchmarkCell, ...]

    def cell(self, n: int, p: Optional[float]) -> BenchmarkCell:
        for c in self.cells:
            if c.n == n and c.p == p:
                return c
        raise KeyError(f"no cell for n={n}, p={p}")


def _bench_cell(
    symbol: ToeplitzSymbol,
    n: int,
    p: Optional[float],
    b: np.ndarray,
    config: BenchmarkConfig,
) -> BenchmarkCell:
    T = build_toeplitz(symbol, n)
    maxit = config.maxit if config.maxit is not None else 10 * n
    if p is None:
        report = pcg_solve(T, b, None, config.tol, maxit)
        return BenchmarkCell(n, None, report, None)
    C = lp_circulant_minimizer(T, p)
    if config.correction == "on" and not C.is_spd():
        try:
            C = strang_type_correction(C, 0.0)
        except UncorrectableSpectrum:
            pass  # run with the raw circulant; failure shows in the report
    report = pcg_solve(T, b, C, config.tol, maxit)
    return BenchmarkCell(n, p, report, circulant_spectrum(C))


def run_benchmark(config: BenchmarkConfig, workers: int = 1) -> BenchmarkResult:
    """Sweep the (n, p) grid plus the unpreconditioned column.

    Right-hand sides are all-ones, or standard normal draws (one per n,
    shared across that row) when rhs='random'. Cells are independent, so a
    thread pool of the given size may run them concurrently; results come
    back in deterministic row-major order either way.
    """
    symbol = ToeplitzSymbol.from_model(config.alpha, config.beta, config.gamma)
    rhs_by_n: dict[int, np.ndarray] = {}
    rng = np.random.default_rng(config.seed)
    for n in config.n_list:
        rhs_by_n[n] = np.ones(n) if config.rhs == "ones" else rng.standard_normal(n)
    grid: list[tuple[int, Optional[float]]] = [
        (n, p) for n in config.n_list for p in list(config.p_list) + [None]
    ]
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            cells = list(pool.map(lambda np_pair: _bench_cell(symbol, np_pair[0], np_pair[1], rhs_by_n[np_pair[0]], config), grid))
    else:
        cells = [_bench_cell(symbol, n, p, rhs_by_n[n], config) for n, p in grid]
    return BenchmarkResult(config, tuple(cells))


def _format_p_label(p: float) -> str:
    return format(p, "g")


def _cell_text(cell: BenchmarkCell) -> str:
    if cell.report.status == STATUS_CONVERGED:
        return str(cell.report.iterations)
    return "#"


def render_table_csv(result: BenchmarkResult) -> str:
    cols = [f"p={_format_p_label(p)}" for p in result.config.p_list] + ["n. p."]
    lines = ["n," + ",".join(cols)]
    for n in result.config.n_list:
        row = [str(n)]
        for p in list(result.config.p_list) + [None]:
            row.append(_cell_text(result.cell(n, p)))
        lines.append(",".join(row))
    return "\n".join(lines) + "\n"


def render_table_markdown(result: BenchmarkResult) -> str:
    headers = ["n"] + [f"p={_format_p_label(p)}" for p in result.config.p_list] + ["n. p."]
    lines = ["| " + " | ".join(headers) + " |", "|" + "|".join(["---"] * len(headers)) + "|"]
    for n in result.config.n_list:
        row = [str(n)]
        for p in list(result.config.p_list) + [None]:
            row.append(_cell_text(result.cell(n, p)))
        lines.append("| " + " | ".join(row) + " |")
    return "\n".join(lines) + "\n"
