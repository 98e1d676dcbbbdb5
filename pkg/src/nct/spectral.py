"""Singular-value sequences, Schatten functionals and Dixmier-type approximants."""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np


@dataclass(eq=False)
class SingularSpectrum:
    """Nonincreasing, nonnegative sequence ``mu(0) >= mu(1) >= ...``."""

    values: np.ndarray
    source: str = ""

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float).ravel()
        if v.size and (not np.all(np.isfinite(v)) or v.min() < 0):
            raise ValueError("singular values must be finite and nonnegative")
        v = -np.sort(-v)
        v.flags.writeable = False
        self.values = v

    def __len__(self):
        return self.values.size

    def __getitem__(self, k):
        return self.values[k]

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)

    def power(self, p: float) -> "SingularSpectrum":
        """Spectrum of ``|T|^p``."""
        return SingularSpectrum(self.values ** p, f"|{self.source}|^{p:g}")

    def merge(self, other: "SingularSpectrum") -> "SingularSpectrum":
        """Spectrum of the direct sum."""
        return SingularSpectrum(np.concatenate([self.values, other.values]),
                                f"{self.source}(+){other.source}")

    def to_csv(self, path_or_file, header: bool = True):
        """Write columns ``k, mu_k`` with 17 significant digits."""
        own = isinstance(path_or_file, (str, bytes)) or hasattr(path_or_file, "__fspath__")
        fh = open(path_or_file, "w", newline="", encoding="utf-8") if own else path_or_file
        try:
            w = csv.writer(fh, lineterminator="\n")
            if header:
                w.writerow(["k", "mu_k"])
            for k, mu in enumerate(self.values):
                w.writerow([k, f"{mu:.17g}"])
        finally:
            if own:
                fh.close()

    @classmethod
    def from_csv(cls, path) -> "SingularSpectrum":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        return cls(np.array([float(r["mu_k"]) for r in rows]), source=str(path))


def _svdvals(a: np.ndarray) -> np.ndarray:
    if a.size == 0:
        return np.zeros(0)
    return np.linalg.svd(a, compute_uv=False)


def _is_hermitian(a: np.ndarray, rtol: float = 1e-13) -> bool:
    if a.shape[0] != a.shape[1]:
        return False
    scale = np.max(np.abs(a), initial=0.0)
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= rtol * max(scale, 1e-300))


def _chiral_blocks(M) -> tuple[np.ndarray, np.ndarray] | None:
    """Off-diagonal spin blocks if ``M`` is block anti-diagonal in the spin grading."""
    N = getattr(M, "spin_dim", 1)
    T = getattr(M, "truncation", None)
    if N < 2 or N % 2 or T is None:
        return None
    a = M.entries
    h = (N // 2) * T.size
    if np.any(a[:h, :h]) or np.any(a[h:, h:]):
        return None
    return a[:h, h:], a[h:, :h]


def singular_values(M, method: str = "auto") -> SingularSpectrum:
    """Singular values of a finite section, largest first.

    ``method="svd"`` runs a dense SVD of the full matrix.  ``"auto"`` uses
    structure first: a spin-graded block anti-diagonal matrix contributes the
    singular values of its two off-diagonal blocks (only one when the matrix
    is Hermitian), a Hermitian matrix the moduli of its eigenvalues.
    ``"eigh"`` forces the Hermitian eigenvalue path.
    """
    a = np.asarray(getattr(M, "entries", M))
    if a.ndim != 2:
        raise ValueError("expected a matrix")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix has non-finite entries")
    label = getattr(M, "label", "") or "M"
    if method == "svd":
        return SingularSpectrum(_svdvals(a), label)
    if method == "eigh":
        return SingularSpectrum(np.abs(np.linalg.eigvalsh(a)), label)
    if method != "auto":
        raise ValueError(f"unknown method {method!r}")
    blocks = _chiral_blocks(M)
    if blocks is not None:
        upper, lower = blocks
        s = _svdvals(upper)
        if np.allclose(lower, upper.conj().T, rtol=0, atol=1e-13 * max(np.abs(upper).max(initial=0), 1e-300)):
            vals = np.concatenate([s, s])
        else:
            vals = np.concatenate([s, _svdvals(lower)])
        return SingularSpectrum(vals, label)
    if _is_hermitian(a):
        return SingularSpectrum(np.abs(np.linalg.eigvalsh(a)), label)
    return SingularSpectrum(_svdvals(a), label)


def _vals(s) -> np.ndarray:
    return np.asarray(getattr(s, "values", s), dtype=float)


def schatten_norm(s, p: float) -> float:
    if p <= 0:
        raise ValueError("p must be > 0")
    v = _vals(s)
    return float(np.sum(v ** p) ** (1.0 / p))


def hilbert_schmidt_norm(M) -> float:
    """Frobenius norm of a finite section; equals ``schatten_norm(singular_values(M), 2)``."""
    return float(np.linalg.norm(np.asarray(getattr(M, "entries", M))))


def weak_quasi_norm(s, p: float) -> float:
    """``sup_k (k+1)^(1/p) mu(k)`` over the available window."""
    if p <= 0:
        raise ValueError("p must be > 0")
    v = _vals(s)
    if not v.size:
        return 0.0
    k = np.arange(v.size, dtype=float)
    return float(np.max((k + 1.0) ** (1.0 / p) * v))


def dixmier_log_average(s, n: int) -> float:
    """``(1/ln n) sum_{k<n} mu(k)``."""
    v = _vals(s)
    if not 2 <= n <= v.size:
        raise ValueError(f"n={n} outside [2, {v.size}]")
    return float(np.sum(v[:n]) / math.log(n))


def default_dixmier_grid(length: int) -> list[int]:
    return sorted({max(2, length // 8), max(2, length // 4), max(2, length // 2), length})


@dataclass
class DixmierFit:
    value: float
    slope: float
    residual: float
    grid: list[int] = field(default_factory=list)
    averages: list[float] = field(default_factory=list)


def extrapolate_dixmier(s, grid: Sequence[int] | None = None, full_output: bool = False):
    """Intercept of the least-squares line of ``Lambda_n`` against ``1/ln n``.

    With ``full_output`` a :class:`DixmierFit` is returned instead of the
    bare intercept.
    """
    v = _vals(s)
    grid = list(grid) if grid is not None else default_dixmier_grid(v.size)
    if len(set(grid)) < 3:
        raise ValueError("need at least 3 distinct grid points")
    lam = np.array([dixmier_log_average(v, int(n)) for n in grid])
    t = 1.0 / np.log(np.asarray(grid, dtype=float))
    A = np.stack([np.ones_like(t), t], axis=1)
    coef, *_ = np.linalg.lstsq(A, lam, rcond=None)
    resid = float(np.sqrt(np.mean((A @ coef - lam) ** 2)))
    fit = DixmierFit(float(coef[0]), float(coef[1]), resid, [int(n) for n in grid], lam.tolist())
    return fit if full_output else fit.value


def default_window(length: int, skip: int = 50, tail: float = 0.1) -> tuple[int, int]:
    return skip, int(length * (1.0 - tail)) - 1


def decay_exponent(s, k_min: int | None = None, k_max: int | None = None) -> float:
    """Least-squares slope of ``ln mu(k)`` against ``ln k`` for ``k_min <= k <= k_max``."""
    v = _vals(s)
    dmin, dmax = default_window(v.size)
    k_min = dmin if k_min is None else k_min
    k_max = dmax if k_max is None else k_max
    if not 0 < k_min < k_max < v.size:
        raise ValueError(f"invalid window [{k_min}, {k_max}] for length {v.size}")
    if k_max - k_min < 2:
        raise ValueError("window too small")
    window = v[k_min:k_max + 1]
    if np.any(window <= 0):
        raise ValueError("zero singular values in window; decay exponent not applicable")
    k = np.arange(k_min, k_max + 1, dtype=float)
    slope, _ = np.polyfit(np.log(k), np.log(window), 1)
    return float(slope)
