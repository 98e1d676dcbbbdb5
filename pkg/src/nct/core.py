"""Twisted Fourier algebra of the quantum torus.

Elements are finitely supported coefficient maps ``n -> x(n)`` standing for
``x = sum_n x(n) U^n`` with ``U^n = U_1^{n_1} ... U_d^{n_d}``.  Reordering two
ordered monomials gives ``U^m U^n = exp(2 pi i sigma(m, n)) U^{m+n}`` with

    sigma(m, n) = sum_{k > j} theta[k, j] m_k n_j

which is the bilinear cocycle used everywhere below.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

PRUNE_TOL = 1e-15
GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True, eq=False)
class ThetaMatrix:
    """Antisymmetric real deformation matrix."""

    entries: np.ndarray

    def __post_init__(self):
        arr = np.array(self.entries, dtype=float)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("theta must be a square matrix")
        if arr.shape[0] < 2:
            raise ValueError("dimension d must be >= 2")
        if not np.allclose(arr, -arr.T, rtol=0.0, atol=1e-14):
            raise ValueError("theta must be antisymmetric")
        arr.flags.writeable = False
        object.__setattr__(self, "entries", arr)

    @property
    def d(self) -> int:
        return self.entries.shape[0]

    @cached_property
    def lower(self) -> np.ndarray:
        # sigma(m, n) = m @ lower @ n
        return np.tril(self.entries, -1)

    @classmethod
    def zero(cls, d: int) -> "ThetaMatrix":
        return cls(np.zeros((d, d)))

    @classmethod
    def from_pair(cls, d: int, value: float) -> "ThetaMatrix":
        """theta[0, 1] = value, theta[1, 0] = -value, all else zero."""
        arr = np.zeros((d, d))
        arr[0, 1], arr[1, 0] = value, -value
        return cls(arr)

    @classmethod
    def golden(cls, d: int = 2) -> "ThetaMatrix":
        return cls.from_pair(d, GOLDEN)

    @classmethod
    def preset(cls, name: str, d: int) -> "ThetaMatrix":
        if name == "zero":
            return cls.zero(d)
        if name == "golden":
            return cls.golden(d)
        raise ValueError(f"unknown theta preset {name!r}")

    def __eq__(self, other):
        if not isinstance(other, ThetaMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash(self.entries.tobytes())

    def __repr__(self):
        return f"ThetaMatrix({self.entries.tolist()!r})"


def _as_index(n, d: int | None = None) -> tuple[int, ...]:
    idx = tuple(int(v) for v in n)
    if d is not None and len(idx) != d:
        raise ValueError(f"lattice index {idx} does not have length {d}")
    return idx


def sigma(m, n, theta: ThetaMatrix) -> float:
    m = np.asarray(_as_index(m, theta.d), dtype=float)
    n = np.asarray(_as_index(n, theta.d), dtype=float)
    return float(m @ theta.lower @ n)


def weyl_phase(m, n, theta: ThetaMatrix) -> complex:
    """Phase ``c`` with ``U^m U^n = c U^{m+n}``."""
    return complex(np.exp(2j * np.pi * sigma(m, n, theta)))


@dataclass(frozen=True)
class LatticeTruncation:
    """The cube ``{n : |n|_inf <= radius}`` in lexicographic order."""

    d: int
    radius: int

    def __post_init__(self):
        if self.d < 1 or self.radius < 0:
            raise ValueError("need d >= 1 and radius >= 0")

    @property
    def width(self) -> int:
        return 2 * self.radius + 1

    @property
    def size(self) -> int:
        return self.width ** self.d

    @cached_property
    def modes(self) -> np.ndarray:
        axes = [np.arange(-self.radius, self.radius + 1)] * self.d
        grid = np.meshgrid(*axes, indexing="ij")
        out = np.stack([g.ravel() for g in grid], axis=1).astype(np.int64)
        out.flags.writeable = False
        return out

    @cached_property
    def norms(self) -> np.ndarray:
        out = np.sqrt((self.modes.astype(float) ** 2).sum(axis=1))
        out.flags.writeable = False
        return out

    @property
    def zero_index(self) -> int:
        return (self.size - 1) // 2

    def contains(self, n) -> np.ndarray | bool:
        arr = np.asarray(n)
        inside = np.all(np.abs(arr) <= self.radius, axis=-1)
        return bool(inside) if arr.ndim == 1 else inside

    def index_of(self, n) -> np.ndarray | int:
        """Position(s) of mode(s) ``n``; no bounds check."""
        arr = np.asarray(n, dtype=np.int64) + self.radius
        strides = self.width ** np.arange(self.d - 1, -1, -1)
        idx = arr @ strides
        return int(idx) if np.ndim(idx) == 0 else idx


class AlgebraElement:
    """Finitely supported element ``sum_n coeffs[n] U^n`` of the quantum torus.

    Instances are immutable; coefficients of modulus below ``PRUNE_TOL`` are
    dropped on construction.  Arithmetic operators implement the algebra:
    ``a * b`` is the twisted product, ``a + b`` and scalar multiples act
    linearly, ``a.H`` is the involution.
    """

    __slots__ = ("_theta", "_coeffs")

    def __init__(self, theta: ThetaMatrix, coeffs: Mapping | Iterable = ()):
        if not isinstance(theta, ThetaMatrix):
            theta = ThetaMatrix(theta)
        items = coeffs.items() if isinstance(coeffs, Mapping) else coeffs
        clean: dict[tuple[int, ...], complex] = {}
        for n, c in items:
            key = _as_index(n, theta.d)
            clean[key] = clean.get(key, 0.0) + complex(c)
        self._theta = theta
        self._coeffs = {k: v for k, v in clean.items() if abs(v) >= PRUNE_TOL}

    @property
    def theta(self) -> ThetaMatrix:
        return self._theta

    @property
    def d(self) -> int:
        return self._theta.d

    @property
    def coeffs(self) -> dict[tuple[int, ...], complex]:
        return dict(self._coeffs)

    def __getitem__(self, n) -> complex:
        return self._coeffs.get(_as_index(n, self.d), 0.0j)

    def __iter__(self):
        return iter(self._coeffs.items())

    def __len__(self):
        return len(self._coeffs)

    @property
    def support(self) -> list[tuple[int, ...]]:
        return sorted(self._coeffs)

    @property
    def support_radius(self) -> int:
        if not self._coeffs:
            return 0
        return max(max(abs(v) for v in n) for n in self._coeffs)

    def is_constant(self) -> bool:
        zero = (0,) * self.d
        return all(n == zero for n in self._coeffs)

    # -- constructors -----------------------------------------------------
    @classmethod
    def zero(cls, theta: ThetaMatrix) -> "AlgebraElement":
        return cls(theta, {})

    @classmethod
    def scalar(cls, theta: ThetaMatrix, value: complex = 1.0) -> "AlgebraElement":
        return cls(theta, {(0,) * theta.d: value})

    @classmethod
    def monomial(cls, theta: ThetaMatrix, n, coeff: complex = 1.0) -> "AlgebraElement":
        return cls(theta, {_as_index(n, theta.d): coeff})

    @classmethod
    def generator(cls, theta: ThetaMatrix, j: int) -> "AlgebraElement":
        """``U_j`` with 1-based axis index ``j``."""
        n = [0] * theta.d
        n[j - 1] = 1
        return cls.monomial(theta, n)

    # -- algebra ------------------------------------------------------------
    def _check(self, other: "AlgebraElement"):
        if self._theta != other._theta:
            raise ValueError("elements live on different quantum tori (theta mismatch)")

    def __add__(self, other):
        if isinstance(other, AlgebraElement):
            self._check(other)
            out = dict(self._coeffs)
            for n, c in other._coeffs.items():
                out[n] = out.get(n, 0.0) + c
            return AlgebraElement(self._theta, out)
        if np.isscalar(other):
            return self + AlgebraElement.scalar(self._theta, other)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return AlgebraElement(self._theta, {n: -c for n, c in self._coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, AlgebraElement):
            return mul(self, other)
        if np.isscalar(other):
            return AlgebraElement(self._theta, {n: c * other for n, c in self._coeffs.items()})
        return NotImplemented

    def __rmul__(self, other):
        if np.isscalar(other):
            return self * other
        return NotImplemented

    def __truediv__(self, other):
        return self * (1.0 / other)

    def __pow__(self, k: int):
        if k < 0:
            raise ValueError("only nonnegative powers")
        out = AlgebraElement.scalar(self._theta)
        for _ in range(k):
            out = out * self
        return out

    @property
    def H(self) -> "AlgebraElement":
        return adjoint(self)

    def allclose(self, other: "AlgebraElement", atol: float = 1e-12) -> bool:
        return max_coeff_diff(self, other) <= atol

    def __repr__(self):
        terms = ", ".join(f"{n}: {c:.6g}" for n, c in sorted(self._coeffs.items()))
        return f"AlgebraElement(d={self.d}, {{{terms}}})"


def max_coeff_diff(a: AlgebraElement, b: AlgebraElement) -> float:
    keys = set(a.coeffs) | set(b.coeffs)
    if not keys:
        return 0.0
    return max(abs(a[n] - b[n]) for n in keys)


def mul(a: AlgebraElement, b: AlgebraElement) -> AlgebraElement:
    """Twisted convolution ``(ab)(p) = sum_{m+n=p} a(m) b(n) exp(2 pi i sigma(m, n))``."""
    a._check(b)
    if not len(a) or not len(b):
        return AlgebraElement.zero(a.theta)
    ka, ca = zip(*a)
    kb, cb = zip(*b)
    ma = np.array(ka, dtype=float)
    mb = np.array(kb, dtype=float)
    phase = np.exp(2j * np.pi * (ma @ a.theta.lower @ mb.T))
    prod = np.outer(ca, cb) * phase
    out: dict[tuple[int, ...], complex] = {}
    for i, m in enumerate(ka):
        for k, n in enumerate(kb):
            p = tuple(x + y for x, y in zip(m, n))
            out[p] = out.get(p, 0.0) + prod[i, k]
    return AlgebraElement(a.theta, out)


def adjoint(a: AlgebraElement) -> AlgebraElement:
    """Involution; uses ``(U^n)^* = exp(2 pi i sigma(n, n)) U^{-n}``."""
    out = {}
    for n, c in a:
        neg = tuple(-v for v in n)
        out[neg] = np.conj(c) * weyl_phase(n, n, a.theta)
    return AlgebraElement(a.theta, out)


def trace_state(a: AlgebraElement) -> complex:
    return a[(0,) * a.d]


def l2_norm(a: AlgebraElement) -> float:
    return math.sqrt(sum(abs(c) ** 2 for _, c in a))


def is_self_adjoint(a: AlgebraElement, atol: float = 1e-12) -> bool:
    return a.allclose(adjoint(a), atol=atol)


@dataclass(eq=False)
class OperatorMatrix:
    """Dense finite section on the basis ``spin (x) truncated Fourier modes``.

    Row/column index ``s * T.size + i`` addresses spin component ``s`` of
    mode ``T.modes[i]``.
    """

    entries: np.ndarray
    truncation: LatticeTruncation
    spin_dim: int = 1
    label: str = ""

    def __post_init__(self):
        n = self.spin_dim * self.truncation.size
        if self.entries.shape != (n, n):
            raise ValueError(f"expected a {n}x{n} matrix, got {self.entries.shape}")

    @property
    def shape(self):
        return self.entries.shape

    def __array__(self, dtype=None, copy=None):
        return self.entries if dtype is None else self.entries.astype(dtype)

    def block(self, s_out: int, s_in: int) -> np.ndarray:
        K = self.truncation.size
        return self.entries[s_out * K:(s_out + 1) * K, s_in * K:(s_in + 1) * K]

    def entry(self, s_out: int, n_out, s_in: int, n_in) -> complex:
        T = self.truncation
        return complex(self.block(s_out, s_in)[T.index_of(n_out), T.index_of(n_in)])

    def hermiticity_defect(self) -> float:
        return float(np.max(np.abs(self.entries - self.entries.conj().T), initial=0.0))


def left_mult_matrix(a: AlgebraElement, T: LatticeTruncation) -> OperatorMatrix:
    """Finite section of ``y -> a y`` on ``span{U^n : n in T}``.

    Entry ``(n', n)`` equals ``a(n' - n) exp(2 pi i sigma(n' - n, n))``.
    """
    if T.d != a.d:
        raise ValueError("truncation dimension does not match element")
    K = T.size
    modes = T.modes
    out = np.zeros((K, K), dtype=complex)
    cols = np.arange(K)
    for m, c in a:
        target = modes + np.asarray(m)
        inside = T.contains(target)
        rows = T.index_of(target[inside])
        phase = np.exp(2j * np.pi * (modes[inside] @ (np.asarray(m, float) @ a.theta.lower)))
        out[rows, cols[inside]] += c * phase
    return OperatorMatrix(out, T, 1, label="M_x")


def clock_shift_rep(p: int, q: int, n) -> np.ndarray:
    """Image of ``U^n`` (d = 2) under ``U_1 -> C``, ``U_2 -> S``.

    ``C = diag(w^k)`` with ``w = exp(2 pi i p / q)`` and ``S e_k = e_{k+1}``,
    so ``C S = w S C`` as required by ``U_1 U_2 = exp(2 pi i p/q) U_2 U_1``.
    """
    n = _as_index(n)
    if len(n) != 2:
        raise ValueError("clock-shift representation is only available for d = 2")
    if q < 1:
        raise ValueError("q must be >= 1")
    k = np.arange(q)
    # C^a S^b: first shift by b then multiply by w^(a * row)
    a, b = n
    rows = (k + b) % q
    out = np.zeros((q, q), dtype=complex)
    out[rows, k] = np.exp(2j * np.pi * p * a * rows / q)
    return out


def clock_shift_element(p: int, q: int, a: AlgebraElement) -> np.ndarray:
    return sum((c * clock_shift_rep(p, q, n) for n, c in a), np.zeros((q, q), complex))


def periodized_trace(a: AlgebraElement, q: int) -> complex:
    """``sum_{n = 0 mod q} a(n)``, the value of ``(1/q) Tr`` in the clock-shift representation.

    Agrees with :func:`trace_state` whenever ``supp(a)`` avoids ``q Z^2 \\ {0}``.
    """
    return complex(sum((c for n, c in a if all(v % q == 0 for v in n)), 0j))


def random_element(theta: ThetaMatrix, radius: int, rng: np.random.Generator,
                   n_terms: int | None = None, self_adjoint: bool = False,
                   scale: float = 1.0) -> AlgebraElement:
    """Random trigonometric polynomial supported in the cube of given radius."""
    T = LatticeTruncation(theta.d, radius)
    n_terms = n_terms if n_terms is not None else min(T.size, 6)
    picks = rng.choice(T.size, size=n_terms, replace=False)
    vals = scale * (rng.standard_normal(n_terms) + 1j * rng.standard_normal(n_terms)) / math.sqrt(2 * n_terms)
    x = AlgebraElement(theta, {tuple(T.modes[i]): v for i, v in zip(picks, vals)})
    if self_adjoint:
        x = 0.5 * (x + adjoint(x))
    return x


# -- JSON interchange -------------------------------------------------------

def element_to_dict(a: AlgebraElement) -> dict:
    return {
        "d": a.d,
        "theta": a.theta.entries.tolist(),
        "coeffs": [{"n": list(n), "re": c.real, "im": c.imag} for n, c in sorted(a)],
    }


def element_from_dict(obj: Mapping, theta: ThetaMatrix | None = None) -> AlgebraElement:
    """Parse the JSON element format; raises ``ValueError`` on malformed input.

    ``theta`` overrides (or supplies) the deformation matrix; the object's
    own ``"theta"`` key may then be omitted.
    """
    if not isinstance(obj, Mapping):
        raise ValueError("element must be a JSON object")
    try:
        d = int(obj["d"])
        if theta is None:
            theta = ThetaMatrix(np.asarray(obj["theta"], dtype=float))
        if theta.d != d:
            raise ValueError(f"theta has dimension {theta.d}, element declares d={d}")
        coeffs = {}
        for entry in obj["coeffs"]:
            n = entry["n"]
            if any(int(v) != v for v in n):
                raise ValueError(f"non-integer lattice index {n}")
            key = _as_index(n, d)
            coeffs[key] = coeffs.get(key, 0.0) + complex(float(entry.get("re", 0.0)), float(entry.get("im", 0.0)))
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed element: {exc!r}") from exc
    return AlgebraElement(theta, coeffs)


def dumps_element(a: AlgebraElement) -> str:
    return json.dumps(element_to_dict(a))


def loads_element(text: str) -> AlgebraElement:
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValueError(f"invalid JSON: {exc}") from exc
    return element_from_dict(obj)
