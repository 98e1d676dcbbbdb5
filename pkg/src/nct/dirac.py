"""Clifford data, sgn(D), the quantised differential and the comparison operator A."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .calculus import partial_derivative
from .core import AlgebraElement, LatticeTruncation, OperatorMatrix, left_mult_matrix
from .spectral import SingularSpectrum

TWO_PI = 2.0 * math.pi

_S1 = np.array([[0, 1], [1, 0]], dtype=complex)
_S2 = np.array([[0, -1j], [1j, 0]], dtype=complex)
_S3 = np.array([[1, 0], [0, -1]], dtype=complex)


@dataclass(frozen=True, eq=False)
class GammaFamily:
    d: int
    gammas: tuple

    @property
    def N(self) -> int:
        return self.gammas[0].shape[0]

    def __getitem__(self, j: int) -> np.ndarray:
        return self.gammas[j]

    def __iter__(self):
        return iter(self.gammas)

    def clifford_defect(self) -> float:
        eye = np.eye(self.N)
        worst = 0.0
        for j, a in enumerate(self.gammas):
            for k, b in enumerate(self.gammas):
                target = 2.0 * eye if j == k else 0.0 * eye
                worst = max(worst, np.abs(a @ b + b @ a - target).max())
        return float(worst)

    def hermiticity_defect(self) -> float:
        return float(max(np.abs(g - g.conj().T).max() for g in self.gammas))


def _chirality(gammas: list[np.ndarray]) -> np.ndarray:
    # Hermitian involution anticommuting with an even number of generators
    d = len(gammas)
    out = (1j) ** (d // 2) * np.eye(gammas[0].shape[0], dtype=complex)
    for g in gammas:
        out = out @ g
    return out


def gamma_matrices(d: int) -> GammaFamily:
    """Euclidean gamma matrices of size ``2^floor(d/2)``.

    Pauli tensor recursion ``(g_1..g_m) -> (s1 x g_1, .., s1 x g_m, s1 x chi, s2 x 1)``
    with ``chi`` the chirality of the previous level.  Every even-dimensional
    generator is then off-diagonal in the spin grading; odd ``d`` appends the
    chirality of the preceding even family.
    """
    if d < 2:
        raise ValueError("d must be >= 2")
    gam = [_S1, _S2]
    while len(gam) + 2 <= d:
        chi = _chirality(gam)
        eye = np.eye(gam[0].shape[0], dtype=complex)
        gam = [np.kron(_S1, g) for g in gam] + [np.kron(_S1, chi), np.kron(_S2, eye)]
    if len(gam) < d:
        gam = gam + [_chirality(gam)]
    return GammaFamily(d, tuple(g.copy() for g in gam))


def sign_dirac_symbol(n, G: GammaFamily) -> np.ndarray:
    """``sum_j gamma_j n_j / |n|`` with value 0 at ``n = 0``."""
    n = np.asarray(n, dtype=float)
    if n.size != G.d:
        raise ValueError("index length does not match gamma family")
    r = np.linalg.norm(n)
    out = np.zeros((G.N, G.N), dtype=complex)
    if r == 0:
        return out
    for j, g in enumerate(G):
        out += g * (n[j] / r)
    return out


def _unit_modes(T: LatticeTruncation) -> np.ndarray:
    r = T.norms
    safe = np.where(r > 0, r, 1.0)
    return np.where(r[:, None] > 0, T.modes / safe[:, None], 0.0)


def _spin_assemble(G: GammaFamily, blocks: list[np.ndarray], T: LatticeTruncation, label: str) -> OperatorMatrix:
    """``sum_j gamma_j (x) blocks[j]`` on the spin-major basis."""
    K = T.size
    out = np.zeros((G.N * K, G.N * K), dtype=complex)
    for g, B in zip(G, blocks):
        for s_out, s_in in zip(*np.nonzero(g)):
            out[s_out * K:(s_out + 1) * K, s_in * K:(s_in + 1) * K] += g[s_out, s_in] * B
    return OperatorMatrix(out, T, G.N, label)


def quantized_differential(x: AlgebraElement, G: GammaFamily, T: LatticeTruncation) -> OperatorMatrix:
    """Finite section of ``i [sgn(D), 1 (x) M_x]``.

    Entries are those of the infinite matrix:
    ``<(s', n')|dx|(s, n)> = i x(n'-n) e^{2 pi i sigma(n'-n, n)} (g(n') - g(n))_{s's}``.
    """
    M = left_mult_matrix(x, T).entries
    u = _unit_modes(T)
    blocks = [1j * M * (u[:, j][:, None] - u[:, j][None, :]) for j in range(G.d)]
    del M
    return _spin_assemble(G, blocks, T, "dx")


def sign_dirac_matrix(G: GammaFamily, T: LatticeTruncation) -> OperatorMatrix:
    u = _unit_modes(T)
    return _spin_assemble(G, [np.diag(u[:, j]).astype(complex) for j in range(G.d)], T, "sgn(D)")


def smoothed_sign_defect(G: GammaFamily, T: LatticeTruncation) -> SingularSpectrum:
    """Spectrum of ``sgn(D) - D (1 + D^2)^(-1/2)``.

    Diagonal in the mode basis: ``1 - 2 pi |n| / sqrt(1 + 4 pi^2 |n|^2)`` at
    ``n != 0`` (multiplicity N) and 0 at ``n = 0``.
    """
    t = TWO_PI * T.norms
    vals = np.where(T.norms > 0, 1.0 - t / np.sqrt(1.0 + t * t), 0.0)
    return SingularSpectrum(np.tile(vals, G.N), "sgn(D) - g(D)")


def resolvent_weights(T: LatticeTruncation, power: float = 1.0) -> np.ndarray:
    """Diagonal of ``(1 + D^2)^(-power/2)`` on one spin component."""
    return (1.0 + (TWO_PI * T.norms) ** 2) ** (-power / 2.0)


def _projector_symbol(T: LatticeTruncation, j: int, k: int) -> np.ndarray:
    # symbol of D_j D_k / (1 - Laplacian)
    n = T.modes.astype(float)
    return (TWO_PI ** 2) * n[:, j] * n[:, k] / (1.0 + (TWO_PI * T.norms) ** 2)


def build_A_blocks(x: AlgebraElement, T: LatticeTruncation) -> list[np.ndarray]:
    """Finite sections of the scalar operators ``A_1 .. A_d`` (entry formula)."""
    d = x.d
    M = left_mult_matrix(x, T).entries
    n = T.modes.astype(float)
    shift = [n[:, j][:, None] - n[:, j][None, :] for j in range(d)]   # (n' - n)_j
    blocks = []
    for j in range(d):
        coeff = shift[j].copy()
        for k in range(d):
            p = _projector_symbol(T, j, k)
            coeff -= 0.5 * (p[:, None] + p[None, :]) * shift[k]
        blocks.append(2j * math.pi * M * coeff)
    return blocks


def build_A_blocks_composed(x: AlgebraElement, T: LatticeTruncation) -> list[np.ndarray]:
    """Same operators assembled by composing multiplier and multiplication matrices."""
    d = x.d
    dM = [left_mult_matrix(partial_derivative(x, k + 1), T).entries for k in range(d)]
    blocks = []
    for j in range(d):
        A = dM[j].copy()
        for k in range(d):
            P = np.diag(_projector_symbol(T, j, k)).astype(complex)
            A -= 0.5 * (P @ dM[k] + dM[k] @ P)
        blocks.append(A)
    return blocks


def build_A(x: AlgebraElement, G: GammaFamily, T: LatticeTruncation, composed: bool = False) -> OperatorMatrix:
    """``A = sum_j gamma_j (x) A_j`` with
    ``A_j = M_{d_j x} - 1/2 sum_k (D_j D_k/(1-Lap) M_{d_k x} + M_{d_k x} D_j D_k/(1-Lap))``.
    """
    blocks = build_A_blocks_composed(x, T) if composed else build_A_blocks(x, T)
    return _spin_assemble(G, blocks, T, "A")


def weighted_A(x: AlgebraElement, G: GammaFamily, T: LatticeTruncation) -> OperatorMatrix:
    """``A (1 + D^2)^(-1/2)``."""
    w = resolvent_weights(T)
    blocks = [B * w[None, :] for B in build_A_blocks(x, T)]
    return _spin_assemble(G, blocks, T, "A(1+D^2)^(-1/2)")


def principal_symbol(x: AlgebraElement, s) -> list[AlgebraElement]:
    """``rho_j(s) = d_j x - s_j sum_k s_k d_k x`` on the unit sphere."""
    s = np.asarray(s, dtype=float)
    if s.size != x.d:
        raise ValueError("direction has the wrong dimension")
    if abs(np.linalg.norm(s) - 1.0) > 1e-12:
        raise ValueError("direction must be a unit vector")
    grads = [partial_derivative(x, j + 1) for j in range(x.d)]
    radial = sum((float(s[k]) * grads[k] for k in range(x.d)), AlgebraElement.zero(x.theta))
    return [grads[j] - float(s[j]) * radial for j in range(x.d)]
