import math

import numpy as np
import pytest

from nct.core import AlgebraElement, LatticeTruncation, ThetaMatrix, adjoint, random_element
from nct.dirac import (build_A, gamma_matrices, principal_symbol, quantized_differential,
                       sign_dirac_matrix, sign_dirac_symbol, smoothed_sign_defect, weighted_A)
from nct.spectral import decay_exponent, singular_values
from nct.traceformula import lattice_point_count

from conftest import generators

TWO_PI = 2 * math.pi


@pytest.mark.parametrize("d,N", [(2, 2), (3, 2), (4, 4), (5, 4), (6, 8)])
def test_gamma_family(d, N):
    G = gamma_matrices(d)
    assert G.N == N and len(G.gammas) == d
    assert G.clifford_defect() <= 1e-14
    assert G.hermiticity_defect() == 0
    for g in G:
        assert np.abs(g @ g.conj().T - np.eye(N)).max() <= 1e-14


def test_gamma_requires_d2():
    with pytest.raises(ValueError):
        gamma_matrices(1)


def test_even_gammas_are_off_diagonal():
    for d in (2, 4, 6):
        h = gamma_matrices(d).N // 2
        for g in gamma_matrices(d):
            assert not g[:h, :h].any() and not g[h:, h:].any()


def test_sign_symbol_examples():
    G = gamma_matrices(2)
    g = sign_dirac_symbol((3, 4), G)
    assert np.allclose(g, (3 * G[0] + 4 * G[1]) / 5)
    assert np.allclose(np.linalg.eigvalsh(g), [-1, 1])
    assert not sign_dirac_symbol((0, 0), G).any()
    assert np.array_equal(sign_dirac_symbol((0, 1), G), G[1])
    with pytest.raises(ValueError):
        sign_dirac_symbol((1, 2, 3), G)


def test_sign_symbol_homogeneous_and_involutive(rng):
    G = gamma_matrices(3)
    for _ in range(10):
        n = rng.integers(-5, 6, size=3)
        if not n.any():
            continue
        g = sign_dirac_symbol(n, G)
        assert np.allclose(sign_dirac_symbol(2 * n, G), g, atol=1e-15)
        assert np.allclose(g @ g, np.eye(G.N), atol=1e-14)


def test_sign_matrix_squares_to_projection():
    G, T = gamma_matrices(2), LatticeTruncation(2, 3)
    F = sign_dirac_matrix(G, T).entries
    expected = np.eye(G.N * T.size)
    for s in range(G.N):
        expected[s * T.size + T.zero_index, s * T.size + T.zero_index] = 0
    assert np.abs(F @ F - expected).max() <= 1e-14


# -- quantised differential ----------------------------------------------------------

def test_dx_of_constant_is_zero(theta):
    dx = quantized_differential(AlgebraElement.scalar(theta, 2.5), gamma_matrices(2), LatticeTruncation(2, 4))
    assert not dx.entries.any()


def test_dx_entry_example(theta):
    G, T = gamma_matrices(2), LatticeTruncation(2, 3)
    dx = quantized_differential(AlgebraElement.generator(theta, 1), G, T)
    block = np.array([[dx.entry(so, (1, 1), si, (0, 1)) for si in range(2)] for so in range(2)])
    r = 1 / math.sqrt(2)
    assert np.abs(block - 1j * (r * G[0] + (r - 1) * G[1])).max() <= 1e-15


def test_dx_matches_commutator_inside_window(theta, rng):
    # away from the boundary the section equals i[F, 1 (x) M_x] computed with truncated factors
    G, T = gamma_matrices(2), LatticeTruncation(2, 6)
    x = random_element(theta, 2, rng)
    from nct.core import left_mult_matrix
    M = np.kron(np.eye(2), left_mult_matrix(x, T).entries)
    F = sign_dirac_matrix(G, T).entries
    comm = 1j * (F @ M - M @ F)
    inner = np.nonzero(np.abs(T.modes).max(axis=1) <= 4)[0]
    cols = np.concatenate([inner, inner + T.size])
    assert np.abs(comm[:, cols] - quantized_differential(x, G, T).entries[:, cols]).max() <= 1e-14


def test_dx_adjoint_relation(theta, rng):
    G, T = gamma_matrices(2), LatticeTruncation(2, 4)
    x = random_element(theta, 2, rng)
    lhs = quantized_differential(x, G, T).entries.conj().T
    assert np.abs(lhs - quantized_differential(adjoint(x), G, T).entries).max() <= 1e-15


def test_dx_bandwidth(theta, rng):
    G, T = gamma_matrices(2), LatticeTruncation(2, 5)
    x = random_element(theta, 2, rng, n_terms=8)
    dx = quantized_differential(x, G, T)
    dist = np.abs(T.modes[:, None, :] - T.modes[None, :, :]).max(axis=2)
    for so in range(2):
        for si in range(2):
            assert not dx.block(so, si)[dist > x.support_radius].any()


def test_dx_sections_are_nested(theta, rng):
    G = gamma_matrices(2)
    x = random_element(theta, 2, rng)
    small, big = LatticeTruncation(2, 3), LatticeTruncation(2, 5)
    A, B = quantized_differential(x, G, small), quantized_differential(x, G, big)
    pos = big.index_of(small.modes)
    for so in range(2):
        for si in range(2):
            assert np.array_equal(A.block(so, si), B.block(so, si)[np.ix_(pos, pos)])


def test_dx_monomial_spectrum_theta_invariant():
    G, T = gamma_matrices(2), LatticeTruncation(2, 8)
    spectra = [singular_values(quantized_differential(AlgebraElement.monomial(ThetaMatrix.preset(name, 2), (1, 2)), G, T))
               for name in ("zero", "golden")]
    assert np.abs(spectra[0].values - spectra[1].values).max() <= 1e-12


def test_dx_univariate_block_structure():
    # theta = 0, x a polynomial in U1: dx preserves the transverse mode n_2
    th = ThetaMatrix.zero(2)
    U1 = AlgebraElement.generator(th, 1)
    x = U1 + U1.H + 0.5 * U1 * U1
    G, T = gamma_matrices(2), LatticeTruncation(2, 6)
    dx = quantized_differential(x, G, T)
    n2 = np.tile(T.modes[:, 1], 2)
    assert not dx.entries[n2[:, None] != n2[None, :]].any()
    parts = []
    for t in range(-6, 7):
        sel = np.nonzero(n2 == t)[0]
        parts.append(np.linalg.svd(dx.entries[np.ix_(sel, sel)], compute_uv=False))
    blocks = np.sort(np.concatenate(parts))[::-1]
    assert np.abs(blocks - singular_values(dx).values).max() <= 1e-12
    # reflection n_2 -> -n_2 maps block t onto block -t
    assert np.allclose(parts[6 + 2], parts[6 - 2], atol=1e-12)


def test_dx_hermitian_for_self_adjoint(theta):
    from conftest import standard_element
    dx = quantized_differential(standard_element(theta), gamma_matrices(2), LatticeTruncation(2, 5))
    assert dx.hermiticity_defect() <= 1e-15


# -- smoothed sign defect ------------------------------------------------------------

def test_smoothed_sign_examples():
    G, T = gamma_matrices(2), LatticeTruncation(2, 4)
    s = smoothed_sign_defect(G, T)
    assert len(s) == 2 * T.size
    assert s[0] == pytest.approx(1 - TWO_PI / math.sqrt(1 + TWO_PI ** 2))
    assert np.count_nonzero(s.values == s[0]) == 2 * 4      # |n| = 1: four modes, two spins
    assert s.values[-1] == 0 and np.count_nonzero(s.values == 0) == 2
    assert np.all(np.diff(s.values) <= 0)


def test_smoothed_sign_weyl_oracle():
    G, T = gamma_matrices(2), LatticeTruncation(2, 40)
    s = smoothed_sign_defect(G, T)
    assert decay_exponent(s, 100, 2000) == pytest.approx(-1.0, abs=0.05)
    # mu_k ~ N / (8 pi k) from #{|n| <= R} ~ pi R^2 and 1 - t/sqrt(1+t^2) ~ 1/(2 t^2)
    k = np.arange(100, 2001)
    assert np.mean((k + 1) * s.values[k]) == pytest.approx(G.N / (8 * math.pi), rel=0.02)
    assert lattice_point_count(40, 2) / (math.pi * 40 ** 2) == pytest.approx(1.0, rel=0.01)


# -- operator A ----------------------------------------------------------------------

def test_A_of_constant_is_zero(theta):
    G, T = gamma_matrices(2), LatticeTruncation(2, 4)
    c = AlgebraElement.scalar(theta, 1.5)
    assert not build_A(c, G, T).entries.any()
    assert not weighted_A(c, G, T).entries.any()


def test_A_hermitian(theta, rng):
    G, T = gamma_matrices(2), LatticeTruncation(2, 6)
    x = random_element(theta, 2, rng, self_adjoint=True)
    assert build_A(x, G, T).hermiticity_defect() <= 1e-12


@pytest.mark.parametrize("which", ["U1", "random"])
def test_A_two_assembly_paths(theta, rng, which):
    G, T = gamma_matrices(2), LatticeTruncation(2, 6)
    x = generators(theta)[0] if which == "U1" else random_element(theta, 2, rng)
    assert np.abs(build_A(x, G, T).entries - build_A(x, G, T, composed=True).entries).max() <= 1e-12


def test_weighted_A_column_bound(theta, rng):
    G, T = gamma_matrices(2), LatticeTruncation(2, 6)
    x = random_element(theta, 2, rng)
    A = build_A(x, G, T).entries
    W = weighted_A(x, G, T).entries
    w = np.tile((1 + (TWO_PI * T.norms) ** 2) ** -0.5, 2)
    assert np.abs(W - A * w[None, :]).max() <= 1e-13
    assert np.all(np.linalg.norm(W, axis=0) <= np.linalg.norm(A, 2) * w * (1 + 1e-12))


def test_A_d3_hermitian(rng):
    th = ThetaMatrix.from_pair(3, 0.2)
    x = random_element(th, 1, rng, n_terms=4, self_adjoint=True)
    G, T = gamma_matrices(3), LatticeTruncation(3, 3)
    assert build_A(x, G, T).hermiticity_defect() <= 1e-12
    assert np.abs(build_A(x, G, T).entries - build_A(x, G, T, composed=True).entries).max() <= 1e-12


# -- principal symbol ----------------------------------------------------------------

def test_principal_symbol_examples(theta, rng):
    c = AlgebraElement.scalar(theta, 2.0)
    assert all(len(r) == 0 for r in principal_symbol(c, (0.6, 0.8)))
    x = random_element(theta, 2, rng)
    from nct.calculus import partial_derivative
    rho = principal_symbol(x, (1.0, 0.0))
    assert len(rho[0]) == 0
    assert (rho[1] - partial_derivative(x, 2)).coeffs == {}


def test_principal_symbol_tangential(theta, rng):
    x = random_element(theta, 2, rng)
    for _ in range(10):
        s = rng.standard_normal(2)
        s /= np.linalg.norm(s)
        rho = principal_symbol(x, s)
        total = sum((float(sj) * r for sj, r in zip(s, rho)), AlgebraElement.zero(theta))
        assert all(abs(c) <= 1e-12 for _, c in total)


def test_principal_symbol_rejects_non_unit(theta):
    with pytest.raises(ValueError):
        principal_symbol(AlgebraElement.generator(theta, 1), (1.0, 1.0))
    with pytest.raises(ValueError):
        principal_symbol(AlgebraElement.generator(theta, 1), (1.0, 0.0, 0.0))
