import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from kahlercomp.curvature import KahlerCurvature, const_hbsc, hyperquadric, product
from kahlercomp.errors import InvalidArgument, PreconditionUnmet
from kahlercomp.numkit import random_unitaries, random_unitary
from kahlercomp.sym_op import (
    SymBasis,
    build,
    is_k_semipositive,
    k_sum,
    kyfan_min,
    mixed_estimate_check,
    mixed_estimate_sweep,
    operator_matrix,
    partial_trace,
    random_admissible_tensors,
    random_tensor,
    ricci_from_kpos_check,
    shift_to_k_semipositive,
    spectrum,
    tensor_from_form,
    weighted_frame_check,
)

from conftest import random_hermitian


def _product_example():
    return product([const_hbsc(1, 1.5), const_hbsc(1, 1.5)])


def test_basis_orthonormal():
    for n in range(1, 6):
        B = SymBasis(n)
        assert B.N == n * (n + 1) // 2
        G = np.array([[np.sum(B.tensor(p) * B.tensor(q)) for q in range(B.N)] for p in range(B.N)])
        assert np.allclose(G, np.eye(B.N), atol=1e-15)


def test_matrix_matches_defining_pairing(rng):
    R = random_tensor(3, 2)
    B = SymBasis(3)
    direct = np.array([[np.einsum("ijkl,ik,jl->", R.comp, B.tensor(p), B.tensor(q))
                        for q in range(B.N)] for p in range(B.N)])
    assert np.abs(direct - build(R).mat).max() < 1e-14


def test_form_tensor_roundtrip(rng):
    Q = random_hermitian(rng, 6)
    T = tensor_from_form(Q, 3)
    assert np.abs(operator_matrix(T.comp) - Q).max() < 1e-13


@pytest.mark.parametrize("n", range(1, 9))
def test_cpn_is_twice_identity(n):
    S = build(const_hbsc(n, 1))
    assert np.abs(S.mat - 2 * np.eye(S.N)).max() <= 1e-10
    assert np.abs(S.spectrum - 2).max() <= 1e-10


def test_zero_tensor_and_hyperquadric5():
    Z = KahlerCurvature(2, np.zeros((2,) * 4))
    assert not np.any(build(Z).mat)
    s = spectrum(hyperquadric(5))
    assert s.size == 15
    assert np.allclose(s, [-3] + [2] * 14, atol=1e-10)


def test_k_sum_examples():
    assert k_sum(build(const_hbsc(3, 1)), 2) == pytest.approx(4, abs=1e-12)
    assert k_sum(build(hyperquadric(4)), 1) == pytest.approx(-2, abs=1e-12)
    assert k_sum(build(_product_example()), 2) == pytest.approx(3, abs=1e-12)
    with pytest.raises(InvalidArgument):
        k_sum(build(const_hbsc(2, 1)), 4)
    with pytest.raises(InvalidArgument):
        k_sum(build(const_hbsc(2, 1)), 0)


def test_k_semipositivity_examples():
    for k in range(1, 7):
        assert is_k_semipositive(const_hbsc(3, 1), 1, k)
    Q = hyperquadric(4)
    assert not is_k_semipositive(Q, 1, 1)
    assert not is_k_semipositive(Q, 1, 3)
    assert is_k_semipositive(Q, 0, 2)
    assert not is_k_semipositive(Q, 0, 1)
    assert k_sum(build(Q), 3) == pytest.approx(2, abs=1e-12)


def test_kyfan_examples(rng):
    assert kyfan_min(np.diag([1.0, 2.0, 3.0]), 2) == pytest.approx(3)
    assert kyfan_min(np.eye(5), 3) == pytest.approx(3)
    with pytest.raises(InvalidArgument):
        kyfan_min(np.eye(3), 4)


def test_kyfan_attained_and_never_undercut(rng):
    A = random_hermitian(rng, 6)
    k = 2
    exact = kyfan_min(A, k)
    w, V = np.linalg.eigh(A)
    assert abs(partial_trace(A, V[:, :k]) - exact) < 1e-12
    assert abs(exact - w[:k].sum()) < 1e-12
    U = random_unitaries(6, 100_000, 3)[:, :, :k]
    traces = np.einsum("bis,ij,bjs->b", U.conj(), A, U).real
    assert traces.min() >= exact - 1e-9


def test_unitary_invariance_of_spectrum():
    from kahlercomp.numkit import eigvalsh

    for n in range(1, 7):
        count = 167
        # c far below the spectrum: no shift, plain random tensors
        T = random_admissible_tensors(n, 1, -1e6, count, n)
        U = random_unitaries(n, count, 100 + n)
        Uc = U.conj()
        T2 = np.einsum("xijkl,xia,xjb,xkc,xld->xabcd", T, U, Uc, U, Uc, optimize=True)
        w1 = eigvalsh(operator_matrix(T))
        w2 = eigvalsh(operator_matrix(T2))
        assert np.abs(w1 - w2).max() <= 1e-9


def test_random_tensor_deterministic():
    assert np.array_equal(random_tensor(3, 5).comp, random_tensor(3, 5).comp)


def test_shift_lands_on_boundary():
    R = shift_to_k_semipositive(random_tensor(4, 1, scale=3.0), 0.5, 3)
    assert is_k_semipositive(R, 0.5, 3)
    S = build(R)
    assert k_sum(S, 3) - 2 * 0.5 * 3 >= -1e-10


def test_admissible_stack_matches_hypothesis():
    T = random_admissible_tensors(4, 2, -1.0, 50, 9)
    for x in T:
        assert is_k_semipositive(KahlerCurvature(4, x), -1.0, 2)


def test_mixed_estimate_saturation():
    for n in (2, 3, 5):
        for c in (-1.0, 0.0, 1.0):
            T = const_hbsc(n, c)
            for k in range(1, n):
                lo = 2 * (k - 1) / (n - 1)
                for alpha in (lo, lo + 0.7, 4.0):
                    chk = mixed_estimate_check(T, c, k, alpha, random_unitary(n, k))
                    assert chk.holds
                    assert abs(chk.gap) <= 1e-10


def test_mixed_estimate_zero_tensor():
    Z = KahlerCurvature(3, np.zeros((3,) * 4))
    chk = mixed_estimate_check(Z, 0.0, 1, 1.0, np.eye(3))
    assert chk.lhs == 0 and chk.rhs == 0 and chk.holds


def test_mixed_estimate_hyperquadric_frames():
    Q = hyperquadric(5)
    for U in random_unitaries(5, 500, 21):
        assert mixed_estimate_check(Q, 0.0, 3, 1.0, U).holds


def test_mixed_estimate_preconditions():
    Q = hyperquadric(4)
    with pytest.raises(PreconditionUnmet):
        mixed_estimate_check(Q, 1.0, 1, 1.0, np.eye(4))
    with pytest.raises(PreconditionUnmet):
        mixed_estimate_check(const_hbsc(3, 1), 1.0, 2, 0.1, np.eye(3))
    with pytest.raises(PreconditionUnmet):
        mixed_estimate_check(const_hbsc(3, 1), 1.0, 3, 2.0, np.eye(3))
    with pytest.raises(InvalidArgument):
        mixed_estimate_check(const_hbsc(3, 1), 1.0, 1, 1.0, np.ones((3, 3)))


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("c", [-1.0, 0.0, 1.0])
def test_mixed_estimate_sweep_small(n, c):
    for k in range(1, n):
        res = mixed_estimate_sweep(n, k, c, tensors=60, frames=40, alphas=10, seed=n + k)
        assert res.violations == 0, res.worst
        assert res.trials == 60 * 40 * 10
        assert len(res.alphas) == 10 and min(res.min_lhs[i] - res.rhs[i] for i in range(10)) >= -1e-8


def test_mixed_estimate_sweep_matches_scalar_check():
    # the vectorized sweep agrees with the one-frame check on its worst case
    n, k, c, seed = 4, 2, 0.5, 3
    res = mixed_estimate_sweep(n, k, c, tensors=5, frames=7, alphas=3, seed=seed)
    T = random_admissible_tensors(n, k, c, 5, seed)
    U = random_unitaries(n, 5 * 7, seed + 1).reshape(5, 7, n, n)
    w = res.worst
    R = KahlerCurvature(n, T[w["tensor"]])
    chk = mixed_estimate_check(R, c, k, w["alpha"], U[w["tensor"], w["frame"]], tol=1.0)
    assert abs(chk.gap - w["gap"]) < 1e-12


def test_ricci_from_kpos():
    assert ricci_from_kpos_check(const_hbsc(4, 1), 1.0, 2)
    Z = KahlerCurvature(3, np.zeros((3,) * 4))
    assert ricci_from_kpos_check(Z, 0.0, 1)
    for n in (2, 3, 4, 5):
        k = (n + 1) // 2
        for seed in range(300 // 4):
            R = shift_to_k_semipositive(random_tensor(n, seed), 0.0, k)
            assert ricci_from_kpos_check(R, 0.0, k)
    with pytest.raises(PreconditionUnmet):
        ricci_from_kpos_check(const_hbsc(3, 1), 1.0, 3)


def test_weighted_frame_check():
    for n, c in ((3, 1.0), (4, -0.5)):
        for k in range(1, n + 1):
            chk = weighted_frame_check(const_hbsc(n, c), c, k, random_unitary(n, k))
            assert abs(chk.lhs - 2 * k * c) <= 1e-10 and chk.holds
    T = _product_example()
    for U in random_unitaries(2, 200, 4):
        # k = 1 is HSC >= 2c
        assert weighted_frame_check(T, 0.0, 1, U).holds
    Q = hyperquadric(5)
    for U in random_unitaries(5, 200, 8):
        assert weighted_frame_check(Q, 0.0, 3, U).holds
    with pytest.raises(PreconditionUnmet):
        weighted_frame_check(Q, 1.0, 1, np.eye(5))


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 10_000), st.floats(-1, 1))
def test_semipositivity_monotone_in_k(n, seed, c):
    R = random_tensor(n, seed)
    N = n * (n + 1) // 2
    flags = [is_k_semipositive(R, c, k) for k in range(1, N + 1)]
    # k-semipositive implies (k+1)-semipositive
    for a, b in zip(flags, flags[1:]):
        assert b or not a


@settings(max_examples=30, deadline=None)
@given(st.integers(1, 5), st.integers(0, 10_000), st.floats(0.1, 5))
def test_const_shift_moves_spectrum(n, seed, t):
    R = random_tensor(n, seed)
    assert np.abs(spectrum(R + const_hbsc(n, t)) - (spectrum(R) + 2 * t)).max() < 1e-10 * (1 + t)
