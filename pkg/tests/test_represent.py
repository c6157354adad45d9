import numpy as np
import pytest

from oracles import f_by_subsets, random_canonical_params, random_spd, transfer_function
from phsysid.errors import DimensionError, DomainError, NotPositiveDefiniteError, PreconditionError
from phsysid.represent import (
    CanonicalCoords,
    CHParams,
    GroupElement,
    PHSystem,
    apply_group_action,
    build_controllable,
    build_O,
    build_observable,
    c_coeffs,
    canonical_coords,
    controllability_det,
    controllability_det_formula,
    embed_system,
    embedding_residuals,
    extend_params,
    f_matrix,
    filter_equivalent_zero_state,
    group_witness,
    is_canonical_params,
    is_canonical_system,
    krylov,
    markov_invariants,
    morphism_ctr,
    morphism_ctr_residuals,
    morphism_obs,
    morphism_obs_residuals,
    params_from_coords,
    params_from_system,
    star_equivalent_witness,
    sys_equivalent,
    system_from_params,
)
from phsysid.sympcore import canonical_J, is_symplectic, williamson

FK = PHSystem(
    np.block([[np.array([[2.0, -1.0], [-1.0, 1.0]]), np.zeros((2, 2))], [np.zeros((2, 2)), np.eye(2)]]),
    [0, 0, 1, 0],
)
CIRCUIT = PHSystem(np.eye(10), np.r_[np.zeros(5), np.ones(5)])


class TestTypes:
    def test_params_validation(self):
        with pytest.raises(DomainError):
            CHParams([0.0], [1, 0])
        with pytest.raises(DimensionError):
            CHParams([1.0], [1, 0, 0])

    def test_system_validation(self):
        with pytest.raises(NotPositiveDefiniteError):
            PHSystem(-np.eye(2), [1, 0])
        with pytest.raises(DimensionError):
            PHSystem(np.eye(2), [1, 0, 0])

    def test_coords_validation(self):
        with pytest.raises(DomainError):
            CanonicalCoords([2.0, 1.0], [1, 1])
        with pytest.raises(DomainError):
            CanonicalCoords([1.0, 2.0], [1, 0])

    def test_group_element_validation(self):
        with pytest.raises(DomainError):
            GroupElement([0, 0], [0, 0])
        g = GroupElement([1, 0], [-np.pi / 2, 7.0])
        assert np.all((g.theta >= 0) & (g.theta < 2 * np.pi))


class TestCoefficients:
    def test_f_k0(self):
        np.testing.assert_array_equal(f_matrix([1.0, 2.0], 0), [1, 2])

    def test_f_k1(self):
        np.testing.assert_array_equal(f_matrix([1.0, 2.0], 1), [4, 2])

    def test_f_n3_k2(self):
        np.testing.assert_allclose(f_matrix([1.0, 2.0, 3.0], 2), [36, 18, 12])

    def test_f_against_subsets(self):
        rng = np.random.default_rng(0)
        d = rng.uniform(0.5, 2, 5)
        for k in range(5):
            np.testing.assert_allclose(f_matrix(d, k), f_by_subsets(d, k), rtol=1e-12)

    def test_f_range(self):
        with pytest.raises(DomainError):
            f_matrix([1.0, 2.0], 2)
        with pytest.raises(DomainError):
            f_matrix([1.0], -1)

    @pytest.mark.parametrize("d,v,expected", [
        ([1.0], [1, 0], [1]),
        ([3.0], [0, 2], [12]),
        ([1.0, 2.0], [1, 1, 1, 1], [6, 12]),
    ])
    def test_c(self, d, v, expected):
        np.testing.assert_allclose(c_coeffs(CHParams(d, v)), expected)


class TestRepresentations:
    def test_controllable_n1(self):
        r = build_controllable(CHParams([1.0], [1, 0]))
        np.testing.assert_array_equal(r.A, [[0, 1], [-1, 0]])
        np.testing.assert_array_equal(r.B, [0, 1])
        np.testing.assert_array_equal(r.C, [0, 1])

    def test_controllable_n2(self):
        r = build_controllable(CHParams([1.0, 2.0], [1, 1, 1, 1]))
        np.testing.assert_array_equal(r.A[-1], [-4, 0, -5, 0])
        np.testing.assert_array_equal(r.C, [0, 12, 0, 6])

    def test_controllable_full_rank(self):
        rng = np.random.default_rng(1)
        for n in range(1, 5):
            r = build_controllable(random_canonical_params(rng, n))
            assert np.linalg.matrix_rank(krylov(r.A, r.B)) == 2 * n

    def test_observable_n1(self):
        r = build_observable(CHParams([1.0], [1, 0]))
        np.testing.assert_array_equal(r.A, [[0, -1], [1, 0]])
        np.testing.assert_array_equal(r.B, [0, 1])
        np.testing.assert_array_equal(r.C, [0, 1])

    def test_adjoint_exact(self):
        rng = np.random.default_rng(2)
        for _ in range(100):
            p = CHParams(rng.uniform(0.1, 3, 3), rng.normal(size=6))
            c, o = build_controllable(p), build_observable(p)
            np.testing.assert_array_equal(o.A, c.A.T)
            np.testing.assert_array_equal(o.B, c.C)
            np.testing.assert_array_equal(o.C, c.B)

    def test_transfer_function_matches_system(self):
        rng = np.random.default_rng(3)
        Q = random_spd(rng, 3)
        sys = PHSystem(Q, rng.normal(size=6))
        p, _ = params_from_system(sys)
        s = np.array([0.3 + 1.1j, 2.0 - 0.5j, 0.1j + 4])
        ref = transfer_function(sys.realization(), s)
        np.testing.assert_allclose(transfer_function(build_controllable(p), s), ref, rtol=1e-9)
        np.testing.assert_allclose(transfer_function(build_observable(p), s), ref, rtol=1e-9)


class TestParamsFromSystem:
    def test_identity(self):
        p, S = params_from_system(PHSystem(np.eye(2), [1, 0]))
        np.testing.assert_allclose(p.d, [1])
        np.testing.assert_allclose(np.abs(p.v), [1, 0], atol=1e-15)

    def test_diag(self):
        sys = PHSystem(np.diag([4.0, 1.0]), [1, 0])
        p, S = params_from_system(sys)
        np.testing.assert_allclose(p.d, [2])
        np.testing.assert_allclose(S.T @ p.normal_form() @ S, sys.Q, atol=1e-14)
        np.testing.assert_allclose(np.linalg.solve(S, p.v), sys.B, atol=1e-15)

    def test_circuit(self):
        p, _ = params_from_system(CIRCUIT)
        np.testing.assert_allclose(p.d, np.ones(5))

    def test_round_trip(self):
        rng = np.random.default_rng(4)
        sys = PHSystem(random_spd(rng, 2), rng.normal(size=4))
        p, S = params_from_system(sys)
        back = system_from_params(p, S)
        np.testing.assert_allclose(back.Q, sys.Q, rtol=1e-10, atol=1e-12)
        np.testing.assert_allclose(back.B, sys.B, rtol=1e-10, atol=1e-12)


class TestMorphisms:
    def test_ctr_n1(self):
        p = CHParams([1.0], [1, 0])
        L = morphism_ctr(p, np.eye(2))
        # columns (J v, v) for A = J and a = (1, 0)
        np.testing.assert_allclose(L, np.column_stack([canonical_J(1) @ p.v, p.v]))
        assert np.max(morphism_ctr_residuals(p, np.eye(2), L)) < 1e-14

    def test_ctr_random(self):
        rng = np.random.default_rng(5)
        for n in range(1, 5):
            p = random_canonical_params(rng, n)
            S = williamson(random_spd(rng, n)).S
            L = morphism_ctr(p, S)
            assert np.max(morphism_ctr_residuals(p, S, L)) < 1e-8
            assert abs(np.linalg.det(L)) > 1e-8

    def test_ctr_resonant_singular(self):
        p = CHParams([1.0, 1.0], [1, 0.5, -0.3, 2])
        L = morphism_ctr(p, np.eye(4))
        assert abs(np.linalg.det(L)) < 1e-10
        assert np.max(morphism_ctr_residuals(p, np.eye(4), L)) < 1e-12

    def test_ctr_non_symplectic(self):
        with pytest.raises(DomainError):
            morphism_ctr(CHParams([1.0], [1, 0]), 2 * np.eye(2))

    def test_obs_identity(self):
        sys = PHSystem(np.eye(2), [1, 0])
        L = morphism_obs(sys, np.eye(2))
        assert np.max(morphism_obs_residuals(sys, np.eye(2), L)) < 1e-14

    def test_obs_canonical_and_composition(self):
        rng = np.random.default_rng(6)
        p = random_canonical_params(rng, 3)
        S = williamson(random_spd(rng, 3)).S
        sys = system_from_params(p, S)
        Lo = morphism_obs(sys, S)
        assert np.max(morphism_obs_residuals(sys, S, Lo)) < 1e-8
        Lc = morphism_ctr(p, S)
        # Lo Lc maps the controllable form onto the observable form
        M = Lo @ Lc
        c, o = build_controllable(p), build_observable(p)
        assert np.linalg.norm(M @ c.A - o.A @ M) <= 1e-8 * np.linalg.norm(M @ c.A)
        np.testing.assert_allclose(M @ c.B, o.B, rtol=1e-8, atol=1e-10)
        assert abs(np.linalg.det(M)) > 0

    def test_obs_circuit_singular(self):
        _, S = params_from_system(CIRCUIT)
        L = morphism_obs(CIRCUIT, S)
        assert np.max(morphism_obs_residuals(CIRCUIT, S, L)) < 1e-8
        assert np.linalg.matrix_rank(L) < 10

    def test_obs_inconsistent_factor(self):
        with pytest.raises(DomainError):
            morphism_obs(FK, np.eye(4))


class TestCanonicity:
    def test_params(self):
        assert is_canonical_params(CHParams([1.0, 2.0], [1, 1, 1, 1]))
        assert not is_canonical_params(CHParams([1.0, 1.0], [1, 1, 1, 1]))
        assert not is_canonical_params(CHParams([1.0, 2.0], [1, 0, 0, 0]))

    def test_det_n1(self):
        assert controllability_det(CHParams([1.0], [1, 0])) == pytest.approx(-1.0)
        assert controllability_det_formula(CHParams([1.0], [1, 0])) == pytest.approx(1.0)

    def test_det_resonant(self):
        rng = np.random.default_rng(7)
        assert abs(controllability_det(CHParams([1.0, 1.0], rng.normal(size=4)))) < 1e-12

    def test_det_value(self):
        # planes (v1, v3) and (v2, v4) have radii 1 and 1
        p = CHParams([1.0, 2.0], [1, 1, 0, 0])
        assert abs(controllability_det(p)) == pytest.approx(18.0)
        # v = (1, 0, 1, 0) leaves the second plane empty
        assert controllability_det(CHParams([1.0, 2.0], [1, 0, 1, 0])) == pytest.approx(0.0, abs=1e-12)

    def test_det_formula(self):
        rng = np.random.default_rng(8)
        for n in range(1, 5):
            p = random_canonical_params(rng, n)
            assert abs(controllability_det(p)) == pytest.approx(controllability_det_formula(p), rel=1e-6)

    def test_systems(self):
        assert is_canonical_system(FK)
        assert not is_canonical_system(CIRCUIT)
        assert not is_canonical_system(PHSystem(np.eye(2), [0, 0]))


class TestEquivalence:
    def test_reflexive(self):
        p = CHParams([1.0, 2.0], [1, 1, 1, 1])
        assert sys_equivalent(p, p)
        assert filter_equivalent_zero_state(p, p)

    def test_rotated(self):
        p = CHParams([1.0, 2.0], [1, 1, 1, 1])
        q = apply_group_action(GroupElement([0, 1], [np.pi / 3, np.pi / 7]), p)
        assert sys_equivalent(p, q)
        assert filter_equivalent_zero_state(p, q)

    def test_different_d(self):
        rng = np.random.default_rng(9)
        v = rng.normal(size=4)
        assert not sys_equivalent(CHParams([1.0, 2.0], v), CHParams([1.0, 3.0], v))

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            sys_equivalent(CHParams([1.0], [1, 0]), CHParams([1.0, 2.0], [1, 1, 1, 1]))
        with pytest.raises(DimensionError):
            filter_equivalent_zero_state(CHParams([1.0], [1, 0]), CHParams([1.0, 2.0], [1, 1, 1, 1]))

    def test_filter_n1(self):
        assert filter_equivalent_zero_state(CHParams([1.0], [1, 0]), CHParams([1.0], [0, 1]))
        assert markov_invariants(CHParams([1.0], [1, 0]))[0] == 1.0
        assert not filter_equivalent_zero_state(CHParams([1.0], [1, 0]), CHParams([2.0], [1, 0]))

    def test_filter_same_first_coefficient_different_d(self):
        # both have e_1 = c_1 = 4 but different transfer functions
        p, q = CHParams([1.0], [2, 0]), CHParams([2.0], [np.sqrt(2), 0])
        assert markov_invariants(p)[0] == pytest.approx(markov_invariants(q)[0])
        assert not filter_equivalent_zero_state(p, q)

    def test_markov_parameters(self):
        rng = np.random.default_rng(10)
        p = random_canonical_params(rng, 3)
        r = build_controllable(p)
        h = [r.C @ np.linalg.matrix_power(r.A, j) @ r.B for j in range(6)]
        e = markov_invariants(p)
        np.testing.assert_allclose(h[0::2], e[:3], rtol=1e-10)
        np.testing.assert_allclose(h[1::2], 0, atol=1e-12)

    def test_filter_noncanonical_padding(self):
        # an empty plane contributes nothing to the zero-state filter
        p = CHParams([1.0, 2.0], [1, 0, 1, 0])
        q = CHParams([1.0, 3.0], [1, 0, 1, 0])
        assert filter_equivalent_zero_state(p, q)
        assert not sys_equivalent(p, q)


class TestWitness:
    def test_identity(self):
        p = CHParams([1.0, 2.0], [1, 1, 1, 1])
        assert star_equivalent_witness(p, p, [0, 1], np.eye(4))

    def test_group_action(self):
        rng = np.random.default_rng(11)
        for n in (1, 2, 3, 4):
            p = random_canonical_params(rng, n)
            g = GroupElement.random(n, rng)
            sigma, A = group_witness(g)
            assert star_equivalent_witness(p, apply_group_action(g, p), sigma, A)
            assert star_equivalent_witness(p, apply_group_action(g, p), g.perm_matrix(), A)

    def test_unrelated(self):
        rng = np.random.default_rng(12)
        p, q = random_canonical_params(rng, 2), random_canonical_params(rng, 2)
        assert not star_equivalent_witness(p, q, [0, 1], np.eye(4))

    def test_singular(self):
        p = CHParams([1.0], [1, 0])
        with pytest.raises(DomainError):
            star_equivalent_witness(p, p, [0], np.zeros((2, 2)))


class TestGroupAction:
    def test_identity(self):
        p = CHParams([1.0, 2.0], [1, 2, 3, 4])
        q = apply_group_action(GroupElement.identity(2), p)
        np.testing.assert_array_equal(q.d, p.d)
        np.testing.assert_array_equal(q.v, p.v)

    def test_quarter_turn(self):
        q = apply_group_action(GroupElement([0], [np.pi / 2]), CHParams([1.0], [1, 0]))
        np.testing.assert_allclose(q.v, [0, 1], atol=1e-15)

    def test_composition(self):
        rng = np.random.default_rng(13)
        for _ in range(50):
            n = int(rng.integers(1, 5))
            p = CHParams(rng.uniform(0.5, 2, n), rng.normal(size=2 * n))
            g1, g2 = GroupElement.random(n, rng), GroupElement.random(n, rng)
            lhs = apply_group_action(g1 * g2, p)
            rhs = apply_group_action(g1, apply_group_action(g2, p))
            np.testing.assert_array_equal(lhs.d, rhs.d)
            np.testing.assert_allclose(lhs.v, rhs.v, atol=1e-13)


class TestCoords:
    def test_sorted(self):
        c = canonical_coords(CHParams([1.0, 2.0], [1, 1, 1, 1]))
        np.testing.assert_array_equal(c.d_up, [1, 2])
        np.testing.assert_array_equal(c.R, [2, 2])

    def test_swapped(self):
        c = canonical_coords(CHParams([2.0, 1.0], [1, 2, 3, 4]))
        np.testing.assert_array_equal(c.d_up, [1, 2])
        np.testing.assert_array_equal(c.R, [20, 10])

    def test_precondition(self):
        with pytest.raises(PreconditionError):
            canonical_coords(CHParams([1.0, 1.0], [1, 1, 1, 1]))

    def test_orbit_invariance(self):
        rng = np.random.default_rng(14)
        for _ in range(100):
            n = int(rng.integers(1, 5))
            p = random_canonical_params(rng, n)
            c1 = canonical_coords(p)
            c2 = canonical_coords(apply_group_action(GroupElement.random(n, rng), p))
            np.testing.assert_array_equal(c1.d_up, c2.d_up)
            np.testing.assert_allclose(c1.R, c2.R, rtol=1e-12)

    def test_from_coords(self):
        p = params_from_coords(CanonicalCoords([1.0, 2.0], [2.0, 2.0]))
        np.testing.assert_array_equal(p.d, [1, 2])
        np.testing.assert_allclose(p.v, [np.sqrt(2), np.sqrt(2), 0, 0])

    def test_round_trip(self):
        rng = np.random.default_rng(15)
        for _ in range(100):
            n = int(rng.integers(1, 6))
            c = CanonicalCoords(np.cumsum(rng.uniform(0.1, 1, n)), rng.uniform(0.1, 5, n))
            back = canonical_coords(params_from_coords(c))
            np.testing.assert_array_equal(back.d_up, c.d_up)
            np.testing.assert_allclose(back.R, c.R, rtol=4 * np.finfo(float).eps)

    def test_representative_filter(self):
        rng = np.random.default_rng(16)
        for n in (1, 2, 3):
            p = random_canonical_params(rng, n)
            assert filter_equivalent_zero_state(params_from_coords(canonical_coords(p)), p)


class TestLifting:
    def test_O_square(self):
        np.testing.assert_array_equal(build_O(2, 2).O, np.eye(4))

    def test_O_n1_m2(self):
        O = build_O(1, 2).O
        # old order (q1, p1, q1', p1') -> new order (q1, q1', p1, p1')
        np.testing.assert_array_equal(O @ np.array([1.0, 2.0, 3.0, 4.0]), [1, 3, 2, 4])

    @pytest.mark.parametrize("n,m", [(1, 1), (1, 2), (2, 3), (2, 5), (3, 4), (4, 7)])
    def test_O_identities(self, n, m):
        O = build_O(n, m).O
        k = m - n
        Jb = np.zeros((2 * m, 2 * m))
        Jb[: 2 * n, : 2 * n] = canonical_J(n)
        if k:
            Jb[2 * n :, 2 * n :] = canonical_J(k)
        np.testing.assert_array_equal(O @ Jb @ O.T, canonical_J(m))
        np.testing.assert_array_equal(O @ O.T, np.eye(2 * m))

    def test_O_domain(self):
        with pytest.raises(DomainError):
            build_O(3, 2)

    def test_embed_same_dim(self):
        sys = PHSystem(np.diag([4.0, 1.0]), [1, 0])
        lifted, _ = embed_system(sys, 1)
        np.testing.assert_array_equal(lifted.Q, sys.Q)
        np.testing.assert_array_equal(lifted.B, sys.B)

    def test_embed_morphism(self):
        rng = np.random.default_rng(17)
        for n, m in [(1, 2), (2, 4), (3, 3)]:
            sys = PHSystem(random_spd(rng, n), rng.normal(size=2 * n))
            lifted, emb = embed_system(sys, m)
            assert np.max(embedding_residuals(sys, lifted, emb)) < 1e-10
            assert np.linalg.eigvalsh(lifted.Q)[0] > 0

    def test_extend(self):
        p = extend_params(CHParams([3.0], [1, 2]), 2)
        np.testing.assert_array_equal(p.d, [3, 1])
        np.testing.assert_array_equal(p.v, [1, 0, 2, 0])

    def test_extend_same(self):
        p = CHParams([3.0, 1.0], [1, 2, 3, 4])
        q = extend_params(p, 2)
        np.testing.assert_array_equal(q.v, p.v)
        np.testing.assert_array_equal(q.d, p.d)

    def test_extend_not_canonical(self):
        rng = np.random.default_rng(18)
        for m in (3, 5):
            assert not is_canonical_params(extend_params(random_canonical_params(rng, 2), m))

    def test_extend_domain(self):
        with pytest.raises(DomainError):
            extend_params(CHParams([1.0, 2.0], [1, 1, 1, 1]), 1)

    def test_embedded_system_is_symplectic_frame(self):
        # the Williamson factor of the lifted system stays symplectic
        rng = np.random.default_rng(19)
        lifted, _ = embed_system(PHSystem(random_spd(rng, 2), rng.normal(size=4)), 3)
        assert is_symplectic(williamson(lifted.Q).S, 1e-9)
