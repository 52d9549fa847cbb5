import numpy as np
import pytest
import scipy.sparse as sp

from liebtowers.fockspace import enumerate_sector, spin_reflection_permutation
from liebtowers.lattice import build_lattice, generate_lieb_chain, random_connected_spec
from liebtowers.operators import (
    build_charge,
    build_hubbard,
    build_kinetic,
    build_projector,
    build_pseudospin_ops,
    build_spin_ops,
    commutator,
    max_abs,
    norm1,
)

TWO_SITE = build_lattice(2, [(0, 1, -1.0)], [-4.0, -4.0], bipartition=[0, 1])


def scaled_resid(c, a, b):
    return max_abs(c) / max(1.0, norm1(a) * norm1(b))


def test_two_site_singlet_eta_block():
    basis = enumerate_sector(2, 1, 1)
    h = build_hubbard(TWO_SITE, basis).toarray()
    # Rows/cols ordered (u1d1, u1d2, u2d1, u2d2); the double-occupancy
    # combination and the bond singlet span the s=0, j=0 block.
    psi_double = np.array([1.0, 0.0, 0.0, 1.0]) / np.sqrt(2)
    psi_bond = np.array([0.0, 1.0, 1.0, 0.0]) / np.sqrt(2)
    v = np.column_stack([psi_double, psi_bond])
    block = v.T @ h @ v
    assert np.allclose(block, [[-4.0, -2.0], [-2.0, 0.0]], atol=1e-14)


def test_atomic_limit_diagonal():
    spec = build_lattice(3, [], [-1.0, 2.0, 0.5])
    basis = enumerate_sector(3, 2, 1)
    h = build_hubbard(spec, basis)
    dense = h.toarray()
    assert np.array_equal(dense, np.diag(np.diag(dense)))
    for j, state in enumerate(basis.states):
        both = state.up_mask & state.down_mask
        expected = sum(spec.interactions[x] for x in range(3) if (both >> x) & 1)
        assert dense[j, j] == pytest.approx(expected)


def test_triangle_single_particle_spectrum():
    tri = build_lattice(3, [(0, 1, -1.0), (1, 2, -1.0), (0, 2, -1.0)], [0.0] * 3)
    basis = enumerate_sector(3, 1, 0)
    h = build_hubbard(tri, basis)
    evals = np.linalg.eigvalsh(h.toarray())
    # Oracle: eigenvalues of minus the triangle adjacency matrix.
    adj = np.array([[0, 1, 1], [1, 0, 1], [1, 1, 0]], dtype=float)
    assert np.allclose(evals, np.sort(np.linalg.eigvalsh(-adj)), atol=1e-12)


def test_single_spin_kinetic_and_charge():
    basis = enumerate_sector(2, 1, 0)
    k = build_kinetic(TWO_SITE, basis).toarray()
    assert np.array_equal(k, [[0.0, -1.0], [-1.0, 0.0]])
    ell = build_charge(0, basis).toarray()
    assert np.array_equal(ell, [[1.0, 0.0], [0.0, 0.0]])


def test_tensor_assembly_oracle():
    # H must equal K (x) I + I (x) K + sum_x U_x L_x (x) L_x entrywise: the
    # block ordering convention leaves no cross-spin signs.
    rng = np.random.default_rng(3)
    for _ in range(4):
        spec = random_connected_spec(rng, n_min=2, n_max=4)
        n = spec.n_sites
        for (a, b) in [(1, 1), (2, 1), (2, 2)]:
            if a > n or b > n:
                continue
            basis = enumerate_sector(n, a, b)
            h = build_hubbard(spec, basis).toarray()
            up = enumerate_sector(n, a, 0)
            down = enumerate_sector(n, b, 0)
            k_up = build_kinetic(spec, up).toarray()
            k_down = build_kinetic(spec, down).toarray()
            built = np.kron(k_up, np.eye(down.dim)) + np.kron(np.eye(up.dim), k_down)
            for x in range(n):
                l_up = build_charge(x, up).toarray()
                l_down = build_charge(x, down).toarray()
                built += spec.interactions[x] * np.kron(l_up, l_down)
            assert np.abs(h - built).max() < 1e-13


def test_hubbard_exactly_symmetric():
    rng = np.random.default_rng(5)
    for _ in range(5):
        spec = random_connected_spec(rng, n_min=3, n_max=5)
        basis = enumerate_sector(spec.n_sites, 2, 1)
        h = build_hubbard(spec, basis).matrix
        assert (h - h.T).count_nonzero() == 0


def test_spin_casimir_two_site():
    basis = enumerate_sector(2, 1, 1)
    s2 = build_spin_ops(basis)["s_squared"].toarray()
    assert np.allclose(np.sort(np.linalg.eigvalsh(s2)), [0.0, 0.0, 0.0, 2.0], atol=1e-12)


def test_spin_raise_fully_polarized_is_zero():
    basis = enumerate_sector(3, 3, 0)
    ops = build_spin_ops(basis)
    assert ops["s_plus"].matrix.count_nonzero() == 0
    # S^2 = S_z(S_z + 1) on the highest-weight sector.
    expected = (1.5 * 2.5) * np.eye(basis.dim)
    assert np.allclose(ops["s_squared"].toarray(), expected, atol=1e-12)


def test_spin_ladder_commutator_all_sectors():
    rng = np.random.default_rng(11)
    spec = random_connected_spec(rng, n_min=4, n_max=4)
    n = spec.n_sites
    for a in range(n + 1):
        for b in range(n + 1):
            basis = enumerate_sector(n, a, b)
            ops = build_spin_ops(basis)
            term_minus_plus = sp.csr_matrix((basis.dim, basis.dim))
            if ops["s_plus"].shape[0] > 0:
                raised = enumerate_sector(n, a + 1, b - 1)
                term_minus_plus = build_spin_ops(raised)["s_minus"].matrix @ ops["s_plus"].matrix
            term_plus_minus = sp.csr_matrix((basis.dim, basis.dim))
            if ops["s_minus"].shape[0] > 0:
                lowered = enumerate_sector(n, a - 1, b + 1)
                term_plus_minus = build_spin_ops(lowered)["s_plus"].matrix @ ops["s_minus"].matrix
            m = (a - b) / 2.0
            comm = term_plus_minus - term_minus_plus - 2.0 * m * sp.identity(basis.dim, format="csr")
            assert max_abs(comm) < 1e-12


def test_pseudospin_requires_bipartition():
    spec = build_lattice(2, [(0, 1, 1.0)], [1.0, 1.0])
    with pytest.raises(ValueError):
        build_pseudospin_ops(spec, enumerate_sector(2, 1, 1))


def test_pseudospin_vacuum_two_site():
    vac = enumerate_sector(2, 0, 0)
    ops = build_pseudospin_ops(TWO_SITE, vac)
    assert np.allclose(ops["j_z"].toarray(), [[-1.0]])
    assert np.allclose(ops["j_squared"].toarray(), [[2.0]])


def test_pseudospin_raise_on_full_sector_is_zero():
    full = enumerate_sector(2, 2, 2)
    ops = build_pseudospin_ops(TWO_SITE, full)
    assert ops["j_plus"].matrix.count_nonzero() == 0


def test_pseudospin_eta_state_from_vacuum():
    vac = enumerate_sector(2, 0, 0)
    ops = build_pseudospin_ops(TWO_SITE, vac)
    target = enumerate_sector(2, 1, 1)
    eta = ops["j_plus"].toarray()[:, 0]
    # (double occupancy on site 1) - (double occupancy on site 2).
    expected = np.zeros(4)
    expected[target.index[(1, 1)]] = 1.0
    expected[target.index[(2, 2)]] = -1.0
    assert np.allclose(eta, expected)


def test_pseudospin_ladder_commutator_lieb_chain():
    lieb = generate_lieb_chain(2, -1.0, 3.0)
    n = lieb.n_sites
    for a in range(n + 1):
        for b in range(a, n + 1):
            basis = enumerate_sector(n, a, b)
            ops = build_pseudospin_ops(lieb, basis)
            t1 = sp.csr_matrix((basis.dim, basis.dim))
            if ops["j_plus"].shape[0] > 0:
                raised = enumerate_sector(n, a + 1, b + 1)
                t1 = build_pseudospin_ops(lieb, raised)["j_minus"].matrix @ ops["j_plus"].matrix
            t2 = sp.csr_matrix((basis.dim, basis.dim))
            if ops["j_minus"].shape[0] > 0:
                lowered = enumerate_sector(n, a - 1, b - 1)
                t2 = build_pseudospin_ops(lieb, lowered)["j_plus"].matrix @ ops["j_minus"].matrix
            mj = (a + b - n) / 2.0
            comm = t2 - t1 - 2.0 * mj * sp.identity(basis.dim, format="csr")
            assert max_abs(comm) < 1e-12


def test_hamiltonian_spin_commutators():
    rng = np.random.default_rng(23)
    for _ in range(4):
        spec = random_connected_spec(rng, n_min=3, n_max=5)
        n = spec.n_sites
        for (a, b) in [(1, 1), (2, 1)]:
            basis = enumerate_sector(n, a, b)
            h = build_hubbard(spec, basis)
            ops = build_spin_ops(basis)
            assert max_abs(commutator(h.matrix, ops["s_z"].matrix)) == 0.0
            if ops["s_plus"].shape[0] > 0:
                h_up = build_hubbard(spec, enumerate_sector(n, a + 1, b - 1))
                resid = h_up.matrix @ ops["s_plus"].matrix - ops["s_plus"].matrix @ h.matrix
                assert scaled_resid(resid, h.matrix, ops["s_plus"].matrix) < 1e-12
            s2 = ops["s_squared"]
            assert scaled_resid(commutator(h.matrix, s2.matrix), h.matrix, s2.matrix) < 1e-12


def test_hamiltonian_pseudospin_commutators_bipartite_uniform():
    lieb = generate_lieb_chain(2, -1.0, -2.5)
    u = -2.5
    n = lieb.n_sites
    for (a, b) in [(1, 1), (2, 2), (3, 2)]:
        basis = enumerate_sector(n, a, b)
        h = build_hubbard(lieb, basis)
        ops = build_pseudospin_ops(lieb, basis)
        assert max_abs(commutator(h.matrix, ops["j_z"].matrix)) == 0.0
        if ops["j_plus"].shape[0] > 0:
            h_up = build_hubbard(lieb, enumerate_sector(n, a + 1, b + 1))
            resid = (
                h_up.matrix @ ops["j_plus"].matrix
                - ops["j_plus"].matrix @ h.matrix
                - u * ops["j_plus"].matrix
            )
            assert scaled_resid(resid, h.matrix, ops["j_plus"].matrix) < 1e-12
        if ops["j_minus"].shape[0] > 0:
            h_dn = build_hubbard(lieb, enumerate_sector(n, a - 1, b - 1))
            resid = (
                h_dn.matrix @ ops["j_minus"].matrix
                - ops["j_minus"].matrix @ h.matrix
                + u * ops["j_minus"].matrix
            )
            assert scaled_resid(resid, h.matrix, ops["j_minus"].matrix) < 1e-12
        j2 = ops["j_squared"]
        assert scaled_resid(commutator(h.matrix, j2.matrix), h.matrix, j2.matrix) < 1e-12


def test_s2_j2_commute():
    lieb = generate_lieb_chain(2, -1.0, 2.0)
    basis = enumerate_sector(6, 2, 2)
    s2 = build_spin_ops(basis)["s_squared"].matrix
    j2 = build_pseudospin_ops(lieb, basis)["j_squared"].matrix
    assert scaled_resid(commutator(s2, j2), s2, j2) < 1e-12


def test_spin_reflection_symmetry_of_h():
    rng = np.random.default_rng(31)
    spec = random_connected_spec(rng, n_min=4, n_max=4)
    basis = enumerate_sector(4, 3, 1)
    target = enumerate_sector(4, 1, 3)
    h_ab = build_hubbard(spec, basis).toarray()
    h_ba = build_hubbard(spec, target).toarray()
    perm = spin_reflection_permutation(basis, target)
    p = np.zeros((target.dim, basis.dim))
    for k, pk in enumerate(perm):
        p[pk, k] = 1.0
    assert np.array_equal(p @ h_ab @ p.T, h_ba)


def test_projector_basics():
    basis = enumerate_sector(2, 1, 0)
    proj = build_projector((0,), basis).toarray()
    assert np.array_equal(proj, [[1.0, 0.0], [0.0, 0.0]])


def test_projector_idempotent_and_permutation_invariant():
    basis = enumerate_sector(4, 2, 0)
    p1 = build_projector((1, 3), basis).matrix
    p2 = build_projector((3, 1), basis).matrix
    assert (p1 - p2).count_nonzero() == 0
    assert ((p1 @ p1) - p1).count_nonzero() == 0


def test_projector_completeness():
    from itertools import combinations

    basis = enumerate_sector(4, 2, 0)
    total = sp.csr_matrix((basis.dim, basis.dim))
    for sites in combinations(range(4), 2):
        total = total + build_projector(sites, basis).matrix
    assert np.array_equal(total.toarray(), np.eye(basis.dim))


def test_projector_errors():
    basis = enumerate_sector(4, 2, 0)
    with pytest.raises(ValueError):
        build_projector((1, 1), basis)
    with pytest.raises(ValueError):
        build_projector((0, 1, 2), basis)
    with pytest.raises(ValueError):
        build_projector((0, 1), enumerate_sector(4, 1, 1))


def test_coordinate_text_export():
    basis = enumerate_sector(2, 1, 0)
    k = build_kinetic(TWO_SITE, basis)
    text = k.to_coordinate_text()
    assert text.splitlines() == ["1 2 -1", "2 1 -1"]


def test_dimension_mismatch_rejected():
    basis = enumerate_sector(3, 1, 1)
    with pytest.raises(ValueError):
        build_hubbard(TWO_SITE, basis)
    with pytest.raises(ValueError):
        build_charge(5, basis)


def test_hop_site_out_of_range():
    from liebtowers.fockspace import FockState, apply_hop

    with pytest.raises(ValueError):
        apply_hop(FockState(1, 0), 0, 99, "up")
