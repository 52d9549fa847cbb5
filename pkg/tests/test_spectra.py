import numpy as np
import pytest
import scipy.sparse as sp

from liebtowers.fockspace import enumerate_sector
from liebtowers.lattice import build_lattice, generate_lieb_chain, random_connected_spec
from liebtowers.operators import OperatorMatrix, build_hubbard, build_pseudospin_ops, build_spin_ops
from liebtowers import spectra


def two_site(u, t=1.0):
    return build_lattice(2, [(0, 1, -t)], [u, u], bipartition=[0, 1])


def chain(n, u, t=1.0):
    bonds = [(i, i + 1, -t) for i in range(n - 1)]
    return build_lattice(n, bonds, [u] * n, bipartition=[i % 2 for i in range(n)])


def test_two_site_sector_eigenvalues():
    u, t = -4.0, 1.0
    spec = two_site(u, t)
    basis = enumerate_sector(2, 1, 1)
    eig = spectra.diagonalize(build_hubbard(spec, basis))
    root = 0.5 * np.sqrt(u * u + 16 * t * t)
    expected = sorted([u / 2 - root, 0.0, u, u / 2 + root])
    assert np.allclose(eig.energies, expected, atol=1e-12)


def test_two_site_attractive_ground_value():
    spec = two_site(-4.0)
    eig = spectra.diagonalize(build_hubbard(spec, enumerate_sector(2, 1, 1)))
    assert abs(eig.energies[0] - (-2.0 - 2.0 * np.sqrt(2.0))) < 1e-10


def test_diagonalize_diagonal_matrix():
    diag = sp.diags([3.0, -1.0, 2.0], format="csr")
    op = OperatorMatrix(matrix=diag, basis_ref="test", symmetric=True)
    eig = spectra.diagonalize(op)
    assert np.allclose(eig.energies, [-1.0, 2.0, 3.0])


def test_diagonalize_rejects_nonsymmetric():
    m = sp.csr_matrix(np.array([[0.0, 1.0], [0.0, 0.0]]))
    op = OperatorMatrix(matrix=m, basis_ref="test", symmetric=False)
    with pytest.raises(spectra.DiagonalizationError):
        spectra.diagonalize(op)


def test_iterative_path_matches_dense():
    spec = chain(4, -2.0)
    basis = enumerate_sector(4, 2, 2)
    h = build_hubbard(spec, basis)
    dense = spectra.diagonalize(h)
    partial = spectra.diagonalize(h, dense_cap=10, k_lowest=4)
    assert partial.partial
    assert np.allclose(partial.energies, dense.energies[:4], atol=1e-8)


def test_two_site_full_quantum_number_table():
    spec = two_site(-4.0)
    scan = spectra.scan_sectors(spec)
    table = {}
    for sec in scan:
        for r in scan[sec].records:
            table.setdefault((sec, round(r.energy, 9)), []).append((r.s, r.j, r.m_j))
    # vacuum
    assert table[((0, 0), 0.0)] == [(0.0, 1.0, -1.0)]
    # N_e = 1: E = -t, +t with s = j = 1/2 and m_j = -1/2
    for sec in [(1, 0), (0, 1)]:
        assert table[(sec, -1.0)] == [(0.5, 0.5, -0.5)]
        assert table[(sec, 1.0)] == [(0.5, 0.5, -0.5)]
    # N_e = 2 block
    root = 2.0 * np.sqrt(2.0)
    assert table[((1, 1), round(-2 - root, 9))] == [(0.0, 0.0, 0.0)]
    assert table[((1, 1), -4.0)] == [(0.0, 1.0, 0.0)]  # eta state at E = U
    assert table[((1, 1), 0.0)] == [(1.0, 0.0, 0.0)]
    assert table[((2, 0), 0.0)] == [(1.0, 0.0, 0.0)]
    assert table[((0, 2), 0.0)] == [(1.0, 0.0, 0.0)]
    # N_e = 3: E = U -+ t
    for sec in [(2, 1), (1, 2)]:
        assert table[(sec, -5.0)] == [(0.5, 0.5, 0.5)]
        assert table[(sec, -3.0)] == [(0.5, 0.5, 0.5)]
    # N_e = 4 at 2U
    assert table[((2, 2), -8.0)] == [(0.0, 1.0, 1.0)]


def test_labels_against_casimir_action_oracle():
    # Independent check: after resolution each eigenvector must satisfy
    # S^2 v = s(s+1) v and J^2 v = j(j+1) v directly.
    spec = chain(4, -2.0)
    for sec in [(2, 2), (2, 1), (1, 1)]:
        res = spectra.sector_spectrum(spec, *sec)
        basis = res.basis
        s2 = build_spin_ops(basis)["s_squared"].matrix
        j2 = build_pseudospin_ops(spec, basis)["j_squared"].matrix
        for k, rec in enumerate(res.records):
            v = res.eigensystem.vectors[:, k]
            assert np.linalg.norm(s2 @ v - rec.s * (rec.s + 1) * v) < 1e-6
            assert np.linalg.norm(j2 @ v - rec.j * (rec.j + 1) * v) < 1e-6


def test_degenerate_cluster_rotation_u_zero():
    # At U = 0 the triplet and the eta state are exactly degenerate at E = 0
    # in the (1,1) sector; labels must still split them.
    spec = two_site(0.0)
    res = spectra.sector_spectrum(spec, 1, 1)
    zero_labels = sorted((r.s, r.j) for r in res.records if abs(r.energy) < 1e-12)
    assert zero_labels == [(0.0, 1.0), (1.0, 0.0)]


def test_ground_state_report_two_site():
    rep = spectra.ground_state_report(two_site(-4.0), n_e=2)
    assert rep.unique and rep.s == 0.0 and rep.j == 0.0


def test_ground_state_random_attractive_five_sites():
    rng = np.random.default_rng(17)
    for _ in range(3):
        spec = random_connected_spec(rng, n_min=5, n_max=5, u_low=-3.0, u_high=-0.5)
        rep = spectra.ground_state_report(spec, n_e=4)
        assert rep.unique and rep.s == 0.0


@pytest.mark.parametrize("u", [1.0, 4.0])
def test_lieb_chain_ferrimagnetic_ground(u):
    lieb = generate_lieb_chain(2, -1.0, u)
    rep = spectra.ground_state_report(lieb, n_e=6)
    assert rep.s == 1.0
    assert rep.degeneracy == 3
    assert rep.multiplet_consistent


def test_spin_tower_two_site():
    spec = two_site(-4.0)
    records = spectra.all_records(spectra.scan_sectors(spec, n_e=2))
    tower = spectra.extract_tower(records, "spin", n_e=2)
    assert tower.entries[0] == (0.0, pytest.approx(-2 - 2 * np.sqrt(2)))
    assert tower.entries[1] == (1.0, pytest.approx(0.0))
    assert tower.strict


def test_pseudospin_tower_two_site():
    spec = two_site(-4.0)
    records = spectra.all_records(spectra.scan_sectors(spec, n_e=2))
    tower = spectra.extract_tower(records, "pseudospin", n_e=2)
    assert tower.entries[0] == (0.0, pytest.approx(-2 - 2 * np.sqrt(2)))
    assert tower.entries[1] == (1.0, pytest.approx(-4.0))
    assert tower.strict
    assert min(tower.gaps()) > 0


def test_tower_no_strict_claim_at_u_zero():
    spec = chain(4, 0.0)
    records = spectra.all_records(spectra.scan_sectors(spec, n_e=4))
    tower = spectra.extract_tower(records, "spin", n_e=4)
    assert len(tower.entries) >= 2  # computed, whatever strictness says


def test_tower_violation_bookkeeping():
    records = [
        spectra.SpectrumRecord(0.0, (1, 1), 0.0, 0.0, None, 0.0, 0, 0.0),
        spectra.SpectrumRecord(-1.0, (2, 0), 1.0, 1.0, None, 0.0, 0, 0.0),
    ]
    tower = spectra.extract_tower(records, "spin")
    assert not tower.strict
    assert tower.violations == ((0.0, 1.0),)


def test_shen_window_attractive_lieb_chain():
    # Attractive, N_e <= 2 min(|A|, |B|): ground pseudospin is minimal,
    # j = |N_e/2 - |sites|/2|.
    lieb = generate_lieb_chain(2, -1.0, -3.0)
    for n_e in (2, 4):
        rep = spectra.ground_state_report(lieb, n_e=n_e)
        assert rep.j == abs(n_e / 2 - 3.0)


def test_half_filled_repulsive_partial_spin_tower():
    for spec, s_min in [(generate_lieb_chain(2, -1.0, 4.0), 1.0), (chain(4, 3.0), 0.0)]:
        n_e = spec.n_sites
        records = spectra.all_records(spectra.scan_sectors(spec, n_e=n_e))
        tower = spectra.extract_tower(records, "spin", n_e=n_e)
        upper = [(v, e) for v, e in tower.entries if v >= s_min]
        for i in range(len(upper) - 1):
            assert upper[i][1] < upper[i + 1][1]


def test_spin_reflection_spectra_match():
    rng = np.random.default_rng(41)
    spec = random_connected_spec(rng, n_min=4, n_max=5)
    n = spec.n_sites
    e_ab = spectra.diagonalize(build_hubbard(spec, enumerate_sector(n, 2, 1))).energies
    e_ba = spectra.diagonalize(build_hubbard(spec, enumerate_sector(n, 1, 2))).energies
    assert np.allclose(e_ab, e_ba, atol=1e-9)


def test_label_parity_invariant():
    spec = chain(4, -1.5)
    for sec, res in spectra.scan_sectors(spec, n_e=3).items():
        for r in res.records:
            assert (2 * r.s) % 2 == sum(sec) % 2


def test_ground_report_fixed_sector():
    rep = spectra.ground_state_report(two_site(-4.0), sector=(0, 0))
    assert rep.energy == 0.0 and rep.degeneracy == 1


def test_thread_count_env_override(monkeypatch):
    monkeypatch.setenv(spectra.THREADS_ENV, "2")
    assert spectra.thread_count() == 2
    monkeypatch.setenv(spectra.THREADS_ENV, "not-a-number")
    assert spectra.thread_count() >= 1
    monkeypatch.delenv(spectra.THREADS_ENV)
    assert spectra.thread_count() >= 1
