"""Sparse operator assembly in fixed-number sectors.

Builds the Hubbard Hamiltonian, kinetic and charge operators, rank-one
configuration projectors, and the spin / pseudospin SU(2) algebras.  All
matrices are real; Hamiltonians and Casimirs are exactly symmetric by
construction (entries mirrored per unordered bond, never symmetrized after
the fact except for operator products, which are averaged with their
transpose under a strict asymmetry guard).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fockspace import FockState, SectorBasis, apply_hop, apply_single, enumerate_sector
from .jsonfmt import format_float
from .lattice import LatticeSpec

COMMUTATOR_TOL = 1e-12
PRODUCT_ASYMMETRY_TOL = 1e-12


@dataclass(frozen=True)
class OperatorMatrix:
    """Real sparse operator with provenance and an exact-symmetry flag."""

    matrix: sp.csr_matrix
    basis_ref: str
    symmetric: bool

    def __post_init__(self):
        m = self.matrix.tocsr()
        m.sum_duplicates()
        m.sort_indices()
        if m.nnz and not np.all(np.isfinite(m.data)):
            raise ValueError(f"non-finite entries in operator on {self.basis_ref}")
        if self.symmetric:
            if m.shape[0] != m.shape[1]:
                raise ValueError("symmetric flag on a non-square matrix")
            if (m - m.T).count_nonzero() != 0:
                raise ValueError(f"operator on {self.basis_ref} is not exactly symmetric")
        object.__setattr__(self, "matrix", m)

    @property
    def shape(self) -> tuple[int, int]:
        return self.matrix.shape

    def toarray(self) -> np.ndarray:
        return self.matrix.toarray()

    def to_coordinate_text(self) -> str:
        """Debug export: one '<row> <col> <value>' line per entry, 1-based."""
        coo = self.matrix.tocoo()
        order = np.lexsort((coo.col, coo.row))
        lines = [
            f"{coo.row[k] + 1} {coo.col[k] + 1} {format_float(coo.data[k])}"
            for k in order
        ]
        return "\n".join(lines) + ("\n" if lines else "")


def _csr(rows, cols, vals, shape) -> sp.csr_matrix:
    m = sp.coo_matrix((vals, (rows, cols)), shape=shape).tocsr()
    m.sum_duplicates()
    m.sort_indices()
    return m


def _check_dims(spec: LatticeSpec, basis: SectorBasis) -> None:
    if spec.n_sites != basis.n_sites:
        raise ValueError(
            f"lattice has {spec.n_sites} sites but basis is over {basis.n_sites}"
        )


def _hopping_entries(spec: LatticeSpec, basis: SectorBasis, rows, cols, vals) -> None:
    # Mirrored assembly: both directions of every unordered bond are visited in
    # the same loop, so each cell and its transpose accumulate identical sums.
    off_bonds = [(x, y, t) for x, y, t in spec.bonds() if x != y]
    for x, y, t in off_bonds:
        for sigma in ("up", "down"):
            for j, state in enumerate(basis.states):
                for a, b in ((x, y), (y, x)):
                    res = apply_hop(state, a, b, sigma)
                    if res is not None:
                        rows.append(basis.index[res.state])
                        cols.append(j)
                        vals.append(t * res.sign)
    diag_t = np.diag(spec.hopping)
    if np.any(diag_t != 0.0):
        for j, state in enumerate(basis.states):
            d = 0.0
            for x in range(spec.n_sites):
                if diag_t[x] != 0.0:
                    occ = ((state.up_mask >> x) & 1) + ((state.down_mask >> x) & 1)
                    d += diag_t[x] * occ
            if d != 0.0:
                rows.append(j)
                cols.append(j)
                vals.append(d)


def build_kinetic(spec: LatticeSpec, basis: SectorBasis) -> OperatorMatrix:
    """Hopping-only part of the Hamiltonian (includes diagonal t_xx terms)."""
    _check_dims(spec, basis)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    _hopping_entries(spec, basis, rows, cols, vals)
    return OperatorMatrix(
        matrix=_csr(rows, cols, vals, (basis.dim, basis.dim)),
        basis_ref=basis.ref(),
        symmetric=True,
    )


def build_hubbard(spec: LatticeSpec, basis: SectorBasis) -> OperatorMatrix:
    """H = sum_sigma sum_xy t_xy c+_x c_y + sum_x U_x n_up n_down."""
    _check_dims(spec, basis)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    _hopping_entries(spec, basis, rows, cols, vals)
    for j, state in enumerate(basis.states):
        both = state.up_mask & state.down_mask
        d = 0.0
        x = 0
        mask = both
        while mask:
            if mask & 1:
                d += spec.interactions[x]
            mask >>= 1
            x += 1
        if d != 0.0:
            rows.append(j)
            cols.append(j)
            vals.append(d)
    return OperatorMatrix(
        matrix=_csr(rows, cols, vals, (basis.dim, basis.dim)),
        basis_ref=basis.ref(),
        symmetric=True,
    )


def build_charge(x: int, basis: SectorBasis) -> OperatorMatrix:
    """Diagonal occupation operator n_x (both spin species summed).

    On a single-spin basis (n_down = 0) this is the 0/1 projector onto
    configurations containing x; on a two-spin sector it is the total charge.
    """
    if x < 0 or x >= basis.n_sites:
        raise ValueError(f"site {x} out of range for {basis.ref()}")
    diag = np.array(
        [((s.up_mask >> x) & 1) + ((s.down_mask >> x) & 1) for s in basis.states],
        dtype=float,
    )
    return OperatorMatrix(
        matrix=sp.diags(diag, format="csr"),
        basis_ref=basis.ref(),
        symmetric=True,
    )


def build_projector(sites: tuple[int, ...], basis: SectorBasis) -> OperatorMatrix:
    """Rank-one projector onto the configuration occupying ``sites``.

    Requires a single-spin basis whose particle number equals len(sites);
    the projector depends only on the set of sites, not their order.
    """
    sites = tuple(int(s) for s in sites)
    if len(set(sites)) != len(sites):
        raise ValueError(f"repeated site in projector tuple {sites}")
    if basis.n_down != 0:
        raise ValueError("projectors are defined on a single-spin basis (n_down = 0)")
    if len(sites) != basis.n_up:
        raise ValueError(
            f"projector over {len(sites)} sites does not match particle number {basis.n_up}"
        )
    for s in sites:
        if s < 0 or s >= basis.n_sites:
            raise ValueError(f"site {s} out of range for {basis.ref()}")
    mask = 0
    for s in sites:
        mask |= 1 << s
    k = basis.index[FockState(mask, 0)]
    return OperatorMatrix(
        matrix=_csr([k], [k], [1.0], (basis.dim, basis.dim)),
        basis_ref=basis.ref(),
        symmetric=True,
    )


def _sector_or_none(n_sites: int, n_up: int, n_down: int) -> SectorBasis | None:
    if 0 <= n_up <= n_sites and 0 <= n_down <= n_sites:
        return enumerate_sector(n_sites, n_up, n_down)
    return None


def _cross_sector(source: SectorBasis, target: SectorBasis | None, term_fn, ref_tag: str) -> OperatorMatrix:
    if target is None:
        # Annihilated sector: the operator is the zero map out of this basis.
        mat = sp.csr_matrix((0, source.dim))
        return OperatorMatrix(matrix=mat, basis_ref=f"{source.ref()}->(none)", symmetric=False)
    rows: list[int] = []
    cols: list[int] = []
    vals: list[float] = []
    for j, state in enumerate(source.states):
        for new_state, value in term_fn(state):
            rows.append(target.index[new_state])
            cols.append(j)
            vals.append(value)
    return OperatorMatrix(
        matrix=_csr(rows, cols, vals, (target.dim, source.dim)),
        basis_ref=f"{source.ref()}->{target.ref()}{ref_tag}",
        symmetric=False,
    )


def _spin_raise_terms(n_sites: int):
    def term_fn(state: FockState):
        for x in range(n_sites):
            a = apply_single(state, x, "down", dagger=False)
            if a is None:
                continue
            b = apply_single(a.state, x, "up", dagger=True)
            if b is None:
                continue
            yield b.state, float(a.sign * b.sign)

    return term_fn


def _spin_lower_terms(n_sites: int):
    def term_fn(state: FockState):
        for x in range(n_sites):
            a = apply_single(state, x, "up", dagger=False)
            if a is None:
                continue
            b = apply_single(a.state, x, "down", dagger=True)
            if b is None:
                continue
            yield b.state, float(a.sign * b.sign)

    return term_fn


def _pseudo_raise_terms(n_sites: int, eps: np.ndarray):
    # J+ = sum_x (-1)^eps(x) c+_{x,up} c+_{x,down}: creates an on-site pair.
    def term_fn(state: FockState):
        for x in range(n_sites):
            a = apply_single(state, x, "down", dagger=True)
            if a is None:
                continue
            b = apply_single(a.state, x, "up", dagger=True)
            if b is None:
                continue
            phase = -1.0 if eps[x] else 1.0
            yield b.state, phase * a.sign * b.sign

    return term_fn


def _pseudo_lower_terms(n_sites: int, eps: np.ndarray):
    def term_fn(state: FockState):
        for x in range(n_sites):
            a = apply_single(state, x, "up", dagger=False)
            if a is None:
                continue
            b = apply_single(a.state, x, "down", dagger=False)
            if b is None:
                continue
            phase = -1.0 if eps[x] else 1.0
            yield b.state, phase * a.sign * b.sign

    return term_fn


def _diag_operator(basis: SectorBasis, value: float) -> OperatorMatrix:
    return OperatorMatrix(
        matrix=sp.identity(basis.dim, format="csr") * value,
        basis_ref=basis.ref(),
        symmetric=True,
    )


def _casimir_from_ladder(plus: OperatorMatrix, minus_back: OperatorMatrix, basis: SectorBasis, z_value: float, name: str) -> OperatorMatrix:
    if plus.shape[0] == 0:
        prod = sp.csr_matrix((basis.dim, basis.dim))
    else:
        prod = (minus_back.matrix @ plus.matrix).tocsr()
    asym = prod - prod.T
    scale = max(1.0, abs(prod).max() if prod.nnz else 0.0)
    if asym.nnz and np.abs(asym.data).max() > PRODUCT_ASYMMETRY_TOL * scale:
        raise ValueError(f"{name} ladder product asymmetry exceeds tolerance")
    sym = (prod + prod.T) * 0.5
    total = sym + sp.identity(basis.dim, format="csr") * (z_value * z_value + z_value)
    return OperatorMatrix(matrix=total.tocsr(), basis_ref=basis.ref(), symmetric=True)


def build_spin_ops(basis: SectorBasis) -> dict[str, OperatorMatrix]:
    """Spin algebra in/out of a sector: S_z, S+, S-, and S^2 = S-S+ + S_z(S_z+1).

    S+ maps (N_up, N_down) to (N_up+1, N_down-1); an out-of-range target
    yields the zero map rather than an error.
    """
    n = basis.n_sites
    m = (basis.n_up - basis.n_down) / 2.0
    raised = _sector_or_none(n, basis.n_up + 1, basis.n_down - 1)
    lowered = _sector_or_none(n, basis.n_up - 1, basis.n_down + 1)
    s_plus = _cross_sector(basis, raised, _spin_raise_terms(n), "[S+]")
    s_minus = _cross_sector(basis, lowered, _spin_lower_terms(n), "[S-]")
    if raised is not None:
        minus_back = _cross_sector(raised, basis, _spin_lower_terms(n), "[S-]")
    else:
        minus_back = s_minus  # unused zero path
    s_squared = _casimir_from_ladder(s_plus, minus_back, basis, m, "spin")
    return {
        "s_z": _diag_operator(basis, m),
        "s_plus": s_plus,
        "s_minus": s_minus,
        "s_squared": s_squared,
    }


def build_pseudospin_ops(spec: LatticeSpec, basis: SectorBasis) -> dict[str, OperatorMatrix]:
    """Pseudospin algebra on a bipartite lattice: J_z, J+, J-, J^2.

    J+ maps (N_up, N_down) to (N_up+1, N_down+1) and carries the staggered
    phase (-1)^eps(x).  Refuses to build without a bipartition.
    """
    _check_dims(spec, basis)
    if spec.bipartition is None:
        raise ValueError("pseudospin operators require a lattice with a bipartition")
    eps = spec.bipartition
    n = basis.n_sites
    mj = (basis.n_up + basis.n_down - n) / 2.0
    raised = _sector_or_none(n, basis.n_up + 1, basis.n_down + 1)
    lowered = _sector_or_none(n, basis.n_up - 1, basis.n_down - 1)
    j_plus = _cross_sector(basis, raised, _pseudo_raise_terms(n, eps), "[J+]")
    j_minus = _cross_sector(basis, lowered, _pseudo_lower_terms(n, eps), "[J-]")
    if raised is not None:
        minus_back = _cross_sector(raised, basis, _pseudo_lower_terms(n, eps), "[J-]")
    else:
        minus_back = j_minus
    j_squared = _casimir_from_ladder(j_plus, minus_back, basis, mj, "pseudospin")
    return {
        "j_z": _diag_operator(basis, mj),
        "j_plus": j_plus,
        "j_minus": j_minus,
        "j_squared": j_squared,
    }


def commutator(a: sp.spmatrix, b: sp.spmatrix) -> sp.csr_matrix:
    return (a @ b - b @ a).tocsr()


def max_abs(m: sp.spmatrix) -> float:
    m = m.tocsr()
    return float(np.abs(m.data).max()) if m.nnz else 0.0


def norm1(m: sp.spmatrix) -> float:
    m = m.tocsr()
    if m.nnz == 0:
        return 0.0
    return float(abs(m).sum(axis=0).max())


def commutation_residual(a: sp.spmatrix, b: sp.spmatrix) -> float:
    """max |[A,B]| relative to the 1-norm scale of the product."""
    scale = max(1.0, norm1(a) * norm1(b))
    return max_abs(commutator(a, b)) / scale
