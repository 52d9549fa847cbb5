"""Partial particle-hole transformation on bipartite, uniform-U lattices.

Up-spin operators are traded for hole operators with a staggered phase while
down-spin operators stay put, which complements the up occupation mask and
flips the sign of the interaction, shifting every energy by U * N_down.  On
basis states the transformation is a signed permutation: writing the filled
up band as d+_0 d+_1 ... d+_{L-1} |0>, annihilating the occupied sites of a
configuration X from it yields the sign

    sign(X) = prod_{x in X} (-1)^x * (-1)^eps(x)

up to a sector-wide constant that conjugation never sees.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .fockspace import FockState, SectorBasis, enumerate_sector
from .lattice import LatticeSpec
from .operators import build_hubbard, build_pseudospin_ops, build_spin_ops
from .spectra import SectorSpectrum, _round_casimir


@dataclass(frozen=True)
class PphMap:
    """Signed bijection between a sector and its particle-hole image."""

    source_spec: LatticeSpec
    target_spec: LatticeSpec
    source_sector: tuple[int, int]
    target_sector: tuple[int, int]
    energy_shift: float
    matrix: sp.csr_matrix  # rows: target basis, cols: source basis, entries +-1

    @property
    def source_basis(self) -> SectorBasis:
        return enumerate_sector(self.source_spec.n_sites, *self.source_sector)

    @property
    def target_basis(self) -> SectorBasis:
        return enumerate_sector(self.target_spec.n_sites, *self.target_sector)


def build_pph(spec: LatticeSpec, sector: tuple[int, int]) -> PphMap:
    """Construct the transformation for one sector.

    Requires a bipartition and a uniform interaction; the target lattice is
    the same graph with U negated, the target sector is
    (|sites| - N_up, N_down), and the recorded shift is U * N_down.
    """
    if spec.bipartition is None:
        raise ValueError("partial particle-hole transformation needs a bipartite lattice")
    u = spec.uniform_interaction()
    if u is None:
        raise ValueError("partial particle-hole transformation needs a uniform interaction")
    n = spec.n_sites
    n_up, n_down = sector
    source = enumerate_sector(n, n_up, n_down)
    target = enumerate_sector(n, n - n_up, n_down)
    eps = spec.bipartition
    full = (1 << n) - 1
    rows = np.empty(source.dim, dtype=np.int64)
    cols = np.arange(source.dim, dtype=np.int64)
    vals = np.empty(source.dim, dtype=float)
    for j, state in enumerate(source.states):
        parity = 0
        mask = state.up_mask
        x = 0
        while mask:
            if mask & 1:
                parity ^= (x & 1) ^ int(eps[x])
            mask >>= 1
            x += 1
        image = FockState(state.up_mask ^ full, state.down_mask)
        rows[j] = target.index[image]
        vals[j] = -1.0 if parity else 1.0
    matrix = sp.coo_matrix((vals, (rows, cols)), shape=(target.dim, source.dim)).tocsr()
    target_spec = LatticeSpec(
        n_sites=n,
        hopping=spec.hopping,
        interactions=-spec.interactions,
        bipartition=spec.bipartition,
    )
    return PphMap(
        source_spec=spec,
        target_spec=target_spec,
        source_sector=(n_up, n_down),
        target_sector=(n - n_up, n_down),
        energy_shift=u * n_down,
        matrix=matrix,
    )


@dataclass(frozen=True)
class CorrespondenceReport:
    max_entry_deviation: float
    max_spectral_deviation: float
    first_differing_level: int | None
    entrywise_ok: bool
    spectral_ok: bool

    def to_dict(self) -> dict:
        return {
            "max_entry_deviation": self.max_entry_deviation,
            "max_spectral_deviation": self.max_spectral_deviation,
            "first_differing_level": self.first_differing_level,
            "entrywise_ok": self.entrywise_ok,
            "spectral_ok": self.spectral_ok,
        }


def verify_spectral_correspondence(
    pmap: PphMap,
    entry_tol: float = 1e-12,
    spectral_tol: float = 1e-9,
) -> CorrespondenceReport:
    """Check W H_source W^T = H_target + shift and the spectral multiset map.

    spectrum(source) = spectrum(target) + U * N_down, so target eigenvalues
    are compared against source eigenvalues minus the recorded shift.
    """
    h_s = build_hubbard(pmap.source_spec, pmap.source_basis)
    h_t = build_hubbard(pmap.target_spec, pmap.target_basis)
    w = pmap.matrix
    conj = (w @ h_s.matrix @ w.T).tocsr()
    shifted = h_t.matrix + pmap.energy_shift * sp.identity(h_t.shape[0], format="csr")
    diff = (conj - shifted).tocsr()
    max_entry = float(np.abs(diff.data).max()) if diff.nnz else 0.0
    ev_s = np.linalg.eigvalsh(h_s.toarray())
    ev_t = np.linalg.eigvalsh(h_t.toarray())
    deltas = np.abs(np.sort(ev_s - pmap.energy_shift) - np.sort(ev_t))
    max_spectral = float(deltas.max()) if deltas.size else 0.0
    first = None
    for k, d in enumerate(deltas):
        if d > spectral_tol:
            first = k
            break
    return CorrespondenceReport(
        max_entry_deviation=max_entry,
        max_spectral_deviation=max_spectral,
        first_differing_level=first,
        entrywise_ok=max_entry < entry_tol,
        spectral_ok=max_spectral < spectral_tol,
    )


@dataclass(frozen=True)
class LabelSwapReport:
    matches: tuple[dict, ...]
    mismatches: tuple[dict, ...]
    all_swapped: bool

    def to_dict(self) -> dict:
        return {
            "levels_checked": len(self.matches) + len(self.mismatches),
            "mismatches": [dict(m) for m in self.mismatches],
            "all_swapped": self.all_swapped,
            "levels": [dict(m) for m in self.matches],
        }


def verify_label_swap(
    pmap: PphMap,
    source_spectrum: SectorSpectrum,
    target_spectrum: SectorSpectrum,
    label_tol: float = 1e-6,
) -> LabelSwapReport:
    """Push every labeled source eigenvector through the map and check s <-> j.

    The image W v is evaluated against the target Casimirs, so degeneracies
    cannot scramble the matching; m maps to -m_j and m_j to -m.
    """
    if source_spectrum.sector != pmap.source_sector:
        raise ValueError("source spectrum does not match the map's source sector")
    if target_spectrum.sector != pmap.target_sector:
        raise ValueError("target spectrum does not match the map's target sector")
    s2_t = build_spin_ops(pmap.target_basis)["s_squared"].matrix
    j2_t = build_pseudospin_ops(pmap.target_spec, pmap.target_basis)["j_squared"].matrix
    w = pmap.matrix
    matches = []
    mismatches = []
    for k, rec in enumerate(source_spectrum.records):
        v = w @ source_spectrum.eigensystem.vectors[:, k]
        lam_s = float(v @ (s2_t @ v))
        lam_j = float(v @ (j2_t @ v))
        s_t, _ = _round_casimir(lam_s, "spin", label_tol, k)
        j_t, _ = _round_casimir(lam_j, "pseudospin", label_tol, k)
        entry = {
            "level": k,
            "energy_source": rec.energy,
            "s_source": rec.s,
            "j_source": rec.j,
            "s_target": s_t,
            "j_target": j_t,
        }
        if rec.j is not None and abs(s_t - rec.j) < 1e-9 and abs(j_t - rec.s) < 1e-9:
            matches.append(entry)
        else:
            mismatches.append(entry)
    return LabelSwapReport(
        matches=tuple(matches),
        mismatches=tuple(mismatches),
        all_swapped=len(mismatches) == 0,
    )
