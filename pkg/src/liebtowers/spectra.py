"""Sector diagonalization and quantum-number resolution.

Eigenvalues are clustered into degenerate groups, each group is rotated to
diagonalize the spin Casimir (and, where defined, the pseudospin Casimir),
and every state receives labels (s, m, j, m_j).  Ground-state reports and
energy towers are computed from the labeled records.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .fockspace import SectorBasis, enumerate_sector
from .lattice import LatticeSpec
from .operators import OperatorMatrix, build_hubbard, build_pseudospin_ops, build_spin_ops, commutator, max_abs, norm1

DEFAULT_DENSE_CAP = 4096
DEFAULT_DEG_TOL = 1e-8
DEFAULT_LABEL_TOL = 1e-6
THREADS_ENV = "LIEB_TOWERS_THREADS"


class DiagonalizationError(RuntimeError):
    pass


class LabelingError(RuntimeError):
    pass


def thread_count() -> int:
    raw = os.environ.get(THREADS_ENV)
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            pass
    return min(8, os.cpu_count() or 1)


@dataclass
class EigenSystem:
    energies: np.ndarray
    vectors: np.ndarray
    partial: bool = False


@dataclass(frozen=True)
class SpectrumRecord:
    """One labeled eigenstate."""

    energy: float
    sector: tuple[int, int]
    s: float
    m: float
    j: float | None
    m_j: float
    degeneracy_cluster: int
    casimir_residual: float

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "sector": list(self.sector),
            "s": self.s,
            "m": self.m,
            "j": self.j,
            "m_j": self.m_j,
            "degeneracy_cluster": self.degeneracy_cluster,
            "casimir_residual": self.casimir_residual,
        }


@dataclass(frozen=True)
class TowerReport:
    """Minimal energy per quantum-number value with strictness bookkeeping."""

    quantum_number_kind: str
    entries: tuple[tuple[float, float], ...]
    violations: tuple[tuple[float, float], ...]
    strict: bool

    def gaps(self) -> list[float]:
        return [
            self.entries[i + 1][1] - self.entries[i][1]
            for i in range(len(self.entries) - 1)
        ]

    def to_dict(self) -> dict:
        return {
            "kind": self.quantum_number_kind,
            "entries": [{"value": v, "min_energy": e} for v, e in self.entries],
            "gaps": self.gaps(),
            "violations": [{"value": v, "next_value": w} for v, w in self.violations],
            "strict": self.strict,
        }


def diagonalize(op: OperatorMatrix, dense_cap: int = DEFAULT_DENSE_CAP, k_lowest: int = 6) -> EigenSystem:
    """Full dense eigensolve up to ``dense_cap``; lowest-k Lanczos above it.

    Eigenvalues come back ascending with orthonormal eigenvectors; residuals
    are verified and a violation raises instead of returning silently.
    """
    if not op.symmetric:
        raise DiagonalizationError(f"operator on {op.basis_ref} is not flagged symmetric")
    dim = op.shape[0]
    if dim <= dense_cap:
        dense = op.toarray()
        energies, vectors = scipy.linalg.eigh(dense)
        partial = False
    else:
        k = min(k_lowest, dim - 1)
        v0 = np.full(dim, 1.0 / np.sqrt(dim))
        try:
            energies, vectors = scipy.sparse.linalg.eigsh(op.matrix, k=k, which="SA", v0=v0)
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise DiagonalizationError(f"iterative solver did not converge on {op.basis_ref}") from exc
        order = np.argsort(energies)
        energies = energies[order]
        vectors = vectors[:, order]
        partial = True
    _verify_eigenpairs(op, energies, vectors)
    return EigenSystem(energies=energies, vectors=vectors, partial=partial)


def _verify_eigenpairs(op: OperatorMatrix, energies: np.ndarray, vectors: np.ndarray) -> None:
    gram = vectors.T @ vectors
    if np.abs(gram - np.eye(gram.shape[0])).max() > 1e-10:
        raise DiagonalizationError(f"eigenvectors not orthonormal on {op.basis_ref}")
    resid = op.matrix @ vectors - vectors * energies
    scale = 1.0 + np.abs(energies)
    worst = np.abs(resid).max(axis=0) / scale
    if worst.size and worst.max() > 1e-9:
        raise DiagonalizationError(
            f"eigenpair residual {worst.max():.3e} on {op.basis_ref}"
        )


def cluster_degeneracies(energies: np.ndarray, deg_tol: float = DEFAULT_DEG_TOL) -> list[list[int]]:
    """Group adjacent eigenvalues whose gap is below deg_tol * (1 + |E|)."""
    clusters: list[list[int]] = []
    for i, e in enumerate(energies):
        if clusters and e - energies[clusters[-1][-1]] < deg_tol * (1.0 + abs(e)):
            clusters[-1].append(i)
        else:
            clusters.append([i])
    return clusters


def _round_casimir(lam: float, kind: str, label_tol: float, cluster: int) -> tuple[float, float]:
    lam_c = max(lam, -0.25)
    raw = 0.5 * (-1.0 + np.sqrt(1.0 + 4.0 * lam_c))
    value = round(2.0 * raw) / 2.0
    if value < 0.0:
        value = 0.0
    resid = abs(lam - value * (value + 1.0))
    if resid > label_tol:
        raise LabelingError(
            f"{kind} Casimir eigenvalue {lam} is not near any v(v+1) "
            f"(cluster {cluster}, residual {resid:.3e})"
        )
    return value, resid


def _fix_gauge(vectors: np.ndarray) -> np.ndarray:
    for col in range(vectors.shape[1]):
        k = int(np.argmax(np.abs(vectors[:, col])))
        if vectors[k, col] < 0:
            vectors[:, col] = -vectors[:, col]
    return vectors


def _check_commutes(h: OperatorMatrix, casimir: OperatorMatrix, name: str) -> None:
    resid = max_abs(commutator(h.matrix, casimir.matrix))
    scale = max(1.0, norm1(h.matrix) * norm1(casimir.matrix))
    if resid > 1e-12 * scale:
        raise LabelingError(f"[H, {name}] residual {resid:.3e} exceeds tolerance; labels undefined")


def resolve_quantum_numbers(
    h: OperatorMatrix,
    s_squared: OperatorMatrix,
    j_squared: OperatorMatrix | None,
    eigensystem: EigenSystem,
    sector: tuple[int, int],
    n_sites: int,
    deg_tol: float = DEFAULT_DEG_TOL,
    label_tol: float = DEFAULT_LABEL_TOL,
) -> list[SpectrumRecord]:
    """Label eigenstates with (s, m, j, m_j) by rotating degenerate clusters.

    Within each energy cluster the eigenvectors are rotated to diagonalize
    S^2; within each resulting (E, s) block they are rotated again for J^2
    when a pseudospin Casimir is supplied.  Rotated vectors replace the ones
    in ``eigensystem`` (gauge: largest-magnitude component positive).
    """
    _check_commutes(h, s_squared, "S^2")
    if j_squared is not None:
        _check_commutes(h, j_squared, "J^2")
    n_up, n_down = sector
    m = (n_up - n_down) / 2.0
    m_j = (n_up + n_down - n_sites) / 2.0
    energies = eigensystem.energies
    vectors = eigensystem.vectors
    s2 = s_squared.matrix
    j2 = j_squared.matrix if j_squared is not None else None
    by_state: dict[int, SpectrumRecord] = {}

    for cid, idx in enumerate(cluster_degeneracies(energies, deg_tol)):
        block = vectors[:, idx]
        proj = block.T @ (s2 @ block)
        lam_s, rot = np.linalg.eigh(0.5 * (proj + proj.T))
        block = block @ rot
        s_vals = []
        for lam in lam_s:
            value, resid = _round_casimir(float(lam), "spin", label_tol, cid)
            s_vals.append((value, resid))
        # Group columns by the rounded s before resolving pseudospin.
        by_s: dict[float, list[int]] = {}
        for col, (value, _) in enumerate(s_vals):
            by_s.setdefault(value, []).append(col)
        j_vals: list[tuple[float | None, float]] = [(None, 0.0)] * len(idx)
        if j2 is not None:
            for value, cols in sorted(by_s.items()):
                sub = block[:, cols]
                projj = sub.T @ (j2 @ sub)
                lam_j, rotj = np.linalg.eigh(0.5 * (projj + projj.T))
                block[:, cols] = sub @ rotj
                for c, lam in zip(cols, lam_j):
                    jv, jr = _round_casimir(float(lam), "pseudospin", label_tol, cid)
                    j_vals[c] = (jv, jr)
        block = _fix_gauge(block)
        vectors[:, idx] = block
        for pos, col in enumerate(idx):
            s_value, s_resid = s_vals[pos]
            j_value, j_resid = j_vals[pos]
            _validate_labels(s_value, m, j_value, m_j, n_up + n_down, cid)
            by_state[col] = SpectrumRecord(
                energy=float(energies[col]),
                sector=sector,
                s=s_value,
                m=m,
                j=j_value,
                m_j=m_j,
                degeneracy_cluster=cid,
                casimir_residual=max(s_resid, j_resid),
            )
    return [by_state[k] for k in range(len(energies))]


def _validate_labels(s: float, m: float, j: float | None, m_j: float, n_e: int, cluster: int) -> None:
    if s + 1e-9 < abs(m):
        raise LabelingError(f"cluster {cluster}: s={s} below |m|={abs(m)}")
    if abs((2 * s) % 2 - n_e % 2) > 1e-9:
        raise LabelingError(f"cluster {cluster}: 2s={2 * s} has wrong parity for N_e={n_e}")
    if s > n_e / 2.0 + 1e-9:
        raise LabelingError(f"cluster {cluster}: s={s} exceeds N_e/2")
    if j is not None:
        if j + 1e-9 < abs(m_j):
            raise LabelingError(f"cluster {cluster}: j={j} below |m_j|={abs(m_j)}")
        if abs((j - abs(m_j)) % 1.0) > 1e-9:
            raise LabelingError(f"cluster {cluster}: j={j} not an integer step above |m_j|={abs(m_j)}")


@dataclass
class SectorSpectrum:
    sector: tuple[int, int]
    basis: SectorBasis
    eigensystem: EigenSystem
    records: list[SpectrumRecord]
    pseudospin_resolved: bool


def pseudospin_labels_valid(spec: LatticeSpec, allow_diagonal: bool = False) -> bool:
    """Whether j labels are meaningful: bipartition present, uniform U, and
    (unless overridden) no diagonal hopping."""
    if spec.bipartition is None:
        return False
    if spec.uniform_interaction() is None:
        return False
    if spec.has_diagonal_hopping and not allow_diagonal:
        return False
    return True


def sector_spectrum(
    spec: LatticeSpec,
    n_up: int,
    n_down: int,
    pseudospin: str | bool = "auto",
    dense_cap: int = DEFAULT_DENSE_CAP,
    deg_tol: float = DEFAULT_DEG_TOL,
    label_tol: float = DEFAULT_LABEL_TOL,
) -> SectorSpectrum:
    """Diagonalize one sector and label its states."""
    basis = enumerate_sector(spec.n_sites, n_up, n_down)
    h = build_hubbard(spec, basis)
    s2 = build_spin_ops(basis)["s_squared"]
    if pseudospin == "auto":
        use_j = pseudospin_labels_valid(spec)
    else:
        use_j = bool(pseudospin)
    j2 = build_pseudospin_ops(spec, basis)["j_squared"] if use_j else None
    eigensystem = diagonalize(h, dense_cap=dense_cap)
    records = resolve_quantum_numbers(
        h, s2, j2, eigensystem, (n_up, n_down), spec.n_sites,
        deg_tol=deg_tol, label_tol=label_tol,
    )
    return SectorSpectrum(
        sector=(n_up, n_down),
        basis=basis,
        eigensystem=eigensystem,
        records=records,
        pseudospin_resolved=use_j,
    )


def sectors_for(spec: LatticeSpec, n_e: int | None = None) -> list[tuple[int, int]]:
    n = spec.n_sites
    if n_e is None:
        return [(a, b) for a in range(n + 1) for b in range(n + 1)]
    if not (0 <= n_e <= 2 * n):
        raise ValueError(f"electron count {n_e} out of range for {n} sites")
    lo = max(0, n_e - n)
    hi = min(n, n_e)
    return [(a, n_e - a) for a in range(lo, hi + 1)]


def scan_sectors(
    spec: LatticeSpec,
    n_e: int | None = None,
    sectors: list[tuple[int, int]] | None = None,
    pseudospin: str | bool = "auto",
    dense_cap: int = DEFAULT_DENSE_CAP,
    deg_tol: float = DEFAULT_DEG_TOL,
) -> dict[tuple[int, int], SectorSpectrum]:
    """Diagonalize a family of sectors (threaded; deterministic assembly)."""
    if sectors is None:
        sectors = sectors_for(spec, n_e)
    sectors = sorted(sectors)
    workers = min(thread_count(), len(sectors)) or 1

    def job(sec):
        return sector_spectrum(
            spec, sec[0], sec[1], pseudospin=pseudospin,
            dense_cap=dense_cap, deg_tol=deg_tol,
        )

    if workers > 1 and len(sectors) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(job, sectors))
    else:
        results = [job(sec) for sec in sectors]
    return {sec: res for sec, res in zip(sectors, results)}


@dataclass(frozen=True)
class GroundStateReport:
    energy: float
    degeneracy: int
    s: float
    j: float | None
    unique: bool
    multiplet_consistent: bool
    sectors_scanned: tuple[tuple[int, int], ...]
    members: tuple[tuple[tuple[int, int], int], ...]

    def to_dict(self) -> dict:
        return {
            "energy": self.energy,
            "degeneracy": self.degeneracy,
            "s": self.s,
            "j": self.j,
            "unique": self.unique,
            "multiplet_consistent": self.multiplet_consistent,
            "sectors_scanned": [list(sec) for sec in self.sectors_scanned],
            "members": [
                {"sector": list(sec), "state": k} for sec, k in self.members
            ],
        }


def ground_state_report(
    spec: LatticeSpec,
    n_e: int | None = None,
    sector: tuple[int, int] | None = None,
    pseudospin: str | bool = "auto",
    dense_cap: int = DEFAULT_DENSE_CAP,
    deg_tol: float = DEFAULT_DEG_TOL,
    scan: dict[tuple[int, int], SectorSpectrum] | None = None,
) -> GroundStateReport:
    """Global ground-state data across the scanned sectors.

    Degeneracy counts every state (in any scanned sector) lying within the
    clustering tolerance of the global minimum; uniqueness means that count
    is one, and multiplet consistency means it matches 2s+1 for a single s.
    """
    if scan is None:
        secs = [sector] if sector is not None else None
        scan = scan_sectors(spec, n_e=n_e, sectors=secs, pseudospin=pseudospin, dense_cap=dense_cap, deg_tol=deg_tol)
    e0 = min(res.eigensystem.energies[0] for res in scan.values())
    tol = deg_tol * (1.0 + abs(e0))
    members = []
    s_values = set()
    j_values = set()
    for sec in sorted(scan):
        res = scan[sec]
        for k, e in enumerate(res.eigensystem.energies):
            if e - e0 <= tol:
                members.append((sec, k))
                rec = res.records[k]
                s_values.add(rec.s)
                if rec.j is not None:
                    j_values.add(rec.j)
            else:
                break
    degeneracy = len(members)
    s = min(s_values)
    j = min(j_values) if j_values else None
    single_s = len(s_values) == 1
    return GroundStateReport(
        energy=float(e0),
        degeneracy=degeneracy,
        s=s,
        j=j,
        unique=degeneracy == 1,
        multiplet_consistent=single_s and degeneracy == int(round(2 * s + 1)),
        sectors_scanned=tuple(sorted(scan)),
        members=tuple(members),
    )


def extract_tower(
    records: list[SpectrumRecord],
    kind: str,
    n_e: int | None = None,
    sector: tuple[int, int] | None = None,
) -> TowerReport:
    """Minimal energy per quantum-number value over the requested scope.

    ``kind`` is 'spin' or 'pseudospin'; scope filters are by fixed sector or
    fixed total electron number (pseudospin towers are meaningful only at
    fixed N_e, where the U-shift of J+ plays no role).
    """
    if kind not in ("spin", "pseudospin"):
        raise ValueError(f"unknown tower kind {kind!r}")
    minima: dict[float, float] = {}
    for rec in records:
        if sector is not None and rec.sector != sector:
            continue
        if n_e is not None and sum(rec.sector) != n_e:
            continue
        value = rec.s if kind == "spin" else rec.j
        if value is None:
            continue
        if value not in minima or rec.energy < minima[value]:
            minima[value] = rec.energy
    entries = tuple(sorted(minima.items()))
    violations = tuple(
        (entries[i][0], entries[i + 1][0])
        for i in range(len(entries) - 1)
        if entries[i + 1][1] <= entries[i][1]
    )
    return TowerReport(
        quantum_number_kind=kind,
        entries=entries,
        violations=violations,
        strict=len(violations) == 0,
    )


def all_records(scan: dict[tuple[int, int], SectorSpectrum]) -> list[SpectrumRecord]:
    out: list[SpectrumRecord] = []
    for sec in sorted(scan):
        out.extend(scan[sec].records)
    return out
