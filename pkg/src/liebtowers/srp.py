"""The m = 0 wavefunction as a matrix over up/down configurations.

In a sector with N up and N down electrons, the block ordering convention
of ``fockspace`` makes the coefficient vector a row-major flattening of a
d x d matrix Psi(X, Y), d = C(|sites|, N): rows index up configurations,
columns down configurations.  Spin reflection plus reality of H means the
transpose of a ground-state matrix is again a ground state, so a gauge can
be chosen in which Psi is symmetric (or, in the rare antisymmetric case,
i * Psi is Hermitian).  The positivity witness checks the consequences of
that structure for attractive interactions: replacing Psi by |Psi| does not
raise the energy, the trace of |Psi| is positive, and some diagonal element
survives.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .fockspace import SectorBasis
from .operators import OperatorMatrix

GAUGE_TOL = 1e-9


@dataclass(frozen=True)
class PsiMatrix:
    """Gauge-fixed wavefunction matrix with bookkeeping of the fix applied."""

    d: int
    matrix: np.ndarray
    gauge_phase_applied: complex
    hermiticity_residual: float
    symmetrized_from_degenerate: bool = False

    def self_adjoint(self) -> np.ndarray:
        """The self-adjoint representative (complex only in the i-gauge case)."""
        if self.gauge_phase_applied == 1j:
            return 1j * self.matrix
        return self.matrix

    def flatten(self) -> np.ndarray:
        return self.matrix.reshape(-1)


def reshape_to_matrix(vector: np.ndarray, basis: SectorBasis) -> PsiMatrix:
    """Reshape an m = 0 sector vector into its configuration matrix.

    For a unique ground state the raw matrix M satisfies M^T = c M with
    c = +1 or -1; c = +1 needs no gauge, c = -1 records the phase i whose
    application makes the matrix Hermitian.  A mixed-symmetry matrix can only
    come from a degenerate ground space; it is symmetrized within that space
    (the transpose is also a ground state) and flagged.
    """
    if basis.n_up != basis.n_down:
        raise ValueError(f"need an m = 0 sector, got {basis.ref()}")
    d = basis.dim_up
    v = np.asarray(vector, dtype=float)
    if v.shape != (basis.dim,):
        raise ValueError(f"vector length {v.shape} does not match {basis.ref()}")
    m = v.reshape(d, d)
    norm = np.linalg.norm(m)
    if norm == 0.0:
        raise ValueError("zero vector has no wavefunction matrix")
    m = m / norm
    asym = np.linalg.norm(m - m.T)
    sym = np.linalg.norm(m + m.T)
    degenerate = False
    if asym <= GAUGE_TOL:
        gauge = 1 + 0j
    elif sym <= GAUGE_TOL:
        gauge = 1j
    else:
        m = 0.5 * (m + m.T)
        m = m / np.linalg.norm(m)
        gauge = 1 + 0j
        degenerate = True
    a = (1j * m) if gauge == 1j else m
    resid = float(np.linalg.norm(a - a.conj().T))
    return PsiMatrix(
        d=d,
        matrix=m,
        gauge_phase_applied=gauge,
        hermiticity_residual=resid,
        symmetrized_from_degenerate=degenerate,
    )


def energy_of(
    psi: PsiMatrix,
    kinetic: OperatorMatrix,
    charges: list[OperatorMatrix],
    u_values: np.ndarray,
) -> float:
    """Energy functional of a configuration matrix.

    Evaluates [Tr(P^T K P) + Tr(P K P^T) - sum_x |U_x| Tr(P^T L_x P L_x)]
    / Tr(P^T P) for attractive couplings, cross-checked against the
    operator-action quadratic form assembled from the same pieces; for any
    repulsive U_x only the signed quadratic form applies (and is flagged).
    """
    p = psi.matrix
    d = psi.d
    k = kinetic.toarray()
    if k.shape != (d, d):
        raise ValueError(f"kinetic operator is {k.shape}, expected {(d, d)}")
    u = np.asarray(u_values, dtype=float)
    ells = [c.matrix.diagonal() for c in charges]
    for ell in ells:
        if ell.shape != (d,):
            raise ValueError("charge operators must be diagonal on the single-spin basis")
    denom = float(np.sum(p * p))
    # Operator-action form: <P, K P + P K + sum_x U_x L_x P L_x>_F.
    action = k @ p + p @ k
    for ell, ux in zip(ells, u):
        action += ux * (ell[:, None] * p * ell[None, :])
    quadratic = float(np.sum(p * action)) / denom
    if np.any(u > 0.0):
        warnings.warn(
            "repulsive couplings passed to the attractive-form energy; "
            "using the direct quadratic form",
            stacklevel=2,
        )
        return quadratic
    kin = float(np.trace(p.T @ k @ p) + np.trace(p @ k @ p.T))
    pot = 0.0
    for ell, ux in zip(ells, u):
        pot += abs(ux) * float(np.trace((p.T * ell[None, :]) @ (p * ell[None, :])))
    trace_form = (kin - pot) / denom
    if abs(trace_form - quadratic) > 1e-9 * (1.0 + abs(quadratic)):
        raise RuntimeError(
            f"energy cross-check failed: trace form {trace_form} vs quadratic {quadratic}"
        )
    return trace_form


def matrix_abs(psi: PsiMatrix) -> np.ndarray:
    """|Psi| = sqrt(Psi^2) via spectral decomposition with |eigenvalue| clamp."""
    a = psi.self_adjoint()
    lam, q = np.linalg.eigh(a)
    out = (q * np.abs(lam)[None, :]) @ q.conj().T
    if psi.gauge_phase_applied == 1:
        return out.real
    return out


@dataclass(frozen=True)
class WitnessReport:
    e0: float
    e_abs_psi: float
    trace_abs: float
    max_diag: float
    psd_min_eig: float
    pass_flags: dict

    def to_dict(self) -> dict:
        return {
            "e0": self.e0,
            "e_abs_psi": self.e_abs_psi,
            "trace_abs": self.trace_abs,
            "max_diag": self.max_diag,
            "psd_min_eig": self.psd_min_eig,
            "pass_flags": dict(self.pass_flags),
        }


def _rayleigh(h: OperatorMatrix, vec: np.ndarray) -> float:
    num = np.vdot(vec, h.matrix @ vec)
    den = np.vdot(vec, vec)
    return float((num / den).real)


def positivity_witness(psi: PsiMatrix, h: OperatorMatrix) -> WitnessReport:
    """Report the positivity consequences for a (candidate) ground matrix.

    ``h`` is the sector Hamiltonian over the flattened index.  Nothing is
    asserted here; out-of-hypothesis inputs simply produce failing flags.
    """
    d = psi.d
    if h.shape != (d * d, d * d):
        raise ValueError(f"Hamiltonian is {h.shape}, expected {(d * d, d * d)}")
    a = psi.self_adjoint()
    lam = np.linalg.eigvalsh(a)
    abs_a = matrix_abs(psi)
    e0 = _rayleigh(h, psi.flatten())
    e_abs = _rayleigh(h, abs_a.reshape(-1))
    trace_abs = float(np.trace(abs_a).real)
    max_diag = float(np.max(np.abs(np.diag(abs_a))))
    psd_min = float(lam.min())
    flags = {
        "energy_match": bool(abs(e_abs - e0) < 1e-8),
        "trace_positive": bool(trace_abs > 0.0),
        "diag_nonzero": bool(max_diag > 1e-10),
        "psi_already_psd": bool(psd_min >= -1e-10),
    }
    return WitnessReport(
        e0=e0,
        e_abs_psi=e_abs,
        trace_abs=trace_abs,
        max_diag=max_diag,
        psd_min_eig=psd_min,
        pass_flags=flags,
    )


def search_psd_representative(
    vectors: np.ndarray,
    basis: SectorBasis,
    h: OperatorMatrix,
    grid: int = 180,
) -> tuple[PsiMatrix | None, str]:
    """Scan a degenerate ground space for a PSD representative.

    Only the two-dimensional case is searched (a one-parameter family of
    symmetrized combinations); higher-dimensional ground spaces come back
    inconclusive.
    """
    n_vecs = vectors.shape[1]
    if n_vecs == 1:
        psi = reshape_to_matrix(vectors[:, 0], basis)
        rep = positivity_witness(psi, h)
        return (psi, "found") if rep.pass_flags["psi_already_psd"] else (None, "not found")
    if n_vecs != 2:
        return None, "inconclusive (ground space dimension > 2)"
    for k in range(grid):
        theta = np.pi * k / grid
        v = np.cos(theta) * vectors[:, 0] + np.sin(theta) * vectors[:, 1]
        try:
            psi = reshape_to_matrix(v, basis)
        except ValueError:
            continue
        rep = positivity_witness(psi, h)
        if rep.pass_flags["psi_already_psd"]:
            return psi, "found"
    return None, "not found on the search grid"
