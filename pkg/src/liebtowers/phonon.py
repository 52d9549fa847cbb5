"""Truncated oscillator modes and electron-phonon Hamiltonians.

The coupling family is restricted to charge-linear terms G_x(q) = sum_i
g_ix q_i with an optional quartic anharmonicity and q-independent hopping.
Per-mode matrices are assembled from ladder operators in a buffered number
basis and then cropped, so every truncated operator equals the exact
projection P H P of its infinite counterpart; the variational spaces nest
and ground energies are monotone in the cutoff by construction.
"""

from __future__ import annotations

from dataclasses import dataclass
import numpy as np
import scipy.sparse as sp

from .fockspace import SectorBasis
from .lattice import LatticeSpec
from .mbgraph import CapExceededError
from .operators import OperatorMatrix, build_charge, build_kinetic

LADDER_BUFFER = 5
DEFAULT_N_MAX = 4
DEFAULT_PRODUCT_CAP = 500_000


@dataclass(frozen=True)
class PhononSpec:
    """Mode data: masses, frequencies, linear couplings, quartic terms, cutoff."""

    n_modes: int
    masses: np.ndarray
    frequencies: np.ndarray
    coupling: np.ndarray  # shape (n_modes, n_sites)
    quartic: np.ndarray
    n_max: int

    def __post_init__(self):
        nu = self.n_modes
        m = np.asarray(self.masses, dtype=float)
        w = np.asarray(self.frequencies, dtype=float)
        g = np.asarray(self.coupling, dtype=float)
        lam = np.asarray(self.quartic, dtype=float)
        if nu < 1:
            raise ValueError(f"need at least one mode, got {nu}")
        if m.shape != (nu,) or w.shape != (nu,) or lam.shape != (nu,):
            raise ValueError("masses, frequencies and quartic terms must have one entry per mode")
        if g.ndim != 2 or g.shape[0] != nu:
            raise ValueError(f"coupling must be (n_modes, n_sites), got {g.shape}")
        if not (np.all(np.isfinite(m)) and np.all(m > 0)):
            raise ValueError("masses must be positive and finite")
        if not (np.all(np.isfinite(w)) and np.all(w > 0)):
            raise ValueError("frequencies must be positive and finite")
        if not np.all(np.isfinite(g)):
            raise ValueError("non-finite coupling entry")
        if not (np.all(np.isfinite(lam)) and np.all(lam >= 0)):
            raise ValueError("quartic coefficients must be nonnegative")
        if self.n_max < 1:
            raise ValueError(f"n_max must be at least 1, got {self.n_max}")
        for arr in (m, w, g, lam):
            arr.setflags(write=False)
        object.__setattr__(self, "masses", m)
        object.__setattr__(self, "frequencies", w)
        object.__setattr__(self, "coupling", g)
        object.__setattr__(self, "quartic", lam)

    @property
    def n_sites(self) -> int:
        return self.coupling.shape[1]

    @property
    def levels(self) -> int:
        return self.n_max + 1

    def coupling_rank_full(self) -> bool:
        """Rank of dG/dq equals the site count (independence of the G_x)."""
        return int(np.linalg.matrix_rank(self.coupling)) == self.n_sites


def holstein(n_sites: int, g: float, omega: float, mass: float = 1.0, n_max: int = DEFAULT_N_MAX) -> PhononSpec:
    """One oscillator per site, coupled diagonally to the local charge."""
    return PhononSpec(
        n_modes=n_sites,
        masses=np.full(n_sites, float(mass)),
        frequencies=np.full(n_sites, float(omega)),
        coupling=np.eye(n_sites) * float(g),
        quartic=np.zeros(n_sites),
        n_max=n_max,
    )


def build_phonon_ops(spec: PhononSpec, mode: int) -> dict[str, np.ndarray]:
    """Truncated single-mode matrices in the number basis.

    q = (a + a+) / sqrt(2 m w) and p^2 come out as exact projections of the
    infinite-dimensional operators (assembled with a buffer, then cropped),
    so the harmonic combination p^2/2m + m w^2 q^2 / 2 is diagonal with
    entries (k + 1/2) w even at the top level.
    """
    if not (0 <= mode < spec.n_modes):
        raise ValueError(f"mode {mode} out of range")
    m = float(spec.masses[mode])
    w = float(spec.frequencies[mode])
    levels = spec.levels
    big = levels + LADDER_BUFFER
    a = np.diag(np.sqrt(np.arange(1, big, dtype=float)), k=1)
    adag = a.T
    c = 1.0 / np.sqrt(2.0 * m * w)
    q_big = c * (a + adag)
    b_big = np.sqrt(m * w / 2.0) * (adag - a)  # p = i * b
    p2_big = -(b_big @ b_big)
    q4_big = q_big @ q_big @ q_big @ q_big
    crop = slice(0, levels)
    q = q_big[crop, crop]
    p2 = p2_big[crop, crop]
    q4 = q4_big[crop, crop]
    n_op = np.diag(np.arange(levels, dtype=float))
    harmonic = p2 / (2.0 * m) + 0.5 * m * w * w * (q_big @ q_big)[crop, crop]
    return {"q": q, "p2": p2, "n": n_op, "q4": q4, "harmonic": harmonic}


def _embed(op: np.ndarray, mode: int, spec: PhononSpec) -> sp.csr_matrix:
    levels = spec.levels
    left = sp.identity(levels**mode, format="csr")
    right = sp.identity(levels ** (spec.n_modes - mode - 1), format="csr")
    return sp.kron(sp.kron(left, sp.csr_matrix(op)), right, format="csr")


def phonon_space_dim(spec: PhononSpec) -> int:
    return spec.levels**spec.n_modes


def build_ep_hamiltonian(
    lat: LatticeSpec,
    ph: PhononSpec,
    basis: SectorBasis,
    product_cap: int = DEFAULT_PRODUCT_CAP,
) -> OperatorMatrix:
    """H = K (x) I + sum_{x,i} g_ix n_x (x) q_i + I (x) (H_ph + V_quartic).

    The electronic part is hopping only (the on-site Hubbard term is not part
    of this model); phonons are coupled to the total local charge, which is
    what preserves the full spin algebra.
    """
    if ph.n_sites != lat.n_sites:
        raise ValueError(
            f"coupling matrix covers {ph.n_sites} sites but the lattice has {lat.n_sites}"
        )
    if basis.n_sites != lat.n_sites:
        raise ValueError("basis and lattice site counts differ")
    ph_dim = phonon_space_dim(ph)
    total = basis.dim * ph_dim
    if total > product_cap:
        raise CapExceededError(total, product_cap, "electron-phonon product space")
    kin = build_kinetic(lat, basis).matrix
    ident_el = sp.identity(basis.dim, format="csr")
    ident_ph = sp.identity(ph_dim, format="csr")
    h = sp.kron(kin, ident_ph, format="csr")
    mode_ops = [build_phonon_ops(ph, i) for i in range(ph.n_modes)]
    ph_part = sp.csr_matrix((ph_dim, ph_dim))
    for i, ops in enumerate(mode_ops):
        ph_part = ph_part + _embed(ops["harmonic"], i, ph)
        if ph.quartic[i] != 0.0:
            ph_part = ph_part + ph.quartic[i] * _embed(ops["q4"], i, ph)
    h = h + sp.kron(ident_el, ph_part, format="csr")
    for i, ops in enumerate(mode_ops):
        weights = ph.coupling[i]
        if not np.any(weights):
            continue
        charge = sp.csr_matrix((basis.dim, basis.dim))
        for x in range(lat.n_sites):
            if weights[x] != 0.0:
                charge = charge + weights[x] * build_charge(x, basis).matrix
        h = h + sp.kron(charge, _embed(ops["q"], i, ph), format="csr")
    h = h.tocsr()
    sym = (h + h.T) * 0.5
    if abs(h - h.T).max() > 1e-12:
        raise ValueError("electron-phonon assembly lost symmetry")
    return OperatorMatrix(
        matrix=sym,
        basis_ref=f"{basis.ref()} x phonons(modes={ph.n_modes},n_max={ph.n_max})",
        symmetric=True,
    )


def lift_electronic(op: OperatorMatrix, ph: PhononSpec) -> OperatorMatrix:
    """Tensor an electronic-sector operator with the phonon identity."""
    ident_ph = sp.identity(phonon_space_dim(ph), format="csr")
    return OperatorMatrix(
        matrix=sp.kron(op.matrix, ident_ph, format="csr"),
        basis_ref=f"{op.basis_ref} x phonons(modes={ph.n_modes},n_max={ph.n_max})",
        symmetric=op.symmetric,
    )


@dataclass(frozen=True)
class BoundednessReport:
    bounded: bool
    harmonic_lower_bound: float
    minimizing_q: tuple[float, ...]
    quartic_present: bool
    trace_abs_hopping: float
    note: str

    def to_dict(self) -> dict:
        return {
            "bounded": self.bounded,
            "harmonic_lower_bound": self.harmonic_lower_bound,
            "minimizing_q": list(self.minimizing_q),
            "quartic_present": self.quartic_present,
            "trace_abs_hopping": self.trace_abs_hopping,
            "note": self.note,
        }


def check_boundedness(lat: LatticeSpec, ph: PhononSpec) -> BoundednessReport:
    """Lower bound for -2 Tr|t| - 2 sum_x |G_x(q)| + harmonic + quartic terms.

    For charge-linear couplings each mode contributes at worst
    -c_i^2 / (2 m_i w_i^2) with c_i = 2 sum_x |g_ix|, attained at
    |q_i| = c_i / (m_i w_i^2); any positive frequency therefore bounds the
    expression from below (the printed criterion is read as 'this expression
    is bounded below over q').  A quartic term only tightens the bound.
    """
    if not np.all(ph.frequencies > 0):
        raise ValueError("non-positive frequency")
    tr_abs = float(np.sum(np.abs(np.linalg.eigvalsh(lat.hopping))))
    c = 2.0 * np.sum(np.abs(ph.coupling), axis=1)
    per_mode = c**2 / (2.0 * ph.masses * ph.frequencies**2)
    q_min = c / (ph.masses * ph.frequencies**2)
    bound = -2.0 * tr_abs - float(np.sum(per_mode))
    quartic_present = bool(np.any(ph.quartic > 0))
    note = (
        "criterion read as: the expression must be bounded below over q; "
        "bound shown is the harmonic estimate"
        + (" (quartic terms can only raise it)" if quartic_present else "")
    )
    return BoundednessReport(
        bounded=True,
        harmonic_lower_bound=bound,
        minimizing_q=tuple(float(v) for v in q_min),
        quartic_present=quartic_present,
        trace_abs_hopping=tr_abs,
        note=note,
    )


def to_json_dict(ph: PhononSpec) -> dict:
    return {
        "modes": ph.n_modes,
        "mass": [float(v) for v in ph.masses],
        "omega": [float(v) for v in ph.frequencies],
        "coupling": [[float(v) for v in row] for row in ph.coupling],
        "quartic": [float(v) for v in ph.quartic],
        "n_max": ph.n_max,
    }


def from_json_dict(doc: dict) -> PhononSpec:
    try:
        return PhononSpec(
            n_modes=int(doc["modes"]),
            masses=np.asarray(doc["mass"], dtype=float),
            frequencies=np.asarray(doc["omega"], dtype=float),
            coupling=np.asarray(doc["coupling"], dtype=float),
            quartic=np.asarray(doc["quartic"], dtype=float),
            n_max=int(doc["n_max"]),
        )
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed phonon document: {exc}") from exc
