"""Finite interaction graphs: hopping matrix, on-site couplings, bipartition.

A lattice here is nothing more than a finite set of sites with a real
symmetric hopping matrix t_xy (diagonal entries allowed) and one interaction
strength U_x per site.  Site indices are 0-based throughout the Python API;
the JSON file format and CLI output use 1-based indices.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass

import numpy as np


class LatticeFormatError(ValueError):
    """Raised when a lattice description violates the file or type contract."""


@dataclass(frozen=True)
class LatticeSpec:
    """Immutable graph data: sites, hopping t_xy, interactions U_x.

    ``bipartition`` is an optional 0/1 array; when present, off-diagonal
    hopping between equal colors must vanish.
    """

    n_sites: int
    hopping: np.ndarray
    interactions: np.ndarray
    bipartition: np.ndarray | None = None

    def __post_init__(self):
        n = self.n_sites
        if n < 1:
            raise LatticeFormatError(f"need at least one site, got {n}")
        t = np.asarray(self.hopping, dtype=float)
        u = np.asarray(self.interactions, dtype=float)
        if t.shape != (n, n):
            raise LatticeFormatError(f"hopping must be {n}x{n}, got {t.shape}")
        if u.shape != (n,):
            raise LatticeFormatError(f"interactions must have length {n}, got {u.shape}")
        if not np.all(np.isfinite(t)) or not np.all(np.isfinite(u)):
            raise LatticeFormatError("non-finite hopping or interaction value")
        if not np.array_equal(t, t.T):
            raise LatticeFormatError("hopping matrix must be exactly symmetric")
        t = t.copy()
        u = u.copy()
        t.setflags(write=False)
        u.setflags(write=False)
        object.__setattr__(self, "hopping", t)
        object.__setattr__(self, "interactions", u)
        if self.bipartition is not None:
            eps = np.asarray(self.bipartition, dtype=int)
            if eps.shape != (n,) or not np.all((eps == 0) | (eps == 1)):
                raise LatticeFormatError("bipartition must be a 0/1 vector, one entry per site")
            for x in range(n):
                for y in range(x + 1, n):
                    if eps[x] == eps[y] and t[x, y] != 0.0:
                        raise LatticeFormatError(
                            f"bond ({x + 1},{y + 1}) joins two sites of color {eps[x]}"
                        )
            eps = eps.copy()
            eps.setflags(write=False)
            object.__setattr__(self, "bipartition", eps)

    def bonds(self):
        """Yield (x, y, t) with x <= y over nonzero hopping entries."""
        for x in range(self.n_sites):
            for y in range(x, self.n_sites):
                if self.hopping[x, y] != 0.0:
                    yield x, y, float(self.hopping[x, y])

    @property
    def has_diagonal_hopping(self) -> bool:
        return bool(np.any(np.diag(self.hopping) != 0.0))

    def uniform_interaction(self) -> float | None:
        """The common U if every site carries the same value, else None."""
        u0 = float(self.interactions[0])
        if np.all(self.interactions == u0):
            return u0
        return None


@dataclass(frozen=True)
class BipartitionReport:
    """Outcome of the two-coloring attempt on the bond graph."""

    is_bipartite: bool
    size_a: int
    size_b: int
    assignment: np.ndarray | None
    certificate: list[int] | None
    has_diagonal_hopping: bool = False

    def to_dict(self) -> dict:
        return {
            "is_bipartite": self.is_bipartite,
            "size_a": self.size_a,
            "size_b": self.size_b,
            "assignment": None if self.assignment is None else [int(c) for c in self.assignment],
            "odd_cycle": None if self.certificate is None else [x + 1 for x in self.certificate],
            "has_diagonal_hopping": self.has_diagonal_hopping,
        }


def build_lattice(sites: int, bonds, interactions, bipartition=None) -> LatticeSpec:
    """Assemble a LatticeSpec from a bond list.

    ``bonds`` is an iterable of (x, y, t) with 0-based site indices; duplicate
    bonds are summed, x == y adds a diagonal hopping term.
    """
    n = int(sites)
    if n < 1:
        raise LatticeFormatError(f"need at least one site, got {n}")
    t = np.zeros((n, n))
    for x, y, val in bonds:
        x, y = int(x), int(y)
        if not (0 <= x < n and 0 <= y < n):
            raise LatticeFormatError(f"bond site out of range: ({x}, {y}) with {n} sites")
        val = float(val)
        if not np.isfinite(val):
            raise LatticeFormatError(f"non-finite hopping on bond ({x}, {y})")
        if x == y:
            t[x, x] += val
        else:
            t[x, y] += val
            t[y, x] += val
    u = np.asarray(list(interactions), dtype=float)
    return LatticeSpec(n_sites=n, hopping=t, interactions=u, bipartition=bipartition)


def _adjacency(spec: LatticeSpec) -> list[list[int]]:
    """Neighbor lists over off-diagonal nonzero hopping, ascending order."""
    adj: list[list[int]] = [[] for _ in range(spec.n_sites)]
    for x in range(spec.n_sites):
        for y in range(spec.n_sites):
            if x != y and spec.hopping[x, y] != 0.0:
                adj[x].append(y)
    return adj


def detect_bipartition(spec: LatticeSpec) -> BipartitionReport:
    """Two-color the bond graph by BFS, or exhibit an odd cycle.

    Diagonal hopping does not affect two-colorability but is flagged because
    it spoils the pseudospin commutation relations downstream.
    """
    n = spec.n_sites
    adj = _adjacency(spec)
    color = np.full(n, -1, dtype=int)
    parent = np.full(n, -1, dtype=int)
    for start in range(n):
        if color[start] != -1:
            continue
        color[start] = 0
        queue = deque([start])
        while queue:
            v = queue.popleft()
            for w in adj[v]:
                if color[w] == -1:
                    color[w] = 1 - color[v]
                    parent[w] = v
                    queue.append(w)
                elif color[w] == color[v]:
                    # Conflict edge (v, w): splice the two tree paths into an odd cycle.
                    cycle = _odd_cycle(parent, v, w)
                    return BipartitionReport(
                        is_bipartite=False,
                        size_a=0,
                        size_b=0,
                        assignment=None,
                        certificate=cycle,
                        has_diagonal_hopping=spec.has_diagonal_hopping,
                    )
    assignment = color.copy()
    return BipartitionReport(
        is_bipartite=True,
        size_a=int(np.sum(assignment == 0)),
        size_b=int(np.sum(assignment == 1)),
        assignment=assignment,
        certificate=None,
        has_diagonal_hopping=spec.has_diagonal_hopping,
    )


def _odd_cycle(parent: np.ndarray, v: int, w: int) -> list[int]:
    """Cycle through the BFS-tree ancestors of the conflict edge (v, w)."""
    anc_v = [v]
    while parent[anc_v[-1]] != -1:
        anc_v.append(int(parent[anc_v[-1]]))
    anc_w = [w]
    while parent[anc_w[-1]] != -1:
        anc_w.append(int(parent[anc_w[-1]]))
    common = set(anc_v) & set(anc_w)
    iv = next(i for i, x in enumerate(anc_v) if x in common)
    iw = next(i for i, x in enumerate(anc_w) if x in common)
    # v .. lca .. w, then the closing edge w-v is implicit.
    return anc_v[: iv + 1] + list(reversed(anc_w[:iw]))


def is_connected(spec: LatticeSpec) -> tuple[bool, list[list[int]]]:
    """Connectivity of the bond graph; returns (flag, components)."""
    n = spec.n_sites
    adj = _adjacency(spec)
    seen = [False] * n
    components: list[list[int]] = []
    for start in range(n):
        if seen[start]:
            continue
        comp = []
        queue = deque([start])
        seen[start] = True
        while queue:
            v = queue.popleft()
            comp.append(v)
            for w in adj[v]:
                if not seen[w]:
                    seen[w] = True
                    queue.append(w)
        components.append(sorted(comp))
    return len(components) == 1, components


def generate_lieb_chain(unit_cells: int, t: float, u: float) -> LatticeSpec:
    """1D chain of 3-site cells: one hub (sublattice A) bonded to two rims (B).

    Cells are chained by bonding the second rim of cell c to the hub of cell
    c+1, so |A| = cells and |B| = 2*cells.  The hopping matrix acquires at
    least |B| - |A| zero modes (flat band).
    """
    cells = int(unit_cells)
    if cells < 1:
        raise LatticeFormatError(f"need at least one unit cell, got {cells}")
    n = 3 * cells
    bonds = []
    eps = np.zeros(n, dtype=int)
    for c in range(cells):
        hub, rim1, rim2 = 3 * c, 3 * c + 1, 3 * c + 2
        eps[rim1] = 1
        eps[rim2] = 1
        bonds.append((hub, rim1, t))
        bonds.append((hub, rim2, t))
        if c + 1 < cells:
            bonds.append((rim2, 3 * (c + 1), t))
    return build_lattice(n, bonds, [u] * n, bipartition=eps)


def with_detected_bipartition(spec: LatticeSpec) -> LatticeSpec:
    """Return a copy carrying the BFS two-coloring; error if not bipartite."""
    report = detect_bipartition(spec)
    if not report.is_bipartite:
        raise LatticeFormatError(f"graph is not bipartite: odd cycle {report.certificate}")
    return LatticeSpec(
        n_sites=spec.n_sites,
        hopping=spec.hopping,
        interactions=spec.interactions,
        bipartition=report.assignment,
    )


def random_connected_spec(
    rng: np.random.Generator,
    n_min: int = 3,
    n_max: int = 6,
    u_low: float = -3.0,
    u_high: float = -0.2,
    extra_bond_p: float = 0.35,
    t_low: float = 0.5,
    t_high: float = 1.5,
    random_sign: bool = True,
) -> LatticeSpec:
    """Random connected graph: spanning tree plus Bernoulli extra edges.

    Hopping magnitudes are uniform in [t_low, t_high] with optional random
    sign; interactions are drawn per site from [u_low, u_high].
    """
    n = int(rng.integers(n_min, n_max + 1))
    bonds = []

    def draw_t() -> float:
        mag = float(rng.uniform(t_low, t_high))
        if random_sign and rng.integers(0, 2) == 1:
            mag = -mag
        return mag

    for i in range(1, n):
        j = int(rng.integers(0, i))
        bonds.append((j, i, draw_t()))
    tree = {(min(x, y), max(x, y)) for x, y, _ in bonds}
    for x in range(n):
        for y in range(x + 1, n):
            if (x, y) not in tree and rng.uniform() < extra_bond_p:
                bonds.append((x, y, draw_t()))
    u = rng.uniform(u_low, u_high, size=n)
    return build_lattice(n, bonds, u)


def to_json_dict(spec: LatticeSpec) -> dict:
    """Lattice part of the spec file (1-based sites, bonds once per pair)."""
    doc: dict = {
        "sites": spec.n_sites,
        "bonds": [[x + 1, y + 1, t] for x, y, t in spec.bonds()],
        "interactions": [float(v) for v in spec.interactions],
    }
    if spec.bipartition is not None:
        doc["bipartition"] = [int(c) for c in spec.bipartition]
    return doc


def from_json_dict(doc: dict) -> LatticeSpec:
    """Parse the lattice part of a spec file; strict about duplicate bonds."""
    try:
        n = int(doc["sites"])
        raw_bonds = doc.get("bonds", [])
        interactions = doc["interactions"]
    except (KeyError, TypeError, ValueError) as exc:
        raise LatticeFormatError(f"malformed lattice document: {exc}") from exc
    seen: dict[tuple[int, int], float] = {}
    bonds = []
    for entry in raw_bonds:
        if len(entry) != 3:
            raise LatticeFormatError(f"bond entries are [x, y, t], got {entry!r}")
        x1, y1, t = int(entry[0]), int(entry[1]), float(entry[2])
        if not (1 <= x1 <= n and 1 <= y1 <= n):
            raise LatticeFormatError(f"bond site out of range: {entry!r} with {n} sites")
        key = (min(x1, y1), max(x1, y1))
        if key in seen:
            if seen[key] != t:
                raise LatticeFormatError(
                    f"bond ({key[0]},{key[1]}) listed twice with different t: {seen[key]} vs {t}"
                )
            raise LatticeFormatError(f"bond ({key[0]},{key[1]}) listed more than once")
        seen[key] = t
        bonds.append((x1 - 1, y1 - 1, t))
    bipartition = doc.get("bipartition")
    return build_lattice(n, bonds, interactions, bipartition=bipartition)
