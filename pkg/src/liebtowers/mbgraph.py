"""Single-spin many-body configuration lattice and marker-moving paths.

Nodes are unordered N-site occupation classes; two nodes share an edge when
they differ in one site joined by a nonzero hopping bond.  ``find_path``
realizes the constructive connectivity argument: walk a marker toward each
target site, cascading any markers that block the way one slot forward along
the walk, then erase revisited configurations so all nodes are distinct.
``verify_chain_product`` certifies a path by multiplying the corresponding
projector / kinetic operator chain and extracting its single nonzero entry.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from itertools import combinations
from math import comb

from .fockspace import enumerate_sector
from .lattice import LatticeSpec, is_connected
from .operators import build_kinetic, build_projector

ConfigNode = frozenset

DEFAULT_CENSUS_CAP = 5000


class CapExceededError(RuntimeError):
    def __init__(self, required: int, cap: int, what: str):
        super().__init__(f"{what} needs {required} nodes but the cap is {cap}")
        self.required = required
        self.cap = cap


@dataclass(frozen=True)
class ConfigPath:
    """Sequence of configurations plus the single-site move taken at each step."""

    nodes: tuple[ConfigNode, ...]
    moves: tuple[tuple[int, int], ...]

    def __post_init__(self):
        if len(self.nodes) != len(self.moves) + 1:
            raise ValueError("a path with m moves has m + 1 nodes")
        if len(set(self.nodes)) != len(self.nodes):
            raise ValueError("path nodes must be distinct")
        for k, (a, b) in enumerate(self.moves):
            before, after = self.nodes[k], self.nodes[k + 1]
            if before - after != {a} or after - before != {b}:
                raise ValueError(f"move {k} ({a}->{b}) does not match its configurations")

    def to_dict(self) -> dict:
        return {
            "nodes": [sorted(x + 1 for x in node) for node in self.nodes],
            "moves": [[a + 1, b + 1] for a, b in self.moves],
        }


def _neighbor_lists(spec: LatticeSpec) -> list[list[int]]:
    n = spec.n_sites
    adj: list[list[int]] = [[] for _ in range(n)]
    for x in range(n):
        for y in range(n):
            if x != y and spec.hopping[x, y] != 0.0:
                adj[x].append(y)
    return adj


def _bfs_to_marker(adj, start: int, markers: set, forbidden: set) -> list[int]:
    """Shortest site path from ``start`` to the nearest marker not in
    ``forbidden``; neighbors are explored in ascending order so ties are
    deterministic.  Returns the path marker -> ... -> start."""
    parent = {start: None}
    queue = deque([start])
    while queue:
        v = queue.popleft()
        if v in markers and v not in forbidden and v != start:
            path = [v]
            while parent[path[-1]] is not None:
                path.append(parent[path[-1]])
            return path
        for w in adj[v]:
            if w not in parent:
                parent[w] = v
                queue.append(w)
    raise AssertionError("no reachable marker; connectivity was checked earlier")


def _erase_loops(nodes: list[ConfigNode]) -> list[ConfigNode]:
    """Loop erasure in visit order: a revisited configuration truncates the
    detour, preserving endpoint identity and single-hop adjacency."""
    out: list[ConfigNode] = []
    seen: dict[ConfigNode, int] = {}
    for node in nodes:
        if node in seen:
            k = seen[node]
            for dropped in out[k + 1:]:
                del seen[dropped]
            del out[k + 1:]
        else:
            seen[node] = len(out)
            out.append(node)
    return out


def find_path(spec: LatticeSpec, start: ConfigNode, goal: ConfigNode) -> ConfigPath:
    """Connect two N-site configurations through single legal hops.

    The lattice must be connected.  Targets are claimed one at a time; when
    the walk toward a target runs over occupied sites, the occupying markers
    cascade forward so that net occupancy changes only at the walk's ends.
    """
    start = frozenset(int(x) for x in start)
    goal = frozenset(int(x) for x in goal)
    n = spec.n_sites
    for node in (start, goal):
        for x in node:
            if not (0 <= x < n):
                raise ValueError(f"configuration site {x} out of range")
    if len(start) != len(goal):
        raise ValueError(f"configurations have different sizes: {len(start)} vs {len(goal)}")
    connected, components = is_connected(spec)
    if not connected and len(start) > 0 and start != goal:
        raise ValueError(f"lattice is disconnected: components {components}")
    adj = _neighbor_lists(spec)
    current = set(start)
    nodes: list[ConfigNode] = [frozenset(current)]
    locked: set[int] = set()
    for target in sorted(goal):
        if target in current:
            locked.add(target)
            continue
        # BFS from the target outward returns marker -> ... -> target, so
        # site_path[0] is the marker that leaves and site_path[-1] == target.
        site_path = _bfs_to_marker(adj, target, current, locked)
        occupied_at = [i for i, p in enumerate(site_path) if p in current]
        stops = occupied_at[1:] + [len(site_path) - 1]
        for which in range(len(occupied_at) - 1, -1, -1):
            pos = occupied_at[which]
            stop = stops[which]
            for step in range(pos, stop):
                a, b = site_path[step], site_path[step + 1]
                current.remove(a)
                current.add(b)
                nodes.append(frozenset(current))
        locked.add(target)
    assert current == set(goal)
    nodes = _erase_loops(nodes)
    moves = []
    for k in range(len(nodes) - 1):
        gone = nodes[k] - nodes[k + 1]
        came = nodes[k + 1] - nodes[k]
        (a,), (b,) = tuple(gone), tuple(came)
        if spec.hopping[a, b] == 0.0:
            raise AssertionError(f"constructed move {a}->{b} is not a bond")
        moves.append((a, b))
    return ConfigPath(nodes=tuple(nodes), moves=tuple(moves))


def verify_chain_product(spec: LatticeSpec, path: ConfigPath) -> float:
    """Value of the single nonzero element of Pi^{X_m} K Pi^{X_{m-1}} ... Pi^{X_1}.

    Built on the single-spin N-particle basis; equals the product of the
    hopping amplitudes along the path up to sign.  Raises if any step is not
    a bond or the product vanishes.
    """
    n_particles = len(path.nodes[0])
    for a, b in path.moves:
        if spec.hopping[a, b] == 0.0:
            raise ValueError(f"path step {a}->{b} has zero hopping")
    basis = enumerate_sector(spec.n_sites, n_particles, 0)
    kin = build_kinetic(spec, basis).matrix
    chain = build_projector(tuple(path.nodes[0]), basis).matrix
    for node in path.nodes[1:]:
        chain = build_projector(tuple(node), basis).matrix @ (kin @ chain)
    chain = chain.tocsr()
    chain.eliminate_zeros()
    if chain.nnz != 1:
        raise ValueError(f"operator chain has {chain.nnz} nonzero entries, expected 1")
    value = float(chain.data[0])
    if value == 0.0:
        raise ValueError("operator chain vanishes")
    return value


@dataclass(frozen=True)
class CensusReport:
    n_nodes: int
    n_components: int
    component_sizes: tuple[int, ...]
    lattice_connected: bool
    lemma_consistent: bool

    def to_dict(self) -> dict:
        return {
            "n_nodes": self.n_nodes,
            "n_components": self.n_components,
            "component_sizes": list(self.component_sizes),
            "lattice_connected": self.lattice_connected,
            "lemma_consistent": self.lemma_consistent,
        }


def connectivity_census(spec: LatticeSpec, n_particles: int, cap: int = DEFAULT_CENSUS_CAP) -> CensusReport:
    """Explicitly build the configuration lattice and count its components.

    ``lemma_consistent`` records the implication 'lattice connected implies
    one component'; the converse can fail trivially (e.g. the full band is a
    single node regardless of the lattice).
    """
    n = spec.n_sites
    if not (0 <= n_particles <= n):
        raise ValueError(f"particle number {n_particles} out of range for {n} sites")
    size = comb(n, n_particles)
    if size > cap:
        raise CapExceededError(size, cap, "configuration lattice")
    adj = _neighbor_lists(spec)
    nodes = [frozenset(c) for c in combinations(range(n), n_particles)]
    index = {node: i for i, node in enumerate(nodes)}
    seen = [False] * len(nodes)
    sizes = []
    for root in range(len(nodes)):
        if seen[root]:
            continue
        count = 0
        queue = deque([root])
        seen[root] = True
        while queue:
            i = queue.popleft()
            count += 1
            node = nodes[i]
            for x in node:
                for y in adj[x]:
                    if y in node:
                        continue
                    k = index[(node - {x}) | {y}]
                    if not seen[k]:
                        seen[k] = True
                        queue.append(k)
        sizes.append(count)
    connected, _ = is_connected(spec)
    return CensusReport(
        n_nodes=len(nodes),
        n_components=len(sizes),
        component_sizes=tuple(sorted(sizes)),
        lattice_connected=connected,
        lemma_consistent=(not connected) or len(sizes) == 1,
    )
