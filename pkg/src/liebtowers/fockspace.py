"""Fermionic occupation bases per (N_up, N_down) sector.

States are pairs of bitmasks; bit i of a mask means site i is occupied by
that spin species.  The global creation-operator ordering is

    c+_{x1,up} ... c+_{xk,up} c+_{y1,down} ... c+_{ym,down} |0>

with each block sorted by ascending site index (all up operators before all
down operators).  With this block convention a same-spin hop never picks up
a sign from the other species, and the m = 0 wavefunction reshapes into a
matrix over (up config, down config) with no cross-spin signs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations
from math import comb
from typing import Literal, NamedTuple

MAX_SITES = 16

Spin = Literal["up", "down"]


class FockState(NamedTuple):
    up_mask: int
    down_mask: int


class Hop(NamedTuple):
    state: FockState
    sign: int


def _parity_below(mask: int, site: int) -> int:
    """Number of occupied orbitals with index < site, mod 2."""
    return bin(mask & ((1 << site) - 1)).count("1") & 1


def apply_single(state: FockState, site: int, spin: Spin, dagger: bool) -> Hop | None:
    """Apply one creation (dagger=True) or annihilation operator.

    Returns the resulting state with its fermionic sign, or None when the
    operator annihilates the state.  Down-spin operators anticommute past the
    whole up block, hence the extra popcount(up_mask) in the parity.
    """
    if site < 0 or site >= MAX_SITES:
        raise ValueError(f"site {site} outside supported range 0..{MAX_SITES - 1}")
    mask = state.up_mask if spin == "up" else state.down_mask
    occupied = (mask >> site) & 1
    if dagger == bool(occupied):
        return None
    parity = _parity_below(mask, site)
    if spin == "down":
        parity ^= bin(state.up_mask).count("1") & 1
    new_mask = mask ^ (1 << site)
    if spin == "up":
        new_state = FockState(new_mask, state.down_mask)
    else:
        new_state = FockState(state.up_mask, new_mask)
    return Hop(new_state, -1 if parity else 1)


def apply_hop(state: FockState, x: int, y: int, sigma: Spin) -> Hop | None:
    """Apply c+_{x,sigma} c_{y,sigma}; x == y is the number operator.

    The cross-block parity from the up block cancels between the two factors
    of a same-spin hop, so only the within-mask parity survives.
    """
    mask = state.up_mask if sigma == "up" else state.down_mask
    if x == y:
        if x < 0 or x >= MAX_SITES:
            raise ValueError(f"site {x} outside supported range 0..{MAX_SITES - 1}")
        return Hop(state, 1) if (mask >> x) & 1 else None
    ann = apply_single(state, y, sigma, dagger=False)
    if ann is None:
        return None
    cre = apply_single(ann.state, x, sigma, dagger=True)
    if cre is None:
        return None
    return Hop(cre.state, ann.sign * cre.sign)


@dataclass(frozen=True)
class SectorBasis:
    """All states with fixed particle numbers, sorted by (up_mask, down_mask)."""

    n_sites: int
    n_up: int
    n_down: int
    states: tuple[FockState, ...]
    index: dict[FockState, int] = field(repr=False)

    @property
    def dim(self) -> int:
        return len(self.states)

    @property
    def dim_up(self) -> int:
        return comb(self.n_sites, self.n_up)

    @property
    def dim_down(self) -> int:
        return comb(self.n_sites, self.n_down)

    def rank(self, state: FockState) -> int:
        return self.index[state]

    def ref(self) -> str:
        return f"sector(n={self.n_sites},up={self.n_up},down={self.n_down})"


def _masks(n_sites: int, k: int) -> list[int]:
    return sorted(sum(1 << b for b in bits) for bits in combinations(range(n_sites), k))


@lru_cache(maxsize=512)
def enumerate_sector(n_sites: int, n_up: int, n_down: int) -> SectorBasis:
    """Enumerate the (n_up, n_down) sector on n_sites sites."""
    if n_sites < 1 or n_sites > MAX_SITES:
        raise ValueError(f"site count {n_sites} outside supported range 1..{MAX_SITES}")
    if not (0 <= n_up <= n_sites and 0 <= n_down <= n_sites):
        raise ValueError(
            f"occupation ({n_up},{n_down}) exceeds site count {n_sites}"
        )
    ups = _masks(n_sites, n_up)
    downs = _masks(n_sites, n_down)
    states = tuple(FockState(u, d) for u in ups for d in downs)
    index = {s: i for i, s in enumerate(states)}
    return SectorBasis(n_sites=n_sites, n_up=n_up, n_down=n_down, states=states, index=index)


def total_dimension(n_sites: int) -> int:
    """4**n_sites, the full electronic state count of the lattice."""
    if n_sites < 1 or n_sites > MAX_SITES:
        raise ValueError(f"site count {n_sites} outside supported range 1..{MAX_SITES}")
    return 4**n_sites


def spin_reflection_permutation(basis: SectorBasis, target: SectorBasis) -> list[int]:
    """Index map sending (u, d) in ``basis`` to (d, u) in ``target``.

    Swapping the two blocks costs a global (-1)^(N_up * N_down) that is
    constant across the sector, so the map is a plain permutation.
    """
    if (basis.n_up, basis.n_down) != (target.n_down, target.n_up):
        raise ValueError("target must be the spin-reflected sector")
    return [target.index[FockState(s.down_mask, s.up_mask)] for s in basis.states]
