"""Symmetry-resolved exact diagonalization for Hubbard and Holstein-type models.

Subpackages by task:

- ``lattice``: finite graphs with hopping and interactions, bipartiteness.
- ``fockspace``: per-sector fermionic bases with a fixed ordering convention.
- ``operators``: sparse Hamiltonians, projectors, spin / pseudospin algebras.
- ``phonon``: truncated oscillator modes and electron-phonon Hamiltonians.
- ``spectra``: diagonalization, quantum-number labels, ground-state reports,
  energy towers.
- ``srp``: the m = 0 wavefunction-as-matrix machinery and positivity witness.
- ``pph``: partial particle-hole transformation and spectral correspondence.
- ``mbgraph``: many-body configuration lattice, marker paths, operator chains.
- ``cli``: command-line front end over JSON spec files.
"""

__version__ = "0.1.0"

__all__ = [
    "lattice",
    "fockspace",
    "operators",
    "phonon",
    "spectra",
    "srp",
    "pph",
    "mbgraph",
    "specfile",
    "cli",
]
