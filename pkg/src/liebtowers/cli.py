"""Command-line front end: spectra, theorem checks, randomized suites.

Commands operate on JSON spec files and emit a human-readable table on
stdout plus a canonical JSON report (written to --output when given,
otherwise appended to stdout).  Exit codes: 0 success / all checks pass,
1 a check or suite case failed, 2 malformed input, 3 a size cap was
exceeded, 4 quantum-number labeling failed, 5 a theorem hypothesis is not
satisfied by the input.  The environment variable LIEB_TOWERS_THREADS caps
internal parallelism.
"""

from __future__ import annotations

import argparse
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import jsonfmt, mbgraph, phonon, pph, spectra, specfile, srp
from .fockspace import enumerate_sector
from .lattice import (
    LatticeFormatError,
    LatticeSpec,
    detect_bipartition,
    is_connected,
    random_connected_spec,
    with_detected_bipartition,
)
from .mbgraph import CapExceededError
from .operators import build_hubbard, build_spin_ops, max_abs, norm1
from .spectra import DiagonalizationError, LabelingError

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_PARSE = 2
EXIT_CAP = 3
EXIT_LABELING = 4
EXIT_HYPOTHESIS = 5

VERIFY_CHOICES = (
    "theorem1",
    "theorem3",
    "lieb-spin",
    "towers",
    "pph",
    "srp",
    "lemma1",
    "holstein-singlet",
)


class HypothesisError(RuntimeError):
    """A named hypothesis of the requested check fails on this input."""


@dataclass
class RunConfig:
    command: str
    which: str | None = None
    input_path: str | None = None
    output_path: str | None = None
    sector: tuple[int, int] | None = None
    n_e: int | None = None
    seed: int = 1
    cases: int = 50
    max_sites: int = 5
    n_max: int | None = None
    deg_tol: float = spectra.DEFAULT_DEG_TOL
    dense_cap: int = spectra.DEFAULT_DENSE_CAP
    config_sets: list[int] = field(default_factory=list)
    path_from: str | None = None
    path_to: str | None = None

    def __post_init__(self):
        if self.deg_tol <= 0:
            raise LatticeFormatError(f"degeneracy tolerance must be positive, got {self.deg_tol}")
        if self.dense_cap < 1:
            raise LatticeFormatError(f"dense cap must be at least 1, got {self.dense_cap}")
        if self.n_max is not None and self.n_max < 1:
            raise LatticeFormatError(f"n_max must be at least 1, got {self.n_max}")


def _positive_float(text: str) -> float:
    value = float(text)
    if value <= 0:
        raise argparse.ArgumentTypeError(f"{text} is not a positive number")
    return value


def _positive_int(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"{text} is not a positive integer")
    return value


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="liebtowers",
        description="Exact-diagonalization checks for Hubbard and Holstein-type models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, needs_input=True):
        if needs_input:
            p.add_argument("--input", required=True, help="spec file (JSON)")
        p.add_argument("--output", help="write the JSON report here")
        p.add_argument("--sector", nargs=2, type=int, metavar=("NUP", "NDOWN"))
        p.add_argument("--ne", type=int, help="total electron number (scans all its sectors)")
        p.add_argument("--seed", type=int, default=1)
        p.add_argument("--nmax", type=_positive_int, help="phonon cutoff override")
        p.add_argument("--deg-tol", type=_positive_float, default=spectra.DEFAULT_DEG_TOL)
        p.add_argument("--dense-cap", type=_positive_int, default=spectra.DEFAULT_DENSE_CAP)

    p_spec = sub.add_parser("spectrum", help="labeled eigenvalue table")
    common(p_spec)

    p_verify = sub.add_parser("verify", help="run one named check")
    p_verify.add_argument("which", choices=VERIFY_CHOICES)
    common(p_verify)

    p_suite = sub.add_parser("suite", help="randomized property suite")
    p_suite.add_argument("--output", help="write the JSON report here")
    p_suite.add_argument("--seed", type=int, default=1)
    p_suite.add_argument("--cases", type=int, default=50)
    p_suite.add_argument("--max-sites", type=_positive_int, default=5)
    p_suite.add_argument("--deg-tol", type=_positive_float, default=spectra.DEFAULT_DEG_TOL)
    p_suite.add_argument("--dense-cap", type=_positive_int, default=spectra.DEFAULT_DENSE_CAP)

    p_path = sub.add_parser("path", help="many-body configuration path")
    common(p_path)
    p_path.add_argument("--from", dest="path_from", required=True, metavar="SITES",
                        help="comma-separated 1-based sites, e.g. 1,2")
    p_path.add_argument("--to", dest="path_to", required=True, metavar="SITES")

    p_pph = sub.add_parser("pph", help="partial particle-hole correspondence")
    common(p_pph)
    return parser


def config_from_args(args: argparse.Namespace) -> RunConfig:
    return RunConfig(
        command=args.command,
        which=getattr(args, "which", None),
        input_path=getattr(args, "input", None),
        output_path=getattr(args, "output", None),
        sector=tuple(args.sector) if getattr(args, "sector", None) else None,
        n_e=getattr(args, "ne", None),
        seed=getattr(args, "seed", 1),
        cases=getattr(args, "cases", 50),
        max_sites=getattr(args, "max_sites", 5),
        n_max=getattr(args, "nmax", None),
        deg_tol=getattr(args, "deg_tol", spectra.DEFAULT_DEG_TOL),
        dense_cap=getattr(args, "dense_cap", spectra.DEFAULT_DENSE_CAP),
        path_from=getattr(args, "path_from", None),
        path_to=getattr(args, "path_to", None),
    )


def _emit(report: dict, cfg: RunConfig) -> None:
    text = jsonfmt.dumps(report)
    if cfg.output_path:
        Path(cfg.output_path).write_text(text)
    else:
        sys.stdout.write(text)


def _load(cfg: RunConfig):
    lat, ph = specfile.load_spec(cfg.input_path)
    if cfg.n_max is not None and ph is not None:
        ph = phonon.PhononSpec(
            n_modes=ph.n_modes,
            masses=ph.masses,
            frequencies=ph.frequencies,
            coupling=ph.coupling,
            quartic=ph.quartic,
            n_max=cfg.n_max,
        )
    return lat, ph


def _half(value: float | None) -> str:
    if value is None:
        return "-"
    return f"{value:g}"


def _record_rows(records: list[spectra.SpectrumRecord]) -> list[str]:
    rows = []
    for r in sorted(records, key=lambda r: (r.energy, r.sector)):
        rows.append(
            f"{r.energy:+.12f}  ({r.sector[0]},{r.sector[1]})"
            f"  s={_half(r.s)} m={_half(r.m)} j={_half(r.j)} mj={_half(r.m_j)}"
            f"  cluster={r.degeneracy_cluster}"
        )
    return rows


def cmd_spectrum(cfg: RunConfig) -> int:
    lat, _ = _load(cfg)
    if cfg.sector is not None:
        sectors = [cfg.sector]
    else:
        sectors = spectra.sectors_for(lat, cfg.n_e)
    scan = spectra.scan_sectors(lat, sectors=sectors, dense_cap=cfg.dense_cap, deg_tol=cfg.deg_tol)
    records = spectra.all_records(scan)
    print(f"# spectrum of {cfg.input_path}: {len(records)} states over {len(scan)} sectors")
    print("# E  (N_up,N_down)  labels  cluster")
    for row in _record_rows(records):
        print(row)
    ground = spectra.ground_state_report(lat, scan=scan, deg_tol=cfg.deg_tol)
    print(
        f"# ground: E0={ground.energy:.12f} degeneracy={ground.degeneracy}"
        f" s={_half(ground.s)} j={_half(ground.j)}"
    )
    towers = [spectra.extract_tower(records, "spin", n_e=cfg.n_e).to_dict()]
    if any(r.j is not None for r in records):
        towers.append(spectra.extract_tower(records, "pseudospin", n_e=cfg.n_e).to_dict())
    partial = any(res.eigensystem.partial for res in scan.values())
    report = {
        "schema_version": jsonfmt.SCHEMA_VERSION,
        "command": "spectrum",
        "input": cfg.input_path,
        "sectors": [list(sec) for sec in sorted(scan)],
        "partial": partial,
        "records": [r.to_dict() for r in sorted(records, key=lambda r: (r.energy, r.sector))],
        "towers": towers,
        "ground": ground.to_dict(),
    }
    _emit(report, cfg)
    return EXIT_OK


def _require(condition: bool, name: str) -> None:
    if not condition:
        raise HypothesisError(name)


def _default_even_ne(lat: LatticeSpec, cfg: RunConfig) -> int:
    if cfg.n_e is not None:
        return cfg.n_e
    return lat.n_sites if lat.n_sites % 2 == 0 else lat.n_sites - 1


def _ensure_bipartition(lat: LatticeSpec) -> LatticeSpec:
    if lat.bipartition is not None:
        return lat
    report = detect_bipartition(lat)
    _require(report.is_bipartite, "lattice not bipartite")
    return with_detected_bipartition(lat)


def _check_theorem1(lat: LatticeSpec, ph, cfg: RunConfig) -> tuple[bool, dict]:
    _require(bool(np.all(lat.interactions <= 0)), "U_x not all attractive (<= 0)")
    n_e = _default_even_ne(lat, cfg)
    _require(n_e % 2 == 0 and n_e > 0, "electron number not even and positive")
    scan = spectra.scan_sectors(lat, n_e=n_e, dense_cap=cfg.dense_cap, deg_tol=cfg.deg_tol)
    ground = spectra.ground_state_report(lat, scan=scan, deg_tol=cfg.deg_tol)
    half = n_e // 2
    witness = _witness_for(lat, scan, half, cfg)
    singlet_present = ground.s == 0.0
    passed = bool(
        singlet_present
        and witness.pass_flags["energy_match"]
        and witness.pass_flags["trace_positive"]
        and witness.pass_flags["diag_nonzero"]
    )
    return passed, {
        "n_e": n_e,
        "ground": ground.to_dict(),
        "singlet_in_ground_multiplet": singlet_present,
        "witness": witness.to_dict(),
    }


def _witness_for(lat, scan, half, cfg) -> srp.WitnessReport:
    sec = scan[(half, half)]
    psi = srp.reshape_to_matrix(sec.eigensystem.vectors[:, 0], sec.basis)
    h = build_hubbard(lat, sec.basis)
    return srp.positivity_witness(psi, h)


def _check_theorem3(lat: LatticeSpec, ph, cfg: RunConfig) -> tuple[bool, dict]:
    connected, components = is_connected(lat)
    _require(connected, "lattice not connected")
    _require(bool(np.all(lat.interactions < 0)), "U_x not strictly negative")
    n_e = _default_even_ne(lat, cfg)
    _require(n_e % 2 == 0 and n_e > 0, "electron number not even and positive")
    ground = spectra.ground_state_report(lat, n_e=n_e, dense_cap=cfg.dense_cap, deg_tol=cfg.deg_tol)
    passed = bool(ground.unique and ground.s == 0.0)
    return passed, {"n_e": n_e, "ground": ground.to_dict()}


def _check_lieb_spin(lat: LatticeSpec, ph, cfg: RunConfig) -> tuple[bool, dict]:
    lat = _ensure_bipartition(lat)
    u = lat.uniform_interaction()
    _require(u is not None, "U_x not uniform")
    _require(u > 0, "U not repulsive (> 0)")
    n_e = cfg.n_e if cfg.n_e is not None else lat.n_sites
    _require(n_e == lat.n_sites, "not at half filling (N_e = |sites|)")
    report = detect_bipartition(lat)
    expected_s = abs(report.size_a - report.size_b) / 2.0
    ground = spectra.ground_state_report(lat, n_e=n_e, dense_cap=cfg.dense_cap, deg_tol=cfg.deg_tol)
    passed = bool(
        ground.s == expected_s and ground.degeneracy == int(round(2 * expected_s + 1))
    )
    return passed, {
        "expected_s": expected_s,
        "sublattice_sizes": [report.size_a, report.size_b],
        "ground": ground.to_dict(),
    }


def _check_towers(lat: LatticeSpec, ph, cfg: RunConfig) -> tuple[bool, dict]:
    lat = _ensure_bipartition(lat)
    u = lat.uniform_interaction()
    _require(u is not None, "U_x not uniform")
    _require(u != 0, "U is zero; no tower claim applies")
    n_e = _default_even_ne(lat, cfg)
    scan = spectra.scan_sectors(lat, n_e=n_e, dense_cap=cfg.dense_cap, deg_tol=cfg.deg_tol)
    records = spectra.all_records(scan)
    spin_tower = spectra.extract_tower(records, "spin", n_e=n_e)
    pseudo_tower = spectra.extract_tower(records, "pseudospin", n_e=n_e)
    out = {
        "n_e": n_e,
        "u": u,
        "spin_tower": spin_tower.to_dict(),
        "pseudospin_tower": pseudo_tower.to_dict(),
    }
    if u < 0:
        # Attractive: the pseudospin tower is asserted, the spin tower is an
        # open question and only reported.
        out["asserted"] = "pseudospin strict at fixed N_e"
        passed = pseudo_tower.strict
    else:
        _require(n_e == lat.n_sites, "repulsive tower claim needs half filling")
        report = detect_bipartition(lat)
        s_min = abs(report.size_a - report.size_b) / 2.0
        upper = [(v, e) for v, e in spin_tower.entries if v >= s_min]
        violations = [
            (upper[i][0], upper[i + 1][0])
            for i in range(len(upper) - 1)
            if upper[i + 1][1] <= upper[i][1]
        ]
        out["asserted"] = f"spin strict for s >= {s_min:g}"
        out["partial_violations"] = [[a, b] for a, b in violations]
        passed = not violations
    return bool(passed), out


def _check_pph(lat: LatticeSpec, ph, cfg: RunConfig) -> tuple[bool, dict]:
    lat = _ensure_bipartition(lat)
    _require(lat.uniform_interaction() is not None, "U_x not uniform")
    if cfg.sector is not None:
        sectors = [cfg.sector]
    else:
        sectors = spectra.sectors_for(lat, cfg.n_e)
    results = []
    passed = True
    for sec in sectors:
        pmap = pph.build_pph(lat, sec)
        corr = pph.verify_spectral_correspondence(pmap)
        src = spectra.sector_spectrum(lat, *sec, dense_cap=cfg.dense_cap, deg_tol=cfg.deg_tol)
        tgt = spectra.sector_spectrum(
            pmap.target_spec, *pmap.target_sector, dense_cap=cfg.dense_cap, deg_tol=cfg.deg_tol
        )
        swap = pph.verify_label_swap(pmap, src, tgt)
        ok = corr.entrywise_ok and corr.spectral_ok and swap.all_swapped
        passed = passed and ok
        results.append(
            {
                "sector": list(sec),
                "correspondence": corr.to_dict(),
                "labels_swapped": swap.all_swapped,
                "mismatches": [dict(m) for m in swap.mismatches],
            }
        )
    return bool(passed), {"sectors": results}


def _check_srp(lat: LatticeSpec, ph, cfg: RunConfig) -> tuple[bool, dict]:
    _require(bool(np.all(lat.interactions <= 0)), "U_x not all attractive (<= 0)")
    n_e = _default_even_ne(lat, cfg)
    _require(n_e % 2 == 0 and n_e > 0, "electron number not even and positive")
    half = n_e // 2
    scan = spectra.scan_sectors(lat, sectors=[(half, half)], dense_cap=cfg.dense_cap, deg_tol=cfg.deg_tol)
    witness = _witness_for(lat, scan, half, cfg)
    flags = witness.pass_flags
    passed = bool(flags["energy_match"] and flags["trace_positive"] and flags["diag_nonzero"])
    return passed, {"n_e": n_e, "witness": witness.to_dict()}


def _check_lemma1(lat: LatticeSpec, ph, cfg: RunConfig) -> tuple[bool, dict]:
    connected, components = is_connected(lat)
    _require(connected, "lattice not connected")
    n_particles = cfg.n_e if cfg.n_e is not None else min(2, lat.n_sites - 1)
    census = mbgraph.connectivity_census(lat, n_particles)
    rng = np.random.default_rng(cfg.seed)
    n = lat.n_sites
    checks = []
    ok = census.n_components == 1
    for _ in range(50):
        x = frozenset(int(v) for v in rng.choice(n, size=n_particles, replace=False))
        y = frozenset(int(v) for v in rng.choice(n, size=n_particles, replace=False))
        path = mbgraph.find_path(lat, x, y)
        value = mbgraph.verify_chain_product(lat, path)
        checks.append(
            {
                "from": sorted(v + 1 for v in x),
                "to": sorted(v + 1 for v in y),
                "moves": len(path.moves),
                "chain_product": value,
            }
        )
        ok = ok and value != 0.0
    return bool(ok), {"n_particles": n_particles, "census": census.to_dict(), "paths": checks}


def _check_holstein_singlet(lat: LatticeSpec, ph, cfg: RunConfig) -> tuple[bool, dict]:
    _require(ph is not None, "no phonons in the spec file")
    bound = phonon.check_boundedness(lat, ph)
    _require(bound.bounded, "phonon energy not bounded below")
    n_e = _default_even_ne(lat, cfg)
    _require(n_e % 2 == 0 and n_e > 0, "electron number not even and positive")
    lo = max(0, n_e - lat.n_sites)
    hi = min(lat.n_sites, n_e)
    ground_e = None
    ground_s = None
    sector_data = []
    for a in range(lo, hi + 1):
        basis = enumerate_sector(lat.n_sites, a, n_e - a)
        h = phonon.build_ep_hamiltonian(lat, ph, basis)
        eig = spectra.diagonalize(h, dense_cap=cfg.dense_cap)
        s2 = phonon.lift_electronic(build_spin_ops(basis)["s_squared"], ph)
        records = spectra.resolve_quantum_numbers(
            h, s2, None, eig, (a, n_e - a), lat.n_sites, deg_tol=cfg.deg_tol
        )
        sector_data.append({"sector": [a, n_e - a], "e0": float(eig.energies[0])})
        if ground_e is None or eig.energies[0] < ground_e - cfg.deg_tol:
            ground_e = float(eig.energies[0])
            ground_s = records[0].s
        elif abs(eig.energies[0] - ground_e) <= cfg.deg_tol * (1 + abs(ground_e)):
            ground_s = min(ground_s, records[0].s)
    passed = ground_s == 0.0
    return bool(passed), {
        "n_e": n_e,
        "n_max": ph.n_max,
        "boundedness": bound.to_dict(),
        "coupling_rank_full": ph.coupling_rank_full(),
        "ground_energy": ground_e,
        "ground_s": ground_s,
        "sectors": sector_data,
    }


_CHECKS = {
    "theorem1": _check_theorem1,
    "theorem3": _check_theorem3,
    "lieb-spin": _check_lieb_spin,
    "towers": _check_towers,
    "pph": _check_pph,
    "srp": _check_srp,
    "lemma1": _check_lemma1,
    "holstein-singlet": _check_holstein_singlet,
}


def cmd_verify(cfg: RunConfig) -> int:
    lat, ph = _load(cfg)
    passed, details = _CHECKS[cfg.which](lat, ph, cfg)
    print(f"check {cfg.which}: {'PASS' if passed else 'FAIL'}")
    report = {
        "schema_version": jsonfmt.SCHEMA_VERSION,
        "command": "verify",
        "check": cfg.which,
        "input": cfg.input_path,
        "passed": passed,
        "details": details,
    }
    _emit(report, cfg)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def _ladder_commutator_residual(lat, basis, ops) -> float:
    """max |[S+, S-] - 2 S_z| over the sector, scaled."""
    import scipy.sparse as sp

    n = lat.n_sites
    sec = (basis.n_up, basis.n_down)
    plus = ops["s_plus"].matrix
    minus = ops["s_minus"].matrix
    term1 = sp.csr_matrix((basis.dim, basis.dim))
    if plus.shape[0] > 0:
        minus_back = build_spin_ops(enumerate_sector(n, sec[0] + 1, sec[1] - 1))["s_minus"].matrix
        term1 = minus_back @ plus
    term2 = sp.csr_matrix((basis.dim, basis.dim))
    if minus.shape[0] > 0:
        plus_back = build_spin_ops(enumerate_sector(n, sec[0] - 1, sec[1] + 1))["s_plus"].matrix
        term2 = plus_back @ minus
    mz = (sec[0] - sec[1]) / 2.0
    comm = term2 - term1 - 2.0 * mz * sp.identity(basis.dim, format="csr")
    scale = max(1.0, norm1(plus) * norm1(minus))
    return max_abs(comm) / scale


def cmd_suite(cfg: RunConfig) -> int:
    rng = np.random.default_rng(cfg.seed)
    results = []
    failing = None
    for case_id in range(cfg.cases):
        lat = random_connected_spec(rng, n_min=3, n_max=cfg.max_sites)
        half_max = lat.n_sites // 2
        n_e = 2 * int(rng.integers(1, half_max + 1))
        ground = spectra.ground_state_report(lat, n_e=n_e, dense_cap=cfg.dense_cap, deg_tol=cfg.deg_tol)
        half = n_e // 2
        scan = spectra.scan_sectors(lat, sectors=[(half, half)], dense_cap=cfg.dense_cap, deg_tol=cfg.deg_tol)
        witness = _witness_for(lat, scan, half, cfg)
        algebra = _ladder_residual_scan(lat, n_e)
        case_pass = bool(
            ground.unique
            and ground.s == 0.0
            and witness.pass_flags["energy_match"]
            and witness.pass_flags["trace_positive"]
            and witness.pass_flags["diag_nonzero"]
            and algebra < 1e-12
        )
        entry = {
            "case": case_id,
            "n_sites": lat.n_sites,
            "n_e": n_e,
            "ground": ground.to_dict(),
            "witness": witness.to_dict(),
            "algebra_residual": algebra,
            "passed": case_pass,
        }
        results.append(entry)
        if not case_pass and failing is None:
            failing = {
                "case": case_id,
                "spec": specfile.serialize_spec(lat),
                "n_e": n_e,
            }
    all_pass = all(r["passed"] for r in results)
    print(f"suite: {sum(r['passed'] for r in results)}/{len(results)} cases passed")
    report = {
        "schema_version": jsonfmt.SCHEMA_VERSION,
        "command": "suite",
        "seed": cfg.seed,
        "cases": cfg.cases,
        "max_sites": cfg.max_sites,
        "all_pass": all_pass,
        "results": results,
        "failing_case": failing,
    }
    _emit(report, cfg)
    return EXIT_OK if all_pass else EXIT_CHECK_FAILED


def _ladder_residual_scan(lat: LatticeSpec, n_e: int) -> float:
    worst = 0.0
    for sec in spectra.sectors_for(lat, n_e):
        basis = enumerate_sector(lat.n_sites, *sec)
        ops = build_spin_ops(basis)
        worst = max(worst, _ladder_commutator_residual(lat, basis, ops))
        h = build_hubbard(lat, basis).matrix
        plus = ops["s_plus"]
        if plus.shape[0] > 0:
            h_up = build_hubbard(lat, enumerate_sector(lat.n_sites, sec[0] + 1, sec[1] - 1)).matrix
            resid = max_abs(h_up @ plus.matrix - plus.matrix @ h)
            scale = max(1.0, norm1(h) * norm1(plus.matrix))
            worst = max(worst, resid / scale)
    return worst


def _parse_sites(text: str, n: int) -> frozenset:
    try:
        sites = [int(tok) for tok in text.split(",") if tok.strip()]
    except ValueError as exc:
        raise LatticeFormatError(f"bad site list {text!r}: {exc}") from exc
    for s in sites:
        if not (1 <= s <= n):
            raise LatticeFormatError(f"site {s} out of range 1..{n}")
    if len(set(sites)) != len(sites):
        raise LatticeFormatError(f"repeated site in {text!r}")
    return frozenset(s - 1 for s in sites)


def cmd_path(cfg: RunConfig) -> int:
    lat, _ = _load(cfg)
    x = _parse_sites(cfg.path_from, lat.n_sites)
    y = _parse_sites(cfg.path_to, lat.n_sites)
    path = mbgraph.find_path(lat, x, y)
    value = mbgraph.verify_chain_product(lat, path)
    print(f"path with {len(path.moves)} moves, chain product {value:g}")
    report = {
        "schema_version": jsonfmt.SCHEMA_VERSION,
        "command": "path",
        "input": cfg.input_path,
        "path": path.to_dict(),
        "chain_product": value,
    }
    _emit(report, cfg)
    return EXIT_OK


def cmd_pph(cfg: RunConfig) -> int:
    lat, _ = _load(cfg)
    passed, details = _check_pph(lat, None, cfg)
    print(f"pph correspondence: {'PASS' if passed else 'FAIL'}")
    report = {
        "schema_version": jsonfmt.SCHEMA_VERSION,
        "command": "pph",
        "input": cfg.input_path,
        "passed": passed,
        "details": details,
    }
    _emit(report, cfg)
    return EXIT_OK if passed else EXIT_CHECK_FAILED


def exit_code_for(exc: Exception) -> int:
    if isinstance(exc, LatticeFormatError):
        return EXIT_PARSE
    if isinstance(exc, CapExceededError):
        return EXIT_CAP
    if isinstance(exc, LabelingError):
        return EXIT_LABELING
    if isinstance(exc, HypothesisError):
        return EXIT_HYPOTHESIS
    if isinstance(exc, DiagonalizationError):
        return EXIT_CHECK_FAILED
    raise exc


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        cfg = config_from_args(args)
        if cfg.command == "spectrum":
            return cmd_spectrum(cfg)
        if cfg.command == "verify":
            return cmd_verify(cfg)
        if cfg.command == "suite":
            return cmd_suite(cfg)
        if cfg.command == "path":
            return cmd_path(cfg)
        if cfg.command == "pph":
            return cmd_pph(cfg)
        raise AssertionError(f"unhandled command {cfg.command}")
    except Exception as exc:  # mapped to documented exit codes
        code = exit_code_for(exc)
        print(f"error: {exc}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
