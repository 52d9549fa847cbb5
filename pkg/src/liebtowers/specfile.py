"""Load and save model spec files.

A spec file is a JSON document with the lattice keys (``sites``, ``bonds``,
``interactions``, optional ``bipartition``) and an optional ``phonons``
object.  Serialization is canonical (sorted bonds, 17-significant-digit
floats), so serialize -> parse -> serialize is byte-identical.
"""

from __future__ import annotations

import json
from pathlib import Path

from . import jsonfmt, phonon
from .lattice import LatticeFormatError, LatticeSpec, from_json_dict, to_json_dict
from .phonon import PhononSpec


def serialize_spec(lat: LatticeSpec, ph: PhononSpec | None = None) -> str:
    doc = to_json_dict(lat)
    if ph is not None:
        doc["phonons"] = phonon.to_json_dict(ph)
    return jsonfmt.dumps(doc)


def parse_spec(text: str) -> tuple[LatticeSpec, PhononSpec | None]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise LatticeFormatError(f"not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise LatticeFormatError("spec file must be a JSON object")
    lat = from_json_dict(doc)
    ph = None
    if "phonons" in doc and doc["phonons"] is not None:
        try:
            ph = phonon.from_json_dict(doc["phonons"])
        except ValueError as exc:
            raise LatticeFormatError(str(exc)) from exc
        if ph.n_sites != lat.n_sites:
            raise LatticeFormatError(
                f"phonon coupling covers {ph.n_sites} sites, lattice has {lat.n_sites}"
            )
    return lat, ph


def load_spec(path: str | Path) -> tuple[LatticeSpec, PhononSpec | None]:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise LatticeFormatError(f"cannot read {path}: {exc}") from exc
    return parse_spec(text)


def save_spec(path: str | Path, lat: LatticeSpec, ph: PhononSpec | None = None) -> None:
    Path(path).write_text(serialize_spec(lat, ph))
