import json
import math

import numpy as np
import pytest

from liebtowers import jsonfmt, phonon, specfile
from liebtowers.lattice import LatticeFormatError, build_lattice


def test_float_round_trip_exact():
    values = [0.1, -2.0 - 2.0 * math.sqrt(2.0), 1e-17, 3.0, -1234.5678901234567]
    for v in values:
        assert float(jsonfmt.format_float(v)) == v


def test_rejects_non_finite():
    with pytest.raises(ValueError):
        jsonfmt.format_float(float("nan"))
    with pytest.raises(ValueError):
        jsonfmt.dumps({"x": float("inf")})


def test_dumps_is_valid_json_and_deterministic():
    obj = {
        "b": [1, 2.5, None, True, False],
        "a": {"nested": [-0.1]},
        "s": 'quote " and \\ backslash',
        "empty_list": [],
        "empty_dict": {},
    }
    text = jsonfmt.dumps(obj)
    assert json.loads(text) == obj
    assert jsonfmt.dumps(obj) == text


def test_numpy_scalars_supported():
    text = jsonfmt.dumps({"i": np.int64(3), "f": np.float64(0.25), "b": np.bool_(True)})
    assert json.loads(text) == {"i": 3, "f": 0.25, "b": True}


def test_unserializable_type_raises():
    with pytest.raises(TypeError):
        jsonfmt.dumps({"x": object()})


def test_specfile_round_trip_with_phonons():
    lat = build_lattice(2, [(0, 1, -1.0)], [0.0, 0.0], bipartition=[0, 1])
    ph = phonon.holstein(2, g=0.8, omega=1.1, n_max=3)
    text = specfile.serialize_spec(lat, ph)
    lat2, ph2 = specfile.parse_spec(text)
    assert specfile.serialize_spec(lat2, ph2) == text
    assert ph2.n_max == 3


def test_specfile_rejects_mismatched_phonons():
    lat = build_lattice(2, [(0, 1, -1.0)], [0.0, 0.0])
    ph = phonon.holstein(3, g=0.8, omega=1.1, n_max=3)
    text = specfile.serialize_spec(lat, ph)
    with pytest.raises(LatticeFormatError):
        specfile.parse_spec(text)


def test_specfile_rejects_non_object():
    with pytest.raises(LatticeFormatError):
        specfile.parse_spec("[1, 2, 3]")
