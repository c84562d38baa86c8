import json

import numpy as np
import pytest

from skewcoh.bases import gell_mann_basis, partition_basis
from skewcoh.linalg import random_density
from skewcoh.measurements import build_gsm, build_mub_prime, build_mum, builtin_sic, MubSet, MumSet, GsmSet
from skewcoh.serialization import FormatError, family_from_json, family_to_json, load_json, matrix_from_json, matrix_to_json


def test_matrix_round_trip():
    rho = random_density(3, 2, 1)
    obj = json.loads(json.dumps(matrix_to_json(rho)))
    assert obj["dim"] == 3
    assert len(obj["matrix"]) == 3 and len(obj["matrix"][0][0]) == 2
    np.testing.assert_array_equal(matrix_from_json(obj), rho)


@pytest.mark.parametrize(
    "obj, fragment",
    [
        ([], "expected an object"),
        ({"dim": 0, "matrix": []}, "dim"),
        ({"dim": 2, "matrix": [[[1, 0], [0, 0]]]}, "expected 2 rows"),
        ({"dim": 2, "matrix": [[[1, 0]], [[0, 0], [1, 0]]]}, "matrix[0]"),
        ({"dim": 1, "matrix": [[[1, "x"]]]}, "matrix[0][0]"),
        ({"dim": 1, "matrix": [[[1]]]}, "[re, im]"),
        ({"dim": 1, "matrix": [[[float("nan"), 0]]]}, "finite"),
    ],
)
def test_matrix_errors_name_the_field(obj, fragment):
    with pytest.raises(FormatError) as info:
        matrix_from_json(obj)
    assert fragment in str(info.value)


def _families():
    p = partition_basis(gell_mann_basis(3))
    return [build_mum(p, 0.05), build_gsm(gell_mann_basis(3), 0.005), build_mub_prime(3), builtin_sic(2)]


@pytest.mark.parametrize("family", _families(), ids=["mum", "gsm", "mub", "sic"])
def test_family_round_trip(family):
    obj = json.loads(json.dumps(family_to_json(family)))
    back = family_from_json(obj)
    assert type(back) is type(family)
    if isinstance(family, MubSet):
        np.testing.assert_array_equal(back.vectors, family.vectors)
        assert all(len(e["matrix"]) == 1 for e in obj["elements"])
    else:
        np.testing.assert_array_equal(back.elements, family.elements)
    if isinstance(family, MumSet):
        assert obj["kind"] == "mum" and back.kappa == family.kappa and back.t == family.t
    if isinstance(family, GsmSet):
        assert back.a == family.a and back.t == family.t


def test_envelope_kind_for_sic():
    obj = family_to_json(builtin_sic(3))
    assert obj["kind"] == "sic"
    assert obj["params"]["t"] is None


def test_family_errors():
    good = family_to_json(builtin_sic(2))
    with pytest.raises(FormatError, match="kind"):
        family_from_json({**good, "kind": "povm"})
    with pytest.raises(FormatError, match="elements"):
        family_from_json({**good, "elements": good["elements"][:3]})
    with pytest.raises(FormatError, match="params.a"):
        family_from_json({**good, "params": {"t": None}})


def test_load_json_reports_line(tmp_path):
    path = tmp_path / "bad.json"
    path.write_text('{\n "dim": 2,\n "matrix": [\n}\n')
    with pytest.raises(FormatError, match="line 4"):
        load_json(path)
