from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import pytest

from lie_spray.algebra import (
    AlgebraDefinition,
    LieAlgebra,
    MatrixRep,
    ad_matrix,
    algebra_from_definition,
    bracket,
    builtin,
    catalog_names,
    read_algebra,
    validate,
    write_algebra,
)
from lie_spray.errors import ConfigError, DimensionMismatchError, UnknownAlgebraError

FIXTURES_DIR = Path(__file__).parent / "fixtures"


def test_catalog_brackets():
    su2 = builtin("su2")
    e1, e2, e3 = np.eye(3)
    np.testing.assert_array_equal(bracket(su2, e1, e2), e3)
    np.testing.assert_array_equal(bracket(su2, e2, e3), e1)
    np.testing.assert_array_equal(bracket(su2, e3, e1), e2)

    aff1 = builtin("aff1")
    np.testing.assert_array_equal(bracket(aff1, [1, 0], [0, 1]), [0, 1])
    np.testing.assert_array_equal(bracket(aff1, [0, 1], [1, 0]), [0, -1])

    heisenberg = builtin("heisenberg3")
    np.testing.assert_array_equal(bracket(heisenberg, e1, e2), e3)
    np.testing.assert_array_equal(bracket(heisenberg, e1, e3), np.zeros(3))


def test_ad_matrix_columns_are_brackets():
    algebra = builtin("sl2")
    y = np.array([0.3, -1.2, 0.7])
    ad = ad_matrix(algebra, y)
    for j, e in enumerate(np.eye(3)):
        np.testing.assert_allclose(ad[:, j], bracket(algebra, y, e), atol=1e-15)


@pytest.mark.parametrize("name", catalog_names())
def test_catalog_algebras_validate(name: str):
    report = validate(builtin(name))
    assert report.ok
    assert report.rep_residual is not None and report.rep_residual < 1e-12
    assert report.warnings == ()


def test_unimodular_and_centre():
    assert validate(builtin("su2")).unimodular
    assert validate(builtin("heisenberg3")).unimodular
    aff1 = validate(builtin("aff1"))
    assert not aff1.unimodular
    assert aff1.trace_ad == (1.0, 0.0)
    assert builtin("heisenberg3").center_dimension() == 1
    assert builtin("abelian(3)").center_dimension() == 3
    assert builtin("su2").center_dimension() == 0


def test_jacobi_violation_is_reported_not_raised():
    # [e1, e2] = e2, [e2, e3] = e1 fails the Jacobi identity
    broken = LieAlgebra.from_brackets(3, {(0, 1): {1: 1.0}, (1, 2): {0: 1.0}}, "broken")
    report = validate(broken)
    assert report.jacobi_residual > 0.5
    assert not report.ok


def test_centre_without_representation_warns():
    bare = LieAlgebra.from_brackets(3, {(0, 1): {2: 1.0}}, "bare-heisenberg")
    report = validate(bare)
    assert report.rep_residual is None
    assert any("centre" in warning for warning in report.warnings)


def test_killing_form_of_su2():
    np.testing.assert_allclose(builtin("su2").killing_form(), -2.0 * np.eye(3), atol=1e-15)


def test_derived_direction():
    np.testing.assert_array_equal(builtin("aff1").derived_direction(), [0.0, 1.0])
    assert builtin("su2").derived_direction() is None
    assert builtin("abelian(2)").derived_dimension() == 0


def test_unknown_builtin():
    with pytest.raises(UnknownAlgebraError, match="unknown algebra 'so7'"):
        builtin("so7")


def test_definition_file_round_trip(tmp_path: Path):
    algebra = LieAlgebra.from_brackets(2, {(0, 1): {0: 0.1, 1: 1.0 / 3.0}}, "irrational")
    path = write_algebra(algebra, tmp_path / "algebra.json")
    loaded = read_algebra(path)
    assert loaded.name == "irrational"
    np.testing.assert_array_equal(loaded.c, algebra.c)


def test_definition_file_with_representation():
    algebra = read_algebra(FIXTURES_DIR / "heisenberg3.json")
    assert algebra.rep is not None
    assert validate(algebra).ok
    np.testing.assert_array_equal(algebra.c, builtin("heisenberg3").c)


def test_definition_file_errors(tmp_path: Path):
    with pytest.raises(FileNotFoundError):
        read_algebra(tmp_path / "missing.json")

    bad_json = tmp_path / "bad.json"
    bad_json.write_text('{"dim": 2,\n "constants": [}', encoding="utf-8")
    with pytest.raises(ConfigError) as syntax:
        read_algebra(bad_json)
    assert syntax.value.line == 2

    bad_index = tmp_path / "index.json"
    bad_index.write_text(json.dumps({"dim": 2, "constants": [[1, 3, 1, 1.0]]}), encoding="utf-8")
    with pytest.raises(ConfigError) as index:
        read_algebra(bad_index)
    assert index.value.key_path == "constants[0]"


def test_definition_file_rejects_unknown_keys(tmp_path: Path):
    path = tmp_path / "typo.json"
    path.write_text(json.dumps({"dim": 2, "constans": [[1, 2, 2, 1.0]]}), encoding="utf-8")
    with pytest.raises(ConfigError, match="unknown key 'constans'") as excinfo:
        read_algebra(path)
    assert excinfo.value.key_path == "constans"

    rep = {"dim": 1, "rep": {"size": 1, "e1": [1.0], "faithfull": True}}
    path.write_text(json.dumps(rep), encoding="utf-8")
    with pytest.raises(ConfigError) as rep_error:
        read_algebra(path)
    assert rep_error.value.key_path == "rep.faithfull"


def test_inline_definition_is_built_from_the_validated_model():
    definition = AlgebraDefinition.model_validate({"dim": 2, "constants": [[1, 2, 2, 1.0]]})
    algebra = algebra_from_definition(definition, key_prefix="algebra.inline.")
    np.testing.assert_array_equal(algebra.c, builtin("aff1").c)
    with pytest.raises(ConfigError) as excinfo:
        algebra_from_definition(AlgebraDefinition(dim=2, constants=[(1, 2, 3, 1.0)]), key_prefix="algebra.inline.")
    assert excinfo.value.key_path == "algebra.inline.constants[0]"


def test_malformed_representation_images():
    with pytest.raises(DimensionMismatchError, match="representation image e2"):
        MatrixRep.from_matrices([np.eye(2), np.eye(3)])
    with pytest.raises(DimensionMismatchError):
        LieAlgebra.from_constants(np.zeros((2, 2, 3)))
