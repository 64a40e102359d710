"""
Tests for the structural causal model core.

These tests verify model validation, seeded simulation, interventions,
natural-unit rescaling, the implied covariance and the file formats.
"""

import json
from pathlib import Path

import numpy as np
import pandas as pd
import pytest

from src.scm import (
    Dataset,
    NodeKind,
    NodeSpec,
    ScmSpec,
    covariance_matrix,
    dataset_from_csv,
    dataset_to_csv,
    derive_noise_sds,
    load_scm,
    save_scm,
    simulate,
    simulate_intervention,
    standardizing_noise_sds,
    to_natural_units,
    validate_scm,
)
from src.scm.scm_core import scm_to_dict
from src.utils.errors import (
    CycleError,
    DuplicateNodeError,
    InfeasibleStandardizationError,
    ModelValidationError,
    NodeArityError,
    UnitsError,
    UnknownNodeError,
)

PAPER_ORDER = ["X", "M0", "Y0", "Hall", "Diet", "Y1", "dY"]


def _linear(name, parents=(), coefficients=(), noise_sd=1.0):
    return NodeSpec(
        name=name,
        kind=NodeKind.LINEAR_GAUSSIAN,
        parents=tuple(parents),
        coefficients=tuple(coefficients),
        noise_sd=noise_sd,
    )


def test_paper_spec_is_in_topological_order(paper_spec):
    """The weight-example model validates to its natural column order."""
    assert paper_spec.names == PAPER_ORDER
    assert validate_scm(paper_spec) == paper_spec


def test_validate_orders_shuffled_nodes(paper_spec):
    """Nodes given in reverse come back with every parent before its children."""
    shuffled = ScmSpec(nodes=tuple(reversed(paper_spec.nodes)), rescale=paper_spec.rescale)
    ordered = validate_scm(shuffled)
    position = {name: i for i, name in enumerate(ordered.names)}
    assert set(ordered.names) == set(PAPER_ORDER)
    for node in ordered.nodes:
        for parent in node.parents:
            assert position[parent] < position[node.name]


def test_cycle_is_rejected():
    spec = ScmSpec(nodes=(_linear("A", ["B"], [0.5]), _linear("B", ["A"], [0.5])))
    with pytest.raises(CycleError) as excinfo:
        validate_scm(spec)
    assert set(excinfo.value.cycle) == {"A", "B"}


@pytest.mark.parametrize("nodes, error", [
    ((_linear("A"), _linear("A")), DuplicateNodeError),
    ((_linear("A", ["Z"], [1.0]),), UnknownNodeError),
    ((_linear("A"), _linear("B", ["A"], [0.5, 0.2])), NodeArityError),
    ((NodeSpec(name="X", kind=NodeKind.SYMMETRIC_BINARY),
      NodeSpec(name="C", kind=NodeKind.COPY_OF_PARENT, parents=("X",), coefficients=(1.0,), noise_sd=0.3)),
     NodeArityError),
    ((NodeSpec(name="X", kind=NodeKind.SYMMETRIC_BINARY, parents=("X",), coefficients=(1.0,)),), CycleError),
])
def test_invalid_models_are_rejected(nodes, error):
    with pytest.raises(error):
        validate_scm(ScmSpec(nodes=nodes))


def test_validation_errors_are_value_errors():
    """Callers that only know ValueError still catch model problems."""
    with pytest.raises(ValueError):
        validate_scm(ScmSpec(nodes=(_linear("A"), _linear("A"))))


def test_rescale_key_must_name_a_node():
    spec = ScmSpec(nodes=(_linear("A"),), rescale={"B": (0.0, 1.0)})
    with pytest.raises(UnknownNodeError):
        validate_scm(spec)


def test_simulate_is_deterministic(paper_spec):
    first = simulate(paper_spec, 1000, 7)
    second = simulate(paper_spec, 1000, 7)
    other = simulate(paper_spec, 1000, 8)
    assert first.equals(second)
    assert not first.equals(other)
    assert first.names == PAPER_ORDER
    assert first.units == "standardized"


def test_simulated_columns_follow_structural_rules(small_dataset):
    x = small_dataset.column("X")
    assert set(np.unique(x)) == {-1.0, 1.0}
    np.testing.assert_array_equal(small_dataset.column("Hall"), x)
    np.testing.assert_array_equal(small_dataset.column("Diet"), x)
    np.testing.assert_allclose(
        small_dataset.column("dY"),
        small_dataset.column("Y1") - small_dataset.column("Y0"),
        atol=1e-9,
    )


def test_standardized_variances(paper_spec):
    ds = simulate(paper_spec, 200000, 11)
    for name in ("X", "M0", "Y0", "Y1"):
        assert np.var(ds.column(name)) == pytest.approx(1.0, abs=0.02)


def test_intervention_only_changes_descendants(paper_spec):
    """Forcing Y0 leaves upstream columns identical to the plain simulation."""
    plain = simulate(paper_spec, 2000, 3)
    forced = simulate_intervention(paper_spec, 2000, 3, {"Y0": 0.0})
    for name in ("X", "M0", "Hall", "Diet"):
        np.testing.assert_array_equal(forced.column(name), plain.column(name))
    np.testing.assert_array_equal(forced.column("Y0"), np.zeros(2000))
    assert not np.array_equal(forced.column("Y1"), plain.column("Y1"))


def test_intervention_on_unknown_node(paper_spec):
    with pytest.raises(UnknownNodeError):
        simulate_intervention(paper_spec, 10, 1, {"Q": 1.0})


def test_natural_units(paper_dataset):
    y0 = paper_dataset.column("Y0")
    m0 = paper_dataset.column("M0")
    assert paper_dataset.units == "natural"
    assert np.mean(y0) == pytest.approx(80.0, abs=0.5)
    assert np.std(y0) == pytest.approx(10.0, abs=0.5)
    assert np.mean(m0) == pytest.approx(30.0, abs=0.5)
    np.testing.assert_allclose(
        paper_dataset.column("dY"),
        paper_dataset.column("Y1") - y0,
        atol=1e-9,
    )
    np.testing.assert_array_equal(paper_dataset.column("Hall"), paper_dataset.column("X"))


def test_natural_units_twice_is_an_error(paper_dataset, paper_spec):
    with pytest.raises(UnitsError):
        to_natural_units(paper_dataset, paper_spec)


def test_covariance_matrix(paper_spec):
    names, cov = covariance_matrix(paper_spec)
    idx = {name: i for i, name in enumerate(names)}
    for name in ("X", "M0", "Y0", "Y1"):
        assert cov[idx[name], idx[name]] == pytest.approx(1.0, abs=1e-12)
    assert cov[idx["X"], idx["Y0"]] == pytest.approx(0.5, abs=1e-12)
    assert cov[idx["M0"], idx["Y0"]] == pytest.approx(-0.05, abs=1e-12)
    assert cov[idx["Y0"], idx["Y1"]] == pytest.approx(0.685, abs=1e-12)
    assert cov[idx["X"], idx["Diet"]] == pytest.approx(1.0, abs=1e-12)


def test_infeasible_standardization():
    spec = ScmSpec(nodes=(
        NodeSpec(name="X", kind=NodeKind.SYMMETRIC_BINARY),
        _linear("A", ["X"], [1.2]),
    ))
    with pytest.raises(InfeasibleStandardizationError) as excinfo:
        standardizing_noise_sds(spec)
    assert excinfo.value.node == "A"


def test_model_file_round_trip(paper_spec, tmp_path):
    path = tmp_path / "model.json"
    save_scm(paper_spec, path)
    loaded = load_scm(path)
    assert scm_to_dict(loaded) == scm_to_dict(paper_spec)


def test_canonical_model_file_matches_builder(paper_spec):
    """data/lords_paradox.json holds the same model build_paper_scm produces."""
    path = Path(__file__).resolve().parents[2] / "data" / "lords_paradox.json"
    loaded = load_scm(path)
    assert loaded.names == PAPER_ORDER
    noise = derive_noise_sds()
    for name, sd in noise.items():
        assert loaded.node(name).noise_sd == pytest.approx(sd, abs=1e-12)
    assert dict(loaded.rescale) == dict(paper_spec.rescale)


@pytest.mark.parametrize("document", [
    "{not json",
    json.dumps({"nodes": [{"name": "X", "kind": "bogus"}]}),
    json.dumps({"nodes": "X"}),
])
def test_bad_model_files(tmp_path, document):
    path = tmp_path / "bad.json"
    path.write_text(document)
    with pytest.raises(ModelValidationError):
        load_scm(path)


def test_dataset_csv_round_trip(small_dataset, tmp_path):
    path = tmp_path / "dataset.csv"
    dataset_to_csv(small_dataset, path)
    assert path.read_text().splitlines()[0] == "X,M0,Y0,Y1,Hall,Diet,dY"
    loaded = dataset_from_csv(path)
    assert loaded.names == small_dataset.names
    assert loaded.units == "natural"
    for name in small_dataset.names:
        np.testing.assert_allclose(loaded.column(name), small_dataset.column(name), rtol=1e-5)


def test_dataset_rejects_non_finite_values():
    with pytest.raises(ModelValidationError):
        Dataset(pd.DataFrame({"X": [1.0, np.nan]}))
    with pytest.raises(ModelValidationError):
        Dataset(pd.DataFrame({"X": []}))


def test_dataset_is_not_mutated_through_accessors(small_dataset):
    before = small_dataset.column("Y0")
    small_dataset.frame["Y0"] = 0.0
    small_dataset.column("Y0")[:] = 0.0
    np.testing.assert_array_equal(small_dataset.column("Y0"), before)
    with pytest.raises(UnknownNodeError):
        small_dataset.column("Q")


def test_parentless_node_without_noise_is_constant_zero():
    ds = simulate(ScmSpec(nodes=(_linear("A", noise_sd=0.0),)), 100, 5)
    np.testing.assert_array_equal(ds.column("A"), np.zeros(100))


def test_forcing_a_childless_node_leaves_other_columns_alone(paper_spec):
    plain = simulate(paper_spec, 2000, 21)
    forced = simulate_intervention(paper_spec, 2000, 21, {"Hall": 0.0})
    np.testing.assert_array_equal(forced.column("Hall"), np.zeros(2000))
    for name in PAPER_ORDER:
        if name != "Hall":
            np.testing.assert_array_equal(forced.column(name), plain.column(name))


def test_empty_rescale_map_keeps_values(paper_spec):
    bare = ScmSpec(nodes=paper_spec.nodes)
    ds = simulate(bare, 500, 13)
    converted = to_natural_units(ds, bare)
    assert converted.names == ds.names
    for name in ds.names:
        np.testing.assert_array_equal(converted.column(name), ds.column(name))
