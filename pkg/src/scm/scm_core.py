"""
Structural Causal Model Core Module for the Lord's Paradox Laboratory

This module validates linear-Gaussian structural causal models, samples them
in topological order (optionally under a forced-value intervention), converts
standardized draws to natural units, computes the covariance implied by the
structural equations, and reads/writes the JSON model and CSV dataset files.
"""

import json
import logging
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Tuple, Union

import networkx as nx
import numpy as np
import pandas as pd
from pydantic import ValidationError

from src.scm.schema import Dataset, NodeKind, NodeSpec, ScmSpec, Units
from src.utils.errors import (
    CycleError,
    DuplicateNodeError,
    InfeasibleStandardizationError,
    ModelValidationError,
    NodeArityError,
    UnitsError,
    UnknownNodeError,
)
from src.utils.rng import node_rng

logger = logging.getLogger(__name__)

# Noise variances this close below zero are rounding, not infeasibility.
_VARIANCE_TOLERANCE = 1e-12


def _check_node(node: NodeSpec) -> None:
    n_parents = len(node.parents)
    if len(node.coefficients) != n_parents:
        raise NodeArityError(
            f"Node {node.name!r}: {len(node.coefficients)} coefficient(s) for {n_parents} parent(s)"
        )
    if len(set(node.parents)) != n_parents:
        raise NodeArityError(f"Node {node.name!r} lists a parent more than once")
    if node.name in node.parents:
        raise CycleError([node.name, node.name])

    if node.kind == NodeKind.SYMMETRIC_BINARY:
        if n_parents:
            raise NodeArityError(f"Node {node.name!r}: symmetric_binary nodes take no parents")
    elif node.kind == NodeKind.COPY_OF_PARENT:
        if n_parents != 1 or node.coefficients[0] != 1.0 or node.noise_sd != 0.0:
            raise NodeArityError(
                f"Node {node.name!r}: copy_of_parent needs exactly one parent, coefficient 1 and noise_sd 0"
            )
    elif node.kind == NodeKind.DIFFERENCE:
        if n_parents != 2 or tuple(node.coefficients) != (1.0, -1.0) or node.noise_sd != 0.0:
            raise NodeArityError(
                f"Node {node.name!r}: difference needs two parents with coefficients (+1, -1) and noise_sd 0"
            )


def dependency_graph(spec: ScmSpec) -> nx.DiGraph:
    """Directed graph with an edge parent -> child weighted by the path coefficient."""
    graph = nx.DiGraph()
    for node in spec.nodes:
        graph.add_node(node.name, kind=node.kind)
    for node in spec.nodes:
        for parent, coef in zip(node.parents, node.coefficients):
            graph.add_edge(parent, node.name, weight=float(coef))
    return graph


def validate_scm(spec: ScmSpec) -> ScmSpec:
    """
    Validate a structural model and return it with nodes in topological order.

    Ties between nodes that could come in either order are broken by their
    position in the input, so an already ordered model is returned unchanged.

    Args:
        spec: Model to validate

    Returns:
        The same model with nodes topologically ordered

    Raises:
        DuplicateNodeError, NodeArityError, UnknownNodeError, CycleError
    """
    seen = set()
    for node in spec.nodes:
        if node.name in seen:
            raise DuplicateNodeError(node.name)
        seen.add(node.name)

    for node in spec.nodes:
        _check_node(node)
        for parent in node.parents:
            if parent not in seen:
                raise UnknownNodeError(parent, context=f"parent of {node.name!r}")

    for name, (_, target_sd) in spec.rescale.items():
        if name not in seen:
            raise UnknownNodeError(name, context="rescale key")
        if not target_sd > 0:
            raise ModelValidationError(f"Rescale target sd for {name!r} must be positive, got {target_sd}")

    graph = dependency_graph(spec)
    if not nx.is_directed_acyclic_graph(graph):
        cycle = [edge[0] for edge in nx.find_cycle(graph)]
        raise CycleError(cycle + cycle[:1])

    position = {node.name: i for i, node in enumerate(spec.nodes)}
    order = list(nx.lexicographical_topological_sort(graph, key=lambda name: position[name]))
    by_name = {node.name: node for node in spec.nodes}
    return spec.model_copy(update={"nodes": tuple(by_name[name] for name in order)})


def _draw_node(node: NodeSpec, columns: Dict[str, np.ndarray], n: int, rng: np.random.Generator) -> np.ndarray:
    if node.kind == NodeKind.SYMMETRIC_BINARY:
        return np.where(rng.random(n) < 0.5, -1.0, 1.0)
    if node.kind == NodeKind.COPY_OF_PARENT:
        return columns[node.parents[0]].copy()
    if node.kind == NodeKind.DIFFERENCE:
        return columns[node.parents[0]] - columns[node.parents[1]]

    values = np.zeros(n)
    for parent, coef in zip(node.parents, node.coefficients):
        values = values + coef * columns[parent]
    if node.noise_sd > 0:
        values = values + node.noise_sd * rng.standard_normal(n)
    return values


def _simulate(spec: ScmSpec, n: int, seed: int, forced: Mapping[str, float]) -> Dataset:
    if n < 1:
        raise ModelValidationError(f"n must be at least 1, got {n}")
    ordered = validate_scm(spec)
    for name in forced:
        if name not in ordered.names:
            raise UnknownNodeError(name, context="forced node")

    columns: Dict[str, np.ndarray] = {}
    for index, node in enumerate(ordered.nodes):
        if node.name in forced:
            columns[node.name] = np.full(n, float(forced[node.name]))
        else:
            # every node owns a stream keyed by its position, so forcing one
            # node never shifts the draws of another
            columns[node.name] = _draw_node(node, columns, n, node_rng(seed, index))
    return Dataset.from_columns(columns, units="standardized")


def simulate(spec: ScmSpec, n: int, seed: int) -> Dataset:
    """
    Draw n observations from the model on the standardized scale.

    Args:
        spec: Structural model (validated on entry)
        n: Number of rows
        seed: Non-negative 64-bit seed; identical inputs give identical output

    Returns:
        Standardized Dataset with one column per node in topological order
    """
    logger.debug(f"Simulating n={n} rows with seed {seed}")
    return _simulate(spec, n, seed, {})


def simulate_intervention(spec: ScmSpec, n: int, seed: int, forced: Mapping[str, float]) -> Dataset:
    """
    Simulate under do(forced): forced nodes are set for every row and their
    descendants are recomputed; all other columns match simulate() for the
    same seed. Forced values are on the standardized scale.
    """
    logger.debug(f"Simulating intervention {dict(forced)} with n={n}, seed {seed}")
    return _simulate(spec, n, seed, forced)


def to_natural_units(ds: Dataset, spec: ScmSpec) -> Dataset:
    """
    Apply the affine rescaling value -> target_mean + target_sd * value.

    Derived nodes (copies and differences) that are not themselves rescaled
    are recomputed from their parents afterwards, so the change score always
    equals follow-up minus baseline in the new units.

    Raises:
        UnitsError: The dataset is already in natural units
    """
    if ds.units == "natural":
        raise UnitsError("Dataset is already in natural units")

    ordered = validate_scm(spec)
    columns = {name: ds.column(name) for name in ds.names}
    for name, (target_mean, target_sd) in ordered.rescale.items():
        if name in columns:
            columns[name] = target_mean + target_sd * columns[name]

    for node in ordered.nodes:
        if node.name in ordered.rescale or node.name not in columns:
            continue
        if not all(parent in columns for parent in node.parents):
            continue
        if node.kind == NodeKind.DIFFERENCE:
            columns[node.name] = columns[node.parents[0]] - columns[node.parents[1]]
        elif node.kind == NodeKind.COPY_OF_PARENT:
            columns[node.name] = columns[node.parents[0]].copy()

    return Dataset.from_columns(columns, units="natural")


def _structural_weights(node: NodeSpec, index: Dict[str, int], size: int) -> np.ndarray:
    weights = np.zeros(size)
    for parent, coef in zip(node.parents, node.coefficients):
        weights[index[parent]] += coef
    return weights


def _covariance(nodes: Tuple[NodeSpec, ...], standardize: bool) -> Tuple[np.ndarray, Dict[str, float]]:
    names = [node.name for node in nodes]
    index = {name: i for i, name in enumerate(names)}
    size = len(names)
    cov = np.zeros((size, size))
    noise_sds: Dict[str, float] = {}

    for i, node in enumerate(nodes):
        if node.kind == NodeKind.SYMMETRIC_BINARY:
            cov[i, i] = 1.0
            continue
        w = _structural_weights(node, index, size)
        explained = float(w @ cov @ w)
        cross = cov @ w
        cov[i, :] = cross
        cov[:, i] = cross

        noise_var = node.noise_sd ** 2
        if standardize and node.kind == NodeKind.LINEAR_GAUSSIAN:
            noise_var = 1.0 - explained
            if noise_var < -_VARIANCE_TOLERANCE:
                raise InfeasibleStandardizationError(node.name, noise_var)
            noise_var = max(noise_var, 0.0)
            noise_sds[node.name] = float(np.sqrt(noise_var))
        elif node.kind != NodeKind.LINEAR_GAUSSIAN:
            noise_var = 0.0
        cov[i, i] = explained + noise_var

    return cov, noise_sds


def covariance_matrix(spec: ScmSpec) -> Tuple[List[str], np.ndarray]:
    """
    Population covariance implied by the structural equations (standardized scale).

    Returns:
        (node names in topological order, covariance matrix)
    """
    ordered = validate_scm(spec)
    cov, _ = _covariance(ordered.nodes, standardize=False)
    return ordered.names, cov


def standardizing_noise_sds(spec: ScmSpec) -> Dict[str, float]:
    """
    Noise sds that give every linear_gaussian node a population variance of
    exactly one, given the path coefficients and the already standardized
    parents. The noise_sd values stored in the spec are ignored.

    Raises:
        InfeasibleStandardizationError: A node's parents explain more than unit variance
    """
    ordered = validate_scm(spec)
    _, noise_sds = _covariance(ordered.nodes, standardize=True)
    return noise_sds


def load_scm(path: Union[str, Path]) -> ScmSpec:
    """Load and validate a model JSON document."""
    with open(path, "r") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise ModelValidationError(f"Model file {path} is not valid JSON: {e}") from e
    return scm_from_dict(document)


def scm_from_dict(document: Mapping) -> ScmSpec:
    try:
        spec = ScmSpec(**document)
    except (ValidationError, TypeError) as e:
        raise ModelValidationError(f"Invalid model document: {e}") from e
    return validate_scm(spec)


def scm_to_dict(spec: ScmSpec) -> Dict:
    document = spec.model_dump(mode="json")
    document["rescale"] = {name: list(target) for name, target in spec.rescale.items()}
    return document


def save_scm(spec: ScmSpec, path: Union[str, Path]) -> None:
    """Write a model as an indented JSON document."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w") as f:
        json.dump(scm_to_dict(spec), f, indent=2)
        f.write("\n")
    logger.info(f"Saved structural model with {len(spec.nodes)} nodes to {path}")


def dataset_to_csv(ds: Dataset, path: Union[str, Path]) -> None:
    """Write a dataset with a header row and 6 significant digits."""
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    ds.frame.to_csv(path, index=False, float_format="%.6g")
    logger.info(f"Wrote {ds.n} rows ({ds.units}) to {path}")


def dataset_from_csv(path: Union[str, Path], units: Units = "natural") -> Dataset:
    """Read a dataset written by dataset_to_csv (or any numeric CSV with a header)."""
    try:
        frame = pd.read_csv(path)
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ModelValidationError(f"Cannot read dataset {path}: {e}") from e
    non_numeric = [c for c in frame.columns if not pd.api.types.is_numeric_dtype(frame[c])]
    if non_numeric:
        raise ModelValidationError(f"Dataset {path} has non-numeric column(s): {', '.join(non_numeric)}")
    return Dataset(frame, units=units)
