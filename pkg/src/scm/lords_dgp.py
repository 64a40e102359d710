"""
Lord's Paradox Data-Generating Process Module

This module builds the structural model behind the weight example: sex (X)
causes physical activity (M0), baseline weight (Y0) and follow-up weight (Y1);
hall and diet are exact copies of sex; M0 is a time-varying confounder of
Y0 and Y1. It also derives the noise scales that keep every continuous node
standardized, and computes ground-truth effects by path tracing, independent
of any simulated data.
"""

import json
import math
import logging
from typing import Dict, Iterable, List, Set

import networkx as nx
from pydantic import BaseModel, ConfigDict, model_validator

from src.scm.schema import NodeKind, NodeSpec, ScmSpec
from src.scm.scm_core import dependency_graph, standardizing_noise_sds, validate_scm
from src.utils.errors import NodeArityError, UnknownNodeError

logger = logging.getLogger(__name__)

EXPOSURE = "X"
CONFOUNDER = "M0"
BASELINE = "Y0"
FOLLOW_UP = "Y1"
HALL = "Hall"
DIET = "Diet"
CHANGE = "dY"

WEIGHT_KG = (80.0, 10.0)
ACTIVITY_MIN = (30.0, 10.0)


class PaperCoefficients(BaseModel):
    """Standardized path coefficients of the weight example."""
    model_config = ConfigDict(frozen=True)

    x_to_m0: float = 0.5
    x_to_y0: float = 0.7
    m0_to_y0: float = -0.4
    x_to_y1: float = 0.2
    m0_to_y1: float = -0.2
    y0_to_y1: float = 0.5
    diet_to_y1: float = 0.15


PAPER_COEFFICIENTS = PaperCoefficients()


class GroundTruth(BaseModel):
    """Boy-vs-girl contrasts in kg implied by the structural equations."""
    model_config = ConfigDict(frozen=True)

    tce_kg: float
    cde_kg: float
    y0_contrast_kg: float

    @property
    def y0_mediated_kg(self) -> float:
        return self.tce_kg - self.cde_kg

    @model_validator(mode="after")
    def check_finite(self):
        for value in (self.tce_kg, self.cde_kg, self.y0_contrast_kg):
            if not math.isfinite(value):
                raise ValueError("ground truth contrasts must be finite")
        return self


def _nodes(coeffs: PaperCoefficients, randomized: bool, noise: Dict[str, float]) -> List[NodeSpec]:
    if randomized:
        m0 = NodeSpec(name=CONFOUNDER, kind=NodeKind.LINEAR_GAUSSIAN, noise_sd=noise.get(CONFOUNDER, 0.0))
        y0 = NodeSpec(
            name=BASELINE,
            kind=NodeKind.LINEAR_GAUSSIAN,
            parents=(CONFOUNDER,),
            coefficients=(coeffs.m0_to_y0,),
            noise_sd=noise.get(BASELINE, 0.0),
        )
    else:
        m0 = NodeSpec(
            name=CONFOUNDER,
            kind=NodeKind.LINEAR_GAUSSIAN,
            parents=(EXPOSURE,),
            coefficients=(coeffs.x_to_m0,),
            noise_sd=noise.get(CONFOUNDER, 0.0),
        )
        y0 = NodeSpec(
            name=BASELINE,
            kind=NodeKind.LINEAR_GAUSSIAN,
            parents=(EXPOSURE, CONFOUNDER),
            coefficients=(coeffs.x_to_y0, coeffs.m0_to_y0),
            noise_sd=noise.get(BASELINE, 0.0),
        )

    return [
        NodeSpec(name=EXPOSURE, kind=NodeKind.SYMMETRIC_BINARY),
        m0,
        y0,
        NodeSpec(name=HALL, kind=NodeKind.COPY_OF_PARENT, parents=(EXPOSURE,), coefficients=(1.0,)),
        NodeSpec(name=DIET, kind=NodeKind.COPY_OF_PARENT, parents=(EXPOSURE,), coefficients=(1.0,)),
        NodeSpec(
            name=FOLLOW_UP,
            kind=NodeKind.LINEAR_GAUSSIAN,
            parents=(EXPOSURE, CONFOUNDER, BASELINE, DIET),
            coefficients=(coeffs.x_to_y1, coeffs.m0_to_y1, coeffs.y0_to_y1, coeffs.diet_to_y1),
            noise_sd=noise.get(FOLLOW_UP, 0.0),
        ),
        NodeSpec(
            name=CHANGE,
            kind=NodeKind.DIFFERENCE,
            parents=(FOLLOW_UP, BASELINE),
            coefficients=(1.0, -1.0),
        ),
    ]


def _rescale() -> Dict[str, tuple]:
    return {BASELINE: WEIGHT_KG, FOLLOW_UP: WEIGHT_KG, CONFOUNDER: ACTIVITY_MIN}


def _noise_sds(coeffs: PaperCoefficients, randomized: bool) -> Dict[str, float]:
    skeleton = ScmSpec(nodes=tuple(_nodes(coeffs, randomized, {})))
    return standardizing_noise_sds(skeleton)


def derive_noise_sds(coeffs: PaperCoefficients = PAPER_COEFFICIENTS) -> Dict[str, float]:
    """
    Derive the Gaussian noise sds that give M0, Y0 and Y1 unit variance.

    Args:
        coeffs: Standardized path coefficients

    Returns:
        Mapping of node name to noise sd

    Raises:
        InfeasibleStandardizationError: The coefficients already explain more
            than unit variance for some node
    """
    return _noise_sds(coeffs, randomized=False)


def build_paper_scm(coeffs: PaperCoefficients = PAPER_COEFFICIENTS) -> ScmSpec:
    """
    Build the weight-example model: X, M0, Y0, Hall, Diet, Y1, dY.

    Sex is coded girls = -1, boys = +1. There is no X-by-Y0 interaction.
    Y0 and Y1 rescale to 80 kg (sd 10), M0 to 30 minutes (sd 10).
    """
    noise = derive_noise_sds(coeffs)
    spec = ScmSpec(nodes=tuple(_nodes(coeffs, False, noise)), rescale=_rescale())
    logger.debug(f"Built weight-example model with noise sds {noise}")
    return validate_scm(spec)


def build_randomized_scm(coeffs: PaperCoefficients = PAPER_COEFFICIENTS) -> ScmSpec:
    """
    Variant with X assigned independently of everything measured before
    baseline: the X->M0 and X->Y0 edges are removed and the freed variance
    goes to noise, so M0 and Y0 keep unit variance.
    """
    noise = _noise_sds(coeffs, randomized=True)
    spec = ScmSpec(nodes=tuple(_nodes(coeffs, True, noise)), rescale=_rescale())
    return validate_scm(spec)


def _path_effect(graph: nx.DiGraph, source: str, target: str, blocked: Iterable[str] = ()) -> float:
    blocked_set: Set[str] = set(blocked)
    total = 0.0
    for path in nx.all_simple_paths(graph, source, target):
        if blocked_set.intersection(path[1:-1]):
            continue
        product = 1.0
        for parent, child in zip(path[:-1], path[1:]):
            product *= graph.edges[parent, child]["weight"]
        total += product
    return total


def ground_truth(
    spec: ScmSpec,
    exposure: str = EXPOSURE,
    outcome: str = FOLLOW_UP,
    mediator: str = BASELINE,
) -> GroundTruth:
    """
    Ground-truth boy-vs-girl contrasts by summing products of path coefficients.

    The exposure contrast is +1 versus -1 (a factor of two on the
    standardized scale); results are scaled by the natural sd of the
    outcome. Copies of the exposure are part of the exposure's effect.

    Args:
        spec: Linear structural model
        exposure: Exposure node
        outcome: Outcome node
        mediator: Node held fixed for the controlled direct effect

    Returns:
        GroundTruth with tce, cde and the exposure contrast on the mediator
    """
    ordered = validate_scm(spec)
    for name in (exposure, outcome, mediator):
        if name not in ordered.names:
            raise UnknownNodeError(name)
    for node in ordered.nodes:
        if node.kind == NodeKind.DIFFERENCE and node.name in (exposure, outcome, mediator):
            raise NodeArityError(f"Path tracing is not defined for derived difference node {node.name!r}")

    graph = dependency_graph(ordered)
    contrast = 2.0
    outcome_sd = ordered.natural_sd(outcome)
    mediator_sd = ordered.natural_sd(mediator)

    total = _path_effect(graph, exposure, outcome)
    direct = _path_effect(graph, exposure, outcome, blocked=[mediator])
    on_mediator = _path_effect(graph, exposure, mediator)

    truth = GroundTruth(
        tce_kg=contrast * outcome_sd * total,
        cde_kg=contrast * outcome_sd * direct,
        y0_contrast_kg=contrast * mediator_sd * on_mediator,
    )
    logger.info(
        f"Ground truth: TCE={truth.tce_kg:.3f} kg, CDE={truth.cde_kg:.3f} kg, "
        f"Y0 contrast={truth.y0_contrast_kg:.3f} kg"
    )
    return truth


def ground_truth_report(truth: GroundTruth) -> str:
    """JSON report of the ground-truth contrasts."""
    return json.dumps(
        {
            "tce_kg": truth.tce_kg,
            "cde_kg": truth.cde_kg,
            "y0_contrast_kg": truth.y0_contrast_kg,
            "y0_mediated_kg": truth.y0_mediated_kg,
        },
        indent=2,
    )
