import logging
import math
from typing import List, Literal, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from src import config
from src.applications.pagerank import PageRankConfig, build_google_matrix, classical_pagerank, quantum_pagerank
from src.dsl.pipeline import bind_pipeline, parse_angle, parse_pipeline
from src.errors import InputError, NumericalError
from src.graph.transition import validate_transition_matrix
from src.walk.operators import build_psi_matrix, make_phase_matrix
from src.walk.semiclassical import SemiclassicalConfig, build_semiclassical_matrix
from src.walk.simulator import evolve
from src.walk.state import initial_superposition, vector_to_matrix

config.configure_logging()
logger = logging.getLogger(__name__)

app = FastAPI(title="Szegedy Walk Simulator API")

Matrix = List[List[float]]


class WalkRequest(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    graph: Matrix
    steps: int = Field(ge=0)
    unitary: str = "S R"
    measured_register: Literal[1, 2, "both"] = Field(1, alias="register")
    theta_matrix: Optional[Matrix] = None
    # [re, im] pairs, index N*i + j holds a_ij; default is the equal superposition
    initial: Optional[List[List[float]]] = None
    policy: Literal["strict", "renormalize"] = "strict"
    apply_order: Literal["operator", "left"] = "operator"


class SemiclassicalRequest(BaseModel):
    graph: Matrix
    quantum_time: int = Field(ge=0)
    walk_class: Literal[1, 2] = 1
    unitary: str = "S R"
    batch_size: Optional[int] = None
    theta_matrix: Optional[Matrix] = None
    policy: Literal["strict", "renormalize"] = "strict"


class PageRankRequest(BaseModel):
    graph: Optional[Matrix] = None
    adjacency: Optional[Matrix] = None
    damping: float = 0.85
    steps: int = 100
    theta1: Optional[str] = None
    theta2: Optional[str] = None
    include_t0: bool = False
    compare_classical: bool = False


def _run(fn):
    try:
        return fn()
    except (InputError, ValidationError) as e:
        logger.warning(f"Rejected request: {e}")
        raise HTTPException(status_code=400, detail=str(e))
    except NumericalError as e:
        logger.error(f"Numerical failure: {e}")
        raise HTTPException(status_code=500, detail=str(e))


@app.get("/health")
def health_check():
    return {"status": "ok"}


@app.post("/walk")
def run_walk(request: WalkRequest):
    """
    Evolve a state under the given unitary and return the per-step distributions.
    """

    def walk():
        g = validate_transition_matrix(request.graph, policy=request.policy)
        theta = make_phase_matrix(request.theta_matrix) if request.theta_matrix is not None else None
        u = bind_pipeline(parse_pipeline(request.unitary), g, theta, apply_order=request.apply_order)
        if request.initial is None:
            phi0 = initial_superposition(build_psi_matrix(g, theta))
        else:
            if any(len(pair) != 2 for pair in request.initial):
                raise InputError("initial state entries must be [re, im] pairs")
            phi0 = vector_to_matrix([complex(re, im) for re, im in request.initial])
        result = evolve(phi0, u, request.steps, register=request.measured_register)
        return {
            "steps": request.steps,
            "unitary": u.label,
            "traces": {str(reg): trace.tolist() for reg, trace in sorted(result.traces.items())},
        }

    return _run(walk)


@app.post("/semiclassical")
def run_semiclassical(request: SemiclassicalRequest):
    def semiclassical():
        g = validate_transition_matrix(request.graph, policy=request.policy)
        theta = make_phase_matrix(request.theta_matrix) if request.theta_matrix is not None else None
        u = bind_pipeline(parse_pipeline(request.unitary), g, theta)
        cfg = SemiclassicalConfig(
            quantum_time=request.quantum_time, walk_class=request.walk_class, batch_size=request.batch_size
        )
        sc = build_semiclassical_matrix(g, u, cfg, theta)
        return {"quantum_time": sc.quantum_time, "walk_class": sc.walk_class, "matrix": sc.entries.tolist()}

    return _run(semiclassical)


@app.post("/pagerank")
def run_pagerank(request: PageRankRequest):
    """
    Quantum PageRank from a transition matrix or from raw adjacency data.
    """

    def pagerank():
        if (request.graph is None) == (request.adjacency is None):
            raise InputError("provide exactly one of 'graph' or 'adjacency'")
        if request.graph is not None:
            g = validate_transition_matrix(request.graph, policy="strict")
        else:
            g = build_google_matrix(request.adjacency, request.damping)

        angles = None
        if request.theta1 is not None or request.theta2 is not None:
            angles = (
                parse_angle(request.theta1) if request.theta1 is not None else math.pi,
                parse_angle(request.theta2) if request.theta2 is not None else math.pi,
            )
        cfg = PageRankConfig(
            steps=request.steps, apr_angles=angles, damping=request.damping, include_t0=request.include_t0
        )
        result = quantum_pagerank(g, cfg)
        body = {"ranking": result.ranking.values.tolist()}
        if request.compare_classical:
            body["classical"] = classical_pagerank(g).values.tolist()
        return body

    return _run(pagerank)
