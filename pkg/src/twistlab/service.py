"""HTTP service wrapping the core computations.

Each endpoint accepts a system description (the same JSON document the CLI
reads from disk) inline in the request body and returns the corresponding
report.  Refutation events map to HTTP 500 with a structured body; input
problems map to 422.
"""

from __future__ import annotations

from typing import Any, Optional

from fastapi import FastAPI, HTTPException
from pydantic import BaseModel, Field

from .averaging import ph_average, pcom_average_checked
from .crossed import CrossedElement
from .description import parse_description
from .errors import (DescriptionError, RefutationError, ResourceError,
                     UsageError)
from .groups import conjugate
from .powers import construct_pcom
from .rep import adaptive_norm_lower, ball_norm_lower
from .structure import (block_decompose, matrix_model, orbit_decomposition,
                        trace_correspondence)

app = FastAPI(title="twistlab", version="0.1.0")


class SystemRequest(BaseModel):
    description: dict


class ElementRequest(SystemRequest):
    element: str
    radius: int = 8
    guard: Optional[int] = None
    tol: float = 1e-8
    max_iter: int = Field(default=10_000, ge=1)
    seed: int = 42


class AveragePhRequest(ElementRequest):
    eps: float = 0.01
    kmax: int = 4


class AveragePcomRequest(ElementRequest):
    count: int = Field(default=64, alias="N", ge=1)

    model_config = {"populate_by_name": True}


def _load(description: dict):
    try:
        return parse_description(description)
    except DescriptionError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


def _element(desc, name: str) -> CrossedElement:
    if name not in desc.elements:
        raise HTTPException(status_code=422,
                            detail=f"no element named {name!r} in the description")
    return desc.elements[name]


def _guard(fn, *args, **kwargs) -> Any:
    try:
        return fn(*args, **kwargs)
    except RefutationError as exc:
        raise HTTPException(status_code=500,
                            detail={"refutation": str(exc)}) from exc
    except ResourceError as exc:
        raise HTTPException(status_code=507, detail=str(exc)) from exc
    except UsageError as exc:
        raise HTTPException(status_code=422, detail=str(exc)) from exc


@app.get("/health")
def health():
    return {"status": "ok"}


@app.post("/validate")
def validate(req: SystemRequest):
    desc = _load(req.description)
    return desc.system.report.as_dict()


@app.post("/norm")
def norm(req: ElementRequest):
    desc = _load(req.description)
    x = _element(desc, req.element)
    if req.guard is not None:
        est = _guard(adaptive_norm_lower, x, rounds=req.guard, tol=req.tol,
                     max_iter=req.max_iter, seed=req.seed)
    else:
        est = _guard(ball_norm_lower, x, req.radius, tol=req.tol,
                     max_iter=req.max_iter, seed=req.seed)
    return {"norm_lower": est.value, "l1_upper": x.l1_norm(),
            "converged": est.converged, "method": est.method}


@app.post("/average/ph")
def average_ph(req: AveragePhRequest):
    desc = _load(req.description)
    x = _element(desc, req.element)
    _, trace = _guard(ph_average, x, req.eps, k_max=req.kmax, seed=req.seed)
    return trace.as_dict()


@app.post("/average/pcom")
def average_pcom(req: AveragePcomRequest):
    desc = _load(req.description)
    x = _element(desc, req.element)
    cert = _guard(construct_pcom, desc.system.group, sorted(
        x.support(), key=lambda w: (w.word_length(), repr(w))))
    if not cert.conjugator.is_identity():
        u = CrossedElement.lam(desc.system, cert.conjugator)
        x = u.multiply(x).multiply(u.adjoint())
    y_n, bound, nl = _guard(pcom_average_checked, x, cert, req.count, seed=req.seed)
    return {"N": req.count, "terms": y_n.term_count(), "norm_lower": nl,
            "l1_upper": y_n.l1_norm(), "certified_bound": bound}


@app.post("/ideals")
def ideals(req: SystemRequest):
    from .cli import _ideal_payload
    desc = _load(req.description)
    return _guard(_ideal_payload, desc.system, 42)


@app.post("/traces")
def traces(req: SystemRequest):
    desc = _load(req.description)
    return _guard(trace_correspondence, desc.system).as_dict()


@app.post("/decompose")
def decompose(req: SystemRequest):
    desc = _load(req.description)
    model = _guard(matrix_model, desc.system)
    blocks = _guard(block_decompose, model)
    out = {"ambient_dimension": model.ambient_dim,
           "algebra_dimension": model.dimension,
           "blocks": blocks.as_dict()}
    if desc.system.algebra.is_commutative:
        out["orbits"] = _guard(orbit_decomposition, desc.system).as_dict()
    return out


@app.post("/report")
def report(req: SystemRequest):
    desc = _load(req.description)
    system = desc.system
    out: dict = {"validation": system.report.as_dict()}
    if system.group.kind == "finite":
        from .cli import _ideal_payload
        model = _guard(matrix_model, system)
        blocks = _guard(block_decompose, model)
        out["decomposition"] = {"ambient_dimension": model.ambient_dim,
                                "algebra_dimension": model.dimension,
                                "blocks": blocks.as_dict()}
        out["ideals"] = _guard(_ideal_payload, system, 42)
        out["traces"] = _guard(trace_correspondence, system).as_dict()
        if system.algebra.is_commutative:
            out["orbits"] = _guard(orbit_decomposition, system).as_dict()
    return out
