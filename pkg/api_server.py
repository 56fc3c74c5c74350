#!/usr/bin/env python3
from fastapi import FastAPI, HTTPException, Query
from fastapi.middleware.cors import CORSMiddleware
from typing import Optional
import logging
import uvicorn

from config import build_scheme, parse_rationals
from errors import WorkbenchError
from exprdsl import format as format_poly
from exprdsl import parse
from field import DEFAULT_CONSTANTS, ModeSet, vacuum_energy
from fock import DEFAULT_MAX_DIMENSION, FockRep, vev_numeric
from opalgebra import CommutatorScheme, normal_order, vev

logging.basicConfig(level=logging.INFO, format='%(asctime)s - %(levelname)s - %(message)s')
logger = logging.getLogger(__name__)

app = FastAPI(title="Vacuum Workbench API")

app.add_middleware(
    CORSMiddleware,
    allow_origins=["*"],
    allow_credentials=True,
    allow_methods=["GET"],
    allow_headers=["*"],
)


def _scheme(scheme: str, n: Optional[str]) -> CommutatorScheme:
    if scheme not in ("standard", "paper"):
        raise HTTPException(status_code=400, detail=f"scheme must be 'standard' or 'paper', got {scheme!r}")
    try:
        weights = parse_rationals(n) if n else None
    except ValueError as e:
        raise HTTPException(status_code=400, detail=f"invalid n: {e}")
    if scheme == "standard" and weights:
        raise HTTPException(status_code=400, detail="n only applies to scheme kind 'paper'")
    try:
        return build_scheme(scheme, n=weights)
    except WorkbenchError as e:
        raise HTTPException(status_code=400, detail=str(e))


def _exact(value) -> dict:
    z = complex(value)
    return {"exact": str(value), "value": z.real if z.imag == 0 else {"re": z.real, "im": z.imag}}


@app.get("/api/vev")
async def get_vev(expr: str = Query(..., max_length=64 * 1024),
                  scheme: str = "paper",
                  n: Optional[str] = None,
                  nmax: int = Query(2, ge=1, le=8)):
    """Exact and Fock-space vacuum expectation value of an expression"""
    commutator_scheme = _scheme(scheme, n)
    try:
        p = parse(expr)
        exact_value = vev(p, commutator_scheme)
        rep = FockRep.for_poly(p, commutator_scheme, max(nmax, -(-p.degree // 2)), DEFAULT_MAX_DIMENSION)
        numeric_value = vev_numeric(p, rep)
    except WorkbenchError as e:
        raise HTTPException(status_code=400, detail=str(e))
    return {
        "expression": expr,
        "scheme": commutator_scheme.describe(),
        "normal_form": format_poly(normal_order(p, commutator_scheme)),
        "exact": str(exact_value),
        "numeric": {"re": numeric_value.real, "im": numeric_value.imag},
    }


@app.get("/api/vacuum-energy")
async def get_vacuum_energy(scheme: str = "paper",
                            n: Optional[str] = None,
                            L: str = "1",
                            modes: str = "0,0,1;0,0,-1"):
    """Standard raw, standard normal-ordered and paper raw vacuum energies, plus the raw value under `scheme`"""
    selected = _scheme(scheme, n)
    paper = selected if scheme == "paper" else CommutatorScheme.paper()
    try:
        length = parse_rationals(L)
        if len(length) != 1:
            raise ValueError(f"L must be a single rational, got {L!r}")
        ms = ModeSet.from_string(length[0], modes)
    except (ValueError, WorkbenchError) as e:
        raise HTTPException(status_code=400, detail=str(e))

    standard = CommutatorScheme.standard()
    return {
        "L": str(ms.L),
        "modes": [list(m) for m in ms.modes],
        "standard_raw": _exact(vacuum_energy(ms, standard, DEFAULT_CONSTANTS)),
        "standard_normal_ordered": _exact(vacuum_energy(ms, standard, DEFAULT_CONSTANTS, normal_ordered=True)),
        "paper_raw": _exact(vacuum_energy(ms, paper, DEFAULT_CONSTANTS)),
        "paper_scheme": paper.describe(),
        "selected": dict(_exact(vacuum_energy(ms, selected, DEFAULT_CONSTANTS)), scheme=selected.describe()),
    }


@app.get("/api/health")
async def health_check():
    return {"status": "healthy"}


if __name__ == "__main__":
    import argparse
    parser = argparse.ArgumentParser(description="Read-only HTTP API over the vacuum workbench")
    parser.add_argument('--port', type=int, default=5000, help='Port to run server on')
    parser.add_argument('--host', default='127.0.0.1', help='Host to bind to')

    args = parser.parse_args()

    uvicorn.run(app, host=args.host, port=args.port)
