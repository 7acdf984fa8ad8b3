"""JSON encodings for scalars, states, certificates, reductions and verdicts.

Scalars: rationals are strings ``"p/q"``; cyclotomic elements are
``{"order": n, "coeffs": ["p/q", ...]}`` in the reduced power basis of
zeta_n; float-backend values are ``{"float": [re, im]}``.

Certificates list ops in application order (first entry acts first):
``{"site": 1, "op": "L", "args": [0, "-1", 1]}``.
"""

from __future__ import annotations

import json
from typing import Any

from gmpy2 import mpq

from mfrf.elo import AddMul, Scale, SitedOp, Swap
from mfrf.exactnum import DEFAULT_TOL, ExactScalar, FloatScalar, as_exact, parse_rational_str
from mfrf.state import MultiState


class FormatError(ValueError):
    """Input that does not follow the documented JSON layout."""


# -- scalars -------------------------------------------------------------------


def _rat(q: mpq) -> str:
    return str(q)


def scalar_to_json(x) -> Any:
    if isinstance(x, FloatScalar):
        return {"float": [x.value.real, x.value.imag]}
    if x.order == 1:
        return _rat(x.coeffs[0])
    return {"order": x.order, "coeffs": [_rat(c) for c in x.coeffs]}


def scalar_from_json(obj, *, tol: float | None = None):
    """Parse a scalar; with ``tol`` set, exact inputs become float-backend values."""
    try:
        if isinstance(obj, str):
            val = parse_rational_str(obj)
        elif isinstance(obj, int) and not isinstance(obj, bool):
            val = as_exact(obj)
        elif isinstance(obj, dict) and "float" in obj:
            re, im = obj["float"]
            return FloatScalar(complex(float(re), float(im)), tol if tol is not None else DEFAULT_TOL)
        elif isinstance(obj, dict) and "order" in obj:
            order = obj["order"]
            if not isinstance(order, int) or isinstance(order, bool) or order < 1:
                raise FormatError(f"bad cyclotomic order {order!r}")
            coeffs = [parse_rational_str(c).coeffs[0] if isinstance(c, str) else mpq(int(c)) for c in obj["coeffs"]]
            if not coeffs:
                raise FormatError("empty coefficient list")
            val = ExactScalar.from_coeffs(order, coeffs)
        else:
            raise FormatError(f"cannot read scalar from {obj!r}")
    except FormatError:
        raise
    except (KeyError, TypeError, ValueError) as exc:
        raise FormatError(f"cannot read scalar from {obj!r}") from exc
    return FloatScalar(val, tol) if tol is not None else val


# -- states ------------------------------------------------------------------------


def state_to_json(state: MultiState) -> dict:
    return {
        "dims": list(state.dims),
        "terms": [{"idx": list(idx), "amp": scalar_to_json(c)} for idx, c in state.terms()],
    }


def state_from_json(obj, *, tol: float | None = None) -> MultiState:
    if not isinstance(obj, dict) or "dims" not in obj or "terms" not in obj:
        raise FormatError("a state needs 'dims' and 'terms'")
    dims = obj["dims"]
    if not isinstance(dims, list) or not all(isinstance(d, int) and not isinstance(d, bool) for d in dims):
        raise FormatError("'dims' must be a list of integers")
    terms = obj["terms"]
    if not isinstance(terms, list) or not terms:
        raise FormatError("'terms' must be a non-empty list")
    parsed = []
    for t in terms:
        try:
            idx = t["idx"]
            amp = t["amp"]
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad term {t!r}") from exc
        if not isinstance(idx, list) or not all(isinstance(i, int) and not isinstance(i, bool) for i in idx):
            raise FormatError(f"bad index {idx!r}")
        parsed.append((tuple(idx), scalar_from_json(amp)))
    state = MultiState.from_terms(dims, parsed)
    return state.to_float(tol) if tol is not None else state


# -- certificates ----------------------------------------------------------------------


def op_to_json(sop: SitedOp) -> dict:
    op = sop.op
    if isinstance(op, Swap):
        return {"site": sop.site, "op": "F", "args": [op.i, op.j]}
    if isinstance(op, Scale):
        return {"site": sop.site, "op": "S", "args": [op.k, scalar_to_json(op.lam)]}
    return {"site": sop.site, "op": "L", "args": [op.i, scalar_to_json(op.lam), op.j]}


def op_from_json(obj, *, tol: float | None = None) -> SitedOp:
    try:
        site, kind, args = obj["site"], obj["op"], obj["args"]
        if not isinstance(site, int) or site < 1:
            raise FormatError(f"bad site {site!r}")
        if kind == "F":
            i, j = args
            return SitedOp(site, Swap(_level(i), _level(j)))
        if kind == "S":
            k, lam = args
            return SitedOp(site, Scale(_level(k), scalar_from_json(lam, tol=tol)))
        if kind == "L":
            i, lam, j = args
            return SitedOp(site, AddMul(_level(i), scalar_from_json(lam, tol=tol), _level(j)))
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, FormatError):
            raise
        raise FormatError(f"bad op {obj!r}: {exc}") from exc
    raise FormatError(f"unknown op kind {kind!r}")


def _level(x) -> int:
    if not isinstance(x, int) or isinstance(x, bool) or x < 0:
        raise FormatError(f"bad level {x!r}")
    return x


def certificate_to_json(seq) -> list:
    return [op_to_json(s) for s in seq]


def certificate_from_json(obj, *, tol: float | None = None) -> list[SitedOp]:
    if not isinstance(obj, list):
        raise FormatError("a certificate is a list of ops")
    return [op_from_json(o, tol=tol) for o in obj]


# -- matrices ---------------------------------------------------------------------------


def matrix_to_json(m) -> list:
    return [[scalar_to_json(x) for x in row] for row in m]


def matrix_from_json(obj, *, tol: float | None = None) -> list[list]:
    if isinstance(obj, dict) and "matrix" in obj:
        obj = obj["matrix"]
    if not isinstance(obj, list) or not obj or not all(isinstance(r, list) for r in obj):
        raise FormatError("a matrix is a non-empty list of rows")
    d = len(obj)
    if any(len(r) != d for r in obj):
        raise FormatError("matrix must be square")
    return [[scalar_from_json(x, tol=tol) for x in row] for row in obj]


# -- results ---------------------------------------------------------------------------------


def reduction_to_json(res) -> dict:
    prof = res.profile
    return {
        "reduced": state_to_json(res.reduced),
        "certificate": certificate_to_json(res.certificate),
        "converged": res.converged,
        "passes": res.passes,
        "profile": {
            "site_pivots": {str(k): [list(p) for p in v] for k, v in prof.site_pivots.items()},
            "block_ranks": prof.block_ranks,
            "site_ranks": list(prof.site_ranks),
            "free_parameters": [{"idx": list(i), "amp": scalar_to_json(c)} for i, c in prof.free_parameters],
        },
    }


def _witness_value(v):
    if isinstance(v, MultiState):
        return state_to_json(v)
    return v


def verdict_to_json(v) -> dict:
    if v.kind == "equivalent":
        return {"verdict": "equivalent", "certificate": certificate_to_json(v.certificate)}
    if v.kind == "inequivalent":
        w = v.witness
        return {
            "verdict": "inequivalent",
            "witness": {
                "site_ranks_a": list(w.site_ranks_a),
                "site_ranks_b": list(w.site_ranks_b),
                "invariant": w.kind,
                "sites": list(w.sites),
                "value_a": _witness_value(w.value_a),
                "value_b": _witness_value(w.value_b),
                "description": w.description,
            },
        }
    return {"verdict": "unknown", "reason": v.reason}


def dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False)
