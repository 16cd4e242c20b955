"""JSON serialization for descriptors, states, effects, observables,
vectors, and channels.

Matrix entries are row-major; complex-field systems encode each entry as
``[re, im]`` while real-field systems store plain numbers.  Descriptor
round-trips are bit-exact on sector indices.
"""

from __future__ import annotations

import json

import numpy as np

from .channels import Channel
from .errors import SchemaError
from .sectors import SystemDescriptor
from .statespace import Effect, Observable, PureVector, State


def _encode_matrix(mat: np.ndarray, field: str):
    if field == "real":
        return [[float(x) for x in row] for row in np.asarray(mat).real]
    return [
        [[float(x.real), float(x.imag)] for x in row] for row in np.asarray(mat)
    ]


def _decode_matrix(data, field: str):
    try:
        if field == "real":
            return np.array(data, dtype=np.float64)
        arr = np.array(data, dtype=np.float64)
        if arr.ndim == 2:  # tolerate plain-real input for complex systems
            return arr.astype(np.complex128)
        return arr[..., 0] + 1j * arr[..., 1]
    except (ValueError, IndexError) as exc:
        raise SchemaError(f"malformed matrix payload: {exc}")


def _encode_vector(vec: np.ndarray, field: str):
    if field == "real":
        return [float(x) for x in np.asarray(vec).real]
    return [[float(x.real), float(x.imag)] for x in np.asarray(vec)]


def _decode_vector(data, field: str):
    arr = np.array(data, dtype=np.float64)
    if field == "real":
        return arr
    if arr.ndim == 1:
        return arr.astype(np.complex128)
    return arr[:, 0] + 1j * arr[:, 1]


def descriptor_to_json(desc: SystemDescriptor) -> dict:
    return {
        "kind": desc.kind,
        "field": desc.field,
        "sectors": [list(s) for s in desc.sectors],
        "factors": (
            [descriptor_to_json(f) for f in desc.factors]
            if desc.factors is not None
            else None
        ),
    }


def descriptor_from_json(data: dict) -> SystemDescriptor:
    try:
        sectors = tuple(tuple(int(i) for i in s) for s in data["sectors"])
        factors = data.get("factors")
        total = sum(len(s) for s in sectors)
        return SystemDescriptor(
            kind=data["kind"],
            field=data["field"],
            total_dim=total,
            sectors=sectors,
            factors=(
                tuple(descriptor_from_json(f) for f in factors)
                if factors
                else None
            ),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed descriptor: {exc}")


def _blockwise_to_json(x) -> dict:
    return {
        "system": descriptor_to_json(x.system),
        "blocks": [_encode_matrix(b, x.system.field) for b in x.blocks],
    }


state_to_json = _blockwise_to_json
effect_to_json = _blockwise_to_json
observable_to_json = _blockwise_to_json


def _blockwise_from_json(data: dict, cls):
    try:
        desc = descriptor_from_json(data["system"])
        blocks = [_decode_matrix(b, desc.field) for b in data["blocks"]]
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed operator payload: {exc}")
    return cls(desc, blocks)


def state_from_json(data: dict) -> State:
    return _blockwise_from_json(data, State)


def effect_from_json(data: dict) -> Effect:
    return _blockwise_from_json(data, Effect)


def observable_from_json(data: dict) -> Observable:
    return _blockwise_from_json(data, Observable)


def pure_vector_to_json(v: PureVector) -> dict:
    return {
        "sector": v.sector,
        "amplitudes": _encode_vector(v.amplitudes, v.system.field),
    }


def pure_vector_from_json(data: dict, system: SystemDescriptor) -> PureVector:
    try:
        return PureVector(
            system,
            int(data["sector"]),
            _decode_vector(data["amplitudes"], system.field),
        )
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed pure vector: {exc}")


def channel_to_json(c: Channel) -> dict:
    return {
        "kind": c.tag,
        "input": descriptor_to_json(c.input_system),
        "output": descriptor_to_json(c.output_system),
        "kraus": [_encode_matrix(k, c.input_system.field) for k in c.kraus],
    }


def channel_from_json(data: dict) -> Channel:
    try:
        inp = descriptor_from_json(data["input"])
        out = descriptor_from_json(data["output"])
        kraus = tuple(_decode_matrix(k, inp.field) for k in data["kraus"])
        return Channel(inp, out, kraus, tag=data.get("kind", "general"))
    except (KeyError, TypeError) as exc:
        raise SchemaError(f"malformed channel: {exc}")


def dumps(obj, pretty: bool = False) -> str:
    """Deterministic JSON: sorted keys, shortest round-trip floats."""
    if pretty:
        return json.dumps(obj, sort_keys=True, indent=2)
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))
