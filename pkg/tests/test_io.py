"""JSON round trips for descriptors, operators, vectors, and channels."""

import numpy as np
import pytest

import gptkit as g
from gptkit import io as gio
from gptkit.errors import SchemaError
from gptkit.sampling import random_pure_state, random_state, trial_rng


def test_state_roundtrip_complex():
    comp = g.compose(g.make_classical(2), g.make_coherent(2))
    rng = trial_rng(90, 0)
    rho = random_state(comp, rng)
    back = gio.state_from_json(gio.state_to_json(rho))
    for a, b in zip(back.blocks, rho.blocks):
        assert np.max(np.abs(a - b)) < 1e-15
    assert back.system == rho.system


def test_state_roundtrip_real_field_omits_imag():
    q = g.make_quantum(2, "real")
    rng = trial_rng(91, 0)
    rho = random_state(q, rng)
    payload = gio.state_to_json(rho)
    entry = payload["blocks"][0][0][0]
    assert isinstance(entry, float)
    back = gio.state_from_json(payload)
    assert np.max(np.abs(back.blocks[0] - rho.blocks[0])) < 1e-15


def test_effect_and_observable_roundtrip():
    q = g.make_quantum(3)
    e = g.deterministic_effect(q)
    assert gio.effect_from_json(gio.effect_to_json(e)) == e
    x = g.Observable(q, [np.diag([1.0, -2.0, 0.5])])
    back = gio.observable_from_json(gio.observable_to_json(x))
    assert np.max(np.abs(back.blocks[0] - x.blocks[0])) < 1e-15


def test_pure_vector_roundtrip():
    comp = g.compose(g.make_classical(2), g.make_coherent(2))
    rng = trial_rng(92, 0)
    v = random_pure_state(comp, rng)
    back = gio.pure_vector_from_json(gio.pure_vector_to_json(v), comp)
    assert back.sector == v.sector
    assert np.max(np.abs(back.amplitudes - v.amplitudes)) < 1e-15


def test_channel_roundtrip():
    theory = g.make_quantum(2)
    u = g.random_reversible(theory, seed=3)
    back = gio.channel_from_json(gio.channel_to_json(u))
    assert back.tag == "reversible"
    assert np.max(np.abs(back.kraus[0] - u.kraus[0])) < 1e-15


def test_malformed_payloads_raise_schema_errors():
    with pytest.raises(SchemaError):
        gio.descriptor_from_json({"kind": "quantum"})
    with pytest.raises(SchemaError):
        gio.state_from_json({"system": {"kind": "quantum"}})


def test_dumps_is_deterministic():
    payload = {"b": 1.5, "a": [0.1, 0.2]}
    assert gio.dumps(payload) == gio.dumps(dict(sorted(payload.items())))
    assert "\n" not in gio.dumps(payload)
    assert "\n" in gio.dumps(payload, pretty=True)
