"""Sector partitions and composition rules."""

import numpy as np
import pytest

import gptkit as g
from gptkit.errors import InvalidDimension, UnsupportedComposite
from gptkit.io import descriptor_from_json, descriptor_to_json
from gptkit.sectors import purifying_partner


def test_quantum_single_sector():
    q = g.make_quantum(2)
    assert q.sectors == ((0, 1),)
    assert g.make_quantum(1).sectors == ((0,),)
    r = g.make_quantum(4, "real")
    assert r.field == "real" and r.sectors == ((0, 1, 2, 3),)


def test_classical_and_coherent_singletons():
    c = g.make_classical(2)
    assert c.sectors == ((0,), (1,))
    co = g.make_coherent(2)
    assert co.sectors == c.sectors and co.kind == "coherent"
    assert g.make_classical(1).total_dim == 1


def test_zero_dimension_rejected():
    with pytest.raises(InvalidDimension):
        g.make_quantum(0)
    with pytest.raises(InvalidDimension):
        g.make_classical(0)
    with pytest.raises(InvalidDimension):
        g.make_coherent(0)


def test_cbit_cobit_offset_sectors():
    comp = g.compose(g.make_classical(2), g.make_coherent(2))
    # even span {|00>, |11>} and odd span {|01>, |10>}
    assert comp.sectors == ((0, 3), (1, 2))


def test_quantum_quantum_single_sector():
    comp = g.compose(g.make_quantum(2), g.make_quantum(3))
    assert comp.sectors == (tuple(range(6)),)


def test_rectangular_offset_rule():
    comp = g.compose(g.make_classical(2), g.make_coherent(3))
    expected = []
    for delta in range(3):
        expected.append(tuple(sorted(x * 3 + ((x + delta) % 3) for x in range(2))))
    assert comp.sectors == tuple(expected)
    # mirrored when the left factor is larger
    comp2 = g.compose(g.make_classical(3), g.make_coherent(2))
    assert len(comp2.sectors) == 3
    assert all(len(s) == 2 for s in comp2.sectors)


def test_quantum_with_classical_copies():
    comp = g.compose(g.make_quantum(3), g.make_classical(2))
    assert len(comp.sectors) == 2
    assert all(len(s) == 3 for s in comp.sectors)
    sym = g.compose(g.make_classical(2), g.make_quantum(3))
    assert len(sym.sectors) == 2
    assert all(len(s) == 3 for s in sym.sectors)


def test_quantum_coherent_copies():
    comp = g.compose(g.make_quantum(2), g.make_coherent(3))
    assert len(comp.sectors) == 3
    assert all(len(s) == 2 for s in comp.sectors)


def test_partition_and_dimension_product():
    rng = np.random.default_rng(5)
    atoms = [
        g.make_quantum(2),
        g.make_quantum(3),
        g.make_classical(2),
        g.make_classical(4),
        g.make_coherent(2),
        g.make_coherent(3),
    ]
    checked = 0
    for a in atoms:
        for b in atoms:
            try:
                comp = g.compose(a, b)
            except UnsupportedComposite:
                continue
            covered = sorted(i for sec in comp.sectors for i in sec)
            assert covered == list(range(comp.total_dim))
            assert comp.gpt_dim == a.gpt_dim * b.gpt_dim
            checked += 1
    assert checked >= 20


def test_compose_with_trivial_is_isomorphic():
    for desc in [g.make_quantum(3), g.make_classical(4),
                 g.compose(g.make_classical(2), g.make_coherent(2))]:
        comp = g.compose(desc, g.trivial_system())
        assert comp.sectors == desc.sectors


def test_field_mixing_rejected():
    with pytest.raises(UnsupportedComposite):
        g.compose(g.make_quantum(2, "real"), g.make_quantum(2))


def test_unsupported_pairs_rejected():
    comp = g.compose(g.make_classical(2), g.make_coherent(2))
    with pytest.raises(UnsupportedComposite):
        g.compose(g.make_quantum(2), comp)
    with pytest.raises(UnsupportedComposite):
        g.compose(comp, g.make_coherent(2))


def test_nested_composite_with_classical():
    comp = g.compose(g.make_classical(2), g.make_coherent(2))
    nested = g.compose(comp, g.make_classical(3))
    assert len(nested.sectors) == 6
    assert all(len(s) == 2 for s in nested.sectors)


def test_descriptor_json_roundtrip_bit_exact():
    for desc in [
        g.make_quantum(5),
        g.make_quantum(2, "real"),
        g.make_classical(3),
        g.compose(g.make_classical(3), g.make_coherent(3)),
        g.compose(g.make_quantum(2), g.make_quantum(2)),
    ]:
        back = descriptor_from_json(descriptor_to_json(desc))
        assert back == desc
        assert back.sectors == desc.sectors


def test_purifying_partner_shapes():
    partner, comp = purifying_partner(g.make_quantum(3))
    assert partner.kind == "quantum" and comp.total_dim == 9
    partner, comp = purifying_partner(g.make_classical(2))
    assert partner.kind == "coherent"
    assert comp.sectors == ((0, 3), (1, 2))
    base = g.compose(g.make_classical(2), g.make_coherent(2))
    partner, comp = purifying_partner(base)
    assert partner.total_dim == base.total_dim
    assert len(comp.sectors) == len(base.sectors)
    covered = sorted(i for sec in comp.sectors for i in sec)
    assert covered == list(range(comp.total_dim))
