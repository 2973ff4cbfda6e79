import json
from collections import Counter

import numpy as np
import pytest

from sbforge import brace as br


def trivial(h):
    return br.brace_from_regular(br.left_regular(h))


def cyclic_trivial(n):
    t = (np.arange(n)[:, None] + np.arange(n)[None, :]) % n
    return br.brace_from_tables(t, t)


def test_trivial_brace(f12):
    B = trivial(f12.h)
    assert np.array_equal(B.dot_table(), B.circ_table())
    assert br.verify_axioms(B).ok
    assert (B.lam == np.arange(12)).all()


def test_axioms_exhaustive(fam):
    for B in (fam.B, fam.Bs):
        rep = br.verify_axioms(B, "exhaustive")
        assert rep.ok, rep.failures
        assert not np.array_equal(B.dot_table(), B.dot_table().T)
        assert not np.array_equal(B.circ_table(), B.circ_table().T)


def test_axioms_sampled_deterministic(f351):
    a = br.verify_axioms(f351.B, ("sampled", 5000))
    b = br.verify_axioms(f351.B, ("sampled", 5000))
    assert a.ok and a.lines() == b.lines()


def test_corrupted_circ_is_caught(f12):
    circ = f12.B.circ_table().copy()
    circ[5, [6, 7]] = circ[5, [7, 6]]  # one swapped pair keeps the row a permutation
    rep = br.verify_axioms(br.brace_from_tables(f12.B.dot_table(), circ))
    assert not rep.ok
    assert not rep["brace_relation"].passed
    assert rep["brace_relation"].detail.startswith("(")


def test_structural_equals_table_n351(f351):
    S = br.brace_from_regular(f351.G, "structural")
    assert np.array_equal(S.circ_table(), f351.B.circ_table())
    assert np.array_equal(S.dot_table(), f351.B.dot_table())
    assert br.verify_axioms(S, ("sampled", 20000)).ok


def test_lambda_properties_n12(f12):
    B = f12.B
    lam, circ, dot = B.lam, B.circ_table(), B.dot_table()
    assert (lam[0] == np.arange(12)).all()
    for a in range(12):
        # lambda_a in Aut(B, .)
        assert np.array_equal(lam[a][dot], dot[lam[a][:, None], lam[a][None, :]])
        for b in range(12):
            assert np.array_equal(lam[circ[a, b]], lam[a][lam[b]])


def test_lambda_homomorphism_sampled_n351(f351):
    B = f351.B
    lam, circ = B.lam, B.circ_table()
    rng = np.random.default_rng(7)
    for a, b in rng.integers(0, 351, size=(2000, 2)):
        assert np.array_equal(lam[circ[a, b]], lam[a][lam[b]])


def test_ideals(f12):
    T = trivial(f12.h)
    assert sorted(map(len, br.ideals(T))) == [1, 4, 12]
    assert not br.is_simple(T)
    assert sorted(map(len, br.ideals(f12.B))) == [1, 12]
    left = {i.elements: i for i in br.enumerate_ideals(f12.B, "generic")}
    P = frozenset(range(4))
    assert P in left and left[P].dot_normal and not left[P].circ_normal


def test_simple(fam):
    assert br.is_simple(fam.B) and br.is_simple(fam.Bs)


def test_fast_and_generic_ideals_agree_n12(f12):
    for B in (f12.B, f12.Bs, trivial(f12.h)):
        fast = [i.elements for i in br.enumerate_ideals(B, "fast") if i.is_ideal]
        generic = [i.elements for i in br.enumerate_ideals(B, "generic") if i.is_ideal]
        assert fast == generic


def test_opposite_regular(f12):
    h = f12.h
    L = br.left_regular(h)
    R = br.opposite_regular(L)
    assert all(R[i] == br.HolElem(h.element(i), h.inner(h.n_inv(h.element(i)))) for i in range(12))
    assert br.opposite_regular(f12.Gs) == f12.G
    assert br.star_is_isomorphism(f12.G, f12.Gs)


def test_star_involution(fam):
    assert br.opposite_regular(br.opposite_regular(fam.G)) == fam.G


def test_opposite_brace(f12):
    Bop = br.opposite_brace(f12.B)
    assert br.verify_axioms(Bop).ok
    f = f12.h.n_inverse
    assert br.is_brace_isomorphism(f, Bop, f12.Bs)
    C = cyclic_trivial(5)
    Cop = br.opposite_brace(C)
    assert np.array_equal(Cop.dot_table(), C.dot_table())


def test_are_isomorphic(fam):
    h = fam.h
    assert br.are_isomorphic(fam.G, fam.G) is not None
    assert br.are_isomorphic(fam.G, fam.Gs) is None
    a = h.aut_element(h.aut_order // 3)
    H = br.conjugate_regular(a, fam.G)
    w = br.are_isomorphic(fam.G, H)
    assert w is not None
    back = br.are_isomorphic(H, fam.G)
    assert back is not None and br.conjugate_regular(back, H) == fam.G


def test_brace_automorphisms(fam):
    h = fam.h
    A = br.brace_automorphisms(fam.B, fam.G)
    assert A.order == fam.p and A.cyclic and A.generator == h.aut(0, 1)
    assert A.describe(h) == f"order {fam.p}, cyclic, generator = conj [[J,0],[0,1]]"
    members = set(A.members)
    for a in members:
        assert h.aut_inv(a) in members
        assert h.aut_apply(a, h.one) == h.one
        for b in members:
            assert h.aut_compose(a, b) in members


def test_brace_automorphisms_raw_n12(f12):
    h = f12.h
    raw = {tuple(f.tolist()) for f in br.brace_automorphisms_raw(f12.B)}
    mine = {tuple(h.aut_perm(a).tolist()) for a in br.brace_automorphisms(f12.B, f12.G).members}
    assert raw == mine and len(raw) == 2
    T = trivial(h)
    assert br.brace_automorphisms(T, br.left_regular(h)).order == 24


def test_structure_n12(f12):
    B = f12.B
    assert Counter(br.element_orders(B.dot_table()).tolist()) == {1: 1, 2: 3, 3: 8}
    assert Counter(br.element_orders(B.circ_table()).tolist()) == {1: 1, 2: 1, 3: 2, 4: 6, 6: 2}
    s = br.identify_structure(B)
    assert s["dot"].sylow_p_normal and not s["dot"].sylow_q_normal
    assert not s["circ"].sylow_p_normal and s["circ"].sylow_q_normal


def test_structure_n351(f351):
    s = br.identify_structure(f351.B)
    c = s["circ"]
    assert (c.sylow_p_exponent, c.sylow_p_class) == (9, 2)
    assert s["dot"].sylow_p_normal and not s["dot"].sylow_q_normal
    assert not c.sylow_p_normal and c.sylow_q_normal


def test_element_orders_brute_force(f12):
    t = f12.B.circ_table()
    for x in range(12):
        e, y = 1, x
        while y:
            y, e = t[y, x], e + 1
        assert br.element_orders(t)[x] == e


def test_json_roundtrip(f12, f351):
    for B in (f12.B, f351.Bs):
        data = json.loads(B.dumps())
        assert set(data) == {"n", "p", "q", "which", "dot", "circ"}
        C = br.load_brace(data)
        assert np.array_equal(C.circ_table(), B.circ_table())
    S = br.brace_from_regular(f12.G, "structural")
    back = br.load_brace(json.loads(S.dumps()))
    assert back.mode == "structural"
    assert np.array_equal(br.to_table_mode(back).circ_table(), f12.B.circ_table())


def test_not_regular_rejected(f12):
    h = f12.h
    alphas = list(f12.G.alphas)
    alphas[3] = h.aut_one if alphas[3] != h.aut_one else h.aut(1)
    with pytest.raises(br.NotRegular):
        br.brace_from_regular(br.RegularSubgroupMap(h, alphas))
