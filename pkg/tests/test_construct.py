import itertools

import numpy as np
import pytest

from sbforge import construct as cs
from sbforge.holo import HolElem, NElem


def test_relations(fam):
    rep = cs.check_relations(fam.h)
    assert rep.ok, rep.failures
    names = {c.name for c in rep.checks}
    assert {f"commutator_e{i}" for i in range(2, fam.p + 1)} <= names
    assert sum(n.startswith("star_") for n in names) == 6


def test_generator_examples(f12):
    h = f12.h
    assert cs.gen_Y(h, h.zero) == h.hol_one
    assert h.hol_apply(cs.gen_X(h), h.one) == NElem(1, h.zero)
    e2 = h.basis(2)
    assert cs.gen_Z(h) == HolElem(NElem(0, e2), h.aut(0, 1, e2))


def test_z_power_examples(fam):
    h = fam.h
    assert cs.z_power_closed_form(h, 0) == h.hol_one
    assert cs.z_power_closed_form(h, fam.p) == cs.gen_Y(h, h.basis(1))
    if fam.p == 3:
        assert cs.z_power_closed_form(h, 2).eta.v == (0, 1, 2)


def test_kappa_examples(fam):
    h, p = fam.h, fam.p
    d = cs.kappa_decompose(h, h.basis(p))
    assert (d.kappa, d.kappa_tilde, d.pi) == (1, 1, h.zero)
    d = cs.kappa_decompose(h, h.basis(1))
    assert (d.kappa, d.kappa_tilde, d.pi) == (0, 0, h.basis(1))
    if p == 3:
        d = cs.kappa_decompose(h, (0, 0, 2))
        assert (d.kappa, d.kappa_tilde, d.pi) == (2, 2, (0, 2, 0))


def test_g_of_eta_examples(f12):
    h = f12.h
    assert cs.g_of_eta(h, h.one) == cs.GNormalForm(0, h.zero, 0)
    eta = NElem(1, h._mv(h.frame.M, h.basis(2)))
    f = cs.g_of_eta(h, eta)
    assert f == cs.GNormalForm(1, h.zero, 1)
    assert h.hol_mul(cs.gen_X(h), cs.gen_Z(h)) == cs.g_element(h, f)
    assert str(f) == "X^1 Y_[0,0] Z^1"


def test_roundtrip_all(fam):
    h = fam.h
    for idx in range(h.n):
        eta = h.element(idx)
        f = cs.g_of_eta(h, eta)
        assert f.u[-1] == 0 and 0 <= f.k < h.p and 0 <= f.i < h.q
        assert cs.eta_of_g(h, f) == eta
        assert cs.g_element(h, f).eta == eta


def test_normal_forms_enumerate_G(fam):
    h = fam.h
    forms = list(cs.all_normal_forms(h))
    assert len(forms) == h.n == len({cs.eta_of_g(h, f) for f in forms})
    assert {cs.g_element(h, f) for f in forms} == set(fam.G.elements())


def test_word_matches_closed_form(f12, f351):
    for fam, step in ((f12, 1), (f351, 17)):
        h = fam.h
        for f in list(cs.all_normal_forms(h))[::step]:
            assert cs.g_word(h, f) == cs.g_element(h, f)


def test_basis_factorisation(fam):
    # X^i Y_e1^k1 ... Y_e(p-1)^k(p-1) Z^k gives the same n elements
    h, p = fam.h, fam.p
    X, Z = cs.gen_X(h), cs.gen_Z(h)
    Ys = [cs.gen_Y(h, h.basis(i)) for i in range(1, p)]
    seen = set()
    for i in range(h.q):
        for ks in itertools.product(range(p), repeat=p - 1):
            for k in range(p):
                g = h.hol_pow(X, i)
                for Y, e in zip(Ys, ks):
                    g = h.hol_mul(g, h.hol_pow(Y, e))
                g = h.hol_mul(g, h.hol_pow(Z, k))
                u = h.vec(sum(e * np.array(h.basis(j + 1)) for j, e in enumerate(ks)) if ks else h.zero)
                assert g == cs.g_element(h, cs.GNormalForm(i, u, k))
                seen.add(g)
    assert len(seen) == h.n


def test_nf_mul_matches_hol(f12, f351):
    for fam, pairs in ((f12, None), (f351, 3000)):
        h = fam.h
        forms = list(cs.all_normal_forms(h))
        if pairs is None:
            it = itertools.product(forms, repeat=2)
        else:
            rng = np.random.default_rng(8)
            it = ((forms[a], forms[b]) for a, b in rng.integers(0, h.n, size=(pairs, 2)))
        for f, g in it:
            prod = h.hol_mul(cs.g_element(h, f), cs.g_element(h, g))
            assert cs.g_element(h, cs.nf_mul(h, f, g)) == prod


def test_build_G(fam):
    h = fam.h
    assert h.is_regular(fam.G.elements())
    assert len(fam.G.elements()) == h.n
    gens = [cs.gen_X_star(h), cs.gen_Y_star(h, h.basis(h.p - 1)), cs.gen_Z_star(h)]
    assert h.subgroup_closure(gens, h.n) == set(fam.Gs.elements())


def test_closure_mismatch_detected(f12, monkeypatch):
    h = f12.h
    monkeypatch.setattr(cs, "gen_Z", lambda h: cs.gen_Y(h, h.basis(2)))
    with pytest.raises(cs.ClosureMismatch):
        cs.build_G(h)


def test_images_exhaustive_n12(f12):
    h = f12.h
    for a in h.aut_enumerate():
        for eta in h.elements():
            cs.alpha_image(h, a, eta)  # asserts against the composed path
            cs.phi_image(h, a, eta)


def test_images_sampled_n351(f351):
    h = f351.h
    rng = np.random.default_rng(9)
    for ai, x in rng.integers(0, [h.aut_order, h.n], size=(1500, 2)):
        a, eta = h.aut_element(int(ai)), h.element(int(x))
        f = cs.alpha_image(h, a, eta)
        assert cs.eta_of_g(h, f) == h.aut_apply(a, eta)
        g = cs.phi_image(h, a, eta)
        assert cs.eta_of_g(h, g) == h.n_inv(h.aut_apply(a, eta))


def test_alpha_image_identity_and_J(fam):
    h, p, q = fam.h, fam.p, fam.q
    assert cs.alpha_image(h, h.aut_one, h.one) == cs.GNormalForm(0, h.zero, 0)
    J = h.aut(0, 1)
    Jm = h.frame.J
    for f in list(cs.all_normal_forms(h))[:: max(1, h.n // 60)]:
        eta = cs.eta_of_g(h, f)
        v = Jm @ (np.array(f.u) + np.array(cs.j_bracket_ep(h, f.k))) % p
        expect = cs.GNormalForm(f.i * p % q, cs.kappa_decompose(h, v).pi, f.k)
        assert cs.alpha_image(h, J, eta) == expect
        # pi(J(u + J^[k] e_p)) = Ju + (J^k - I) e_p
        alt = h.vec(Jm @ np.array(f.u) + (cs.j_power(h, f.k) - np.eye(p, dtype=np.int64)) @ np.array(h.basis(p)))
        assert expect.u == alt
