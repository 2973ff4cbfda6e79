"""The generators X, Y_v, Z of the regular subgroup G, their starred
counterparts for G*, and the normal form X^i Y_u Z^k of elements of G.

Every function takes the ``Holomorph`` it computes in as first argument.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

import numpy as np

from .brace import RegularSubgroupMap, opposite_regular
from .fpalg import bracket_power, mat_pow
from .holo import AutNElem, HolElem, Holomorph, NElem, Vec
from .report import Report


class ClosureMismatch(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class GNormalForm:
    i: int
    u: Vec
    k: int

    def __str__(self) -> str:
        return f"X^{self.i} Y_[{','.join(map(str, self.u))}] Z^{self.k}"


@dataclass(frozen=True)
class KappaDecomposition:
    kappa: int
    kappa_tilde: int
    pi: Vec


def _mv(h: Holomorph, m: np.ndarray, v) -> Vec:
    return h.vec(np.asarray(m) @ np.asarray(v, dtype=np.int64))


def e(h: Holomorph, i: int) -> Vec:
    return h.basis(i)


def j_power(h: Holomorph, k: int) -> np.ndarray:
    return mat_pow(h.frame.J, k, h.p)


def j_bracket_ep(h: Holomorph, k: int) -> Vec:
    """J^[k] e_p."""
    return _mv(h, bracket_power(h.frame.J, k, h.p), e(h, h.p))


# -- generators ---------------------------------------------------------------


def gen_X(h: Holomorph) -> HolElem:
    return HolElem(NElem(1, h.zero), h.aut_one)


def gen_Y(h: Holomorph, v) -> HolElem:
    v = h.vec(v)
    return HolElem(NElem(0, v), h.aut(0, 0, h._neg(v)))


def gen_Z(h: Holomorph) -> HolElem:
    ep = e(h, h.p)
    return HolElem(NElem(0, ep), h.aut(0, 1, h._neg(ep)))


def gen_X_star(h: Holomorph) -> HolElem:
    # conj of [[M^-1, 0], [0, 1]]
    return HolElem(NElem(1, h.zero), h.aut(-h.m_exp, 0))


def gen_Y_star(h: Holomorph, u) -> HolElem:
    return HolElem(NElem(0, h.vec(u)), h.aut_one)


def gen_Z_star(h: Holomorph) -> HolElem:
    jinv_ep = _mv(h, j_power(h, -1), e(h, h.p))
    return HolElem(NElem(0, jinv_ep), h.aut(0, -1))


def z_power_closed_form(h: Holomorph, k: int) -> HolElem:
    """Z^k = [(I, J^[k] e_p), conj(J^k, -J^[k] e_p)]."""
    if k < 0:
        raise ValueError("k must be >= 0")
    b = j_bracket_ep(h, k)
    return HolElem(NElem(0, b), h.aut(0, k, h._neg(b)))


# -- relations ----------------------------------------------------------------


def check_relations(h: Holomorph) -> Report:
    rep = Report("relations")
    p, q = h.p, h.q
    one = h.hol_one
    mul, pw = h.hol_mul, h.hol_pow
    X, Z = gen_X(h), gen_Z(h)
    Y = lambda v: gen_Y(h, v)  # noqa: E731
    basis = [e(h, i) for i in range(1, p + 1)]
    vectors = basis if h.pp > 256 else [h.vec_of(t) for t in range(h.pp)]
    Jm = h.frame.J

    rep.check("i_X_order_q", pw(X, q) == one and X != one)
    rep.check("ii_Z_p_is_Y_e1", pw(Z, p) == Y(e(h, 1)))
    rep.check("iii_ZX_is_XpZ", mul(Z, X) == mul(pw(X, p), Z))
    rep.check("iv_Y_commutes_X", all(mul(Y(v), X) == mul(X, Y(v)) for v in vectors))
    rep.check(
        "v_Y_additive",
        all(mul(Y(v), Y(w)) == Y(h._add(v, w)) for v in vectors for w in basis),
    )
    rep.check("vi_ZY_is_YJZ", all(mul(Z, Y(v)) == mul(Y(_mv(h, Jm, v)), Z) for v in vectors))

    zinv = h.hol_inv(Z)
    comm = lambda v: mul(mul(mul(Z, Y(v)), zinv), h.hol_inv(Y(v)))  # noqa: E731
    rep.check(
        "commutator_general",
        all(comm(v) == Y(h.vec(np.asarray(_mv(h, Jm, v)) - np.asarray(v))) for v in vectors),
    )
    for i in range(2, p + 1):
        rep.check(f"commutator_e{i}", comm(e(h, i)) == Y(e(h, i - 1)))

    zk = one
    closed_ok = True
    for k in range(p * p + 1):
        closed_ok &= z_power_closed_form(h, k) == zk
        zk = mul(zk, Z)
    rep.check("Zk_closed_form", closed_ok, f"0 <= k <= {p * p}")
    rep.check("Z_order_p2", h.hol_order_of(Z) == p * p)

    ep = e(h, p)
    rep.check("J_k_binomial", _j_binomial_ok(h))
    rep.check("J_bracket_binomial", _j_bracket_ok(h))
    rep.check(
        "J_bracket_minus_k_in_V0",
        all(h.vec(np.asarray(j_bracket_ep(h, k)) - k * np.asarray(ep))[-1] == 0 for k in range(p)),
    )

    Xs, Zs = gen_X_star(h), gen_Z_star(h)
    Ys = lambda v: gen_Y_star(h, v)  # noqa: E731
    rep.check("star_X_order_q", pw(Xs, q) == one and Xs != one)
    rep.check("star_Z_p_is_Y_e1", pw(Zs, p) == Ys(e(h, 1)))
    rep.check("star_XZ_is_ZXp", mul(Xs, Zs) == mul(Zs, pw(Xs, p)))
    rep.check("star_X_commutes_Y", all(mul(Xs, Ys(v)) == mul(Ys(v), Xs) for v in vectors))
    rep.check(
        "star_Y_additive",
        all(mul(Ys(v), Ys(w)) == Ys(h._add(v, w)) for v in vectors for w in basis),
    )
    rep.check("star_YZ_is_ZYJ", all(mul(Ys(v), Zs) == mul(Zs, Ys(_mv(h, Jm, v))) for v in vectors))
    return rep


def _j_binomial_ok(h: Holomorph) -> bool:
    # J^k e_p = sum_i C(k, i) e_(p-i), terms with p - i < 1 dropped
    p = h.p
    for k in range(p + 1):
        expected = np.zeros(p, dtype=np.int64)
        for i in range(k + 1):
            if p - i >= 1:
                expected[p - i - 1] += comb(k, i)
        if _mv(h, j_power(h, k), e(h, p)) != h.vec(expected):
            return False
    return True


def _j_bracket_ok(h: Holomorph) -> bool:
    # J^[k] e_p = sum_h C(k, h+1) e_(p-h)
    p = h.p
    for k in range(p + 1):
        expected = np.zeros(p, dtype=np.int64)
        for t in range(k):
            if p - t >= 1:
                expected[p - t - 1] += comb(k, t + 1)
        if j_bracket_ep(h, k) != h.vec(expected):
            return False
    return True


# -- normal forms ---------------------------------------------------------------


def kappa_decompose(h: Holomorph, v) -> KappaDecomposition:
    v = h.vec(v)
    kappa = v[-1]
    pi = h.vec(np.asarray(v) - np.asarray(j_bracket_ep(h, kappa)))
    assert pi[-1] == 0, "pi(v) must lie in V_0"
    return KappaDecomposition(kappa, int(kappa), pi)


def g_of_eta(h: Holomorph, eta: NElem) -> GNormalForm:
    i = eta.k
    v = _mv(h, h.Mk[-i % h.q], eta.v)
    d = kappa_decompose(h, v)
    return GNormalForm(i, d.pi, d.kappa_tilde)


def eta_of_g(h: Holomorph, f: GNormalForm) -> NElem:
    i = f.i % h.q
    inner = h._add(f.u, j_bracket_ep(h, f.k))
    return NElem(i, _mv(h, h.Mk[i], inner))


def g_element(h: Holomorph, f: GNormalForm) -> HolElem:
    """X^i Y_u Z^k in closed form: [(M^i, M^i(u + J^[k]e_p)), conj(J^k, -u - J^[k]e_p)]."""
    shift = h._neg(h._add(f.u, j_bracket_ep(h, f.k)))
    return HolElem(eta_of_g(h, f), h.aut(0, f.k, shift))


def g_word(h: Holomorph, f: GNormalForm) -> HolElem:
    """X^i Y_u Z^k by multiplying generators."""
    return h.hol_mul(h.hol_mul(h.hol_pow(gen_X(h), f.i), gen_Y(h, f.u)), h.hol_pow(gen_Z(h), f.k))


def nf_mul(h: Holomorph, f: GNormalForm, g: GNormalForm) -> GNormalForm:
    """Product in G on normal forms, rewriting Z^p -> Y_(e_1)."""
    p, q = h.p, h.q
    i = (f.i + g.i * pow(p, f.k, q)) % q
    u = h._add(f.u, _mv(h, j_power(h, f.k), g.u))
    k = f.k + g.k
    if k >= p:
        u = h._add(u, e(h, 1))
        k -= p
    return GNormalForm(i, u, k)


def all_normal_forms(h: Holomorph):
    p = h.p
    for i in range(h.q):
        for t in range(h.pp // p):
            u = h.vec_of(t * p)  # last coordinate zero
            for k in range(p):
                yield GNormalForm(i, u, k)


def build_G(h: Holomorph, verify: bool = True) -> RegularSubgroupMap:
    alphas = [g_element(h, g_of_eta(h, h.element(idx))).alpha for idx in range(h.n)]
    G = RegularSubgroupMap(h, alphas, "B")
    if verify:
        gens = [gen_X(h), gen_Y(h, e(h, h.p - 1)), gen_Z(h)]
        closure = h.subgroup_closure(gens, h.n)
        if closure != set(G.elements()):
            raise ClosureMismatch("normal-form G differs from <X, Y_(e_(p-1)), Z>")
    return G


def build_G_star(h: Holomorph, verify: bool = True) -> RegularSubgroupMap:
    Gs = opposite_regular(build_G(h, verify))
    if verify:
        gens = [gen_X_star(h), gen_Y_star(h, e(h, h.p - 1)), gen_Z_star(h)]
        closure = h.subgroup_closure(gens, h.n)
        if closure != set(Gs.elements()):
            raise ClosureMismatch("G* differs from <X*, Y*_(e_(p-1)), Z*>")
    return Gs


# -- images under automorphisms -------------------------------------------------------


def _alpha_data(h: Holomorph, alpha: AutNElem):
    A = h.matrix(alpha)
    s = h.frob[alpha.j]
    return A, s, np.asarray(alpha.w, dtype=np.int64)


def alpha_image(h: Holomorph, alpha: AutNElem, eta: NElem) -> GNormalForm:
    """Normal form of g_(alpha(eta)); v = (M^(-is) - I) w + A (u + J^[k] e_p)."""
    f = g_of_eta(h, eta)
    A, s, w = _alpha_data(h, alpha)
    base = np.asarray(h._add(f.u, j_bracket_ep(h, f.k)))
    mis = h.Mk[(-f.i * s) % h.q]
    v = (mis @ w - w + A @ base) % h.p
    d = kappa_decompose(h, v)
    out = GNormalForm((f.i * s) % h.q, d.pi, d.kappa_tilde)
    assert out == g_of_eta(h, h.aut_apply(alpha, eta))
    return out


def phi_image(h: Holomorph, alpha: AutNElem, eta: NElem) -> GNormalForm:
    """Normal form of g_(alpha(eta)^-1); y = (M^(is) - I) w - A M^i (u + J^[k] e_p)."""
    f = g_of_eta(h, eta)
    A, s, w = _alpha_data(h, alpha)
    base = np.asarray(h._add(f.u, j_bracket_ep(h, f.k)))
    mis = h.Mk[(f.i * s) % h.q]
    y = (mis @ w - w - A @ h.Mk[f.i] @ base) % h.p
    d = kappa_decompose(h, y)
    out = GNormalForm((-f.i * s) % h.q, d.pi, d.kappa_tilde)
    assert out == g_of_eta(h, h.n_inv(h.aut_apply(alpha, eta)))
    return out
