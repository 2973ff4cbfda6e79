"""Free order-q subgroups of Hol(N), regular subgroups containing them, and
the exhaustive census of regular subgroups at small order."""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from .brace import (
    BudgetExceeded,
    RegularSubgroupMap,
    _closure_table,
    _inverses,
    _is_normal,
    are_isomorphic,
    brace_from_regular,
    ideals,
    is_simple,
    sylow_subgroup,
)
from .holo import BoundExceeded, HolElem, Holomorph, NElem

DEFAULT_BUDGET = 2_000_000
HOL_TABLE_CAP = 20_000


class NotAGroup(ValueError):
    pass


class NoCanonicalForm(RuntimeError):
    pass


def search_budget(default: int = DEFAULT_BUDGET) -> int:
    """Search-node cap, overridable through SBFORGE_BUDGET."""
    raw = os.environ.get("SBFORGE_BUDGET")
    return int(raw) if raw else default


# -- group structure ---------------------------------------------------------------


def check_group_table(table) -> np.ndarray:
    table = np.asarray(table, dtype=np.int64)
    n = table.shape[0]
    if table.shape != (n, n) or table.min() < 0 or table.max() >= n:
        raise NotAGroup("table is not a square table on range(n)")
    ident = np.arange(n)
    if not (np.array_equal(table[0], ident) and np.array_equal(table[:, 0], ident)):
        raise NotAGroup("0 is not the identity")
    if not all(len(np.unique(row)) == n for row in table) or not all(
        len(np.unique(col)) == n for col in table.T
    ):
        raise NotAGroup("table is not a Latin square")
    for a in range(n):
        # (a b) c == a (b c) for all b, c
        if not np.array_equal(table[table[a]], table[a][table]):
            raise NotAGroup(f"associativity fails for a={a}")
    return table


def classify_group_structure(table, p: int, q: int) -> str:
    """direct_product, type_ii (normal Sylow-p only), type_iii (normal Sylow-q only) or other."""
    table = check_group_table(table)
    inv = _inverses(table)
    p_normal = _is_normal(table, inv, sylow_subgroup(table, p))
    q_normal = _is_normal(table, inv, sylow_subgroup(table, q))
    if p_normal and q_normal:
        return "direct_product"
    if p_normal:
        return "type_ii"
    if q_normal:
        return "type_iii"
    return "other"


def semidirect_table(p: int, q: int, act) -> np.ndarray:
    """Cayley table of F_p^p x| C_q with generator of C_q acting by ``act`` (a matrix)."""
    pp = p**p
    n = pp * q
    vecs = np.array(np.unravel_index(np.arange(pp), (p,) * p)).T
    weights = p ** np.arange(p - 1, -1, -1)
    powers = [np.eye(p, dtype=np.int64)]
    for _ in range(q - 1):
        powers.append(powers[-1] @ np.asarray(act) % p)
    table = np.empty((n, n), dtype=np.int64)
    for a in range(n):
        k1, v1 = divmod(a, pp)
        b = np.arange(n)
        k2, v2 = b // pp, b % pp
        w = (vecs[v1] + vecs[v2] @ powers[k1].T) % p
        table[a] = ((k1 + k2) % q) * pp + w @ weights
    return table


# -- the order-q taxonomy ----------------------------------------------------------


@dataclass(frozen=True, order=True)
class OrderQType:
    tag: str
    params: tuple = ()

    def __str__(self) -> str:
        if self.tag != "TypeIII":
            return self.tag
        k, v = self.params
        return f"TypeIII(k={k}, v=[{','.join(map(str, v))}])"


def star_element(h: Holomorph, g: HolElem) -> HolElem:
    """(eta, alpha) -> (eta^-1, conj(eta) alpha)."""
    return HolElem(h.n_inv(g.eta), h.aut_compose(h.inner(g.eta), g.alpha))


def type_i(h: Holomorph) -> HolElem:
    return HolElem(h.element(h.pp), h.aut_one)


def type_ii(h: Holomorph) -> HolElem:
    return HolElem(h.n_inv(h.element(h.pp)), h.aut(h.m_exp, 0))


def type_iii(h: Holomorph, k: int, v) -> HolElem:
    return HolElem(NElem(k, h.vec(v)), h.aut(h.m_exp, 0))


def _cyclic(h: Holomorph, g: HolElem) -> list[HolElem]:
    out, x = [h.hol_one], g
    while x != h.hol_one:
        out.append(x)
        x = h.hol_mul(x, g)
    return out


def order_q_canonical_types(h: Holomorph) -> list[tuple[OrderQType, HolElem]]:
    out = [(OrderQType("TypeI"), type_i(h)), (OrderQType("TypeII"), type_ii(h))]
    for k in range(1, h.q - 1):
        for t in range(h.pp):
            v = h.vec_of(t)
            out.append((OrderQType("TypeIII", (k, v)), type_iii(h, k, v)))
    for kind, g in out:
        group = _cyclic(h, g)
        assert len(group) == h.q, f"{kind} does not have order q"
        assert h.acts_freely(group), f"{kind} does not act freely"
    assert star_element(h, out[0][1]) == out[1][1]
    return out


def match_shape(h: Holomorph, g: HolElem) -> OrderQType | None:
    """The canonical shape g has literally, if any."""
    conj_m = h.aut(h.m_exp, 0)
    if g.alpha == h.aut_one and g.eta == h.element(h.pp):
        return OrderQType("TypeI")
    if g.alpha == conj_m:
        k = g.eta.k
        if k == h.q - 1 and not any(g.eta.v):
            return OrderQType("TypeII")
        if 1 <= k <= h.q - 2:
            return OrderQType("TypeIII", (k, g.eta.v))
    return None


def _generators_of_order_q(h: Holomorph, S) -> list[HolElem]:
    return sorted(g for g in S if g != h.hol_one)


def canonical_matches(h: Holomorph, S) -> set[str]:
    """Tags of every canonical shape reachable from a generator of S by Aut(N)."""
    tags = set()
    gens = _generators_of_order_q(h, S)
    for a in h.aut_enumerate():
        a_inv = h.aut_inv(a)
        for g in gens:
            m = match_shape(h, h.hol_conj(a, g, a_inv))
            if m is not None:
                tags.add(m.tag)
    return tags


def reduce_to_canonical(h: Holomorph, S) -> tuple[OrderQType, object, HolElem]:
    """(type, a, generator) with a g a^-1 of canonical shape for a generator g of S."""
    S = list(S)
    if len(S) != h.q:
        raise ValueError("S must have order q")
    gens = _generators_of_order_q(h, S)
    for a in h.aut_enumerate():
        a_inv = h.aut_inv(a)
        for g in gens:
            m = match_shape(h, h.hol_conj(a, g, a_inv))
            if m is not None:
                return m, a, g
    raise NoCanonicalForm("no Aut(N)-conjugate of a generator has canonical shape")


def free_order_q_subgroups(h: Holomorph) -> list[frozenset[HolElem]]:
    """All order-q subgroups of Hol(N) acting freely on N (scans every element)."""
    seen: set[frozenset[HolElem]] = set()
    out = []
    for idx in range(h.hol_order):
        g = h.hol_element(idx)
        if g == h.hol_one or h.hol_pow(g, h.q) != h.hol_one:
            continue
        S = frozenset(_cyclic(h, g))
        if S in seen:
            continue
        seen.add(S)
        if h.acts_freely(S):
            out.append(S)
    return out


# -- Hol(N) as a table (small orders only) -----------------------------------------------


class HolTable:
    """Index arithmetic for Hol(N): multiplication, conjugation by Aut(N), fixed points."""

    def __init__(self, h: Holomorph):
        if h.hol_order > HOL_TABLE_CAP:
            raise BudgetExceeded(f"|Hol(N)| = {h.hol_order} exceeds the table cap")
        self.h = h
        na = h.aut_order
        auts = list(h.aut_enumerate())
        self.perms = np.array([h.aut_perm(a) for a in auts])  # (na, n)
        self.acomp = np.array(
            [[h.aut_index(h.aut_compose(a, b)) for b in auts] for a in auts], dtype=np.int64
        )
        self.ainv = np.array([h.aut_index(h.aut_inv(a)) for a in auts], dtype=np.int64)
        H = np.arange(h.hol_order)
        self.eta, self.alpha = H // na, H % na

    @cached_property
    def mul(self) -> np.ndarray:
        h = self.h
        na = h.aut_order
        e1, a1 = self.eta[:, None], self.alpha[:, None]
        e2, a2 = self.eta[None, :], self.alpha[None, :]
        eta = h.n_table[e1, self.perms[a1, e2]]
        return eta * na + self.acomp[a1, a2]

    @cached_property
    def conj(self) -> np.ndarray:
        """conj[a, g] = index of a g a^-1."""
        na = self.h.aut_order
        a = np.arange(na)[:, None]
        beta = self.acomp[self.acomp[a, self.alpha[None, :]], self.ainv[a]]
        return self.perms[a, self.eta[None, :]] * na + beta

    @cached_property
    def fixed_point_free(self) -> np.ndarray:
        """True where the element moves every point of N (identity excluded)."""
        h = self.h
        n = h.n
        pts = np.arange(n)
        out = np.empty(h.hol_order, dtype=bool)
        for g in range(h.hol_order):
            images = h.n_table[self.eta[g], self.perms[self.alpha[g]]]
            out[g] = not np.any(images == pts)
        return out

    def closure(self, gens) -> frozenset[int]:
        return _closure_table(self.mul, gens)

    def canonical_key(self, subgroup) -> tuple[int, ...]:
        """Lexicographically least Aut(N)-conjugate of the sorted index sequence."""
        members = np.array(sorted(subgroup))
        conj = np.sort(self.conj[:, members], axis=1)
        order = np.lexsort(conj.T[::-1])
        return tuple(int(x) for x in conj[order[0]])


# -- regular overgroups ----------------------------------------------------------------------


def _p_power(x: int, p: int) -> bool:
    while x % p == 0:
        x //= p
    return x == 1


def _normaliser_scan(h: Holomorph, X: HolElem):
    """Yield (mu indices, b) with (mu, b) normalising <X>, one b at a time.

    For U = (mu, b) the automorphism part of U X U^-1 is b chi b^-1 whatever
    mu is, so each b is screened once and the mu are then tested together.
    """
    by_aut: dict = {}
    for g in _cyclic(h, X):
        by_aut.setdefault(g.alpha, []).append(h.index(g.eta))
    mu = np.arange(h.n)
    for b in h.aut_enumerate():
        c = h.aut_compose(h.aut_compose(b, X.alpha), h.aut_inv(b))
        targets = by_aut.get(c)
        if targets is None:
            continue
        bx = h.index(h.aut_apply(b, X.eta))
        etas = h.mul_idx(h.mul_idx(mu, np.full(h.n, bx)), h.aut_apply_idx(c, h.n_inverse))
        yield np.nonzero(np.isin(etas, targets))[0], b


def normaliser_fibres(h: Holomorph, X: HolElem) -> list[list[HolElem]]:
    """fibres[e] = elements of N_Hol(<X>) with first component of index e."""
    fibres: list[list[HolElem]] = [[] for _ in range(h.n)]
    for mus, b in _normaliser_scan(h, X):
        for m in mus.tolist():
            fibres[m].append(HolElem(h.element(m), b))
    return [sorted(f) for f in fibres]


def normalising_p_elements(h: Holomorph, X: HolElem) -> list[HolElem]:
    """Non-identity elements of p-power order with U <X> U^-1 = <X>."""
    p_part = h.p ** (2 * h.p + 1)  # a Sylow p-subgroup of Hol(N) has exponent dividing this
    out = []
    for mus, b in _normaliser_scan(h, X):
        for m in mus.tolist():
            U = HolElem(h.element(m), b)
            if U != h.hol_one and h.hol_pow(U, p_part) == h.hol_one:
                out.append(U)
    return sorted(out)


def regular_overgroups(
    h: Holomorph, X: HolElem, budget: int | None = None, nontrivial_action: bool = True
) -> list[RegularSubgroupMap]:
    """Regular subgroups in which <X> is normal, one per Aut(N)-class.

    Such a group is <X> x| P with P a p-group of elements normalising <X>.
    It lies inside the normaliser of <X>, so the search adds, for the least
    first component not yet covered, each normaliser element over it, and
    prunes on order (must divide n) and on repeated first components.
    With ``nontrivial_action`` (the default) only groups in which P acts
    nontrivially on <X> are kept; the direct products <X> x P are dropped.
    """
    budget = search_budget() if budget is None else budget
    n = h.n
    fibres = normaliser_fibres(h, X)
    start = frozenset(_cyclic(h, X))
    seen = {start}
    hits: set[frozenset[HolElem]] = set()
    nodes = 0

    def grow(S: frozenset, gens: list[HolElem]):
        nonlocal nodes
        covered = {h.index(g.eta) for g in S}
        e = next(x for x in range(n) if x not in covered)
        for U in fibres[e]:
            nodes += 1
            if nodes > budget:
                raise BudgetExceeded(f"regular_overgroups exceeded {budget} nodes")
            try:
                T = frozenset(h.subgroup_closure(gens + [U], n))
            except BoundExceeded:
                continue
            if T in seen:
                continue
            seen.add(T)
            if n % len(T) or len({g.eta for g in T}) != len(T):
                continue
            if len(T) == n:
                hits.add(T)
            else:
                grow(T, gens + [U])

    if len(start) == n:
        hits.add(start)
    elif h.acts_freely(start):
        grow(start, [X])
    if nontrivial_action:
        hits = {T for T in hits if any(h.hol_mul(g, X) != h.hol_mul(X, g) for g in T)}
    classes: list[RegularSubgroupMap] = []
    for T in sorted(hits, key=lambda s: sorted(s)):
        G = RegularSubgroupMap.from_elements(h, T, "overgroup")
        if all(are_isomorphic(G, other) is None for other in classes):
            classes.append(G)
    return classes


# -- census ------------------------------------------------------------------------------------


@dataclass
class CensusEntry:
    subgroup: frozenset[int]
    simple: bool
    structure_flags: dict
    iso_class: int
    class_size: int
    dot_type: str
    circ_type: str
    ideal_orders: list[int]
    generators: list[str] = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "iso_class": self.iso_class,
            "class_size": self.class_size,
            "simple": self.simple,
            "structure_flags": self.structure_flags,
            "dot_type": self.dot_type,
            "circ_type": self.circ_type,
            "ideal_orders": self.ideal_orders,
            "generators": self.generators,
        }


@dataclass
class Census:
    entries: list[CensusEntry]
    regular_subgroups: int
    nodes: int

    @property
    def simple(self) -> list[CensusEntry]:
        return [e for e in self.entries if e.simple]


def format_hol(h: Holomorph, g: HolElem) -> str:
    v = ",".join(map(str, g.eta.v))
    w = ",".join(map(str, g.alpha.w))
    return f"[(M^{g.eta.k},[{v}]), conj(T^{g.alpha.i} J^{g.alpha.j},[{w}])]"


def _regular_search(ht: HolTable, budget: int, threads: int = 1) -> tuple[set[frozenset[int]], int]:
    h = ht.h
    n, pp = h.n, h.pp
    by_eta = [np.nonzero(ht.eta == e)[0].tolist() for e in range(n)]
    one = int(h.hol_index(h.hol_one))
    free = ht.fixed_point_free

    def branch(root: int):
        found: set[frozenset[int]] = set()
        seen: set[frozenset[int]] = set()
        nodes = 0

        def rec(S: frozenset[int], gens: list[int]):
            nonlocal nodes
            covered = {int(ht.eta[x]) for x in S}
            e = next(x for x in range(n) if x not in covered)
            for g in by_eta[e]:
                nodes += 1
                if nodes > budget:
                    raise BudgetExceeded(f"census exceeded {budget} nodes")
                if not free[g]:
                    continue
                T = _closure_bounded(ht.mul, S, gens + [g], n)
                if T is None or T in seen:
                    continue
                seen.add(T)
                if n % len(T) or len(set(ht.eta[list(T)].tolist())) != len(T):
                    continue
                if not free[[x for x in T if x != one]].all():
                    continue
                if len(T) == n:
                    found.add(T)
                else:
                    rec(T, gens + [g])

        S = frozenset([one])
        T = _closure_bounded(ht.mul, S, [root], n)
        if T is None or not free[root]:
            return found, nodes
        if n % len(T) or len(set(ht.eta[list(T)].tolist())) != len(T):
            return found, nodes
        if not free[[x for x in T if x != one]].all():
            return found, nodes
        if len(T) == n:
            found.add(T)
        else:
            rec(T, [root])
        return found, nodes

    roots = by_eta[1] if n > 1 else []
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            results = list(pool.map(branch, roots))
    else:
        results = [branch(r) for r in roots]
    allfound: set[frozenset[int]] = set()
    total = 0
    for f, k in results:
        allfound |= f
        total += k
    return allfound, total


def _closure_bounded(table: np.ndarray, base: frozenset[int], gens: list[int], bound: int):
    group = set(base)
    frontier = list(group)
    while frontier:
        nxt = []
        for x in frontier:
            for y in table[x, gens].tolist():
                if y not in group:
                    group.add(y)
                    if len(group) > bound:
                        return None
                    nxt.append(y)
        frontier = nxt
    return frozenset(group)


def census(h: Holomorph, n_cap: int = 12, budget: int | None = None, threads: int = 1) -> Census:
    """Every regular subgroup of Hol(N) by full backtracking, grouped by Aut(N)-conjugacy."""
    if h.n > n_cap:
        raise BudgetExceeded(f"census is capped at n <= {n_cap}, got n={h.n}")
    budget = search_budget() if budget is None else budget
    ht = HolTable(h)
    found, nodes = _regular_search(ht, budget, threads)
    classes: dict[tuple[int, ...], list[frozenset[int]]] = {}
    for T in found:
        classes.setdefault(ht.canonical_key(T), []).append(T)
    entries = []
    for iso, key in enumerate(sorted(classes)):
        members = frozenset(key)
        G = RegularSubgroupMap.from_elements(h, (h.hol_element(x) for x in members), "census")
        B = brace_from_regular(G, "table")
        dot_t = classify_group_structure(B.dot_table(), h.p, h.q)
        circ_t = classify_group_structure(B.circ_table(), h.p, h.q)
        dot, circ = B.dot_table(), B.circ_table()
        dinv, cinv = B.dot_inv, B.circ_inv
        flags = {
            "dot_sylow_p_normal": _is_normal(dot, dinv, sylow_subgroup(dot, h.p)),
            "circ_sylow_p_normal": _is_normal(circ, cinv, sylow_subgroup(circ, h.p)),
            "circ_sylow_q_normal": _is_normal(circ, cinv, sylow_subgroup(circ, h.q)),
        }
        gens = [format_hol(h, G[x]) for x in G.generators()]
        entries.append(
            CensusEntry(
                members,
                is_simple(B, "generic"),
                flags,
                iso,
                len(classes[key]),
                dot_t,
                circ_t,
                sorted(len(s) for s in ideals(B, "generic")),
                gens,
            )
        )
    return Census(entries, len(found), nodes)


def census_key(h: Holomorph, G: RegularSubgroupMap, ht: HolTable | None = None) -> tuple[int, ...]:
    ht = HolTable(h) if ht is None else ht
    return ht.canonical_key(h.hol_index(g) for g in G.elements())


def structural_census(h: Holomorph, budget: int | None = None) -> list[tuple[OrderQType, list[RegularSubgroupMap]]]:
    """Regular subgroups Q x| P (P acting nontrivially) over each canonical order-q generator."""
    return [(kind, regular_overgroups(h, g, budget)) for kind, g in order_q_canonical_types(h)]
