"""Skew braces from regular subgroups of Hol(N).

A regular subgroup G is stored as the map eta -> alpha_eta with
g_eta = (eta, alpha_eta) in G.  The brace on N has the group law of N as its
dot operation and ``eta o eta' = eta * alpha_eta(eta')`` as circ.
"""

from __future__ import annotations

import json
from collections.abc import Iterable
from dataclasses import dataclass, field
from functools import cached_property
from math import gcd

import numpy as np

from .holo import AutNElem, HolElem, Holomorph, NElem
from .report import Report

TABLE_BUDGET = 4096
SUBGROUP_BUDGET = 4096
SEED = 0x5B4ACE


class NotRegular(ValueError):
    pass


class BudgetExceeded(RuntimeError):
    pass


class RegularSubgroupMap:
    """eta -> alpha_eta for a regular subgroup of Hol(N)."""

    def __init__(self, holo: Holomorph, alphas: list[AutNElem], name: str = "custom"):
        if len(alphas) != holo.n:
            raise NotRegular(f"need {holo.n} automorphisms, got {len(alphas)}")
        self.holo = holo
        self.alphas = list(alphas)
        self.name = name

    @classmethod
    def from_elements(cls, holo: Holomorph, group: Iterable[HolElem], name: str = "custom"):
        slots: list[AutNElem | None] = [None] * holo.n
        for g in group:
            idx = holo.index(g.eta)
            if slots[idx] is not None:
                raise NotRegular("two elements share a first component")
            slots[idx] = g.alpha
        if any(a is None for a in slots):
            raise NotRegular("first components do not cover N")
        return cls(holo, slots, name)

    def __getitem__(self, idx: int) -> HolElem:
        return HolElem(self.holo.element(idx), self.alphas[idx])

    def __eq__(self, other):
        if not isinstance(other, RegularSubgroupMap):
            return NotImplemented
        return self.holo.frame == other.holo.frame and self.alphas == other.alphas

    def __hash__(self):
        return hash(tuple(self.alphas))

    def elements(self) -> list[HolElem]:
        return [self[i] for i in range(self.holo.n)]

    def hol_indices(self) -> tuple[int, ...]:
        return tuple(sorted(self.holo.hol_index(g) for g in self.elements()))

    @cached_property
    def alpha_index(self) -> np.ndarray:
        return np.array([self.holo.aut_index(a) for a in self.alphas], dtype=np.int64)

    def circ(self, a: int, b: int) -> int:
        h = self.holo
        return int(h.n_table[a, int(h.aut_apply_idx(self.alphas[a], b))]) if h.n <= TABLE_BUDGET else h.index(
            h.n_mul(h.element(a), h.aut_apply(self.alphas[a], h.element(b)))
        )

    def circ_row(self, a: int) -> np.ndarray:
        h = self.holo
        return h.mul_idx(np.full(h.n, a), h.aut_apply_idx(self.alphas[a], np.arange(h.n)))

    def circ_table(self) -> np.ndarray:
        return np.array([self.circ_row(a) for a in range(self.holo.n)], dtype=np.int64)

    def is_closed(self, circ: np.ndarray | None = None) -> bool:
        """alpha_(a o b) = alpha_a alpha_b for all a, b.

        Automorphisms are compared on the two generators of N.
        """
        h = self.holo
        gens = np.array(h.n_generators)
        images = np.array([h.aut_apply_idx(a, gens) for a in self.alphas])  # (n, 2)
        circ = self.circ_table() if circ is None else circ
        for a in range(h.n):
            perm = h.aut_perm(self.alphas[a])
            if not np.array_equal(images[circ[a]], perm[images]):
                return False
        return True

    def generators(self) -> list[int]:
        """Greedy generating set of (N, o) in index order."""
        h = self.holo
        gens: list[int] = []
        group = {0}
        for x in range(h.n):
            if x in group:
                continue
            gens.append(x)
            group = self._closure(gens)
            if len(group) == h.n:
                break
        return gens

    def _closure(self, gens: list[int]) -> set[int]:
        group = {0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.circ(x, g)
                    if y not in group:
                        group.add(y)
                        nxt.append(y)
            frontier = nxt
        return group

    def to_json(self) -> list[list]:
        return [[a.i, a.j, list(a.w)] for a in self.alphas]


def left_regular(holo: Holomorph) -> RegularSubgroupMap:
    return RegularSubgroupMap(holo, [holo.aut_one] * holo.n, "trivial")


def opposite_regular(G: RegularSubgroupMap, check: bool = False) -> RegularSubgroupMap:
    """G* with g*_eta = (eta^-1, conj(eta) alpha_eta), indexed by first component."""
    h = G.holo
    alphas: list[AutNElem | None] = [None] * h.n
    for idx in range(h.n):
        eta = h.element(idx)
        star = h.aut_compose(h.inner(eta), G.alphas[idx])
        alphas[h.index(h.n_inv(eta))] = star
    name = {"B": "Bopp", "Bopp": "B"}.get(G.name, G.name + "*")
    out = RegularSubgroupMap(h, alphas, name)
    if check and not star_is_isomorphism(G, out):
        raise NotRegular("star map is not a homomorphism")
    return out


def star_is_isomorphism(G: RegularSubgroupMap, Gs: RegularSubgroupMap) -> bool:
    """g_eta -> g*_eta respects products: g*_a g*_b = g*_(a o b)."""
    h = G.holo
    inv = h.n_inverse
    circ = G.circ_table()
    circ_s = Gs.circ_table()
    # first components: (a o b)^-1 must equal a^-1 o* b^-1
    if not np.array_equal(inv[circ], circ_s[inv[:, None], inv[None, :]]):
        return False
    return Gs.is_closed(circ_s)


# -- the brace ----------------------------------------------------------------


@dataclass
class SkewBrace:
    """A finite skew brace on {0, ..., n-1} with identity 0.

    Table mode keeps both Cayley tables; structural mode keeps only the
    regular subgroup map and computes rows on demand.
    """

    n: int
    mode: str
    provenance: dict = field(default_factory=dict)
    dot: np.ndarray | None = None
    circ: np.ndarray | None = None
    G: RegularSubgroupMap | None = None
    opposite: bool = False

    def __post_init__(self):
        if self.mode == "table":
            self.dot = np.asarray(self.dot, dtype=np.int64)
            self.circ = np.asarray(self.circ, dtype=np.int64)

    # rows give a uniform interface across the two modes
    def dot_row(self, a: int) -> np.ndarray:
        if self.mode == "table":
            return self.dot[a]
        h = self.G.holo
        idx = np.arange(self.n)
        if self.opposite:
            return h.mul_idx(idx, np.full(self.n, a))
        return h.mul_idx(np.full(self.n, a), idx)

    def circ_row(self, a: int) -> np.ndarray:
        if self.mode == "table":
            return self.circ[a]
        return self.G.circ_row(a)

    def dot_op(self, a, b):
        if self.mode == "table":
            return self.dot[a, b]
        h = self.G.holo
        return h.mul_idx(b, a) if self.opposite else h.mul_idx(a, b)

    def circ_op(self, a, b):
        if self.mode == "table":
            return self.circ[a, b]
        a, b = np.broadcast_arrays(np.asarray(a), np.asarray(b))
        out = np.empty(a.shape, dtype=np.int64)
        for x in np.unique(a):
            mask = a == x
            out[mask] = self.G.circ_row(int(x))[b[mask]]
        return out

    @cached_property
    def dot_inv(self) -> np.ndarray:
        return _inverses(self.dot_table())

    @cached_property
    def circ_inv(self) -> np.ndarray:
        return _inverses(self.circ_table())

    def dot_table(self) -> np.ndarray:
        if self.mode == "table":
            return self.dot
        return np.array([self.dot_row(a) for a in range(self.n)])

    def circ_table(self) -> np.ndarray:
        if self.mode == "table":
            return self.circ
        return np.array([self.circ_row(a) for a in range(self.n)])

    @cached_property
    def lam(self) -> np.ndarray:
        """lam[a, b] = a^-1 . (a o b)."""
        dot = self.dot_table()
        circ = self.circ_table()
        return dot[self.dot_inv[:, None], circ]

    def to_json(self) -> dict:
        prov = self.provenance
        out = {"n": self.n, "p": prov.get("p"), "q": prov.get("q"), "which": prov.get("which", "custom")}
        if self.mode == "table":
            out["dot"] = self.dot.tolist()
            out["circ"] = self.circ.tolist()
        else:
            out["frame"] = self.G.holo.frame.to_json()
            out["G"] = self.G.to_json()
            out["opposite"] = self.opposite
        return out

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))


def _inverses(table: np.ndarray) -> np.ndarray:
    n = table.shape[0]
    rows, cols = np.nonzero(table == 0)
    inv = np.full(n, -1, dtype=np.int64)
    inv[rows] = cols
    return inv


def brace_from_regular(G: RegularSubgroupMap, mode: str | None = None) -> SkewBrace:
    h = G.holo
    if mode is None:
        mode = "table" if h.n <= TABLE_BUDGET else "structural"
    prov = {"p": h.p, "q": h.q, "which": G.name, "dot_is_N": True}
    if mode == "structural":
        return SkewBrace(h.n, "structural", prov, G=G)
    circ = G.circ_table()
    if not G.is_closed(circ):
        raise NotRegular("eta -> (eta, alpha_eta) is not closed under multiplication")
    return SkewBrace(h.n, "table", prov, dot=h.n_table, circ=circ, G=G)


def brace_from_tables(dot, circ, provenance: dict | None = None) -> SkewBrace:
    return SkewBrace(len(dot), "table", dict(provenance or {}), dot=dot, circ=circ)


def to_table_mode(B: SkewBrace) -> SkewBrace:
    if B.mode == "table":
        return B
    if B.n > TABLE_BUDGET:
        raise BudgetExceeded(f"n={B.n} exceeds the table budget {TABLE_BUDGET}")
    return SkewBrace(B.n, "table", dict(B.provenance), dot=B.dot_table(), circ=B.circ_table(), G=B.G)


def load_brace(data: dict) -> SkewBrace:
    from .fpalg import Frame

    prov = {"p": data.get("p"), "q": data.get("q"), "which": data.get("which", "custom")}
    if "dot" in data:
        prov["dot_is_N"] = data.get("which") in ("B", "Bopp")
        return brace_from_tables(data["dot"], data["circ"], prov)
    h = Holomorph(Frame.from_json(data["frame"]))
    G = RegularSubgroupMap(h, [h.aut(i, j, w) for i, j, w in data["G"]], prov["which"])
    prov["dot_is_N"] = True
    B = SkewBrace(h.n, "structural", prov, G=G, opposite=bool(data.get("opposite")))
    return B


# -- axioms -------------------------------------------------------------------


def _triples_by_row(B: SkewBrace, effort):
    """Yield (a, b_grid, c_grid) blocks: all triples, or a fixed-seed sample."""
    n = B.n
    if effort == "exhaustive":
        b, c = np.meshgrid(np.arange(n), np.arange(n), indexing="ij")
        for a in range(n):
            yield a, b, c
        return
    count = int(effort[1] if isinstance(effort, tuple) else effort)
    rng = np.random.default_rng(SEED)
    trip = rng.integers(0, n, size=(count, 3))
    order = np.argsort(trip[:, 0], kind="stable")
    trip = trip[order]
    for a in np.unique(trip[:, 0]):
        sel = trip[trip[:, 0] == a]
        yield int(a), sel[:, 1], sel[:, 2]


def _sampled_inverses(B: SkewBrace, name: str, count: int = 1000) -> bool:
    # structural mode: x has a two-sided inverse, checked on a fixed sample
    h = B.G.holo
    xs = np.random.default_rng(SEED).integers(0, B.n, size=count)
    if name == "dot":
        ys = h.n_inverse[xs]
        return bool((B.dot_op(xs, ys) == 0).all() and (B.dot_op(ys, xs) == 0).all())
    ys = np.array([h.index(h.hol_inv(B.G[int(x)]).eta) for x in xs])
    return bool((B.circ_op(xs, ys) == 0).all() and (B.circ_op(ys, xs) == 0).all())


def _first_violation(a, b, c, bad) -> str:
    pos = np.argwhere(bad)[0]
    return f"({a}, {int(b[tuple(pos)])}, {int(c[tuple(pos)])})"


def verify_axioms(B: SkewBrace, effort="exhaustive") -> Report:
    """Group axioms for dot and circ and the brace relation.

    ``effort`` is ``"exhaustive"`` or ``("sampled", count)``.
    """
    rep = Report("axioms")
    n = B.n
    idx = np.arange(n)
    zeros = np.zeros(n, dtype=np.int64)
    small = n <= TABLE_BUDGET
    for name, row, op in (("dot", B.dot_row, B.dot_op), ("circ", B.circ_row, B.circ_op)):
        rep.check(
            f"{name}_identity",
            np.array_equal(row(0), idx) and np.array_equal(op(idx, zeros), idx),
        )
        table = np.array([row(a) for a in range(n)]) if small else None
        if small:
            has_inv = bool(((table == 0).sum(axis=1) == 1).all() and ((table == 0).sum(axis=0) == 1).all())
        else:
            has_inv = _sampled_inverses(B, name)
        rep.check(f"{name}_inverses", has_inv)
        violation = ""
        for a, b, c in _triples_by_row(B, effort):
            if small:
                lhs = table[table[a][b], c]
                rhs = table[a][table[b, c]]
            else:
                lhs = op(row(a)[b], c)
                rhs = row(a)[op(b, c)]
            bad = lhs != rhs
            if bad.any():
                violation = _first_violation(a, b, c, bad)
                break
        rep.check(f"{name}_associative", not violation, violation)

    # a o (b . c) = (a o b) . a^-1 . (a o c)
    violation = ""
    inv = B.dot_inv if n <= TABLE_BUDGET else B.G.holo.n_inverse
    for a, b, c in _triples_by_row(B, effort):
        crow = B.circ_row(a)
        lhs = crow[B.dot_op(b, c)]
        rhs = B.dot_op(B.dot_op(crow[b], np.full(np.shape(b), inv[a])), crow[c])
        bad = lhs != rhs
        if bad.any():
            violation = _first_violation(a, b, c, bad)
            break
    rep.check("brace_relation", not violation, violation)
    return rep


# -- lambda, ideals, simplicity -------------------------------------------------


def lambda_map(B: SkewBrace, a: int) -> np.ndarray:
    return B.dot_row(int(B.dot_inv[a]))[B.circ_row(a)]


def _closure_table(table: np.ndarray, gens: Iterable[int]) -> frozenset[int]:
    gens = list(gens)
    group = {0}
    frontier = [0]
    while frontier:
        nxt = []
        for x in frontier:
            for y in table[x, gens].tolist():
                if y not in group:
                    group.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(group)


def all_subgroups(table: np.ndarray, budget: int = SUBGROUP_BUDGET) -> list[frozenset[int]]:
    """Every subgroup, by joining cyclic subgroups until nothing new appears."""
    n = table.shape[0]
    if n > budget:
        raise BudgetExceeded(f"subgroup enumeration budget {budget} < n={n}")
    cyclic: dict[frozenset[int], int] = {}
    for x in range(n):
        cyclic.setdefault(_closure_table(table, [x]), x)
    found = {c: [g] for c, g in cyclic.items()}
    frontier = dict(found)
    while frontier:
        nxt = {}
        for s, gens in frontier.items():
            for c, g in cyclic.items():
                if c <= s:
                    continue
                t = _closure_table(table, gens + [g])
                if t not in found:
                    found[t] = nxt[t] = gens + [g]
        frontier = nxt
        if len(found) > budget:
            raise BudgetExceeded("too many subgroups")
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def _is_normal(table: np.ndarray, inv: np.ndarray, s: frozenset[int]) -> bool:
    members = np.array(sorted(s))
    mask = np.zeros(table.shape[0], dtype=bool)
    mask[members] = True
    # g x g^-1 for all g, x in s
    conj = table[table[:, members], inv[:, None]]
    return bool(mask[conj].all())


@dataclass(frozen=True)
class Ideal:
    elements: frozenset
    left_ideal: bool
    dot_normal: bool
    circ_normal: bool

    @property
    def is_ideal(self) -> bool:
        return self.left_ideal and self.dot_normal and self.circ_normal

    @property
    def order(self) -> int:
        return len(self.elements)


def _flags(B: SkewBrace, s: frozenset[int]) -> Ideal:
    members = np.array(sorted(s))
    mask = np.zeros(B.n, dtype=bool)
    mask[members] = True
    left = bool(mask[B.lam[:, members]].all())
    return Ideal(
        frozenset(s),
        left,
        _is_normal(B.dot_table(), B.dot_inv, s),
        _is_normal(B.circ_table(), B.circ_inv, s),
    )


def enumerate_ideals(B: SkewBrace, path: str = "auto") -> list[Ideal]:
    """Left ideals of B with their normality flags.

    The fast path only inspects {1}, P and B, which suffices when (B, .) is
    the group N (its only normal subgroups).  The generic path enumerates the
    whole subgroup lattice of (B, .).
    """
    if path == "auto":
        path = "fast" if B.provenance.get("dot_is_N") else "generic"
    if path == "fast":
        p, q = B.provenance["p"], B.provenance["q"]
        candidates = [frozenset([0]), frozenset(range(p**p)), frozenset(range(B.n))]
        if B.n != p**p * q:
            raise ValueError("fast path needs (B, .) = N")
    elif path == "generic":
        candidates = all_subgroups(B.dot_table())
    else:
        raise ValueError(f"unknown path {path!r}")
    out = [_flags(B, s) for s in candidates]
    return [i for i in out if i.left_ideal]


def ideals(B: SkewBrace, path: str = "auto") -> list[frozenset]:
    return [i.elements for i in enumerate_ideals(B, path) if i.is_ideal]


def is_simple(B: SkewBrace, path: str = "auto") -> bool:
    found = ideals(B, path)
    return B.n > 1 and sorted(len(s) for s in found) == [1, B.n]


# -- opposites and isomorphism ---------------------------------------------------


def opposite_brace(B: SkewBrace) -> SkewBrace:
    prov = dict(B.provenance)
    prov["which"] = {"B": "Bopp", "Bopp": "B"}.get(prov.get("which"), "custom")
    prov["opposite_of"] = B.provenance.get("which")
    if B.mode == "table":
        return SkewBrace(B.n, "table", prov, dot=B.dot.T.copy(), circ=B.circ, G=None)
    return SkewBrace(B.n, "structural", prov, G=B.G, opposite=not B.opposite)


def is_brace_isomorphism(f: np.ndarray, B1: SkewBrace, B2: SkewBrace) -> bool:
    """f: B1 -> B2 preserves both operations (exhaustive over all pairs)."""
    f = np.asarray(f)
    if len(np.unique(f)) != B1.n:
        return False
    d1, c1 = B1.dot_table(), B1.circ_table()
    d2, c2 = B2.dot_table(), B2.circ_table()
    return bool(
        np.array_equal(f[d1], d2[f[:, None], f[None, :]])
        and np.array_equal(f[c1], c2[f[:, None], f[None, :]])
    )


def _conjugates_into(a, a_inv, G1: RegularSubgroupMap, G2: RegularSubgroupMap, idxs) -> bool:
    h = G1.holo
    for idx in idxs:
        g = h.hol_conj(a, G1[idx], a_inv)
        if G2.alphas[h.index(g.eta)] != g.alpha:
            return False
    return True


def are_isomorphic(G1: RegularSubgroupMap, G2: RegularSubgroupMap) -> AutNElem | None:
    """A witness a in Aut(N) with a G1 a^-1 = G2, or None."""
    h = G1.holo
    gens = G1.generators()
    everything = range(h.n)
    for a in h.aut_enumerate():
        a_inv = h.aut_inv(a)
        if _conjugates_into(a, a_inv, G1, G2, gens) and _conjugates_into(a, a_inv, G1, G2, everything):
            return a
    return None


def conjugate_regular(a: AutNElem, G: RegularSubgroupMap) -> RegularSubgroupMap:
    h = G.holo
    a_inv = h.aut_inv(a)
    return RegularSubgroupMap.from_elements(h, (h.hol_conj(a, g, a_inv) for g in G.elements()), G.name)


# -- automorphisms ---------------------------------------------------------------


@dataclass
class BraceAutomorphisms:
    members: list[AutNElem]
    order: int
    cyclic: bool
    generator: AutNElem | None

    def describe(self, holo: Holomorph) -> str:
        gen = "none"
        if self.generator is not None:
            gen = describe_aut(holo, self.generator)
        kind = "cyclic" if self.cyclic else "noncyclic"
        return f"order {self.order}, {kind}, generator = {gen}"


def describe_aut(holo: Holomorph, a: AutNElem) -> str:
    w = "0" if not any(a.w) else "[" + ",".join(map(str, a.w)) + "]"
    mat = []
    if a.i:
        mat.append(f"T^{a.i}" if a.i != 1 else "T")
    if a.j:
        mat.append(f"J^{a.j}" if a.j != 1 else "J")
    return f"conj [[{' '.join(mat) or 'I'},{w}],[0,1]]"


def _group_structure(holo: Holomorph, members: list[AutNElem]) -> tuple[bool, AutNElem | None]:
    order = len(members)
    for a in sorted(members):
        x, e = a, 1
        while x != holo.aut_one:
            x = holo.aut_compose(x, a)
            e += 1
        if e == order:
            return True, a
    return False, None


def brace_automorphisms(B: SkewBrace, G: RegularSubgroupMap) -> BraceAutomorphisms:
    """All a in Aut(N) that are also automorphisms of (B, o)."""
    h = G.holo
    gens = G.generators()
    circ = B.circ_table() if B.n <= TABLE_BUDGET else None
    members = []
    for a in h.aut_enumerate():
        perm = h.aut_perm(a)
        ok = True
        # a(x o y) = a(x) o a(y) on generators x of (B, o), all y
        for x in gens:
            row = circ[x] if circ is not None else B.circ_row(x)
            rrow = circ[perm[x]] if circ is not None else B.circ_row(int(perm[x]))
            if not np.array_equal(perm[row], rrow[perm]):
                ok = False
                break
        if ok and circ is not None:
            ok = bool(np.array_equal(perm[circ], circ[perm[:, None], perm[None, :]]))
        if ok:
            members.append(a)
    cyclic, gen = _group_structure(h, members)
    return BraceAutomorphisms(members, len(members), cyclic, gen)


def group_automorphisms(table: np.ndarray) -> list[np.ndarray]:
    """All automorphisms of a group given by its Cayley table (identity 0).

    Extends images of a greedy generating set; independent of any structural
    description of the group.
    """
    n = table.shape[0]
    gens = []
    group = frozenset([0])
    for x in range(n):
        if x not in group:
            gens.append(x)
            group = _closure_table(table, gens)
    orders = np.array([_element_order(table, x) for x in range(n)])
    out = []

    def extend(images):
        f = {0: 0}
        frontier = [0]
        while frontier:
            nxt = []
            for x in frontier:
                for g, gi in zip(gens, images):
                    y, fy = int(table[x, g]), int(table[f[x], gi])
                    if y in f:
                        if f[y] != fy:
                            return None
                    else:
                        f[y] = fy
                        nxt.append(y)
            frontier = nxt
        perm = np.array([f[x] for x in range(n)])
        if len(np.unique(perm)) != n:
            return None
        if not np.array_equal(perm[table], table[perm[:, None], perm[None, :]]):
            return None
        return perm

    def search(depth, images):
        if depth == len(gens):
            perm = extend(images)
            if perm is not None:
                out.append(perm)
            return
        for y in np.nonzero(orders == orders[gens[depth]])[0]:
            search(depth + 1, images + [int(y)])

    search(0, [])
    return out


def _element_order(table: np.ndarray, x: int) -> int:
    e, y = 1, x
    while y != 0:
        y = int(table[y, x])
        e += 1
    return e


def brace_automorphisms_raw(B: SkewBrace) -> list[np.ndarray]:
    """Automorphisms of (B, .) that also preserve circ, by brute force."""
    circ = B.circ_table()
    return [
        f
        for f in group_automorphisms(B.dot_table())
        if np.array_equal(f[circ], circ[f[:, None], f[None, :]])
    ]


# -- structure ---------------------------------------------------------------------


def element_orders(table: np.ndarray) -> np.ndarray:
    n = table.shape[0]
    orders = np.ones(n, dtype=np.int64)
    cur = np.arange(n)
    alive = cur != 0
    e = 1
    while alive.any():
        cur = table[cur, np.arange(n)]
        e += 1
        newly = alive & (cur == 0)
        orders[newly] = e
        alive &= ~newly
    return orders


def _prime_power_of(x: int, p: int) -> bool:
    while x % p == 0:
        x //= p
    return x == 1


def sylow_subgroup(table: np.ndarray, r: int) -> frozenset[int]:
    """One Sylow r-subgroup, grown inside normalisers from the trivial group."""
    n = table.shape[0]
    target = 1
    while n % (target * r) == 0:
        target *= r
    orders = element_orders(table)
    inv = _inverses(table)
    relems = [x for x in range(n) if _prime_power_of(int(orders[x]), r)]
    H = frozenset([0])
    while len(H) < target:
        members = np.array(sorted(H))
        mask = np.zeros(n, dtype=bool)
        mask[members] = True
        for x in relems:
            if x in H:
                continue
            if mask[table[table[x, members], inv[x]]].all():
                H = _closure_table(table, sorted(H) + [x])
                break
        else:
            raise RuntimeError("Sylow growth stalled")
    return H


def nilpotency_class(table: np.ndarray, sub: frozenset[int]) -> int | None:
    """Class of the subgroup via its lower central series; None if not nilpotent."""
    inv = _inverses(table)
    members = sorted(sub)
    cur = frozenset(sub)
    c = 0
    while len(cur) > 1:
        comms = {
            int(table[table[table[x, y], inv[x]], inv[y]]) for x in members for y in sorted(cur)
        }
        nxt = _closure_table(table, sorted(comms))
        if nxt == cur:
            return None
        cur = nxt
        c += 1
    return c


@dataclass
class GroupProfile:
    order_profile: dict
    abelian: bool
    center_size: int
    sylow_p_normal: bool
    sylow_q_normal: bool
    sylow_p_exponent: int
    sylow_p_class: int | None

    def to_json(self) -> dict:
        d = dict(self.__dict__)
        d["order_profile"] = {str(k): v for k, v in sorted(self.order_profile.items())}
        return d


def group_profile(table: np.ndarray, p: int, q: int) -> GroupProfile:
    table = np.asarray(table)
    n = table.shape[0]
    orders = element_orders(table)
    values, counts = np.unique(orders, return_counts=True)
    abelian = bool(np.array_equal(table, table.T))
    center = int(np.sum(np.all(table == table.T, axis=1)))
    inv = _inverses(table)
    P = sylow_subgroup(table, p)
    Q = sylow_subgroup(table, q)
    exponent = 1
    for x in P:
        exponent = exponent * int(orders[x]) // gcd(exponent, int(orders[x]))
    return GroupProfile(
        {int(v): int(c) for v, c in zip(values, counts)},
        abelian,
        center,
        _is_normal(table, inv, P),
        _is_normal(table, inv, Q),
        exponent,
        nilpotency_class(table, P),
    )


def identify_structure(B: SkewBrace) -> dict[str, GroupProfile]:
    p, q = B.provenance["p"], B.provenance["q"]
    return {
        "dot": group_profile(B.dot_table(), p, q),
        "circ": group_profile(B.circ_table(), p, q),
    }
