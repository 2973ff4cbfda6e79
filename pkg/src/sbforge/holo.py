"""The group N = V x| C_q, its automorphism group and its holomorph.

An element of N is the block matrix ``[[M^k, v], [0, 1]]`` stored as
``NElem(k, v)``.  An automorphism is conjugation by ``[[A, w], [0, 1]]`` with
``A = T^i J^j``, stored as ``AutNElem(i, j, w)``.  Holomorph elements pair the
two, with ``(eta, a)(mu, b) = (eta * a(mu), a b)``.

Elements of N are indexed by ``k * p^p + sum(v_i * p^(p-i))``; the index is
the contract used by every table and file in the package.
"""

from __future__ import annotations

import os
from collections.abc import Iterable, Iterator
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .fpalg import Frame, mat_inv, mat_mul, mat_pow

Vec = tuple  # tuple of residues mod p

DEBUG = bool(os.environ.get("SBFORGE_DEBUG"))


class NotInNormalizer(RuntimeError):
    pass


class BoundExceeded(RuntimeError):
    pass


@dataclass(frozen=True, order=True)
class NElem:
    k: int
    v: Vec


@dataclass(frozen=True, order=True)
class AutNElem:
    i: int
    j: int
    w: Vec


@dataclass(frozen=True, order=True)
class HolElem:
    eta: NElem
    alpha: AutNElem


def _tup(a: np.ndarray):
    if a.ndim == 1:
        return tuple(int(x) for x in a)
    return tuple(tuple(int(x) for x in row) for row in a)


class Holomorph:
    """Arithmetic in N, Aut(N) and Hol(N) over a fixed frame."""

    def __init__(self, frame: Frame):
        self.frame = frame
        p, q = frame.p, frame.q
        self.p, self.q = p, q
        self.pp = p**p
        self.n = self.pp * q
        self.unit_order = self.pp - 1
        self.norm_order = self.unit_order * p
        self.aut_order = self.norm_order * self.pp
        self.hol_order = self.n * self.aut_order
        self.m_exp = self.unit_order // q  # T^m_exp = M

        self.zero: Vec = (0,) * p
        self.one = NElem(0, self.zero)
        self.aut_one = AutNElem(0, 0, self.zero)
        self.hol_one = HolElem(self.one, self.aut_one)

        mpow = [np.eye(p, dtype=np.int64)]
        for _ in range(q - 1):
            mpow.append(mat_mul(mpow[-1], frame.M, p))
        self.Mk = np.array(mpow)  # (q, p, p)
        self._Mk = [_tup(m) for m in mpow]

        # normaliser T^i J^j indexed by i * p + j
        stack = []
        tpow = np.eye(p, dtype=np.int64)
        for _ in range(self.unit_order):
            a = tpow
            for _ in range(p):
                stack.append(a)
                a = mat_mul(a, frame.J, p)
            tpow = mat_mul(tpow, frame.T, p)
        self.A = np.array(stack)  # (norm_order, p, p)
        self._A = [_tup(a) for a in stack]
        self._dlog = {a: idx for idx, a in enumerate(self._A)}
        if len(self._dlog) != self.norm_order:
            raise NotInNormalizer("T^i J^j are not pairwise distinct")
        self._inv_cache: dict[int, int] = {}
        self.frob = [pow(p, j, q) for j in range(p)]  # A M A^-1 = M^frob[j]

        # all vectors of V in index order, v_1 most significant
        digits = np.indices((p,) * p).reshape(p, -1).T
        self.vecs = digits.astype(np.int64)  # (pp, p)
        self.weights = p ** np.arange(p - 1, -1, -1, dtype=np.int64)

    # -- vectors and indices ------------------------------------------------

    def vec(self, v) -> Vec:
        return tuple(int(x) % self.p for x in v)

    def basis(self, i: int) -> Vec:
        """Standard basis vector e_i, 1-based as in e_1, ..., e_p."""
        return tuple(int(t == i - 1) for t in range(self.p))

    def vec_index(self, v: Vec) -> int:
        idx = 0
        for x in v:
            idx = idx * self.p + x
        return idx

    def vec_of(self, idx: int) -> Vec:
        out = []
        for _ in range(self.p):
            idx, r = divmod(idx, self.p)
            out.append(r)
        return tuple(reversed(out))

    def index(self, x: NElem) -> int:
        return x.k * self.pp + self.vec_index(x.v)

    def element(self, idx: int) -> NElem:
        k, r = divmod(int(idx), self.pp)
        return NElem(k, self.vec_of(r))

    def elements(self) -> list[NElem]:
        return [self.element(i) for i in range(self.n)]

    def _add(self, a: Vec, b: Vec) -> Vec:
        p = self.p
        return tuple((x + y) % p for x, y in zip(a, b))

    def _neg(self, a: Vec) -> Vec:
        return tuple(-x % self.p for x in a)

    def _mv(self, m, v: Vec) -> Vec:
        p = self.p
        return tuple(sum(r * x for r, x in zip(row, v)) % p for row in m)

    def _mm(self, a, b):
        p = self.p
        cols = list(zip(*b))
        return tuple(tuple(sum(x * y for x, y in zip(row, c)) % p for c in cols) for row in a)

    def matrix(self, a: AutNElem) -> np.ndarray:
        return self.A[a.i * self.p + a.j]

    # -- N ------------------------------------------------------------------

    def n_mul(self, a: NElem, b: NElem) -> NElem:
        return NElem((a.k + b.k) % self.q, self._add(a.v, self._mv(self._Mk[a.k], b.v)))

    def n_inv(self, a: NElem) -> NElem:
        k = -a.k % self.q
        return NElem(k, self._neg(self._mv(self._Mk[k], a.v)))

    def n_block(self, a: NElem) -> np.ndarray:
        """The (p+1) x (p+1) block matrix of an element of N."""
        b = np.eye(self.p + 1, dtype=np.int64)
        b[: self.p, : self.p] = self.Mk[a.k]
        b[: self.p, self.p] = a.v
        return b

    def inner(self, eta: NElem) -> AutNElem:
        """conj(eta): x -> eta x eta^-1."""
        return AutNElem(eta.k * self.m_exp % self.unit_order, 0, eta.v)

    # -- Aut(N) -------------------------------------------------------------

    def aut(self, i: int = 0, j: int = 0, w=None) -> AutNElem:
        w = self.zero if w is None else self.vec(w)
        return AutNElem(i % self.unit_order, j % self.p, w)

    def aut_from_matrix(self, a, w=None) -> AutNElem:
        key = _tup(np.asarray(a) % self.p)
        if key not in self._dlog:
            raise NotInNormalizer("matrix does not normalise <M>")
        i, j = divmod(self._dlog[key], self.p)
        return self.aut(i, j, w)

    def aut_apply(self, a: AutNElem, x: NElem) -> NElem:
        k = x.k * self.frob[a.j] % self.q
        mk = self._Mk[k]
        # (I - M^k) w + A v
        shift = tuple((wi - s) % self.p for wi, s in zip(a.w, self._mv(mk, a.w)))
        return NElem(k, self._add(shift, self._mv(self._A[a.i * self.p + a.j], x.v)))

    def aut_compose(self, a: AutNElem, b: AutNElem) -> AutNElem:
        """a o b, i.e. apply b first."""
        amat = self._A[a.i * self.p + a.j]
        prod = self._mm(amat, self._A[b.i * self.p + b.j])
        idx = self._dlog.get(prod)
        if idx is None:
            raise NotInNormalizer("composition left the normaliser")
        i, j = divmod(idx, self.p)
        return AutNElem(i, j, self._add(a.w, self._mv(amat, b.w)))

    def aut_inv(self, a: AutNElem) -> AutNElem:
        ij = a.i * self.p + a.j
        inv_ij = self._inv_cache.get(ij)
        if inv_ij is None:
            inv_ij = self._dlog[_tup(mat_inv(self.A[ij], self.p))]
            self._inv_cache[ij] = inv_ij
        ainv = self._A[inv_ij]
        i, j = divmod(inv_ij, self.p)
        return AutNElem(i, j, self._neg(self._mv(ainv, a.w)))

    def aut_index(self, a: AutNElem) -> int:
        return (a.i * self.p + a.j) * self.pp + self.vec_index(a.w)

    def aut_element(self, idx: int) -> AutNElem:
        ij, r = divmod(int(idx), self.pp)
        i, j = divmod(ij, self.p)
        return AutNElem(i, j, self.vec_of(r))

    def aut_enumerate(self) -> Iterator[AutNElem]:
        for idx in range(self.aut_order):
            yield self.aut_element(idx)

    def aut_block(self, a: AutNElem) -> np.ndarray:
        b = np.eye(self.p + 1, dtype=np.int64)
        b[: self.p, : self.p] = self.matrix(a)
        b[: self.p, self.p] = a.w
        return b

    # -- Hol(N) -------------------------------------------------------------

    def hol(self, eta: NElem, alpha: AutNElem) -> HolElem:
        return HolElem(eta, alpha)

    def hol_mul(self, g: HolElem, h: HolElem) -> HolElem:
        return HolElem(
            self.n_mul(g.eta, self.aut_apply(g.alpha, h.eta)),
            self.aut_compose(g.alpha, h.alpha),
        )

    def hol_inv(self, g: HolElem) -> HolElem:
        ainv = self.aut_inv(g.alpha)
        return HolElem(self.aut_apply(ainv, self.n_inv(g.eta)), ainv)

    def hol_apply(self, g: HolElem, x: NElem) -> NElem:
        return self.n_mul(g.eta, self.aut_apply(g.alpha, x))

    def hol_pow(self, g: HolElem, e: int) -> HolElem:
        if e < 0:
            g, e = self.hol_inv(g), -e
        out = self.hol_one
        while e:
            if e & 1:
                out = self.hol_mul(out, g)
            g = self.hol_mul(g, g)
            e >>= 1
        return out

    def hol_order_of(self, g: HolElem) -> int:
        e, h = 1, g
        while h != self.hol_one:
            h = self.hol_mul(h, g)
            e += 1
        return e

    def hol_conj(self, a: AutNElem, g: HolElem, a_inv: AutNElem | None = None) -> HolElem:
        """a g a^-1 with a viewed as (1, a) in Hol(N)."""
        if a_inv is None:
            a_inv = self.aut_inv(a)
        return HolElem(
            self.aut_apply(a, g.eta),
            self.aut_compose(self.aut_compose(a, g.alpha), a_inv),
        )

    def hol_index(self, g: HolElem) -> int:
        return self.index(g.eta) * self.aut_order + self.aut_index(g.alpha)

    def hol_element(self, idx: int) -> HolElem:
        e, a = divmod(int(idx), self.aut_order)
        return HolElem(self.element(e), self.aut_element(a))

    def subgroup_closure(self, gens: Iterable[HolElem], bound: int) -> set[HolElem]:
        gens = list(gens)
        gens = gens + [self.hol_inv(g) for g in gens]
        group = {self.hol_one}
        frontier = [self.hol_one]
        while frontier:
            nxt = []
            for x in frontier:
                for g in gens:
                    y = self.hol_mul(x, g)
                    if y not in group:
                        group.add(y)
                        if len(group) > bound:
                            raise BoundExceeded(f"closure exceeds {bound} elements")
                        nxt.append(y)
            frontier = nxt
        return group

    def _check_closed(self, group: set[HolElem]) -> None:
        for g in group:
            if self.hol_inv(g) not in group:
                raise ValueError("set is not closed under inverses")
            for h in group:
                if self.hol_mul(g, h) not in group:
                    raise ValueError("set is not closed under multiplication")

    def is_regular(self, group: Iterable[HolElem]) -> bool:
        group = set(group)
        if DEBUG:
            self._check_closed(group)
        return len(group) == self.n and len({g.eta for g in group}) == self.n

    def acts_freely(self, group: Iterable[HolElem]) -> bool:
        group = set(group)
        if DEBUG:
            self._check_closed(group)
        if len({g.eta for g in group}) != len(group):
            return False
        return not any(self.has_fixed_point(g) for g in group if g != self.hol_one)

    def has_fixed_point(self, g: HolElem) -> bool:
        pts = np.arange(self.n)
        images = self.mul_idx(np.full(self.n, self.index(g.eta)), self.aut_apply_idx(g.alpha, pts))
        return bool(np.any(images == pts))

    # -- vectorised index arithmetic ----------------------------------------

    def split(self, idx) -> tuple[np.ndarray, np.ndarray]:
        idx = np.asarray(idx, dtype=np.int64)
        return idx // self.pp, self.vecs[idx % self.pp]

    def join(self, k: np.ndarray, v: np.ndarray) -> np.ndarray:
        return (k % self.q) * self.pp + (v % self.p) @ self.weights

    def mul_idx(self, a, b) -> np.ndarray:
        """Elementwise product of index arrays in N."""
        ka, va = self.split(a)
        kb, vb = self.split(b)
        mv = np.einsum("...ij,...j->...i", self.Mk[ka], vb)
        return self.join(ka + kb, va + mv)

    def inv_idx(self, a) -> np.ndarray:
        ka, va = self.split(a)
        k = -ka % self.q
        return self.join(k, -np.einsum("...ij,...j->...i", self.Mk[k], va))

    def aut_apply_idx(self, a: AutNElem, x) -> np.ndarray:
        kx, vx = self.split(x)
        k = kx * self.frob[a.j] % self.q
        w = np.array(a.w, dtype=np.int64)
        shift = (w - self.Mk[k] @ w) % self.p
        return self.join(k, shift + vx @ self.matrix(a).T)

    def aut_perm(self, a: AutNElem) -> np.ndarray:
        return self.aut_apply_idx(a, np.arange(self.n))

    @cached_property
    def n_table(self) -> np.ndarray:
        idx = np.arange(self.n)
        return self.mul_idx(idx[:, None], idx[None, :])

    @cached_property
    def n_inverse(self) -> np.ndarray:
        return self.inv_idx(np.arange(self.n))

    @cached_property
    def n_generators(self) -> list[int]:
        """Indices of (1, 0) and (0, e_1), which generate N."""
        return [self.index(NElem(1, self.zero)), self.index(NElem(0, self.basis(1)))]

    @cached_property
    def sylow_p(self) -> frozenset[int]:
        return frozenset(range(self.pp))


def block_power_vector(a: np.ndarray, v, k: int, p: int) -> np.ndarray:
    """Top-right block of [[A, v], [0, 1]]^k by repeated multiplication."""
    size = a.shape[0]
    b = np.eye(size + 1, dtype=np.int64)
    b[:size, :size] = a
    b[:size, size] = v
    return mat_pow(b, k, p)[:size, size]
