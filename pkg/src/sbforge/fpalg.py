"""Exact linear algebra over the prime field F_p and the (M, T, J) frame.

Matrices are numpy integer arrays with entries reduced into ``[0, p)``; they
act on column vectors from the left.  Polynomials are coefficient lists,
lowest degree first.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from functools import lru_cache
from itertools import product

import numpy as np
from sympy import factorint, isprime

from .report import Report


class NotPrime(ValueError):
    pass


class DivisibilityFails(ValueError):
    pass


class Singular(ArithmeticError):
    pass


class InternalSearchExhausted(RuntimeError):
    pass


@dataclass(frozen=True)
class PrimePair:
    p: int
    q: int
    n: int

    @property
    def pp(self) -> int:
        return self.p**self.p


def validate_prime_pair(p: int, q: int) -> PrimePair:
    p, q = int(p), int(q)
    for x in (p, q):
        if x < 2 or not isprime(x):
            raise NotPrime(f"{x} is not prime")
    if ((p**p - 1) // (p - 1)) % q:
        raise DivisibilityFails(f"q={q} does not divide (p^p-1)/(p-1) for p={p}")
    # order of p mod q must be exactly p
    assert pow(p, p, q) == 1 and pow(p, 1, q) != 1
    return PrimePair(p, q, p**p * q)


# -- matrices ---------------------------------------------------------------


def identity(p: int, size: int | None = None) -> np.ndarray:
    return np.eye(p if size is None else size, dtype=np.int64)


def reduce(a, p: int) -> np.ndarray:
    return np.asarray(a, dtype=np.int64) % p


def mat_mul(a: np.ndarray, b: np.ndarray, p: int) -> np.ndarray:
    return (np.asarray(a, dtype=np.int64) @ np.asarray(b, dtype=np.int64)) % p


def rref(a: np.ndarray, p: int) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form mod p and the pivot columns."""
    m = reduce(a, p).copy()
    rows, cols = m.shape
    pivots = []
    r = 0
    for c in range(cols):
        if r == rows:
            break
        nz = np.nonzero(m[r:, c])[0]
        if len(nz) == 0:
            continue
        piv = r + nz[0]
        if piv != r:
            m[[r, piv]] = m[[piv, r]]
        m[r] = (m[r] * pow(int(m[r, c]), -1, p)) % p
        for i in range(rows):
            if i != r and m[i, c]:
                m[i] = (m[i] - m[i, c] * m[r]) % p
        pivots.append(c)
        r += 1
    return m, pivots


def rank(a: np.ndarray, p: int) -> int:
    return len(rref(a, p)[1])


def nullspace(a: np.ndarray, p: int) -> list[np.ndarray]:
    """Basis of {x : a x = 0}, one vector per free column in increasing order."""
    m, pivots = rref(a, p)
    cols = m.shape[1]
    basis = []
    for free in (c for c in range(cols) if c not in pivots):
        x = np.zeros(cols, dtype=np.int64)
        x[free] = 1
        for row, pc in enumerate(pivots):
            x[pc] = (-m[row, free]) % p
        basis.append(x)
    return basis


def mat_inv(a: np.ndarray, p: int) -> np.ndarray:
    a = reduce(a, p)
    size = a.shape[0]
    m, pivots = rref(np.hstack([a, identity(p, size)]), p)
    if pivots[:size] != list(range(size)):
        raise Singular("matrix is not invertible mod %d" % p)
    return m[:, size:]


def mat_pow(a: np.ndarray, e: int, p: int) -> np.ndarray:
    a = reduce(a, p)
    if e < 0:
        a, e = mat_inv(a, p), -e
    result = identity(p, a.shape[0])
    while e:
        if e & 1:
            result = mat_mul(result, a, p)
        a = mat_mul(a, a, p)
        e >>= 1
    return result


def bracket_power(a: np.ndarray, k: int, p: int) -> np.ndarray:
    """A^[k] = I + A + ... + A^(k-1); the zero matrix when k = 0."""
    if k < 0:
        raise ValueError("bracket_power needs k >= 0")
    a = reduce(a, p)
    total = np.zeros_like(a)
    term = identity(p, a.shape[0])
    for _ in range(k):
        total = (total + term) % p
        term = mat_mul(term, a, p)
    return total


def is_identity(a: np.ndarray) -> bool:
    return bool(np.array_equal(a, np.eye(a.shape[0], dtype=a.dtype)))


@lru_cache(maxsize=None)
def _gl_order_factors(p: int, size: int) -> tuple[int, dict[int, int]]:
    order = 1
    for i in range(size):
        order *= p**size - p**i
    return order, factorint(order)


def order_of(a: np.ndarray, p: int) -> int:
    a = reduce(a, p)
    if rank(a, p) < a.shape[0]:
        raise Singular("order_of needs an invertible matrix")
    e, factors = _gl_order_factors(p, a.shape[0])
    for r in factors:
        while e % r == 0 and is_identity(mat_pow(a, e // r, p)):
            e //= r
    return e


# -- polynomials ------------------------------------------------------------


def poly_trim(f: list[int]) -> list[int]:
    f = list(f)
    while len(f) > 1 and f[-1] == 0:
        f.pop()
    return f


def poly_mod(f: list[int], g: list[int], p: int) -> list[int]:
    f = [c % p for c in f]
    g = poly_trim([c % p for c in g])
    inv_lead = pow(g[-1], -1, p)
    dg = len(g) - 1
    for top in range(len(f) - 1, dg - 1, -1):
        c = f[top] * inv_lead % p
        if c:
            for i, gc in enumerate(g):
                f[top - dg + i] = (f[top - dg + i] - c * gc) % p
    return poly_trim(f[:dg] if dg else [0])


def monic_polys(degree: int, p: int):
    """Monic polynomials of the given degree, lower coefficients in product order."""
    for coeffs in product(range(p), repeat=degree):
        yield list(coeffs) + [1]


def is_irreducible(f: list[int], p: int) -> bool:
    # trial division by every monic polynomial of degree <= deg/2
    f = poly_trim(f)
    d = len(f) - 1
    if d < 1:
        return False
    for dg in range(1, d // 2 + 1):
        for g in monic_polys(dg, p):
            if poly_mod(f, g, p) == [0]:
                return False
    return True


def companion(f: list[int], p: int) -> np.ndarray:
    """Companion matrix of a monic polynomial: subdiagonal ones, -coefficients in the last column."""
    f = poly_trim(f)
    d = len(f) - 1
    c = np.zeros((d, d), dtype=np.int64)
    for i in range(1, d):
        c[i, i - 1] = 1
    for i in range(d):
        c[i, d - 1] = (-f[i]) % p
    return c


def poly_eval_matrix(f: list[int], a: np.ndarray, p: int) -> np.ndarray:
    result = np.zeros_like(reduce(a, p))
    for c in reversed(f):
        result = (mat_mul(result, a, p) + c * identity(p, a.shape[0])) % p
    return result


def minimal_polynomial(a: np.ndarray, p: int) -> list[int]:
    """Monic minimal polynomial found by the first linear dependence among I, A, A^2, ..."""
    a = reduce(a, p)
    size = a.shape[0]
    powers = [identity(p, size).ravel()]
    cur = identity(p, size)
    for d in range(1, size + 1):
        cur = mat_mul(cur, a, p)
        # solve sum c_i A^i = -A^d
        system = np.column_stack(powers + [cur.ravel()])
        null = nullspace(system, p)
        if null:
            x = null[0]
            lead = int(x[-1])
            if lead:
                inv = pow(lead, -1, p)
                return [int(c) * inv % p for c in x]
        powers.append(cur.ravel())
    raise InternalSearchExhausted("no minimal polynomial found")


# -- the frame ----------------------------------------------------------------


def jordan_block(p: int) -> np.ndarray:
    j = identity(p)
    for i in range(p - 1):
        j[i, i + 1] = 1
    return j


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=np.int64)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class Frame:
    pair: PrimePair
    M: np.ndarray
    T: np.ndarray
    J: np.ndarray

    @property
    def p(self) -> int:
        return self.pair.p

    @property
    def q(self) -> int:
        return self.pair.q

    def __eq__(self, other):
        if not isinstance(other, Frame):
            return NotImplemented
        return self.pair == other.pair and all(
            np.array_equal(getattr(self, x), getattr(other, x)) for x in "MTJ"
        )

    def __hash__(self):
        return hash((self.pair, self.M.tobytes(), self.T.tobytes(), self.J.tobytes()))

    def to_json(self) -> dict:
        return {
            "p": self.p,
            "q": self.q,
            "M": self.M.tolist(),
            "T": self.T.tolist(),
            "J": self.J.tolist(),
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json(), sort_keys=True)

    @classmethod
    def from_json(cls, data: dict) -> "Frame":
        pair = validate_prime_pair(data["p"], data["q"])
        return cls(pair, *(_frozen(data[x]) % pair.p for x in "MTJ"))


def _first_generator(f: list[int], p: int, unit_order: int) -> np.ndarray:
    c = companion(f, p)
    for coeffs in product(range(p), repeat=p):
        if not any(coeffs):
            continue
        g = poly_eval_matrix(list(coeffs), c, p)
        if order_of(g, p) == unit_order:
            return g
    raise InternalSearchExhausted("unit group of F_p[x]/(f) has no generator")


def _normalising_matrix(m0: np.ndarray, p: int) -> np.ndarray:
    # least invertible A with A M0 = M0^p A, over the nullspace basis of the
    # linear map A -> A M0 - M0^p A on row-major entries
    size = m0.shape[0]
    mp = mat_pow(m0, p, p)
    eye = identity(p, size)
    # vec(A M0) = (I kron M0^T) vec(A), vec(M0^p A) = (M0^p kron I) vec(A)
    system = (np.kron(eye, m0.T) - np.kron(mp, eye)) % p
    basis = nullspace(system, p)
    for coeffs in product(range(p), repeat=len(basis)):
        if not any(coeffs):
            continue
        a = sum(c * b for c, b in zip(coeffs, basis)) % p
        a = a.reshape(size, size)
        if rank(a, p) == size:
            return a
    raise InternalSearchExhausted("no invertible normalising matrix")


def _jordan_basis(j0: np.ndarray, p: int) -> np.ndarray:
    nil = (j0 - identity(p)) % p
    top = mat_pow(nil, p - 1, p)
    for coeffs in product(range(p), repeat=p):
        w = np.array(coeffs, dtype=np.int64)
        if np.any(top @ w % p):
            break
    else:
        raise InternalSearchExhausted("J0 - I is not a single nilpotent block")
    cols = [w]
    for _ in range(p - 1):
        cols.append(nil @ cols[-1] % p)
    # columns b_1, ..., b_p with b_p = w and b_{i-1} = (J0 - I) b_i
    return np.column_stack(cols[::-1])


def _centraliser_generator(m: np.ndarray, p: int, q: int) -> np.ndarray:
    unit_order = p**p - 1
    for coeffs in product(range(p), repeat=p):
        if not any(coeffs):
            continue
        t = poly_eval_matrix(list(coeffs), m, p)
        if order_of(t, p) != unit_order:
            continue
        if np.array_equal(mat_pow(t, unit_order // q, p), m):
            return t
    raise InternalSearchExhausted("no generator T of F_p[M]^x with T^((p^p-1)/q) = M")


@lru_cache(maxsize=None)
def build_frame(pair: PrimePair) -> Frame:
    p, q = pair.p, pair.q
    unit_order = p**p - 1
    f = next(
        (f for f in monic_polys(p, p) if is_irreducible(f, p)),
        None,
    )
    if f is None:
        raise InternalSearchExhausted("no irreducible polynomial of degree p")
    g = _first_generator(f, p, unit_order)
    alpha = mat_pow(g, unit_order // q, p)
    m0 = companion(minimal_polynomial(alpha, p), p)

    j0 = _normalising_matrix(m0, p)
    # force J0^p = I: raise to s with s = 1 mod p and s = 0 mod ord(J0^p)
    m = order_of(mat_pow(j0, p, p), p)
    s = next(s for s in range(m, p * m + 1, m) if s % p == 1)
    j0 = mat_pow(j0, s, p)

    basis = _jordan_basis(j0, p)
    basis_inv = mat_inv(basis, p)
    M = mat_mul(mat_mul(basis_inv, m0, p), basis, p)
    J = mat_mul(mat_mul(basis_inv, j0, p), basis, p)
    if not np.array_equal(J, jordan_block(p)):
        raise InternalSearchExhausted("change of basis did not reach the Jordan matrix")
    T = _centraliser_generator(M, p, q)
    return Frame(pair, _frozen(M), _frozen(T), _frozen(J))


def verify_frame(frame: Frame) -> Report:
    """Check the seven facts about (M, T, J) the construction depends on."""
    p, q = frame.p, frame.q
    M, T, J = (reduce(x, p) for x in (frame.M, frame.T, frame.J))
    unit_order = p**p - 1
    rep = Report("frame")
    I = identity(p)

    def safe_order(a):
        try:
            return order_of(a, p)
        except Singular:
            return None

    # (i)
    mp = minimal_polynomial(M, p)
    rep.check(
        "i_irreducible_action",
        len(mp) - 1 == p and is_irreducible(mp, p) and safe_order(M) == q,
        f"minpoly={mp} order={safe_order(M)}",
    )
    # (ii)
    rep.check("ii_M_minus_I_invertible", rank((M - I) % p, p) == p)
    # (iii)
    tests = [I[:, i] for i in range(p)] + [np.ones(p, dtype=np.int64)]
    spans = all(
        rank(np.column_stack([(mat_pow(M, i, p) - I) @ w % p for i in range(1, p + 1)]), p) == p
        for w in tests
    )
    rep.check("iii_spanning", spans)
    # (iv)
    t_ok = (
        np.array_equal(mat_mul(T, M, p), mat_mul(M, T, p))
        and safe_order(T) == unit_order
        and np.array_equal(mat_pow(T, unit_order // q, p), M)
    )
    rep.check("iv_centraliser_generator", t_ok, f"ord(T)={safe_order(T)}")
    # (v)
    bad = []
    a = I
    for i in range(unit_order):
        nonscalar = not np.array_equal(a, a[0, 0] * I % p)
        if nonscalar and len(minimal_polynomial(a, p)) - 1 != p:
            bad.append(i)
        a = mat_mul(a, T, p)
    rep.check("v_centraliser_irreducible", not bad, f"bad powers={bad[:5]}")
    # (vi)
    j_ok = (
        minimal_polynomial(J, p) == [(-1) ** (p - i) * _binom(p, i) % p for i in range(p + 1)]
        and np.array_equal(J, jordan_block(p))
        and is_identity(mat_pow(J, p, p))
        and _conj_ok(J, M, p, 1)
    )
    rep.check("vi_frobenius_jordan", j_ok)
    # (vii)
    rep.check("vii_normaliser", *_check_normaliser(M, T, J, p, q))
    return rep


def _binom(n: int, k: int) -> int:
    from math import comb

    return comb(n, k)


def _conj_ok(a, M, p, j) -> bool:
    try:
        ainv = mat_inv(a, p)
    except Singular:
        return False
    return np.array_equal(mat_mul(mat_mul(a, M, p), ainv, p), mat_pow(M, p**j, p))


def _check_normaliser(M, T, J, p, q) -> tuple[bool, str]:
    unit_order = p**p - 1
    seen = {}
    tpow = identity(p)
    for i in range(unit_order):
        a = tpow
        for j in range(p):
            seen.setdefault(a.tobytes(), (i, j, a))
            a = mat_mul(a, J, p)
        tpow = mat_mul(tpow, T, p)
    if len(seen) != unit_order * p:
        return False, f"|<T,J>| = {len(seen)}"
    mpowers = {mat_pow(M, r, p).tobytes() for r in range(1, q)}
    for i, j, a in seen.values():
        if not _conj_ok(a, M, p, j):
            return False, f"T^{i} J^{j} does not send M to M^(p^{j})"
        order = order_of(a, p)
        if (order == p) != ((i % (p - 1) == 0) and j != 0):
            return False, f"order-p rule fails at (i,j)=({i},{j})"
        if (order == q) != (a.tobytes() in mpowers):
            return False, f"order-q rule fails at (i,j)=({i},{j})"
    return True, f"|<T,J>| = {len(seen)}"
