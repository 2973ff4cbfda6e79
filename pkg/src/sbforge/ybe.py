"""Set-theoretic solutions of the Yang-Baxter equation from skew braces.

r(a, b) = (lambda_a(b), lambda_a(b)' o a o b) where ' is inversion in (B, o).
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from .brace import SkewBrace


@dataclass(frozen=True, eq=False)
class YBESolution:
    n: int
    r1: np.ndarray
    r2: np.ndarray

    def __call__(self, a: int, b: int) -> tuple[int, int]:
        return int(self.r1[a, b]), int(self.r2[a, b])

    def to_json(self) -> dict:
        pairs = np.stack([self.r1, self.r2], axis=-1)
        return {"n": self.n, "r": pairs.tolist()}

    def dumps(self) -> str:
        return json.dumps(self.to_json(), separators=(",", ":"))

    @classmethod
    def from_json(cls, data: dict) -> "YBESolution":
        pairs = np.asarray(data["r"], dtype=np.int64)
        return cls(int(data["n"]), pairs[..., 0], pairs[..., 1])


def solution_from_brace(B: SkewBrace) -> YBESolution:
    circ = B.circ_table()
    lam = B.lam
    r2 = circ[B.circ_inv[lam], circ]
    return YBESolution(B.n, lam.copy(), r2)


def flip(n: int) -> YBESolution:
    a, b = np.indices((n, n))
    return YBESolution(n, b, a)


def check_bijective(s: YBESolution) -> bool:
    codes = (s.r1 * s.n + s.r2).ravel()
    return len(np.unique(codes)) == s.n * s.n


def check_braid(s: YBESolution) -> bool:
    """(r x id)(id x r)(r x id) = (id x r)(r x id)(id x r) on all triples."""
    n, r1, r2 = s.n, s.r1, s.r2
    y, z = np.indices((n, n))
    ryz1, ryz2 = r1[y, z], r2[y, z]
    for x in range(n):
        a, b = r1[x][y], r2[x][y]
        c, d = r1[b, z], r2[b, z]
        left = (r1[a, c], r2[a, c], d)
        e, f = r1[x][ryz1], r2[x][ryz1]
        right = (e, r1[f, ryz2], r2[f, ryz2])
        if not all(np.array_equal(u, v) for u, v in zip(left, right)):
            return False
    return True


def _rows_are_perms(m: np.ndarray) -> bool:
    srt = np.sort(m, axis=1)
    return bool(np.array_equal(srt, np.broadcast_to(np.arange(m.shape[1]), m.shape)))


def check_nondegenerate(s: YBESolution) -> bool:
    """b -> r(a, b)_1 bijective for each a and a -> r(a, b)_2 bijective for each b."""
    return _rows_are_perms(s.r1) and _rows_are_perms(s.r2.T)


def check_involutive(s: YBESolution) -> bool:
    return bool(
        np.array_equal(s.r1[s.r1, s.r2], np.indices((s.n, s.n))[0])
        and np.array_equal(s.r2[s.r1, s.r2], np.indices((s.n, s.n))[1])
    )
