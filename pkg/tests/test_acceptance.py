"""Acceptance criteria, one test each.

Every test records a single pass/FAIL line; the lines are printed in the
terminal summary (see conftest.py) and by ``python tests/test_acceptance.py``.
"""

import subprocess
import sys
import time
from pathlib import Path

import numpy as np
import pytest

from sbforge import brace as br
from sbforge import classify as cl
from sbforge import construct as cs
from sbforge import ybe

sys.path.insert(0, str(Path(__file__).parent))
from conftest import family  # noqa: E402

RESULTS: dict[int, tuple[str, bool, str]] = {}


def record(num: int, title: str, checks: dict[str, bool], detail: str = "") -> None:
    ok = all(checks.values())
    failed = ", ".join(k for k, v in checks.items() if not v)
    RESULTS[num] = (title, ok, detail if ok else f"failed: {failed}")
    assert ok, failed


def test_01_construction_and_axioms():
    checks, times = {}, []
    for p, q, n in ((2, 3, 12), (3, 13, 351)):
        f = family(p, q)
        checks[f"regular_{n}"] = f.h.is_regular(f.G.elements()) and len(f.G.elements()) == n
        t = time.perf_counter()
        checks[f"axioms_{n}"] = br.verify_axioms(f.B, "exhaustive").ok
        times.append(time.perf_counter() - t)
    checks["runtime_351_under_10s"] = times[-1] < 10
    record(1, "construction and exhaustive axioms", checks, f"n=351 axioms in {times[-1]:.1f}s")


def test_02_relations():
    checks = {f"n{family(p, q).h.n}": cs.check_relations(family(p, q).h).ok for p, q in ((2, 3), (3, 13))}
    record(2, "relations, commutators, Z^k closed form, starred relations", checks)


def test_03_simplicity():
    checks = {}
    for p, q in ((2, 3), (3, 13)):
        f = family(p, q)
        checks[f"B_{f.h.n}"] = br.is_simple(f.B)
        checks[f"Bopp_{f.h.n}"] = br.is_simple(f.Bs)
    f = family(2, 3)
    for name, B in (("B", f.B), ("Bopp", f.Bs)):
        fast = [i.elements for i in br.enumerate_ideals(B, "fast") if i.is_ideal]
        generic = [i.elements for i in br.enumerate_ideals(B, "generic") if i.is_ideal]
        checks[f"paths_agree_{name}"] = fast == generic
    record(3, "simplicity of B and B^opp; ideal paths agree at n=12", checks)


def test_04_non_isomorphism():
    checks = {}
    for p, q, count in ((2, 3, 24), (3, 13, 2106)):
        f = family(p, q)
        checks[f"aut_count_{count}"] = f.h.aut_order == count == sum(1 for _ in f.h.aut_enumerate())
        checks[f"none_{f.h.n}"] = br.are_isomorphic(f.G, f.Gs) is None
    record(4, "G and G* not isomorphic after all Aut(N) candidates", checks)


def test_05_automorphisms():
    checks = {}
    for p, q in ((2, 3), (3, 13)):
        f = family(p, q)
        A = br.brace_automorphisms(f.B, f.G)
        checks[f"order_{p}"] = A.order == p
        checks[f"cyclic_{p}"] = A.cyclic
        checks[f"generator_J_{p}"] = A.generator == f.h.aut(0, 1)
    f = family(2, 3)
    raw = br.brace_automorphisms_raw(f.B)
    mine = {tuple(f.h.aut_perm(a).tolist()) for a in br.brace_automorphisms(f.B, f.G).members}
    checks["raw_sweep_24"] = len(br.group_automorphisms(f.h.n_table)) == 24
    checks["raw_sweep_same_set"] = {tuple(x.tolist()) for x in raw} == mine
    record(5, "Aut of B cyclic of order p generated by conj J", checks)


def test_06_classification():
    f = family(2, 3)
    h = f.h
    cen = cl.census(h)
    ht = cl.HolTable(h)
    simple = sorted(tuple(sorted(e.subgroup)) for e in cen.simple)
    checks = {
        "two_simple_classes": len(simple) == 2,
        "match_G_Gstar": simple == sorted([cl.census_key(h, f.G, ht), cl.census_key(h, f.Gs, ht)]),
    }
    types = cl.order_q_canonical_types(h)
    checks["typeIII_empty"] = all(not cl.regular_overgroups(h, g) for k, g in types if k.tag == "TypeIII")
    subs = cl.free_order_q_subgroups(h)
    checks["unique_canonical_type"] = all(len(cl.canonical_matches(h, S)) == 1 for S in subs)
    record(6, "census(12) and order-q taxonomy", checks, f"{cen.regular_subgroups} regular subgroups, {len(cen.entries)} classes")


def test_07_structure():
    checks = {}
    for p, q in ((2, 3), (3, 13)):
        s = br.identify_structure(family(p, q).B)
        d, c = s["dot"], s["circ"]
        checks[f"dot_{p}"] = d.sylow_p_normal and not d.sylow_q_normal
        checks[f"circ_{p}"] = not c.sylow_p_normal and c.sylow_q_normal
        checks[f"circ_p_exponent_{p}"] = c.sylow_p_exponent == p * p
        checks[f"circ_p_class_{p}"] = c.sylow_p_class == p - 1
    record(7, "structure of (B,.) and (B,o)", checks)


def test_08_opposite():
    f = family(2, 3)
    inv = f.h.n_inverse
    checks = {
        "inversion_iso_n12": br.is_brace_isomorphism(inv, br.opposite_brace(f.B), br.brace_from_regular(br.opposite_regular(f.G))),
    }
    for p, q in ((2, 3), (3, 13)):
        g = family(p, q)
        checks[f"star_star_{g.h.n}"] = br.opposite_regular(br.opposite_regular(g.G)) == g.G
    record(8, "opposite coherence", checks)


def test_09_ybe():
    checks, t351 = {}, 0.0
    for p, q in ((2, 3), (3, 13)):
        f = family(p, q)
        s = ybe.solution_from_brace(f.B)
        t = time.perf_counter()
        checks[f"braid_{f.h.n}"] = ybe.check_braid(s)
        t351 = time.perf_counter() - t
        checks[f"nondegenerate_{f.h.n}"] = ybe.check_nondegenerate(s)
        checks[f"not_involutive_{f.h.n}"] = not ybe.check_involutive(s)
    checks["braid_351_under_30s"] = t351 < 30
    record(9, "Yang-Baxter solution from B", checks, f"n=351 braid in {t351:.1f}s")


CLI_RUNS = [
    ("verify", "--p", "2", "--q", "3", "--which", "B", "--effort", "exhaustive"),
    ("verify", "--p", "3", "--q", "13", "--which", "B", "--effort", "exhaustive"),
    ("verify", "--p", "3", "--q", "13", "--which", "Bopp", "--effort", "exhaustive"),
    ("aut", "--p", "2", "--q", "3", "--which", "B"),
    ("aut", "--p", "3", "--q", "13", "--which", "B"),
    ("classify", "--p", "2", "--q", "3"),
    ("ybe", "--p", "2", "--q", "3"),
    ("ybe", "--p", "3", "--q", "13"),
]


def test_10_cli():
    checks = {}
    for args in CLI_RUNS:
        outs = []
        for _ in range(2):
            proc = subprocess.run([sys.executable, "-m", "sbforge", *args], capture_output=True, check=False)
            outs.append((proc.returncode, proc.stdout))
        name = " ".join(args[:5])
        checks[f"{name} exit 0"] = outs[0][0] == 0
        checks[f"{name} stable"] = outs[0] == outs[1]
    record(10, "CLI exit 0 and byte-stable reports", checks, f"{len(CLI_RUNS)} commands run twice")


def summary_lines() -> list[str]:
    lines = []
    for num in range(1, 11):
        if num not in RESULTS:
            lines.append(f"criterion {num:2d}: FAIL (not run)")
            continue
        title, ok, detail = RESULTS[num]
        line = f"criterion {num:2d}: {'pass' if ok else 'FAIL'}  {title}"
        lines.append(line + (f"  [{detail}]" if detail else ""))
    return lines


if __name__ == "__main__":
    code = pytest.main([__file__, "-q", "-p", "no:cacheprovider"])
    sys.exit(code)
