"""Command-line entry point.

Reports are ``key=value`` lines (or one JSON document with ``--json``).
Exit status: 0 all checks pass, 1 a check failed, 2 usage or configuration
error, 3 a search or table budget was exceeded.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from . import brace as br
from . import classify as cl
from . import construct as cs
from .fpalg import DivisibilityFails, NotPrime, build_frame, validate_prime_pair, verify_frame
from .holo import BoundExceeded, Holomorph
from .report import Report
from .ybe import (
    check_bijective,
    check_braid,
    check_involutive,
    check_nondegenerate,
    solution_from_brace,
)

EXIT_OK, EXIT_CHECK, EXIT_USAGE, EXIT_BUDGET = 0, 1, 2, 3
COMMANDS = ("frame", "build", "verify", "classify", "aut", "ybe", "export")
GENERIC_IDEAL_CAP = 64


class UsageError(ValueError):
    pass


@dataclass
class CommandConfig:
    command: str
    p: int | None
    q: int | None
    which: str
    effort: object
    out: Path | None
    from_file: Path | None
    threads: int
    json: bool


def parse_effort(text: str):
    if text == "exhaustive":
        return "exhaustive"
    if text.startswith("sampled:"):
        try:
            count = int(text.split(":", 1)[1])
        except ValueError:
            count = 0
        if count > 0:
            return ("sampled", count)
    raise argparse.ArgumentTypeError(f"effort must be exhaustive or sampled:<count>, got {text!r}")


COMMAND_HELP = {
    "frame": "print the matrices M, T, J",
    "build": "build the regular subgroup and brace",
    "verify": "check axioms, relations, simplicity and structure",
    "classify": "census of regular subgroups and the order-q taxonomy",
    "aut": "compute the brace automorphism group",
    "ybe": "derive and check the Yang-Baxter solution",
    "export": "write the brace tables as JSON",
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="prime p")
    common.add_argument("--q", type=int, help="prime q dividing (p^p - 1)/(p - 1)")
    common.add_argument("--which", choices=("B", "Bopp"), default="B", help="brace or its opposite")
    common.add_argument("--effort", type=parse_effort, default="exhaustive", help="exhaustive or sampled:<count>")
    common.add_argument("--out", type=Path, help="write the JSON artifact here")
    common.add_argument("--from-file", type=Path, dest="from_file", help="load a brace from a JSON file")
    common.add_argument("--threads", type=int, default=1, help="worker threads for the census")
    common.add_argument("--json", action="store_true", help="print one JSON object instead of key=value lines")
    parser = argparse.ArgumentParser(prog="sbforge", description="Build and check simple skew braces of order p^p q.")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in COMMAND_HELP.items():
        sub.add_parser(name, parents=[common], help=text)
    return parser


def parse_config(argv: list[str] | None = None) -> CommandConfig:
    ns = build_parser().parse_args(argv)
    if ns.threads < 1:
        raise UsageError("--threads must be >= 1")
    return CommandConfig(ns.command, ns.p, ns.q, ns.which, ns.effort, ns.out, ns.from_file, ns.threads, ns.json)


# -- shared plumbing -------------------------------------------------------------------


class Session:
    """Lazily built objects for one (p, q, which)."""

    def __init__(self, cfg: CommandConfig):
        self.cfg = cfg
        self.data = None
        if cfg.from_file is not None:
            try:
                self.data = json.loads(cfg.from_file.read_text())
            except (OSError, json.JSONDecodeError) as exc:
                raise UsageError(f"cannot read {cfg.from_file}: {exc}") from exc
            p, q = self.data.get("p"), self.data.get("q")
            if cfg.p is not None and (cfg.p, cfg.q) != (p, q):
                raise UsageError("--p/--q disagree with the input file")
            self.p, self.q = p, q
            self.which = self.data.get("which", "custom")
        else:
            if cfg.p is None or cfg.q is None:
                raise UsageError("--p and --q are required without --from-file")
            self.p, self.q, self.which = cfg.p, cfg.q, cfg.which
        self.pair = validate_prime_pair(self.p, self.q) if self.p is not None else None
        self._holo = self._G = self._B = None

    @property
    def has_pair(self) -> bool:
        return self.pair is not None

    @property
    def holo(self) -> Holomorph:
        if self._holo is None:
            self._holo = Holomorph(build_frame(self.pair))
        return self._holo

    def G_of(self, which: str) -> br.RegularSubgroupMap:
        return cs.build_G(self.holo) if which == "B" else cs.build_G_star(self.holo)

    @property
    def G(self) -> br.RegularSubgroupMap:
        if self._G is None:
            if self._B is not None and self._B.G is not None:
                self._G = self._B.G
            else:
                self._G = self.G_of(self.which)
        return self._G

    @property
    def B(self) -> br.SkewBrace:
        if self._B is None:
            if self.data is not None:
                self._B = br.load_brace(self.data)
            else:
                self._B = br.brace_from_regular(self.G)
        return self._B

    @property
    def is_family(self) -> bool:
        return self.has_pair and self.which in ("B", "Bopp")


def emit(cfg: CommandConfig, header: dict, report: Report | None, extra_lines=(), payload=None) -> None:
    if cfg.json:
        doc = dict(header)
        if report is not None:
            doc["report"] = report.to_json()
        if payload is not None:
            doc["data"] = payload
        print(json.dumps(doc, indent=1, sort_keys=True))
        return
    for k, v in header.items():
        print(f"{k}={v}")
    for line in extra_lines:
        print(line)
    if report is not None:
        for line in report.lines():
            print(line)
        print(f"result={'pass' if report.ok else 'FAIL'}")


def write_out(cfg: CommandConfig, text: str) -> bool:
    if cfg.out is None:
        return False
    cfg.out.write_text(text + "\n")
    return True


def _header(s: Session) -> dict:
    h = {"p": s.p, "q": s.q, "which": s.which}
    if s.has_pair:
        h["n"] = s.pair.n
    return h


# -- commands ---------------------------------------------------------------------


def cmd_frame(cfg: CommandConfig, s: Session) -> int:
    if not s.has_pair:
        raise UsageError("frame needs --p and --q")
    text = s.holo.frame.dumps()
    if not write_out(cfg, text):
        print(text)
    return EXIT_OK


def cmd_build(cfg: CommandConfig, s: Session) -> int:
    text = s.B.dumps()
    if not write_out(cfg, text):
        print(text)
    return EXIT_OK


def cmd_export(cfg: CommandConfig, s: Session) -> int:
    B = s.B if s.data is not None else br.brace_from_regular(s.G, "structural")
    T = br.to_table_mode(B)
    text = T.dumps()
    if not write_out(cfg, text):
        print(text)
    return EXIT_OK


def _structure_checks(rep: Report, B: br.SkewBrace, p: int, q: int) -> None:
    prof = br.identify_structure(B)
    d, c = prof["dot"], prof["circ"]
    rep.check("dot_sylow_p_normal", d.sylow_p_normal)
    rep.check("dot_sylow_q_not_normal", not d.sylow_q_normal)
    rep.check("circ_sylow_p_not_normal", not c.sylow_p_normal)
    rep.check("circ_sylow_q_normal", c.sylow_q_normal)
    rep.check("circ_sylow_p_exponent", c.sylow_p_exponent == p * p, f"exponent {c.sylow_p_exponent}")
    rep.check("circ_sylow_p_class", c.sylow_p_class == p - 1, f"class {c.sylow_p_class}")
    rep.check("dot_tag", cl.classify_group_structure(B.dot_table(), p, q) == "type_ii")
    rep.check("circ_tag", cl.classify_group_structure(B.circ_table(), p, q) == "type_iii")


def _opposite_checks(rep: Report, s: Session) -> None:
    G = s.G
    Gs = br.opposite_regular(G)
    rep.check("star_involution", br.opposite_regular(Gs) == G)
    rep.check("star_homomorphism", br.star_is_isomorphism(G, Gs))
    B = br.brace_from_regular(G)
    f = s.holo.n_inverse
    rep.check(
        "inversion_is_isomorphism",
        br.is_brace_isomorphism(f, br.opposite_brace(B), br.brace_from_regular(Gs)),
    )


def cmd_verify(cfg: CommandConfig, s: Session) -> int:
    rep = Report("verify")
    if s.is_family:
        rep.extend(verify_frame(s.holo.frame), "frame")
        rep.extend(cs.check_relations(s.holo), "relations")
        try:
            G = s.G_of(s.which)
            rep.check("regular.closure_matches", True)
        except cs.ClosureMismatch as exc:
            rep.check("regular.closure_matches", False, str(exc))
            G = None
        if s.data is not None and G is not None:
            rebuilt = br.brace_from_regular(G)
            rep.check(
                "regular.file_roundtrip",
                np.array_equal(s.B.dot_table(), rebuilt.dot_table())
                and np.array_equal(s.B.circ_table(), rebuilt.circ_table()),
            )
        if G is not None:
            rep.check("regular.order", len(set(G.elements())) == s.pair.n, f"n={s.pair.n}")
            rep.check("regular.regular", s.holo.is_regular(G.elements()))

    B = s.B
    axioms = br.verify_axioms(B, cfg.effort)
    rep.extend(axioms, "axioms")
    if not axioms.ok:
        # the remaining suites assume B is a skew brace
        emit(cfg, _header(s), rep)
        return EXIT_CHECK

    simp = Report("simplicity")
    simp.check("simple", br.is_simple(B))
    if s.is_family:
        other = br.brace_from_regular(br.opposite_regular(s.G))
        simp.check("simple_opposite", br.is_simple(other))
    if B.n <= GENERIC_IDEAL_CAP and B.provenance.get("dot_is_N"):
        fast = br.enumerate_ideals(B, "fast")
        generic = br.enumerate_ideals(B, "generic")
        simp.check("fast_path_agrees", [i.elements for i in fast if i.is_ideal] == [i.elements for i in generic if i.is_ideal])
    rep.extend(simp)

    if s.is_family:
        h = s.holo
        G, Gs = cs.build_G(h), cs.build_G_star(h)
        witness = br.are_isomorphic(G, Gs)
        rep.check(
            "noniso.G_vs_Gstar",
            witness is None,
            f"{h.aut_order} candidates" if witness is None else f"witness {witness}",
        )
        st = Report("structure")
        _structure_checks(st, B, s.p, s.q)
        rep.extend(st)
        op = Report("opposite")
        _opposite_checks(op, s)
        rep.extend(op)

    emit(cfg, _header(s), rep)
    return EXIT_OK if rep.ok else EXIT_CHECK


def cmd_aut(cfg: CommandConfig, s: Session) -> int:
    if not s.has_pair:
        raise UsageError("aut needs --p and --q")
    h = s.holo
    B = s.B
    auts = br.brace_automorphisms(B, s.G)
    rep = Report("aut")
    rep.check("order_p", auts.order == s.p, f"order {auts.order}")
    rep.check("cyclic", auts.cyclic)
    J = h.aut(0, 1)
    rep.check("conj_J_member", J in auts.members)
    rep.check("generator_is_conj_J", auts.generator == J)
    if B.n <= 64:
        raw = br.brace_automorphisms_raw(B)
        mine = sorted(tuple(h.aut_perm(a).tolist()) for a in auts.members)
        rep.check("raw_sweep_agrees", sorted(tuple(f.tolist()) for f in raw) == mine, f"{len(raw)} found")
    lines = [f"automorphisms={auts.describe(h)}"]
    emit(cfg, _header(s), rep, lines, {"describe": auts.describe(h)})
    return EXIT_OK if rep.ok else EXIT_CHECK


def cmd_ybe(cfg: CommandConfig, s: Session) -> int:
    sol = solution_from_brace(br.to_table_mode(s.B))
    rep = Report("ybe")
    rep.check("bijective", check_bijective(sol))
    rep.check("braid", check_braid(sol))
    rep.check("nondegenerate", check_nondegenerate(sol))
    involutive = check_involutive(sol)
    write_out(cfg, sol.dumps())
    emit(cfg, _header(s) | {"involutive": str(involutive).lower()}, rep)
    return EXIT_OK if rep.ok else EXIT_CHECK


def cmd_classify(cfg: CommandConfig, s: Session) -> int:
    if not s.has_pair:
        raise UsageError("classify needs --p and --q")
    h = s.holo
    if h.n > 12 and not os.environ.get("SBFORGE_STRUCTURAL_CENSUS"):
        raise br.BudgetExceeded(f"census at n={h.n} is opt-in (set SBFORGE_STRUCTURAL_CENSUS=1)")
    rep = Report("classify")
    if h.n > 12:
        return _structural_classify(cfg, s, rep)
    cen = cl.census(h, n_cap=12, threads=cfg.threads)
    simple = cen.simple
    ht = cl.HolTable(h)
    keys = {tuple(sorted(e.subgroup)): e for e in cen.entries}
    G, Gs = cs.build_G(h), cs.build_G_star(h)
    kG, kGs = cl.census_key(h, G, ht), cl.census_key(h, Gs, ht)
    rep.check("simple_classes_two", len(simple) == 2, f"{len(simple)} simple")
    rep.check("simple_match_G_Gstar", sorted(tuple(sorted(e.subgroup)) for e in simple) == sorted([kG, kGs]))
    mutual = False
    if len(simple) == 2:
        a = br.RegularSubgroupMap.from_elements(h, (h.hol_element(x) for x in simple[0].subgroup))
        mutual = cl.census_key(h, br.opposite_regular(a), ht) == tuple(sorted(simple[1].subgroup))
    rep.check("mutually_opposite", mutual)
    rep.check("simple_dot_type_ii", all(e.dot_type == "type_ii" for e in simple))
    rep.check("simple_circ_type_iii", all(e.circ_type == "type_iii" for e in simple))
    rep.check("no_other_tag", all("other" not in (e.dot_type, e.circ_type) for e in cen.entries))
    rep.check(
        "nonsimple_have_q_or_pp_ideal",
        all(h.q in e.ideal_orders or h.pp in e.ideal_orders for e in cen.entries if not e.simple),
    )
    subs = cl.free_order_q_subgroups(h)
    rep.check(
        "order_q_unique_type",
        all(len(cl.canonical_matches(h, S)) == 1 for S in subs),
        f"{len(subs)} free order-q subgroups",
    )
    types = cl.order_q_canonical_types(h)
    t3 = [(k, g) for k, g in types if k.tag == "TypeIII"]
    rep.check("typeIII_no_overgroups", all(not cl.regular_overgroups(h, g) for _, g in t3), f"{len(t3)} generators")
    for tag, target in (("TypeI", kG), ("TypeII", kGs)):
        g = next(g for k, g in types if k.tag == tag)
        over = cl.regular_overgroups(h, g)
        rep.check(f"{tag}_overgroup_is_simple_class", [cl.census_key(h, x, ht) for x in over] == [target])
    lines = [
        f"regular_subgroups={cen.regular_subgroups}",
        f"classes={len(cen.entries)}",
        f"simple classes: {len(simple)}; {'mutually opposite' if mutual else 'not mutually opposite'}",
    ]
    if not cfg.json:
        for e in cen.entries:
            lines.append(f"class.{e.iso_class}=" + json.dumps(e.to_json(), sort_keys=True, separators=(",", ":")))
    emit(cfg, _header(s), rep, lines, [e.to_json() for e in cen.entries])
    return EXIT_OK if rep.ok else EXIT_CHECK


def _structural_classify(cfg: CommandConfig, s: Session, rep: Report) -> int:
    h = s.holo
    results = cl.structural_census(h)
    G, Gs = cs.build_G(h), cs.build_G_star(h)
    lines = []
    for kind, groups in results:
        if kind.tag == "TypeIII":
            rep.check(f"{kind}_empty", not groups)
        else:
            target = G if kind.tag == "TypeI" else Gs
            rep.check(
                f"{kind}_is_simple_class",
                len(groups) == 1 and br.are_isomorphic(groups[0], target) is not None,
            )
        lines.append(f"overgroups.{kind}={len(groups)}")
    lines.append("simple classes: 2; mutually opposite" if rep.ok else "simple classes: mismatch")
    emit(cfg, _header(s), rep, lines)
    return EXIT_OK if rep.ok else EXIT_CHECK


HANDLERS = {
    "frame": cmd_frame,
    "build": cmd_build,
    "verify": cmd_verify,
    "classify": cmd_classify,
    "aut": cmd_aut,
    "ybe": cmd_ybe,
    "export": cmd_export,
}


def run(cfg: CommandConfig) -> int:
    try:
        s = Session(cfg)
        return HANDLERS[cfg.command](cfg, s)
    except (UsageError, NotPrime, DivisibilityFails) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except cl.NotAGroup as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return EXIT_CHECK
    except (br.BudgetExceeded, BoundExceeded) as exc:
        print(f"budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET


def main(argv: list[str] | None = None) -> int:
    try:
        cfg = parse_config(argv)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return run(cfg)


if __name__ == "__main__":
    sys.exit(main())
