"""Command line surface.

Four verb groups: construct writes hypergraph artifacts, check verifies
properties of existing artifacts or parameter sets, search runs the
exact and greedy optimizers, table emits growth and trend reports.

Conventions, kept strictly: artifacts go to files, machine-readable
results and certificates go to stdout as single JSON lines, human
commentary goes to stderr.  Exit codes: 0 success/property holds,
2 a copy or violation was found (certificate on stdout), 3 bad
parameters, 4 budget exhausted, 5 file I/O or parse trouble.
--verify never alters a written artifact; it only decides the exit.

The node budget for searches comes from --budget when given, else the
QTURAN_BUDGET environment variable, else each solver's default.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass
from enum import IntEnum
from typing import Optional

from .errors import (BaseNotFreeError, BudgetError, InvariantViolation,
                     ParameterError, ParseError)
from .hypergraphs import Hypergraph, load_hypergraph, save_hypergraph
from .numbers import (DEFAULT_BUDGET, GoodSet, behrend_good_set,
                      exact_max_packing, greedy_packing, is_k_good,
                      max_ap_free, max_good_set)
from .constructions import (LiftConfig, ModularConfig, SplitConfig,
                            centered_family, construct_lift,
                            construct_modular, construct_split)
from .patterns import (IPattern, QPattern, find_I_copy, find_Q_copy,
                       generate_I, generate_Q, shadow_clique_audit)
from .turan import (DEFAULT_SEARCH_BUDGET, ForbiddenFamily, bes_family,
                    density_trend, ex_exact, growth_csv, growth_table,
                    monotone_chain_check)


class ExitStatus(IntEnum):
    OK = 0
    FOUND = 2
    PARAM = 3
    BUDGET = 4
    IO = 5


@dataclass(frozen=True)
class PatternSpec:
    """Parsed form of a pattern argument.

    qkr:K:R and ik:K:I name the canonical patterns, file:PATH loads an
    arbitrary one, bes:K:V:E is the span rule family.
    """

    kind: str
    text: str
    k: int = 0
    r: int = 0
    i: int = 0
    v: int = 0
    e: int = 0
    path: str = ""

    @classmethod
    def parse(cls, text: str) -> "PatternSpec":
        parts = text.split(":")
        try:
            if parts[0] == "qkr" and len(parts) == 3:
                return cls(kind="q", text=text, k=int(parts[1]), r=int(parts[2]))
            if parts[0] == "ik" and len(parts) == 3:
                return cls(kind="i", text=text, k=int(parts[1]), i=int(parts[2]))
            if parts[0] == "bes" and len(parts) == 4:
                return cls(kind="bes", text=text, k=int(parts[1]),
                           v=int(parts[2]), e=int(parts[3]))
            if parts[0] == "file" and len(parts) >= 2:
                return cls(kind="file", text=text, path=text.split(":", 1)[1])
        except ValueError:
            pass
        raise ParameterError(
            f"bad pattern spec {text!r}: want qkr:K:R, ik:K:I, bes:K:V:E or file:PATH")

    def member(self) -> Hypergraph:
        if self.kind == "q":
            return generate_Q(self.k, self.r)
        if self.kind == "i":
            return generate_I(self.k, self.i)
        if self.kind == "file":
            return load_hypergraph(self.path)
        raise ParameterError(f"{self.text!r} does not name a single pattern")


def _family_from_specs(k: int, texts: list[str]) -> ForbiddenFamily:
    specs = [PatternSpec.parse(t) for t in texts]
    if len(specs) == 1 and specs[0].kind == "bes":
        sp = specs[0]
        if sp.k != k:
            raise ParameterError(f"pattern {sp.text} is {sp.k}-uniform, board is {k}")
        return bes_family(sp.k, sp.v, sp.e)
    members = []
    for sp in specs:
        if sp.kind == "bes":
            members.extend(bes_family(sp.k, sp.v, sp.e).members)
        else:
            members.append(sp.member())
    return ForbiddenFamily(k=k, members=tuple(members))


def _emit(doc: dict) -> None:
    print(json.dumps(doc))


def _log(msg: str) -> None:
    print(msg, file=sys.stderr)


def _budget(args, fallback: int) -> int:
    if getattr(args, "budget", None):
        return args.budget
    env = os.environ.get("QTURAN_BUDGET", "")
    if env:
        try:
            return int(env)
        except ValueError:
            raise ParameterError(f"QTURAN_BUDGET must be an integer, got {env!r}")
    return fallback


def _check_threads(args) -> None:
    t = getattr(args, "threads", 1)
    if t < 1:
        raise ParameterError(f"--threads must be >= 1, got {t}")
    if t > 1:
        _log(f"note: running single-threaded, --threads {t} accepted but unused")


def _write_artifact(h: Hypergraph, out: str) -> None:
    save_hypergraph(h, out)
    if not out.endswith(".json") and h.meta:
        with open(out + ".meta.json", "w") as f:
            json.dump(dict(h.meta), f, indent=2, sort_keys=True)
            f.write("\n")


def _verify_target(h: Hypergraph) -> Optional[dict]:
    """Run the freeness check an artifact's metadata promises."""
    target = (h.meta or {}).get("freeness_target", "")
    parts = target.split(":")
    if len(parts) != 3 or parts[0] != "Q":
        raise ParameterError(f"artifact carries no usable freeness target: {target!r}")
    pat = QPattern(int(parts[1]), int(parts[2]))
    emb = find_Q_copy(h, pat)
    return None if emb is None else emb.to_json()


# ------------------------------------------------------------- construct

def cmd_construct(args) -> int:
    if args.family == "modular":
        if args.goodset == "exact" or (args.goodset == "auto" and args.p <= 17):
            S = max_good_set(args.p, args.k)
        else:
            S = behrend_good_set(args.p, args.k)
        cfg = ModularConfig(k=args.k, p=args.p, S=S,
                            alpha=args.alpha, beta=args.beta)
        h = construct_modular(cfg)
    elif args.family == "split":
        h = construct_split(SplitConfig(n=args.n, k=args.k, r=args.r))
    elif args.family == "lift":
        base = load_hypergraph(args.base)
        h = construct_lift(LiftConfig(r=args.r, base=base, n2=args.n2))
    else:
        h = centered_family(args.n, args.k)
    _write_artifact(h, args.out)
    _log(f"wrote {h.m} edges on {h.n} vertices to {args.out}")
    doc = {"family": args.family, "n": h.n, "k": h.k, "edges": h.m,
           "out": args.out}
    if args.verify:
        cert = _verify_target(h)
        if cert is not None:
            _emit(cert)
            _log("verification found a copy; artifact left in place")
            return ExitStatus.FOUND
        doc["verified"] = True
    _emit(doc)
    return ExitStatus.OK


# ----------------------------------------------------------------- check

def cmd_check(args) -> int:
    if args.what == "q-free":
        h = load_hypergraph(args.infile)
        sp = PatternSpec.parse(args.pattern)
        if sp.kind != "q":
            raise ParameterError(f"check q-free wants a qkr spec, got {args.pattern!r}")
        emb = find_Q_copy(h, QPattern(sp.k, sp.r))
        if emb is None:
            _emit({"free": True, "pattern": f"Q:{sp.k}:{sp.r}", "edges": h.m})
            return ExitStatus.OK
        _emit(emb.to_json())
        return ExitStatus.FOUND
    if args.what == "i-free":
        h = load_hypergraph(args.infile)
        sp = PatternSpec.parse(args.pattern)
        if sp.kind != "i":
            raise ParameterError(f"check i-free wants an ik spec, got {args.pattern!r}")
        hit = find_I_copy(h, IPattern(sp.k, sp.i))
        if hit is None:
            _emit({"free": True, "pattern": f"I:{sp.k}:{sp.i}", "edges": h.m})
            return ExitStatus.OK
        x, y = hit
        _emit({"pattern": f"I:{sp.k}:{sp.i}", "edges": [x, y],
               "members": [list(h.edges[x]), list(h.edges[y])]})
        return ExitStatus.FOUND
    if args.what == "goodset":
        S = _int_list(args.set)
        bad = is_k_good(S, args.p, args.k)
        if bad is None:
            _emit({"good": True, "p": args.p, "k": args.k, "S": S})
            return ExitStatus.OK
        _emit({"good": False, "m": list(bad.m), "s": list(bad.s)})
        return ExitStatus.FOUND
    h = load_hypergraph(args.infile)
    report = shadow_clique_audit(h)
    _emit(report.to_json())
    return ExitStatus.OK if report.ok else ExitStatus.FOUND


# ---------------------------------------------------------------- search

def cmd_search(args) -> int:
    _check_threads(args)
    if args.what == "packing":
        if args.exact:
            pk = exact_max_packing(args.n, args.r, args.t,
                                   budget=_budget(args, DEFAULT_BUDGET))
        else:
            pk = greedy_packing(args.n, args.r, args.t)
        doc = {"n": pk.n, "r": pk.r, "t": pk.t, "size": pk.size,
               "exact": bool(args.exact)}
        if args.out:
            save_hypergraph(pk.to_hypergraph(), args.out)
            doc["out"] = args.out
        else:
            doc["edges"] = [list(e) for e in pk.edges]
        _emit(doc)
        return ExitStatus.OK
    if args.what == "goodset":
        g = max_good_set(args.p, args.k, budget=_budget(args, DEFAULT_BUDGET))
        _emit(g.to_json())
        return ExitStatus.OK
    if args.what == "apfree":
        a = max_ap_free(args.n, args.k, budget=_budget(args, DEFAULT_BUDGET))
        _emit(a.to_json())
        return ExitStatus.OK
    fam = _family_from_specs(args.k, args.forbid)
    res = ex_exact(args.n, args.k, fam,
                   budget=_budget(args, DEFAULT_SEARCH_BUDGET))
    _emit(res.to_json())
    return ExitStatus.BUDGET if res.budget_hit else ExitStatus.OK


# ----------------------------------------------------------------- table

def _table_out(text: str, out: Optional[str]) -> None:
    if out:
        with open(out, "w") as f:
            f.write(text)
        _log(f"wrote table to {out}")
    else:
        sys.stdout.write(text)


def cmd_table(args) -> int:
    if args.what == "modular-growth":
        rows = growth_table("modular", args.k, _int_list(args.ns))
        _table_out(growth_csv(rows), args.out)
        return ExitStatus.OK
    if args.what == "split-growth":
        rows = growth_table("split", args.k, _int_list(args.ns), r=args.r)
        _table_out(growth_csv(rows), args.out)
        return ExitStatus.OK
    if args.what == "density":
        fam = _family_from_specs(args.k, args.forbid)
        rows = density_trend(args.k, fam, _int_list(args.ns),
                             budget=_budget(args, DEFAULT_SEARCH_BUDGET))
        lines = ["n,k,edges,ratio,certified"]
        for row in rows:
            lines.append(f"{row.n},{args.k},{row.edges},{row.ratio},"
                         f"{str(row.certified).lower()}")
        _table_out("\n".join(lines) + "\n", args.out)
        return ExitStatus.OK
    rep = monotone_chain_check(args.n, args.k,
                               budget=_budget(args, DEFAULT_SEARCH_BUDGET))
    _emit(rep.to_json())
    return ExitStatus.OK if rep.ok else ExitStatus.FOUND


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip() != ""]
    except ValueError:
        raise ParameterError(f"expected comma-separated integers, got {text!r}")


# ----------------------------------------------------------------- parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ParameterError(message)


def _build_parser() -> _Parser:
    p = _Parser(prog="qturan", description=__doc__,
                formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = p.add_subparsers(dest="cmd", required=True)

    c = sub.add_parser("construct", help="build a family and write it out")
    cs = c.add_subparsers(dest="family", required=True)
    cm = cs.add_parser("modular")
    cm.add_argument("--k", type=int, required=True)
    cm.add_argument("--p", type=int, required=True)
    cm.add_argument("--alpha", type=int, default=0)
    cm.add_argument("--beta", type=int, default=0)
    cm.add_argument("--goodset", choices=("auto", "exact", "behrend"),
                    default="auto")
    cp = cs.add_parser("split")
    cp.add_argument("--n", type=int, required=True)
    cp.add_argument("--k", type=int, required=True)
    cp.add_argument("--r", type=int, required=True)
    cl = cs.add_parser("lift")
    cl.add_argument("--r", type=int, required=True)
    cl.add_argument("--base", required=True, help="path of the base layer")
    cl.add_argument("--n2", type=int, required=True)
    ct = cs.add_parser("star")
    ct.add_argument("--n", type=int, required=True)
    ct.add_argument("--k", type=int, required=True)
    for sp in (cm, cp, cl, ct):
        sp.add_argument("--out", required=True)
        sp.add_argument("--verify", action="store_true",
                        help="run the freeness check after writing")
        sp.set_defaults(func=cmd_construct)

    k = sub.add_parser("check", help="verify a property, certificate on failure")
    ks = k.add_subparsers(dest="what", required=True)
    kq = ks.add_parser("q-free")
    kq.add_argument("--in", dest="infile", required=True)
    kq.add_argument("--pattern", required=True, help="qkr:K:R")
    ki = ks.add_parser("i-free")
    ki.add_argument("--in", dest="infile", required=True)
    ki.add_argument("--pattern", required=True, help="ik:K:I")
    kg = ks.add_parser("goodset")
    kg.add_argument("--p", type=int, required=True)
    kg.add_argument("--k", type=int, required=True)
    kg.add_argument("--set", required=True, help="comma-separated residues")
    ka = ks.add_parser("audit")
    ka.add_argument("--in", dest="infile", required=True)
    for sp in (kq, ki, kg, ka):
        sp.set_defaults(func=cmd_check)

    s = sub.add_parser("search", help="optimizers, exact where asked")
    ss = s.add_subparsers(dest="what", required=True)
    sp1 = ss.add_parser("packing")
    sp1.add_argument("--n", type=int, required=True)
    sp1.add_argument("--r", type=int, required=True)
    sp1.add_argument("--t", type=int, required=True)
    sp1.add_argument("--exact", action="store_true")
    sp1.add_argument("--out", default="")
    sg = ss.add_parser("goodset")
    sg.add_argument("--p", type=int, required=True)
    sg.add_argument("--k", type=int, required=True)
    sa = ss.add_parser("apfree")
    sa.add_argument("--n", type=int, required=True)
    sa.add_argument("--k", type=int, required=True)
    st = ss.add_parser("turan")
    st.add_argument("--n", type=int, required=True)
    st.add_argument("--k", type=int, required=True)
    st.add_argument("--forbid", action="append", required=True,
                    help="pattern spec, repeatable")
    for sp in (sp1, sg, sa, st):
        sp.add_argument("--budget", type=int, default=0)
        sp.add_argument("--threads", type=int, default=1)
        sp.set_defaults(func=cmd_search)

    t = sub.add_parser("table", help="growth and trend reports")
    ts = t.add_subparsers(dest="what", required=True)
    tm = ts.add_parser("modular-growth")
    tm.add_argument("--k", type=int, required=True)
    tm.add_argument("--ns", required=True, help="comma-separated vertex budgets")
    tp = ts.add_parser("split-growth")
    tp.add_argument("--k", type=int, required=True)
    tp.add_argument("--r", type=int, required=True)
    tp.add_argument("--ns", required=True)
    td = ts.add_parser("density")
    td.add_argument("--k", type=int, required=True)
    td.add_argument("--forbid", action="append", required=True)
    td.add_argument("--ns", required=True)
    td.add_argument("--budget", type=int, default=0)
    tc = ts.add_parser("chain")
    tc.add_argument("--n", type=int, required=True)
    tc.add_argument("--k", type=int, required=True)
    tc.add_argument("--budget", type=int, default=0)
    for sp in (tm, tp, td, tc):
        sp.add_argument("--out", default="")
        sp.set_defaults(func=cmd_table)

    return p


def main(argv=None) -> int:
    try:
        args = _build_parser().parse_args(argv)
        return int(args.func(args))
    except BaseNotFreeError as exc:
        cert = exc.certificate
        doc = {"error": str(exc)}
        if cert is not None:
            doc["certificate"] = (cert.to_json() if hasattr(cert, "to_json")
                                  else list(cert))
        _emit(doc)
        return int(ExitStatus.FOUND)
    except BudgetError as exc:
        _log(f"budget: {exc}")
        return int(ExitStatus.BUDGET)
    except ParseError as exc:
        _log(f"parse: {exc}")
        return int(ExitStatus.IO)
    except ParameterError as exc:
        _log(f"parameter: {exc}")
        return int(ExitStatus.PARAM)
    except InvariantViolation as exc:
        _log(f"invariant: {exc}")
        return int(ExitStatus.FOUND)
    except OSError as exc:
        _log(f"io: {exc}")
        return int(ExitStatus.IO)


def main_entry() -> None:
    raise SystemExit(main(sys.argv[1:]))


if __name__ == "__main__":
    main_entry()
