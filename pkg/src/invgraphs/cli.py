"""Command-line interface.

Exit status: 0 for success or a true answer, 1 for a false answer or an
invalid input object, 2 for usage, format and I/O errors.
"""

from __future__ import annotations

import argparse
import sys
from typing import Optional, Sequence

from . import analysis, families, grammar, graph, metric, morphisms, pda, quotients, transducers
from .errors import InvGraphError

EXIT_TRUE, EXIT_FALSE, EXIT_ERROR = 0, 1, 2


class _Ctx:
    def __init__(self, args):
        self.args = args
        self.out = sys.stdout
        self.produced = None  # graph exported with --dot

    def emit(self, text: str) -> None:
        self.out.write(text if text.endswith("\n") or not text else text + "\n")


def _load_graph(path, strict=True) -> graph.RootedGraph:
    return graph.load(path, strict=strict)


def _split_keys(text: str) -> list[str]:
    """Split on commas outside parentheses, so lattice keys like ``(2,0)`` survive."""
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "," and depth == 0:
            out.append("".join(cur))
            cur = []
            continue
        depth += (ch == "(") - (ch == ")")
        cur.append(ch)
    out.append("".join(cur))
    return [k.strip() for k in out if k.strip()]


def _bool(ctx, value: bool) -> int:
    ctx.emit("true" if value else "false")
    return EXIT_TRUE if value else EXIT_FALSE


# -- subcommands -----------------------------------------------------------
def cmd_validate(ctx, a):
    rg = _load_graph(a.file, strict=False)
    ctx.produced = rg
    report = graph.validate(rg.graph)
    ctx.emit(str(report))
    return EXIT_TRUE if report.ok else EXIT_FALSE


def cmd_member(ctx, a):
    rg = _load_graph(a.file)
    ctx.produced = rg
    return _bool(ctx, graph.accepts(rg, a.word))


def cmd_make(ctx, a):
    spec = families.FamilySpec.from_args(a.family, a.params)
    obj = families.make(spec)
    if isinstance(obj, transducers.GroupAssembly):
        ctx.emit(transducers.dumps_assembly(obj))
    else:
        ctx.produced = obj
        ctx.emit(graph.dumps(obj))
    return EXIT_TRUE


def _morphism(a):
    src, tgt = _load_graph(a.src), _load_graph(a.tgt)
    return src, tgt, morphisms.find_morphism(src, tgt)


def _print_map(ctx, m):
    s, t = m.source.graph, m.target.graph
    for v, w in enumerate(m.vertex_map):
        ctx.emit(f"{s.key(v)} -> {t.key(w)}")


def cmd_morphism(ctx, a):
    src, tgt, m = _morphism(a)
    ctx.produced = tgt
    if m is None:
        ctx.emit("no morphism")
        return EXIT_FALSE
    _print_map(ctx, m)
    return EXIT_TRUE


def cmd_cover(ctx, a):
    src, tgt, m = _morphism(a)
    ctx.produced = tgt
    if m is None:
        ctx.emit("no morphism")
        return EXIT_FALSE
    ok, skipped = morphisms.cover_report(m)
    if skipped:
        ctx.emit(f"# {len(skipped)} truncated source vertices not checked")
    return _bool(ctx, ok)


def cmd_quotient(ctx, a):
    rg = _load_graph(a.file)
    seeds = _split_keys(a.seeds)
    q = quotients.dv_quotient(rg, seeds)
    ctx.produced = q.quotient
    ctx.emit(graph.dumps(q.quotient))
    for v, c in enumerate(q.class_of):
        ctx.emit(f"# class {rg.graph.key(v)} {q.quotient.graph.key(c)}")
    if not q.saturated:
        ctx.emit("# unsaturated: the base has truncated vertices")
    return EXIT_TRUE


def cmd_census(ctx, a):
    rg = _load_graph(a.file)
    ctx.produced = rg
    c = analysis.end_cone_census(rg, a.max_norm, a.depth, a.relabel, a.jobs)
    ctx.emit(c.to_tsv())
    for n in sorted(c.per_norm):
        ctx.emit(f"# norm {n}: {c.per_norm[n]} classes, cumulative {c.cumulative[n]}")
    return EXIT_TRUE


def cmd_treedec(ctx, a):
    rg = _load_graph(a.file)
    ctx.produced = rg
    dec = analysis.load_decomposition(a.decfile, rg.graph)
    if isinstance(dec, analysis.StrongTreePartition):
        report = analysis.verify_strong_tree_decomposition(rg.graph, dec)
        ctx.emit("strong tree decomposition: " + str(report))
        if report.augmented_report is not None:
            ctx.emit("augmented bags: " + str(report.augmented_report))
    else:
        report = analysis.verify_tree_decomposition(rg.graph, dec)
        ctx.emit("tree decomposition: " + str(report))
    ok = report.valid and (a.width is None or report.max_diameter <= a.width)
    return EXIT_TRUE if ok else EXIT_FALSE


def cmd_conesep(ctx, a):
    rg = _load_graph(a.file)
    ctx.produced = rg
    return _bool(ctx, analysis.cone_separation_check(rg, a.vertex, a.delta))


def cmd_pda_run(ctx, a):
    m = pda.load(a.pdafile)
    res = pda.run_pda(m, a.word)
    if res.config is None:
        ctx.emit("reject (blocked)")
        return EXIT_FALSE
    ctx.emit(("accept " if res.accepted else "reject ") + pda.config_key(m, res.config))
    return EXIT_TRUE if res.accepted else EXIT_FALSE


def cmd_config_graph(ctx, a):
    m = pda.load(a.pdafile)
    rg = pda.config_graph(m, a.height)
    ctx.produced = rg
    ctx.emit(graph.dumps(rg))
    return EXIT_TRUE


def cmd_dyck_pda(ctx, a):
    rg = _load_graph(a.file)
    ctx.produced = rg
    ctx.emit(pda.dumps(pda.dyck_checker_pda(rg.graph, a.vertex)))
    return EXIT_TRUE


def cmd_product(ctx, a):
    t = transducers.load_transducer(a.transfile)
    rg = _load_graph(a.graphfile)
    p = transducers.product(t, rg)
    ctx.produced = p
    ctx.emit(graph.dumps(p))
    return EXIT_TRUE


def cmd_wp(ctx, a):
    asm = transducers.load_assembly(a.assemblyfile)
    return _bool(ctx, transducers.wp_member(asm, asm.generators.parse(a.word)))


def cmd_geodesics(ctx, a):
    rg = _load_graph(a.file)
    ctx.produced = rg
    words = sorted(metric.geodesic_words(rg, a.max_len), key=lambda w: (len(w), w))
    for w in words:
        ctx.emit(rg.alphabet.format(w, "1"))
    return EXIT_TRUE


def cmd_cyk(ctx, a):
    g = grammar.load(a.grammarfile)
    tree = grammar.cyk_member(g, a.word)
    return _bool(ctx, tree is not None)


# -- parser ----------------------------------------------------------------
def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="invgraphs", description="Inverse graphs, covers, PDAs and transducers.")
    p.add_argument("--dot", metavar="OUT", help="write the produced graph as DOT to OUT")
    # accepted after the subcommand too; SUPPRESS keeps a global value intact
    dot = argparse.ArgumentParser(add_help=False)
    dot.add_argument("--dot", metavar="OUT", default=argparse.SUPPRESS, help="write the produced graph as DOT to OUT")
    sub = p.add_subparsers(dest="command", required=True, metavar="COMMAND")

    def add(name, func, help_):
        sp = sub.add_parser(name, help=help_, parents=[dot])
        sp.set_defaults(func=func)
        return sp

    sp = add("validate", cmd_validate, "check the inverse-graph invariants of a graph file")
    sp.add_argument("file")
    sp = add("member", cmd_member, "does WORD label a circuit at the root")
    sp.add_argument("file")
    sp.add_argument("word")
    sp = add("make", cmd_make, "print a family member (" + ", ".join(families.FAMILIES) + ")")
    sp.add_argument("family", choices=families.FAMILIES)
    sp.add_argument("params", nargs="*")
    sp = add("morphism", cmd_morphism, "root-preserving morphism SRC -> TGT")
    sp.add_argument("src")
    sp.add_argument("tgt")
    sp = add("cover", cmd_cover, "is the morphism SRC -> TGT a cover")
    sp.add_argument("src")
    sp.add_argument("tgt")
    sp = add("quotient", cmd_quotient, "DV-quotient by a seed set")
    sp.add_argument("file")
    sp.add_argument("--seeds", required=True, help="comma-separated vertex keys")
    sp = add("census", cmd_census, "end-cone census as TSV")
    sp.add_argument("file")
    sp.add_argument("--max-norm", type=int, required=True)
    sp.add_argument("--depth", type=int, required=True)
    sp.add_argument("--relabel", action="store_true", help="classify up to letter permutations")
    sp.add_argument("--jobs", type=int, default=1)
    sp = add("treedec", cmd_treedec, "verify a tree decomposition or strong partition")
    sp.add_argument("file")
    sp.add_argument("decfile")
    sp.add_argument("--width", type=int, help="required uniform diameter bound")
    sp = add("conesep", cmd_conesep, "does the disk around VERTEX separate its cone from the root")
    sp.add_argument("file")
    sp.add_argument("--vertex", required=True)
    sp.add_argument("--delta", type=int, required=True)
    sp = add("pda-run", cmd_pda_run, "run a deterministic PDA on WORD")
    sp.add_argument("pdafile")
    sp.add_argument("word")
    sp = add("config-graph", cmd_config_graph, "configuration graph up to a stack height")
    sp.add_argument("pdafile")
    sp.add_argument("--height", type=int, required=True)
    sp = add("dyck-pda", cmd_dyck_pda, "Dyck-checker PDA of a finite graph at a vertex")
    sp.add_argument("file")
    sp.add_argument("--vertex", required=True)
    sp = add("product", cmd_product, "product of an inverse transducer with a graph")
    sp.add_argument("transfile")
    sp.add_argument("graphfile")
    sp = add("wp", cmd_wp, "word-problem membership for a group assembly")
    sp.add_argument("assemblyfile")
    sp.add_argument("word")
    sp = add("geodesics", cmd_geodesics, "labels of geodesics from the root")
    sp.add_argument("file")
    sp.add_argument("--max-len", type=int, required=True)
    sp = add("cyk", cmd_cyk, "grammar membership by CYK")
    sp.add_argument("grammarfile")
    sp.add_argument("word")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_ERROR if exc.code not in (0, None) else EXIT_TRUE
    ctx = _Ctx(args)
    try:
        code = args.func(ctx, args)
        if args.dot and ctx.produced is not None:
            with open(args.dot, "w", encoding="utf-8") as fh:
                fh.write(graph.to_dot(ctx.produced))
        elif args.dot:
            print("invgraphs: this command produces no graph for --dot", file=sys.stderr)
        return code
    except (InvGraphError, ValueError, OSError) as exc:
        print(f"invgraphs: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
