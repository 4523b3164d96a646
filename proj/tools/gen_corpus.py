#!/usr/bin/env python3
"""Writes the three-agent corpus protocols.

The Selfridge-Conway family is too repetitive to maintain by hand: every
ranking is an explicit six-way if-chain and each leaf repeats the rest of the
protocol. Run from the repository root; the outputs are checked in.
"""

import itertools
import pathlib

ROOT = pathlib.Path(__file__).resolve().parent.parent / "corpus"
ORDERS = list(itertools.permutations(range(3)))


class Out:
    def __init__(self):
        self.lines = []
        self.depth = 0

    def __call__(self, text):
        self.lines.append("  " * self.depth + text)

    def indent(self, body):
        self.depth += 1
        body()
        self.depth -= 1


def ev(agent, x):
    return f"eval[{agent}](@{x})"


def thirds(w):
    w("let p = split cake in")
    w("let a, rest = split divide(p, mark[1](@p, 1/3 * eval[1](@p))) in")
    w("let b, c = split divide(rest, mark[1](@rest, 1/2 * eval[1](@rest))) in")


def rank(w, agent, names, targets, leaf, bind=None):
    """Six-way ranking of `names` by `agent`. In each leaf the pieces are
    rebound, best first, to `targets`; leaf(order) gets the permutation so it
    can tell where each original piece went. `bind` renames pieces in the
    rebinding only."""
    bind = bind or {}
    for n, order in enumerate(ORDERS):
        i, j, k = (names[x] for x in order)
        cond = f"{ev(agent, i)} >= {ev(agent, j)} and {ev(agent, j)} >= {ev(agent, k)}"
        head = "if" if n == 0 else "else if"
        if n < len(ORDERS) - 1:
            w(f"{head} {cond} then")
        else:
            w("else")

        def body(order=order, i=i, j=j, k=k):
            w(f"let {', '.join(targets)} = split ({', '.join(bind.get(x, x) for x in (i, j, k))}) in")
            leaf(order)

        w.indent(body)


def choose2(w, agent, x, y, leaf):
    """`agent` takes the better of x, y; leaf(taken, left) builds the rest."""
    w(f"if {ev(agent, x)} >= {ev(agent, y)} then")
    w.indent(lambda: leaf(x, y))
    w("else")
    w.indent(lambda: leaf(y, x))


def alloc(w, main, extra=None):
    extra = extra or {}
    parts = []
    for agent in (1, 2, 3):
        pieces = [main[agent]] + ([extra[agent]] if agent in extra else [])
        parts.append(f"piece({', '.join(pieces)})")
    w(f"({', '.join(parts)})")


def trimmings(w, main, taker, cutter):
    """Selfridge-Conway second stage. `cutter` splits the trimmings into
    three, `taker` picks first, agent 1 second, the cutter gets the rest."""
    w(f"let u1, ur = split divide(tr, mark[{cutter}](@tr, 1/3 * eval[{cutter}](@tr))) in")
    w(f"let u2, u3 = split divide(ur, mark[{cutter}](@ur, 1/2 * eval[{cutter}](@ur))) in")

    def leaf(_order):
        choose2(w, 1, "v2", "v3",
                lambda got, left: alloc(w, main, {taker: "v1", 1: got, cutter: left}))

    rank(w, taker, ["u1", "u2", "u3"], ["v1", "v2", "v3"], leaf)


def header(w, agents, comment):
    for line in comment.strip().splitlines():
        w("// " + line.strip())
    w("// Generated by tools/gen_corpus.py.")
    w(f"agents {agents};")
    w("")


def untrimmed(w):
    # Agent 2 is indifferent between its two best pieces, so agent 3 picks
    # first and agent 2 still finds one of them.
    def leaf(_order):
        choose2(w, 2, "s1", "s2", lambda got, left: alloc(w, {3: "f", 2: got, 1: left}))

    rank(w, 3, ["big", "mid", "small"], ["f", "s1", "s2"], leaf)


def trimmed(w, stage2=False, bug=None):
    w("let t, tr = split divide(big, mark[2](@big, eval[2](@mid))) in")

    def finish(main, taker, cutter):
        if bug == "taker_cuts":
            taker, cutter = cutter, taker
        if stage2:
            trimmings(w, main, taker, cutter)
        else:
            alloc(w, main)

    def leaf(order):
        names = ["t", "mid", "small"]
        ranked = [names[x] for x in order]
        w(f"let t3 = split {'true' if ranked[0] == 't' else 'false'} in")
        w(f"let tA = split {'true' if ranked[1] == 't' else 'false'} in")
        w("if t3 then")
        # Agent 3 took the trimmed piece: agent 2 chooses, agent 1 gets the rest.
        w.indent(lambda: choose2(
            w, 2, "o1", "o2",
            lambda got, left: finish({3: "c3", 2: got, 1: left}, 3, 2)))
        if bug == "not_forced":
            w("else")
            w.indent(lambda: choose2(
                w, 2, "o1", "o2",
                lambda got, left: finish({3: "c3", 2: got, 1: left}, 2, 3)))
            return
        w("else if tA then")
        w.indent(lambda: finish({3: "c3", 2: "o1", 1: "o2"}, 2, 3))
        w("else")
        w.indent(lambda: finish({3: "c3", 2: "o2", 1: "o1"}, 2, 3))

    bind = {"t": "tr"} if bug == "give_trimmings" else {}
    rank(w, 3, ["t", "mid", "small"], ["c3", "o1", "o2"], leaf, bind)


def selfridge_conway(comment, stage2=False, bug=None):
    w = Out()
    header(w, 3, comment)
    thirds(w)

    def leaf(_order):
        w(f"if {ev(2, 'big')} == {ev(2, 'mid')} then")
        w.indent(lambda: untrimmed(w))
        w("else")
        w.indent(lambda: trimmed(w, stage2, bug))

    rank(w, 2, ["a", "b", "c"], ["big", "mid", "small"], leaf)
    return "\n".join(w.lines) + "\n"


def waste_makes_haste():
    w = Out()
    header(w, 3, """
        Agent 1 cuts thirds. Agent 2 trims its favourite down to its second
        favourite and the trimmings are thrown away. Agent 3 picks first; if it
        leaves the trimmed piece, agent 2 must take it.""")
    thirds(w)

    def leaf(_order):
        w("let t, tr = split divide(big, mark[2](@big, eval[2](@mid))) in")
        w(f"if {ev(3, 't')} >= {ev(3, 'mid')} and {ev(3, 't')} >= {ev(3, 'small')} then")
        w.indent(lambda: choose2(w, 2, "mid", "small",
                                 lambda got, left: alloc(w, {3: "t", 2: got, 1: left})))
        w(f"else if {ev(3, 'mid')} >= {ev(3, 'small')} then")
        w.indent(lambda: alloc(w, {3: "mid", 2: "t", 1: "small"}))
        w("else")
        w.indent(lambda: alloc(w, {3: "small", 2: "t", 1: "mid"}))

    rank(w, 2, ["a", "b", "c"], ["big", "mid", "small"], leaf)
    return "\n".join(w.lines) + "\n"


def aziz_mackenzie(check_favourites):
    w = Out()
    if check_favourites:
        header(w, 3, """
            Reduced three-agent Aziz-Mackenzie core. Agent 1 cuts thirds. When
            agents 2 and 3 have different favourites each takes its own and
            agent 1 takes the last third. Otherwise agent 2 trims and the
            Selfridge-Conway second stage shares out the trimmings.""")
    else:
        header(w, 3, """
            Aziz-Mackenzie core that never checks whether agents 2 and 3 share
            a favourite: agent 2 takes its favourite and agent 3 the better of
            the other two.""")
    thirds(w)
    if not check_favourites:
        def leaf(_order):
            choose2(w, 3, "mid", "small",
                    lambda got, left: alloc(w, {2: "big", 3: got, 1: left}))
        w(f"if {ev(2, 'a')} >= {ev(2, 'b')} and {ev(2, 'a')} >= {ev(2, 'c')} then")
        w.indent(lambda: (w("let big, mid, small = split (a, b, c) in"), leaf(None)))
        w(f"else if {ev(2, 'b')} >= {ev(2, 'c')} then")
        w.indent(lambda: (w("let big, mid, small = split (b, a, c) in"), leaf(None)))
        w("else")
        w.indent(lambda: (w("let big, mid, small = split (c, a, b) in"), leaf(None)))
        return "\n".join(w.lines) + "\n"

    def leaf(_order):
        w(f"if {ev(3, 'big')} >= {ev(3, 'mid')} and {ev(3, 'big')} >= {ev(3, 'small')} then")
        w.indent(lambda: trimmed(w, stage2=True))
        w("else")
        w.indent(lambda: choose2(w, 3, "mid", "small",
                                 lambda got, left: alloc(w, {2: "big", 3: got, 1: left})))

    rank(w, 2, ["a", "b", "c"], ["big", "mid", "small"], leaf)
    return "\n".join(w.lines) + "\n"


SCS_DOC = """
    Selfridge-Conway with the trimmings thrown away. Agent 1 cuts thirds and
    agent 2 trims its favourite unless its top two are already equal. Agent 3
    picks first, then agent 2 (forced onto the trimmed piece if it is still
    there), then agent 1."""

SCF_DOC = """
    Full Selfridge-Conway. As in the surplus version, then whichever of agents
    2 and 3 did not take the trimmed piece cuts the trimmings into thirds; the
    taker chooses first, agent 1 second, the cutter last."""

FILES = {
    "waste_makes_haste_3.slice": waste_makes_haste,
    "selfridge_conway_surplus.slice": lambda: selfridge_conway(SCS_DOC),
    "selfridge_conway_full.slice": lambda: selfridge_conway(SCF_DOC, stage2=True),
    "bad/scs_allocates_trimmings.slice": lambda: selfridge_conway(
        SCS_DOC + "\nBroken: the trimmings are handed out in place of the trimmed piece.",
        bug="give_trimmings"),
    "bad/scs_agent2_not_forced.slice": lambda: selfridge_conway(
        SCS_DOC + "\nBroken: agent 2 may pass over the trimmed piece.", bug="not_forced"),
    "bad/scf_trimmings_cut_by_taker.slice": lambda: selfridge_conway(
        SCF_DOC + "\nBroken: the agent that took the trimmed piece also cuts the trimmings.",
        stage2=True, bug="taker_cuts"),
    "bad/aziz_mackenzie_3_no_favourite_check.slice": lambda: aziz_mackenzie(False),
    "stretch/aziz_mackenzie_3.slice": lambda: aziz_mackenzie(True),
}

if __name__ == "__main__":
    for name, make in FILES.items():
        (ROOT / name).write_text(make())
        print("wrote", ROOT / name)
