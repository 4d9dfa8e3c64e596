"""Hand-built grammar fixtures shared by several test modules."""

from facadegram.grammar import Grammar, Rule, SizeSpec, derive

A = SizeSpec.absolute

MATS = ("outside", "Wall1", "Wall2", "Window1", "Window2")


def ten_rule_facade():
    """A 10-rule deterministic grammar for an irregular multi-floor facade.

    Three repeated window floors, two distinct single floors, four terminal
    materials. Returns (grammar, layout, tree) derived at 9000 x 11000.
    """
    rules = {
        "NT1": Rule("NT1", "split", "y", (
            (A(500), "Wall1"), (A(6000), "NT2"), (A(1500), "NT3"),
            (A(500), "Wall1"), (A(1500), "NT4"), (A(1000), "Wall1"),
        )),
        "NT2": Rule("NT2", "repeat", "y", ((A(2000), "NT5"),)),
        "NT3": Rule("NT3", "split", "x", (
            (A(1500), "NT6"), (A(700), "Wall1"), (A(1000), "Window1"),
            (A(800), "Wall2"), (A(1000), "Window1"), (A(4000), "NT7"),
        )),
        "NT4": Rule("NT4", "split", "x", (
            (A(1500), "NT6"), (A(650), "Wall2"), (A(500), "Wall1"), (A(2600), "NT8"),
            (A(650), "Wall2"), (A(1200), "Window2"), (A(400), "Wall1"), (A(1500), "NT9"),
        )),
        "NT5": Rule("NT5", "split", "y", ((A(1500), "NT10"), (A(500), "Wall1"))),
        "NT6": Rule("NT6", "split", "x", ((A(500), "Wall1"), (A(1000), "Window1"))),
        "NT7": Rule("NT7", "split", "x", (
            (A(500), "Wall1"), (A(1200), "Window2"), (A(800), "Wall2"), (A(1500), "NT9"),
        )),
        "NT8": Rule("NT8", "split", "x", ((A(1000), "Window1"), (A(600), "Wall1"), (A(1000), "Window1"))),
        "NT9": Rule("NT9", "split", "x", ((A(1000), "Window1"), (A(500), "Wall1"))),
        "NT10": Rule("NT10", "split", "x", (
            (A(1500), "NT6"), (A(900), "Wall2"), (A(2600), "NT8"), (A(4000), "NT7"),
        )),
    }
    grammar = Grammar(MATS, "NT1", {k: ((1.0, v),) for k, v in rules.items()}, extent=(9000, 11000))
    layout, tree = derive(grammar, 9000, 11000)
    return grammar, layout, tree
