"""Polytopes shared by the test modules."""
from delzant import hirzebruch, simplex, unit_cube


def hirzebruch_lambda(m):
    # (1, 1, 1, 1) degenerates for m >= 2; lengthen the f3 offset so the bottom edge stays 1
    return [1, 1, max(1, m), 1]


def cpn(n, gamma=1):
    return simplex(n, [gamma] + [0] * n)


def example_polytopes():
    out = {f"CP{n}": cpn(n) for n in (1, 2, 3)}
    for m in range(4):
        out[f"H{m}"] = hirzebruch(m, hirzebruch_lambda(m))
    out["square"] = unit_cube(2)
    out["cube"] = unit_cube(3)
    return out


EXAMPLES = example_polytopes()
SURFACES = {k: EXAMPLES[k] for k in ("CP2", "H0", "H1", "H2", "H3")}
