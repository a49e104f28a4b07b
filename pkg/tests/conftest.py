import random
from fractions import Fraction

import pytest
from hypothesis import strategies as st

from freechain import Alphabet, LabeledGraph, Letter, Word, build_chain, reduce

D2 = Alphabet(2)
D3 = Alphabet(3)

ACCEPTANCE_RESULTS: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[0])):
        ok, detail = ACCEPTANCE_RESULTS[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  criterion {name}: {detail}")


@pytest.fixture(scope="session")
def ctx2():
    """d=2, alpha=1/2, three levels; orbits are cached across tests."""
    return build_chain(D2, Fraction(1, 2), 3)


@pytest.fixture(scope="session")
def ctx3():
    return build_chain(D3, Fraction(1, 2), 2)


def letters(d: int):
    return st.builds(Letter, st.integers(0, d - 1), st.booleans())


def words(d: int = 2, max_size: int = 8):
    return st.lists(letters(d), max_size=max_size).map(reduce)


def random_word(rng: random.Random, d: int, max_len: int) -> Word:
    n = rng.randint(0, max_len)
    out: list[Letter] = []
    while len(out) < n:
        letter = Letter(rng.randrange(d), rng.random() < 0.5)
        if out and out[-1] == letter.inverse():
            continue
        out.append(letter)
    return Word(out)


def random_graph(rng: random.Random, d: int, max_vertices: int = 30) -> LabeledGraph:
    """Random graph obeying the label axioms: each label is a partial injection."""
    n = rng.randint(1, max_vertices)
    edges = []
    for lab in range(d):
        perm = list(range(n))
        rng.shuffle(perm)
        density = rng.random()
        edges += [(v, perm[v], lab) for v in range(n) if rng.random() < density]
    rng.shuffle(edges)
    return LabeledGraph(n, tuple(edges))


def walk_word(rng: random.Random, g: LabeledGraph, v0: int, max_len: int) -> Word:
    """A reduced word that can be traced edge by edge from ``v0``."""
    out: list[Letter] = []
    v = v0
    for _ in range(rng.randint(0, max_len)):
        options = []
        for s, t, lab in g.edges:
            if s == v:
                options.append((Letter(lab, False), t))
            if t == v:
                options.append((Letter(lab, True), s))
        options = [(l, u) for l, u in options if not (out and out[-1] == l.inverse())]
        if not options:
            break
        letter, v = rng.choice(options)
        out.append(letter)
    return Word(out)


def naive_f(g: LabeledGraph, x: int, v: int) -> int:
    """``f_x(v)`` straight from the component classification (isolated / circle / path)."""
    xs = [(s, t) for s, t, lab in g.edges if lab == x]
    succ = {s: t for s, t in xs}
    pred = {t: s for s, t in xs}
    if v not in succ and v not in pred:
        return v
    if v in succ:
        return succ[v]
    first = v
    while first in pred:
        first = pred[first]
    return first


def naive_act(g: LabeledGraph, v: int, w: Word) -> int:
    for letter in w:
        if letter.inverted:
            v = next(u for u in range(g.vertex_count) if naive_f(g, letter.generator, u) == v)
        else:
            v = naive_f(g, letter.generator, v)
    return v
