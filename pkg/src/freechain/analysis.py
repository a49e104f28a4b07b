"""Finite-level freeness diagnostics for the chain.

Everything here is a finite certificate: fixed-point ratios at built levels,
moved-state witnesses for nontrivial words, bounded-length stabilizer scans
and Schreier balls.  "Measure typical" is approximated by orbit fractions
and "Baire typical" by states with no short stabilizer word.
"""
from __future__ import annotations

import json
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import numpy as np

from .chain import (
    ChainContext,
    OrbitTable,
    act_on_state,
    compute_orbit,
    coset_tree_stats,
    fix_ratio,
    product_bound,
    root_state,
)
from .freegroup import (
    Alphabet,
    Letter,
    Word,
    class_index,
    invert,
    iter_words_up_to,
    key_and_conjugator,
    multiply,
)
from .labeled_graph import LabeledGraph, to_dot

__all__ = [
    "AlphaBoundViolation",
    "AlphaBoundLevel",
    "FixrProfile",
    "Witness",
    "FaithfulnessReport",
    "BallSignature",
    "GnsWitness",
    "FreenessReport",
    "verify_alpha_bound",
    "essential_freeness_report",
    "acts_nontrivially",
    "faithfulness_certificate",
    "chain_intersection_test",
    "shortest_stabilizer_lengths",
    "free_point_search",
    "schreier_ball",
    "tree_ball_counts",
    "gns_witness",
    "freeness_report",
]

DEFAULT_MAX_WORD_LENGTH = 6
DEFAULT_RADIUS = 2
DEFAULT_FAITHFUL_LENGTH = 3


class AlphaBoundViolation(AssertionError):
    pass


A_WORD = Word([Letter(0, False)])


@dataclass(frozen=True)
class AlphaBoundLevel:
    level: int
    index: int
    fixr: Fraction
    p_count: int
    p_ratio: Fraction
    bound: Fraction
    alpha: Fraction


def _p_region(orbit: OrbitTable, ctx: ChainContext) -> np.ndarray:
    """Mask of orbit states with every coordinate in ``Y_i`` minus the root."""
    primes = np.array([g.prime for g in ctx.gadgets[: orbit.level]])
    return np.all((orbit.coords >= 1) & (orbit.coords < primes), axis=1)


def verify_alpha_bound(ctx: ChainContext, up_to: int) -> list[AlphaBoundLevel]:
    """Check ``fixr(a) >= |P_n|/|O_n| >= prod(p-1)/prod(p+k) > alpha`` at each level.

    Raises :class:`AlphaBoundViolation` on the first failing level.
    """
    a = A_WORD
    out = []
    for n in range(1, up_to + 1):
        orbit = compute_orbit(ctx, n)
        fixed = orbit.apply_word(a) == np.arange(orbit.size)
        region = _p_region(orbit, ctx)
        if not np.all(fixed[region]):
            raise AlphaBoundViolation(f"a moves a state of P_{n}")
        rec = AlphaBoundLevel(
            level=n,
            index=orbit.size,
            fixr=Fraction(int(fixed.sum()), orbit.size),
            p_count=int(region.sum()),
            p_ratio=Fraction(int(region.sum()), orbit.size),
            bound=product_bound(ctx, n),
            alpha=ctx.alpha,
        )
        if not rec.fixr >= rec.p_ratio >= rec.bound > rec.alpha:
            raise AlphaBoundViolation(
                f"level {n}: fixr {rec.fixr}, |P|/|O| {rec.p_ratio}, bound {rec.bound}, alpha {rec.alpha}"
            )
        out.append(rec)
    return out


@dataclass(frozen=True)
class FixrProfile:
    word: Word
    values: tuple[Fraction, ...]
    alpha: Fraction

    @property
    def non_increasing(self) -> bool:
        return all(x >= y for x, y in zip(self.values, self.values[1:]))

    @property
    def lower_bound(self) -> Fraction:
        return min(self.values)

    @property
    def vanishes(self) -> bool:
        return self.values[-1] == 0

    @property
    def above_alpha(self) -> bool:
        """True when every level stays above alpha: finite evidence against essential freeness."""
        return all(v > self.alpha for v in self.values)


def essential_freeness_report(ctx: ChainContext, words: Iterable[Word], up_to: int) -> list[FixrProfile]:
    return [
        FixrProfile(w, tuple(fix_ratio(ctx, w, n) for n in range(1, up_to + 1)), ctx.alpha)
        for w in words
    ]


@dataclass(frozen=True)
class Witness:
    """``w`` moves ``state`` (a point of ``O_level``) to ``image``."""

    word: Word
    level: int
    state: tuple[int, ...]
    image: tuple[int, ...]
    via_inverse: bool
    conjugator: Word


def acts_nontrivially(ctx: ChainContext, w: Word) -> Witness | None:
    """A moved state for ``w``, located through the class rep conjugate to ``w^{+-1}``.

    If ``w^{+-1} = g w_m g^-1`` then ``o_m . g^-1`` is moved by ``w`` because
    ``w_m`` moves ``o_m``.  Returns ``None`` when the matching rep lies beyond
    the built levels; that is not a refutation.
    """
    if w.is_identity():
        raise ValueError("the identity moves nothing")
    candidates = []
    for via_inverse, u in ((False, w), (True, invert(w))):
        key, g_u = key_and_conjugator(u)
        m = ctx.classes.index_of_key(key)
        if m is not None:
            candidates.append((m, via_inverse, g_u))
    if not candidates:
        return None
    m, via_inverse, g_u = min(candidates, key=lambda c: (c[0], c[1]))
    _, g_m = key_and_conjugator(ctx.classes.reps[m - 1])
    g = multiply(g_u, invert(g_m))
    s = act_on_state(ctx, root_state(ctx, m), invert(g))
    t = act_on_state(ctx, s, w)
    if s == t:
        raise AssertionError(f"{w} fixes the predicted witness at level {m}")
    return Witness(w, m, s, t, via_inverse, g)


@dataclass(frozen=True)
class FaithfulnessReport:
    max_length: int
    levels_used: int
    witnesses: tuple[Witness, ...]
    missing: tuple[Word, ...]

    @property
    def certified(self) -> bool:
        return not self.missing

    @property
    def faithful_up_to(self) -> int:
        if not self.missing:
            return self.max_length
        return min(len(w) for w in self.missing) - 1


def faithfulness_certificate(ctx: ChainContext, max_length: int) -> FaithfulnessReport:
    """Witness every nontrivial word of length ``<= max_length``.

    The chain is extended (lazily, no orbit enumeration) far enough to reach
    each word's class rep.
    """
    words = list(iter_words_up_to(ctx.alphabet, max_length))
    need = max((class_index(ctx.alphabet, w)[0] for w in words), default=ctx.levels)
    big = ctx.extended(need)
    witnesses, missing = [], []
    for w in words:
        wit = acts_nontrivially(big, w)
        (witnesses if wit is not None else missing).append(wit if wit is not None else w)
    return FaithfulnessReport(max_length, big.levels, tuple(witnesses), tuple(missing))


def chain_intersection_test(ctx: ChainContext, max_length: int) -> list[Word]:
    """Nontrivial reduced words of length ``<= max_length`` fixing ``o_n`` at every built level."""
    gadgets = ctx.gadgets
    alphabet = ctx.alphabet
    found: list[Word] = []

    def walk(prefix: list[Letter], state: tuple[int, ...]):
        if prefix and all(v == 0 for v in state):
            found.append(Word(prefix))
        if len(prefix) == max_length:
            return
        for letter in alphabet.letters:
            if prefix and prefix[-1] == letter.inverse():
                continue
            prefix.append(letter)
            walk(prefix, tuple(g.image(v, letter) for g, v in zip(gadgets, state)))
            prefix.pop()

    walk([], root_state(ctx, ctx.levels))
    return sorted(found, key=lambda w: w.length_lex_key)


def shortest_stabilizer_lengths(orbit: OrbitTable, max_length: int) -> np.ndarray:
    """Per state, the least length of a nontrivial reduced word fixing it.

    States with no such word of length ``<= max_length`` get ``max_length + 1``.
    """
    alphabet = orbit.alphabet
    ident = np.arange(orbit.size)
    best = np.full(orbit.size, max_length + 1, dtype=np.int64)
    letters = alphabet.letters
    inverse_col = [alphabet.letter_column(l.inverse()) for l in letters]
    stack = [(alphabet.letter_column(l), 1, orbit.edges[:, alphabet.letter_column(l)]) for l in letters]
    while stack:
        col, depth, pos = stack.pop()
        hit = pos == ident
        best[hit] = np.minimum(best[hit], depth)
        if depth < max_length:
            for nxt in range(len(letters)):
                if nxt != inverse_col[col]:
                    stack.append((nxt, depth + 1, orbit.edges[pos, nxt]))
    return best


def free_point_search(ctx: ChainContext, n: int, max_length: int = DEFAULT_MAX_WORD_LENGTH) -> list[int]:
    """Orbit indices of states fixed by no nontrivial word of length ``<= max_length``."""
    orbit = compute_orbit(ctx, n)
    return [int(i) for i in np.flatnonzero(shortest_stabilizer_lengths(orbit, max_length) > max_length)]


@dataclass(frozen=True)
class BallSignature:
    """Radius-r ball of the Schreier graph: everything reached by paths of length ``<= r``.

    Local vertex ids follow breadth-first discovery from the centre in letter
    order, so ``code`` is a canonical form for the rooted labeled ball.
    """

    level: int
    center: tuple[int, ...]
    center_index: int
    radius: int
    vertices: tuple[int, ...]
    edges: tuple[tuple[int, int, int], ...]
    states: tuple[tuple[int, ...], ...]

    @property
    def is_tree(self) -> bool:
        return len(self.edges) == len(self.vertices) - 1

    @property
    def cycle_rank(self) -> int:
        return len(self.edges) - len(self.vertices) + 1

    @property
    def code(self) -> tuple:
        return (len(self.vertices), tuple(sorted(self.edges)))

    @property
    def shortest_cycle(self) -> int | None:
        return _girth(len(self.vertices), self.edges)

    def isomorphic_to(self, other: "BallSignature") -> bool:
        return self.radius == other.radius and self.code == other.code

    def embeds_in_cayley_tree(self) -> bool:
        # labels are deterministic at each vertex, so a labeled tree ball folds into Cay(F_d, X)
        return self.is_tree

    def graph(self, ctx: ChainContext) -> LabeledGraph:
        names = tuple(_state_name(ctx, s) for s in self.states)
        return LabeledGraph(len(self.vertices), self.edges, names)

    def to_dot(self, ctx: ChainContext, name: str = "ball") -> str:
        return to_dot(self.graph(ctx), ctx.alphabet, name, attrs={0: {"center": "true", "shape": "doublecircle"}})


def _state_name(ctx: ChainContext, s: Sequence[int]) -> str:
    return ",".join(ctx.gadgets[i].vertex_name(v) for i, v in enumerate(s))


def _girth(n: int, edges: Sequence[tuple[int, int, int]]) -> int | None:
    if any(s == t for s, t, _ in edges):
        return 1
    pairs = [frozenset((s, t)) for s, t, _ in edges]
    if len(set(pairs)) < len(pairs):
        return 2
    adj: list[list[tuple[int, int]]] = [[] for _ in range(n)]
    for eid, (s, t, _) in enumerate(edges):
        adj[s].append((t, eid))
        adj[t].append((s, eid))
    best = None
    for root in range(n):
        dist = {root: 0}
        via = {root: -1}
        queue = deque([root])
        while queue:
            u = queue.popleft()
            for v, eid in adj[u]:
                if eid == via[u]:
                    continue
                if v not in dist:
                    dist[v] = dist[u] + 1
                    via[v] = eid
                    queue.append(v)
                elif eid != via[v]:
                    length = dist[u] + dist[v] + 1
                    if best is None or length < best:
                        best = length
    return best


def schreier_ball(ctx: ChainContext, n: int, center, radius: int) -> BallSignature:
    """Extract the radius-``radius`` ball around ``center`` (state tuple or orbit index)."""
    if radius < 0:
        raise ValueError("radius must be non-negative")
    orbit = compute_orbit(ctx, n)
    c = center if isinstance(center, (int, np.integer)) else orbit.index(center)
    c = int(c)
    d = ctx.alphabet.d
    local = {c: 0}
    order = [c]
    dist = {c: 0}
    edges: dict[tuple[int, int], tuple[int, int]] = {}
    queue = deque([c])
    while queue:
        u = queue.popleft()
        if dist[u] >= radius:
            continue
        for col, letter in enumerate(ctx.alphabet.letters):
            v = int(orbit.edges[u, col])
            if v not in dist:
                dist[v] = dist[u] + 1
                local[v] = len(order)
                order.append(v)
                queue.append(v)
            src, tgt = (v, u) if letter.inverted else (u, v)
            edges[(src, letter.generator)] = (tgt, letter.generator)
    local_edges = tuple(sorted((local[s], local[t], lab) for (s, lab), (t, _) in edges.items()))
    return BallSignature(
        level=n,
        center=orbit.state(c),
        center_index=c,
        radius=radius,
        vertices=tuple(order),
        edges=local_edges,
        states=tuple(orbit.state(v) for v in order),
    )


def tree_ball_counts(d: int, radius: int) -> tuple[int, int]:
    """(vertices, boundary vertices) of the radius-r ball in the 2d-regular tree."""
    if radius == 0:
        return 1, 1
    boundary = 2 * d * (2 * d - 1) ** (radius - 1)
    total = 1 + sum(2 * d * (2 * d - 1) ** (j - 1) for j in range(1, radius + 1))
    return total, boundary


@dataclass(frozen=True)
class GnsWitness:
    level: int
    radius: int
    cycle_ball: BallSignature
    tree_ball: BallSignature
    looped_fraction: Fraction
    acyclic_count: int

    @property
    def distinguished(self) -> bool:
        return not self.cycle_ball.isomorphic_to(self.tree_ball)


def gns_witness(ctx: ChainContext, n: int, radius: int = DEFAULT_RADIUS) -> GnsWitness:
    """Contrast a looped ball around an a-fixed state with the most tree-like ball.

    A ball of radius r contains a cycle exactly when some nontrivial reduced
    word of length ``<= 2r`` fixes its centre, so the looped fraction is read
    off :func:`shortest_stabilizer_lengths`.  The most tree-like state is the
    one with the longest shortest stabilizer word (first in orbit order).
    """
    if radius < 1:
        raise ValueError("radius must be at least 1")
    orbit = compute_orbit(ctx, n)
    region = np.flatnonzero(_p_region(orbit, ctx))
    cycle_ball = schreier_ball(ctx, n, int(region[0]), radius)
    horizon = max(2 * radius, DEFAULT_MAX_WORD_LENGTH)
    shortest = shortest_stabilizer_lengths(orbit, horizon)
    looped = shortest <= 2 * radius
    tree_ball = schreier_ball(ctx, n, int(np.argmax(shortest)), radius)
    return GnsWitness(
        level=n,
        radius=radius,
        cycle_ball=cycle_ball,
        tree_ball=tree_ball,
        looped_fraction=Fraction(int(looped.sum()), orbit.size),
        acyclic_count=int((~looped).sum()),
    )


def _frac(x: Fraction) -> list[int]:
    return [x.numerator, x.denominator]


@dataclass
class FreenessReport:
    ctx: ChainContext
    levels: int
    alpha_bound: list[AlphaBoundLevel] | None
    alpha_bound_error: str | None
    profiles: list[FixrProfile]
    faithfulness: FaithfulnessReport
    intersection_length: int
    intersection_words: list[Word]
    tree_stats: list = field(default_factory=list)

    @property
    def certificates(self) -> dict[str, bool]:
        a_profile = next(p for p in self.profiles if p.word == A_WORD)
        recheck = all(
            act_on_state(self.ctx, root_state(self.ctx, self.levels), w) == root_state(self.ctx, self.levels)
            for w in self.intersection_words
        )
        c1_ok = True
        if self.ctx.alphabet.d > 2:
            c1 = Word([Letter(2, False)])
            c1_ok = c1 in self.intersection_words or self.intersection_length < 1
        return {
            "alpha_bound": self.alpha_bound is not None,
            "not_essentially_free": a_profile.above_alpha and a_profile.non_increasing,
            "faithful": self.faithfulness.certified,
            "intersection_consistent": recheck and c1_ok,
        }

    @property
    def ok(self) -> bool:
        return all(self.certificates.values())

    def to_dict(self) -> dict:
        ctx = self.ctx
        levels = []
        by_level = {rec.level: rec for rec in self.alpha_bound or []}
        for n in range(1, self.levels + 1):
            g = ctx.gadget(n)
            entry = {
                "level": n,
                "rep": str(g.word),
                "length": g.length,
                "prime": g.prime,
                "index": self.tree_stats[n].orbit_size if self.tree_stats else None,
                "children": self.tree_stats[n].children_count if self.tree_stats else None,
                "bound": _frac(product_bound(ctx, n)),
            }
            if n in by_level:
                entry["p_count"] = by_level[n].p_count
            levels.append(entry)
        cert = self.certificates
        return {
            "alpha": _frac(ctx.alpha),
            "d": ctx.alphabet.d,
            "levels": levels,
            "fixr": {str(p.word) if p.word else "1": [_frac(v) for v in p.values] for p in self.profiles},
            "verdicts": {
                "essentially_free_evidence": "refuted" if cert["not_essentially_free"] else "not refuted",
                "witness_word": "a",
                "faithful_up_to": self.faithfulness.faithful_up_to,
                "faithful_levels_used": self.faithfulness.levels_used,
                "intersection_max_length": self.intersection_length,
                "intersection_words": [str(w) for w in self.intersection_words],
                "alpha_bound_error": self.alpha_bound_error,
            },
            "certificates": cert,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def freeness_report(
    ctx: ChainContext,
    up_to: int | None = None,
    words: Sequence[Word] = (),
    faithful_length: int = DEFAULT_FAITHFUL_LENGTH,
    max_word_length: int = DEFAULT_MAX_WORD_LENGTH,
) -> FreenessReport:
    """Run every finite-level check on the built levels and collect the verdicts."""
    up_to = ctx.levels if up_to is None else up_to
    try:
        bound, error = verify_alpha_bound(ctx, up_to), None
    except AlphaBoundViolation as exc:
        bound, error = None, str(exc)
    a = A_WORD
    profile_words = [a] + [w for w in words if w != a]
    return FreenessReport(
        ctx=ctx,
        levels=up_to,
        alpha_bound=bound,
        alpha_bound_error=error,
        profiles=essential_freeness_report(ctx, profile_words, up_to),
        faithfulness=faithfulness_certificate(ctx, faithful_length),
        intersection_length=max_word_length,
        intersection_words=chain_intersection_test(ctx, max_word_length),
        tree_stats=coset_tree_stats(ctx, up_to),
    )
