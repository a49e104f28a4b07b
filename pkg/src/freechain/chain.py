"""The subgroup chain H_1 >= H_2 >= ... built from gadget graphs.

Level ``n`` of the chain is the stabilizer of the root tuple ``o_n`` under the
coordinate-wise action of the free group on ``V_1 x ... x V_n``.  The coset
space ``F/H_n`` is the orbit ``O_n`` of ``o_n``; it is enumerated breadth-first
with numpy over mixed-radix state codes.  All ratios are exact ``Fraction``s.
"""
from __future__ import annotations

import csv
import math
import threading
from dataclasses import dataclass, field
from fractions import Fraction
from typing import IO, Sequence

import numpy as np
from mpmath import iv
from sympy import isprime, nextprime

from .freegroup import Alphabet, ClassList, Word, enumerate_a_class_reps
from .labeled_graph import ComponentGraphSpec, Gadget

__all__ = [
    "DEFAULT_STATE_CAP",
    "OrbitCapExceeded",
    "PrimePlan",
    "ChainContext",
    "OrbitTable",
    "ChainLevelStats",
    "choose_primes",
    "build_chain",
    "root_state",
    "act_on_state",
    "compute_orbit",
    "fix_ratio",
    "product_bound",
    "stabilizer_contains",
    "coset_tree_stats",
    "fixr_rows",
    "write_fixr_csv",
]

DEFAULT_STATE_CAP = 5_000_000

ProductState = tuple[int, ...]


class OrbitCapExceeded(RuntimeError):
    pass


def _as_fraction(alpha) -> Fraction:
    if isinstance(alpha, float):
        raise TypeError("alpha must be exact (Fraction, int pair or 'num/den' text)")
    alpha = Fraction(alpha)
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie strictly between 0 and 1, got {alpha}")
    return alpha


_iv_lock = threading.Lock()


def factor_target(alpha: Fraction, i: int) -> Fraction:
    """Exact rational upper bound for ``alpha ** (2 ** -i)``."""
    with _iv_lock:
        saved = iv.prec
        iv.prec = 2 * i + 128
        try:
            t = iv.exp(iv.log(iv.mpf(alpha.numerator) / iv.mpf(alpha.denominator)) / 2**i)
            sign, man, exp, _ = t._mpi_[1]
        finally:
            iv.prec = saved
    assert sign == 0
    upper = Fraction(int(man)) * Fraction(2) ** exp
    return min(upper, Fraction(1))


def _factor(p: int, k: int) -> Fraction:
    return 1 - Fraction(k + 1, p + k)


@dataclass(frozen=True)
class PrimePlan:
    alpha: Fraction
    lengths: tuple[int, ...]
    primes: tuple[int, ...]
    per_factor_targets: tuple[Fraction, ...]

    def factors(self) -> list[Fraction]:
        return [_factor(p, k) for p, k in zip(self.primes, self.lengths)]

    def partial_products(self) -> list[Fraction]:
        out, acc = [], Fraction(1)
        for f in self.factors():
            acc *= f
            out.append(acc)
        return out

    def check(self) -> None:
        """Raise unless the primes increase and every partial product exceeds alpha."""
        for q, r in zip(self.primes, self.primes[1:]):
            if not q < r:
                raise AssertionError(f"primes not increasing: {q}, {r}")
        for p in self.primes:
            if not isprime(p):
                raise AssertionError(f"{p} is not prime")
        for n, prod in enumerate(self.partial_products(), start=1):
            if not prod > self.alpha:
                raise AssertionError(f"partial product {prod} at n={n} is not above {self.alpha}")

    def extended(self, lengths: Sequence[int]) -> "PrimePlan":
        """Plan for a longer length sequence; the existing prefix is kept as is."""
        lengths = tuple(lengths)
        if lengths[: len(self.lengths)] != self.lengths:
            raise ValueError("new lengths must extend the planned ones")
        primes = list(self.primes)
        targets = list(self.per_factor_targets)
        for i in range(len(primes) + 1, len(lengths) + 1):
            k = lengths[i - 1]
            if primes and k < lengths[i - 2]:
                raise ValueError("lengths must be non-decreasing")
            tau = factor_target(self.alpha, i)
            # (p - 1)/(p + k) >= tau  <=>  p >= (1 + tau k)/(1 - tau)
            lower = math.ceil((1 + tau * k) / (1 - tau))
            cand = max(lower, primes[-1] + 1 if primes else 2)
            p = cand if isprime(cand) else int(nextprime(cand))
            assert _factor(p, k) >= tau
            primes.append(p)
            targets.append(tau)
        plan = PrimePlan(self.alpha, lengths, tuple(primes), tuple(targets))
        plan.check()
        return plan


def choose_primes(alpha, lengths: Sequence[int]) -> PrimePlan:
    """Smallest increasing primes whose factors meet the targets ``alpha ** (2 ** -i)``.

    Since the targets multiply to ``alpha ** (1 - 2 ** -n) > alpha``, every
    partial product of ``1 - (k_i + 1)/(p_i + k_i)`` exceeds ``alpha``; this is
    re-checked exactly before returning.
    """
    return PrimePlan(_as_fraction(alpha), (), (), ()).extended(lengths)


@dataclass(frozen=True, eq=False)
class ChainContext:
    """Everything needed to act at levels ``1 .. levels``; orbits are cached lazily."""

    alphabet: Alphabet
    alpha: Fraction
    classes: ClassList
    plan: PrimePlan
    gadgets: tuple[Gadget, ...]
    cap: int = DEFAULT_STATE_CAP
    _orbits: dict = field(default_factory=dict, repr=False)
    _lock: threading.Lock = field(default_factory=threading.Lock, repr=False)

    @property
    def levels(self) -> int:
        return len(self.gadgets)

    def gadget(self, i: int) -> Gadget:
        """The 1-based i-th gadget."""
        return self.gadgets[i - 1]

    def extended(self, levels: int) -> "ChainContext":
        if levels <= self.levels:
            return self
        classes = enumerate_a_class_reps(self.alphabet, levels)
        plan = self.plan.extended(classes.lengths)
        gadgets = self.gadgets + tuple(
            Gadget(ComponentGraphSpec(i, classes.reps[i - 1], plan.primes[i - 1]))
            for i in range(self.levels + 1, levels + 1)
        )
        ctx = ChainContext(self.alphabet, self.alpha, classes, plan, gadgets, self.cap)
        ctx._orbits.update(self._orbits)
        return ctx


def build_chain(alphabet: Alphabet, alpha, levels: int, cap: int = DEFAULT_STATE_CAP) -> ChainContext:
    if levels < 1:
        raise ValueError("levels must be at least 1")
    alpha = _as_fraction(alpha)
    empty = ChainContext(alphabet, alpha, ClassList(alphabet, ()), PrimePlan(alpha, (), (), ()), (), cap)
    return empty.extended(levels)


def root_state(ctx: ChainContext, n: int) -> ProductState:
    if not 1 <= n <= ctx.levels:
        raise ValueError(f"level {n} not built (have 1..{ctx.levels})")
    return (0,) * n


def act_on_state(ctx: ChainContext, s: Sequence[int], w: Word) -> ProductState:
    """Apply ``w`` to a product state coordinate-wise (right action)."""
    if not 1 <= len(s) <= ctx.levels:
        raise ValueError(f"state of level {len(s)} does not match built levels 1..{ctx.levels}")
    out = []
    for g, v in zip(ctx.gadgets, s):
        if not 0 <= v < g.vertex_count:
            raise ValueError(f"coordinate {v} is not a vertex of component {g.index}")
        out.append(g.act(v, w))
    return tuple(out)


@dataclass(frozen=True, eq=False)
class OrbitTable:
    """The orbit ``O_n`` of ``o_n`` with its Schreier graph.

    ``codes[i]`` is the mixed-radix code of state ``i`` (last coordinate least
    significant); ``edges[i, c]`` is the index of the image of state ``i``
    under the c-th letter of :attr:`Alphabet.letters`.
    """

    level: int
    alphabet: Alphabet
    sizes: tuple[int, ...]
    codes: np.ndarray
    coords: np.ndarray
    edges: np.ndarray
    base_index: int = 0

    @property
    def size(self) -> int:
        return len(self.codes)

    def __len__(self) -> int:
        return len(self.codes)

    def state(self, i: int) -> ProductState:
        return tuple(int(c) for c in self.coords[i])

    def index(self, state: Sequence[int]) -> int:
        if len(state) != self.level or not all(0 <= c < s for c, s in zip(state, self.sizes)):
            raise KeyError(f"state {tuple(state)} is not a level-{self.level} state")
        code = 0
        for c, s in zip(state, self.sizes):
            code = code * s + int(c)
        j = int(np.searchsorted(self._sorted_codes, code))
        if j >= len(self.codes) or self._sorted_codes[j] != code:
            raise KeyError(f"state {tuple(state)} is not in the orbit")
        return int(self._sorter[j])

    @property
    def _sorter(self) -> np.ndarray:
        return _sorted_view(self)[0]

    @property
    def _sorted_codes(self) -> np.ndarray:
        return _sorted_view(self)[1]

    def apply_word(self, w: Word, start: np.ndarray | None = None) -> np.ndarray:
        """Images of the states ``start`` (default: all) under ``w``, as indices."""
        idx = np.arange(self.size) if start is None else np.asarray(start)
        for letter in w:
            idx = self.edges[idx, self.alphabet.letter_column(letter)]
        return idx


def _sorted_view(orbit: OrbitTable) -> tuple[np.ndarray, np.ndarray]:
    cached = orbit.__dict__.get("_sorted")
    if cached is None:
        sorter = np.argsort(orbit.codes, kind="stable")
        cached = (sorter, orbit.codes[sorter])
        object.__setattr__(orbit, "_sorted", cached)
    return cached


def _images(codes: np.ndarray, tables: list[np.ndarray], sizes: np.ndarray, strides: np.ndarray) -> np.ndarray:
    coords = (codes[:, None] // strides) % sizes
    out = np.zeros((len(codes), tables[0].shape[0]), dtype=np.int64)
    for i, table in enumerate(tables):
        out += table[:, coords[:, i]].T * strides[i]
    return out


def compute_orbit(ctx: ChainContext, n: int) -> OrbitTable:
    """Breadth-first closure of ``o_n``; letters tried in order a, b, c1, ..., a', b', ...

    Raises :class:`OrbitCapExceeded` if the orbit would exceed ``ctx.cap`` states.
    """
    root_state(ctx, n)
    with ctx._lock:
        if n in ctx._orbits:
            return ctx._orbits[n]
    gadgets = ctx.gadgets[:n]
    y_product = math.prod(g.prime for g in gadgets)
    if y_product > ctx.cap:
        raise OrbitCapExceeded(
            f"orbit at level {n} has at least {y_product} states, above the cap of {ctx.cap}"
        )
    sizes = np.array([g.vertex_count for g in gadgets], dtype=np.int64)
    strides = np.array([math.prod(int(s) for s in sizes[i + 1:]) for i in range(n)], dtype=np.int64)
    tables = [g.permutation_table(ctx.alphabet) for g in gadgets]

    seen = np.zeros(1, dtype=np.int64)
    layers = [seen.copy()]
    frontier = layers[0]
    total = 1
    while len(frontier):
        flat = _images(frontier, tables, sizes, strides).ravel()
        uniq, first = np.unique(flat, return_index=True)
        pos = np.minimum(np.searchsorted(seen, uniq), len(seen) - 1)
        fresh = seen[pos] != uniq
        new = flat[np.sort(first[fresh])]
        total += len(new)
        if total > ctx.cap:
            raise OrbitCapExceeded(f"orbit at level {n} exceeds the cap of {ctx.cap} states")
        seen = np.union1d(seen, new)
        layers.append(new)
        frontier = new

    codes = np.concatenate(layers)
    sorter = np.argsort(codes, kind="stable")
    sorted_codes = codes[sorter]
    images = _images(codes, tables, sizes, strides)
    edges = sorter[np.searchsorted(sorted_codes, images)]
    coords = (codes[:, None] // strides) % sizes
    for arr in (codes, coords, edges):
        arr.setflags(write=False)
    orbit = OrbitTable(n, ctx.alphabet, tuple(int(s) for s in sizes), codes, coords, edges)
    object.__setattr__(orbit, "_sorted", (sorter, sorted_codes))
    with ctx._lock:
        return ctx._orbits.setdefault(n, orbit)


def fix_ratio(ctx: ChainContext, w: Word, n: int) -> Fraction:
    """Fraction of the cosets of ``H_n`` fixed by ``w``."""
    orbit = compute_orbit(ctx, n)
    fixed = int(np.count_nonzero(orbit.apply_word(w) == np.arange(orbit.size)))
    return Fraction(fixed, orbit.size)


def product_bound(ctx: ChainContext, n: int) -> Fraction:
    """``prod (p_i - 1) / prod (p_i + k_i)`` over the first ``n`` levels."""
    gadgets = ctx.gadgets[:n]
    return Fraction(math.prod(g.prime - 1 for g in gadgets), math.prod(g.vertex_count for g in gadgets))


def stabilizer_contains(ctx: ChainContext, w: Word, n: int) -> bool:
    """Whether ``w`` lies in ``H_n``, i.e. fixes ``o_n``."""
    o = root_state(ctx, n)
    return act_on_state(ctx, o, w) == o


@dataclass(frozen=True)
class ChainLevelStats:
    level: int
    orbit_size: int
    children_count: int | None
    shadow_measure: Fraction

    @property
    def index(self) -> int:
        return self.orbit_size


def coset_tree_stats(ctx: ChainContext, up_to: int) -> list[ChainLevelStats]:
    """Level sizes of the coset tree for levels ``0 .. up_to``.

    Children counts come from the drop-last-coordinate projection
    ``O_{n+1} -> O_n``; the projection is checked to be equivariant with
    uniform fibres.  The last level's children count is ``None`` unless the
    next level is also built.
    """
    top = min(up_to + 1, ctx.levels)
    orbits = {n: compute_orbit(ctx, n) for n in range(1, top + 1)}
    stats = []
    for n in range(0, up_to + 1):
        size = 1 if n == 0 else orbits[n].size
        children = None
        if n + 1 in orbits:
            children = _uniform_children(orbits.get(n), orbits[n + 1])
        stats.append(ChainLevelStats(n, size, children, Fraction(1, size)))
    return stats


def _uniform_children(lower: OrbitTable | None, upper: OrbitTable) -> int:
    last = upper.sizes[-1]
    parent_codes = upper.codes // last
    if lower is None:
        counts = np.array([upper.size])
        parents = np.zeros(upper.size, dtype=np.int64)
        parent_edges = np.zeros((1, upper.edges.shape[1]), dtype=np.int64)
    else:
        sorter, sorted_codes = _sorted_view(lower)
        pos = np.searchsorted(sorted_codes, parent_codes)
        pos = np.minimum(pos, len(sorted_codes) - 1)
        if not np.array_equal(sorted_codes[pos], parent_codes):
            raise AssertionError(f"projection of O_{upper.level} leaves O_{lower.level}")
        parents = sorter[pos]
        counts = np.bincount(parents, minlength=lower.size)
        parent_edges = lower.edges
    if not np.all(counts == counts[0]):
        raise AssertionError(f"non-uniform children counts below level {upper.level - 1}")
    if not np.array_equal(parents[upper.edges], parent_edges[parents]):
        raise AssertionError(f"projection onto level {upper.level - 1} is not equivariant")
    return int(counts[0])


def fixr_rows(ctx: ChainContext, w: Word, up_to: int) -> list[dict]:
    rows = []
    for n in range(1, up_to + 1):
        r = fix_ratio(ctx, w, n)
        b = product_bound(ctx, n)
        rows.append({
            "level": n,
            "index": compute_orbit(ctx, n).size,
            "word": str(w),
            "fixr_num": r.numerator,
            "fixr_den": r.denominator,
            "bound_num": b.numerator,
            "bound_den": b.denominator,
            "alpha_num": ctx.alpha.numerator,
            "alpha_den": ctx.alpha.denominator,
        })
    return rows


FIXR_COLUMNS = ["level", "index", "word", "fixr_num", "fixr_den", "bound_num", "bound_den", "alpha_num", "alpha_den"]


def write_fixr_csv(ctx: ChainContext, w: Word, up_to: int, fh: IO[str]) -> None:
    writer = csv.DictWriter(fh, fieldnames=FIXR_COLUMNS, lineterminator="\n")
    writer.writeheader()
    writer.writerows(fixr_rows(ctx, w, up_to))
