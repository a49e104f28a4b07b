"""X-labeled graphs and the permutation actions they induce.

A labeled graph carries at most one outgoing and at most one incoming edge
of each label at every vertex.  Erasing all edges but those labeled ``x``
leaves isolated points, directed circles and directed simple paths; the
permutation ``f_x`` follows edges and sends the last vertex of each path back
to its first vertex.  Points act on the right: ``v . Phi(uw) = (v . Phi(u)) . Phi(w)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from .freegroup import A, B, Alphabet, Letter, Word, generator_name

__all__ = [
    "InvalidGraphError",
    "LabeledGraph",
    "Permutation",
    "ValidationReport",
    "ComponentGraphSpec",
    "Gadget",
    "validate_graph",
    "label_permutation",
    "evaluate_action",
    "trace_word",
    "build_component_graph",
    "to_dot",
]


class InvalidGraphError(ValueError):
    pass


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``range(n)`` stored as its image array."""

    images: np.ndarray

    def __post_init__(self):
        images = np.asarray(self.images, dtype=np.int64)
        images.setflags(write=False)
        object.__setattr__(self, "images", images)

    @classmethod
    def identity(cls, n: int) -> "Permutation":
        return cls(np.arange(n))

    def __len__(self) -> int:
        return len(self.images)

    def __call__(self, v: int) -> int:
        return int(self.images[v])

    def then(self, other: "Permutation") -> "Permutation":
        """Apply ``self`` first, then ``other``."""
        return Permutation(other.images[self.images])

    def inverse(self) -> "Permutation":
        inv = np.empty_like(self.images)
        inv[self.images] = np.arange(len(self.images))
        return Permutation(inv)

    def is_bijection(self) -> bool:
        n = len(self.images)
        return bool(np.array_equal(np.sort(self.images), np.arange(n)))

    def fixed_points(self) -> np.ndarray:
        return np.flatnonzero(self.images == np.arange(len(self.images)))

    def __eq__(self, other) -> bool:
        return isinstance(other, Permutation) and np.array_equal(self.images, other.images)

    def __hash__(self) -> int:
        return hash(self.images.tobytes())


@dataclass(frozen=True)
class ValidationReport:
    ok: bool
    vertex: int | None = None
    label: int | None = None
    problem: str = ""

    def __bool__(self) -> bool:
        return self.ok


@dataclass(frozen=True)
class LabeledGraph:
    """Finite directed graph with edges ``(source, target, label)``.

    Labels are generator indices.  Loops and multiple edges are allowed;
    the label axioms are checked by :func:`validate_graph`, not here.
    """

    vertex_count: int
    edges: tuple[tuple[int, int, int], ...]
    names: tuple[str, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "edges", tuple(tuple(int(x) for x in e) for e in self.edges))

    @cached_property
    def labels(self) -> tuple[int, ...]:
        return tuple(sorted({lab for _, _, lab in self.edges}))

    @cached_property
    def _maps(self) -> dict[int, tuple[dict[int, int], dict[int, int]]]:
        report = validate_graph(self)
        if not report:
            raise InvalidGraphError(
                f"{report.problem} at vertex {report.vertex} with label {report.label}"
            )
        maps: dict[int, tuple[dict[int, int], dict[int, int]]] = {}
        for s, t, lab in self.edges:
            out, inn = maps.setdefault(lab, ({}, {}))
            out[s] = t
            inn[t] = s
        return maps

    def out_edge(self, v: int, label: int) -> int | None:
        return self._maps.get(label, ({}, {}))[0].get(v)

    def in_edge(self, v: int, label: int) -> int | None:
        return self._maps.get(label, ({}, {}))[1].get(v)

    def vertex_name(self, v: int) -> str:
        return self.names[v] if self.names is not None else f"v{v}"


def validate_graph(g: LabeledGraph) -> ValidationReport:
    """Check the label axioms, reporting the first offending (vertex, label)."""
    outs: set[tuple[int, int]] = set()
    ins: set[tuple[int, int]] = set()
    for s, t, lab in g.edges:
        for v in (s, t):
            if not 0 <= v < g.vertex_count:
                return ValidationReport(False, v, lab, "vertex out of range")
        if lab < 0:
            return ValidationReport(False, s, lab, "negative label")
        if (s, lab) in outs:
            return ValidationReport(False, s, lab, "two outgoing edges share a label")
        if (t, lab) in ins:
            return ValidationReport(False, t, lab, "two incoming edges share a label")
        outs.add((s, lab))
        ins.add((t, lab))
    return ValidationReport(True)


def label_permutation(g: LabeledGraph, x: int) -> Permutation:
    """The bijection ``f_x`` of the vertex set induced by the ``x``-labeled edges."""
    out, inn = g._maps.get(x, ({}, {}))
    images = np.arange(g.vertex_count)
    for v in range(g.vertex_count):
        if v in out:
            images[v] = out[v]
        elif v in inn:
            # last vertex of a path: wrap to its first vertex
            u = v
            while u in inn:
                u = inn[u]
            images[v] = u
    return Permutation(images)


def letter_permutation(g: LabeledGraph, letter: Letter) -> Permutation:
    perm = label_permutation(g, letter.generator)
    return perm.inverse() if letter.inverted else perm


def evaluate_action(g: LabeledGraph, w: Word) -> Permutation:
    """``Phi(w)`` as a permutation; letters are applied left to right."""
    result = Permutation.identity(g.vertex_count)
    cache: dict[Letter, Permutation] = {}
    for letter in w:
        if letter not in cache:
            cache[letter] = letter_permutation(g, letter)
        result = result.then(cache[letter])
    return result


def trace_word(g: LabeledGraph, v0: int, w: Word) -> int | None:
    """Walk ``w`` from ``v0`` along edges only; ``None`` when a required edge is missing.

    Positive letters follow an outgoing edge with that label, inverse letters
    follow an incoming edge backwards.  Whenever the walk exists its endpoint
    equals ``v0 . Phi(w)``.
    """
    v = v0
    for letter in w:
        v = g.in_edge(v, letter.generator) if letter.inverted else g.out_edge(v, letter.generator)
        if v is None:
            return None
    return v


@dataclass(frozen=True)
class ComponentGraphSpec:
    """Data for the i-th gadget: a b-labeled prime cycle glued to a path spelling ``word``."""

    index: int
    word: Word
    prime: int

    def __post_init__(self):
        if not self.word or self.word[0] != Letter(A, False):
            raise ValueError(f"word must start with a, got {self.word!r}")
        if self.prime < 2:
            raise ValueError(f"cycle length must be a prime, got {self.prime}")

    @property
    def length(self) -> int:
        return len(self.word)

    @property
    def vertex_count(self) -> int:
        return self.prime + self.length


class Gadget:
    """Arithmetic form of the i-th gadget graph, valid for arbitrarily large primes.

    Vertex ids: ``y_j = j`` for ``0 <= j < p`` and ``z_j = p + j - 1`` for
    ``1 <= j <= k``; the root ``x = y_0 = z_0`` is vertex 0.  Images of single
    letters are computed from the cycle rule and the (short) path edges, so
    nothing of size ``p`` is ever stored.
    """

    def __init__(self, spec: ComponentGraphSpec):
        self.spec = spec
        self.index = spec.index
        self.word = spec.word
        self.prime = spec.prime
        self.length = spec.length
        self.vertex_count = spec.vertex_count
        self._out: dict[int, dict[int, int]] = {}
        self._in: dict[int, dict[int, int]] = {}
        for s, t, lab in self.path_edges():
            self._out.setdefault(lab, {})[s] = t
            self._in.setdefault(lab, {})[t] = s

    root = 0

    def z(self, j: int) -> int:
        return 0 if j == 0 else self.prime + j - 1

    def y(self, j: int) -> int:
        return j % self.prime

    @property
    def end(self) -> int:
        """The path endpoint ``z_k``."""
        return self.z(self.length)

    def cycle_edges(self):
        p = self.prime
        return [(j, (j + 1) % p, B) for j in range(p)]

    def path_edges(self):
        edges = []
        for j, letter in enumerate(self.word):
            if letter.inverted:
                edges.append((self.z(j + 1), self.z(j), letter.generator))
            else:
                edges.append((self.z(j), self.z(j + 1), letter.generator))
        return edges

    def vertex_name(self, v: int) -> str:
        if v < self.prime:
            return f"y{self.index}_{v}"
        return f"z{self.index}_{v - self.prime + 1}"

    def parse_vertex(self, name: str) -> int:
        name = name.strip()
        i = str(self.index)
        if name == f"x{i}":
            return 0
        for prefix, conv, bound in (("y", self.y, self.prime), ("z", self.z, self.length + 1)):
            head = f"{prefix}{i}_"
            if name.startswith(head) and name[len(head):].isdigit():
                j = int(name[len(head):])
                if j < bound:
                    return conv(j)
        raise ValueError(f"no vertex named {name!r} in component {self.index}")

    def image(self, v: int, letter: Letter) -> int:
        """``v . f_x`` or ``v . f_x^-1`` for the letter's generator ``x``."""
        gen, inverted = letter
        if gen == B and v < self.prime:
            return (v - 1) % self.prime if inverted else (v + 1) % self.prime
        fwd = self._in.get(gen, {}) if inverted else self._out.get(gen, {})
        back = self._out.get(gen, {}) if inverted else self._in.get(gen, {})
        if v in fwd:
            return fwd[v]
        u = v
        while u in back:
            u = back[u]
        return u

    def act(self, v: int, w: Word) -> int:
        for letter in w:
            v = self.image(v, letter)
        return v

    @cached_property
    def graph(self) -> LabeledGraph:
        names = tuple(self.vertex_name(v) for v in range(self.vertex_count))
        return LabeledGraph(self.vertex_count, tuple(self.cycle_edges() + self.path_edges()), names)

    def permutation_table(self, alphabet: Alphabet) -> np.ndarray:
        """Image arrays for every letter, rows in :attr:`Alphabet.letters` order."""
        g = self.graph
        rows = [label_permutation(g, gen).images for gen in range(alphabet.d)]
        rows += [Permutation(r).inverse().images for r in rows]
        return np.stack(rows)


def build_component_graph(spec: ComponentGraphSpec) -> LabeledGraph:
    """The labeled graph ``G_i``: b-cycle on the y's plus the path spelling ``spec.word``."""
    return Gadget(spec).graph


def to_dot(g: LabeledGraph, alphabet: Alphabet | None = None, name: str = "G",
           attrs: dict[int, dict[str, str]] | None = None) -> str:
    """DOT text with one edge per labeled edge, ordered by (source, label, target)."""
    label_name = alphabet.names.__getitem__ if alphabet is not None else generator_name
    lines = [f"digraph {name} {{"]
    for v in range(g.vertex_count):
        extra = "".join(f' {k}="{val}"' for k, val in sorted((attrs or {}).get(v, {}).items()))
        lines.append(f'  "{g.vertex_name(v)}"' + (f" [{extra.strip()}]" if extra else "") + ";")
    for s, t, lab in sorted(g.edges, key=lambda e: (e[0], e[2], e[1])):
        lines.append(f'  "{g.vertex_name(s)}" -> "{g.vertex_name(t)}" [label="{label_name(lab)}"];')
    lines.append("}")
    return "\n".join(lines) + "\n"
