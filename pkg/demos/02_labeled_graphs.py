"""
Labeled graphs as permutation actions
=====================================

A graph whose edges carry generator labels, with at most one incoming and one
outgoing edge per label at each vertex, defines a permutation for every label:
follow the edge when there is one, and send the end of a path back to its
start.  Words then act letter by letter.
"""
from freechain import Alphabet, ComponentGraphSpec, Gadget, LabeledGraph
from freechain.labeled_graph import evaluate_action, to_dot, trace_word, validate_graph

F2 = Alphabet(2)

# a two-edge a-path 0 -> 1 -> 2 and a b-loop at vertex 1
g = LabeledGraph(3, ((0, 1, 0), (1, 2, 0), (1, 1, 1)))
print(validate_graph(g))
print("f_a:", evaluate_action(g, F2.parse("a")).images)  # 0->1->2->0

# two a-edges leaving the same vertex break the axioms
bad = LabeledGraph(3, ((0, 1, 0), (0, 2, 0)))
print(validate_graph(bad))

# a gadget: a b-cycle of prime length with a path spelling the word hung on the root
gadget = Gadget(ComponentGraphSpec(2, F2.parse("a b'"), 5))
word = gadget.word
print("trace of", word, "from the root:", gadget.vertex_name(trace_word(gadget.graph, 0, word)))
print("the word moves the root:", gadget.act(0, word) != 0)
print(to_dot(gadget.graph, F2, name="gadget"))
