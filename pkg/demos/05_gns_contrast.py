"""
Looped balls versus tree-like balls
===================================

Around a state fixed by a, the Schreier graph has an a-loop, so the ball of
radius 1 is not a tree.  States fixed by no short word have balls that look
like the Cayley tree of the free group.  Writing both balls as DOT files makes
the contrast visible.
"""
from fractions import Fraction

from freechain import Alphabet, build_chain
from freechain.analysis import free_point_search, gns_witness, tree_ball_counts

ctx = build_chain(Alphabet(2), Fraction(1, 2), 3)
wit = gns_witness(ctx, 2, 1)
print("looped fraction at level 2:", wit.looped_fraction)
print("cycle ball:", len(wit.cycle_ball.vertices), "vertices, girth", wit.cycle_ball.shortest_cycle)
print("tree ball:", len(wit.tree_ball.vertices), "vertices; Cayley ball has", tree_ball_counts(2, 1)[0])

for L in (2, 4, 6):
    print(f"level 3 states with no stabilizer word of length <= {L}:", len(free_point_search(ctx, 3, L)))

with open("cycle_ball.dot", "w") as fh:
    fh.write(wit.cycle_ball.to_dot(ctx, "cycle_ball"))
with open("tree_ball.dot", "w") as fh:
    fh.write(wit.tree_ball.to_dot(ctx, "tree_ball"))
