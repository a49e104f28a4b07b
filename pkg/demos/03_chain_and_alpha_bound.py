"""
A chain whose fixed-point ratio stays above alpha
=================================================

Each level adds one gadget.  Its prime is the smallest one that keeps the
running product of (p-1)/(p+k) above the target, so the generator a fixes a
fraction of cosets that never drops to alpha.
"""
from fractions import Fraction

from freechain import Alphabet, build_chain
from freechain.analysis import verify_alpha_bound
from freechain.chain import coset_tree_stats

ctx = build_chain(Alphabet(2), Fraction(1, 2), 4)
print("primes:", ctx.plan.primes)
print("partial products:", [str(x) for x in ctx.plan.partial_products()])

# exact certificate: fixr([a], n) >= |P_n|/|O_n| >= product bound > alpha
for rec in verify_alpha_bound(ctx, 4):
    print(f"level {rec.level}: index {rec.index:>6}  fixr {rec.fixr}  P-ratio {rec.p_ratio}  bound {rec.bound}")

# the coset tree: every vertex at level n has the same number of children
for s in coset_tree_stats(ctx, 3):
    print(f"level {s.level}: {s.orbit_size} cosets, {s.children_count} children each, shadow {s.shadow_measure}")
