"""
Every short word acts nontrivially somewhere
============================================

A nontrivial word w, or its inverse, is conjugate to some representative w_m.
Gadget m moves its root by w_m, so w moves a state of the orbit at level m.
The witness is computed directly, without enumerating that orbit, so levels
far beyond the enumerable range are fine.
"""
from fractions import Fraction

from freechain import Alphabet, build_chain
from freechain.analysis import acts_nontrivially, faithfulness_certificate
from freechain.chain import stabilizer_contains

ctx = build_chain(Alphabet(2), Fraction(1, 2), 3)
report = faithfulness_certificate(ctx, 3)
print(f"certified up to length {report.faithful_up_to} using {report.levels_used} levels")
for wit in report.witnesses[:6]:
    print(f"  {str(wit.word):<8} moved at level {wit.level:>2}")

# rank 3: c1 fixes every root of the first levels, yet is not in the kernel
F3 = Alphabet(3)
ctx3 = build_chain(F3, Fraction(1, 2), 2)
c1 = F3.parse("c1")
print("c1 in H_1 and H_2:", all(stabilizer_contains(ctx3, c1, n) for n in (1, 2)))
wit = acts_nontrivially(ctx3.extended(18), c1)
print("c1 moves a state at level", wit.level)
