"""
Reduced words and conjugacy classes
===================================

Words in the free group are stored reduced.  Two words are conjugate exactly
when their cyclic reductions are rotations of each other, so the lex-least
rotation serves as a class key.  The chain construction walks through the
classes that contain an a-starting word, in length-lex order.
"""
from freechain import Alphabet, conjugacy_key, cyclic_reduce, enumerate_a_class_reps

F2 = Alphabet(2)

# parsing reduces, so a a' b is just b
w = F2.parse("a b a' b' a a'")
print("reduced:", w)
print("inverse:", ~w)

# a b a' is conjugate to b; the conjugator is returned alongside the core
core, g = cyclic_reduce(F2.parse("a b a'"))
print("core", core, "conjugator", g)
print("same class as b?", conjugacy_key(F2.parse("a b a'")) == conjugacy_key(F2.parse("b")))

# the first class representatives for rank 2
classes = enumerate_a_class_reps(F2, 11)
for i, (rep, k) in enumerate(zip(classes.reps, classes.lengths), start=1):
    print(f"w_{i:<2} k={k}  {rep}")
