import io
import math
import random
from collections import deque
from fractions import Fraction

import numpy as np
import pytest
from sympy import isprime, prevprime

from freechain.chain import (
    OrbitCapExceeded,
    act_on_state,
    build_chain,
    choose_primes,
    compute_orbit,
    coset_tree_stats,
    factor_target,
    fix_ratio,
    fixr_rows,
    product_bound,
    root_state,
    stabilizer_contains,
    write_fixr_csv,
)
from freechain.freegroup import Word, iter_words_up_to, multiply

from conftest import D2, D3, random_word


def oracle_orbit(ctx, n):
    """FIFO breadth-first search on state tuples using the arithmetic gadget action."""
    start = (0,) * n
    index = {start: 0}
    order = [start]
    queue = deque([start])
    while queue:
        s = queue.popleft()
        for letter in ctx.alphabet.letters:
            t = tuple(g.image(v, letter) for g, v in zip(ctx.gadgets, s))
            if t not in index:
                index[t] = len(order)
                order.append(t)
                queue.append(t)
    return order, index


# ---- prime plan -------------------------------------------------------------


def test_prime_examples():
    plan = choose_primes(Fraction(1, 2), (1, 2, 2))
    assert plan.primes == (7, 17, 37)
    assert plan.partial_products() == [Fraction(3, 4), Fraction(12, 19), Fraction(432, 741)]
    assert choose_primes(Fraction(1, 100), (1,)).primes == (2,)
    assert choose_primes(Fraction(1, 100), (1,)).factors() == [Fraction(1, 3)]


@pytest.mark.parametrize("alpha", [Fraction(1, 2), Fraction(1, 100), Fraction(9, 10), Fraction(2, 3)])
def test_primes_are_minimal_under_exact_target(alpha):
    lengths = (1, 2, 2, 2, 3, 3, 3)
    plan = choose_primes(alpha, lengths)
    prev = 1
    for i, (k, p) in enumerate(zip(lengths, plan.primes), start=1):
        factor = Fraction(p - 1, p + k)
        # factor >= alpha ** 2**-i  <=>  factor ** 2**i >= alpha
        assert factor ** (2**i) >= alpha
        q = prevprime(p) if p > 2 else None
        if q is not None and q > prev:
            # the upper-bounded target may only be stricter than the true one
            tau = plan.per_factor_targets[i - 1]
            assert Fraction(q - 1, q + k) < tau
        prev = p
    assert all(prod > alpha for prod in plan.partial_products())


def test_factor_target_is_tight_upper_bound():
    for i in range(1, 12):
        t = factor_target(Fraction(1, 2), i)
        assert t ** (2**i) >= Fraction(1, 2)
        assert t - Fraction(1, 10**30) < 1
        assert abs(float(t) - 0.5 ** (2.0**-i)) < 1e-15


def test_plan_extension_keeps_prefix():
    plan = choose_primes(Fraction(1, 2), (1, 2))
    longer = plan.extended((1, 2, 2, 2))
    assert longer.primes[:2] == plan.primes
    assert longer.primes == choose_primes(Fraction(1, 2), (1, 2, 2, 2)).primes


def test_large_levels_stay_exact():
    plan = choose_primes(Fraction(1, 2), [1] + [2] * 3 + [3] * 56)
    assert all(isprime(p) for p in plan.primes)
    assert plan.partial_products()[-1] > Fraction(1, 2)


@pytest.mark.parametrize("bad", [Fraction(0), Fraction(1), Fraction(3, 2)])
def test_alpha_range(bad):
    with pytest.raises(ValueError):
        choose_primes(bad, (1,))


def test_float_alpha_rejected():
    with pytest.raises(TypeError):
        choose_primes(0.5, (1,))


# ---- chain context and action -----------------------------------------------


def test_build_examples(ctx2, ctx3):
    one = build_chain(D2, Fraction(1, 2), 1)
    assert one.gadget(1).vertex_count == 8
    assert root_state(one, 1) == (0,)
    assert math.prod(g.vertex_count for g in ctx2.gadgets[:2]) == 8 * 19
    c1 = Word([D3.letters[2]])
    assert act_on_state(ctx3, (0,), c1) == (0,)
    f = np.array(ctx3.gadget(1).permutation_table(D3)[2])
    assert np.array_equal(f, np.arange(len(f)))


def test_act_examples(ctx2):
    o3 = root_state(ctx2, 3)
    assert act_on_state(ctx2, o3, Word()) == o3
    assert act_on_state(ctx2, (0,), D2.parse("a")) == (ctx2.gadget(1).z(1),)
    with pytest.raises(ValueError):
        act_on_state(ctx2, (0, 0, 0, 0), Word())
    with pytest.raises(ValueError):
        act_on_state(ctx2, (99,), Word())


def test_right_action(ctx2):
    rng = random.Random(11)
    sizes = [g.vertex_count for g in ctx2.gadgets]
    for _ in range(300):
        s = tuple(rng.randrange(m) for m in sizes)
        u, v = random_word(rng, 2, 6), random_word(rng, 2, 6)
        assert act_on_state(ctx2, act_on_state(ctx2, s, u), v) == act_on_state(ctx2, s, multiply(u, v))


# ---- orbits -----------------------------------------------------------------


@pytest.mark.parametrize("n", [1, 2, 3])
def test_orbit_matches_oracle_bfs(ctx2, n):
    orbit = compute_orbit(ctx2, n)
    order, index = oracle_orbit(ctx2, n)
    assert [orbit.state(i) for i in range(orbit.size)] == order
    for i, s in enumerate(order):
        for col, letter in enumerate(D2.letters):
            t = tuple(g.image(v, letter) for g, v in zip(ctx2.gadgets, s))
            assert orbit.edges[i, col] == index[t]


def test_orbit_matches_oracle_bfs_rank3(ctx3):
    orbit = compute_orbit(ctx3, 2)
    order, _ = oracle_orbit(ctx3, 2)
    assert [orbit.state(i) for i in range(orbit.size)] == order


def test_orbit_sizes(ctx2):
    assert compute_orbit(ctx2, 1).size == 8
    # transitive on the whole product V_1 x V_2 for this instance
    assert compute_orbit(ctx2, 2).size == 152
    assert compute_orbit(ctx2, 3).size == 8 * 19 * 39


def test_orbit_contains_y_product(ctx2):
    for n in (1, 2, 3):
        orbit = compute_orbit(ctx2, n)
        primes = [g.prime for g in ctx2.gadgets[:n]]
        in_y = np.all(orbit.coords < np.array(primes), axis=1)
        assert int(in_y.sum()) == math.prod(primes)


def test_orbit_is_closed(ctx2):
    orbit = compute_orbit(ctx2, 3)
    assert orbit.base_index == 0 and orbit.state(0) == (0, 0, 0)
    for col in range(4):
        assert sorted(orbit.edges[:, col]) == list(range(orbit.size))


def test_orbit_index_lookup(ctx2):
    orbit = compute_orbit(ctx2, 2)
    for i in range(0, orbit.size, 7):
        assert orbit.index(orbit.state(i)) == i
    with pytest.raises(KeyError):
        orbit.index((0, 99))


def test_orbit_cap():
    ctx = build_chain(D2, Fraction(1, 2), 3, cap=1000)
    with pytest.raises(OrbitCapExceeded, match="1000"):
        compute_orbit(ctx, 3)
    ctx = build_chain(D2, Fraction(1, 2), 2, cap=150)
    with pytest.raises(OrbitCapExceeded, match="150"):
        compute_orbit(ctx, 2)


# ---- fixed-point ratios -------------------------------------------------------


def test_fix_ratio_examples(ctx2):
    assert fix_ratio(ctx2, Word(), 2) == 1
    assert fix_ratio(ctx2, D2.parse("a"), 1) == Fraction(6, 8)
    for n in (1, 2, 3):
        bound = Fraction(
            math.prod(g.prime - 1 for g in ctx2.gadgets[:n]),
            math.prod(g.vertex_count for g in ctx2.gadgets[:n]),
        )
        assert bound == product_bound(ctx2, n)
        assert fix_ratio(ctx2, D2.parse("a"), n) >= bound


def test_fix_ratio_brute_force(ctx2):
    rng = random.Random(5)
    orbit = compute_orbit(ctx2, 2)
    for _ in range(30):
        w = random_word(rng, 2, 6)
        fixed = sum(act_on_state(ctx2, orbit.state(i), w) == orbit.state(i) for i in range(orbit.size))
        assert fix_ratio(ctx2, w, 2) == Fraction(fixed, orbit.size)


def test_a_fixes_p_region_pointwise(ctx2):
    a = D2.parse("a")
    orbit = compute_orbit(ctx2, 3)
    primes = np.array([g.prime for g in ctx2.gadgets])
    region = np.flatnonzero(np.all((orbit.coords >= 1) & (orbit.coords < primes), axis=1))
    assert len(region) == 6 * 16 * 36
    images = orbit.apply_word(a, region)
    assert np.array_equal(images, region)


def test_fixr_monotone_and_integral(ctx2):
    for w in iter_words_up_to(D2, 4):
        values = [fix_ratio(ctx2, w, n) for n in (1, 2, 3)]
        assert values[0] >= values[1] >= values[2]
        for n, r in zip((1, 2, 3), values):
            size = compute_orbit(ctx2, n).size
            assert (r * size).denominator == 1


# ---- stabilizers and the coset tree ------------------------------------------


def test_stabilizer_examples(ctx2, ctx3):
    assert stabilizer_contains(ctx2, Word(), 3)
    c1 = D3.parse("c1")
    assert stabilizer_contains(ctx3, c1, 1) and stabilizer_contains(ctx3, c1, 2)
    assert not stabilizer_contains(ctx2, D2.parse("a"), 1)


def test_stabilizer_nesting(ctx2):
    for w in iter_words_up_to(D2, 6):
        for n in (1, 2):
            if stabilizer_contains(ctx2, w, n + 1):
                assert stabilizer_contains(ctx2, w, n)


def test_coset_tree_stats(ctx2):
    stats = coset_tree_stats(ctx2, 3)
    assert [s.orbit_size for s in stats] == [1, 8, 152, 5928]
    assert [s.children_count for s in stats] == [8, 19, 39, None]
    assert stats[1].shadow_measure == Fraction(1, 8)
    for s in stats:
        assert s.shadow_measure * s.orbit_size == 1
        if s.children_count is not None:
            assert s.children_count * s.orbit_size == stats[s.level + 1].orbit_size


def test_fixr_csv(ctx2):
    buf = io.StringIO()
    write_fixr_csv(ctx2, D2.parse("a"), 2, buf)
    assert buf.getvalue().splitlines() == [
        "level,index,word,fixr_num,fixr_den,bound_num,bound_den,alpha_num,alpha_den",
        "1,8,a,3,4,3,4,1,2",
        "2,152,a,12,19,12,19,1,2",
    ]
    assert fixr_rows(ctx2, Word(), 1)[0]["fixr_num"] == 1
