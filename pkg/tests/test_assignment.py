import itertools
import json
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from conftest import random_pair_assignment, realization
from dofsim.assignment import (
    MessageAssignment,
    Strategy,
    StrategyError,
    UnsupportedCooperationError,
    counts_from_sets,
    enabled_users,
    expand_ternary,
    fraction_assignment,
    parse_strategy,
    reconstruct_from_counts,
    ternary_counts,
    theorem4_assignment,
    theorem5_assignment,
    topology_reduce,
    validate_ternary,
)
from dofsim.network import NetworkTopology, connected, sample_realization
from dofsim.scheduler import zf_dof


def sets(*xs):
    return tuple(tuple(x) for x in xs)


# --- ternary strings -------------------------------------------------------

def test_expand_identity():
    assert expand_ternary((1,), 4).transmit_sets == sets([1], [2], [3], [4])


def test_expand_210():
    assert expand_ternary((2, 1, 0), 6).transmit_sets == sets([1], [1], [2], [4], [4], [5])


def test_expand_1210():
    # hand trace per 4-block: counts (1,2,1,0) -> y=2, x=4
    a = expand_ternary((1, 2, 1, 0), 8)
    assert a.transmit_sets == sets([1], [2], [2], [3], [5], [6], [6], [7])


def test_expand_pads_with_ones():
    a = expand_ternary((2, 1, 0), 7)
    assert counts_from_sets(a) == (2, 1, 0, 2, 1, 0, 1)
    assert a.T(7) == (7,)


@pytest.mark.parametrize("bad", [(1, 1, 0), (2, 2, 0, 0), (3, 0, 0), (), (2, 0, 1), (0, 2, 1)])
def test_invalid_strings(bad):
    with pytest.raises(StrategyError, match="^s:"):
        validate_ternary(bad)


def test_expand_rejects_short_K():
    with pytest.raises(StrategyError, match="^K:"):
        expand_ternary((1, 2, 1, 0), 3)


def test_counts_examples():
    assert counts_from_sets(MessageAssignment(2, [(1,), (2,)])) == (1, 1)
    assert counts_from_sets(MessageAssignment(3, [(1,), (1,), (2,)])) == (2, 1, 0)


def four_forms(max_len=6):
    yield (1,)
    for n in range(2, max_len + 1):
        for y in range(1, n):
            s = [1] * n
            s[y - 1] = 2
            s[-1] = 0
            yield tuple(s)


def test_four_forms_cover_s2_s3_s4():
    forms = set(four_forms(5))
    assert (2, 1, 1, 0) in forms        # S(2)
    assert (1, 1, 2, 0) in forms        # S(3)
    assert (1, 2, 1, 1, 0) in forms     # S(4)
    assert (1,) in forms                # S(1)


@pytest.mark.parametrize("S", list(four_forms(6)))
def test_lemma1_round_trip(S):
    for K in range(len(S), 31):
        a = expand_ternary(S, K)
        counts = counts_from_sets(a)
        assert counts == ternary_counts(S, K)
        n = len(S)
        assert counts[: n * (K // n)] == S * (K // n)
        assert reconstruct_from_counts(counts) == a.transmit_sets


def _independent_m1_assignments(K):
    """M=1 sets with T_i in {i-1, i} and no transmitter used twice except a
    doubly loaded transmitter followed by shifted messages."""
    for choice in itertools.product((0, -1), repeat=K):
        T = [(i + 1 + o,) for i, o in enumerate(choice)]
        if T[0] == (0,):
            continue
        yield MessageAssignment(K, T)


def test_reconstruct_inverts_counts_when_decodable():
    # any M=1 assignment whose counts are reconstructible round-trips
    for K in range(1, 8):
        for a in _independent_m1_assignments(K):
            try:
                back = reconstruct_from_counts(counts_from_sets(a))
            except StrategyError:
                continue
            assert counts_from_sets(MessageAssignment(K, back)) == counts_from_sets(a)


# --- cooperative assignments ----------------------------------------------

def test_theorem4_K5():
    assert theorem4_assignment(5).transmit_sets == sets([1, 2], [1, 2], [3, 4], [3, 4], [3, 4])


def test_theorem4_rules():
    a = theorem4_assignment(12)
    assert a.T(7) == (6, 7)        # 7 mod 5 = 2
    assert a.T(10) == (8, 9)       # 10 mod 5 = 0
    assert a.T(11) == (11, 12)


def test_theorem5():
    assert theorem5_assignment(3).transmit_sets == sets([1], [1, 2], [2, 3])
    assert theorem5_assignment(1).transmit_sets == sets([1])
    a = theorem5_assignment(20)
    assert all(len(a.T(i)) == 2 for i in range(2, 21))


@pytest.mark.parametrize("K", range(2, 15))
def test_cooperation_order(K):
    assert theorem4_assignment(K).M == 2
    assert theorem5_assignment(K).M == 2


def test_fraction_zero():
    K = 12
    a = fraction_assignment(0, K)
    for i in range(2, K):
        assert a.T(i) == (i - 1, i)
    assert a.T(K) == (K - 2, K - 1)
    assert a.T(1) == (1,)


def _forward(a):
    return sum(1 for i in range(1, a.K + 1) if a.T(i) == (i, i + 1))


def test_fraction_one_saturates():
    a = fraction_assignment(1, 10)
    # every message except the fixed last one is sent forward
    assert _forward(a) == 9


def test_fraction_three_fifths():
    a = fraction_assignment(Fraction(3, 5), 100)
    assert abs(Fraction(_forward(a), 100) - Fraction(3, 5)) <= Fraction(1, 100)


def _formula_reference(f, K):
    """Independent evaluation of the piecewise rule, first match wins."""
    import math

    fk = f * K
    top = min(math.floor(fk - 2), math.floor(Fraction(K, 2) - 1))
    spaced = []
    if top >= 1:
        step = max(2, math.floor(Fraction(K) / (fk - 1)))
        spaced = [1 + n * step for n in range(1, top + 1)]
    paired = [2 * n for n in range(1, math.ceil((f - Fraction(1, 2)) * K))]
    out = []
    for i in range(1, K + 1):
        if i == 1:
            T = (1, 2) if fk > 1 else (0, 1)
        elif i == K:
            T = (K - 2, K - 1)
        elif i in spaced or i in paired:
            T = (i, i + 1)
        else:
            T = (i - 1, i)
        out.append(tuple(t for t in T if 1 <= t <= K))
    return tuple(out)


@pytest.mark.parametrize("K", [10, 37, 100])
def test_fraction_matches_reference(K):
    for k in range(0, 101, 3):
        f = Fraction(k, 100)
        assert fraction_assignment(f, K).transmit_sets == _formula_reference(f, K), (f, K)


def test_fraction_rejects():
    with pytest.raises(StrategyError, match="^f:"):
        fraction_assignment(Fraction(3, 2), 10)
    with pytest.raises(StrategyError, match="^K:"):
        fraction_assignment(Fraction(1, 2), 2)


def test_fraction_float_is_exact():
    assert fraction_assignment(0.49, 100) == fraction_assignment(Fraction(49, 100), 100)


# --- validation ------------------------------------------------------------

def test_assignment_validation():
    with pytest.raises(StrategyError, match="^sets:"):
        MessageAssignment(2, [(1,)])
    with pytest.raises(StrategyError, match="^sets:"):
        MessageAssignment(2, [(1,), (3,)])
    with pytest.raises(StrategyError, match="^sets:"):
        MessageAssignment(2, [(1,), ()]).require_nonempty()


def test_window_masks():
    m = theorem5_assignment(3).window_masks()
    assert m.tolist() == [
        [False, False, True, False],
        [False, True, True, False],
        [False, True, True, False],
    ]
    with pytest.raises(UnsupportedCooperationError):
        MessageAssignment(4, [(1,), (2,), (3,), (1,)]).window_masks()


# --- topology reduction ----------------------------------------------------

def test_reduce_no_erasure_is_identity():
    for a in (theorem4_assignment(10), theorem5_assignment(10), fraction_assignment(Fraction(1, 2), 10)):
        r = realization(10, NetworkTopology(10).links())
        assert topology_reduce(a, r) == a


def test_reduce_removes_disabled_user():
    a = MessageAssignment(4, [(1,), (1, 2), (2, 3), (3, 4)])
    links = [l for l in NetworkTopology(4).links() if l not in ((3, 2), (3, 3))]
    red = topology_reduce(a, realization(4, links))
    assert red.T(3) == ()
    assert 3 not in enabled_users(a, realization(4, links))


def _reference_reduce(a, r):
    """Defs. of enabled messages and the graph G_i, via union-find."""
    K = a.K
    en = {i for i in range(1, K + 1) if any(connected(r, i, t) for t in a.T(i))}
    out = []
    for i in range(1, K + 1):
        T = list(a.T(i))
        if i not in en:
            out.append(())
            continue
        parent = {t: t for t in T}

        def find(x):
            while parent[x] != x:
                x = parent[x]
            return x

        for x, y in itertools.combinations(T, 2):
            for rx in range(1, K + 1):
                if rx in en and connected(r, rx, x) and connected(r, rx, y):
                    parent[find(x)] = find(y)
        marked = {find(t) for t in T if t in (i - 1, i) and connected(r, i, t)}
        out.append(tuple(sorted(t for t in T if find(t) in marked)))
    return tuple(out)


def test_reduce_small_example_exhaustive():
    # T_3 = {2, 3}; enumerate the four links around users 3 and 4
    K = 4
    a = MessageAssignment(K, [(1,), (1, 2), (2, 3), (3, 4)])
    base = [(1, 1), (2, 1), (2, 2), (4, 4)]
    for bits in itertools.product((False, True), repeat=4):
        extra = [l for l, b in zip([(3, 2), (3, 3), (4, 3), (2, 2)], bits) if b]
        r = realization(K, list(set(base[:2] + [(4, 4)] + extra)))
        assert topology_reduce(a, r).transmit_sets == _reference_reduce(a, r)


def test_reduce_matches_reference_random(rng):
    for n in range(400):
        K = int(rng.integers(2, 12))
        a = random_pair_assignment(rng, K, singles=True)
        r = sample_realization(NetworkTopology(K, bool(n % 2)), float(rng.choice([0.1, 0.3, 0.5])), n)
        assert topology_reduce(a, r).transmit_sets == _reference_reduce(a, r)


def test_reduce_idempotent_and_lossless(rng):
    for n in range(300):
        K = int(rng.integers(2, 13))
        a = random_pair_assignment(rng, K)
        r = sample_realization(NetworkTopology(K, True), float(rng.choice([0.1, 0.3, 0.5])), n)
        once = topology_reduce(a, r)
        assert topology_reduce(once, r) == once
        assert zf_dof(r, once) == zf_dof(r, a)


# --- strategy JSON ---------------------------------------------------------

@pytest.mark.parametrize("text,kind", [
    ('{"type":"ternary","s":[2,1,0]}', "ternary"),
    ('{"type":"theorem4"}', "theorem4"),
    ('{"type":"theorem5"}', "theorem5"),
    ('{"type":"fraction","f":0.5}', "fraction"),
    ('{"type":"explicit","sets":[[1],[1,2],[2,3]]}', "explicit"),
])
def test_parse_strategy(text, kind):
    s = parse_strategy(text)
    assert s.kind == kind
    assert parse_strategy(json.dumps(s.to_json())) == s


@pytest.mark.parametrize("text,field", [
    ('{"type":"ternary","s":[2,1,3]}', "s"),
    ('{"type":"ternary"}', "s"),
    ('{"type":"fraction","f":"abc"}', "f"),
    ('{"type":"fraction","f":2}', "f"),
    ('{"type":"explicit","sets":[[]]}', "sets"),
    ('{"type":"magic"}', "type"),
    ('{"type":', "strategy"),
    ('[1,2]', "strategy"),
])
def test_parse_errors_name_field(text, field):
    with pytest.raises(StrategyError, match=f"^{field}:"):
        parse_strategy(text)


def test_explicit_strategy_K_mismatch():
    s = parse_strategy('{"type":"explicit","sets":[[1],[1,2]]}')
    with pytest.raises(StrategyError, match="^sets:"):
        s.assignment(3)


@given(st.fractions(min_value=0, max_value=1, max_denominator=200), st.integers(3, 120))
def test_fraction_family_well_formed(f, K):
    a = fraction_assignment(f, K)
    for i in range(1, K + 1):
        T = a.T(i)
        assert T and len(T) <= 2
        assert all(t - i in (-2, -1, 0, 1) for t in T)


def test_fraction_hand_trace_K10_half():
    # fK=5: spaced n<=min(3,4)=3 with step max(2, floor(10/4))=2 -> i in {3,5,7};
    # paired bound ceil(0)-1 < 1 -> none
    a = fraction_assignment(Fraction(1, 2), 10)
    assert a.transmit_sets == sets(
        [1, 2], [1, 2], [3, 4], [3, 4], [5, 6], [5, 6], [7, 8], [7, 8], [8, 9], [8, 9]
    )
