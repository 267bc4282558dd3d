import math
import random

import pytest

from mtlmon import Predicate, PredicateError, StateSample, emax, emin, parse_predicates, signed_distance

INF = math.inf


def test_emax_empty_is_neg_inf():
    assert emax([]) == -INF


def test_emin_empty_is_pos_inf():
    assert emin([]) == INF


def test_inf_is_identity_of_min():
    assert emin([INF, 2.0]) == 2.0


def test_neg_inf_is_identity_of_max():
    assert emax([-INF, -3.0, 1.0]) == 1.0


def test_extended_negation_is_total():
    assert -INF == -math.inf
    assert -(-INF) == INF


def sample(**values):
    return StateSample(values, 0.0)


def test_between_inside():
    p = Predicate("p", "x", lo=0.0, hi=5.0)
    assert signed_distance(sample(x=3.0), p) == 2.0


def test_between_outside():
    p = Predicate("p", "x", lo=0.0, hi=5.0)
    assert signed_distance(sample(x=7.0), p) == -2.0


def test_between_boundary():
    p = Predicate("p", "x", lo=0.0, hi=5.0)
    assert signed_distance(sample(x=5.0), p) == 0.0


def test_at_most_and_at_least():
    assert signed_distance(sample(x=3.0), Predicate("p", "x", hi=10.0)) == 7.0
    assert signed_distance(sample(x=3.0), Predicate("p", "x", lo=10.0)) == -7.0


def test_gain_scales_distance():
    p = Predicate("p", "x", lo=0.0, hi=5.0, gain=2.0)
    assert signed_distance(sample(x=3.0), p) == 4.0


def test_unknown_variable():
    p = Predicate("p", "y", lo=0.0)
    with pytest.raises(KeyError, match="unknown variable"):
        signed_distance(sample(x=1.0), p)


def test_predicate_rejects_empty_set():
    with pytest.raises(PredicateError, match="empty set"):
        Predicate("p", "x", lo=2.0, hi=1.0)


def test_predicate_rejects_unbounded_both_sides():
    with pytest.raises(PredicateError, match="bounded"):
        Predicate("p", "x")


def test_predicate_rejects_bad_gain():
    with pytest.raises(PredicateError, match="gain"):
        Predicate("p", "x", lo=0.0, gain=0.0)


def test_sign_matches_membership():
    rng = random.Random(5)
    for _ in range(300):
        lo = rng.uniform(-5, 5)
        p = Predicate("p", "x", lo=lo, hi=lo + rng.uniform(0, 4))
        x = rng.uniform(-10, 10)
        d = signed_distance(sample(x=x), p)
        if p.lo <= x <= p.hi:
            assert d >= 0
        else:
            assert d < 0
        if x in (p.lo, p.hi):
            assert d == 0


def test_distance_is_lipschitz():
    rng = random.Random(6)
    forms = [
        Predicate("p", "x", lo=-1.0),
        Predicate("p", "x", hi=2.5),
        Predicate("p", "x", lo=-1.0, hi=2.5),
    ]
    for _ in range(300):
        p = rng.choice(forms)
        x, y = rng.uniform(-20, 20), rng.uniform(-20, 20)
        dx = signed_distance(sample(x=x), p)
        dy = signed_distance(sample(x=y), p)
        assert abs(dx - dy) <= abs(x - y) + 1e-12


PRED_TEXT = """
# engine predicates
ok  : 0.9 <= lam <= 1.1
low : speed <= 120
hot : temp >= 90.5   # inline comment
"""


def test_parse_predicates():
    preds = parse_predicates(PRED_TEXT)
    assert set(preds) == {"ok", "low", "hot"}
    assert preds["ok"].variable == "lam"
    assert (preds["ok"].lo, preds["ok"].hi) == (0.9, 1.1)
    assert preds["low"].hi == 120.0 and preds["low"].lo == -INF
    assert preds["hot"].lo == 90.5 and preds["hot"].hi == INF


def test_parse_predicates_duplicate():
    with pytest.raises(PredicateError, match="duplicate"):
        parse_predicates("a : x <= 1\na : x >= 0\n")


def test_parse_predicates_bad_line():
    with pytest.raises(PredicateError, match="line 1"):
        parse_predicates("a = x <= 1")
    with pytest.raises(PredicateError, match="cannot parse"):
        parse_predicates("a : x < 1")
