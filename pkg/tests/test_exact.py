from fractions import Fraction

import pytest

from froglab import exact
from froglab.exact import (BudgetExceeded, EventSpec, chain_passage, delta2_passage_sum,
                           empirical_frequency, exact_prob, two_step_events, passage_prob, q_bound,
                           q_small, recursion_check, tau_shell_spec, truncated_instance)


@pytest.mark.parametrize("d", [2, 3])
def test_tau_shell_three_is_one_eighth(d):
    assert exact_prob(tau_shell_spec(d, 3)) == Fraction(1, 8)


def test_two_step_pieces_in_two_dimensions():
    p = {k: exact_prob(v) for k, v in two_step_events(2).items()}
    assert p == {"S": Fraction(3, 64), "T": Fraction(3, 64), "U": Fraction(1, 64)}
    assert sum(p.values()) == passage_prob(2, (2, 0))


@pytest.mark.parametrize("d", [2, 3])
def test_axis_part_closed_form(d):
    s = delta2_passage_sum(d)
    assert s.axis == Fraction(d * (4 * d - 1), (2 * d) ** 3)
    assert s.mixed <= Fraction(2 * d * (d - 1), (2 * d) ** 2)
    assert s.total <= Fraction(1, 2) - Fraction(1, 8 * d * d)


def test_delta2_sum_two_dimensions():
    s = delta2_passage_sum(2)
    assert s.axis == Fraction(7, 32)
    assert s.total < Fraction(1, 2) and s.total <= Fraction(15, 32)
    with pytest.raises(ValueError):
        delta2_passage_sum(1)


@pytest.mark.parametrize("d", [2, 3])
def test_q3_identity(d):
    q3 = q_small(3, d)
    assert 2 * q3 - Fraction(1, 2) == delta2_passage_sum(d).total
    assert 2 * q3 < 1


def test_q2_value_and_range():
    assert q_small(2, 2) == Fraction(1, 2)
    with pytest.raises(ValueError):
        q_small(4, 2)


def test_partition_sums_to_one():
    o = (0, 0)
    specs = [EventSpec(2, {o: 2}, (lambda k: lambda w: w[o][2] == k)(k))
             for k in [(a, b) for a in range(-2, 3) for b in range(-2, 3) if abs(a) + abs(b) in (0, 2)]]
    assert sum(exact_prob(s) for s in specs) == 1


def test_adding_constraints_never_increases():
    o = (0, 0)
    loose = EventSpec(2, {o: 3}, lambda w: w[o][1] == (1, 0))
    tight = EventSpec(2, {o: 3}, lambda w: w[o][1] == (1, 0) and w[o][3] == (2, 1))
    assert exact_prob(tight) <= exact_prob(loose) == Fraction(1, 4)


def test_pruning_does_not_change_the_value():
    d, y = 2, (2, 1)
    plain = exact.geodesic_passage_spec(d, y)
    pruned = exact.geodesic_passage_spec(d, y)
    pruned.prune = lambda w: (0, 0) not in w or w[(0, 0)][1] in ((1, 0), (0, 1))
    assert exact_prob(plain) == exact_prob(pruned)


def test_budget_refusal_reports_requirement():
    spec = EventSpec(2, {(0, 0): 20}, lambda w: True, budget=10**6)
    with pytest.raises(BudgetExceeded) as err:
        exact_prob(spec)
    assert err.value.required == 4**20


def test_chain_passage_uses_relays():
    walks = {(0, 0): ((0, 0), (1, 0)), (1, 0): ((1, 0), (1, 1))}
    assert chain_passage(walks, (0, 0), (1, 1)) == 2
    assert chain_passage(walks, (0, 0), (5, 5)) == float("inf")


def test_monte_carlo_agrees_with_exact():
    spec = exact.geodesic_passage_spec(2, (1, 1))
    p = float(exact_prob(spec))
    n = 20000
    freq = empirical_frequency(spec, n, seed=3)
    assert abs(freq - p) <= 4 * (p * (1 - p) / n) ** 0.5


@pytest.mark.parametrize("y", [(1, 1), (2, 0)])
def test_russo_identity_exact_on_tiny_instance(y):
    inst = truncated_instance(2, y, 2)
    for r in (Fraction(1, 3), Fraction(7, 10)):
        assert -inst.derivative(r) == sum(inst.influence(r).values())


def test_recursion_bound_and_check():
    assert q_bound(Fraction(15, 32), 2) == Fraction(225, 512)
    with pytest.raises(ValueError):
        q_bound(Fraction(1, 2), 0)
    with pytest.raises(ValueError):
        recursion_check(3, 0, 100)
    rep = recursion_check(3, 1, 4000, seed=2)
    assert abs(rep.estimate - float(rep.q_A)) <= 4 * rep.stderr
    assert rep.passed
    rep2 = recursion_check(3, 2, 4000, seed=5)
    assert rep2.passed and rep2.bound == Fraction(225, 512)
    with pytest.raises(exact.InfeasibleError):
        recursion_check(3, 2, 100, target_halfwidth=1e-4)
