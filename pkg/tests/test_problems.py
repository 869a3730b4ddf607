import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ossnls.problems import (
    BudgetExhausted,
    EvalCounter,
    EvaluationFailure,
    Problem,
    corpus,
    evaluate_c,
    evaluate_r,
    get_problem,
    make_degenerate,
    problem_names,
)


def test_rosenbrock_zero_residual_at_minimizer():
    ctr = EvalCounter()
    assert np.array_equal(evaluate_r(get_problem("rosenbrock"), np.ones(2), ctr), [0.0, 0.0])


def test_hs6_residual_at_start():
    prob = get_problem("hs6")
    ctr = EvalCounter()
    assert evaluate_r(prob, prob.x0, ctr) == pytest.approx([2.2], abs=1e-15)


def test_counters_increment_by_one_per_call():
    prob = get_problem("hs28")
    ctr = EvalCounter()
    evaluate_r(prob, prob.x0, ctr)
    evaluate_r(prob, prob.x0, ctr)
    evaluate_c(prob, prob.x0, ctr)
    assert (ctr.r_calls, ctr.c_calls, ctr.total) == (2, 1, 3)


def test_unconstrained_c_is_empty_but_counted():
    prob = get_problem("rosenbrock")
    ctr = EvalCounter()
    out = evaluate_c(prob, prob.x0, ctr)
    assert out.shape == (0,) and ctr.c_calls == 1


def test_nonfinite_value_signals_failure():
    prob = Problem("bad", 1, 1, 0, [0.0], lambda x: np.array([np.nan]), lambda x: np.zeros(0))
    with pytest.raises(EvaluationFailure):
        evaluate_r(prob, prob.x0, EvalCounter())


def test_wrong_length_input_rejected():
    prob = get_problem("hs6")
    with pytest.raises(ValueError):
        evaluate_r(prob, np.zeros(3), EvalCounter())


def test_budget_raises_before_exceeding_limit():
    prob = get_problem("hs6")
    ctr = EvalCounter(limit=2)
    evaluate_r(prob, prob.x0, ctr)
    evaluate_c(prob, prob.x0, ctr)
    with pytest.raises(BudgetExhausted):
        evaluate_r(prob, prob.x0, ctr)
    assert ctr.total == 2


def test_degenerate_transform_values():
    prob = get_problem("hs6")
    deg = make_degenerate(prob)
    x = np.array([0.5, 2.0])
    c = prob.c_eval(x)
    assert deg.m == 2 * prob.m and deg.name == "hs6-degenerate"
    assert np.array_equal(deg.c_eval(x), np.concatenate([c, c * c]))
    assert np.array_equal(deg.x0, prob.x0)


def test_degenerate_requires_constraints():
    with pytest.raises(ValueError):
        make_degenerate(get_problem("beale"))


def test_degenerate_entries_only_from_transform():
    for e in corpus():
        assert (e.family == "degenerate") == e.problem.name.endswith("-degenerate")


@pytest.mark.parametrize("name", problem_names())
def test_corpus_self_consistency(name):
    prob = get_problem(name)
    ctr = EvalCounter()
    assert evaluate_r(prob, prob.x0, ctr).shape == (prob.p,)
    assert evaluate_c(prob, prob.x0, ctr).shape == (prob.m,)
    if prob.x_opt is not None:
        if prob.m:
            assert np.max(np.abs(prob.c_eval(prob.x_opt))) <= 1e-8
        assert prob.objective(prob.x_opt) == pytest.approx(prob.f_opt, abs=1e-12)


def test_known_optima_are_local_minima_of_the_constrained_problem():
    # independent route: SLSQP with its own finite differences
    from scipy.optimize import minimize

    for name in problem_names("constrained"):
        prob = get_problem(name)
        res = minimize(prob.objective, prob.x_opt + 1e-3, method="SLSQP",
                       constraints={"type": "eq", "fun": prob.c_eval},
                       options={"ftol": 1e-14, "maxiter": 500})
        assert res.fun == pytest.approx(prob.f_opt, abs=1e-7), name


def test_unknown_problem():
    with pytest.raises(KeyError):
        get_problem("hs999")


@settings(max_examples=50, deadline=None)
@given(st.lists(st.floats(-5, 5), min_size=3, max_size=3))
def test_degenerate_feasible_set_unchanged(x):
    x = np.asarray(x)
    prob = get_problem("hs28")
    deg = make_degenerate(prob)
    c, cd = prob.c_eval(x), deg.c_eval(x)
    assert np.array_equal(cd[:1], c) and cd[1] == c[0] ** 2
    # squared copies vanish exactly when the originals do
    assert (np.max(np.abs(cd)) == 0.0) == (np.max(np.abs(c)) == 0.0)
