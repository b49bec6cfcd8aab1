import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hyperabc.formula import (FALSE, TRUE, AlphabetMismatch, And, Atom, Eventually, FormulaScopeError,
                              FormulaSyntaxError, Globally, Implies, Next, Not, Or, Release, Until,
                              classify, classify_prefix, eval_on_lasso_traces, eval_on_lasso_word, is_nnf,
                              negate_to_nnf, nnf, parse_body, parse_hyperltl, to_basis, to_text)

OPACITY = "forall p1. exists p2. (a1[p1] -> (a2[p2] & G(a3[p1,p2])))"
ROBUST = "forall p1. forall p2. (a3[p1] & a4[p2]) -> G(a1[p1] & a1[p2])"

a1, a2 = Atom("a1", ("p1",)), Atom("a2", ("p2",))
a3 = Atom("a3", ("p1", "p2"))


def random_word(rng, letters, max_len=6):
    n = rng.randint(1, max_len)
    k = rng.randint(0, n - 1)
    word = [frozenset(a for a in letters if rng.random() < 0.5) for _ in range(n)]
    return word[:k], word[k:]


# -- parsing ------------------------------------------------------------------

def test_parse_opacity():
    f = parse_hyperltl(OPACITY, {"a1": 1, "a2": 1, "a3": 2})
    assert [(q.kind, q.trace) for q in f.prefix] == [("forall", "p1"), ("exists", "p2")]
    assert f.body == Implies(a1, And(a2, Globally(a3)))


def test_parse_robustness():
    f = parse_hyperltl(ROBUST, {"a1": 1, "a3": 1, "a4": 1})
    assert [q.kind for q in f.prefix] == ["forall", "forall"]
    lhs = And(Atom("a3", ("p1",)), Atom("a4", ("p2",)))
    rhs = Globally(And(Atom("a1", ("p1",)), Atom("a1", ("p2",))))
    assert f.body == Implies(lhs, rhs)


def test_parse_trivial():
    f = parse_hyperltl("forall p. true")
    assert f.body == TRUE
    assert classify(f).kind == "all-universal"


def test_precedence():
    assert parse_body("a[p] U b[p] & c[p]") == And(Until(Atom("a", ("p",)), Atom("b", ("p",))), Atom("c", ("p",)))
    assert parse_body("a[p] -> b[p] -> c[p]") == Implies(Atom("a", ("p",)), Implies(Atom("b", ("p",)), Atom("c", ("p",))))
    assert parse_body("!X a[p]") == Not(Next(Atom("a", ("p",))))


@pytest.mark.parametrize("src, error", [
    ("forall p. a[p] &", FormulaSyntaxError),
    ("forall p. a[q]", FormulaScopeError),
    ("forall p. forall p. a[p]", FormulaScopeError),
    ("forall p. a[p] & exists q. b[q]", FormulaSyntaxError),
    ("forall p. a", FormulaSyntaxError),
    ("forall p. a[p] $ b[p]", FormulaSyntaxError),
])
def test_parse_errors(src, error):
    with pytest.raises(error):
        parse_hyperltl(src)


def test_arity_mismatch_and_undeclared():
    with pytest.raises(FormulaScopeError, match="takes 2"):
        parse_hyperltl("forall p1. forall p2. a3[p1]", {"a3": 2})
    with pytest.raises(FormulaScopeError, match="undeclared"):
        parse_hyperltl("forall p. b[p]", {"a": 1})


# -- negation normal form -----------------------------------------------------

def test_negate_globally():
    a = Atom("a", ("p",))
    assert negate_to_nnf(Globally(a)) == Eventually(Not(a))


def test_negate_double_negation():
    a = Atom("a", ("p",))
    assert nnf(Not(Not(a))) == a


def test_negate_opacity_body():
    body = parse_hyperltl(OPACITY).body
    neg = negate_to_nnf(body)
    assert is_nnf(neg)
    expected = And(a1, Or(Not(a2), Eventually(Not(a3))))
    rng = random.Random(11)
    for _ in range(300):
        stem, cycle = random_word(rng, [a1, a2, a3])
        got = eval_on_lasso_word(neg, stem, cycle)
        assert got == eval_on_lasso_word(expected, stem, cycle)
        assert got == (not eval_on_lasso_word(body, stem, cycle))


# -- classification -----------------------------------------------------------

def test_classify_examples():
    fe = classify_prefix(["forall", "exists"])
    assert fe.kind == "forall-exists" and fe.universal == 1 and fe.is_forall_exists
    aa = classify_prefix(["forall", "forall"])
    assert aa.kind == "all-universal" and aa.universal == 2 and aa.is_forall_exists
    g = classify_prefix(["exists", "forall", "exists"])
    assert g.kind == "general" and g.alternations == 2 and not g.is_forall_exists


@given(st.lists(st.sampled_from(["forall", "exists"]), min_size=1, max_size=6))
def test_classify_is_prefix_shape(kinds):
    fc = classify_prefix(kinds)
    first_exists = kinds.index("exists") if "exists" in kinds else len(kinds)
    shape_ok = all(k == "exists" for k in kinds[first_exists:])
    assert fc.is_forall_exists == shape_ok
    assert (fc.universal == len(kinds)) == all(k == "forall" for k in kinds)
    assert (fc.kind == "all-universal") == all(k == "forall" for k in kinds)


# -- lasso semantics ----------------------------------------------------------

def test_eval_globally_and_until():
    a, b = Atom("a", ("p",)), Atom("b", ("p",))
    assert eval_on_lasso_word(Globally(a), [], [{a}])
    assert not eval_on_lasso_word(Globally(a), [{a}], [set()])
    assert eval_on_lasso_word(Until(a, b), [{a}], [{b}])
    assert not eval_on_lasso_word(Until(a, b), [], [{a}])
    assert eval_on_lasso_word(Release(a, b), [], [{b}])


def test_eval_traces_zip_with_different_periods():
    f = parse_hyperltl("forall p. forall q. G F (a[p] & a[q])")
    traces = {"p": ([], [{"a"}, set()]), "q": ([set()], [{"a"}, {"a"}, set()])}
    # period lcm(2, 3) = 6 after a stem of one letter; a holds on both at some cycle positions
    assert eval_on_lasso_traces(f.body, traces) is True
    g = parse_hyperltl("forall p. forall q. G (a[p] -> X !a[q])")
    assert eval_on_lasso_traces(g.body, traces) is False


def test_eval_traces_alphabet_errors():
    f = parse_hyperltl("forall p. forall q. a[p,q]")
    with pytest.raises(AlphabetMismatch):
        eval_on_lasso_traces(f.body, {"p": ([], [set()]), "q": ([], [set()])})
    h = parse_hyperltl("forall p. forall q. a[q]")
    with pytest.raises(AlphabetMismatch):
        eval_on_lasso_traces(h.body, {"p": ([], [set()])})


# -- properties ---------------------------------------------------------------

ATOMS = [Atom("a", ("p",)), Atom("b", ("p",)), Atom("c", ("q",))]
UNARY = [Not, Next, Globally, Eventually]
BINARY = [And, Or, Implies, Until, Release]


def bodies(depth):
    leaves = st.sampled_from(ATOMS + [TRUE, FALSE])
    if depth == 0:
        return leaves
    sub = bodies(depth - 1)
    return st.one_of(
        leaves,
        st.builds(lambda op, x: op(x), st.sampled_from(UNARY), sub),
        st.builds(lambda op, x, y: op(x, y), st.sampled_from(BINARY), sub, sub),
    )


letters = st.frozensets(st.sampled_from(ATOMS))
words = st.tuples(st.lists(letters, max_size=3), st.lists(letters, min_size=1, max_size=3))


@settings(max_examples=150, deadline=None)
@given(bodies(3), words)
def test_nnf_involution(body, word):
    stem, cycle = word
    twice = nnf(Not(nnf(Not(body))))
    assert is_nnf(twice)
    assert eval_on_lasso_word(twice, stem, cycle) == eval_on_lasso_word(nnf(body), stem, cycle)
    assert eval_on_lasso_word(negate_to_nnf(body), stem, cycle) != eval_on_lasso_word(body, stem, cycle)


@settings(max_examples=150, deadline=None)
@given(bodies(3), words)
def test_basis_rewrite_preserves_semantics(body, word):
    stem, cycle = word
    assert eval_on_lasso_word(to_basis(body), stem, cycle) == eval_on_lasso_word(body, stem, cycle)


@settings(max_examples=150, deadline=None)
@given(bodies(3), st.lists(st.sampled_from(["forall", "exists"]), min_size=2, max_size=2))
def test_serialize_reparse(body, kinds):
    prefix = " ".join(f"{k} {t}." for k, t in zip(kinds, ["p", "q"]))
    f = parse_hyperltl(f"{prefix} {to_text(body)}")
    assert f.body == body
    assert parse_hyperltl(str(f)) == f
