import json

import pytest
from hypothesis import given, settings
from strategies import sentences

from archlogic.corpora import existential_corpus
from archlogic.logic import (
    TOP, And, App, Eq, Exists, Iff, Implies, L_O, L_RING, L_VAL, Not, Or, Top, Bot, Var,
    parse_sentence, print_canonical,
)
from archlogic.models import (
    INF, FiniteStructure, NotAField, SignatureMismatch, evaluate, evaluate_term, exists_n_inclusion,
    finite_ring, galois_field, generated_substructure, is_field, onesorted_view, poly_quotient,
    prime_field, primes_up_to, residue_field, ring_axiom_violations, structure_from_json,
    structure_to_json, trivially_valued, zmod,
)

SQRT2 = parse_sentence("(exists (x K) (= (*.K x x) (+.K 1.K 1.K)))", L_RING)


# A second evaluator for ring sentences over Z/n, written without the
# compiled closures, used as an independent reference.

def _ref_term(t, env, n):
    if isinstance(t, Var):
        return env[t.name]
    if t.fn == "0.K":
        return 0
    if t.fn == "1.K":
        return 1 % n
    a, b = (_ref_term(x, env, n) for x in t.args)
    return {"+.K": a + b, "-.K": a - b, "*.K": a * b}[t.fn] % n


def _ref_truth(f, env, n):
    if isinstance(f, Top):
        return True
    if isinstance(f, Bot):
        return False
    if isinstance(f, Eq):
        return _ref_term(f.left, env, n) == _ref_term(f.right, env, n)
    if isinstance(f, Not):
        return not _ref_truth(f.arg, env, n)
    if isinstance(f, And):
        return _ref_truth(f.left, env, n) and _ref_truth(f.right, env, n)
    if isinstance(f, Or):
        return _ref_truth(f.left, env, n) or _ref_truth(f.right, env, n)
    if isinstance(f, Implies):
        return not _ref_truth(f.left, env, n) or _ref_truth(f.right, env, n)
    if isinstance(f, Iff):
        return _ref_truth(f.left, env, n) == _ref_truth(f.right, env, n)
    values = (_ref_truth(f.body, {**env, f.var: a}, n) for a in range(n))
    return any(values) if isinstance(f, Exists) else all(values)


def test_quadratic_residue_examples():
    assert evaluate(prime_field(7), SQRT2)
    assert not evaluate(prime_field(3), SQRT2)
    for M in (prime_field(5), zmod(6), galois_field(4), trivially_valued(prime_field(3))):
        assert evaluate(M, TOP)


@settings(max_examples=300, deadline=None)
@given(sentences(L_RING, depth=4, quantifiers=3))
def test_evaluate_matches_reference(s):
    for n in (2, 3, 4, 5, 6):
        assert evaluate(zmod(n), s) == _ref_truth(s, {}, n), (n, print_canonical(s))


def test_prime_field_agrees_with_zmod():
    corpus = existential_corpus(seed=5, count=150, n=2)
    for p in (2, 3, 5, 7):
        for s in corpus:
            assert evaluate(prime_field(p), s) == evaluate(zmod(p), s)


def test_signature_mismatch():
    with pytest.raises(SignatureMismatch):
        evaluate(prime_field(5), parse_sentence("(= (v 1.K) 0.G)", L_VAL))


def test_trivial_valuation_tables():
    W = trivially_valued(prime_field(5))
    assert evaluate_term(W, App("v", (App("+.K", (App("1.K"), App("+.K", (App("1.K"), App("1.K"))))),))) == 0
    assert evaluate_term(W, App("v", (App("0.K"),))) is INF
    three = App("+.K", (App("1.K"), App("+.K", (App("1.K"), App("1.K")))))
    assert evaluate_term(W, App("res", (three,))) == 3
    nontrivial = parse_sentence("(exists (x K) (and (<.G 0.G (v x)) (not (= x 0.K))))", L_VAL)
    assert not evaluate(W, nontrivial)
    assert residue_field(W).carriers["K"] == prime_field(5).carriers["K"]


def test_residue_field_is_the_field():
    F = galois_field(4)
    W = trivially_valued(F)
    R = residue_field(W)
    for s in existential_corpus(seed=9, count=100, n=2):
        assert evaluate(R, s) == evaluate(F, s)


def test_trivially_valued_needs_field():
    with pytest.raises(NotAField):
        trivially_valued(zmod(4))
    with pytest.raises(NotAField):
        trivially_valued(poly_quotient(2, [0, 0, 1]))


def test_onesorted_view_valuation_ring_is_everything():
    O = onesorted_view(trivially_valued(prime_field(3)))
    assert evaluate(O, parse_sentence("(forall (x K) (O x))", L_O))


def test_field_detection():
    assert [q for q in range(2, 17) if _is_prime_power(q) and is_field(galois_field(q))] == \
        [2, 3, 4, 5, 7, 8, 9, 11, 13, 16]
    assert not is_field(zmod(6))
    assert not is_field(poly_quotient(2, [0, 0, 1]))
    assert primes_up_to(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def _is_prime_power(q):
    for p in range(2, q + 1):
        if q % p == 0:
            while q % p == 0:
                q //= p
            return q == 1
    return False


def test_galois_field_axioms():
    for q in (4, 8, 9):
        F = galois_field(q)
        assert ring_axiom_violations(F) == []
        assert len(F.carriers["K"]) == q


def test_broken_ring_rejected():
    with pytest.raises(ValueError):
        finite_ring(range(3), lambda a, b: (a + b) % 3, lambda a, b: (a + b) % 3, 0, 1, "bad")


def test_json_round_trip(tmp_path):
    for M in (zmod(4), trivially_valued(prime_field(3))):
        data = structure_to_json(M)
        text = json.dumps(data)
        back = structure_from_json(text)
        assert structure_to_json(back) == data
        for s in existential_corpus(seed=1, count=50, n=1):
            if M.signature is L_RING:
                assert evaluate(back, s) == evaluate(M, s)


def test_structure_requires_every_symbol():
    with pytest.raises(Exception):
        FiniteStructure(L_RING, {"K": (0, 1)}, {}, {}, {"0.K": 0, "1.K": 1})


# --------------------------------------------------------------------------
# ∃_n-inclusion

RINGS = {
    "F2": prime_field(2), "F3": prime_field(3), "F4": galois_field(4), "F5": prime_field(5),
    "Z4": zmod(4), "Z6": zmod(6), "F2[x]/(x^2)": poly_quotient(2, [0, 0, 1]),
}


def test_inclusion_reflexive():
    for M in RINGS.values():
        assert exists_n_inclusion(M, M, 1)


def test_prime_subfield_embeds():
    assert exists_n_inclusion(prime_field(2), galois_field(4), 1).holds


def test_z4_not_in_f2():
    res = exists_n_inclusion(zmod(4), prime_field(2), 1)
    assert not res.holds
    assert evaluate(zmod(4), res.witness) and not evaluate(prime_field(2), res.witness)
    # the nilpotent 2 separates the two rings as well
    hand = parse_sentence("(exists (x K) (and (= (*.K x x) 0.K) (not (= x 0.K))))", L_RING)
    assert evaluate(zmod(4), hand) and not evaluate(prime_field(2), hand)


def test_generated_substructure_of_nilpotent():
    M = poly_quotient(2, [0, 0, 1])
    sub = generated_substructure(M, (), "K")
    assert sorted(sub.elements["K"]) == [0, 1]
    assert len(generated_substructure(M, (2,), "K").elements["K"]) == 4


def test_witness_is_existential_of_budget_n():
    from archlogic.fragments import classify
    for a in RINGS.values():
        for b in RINGS.values():
            for n in (1, 2):
                res = exists_n_inclusion(a, b, n)
                if not res.holds:
                    m = classify(res.witness)
                    assert m.exists and m.e <= n
                    assert evaluate(a, res.witness) and not evaluate(b, res.witness)


def test_monotone_in_n():
    for a in RINGS.values():
        for b in RINGS.values():
            if exists_n_inclusion(a, b, 2).holds:
                assert exists_n_inclusion(a, b, 1).holds
                assert exists_n_inclusion(a, b, 0).holds


def test_mismatched_signatures():
    with pytest.raises(SignatureMismatch):
        exists_n_inclusion(prime_field(2), trivially_valued(prime_field(2)), 1)
