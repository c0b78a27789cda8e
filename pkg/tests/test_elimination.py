import itertools
import json

import pytest
from hypothesis import given, strategies as st
import toy_reference as ref

from archlogic.elimination import (
    PROVED, REFUTED, UNKNOWN, BudgetExhausted, DovetailStream, Frontier, GroundProver,
    NormalFormStream, RefuterProver, TruthTableProver, enumerate_pairs, finite_model_refuter,
    pair_index, precedes, search_elimination, search_elimination_graded, toy_candidates,
)
from archlogic.fragments import classify, exists, fragment_stream
from archlogic.interpretations import residue_bridge, residue_interpret, residue_map, toy_bridge
from archlogic.logic import (
    BOT, TOP, Iff, L_RING, Not, Or, atom, parse_sentence, print_canonical,
)
from archlogic.models import evaluate, prime_field, trivially_valued

TB = toy_bridge(3)
SQRT2 = parse_sentence("(exists (x K) (= (*.K x x) (+.K 1.K 1.K)))", L_RING)


def toy_search(tb, text, battery=True, **kw):
    psi = parse_sentence(text, tb.sig2)
    return search_elimination(psi, tb.interpretation, toy_candidates(tb.bridge.c1.fragment),
                              tb.bridge.c2.theory, TruthTableProver(),
                              battery=tb.universe2 if battery else (), **kw)


# --------------------------------------------------------------------------
# pair order


def test_pair_examples():
    assert [enumerate_pairs(i) for i in range(6)] == [(0, 0), (1, 0), (0, 1), (2, 0), (1, 1), (0, 2)]
    with pytest.raises(ValueError):
        enumerate_pairs(-1)


def test_pair_order_strict_and_bijective():
    seen = set()
    prev = enumerate_pairs(0)
    for i in range(1, 10_001):
        cur = enumerate_pairs(i)
        assert precedes(prev, cur)
        assert pair_index(*cur) == i
        seen.add(cur)
        prev = cur
    assert len(seen) == 10_000


@given(st.integers(0, 10**6), st.integers(0, 10**6))
def test_pair_index_inverts(l, m):
    assert enumerate_pairs(pair_index(l, m)) == (l, m)


# --------------------------------------------------------------------------
# provers


def test_truth_table_prover():
    T = TB.bridge.c2.theory
    s1 = atom("s1")
    assert TruthTableProver().prove(T, Or(s1, Not(s1)), 1).status == PROVED
    assert TruthTableProver().prove(T, Or(s1, Not(s1)), 0).status == UNKNOWN
    out = TruthTableProver().prove(T, s1, 5)
    assert out.status == REFUTED and out.witness == "{}"


def test_ground_prover():
    psi = residue_interpret(SQRT2)
    T = residue_bridge().c2.theory
    assert GroundProver().prove(T, Iff(psi, psi), 10).status == PROVED
    assert GroundProver().prove(T, psi, 10).status == UNKNOWN
    eq = parse_sentence("(forall (x k) (= x x))", residue_bridge().c2.signature)
    assert GroundProver().prove(T, Or(eq, BOT), 10).status == UNKNOWN
    assert GroundProver().prove(T, Or(psi, Not(psi)), 0).status == UNKNOWN


def test_refuter_prover_never_proves():
    battery = [trivially_valued(prime_field(p)) for p in (2, 3, 7)]
    T = residue_bridge().c2.theory
    psi = residue_interpret(SQRT2)
    assert RefuterProver(battery).prove(T, psi, 10).status == REFUTED
    assert RefuterProver(battery).prove(T, Iff(psi, psi), 10).status == UNKNOWN


def test_finite_model_refuter_examples():
    psi = residue_interpret(SQRT2)
    F7 = [trivially_valued(prime_field(7))]
    assert finite_model_refuter(F7, psi, BOT).status == REFUTED
    assert finite_model_refuter(F7, psi, residue_interpret(SQRT2)).status == UNKNOWN
    assert finite_model_refuter([], psi, BOT).status == UNKNOWN


# --------------------------------------------------------------------------
# streams


def test_normal_form_stream_covers_every_function():
    nf = NormalFormStream(["r1", "r2", "r3"])
    assert len(nf) == 256
    tables = {tuple(ref.truth(nf[i], a) for a in ref.assignments(3)) for i in range(len(nf))}
    assert len(tables) == 256


def test_dovetail_interleaves():
    d = DovetailStream(list("abcdef"), list("XY"))
    assert [d[i] for i in range(8)] == list("aXbYcdef")


def test_toy_candidates_start():
    c = toy_candidates(TB.bridge.c1.fragment)
    assert [print_canonical(c[i]) for i in range(4)] == ["r1", "(false)", "r2", "(true)"]
    assert c[0] == fragment_stream(TB.bridge.c1.fragment)[0]


# --------------------------------------------------------------------------
# search


def test_golden_searches():
    cases = [("s1", "r1", 2), ("(true)", "(true)", 4), ("(or s1 s2)", "(or r1 r2)", 22)]
    for target, expected, pairs in cases:
        res = toy_search(TB, target)
        assert print_canonical(res.candidate) == expected
        assert res.pairs_visited == pairs


def _reference_walk(tb, psi, candidates, battery, limit=10_000):
    """An independent walk of the ≺ order: each diagonal visits the
    candidates still undecided, oldest first, then the new index."""
    width = tb.k
    rows = list(ref.assignments(width))

    def table(f):
        return tuple(ref.truth(f, a) for a in rows)

    target = table(tb.inverse(psi))
    sig_vec = lambda f: tuple(evaluate(M, f) for M in battery)
    psi_vec = sig_vec(psi)
    pending, visited = [], 0
    for d in itertools.count():
        nxt = []
        for m in pending + [d]:
            visited += 1
            assert visited <= limit
            phi = candidates[m]
            img = tb.interpretation(phi)
            if m == d and battery and sig_vec(img) != psi_vec:
                continue
            mentioned = {a for a in ref_atoms(Iff(psi, img))}
            if d - m < len(mentioned):
                nxt.append(m)
            elif table(phi) == target:
                return m, visited
        pending = nxt


def ref_atoms(f):
    text = print_canonical(f).replace("(", " ").replace(")", " ").split()
    return {w for w in text if w[0] == "s" and w[1:].isdigit()}


@pytest.mark.parametrize("battery", [True, False])
def test_search_matches_reference_walk(battery):
    for target in ("s1", "(not s3)", "(and s1 (not s2))", "(or s2 s3)", "(<-> s1 s3)"):
        psi = parse_sentence(target, TB.sig2)
        res = toy_search(TB, target, battery=battery)
        m, visited = _reference_walk(TB, psi, toy_candidates(TB.bridge.c1.fragment),
                                     TB.universe2 if battery else ())
        assert (res.index, res.pairs_visited) == (m, visited), target


def test_transcript_is_increasing():
    res = toy_search(TB, "(or s1 s2)", record=True)
    pairs = [s.pair for s in res.transcript]
    assert len(pairs) == res.pairs_visited
    assert all(precedes(a, b) for a, b in zip(pairs, pairs[1:]))
    assert res.transcript[-1].outcome == PROVED


def test_permuted_bridge_returns_the_preimage():
    tb = toy_bridge(3, (2, 3, 1))
    res = toy_search(tb, "(and s2 (not s1))")
    psi = parse_sentence("(and s2 (not s1))", tb.sig2)
    for M in tb.universe2:
        assert evaluate(tb.bridge.sigma(M), res.candidate) == evaluate(M, psi)


def test_budget_exhaustion_and_resume(tmp_path):
    full = toy_search(TB, "(or s1 s2)")
    with pytest.raises(BudgetExhausted) as exc:
        toy_search(TB, "(or s1 s2)", budget=9)
    frontier = exc.value.frontier
    assert frontier.pairs_visited == 9
    path = tmp_path / "frontier.json"
    path.write_text(json.dumps(frontier.to_json(), sort_keys=True))
    back = Frontier.from_json(path.read_text())
    assert back == frontier
    resumed = toy_search(TB, "(or s1 s2)", start=back)
    assert (resumed.candidate, resumed.pairs_visited) == (full.candidate, full.pairs_visited)


def test_resume_chain_of_small_budgets():
    full = toy_search(TB, "(not s3)")
    start = None
    for _ in range(100):
        try:
            res = toy_search(TB, "(not s3)", budget=(start.pairs_visited if start else 0) + 3, start=start)
            break
        except BudgetExhausted as e:
            start = e.frontier
    assert (res.candidate, res.pairs_visited) == (full.candidate, full.pairs_visited)


def test_search_is_deterministic():
    a = toy_search(TB, "(or (and s1 s2) (not s3))")
    b = toy_search(TB, "(or (and s1 s2) (not s3))")
    assert a == b


def test_fast_path_residue():
    B = residue_bridge()
    psi = residue_interpret(SQRT2)
    iota = residue_map(exists(L_RING))
    res = search_elimination(psi, iota, B.c1.fragment, B.c2.theory, GroundProver(), fast_path=True)
    assert res.candidate == SQRT2
    graded = search_elimination_graded(psi, iota, B.c1.fragment, B.c2.theory, GroundProver(),
                                       fast_path=True)
    assert graded.candidate == SQRT2 and classify(graded.candidate).e == 1


def test_fast_path_is_opt_in():
    B = residue_bridge()
    psi = residue_interpret(SQRT2)
    with pytest.raises(BudgetExhausted):
        search_elimination(psi, residue_map(exists(L_RING)), B.c1.fragment, B.c2.theory,
                           GroundProver(), budget=50)


def test_graded_toy():
    psi = parse_sentence("(or s1 s2)", TB.sig2)
    res = search_elimination_graded(psi, TB.interpretation, toy_candidates(TB.bridge.c1.fragment),
                                    TB.bridge.c2.theory, TruthTableProver(), battery=TB.universe2)
    assert print_canonical(res.candidate) == "(or r1 r2)"
    assert classify(res.candidate).e == 0


def test_top_maps_to_top():
    assert toy_search(TB, "(true)").candidate == TOP
