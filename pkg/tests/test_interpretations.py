import pytest
from hypothesis import given, settings
from strategies import sentences

from archlogic.corpora import literal_formulas, ring_corpus
from archlogic.fragments import classify, exists, literal
from archlogic.interpretations import (
    ArchDescriptor, BridgeDescriptor, constant_map, identity_bridge, identity_map, onesorted_map,
    residue_bridge, residue_interpret, residue_map, residue_preimage, toy_bridge,
    verify_bridge_axioms, verify_translation_laws,
)
from archlogic.logic import (
    TOP, And, L_O, L_RING, L_VAL, Not, Or, atom, parse_sentence, print_canonical,
)
from archlogic.models import evaluate, galois_field, onesorted_view, trivially_valued
from archlogic.theory import Context, Theory, UniverseEmpty

SQRT2 = parse_sentence("(exists (x K) (= (*.K x x) (+.K 1.K 1.K)))", L_RING)
FIELDS = [galois_field(q) for q in (2, 3, 4, 5, 7)]
VALUED = [trivially_valued(F) for F in FIELDS]


def test_residue_examples():
    img = residue_interpret(SQRT2)
    assert print_canonical(img) == "(exists (x k) (= (*.k x x) (+.k 1.k 1.k)))"
    assert parse_sentence(print_canonical(img), L_VAL) == img
    assert residue_preimage(img) == SQRT2
    zero = parse_sentence("(exists (x K) (= x 0.K))", L_RING)
    assert print_canonical(residue_interpret(zero)) == "(exists (x k) (= x 0.k))"


def test_onesorted_example():
    phi = parse_sentence("(forall (x K) (O x))", L_O)
    img = onesorted_map()(phi)
    assert print_canonical(img) == "(forall (x K) (not (<.G (v x) 0.G)))"
    assert parse_sentence(print_canonical(img), L_VAL) == img


@settings(max_examples=200, deadline=None)
@given(sentences(L_RING, depth=3, quantifiers=2), sentences(L_RING, depth=3, quantifiers=2))
def test_residue_is_homomorphic(a, b):
    assert residue_interpret(Not(a)) == Not(residue_interpret(a))
    assert residue_interpret(And(a, b)) == And(residue_interpret(a), residue_interpret(b))
    assert residue_interpret(Or(a, b)) == Or(residue_interpret(a), residue_interpret(b))
    assert residue_preimage(residue_interpret(a)) == a


@settings(max_examples=200, deadline=None)
@given(sentences(L_RING, depth=3, quantifiers=2))
def test_residue_preserves_fragments(s):
    m, n = classify(s), classify(residue_interpret(s))
    assert (m.qf, m.exists, m.forall, m.bar, m.e, m.a) == (n.qf, n.exists, n.forall, n.bar, n.e, n.a)


def test_residue_sound_on_trivially_valued_fields():
    for s in ring_corpus(seed=11, count=150, depth=3, quantifiers=2):
        img = residue_interpret(s)
        for F, W in zip(FIELDS, VALUED):
            assert evaluate(F, s) == evaluate(W, img), print_canonical(s)


def test_onesorted_sound():
    corpus = [parse_sentence(t, L_O) for t in (
        "(forall (x K) (O x))",
        "(exists (x K) (not (O x)))",
        "(forall (x K) (-> (O x) (O (*.K x x))))",
        "(O (+.K 1.K 1.K))",
    )]
    for W in VALUED:
        for s in corpus:
            assert evaluate(onesorted_view(W), s) == evaluate(W, onesorted_map()(s))


def test_lands_in_target():
    corpus = [s for s in ring_corpus(seed=3, count=100, depth=3, quantifiers=2)]
    assert residue_map(exists(L_RING)).lands_in_target(corpus) == []


# --------------------------------------------------------------------------
# translation laws


def _toy_corpora(tb, depth=3):
    atoms = lambda p: [f"{p}{i}" for i in range(1, tb.k + 1)]
    return literal_formulas(atoms("r"), depth), literal_formulas(atoms("s"), depth)


def test_identity_map_passes():
    tb = toy_bridge(2)
    c1, _ = _toy_corpora(tb, 2)
    ctx = tb.bridge.c1
    results = verify_translation_laws(identity_map(ctx.fragment), identity_map(ctx.fragment),
                                      ctx, ctx, tb.universe1, tb.universe1, c1, c1)
    assert [r.law for r in results] == ["translation", "translation-back", "bitrans1", "bitrans2"]
    assert all(r.ok for r in results)


@pytest.mark.parametrize("perm", [None, (2, 3, 1)])
def test_toy_bridge_translation_laws(perm):
    tb = toy_bridge(3, perm)
    c1, c2 = _toy_corpora(tb)
    results = verify_translation_laws(tb.interpretation, tb.inverse, tb.bridge.c1, tb.bridge.c2,
                                      tb.universe1, tb.universe2, c1, c2)
    assert all(r.ok for r in results)
    assert results[0].checked == len(c1) == 37000


def test_constant_translation_breaks_bitranslation():
    tb = toy_bridge(2)
    c1, c2 = _toy_corpora(tb, 2)
    tau2 = constant_map(tb.bridge.c2.fragment, tb.bridge.c1.fragment, TOP)
    results = {r.law: r for r in verify_translation_laws(
        tb.interpretation, tau2, tb.bridge.c1, tb.bridge.c2, tb.universe1, tb.universe2, c1, c2)}
    assert results["translation"].ok
    assert not results["bitrans1"].ok
    witness = parse_sentence(results["bitrans1"].witness, tb.sig1)
    assert not all(evaluate(M, witness) for M in tb.universe1)


def test_translation_laws_need_models():
    tb = toy_bridge(1)
    inconsistent = Theory(tb.sig1, (atom("r1"), Not(atom("r1"))))
    with pytest.raises(UniverseEmpty):
        verify_translation_laws(tb.interpretation, None, Context(literal(tb.sig1), inconsistent),
                                tb.bridge.c2, tb.universe1, tb.universe2, [atom("r1")])


def test_residue_translation_law():
    B = residue_bridge()
    corpus = [s for s in ring_corpus(seed=0, count=200, depth=3, quantifiers=2) if classify(s).exists]
    (res,) = verify_translation_laws(residue_map(exists(L_RING)), None, B.c1, B.c2, FIELDS, VALUED, corpus)
    assert res.ok and res.checked == len(corpus)


# --------------------------------------------------------------------------
# bridge axioms


@pytest.mark.parametrize("perm", [None, (3, 1, 2)])
def test_toy_bridge_axioms(perm):
    tb = toy_bridge(3, perm)
    c1, c2 = _toy_corpora(tb, 2)
    report = verify_bridge_axioms(tb.bridge, tb.universe2, tb.universe1, c1, c2)
    assert sorted(report) == ["mon", "sur", "wm"]
    assert all(r.ok for r in report.values())


def test_identity_bridge_axioms():
    tb = toy_bridge(2)
    c1, _ = _toy_corpora(tb, 2)
    report = verify_bridge_axioms(identity_bridge(tb.bridge.c1), tb.universe1, tb.universe1, c1, c1)
    assert all(r.ok for r in report.values())


def test_collapsing_bridge_fails_sur():
    tb = toy_bridge(2)
    c1, c2 = _toy_corpora(tb, 2)
    fixed = tb.universe1[0]
    B = BridgeDescriptor(tb.bridge.c1, tb.bridge.c2, lambda M: fixed, "collapse")
    report = verify_bridge_axioms(B, tb.universe2, tb.universe1, c1, c2)
    assert not report["sur"].ok and report["sur"].witness
    assert not report["mon"].ok


def test_residue_bridge_axioms():
    B = residue_bridge()
    c1 = [s for s in ring_corpus(seed=0, count=120, depth=3, quantifiers=2) if classify(s).exists]
    c2 = [residue_interpret(s) for s in c1]
    report = verify_bridge_axioms(B, VALUED, FIELDS, c1, c2)
    assert all(r.ok for r in report.values())


def test_arch_descriptor_problems():
    tb = toy_bridge(2)
    c1, _ = _toy_corpora(tb, 2)
    good = ArchDescriptor(tb.bridge, tb.bridge, tb.interpretation)
    assert good.problems(c1) == []
    changed = BridgeDescriptor(Context(tb.bridge.c1.fragment, Theory(tb.sig1, (atom("r1"),))),
                               tb.bridge.c2, tb.bridge.sigma)
    assert "the extension changes a theory" in ArchDescriptor(tb.bridge, changed, tb.interpretation).problems(c1)
    escape = constant_map(tb.bridge.c1.fragment, tb.bridge.c2.fragment,
                          parse_sentence("(not (or s1 s2))", tb.sig2))
    assert any("leaves" in p for p in ArchDescriptor(tb.bridge, tb.bridge, escape).problems(c1))
