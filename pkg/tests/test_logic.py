import pytest
from hypothesis import given, settings
from strategies import sentences

from archlogic.coding import NotInImage, code_of_text, godel_code, godel_decode, in_image
from archlogic.logic import (
    BOT, TOP, And, App, Eq, Exists, FreeVariable, L_O, L_RING, L_VAL, L_VAL_VARPI,
    ParseError, SortError, UnknownSymbol, Var, check_well_sorted, parse_formula,
    parse_sentence, print_canonical, propositional,
)

SQRT2 = "(exists (x K) (= (*.K x x) (+.K 1.K 1.K)))"


def test_parse_quadratic():
    s = parse_sentence(SQRT2, L_RING)
    one = App("1.K")
    x = Var("x", "K")
    assert s == Exists("x", "K", Eq(App("*.K", (x, x)), App("+.K", (one, one))))


def test_truth_constants():
    assert parse_sentence("(true)", L_RING) == TOP
    assert print_canonical(TOP) == "(true)"
    assert print_canonical(BOT) == "(false)"
    # ⊤ and ⊥ belong to every language
    for sig in (L_RING, L_VAL, L_O, propositional(["p"])):
        assert parse_sentence("(false)", sig) == BOT


def test_open_formula_rejected():
    with pytest.raises(FreeVariable):
        parse_sentence("(exists (x K) (= x y))", L_RING)


@pytest.mark.parametrize("text,err", [
    ("(exists (x K) (= x 0.K)", ParseError),
    ("(= 0.K 0.k)", SortError),
    ("(= (frob 1.K) 0.K)", UnknownSymbol),
    ("(exists (x Q) (= x x))", SortError),
])
def test_parse_errors(text, err):
    with pytest.raises(err):
        parse_sentence(text, L_VAL)


def test_nary_connectives_print_right_nested():
    sig = propositional(["a", "b", "c"])
    s = parse_sentence("(and a b c)", sig)
    assert print_canonical(s) == "(and a (and b c))"
    assert print_canonical(parse_sentence("(or a b c)", sig)) == "(or a (or b c))"


def test_print_is_single_spaced():
    s = parse_sentence("(exists   (x K)\n  (= x\t0.K))", L_RING)
    assert print_canonical(s) == "(exists (x K) (= x 0.K))"


def test_well_sorted_checks():
    ok = parse_formula("(exists (x K) (= (v x) 0.G))", L_VAL)
    assert check_well_sorted(ok, L_VAL) == []
    with pytest.raises(SortError):
        parse_sentence("(exists (x K) (= (v x) 0.K))", L_VAL)
    assert check_well_sorted(parse_formula("(O (+.K 1.K 1.K))", L_O), L_O) == []


def test_builtin_signatures_reproducible():
    from archlogic.logic import _ring, _val
    assert _ring() == L_RING
    assert _val() == L_VAL
    assert set(L_VAL.sorts) == {"K", "k", "G"}
    assert L_VAL_VARPI.constants["varpi"] == "K"
    assert L_O.relations["O"] == ("K",)
    for sym in ("+.G", "<.G", "0.G", "inf.G", "v", "res", "+.k", "1.k"):
        assert sym in L_VAL.symbols()


# --------------------------------------------------------------------------
# Gödel coding


def test_code_of_true():
    # bytes 01 28 74 72 75 65 29
    assert godel_code(TOP) == 0x01287472756529
    assert godel_code(TOP) == int.from_bytes(b"\x01(true)", "big")


def test_decode_rejects():
    with pytest.raises(NotInImage):
        godel_decode(0)
    # missing prefix byte
    with pytest.raises(NotInImage):
        godel_decode(int.from_bytes(b"(true)", "big"))
    # non-canonical spacing is outside the image
    with pytest.raises(NotInImage):
        godel_decode(code_of_text("(and  (true) (true))"))
    assert not in_image(code_of_text("(and (true) (true) (true))"))


@settings(max_examples=400, deadline=None)
@given(sentences(L_VAL_VARPI, depth=4, quantifiers=3))
def test_round_trip(s):
    text = print_canonical(s)
    assert parse_sentence(text, L_VAL_VARPI) == s
    assert print_canonical(parse_sentence(text, L_VAL_VARPI)) == text
    assert godel_decode(godel_code(s)) == s
    assert text == text.strip() and "  " not in text


@settings(max_examples=200, deadline=None)
@given(sentences(L_VAL_VARPI), sentences(L_VAL_VARPI))
def test_injective(a, b):
    assert (godel_code(a) == godel_code(b)) == (a == b)


def test_image_never_misaccepts():
    import random
    rng = random.Random(7)
    accepted = 0
    for _ in range(10_000):
        n = rng.randrange(1, 2 ** 64)
        try:
            s = godel_decode(n)
        except NotInImage:
            continue
        accepted += 1
        assert godel_code(s) == n
    # small codes of real sentences are accepted
    assert in_image(godel_code(TOP))


def test_corpus_round_trip_ten_thousand():
    from archlogic.corpora import ring_corpus
    corpus = ring_corpus(seed=11, count=10_000)
    codes = set()
    for s in corpus:
        text = print_canonical(s)
        assert parse_sentence(text, L_RING) == s
        codes.add(godel_code(s))
    distinct = {print_canonical(s) for s in corpus}
    assert len(codes) == len(distinct)


def test_connectives_parse():
    sig = propositional(["a", "b"])
    s = parse_sentence("(-> a (<-> b (not a)))", sig)
    assert print_canonical(s) == "(-> a (<-> b (not a)))"
    assert isinstance(parse_sentence("(and a b)", sig), And)
