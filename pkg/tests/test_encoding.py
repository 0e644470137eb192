import itertools

import pytest

from chainfold.encoding import (
    FitResult,
    MarkingPattern,
    TapeEntry,
    TypeRegistry,
    UnknownTapeKindError,
    codon_count,
    complement,
    default_registry,
    fit,
    flip_end_over_end,
    negative_copy,
    reverse,
    tape_from_json_dict,
    tape_from_kinds,
    tape_to_json_dict,
)

REG = default_registry()
KINDS = REG.kinds


def P(s):
    return MarkingPattern.from_string(s)


def test_codon_count_small_widths():
    assert codon_count(2) == 2
    assert codon_count(4) == 6
    assert codon_count(6) == 20


@pytest.mark.parametrize("n", [0, -2, 3, 5])
def test_codon_count_rejects_bad_widths(n):
    with pytest.raises(ValueError):
        codon_count(n)


def test_pattern_validation():
    with pytest.raises(ValueError):
        P("1110")
    with pytest.raises(ValueError):
        P("110")
    with pytest.raises(ValueError):
        MarkingPattern((0, 2, 1, 0))


def test_complement_and_reverse_are_involutions():
    for kind in KINDS:
        p = REG.pattern(kind)
        assert complement(complement(p)) == p
        assert reverse(reverse(p)) == p
        assert reverse(complement(p)) == complement(reverse(p))


def test_complement_examples():
    assert complement(P("1100")) == P("0011")
    assert complement(P("1010")) == P("0101")
    assert reverse(P("1100")) == P("0011")
    assert reverse(P("1001")) == P("1001")


def test_registry_roles_and_partners():
    assert [REG.role(k) for k in ("G0_", "H__", "L__", "R__", "M1x", "b__")] == [
        "a", "b", "c", "d", "e", "f",
    ]
    for x, y in (("a", "f"), ("b", "e"), ("c", "d")):
        kx, ky = REG.kind_for_role(x), REG.kind_for_role(y)
        assert REG.partner(kx) == ky
        assert REG.partner(ky) == kx
        assert complement(REG.pattern(kx)) == REG.pattern(ky)


def test_registry_json_roundtrip():
    again = TypeRegistry.from_json(REG.to_json())
    for k in KINDS:
        assert again.pattern(k) == REG.pattern(k)
        assert again.role(k) == REG.role(k)
        assert again.partner(k) == REG.partner(k)


def test_registry_rejects_unpaired_patterns():
    with pytest.raises(ValueError):
        TypeRegistry(
            {
                "G0_": ("a", P("1100")),
                "H__": ("b", P("1010")),
            }
        )


def test_fit_worked_examples():
    assert fit("b__", False, "G0_") is FitResult.EXACT
    assert fit("G0_", True, "G0_") is FitResult.REVERSED
    assert fit("L__", True, "L__") is FitResult.NO_FIT
    assert fit("H__", False, "G0_") is FitResult.NO_FIT


def test_fit_depends_only_on_relative_flip():
    for ck, sk in itertools.product(KINDS, KINDS):
        for cf, sf in itertools.product([False, True], repeat=2):
            assert fit(ck, cf, sk, sf) is fit(ck, not cf, sk, not sf)


def test_reversed_fit_confined_to_af_and_be():
    # a reversed acceptance puts the candidate where its own complement
    # partner belongs, so the substituted pair is (candidate, partner(slot))
    confusable = {frozenset("af"), frozenset("be")}
    seen = set()
    for ck, sk in itertools.product(KINDS, KINDS):
        for cf in (False, True):
            r = fit(ck, cf, sk)
            if r is FitResult.REVERSED:
                pair = frozenset((REG.role(ck), REG.role(REG.partner(sk))))
                assert pair in confusable
                seen.add(pair)
    assert seen == confusable


def test_exact_fit_is_exactly_the_partner():
    for ck, sk in itertools.product(KINDS, KINDS):
        upright = fit(ck, False, sk)
        assert (upright is FitResult.EXACT) == (REG.partner(sk) == ck)


def test_palindromic_pair_flips_are_exact_not_reversed():
    # c and d cannot be told apart from their flipped selves
    assert fit("R__", True, "L__") is FitResult.EXACT
    assert fit("L__", True, "R__") is FitResult.EXACT


def test_negative_copy_involution():
    tape = tape_from_kinds(
        ["G0_", "H__", "L__", "R__", "M1x", "b__"],
        [False, True, False, True, False, True],
    )
    neg = negative_copy(tape)
    assert [e.kind for e in neg] == ["b__", "M1x", "R__", "L__", "H__", "G0_"]
    assert [e.flipped for e in neg] == [e.flipped for e in tape]
    assert negative_copy(neg) == tape
    assert negative_copy(()) == ()


def test_negative_copy_unknown_kind():
    with pytest.raises(UnknownTapeKindError):
        negative_copy((TapeEntry("Z__"),))


def test_flip_end_over_end():
    tape = tape_from_kinds(["G0_", "H__"], [False, False])
    flipped = flip_end_over_end(tape)
    assert flipped == (TapeEntry("H__", True), TapeEntry("G0_", True))
    assert flip_end_over_end(flipped) == tape


def test_tape_json_roundtrip():
    tape = tape_from_kinds(["G0_", "b__"], [True, False])
    assert tape_from_json_dict(tape_to_json_dict(tape)) == tape
