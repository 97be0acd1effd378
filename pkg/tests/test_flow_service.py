from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import flow, widths, word
from flowtwist.exceptions import FlowInvariantError, RotationError, WordError
from flowtwist.models.flow.model import FlowedWord, Piece
from flowtwist.models.types.enums import Boundary
from flowtwist.models.word.model import BUILTIN_SHIFT, AnchoredWord
from flowtwist.services.flow_service import (
    BlockRewrite,
    identity_flow,
    is_identity,
    is_legal_by_factor,
    is_legal_word,
    normalize,
    position_spans,
    rewrite_blocks,
    rotate,
    to_canonical,
)
from flowtwist.utils.rational import format_rational

bit_strings = st.text(alphabet="01", max_size=6).filter(lambda w: not w.endswith("0"))


class TestAnchoredWord:
    def test_builtin_shift_forbids_only_02(self):
        assert BUILTIN_SHIFT.forbidden_pairs() == ["02"]

    def test_literal_with_terminators(self):
        assert word("201~").boundary is Boundary.BOWTIE
        assert word("2003").boundary is Boundary.SENTINEL
        assert word("2 0 0 1").letters == "2001"
        assert word("201~").literal() == "201~"

    @pytest.mark.parametrize("letters", ["23", "2~1"])
    def test_marker_in_shift_word(self, letters):
        with pytest.raises(WordError, match="marker in shift word"):
            AnchoredWord(letters)

    def test_circular_wrap_is_checked(self):
        with pytest.raises(WordError, match="illegal word"):
            AnchoredWord("20")
        assert AnchoredWord("20", Boundary.BOWTIE).bits == "0"

    def test_anchor_must_be_2(self):
        with pytest.raises(WordError):
            AnchoredWord("12")
        assert AnchoredWord("12", anchor=1).anchor == 1

    def test_legality_helpers(self):
        assert is_legal_word("2012")
        assert not is_legal_word("2002")
        assert not is_legal_word("21020", circular=True)
        assert is_legal_by_factor("2110")
        assert not is_legal_by_factor("20", circular=True)


class TestFlowedWord:
    def test_identity_flow(self):
        fw = flow("2001")
        assert fw.span == 4
        assert [p.as_strings() for p in fw.pieces][1] == ["0", "0/1", "1/1", "1/1", "2/1"]
        assert is_identity(fw, fw.word)

    def test_pieces_must_be_contiguous(self):
        with pytest.raises(FlowInvariantError):
            FlowedWord(
                AnchoredWord("21"),
                (Piece("2", Fraction(0), Fraction(1), Fraction(0), Fraction(1)), Piece("1", Fraction(0), Fraction(1), Fraction(2), Fraction(3))),
            )

    def test_piece_symbols_must_match_letters(self):
        with pytest.raises(FlowInvariantError):
            FlowedWord(AnchoredWord("21"), (Piece("2", Fraction(0), Fraction(1), Fraction(0), Fraction(2)),))

    def test_normalize_merges_equal_slopes(self):
        half = Fraction(1, 2)
        fw = FlowedWord(
            AnchoredWord("2"),
            (Piece("2", Fraction(0), half, Fraction(0), half), Piece("2", half, Fraction(1), half, Fraction(1))),
        )
        assert len(normalize(fw).pieces) == 1
        assert is_identity(fw, AnchoredWord("2"))

    def test_rewrite_block_constant_slope(self):
        fw = rewrite_blocks(flow("2001"), [BlockRewrite(0, 4, "2")])
        assert fw.letters == "2"
        assert normalize(fw).pieces == (Piece("2", Fraction(0), Fraction(1), Fraction(0), Fraction(4)),)
        assert normalize(fw).pieces[0].slope == Fraction(1, 4)

    def test_rewrite_block_expands(self):
        fw = rewrite_blocks(flow("2"), [BlockRewrite(0, 1, "201")])
        assert fw.letters == "201"
        assert widths(fw) == [Fraction(1, 3)] * 3

    def test_rewrite_blocks_must_cover_word(self):
        with pytest.raises(FlowInvariantError):
            rewrite_blocks(flow("2001"), [BlockRewrite(0, 2, "21")])


class TestRotation:
    def test_requires_circular_word(self):
        with pytest.raises(RotationError, match="rotate requires circular word"):
            rotate(flow("201~"), Fraction(1, 2))

    def test_offset_out_of_range(self):
        with pytest.raises(RotationError):
            rotate(flow("21"), Fraction(2))

    def test_split_first_letter(self):
        fw = rotate(flow("21"), Fraction(1, 2))
        assert fw.letters == "21"
        assert fw.is_split
        assert fw.letter_span(0) == (Fraction(3, 2), Fraction(5, 2))

    def test_canonical_rotates_to_anchor(self):
        fw = rotate(flow("211"), Fraction(1))
        assert fw.letters == "112"
        canon, offset = to_canonical(fw)
        assert offset == 2
        assert canon.letters == "211"

    @given(bit_strings, st.fractions(min_value=0, max_value=10, max_denominator=12))
    @settings(max_examples=60, deadline=None)
    def test_rotation_inverse(self, bits, t):
        fw = identity_flow(AnchoredWord.anchored(bits))
        if not 0 < t < fw.span:
            return
        back = rotate(rotate(fw, t), fw.span - t)
        assert normalize(back) == fw


class TestPositionSpans:
    def test_circular_positions_wrap_to_next_period(self):
        spans = position_spans(flow("21"), [0, 2, 3])
        assert spans == ((0, 1), (2, 3), (3, 4))

    def test_terminated_positions_step_past_the_end(self):
        spans = position_spans(flow("21~"), [1, 2])
        assert spans == ((1, 2), (2, 3))


class TestRationals:
    def test_format(self):
        assert format_rational(Fraction(2)) == "2/1"
        assert format_rational(Fraction(-3, 6)) == "-1/2"

    @given(st.fractions(max_denominator=10_000))
    def test_serialization_is_exact(self, value):
        assert Fraction(format_rational(value)) == value


@given(bit_strings, st.text(alphabet="abc", min_size=1, max_size=4))
@settings(max_examples=40, deadline=None)
def test_normalize_idempotent(bits, element):
    from flowtwist.engines import RuleTableEngine
    from flowtwist.services.verify_service import apply_relation

    fw = apply_relation(element, identity_flow(AnchoredWord.anchored(bits)), RuleTableEngine()).final
    once = normalize(fw)
    assert normalize(once) == once
    assert once.span == fw.span
