import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import circular_bits
from flowtwist.engines import BijectionEngine, RuleTableEngine
from flowtwist.exceptions import BijectionError, RuleApplicationError, UnknownBuiltinError
from flowtwist.models.bijection.model import PrefixBijection
from flowtwist.models.rule.model import Mapping
from flowtwist.models.types.enums import ApplicationErrorKind, Boundary
from flowtwist.models.word.model import AnchoredWord
from flowtwist.services.flow_service import identity_flow, normalize
from flowtwist.services.rule_service import validate_partition
from flowtwist.services.veelike_service import (
    anchored_apply,
    anchored_apply_traced,
    bit_words,
    builtin_bijection,
    compile_to_local_rule,
    finite_support_image,
    merge_mappings,
    parse_bijection,
    require_valid,
    strip_zeros,
    validate_bijection,
)

GENERATOR_NAMES = ["a", "b", "c"]


class TestBijection:
    @pytest.mark.parametrize("name", ["a", "b", "c", "c_broken"])
    def test_builtins_are_complete_prefix_codes(self, name):
        report = validate_bijection(builtin_bijection(name))
        assert report.ok, report.diagnostics

    def test_depth(self):
        assert builtin_bijection("a").depth == 2
        assert builtin_bijection("c_broken").depth == 3

    def test_duplicate_and_incomplete_codes(self):
        report = validate_bijection(PrefixBijection("bad", (("0", "1"), ("0", "0"))))
        assert not report.ok
        assert any("duplicate" in d for d in report.diagnostics)
        assert any("Kraft" in d for d in report.diagnostics)

    def test_prefix_violation(self):
        report = validate_bijection(PrefixBijection("bad", (("0", "0"), ("01", "10"), ("1", "11"))))
        assert any("is a prefix of" in d for d in report.diagnostics)

    def test_require_valid(self):
        with pytest.raises(BijectionError, match="invalid bijection"):
            require_valid(PrefixBijection("bad", (("0", "1"),)))

    def test_non_bit_code_word(self):
        with pytest.raises(BijectionError):
            PrefixBijection("bad", (("0", "2"),))

    def test_parse(self):
        bij = parse_bijection("00 -> 01\n# comment\n01->00\n1 -> 1\n", "a")
        assert bij.pairs == builtin_bijection("a").pairs
        assert parse_bijection(bij.format()).pairs == bij.pairs

    def test_parse_error_names_line(self):
        with pytest.raises(BijectionError, match="line 2"):
            parse_bijection("00 -> 01\n01 => 00")

    def test_unknown_builtin(self):
        with pytest.raises(UnknownBuiltinError):
            builtin_bijection("d")


class TestCantorSemantics:
    @pytest.mark.parametrize(
        "name, bits, image",
        [
            ("a", "", "01"),
            ("a", "01", ""),
            ("b", "1", "11"),
            ("c", "", "1"),
            ("c", "1", ""),
            ("c", "0011", "111"),
            ("c_broken", "11", "001"),
        ],
    )
    def test_finite_support_image(self, name, bits, image):
        assert finite_support_image(builtin_bijection(name), bits) == image

    @given(st.sampled_from(["a", "b", "c", "c_broken"]), st.text(alphabet="01", max_size=10))
    @settings(max_examples=200, deadline=None)
    def test_inverse_undoes_image(self, name, bits):
        bij = builtin_bijection(name)
        assert finite_support_image(bij.inverse(), finite_support_image(bij, bits)) == strip_zeros(bits)

    @pytest.mark.parametrize("name", GENERATOR_NAMES)
    def test_output_letters_follow_prefix_permutation(self, name):
        bij = builtin_bijection(name)
        for bits in circular_bits(8):
            fw = anchored_apply(bij, identity_flow(AnchoredWord.anchored(bits)))
            assert fw.letters == "2" + finite_support_image(bij, bits), bits

    @pytest.mark.slow
    @pytest.mark.parametrize("name", GENERATOR_NAMES)
    def test_output_letters_follow_prefix_permutation_exhaustive(self, name):
        bij = builtin_bijection(name)
        for bits in circular_bits(10):
            fw = anchored_apply(bij, identity_flow(AnchoredWord.anchored(bits)))
            assert fw.letters == "2" + finite_support_image(bij, bits), bits

    @pytest.mark.slow
    @pytest.mark.parametrize("name", ["a", "b", "c", "c_broken"])
    def test_image_is_a_bijection_on_zero_free_words(self, name):
        bij, inverse = builtin_bijection(name), builtin_bijection(name).inverse()
        words = [bits for bits in bit_words(10) if not bits.endswith("0")]
        images = [finite_support_image(bij, bits) for bits in words]
        assert not any(image.endswith("0") for image in images)
        assert [finite_support_image(inverse, image) for image in images] == words
        assert len(set(images)) == len(words)

    def test_bit_words_order(self):
        assert list(bit_words(2)) == ["", "0", "1", "00", "01", "10", "11"]
        assert len(list(bit_words(5))) == 2**6 - 1

    def test_proper_prefix_keeps_the_rest(self):
        step = anchored_apply_traced(builtin_bijection("c"), identity_flow(AnchoredWord.anchored("0011")))
        assert step.result.letters == "2111"
        assert step.rewritten == (0, 1, 2)

    def test_sentinel_after_exact_code_word(self):
        with pytest.raises(RuleApplicationError, match="sentinel read"):
            anchored_apply(builtin_bijection("a"), identity_flow(AnchoredWord.anchored("01", Boundary.SENTINEL)))


# 两引擎在终止词上有意不同的输入：规则表读到终止符即失败，前缀码只看比特
TERMINATED_DIFFERENCES = {("213", "a"), ("2103", "b")}


def _outcome(engine, name, fw):
    try:
        return normalize(engine.apply(name, fw))
    except RuleApplicationError:
        return None


def _agree(rule_engine, other, bits_max):
    for bits in circular_bits(bits_max):
        fw = identity_flow(AnchoredWord.anchored(bits))
        for name in GENERATOR_NAMES:
            left = normalize(rule_engine.apply(name, fw))
            right = normalize(other.apply(name, fw))
            assert left == right, (name, bits)


class TestEngineAgreement:
    def test_rule_tables_match_bijections(self, rule_engine, bijection_engine):
        _agree(rule_engine, bijection_engine, 7)

    @pytest.mark.slow
    def test_rule_tables_match_bijections_exhaustive(self, rule_engine, bijection_engine):
        _agree(rule_engine, bijection_engine, 11)

    @pytest.mark.parametrize("boundary", [Boundary.SENTINEL, Boundary.BOWTIE])
    def test_terminated_words(self, rule_engine, bijection_engine, boundary):
        for bits in bit_words(5):
            fw = identity_flow(AnchoredWord.anchored(bits, boundary))
            for name in GENERATOR_NAMES:
                if (fw.word.literal(), name) in TERMINATED_DIFFERENCES:
                    continue
                left = _outcome(rule_engine, name, fw)
                assert left == _outcome(bijection_engine, name, fw), (name, fw.word.literal())

    def test_code_word_ending_in_zero_before_sentinel(self, rule_engine, bijection_engine):
        fw = identity_flow(AnchoredWord.from_literal("2003"))
        assert bijection_engine.apply("b", fw).word.literal() == "2003"
        assert normalize(bijection_engine.apply("b", fw)) == normalize(rule_engine.apply("b", fw))

    @pytest.mark.parametrize("literal, name, image", [("213", "a", "21"), ("2103", "b", "211")])
    def test_documented_terminated_differences(self, rule_engine, bijection_engine, literal, name, image):
        fw = identity_flow(AnchoredWord.from_literal(literal))
        with pytest.raises(RuleApplicationError) as exc:
            rule_engine.apply(name, fw)
        assert exc.value.kind is ApplicationErrorKind.SENTINEL_READ
        assert bijection_engine.apply(name, fw).letters == image

    def test_multi_anchor_words(self, rule_engine, bijection_engine):
        for letters in ["22", "2122", "2012011", "21211201"]:
            fw = identity_flow(AnchoredWord(letters))
            for name in GENERATOR_NAMES:
                assert normalize(rule_engine.apply(name, fw)) == normalize(bijection_engine.apply(name, fw))


class TestCompile:
    def test_merge_into_fresh_variable(self):
        merged = merge_mappings([Mapping.of("0", "A", "", "A"), Mapping.of("1", "A", "", "A")])
        assert [m.format() for m in merged] == ["A(B):B"]

    @pytest.mark.parametrize("name", ["a", "b", "c", "c_broken"])
    def test_compiled_rule_partitions(self, name):
        rule = compile_to_local_rule(builtin_bijection(name))
        assert validate_partition(rule).ok
        assert rule.name == f"compiled-{name}"

    def test_compiled_rules_match_tables(self, bijection_engine):
        compiled = RuleTableEngine({name: compile_to_local_rule(builtin_bijection(name)) for name in GENERATOR_NAMES})
        _agree(compiled, bijection_engine, 6)

    @pytest.mark.slow
    def test_compiled_rules_match_tables_exhaustive(self, rule_engine):
        compiled = RuleTableEngine({name: compile_to_local_rule(builtin_bijection(name)) for name in GENERATOR_NAMES})
        _agree(rule_engine, compiled, 11)

    def test_compiled_broken_c_matches_its_bijection(self):
        compiled = RuleTableEngine(generator_c="c_broken")
        direct = BijectionEngine(generator_c="c_broken")
        for bits in circular_bits(6):
            fw = identity_flow(AnchoredWord.anchored(bits))
            assert normalize(compiled.apply("c", fw)) == normalize(direct.apply("c", fw)), bits

    def test_invalid_bijection_is_rejected(self):
        with pytest.raises(BijectionError):
            compile_to_local_rule(PrefixBijection("bad", (("0", "1"),)))
