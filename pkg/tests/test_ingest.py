import pytest
from hypothesis import given, strategies as st

from dramastyle import (
    NoTurnsFound,
    ParseRules,
    RawDocument,
    UnbalancedBoilerplateMarkers,
    extract_character_text,
    parse_play,
    strip_boilerplate,
)
from dramastyle.ingest import match_speaker_heading, normalize_speaker, remove_stage_directions

RULES = ParseRules()


def doc(text):
    return RawDocument("test", text)


class TestStripBoilerplate:
    def test_no_markers_is_identity(self):
        d = doc("NORA. Hello.\nHELMER. Hi.\n")
        assert strip_boilerplate(d, RULES).text == d.text

    def test_markers_cut_header_and_footer(self):
        d = doc("HDR\n*** START OF X ***\nBODY\n*** END OF X ***\nFTR")
        assert strip_boilerplate(d, RULES).text == "BODY\n"

    def test_lone_start_marker_errors(self):
        with pytest.raises(UnbalancedBoilerplateMarkers):
            strip_boilerplate(doc("a\n*** START OF X ***\nb\n"), RULES)

    def test_lone_end_marker_errors(self):
        with pytest.raises(UnbalancedBoilerplateMarkers):
            strip_boilerplate(doc("a\n*** END OF X ***\nb\n"), RULES)


class TestSpeakerHeading:
    @pytest.mark.parametrize(
        "line,name,rest",
        [
            ("NORA. Hello there.", "NORA.", "Hello there."),
            ("Nora: Hello.", "Nora:", "Hello."),
            ("MRS. ALVING. How nice.", "MRS. ALVING.", "How nice."),
            ("Mrs. Linde. Hello.", "Mrs. Linde.", "Hello."),
            ("Nora. Yes.", "Nora.", "Yes."),
            ("PASTOR MANDERS. Quite so.", "PASTOR MANDERS.", "Quite so."),
        ],
    )
    def test_matches(self, line, name, rest):
        assert match_speaker_heading(line, RULES) == (name, rest)

    @pytest.mark.parametrize(
        "line",
        [
            "and the street was mine.",
            "THE MINIATURE PLAY",
            "[She dances.]",
            "",
            "   ",
            "lowercase. not a name.",
        ],
    )
    def test_rejects(self, line):
        assert match_speaker_heading(line, RULES) is None

    def test_dialogue_after_name_not_swallowed(self):
        # "I am glad" must not extend the heading past NORA
        assert match_speaker_heading("NORA. I am glad.", RULES) == ("NORA.", "I am glad.")


class TestParsePlay:
    def test_empty_input_raises(self):
        with pytest.raises(NoTurnsFound):
            parse_play(doc("no headings here, just prose.\n"), RULES, "p", "en")

    def test_two_turns_with_stage_direction_line(self):
        play = parse_play(
            doc("NORA. Hello there.\n[She dances.]\nHELMER. Hi.\n"), RULES, "p", "en"
        )
        assert [(t.speaker, t.text) for t in play.turns] == [
            ("nora", "Hello there."),
            ("helmer", "Hi."),
        ]

    def test_inline_direction_removed_and_whitespace_collapsed(self):
        play = parse_play(doc("NORA. I am (laughing) glad.\n"), RULES, "p", "en")
        assert play.turns[0].text == "I am glad."

    def test_nested_directions_removed_innermost_first(self):
        play = parse_play(doc("NORA. So [he (slowly) exits] it ends.\n"), RULES, "p", "en")
        assert play.turns[0].text == "So it ends."

    def test_multi_line_turns_joined(self):
        play = parse_play(doc("NORA. First line\nsecond line.\nHELMER. Hi.\n"), RULES, "p", "en")
        assert play.turns[0].text == "First line second line."

    def test_preamble_before_first_heading_discarded(self):
        play = parse_play(doc("Title page prose\nNORA. Hello.\n"), RULES, "p", "en")
        assert len(play.turns) == 1

    def test_ordinals_strictly_increasing(self):
        play = parse_play(
            doc("NORA. A.\nHELMER. B.\nNORA. C.\nHELMER. D.\n"), RULES, "p", "en"
        )
        assert [t.ordinal for t in play.turns] == [0, 1, 2, 3]

    def test_unmatched_bracket_is_warning_not_error(self):
        play = parse_play(doc("NORA. Hello [there.\nHELMER. Hi.\n"), RULES, "p", "en")
        assert play.warnings
        assert "[there." in play.turns[0].text

    def test_stage_direction_removal_idempotent(self):
        play = parse_play(
            doc("NORA. A [x] b (y) c.\nHELMER. Plain [nested (deep) one].\n"),
            RULES, "p", "en",
        )
        for t in play.turns:
            again, warns = remove_stage_directions(t.text, RULES)
            assert again == t.text
            assert not warns


class TestNormalizeSpeaker:
    def test_casefold_collapse_strip(self):
        assert normalize_speaker("  MRS.   ALVING. ") == "mrs. alving"

    def test_distinct_variants_stay_distinct(self):
        assert normalize_speaker("MRS. ALVING") != normalize_speaker("MRS ALVING")

    @given(st.text(alphabet=st.characters(whitelist_categories=("Lu", "Ll", "Zs")), max_size=30))
    def test_pure_function(self, name):
        assert normalize_speaker(name) == normalize_speaker(name)


class TestExtractCharacterText:
    def _play(self, pairs):
        text = "".join(f"{s.upper()}. {t}\n" for s, t in pairs)
        return parse_play(doc(text), RULES, "p", "en")

    def test_concatenation_in_ordinal_order(self):
        play = self._play([("a", "x"), ("b", "y"), ("a", "z")])
        assert extract_character_text(play) == {"a": "x z", "b": "y"}

    def test_single_turn(self):
        play = self._play([("a", "only line")])
        assert extract_character_text(play) == {"a": "only line"}

    def test_total_length_preserved(self):
        play = self._play([("a", "one"), ("b", "two"), ("a", "three"), ("b", "four")])
        texts = extract_character_text(play)
        joiners = sum(len([t for t in play.turns if t.speaker == s]) - 1 for s in texts)
        assert sum(len(v) for v in texts.values()) == (
            sum(len(t.text) for t in play.turns) + joiners
        )
