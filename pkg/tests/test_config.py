"""Config format: typed parse, exhaustive error reporting, canonical round trip."""

import math

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flockalign.config import ConfigReader, _convert, parse_config, serialize_config
from flockalign.errors import ConfigError


class TestParse:
    def test_types_inferred(self):
        cfg = parse_config(
            "a = 3\n"
            "b = 2.5\n"
            "c = true\n"
            "d = false\n"
            "e = hello\n"
            "f = 1e-3\n"
        )
        assert cfg == {"a": 3, "b": 2.5, "c": True, "d": False, "e": "hello", "f": 1e-3}
        assert isinstance(cfg["a"], int)
        assert isinstance(cfg["f"], float)

    def test_comments_and_blanks_skipped(self):
        cfg = parse_config("# a comment\n\n  \nkey.sub = 1\n# trailing\n")
        assert cfg == {"key.sub": 1}

    def test_dotted_keys_and_spacing(self):
        cfg = parse_config("  run.t_final   =   10.0  ")
        assert cfg == {"run.t_final": 10.0}

    def test_all_errors_reported_with_line_numbers(self):
        text = "\n".join(
            [
                "good = 1",            # 1
                "no equals here",      # 2
                "bad key! = 2",        # 3
                "empty =",             # 4
                "good = 5",            # 5 duplicate
            ]
        )
        with pytest.raises(ConfigError) as exc:
            parse_config(text)
        issues = exc.value.issues
        assert [line for line, _ in issues] == [2, 3, 4, 5]
        assert "no equals here" in issues[0][1]
        assert "invalid key" in issues[1][1]
        assert "empty value" in issues[2][1]
        assert "first set on line 1" in issues[3][1]

    def test_duplicate_message_names_both_lines(self):
        with pytest.raises(ConfigError) as exc:
            parse_config("x = 1\ny = 2\nx = 3\n")
        (line, msg), = exc.value.issues
        assert line == 3
        assert "line 1" in msg


class TestSerialize:
    def test_sorted_canonical_output(self):
        text = serialize_config({"b.two": 2, "a.one": 1.5, "flag": True, "name": "demo"})
        assert text == "a.one = 1.5\nb.two = 2\nflag = true\nname = demo\n"

    def test_empty_config_serializes_empty(self):
        assert serialize_config({}) == ""

    def test_rejects_string_that_parses_as_number(self):
        with pytest.raises(ConfigError):
            serialize_config({"v": "123"})

    def test_rejects_invalid_key(self):
        with pytest.raises(ConfigError):
            serialize_config({"bad key": 1})

    config_values = st.one_of(
        st.booleans(),
        st.integers(min_value=-(10**12), max_value=10**12),
        st.floats(allow_nan=False),
        # strings must stay strings under the parser's type inference
        st.from_regex(r"[a-zA-Z_][a-zA-Z0-9_\-]*", fullmatch=True).filter(
            lambda s: isinstance(_convert(s), str)
        ),
    )
    config_keys = st.from_regex(r"[a-z_][a-z0-9_]*(\.[a-z_][a-z0-9_]*){0,2}", fullmatch=True)

    @settings(max_examples=60, deadline=None)
    @given(st.dictionaries(config_keys, config_values, max_size=8))
    def test_round_trip_is_identity(self, cfg):
        text = serialize_config(cfg)
        again = parse_config(text)
        assert again == cfg
        assert serialize_config(again) == text


class TestReader:
    def test_collects_missing_and_type_issues(self):
        r = ConfigReader({"a": "nope", "b": 2})
        assert r.require("a", float) is None
        assert r.require("missing", int) is None
        assert r.require("b", int) == 2
        with pytest.raises(ConfigError) as exc:
            r.finish()
        text = str(exc.value)
        assert "a: expected float" in text
        assert "missing required key 'missing'" in text

    def test_unknown_keys_flagged(self):
        r = ConfigReader({"known": 1, "typo.key": 2})
        r.require("known", int)
        with pytest.raises(ConfigError) as exc:
            r.finish()
        assert "unknown key 'typo.key'" in str(exc.value)

    def test_allow_unused_covers_prefix(self):
        r = ConfigReader({"sweep.values": "1,2", "sweep.parameter": "run.dt"})
        r.finish(allow_unused=("sweep",))

    def test_int_promotes_to_float_but_not_bool(self):
        r = ConfigReader({"x": 3, "flag": True})
        assert r.get("x", float) == 3.0
        assert r.get("flag", int) is None
        with pytest.raises(ConfigError):
            r.finish()

    def test_choices_enforced(self):
        r = ConfigReader({"mode": "warp"})
        assert r.require("mode", str, choices=("slow", "fast")) is None
        with pytest.raises(ConfigError) as exc:
            r.finish()
        assert "expected one of slow, fast" in str(exc.value)

    def test_get_returns_default_without_issue(self):
        r = ConfigReader({})
        assert r.get("absent", float, 1.25) == 1.25
        r.finish()

    def test_custom_semantic_error(self):
        r = ConfigReader({"n": 1})
        assert r.require("n", int) == 1
        r.error("n must be even")
        with pytest.raises(ConfigError) as exc:
            r.finish()
        assert "n must be even" in str(exc.value)

    def test_nan_and_inf_floats_round_trip(self):
        text = serialize_config({"big": math.inf})
        assert parse_config(text) == {"big": math.inf}
