"""Flat key = value run configuration.

The format is one dotted key per line, ``#`` comment lines, blank lines
ignored:

    mode = euler1d
    grid.length = 6.28318
    kernel.type = constant
    kernel.phi0 = 1.0

Values are typed on read: ``true``/``false`` become bool, then int, then
float, and anything else stays a string. Parsing collects every problem in
the file and raises one ConfigError naming them all with line numbers;
duplicate keys report both offending lines. serialize_config() emits a
canonical sorted form that reparses to the same mapping.
"""

from __future__ import annotations

import re
from typing import Dict, List, Optional, Sequence, Tuple, Union

from .errors import ConfigError

__all__ = [
    "parse_config",
    "serialize_config",
    "load_config",
    "save_config",
    "ConfigReader",
]

Value = Union[bool, int, float, str]

_KEY_RE = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*(\.[A-Za-z_][A-Za-z0-9_]*)*$")


def _convert(raw: str) -> Value:
    if raw == "true":
        return True
    if raw == "false":
        return False
    try:
        return int(raw)
    except ValueError:
        pass
    try:
        return float(raw)
    except ValueError:
        pass
    return raw


def parse_config(text: str) -> Dict[str, Value]:
    """Parse config text into a flat {dotted key: typed value} mapping."""
    out: Dict[str, Value] = {}
    first_line: Dict[str, int] = {}
    issues: List[Tuple[Optional[int], str]] = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        if "=" not in stripped:
            issues.append((lineno, f"expected 'key = value', got {stripped!r}"))
            continue
        key, _, raw = stripped.partition("=")
        key = key.strip()
        raw = raw.strip()
        if not _KEY_RE.match(key):
            issues.append((lineno, f"invalid key {key!r}"))
            continue
        if not raw:
            issues.append((lineno, f"empty value for key {key!r}"))
            continue
        if key in first_line:
            issues.append(
                (lineno, f"duplicate key {key!r} (first set on line {first_line[key]})")
            )
            continue
        first_line[key] = lineno
        out[key] = _convert(raw)
    if issues:
        raise ConfigError(issues)
    return out


def serialize_config(cfg: Dict[str, Value]) -> str:
    """Canonical text form: sorted keys, one per line, reparses identically."""
    lines = []
    for key in sorted(cfg):
        if not _KEY_RE.match(key):
            raise ConfigError([(None, f"invalid key {key!r}")])
        value = cfg[key]
        if isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, (int, float)):
            text = repr(value)
        else:
            text = str(value)
            if _convert(text) != value or "\n" in text or text != text.strip():
                raise ConfigError(
                    [(None, f"value for {key!r} does not survive a round trip: {value!r}")]
                )
        lines.append(f"{key} = {text}")
    return "\n".join(lines) + ("\n" if lines else "")


def load_config(path) -> Dict[str, Value]:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def save_config(path, cfg: Dict[str, Value]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(serialize_config(cfg))


class ConfigReader:
    """Typed access to a parsed config that gathers every complaint.

    Callers pull keys with require()/get(), then call finish(), which
    raises one ConfigError listing all missing keys, type mismatches,
    semantic errors, and any keys nobody consumed (typo guard).
    """

    def __init__(self, cfg: Dict[str, Value]):
        self._cfg = dict(cfg)
        self._used: set = set()
        self._issues: List[Tuple[Optional[int], str]] = []

    def has(self, key: str) -> bool:
        return key in self._cfg

    def error(self, message: str) -> None:
        self._issues.append((None, message))

    def _fetch(self, key: str, kind: type, choices: Optional[Sequence[str]]):
        self._used.add(key)
        value = self._cfg[key]
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if kind is int and isinstance(value, bool):
            self.error(f"{key}: expected {kind.__name__}, got bool")
            return None
        if not isinstance(value, kind):
            self.error(f"{key}: expected {kind.__name__}, got {type(value).__name__} ({value!r})")
            return None
        if choices is not None and value not in choices:
            self.error(f"{key}: expected one of {', '.join(map(str, choices))}, got {value!r}")
            return None
        return value

    def require(self, key: str, kind: type = str, choices: Optional[Sequence[str]] = None):
        if key not in self._cfg:
            self._used.add(key)
            self.error(f"missing required key {key!r}")
            return None
        return self._fetch(key, kind, choices)

    def get(self, key: str, kind: type = str, default=None, choices: Optional[Sequence[str]] = None):
        if key not in self._cfg:
            self._used.add(key)
            return default
        return self._fetch(key, kind, choices)

    def finish(self, allow_unused: Sequence[str] = ()) -> None:
        leftover = set(self._cfg) - self._used
        for key in sorted(leftover):
            if any(key == a or key.startswith(a + ".") for a in allow_unused):
                continue
            self._issues.append((None, f"unknown key {key!r}"))
        if self._issues:
            raise ConfigError(self._issues)
