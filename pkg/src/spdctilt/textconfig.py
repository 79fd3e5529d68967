"""Line-oriented ``key = value`` configuration format.

One parser serves both the crystal data file and the run configuration:
sections open with ``[kind]`` or ``[kind "name"]``, followed by
``key = value`` lines.  Blank lines and lines starting with ``#`` are
ignored.  Number parsing is exact: decimal point only, no locale forms,
no underscores.
"""

import re

from .errors import ConfigError

_SECTION_RE = re.compile(r'^\[([a-z][a-z0-9_]*)(?:\s+"([^"]+)")?\]$')
_KEY_RE = re.compile(r"^[a-z][a-z0-9_]*$")
_FLOAT_RE = re.compile(r"^[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?$")
_INT_RE = re.compile(r"^[+-]?\d+$")

Sections = dict[tuple[str, str | None], dict[str, str]]


def parse_sections(text: str, origin: str = "<config>") -> Sections:
    """Parse configuration text into ``{(kind, name): {key: raw value}}``.

    Raises ConfigError with a line diagnostic on any malformed line,
    duplicate key or duplicate section.
    """
    sections: Sections = {}
    current: dict[str, str] | None = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.startswith("["):
            m = _SECTION_RE.match(line)
            if m is None:
                raise ConfigError(f"{origin}:{lineno}: malformed section header {line!r}")
            ident = (m.group(1), m.group(2))
            if ident in sections:
                raise ConfigError(f"{origin}:{lineno}: duplicate section {line!r}")
            sections[ident] = {}
            current = sections[ident]
            continue
        if "=" not in line:
            raise ConfigError(f"{origin}:{lineno}: expected 'key = value', got {line!r}")
        if current is None:
            raise ConfigError(f"{origin}:{lineno}: key/value pair outside any section")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if not _KEY_RE.match(key):
            raise ConfigError(f"{origin}:{lineno}: invalid key {key!r}")
        if key in current:
            raise ConfigError(f"{origin}:{lineno}: duplicate key {key!r}")
        if not value:
            raise ConfigError(f"{origin}:{lineno}: empty value for key {key!r}")
        current[key] = value
    return sections


def parse_float(value: str, context: str = "value") -> float:
    if not _FLOAT_RE.match(value):
        raise ConfigError(f"{context}: not a plain decimal number: {value!r}")
    return float(value)


def parse_int(value: str, context: str = "value") -> int:
    if not _INT_RE.match(value):
        raise ConfigError(f"{context}: not an integer: {value!r}")
    return int(value)


def parse_floats(value: str, context: str = "value") -> tuple[float, ...]:
    parts = value.split()
    if not parts:
        raise ConfigError(f"{context}: empty number list")
    return tuple(parse_float(p, context) for p in parts)
