"""Charset specifications -> ordered codepoint lists.

Accepted specs:
  builtin:topN          first N entries of the embedded frequency list
  U+XXXX..U+YYYY        inclusive codepoint range (also with range: prefix)
  file:PATH or PATH     every non-whitespace character in a text file

Results are always sorted ascending and duplicate-free.
"""

import re
from importlib import resources
from pathlib import Path

from .errors import CharsetEmpty, CharsetSpecInvalid

_RANGE_RE = re.compile(r"^(?:range:)?[Uu]\+([0-9A-Fa-f]{1,6})\.\.[Uu]\+([0-9A-Fa-f]{1,6})$")


def builtin_frequency_list() -> list[int]:
    """Embedded frequency-ordered common Chinese characters (not sorted)."""
    text = resources.files("glyphforge.data").joinpath("frequent_chars.txt").read_text("utf-8")
    return [ord(ch) for ch in text if not ch.isspace()]


def load_charset(spec: str) -> list[int]:
    if not isinstance(spec, str) or not spec.strip():
        raise CharsetSpecInvalid("empty charset spec")
    spec = spec.strip()

    if spec.startswith("builtin:"):
        tail = spec[len("builtin:"):]
        if not tail.startswith("top") or not tail[3:].isdigit():
            raise CharsetSpecInvalid(f"unknown builtin charset {spec!r}")
        n = int(tail[3:])
        cps = builtin_frequency_list()[:n]
    elif _RANGE_RE.match(spec):
        m = _RANGE_RE.match(spec)
        lo, hi = int(m.group(1), 16), int(m.group(2), 16)
        if lo > hi:
            raise CharsetSpecInvalid(f"range start U+{lo:04X} exceeds end U+{hi:04X}")
        cps = list(range(lo, hi + 1))
    else:
        path = Path(spec[len("file:"):] if spec.startswith("file:") else spec)
        if not path.is_file():
            raise CharsetSpecInvalid(f"charset spec {spec!r} is not builtin:topN, a U+..U+ range, or a readable file")
        text = path.read_text("utf-8")
        cps = [ord(ch) for ch in text if not ch.isspace()]

    out = sorted(set(cps))
    if not out:
        raise CharsetEmpty(f"charset spec {spec!r} produced no codepoints")
    return out
