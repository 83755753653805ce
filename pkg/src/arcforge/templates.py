"""Reasoning chain templates.

Template lines carry {name} slots filled from a sample's task
variables, so the exported explanation always matches the rule the
witness actually applies. Formatters:

    {c:color_name}      canonical color word, e.g. "yellow"
    {n:ordinal}         "first", "second", ... ("23rd" past twenty)
    {n:plural(word)}    "word" when n is 1, "words" otherwise

A plain {name} renders ints as digits, colors as digits, and edge or
axis names as their lowercase word.
"""

from __future__ import annotations

import re
from typing import Mapping

from .errors import TemplateError
from .grid import Color, color_name
from .objects import Axis, Direction

_SLOT_RE = re.compile(r"\{([A-Za-z_][A-Za-z0-9_]*)(?::([a-z_]+)(?:\(([A-Za-z_]+)\))?)?\}")
_BRACE_RE = re.compile(r"[{}]")

_ORDINALS = (
    "zeroth", "first", "second", "third", "fourth", "fifth", "sixth",
    "seventh", "eighth", "ninth", "tenth", "eleventh", "twelfth",
    "thirteenth", "fourteenth", "fifteenth", "sixteenth", "seventeenth",
    "eighteenth", "nineteenth", "twentieth",
)


def _ordinal(n: int) -> str:
    if 0 <= n < len(_ORDINALS):
        return _ORDINALS[n]
    if n % 100 in (11, 12, 13):
        return f"{n}th"
    suffix = {1: "st", 2: "nd", 3: "rd"}.get(n % 10, "th")
    return f"{n}{suffix}"


def _plain(value: object) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, (Direction, Axis)):
        return value.value
    if isinstance(value, int):
        return str(int(value))
    return str(value)


def instantiate_template(lines: tuple[str, ...], taskvars: Mapping[str, object]) -> tuple[str, ...]:
    """Fill every slot in every line, or raise TemplateError.

    The output never contains brace characters, which is what the
    sidecar integrity checks rely on.
    """
    out: list[str] = []
    for idx, line in enumerate(lines):
        rendered: list[str] = []
        cursor = 0
        for m in _SLOT_RE.finditer(line):
            rendered.append(line[cursor : m.start()])
            name, fmt, fmt_arg = m.group(1), m.group(2), m.group(3)
            if name not in taskvars:
                raise TemplateError(f"unknown slot '{name}'", idx, m.group(0))
            value = taskvars[name]
            if fmt is None:
                rendered.append(_plain(value))
            elif fmt == "color_name":
                try:
                    rendered.append(color_name(int(value)))
                except (TypeError, ValueError) as e:
                    raise TemplateError(
                        f"slot '{name}' is not a color: {value!r}", idx, m.group(0)
                    ) from e
            elif fmt == "ordinal":
                if not isinstance(value, int) or isinstance(value, (bool, Color)):
                    raise TemplateError(
                        f"slot '{name}' is not an integer: {value!r}", idx, m.group(0)
                    )
                rendered.append(_ordinal(value))
            elif fmt == "plural":
                if fmt_arg is None:
                    raise TemplateError("plural needs a word argument", idx, m.group(0))
                if not isinstance(value, int) or isinstance(value, bool):
                    raise TemplateError(
                        f"slot '{name}' is not an integer: {value!r}", idx, m.group(0)
                    )
                rendered.append(fmt_arg if int(value) == 1 else f"{fmt_arg}s")
            else:
                raise TemplateError(f"unknown formatter '{fmt}'", idx, m.group(0))
            cursor = m.end()
        rendered.append(line[cursor:])
        text = "".join(rendered)
        stray = _BRACE_RE.search(text)
        if stray:
            raise TemplateError(f"unresolvable brace in line: {text!r}", idx, stray.group(0))
        out.append(text)
    return tuple(out)
