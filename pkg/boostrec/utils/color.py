#!/usr/bin/python3

import json
import traceback
from pathlib import Path
from typing import Any, Optional

import pygments
from pygments.formatters import get_formatter_by_name
from pygments.lexers import JsonLexer

from boostrec._config import CONFIG

fmt_name = "terminal"
try:
    import curses

    curses.setupterm()
    if curses.tigetnum("colors") == 256:
        fmt_name = "terminal256"
except Exception:
    # if curses won't import we are probably using Windows
    pass

BASE = "\x1b[0;"

MODIFIERS = {"bright": "1;", "dark": "2;"}

COLORS = {
    "black": "30",
    "red": "31",
    "green": "32",
    "yellow": "33",
    "blue": "34",
    "magenta": "35",
    "cyan": "36",
    "white": "37",
}

NOTIFY_COLORS = {"WARNING": "bright yellow", "ERROR": "bright red", "SUCCESS": "bright green"}

base_path = str(Path(".").absolute())


class Color:
    def __call__(self, color_str: Optional[str] = None) -> str:
        if not CONFIG.settings["console"]["show_colors"]:
            return ""
        if not color_str:
            return BASE + "m"
        try:
            if " " not in color_str:
                return f"{BASE}{COLORS[color_str]}m"
            modifier, color_str = color_str.split()
            return f"{BASE}{MODIFIERS[modifier]}{COLORS[color_str]}m"
        except (KeyError, ValueError):
            return BASE + "m"

    def __str__(self) -> str:
        return self()

    def format_tb(self, exc: Exception, start: Optional[int] = None) -> str:
        if CONFIG.argv["tb"]:
            start = None
        elif start is None:
            # only show frames from inside the package unless --tb is given
            start = -3
        tb = [i.replace("./", "") for i in traceback.format_tb(exc.__traceback__)][start:]
        for i in range(len(tb)):
            lines = tb[i].split("\n")
            info = lines[0].replace(base_path, ".").strip()
            code = lines[1] if len(lines) > 1 else ""
            tb[i] = f"{self('dark white')}{info}{self}"
            if code:
                tb[i] += f"\n{code}"
        tb.append(f"{self('bright red')}{type(exc).__name__}{self}: {exc}")
        return "\n".join(tb)

    def highlight(self, text: str, lexer: Any = None) -> str:
        """
        Apply syntax highlighting to a string, JSON by default.
        """
        if not CONFIG.settings["console"]["show_colors"]:
            return text
        formatter = get_formatter_by_name(fmt_name, style=CONFIG.settings["console"]["color_style"])
        return pygments.highlight(text, lexer or JsonLexer(), formatter)

    def json(self, value: Any) -> str:
        return self.highlight(json.dumps(value, indent=2, sort_keys=True))


def notify(type_: str, msg: str) -> None:
    """Prepends a message with a colored tag and outputs it to the console."""
    color = Color()
    print(f"{color(NOTIFY_COLORS[type_])}{type_}{color}: {msg}")
