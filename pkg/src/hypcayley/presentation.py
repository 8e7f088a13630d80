"""Finite presentations and their text file format.

File format::

    # comment
    generators: a b c d
    relator: a b A B c d C D

Lowercase tokens are generators, uppercase their inverses.  Optional
``rule: l1 l2 -> r1 r2`` lines carry rewrite rules for the rewriting backend.
"""

from dataclasses import dataclass, field
from importlib import resources
from typing import Tuple

from .errors import PresentationError
from .words import Word, cyclically_reduce, format_word

FIXTURES = ("free2", "z2", "surface2")


@dataclass(frozen=True)
class Presentation:
    generators: Tuple[str, ...]
    relators: Tuple[Word, ...] = ()
    rules: Tuple[Tuple[Word, Word], ...] = field(default=(), compare=False)

    def __post_init__(self):
        if not self.generators:
            raise PresentationError("empty generator list")
        if len(set(self.generators)) != len(self.generators):
            raise PresentationError("duplicate generator")
        n = len(self.generators)
        for r in self.relators:
            if not r:
                raise PresentationError("empty relator")
            if any(x == 0 or abs(x) > n for x in r):
                raise PresentationError(f"relator {r} uses an undeclared generator")
            if cyclically_reduce(r) != tuple(r):
                raise PresentationError(f"relator {r} is not cyclically reduced")

    @property
    def rank(self) -> int:
        return len(self.generators)

    def format(self, w: Word) -> str:
        return format_word(w, self.generators)

    def to_text(self) -> str:
        lines = ["generators: " + " ".join(self.generators)]
        for r in self.relators:
            lines.append("relator: " + " ".join(self.format((x,)) for x in r))
        for lhs, rhs in self.rules:
            lines.append(
                "rule: "
                + " ".join(self.format((x,)) for x in lhs)
                + " -> "
                + " ".join(self.format((x,)) for x in rhs)
            )
        return "\n".join(lines) + "\n"


def _tokens(body, index, lineno):
    letters = []
    for tok in body.split():
        for ch in tok:
            if ch in index:
                letters.append(index[ch])
            elif ch.isupper() and ch.lower() in index:
                letters.append(-index[ch.lower()])
            else:
                raise PresentationError(f"line {lineno}: undeclared symbol {ch}")
    return tuple(letters)


def parse_presentation(text: str) -> Presentation:
    generators = None
    relators = []
    rules = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        key, sep, body = line.partition(":")
        if not sep:
            raise PresentationError(f"line {lineno}: expected 'key: value'")
        key = key.strip().lower()
        if key == "generators":
            if generators is not None:
                raise PresentationError(f"line {lineno}: generators declared twice")
            gens = body.split()
            for g in gens:
                if len(g) != 1 or not g.islower():
                    raise PresentationError(f"line {lineno}: generator {g!r} must be one lowercase letter")
            if not gens:
                raise PresentationError("empty generator list")
            if len(set(gens)) != len(gens):
                raise PresentationError(f"line {lineno}: duplicate generator")
            generators = tuple(gens)
            continue
        if generators is None:
            raise PresentationError(f"line {lineno}: generators must come first")
        index = {g: i + 1 for i, g in enumerate(generators)}
        if key == "relator":
            word = cyclically_reduce(_tokens(body, index, lineno))
            if not word:
                raise PresentationError(f"line {lineno}: relator reduces to the empty word")
            relators.append(word)
        elif key == "rule":
            lhs, arrow, rhs = body.partition("->")
            if not arrow:
                raise PresentationError(f"line {lineno}: rule needs '->'")
            rules.append((_tokens(lhs, index, lineno), _tokens(rhs, index, lineno)))
        else:
            raise PresentationError(f"line {lineno}: unknown key {key!r}")
    if generators is None:
        raise PresentationError("empty generator list")
    return Presentation(generators, tuple(relators), tuple(rules))


def load_presentation(name_or_path) -> Presentation:
    """Load a built-in fixture by name (free2, z2, surface2) or a file path."""
    name = str(name_or_path)
    stem = name[:-4] if name.endswith(".grp") else name
    if stem in FIXTURES and "/" not in name:
        text = resources.files("hypcayley.data").joinpath(stem + ".grp").read_text()
    else:
        with open(name, encoding="utf-8") as fh:
            text = fh.read()
    return parse_presentation(text)
