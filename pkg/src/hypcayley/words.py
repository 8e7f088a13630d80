"""Words over a generating set and its formal inverses.

A word is a tuple of nonzero ints: ``k`` is the k-th generator (1-based) and
``-k`` its inverse.  Letters are ordered a < A < b < B < ..., which fixes the
shortlex order used for every tie-break in the package.
"""

from typing import Iterable, Tuple

Word = Tuple[int, ...]


def letter_column(letter: int) -> int:
    """Adjacency column of a letter: 2*(k-1) for generator k, +1 for its inverse."""
    return 2 * (abs(letter) - 1) + (1 if letter < 0 else 0)


def column_letter(col: int) -> int:
    k = col // 2 + 1
    return -k if col % 2 else k


def inverse(w: Iterable[int]) -> Word:
    return tuple(-x for x in reversed(tuple(w)))


def free_reduce(w: Iterable[int]) -> Word:
    out = []
    for x in w:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def is_freely_reduced(w: Word) -> bool:
    return all(w[i] != -w[i + 1] for i in range(len(w) - 1))


def cyclically_reduce(w: Iterable[int]) -> Word:
    w = free_reduce(w)
    i, j = 0, len(w)
    while j - i >= 2 and w[i] == -w[j - 1]:
        i += 1
        j -= 1
    return w[i:j]


def cyclic_shifts(w: Word):
    return [w[i:] + w[:i] for i in range(len(w))]


def shortlex_key(w: Word):
    return (len(w), tuple(letter_column(x) for x in w))


def format_word(w: Word, generators) -> str:
    """Render with lowercase generators and uppercase inverses; '1' for the empty word."""
    if not w:
        return "1"
    return "".join(generators[x - 1] if x > 0 else generators[-x - 1].upper() for x in w)


def parse_word(text: str, generators) -> Word:
    """Inverse of :func:`format_word`; whitespace is ignored and '1' is the empty word."""
    index = {g: i + 1 for i, g in enumerate(generators)}
    letters = []
    for ch in text.replace(" ", ""):
        if ch == "1":
            continue
        if ch in index:
            letters.append(index[ch])
        elif ch.islower() is False and ch.lower() in index:
            letters.append(-index[ch.lower()])
        else:
            raise ValueError(f"undeclared symbol {ch!r}")
    return tuple(letters)
