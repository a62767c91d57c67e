"""Text normalization and the fuzzy title-similarity score used by dedup."""

from __future__ import annotations

import math
import re
import unicodedata

_DOI_PREFIXES = (
    "https://doi.org/",
    "http://doi.org/",
    "https://dx.doi.org/",
    "http://dx.doi.org/",
    "doi.org/",
    "doi:",
)

_WS_RE = re.compile(r"\s+")


def normalize_doi(doi: str | None) -> str | None:
    """Lowercase a DOI and strip resolver prefixes; None/empty stays None."""
    if doi is None:
        return None
    d = doi.strip().lower()
    for prefix in _DOI_PREFIXES:
        if d.startswith(prefix):
            d = d[len(prefix):]
            break
    d = d.strip().strip("/")
    return d or None


def normalize_title(title: str) -> str:
    """Fold a title to the canonical comparison form.

    Lowercase, replace every character that is not a letter, digit, or
    whitespace by a space (dashes therefore split tokens), collapse runs of
    whitespace, and trim. Unicode letters survive.
    """
    lowered = title.lower()
    chars = [c if (c.isalnum() or c.isspace()) else " " for c in lowered]
    return _WS_RE.sub(" ", "".join(chars)).strip()


def fold_text(text: str) -> str:
    """Accent-fold and strip everything but ASCII letters and digits."""
    decomposed = unicodedata.normalize("NFKD", text)
    stripped = "".join(c for c in decomposed if not unicodedata.combining(c))
    return "".join(c for c in stripped.lower() if c.isalnum() and c.isascii())


def surname_and_initial(display_name: str) -> tuple[str, str]:
    """Split a display name into (folded surname, first initial).

    A comma marks "Surname, Given" order; otherwise the last whitespace
    token is the surname. The initial is the first letter of the given part
    after folding, empty when there is no given part.
    """
    name = display_name.strip()
    if "," in name:
        surname_part, _, given_part = name.partition(",")
    else:
        tokens = name.rsplit(None, 1)
        if len(tokens) == 2:
            given_part, surname_part = tokens
        else:
            given_part, surname_part = "", name
    surname = fold_text(surname_part)
    given = fold_text(given_part)
    return surname, given[:1]


def surname_of(display_name: str) -> str:
    return surname_and_initial(display_name)[0]


def _lcs_length(a: str, b: str) -> int:
    # Row-compressed longest-common-subsequence table.
    if not a or not b:
        return 0
    prev = [0] * (len(b) + 1)
    for ca in a:
        cur = [0]
        append = cur.append
        for j, cb in enumerate(b, 1):
            if ca == cb:
                append(prev[j - 1] + 1)
            else:
                left = cur[-1]
                up = prev[j]
                append(left if left >= up else up)
        prev = cur
    return prev[-1]


def indel_similarity(a: str, b: str) -> float:
    """Normalized insert/delete similarity: 1 - dist / (len(a) + len(b)).

    The indel distance is the minimum number of single-character insertions
    plus deletions turning a into b, i.e. len(a) + len(b) - 2 * LCS(a, b).
    Two empty strings are defined as identical (similarity 1).
    """
    total = len(a) + len(b)
    if total == 0:
        return 1.0
    dist = total - 2 * _lcs_length(a, b)
    return 1.0 - dist / total


def token_set_ratio(a: str, b: str) -> int:
    """Token-set similarity on a 0..100 integer scale.

    Both strings are split on whitespace into unique token sets. With
    I = intersection, DA = tokens only in a, DB = tokens only in b (each
    sorted and space-joined, I prefixing the differences), the score is the
    maximum normalized indel similarity over the pairs (I, I+DA), (I, I+DB),
    (I+DA, I+DB), scaled to 100 and rounded half-up. A token set that is a
    subset of the other therefore scores exactly 100.
    """
    tokens_a = set(a.split())
    tokens_b = set(b.split())
    inter = sorted(tokens_a & tokens_b)
    diff_a = sorted(tokens_a - tokens_b)
    diff_b = sorted(tokens_b - tokens_a)
    base = " ".join(inter)
    combined_a = " ".join(inter + diff_a)
    combined_b = " ".join(inter + diff_b)
    best = max(
        indel_similarity(base, combined_a),
        indel_similarity(base, combined_b),
        indel_similarity(combined_a, combined_b),
    )
    return int(math.floor(best * 100.0 + 0.5))
