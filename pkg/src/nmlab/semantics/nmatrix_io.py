"""
Reading and writing the line-oriented Nmatrix text format.

Format::

    values a b c
    designated c
    conn g 2
    g a a = c
    g * * = b c        # wildcard row

``#`` starts a comment. Nullary connectives are written ``conn zero 0`` and
``zero = r_eq0 r_ge0``.
"""

import logging
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

from nmlab.errors import FileFormatError, NmatrixError
from .nmatrix import WILDCARD, Interpretation, Nmatrix

logger = logging.getLogger(__name__)


def parse_nmatrix(text: str, source: Optional[str] = None, name: Optional[str] = None) -> Nmatrix:
    """
    Parse Nmatrix text.

    Args:
        text: File contents.
        source: Label used in error messages (usually the path).
        name: Name given to the resulting Nmatrix.

    Returns:
        The validated Nmatrix.

    Raises:
        FileFormatError: On malformed lines (the line number is reported).
        NmatrixError: If a table is partial or otherwise invalid.
    """
    values: Optional[List[str]] = None
    designated: Optional[List[str]] = None
    arities: Dict[str, int] = {}
    rows: Dict[str, List[Tuple[Tuple[str, ...], Tuple[str, ...]]]] = {}
    seen_rows: Dict[str, set] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        tokens = line.split()
        head = tokens[0]
        if head == "values" and "=" not in tokens:
            if values is not None:
                raise FileFormatError("'values' given twice", lineno, source)
            values = tokens[1:]
        elif head == "designated" and "=" not in tokens:
            if designated is not None:
                raise FileFormatError("'designated' given twice", lineno, source)
            designated = tokens[1:]
        elif head == "conn" and "=" not in tokens:
            if len(tokens) != 3 or not tokens[2].isdigit():
                raise FileFormatError("expected 'conn <name> <arity>'", lineno, source)
            conn = tokens[1]
            if conn in arities:
                raise FileFormatError(f"connective '{conn}' declared twice", lineno, source)
            arities[conn] = int(tokens[2])
            rows[conn] = []
            seen_rows[conn] = set()
        else:
            if "=" not in tokens:
                raise FileFormatError(f"unrecognised line '{line}'", lineno, source)
            split_at = tokens.index("=")
            lhs, rhs = tokens[:split_at], tokens[split_at + 1:]
            conn = lhs[0] if lhs else None
            if conn not in arities:
                raise FileFormatError(f"row for undeclared connective '{conn}'", lineno, source)
            args = tuple(lhs[1:])
            if len(args) != arities[conn]:
                raise FileFormatError(
                    f"'{conn}' has arity {arities[conn]} but the row lists {len(args)} arguments",
                    lineno, source)
            if not rhs:
                raise FileFormatError("empty cell", lineno, source)
            if WILDCARD in rhs:
                raise FileFormatError(f"'{WILDCARD}' cannot appear on the right-hand side", lineno, source)
            if args in seen_rows[conn]:
                raise FileFormatError(f"row {conn} {' '.join(args)} listed twice", lineno, source)
            seen_rows[conn].add(args)
            rows[conn].append((args, tuple(rhs)))

    if values is None:
        raise FileFormatError("missing 'values' line", None, source)
    if designated is None:
        raise FileFormatError("missing 'designated' line", None, source)

    interpretations = {conn: Interpretation(arities[conn], rows[conn]) for conn in arities}
    try:
        nmatrix = Nmatrix(values, designated, interpretations, name=name)
    except NmatrixError as exc:
        if source:
            raise NmatrixError(f"{source}: {exc}") from exc
        raise
    logger.info(f"Loaded Nmatrix '{nmatrix.name}': {len(nmatrix.values)} values, "
                f"{len(nmatrix.designated)} designated, {len(arities)} connectives")
    return nmatrix


def load_nmatrix(path: Union[str, Path]) -> Nmatrix:
    """Load an Nmatrix file; the file stem becomes its name."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise FileFormatError(f"cannot read file: {exc}", None, str(path)) from exc
    return parse_nmatrix(text, source=str(path), name=path.stem)


def _row_text(conn: str, pattern: Tuple[str, ...], cell, nmatrix: Nmatrix) -> str:
    lhs = " ".join((conn,) + pattern)
    return f"{lhs} = {' '.join(nmatrix.sorted_values(cell))}"


def format_nmatrix(nmatrix: Nmatrix) -> str:
    """
    Render ``nmatrix`` in the text format.

    Explicit rows come first (in value order), then wildcard rows in
    precedence order, so reading the text back gives the same tables.
    """
    lines = [
        "values " + " ".join(nmatrix.values),
        ("designated " + " ".join(nmatrix.sorted_values(nmatrix.designated))).rstrip(),
    ]
    for conn, interp in nmatrix.interpretations.items():
        lines.append("")
        lines.append(f"conn {conn} {interp.arity}")
        explicit = sorted(interp.explicit_rows, key=lambda row: [nmatrix.index[v] for v in row[0]])
        for pattern, cell in explicit:
            lines.append(_row_text(conn, pattern, cell, nmatrix))
        for pattern, cell in interp.wildcard_rows:
            lines.append(_row_text(conn, pattern, cell, nmatrix))
    return "\n".join(lines) + "\n"


def dump_nmatrix(nmatrix: Nmatrix, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(format_nmatrix(nmatrix), encoding="utf-8")
    logger.info(f"Wrote Nmatrix '{nmatrix.name}' to {path}")
    return path
