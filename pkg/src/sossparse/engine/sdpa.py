"""Sparse SDPA text format: export and parse.

Layout: line 1 constraint count, line 2 block count, line 3 block sizes
(negative = diagonal), line 4 right-hand sides, then one entry per line
"matno blockno i j value" with 1-based indices, i <= j, and matno 0 denoting
the objective.  Lines starting with '"' or '*' are comments.  Floats are
written with shortest round-trip repr so export/parse is bit-exact.
"""

from __future__ import annotations

import re
from typing import List

from ..errors import DomainError
from .relax import Constraint, SdpProblem


class SdpaParseError(DomainError):
    def __init__(self, message, line_no):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


def export_sdpa(problem: SdpProblem) -> str:
    lines: List[str] = []
    lines.append(str(len(problem.constraints)))
    lines.append(str(len(problem.block_sizes)))
    lines.append(" ".join(str(s) for s in problem.block_sizes))
    lines.append(" ".join(repr(c.rhs) for c in problem.constraints) or "")
    for blk, i, j, v in problem.objective:
        _check_entry(problem, blk, i, j)
        lines.append(f"0 {blk + 1} {i + 1} {j + 1} {v!r}")
    for matno, con in enumerate(problem.constraints, start=1):
        for blk, i, j, v in con.entries:
            _check_entry(problem, blk, i, j)
            lines.append(f"{matno} {blk + 1} {i + 1} {j + 1} {v!r}")
    return "\n".join(lines) + "\n"


def _check_entry(problem, blk, i, j):
    if not (0 <= blk < len(problem.block_sizes)):
        raise DomainError(f"block {blk} out of range")
    n = abs(problem.block_sizes[blk])
    if not (0 <= i <= j < n):
        raise DomainError(f"entry ({i},{j}) invalid for block of size {n}")


_SPLIT = re.compile(r"[\s,(){}]+")


def _tokens(line: str):
    return [t for t in _SPLIT.split(line.strip()) if t]


def parse_sdpa(text: str) -> SdpProblem:
    lines = text.splitlines()
    header: List[List[str]] = []
    entries = []
    for no, raw in enumerate(lines, start=1):
        stripped = raw.strip()
        if not stripped or stripped[0] in '"*':
            continue
        toks = _tokens(stripped)
        if len(header) < 4:
            header.append(toks)
            continue
        entries.append((no, toks))

    if len(header) < 4:
        raise SdpaParseError("missing header lines", len(lines))
    try:
        m = int(header[0][0])
        nblocks = int(header[1][0])
    except (ValueError, IndexError):
        raise SdpaParseError("bad constraint/block count", 1) from None
    try:
        sizes = [int(t) for t in header[2]]
    except ValueError:
        raise SdpaParseError("bad block sizes", 3) from None
    if len(sizes) != nblocks:
        raise SdpaParseError(f"expected {nblocks} block sizes, got {len(sizes)}", 3)
    try:
        rhs = [float(t) for t in header[3]]
    except ValueError:
        raise SdpaParseError("bad right-hand sides", 4) from None
    if len(rhs) != m:
        raise SdpaParseError(f"expected {m} right-hand sides, got {len(rhs)}", 4)

    objective = []
    rows = [[] for _ in range(m)]
    for no, toks in entries:
        if len(toks) != 5:
            raise SdpaParseError(f"expected 5 fields, got {len(toks)}", no)
        try:
            matno = int(toks[0])
            blk = int(toks[1]) - 1
            i = int(toks[2]) - 1
            j = int(toks[3]) - 1
            val = float(toks[4])
        except ValueError:
            raise SdpaParseError("malformed entry", no) from None
        if not (0 <= blk < nblocks):
            raise SdpaParseError(f"block {blk + 1} out of range", no)
        n = abs(sizes[blk])
        if not (0 <= i <= j < n):
            raise SdpaParseError(f"entry ({i + 1},{j + 1}) invalid (need i <= j <= {n})", no)
        if sizes[blk] < 0 and i != j:
            raise SdpaParseError("off-diagonal entry in diagonal block", no)
        if matno == 0:
            objective.append((blk, i, j, val))
        elif 1 <= matno <= m:
            rows[matno - 1].append((blk, i, j, val))
        else:
            raise SdpaParseError(f"matrix number {matno} out of range", no)

    constraints = [Constraint(entries=tuple(r), rhs=rv) for r, rv in zip(rows, rhs)]
    return SdpProblem(
        block_sizes=sizes,
        constraints=constraints,
        objective=tuple(objective),
        index=None,
    )
