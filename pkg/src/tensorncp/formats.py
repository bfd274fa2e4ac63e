"""Plain-text tensor, vector and instance files.

Blocks (``#`` starts a comment, whitespace is free-form, indices are 1-based)::

    tensor <m> <n>                 followed by n^m reals, first index slowest
    tensor-sparse <m> <n> <nnz>    followed by nnz lines "i1 ... im value"
    vector <n>                     followed by n reals
    gtcp <m> <n>                   followed by m/2 tensor blocks (orders m, m-2, ..., 2)
                                   and one vector block holding q

A file may hold several blocks back to back.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .solver import ProblemInstance
from .tensor_core import Tensor


class ParseError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


class _Tokens:
    """Token stream that remembers the source line of every token."""

    def __init__(self, text: str):
        self.items: list[tuple[str, int]] = []
        self.last_line = 0
        for lineno, raw in enumerate(text.splitlines(), start=1):
            self.last_line = lineno
            for tok in raw.split("#", 1)[0].split():
                self.items.append((tok, lineno))
        self.pos = 0

    def done(self) -> bool:
        return self.pos >= len(self.items)

    def peek(self) -> tuple[str, int] | None:
        return None if self.done() else self.items[self.pos]

    def next(self, what: str, after_line: int) -> tuple[str, int]:
        if self.done():
            raise ParseError(f"unexpected end of input while reading {what}", max(after_line + 1, self.last_line))
        tok = self.items[self.pos]
        self.pos += 1
        return tok

    def integer(self, what: str, after_line: int) -> tuple[int, int]:
        tok, line = self.next(what, after_line)
        try:
            return int(tok), line
        except ValueError:
            raise ParseError(f"expected integer {what}, got {tok!r}", line) from None

    def real(self, what: str, after_line: int) -> tuple[float, int]:
        tok, line = self.next(what, after_line)
        try:
            value = float(tok)
        except ValueError:
            raise ParseError(f"non-numeric token {tok!r} in {what}", line) from None
        if not np.isfinite(value):
            raise ParseError(f"non-finite value {tok!r} in {what}", line)
        return value, line

    def header_is_next(self) -> bool:
        tok = self.peek()
        return tok is not None and tok[0] in HEADERS


HEADERS = ("tensor", "tensor-sparse", "vector", "gtcp")


def _read_reals(toks: _Tokens, count: int, what: str, header_line: int) -> list[float]:
    values, line = [], header_line
    for k in range(count):
        if toks.done() or toks.header_is_next():
            at = (line if k else header_line + 1) if toks.done() else toks.peek()[1]
            raise ParseError(f"{what}: expected {count} entries, found {k}", at)
        v, line = toks.real(what, line)
        values.append(v)
    return values


def _read_tensor(toks: _Tokens, kind: str, header_line: int) -> Tensor:
    m, line = toks.integer("order", header_line)
    n, line = toks.integer("dimension", line)
    if m < 1 or n < 1:
        raise ParseError(f"order and dimension must be positive, got {m} {n}", header_line)
    if kind == "tensor":
        return Tensor(m, n, _read_reals(toks, n**m, "tensor", header_line))
    nnz, line = toks.integer("entry count", line)
    data = np.zeros((n,) * m)
    seen = set()
    for k in range(nnz):
        if toks.done() or toks.header_is_next():
            at = (line if k else header_line + 1) if toks.done() else toks.peek()[1]
            raise ParseError(f"sparse tensor: expected {nnz} entries, found {k}", at)
        idx = []
        for _ in range(m):
            i, line = toks.integer("index", line)
            if not 1 <= i <= n:
                raise ParseError(f"index {i} out of range 1..{n}", line)
            idx.append(i - 1)
        v, line = toks.real("sparse tensor", line)
        if tuple(idx) in seen:
            raise ParseError(f"duplicate entry {tuple(i + 1 for i in idx)}", line)
        seen.add(tuple(idx))
        data[tuple(idx)] = v
    return Tensor.from_array(data)


def _read_vector(toks: _Tokens, header_line: int) -> np.ndarray:
    n, _ = toks.integer("vector length", header_line)
    if n < 1:
        raise ParseError("vector length must be positive", header_line)
    return np.array(_read_reals(toks, n, "vector", header_line))


def _read_block(toks: _Tokens):
    tok, line = toks.next("block header", 0)
    if tok in ("tensor", "tensor-sparse"):
        return _read_tensor(toks, tok, line)
    if tok == "vector":
        return _read_vector(toks, line)
    if tok == "gtcp":
        m, _ = toks.integer("order", line)
        n, _ = toks.integer("dimension", line)
        if m < 2 or m % 2:
            raise ParseError(f"gtcp order must be even and >= 2, got {m}", line)
        blocks = [_read_block(toks) for _ in range(m // 2 + 1)]
        *tensors, q = blocks
        if not all(isinstance(T, Tensor) for T in tensors) or not isinstance(q, np.ndarray):
            raise ParseError("gtcp expects m/2 tensor blocks followed by one vector block", line)
        if [T.order for T in tensors] != list(range(m, 1, -2)) or any(T.dim != n for T in tensors):
            raise ParseError(f"gtcp tensor blocks must have orders {list(range(m, 1, -2))} and dimension {n}", line)
        try:
            return ProblemInstance.gncp(tensors, q)
        except ValueError as exc:
            raise ParseError(str(exc), line) from None
    raise ParseError(f"unknown block header {tok!r}; expected one of {', '.join(HEADERS)}", line)


def parse_blocks(text: str) -> list:
    """All blocks in ``text``: Tensors, vectors (ndarrays) and GNCP instances."""
    toks = _Tokens(text)
    blocks = []
    while not toks.done():
        blocks.append(_read_block(toks))
    if not blocks:
        raise ParseError("no data found", 1)
    return blocks


def _single(text: str, cls, what: str):
    blocks = parse_blocks(text)
    if len(blocks) != 1 or not isinstance(blocks[0], cls):
        raise ParseError(f"expected exactly one {what} block")
    return blocks[0]


def parse_tensor(text: str) -> Tensor:
    return _single(text, Tensor, "tensor")


def parse_vector(text: str) -> np.ndarray:
    return _single(text, np.ndarray, "vector")


def parse_gncp(text: str) -> ProblemInstance:
    return _single(text, ProblemInstance, "gtcp")


def _num(v: float) -> str:
    return repr(float(v))


def format_tensor(T: Tensor, sparse: bool = False) -> str:
    if sparse:
        nz = np.argwhere(T.data != 0)
        lines = [f"tensor-sparse {T.order} {T.dim} {len(nz)}"]
        lines += [" ".join(str(i + 1) for i in idx) + " " + _num(T.data[tuple(idx)]) for idx in nz]
        return "\n".join(lines) + "\n"
    rows = T.data.reshape(-1, T.dim)
    return f"tensor {T.order} {T.dim}\n" + "\n".join(" ".join(_num(v) for v in row) for row in rows) + "\n"


def format_vector(v) -> str:
    v = np.asarray(v, dtype=float).reshape(-1)
    return f"vector {v.size}\n" + " ".join(_num(x) for x in v) + "\n"


def format_instance(P: ProblemInstance) -> str:
    """Serialize ``P``; NCP as a tensor block plus a vector block, GNCP as a gtcp block."""
    body = "".join(format_tensor(T) for T in P.tensors) + format_vector(P.q)
    if P.kind == "GNCP":
        return f"gtcp {P.m} {P.n}\n" + body
    return body


@dataclass
class InstanceFile:
    instance: ProblemInstance
    paths: tuple
    variant: str


def instance_from_blocks(blocks: list) -> tuple[ProblemInstance, str]:
    if len(blocks) == 1 and isinstance(blocks[0], ProblemInstance):
        return blocks[0], "gtcp"
    if len(blocks) == 2 and isinstance(blocks[0], Tensor) and isinstance(blocks[1], np.ndarray):
        try:
            return ProblemInstance.ncp(blocks[0], blocks[1]), "ncp"
        except ValueError as exc:
            raise ParseError(str(exc)) from None
    raise ParseError("expected a gtcp block, or a tensor block followed by a vector block")


def load_instance(*paths) -> InstanceFile:
    blocks = []
    for p in paths:
        blocks += parse_blocks(Path(p).read_text())
    P, variant = instance_from_blocks(blocks)
    return InstanceFile(P, tuple(str(p) for p in paths), variant)
