"""Dense immutable matrices over the supported rings.

A p x q matrix stands for the map D^{1 x p} -> D^{1 x q} given by right
multiplication of row vectors.
"""
from __future__ import annotations

from .rings import ParseError, Ring, _ExprParser

__all__ = ["Mat", "parse_matrix"]


class Mat:
    __slots__ = ("ring", "nrows", "ncols", "rows", "_hash")

    def __init__(self, ring: Ring, nrows: int, ncols: int, rows):
        self.ring = ring
        self.nrows = nrows
        self.ncols = ncols
        self.rows = tuple(tuple(r) for r in rows)
        self._hash = None
        if len(self.rows) != nrows or any(len(r) != ncols for r in self.rows):
            raise ValueError("matrix shape does not match its entries")

    # constructors ---------------------------------------------------------
    @classmethod
    def from_rows(cls, ring, rows, ncols=None):
        rows = [[ring.coerce(x) for x in r] for r in rows]
        if ncols is None:
            if not rows:
                raise ValueError("cannot infer column count of an empty matrix")
            ncols = len(rows[0])
        return cls(ring, len(rows), ncols, rows)

    @classmethod
    def from_flat(cls, ring, nrows, ncols, entries):
        entries = [ring.coerce(x) for x in entries]
        if len(entries) != nrows * ncols:
            raise ValueError("entry count does not match the shape")
        return cls(ring, nrows, ncols, [entries[i * ncols:(i + 1) * ncols] for i in range(nrows)])

    @classmethod
    def zero(cls, ring, nrows, ncols):
        z = ring.zero
        return cls(ring, nrows, ncols, [[z] * ncols for _ in range(nrows)])

    @classmethod
    def identity(cls, ring, n):
        z, o = ring.zero, ring.one
        return cls(ring, n, n, [[o if i == j else z for j in range(n)] for i in range(n)])

    # basic protocol ---------------------------------------------------------
    @property
    def shape(self):
        return (self.nrows, self.ncols)

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def __eq__(self, other):
        return (isinstance(other, Mat) and self.shape == other.shape
                and self.ring == other.ring and self.rows == other.rows)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.ring, self.nrows, self.ncols, self.rows))
        return self._hash

    def __repr__(self):
        return f"Mat({self.ring}, {self.nrows}x{self.ncols}, {self.to_text()})"

    def entries(self):
        return [x for r in self.rows for x in r]

    def is_zero(self):
        return all(not x for r in self.rows for x in r)

    def zero_rows(self):
        return [i for i, r in enumerate(self.rows) if all(not x for x in r)]

    # arithmetic -------------------------------------------------------------
    def __add__(self, other):
        self._check_same(other)
        return Mat(self.ring, self.nrows, self.ncols,
                   [[a + b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __sub__(self, other):
        self._check_same(other)
        return Mat(self.ring, self.nrows, self.ncols,
                   [[a - b for a, b in zip(r, s)] for r, s in zip(self.rows, other.rows)])

    def __neg__(self):
        return Mat(self.ring, self.nrows, self.ncols, [[-a for a in r] for r in self.rows])

    def scale(self, c):
        c = self.ring.coerce(c)
        return Mat(self.ring, self.nrows, self.ncols, [[c * a for a in r] for r in self.rows])

    def __mul__(self, other):
        if not isinstance(other, Mat):
            return self.scale(other)
        if self.ncols != other.nrows:
            raise ValueError(f"cannot multiply {self.shape} by {other.shape}")
        if self.ring != other.ring:
            raise ValueError("ring mismatch")
        zero = self.ring.zero
        ocols = list(zip(*other.rows)) if other.nrows else [()] * other.ncols
        out = []
        for r in self.rows:
            nz = [(k, a) for k, a in enumerate(r) if a]
            row = []
            for col in ocols:
                s = zero
                for k, a in nz:
                    b = col[k]
                    if b:
                        s = s + a * b
                row.append(s)
            out.append(row)
        return Mat(self.ring, self.nrows, other.ncols, out)

    def _check_same(self, other):
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch {self.shape} vs {other.shape}")
        if self.ring != other.ring:
            raise ValueError("ring mismatch")

    # structure ---------------------------------------------------------------
    def transpose(self):
        if self.nrows == 0:
            return Mat(self.ring, self.ncols, 0, [[] for _ in range(self.ncols)])
        return Mat(self.ring, self.ncols, self.nrows, list(zip(*self.rows)))

    T = property(transpose)

    def row(self, i):
        return Mat(self.ring, 1, self.ncols, [self.rows[i]])

    def select_rows(self, idx):
        idx = list(idx)
        return Mat(self.ring, len(idx), self.ncols, [self.rows[i] for i in idx])

    def select_cols(self, idx):
        idx = list(idx)
        return Mat(self.ring, self.nrows, len(idx), [[r[j] for j in idx] for r in self.rows])

    def block(self, r0, r1, c0, c1):
        return Mat(self.ring, r1 - r0, c1 - c0, [r[c0:c1] for r in self.rows[r0:r1]])

    def drop_zero_rows(self):
        return Mat(self.ring, 0, self.ncols, []).stack(
            *[self.row(i) for i in range(self.nrows) if any(self.rows[i])])

    def stack(self, *others):
        rows = list(self.rows)
        for o in others:
            if o.ncols != self.ncols:
                raise ValueError(f"cannot stack {self.shape} and {o.shape}")
            rows.extend(o.rows)
        return Mat(self.ring, len(rows), self.ncols, rows)

    def augment(self, *others):
        rows = [list(r) for r in self.rows]
        ncols = self.ncols
        for o in others:
            if o.nrows != self.nrows:
                raise ValueError(f"cannot augment {self.shape} and {o.shape}")
            for r, s in zip(rows, o.rows):
                r.extend(s)
            ncols += o.ncols
        return Mat(self.ring, self.nrows, ncols, rows)

    @staticmethod
    def block_diagonal(ring, blocks):
        nr = sum(b.nrows for b in blocks)
        nc = sum(b.ncols for b in blocks)
        z = ring.zero
        rows = []
        c0 = 0
        for b in blocks:
            for r in b.rows:
                rows.append([z] * c0 + list(r) + [z] * (nc - c0 - b.ncols))
            c0 += b.ncols
        return Mat(ring, nr, nc, rows)

    @staticmethod
    def block_matrix(ring, blocks, row_sizes, col_sizes):
        """Assemble from a dict {(i, j): Mat}; missing blocks are zero."""
        z = ring.zero
        rows = []
        for i, rs in enumerate(row_sizes):
            band = [[z] * sum(col_sizes) for _ in range(rs)]
            c0 = 0
            for j, cs in enumerate(col_sizes):
                b = blocks.get((i, j))
                if b is not None:
                    if b.shape != (rs, cs):
                        raise ValueError(f"block {(i, j)} has shape {b.shape}, expected {(rs, cs)}")
                    for r in range(rs):
                        band[r][c0:c0 + cs] = b.rows[r]
                c0 += cs
            rows.extend(band)
        return Mat(ring, sum(row_sizes), sum(col_sizes), rows)

    def kron(self, other):
        """Kronecker product with row index (i, k) and column index (j, l)."""
        rows = []
        for r in self.rows:
            for s in other.rows:
                rows.append([a * b for a in r for b in s])
        return Mat(self.ring, self.nrows * other.nrows, self.ncols * other.ncols, rows)

    def map_entries(self, f):
        return Mat(self.ring, self.nrows, self.ncols, [[f(a) for a in r] for r in self.rows])

    # text --------------------------------------------------------------------
    def to_text(self):
        fmt = self.ring.format
        return "[ " + ", ".join(fmt(a) for a in self.entries()) + " ]" if self.nrows * self.ncols else "[ ]"

    def pretty(self):
        fmt = self.ring.format
        cells = [[fmt(a) for a in r] for r in self.rows]
        if not cells or not self.ncols:
            return f"(an empty {self.nrows} x {self.ncols} matrix)"
        width = max(len(c) for r in cells for c in r)
        return "\n".join("[ " + ", ".join(c.rjust(width) for c in r) + " ]" for r in cells)


def parse_matrix(text: str, nrows: int, ncols: int, ring: Ring, line: int = 1, column: int = 1) -> Mat:
    """Parse ``[ e11, e12, ... ]`` (row-major) into a matrix.

    Whitespace, newlines and backslash line continuations are ignored.  Errors
    carry line/column positions relative to ``line``/``column``.
    """
    src = text.replace("\\\n", "  ")
    start = 0
    while start < len(src) and src[start].isspace():
        start += 1
    if start >= len(src) or src[start] != "[":
        raise _pos_error(src, start, "expected '['", line, column)
    end = src.rfind("]")
    if end < start:
        raise _pos_error(src, len(src), "expected ']'", line, column)
    if src[end + 1:].strip():
        raise _pos_error(src, end + 1, "unexpected text after ']'", line, column)
    body_start = start + 1
    body = src[body_start:end]
    entries = []
    if body.strip():
        # split on top-level commas
        depth = 0
        piece_start = 0
        for k, ch in enumerate(body):
            if ch == "(":
                depth += 1
            elif ch == ")":
                depth -= 1
            elif ch == "," and depth == 0:
                entries.append((body_start + piece_start, body[piece_start:k]))
                piece_start = k + 1
        entries.append((body_start + piece_start, body[piece_start:]))
    if len(entries) != nrows * ncols:
        raise _pos_error(src, start, f"expected {nrows * ncols} entries, found {len(entries)}", line, column)
    values = []
    for off, piece in entries:
        if not piece.strip():
            raise _pos_error(src, off, "empty entry", line, column)
        ln, col = _line_col(src, off, line, column)
        values.append(_ExprParser(ring, piece, ln, col).parse_single())
    return Mat.from_flat(ring, nrows, ncols, values)


def _line_col(src, offset, line, column):
    prefix = src[:offset]
    nl = prefix.count("\n")
    if nl:
        return line + nl, offset - prefix.rfind("\n")
    return line, column + offset


def _pos_error(src, offset, msg, line, column):
    ln, col = _line_col(src, offset, line, column)
    return ParseError(msg, ln, col)
