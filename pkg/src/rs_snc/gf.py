"""Arithmetic and dense linear algebra over GF(2^m), m in [1, 8].

Field elements are plain ints in [0, 2^m - 1]: bit i is the coefficient of
alpha^i in the polynomial basis.  Addition is XOR; multiplication and
inversion go through exp/log tables built from a primitive element.
Matrices are small (at most a few hundred rows), so everything is dense
pure-Python.
"""

from __future__ import annotations

# Primitive polynomials, bit i = coefficient of x^i (bit m always set).
# 0x13 is x^4+x+1, 0x11d is x^8+x^4+x^3+x^2+1; x=2 is primitive for all.
_PRIMITIVE_POLY = {
    1: 0b11,
    2: 0b111,
    3: 0b1011,
    4: 0b10011,
    5: 0b100101,
    6: 0b1000011,
    7: 0b10001001,
    8: 0b100011101,
}


class GF:
    """The finite field GF(2^m) with exp/log multiplication tables."""

    def __init__(self, q: int):
        m = q.bit_length() - 1
        if q < 2 or q != 1 << m or m not in _PRIMITIVE_POLY:
            raise ValueError(f"field size must be 2^m with m in 1..8, got {q}")
        self.q = q
        self.m = m
        self.poly = _PRIMITIVE_POLY[m]
        self._build_tables()

    def _build_tables(self) -> None:
        q = self.q
        self._exp = [0] * (2 * q)  # doubled so mul can skip one modulo
        self._log = [0] * q
        x = 1
        for i in range(q - 1):
            self._exp[i] = x
            self._log[x] = i
            x <<= 1
            if x & q:
                x ^= self.poly
        if x != 1:
            raise ValueError(f"0x{self.poly:x} is not primitive for GF({q})")
        for i in range(q - 1, 2 * q):
            self._exp[i] = self._exp[i - (q - 1)]

    def add(self, a: int, b: int) -> int:
        return a ^ b

    sub = add  # characteristic 2

    def mul(self, a: int, b: int) -> int:
        if a == 0 or b == 0:
            return 0
        return self._exp[self._log[a] + self._log[b]]

    def inv(self, a: int) -> int:
        if a == 0:
            raise ZeroDivisionError("0 has no inverse in GF(2^m)")
        return self._exp[self.q - 1 - self._log[a]]

    def div(self, a: int, b: int) -> int:
        if b == 0:
            raise ZeroDivisionError("division by zero in GF(2^m)")
        if a == 0:
            return 0
        return self._exp[self._log[a] - self._log[b] + self.q - 1]

    def pow(self, a: int, e: int) -> int:
        if e == 0:
            return 1
        if a == 0:
            return 0
        return self._exp[(self._log[a] * e) % (self.q - 1)]

    def elements(self) -> range:
        return range(self.q)

    def nonzero(self) -> range:
        return range(1, self.q)

    def __repr__(self) -> str:
        return f"GF({self.q})"

    def __eq__(self, other) -> bool:
        return isinstance(other, GF) and other.q == self.q

    def __hash__(self) -> int:
        return hash(("GF", self.q))


class Matrix:
    """Dense row-major matrix over a GF(2^m) field."""

    def __init__(self, field: GF, data: list[list[int]]):
        ncols = len(data[0]) if data else 0
        if any(len(row) != ncols for row in data):
            raise ValueError("ragged rows")
        self.field = field
        self.data = data

    def __repr__(self) -> str:
        return f"Matrix({self.field!r}, {self.rows}x{self.cols})"

    @property
    def rows(self) -> int:
        return len(self.data)

    @property
    def cols(self) -> int:
        return len(self.data[0]) if self.data else 0

    @classmethod
    def zeros(cls, field: GF, rows: int, cols: int) -> "Matrix":
        return cls(field, [[0] * cols for _ in range(rows)])

    @classmethod
    def identity(cls, field: GF, n: int) -> "Matrix":
        return cls(field, [[1 if i == j else 0 for j in range(n)] for i in range(n)])

    def copy(self) -> "Matrix":
        return Matrix(self.field, [row[:] for row in self.data])

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Matrix)
            and other.field == self.field
            and other.data == self.data
        )

    def __add__(self, other: "Matrix") -> "Matrix":
        if (self.rows, self.cols) != (other.rows, other.cols):
            raise ValueError("shape mismatch in add")
        return Matrix(
            self.field,
            [[a ^ b for a, b in zip(ra, rb)] for ra, rb in zip(self.data, other.data)],
        )

    def __matmul__(self, other: "Matrix") -> "Matrix":
        if self.cols != other.rows:
            raise ValueError(
                f"shape mismatch in matmul: {self.rows}x{self.cols} @ {other.rows}x{other.cols}"
            )
        f = self.field
        out = [[0] * other.cols for _ in range(self.rows)]
        for i, row in enumerate(self.data):
            orow = out[i]
            for t, a in enumerate(row):
                if a == 0:
                    continue
                brow = other.data[t]
                for j, b in enumerate(brow):
                    if b:
                        orow[j] ^= f.mul(a, b)
        return Matrix(f, out)

    def mul_row_vector(self, vec: list[int]) -> list[int]:
        """vec (1 x rows) times self, returning 1 x cols."""
        if len(vec) != self.rows:
            raise ValueError("vector length mismatch")
        f = self.field
        out = [0] * self.cols
        for a, row in zip(vec, self.data):
            if a == 0:
                continue
            for j, b in enumerate(row):
                if b:
                    out[j] ^= f.mul(a, b)
        return out

    def transpose(self) -> "Matrix":
        return Matrix(self.field, [list(col) for col in zip(*self.data)])

    def rank(self) -> int:
        work = [row[:] for row in self.data]
        return _eliminate(self.field, work)

    def solve(self, b: list[int]) -> list[int] | None:
        """Solve self @ x = b for square self; None when singular.

        Gaussian elimination with first-nonzero pivoting (fields have no
        magnitudes, so pivot order is just deterministic scan order).
        """
        n = self.rows
        if n != self.cols:
            raise ValueError("solve requires a square matrix")
        if len(b) != n:
            raise ValueError("right-hand side length mismatch")
        f = self.field
        aug = [self.data[i][:] + [b[i]] for i in range(n)]
        for col in range(n):
            piv = next((r for r in range(col, n) if aug[r][col]), None)
            if piv is None:
                return None
            aug[col], aug[piv] = aug[piv], aug[col]
            inv = f.inv(aug[col][col])
            aug[col] = [f.mul(inv, v) for v in aug[col]]
            for r in range(n):
                if r != col and aug[r][col]:
                    factor = aug[r][col]
                    aug[r] = [v ^ f.mul(factor, w) for v, w in zip(aug[r], aug[col])]
        return [aug[i][n] for i in range(n)]


def _eliminate(f: GF, work: list[list[int]]) -> int:
    """In-place row reduce; returns the rank."""
    nrows = len(work)
    ncols = len(work[0]) if work else 0
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, nrows) if work[r][col]), None)
        if piv is None:
            continue
        work[rank], work[piv] = work[piv], work[rank]
        inv = f.inv(work[rank][col])
        work[rank] = [f.mul(inv, v) for v in work[rank]]
        for r in range(nrows):
            if r != rank and work[r][col]:
                factor = work[r][col]
                work[r] = [v ^ f.mul(factor, w) for v, w in zip(work[r], work[rank])]
        rank += 1
        if rank == nrows:
            break
    return rank


def solve_determined(f: GF, a: list[list[int]], b: list[int]) -> dict[int, int]:
    """Row-reduce the (possibly rectangular) system a @ x = b and return
    the variables that are uniquely determined, as {column index: value}.

    A variable is determined when its pivot row involves no other unknown.
    An inconsistent system returns {} (cannot happen for right-hand sides
    generated from an actual solution).
    """
    if not a:
        return {}
    ncols = len(a[0])
    aug = [row[:] + [rhs] for row, rhs in zip(a, b)]
    _eliminate(f, aug)
    determined: dict[int, int] = {}
    for row in aug:
        support = [j for j in range(ncols) if row[j]]
        if not support:
            if row[ncols]:
                return {}  # inconsistent
            continue
        if len(support) == 1:
            determined[support[0]] = row[ncols]
    return determined


def vandermonde(f: GF, points: list[int], rows: int) -> Matrix:
    """Matrix with entry (i, j) = points[j]^i.

    Points must be distinct and nonzero, which makes every square submatrix
    taken from distinct columns and row range 0..r-1 invertible.
    """
    if rows < 1:
        raise ValueError("rows must be >= 1")
    if any(p == 0 for p in points):
        raise ValueError("evaluation points must be nonzero")
    if len(set(points)) != len(points):
        raise ValueError("evaluation points must be distinct")
    if any(not 0 < p < f.q for p in points):
        raise ValueError("evaluation points must lie in the field")
    return Matrix(f, [[f.pow(p, i) for p in points] for i in range(rows)])
