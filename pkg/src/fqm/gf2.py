"""Bit-packed linear algebra over GF(2).

Vectors and matrix rows are stored as Python integers: coordinate ``i`` of a
length-``n`` vector is bit ``i`` of the integer.  The textual form lists
coordinates left to right, so ``"110"`` is the integer ``0b011``.  XOR of two
rows is a single big-int operation, which is what keeps Gaussian elimination
cheap for the few-hundred-bit vectors used by the money scheme.

Subspaces are always held in canonical reduced row-echelon form (pivot of a
row = its lowest set bit, rows sorted by pivot), so equal subspaces compare
and hash equal regardless of the basis they were built from.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Sequence

import numpy as np

__all__ = [
    "GF2Vector",
    "GF2Matrix",
    "Subspace",
    "DimensionError",
    "SingularMatrixError",
    "rref",
    "rank",
    "member",
    "complement",
    "intersect",
    "subspace_sum",
    "random_bits",
    "random_vector",
    "sample_subspace",
    "sample_vector_in",
    "sample_invertible",
    "sample_automorphism",
    "is_automorphism",
    "pack_words",
    "member_many",
    "orthogonal_many",
]


class DimensionError(ValueError):
    """Operands live in different ambient dimensions."""


class SingularMatrixError(ValueError):
    pass


def _check_bits(bits: int, n: int) -> None:
    if bits < 0 or bits >> n:
        raise DimensionError(f"value {bits:#x} does not fit in {n} bits")


def _bits_from_str(s: str) -> int:
    s = s.strip()
    if any(ch not in "01" for ch in s):
        raise ValueError(f"not a bit string: {s!r}")
    return int(s[::-1], 2) if s else 0


def _bits_to_str(bits: int, n: int) -> str:
    return format(bits, f"0{n}b")[::-1] if n else ""


def _parity(x: int) -> int:
    return x.bit_count() & 1


@dataclass(frozen=True, slots=True)
class GF2Vector:
    bits: int
    n: int

    def __post_init__(self):
        _check_bits(self.bits, self.n)

    @classmethod
    def zeros(cls, n: int) -> GF2Vector:
        return cls(0, n)

    @classmethod
    def unit(cls, n: int, i: int) -> GF2Vector:
        return cls(1 << i, n)

    @classmethod
    def from_str(cls, s: str) -> GF2Vector:
        s = s.strip()
        return cls(_bits_from_str(s), len(s))

    @classmethod
    def from_array(cls, arr) -> GF2Vector:
        arr = np.asarray(arr).reshape(-1)
        bits = 0
        for i in np.flatnonzero(arr & 1):
            bits |= 1 << int(i)
        return cls(bits, arr.size)

    @classmethod
    def from_bytes(cls, data: bytes, n: int) -> GF2Vector:
        if len(data) != (n + 7) // 8:
            raise ValueError(f"expected {(n + 7) // 8} bytes for n={n}, got {len(data)}")
        return cls(int.from_bytes(data, "little"), n)

    def to_bytes(self) -> bytes:
        return self.bits.to_bytes((self.n + 7) // 8, "little")

    def to_str(self) -> str:
        return _bits_to_str(self.bits, self.n)

    def to_array(self) -> np.ndarray:
        return np.array([(self.bits >> i) & 1 for i in range(self.n)], dtype=np.uint8)

    def dot(self, other: GF2Vector) -> int:
        if other.n != self.n:
            raise DimensionError(f"dot of length {self.n} and {other.n}")
        return _parity(self.bits & other.bits)

    def __xor__(self, other: GF2Vector) -> GF2Vector:
        if other.n != self.n:
            raise DimensionError(f"xor of length {self.n} and {other.n}")
        return GF2Vector(self.bits ^ other.bits, self.n)

    __add__ = __xor__

    def __len__(self) -> int:
        return self.n

    def __bool__(self) -> bool:
        return self.bits != 0

    def __str__(self) -> str:
        return self.to_str()


def _as_bits(x, n: int) -> int:
    """Accept a GF2Vector or a raw int and return the int, checking length."""
    if isinstance(x, GF2Vector):
        if x.n != n:
            raise DimensionError(f"vector of length {x.n} used in ambient dimension {n}")
        return x.bits
    x = int(x)
    _check_bits(x, n)
    return x


# ---------------------------------------------------------------------------
# Row reduction kernels on lists of ints


def _reduce(x: int, basis: Sequence[int]) -> int:
    # basis rows are fully reduced, so each pivot is cleared independently
    for row in basis:
        low = row & -row
        if x & low:
            x ^= row
    return x


def _insert(basis: list[int], r: int) -> bool:
    """Add ``r`` to a fully reduced (unsorted) basis in place; False if dependent."""
    r = _reduce(r, basis)
    if not r:
        return False
    low = r & -r
    for k, b in enumerate(basis):
        if b & low:
            basis[k] = b ^ r
    basis.append(r)
    return True


def _rref_rows(rows: Iterable[int]) -> list[int]:
    """Canonical RREF basis of the span of ``rows`` (zero rows dropped)."""
    basis: list[int] = []
    for r in rows:
        _insert(basis, r)
    basis.sort(key=lambda b: b & -b)
    return basis


def _complement_rows(n: int, basis: Sequence[int]) -> list[int]:
    pivots = 0
    for b in basis:
        pivots |= b & -b
    out = []
    for f in range(n):
        fbit = 1 << f
        if pivots & fbit:
            continue
        v = fbit
        for b in basis:
            if b & fbit:
                v |= b & -b
        out.append(v)
    return _rref_rows(out)


# ---------------------------------------------------------------------------


class GF2Matrix:
    """Dense GF(2) matrix, one packed int per row.

    ``rows[i] >> j & 1`` is the entry in row ``i``, column ``j``.
    """

    __slots__ = ("rows", "ncols")

    def __init__(self, rows: Iterable[int], ncols: int):
        rows = tuple(int(r) for r in rows)
        for r in rows:
            _check_bits(r, ncols)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "ncols", ncols)

    def __setattr__(self, name, value):
        raise AttributeError("GF2Matrix is immutable")

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self.rows), self.ncols)

    @classmethod
    def identity(cls, n: int) -> GF2Matrix:
        return cls((1 << i for i in range(n)), n)

    @classmethod
    def zeros(cls, nrows: int, ncols: int) -> GF2Matrix:
        return cls([0] * nrows, ncols)

    @classmethod
    def from_array(cls, arr) -> GF2Matrix:
        arr = np.atleast_2d(np.asarray(arr))
        return cls((GF2Vector.from_array(r).bits for r in arr), arr.shape[1])

    @classmethod
    def from_text(cls, text: str, ncols: int | None = None) -> GF2Matrix:
        lines = [ln.strip() for ln in text.strip().splitlines() if ln.strip()]
        if not lines:
            if ncols is None:
                raise ValueError("empty matrix text needs an explicit column count")
            return cls([], ncols)
        widths = {len(ln) for ln in lines}
        if len(widths) != 1:
            raise ValueError(f"ragged matrix rows: widths {sorted(widths)}")
        width = widths.pop()
        if ncols is not None and ncols != width:
            raise DimensionError(f"rows have {width} columns, expected {ncols}")
        return cls((_bits_from_str(ln) for ln in lines), width)

    def to_text(self) -> str:
        return "\n".join(_bits_to_str(r, self.ncols) for r in self.rows)

    def to_array(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self.rows):
            for j in range(self.ncols):
                out[i, j] = (r >> j) & 1
        return out

    def __getitem__(self, ij: tuple[int, int]) -> int:
        i, j = ij
        return (self.rows[i] >> j) & 1

    def __eq__(self, other):
        if not isinstance(other, GF2Matrix):
            return NotImplemented
        return self.ncols == other.ncols and self.rows == other.rows

    def __hash__(self):
        return hash((self.rows, self.ncols))

    def __repr__(self):
        return f"GF2Matrix({self.nrows}x{self.ncols})"

    def transpose(self) -> GF2Matrix:
        cols = [0] * self.ncols
        for i, r in enumerate(self.rows):
            while r:
                low = r & -r
                cols[low.bit_length() - 1] |= 1 << i
                r ^= low
        return GF2Matrix(cols, self.nrows)

    @property
    def T(self) -> GF2Matrix:
        return self.transpose()

    def matvec(self, x) -> GF2Vector:
        xb = _as_bits(x, self.ncols)
        out = 0
        for i, r in enumerate(self.rows):
            if _parity(r & xb):
                out |= 1 << i
        return GF2Vector(out, self.nrows)

    def rmatvec(self, x) -> GF2Vector:
        """``self.T @ x`` without materializing the transpose."""
        xb = _as_bits(x, self.nrows)
        out = 0
        for i, r in enumerate(self.rows):
            if (xb >> i) & 1:
                out ^= r
        return GF2Vector(out, self.ncols)

    def __matmul__(self, other):
        if isinstance(other, GF2Vector):
            return self.matvec(other)
        if not isinstance(other, GF2Matrix):
            return NotImplemented
        if self.ncols != other.nrows:
            raise DimensionError(f"matmul {self.shape} @ {other.shape}")
        out = []
        orows = other.rows
        for r in self.rows:
            acc = 0
            while r:
                low = r & -r
                acc ^= orows[low.bit_length() - 1]
                r ^= low
            out.append(acc)
        return GF2Matrix(out, other.ncols)

    def rank(self) -> int:
        return len(_rref_rows(self.rows))

    def rref(self) -> GF2Matrix:
        basis = _rref_rows(self.rows)
        return GF2Matrix(basis + [0] * (self.nrows - len(basis)), self.ncols)

    def is_invertible(self) -> bool:
        return self.nrows == self.ncols and self.rank() == self.nrows

    def inverse(self) -> GF2Matrix:
        n = self.nrows
        if self.ncols != n:
            raise SingularMatrixError(f"non-square matrix {self.shape}")
        # augmented rows [A | I] with A in the low n bits
        aug = [r | (1 << (n + i)) for i, r in enumerate(self.rows)]
        mask = (1 << n) - 1
        for col in range(n):
            bit = 1 << col
            piv = next((k for k in range(col, n) if aug[k] & bit), None)
            if piv is None:
                raise SingularMatrixError("matrix is singular over GF(2)")
            aug[col], aug[piv] = aug[piv], aug[col]
            prow = aug[col]
            for k in range(n):
                if k != col and aug[k] & bit:
                    aug[k] ^= prow
        assert all((aug[i] & mask) == 1 << i for i in range(n))
        return GF2Matrix((r >> n for r in aug), n)


def rref(m: GF2Matrix) -> GF2Matrix:
    return m.rref()


def rank(m: GF2Matrix) -> int:
    return m.rank()


# ---------------------------------------------------------------------------


class Subspace:
    """A linear subspace of GF(2)^n in canonical RREF."""

    __slots__ = ("n", "rows", "_hash")

    def __init__(self, n: int, vectors: Iterable = ()):
        rows = [_as_bits(v, n) for v in vectors]
        self._init(n, tuple(_rref_rows(rows)))

    def _init(self, n: int, rows: tuple[int, ...]) -> None:
        object.__setattr__(self, "n", n)
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "_hash", None)

    def __setattr__(self, name, value):
        raise AttributeError("Subspace is immutable")

    @classmethod
    def _from_rref(cls, n: int, rows: Sequence[int]) -> Subspace:
        s = cls.__new__(cls)
        s._init(n, tuple(rows))
        return s

    @classmethod
    def span(cls, n: int, vectors: Iterable) -> Subspace:
        return cls(n, vectors)

    @classmethod
    def zero(cls, n: int) -> Subspace:
        return cls._from_rref(n, ())

    @classmethod
    def full(cls, n: int) -> Subspace:
        return cls._from_rref(n, tuple(1 << i for i in range(n)))

    @classmethod
    def from_matrix(cls, m: GF2Matrix) -> Subspace:
        """Row space of ``m``."""
        return cls._from_rref(m.ncols, _rref_rows(m.rows))

    @classmethod
    def from_text(cls, text: str, n: int | None = None) -> Subspace:
        return cls.from_matrix(GF2Matrix.from_text(text, n))

    def to_text(self) -> str:
        return self.basis.to_text()

    @property
    def dim(self) -> int:
        return len(self.rows)

    @property
    def basis(self) -> GF2Matrix:
        return GF2Matrix(self.rows, self.n)

    def basis_vectors(self) -> list[GF2Vector]:
        return [GF2Vector(r, self.n) for r in self.rows]

    @property
    def pivots(self) -> list[int]:
        return [(r & -r).bit_length() - 1 for r in self.rows]

    def __len__(self) -> int:
        """Number of elements, ``2**dim``."""
        return 1 << self.dim

    def __eq__(self, other):
        if not isinstance(other, Subspace):
            return NotImplemented
        return self.n == other.n and self.rows == other.rows

    def __hash__(self):
        h = self._hash
        if h is None:
            h = hash((self.n, self.rows))
            object.__setattr__(self, "_hash", h)
        return h

    def __repr__(self):
        return f"Subspace(n={self.n}, dim={self.dim})"

    def reduce(self, x) -> int:
        """Canonical representative of ``x + self`` as a packed int."""
        return _reduce(_as_bits(x, self.n), self.rows)

    def member(self, x) -> bool:
        return _reduce(_as_bits(x, self.n), self.rows) == 0

    __contains__ = member

    def _check_same(self, other: Subspace) -> None:
        if other.n != self.n:
            raise DimensionError(f"ambient dimensions differ: {self.n} vs {other.n}")

    def issubspace(self, other: Subspace) -> bool:
        """True iff ``self <= other``."""
        self._check_same(other)
        return all(_reduce(r, other.rows) == 0 for r in self.rows)

    __le__ = issubspace

    def complement(self) -> Subspace:
        return Subspace._from_rref(self.n, _complement_rows(self.n, self.rows))

    def sum(self, other: Subspace) -> Subspace:
        self._check_same(other)
        return Subspace._from_rref(self.n, _rref_rows(self.rows + other.rows))

    __add__ = sum

    def intersect(self, other: Subspace) -> Subspace:
        # Zassenhaus: reduce [s | s] and [t | 0]; rows with empty low half span s∩t
        self._check_same(other)
        n = self.n
        if not self.rows or not other.rows:
            return Subspace.zero(n)
        stacked = [r | (r << n) for r in self.rows] + list(other.rows)
        low_mask = (1 << n) - 1
        inter = [r >> n for r in _rref_rows(stacked) if not r & low_mask]
        return Subspace._from_rref(n, _rref_rows(inter))

    __and__ = intersect

    def elements(self) -> Iterator[int]:
        """Yield every element as a packed int (``2**dim`` of them)."""
        elems = [0]
        for r in self.rows:
            elems += [e ^ r for e in elems]
        return iter(elems)

    def element_array(self) -> np.ndarray:
        if self.n > 62:
            raise DimensionError("element_array needs n <= 62")
        out = np.zeros(1, dtype=np.int64)
        for r in self.rows:
            out = np.concatenate([out, out ^ np.int64(r)])
        return out


def member(s: Subspace, x) -> bool:
    return s.member(x)


def complement(s: Subspace) -> Subspace:
    return s.complement()


def intersect(s: Subspace, t: Subspace) -> Subspace:
    return s.intersect(t)


def subspace_sum(s: Subspace, t: Subspace) -> Subspace:
    return s.sum(t)


# ---------------------------------------------------------------------------
# Sampling.  ``rng`` is always a numpy Generator.


def random_bits(rng: np.random.Generator, k: int) -> int:
    if k <= 0:
        return 0
    return int.from_bytes(rng.bytes((k + 7) // 8), "little") & ((1 << k) - 1)


def random_vector(n: int, rng: np.random.Generator) -> GF2Vector:
    return GF2Vector(random_bits(rng, n), n)


def sample_subspace(n: int, d: int, rng: np.random.Generator) -> Subspace:
    """Uniform ``d``-dimensional subspace of GF(2)^n.

    Draws random ``d x n`` matrices until one has full row rank.  Every
    subspace has the same number of ordered bases, so the row space of the
    accepted matrix is uniform.
    """
    if not 0 <= d <= n:
        raise ValueError(f"need 0 <= d <= n, got d={d}, n={n}")
    while True:
        rows = _rref_rows(random_bits(rng, n) for _ in range(d))
        if len(rows) == d:
            return Subspace._from_rref(n, rows)


def sample_vector_in(s: Subspace, rng: np.random.Generator) -> GF2Vector:
    coeffs = random_bits(rng, s.dim)
    x = 0
    for i, r in enumerate(s.rows):
        if (coeffs >> i) & 1:
            x ^= r
    return GF2Vector(x, s.n)


def sample_invertible(n: int, rng: np.random.Generator) -> GF2Matrix:
    """Uniform element of GL(n, 2) by rejection."""
    if n < 1:
        raise ValueError("n must be >= 1")
    while True:
        rows = [random_bits(rng, n) for _ in range(n)]
        if len(_rref_rows(rows)) == n:
            return GF2Matrix(rows, n)


def _columns_to_matrix(columns: Sequence[int], n: int) -> GF2Matrix:
    """Matrix whose ``j``-th column is ``columns[j]``."""
    return GF2Matrix(columns, n).transpose()


def _extend_basis(n: int, current: Sequence[int], target: Sequence[int]) -> list[int]:
    """Vectors from ``target`` extending ``current`` to a basis of span(current + target)."""
    basis = _rref_rows(current)
    return [v for v in target if _insert(basis, v)]


def sample_automorphism(a: Subspace, rng: np.random.Generator) -> GF2Matrix:
    """Uniform ``M`` with ``M`` invertible and ``M^T`` fixing ``a`` and ``a^perp`` setwise.

    Works in an adapted basis ``U = [K | A1 | B1 | C]`` where ``K = a ∩ a^perp``,
    ``a = K ⊕ A1``, ``a^perp = K ⊕ B1`` and ``C`` completes GF(2)^n.  A linear
    map ``T`` preserves both subspaces iff, in that basis, it is block upper
    triangular with the pattern below (``*`` arbitrary, ``R`` invertible)::

            K   A1  B1  C
        K [ R   *   *   * ]
        A1[ 0   R   0   * ]
        B1[ 0   0   R   * ]
        C [ 0   0   0   R ]

    Sampling every block independently is a bijection onto the group, hence
    uniform.  When ``a ∩ a^perp = 0`` and ``dim a = n/2`` this is exactly
    ``blockdiag(R1, R2)`` in the basis ``[a | a^perp]``.
    """
    n = a.n
    perp = a.complement()
    k_rows = list(a.intersect(perp).rows)
    a1 = _extend_basis(n, k_rows, a.rows)
    b1 = _extend_basis(n, k_rows + a1, perp.rows)
    used = k_rows + a1 + b1
    c = _extend_basis(n, used, [1 << i for i in range(n)])
    blocks = [len(k_rows), len(a1), len(b1), len(c)]
    starts = np.cumsum([0] + blocks[:-1]).tolist()
    # allowed[(row_block, col_block)]: which blocks of T may be nonzero
    allowed = {(0, 0), (0, 1), (0, 2), (0, 3), (1, 1), (1, 3), (2, 2), (2, 3), (3, 3)}

    cols = [0] * n  # columns of T in the adapted basis, as packed ints over rows
    for cb in range(4):
        for rb in range(4):
            if (rb, cb) not in allowed or not blocks[rb] or not blocks[cb]:
                continue
            if rb == cb:
                block = sample_invertible(blocks[rb], rng).transpose()  # rows -> columns
                block_cols = block.rows
            else:
                block_cols = [random_bits(rng, blocks[rb]) for _ in range(blocks[cb])]
            for j, col in enumerate(block_cols):
                cols[starts[cb] + j] |= col << starts[rb]
    t_block = _columns_to_matrix(cols, n)
    u = _columns_to_matrix(used + c, n)
    t = u @ t_block @ u.inverse()
    return t.transpose()


def is_automorphism(m: GF2Matrix, a: Subspace) -> bool:
    """Membership test for the set of invertible ``M`` whose transpose fixes ``a`` and ``a^perp``."""
    if m.shape != (a.n, a.n) or not m.is_invertible():
        return False
    perp = a.complement()
    return all(a.member(m.rmatvec(GF2Vector(r, a.n)).bits) for r in a.rows) and all(
        perp.member(m.rmatvec(GF2Vector(r, a.n)).bits) for r in perp.rows
    )


# ---------------------------------------------------------------------------
# Batched kernels on numpy uint64 word arrays, shape (count, words)

_M64 = (1 << 64) - 1


def _words(x: int, nwords: int) -> np.ndarray:
    return np.array([(x >> (64 * k)) & _M64 for k in range(nwords)], dtype=np.uint64)


def pack_words(values: Iterable, n: int) -> np.ndarray:
    """Pack vectors (ints or GF2Vectors) into a ``(count, ceil(n/64))`` uint64 array."""
    nwords = max(1, (n + 63) // 64)
    vals = [_as_bits(v, n) for v in values]
    out = np.zeros((len(vals), nwords), dtype=np.uint64)
    for i, v in enumerate(vals):
        out[i] = _words(v, nwords)
    return out


def random_words(count: int, n: int, rng: np.random.Generator) -> np.ndarray:
    nwords = max(1, (n + 63) // 64)
    out = rng.integers(0, 1 << 64, size=(count, nwords), dtype=np.uint64, endpoint=False)
    rem = n - 64 * (nwords - 1)
    if rem < 64:
        out[:, -1] &= np.uint64((1 << rem) - 1)
    return out


def unpack_words(arr: np.ndarray) -> list[int]:
    out = []
    for row in arr:
        x = 0
        for k, w in enumerate(row):
            x |= int(w) << (64 * k)
        out.append(x)
    return out


def member_many(s: Subspace, xs: np.ndarray) -> np.ndarray:
    """Vectorized membership for a packed batch; returns a bool array."""
    xs = np.array(xs, dtype=np.uint64, copy=True)
    nwords = xs.shape[1]
    for r in s.rows:
        p = (r & -r).bit_length() - 1
        word, bit = divmod(p, 64)
        hit = ((xs[:, word] >> np.uint64(bit)) & np.uint64(1)).astype(bool)
        xs[hit] ^= _words(r, nwords)
    return ~xs.any(axis=1)


def orthogonal_many(vectors: Iterable[int], xs: np.ndarray) -> np.ndarray:
    """True where ``x`` is orthogonal to every given vector (membership in their complement)."""
    xs = np.asarray(xs, dtype=np.uint64)
    nwords = xs.shape[1]
    ok = np.ones(xs.shape[0], dtype=bool)
    for v in vectors:
        par = np.bitwise_count(xs & _words(v, nwords)).sum(axis=1, dtype=np.int64) & 1
        ok &= par == 0
    return ok
