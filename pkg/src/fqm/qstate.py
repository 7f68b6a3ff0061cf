"""Exact simulation of the states a banknote can be in during verification.

Two backends:

* :class:`CosetState` is symbolic.  It stores ``(S, a, c)`` for the state
  ``|S^{-1/2}| * sum_{x in S} (-1)^{c.x} |x + a>`` and is exact at any ``n``.
  The family is closed under the two things verification does: measuring
  membership in a subspace (accepting branch) and the n-fold Hadamard.
* :class:`DenseState` is a plain statevector for small ``n``, used as a
  brute-force oracle and whenever a rejected branch must be kept.

Basis state ``|x>`` sits at amplitude index ``x`` (qubit ``i`` is bit ``i``).
Global phase is ignored everywhere.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .gf2 import DimensionError, GF2Vector, Subspace, _as_bits, _rref_rows

DENSE_CAP = 14
_TOL = 1e-12


class DenseCapError(ValueError):
    pass


@dataclass(frozen=True)
class CosetState:
    space: Subspace
    shift: GF2Vector
    character: GF2Vector

    def __post_init__(self):
        n = self.space.n
        shift = _as_bits(self.shift, n)
        char = _as_bits(self.character, n)
        # canonical: shift mod S, character mod S^perp
        object.__setattr__(self, "shift", GF2Vector(self.space.reduce(shift), n))
        object.__setattr__(
            self, "character", GF2Vector(self.space.complement().reduce(char), n)
        )

    @property
    def n(self) -> int:
        return self.space.n

    def to_text(self) -> str:
        """Fixture form: basis block, shift line, character line (blank basis = zero space)."""
        return "\n".join([self.space.to_text(), self.shift.to_str(), self.character.to_str()])

    @classmethod
    def from_text(cls, text: str) -> CosetState:
        lines = [ln.strip() for ln in text.strip("\n").splitlines()]
        lines = [ln for ln in lines if ln]
        if len(lines) < 2:
            raise ValueError("coset state text needs at least shift and character lines")
        *basis, shift, char = lines
        n = len(shift)
        if len(char) != n:
            raise DimensionError("shift and character lengths differ")
        space = Subspace.from_text("\n".join(basis), n) if basis else Subspace.zero(n)
        return cls(space, GF2Vector.from_str(shift), GF2Vector.from_str(char))


@dataclass(frozen=True)
class DenseState:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise DimensionError(f"expected {1 << self.n} amplitudes for n={self.n}")
        if self.n > DENSE_CAP:
            raise DenseCapError(f"n={self.n} exceeds dense cap {DENSE_CAP}")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > 1e-9:
            raise ValueError(f"state is not normalized (norm^2 = {norm})")
        amps = amps.copy()
        amps.flags.writeable = False
        object.__setattr__(self, "amplitudes", amps)

    @classmethod
    def basis_state(cls, n: int, x) -> DenseState:
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[_as_bits(x, n)] = 1.0
        return cls(n, amps)

    @classmethod
    def random(cls, n: int, rng: np.random.Generator) -> DenseState:
        """Haar-random pure state."""
        amps = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
        return cls(n, amps / np.linalg.norm(amps))

    def __eq__(self, other):
        if not isinstance(other, DenseState):
            return NotImplemented
        return self.n == other.n and np.array_equal(self.amplitudes, other.amplitudes)

    __hash__ = None


@dataclass(frozen=True)
class ProjectionOutcome:
    accept_probability: Fraction | float
    accepted_state: CosetState | DenseState | None
    rejected_state: DenseState | None = None


# ---------------------------------------------------------------------------
# symbolic backend


def coset_from_subspace(s: Subspace) -> CosetState:
    return CosetState(s, GF2Vector.zeros(s.n), GF2Vector.zeros(s.n))


def hadamard_all(st: CosetState) -> CosetState:
    """``H^{⊗n}`` on a coset state: ``(S, a, c) -> (S^perp, c, a)`` up to phase."""
    return CosetState(st.space.complement(), st.character, st.shift)


def _split(x: int, s: Subspace, t: Subspace) -> int | None:
    """Return ``x0 in s`` with ``x + x0 in t``, or None when ``x`` is not in ``s + t``."""
    # rows carry (vector, s-part) with the vector in the low n bits
    n = s.n
    tagged = [r | (r << n) for r in s.rows] + list(t.rows)
    basis = _rref_rows(tagged)
    mask = (1 << n) - 1
    acc = x
    for row in basis:
        low = row & -row
        if low > mask:
            break
        if acc & low:
            acc ^= row
    if acc & mask:
        return None
    return acc >> n


def project_membership(st: CosetState, t: Subspace) -> ProjectionOutcome:
    """Measure whether the computational-basis value lies in ``t``; keep the accepting branch."""
    if t.n != st.n:
        raise DimensionError(f"state on {st.n} qubits, subspace in dimension {t.n}")
    x0 = _split(st.shift.bits, st.space, t)
    if x0 is None:
        return ProjectionOutcome(Fraction(0), None)
    inter = st.space.intersect(t)
    p = Fraction(1, 1 << (st.space.dim - inter.dim))
    post = CosetState(inter, GF2Vector(x0 ^ st.shift.bits, st.n), st.character)
    return ProjectionOutcome(p, post)


def fidelity(a: CosetState, b: CosetState) -> Fraction:
    """Exact ``|<a|b>|^2`` between coset states."""
    if a.n != b.n:
        raise DimensionError("states on different qubit counts")
    if _split(a.shift.bits ^ b.shift.bits, a.space, b.space) is None:
        return Fraction(0)
    inter = a.space.intersect(b.space)
    if not inter.complement().member(a.character.bits ^ b.character.bits):
        return Fraction(0)
    return Fraction(1 << (2 * inter.dim), 1 << (a.space.dim + b.space.dim))


def verify_probability(st: CosetState, v: Subspace, w: Subspace) -> tuple[Fraction, CosetState | None]:
    """Exact acceptance probability of the two-test pipeline and the accepted post-state.

    Pipeline: membership in ``w^perp``, Hadamard, membership in ``v^perp``,
    Hadamard back.
    """
    first = project_membership(st, w.complement())
    if first.accepted_state is None:
        return Fraction(0), None
    second = project_membership(hadamard_all(first.accepted_state), v.complement())
    if second.accepted_state is None:
        return Fraction(0), None
    p = first.accept_probability * second.accept_probability
    return p, hadamard_all(second.accepted_state)


def acceptance_probability(b: Subspace, v: Subspace, w: Subspace) -> Fraction:
    """Closed-form probability that ``|b>`` passes both tests for the key ``(v, w)``."""
    if not b.n == v.n == w.n:
        raise DimensionError("b, v, w must share the ambient dimension")
    bw = b.intersect(w.complement())
    bw_perp = bw.complement()
    exp = (bw.dim - b.dim) + (bw_perp.intersect(v.complement()).dim - bw_perp.dim)
    return Fraction(1, 1 << -exp)


# ---------------------------------------------------------------------------
# dense backend


def to_dense(st: CosetState, cap: int | None = None) -> DenseState:
    cap = DENSE_CAP if cap is None else cap
    if st.n > cap:
        raise DenseCapError(f"n={st.n} exceeds dense cap {cap}")
    xs = st.space.element_array()
    signs = 1.0 - 2.0 * (np.bitwise_count(xs & np.int64(st.character.bits)) & 1)
    amps = np.zeros(1 << st.n, dtype=np.complex128)
    amps[xs ^ np.int64(st.shift.bits)] = signs / np.sqrt(len(xs))
    return DenseState(st.n, amps)


def _hadamard_axes(amps: np.ndarray, qubits) -> np.ndarray:
    out = np.array(amps, dtype=np.complex128, copy=True)
    size = out.size
    for q in qubits:
        view = out.reshape(size >> (q + 1), 2, 1 << q)
        a0 = view[:, 0, :].copy()
        a1 = view[:, 1, :]
        view[:, 0, :] = a0 + a1
        view[:, 1, :] = a0 - a1
    return out * (2.0 ** (-len(qubits) / 2))


def dense_hadamard_all(st: DenseState, offset: int = 0, width: int | None = None) -> DenseState:
    """Fast Walsh-Hadamard transform on qubits ``offset .. offset+width-1`` (default: all)."""
    width = st.n - offset if width is None else width
    amps = _hadamard_axes(st.amplitudes, range(offset, offset + width))
    return DenseState(st.n, amps)


def _membership_mask(total: int, t: Subspace, offset: int) -> np.ndarray:
    idx = np.arange(1 << total, dtype=np.int64)
    reg = (idx >> offset) & ((1 << t.n) - 1)
    for r in t.rows:
        low = r & -r
        hit = (reg & low) != 0
        reg = np.where(hit, reg ^ r, reg)
    return reg == 0


def _restrict(st: DenseState, mask: np.ndarray, p: float) -> DenseState:
    amps = np.where(mask, st.amplitudes, 0)
    return DenseState(st.n, amps / np.sqrt(p))


def dense_project_membership(
    st: DenseState, t: Subspace, offset: int | None = None
) -> ProjectionOutcome:
    """Measure membership in ``t``.

    With ``offset`` given, only the ``t.n``-qubit register starting at that
    qubit is measured (joint states holding several notes).
    """
    if offset is None:
        if t.n != st.n:
            raise DimensionError(f"state on {st.n} qubits, subspace in dimension {t.n}")
        offset = 0
    elif offset < 0 or offset + t.n > st.n:
        raise DimensionError(f"register of {t.n} qubits at {offset} does not fit {st.n} qubits")
    mask = _membership_mask(st.n, t, offset)
    p = float(np.sum(np.abs(st.amplitudes[mask]) ** 2))
    if p <= _TOL:
        return ProjectionOutcome(0.0, None, st)
    if p >= 1 - _TOL:
        return ProjectionOutcome(1.0, st, None)
    return ProjectionOutcome(p, _restrict(st, mask, p), _restrict(st, ~mask, 1 - p))


def dense_verify_probability(
    st: DenseState, v: Subspace, w: Subspace, offset: int | None = None
) -> tuple[float, DenseState | None]:
    first = dense_project_membership(st, w.complement(), offset)
    if first.accepted_state is None:
        return 0.0, None
    mid = dense_hadamard_all(first.accepted_state, offset or 0, v.n)
    second = dense_project_membership(mid, v.complement(), offset)
    if second.accepted_state is None:
        return 0.0, None
    post = dense_hadamard_all(second.accepted_state, offset or 0, v.n)
    return first.accept_probability * second.accept_probability, post


def dense_fidelity(a: DenseState, b: DenseState) -> float:
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def state_fidelity(a, b) -> Fraction | float:
    """Fidelity between two states of either backend."""
    if isinstance(a, CosetState) and isinstance(b, CosetState):
        return fidelity(a, b)
    if isinstance(a, CosetState):
        a = to_dense(a)
    if isinstance(b, CosetState):
        b = to_dense(b)
    return dense_fidelity(a, b)
