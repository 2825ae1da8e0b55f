"""Dense statevector engine for small qubit registers.

Everything in the package runs through this module: basis kets, two-term
superpositions, tensor products, the {H, X, Z, CNOT} gate set, projective
measurement in an arbitrary orthonormal basis, and Hermitian
eigendecomposition for the discrimination bounds.

Conventions
-----------
* Qubit indices are 1-based. Qubit 1 is the leftmost symbol of a ket and
  maps to the most significant bit of the amplitude index, so ``|110>``
  has its unit amplitude at index 6.
* All states are unit-norm complex128 vectors; constructors and gates
  validate the norm to within ``ATOL = 1e-9``.
* Randomness is never implicit. Every stochastic operation takes a seed
  or a ``numpy.random.Generator`` (PCG64 via ``numpy.random.default_rng``),
  so runs are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

#: Tolerance for normalization and orthogonality checks.
ATOL = 1e-9

#: 1/sqrt(2) correctly rounded to double precision.
INV_SQRT2 = float(np.sqrt(0.5))

GATE_NAMES = ("H", "X", "Z", "CNOT")

_H = np.array([[1, 1], [1, -1]], dtype=complex) * INV_SQRT2
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_SINGLE_QUBIT = {"H": _H, "X": _X, "Z": _Z}


def _frozen_array(values, shape=None) -> np.ndarray:
    arr = np.array(values, dtype=complex)
    if shape is not None:
        arr = arr.reshape(shape)
    arr.setflags(write=False)
    return arr


def bits_to_index(bits: str) -> int:
    """Map a bit string to its amplitude index (bit 1 most significant)."""
    if not bits or any(ch not in "01" for ch in bits):
        raise ValueError(f"not a bit string: {bits!r}")
    return int(bits, 2)


def index_to_bits(index: int, num_qubits: int) -> str:
    """Inverse of :func:`bits_to_index` for a register of known width."""
    if not 0 <= index < 2**num_qubits:
        raise ValueError(f"index {index} out of range for {num_qubits} qubits")
    return format(index, f"0{num_qubits}b")


@dataclass(frozen=True, eq=False)
class StateVector:
    """Unit-norm amplitude vector over the computational basis.

    ``amplitudes[i]`` is the amplitude of the basis state whose bit string
    is the big-endian expansion of ``i`` (qubit 1 = most significant bit).
    The array is read-only; operations return new instances. Equality is
    bit-exact on the amplitudes.
    """

    num_qubits: int
    amplitudes: np.ndarray

    def __eq__(self, other):
        if not isinstance(other, StateVector):
            return NotImplemented
        return self.num_qubits == other.num_qubits and np.array_equal(
            self.amplitudes, other.amplitudes
        )

    def __post_init__(self):
        if self.num_qubits < 1:
            raise ValueError("num_qubits must be positive")
        arr = _frozen_array(self.amplitudes)
        if arr.shape != (2**self.num_qubits,):
            raise ValueError(
                f"expected {2**self.num_qubits} amplitudes, got shape {arr.shape}"
            )
        norm = np.linalg.norm(arr)
        if abs(norm - 1.0) > ATOL:
            raise ValueError(f"state not normalized: |norm - 1| = {abs(norm - 1.0):.3e}")
        object.__setattr__(self, "amplitudes", arr)

    @property
    def dimension(self) -> int:
        return 2**self.num_qubits

    def amplitude(self, bits: str) -> complex:
        """Amplitude of the basis state labelled by ``bits``."""
        if len(bits) != self.num_qubits:
            raise ValueError("bit string length does not match register size")
        return complex(self.amplitudes[bits_to_index(bits)])

    def __repr__(self):  # keep reprs short; full kets via ket_string()
        return f"StateVector({self.num_qubits} qubits, {ket_string(self, max_terms=4)})"


def make_basis_state(bits: str) -> StateVector:
    """Computational basis ket |bits>, e.g. ``make_basis_state("01")``."""
    index = bits_to_index(bits)
    amps = np.zeros(2 ** len(bits), dtype=complex)
    amps[index] = 1.0
    return StateVector(len(bits), amps)


def equal_superposition_pair(x: str, y: str) -> StateVector:
    """The two-term state (|x> + |y>)/sqrt(2) for distinct bit strings."""
    if len(x) != len(y):
        raise ValueError("bit strings must have equal length")
    if x == y:
        raise ValueError(f"degenerate pair: {x!r} appears twice")
    amps = np.zeros(2 ** len(x), dtype=complex)
    amps[bits_to_index(x)] = INV_SQRT2
    amps[bits_to_index(y)] = INV_SQRT2
    return StateVector(len(x), amps)


def tensor(a: StateVector, b: StateVector) -> StateVector:
    """Tensor product a (x) b; qubits of ``a`` stay most significant."""
    return StateVector(a.num_qubits + b.num_qubits, np.kron(a.amplitudes, b.amplitudes))


def inner(a: StateVector, b: StateVector) -> complex:
    """<a|b>: conjugate-linear in ``a``, linear in ``b``."""
    if a.num_qubits != b.num_qubits:
        raise ValueError("dimension mismatch in inner product")
    return complex(np.vdot(a.amplitudes, b.amplitudes))


def _check_qubit(q: int, n: int):
    if not 1 <= q <= n:
        raise ValueError(f"qubit index {q} out of range 1..{n}")


def apply_gate(state: StateVector, gate: str, qubits) -> StateVector:
    """Apply one of H, X, Z (one target) or CNOT (control, target).

    Qubit indices are 1-based with qubit 1 the leftmost ket symbol.
    ``qubits`` is an int for single-qubit gates or a (control, target)
    pair for CNOT.
    """
    n = state.num_qubits
    if gate in _SINGLE_QUBIT:
        q = qubits if isinstance(qubits, int) else tuple(qubits)[0]
        _check_qubit(q, n)
        tensor_form = state.amplitudes.reshape([2] * n)
        # qubit q lives on axis q-1 of the C-ordered reshape
        out = np.tensordot(_SINGLE_QUBIT[gate], tensor_form, axes=([1], [q - 1]))
        out = np.moveaxis(out, 0, q - 1)
        return StateVector(n, out.reshape(-1))
    if gate == "CNOT":
        control, target = qubits
        _check_qubit(control, n)
        _check_qubit(target, n)
        if control == target:
            raise ValueError("CNOT control and target must be distinct")
        tensor_form = state.amplitudes.reshape([2] * n).copy()
        sel = [slice(None)] * n
        sel[control - 1] = 1
        block = tensor_form[tuple(sel)]
        tensor_form[tuple(sel)] = np.flip(block, axis=_flip_axis(control, target, n)).copy()
        return StateVector(n, tensor_form.reshape(-1))
    raise ValueError(f"unknown gate {gate!r}; supported: {GATE_NAMES}")


def _flip_axis(control: int, target: int, n: int) -> int:
    # after fixing the control axis, axes above it shift down by one
    axis = target - 1
    return axis - 1 if target > control else axis


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Complete orthonormal basis with a designated set of valid outcomes.

    ``vectors`` holds one basis vector per row. Orthonormality is checked
    on construction (pairwise overlaps below ``ATOL``).
    """

    dimension: int
    vectors: np.ndarray
    valid_outcomes: frozenset[int]

    def __post_init__(self):
        vecs = _frozen_array(self.vectors)
        if vecs.shape != (self.dimension, self.dimension):
            raise ValueError(
                f"need {self.dimension} vectors of length {self.dimension}, "
                f"got shape {vecs.shape}"
            )
        gram = vecs @ vecs.conj().T
        if np.abs(gram - np.eye(self.dimension)).max() > ATOL:
            raise ValueError("basis vectors are not orthonormal")
        outcomes = frozenset(self.valid_outcomes)
        if any(not 0 <= k < self.dimension for k in outcomes):
            raise ValueError("valid outcome index out of range")
        object.__setattr__(self, "vectors", vecs)
        object.__setattr__(self, "valid_outcomes", outcomes)

    def vector(self, k: int) -> StateVector:
        """Basis vector ``k`` as a StateVector (dimension must be 2^n)."""
        n = self.dimension.bit_length() - 1
        if 2**n != self.dimension:
            raise ValueError("dimension is not a power of two")
        return StateVector(n, self.vectors[k])


def computational_basis(dimension: int, valid_outcomes=()) -> MeasurementBasis:
    """The standard basis of the given dimension."""
    return MeasurementBasis(dimension, np.eye(dimension, dtype=complex), frozenset(valid_outcomes))


def complete_basis(partial, dimension: int, valid_outcomes=None) -> MeasurementBasis:
    """Extend orthonormal vectors to a full basis of ``dimension``.

    The input vectors come first, in order. Completion is deterministic:
    Gram-Schmidt against the computational basis vectors taken in
    ascending index order, discarding residuals with norm below 1e-9.
    ``valid_outcomes`` defaults to the indices of the input vectors.

    Args:
        partial: sequence of StateVectors or amplitude rows, pairwise
            orthonormal to within ``ATOL``.
        dimension: size of the completed basis.
        valid_outcomes: outcome indices to mark valid.

    Raises:
        ValueError: if the input vectors are not orthonormal.
    """
    rows = [
        v.amplitudes if isinstance(v, StateVector) else np.asarray(v, dtype=complex)
        for v in partial
    ]
    m = len(rows)
    if m > dimension:
        raise ValueError("more seed vectors than dimension")
    vecs = np.zeros((dimension, dimension), dtype=complex)
    if m:
        seed = np.array(rows)
        if seed.shape[1] != dimension:
            raise ValueError("seed vector length does not match dimension")
        gram = seed @ seed.conj().T
        if np.abs(gram - np.eye(m)).max() > ATOL:
            raise ValueError("seed vectors are not orthonormal")
        vecs[:m] = seed
    for i in range(dimension):
        if m == dimension:
            break
        # residual of e_i against the rows accumulated so far; since e_i is
        # a unit computational vector its coefficients are one column slice
        residual = -(vecs[:m].T @ vecs[:m, i].conj())
        residual[i] += 1.0
        norm = np.linalg.norm(residual)
        if norm < 1e-9:
            continue
        vecs[m] = residual / norm
        m += 1
    if m < dimension:
        raise ValueError("completion failed to span the space")
    if valid_outcomes is None:
        valid_outcomes = range(len(rows))
    return MeasurementBasis(dimension, vecs, frozenset(valid_outcomes))


def as_generator(rng) -> np.random.Generator:
    """Coerce an int seed or Generator into a Generator (no implicit entropy)."""
    if isinstance(rng, np.random.Generator):
        return rng
    if isinstance(rng, (int, np.integer)):
        return np.random.default_rng(int(rng))
    raise TypeError("rng must be an int seed or numpy.random.Generator")


def born_distribution(state: StateVector, basis: MeasurementBasis) -> np.ndarray:
    """Exact outcome probabilities |<basis_k|state>|^2."""
    if state.dimension != basis.dimension:
        raise ValueError("state and basis dimensions differ")
    probs = np.abs(basis.vectors.conj() @ state.amplitudes) ** 2
    total = probs.sum()
    if abs(total - 1.0) > ATOL:
        raise ValueError(f"probabilities sum to {total}, not 1")
    return probs / total


def measure(state: StateVector, basis: MeasurementBasis, rng) -> int:
    """Sample one outcome index with Born probabilities; deterministic per seed."""
    probs = born_distribution(state, basis)
    return int(as_generator(rng).choice(basis.dimension, p=probs))


def random_state(num_qubits: int, rng) -> StateVector:
    """Haar-ish random test state (normalized complex Gaussian amplitudes)."""
    gen = as_generator(rng)
    amps = gen.normal(size=2**num_qubits) + 1j * gen.normal(size=2**num_qubits)
    return StateVector(num_qubits, amps / np.linalg.norm(amps))


@dataclass(frozen=True, eq=False)
class HermitianMatrix:
    """Square conjugate-symmetric matrix (density-operator carrier)."""

    entries: np.ndarray

    def __post_init__(self):
        arr = _frozen_array(self.entries)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError("entries must be a square matrix")
        if np.abs(arr - arr.conj().T).max() > ATOL:
            raise ValueError("matrix is not Hermitian within tolerance")
        object.__setattr__(self, "entries", arr)

    @property
    def dimension(self) -> int:
        return self.entries.shape[0]

    def trace(self) -> float:
        return float(np.trace(self.entries).real)


def hermitian_eig(matrix) -> tuple[np.ndarray, np.ndarray]:
    """Eigenvalues (ascending) and orthonormal eigenvector columns.

    Accepts a HermitianMatrix or a raw ndarray; the input is validated
    for conjugate symmetry either way.
    """
    if not isinstance(matrix, HermitianMatrix):
        matrix = HermitianMatrix(np.asarray(matrix, dtype=complex))
    return np.linalg.eigh(matrix.entries)


# --- text serialization -------------------------------------------------
#
# One line per amplitude, "re im" with 17 significant digits (round-trips
# float64 exactly), preceded by "qubits=<n>". Shared by the wire format
# and the golden files.


def state_to_text(state: StateVector) -> str:
    lines = [f"qubits={state.num_qubits}"]
    lines += [f"{a.real:.17g} {a.imag:.17g}" for a in state.amplitudes]
    return "\n".join(lines) + "\n"


def state_from_text(text: str) -> StateVector:
    lines = [ln for ln in text.splitlines() if ln.strip()]
    if not lines or not lines[0].startswith("qubits="):
        raise ValueError("missing 'qubits=<n>' header line")
    try:
        n = int(lines[0].split("=", 1)[1])
    except ValueError:
        raise ValueError("malformed qubit count in header") from None
    body = lines[1:]
    if len(body) != 2**n:
        raise ValueError(f"expected {2**n} amplitude lines, found {len(body)}")
    amps = np.empty(2**n, dtype=complex)
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != 2:
            raise ValueError(f"amplitude line {i} is not a 're im' pair")
        amps[i] = complex(float(parts[0]), float(parts[1]))
    return StateVector(n, amps)


def ket_string(state: StateVector, digits: int = 4, max_terms: int | None = None) -> str:
    """Human-readable ket expansion, zero terms omitted."""
    terms = []
    for i, a in enumerate(state.amplitudes):
        if abs(a) < 1e-12:
            continue
        label = index_to_bits(i, state.num_qubits)
        if abs(a.imag) < 1e-12:
            coeff = f"{a.real:+.{digits}f}"
        else:
            coeff = f"+({a.real:.{digits}f}{a.imag:+.{digits}f}i)"
        terms.append(f"{coeff}|{label}>")
    if max_terms is not None and len(terms) > max_terms:
        terms = terms[:max_terms] + ["..."]
    return " ".join(terms) if terms else "0"
