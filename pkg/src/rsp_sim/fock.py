"""Multimode bosonic Fock states on a fixed photon-number shell.

Pure states are sparse maps from occupation vectors to complex amplitudes
over an ordered set of polarization modes; mixed states are dense matrices
over an explicit occupation basis. Every operation conserves total photon
number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import IntEnum
from typing import Iterable, Mapping

import numpy as np

NORM_TOL = 1e-12       # normalization / hermiticity / equality tolerance
PSD_FLOOR = -1e-10     # eigenvalue floor accepted as "positive"
AMP_PRUNE = 1e-15      # amplitudes at or below this are treated as exact zeros


class ModeMismatchError(ValueError):
    """Raised when two objects do not share a compatible mode layout."""


class Location(IntEnum):
    SOURCE = 0
    ALICE = 1
    BOB = 2


class Polarization(IntEnum):
    H = 0
    V = 1


@dataclass(frozen=True, order=True)
class Mode:
    """One optical mode: owner, polarization, distinguishability tag.

    tag 0 is the principal temporal/spectral mode; tags > 0 are auxiliary
    modes that only appear in distinguishability studies. The dataclass
    field order (location, polarization, tag) defines the canonical total
    ordering used to serialize occupation vectors.
    """

    location: Location
    polarization: Polarization
    tag: int = 0

    def __post_init__(self):
        if self.tag < 0:
            raise ValueError(f"mode tag must be >= 0, got {self.tag}")

    def label(self) -> str:
        loc = {Location.SOURCE: "S", Location.ALICE: "A", Location.BOB: "B"}[self.location]
        pol = "H" if self.polarization is Polarization.H else "V"
        suffix = f"~{self.tag}" if self.tag else ""
        return f"{loc}.{pol}{suffix}"


SOURCE_H = Mode(Location.SOURCE, Polarization.H)
SOURCE_V = Mode(Location.SOURCE, Polarization.V)
ALICE_H = Mode(Location.ALICE, Polarization.H)
ALICE_V = Mode(Location.ALICE, Polarization.V)
BOB_H = Mode(Location.BOB, Polarization.H)
BOB_V = Mode(Location.BOB, Polarization.V)


def occupation_label(modes: tuple[Mode, ...], occ: tuple[int, ...]) -> str:
    """Human-readable tag for one occupation vector, e.g. ``2H,1V``.

    Zero counts of principal modes are kept (``3H,0V``); empty auxiliary
    modes are dropped so undisturbed states read naturally. When the modes
    span several locations each group is prefixed, e.g. ``A:1H,0V B:2H,1V``.
    """
    groups: dict[Location, list[str]] = {}
    for mode, count in zip(modes, occ):
        if mode.tag > 0 and count == 0:
            continue
        pol = "H" if mode.polarization is Polarization.H else "V"
        suffix = f"~{mode.tag}" if mode.tag else ""
        groups.setdefault(mode.location, []).append(f"{count}{pol}{suffix}")
    if len(groups) <= 1:
        return ",".join(part for parts in groups.values() for part in parts)
    prefix = {Location.SOURCE: "S", Location.ALICE: "A", Location.BOB: "B"}
    return " ".join(
        f"{prefix[loc]}:{','.join(parts)}" for loc, parts in sorted(groups.items())
    )


class FockState:
    """Sparse superposition over occupation vectors of a fixed mode set.

    Amplitudes below ``AMP_PRUNE`` are dropped at construction, so absent
    keys are exact zeros. States are treated as immutable values.
    """

    __slots__ = ("modes", "amps", "total_photons")

    def __init__(self, modes: Iterable[Mode], amplitudes: Mapping[tuple[int, ...], complex]):
        modes = tuple(modes)
        if len(set(modes)) != len(modes):
            raise ModeMismatchError("duplicate modes in state")
        if list(modes) != sorted(modes):
            raise ModeMismatchError("modes must be given in canonical order")
        amps: dict[tuple[int, ...], complex] = {}
        for occ, amp in amplitudes.items():
            amp = complex(amp)
            if abs(amp) <= AMP_PRUNE:
                continue
            occ = tuple(int(c) for c in occ)
            if len(occ) != len(modes):
                raise ModeMismatchError(
                    f"occupation length {len(occ)} does not match {len(modes)} modes"
                )
            if any(c < 0 for c in occ):
                raise ValueError(f"negative occupation in {occ}")
            amps[occ] = amps.get(occ, 0j) + amp
        if not amps:
            raise ValueError("state has no support")
        totals = {sum(occ) for occ in amps}
        if len(totals) != 1:
            raise ValueError(f"mixed photon numbers {sorted(totals)} in one state")
        total = totals.pop()
        if total < 1:
            raise ValueError("state must carry at least one photon")
        self.modes = modes
        self.amps = amps
        self.total_photons = total

    def norm(self) -> float:
        return math.sqrt(sum(abs(a) ** 2 for _, a in sorted(self.amps.items())))

    def normalized(self) -> "FockState":
        n = self.norm()
        if n <= AMP_PRUNE:
            raise ValueError("cannot normalize a numerically zero state")
        return FockState(self.modes, {occ: a / n for occ, a in self.amps.items()})

    def amplitude(self, occ: tuple[int, ...]) -> complex:
        return self.amps.get(tuple(occ), 0j)

    def items(self):
        return sorted(self.amps.items())

    def __repr__(self) -> str:
        terms = []
        for occ, amp in self.items()[:4]:
            terms.append(f"({amp:.4g})|{occupation_label(self.modes, occ)}>")
        more = " + ..." if len(self.amps) > 4 else ""
        return f"FockState({' + '.join(terms)}{more})"


def make_fock(occupations: Iterable[tuple[Mode, int]]) -> FockState:
    """Single occupation-basis ket with amplitude 1 from (mode, count) pairs."""
    pairs = list(occupations)
    modes = [m for m, _ in pairs]
    if len(set(modes)) != len(modes):
        raise ModeMismatchError("duplicate mode in occupation list")
    for mode, count in pairs:
        if not isinstance(mode, Mode):
            raise ModeMismatchError(f"not a mode: {mode!r}")
        if count < 0:
            raise ValueError(f"negative photon count {count} for {mode.label()}")
    pairs.sort(key=lambda p: p[0])
    occ = tuple(count for _, count in pairs)
    if sum(occ) < 1:
        raise ValueError("at least one photon required")
    return FockState(tuple(m for m, _ in pairs), {occ: 1.0 + 0j})


def superpose(terms: Iterable[tuple[complex, FockState]]) -> FockState:
    """Linear combination of states, aligned on the union of their modes.

    The result is not renormalized; call ``.normalized()`` if needed.
    """
    terms = list(terms)
    if not terms:
        raise ValueError("superpose needs at least one term")
    all_modes = tuple(sorted({m for _, s in terms for m in s.modes}))
    amps: dict[tuple[int, ...], complex] = {}
    for coeff, state in terms:
        embedded = extend_modes(state, all_modes)
        for occ, amp in embedded.items():
            amps[occ] = amps.get(occ, 0j) + complex(coeff) * amp
    return FockState(all_modes, amps)


def extend_modes(state: FockState, modes: Iterable[Mode]) -> FockState:
    """Embed a state into a larger mode set; new modes get occupation 0."""
    target = tuple(sorted(set(modes) | set(state.modes)))
    if target == state.modes:
        return state
    positions = {m: i for i, m in enumerate(target)}
    amps = {}
    for occ, amp in state.amps.items():
        full = [0] * len(target)
        for m, c in zip(state.modes, occ):
            full[positions[m]] = c
        amps[tuple(full)] = amp
    return FockState(target, amps)


def without_modes(state: FockState, drop: Iterable[Mode]) -> FockState:
    """Remove modes that are unoccupied in every basis ket."""
    drop = set(drop)
    missing = drop - set(state.modes)
    if missing:
        raise ModeMismatchError(f"cannot drop absent modes {sorted(m.label() for m in missing)}")
    keep_idx = [i for i, m in enumerate(state.modes) if m not in drop]
    drop_idx = [i for i, m in enumerate(state.modes) if m in drop]
    for occ in state.amps:
        if any(occ[i] for i in drop_idx):
            raise ValueError("cannot drop occupied modes")
    modes = tuple(state.modes[i] for i in keep_idx)
    amps = {tuple(occ[i] for i in keep_idx): a for occ, a in state.amps.items()}
    return FockState(modes, amps)


def tensor(a: FockState, b: FockState) -> FockState:
    """Product state of two states on disjoint mode sets."""
    if set(a.modes) & set(b.modes):
        raise ModeMismatchError("tensor factors share modes")
    modes = tuple(sorted(a.modes + b.modes))
    positions = {m: i for i, m in enumerate(modes)}
    amps = {}
    for occ_a, amp_a in a.amps.items():
        for occ_b, amp_b in b.amps.items():
            full = [0] * len(modes)
            for m, c in zip(a.modes, occ_a):
                full[positions[m]] = c
            for m, c in zip(b.modes, occ_b):
                full[positions[m]] = c
            amps[tuple(full)] = amp_a * amp_b
    return FockState(modes, amps)


def inner_product(a: FockState, b: FockState) -> complex:
    """<a|b> in the orthonormal occupation basis.

    Both states must share the same mode tuple and photon number. Terms are
    accumulated in sorted key order, which makes
    ``inner_product(a, b) == conj(inner_product(b, a))`` hold exactly.
    """
    if a.modes != b.modes:
        raise ModeMismatchError("states live on different mode sets")
    if a.total_photons != b.total_photons:
        raise ModeMismatchError(
            f"photon numbers differ: {a.total_photons} vs {b.total_photons}"
        )
    keys = sorted(set(a.amps) & set(b.amps))
    return sum((a.amps[k].conjugate() * b.amps[k] for k in keys), 0j)


class DensityOperator:
    """Dense operator over an explicit, canonically sorted occupation basis."""

    __slots__ = ("modes", "basis", "matrix", "_index")

    def __init__(
        self,
        modes: Iterable[Mode],
        basis: Iterable[tuple[int, ...]],
        matrix: np.ndarray,
    ):
        modes = tuple(modes)
        basis = tuple(tuple(int(c) for c in occ) for occ in basis)
        if list(modes) != sorted(modes) or len(set(modes)) != len(modes):
            raise ModeMismatchError("modes must be unique and canonically ordered")
        if len(set(basis)) != len(basis):
            raise ValueError("duplicate occupation vectors in basis")
        if any(len(occ) != len(modes) for occ in basis):
            raise ModeMismatchError("basis entry length does not match mode count")
        matrix = np.asarray(matrix, dtype=complex)
        if matrix.shape != (len(basis), len(basis)):
            raise ValueError(f"matrix shape {matrix.shape} does not match basis size {len(basis)}")
        self.modes = modes
        self.basis = basis
        self.matrix = matrix
        self._index = {occ: i for i, occ in enumerate(basis)}

    def trace(self) -> float:
        return float(np.trace(self.matrix).real)

    def entry(self, row: tuple[int, ...], col: tuple[int, ...]) -> complex:
        i = self._index.get(tuple(row))
        j = self._index.get(tuple(col))
        if i is None or j is None:
            return 0j
        return complex(self.matrix[i, j])

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)

    def validate(self, *, trace_tol: float = NORM_TOL, psd_floor: float = PSD_FLOOR) -> None:
        """Raise if the operator is not Hermitian, trace-one and positive."""
        herm = np.max(np.abs(self.matrix - self.matrix.conj().T))
        if herm > trace_tol:
            raise ValueError(f"not Hermitian: max asymmetry {herm:.3e}")
        if abs(self.trace() - 1.0) > trace_tol:
            raise ValueError(f"trace {self.trace()!r} differs from 1")
        lo = float(self.eigenvalues().min())
        if lo < psd_floor:
            raise ValueError(f"negative eigenvalue {lo:.3e}")

    def __repr__(self) -> str:
        return f"DensityOperator(dim={len(self.basis)}, trace={self.trace():.6f})"


def to_density(state: FockState) -> DensityOperator:
    """Rank-1 projector |s><s| on the span of the state's occupation vectors."""
    basis = tuple(sorted(state.amps))
    v = np.array([state.amps[occ] for occ in basis], dtype=complex)
    return DensityOperator(state.modes, basis, np.outer(v, v.conj()))


def partial_trace(rho: DensityOperator, keep: Iterable[Mode]) -> DensityOperator:
    """Reduced operator on ``keep``; the complement is traced out.

    ``keep`` must be a nonempty strict subset of the operator's modes.
    The trace is preserved exactly (no renormalization happens here).
    """
    keep_set = set(keep)
    mode_set = set(rho.modes)
    if not keep_set:
        raise ModeMismatchError("keep set is empty")
    if not keep_set < mode_set:
        extra = keep_set - mode_set
        if extra:
            raise ModeMismatchError(f"unknown modes {sorted(m.label() for m in extra)}")
        raise ModeMismatchError("keep set equals the full mode set; nothing to trace out")
    keep_idx = [i for i, m in enumerate(rho.modes) if m in keep_set]
    out_idx = [i for i, m in enumerate(rho.modes) if m not in keep_set]

    def kept(occ):
        return tuple(occ[i] for i in keep_idx)

    def traced(occ):
        return tuple(occ[i] for i in out_idx)

    new_basis = tuple(sorted({kept(occ) for occ in rho.basis}))
    index = {occ: k for k, occ in enumerate(new_basis)}
    out = np.zeros((len(new_basis), len(new_basis)), dtype=complex)
    for i, occ_i in enumerate(rho.basis):
        for j, occ_j in enumerate(rho.basis):
            if traced(occ_i) == traced(occ_j):
                out[index[kept(occ_i)], index[kept(occ_j)]] += rho.matrix[i, j]
    new_modes = tuple(m for m in rho.modes if m in keep_set)
    return DensityOperator(new_modes, new_basis, out)


def expectation(rho: DensityOperator, ket: FockState) -> float:
    """<ket|rho|ket> for a ket expressed on the same modes as the operator."""
    if ket.modes != rho.modes:
        raise ModeMismatchError("ket and operator live on different mode sets")
    v = np.array([ket.amps.get(occ, 0j) for occ in rho.basis], dtype=complex)
    return float((v.conj() @ rho.matrix @ v).real)


def operator_distance(a: DensityOperator, b: DensityOperator) -> float:
    """Max absolute entry difference, aligned over the union of both bases."""
    if a.modes != b.modes:
        raise ModeMismatchError("operators live on different mode sets")
    keys = sorted(set(a.basis) | set(b.basis))
    worst = 0.0
    for ri in keys:
        for cj in keys:
            worst = max(worst, abs(a.entry(ri, cj) - b.entry(ri, cj)))
    return worst
