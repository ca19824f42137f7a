"""Heralding, projective measurement, and partial-polarizer conditioning.

All detectors are ideal and photon-number resolving; conditioning on an
outcome renormalizes the surviving state. A probability below
``PROB_FLOOR`` is reported as structurally impossible rather than as a
numerical zero.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .fock import (
    NORM_TOL,
    DensityOperator,
    FockState,
    Mode,
    ModeMismatchError,
    to_density,
)

PROB_FLOOR = 1e-15


class ImpossibleHeraldError(ValueError):
    """The requested photon-count pattern has no support in the state."""


class ZeroProbabilityError(ValueError):
    """Conditioning on an outcome of (numerically) zero probability."""


@dataclass(frozen=True)
class HeraldPattern:
    """Photon-count conditions: each constraint fixes the total count over a
    disjoint group of modes."""

    constraints: tuple[tuple[frozenset[Mode], int], ...]

    def __init__(self, constraints: Iterable[tuple[Iterable[Mode], int]]):
        normalized = []
        seen: set[Mode] = set()
        for modes, count in constraints:
            group = frozenset(modes)
            if not group:
                raise ValueError("empty mode group in herald pattern")
            if group & seen:
                raise ValueError("herald pattern groups must be disjoint")
            if count < 0:
                raise ValueError(f"negative required count {count}")
            seen |= group
            normalized.append((group, int(count)))
        object.__setattr__(self, "constraints", tuple(normalized))

    def required_total(self) -> int:
        return sum(count for _, count in self.constraints)


def herald(state: FockState, pattern: HeraldPattern) -> tuple[float, FockState]:
    """Condition on a photon-count pattern.

    Returns the pattern probability and the renormalized restriction of the
    state to matching occupation vectors.
    """
    for group, _ in pattern.constraints:
        unknown = group - set(state.modes)
        if unknown:
            raise ModeMismatchError(
                f"pattern uses modes absent from the state: "
                f"{sorted(m.label() for m in unknown)}"
            )
    if pattern.required_total() > state.total_photons:
        raise ValueError(
            f"pattern requires {pattern.required_total()} photons, state has "
            f"{state.total_photons}"
        )
    groups = [
        ([state.modes.index(m) for m in group], count)
        for group, count in pattern.constraints
    ]
    matching = {
        occ: amp
        for occ, amp in state.items()
        if all(sum(occ[i] for i in idx) == count for idx, count in groups)
    }
    probability = sum(abs(a) ** 2 for a in matching.values())
    if probability < PROB_FLOOR:
        raise ImpossibleHeraldError(
            f"herald pattern has probability {probability:.3e} (< {PROB_FLOOR})"
        )
    scale = 1.0 / math.sqrt(probability)
    conditional = FockState(state.modes, {occ: a * scale for occ, a in matching.items()})
    return probability, conditional


@dataclass(frozen=True)
class Projector:
    """Projection onto a normalized ket."""

    target: FockState

    def __post_init__(self):
        n = self.target.norm()
        if abs(n - 1.0) > NORM_TOL:
            raise ValueError(f"projector target has norm {n!r}, expected 1")


def project(
    state: FockState,
    proj: Projector,
    on: Iterable[Mode] | None = None,
) -> tuple[float, FockState]:
    """Project the ``on`` subsystem onto ``proj`` and return what remains.

    Probability is ||(<phi| (x) I)|s>||^2; the remote state is the
    renormalized residual, living on the modes not projected.
    """
    target = proj.target
    on_modes = tuple(sorted(target.modes if on is None else on))
    if set(on_modes) != set(target.modes):
        raise ModeMismatchError("projector support does not match the given modes")
    if not set(on_modes) < set(state.modes):
        raise ModeMismatchError("projection must act on a strict subset of the state's modes")
    on_idx = [i for i, m in enumerate(state.modes) if m in set(on_modes)]
    rest_idx = [i for i, m in enumerate(state.modes) if m not in set(on_modes)]
    # target occupations keyed in the same (canonical) order as on_idx slices
    residual: dict[tuple[int, ...], complex] = {}
    for occ, amp in state.items():
        key_on = tuple(occ[i] for i in on_idx)
        phi_amp = target.amps.get(key_on)
        if phi_amp is None:
            continue
        key_rest = tuple(occ[i] for i in rest_idx)
        residual[key_rest] = residual.get(key_rest, 0j) + phi_amp.conjugate() * amp
    probability = sum(abs(a) ** 2 for _, a in sorted(residual.items()))
    if probability < PROB_FLOOR:
        raise ZeroProbabilityError(
            f"projection probability {probability:.3e} (< {PROB_FLOOR})"
        )
    scale = 1.0 / math.sqrt(probability)
    rest_modes = tuple(state.modes[i] for i in rest_idx)
    remote = FockState(rest_modes, {occ: a * scale for occ, a in residual.items()})
    return probability, remote


@dataclass(frozen=True)
class PovmElement:
    """Positive operator on an explicit occupation basis, with the projection
    strength that produced it."""

    modes: tuple[Mode, ...]
    basis: tuple[tuple[int, ...], ...]
    operator: np.ndarray
    strength: float

    def __post_init__(self):
        op = np.asarray(self.operator, dtype=complex)
        if op.shape != (len(self.basis), len(self.basis)):
            raise ValueError("operator shape does not match basis")
        eig = np.linalg.eigvalsh(op)
        if eig.min() < -NORM_TOL or eig.max() > 1.0 + NORM_TOL:
            raise ValueError(f"POVM element eigenvalues outside [0, 1]: {eig}")
        object.__setattr__(self, "operator", op)
        object.__setattr__(self, "basis", tuple(tuple(occ) for occ in self.basis))

    def entry(self, row: tuple[int, ...], col: tuple[int, ...]) -> complex:
        try:
            i = self.basis.index(tuple(row))
            j = self.basis.index(tuple(col))
        except ValueError:
            return 0j
        return complex(self.operator[i, j])


def partial_polarizer_povm(phi: Projector, p: float) -> PovmElement:
    """Weighted projection p |phi><phi| + (1-p) I/2 on a single-photon pair
    of modes; p = 1 is a sharp projector, p = 0 leaves the photon unmeasured."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"projection strength p={p} outside [0, 1]")
    target = phi.target
    if len(target.modes) != 2 or target.total_photons != 1:
        raise ModeMismatchError(
            "partial polarizer acts on a single photon in a two-mode basis"
        )
    basis = ((0, 1), (1, 0))
    v = np.array([target.amps.get(occ, 0j) for occ in basis], dtype=complex)
    op = p * np.outer(v, v.conj()) + (1.0 - p) / 2.0 * np.eye(2)
    return PovmElement(target.modes, basis, op, p)


def condition_on_povm(
    state_or_rho: FockState | DensityOperator,
    element: PovmElement,
    on: Iterable[Mode] | None = None,
) -> tuple[float, DensityOperator]:
    """Apply a POVM element to the ``on`` subsystem and trace it out.

    Returns the outcome probability Tr(E rho) and the conditional state
    Tr_on(E rho) / Tr(E rho) on the remaining modes. Pure-state inputs are
    promoted to density operators, so mixed and pure pipelines share one
    code path.
    """
    rho = to_density(state_or_rho) if isinstance(state_or_rho, FockState) else state_or_rho
    on_modes = tuple(sorted(element.modes if on is None else on))
    if set(on_modes) != set(element.modes):
        raise ModeMismatchError("POVM support does not match the given modes")
    if not set(on_modes) < set(rho.modes):
        raise ModeMismatchError("POVM must act on a strict subset of the modes")
    on_idx = [i for i, m in enumerate(rho.modes) if m in set(on_modes)]
    rest_idx = [i for i, m in enumerate(rho.modes) if m not in set(on_modes)]

    def split(occ):
        return tuple(occ[i] for i in on_idx), tuple(occ[i] for i in rest_idx)

    rest_basis = tuple(sorted({split(occ)[1] for occ in rho.basis}))
    index = {occ: k for k, occ in enumerate(rest_basis)}
    out = np.zeros((len(rest_basis), len(rest_basis)), dtype=complex)
    # rho_B[r, r'] = sum_{a, c} E[a, c] rho[(c, r), (a, r')]
    for i, occ_i in enumerate(rho.basis):
        c_on, r_rest = split(occ_i)
        for j, occ_j in enumerate(rho.basis):
            a_on, rp_rest = split(occ_j)
            w = element.entry(a_on, c_on)
            if w == 0:
                continue
            out[index[r_rest], index[rp_rest]] += w * rho.matrix[i, j]
    probability = float(np.trace(out).real)
    if probability < PROB_FLOOR:
        raise ZeroProbabilityError(
            f"POVM outcome probability {probability:.3e} (< {PROB_FLOOR})"
        )
    rest_modes = tuple(rho.modes[i] for i in rest_idx)
    return probability, DensityOperator(rest_modes, rest_basis, out / probability)
