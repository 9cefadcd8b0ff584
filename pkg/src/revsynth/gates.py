"""Multiple-control inverter gates, gate libraries, and circuits.

A gate on n wires flips its target wire exactly when every control wire
carries 1; with no controls it is a plain inverter.  Wires are numbered 1..n
starting at the most significant bit of the value a circuit state encodes, so
wire i of value v is bit (n - i).  Acting on the 2**n state values, every gate
is therefore an involution on the points 1..2**n.

Gate text names follow the control count: N<t> for no controls, F<c><t> for
one, T<c1><c2><t> for two, target always last.  Control order in a name is
irrelevant on parse; formatting uses one canonical name per gate.  Circuits
are cascades written first-gate-first.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from itertools import combinations

from .perms import Permutation, compose, identity

#: Canonical display names for the two-control gates on three wires.  The
#: published convention spells the target-1 gate with descending controls, so
#: a uniform ascending rule cannot generate all three.
_T_NAMES = {((1, 2), 3): "T123", ((1, 3), 2): "T132", ((2, 3), 1): "T321"}
_GATE_LETTERS = {0: "N", 1: "F", 2: "T"}


class GateSyntaxError(ValueError):
    """Malformed gate, library, or circuit text."""


class UnsupportedGateError(ValueError):
    """Gate shape outside the supported N/F/T classes or the cost model."""


@dataclass(frozen=True)
class Gate:
    """One multiple-control inverter; controls are kept sorted ascending."""

    controls: tuple[int, ...]
    target: int

    def __post_init__(self) -> None:
        controls = tuple(sorted(set(self.controls)))
        object.__setattr__(self, "controls", controls)
        if self.target < 1 or any(c < 1 for c in controls):
            raise ValueError("wire numbers start at 1")
        if self.target in controls:
            raise ValueError(f"target {self.target} cannot also be a control")

    @property
    def max_wire(self) -> int:
        return max((self.target, *self.controls))

    def __str__(self) -> str:
        return format_gate(self)


def format_gate(gate: Gate) -> str:
    """Canonical text name of a gate (wires above 9 have no text form)."""
    letter = _GATE_LETTERS.get(len(gate.controls))
    if letter is None:
        raise UnsupportedGateError(f"no text form for {len(gate.controls)} controls")
    if gate.max_wire > 9:
        raise UnsupportedGateError("gate names use single-digit wire numbers")
    special = _T_NAMES.get((gate.controls, gate.target))
    if special is not None:
        return special
    digits = "".join(str(c) for c in gate.controls) + str(gate.target)
    return letter + digits


def parse_gate(text: str) -> Gate:
    """Parse a gate name such as N2, F13, or T321 (controls in any order)."""
    m = re.fullmatch(r"([NFT])([1-9]+)", text.strip().upper())
    if m is None:
        raise GateSyntaxError(f"malformed gate name {text!r}")
    letter, digits = m.groups()
    expected = {"N": 1, "F": 2, "T": 3}[letter]
    if len(digits) != expected:
        raise GateSyntaxError(f"{letter} gates take {expected} wire digits: {text!r}")
    wires = [int(d) for d in digits]
    controls, target = wires[:-1], wires[-1]
    if len(set(wires)) != len(wires):
        raise GateSyntaxError(f"repeated wire in gate name {text!r}")
    return Gate(tuple(controls), target)


def gate_perm(gate: Gate, n_wires: int) -> Permutation:
    """The involution a gate induces on the 2**n_wires state values."""
    if gate.max_wire > n_wires:
        raise ValueError(f"gate {gate} does not fit on {n_wires} wires")
    size = 1 << n_wires
    target_bit = 1 << (n_wires - gate.target)
    control_mask = sum(1 << (n_wires - c) for c in gate.controls)
    images = []
    for value in range(size):
        out = value ^ target_bit if value & control_mask == control_mask else value
        images.append(out + 1)
    return Permutation(tuple(images))


@dataclass(frozen=True)
class CostModel:
    """Gate cost as a function of control count: costs[k] prices k controls."""

    costs: tuple[int, ...] = (0, 1, 5)

    def __post_init__(self) -> None:
        if not self.costs or any(c < 0 or not isinstance(c, int) for c in self.costs):
            raise ValueError("costs must be non-negative integers")

    def gate_cost(self, gate: Gate) -> int:
        k = len(gate.controls)
        if k >= len(self.costs):
            raise UnsupportedGateError(f"no cost defined for {k} controls")
        return self.costs[k]


DEFAULT_COST_MODEL = CostModel()


@dataclass(frozen=True)
class GateLibrary:
    """An ordered set of distinct gates on a fixed wire count."""

    n_wires: int
    gates: tuple[Gate, ...]

    def __post_init__(self) -> None:
        if self.n_wires < 1:
            raise ValueError("n_wires must be positive")
        if len(set(self.gates)) != len(self.gates):
            raise ValueError("library gates must be distinct")
        for gate in self.gates:
            if gate.max_wire > self.n_wires:
                raise ValueError(f"gate {gate} does not fit on {self.n_wires} wires")

    def __len__(self) -> int:
        return len(self.gates)

    def __str__(self) -> str:
        return format_library(self)


def nft_library(n_wires: int) -> GateLibrary:
    """All gates with up to two controls on n_wires wires, in canonical order.

    On three wires this is the familiar twelve-gate listing N1, N2, N3, F12,
    F13, F23, F21, F32, F31, T123, T132, T321: inverters by target, then
    ascending control-target pairs, then descending ones, then the
    two-control gates by ascending control set.
    """
    if n_wires < 1:
        raise ValueError("n_wires must be positive")
    gates = [Gate((), t) for t in range(1, n_wires + 1)]
    gates += [Gate((c,), t) for c, t in combinations(range(1, n_wires + 1), 2)]
    gates += [
        Gate((c,), t)
        for c in range(2, n_wires + 1)
        for t in range(c - 1, 0, -1)
    ]
    for pair in combinations(range(1, n_wires + 1), 2):
        gates += [Gate(pair, t) for t in range(1, n_wires + 1) if t not in pair]
    return GateLibrary(n_wires, tuple(gates))


def library_mask(library: GateLibrary) -> int:
    """Bitmask of a library against the canonical listing for its wire count.

    Bit i is set when gate i of nft_library(n_wires) is present.  Raises if
    some gate is outside the canonical listing.
    """
    canonical = {gate: i for i, gate in enumerate(nft_library(library.n_wires).gates)}
    mask = 0
    for gate in library.gates:
        position = canonical.get(gate)
        if position is None:
            raise ValueError(f"gate {gate} is not in the canonical listing")
        mask |= 1 << position
    return mask


def sublibrary_from_mask(library: GateLibrary, mask: int) -> GateLibrary:
    """The sub-library selected by a bitmask over library.gates."""
    if not 1 <= mask < 1 << len(library.gates):
        raise ValueError(f"mask {mask:#x} out of range for {len(library.gates)} gates")
    picked = tuple(g for i, g in enumerate(library.gates) if mask >> i & 1)
    return GateLibrary(library.n_wires, picked)


def enumerate_sublibraries(library: GateLibrary):
    """Yield (mask, sub-library) for every non-empty subset, masks ascending."""
    if len(library.gates) > 24:
        raise ValueError("sub-library enumeration is capped at 24 gates")
    for mask in range(1, 1 << len(library.gates)):
        yield mask, sublibrary_from_mask(library, mask)


def parse_library(text: str, n_wires: int = 3) -> GateLibrary:
    """Parse library text: "ALL"/"NFT", a hex mask like 0x9c1, or gate names.

    Gate-name lists are normalised to canonical listing order, so "F12,N1"
    and mask 0x9 describe the same library.
    """
    stripped = text.strip()
    if stripped.upper() in {"ALL", "NFT"}:
        return nft_library(n_wires)
    canonical = nft_library(n_wires)
    if stripped.lower().startswith("0x"):
        try:
            mask = int(stripped, 16)
        except ValueError:
            raise GateSyntaxError(f"malformed library mask {text!r}") from None
        if not 1 <= mask < 1 << len(canonical.gates):
            raise GateSyntaxError(
                f"library mask {stripped} out of range 0x1..{(1 << len(canonical.gates)) - 1:#x}"
            )
        return sublibrary_from_mask(canonical, mask)
    names = [piece for piece in stripped.replace(",", " ").split() if piece]
    if not names:
        raise GateSyntaxError("empty library text")
    gates = [parse_gate(name) for name in names]
    if len(set(gates)) != len(gates):
        raise GateSyntaxError(f"repeated gate in library text {text!r}")
    positions = {gate: i for i, gate in enumerate(canonical.gates)}
    for gate in gates:
        if gate.max_wire > n_wires:
            raise GateSyntaxError(f"gate {format_gate(gate)} does not fit on {n_wires} wires")
    gates.sort(key=lambda g: positions.get(g, len(canonical.gates)))
    return GateLibrary(n_wires, tuple(gates))


def format_library(library: GateLibrary) -> str:
    """Comma-separated canonical gate names."""
    return ",".join(format_gate(g) for g in library.gates)


@dataclass(frozen=True)
class Circuit:
    """A cascade of gates on a fixed wire count; the first gate acts first."""

    n_wires: int
    gates: tuple[Gate, ...]

    def __post_init__(self) -> None:
        for gate in self.gates:
            if gate.max_wire > self.n_wires:
                raise ValueError(f"gate {gate} does not fit on {self.n_wires} wires")

    def __len__(self) -> int:
        return len(self.gates)

    def __str__(self) -> str:
        return format_circuit(self)


def circuit_perm(circuit: Circuit) -> Permutation:
    """The permutation a cascade realises; the empty circuit is the identity."""
    result = identity(1 << circuit.n_wires)
    for gate in circuit.gates:
        result = compose(result, gate_perm(gate, circuit.n_wires))
    return result


def circuit_cost(circuit: Circuit, model: CostModel = DEFAULT_COST_MODEL) -> int:
    """Total gate cost of a cascade under a cost model."""
    return sum(model.gate_cost(gate) for gate in circuit.gates)


def parse_circuit(text: str, n_wires: int = 3) -> Circuit:
    """Parse circuit text: gate names separated by commas or whitespace,
    first gate first; empty text is the empty circuit."""
    names = [piece for piece in text.replace(",", " ").split() if piece]
    return Circuit(n_wires, tuple(parse_gate(name) for name in names))


def format_circuit(circuit: Circuit) -> str:
    """Comma-separated gate names, first gate first; empty circuit is ""."""
    return ",".join(format_gate(g) for g in circuit.gates)
