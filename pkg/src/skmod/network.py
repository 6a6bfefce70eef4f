"""Reaction networks and their reaction-set machinery.

A network is an ordered species set, an ordered reaction list and the integer
stoichiometric matrix derived from them.  The jump process it models advances
by whole reactions, so everything downstream (graphs, projections, module
checks) is phrased in terms of reaction subsets: which reactions change a
species group, how they group by identical net change, and how a separator's
reaction set splits according to what else each reaction touches.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping, Optional, Sequence

import numpy as np

from .errors import (
    NetworkError,
    PartitionError,
    UnknownReactionError,
    UnknownSpeciesError,
)

MASS_ACTION = "mass_action"
CUSTOM = "custom"


@dataclass(frozen=True)
class Species:
    id: str
    index: int


@dataclass(frozen=True)
class Reaction:
    """One reaction: consumed species with counts, produced species with counts.

    A species present on both sides with equal counts acts as a catalyst: it
    stays in both lists and contributes a zero stoichiometric entry.
    ``rate_table``, when given, replaces the combinatorial mass-action factor
    with a lookup keyed by the tuple of reactant levels (in reactant order);
    the rate constant still multiplies the looked-up value.
    """

    name: str
    reactants: tuple[tuple[str, int], ...]
    products: tuple[tuple[str, int], ...]
    rate: float = 1.0
    rate_table: Optional[tuple[tuple[tuple[int, ...], float], ...]] = None

    @property
    def kinetics(self) -> str:
        return CUSTOM if self.rate_table is not None else MASS_ACTION

    @property
    def reactant_ids(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.reactants)

    @property
    def product_ids(self) -> tuple[str, ...]:
        return tuple(s for s, _ in self.products)

    def validate(self) -> None:
        for side, pairs in (("reactant", self.reactants), ("product", self.products)):
            seen = set()
            for sp, k in pairs:
                if k < 1:
                    raise NetworkError(
                        f"reaction {self.name!r}: {side} {sp!r} has stoichiometry {k}; must be >= 1"
                    )
                if sp in seen:
                    raise NetworkError(
                        f"reaction {self.name!r}: species {sp!r} appears twice as a {side}"
                    )
                seen.add(sp)
        if self.rate < 0:
            raise NetworkError(f"reaction {self.name!r}: negative rate constant")


@dataclass(frozen=True)
class ReactionClass:
    """Reactions grouped by an identical net change on some species subset."""

    change: tuple[int, ...]
    members: tuple[int, ...]


class ReactionNetwork:
    """Species list, reaction list and the derived stoichiometric matrix.

    The matrix ``S`` has one row per species and one column per reaction; the
    entry is production minus consumption.  No two columns may be equal:
    otherwise distinct reactions would be indistinguishable as jumps of the
    state process.
    """

    def __init__(self, species_ids: Sequence[str], reactions: Sequence[Reaction]):
        ids = list(species_ids)
        if len(set(ids)) != len(ids):
            dup = sorted({s for s in ids if ids.count(s) > 1})
            raise NetworkError(f"duplicate species ids: {', '.join(dup)}")
        self.species: tuple[Species, ...] = tuple(
            Species(s, i) for i, s in enumerate(ids)
        )
        self._index: dict[str, int] = {s: i for i, s in enumerate(ids)}

        names = [r.name for r in reactions]
        if len(set(names)) != len(names):
            dup = sorted({n for n in names if names.count(n) > 1})
            raise NetworkError(f"duplicate reaction names: {', '.join(dup)}")
        for r in reactions:
            r.validate()
            for sp in r.reactant_ids + r.product_ids:
                if sp not in self._index:
                    raise UnknownSpeciesError(
                        f"reaction {r.name!r} references undeclared species {sp!r}"
                    )
        self.reactions: tuple[Reaction, ...] = tuple(reactions)
        self._reaction_index: dict[str, int] = {r.name: m for m, r in enumerate(reactions)}

        S = np.zeros((len(ids), len(reactions)), dtype=int)
        for m, r in enumerate(reactions):
            for sp, k in r.reactants:
                S[self._index[sp], m] -= k
            for sp, k in r.products:
                S[self._index[sp], m] += k
        S.setflags(write=False)
        self.S = S

        for m in range(self.M):
            for m2 in range(m + 1, self.M):
                if np.array_equal(S[:, m], S[:, m2]):
                    raise NetworkError(
                        f"reactions {reactions[m].name!r} and {reactions[m2].name!r} "
                        "have identical stoichiometric columns"
                    )

    # -- basic accessors -------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.species)

    @property
    def M(self) -> int:
        return len(self.reactions)

    @property
    def species_ids(self) -> tuple[str, ...]:
        return tuple(s.id for s in self.species)

    def index(self, species_id: str) -> int:
        try:
            return self._index[species_id]
        except KeyError:
            raise UnknownSpeciesError(f"unknown species {species_id!r}") from None

    def indices(self, species_ids: Iterable[str]) -> tuple[int, ...]:
        return tuple(sorted(self.index(s) for s in set(species_ids)))

    def reaction_index(self, name: str) -> int:
        try:
            return self._reaction_index[name]
        except KeyError:
            raise UnknownReactionError(f"unknown reaction {name!r}") from None

    def resolve_reactions(self, reactions: Iterable[int | str]) -> tuple[int, ...]:
        out = []
        for r in reactions:
            if isinstance(r, str):
                out.append(self.reaction_index(r))
            else:
                if not 0 <= r < self.M:
                    raise UnknownReactionError(f"reaction index {r} out of range")
                out.append(r)
        return tuple(sorted(set(out)))

    def reactant_set(self, m: int) -> frozenset[str]:
        return frozenset(self.reactions[m].reactant_ids)

    def product_set(self, m: int) -> frozenset[str]:
        return frozenset(self.reactions[m].product_ids)

    def changed_set(self, m: int) -> frozenset[str]:
        return frozenset(
            s.id for s in self.species if self.S[s.index, m] != 0
        )

    def changed_reactants(self, m: int) -> frozenset[str]:
        """Reactants of m whose level is changed by m (catalysts excluded)."""
        return frozenset(
            sp for sp in self.reactions[m].reactant_ids if self.S[self.index(sp), m] != 0
        )

    def reactants_of(self, reactions: Iterable[int]) -> frozenset[str]:
        out: set[str] = set()
        for m in reactions:
            out |= self.reactant_set(m)
        return frozenset(out)

    def sub_column(self, m: int, species_ids: Sequence[str]) -> tuple[int, ...]:
        """Net change of reaction m restricted to the given species, in index order."""
        rows = self.indices(species_ids)
        return tuple(int(self.S[i, m]) for i in rows)

    def __eq__(self, other: object) -> bool:
        return (
            isinstance(other, ReactionNetwork)
            and self.species_ids == other.species_ids
            and self.reactions == other.reactions
        )

    def __repr__(self) -> str:
        return f"ReactionNetwork(n={self.n}, M={self.M})"


# -- validation reports ---------------------------------------------------


@dataclass(frozen=True)
class Finding:
    code: str
    severity: str  # "error" | "warning" | "info"
    message: str
    subjects: tuple[str, ...] = ()


@dataclass(frozen=True)
class ValidationReport:
    findings: tuple[Finding, ...] = ()

    @property
    def passed(self) -> bool:
        return not any(f.severity == "error" for f in self.findings)

    def to_json_dict(self) -> dict:
        return {
            "passed": self.passed,
            "findings": [
                {
                    "code": f.code,
                    "severity": f.severity,
                    "message": f.message,
                    "subjects": list(f.subjects),
                }
                for f in self.findings
            ],
        }


# -- reaction-set machinery ------------------------------------------------


def changed_reactions(net: ReactionNetwork, species: Iterable[str]) -> tuple[int, ...]:
    """Indices of the reactions with a nonzero net change on the given subset."""
    subset = set(species)
    if not subset:
        raise NetworkError("changed_reactions requires a nonempty species subset")
    rows = net.indices(subset)
    return tuple(m for m in range(net.M) if any(net.S[i, m] for i in rows))


def _changed(net: ReactionNetwork, species: Iterable[str]) -> frozenset[int]:
    """Like changed_reactions but total on the empty set (returns no reactions)."""
    subset = set(species)
    if not subset:
        return frozenset()
    return frozenset(changed_reactions(net, subset))


def _classes(
    net: ReactionNetwork, members: Iterable[int], species_ids: Sequence[str]
) -> tuple[ReactionClass, ...]:
    """Group reactions by identical net change on ``species_ids``, ordered
    lexicographically by the change vector."""
    groups: dict[tuple[int, ...], list[int]] = {}
    for m in sorted(members):
        groups.setdefault(net.sub_column(m, species_ids), []).append(m)
    return tuple(
        ReactionClass(change, tuple(ms)) for change, ms in sorted(groups.items())
    )


def subprocess_partition(
    net: ReactionNetwork, species: Iterable[str]
) -> tuple[ReactionClass, ...]:
    """Partition of the reactions changing the subset, grouped by identical
    net change on it.  One class per distinct change vector."""
    subset = sorted(set(species), key=net.index)
    return _classes(net, changed_reactions(net, subset), subset)


BLOCKS = ("A", "AB", "B", "D")


@dataclass(frozen=True)
class PartitionABD:
    """A three-way species partition with its derived reaction-block structure.

    The reactions changing D split into four blocks by what else they change:
    D and A only, D and both, D and B only, or D alone.  Each block carries
    its grouping by identical net change on D.
    """

    a: tuple[str, ...]
    b: tuple[str, ...]
    d: tuple[str, ...]
    blocks: Mapping[str, tuple[int, ...]] = field(default_factory=dict)
    classes: Mapping[str, tuple[ReactionClass, ...]] = field(default_factory=dict)

    def refined_partition(self) -> tuple[ReactionClass, ...]:
        """All per-block classes concatenated in block order."""
        out: list[ReactionClass] = []
        for blk in BLOCKS:
            out.extend(self.classes[blk])
        return tuple(out)


def _dstar_blocks(
    net: ReactionNetwork,
    a: Iterable[str],
    b: Iterable[str],
    d: Iterable[str],
) -> tuple[dict[str, tuple[int, ...]], dict[str, tuple[ReactionClass, ...]]]:
    """Block structure for possibly-empty cells (internal; callers validate)."""
    da, db, dd = _changed(net, a), _changed(net, b), _changed(net, d)
    blocks = {
        "A": tuple(sorted((dd & da) - db)),
        "AB": tuple(sorted(dd & da & db)),
        "B": tuple(sorted((dd & db) - da)),
        "D": tuple(sorted(dd - (da | db))),
    }
    d_sorted = sorted(set(d), key=net.index)
    classes = {blk: _classes(net, ms, d_sorted) for blk, ms in blocks.items()}
    return blocks, classes


def dstar_partition(
    net: ReactionNetwork,
    a: Iterable[str],
    b: Iterable[str],
    d: Iterable[str],
) -> PartitionABD:
    """Build the blocked separator structure for a partition into three
    nonempty cells.  Empty blocks are allowed; empty cells are not."""
    a, b, d = set(a), set(b), set(d)
    for name, cell in (("A", a), ("B", b), ("D", d)):
        if not cell:
            raise PartitionError(f"partition cell {name} is empty")
    if a & b or a & d or b & d:
        raise PartitionError("partition cells overlap")
    if a | b | d != set(net.species_ids):
        raise PartitionError("partition cells do not cover the species set")
    blocks, classes = _dstar_blocks(net, a, b, d)
    key = net.index
    return PartitionABD(
        a=tuple(sorted(a, key=key)),
        b=tuple(sorted(b, key=key)),
        d=tuple(sorted(d, key=key)),
        blocks=blocks,
        classes=classes,
    )


# -- validators -------------------------------------------------------------


def check_standard(net: ReactionNetwork) -> ValidationReport:
    """Structural regularity checks: (i) every reaction changes something,
    (ii) every species is changed by some reaction, (iii) a source reaction
    has a single product, (iv) a reaction with reactants has at least one
    changed reactant and at most one unchanged one.

    Purely catalytic reactions (single reactant, unchanged) fail (iv) as
    stated; they are reported rather than rewritten.  See
    ``normalize_condition_iv`` for the opt-in split.
    """
    findings: list[Finding] = []
    for m, r in enumerate(net.reactions):
        if not np.any(net.S[:, m]):
            findings.append(
                Finding("standard-i", "error", f"reaction {r.name!r} changes no species", (r.name,))
            )
    for s in net.species:
        if not np.any(net.S[s.index, :]):
            findings.append(
                Finding("standard-ii", "error", f"species {s.id!r} is changed by no reaction", (s.id,))
            )
    for m, r in enumerate(net.reactions):
        if not r.reactants and len(r.products) != 1:
            findings.append(
                Finding(
                    "standard-iii",
                    "error",
                    f"source reaction {r.name!r} has {len(r.products)} products; expected 1",
                    (r.name,),
                )
            )
        if r.reactants:
            changed = net.changed_reactants(m)
            if len(r.reactants) == 1 and len(changed) != 1:
                findings.append(
                    Finding(
                        "standard-iv",
                        "error",
                        f"reaction {r.name!r} has a single, unchanged reactant",
                        (r.name,),
                    )
                )
            elif len(r.reactants) > 1 and len(set(r.reactant_ids) - changed) > 1:
                findings.append(
                    Finding(
                        "standard-iv",
                        "error",
                        f"reaction {r.name!r} has more than one unchanged reactant",
                        (r.name,),
                    )
                )
    return ValidationReport(tuple(findings))


def check_ident_consumption(
    net: ReactionNetwork, reactions: Iterable[int | str]
) -> ValidationReport:
    """Check that a reaction set is identified by consumption of reactants:
    no reactant is net-produced, no product is net-consumed, and no two
    members consume identically."""
    members = net.resolve_reactions(reactions)
    findings: list[Finding] = []
    for m in members:
        r = net.reactions[m]
        for sp in r.reactant_ids:
            if net.S[net.index(sp), m] > 0:
                findings.append(
                    Finding(
                        "consumption-sign",
                        "error",
                        f"reaction {r.name!r} net-produces its reactant {sp!r}",
                        (r.name, sp),
                    )
                )
        for sp in r.product_ids:
            if net.S[net.index(sp), m] < 0:
                findings.append(
                    Finding(
                        "consumption-sign",
                        "error",
                        f"reaction {r.name!r} net-consumes its product {sp!r}",
                        (r.name, sp),
                    )
                )
    negative = {m: np.minimum(net.S[:, m], 0) for m in members}
    for i, m in enumerate(members):
        for m2 in members[i + 1 :]:
            if np.array_equal(negative[m], negative[m2]):
                findings.append(
                    Finding(
                        "consumption-duplicate",
                        "error",
                        f"reactions {net.reactions[m].name!r} and {net.reactions[m2].name!r} "
                        "consume identically",
                        (net.reactions[m].name, net.reactions[m2].name),
                    )
                )
    return ValidationReport(tuple(findings))


def _history_findings(
    net: ReactionNetwork,
    a: Iterable[str],
    b: Iterable[str],
    d: Iterable[str],
) -> tuple[Finding, ...]:
    """Pairs of reactions that change D identically but differ in whether
    they also change A or B.  Empty when conditioning on the plain separator
    history loses nothing relative to the blocked one."""
    da, db = _changed(net, a), _changed(net, b)
    dd = sorted(_changed(net, d))
    d_sorted = sorted(set(d), key=net.index)
    findings: list[Finding] = []
    for i, m in enumerate(dd):
        for m2 in dd[i + 1 :]:
            if net.sub_column(m, d_sorted) != net.sub_column(m2, d_sorted):
                continue
            if (m in da) != (m2 in da) or (m in db) != (m2 in db):
                findings.append(
                    Finding(
                        "history-mismatch",
                        "error",
                        f"reactions {net.reactions[m].name!r} and {net.reactions[m2].name!r} "
                        "change the separator identically but differ in what else they change",
                        (net.reactions[m].name, net.reactions[m2].name),
                    )
                )
    return tuple(findings)


def check_history_equality(net: ReactionNetwork, p: PartitionABD) -> ValidationReport:
    """Whether the separator subprocess and its blocked refinement carry the
    same information: true iff any two reactions changing D identically agree
    on membership of the changed-by-A and changed-by-B sets."""
    return ValidationReport(_history_findings(net, p.a, p.b, p.d))


def refinement_check(net: ReactionNetwork, p: PartitionABD) -> bool:
    """Every class of the separator subprocess partition is a union of
    blocked-refinement classes.  Holds universally; exposed as a runtime
    assertion for test harnesses."""
    coarse = subprocess_partition(net, p.d)
    fine = p.refined_partition()
    member_to_fine = {m: frozenset(c.members) for c in fine for m in c.members}
    for cls in coarse:
        union: set[int] = set()
        for m in cls.members:
            union |= member_to_fine[m]
        if union != set(cls.members):
            return False
    return True


def normalize_condition_iv(net: ReactionNetwork) -> ReactionNetwork:
    """Split each reaction with a single unchanged reactant into a bind/release
    pair through a transient complex species.  Opt-in: changes the state
    space, so the default validators only report.
    """
    species = list(net.species_ids)
    reactions: list[Reaction] = []
    for m, r in enumerate(net.reactions):
        if len(r.reactants) == 1 and not net.changed_reactants(m):
            catalyst = r.reactants[0][0]
            complex_id = f"{catalyst}.{r.name}"
            if complex_id in species:
                raise NetworkError(f"species id {complex_id!r} already in use")
            species.append(complex_id)
            reactions.append(
                Reaction(f"{r.name}.bind", r.reactants, ((complex_id, 1),), r.rate)
            )
            reactions.append(
                Reaction(f"{r.name}.release", ((complex_id, 1),), r.products, 1.0)
            )
        else:
            reactions.append(r)
    return ReactionNetwork(species, reactions)
