"""Modularizations derived from junction trees, and their validation.

A modularization is a covering family of species modules.  Each module is
checked on three axes against the partition [residual, rest of network,
separator]: graphical separation of the residual from the rest by the
separator, the consumption-identification condition on the reactions shared
between residual and rest, and whether conditioning may use the separator's
plain history rather than its blocked refinement.  The first two are hard
requirements; the third only selects which history the independence statement
conditions on, so it is reported as a soft flag.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from .chordal import JunctionTree
from .errors import NetworkError, TreeError
from .graphs import DirectedGraph, closure, is_separated, undirected
from .network import (
    Finding,
    ReactionNetwork,
    _changed,
    _history_findings,
    check_ident_consumption,
)


@dataclass(frozen=True)
class Modularization:
    """Covering species modules with per-module separators.

    ``separator(d)`` is the module's intersection with the union of all the
    others; the residual is what is exclusive to the module.
    """

    modules: tuple[tuple[int, frozenset[str]], ...]
    provenance: str = ""

    def module_ids(self) -> tuple[int, ...]:
        return tuple(i for i, _ in self.modules)

    def module(self, d: int) -> frozenset[str]:
        for i, members in self.modules:
            if i == d:
                return members
        raise NetworkError(f"unknown module id {d}")

    def separator(self, d: int) -> frozenset[str]:
        rest: set[str] = set()
        for i, members in self.modules:
            if i != d:
                rest |= members
        return self.module(d) & rest

    def residual(self, d: int) -> frozenset[str]:
        return self.module(d) - self.separator(d)

    def species_union(self) -> frozenset[str]:
        out: set[str] = set()
        for _, members in self.modules:
            out |= members
        return frozenset(out)


def derive_modularization(tree: JunctionTree) -> Modularization:
    """Modules are the tree clusters; each separator equals the union of the
    labels of the module's incident tree edges (and, because the tree has the
    junction property, also the module's intersection with everything else)."""
    mod = Modularization(
        modules=tuple((i, tree.clusters[i]) for i in tree.cluster_ids()),
        provenance="junction-tree",
    )
    for d in tree.cluster_ids():
        from_edges: set[str] = set()
        for e in tree.neighbors(d):
            from_edges |= tree.clusters[d] & tree.clusters[e]
        if frozenset(from_edges) != mod.separator(d):
            raise TreeError(
                f"cluster {d}: incident edge labels do not union to the module separator; "
                "the tree lacks the junction property"
            )
    return mod


@dataclass(frozen=True)
class ModuleCheck:
    module_id: int
    species: tuple[str, ...]
    separator: tuple[str, ...]
    residual: tuple[str, ...]
    separation_ok: bool
    condition_ok: bool
    history_equal: bool
    shared_reactions: tuple[str, ...]
    closure_within_module: bool
    findings: tuple[Finding, ...] = ()

    def to_json_dict(self) -> dict:
        return {
            "module": self.module_id,
            "species": list(self.species),
            "separator": list(self.separator),
            "residual": list(self.residual),
            "separation_ok": self.separation_ok,
            "condition_ok": self.condition_ok,
            "history_equal": self.history_equal,
            "shared_reactions": list(self.shared_reactions),
            "closure_within_module": self.closure_within_module,
            "findings": [
                {"code": f.code, "severity": f.severity, "message": f.message}
                for f in self.findings
            ],
        }


@dataclass(frozen=True)
class ModuleReport:
    modules: tuple[ModuleCheck, ...]

    @property
    def overall(self) -> bool:
        return all(c.separation_ok and c.condition_ok for c in self.modules)

    def to_json_dict(self) -> dict:
        return {
            "overall": self.overall,
            "modules": [c.to_json_dict() for c in self.modules],
        }

    def to_markdown(self) -> str:
        lines = [
            "| module | residual | separator | separation | condition | history |",
            "| --- | --- | --- | --- | --- | --- |",
        ]
        def fmt(ok: bool) -> str:
            return "pass" if ok else "FAIL"
        for c in self.modules:
            lines.append(
                f"| {c.module_id} | {', '.join(c.residual) or '-'} | "
                f"{', '.join(c.separator) or '-'} | {fmt(c.separation_ok)} | "
                f"{fmt(c.condition_ok)} | {'plain' if c.history_equal else 'refined'} |"
            )
        lines.append("")
        lines.append(f"Overall: {'pass' if self.overall else 'FAIL'}")
        return "\n".join(lines) + "\n"


def validate_modularization(
    net: ReactionNetwork,
    kig: DirectedGraph,
    mod: Modularization,
) -> ModuleReport:
    """Per-module checks of the partition [residual, rest, separator]."""
    if mod.species_union() != set(net.species_ids):
        raise NetworkError("modules do not cover the species set")
    g_undirected = undirected(kig)
    all_species = set(net.species_ids)
    checks: list[ModuleCheck] = []
    order = {s: i for i, s in enumerate(net.species_ids)}
    for d in mod.module_ids():
        members = mod.module(d)
        sep = mod.separator(d)
        residual = members - sep
        rest = all_species - members
        findings: list[Finding] = []

        if residual and rest:
            separation_ok = is_separated(g_undirected, residual, rest, sep)
        else:
            separation_ok = True
        if not separation_ok:
            findings.append(
                Finding(
                    "module-separation",
                    "error",
                    f"module {d}: residual is not separated from the rest by the separator",
                )
            )

        shared = sorted(_changed(net, residual) & _changed(net, rest))
        cond_report = check_ident_consumption(net, shared)
        condition_ok = cond_report.passed
        findings.extend(cond_report.findings)

        history = _history_findings(net, residual, rest, sep)
        history_equal = not history
        findings.extend(
            Finding(f.code, "info", f"module {d}: {f.message}", f.subjects) for f in history
        )

        closure_ok = (
            set(closure(kig, residual)) <= members if residual else True
        )

        checks.append(
            ModuleCheck(
                module_id=d,
                species=tuple(sorted(members, key=order.__getitem__)),
                separator=tuple(sorted(sep, key=order.__getitem__)),
                residual=tuple(sorted(residual, key=order.__getitem__)),
                separation_ok=separation_ok,
                condition_ok=condition_ok,
                history_equal=history_equal,
                shared_reactions=tuple(net.reactions[m].name for m in shared),
                closure_within_module=closure_ok,
                findings=tuple(findings),
            )
        )
    return ModuleReport(tuple(checks))


@dataclass(frozen=True)
class CopyMove:
    species: str
    source: int
    target: int


def copy_species(mod: Modularization, moves: Sequence[CopyMove | tuple[str, int, int]]) -> Modularization:
    """Enlarge modules by copying species in from other modules.  Each copied
    species must belong to its source module and not yet to its target; the
    copy enlarges separators and preserves every module's graphical
    separation from the rest."""
    members = {i: set(c) for i, c in mod.modules}
    for mv in moves:
        if not isinstance(mv, CopyMove):
            mv = CopyMove(*mv)
        if mv.source not in members or mv.target not in members:
            raise NetworkError(f"unknown module id in move {mv}")
        if mv.species not in members[mv.source]:
            raise NetworkError(
                f"species {mv.species!r} is not in source module {mv.source}"
            )
        if mv.species in members[mv.target]:
            raise NetworkError(
                f"species {mv.species!r} is already in target module {mv.target}"
            )
        members[mv.target].add(mv.species)
    return Modularization(
        modules=tuple((i, frozenset(members[i])) for i, _ in mod.modules),
        provenance=mod.provenance,
    )
