"""Interactive modularization state shared by the REPL and the HTTP API.

A session pins one network and walks a stack of junction trees: the clique
tree of the minimal triangulation at the bottom, then one entry per
aggregation or species copy.  Every mutation revalidates the tree, bumps a
revision counter and is undoable; readers always see a complete snapshot.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from typing import Sequence

from .chordal import (
    JunctionTree,
    Triangulation,
    aggregate,
    clique_tree,
    mpd,
    tree_to_json_dict,
    verify_junction_tree,
)
from .errors import TreeError
from .graphs import DirectedGraph, UndirectedGraph, build_kig, undirected
from .modular import (
    CopyMove,
    ModuleReport,
    Modularization,
    derive_modularization,
    validate_modularization,
)
from .network import ReactionNetwork


@dataclass(frozen=True)
class Snapshot:
    revision: int
    tree: JunctionTree
    modularization: Modularization
    report: ModuleReport


class Session:
    def __init__(self, net: ReactionNetwork):
        self.net = net
        self.kig: DirectedGraph = build_kig(net)
        self.g_undirected: UndirectedGraph = undirected(self.kig)
        self.triangulation: Triangulation
        self.triangulation, self._base_tree = clique_tree(self.g_undirected)
        self._lock = threading.Lock()
        self._revision = 0
        self._stack: list[JunctionTree] = [self._base_tree]
        self._snapshot = self._make_snapshot()

    # -- snapshots ---------------------------------------------------------

    def _make_snapshot(self) -> Snapshot:
        tree = self._stack[-1]
        mod = derive_modularization(tree)
        report = validate_modularization(self.net, self.kig, mod)
        return Snapshot(self._revision, tree, mod, report)

    @property
    def snapshot(self) -> Snapshot:
        return self._snapshot

    @property
    def revision(self) -> int:
        return self._snapshot.revision

    @property
    def tree(self) -> JunctionTree:
        return self._snapshot.tree

    def can_undo(self) -> bool:
        return len(self._stack) > 1

    # -- mutations ----------------------------------------------------------

    def _push(self, tree: JunctionTree) -> Snapshot:
        report = verify_junction_tree(tree, self.g_undirected, self.triangulation.result)
        if not report.passed:
            raise TreeError(
                "operation would break the junction tree: "
                + "; ".join(f.message for f in report.findings)
            )
        self._stack.append(tree)
        self._revision += 1
        self._snapshot = self._make_snapshot()
        return self._snapshot

    def aggregate(self, i: int, j: int) -> Snapshot:
        with self._lock:
            return self._push(aggregate(self._stack[-1], i, j))

    def copy_species(self, moves: Sequence[CopyMove | tuple[str, int, int]]) -> Snapshot:
        with self._lock:
            tree = self._stack[-1]
            for mv in moves:
                if not isinstance(mv, CopyMove):
                    mv = CopyMove(*mv)
                if mv.source not in tree.clusters or mv.target not in tree.clusters:
                    raise TreeError(f"unknown cluster id in move {mv}")
                if mv.species not in tree.clusters[mv.source]:
                    raise TreeError(
                        f"species {mv.species!r} is not in source cluster {mv.source}"
                    )
                if mv.species in tree.clusters[mv.target]:
                    raise TreeError(
                        f"species {mv.species!r} is already in target cluster {mv.target}"
                    )
                tree = tree.with_cluster(
                    mv.target, tree.clusters[mv.target] | {mv.species}
                )
            return self._push(tree)

    def undo(self) -> Snapshot:
        with self._lock:
            if len(self._stack) <= 1:
                raise TreeError("nothing to undo")
            self._stack.pop()
            self._revision += 1
            self._snapshot = self._make_snapshot()
            return self._snapshot

    def reset(self, mode: str = "cliques") -> Snapshot:
        with self._lock:
            if mode == "cliques":
                tree = self._base_tree
            elif mode == "mpd":
                tree = mpd(self._base_tree, self.g_undirected)
            else:
                raise TreeError(f"unknown reset mode {mode!r}; use 'cliques' or 'mpd'")
            self._stack = [tree]
            self._revision += 1
            self._snapshot = self._make_snapshot()
            return self._snapshot

    def run_script(self, pairs: Sequence[tuple[int, int]]) -> Snapshot:
        snap = self.snapshot
        for i, j in pairs:
            snap = self.aggregate(i, j)
        return snap

    # -- views ----------------------------------------------------------------

    def tree_json(self) -> dict:
        return tree_to_json_dict(self.snapshot.tree, self.net.species_ids)

    def modularization_json(self) -> dict:
        snap = self.snapshot
        order = {s: i for i, s in enumerate(self.net.species_ids)}
        modules = []
        for d in snap.modularization.module_ids():
            modules.append(
                {
                    "id": d,
                    "species": sorted(snap.modularization.module(d), key=order.__getitem__),
                    "separator": sorted(snap.modularization.separator(d), key=order.__getitem__),
                    "residual": sorted(snap.modularization.residual(d), key=order.__getitem__),
                }
            )
        return {"modules": modules, "provenance": snap.modularization.provenance}
