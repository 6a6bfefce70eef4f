"""Command-line entry point.

Exit codes: 0 success, 1 validation failure (including unreadable or
malformed input files), 2 usage error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .chordal import tree_to_dot
from .errors import ParseError, SkmodError
from .graphs import chemical_separated, fraternize, is_separated, moralize, undirected
from .modular import CopyMove
from .network import (
    ReactionNetwork,
    changed_reactions,
    check_history_equality,
    check_ident_consumption,
    check_standard,
    dstar_partition,
)
from .parse import parse_network
from .server import make_server
from .session import Session
from .simulate import (
    log_likelihood,
    project_dstar,
    project_subprocess,
    reconstruct_reaction_paths,
    replica_statistics,
    run_replicas,
    simulate,
    trajectory_to_csv,
    trajectory_to_json_dict,
)

OK, VALIDATION_FAILURE, USAGE_ERROR, INTERNAL_ERROR = 0, 1, 2, 3


def _load(path: str) -> ReactionNetwork:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise _Usage(f"cannot read {path}: {exc}") from None
    return parse_network(text)


class _Usage(Exception):
    pass


def _emit(data: dict, fmt: str, text_renderer=None) -> None:
    if fmt == "json" or text_renderer is None:
        print(json.dumps(data, indent=2))
    else:
        print(text_renderer(data), end="")


def _parse_x0(spec: str, net: ReactionNetwork) -> list[int]:
    parts = [p for p in spec.split(",") if p.strip()]
    if all("=" in p for p in parts):
        values = {sp: 0 for sp in net.species_ids}
        for p in parts:
            sp, _, v = p.partition("=")
            sp = sp.strip()
            if sp not in values:
                raise _Usage(f"unknown species {sp!r} in --x0")
            values[sp] = int(v)
        return [values[sp] for sp in net.species_ids]
    if len(parts) != net.n:
        raise _Usage(f"--x0 has {len(parts)} entries, network has {net.n} species")
    return [int(p) for p in parts]


def _parse_sets(spec: str) -> list[list[str]]:
    return [[s for s in cell.split(",") if s] for cell in spec.split(";")]


def _parse_script(spec: str) -> list[tuple[int, int]]:
    pairs = []
    for chunk in spec.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        try:
            i, j = (int(v) for v in chunk.split(","))
        except ValueError:
            raise _Usage(f"bad aggregation pair {chunk!r}; expected 'i,j'") from None
        pairs.append((i, j))
    return pairs


# -- subcommands -----------------------------------------------------------------


def cmd_validate(args) -> int:
    net = _load(args.file)
    report = check_standard(net)

    def render(data: dict) -> str:
        lines = [f"network: {net.n} species, {net.M} reactions"]
        for f in data["findings"]:
            lines.append(f"  [{f['severity']}] {f['code']}: {f['message']}")
        lines.append("passed" if data["passed"] else "FAILED")
        return "\n".join(lines) + "\n"

    _emit(report.to_json_dict(), args.format, render)
    return OK if report.passed else VALIDATION_FAILURE


def cmd_kig(args) -> int:
    net = _load(args.file)
    from .graphs import build_kig

    g = build_kig(net)
    if args.undirected:
        out = undirected(g)
    elif args.moral:
        out = moralize(g)
    elif args.fraternized:
        out = fraternize(net, g)
    else:
        out = g
    if args.json:
        print(json.dumps(out.to_json_dict(), indent=2))
    else:
        print(out.to_dot(), end="")
    return OK


def cmd_modularize(args) -> int:
    net = _load(args.file)
    session = Session(net)
    if args.mpd:
        session.reset("mpd")
    elif args.script is not None:
        session.run_script(_parse_script(args.script))
    elif args.interactive:
        return _repl(session)

    payload = {
        "tree": session.tree_json(),
        "modularization": session.modularization_json(),
        "report": session.snapshot.report.to_json_dict(),
    }
    if args.format == "dot":
        print(tree_to_dot(session.tree, net.species_ids), end="")
    elif args.format == "text":
        print(session.snapshot.report.to_markdown(), end="")
    else:
        print(json.dumps(payload, indent=2))
    return OK if session.snapshot.report.overall else VALIDATION_FAILURE


def _repl(session: Session) -> int:
    print("commands: list | aggregate I J | copy SPECIES FROM TO | undo | reset [cliques|mpd] | report | quit")
    while True:
        try:
            line = input("modularize> ").strip()
        except EOFError:
            break
        if not line:
            continue
        cmd, *rest = line.split()
        try:
            if cmd == "quit":
                break
            elif cmd == "list":
                for c in session.tree_json()["clusters"]:
                    print(f"  {c['id']}: {{{', '.join(c['species'])}}}")
                for e in session.tree_json()["edges"]:
                    print(f"  edge {e['a']}-{e['b']} separator {{{', '.join(e['separator'])}}}")
            elif cmd == "aggregate":
                session.aggregate(int(rest[0]), int(rest[1]))
                print(f"revision {session.revision}: {len(session.tree.clusters)} clusters")
            elif cmd == "copy":
                session.copy_species([CopyMove(rest[0], int(rest[1]), int(rest[2]))])
                print(f"revision {session.revision}")
            elif cmd == "undo":
                session.undo()
                print(f"revision {session.revision}: {len(session.tree.clusters)} clusters")
            elif cmd == "reset":
                session.reset(rest[0] if rest else "cliques")
                print(f"revision {session.revision}: {len(session.tree.clusters)} clusters")
            elif cmd == "report":
                print(session.snapshot.report.to_markdown(), end="")
            else:
                print(f"unknown command {cmd!r}")
        except (SkmodError, IndexError, ValueError) as exc:
            print(f"error: {exc}")
    return OK


def cmd_simulate(args) -> int:
    net = _load(args.file)
    x0 = _parse_x0(args.x0, net)
    if args.project and args.replicas != 1:
        raise _Usage("--project exports one trajectory; use --replicas 1")
    if args.replicas == 1:
        traj = simulate(net, x0, args.t_end, args.seed, max_events=args.cap)
        if args.project:
            kind, _, spec = args.project.partition(":")
            if kind == "A":
                path = project_subprocess(traj, net, spec.split(","))
            elif kind == "Dstar":
                cells = _parse_sets(spec)
                if len(cells) != 3:
                    raise _Usage("--project Dstar needs 'a1,a2;b1;d1,d2'")
                p = dstar_partition(net, *cells)
                path = project_dstar(traj, net, p)
            else:
                raise _Usage(f"unknown projection {kind!r}; use A: or Dstar:")
            print(json.dumps(_path_json(path), indent=2))
        elif args.format == "json":
            print(json.dumps(trajectory_to_json_dict(traj, net), indent=2))
        else:
            print(trajectory_to_csv(traj, net), end="")
        return OK
    stats = replica_statistics(net, x0, args.t_end, args.replicas, args.seed, max_events=args.cap)
    print(json.dumps(stats, indent=2))
    return OK


def _path_json(path) -> dict:
    return {
        "species": list(path.species),
        "t_end": path.t_end,
        "components": [
            {
                "label": c.label,
                "block": c.block,
                "change": list(c.change),
                "members": list(c.members),
                "times": list(c.times),
            }
            for c in path.components
        ],
    }


def cmd_verify(args) -> int:
    net = _load(args.file)
    cells = _parse_sets(args.partition)
    if len(cells) != 3:
        raise _Usage("--partition needs three ';'-separated cells: A;B;D")
    a, b, d = cells
    p = dstar_partition(net, a, b, d)
    from .graphs import build_kig

    kig = build_kig(net)
    g_plain = undirected(kig)
    g_used = fraternize(net, kig) if args.fraternized else g_plain
    separation = is_separated(g_used, p.a, p.b, p.d)
    chemical = chemical_separated(net, p.a, p.b, p.d)

    gamma = sorted(set(changed_reactions(net, p.a)) & set(changed_reactions(net, p.b)))
    condition = check_ident_consumption(net, gamma)
    condition_required = not args.fraternized
    history = check_history_equality(net, p)
    standard = check_standard(net)
    certified = separation and (condition.passed or not condition_required)

    result = {
        "partition": {"a": list(p.a), "b": list(p.b), "d": list(p.d)},
        "graph": "fraternized" if args.fraternized else "undirected",
        "separation": separation,
        "chemical": chemical,
        "agree": (separation == chemical) if not args.fraternized else None,
        "shared_reactions": [net.reactions[m].name for m in gamma],
        "condition_required": condition_required,
        "condition_ok": condition.passed,
        "history_equal": history.passed,
        "conditioning_history": "separator-internal" if history.passed else "separator-refined",
        "standard": standard.passed,
        "certified": certified,
    }

    if args.reconstruct:
        x0 = _parse_x0(args.x0, net) if args.x0 else [10] * net.n
        mismatches = 0
        checked = 0
        for traj in run_replicas(net, x0, args.t_end, args.replicas, args.seed):
            d_path = project_dstar(traj, net, p)
            for side, cells_side in (("A", p.a), ("B", p.b)):
                side_path = project_subprocess(traj, net, cells_side)
                recovered = reconstruct_reaction_paths(net, p, side, side_path, d_path)
                for m, times in recovered.items():
                    checked += 1
                    if times != traj.reaction_times(m):
                        mismatches += 1
        result["reconstruction"] = {
            "replicas": args.replicas,
            "paths_checked": checked,
            "mismatched_paths": mismatches,
            "exact": mismatches == 0,
        }
        certified = certified and mismatches == 0
        result["certified"] = certified

    print(json.dumps(result, indent=2))
    return OK if certified else VALIDATION_FAILURE


def cmd_likelihood(args) -> int:
    net = _load(args.file)
    x0 = _parse_x0(args.x0, net)
    traj = simulate(net, x0, args.t_end, args.seed, max_events=args.cap)
    breakdown = log_likelihood(net, traj)
    print(json.dumps(breakdown.to_json_dict(), indent=2))
    return OK


def cmd_serve(args) -> int:
    net = _load(args.file)
    session = Session(net)
    server = make_server(session, host=args.host, port=args.port, ui_dir=args.ui_dir)
    host, port = server.server_address[:2]
    print(f"serving {args.file} on http://{host}:{port} (ctrl-c to stop)", flush=True)
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return OK


# -- argument parsing -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="skmod",
        description="Reaction-network kinetics toolkit: validation, independence "
        "graphs, junction-tree modularization and exact stochastic simulation.",
    )
    parser.add_argument("--version", action="version", version=f"skmod {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="structural checks on a reaction file")
    p.add_argument("file")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(func=cmd_validate)

    p = sub.add_parser("kig", help="export the kinetic independence graph")
    p.add_argument("file")
    variant = p.add_mutually_exclusive_group()
    variant.add_argument("--undirected", action="store_true")
    variant.add_argument("--moral", action="store_true")
    variant.add_argument("--fraternized", action="store_true")
    fmt = p.add_mutually_exclusive_group()
    fmt.add_argument("--dot", action="store_true", default=True)
    fmt.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_kig)

    p = sub.add_parser("modularize", help="junction-tree modularization")
    p.add_argument("file")
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--mpd", action="store_true", help="maximal prime subgraph decomposition")
    mode.add_argument("--script", help="aggregation pairs 'i,j;i,j;...'")
    mode.add_argument("--interactive", action="store_true")
    p.add_argument("--format", choices=["json", "dot", "text"], default="json")
    p.set_defaults(func=cmd_modularize)

    p = sub.add_parser("simulate", help="exact stochastic simulation")
    p.add_argument("file")
    p.add_argument("--x0", required=True, help="'5,0,10' or 'P=5,R=0'")
    p.add_argument("--t-end", type=float, required=True, dest="t_end")
    p.add_argument("--replicas", type=int, default=1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=10_000_000, help="event cap per replica")
    p.add_argument("--project", help="'A:sp1,sp2' or 'Dstar:a1,a2;b1;d1,d2'")
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.set_defaults(func=cmd_simulate)

    p = sub.add_parser("verify", help="independence-condition report for a partition")
    p.add_argument("file")
    p.add_argument("--partition", required=True, help="'a1,a2;b1;d1,d2'")
    p.add_argument("--fraternized", action="store_true",
                   help="test separation in the fraternized graph (drops the consumption condition)")
    p.add_argument("--reconstruct", action="store_true",
                   help="check exact path reconstruction over simulated replicas")
    p.add_argument("--replicas", type=int, default=100)
    p.add_argument("--t-end", type=float, default=1.0, dest="t_end")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x0", help="initial state for --reconstruct (default: 10 per species)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("likelihood", help="log-likelihood breakdown of a simulated path")
    p.add_argument("file")
    p.add_argument("--x0", required=True)
    p.add_argument("--t-end", type=float, required=True, dest="t_end")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--cap", type=int, default=10_000_000)
    p.set_defaults(func=cmd_likelihood)

    p = sub.add_parser("serve", help="local JSON API for the explorer UI")
    p.add_argument("file")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8741)
    p.add_argument("--ui-dir", help="directory of built UI assets to serve at /")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except _Usage as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR
    except ParseError as exc:
        print(f"parse error: {exc}", file=sys.stderr)
        return VALIDATION_FAILURE
    except SkmodError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return VALIDATION_FAILURE
    except Exception as exc:  # pragma: no cover - defensive
        print(f"internal error: {exc}", file=sys.stderr)
        return INTERNAL_ERROR


if __name__ == "__main__":
    sys.exit(main())
