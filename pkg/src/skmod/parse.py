"""Line-oriented reaction-file grammar.

::

    # comment
    species: P R g P2 gP2
    name: [k] SP { + [k] SP } -> [k] SP { + [k] SP } [; c=<float>]

``k`` is an optional positive integer stoichiometry (default 1), ``SP`` a
species identifier.  An empty side is written ``0``.  Species order follows
the declaration line when present, first appearance otherwise.
"""

from __future__ import annotations

import json
import re
from typing import Iterable

from .errors import ParseError
from .network import Reaction, ReactionNetwork

_ID = re.compile(r"[A-Za-z_][A-Za-z0-9_.]*")
_INT = re.compile(r"[+-]?\d+")
_FLOAT = re.compile(r"[+-]?(\d+\.?\d*|\.\d+)([eE][+-]?\d+)?")


def _parse_side(text: str, lineno: int, offset: int, name: str, side: str):
    """One reaction side: ``0`` or ``+``-joined ``[k] SP`` terms."""
    if text.strip() == "0":
        return []
    terms = []
    pos = 0
    for chunk in text.split("+"):
        col = offset + pos + (len(chunk) - len(chunk.lstrip())) + 1
        term = chunk.strip()
        if not term:
            raise ParseError(f"empty term on {side} side of {name!r}", lineno, col)
        m_int = _INT.match(term)
        k = 1
        rest = term
        if m_int and not _ID.match(term):
            k = int(m_int.group())
            if k <= 0:
                raise ParseError(
                    f"stoichiometry {k} on {side} side of {name!r}; must be positive",
                    lineno,
                    col,
                )
            rest = term[m_int.end() :].strip()
        m_id = _ID.fullmatch(rest)
        if not m_id:
            raise ParseError(
                f"expected species identifier, got {rest!r}", lineno, col
            )
        terms.append((rest, k))
        pos += len(chunk) + 1
    return terms


def parse_network(text: str) -> ReactionNetwork:
    """Parse reaction-file text into a network.

    Raises ParseError with line/column on syntax problems, duplicate reaction
    names, duplicate stoichiometric columns, and nonpositive stoichiometries.
    """
    declared: list[str] | None = None
    order: list[str] = []
    reactions: list[Reaction] = []
    lines_by_reaction: dict[str, int] = {}

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.rstrip()
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        if line.lstrip().startswith("species:"):
            if declared is not None:
                raise ParseError("duplicate species declaration", lineno)
            body = line.lstrip()[len("species:") :]
            declared = []
            for tok in body.split():
                if not _ID.fullmatch(tok):
                    raise ParseError(f"bad species identifier {tok!r}", lineno, line.find(tok) + 1)
                if tok in declared:
                    raise ParseError(f"species {tok!r} declared twice", lineno, line.find(tok) + 1)
                declared.append(tok)
            continue

        if ":" not in line:
            raise ParseError("expected 'name:' prefix", lineno)
        name, _, rest = line.partition(":")
        name = name.strip()
        if not _ID.fullmatch(name):
            raise ParseError(f"bad reaction name {name!r}", lineno)
        if name in lines_by_reaction:
            raise ParseError(
                f"duplicate reaction name {name!r} (first defined on line {lines_by_reaction[name]})",
                lineno,
            )
        lines_by_reaction[name] = lineno

        rate = 1.0
        body = rest
        if ";" in rest:
            body, _, tail = rest.partition(";")
            tail = tail.strip()
            m_rate = re.fullmatch(r"c\s*=\s*(" + _FLOAT.pattern + ")", tail)
            if not m_rate:
                raise ParseError(
                    f"expected 'c=<float>' after ';', got {tail!r}",
                    lineno,
                    line.rfind(";") + 2,
                )
            rate = float(m_rate.group(1))
            if rate < 0:
                raise ParseError("rate constant must be nonnegative", lineno, line.rfind(";") + 2)

        if "->" not in body:
            raise ParseError(f"missing '->' in reaction {name!r}", lineno)
        lhs, _, rhs = body.partition("->")
        arrow_col = line.find("->") + 1
        reactants = _parse_side(lhs, lineno, line.find(":") + 1, name, "reactant")
        products = _parse_side(rhs, lineno, arrow_col + 1, name, "product")

        for sp, _k in reactants + products:
            if declared is not None:
                if sp not in declared:
                    raise ParseError(
                        f"species {sp!r} not in the species declaration",
                        lineno,
                        line.find(sp) + 1,
                    )
            elif sp not in order:
                order.append(sp)

        try:
            r = Reaction(name, tuple(reactants), tuple(products), rate)
            r.validate()
        except Exception as exc:
            raise ParseError(str(exc), lineno) from None
        reactions.append(r)

    species = declared if declared is not None else order
    if not species:
        raise ParseError("no species found", max(1, text.count("\n")))
    try:
        return ReactionNetwork(species, reactions)
    except Exception as exc:
        # Attribute column-level failures (duplicate columns) to their line.
        msg = str(exc)
        lineno = 1
        for nm, ln in lines_by_reaction.items():
            if repr(nm) in msg:
                lineno = max(lineno, ln)
        raise ParseError(msg, lineno) from None


def serialize_network(net: ReactionNetwork) -> str:
    """Render a network back to file text.  parse(serialize(net)) == net."""
    lines = ["species: " + " ".join(net.species_ids)]
    for r in net.reactions:
        lines.append(f"{r.name}: {_side_text(r.reactants)} -> {_side_text(r.products)} ; c={r.rate!r}")
    return "\n".join(lines) + "\n"


def _side_text(pairs: Iterable[tuple[str, int]]) -> str:
    pairs = list(pairs)
    if not pairs:
        return "0"
    return " + ".join(sp if k == 1 else f"{k} {sp}" for sp, k in pairs)


def network_to_json_dict(net: ReactionNetwork) -> dict:
    reactions = []
    for r in net.reactions:
        entry: dict = {
            "name": r.name,
            "reactants": [[sp, k] for sp, k in r.reactants],
            "products": [[sp, k] for sp, k in r.products],
            "rate": r.rate,
        }
        if r.rate_table is not None:
            entry["rate_table"] = [[list(levels), g] for levels, g in r.rate_table]
        reactions.append(entry)
    return {"species": list(net.species_ids), "reactions": reactions}


def network_from_json_dict(data: dict) -> ReactionNetwork:
    reactions = []
    for entry in data["reactions"]:
        table = None
        if entry.get("rate_table") is not None:
            table = tuple(
                (tuple(int(x) for x in levels), float(g))
                for levels, g in entry["rate_table"]
            )
        reactions.append(
            Reaction(
                entry["name"],
                tuple((sp, int(k)) for sp, k in entry["reactants"]),
                tuple((sp, int(k)) for sp, k in entry["products"]),
                float(entry.get("rate", 1.0)),
                table,
            )
        )
    return ReactionNetwork(list(data["species"]), reactions)


def network_to_json(net: ReactionNetwork) -> str:
    return json.dumps(network_to_json_dict(net), indent=2)


def network_from_json(text: str) -> ReactionNetwork:
    return network_from_json_dict(json.loads(text))
