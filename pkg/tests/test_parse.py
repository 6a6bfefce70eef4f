import json

import pytest
from hypothesis import given

from skmod import (
    ParseError,
    Reaction,
    ReactionNetwork,
    network_from_json,
    network_to_json,
    parse_network,
    serialize_network,
)

from .conftest import reaction_networks


def test_gene_fixture_parses(gene_net):
    assert gene_net.n == 5
    assert gene_net.M == 6
    assert gene_net.species_ids == ("P", "R", "g", "P2", "gP2")
    assert [r.name for r in gene_net.reactions] == ["trc", "trl", "d", "rd", "b", "ub"]


def test_relay_file_matches_programmatic(relay_net):
    from .conftest import fixture_text

    parsed = parse_network(fixture_text("relay_branch.rxn"))
    assert parsed == relay_net


def test_first_appearance_order():
    net = parse_network("r1: A -> D\nr2: D -> A\nr3: D -> B\n")
    assert net.species_ids == ("A", "D", "B")
    assert net.M == 3
    assert net.sub_column(0, ["A", "D", "B"]) == (-1, 1, 0)
    assert net.sub_column(2, ["A", "D", "B"]) == (0, -1, 1)


def test_stoichiometry_and_rate():
    net = parse_network("d: 2 P -> P2 ; c=0.5\n")
    assert net.reactions[0].reactants == (("P", 2),)
    assert net.reactions[0].rate == 0.5
    assert net.sub_column(0, ["P", "P2"]) == (-2, 1)


def test_rate_defaults_to_one():
    net = parse_network("d: 2 P -> P2\n")
    assert net.reactions[0].rate == 1.0


def test_catalyst_keeps_zero_entry():
    net = parse_network("trc: g -> g + R\n")
    assert net.sub_column(0, ["g", "R"]) == (0, 1)
    assert net.reactant_set(0) == {"g"}
    assert net.product_set(0) == {"g", "R"}


def test_zeroth_order_and_sink():
    net = parse_network("src: 0 -> X ; c=2.0\ndeg: X -> 0\n")
    assert net.reactions[0].reactants == ()
    assert net.reactions[1].products == ()
    assert net.sub_column(0, ["X"]) == (1,)


def test_comments_and_blank_lines():
    net = parse_network("# heading\n\nr: A -> B\n# tail\n")
    assert net.M == 1


def test_syntax_error_has_location():
    with pytest.raises(ParseError) as exc:
        parse_network("r1: A -> B\nr2: A -- B\n")
    assert exc.value.line == 2


def test_duplicate_reaction_name():
    with pytest.raises(ParseError, match="duplicate reaction name"):
        parse_network("r: A -> B\nr: B -> A\n")


def test_duplicate_column_rejected():
    # Identical net change and identical reactant/product lists.
    with pytest.raises(ParseError, match="identical stoichiometric columns"):
        parse_network("r1: A -> B\nr2: A -> B\n")


def test_zero_stoichiometry_rejected():
    with pytest.raises(ParseError):
        parse_network("r: 0 A -> B\n")


def test_negative_stoichiometry_rejected():
    with pytest.raises(ParseError):
        parse_network("r: -1 A -> B\n")


def test_species_twice_on_a_side_rejected():
    with pytest.raises(ParseError, match="twice"):
        parse_network("r: A + A -> B\n")


def test_undeclared_species_rejected():
    with pytest.raises(ParseError, match="not in the species declaration"):
        parse_network("species: A B\nr: A -> C\n")


def test_declared_but_unused_species_allowed():
    net = parse_network("species: A B C\nr: A -> B\n")
    assert net.species_ids == ("A", "B", "C")


def test_empty_file_is_an_error():
    with pytest.raises(ParseError):
        parse_network("")


def test_negative_rate_rejected():
    with pytest.raises(ParseError):
        parse_network("r: A -> B ; c=-1.0\n")


def test_round_trip_gene(gene_net):
    assert parse_network(serialize_network(gene_net)) == gene_net


def test_json_round_trip(gene_net):
    assert network_from_json(network_to_json(gene_net)) == gene_net


def test_json_round_trip_custom_kinetics():
    net = ReactionNetwork(
        ["X"],
        [Reaction("r", (("X", 1),), (), 2.0, rate_table=(((0,), 0.0), ((1,), 3.5)))],
    )
    again = network_from_json(network_to_json(net))
    assert again == net
    assert again.reactions[0].kinetics == "custom"


def test_json_is_byte_stable(gene_net):
    assert network_to_json(gene_net) == network_to_json(gene_net)
    data = json.loads(network_to_json(gene_net))
    assert list(data) == ["species", "reactions"]


@given(reaction_networks())
def test_round_trip_random(net):
    assert parse_network(serialize_network(net)) == net
    assert network_from_json(network_to_json(net)) == net
