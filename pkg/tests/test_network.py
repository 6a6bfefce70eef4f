import itertools

import pytest
from hypothesis import given

from skmod import (
    NetworkError,
    PartitionError,
    Reaction,
    ReactionNetwork,
    UnknownSpeciesError,
    changed_reactions,
    check_history_equality,
    check_ident_consumption,
    check_standard,
    dstar_partition,
    normalize_condition_iv,
    parse_network,
    refinement_check,
    subprocess_partition,
)

from .conftest import classes_by_pairwise_merge, networks_with_partition, reaction_networks


def names(net, ms):
    return [net.reactions[m].name for m in ms]


# -- changed_reactions ---------------------------------------------------------


def test_changed_single_species(gene_net):
    assert names(gene_net, changed_reactions(gene_net, ["R"])) == ["trc"]


def test_changed_separator_pair(gene_net):
    assert names(gene_net, changed_reactions(gene_net, ["g", "P2"])) == ["d", "rd", "b", "ub"]


def test_changed_all_species_is_everything(gene_net):
    assert changed_reactions(gene_net, gene_net.species_ids) == tuple(range(gene_net.M))


def test_changed_unknown_species(gene_net):
    with pytest.raises(UnknownSpeciesError):
        changed_reactions(gene_net, ["nope"])


def test_changed_empty_rejected(gene_net):
    with pytest.raises(NetworkError):
        changed_reactions(gene_net, [])


@given(reaction_networks())
def test_changed_matches_list_cancellation(net):
    # Net change recomputed from the reactant/product lists, not the matrix.
    for subset_size in (1, 2):
        for subset in itertools.combinations(net.species_ids, subset_size):
            expect = []
            for m, r in enumerate(net.reactions):
                delta = {sp: 0 for sp in subset}
                for sp, k in r.reactants:
                    if sp in delta:
                        delta[sp] -= k
                for sp, k in r.products:
                    if sp in delta:
                        delta[sp] += k
                if any(delta.values()):
                    expect.append(m)
            assert list(changed_reactions(net, subset)) == expect


# -- subprocess_partition ---------------------------------------------------------


def test_partition_bound_species(gene_net):
    classes = subprocess_partition(gene_net, ["gP2"])
    assert [(c.change, names(gene_net, c.members)) for c in classes] == [
        ((-1,), ["ub"]),
        ((1,), ["b"]),
    ]


def test_partition_separator_is_singletons(gene_net):
    classes = subprocess_partition(gene_net, ["g", "P2"])
    assert [names(gene_net, c.members) for c in classes] == [["b"], ["rd"], ["d"], ["ub"]]
    assert [c.change for c in classes] == [(-1, -1), (0, -1), (0, 1), (1, 1)]


def test_partition_single_reaction(gene_net):
    classes = subprocess_partition(gene_net, ["R"])
    assert len(classes) == 1 and names(gene_net, classes[0].members) == ["trc"]


def test_partition_orders_classes_lexicographically(gene_net):
    classes = subprocess_partition(gene_net, ["g", "P2"])
    assert [c.change for c in classes] == sorted(c.change for c in classes)


@given(reaction_networks())
def test_partition_matches_pairwise_merge_oracle(net):
    for subset_size in (1, 2):
        for subset in itertools.combinations(net.species_ids, subset_size):
            members = changed_reactions(net, subset)
            got = {frozenset(c.members) for c in subprocess_partition(net, subset)}
            assert got == classes_by_pairwise_merge(net, members, subset)


# -- dstar_partition ---------------------------------------------------------------


def test_dstar_gene(gene_net):
    p = dstar_partition(gene_net, ["P", "R"], ["gP2"], ["g", "P2"])
    assert names(gene_net, p.blocks["A"]) == ["d", "rd"]
    assert p.blocks["AB"] == ()
    assert names(gene_net, p.blocks["B"]) == ["b", "ub"]
    assert p.blocks["D"] == ()


def test_dstar_relay(relay_net):
    p = dstar_partition(relay_net, ["A"], ["B"], ["D"])
    assert names(relay_net, p.blocks["A"]) == ["f", "r"]
    assert names(relay_net, p.blocks["B"]) == ["irr"]
    assert p.blocks["AB"] == () and p.blocks["D"] == ()


def test_dstar_empty_cell_rejected(gene_net):
    with pytest.raises(PartitionError):
        dstar_partition(gene_net, ["P", "R", "g", "P2", "gP2"], [], [])


def test_dstar_overlap_rejected(gene_net):
    with pytest.raises(PartitionError):
        dstar_partition(gene_net, ["P", "R"], ["R", "gP2"], ["g", "P2"])


def test_dstar_coverage_rejected(gene_net):
    with pytest.raises(PartitionError):
        dstar_partition(gene_net, ["P"], ["gP2"], ["g", "P2"])


@given(networks_with_partition())
def test_dstar_blocks_partition_changed_set(case):
    net, a, b, d = case
    p = dstar_partition(net, a, b, d)
    union = [m for blk in ("A", "AB", "B", "D") for m in p.blocks[blk]]
    assert len(union) == len(set(union))
    assert sorted(union) == list(changed_reactions(net, d))


# -- check_standard -------------------------------------------------------------------


def test_standard_flags_pure_catalysts(gene_net):
    # The two catalytic conversions have a single, unchanged reactant.
    report = check_standard(gene_net)
    assert not report.passed
    assert sorted(f.subjects[0] for f in report.findings) == ["trc", "trl"]
    assert {f.code for f in report.findings} == {"standard-iv"}


def test_standard_relay_passes(relay_net):
    assert check_standard(relay_net).passed


def test_standard_flags_noop_column():
    net = parse_network("noop: A -> A\nr: A -> B\n")
    report = check_standard(net)
    codes = {f.code for f in report.findings}
    assert "standard-i" in codes


def test_standard_flags_unchanged_species():
    net = parse_network("species: A B C\nr: A -> B\n")
    report = check_standard(net)
    assert any(f.code == "standard-ii" and f.subjects == ("C",) for f in report.findings)


def test_standard_flags_multi_product_source():
    net = parse_network("src: 0 -> A + B\n")
    assert any(f.code == "standard-iii" for f in check_standard(net).findings)


def test_standard_flags_two_unchanged_reactants():
    net = parse_network("r: A + B + C -> A + B + D\n")
    assert any(f.code == "standard-iv" for f in check_standard(net).findings)


def test_normalize_condition_iv(gene_net):
    fixed = normalize_condition_iv(gene_net)
    assert fixed.M == gene_net.M + 2
    report = check_standard(fixed)
    assert not any(f.code == "standard-iv" for f in report.findings)


# -- check_ident_consumption ------------------------------------------------------------


def test_consumption_empty_set_passes(gene_net):
    assert check_ident_consumption(gene_net, []).passed


def test_consumption_autocatalytic_fails():
    net = ReactionNetwork(
        ["Xj", "Xk"],
        [Reaction("m", (("Xj", 1), ("Xk", 1)), (("Xk", 2),))],
    )
    report = check_ident_consumption(net, ["m"])
    assert not report.passed
    assert any(f.code == "consumption-sign" for f in report.findings)


def test_consumption_binding_pair_passes(gene_net):
    assert check_ident_consumption(gene_net, ["b", "ub"]).passed


def test_consumption_duplicate_negative_parts():
    net = parse_network("r1: A -> B\nr2: A -> C\n")
    report = check_ident_consumption(net, ["r1", "r2"])
    assert not report.passed
    assert any(f.code == "consumption-duplicate" for f in report.findings)


# -- history equality and refinement ------------------------------------------------------


def test_history_gene_partition_true(gene_net):
    p = dstar_partition(gene_net, ["P", "R"], ["gP2"], ["g", "P2"])
    assert check_history_equality(gene_net, p).passed


def test_history_relay_partition_false(relay_net):
    p = dstar_partition(relay_net, ["A"], ["B"], ["D"])
    report = check_history_equality(relay_net, p)
    assert not report.passed
    assert report.findings[0].subjects == ("r", "irr")


def test_history_empty_changed_set_vacuous():
    net = parse_network("species: A B D\nr1: A -> B\nr2: B -> A\n")
    p = dstar_partition(net, ["A"], ["B"], ["D"])
    assert check_history_equality(net, p).passed


def test_refinement_gene(gene_net):
    p = dstar_partition(gene_net, ["P", "R"], ["gP2"], ["g", "P2"])
    assert refinement_check(gene_net, p)


def test_refinement_relay_merged_class(relay_net):
    p = dstar_partition(relay_net, ["A"], ["B"], ["D"])
    assert refinement_check(relay_net, p)
    coarse = {frozenset(c.members) for c in subprocess_partition(relay_net, p.d)}
    fine = {frozenset(c.members) for c in p.refined_partition()}
    # The merged change class {r, irr} splits into {r} and {irr}.
    assert frozenset({1, 2}) in coarse
    assert frozenset({1}) in fine and frozenset({2}) in fine


@given(networks_with_partition())
def test_refinement_universal(case):
    net, a, b, d = case
    assert refinement_check(net, dstar_partition(net, a, b, d))


@given(networks_with_partition())
def test_history_equality_iff_identical_partitions(case):
    net, a, b, d = case
    p = dstar_partition(net, a, b, d)
    members = [m for blk in ("A", "AB", "B", "D") for m in p.blocks[blk]]
    coarse = classes_by_pairwise_merge(net, members, d)
    fine = {frozenset(c.members) for c in p.refined_partition()}
    assert check_history_equality(net, p).passed == (coarse == fine)


# -- construction contracts ------------------------------------------------------------------


def test_duplicate_species_rejected():
    with pytest.raises(NetworkError):
        ReactionNetwork(["A", "A"], [])


def test_reaction_unknown_species_rejected():
    with pytest.raises(UnknownSpeciesError):
        ReactionNetwork(["A"], [Reaction("r", (("B", 1),), ())])
