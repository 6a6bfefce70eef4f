import json
import threading
import urllib.error
import urllib.request

import pytest

from skmod import Session
from skmod.cli import main
from skmod.server import make_server


@pytest.fixture
def api(gene_net):
    session = Session(gene_net)
    server = make_server(session, port=0)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    base = f"http://127.0.0.1:{server.server_address[1]}"
    yield base, session
    server.shutdown()
    server.server_close()


def get(base, path):
    try:
        with urllib.request.urlopen(base + path) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def post(base, path, payload=None):
    body = json.dumps(payload or {}).encode()
    req = urllib.request.Request(
        base + path, data=body, headers={"Content-Type": "application/json"}
    )
    try:
        with urllib.request.urlopen(req) as resp:
            return resp.status, json.loads(resp.read())
    except urllib.error.HTTPError as err:
        return err.code, json.loads(err.read())


def test_get_network(api, gene_net):
    base, _ = api
    status, data = get(base, "/network")
    assert status == 200
    assert data["revision"] == 0
    assert data["network"]["species"] == list(gene_net.species_ids)
    assert len(data["network"]["reactions"]) == 6


def test_kig_variants(api):
    base, _ = api
    for variant, n_edges in [("directed", 10), ("undirected", 6), ("moral", 9), ("fraternized", 6)]:
        status, data = get(base, f"/kig?variant={variant}")
        assert status == 200
        assert len(data["graph"]["edges"]) == n_edges
    status, data = get(base, "/kig?variant=bogus")
    assert status == 400


def test_tree_and_modularization(api):
    base, _ = api
    status, data = get(base, "/tree")
    assert status == 200
    assert len(data["tree"]["clusters"]) == 3
    assert data["can_undo"] is False
    status, data = get(base, "/modularization")
    assert len(data["modularization"]["modules"]) == 3
    status, data = get(base, "/report")
    assert "overall" in data["report"]


def test_aggregate_undo_cycle(api):
    base, session = api
    status, data = post(base, "/aggregate", {"i": 1, "j": 2})
    assert status == 200
    assert data["revision"] == 1
    assert len(data["tree"]["clusters"]) == 2
    first_tree = data["tree"]

    status, data = post(base, "/undo")
    assert status == 200
    assert data["revision"] == 2
    assert len(data["tree"]["clusters"]) == 3

    # Redoing the same aggregation reproduces the identical tree.
    status, data = post(base, "/aggregate", {"i": 1, "j": 2})
    assert data["tree"] == first_tree


def test_aggregate_non_adjacent_is_422(api):
    base, session = api
    before = session.revision
    status, data = post(base, "/aggregate", {"i": 1, "j": 3})
    assert status == 422
    assert "error" in data
    assert session.revision == before


def test_aggregate_bad_body(api):
    base, _ = api
    status, data = post(base, "/aggregate", {"i": 1})
    assert status == 400


def test_undo_at_bottom_is_422(api):
    base, _ = api
    status, data = post(base, "/undo")
    assert status == 422


def test_reset_modes(api):
    base, _ = api
    status, data = post(base, "/reset", {"mode": "mpd"})
    assert status == 200
    assert len(data["tree"]["clusters"]) == 2
    labels = {tuple(e["separator"]) for e in data["tree"]["edges"]}
    assert labels == {("g", "P2")}
    status, data = post(base, "/reset", {"mode": "cliques"})
    assert len(data["tree"]["clusters"]) == 3
    status, _ = post(base, "/reset", {"mode": "bogus"})
    assert status == 422


def test_copy_species_flow(api):
    base, _ = api
    post(base, "/reset", {"mode": "mpd"})
    status, data = get(base, "/tree")
    clusters = {c["id"]: set(c["species"]) for c in data["tree"]["clusters"]}
    source = next(i for i, c in clusters.items() if "R" in c)
    target = next(i for i, c in clusters.items() if "R" not in c)
    status, data = post(
        base, "/copy", {"moves": [{"species": "R", "from": source, "to": target}]}
    )
    assert status == 200
    (edge,) = data["tree"]["edges"]
    assert "R" in edge["separator"]

    status, data = post(
        base, "/copy", {"moves": [{"species": "R", "from": source, "to": target}]}
    )
    assert status == 422  # already present in the target


def test_separation_probe(api):
    base, _ = api
    status, data = get(base, "/separation?a=P,R&b=gP2&d=g,P2")
    assert status == 200
    assert data["graphical"] is True and data["chemical"] is True and data["agree"]
    status, data = get(base, "/separation?a=P&b=gP2")
    assert data["graphical"] is False and data["chemical"] is False
    status, data = get(base, "/separation?a=&b=gP2")
    assert status == 400


def test_simulate_endpoint(api):
    base, _ = api
    payload = {"x0": [5, 5, 10, 5, 5], "t_end": 0.2, "replicas": 20, "seed": 4}
    status, first = post(base, "/simulate", payload)
    assert status == 200
    assert first["stats"]["replicas"] == 20
    status, second = post(base, "/simulate", payload)
    assert first["stats"] == second["stats"]


def test_revision_is_monotone(api):
    base, _ = api
    revisions = [get(base, "/tree")[1]["revision"]]
    post(base, "/aggregate", {"i": 1, "j": 2})
    revisions.append(get(base, "/tree")[1]["revision"])
    post(base, "/undo")
    revisions.append(get(base, "/tree")[1]["revision"])
    post(base, "/reset", {"mode": "mpd"})
    revisions.append(get(base, "/tree")[1]["revision"])
    assert revisions == sorted(revisions) and len(set(revisions)) == len(revisions)


def test_unknown_path_404(api):
    base, _ = api
    status, _ = get(base, "/nope")
    assert status == 404


def test_script_and_endpoint_equivalence(api, gene_text, tmp_path, capsys):
    base, _ = api
    post(base, "/aggregate", {"i": 1, "j": 2})
    _, api_tree = get(base, "/tree")

    gene_file = tmp_path / "gene.rxn"
    gene_file.write_text(gene_text)
    code = main(["modularize", str(gene_file), "--script", "1,2"])
    assert code == 0
    cli_payload = json.loads(capsys.readouterr().out)
    assert cli_payload["tree"] == api_tree["tree"]
