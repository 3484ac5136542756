import copy
import json
import os
import random

import pytest

import rankstrat

FIXTURES = os.environ.get(
    "RANKSTRAT_FIXTURE_DIR",
    os.path.join(os.path.dirname(__file__), "..", "..", "data", "fixtures"),
)
SCHEMA = os.environ.get(
    "RANKSTRAT_SCHEMA",
    os.path.join(os.path.dirname(__file__), "..", "..", "schema", "bundle.schema.json"),
)
TRAIN = os.path.join(FIXTURES, "synthetic_2018.csv")
TEST = os.path.join(FIXTURES, "synthetic_2019.csv")


@pytest.fixture(scope="module")
def bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("bundle")
    code, _, err = rankstrat.run_cli(["export", "--input", TRAIN, "--test", TEST, "--out", str(out)])
    assert code == 0, err
    with open(out / "bundle.json") as f:
        return json.load(f)


def route(node, vector):
    # Mirrors what a client does with the bundle's tree.
    while "leaf" not in node:
        node = node["left"] if vector[node["feature"]] <= node["threshold"] else node["right"]
    return node["predicted"], node["id"]


def test_scoring_and_metrics():
    assert rankstrat.composite_score(93.83, 91.44, 84.91, 63.88, 100.0) == pytest.approx(88.95, abs=0.005)
    assert rankstrat.composite_score(10, 20, 30, 40, weights="no-perception") == pytest.approx(19.0)
    cm = [[22, 3, 0, 0], [3, 21, 1, 0], [0, 5, 12, 8], [0, 0, 5, 20]]
    assert rankstrat.quadratic_weighted_kappa(cm) == pytest.approx(0.90234, abs=1e-5)
    assert rankstrat.accuracy(cm) == 0.75
    assert rankstrat.laplace_estimate([22, 0, 0, 0], 1) == (23, 26, pytest.approx(23 / 26))
    assert rankstrat.spearman_rho([3, 1, 2], [1, 2, 3]) == pytest.approx(-0.5)
    assert rankstrat.boxplot_stats([1, 2, 3, 4])["median"] == 2.5


def test_errors_carry_their_kind():
    with pytest.raises(rankstrat.RankstratError) as info:
        rankstrat.composite_score(1, 1, 1, 1)
    assert info.value.kind == "MissingParameter"
    with pytest.raises(rankstrat.RankstratError) as info:
        rankstrat.weight_matrix(1)
    assert info.value.kind == "ConfigError"


def test_tree_and_strategy():
    ds = rankstrat.load_dataset(TRAIN, 2018)
    assert len(ds) == 100
    tree = rankstrat.build_tree(ds, "ig", 5)
    assert tree.depth <= 5
    again = rankstrat.tree_from_json(tree.to_json())
    subject = {"TLR": 60, "RPC": 25, "GO": 60, "OI": 50}
    assert again.predict(subject) == tree.predict(subject)
    report = rankstrat.strategy_report(tree, ds, 1, subject)
    assert report["paths"]
    result = rankstrat.what_if(tree, ds, subject)
    assert result["predicted_class"] == tree.predict(subject)
    test = rankstrat.load_dataset(TEST, 2019)
    assert 0.0 <= rankstrat.evaluate(tree, test)["accuracy"] <= 1.0


def test_bundle_matches_schema(bundle):
    jsonschema = pytest.importorskip("jsonschema")
    with open(SCHEMA) as f:
        schema = json.load(f)
    jsonschema.validate(bundle, schema)

    mutated = copy.deepcopy(bundle)
    mutated["tree"]["root"]["thresh"] = mutated["tree"]["root"].pop("threshold")
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(mutated, schema)

    renamed = copy.deepcopy(bundle)
    renamed["predictionz"] = renamed.pop("predictions")
    with pytest.raises(jsonschema.ValidationError):
        jsonschema.validate(renamed, schema)


def test_recorded_predictions_replay(bundle):
    for p in bundle["predictions"]:
        assert route(bundle["tree"]["root"], p["features"]) == (p["predicted"], p["leaf_id"])


def test_client_routing_agrees_with_whatif(bundle, tmp_path):
    code, _, err = rankstrat.run_cli(["train", "--input", TRAIN, "--out", str(tmp_path)])
    assert code == 0, err
    rng = random.Random(2018)
    for _ in range(50):
        vector = {f: round(rng.uniform(0, 100), 2) for f in ("TLR", "RPC", "GO", "OI")}
        subject = ",".join(f"{k}={v}" for k, v in vector.items())
        code, out, err = rankstrat.run_cli(["whatif", "--input", str(tmp_path / "tree.json"), "--subject", subject])
        assert code == 0, err
        result = json.loads(out)
        assert route(bundle["tree"]["root"], vector) == (result["predicted_class"], result["leaf_id"])
