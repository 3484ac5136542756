"""Python access to the rankstrat C++ core."""

import json

from ._core import (
    Dataset,
    DecisionTree,
    RankstratError,
    accuracy,
    build_tree,
    composite_score,
    laplace_estimate,
    load_dataset,
    quadratic_weighted_kappa,
    run_cli,
    spearman_rho,
    tree_from_json,
    weight_matrix,
)
from . import _core

__all__ = [
    "Dataset",
    "DecisionTree",
    "RankstratError",
    "accuracy",
    "boxplot_stats",
    "build_tree",
    "composite_score",
    "evaluate",
    "laplace_estimate",
    "load_dataset",
    "quadratic_weighted_kappa",
    "run_cli",
    "spearman_rho",
    "strategy_report",
    "tree_from_json",
    "weight_matrix",
    "what_if",
]


def boxplot_stats(values):
    return json.loads(_core.boxplot_stats_json(list(values)))


def evaluate(tree, test):
    return json.loads(_core.evaluate_json(tree, test))


def strategy_report(tree, dataset, target_class, subject=None):
    return json.loads(_core.strategy_report_json(tree, dataset, target_class, subject))


def what_if(tree, dataset, candidate):
    return json.loads(_core.what_if_json(tree, dataset, candidate))
