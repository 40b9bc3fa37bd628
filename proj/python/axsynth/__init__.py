"""Accessibility tree synthesis and evaluation."""

import json

from . import _core
from ._core import (
    ClientError,
    Error,
    ParseError,
    ValidationError,
    build_judge_prompt,
    cider,
    parse_judge_answer,
    tree_stats,
    validate_text,
)

__all__ = [
    "ClientError",
    "Error",
    "ParseError",
    "ValidationError",
    "build_agent_prompt",
    "build_judge_prompt",
    "build_tree",
    "canonicalize_tree",
    "cider",
    "evaluate_detections",
    "evaluate_tree",
    "ged_upper_bound",
    "parse_id",
    "parse_judge_answer",
    "parse_tree",
    "render_ax_json",
    "tree_stats",
    "validate_text",
]


def _text(tree):
    return tree if isinstance(tree, str) else json.dumps(tree)


def _jsonl(rows):
    if isinstance(rows, str):
        return rows
    return "".join(json.dumps(r) + "\n" for r in rows)


def canonicalize_tree(tree):
    return _core.canonicalize_tree(_text(tree))


def parse_tree(tree):
    """Validates a tree and returns it in canonical form as a dict."""
    return json.loads(canonicalize_tree(tree))


def evaluate_tree(pred, gt, match_iou=0.5, ged_budget=10.0, ged_refine=False):
    return json.loads(
        _core.evaluate_tree(_text(pred), _text(gt), match_iou, ged_budget, ged_refine)
    )


def ged_upper_bound(pred, gt, time_budget=10.0, refine=False):
    return _core.ged_upper_bound(_text(pred), _text(gt), time_budget, refine)


def evaluate_detections(images, iou_thresholds=None):
    """images: iterable of (predictions, ground_truth) lists of detection dicts."""
    pairs = [(_jsonl(p), _jsonl(g)) for p, g in images]
    return json.loads(_core.evaluate_detections(pairs, iou_thresholds))


def build_tree(image_id, width, height, detections, ocr=(), captions=(), groups=(),
               mode="heuristic", config=None):
    cfg = "" if config is None else _text(config)
    return json.loads(
        _core.build_tree(image_id, width, height, _jsonl(detections), _jsonl(ocr),
                         _jsonl(captions), _jsonl(groups), mode, cfg)
    )


def render_ax_json(tree, representation="hierarchical"):
    return _core.render_ax_json(_text(tree), representation)


def build_agent_prompt(ax_json, command):
    return _core.build_agent_prompt(ax_json, command)


def parse_id(response, n):
    """The chosen id, or "no_parse" / "out_of_range"."""
    return _core.parse_id(response, n)
