"""Closed-form shape calculator.

Predicts the (height, width, channels) of every intermediate map from the
config alone, without constructing or running any network. Tests compare
these predictions against executed shapes, so keep this file free of any
imports from the forward-pass modules.
"""

from __future__ import annotations

import math

from .config import ModelConfig, shallow_resolution


def conv_output(size: int, k: int, stride: int, pad: int, dilation: int = 1) -> int:
    return (size + 2 * pad - ((k - 1) * dilation + 1)) // stride + 1


def tap_resolutions(input_size: int) -> tuple[int, int, int]:
    """Shallow/intermediate/deep tap resolutions for a square input."""
    rs = shallow_resolution(input_size)
    ri = math.ceil(rs * 9 / 16)
    rd = math.ceil(rs * 5 / 16)
    return rs, ri, rd


def trunk_channels(tap_channels: int) -> tuple[int, int, int, int]:
    """(stem, stage1, stage2, stage3) channel widths."""
    c_stem = max(8, tap_channels // 2)
    return c_stem, tap_channels, tap_channels + tap_channels // 2, 2 * tap_channels


def shape_plan(cfg: ModelConfig) -> dict[str, tuple[int, ...]]:
    """Map from stage name to expected (H, W, C) (or flat dims for the head)."""
    s = cfg.input_size
    rs, ri, rd = tap_resolutions(s)
    c_stem, c1, c2, c3 = trunk_channels(cfg.tap_channels)
    plan: dict[str, tuple[int, ...]] = {"input": (s, s, 3)}

    depth = int(math.log2(s // rs))
    res = s
    for i in range(depth):
        res = conv_output(res, 3, 2, 1)
        plan[f"stem{i}"] = (res, res, c_stem)
    assert res == rs, "stem must land exactly on the shallow tap resolution"

    plan["trunk1"] = (rs, rs, c1)
    plan["trunk2"] = (rs // 2, rs // 2, c2)
    plan["trunk3"] = (rs // 4, rs // 4, c3)
    plan["tap_shallow"] = (rs, rs, cfg.tap_channels)
    plan["tap_intermediate"] = (ri, ri, cfg.tap_channels)
    plan["tap_deep"] = (rd, rd, cfg.tap_channels)
    plan["backbone_final"] = (rs, rs, cfg.vtm_channels)

    plan["vtm_tokens"] = (rs * rs, cfg.vtm_channels)
    plan["vtm_out"] = (rs, rs, cfg.vtm_channels)

    fr = cfg.fusion_resolution if cfg.fusion_resolution is not None else ri
    ec = cfg.early_channels if cfg.early_channels is not None else 3 * cfg.tap_channels
    # deep tap: 2x2 conv (pad 0) then x2 bilinear upsample, then resize to fr
    d_after_conv = conv_output(rd, 2, 1, 0)
    plan["early_deep_conv"] = (d_after_conv, d_after_conv, cfg.tap_channels)
    plan["early_deep_up"] = (2 * d_after_conv, 2 * d_after_conv, cfg.tap_channels)
    plan["early_concat"] = (fr, fr, 3 * cfg.tap_channels)
    plan["early_fused"] = (fr, fr, ec)

    if cfg.use_dfs:
        head_c = ec + cfg.vtm_channels
    else:
        head_c = cfg.vtm_channels
    plan["late_fused"] = (rs, rs, head_c)
    plan["head_conv"] = (rs, rs, head_c)
    plan["head_pooled"] = (head_c,)
    plan["logits"] = (cfg.num_classes,)
    plan["probs"] = (cfg.num_classes,)
    return plan
