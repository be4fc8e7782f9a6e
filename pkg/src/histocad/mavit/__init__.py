"""Hybrid CNN/transformer patch classifier."""

from .attention import MultiHeadLinearAttention, linear_attention
from .blocks import TBlock, VTM
from .checkpoint import CheckpointError, load_checkpoint, read_header, save_checkpoint
from .config import ConfigError, ModelConfig, paper_config, tiny_config, toy_config, validate
from .fusion import EarlyFusion, late_fusion
from .model import MAViT, mavit_forward
from .shapes import shape_plan, tap_resolutions
from .types import FeatureMap, FeaturePyramid

__all__ = [
    "MAViT",
    "mavit_forward",
    "ModelConfig",
    "ConfigError",
    "paper_config",
    "toy_config",
    "tiny_config",
    "validate",
    "shape_plan",
    "tap_resolutions",
    "linear_attention",
    "MultiHeadLinearAttention",
    "TBlock",
    "VTM",
    "EarlyFusion",
    "late_fusion",
    "FeatureMap",
    "FeaturePyramid",
    "save_checkpoint",
    "load_checkpoint",
    "read_header",
    "CheckpointError",
]
