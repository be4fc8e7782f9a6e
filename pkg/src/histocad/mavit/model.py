"""The assembled patch classifier.

Composition (full variant):
    pyramid, final = backbone(patch)
    probs = head(late_fusion(early_fusion(pyramid), vtm(final)))
With use_vtm off the attention stage is an identity pass-through; with
use_dfs off the head consumes the attention output directly. Disabled
stages are simply not constructed, so their parameters do not exist —
the ablation audit checks parameter names for exactly that.
"""

from __future__ import annotations

from typing import Callable

import numpy as np

from ..nn import tensor as T
from ..nn.layers import Module
from ..nn.tensor import Tensor, no_grad
from .backbone import AdapterBackbone, ReducedBackbone, check_patch_batch
from .blocks import VTM
from .config import ModelConfig, validate
from .fusion import EarlyFusion, late_fusion
from .head import PredictionHead
from .shapes import shape_plan, tap_resolutions
from .types import FeatureMap, FeaturePyramid, record


class MAViT(Module):
    def __init__(self, cfg: ModelConfig, seed: int = 0,
                 adapter: Callable[[Tensor], tuple] | None = None):
        validate(cfg)
        self.cfg = cfg
        dtype = cfg.np_dtype()
        rng = np.random.default_rng(seed)
        rs, _, _ = tap_resolutions(cfg.input_size)
        if cfg.backbone == "adapter":
            if adapter is None:
                raise ValueError("backbone='adapter' requires an extractor callable")
            self.backbone = AdapterBackbone(cfg, adapter)
        else:
            self.backbone = ReducedBackbone(cfg, rng, dtype=dtype)
        if cfg.use_vtm:
            self.vtm = VTM(cfg, rs, rng, dtype=dtype)
        if cfg.use_dfs:
            self.early_fusion = EarlyFusion(cfg, rng, dtype=dtype)
        head_c = shape_plan(cfg)["late_fused"][2]
        self.head = PredictionHead(head_c, cfg.head_hidden, cfg.num_classes, rng, dtype=dtype)

    # -- stage contracts --------------------------------------------------
    def backbone_forward(self, patches) -> tuple[FeaturePyramid, FeatureMap]:
        if isinstance(patches, Tensor):
            t = patches if patches.data.ndim == 4 else T.reshape(patches, (1,) + patches.shape)
            check_patch_batch(t.data, self.cfg.input_size)
        else:
            x = check_patch_batch(patches, self.cfg.input_size)
            t = Tensor(np.asarray(x, dtype=self.cfg.np_dtype()))
        return self.backbone(t)

    def vtm_forward(self, fmap: FeatureMap) -> FeatureMap:
        if not self.cfg.use_vtm:
            return fmap
        return self.vtm(fmap)

    def early_fusion_forward(self, pyramid: FeaturePyramid) -> FeatureMap:
        if not self.cfg.use_dfs:
            raise ValueError("early fusion is disabled in this configuration")
        return self.early_fusion(pyramid)

    def late_fusion_forward(self, early: FeatureMap | None, vtm_out: FeatureMap) -> FeatureMap:
        if not self.cfg.use_dfs:
            return vtm_out
        assert early is not None
        return late_fusion(early, vtm_out)

    def predict_head(self, fmap: FeatureMap) -> Tensor:
        """Class probabilities for a fused map."""
        return T.softmax(self.head(fmap), axis=-1)

    # -- full forward -----------------------------------------------------
    def forward_logits(self, patches) -> Tensor:
        pyramid, final = self.backbone_forward(patches)
        vtm_out = self.vtm_forward(final)
        if self.cfg.use_dfs:
            fused = self.late_fusion_forward(self.early_fusion_forward(pyramid), vtm_out)
        else:
            fused = vtm_out
        record("late_fused", fused.values)
        return self.head(fused)

    def forward_probs(self, patches) -> Tensor:
        probs = T.softmax(self.forward_logits(patches), axis=-1)
        record("probs", probs)
        return probs

    def predict(self, patches: np.ndarray) -> np.ndarray:
        """Inference-mode probabilities as a plain (N, num_classes) array."""
        with no_grad():
            return self.forward_probs(patches).data.copy()

    def state_dict(self) -> dict[str, np.ndarray]:
        return {name: p.data.copy() for name, p in self.named_parameters()}

    def load_state_dict(self, state: dict[str, np.ndarray]) -> None:
        own = dict(self.named_parameters())
        if own.keys() != state.keys():
            missing = sorted(own.keys() - state.keys())
            extra = sorted(state.keys() - own.keys())
            raise ValueError(f"parameter mismatch; missing={missing} unexpected={extra}")
        for name, p in own.items():
            arr = state[name]
            if p.data.shape != arr.shape:
                raise ValueError(f"shape mismatch for {name}: {p.data.shape} vs {arr.shape}")
            p.data = arr.astype(p.data.dtype, copy=True)


def mavit_forward(model: MAViT, patches) -> np.ndarray:
    """Convenience wrapper: patch batch -> probability rows."""
    return model.predict(patches)
