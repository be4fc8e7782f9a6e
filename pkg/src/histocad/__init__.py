"""Desk-scale histopathology CAD pipeline.

Subpackages:
    slidekit  -- slide ingestion, tiling, patch sampling, patient-level splits
    mavit     -- hybrid CNN/transformer patch classifier (forward + backward)
    trainkit  -- SGD training, augmentation, evaluation, ablation harness
    verdict   -- majority-vote slide/ROI diagnosis
    metriq    -- macro metrics, Brier score, calibration, bootstrap CIs
    visio     -- labelmap/heatmap rendering, reconstruction, D-Graph
    service   -- HTTP analysis service with persistent job queue
"""

__version__ = "0.1.0"
