"""Motif-preserving counterfactual graph generation for anomaly detection.

Pipeline stages: dataset handling (`graphs`), step-function graphon
estimation (`graphon`), raw counterfactual production (`producer`),
adversarial refinement (`gan`), quality/detection metrics (`metrics`),
anomaly classification (`detector`), and end-to-end orchestration
(`pipeline`). The `motifcf` console script exposes each stage.
"""

__version__ = "0.1.0"
