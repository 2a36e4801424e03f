"""Feedback-guided post-editing toolkit for machine translation output."""

__version__ = "0.1.0"

from .corpus import (
    AnnotationSource,
    Corpus,
    ErrorAnnotation,
    ErrorCategory,
    LangPair,
    Segment,
    Severity,
)
from .feedback import FeedbackKind, FeedbackSpec, PromptBundle
from .gateway import GenerationConfig, PostEditRecord
from .metrics import MetricReport, SignificanceResult
from .scoring import QualityScore, WeightTable

__all__ = [
    "AnnotationSource",
    "Corpus",
    "ErrorAnnotation",
    "ErrorCategory",
    "FeedbackKind",
    "FeedbackSpec",
    "GenerationConfig",
    "LangPair",
    "MetricReport",
    "PostEditRecord",
    "PromptBundle",
    "QualityScore",
    "Segment",
    "Severity",
    "SignificanceResult",
    "WeightTable",
]
