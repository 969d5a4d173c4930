"""Fingerprint minutiae verification gating two steganographic channels."""

from .errors import BiostegoError
from .imagecore import BinaryImage, GrayImage, load_gray, save_gray
from .matching import MatchResult, match_templates
from .pipeline import PipelineConfig, extract_template, run_pipeline
from .template import MinutiaeTemplate

__all__ = ["BiostegoError", "BinaryImage", "GrayImage", "load_gray", "save_gray",
           "MatchResult", "match_templates", "PipelineConfig", "extract_template",
           "run_pipeline", "MinutiaeTemplate"]
__version__ = "0.1.0"
