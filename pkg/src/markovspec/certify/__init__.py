"""Certified searches: extremal values, inequalities, good intervals, regions, gaps."""

from .extremal import Direction, ExtremalResult, extremal_markov
from .forced import Hypotheses, Node, forced_extensions, forced_search, justify_words, replay
from .gaps import GapCertificate, GapReport, certify_gap, check_gap, load_gap_certificate
from .good_interval import (GoodIntervalCertificate, GoodIntervalReport, certify_good_interval,
                            load_certificate)
from .inequalities import InequalityStatement, verify_batch, verify_inequality
from .region import (MLRegion, certify_local_uniqueness, certify_self_replication,
                     characterize_ml_region, load_dataset)

__all__ = [
    "Direction", "ExtremalResult", "extremal_markov",
    "Hypotheses", "Node", "forced_extensions", "forced_search", "justify_words", "replay",
    "GapCertificate", "GapReport", "certify_gap", "check_gap", "load_gap_certificate",
    "GoodIntervalCertificate", "GoodIntervalReport", "certify_good_interval", "load_certificate",
    "InequalityStatement", "verify_batch", "verify_inequality",
    "MLRegion", "certify_local_uniqueness", "certify_self_replication", "characterize_ml_region",
    "load_dataset",
]
