"""Monkey-at-the-typewriter model of Zipf's law: simulation and analysis."""

__version__ = "0.1.0"

from .spacings import (BETA32, EQUAL, TRIANGULAR, UNIFORM, Kind, SpacingDistribution,
                       Spacings, make_spacings, sample_iid)
from .keyboard import (ExponentResult, Keyboard, log_moments, make_keyboard, mean_log_letter,
                       miller_beta, shao_hahn_statistic, solve_beta)
from .ensemble import (CutoffEnsemble, RankedEnsemble, enumerate_cutoff, tail_inheritance_check,
                       top_k, word_log_prob)
from .budget import BudgetExceeded

__all__ = [
    "BETA32", "EQUAL", "TRIANGULAR", "UNIFORM", "Kind", "SpacingDistribution", "Spacings",
    "make_spacings", "sample_iid", "ExponentResult", "Keyboard", "log_moments", "make_keyboard",
    "mean_log_letter", "miller_beta", "shao_hahn_statistic", "solve_beta", "CutoffEnsemble",
    "RankedEnsemble", "enumerate_cutoff", "tail_inheritance_check", "top_k", "word_log_prob",
    "BudgetExceeded",
]
