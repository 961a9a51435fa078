"""Optimal stable matchings for the Stable Roommates problem with incomplete lists."""

from .analysis import Profile, blocking_pairs, cost_summary, is_stable, matched_set, profile
from .criteria import Criterion, solve_criterion
from .model import Instance, Matching, RandomSpec, generate_random, load_instance, parse_instance

__all__ = [
    "Criterion",
    "Instance",
    "Matching",
    "Profile",
    "RandomSpec",
    "blocking_pairs",
    "cost_summary",
    "generate_random",
    "is_stable",
    "load_instance",
    "matched_set",
    "parse_instance",
    "profile",
    "solve_criterion",
]

__version__ = "0.1.0"
