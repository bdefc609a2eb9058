"""Bang-bang routing policies."""

from qnetopt.policy.bangbang import (
    BangBangPolicy,
    ControlSchedule,
    constant_policy,
    extract_policy,
    one_switch_policy,
)

__all__ = [
    "BangBangPolicy",
    "ControlSchedule",
    "constant_policy",
    "extract_policy",
    "one_switch_policy",
]
