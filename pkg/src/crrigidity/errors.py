"""Exception types and the shared size budget."""

from __future__ import annotations

import os
from typing import Optional

DEFAULT_BUDGET = 5000
BUDGET_ENV = "CRRIGIDITY_BUDGET"


class ResourceError(RuntimeError):
    """A computation would exceed its configured size budget."""


class BudgetExceeded(ResourceError):
    pass


class ConsistencyError(RuntimeError):
    """An internal cross-check failed (e.g. a basis count disagrees with its oracle)."""


def size_budget(explicit: Optional[int] = None) -> int:
    """Budget on total algebra dimension / unknown count.

    An explicit value wins, then the environment variable, then the default.
    """
    if explicit is not None:
        return int(explicit)
    env = os.environ.get(BUDGET_ENV)
    if env:
        return int(env)
    return DEFAULT_BUDGET
