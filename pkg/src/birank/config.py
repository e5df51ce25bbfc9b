"""Work budgets and seeds.

Every bound that can stop a computation lives here so that failures surface
as ``BudgetExceeded``/``PrecisionExceeded`` instead of hanging.
"""
from __future__ import annotations

import contextlib
import contextvars
import dataclasses
import time

from .errors import BudgetExceeded


@dataclasses.dataclass(frozen=True)
class Config:
    digit_budget: int = 10**40
    trial_division_bound: int = 10**6
    rho_iterations: int = 2_000_000
    seed: int = 20240101
    padic_extra_precision: int = 10
    local_image_samples: int = 20_000
    height_max_terms: int = 200
    timeout_factor: float = 10.0
    timeout_descent: float = 30.0
    timeout_search: float = 30.0


_current: contextvars.ContextVar[Config] = contextvars.ContextVar("birank_config", default=Config())


def get_config() -> Config:
    return _current.get()


@contextlib.contextmanager
def configured(**overrides):
    """Temporarily override configuration fields."""
    token = _current.set(dataclasses.replace(_current.get(), **overrides))
    try:
        yield _current.get()
    finally:
        _current.reset(token)


class Deadline:
    """Cooperative wall-clock budget for one named stage."""

    def __init__(self, stage: str, seconds: float | None):
        self.stage = stage
        self.seconds = seconds
        self.start = time.monotonic()

    def check(self):
        if self.seconds is not None and time.monotonic() - self.start > self.seconds:
            raise BudgetExceeded(f"stage '{self.stage}' exceeded {self.seconds:g} s")
