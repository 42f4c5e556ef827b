"""Resource caps shared by the exponential parts of the workbench."""
from __future__ import annotations

import os
from dataclasses import dataclass, fields, replace

ENV_VAR = "CLBENCH_BUDGETS"


class BudgetExceeded(RuntimeError):
    def __init__(self, what: str, limit: int):
        super().__init__(f"{what} budget exceeded (limit {limit})")
        self.what = what
        self.limit = limit


@dataclass(frozen=True)
class Budget:
    moves: int = 100_000        # moves per play
    nodes: int = 100_000        # units per truncated tree
    chain: int = 200_000        # domination-chain search expansions
    atoms: int = 20             # distinct hyperatoms in a truth table
    candidates: int = 4096      # resolutions tried by the finite search

    def check(self, what: str, value: int) -> None:
        limit = getattr(self, what)
        if value > limit:
            raise BudgetExceeded(what, limit)

    @classmethod
    def from_env(cls, environ=None) -> "Budget":
        """Read overrides such as ``nodes=500,atoms=12`` from ``CLBENCH_BUDGETS``."""
        raw = (environ if environ is not None else os.environ).get(ENV_VAR, "")
        known = {f.name for f in fields(cls)}
        updates = {}
        for item in filter(None, (s.strip() for s in raw.split(","))):
            key, _, value = item.partition("=")
            if key not in known:
                raise ValueError(f"unknown budget {key!r} in {ENV_VAR}")
            updates[key] = int(value)
        return replace(cls(), **updates)


DEFAULT = Budget()
