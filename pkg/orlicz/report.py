"""This module contains the :class:`CheckRecord` and :class:`CertificationReport` classes."""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Iterator, List, Optional, Sequence

from .utils import csv_text

TOLERANCE = 1e-9
"""float: Pass tolerance relative to the natural scale ``max(|lhs|, |rhs|)`` of a check."""

RELATIONS = ("<=", ">=", "==")
STATUSES = ("pass", "fail", "vacuous", "refused")

REPORT_COLUMNS = ("instance", "state", "check", "param", "lhs", "rhs", "margin", "pass", "seed")


@dataclass(frozen=True)
class CheckRecord:
    """A single evaluated inequality.

    The status is derived from the margin unless given explicitly: a check passes iff
    ``margin >= -TOLERANCE * scale`` with ``scale = max(|lhs|, |rhs|)``.

    Args:
        check (str): name of the check, e.g. ``"h_sobolev"``
        lhs (float): left-hand side value
        rhs (float): right-hand side value
        relation (str): one of ``"<="``, ``">="`` or ``"=="``
        param (str): free-form parameter description, e.g. ``"lambda=2.0"``
        instance (str): instance identifier
        state (str): state identifier (empty for instance-level checks)
        theorem_backed (bool): whether a failure contradicts a proved inequality
        status (str): explicit status, one of ``pass``, ``fail``, ``vacuous`` or ``refused``
        provenance (str): which spectral decay, profile or minorant the check used
        note (str): diagnostic for vacuous or refused checks
    """

    check: str
    lhs: float
    rhs: float
    relation: str = "<="
    param: str = ""
    instance: str = ""
    state: str = ""
    theorem_backed: bool = True
    status: Optional[str] = None
    provenance: str = ""
    note: str = field(default="", compare=False)

    def __post_init__(self):
        if self.relation not in RELATIONS:
            raise ValueError(f"Relation '{self.relation}' must be one of {RELATIONS}.")

        if self.status is None:
            object.__setattr__(self, "status", "pass" if self._within_tolerance() else "fail")
        elif self.status not in STATUSES:
            raise ValueError(f"Status '{self.status}' must be one of {STATUSES}.")

    @classmethod
    def skipped(cls, check: str, status: str, note: str, **kwargs) -> CheckRecord:
        """Creates a record for a check that was not evaluated.

        Args:
            check (str): name of the check
            status (str): ``"vacuous"`` or ``"refused"``
            note (str): reason for skipping
        """
        return cls(check, math.nan, math.nan, status=status, note=note, **kwargs)

    @property
    def scale(self) -> float:
        """Returns the natural scale of the check."""
        return max(abs(self.lhs), abs(self.rhs))

    @property
    def margin(self) -> float:
        """Returns the signed slack of the inequality; negative values indicate a violation."""
        with_nan = math.isnan(self.lhs) or math.isnan(self.rhs)
        if with_nan or (math.isinf(self.lhs) and self.lhs == self.rhs):
            return math.nan

        if self.relation == "<=":
            return self.rhs - self.lhs
        if self.relation == ">=":
            return self.lhs - self.rhs
        return -abs(self.lhs - self.rhs)

    @property
    def passed(self) -> bool:
        """Returns whether the check passed (vacuous and refused checks do not fail)."""
        return self.status != "fail"

    def _within_tolerance(self) -> bool:
        margin = self.margin
        if math.isnan(margin):
            return False
        if math.isinf(margin):
            return margin > 0
        return margin >= -TOLERANCE * self.scale

    def with_context(self, instance: str, state: str = "") -> CheckRecord:
        """Returns a copy of the record labelled with an instance and a state."""
        return replace(self, instance=instance, state=state or self.state)


class CertificationReport:
    """Ordered collection of :class:`CheckRecord` objects produced by one run.

    Args:
        records (Iterable[CheckRecord]): the records, kept in the given order
        seed (int): master seed of the run
    """

    def __init__(self, records: Iterable[CheckRecord] = (), seed: Optional[int] = None) -> None:
        self._records = list(records)
        self._seed = seed

    def __repr__(self) -> str:
        return f"<CertificationReport: records={len(self)}, passed={self.passed}>"

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[CheckRecord]:
        return iter(self._records)

    @property
    def records(self) -> Sequence[CheckRecord]:
        """Returns the records of the report."""
        return tuple(self._records)

    @property
    def seed(self) -> Optional[int]:
        """Returns the master seed of the run."""
        return self._seed

    @property
    def failures(self) -> List[CheckRecord]:
        """Returns the theorem-backed records that failed."""
        return [r for r in self._records if r.theorem_backed and r.status == "fail"]

    @property
    def passed(self) -> bool:
        """Returns whether every theorem-backed check passed. Empty reports pass."""
        return not self.failures

    def add(self, *records: CheckRecord) -> None:
        """Appends records to the report."""
        self._records.extend(records)

    def select(self, check: str) -> List[CheckRecord]:
        """Returns the records of the given check name, in report order."""
        return [r for r in self._records if r.check == check]

    def to_csv(self) -> str:
        """Serializes the report with the columns ``instance,state,check,param,lhs,rhs,margin,
        pass,seed`` under a ``# seed=...`` metadata line."""
        seed = "" if self._seed is None else self._seed
        rows = (
            (r.instance, r.state, r.check, r.param, r.lhs, r.rhs, r.margin, r.status, seed)
            for r in self._records
        )
        return csv_text({"seed": seed}, REPORT_COLUMNS, rows)
