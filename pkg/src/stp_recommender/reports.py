"""Consolidated attendance reporting shared by the API and the CLI."""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date
from typing import Any

from .domain import ValidationError, normalize_token
from .persistence import StateSnapshot

CSV_HEADERS = ("faculty_name", "college", "title", "provider", "date_attended")


@dataclass(frozen=True)
class AttendanceRow:
    faculty_name: str
    college: str
    title: str
    provider: str
    date_attended: date

    def to_dict(self) -> dict[str, Any]:
        return {
            "faculty_name": self.faculty_name,
            "college": self.college,
            "title": self.title,
            "provider": self.provider,
            "date_attended": self.date_attended.isoformat(),
        }


def build_attendance_report(
    state: StateSnapshot,
    college: str | None = None,
    date_from: date | None = None,
    date_to: date | None = None,
) -> list[AttendanceRow]:
    """Attendance joined with profiles and items, filtered and sorted by
    college, then faculty name, then date."""
    if date_from is not None and date_to is not None and date_from > date_to:
        raise ValidationError(f"invalid date range: {date_from} > {date_to}")
    college_token = normalize_token(college) if college else None

    profiles = state.faculty_by_id()
    items = state.items_by_id()
    rows = []
    for record in state.attendance:
        profile = profiles[record.faculty_id]
        item = items[record.stp_id]
        if college_token is not None and profile.college != college_token:
            continue
        if date_from is not None and record.date_attended < date_from:
            continue
        if date_to is not None and record.date_attended > date_to:
            continue
        rows.append(
            AttendanceRow(
                faculty_name=profile.name,
                college=profile.college,
                title=item.title,
                provider=item.provider,
                date_attended=record.date_attended,
            )
        )
    rows.sort(
        key=lambda r: (r.college, r.faculty_name, r.date_attended, r.title, r.provider)
    )
    return rows


def report_to_csv(rows: list[AttendanceRow]) -> str:
    """RFC 4180 CSV with the exact report headers, CRLF line endings."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    writer.writerow(CSV_HEADERS)
    for row in rows:
        writer.writerow(
            (row.faculty_name, row.college, row.title, row.provider,
             row.date_attended.isoformat())
        )
    return buffer.getvalue()
