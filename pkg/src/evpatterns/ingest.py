"""Parse, validate, and time-filter raw charging-transaction records.

Input is a UTF-8, comma-delimited CSV with a header row. Default column
names: ``station_id, latitude, longitude, arrival_time, duration_seconds``;
the duration may alternatively be given as a ``departure_time`` timestamp.
Malformed rows are never silently dropped: every input row either yields a
Transaction or a row-level rejection with its line number and reason.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass
from datetime import date, datetime
from pathlib import Path
from typing import IO, Iterable

from .errors import SchemaError

DEFAULT_COLUMNS = {
    "station_id": "station_id",
    "latitude": "latitude",
    "longitude": "longitude",
    "arrival_time": "arrival_time",
    "duration_seconds": "duration_seconds",
    "departure_time": "departure_time",
}

# Duration and departure may disagree by at most this much before the row
# is rejected as internally inconsistent.
DURATION_MISMATCH_TOLERANCE_S = 1.0


@dataclass(frozen=True)
class Transaction:
    """One charging session: where, when, and for how long."""

    station_id: str
    latitude: float
    longitude: float
    arrival: datetime
    duration: float  # seconds, >= 0

    @property
    def arrival_hour(self) -> int:
        """Local wall-clock hour of arrival, 0..23."""
        return self.arrival.hour

    @property
    def duration_hours(self) -> float:
        return self.duration / 3600.0


@dataclass(frozen=True)
class PeriodFilter:
    """Half-open date window [start, end) on arrival times."""

    start: date
    end: date

    def __post_init__(self) -> None:
        if self.start >= self.end:
            raise ValueError(f"period start {self.start} must precede end {self.end}")


@dataclass(frozen=True)
class RowRejection:
    line: int
    reason: str


@dataclass
class ParseResult:
    transactions: list[Transaction]
    rejections: list[RowRejection]

    @property
    def total_rows(self) -> int:
        return len(self.transactions) + len(self.rejections)


def _parse_timestamp(text: str) -> datetime:
    # Python 3.10 fromisoformat does not accept a trailing 'Z'.
    if text.endswith("Z"):
        text = text[:-1] + "+00:00"
    return datetime.fromisoformat(text)


def _open_text(source: str | Path | IO[bytes] | IO[str]) -> IO[str]:
    if isinstance(source, (str, Path)):
        return open(source, "r", encoding="utf-8", newline="")
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8", newline="")


def parse_transactions(
    source: str | Path | IO[bytes] | IO[str],
    schema: dict[str, str] | None = None,
) -> ParseResult:
    """Parse a delimited transaction table into Transactions plus rejections.

    Args:
        source: path or open file (bytes or text) of a headered CSV.
        schema: mapping from the logical column names in DEFAULT_COLUMNS to
            the actual header names in the file; unmentioned columns keep
            their default names.

    Returns:
        ParseResult with accepted transactions in input order and one
        RowRejection (line number + reason) per malformed row.

    Raises:
        SchemaError: a required column is missing from the header.
    """
    columns = dict(DEFAULT_COLUMNS)
    columns.update(schema or {})

    stream = _open_text(source)
    reader = csv.DictReader(stream)
    header = reader.fieldnames
    if header is None:
        raise SchemaError("input is empty: no header row")

    for logical in ("station_id", "latitude", "longitude", "arrival_time"):
        if columns[logical] not in header:
            raise SchemaError(f"missing required column {columns[logical]!r}")
    has_duration = columns["duration_seconds"] in header
    has_departure = columns["departure_time"] in header
    if not has_duration and not has_departure:
        raise SchemaError(
            f"missing required column {columns['duration_seconds']!r} "
            f"(or {columns['departure_time']!r})"
        )

    transactions: list[Transaction] = []
    rejections: list[RowRejection] = []

    def reject(reason: str) -> None:
        rejections.append(RowRejection(line=reader.line_num, reason=reason))

    for row in reader:
        station_id = (row.get(columns["station_id"]) or "").strip()
        if not station_id:
            reject("missing station_id")
            continue

        try:
            latitude = float(row[columns["latitude"]])
            longitude = float(row[columns["longitude"]])
        except (TypeError, ValueError):
            reject("unparseable coordinate")
            continue
        if not -90.0 <= latitude <= 90.0:
            reject("latitude out of range")
            continue
        if not -180.0 <= longitude <= 180.0:
            reject("longitude out of range")
            continue

        try:
            arrival = _parse_timestamp(row[columns["arrival_time"]])
        except (TypeError, ValueError):
            reject("unparseable arrival timestamp")
            continue

        duration_text = row.get(columns["duration_seconds"]) if has_duration else None
        departure_text = row.get(columns["departure_time"]) if has_departure else None
        duration_text = (duration_text or "").strip()
        departure_text = (departure_text or "").strip()

        departure_duration = None
        if departure_text:
            try:
                departure = _parse_timestamp(departure_text)
                departure_duration = (departure - arrival).total_seconds()
            except (TypeError, ValueError):
                # TypeError: one timestamp aware, the other naive.
                reject("unparseable departure timestamp")
                continue

        if duration_text:
            try:
                duration = float(duration_text)
            except ValueError:
                reject("unparseable duration")
                continue
            if departure_duration is not None and (
                abs(duration - departure_duration) > DURATION_MISMATCH_TOLERANCE_S
            ):
                reject("duration and departure disagree")
                continue
        elif departure_duration is not None:
            duration = departure_duration
        else:
            reject("missing duration")
            continue

        if duration < 0:
            reject("negative duration")
            continue

        transactions.append(
            Transaction(
                station_id=station_id,
                latitude=latitude,
                longitude=longitude,
                arrival=arrival,
                duration=duration,
            )
        )

    return ParseResult(transactions=transactions, rejections=rejections)


def filter_period(txs: Iterable[Transaction], f: PeriodFilter) -> list[Transaction]:
    """Keep transactions with start <= arrival < end, preserving order.

    The comparison uses the arrival's wall-clock value: date boundaries are
    local-day concepts, consistent with the hour-of-day binning downstream.
    """
    start = datetime.combine(f.start, datetime.min.time())
    end = datetime.combine(f.end, datetime.min.time())
    kept = []
    for tx in txs:
        wall = tx.arrival.replace(tzinfo=None)
        if start <= wall < end:
            kept.append(tx)
    return kept


def write_transactions(txs: Iterable[Transaction], dest: str | Path | IO[str]) -> None:
    """Serialize transactions back to the canonical ingest CSV schema."""
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(
            ["station_id", "latitude", "longitude", "arrival_time", "duration_seconds"]
        )
        for tx in txs:
            writer.writerow(
                [
                    tx.station_id,
                    repr(tx.latitude),
                    repr(tx.longitude),
                    tx.arrival.isoformat(),
                    repr(tx.duration),
                ]
            )
    finally:
        if own:
            stream.close()


def write_rejections(rejections: Iterable[RowRejection], dest: str | Path | IO[str]) -> None:
    """Write the machine-readable rejection report (CSV ``line,reason``)."""
    own = isinstance(dest, (str, Path))
    stream = open(dest, "w", encoding="utf-8", newline="") if own else dest
    try:
        writer = csv.writer(stream)
        writer.writerow(["line", "reason"])
        for r in rejections:
            writer.writerow([r.line, r.reason])
    finally:
        if own:
            stream.close()
