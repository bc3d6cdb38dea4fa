"""Option-chain containers and CSV ingestion.

A chain file holds every quoted maturity for one underlying on one pricing
date.  Header (required)::

    maturity_days,strike,call_price,put_price,forward,discount

An empty cell means "absent".  Forward and discount are per-maturity and may
be left empty, in which case the :class:`ChainConfig` defaults apply
(forward = spot, discount = 1).
"""

from __future__ import annotations

import csv
import datetime as dt
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .errors import ConfigurationError, ParseError, ValidationError

DAYS_PER_YEAR = 365.0

CSV_COLUMNS = ("maturity_days", "strike", "call_price", "put_price", "forward", "discount")


@dataclass(frozen=True)
class OptionQuote:
    strike: float
    call_price: float | None = None
    put_price: float | None = None

    def __post_init__(self):
        if not (math.isfinite(self.strike) and self.strike > 0):
            raise ValidationError(f"strike must be positive and finite, got {self.strike}")
        for name in ("call_price", "put_price"):
            v = getattr(self, name)
            if v is not None and not (math.isfinite(v) and v >= 0):
                raise ValidationError(f"{name} at strike {self.strike} must be finite and >= 0, got {v}")


@dataclass(frozen=True)
class MarketSlice:
    """All quotes for one maturity.

    ``time_to_maturity`` is ACT/365.  ``volume`` is the volume factor V that
    multiplies every vanilla price along with the discount factor.
    """

    maturity_days: int
    forward: float
    quotes: tuple[OptionQuote, ...]
    discount: float = 1.0
    volume: float = 1.0
    pricing_date: dt.date | None = None

    def __post_init__(self):
        object.__setattr__(self, "quotes", tuple(self.quotes))
        if self.maturity_days <= 0:
            raise ValidationError(f"maturity must be after the pricing date, got {self.maturity_days} days")
        if not (math.isfinite(self.forward) and self.forward > 0):
            raise ValidationError(f"forward must be positive, got {self.forward}")
        if not (0 < self.discount <= 1):
            raise ValidationError(f"discount factor must lie in (0, 1], got {self.discount}")
        if not self.volume > 0:
            raise ValidationError(f"volume factor must be positive, got {self.volume}")
        strikes = [q.strike for q in self.quotes]
        for a, b in zip(strikes, strikes[1:]):
            if not b > a:
                kind = "duplicate" if a == b else "unsorted"
                raise ValidationError(
                    f"{kind} strike {b} in maturity {self.maturity_days}d: strikes must strictly increase"
                )

    @property
    def time_to_maturity(self) -> float:
        return self.maturity_days / DAYS_PER_YEAR

    @property
    def maturity_date(self) -> dt.date | None:
        if self.pricing_date is None:
            return None
        return self.pricing_date + dt.timedelta(days=self.maturity_days)

    @property
    def strikes(self) -> np.ndarray:
        return np.array([q.strike for q in self.quotes], dtype=float)

    def calls(self) -> np.ndarray:
        """Call prices with NaN where absent."""
        return np.array([np.nan if q.call_price is None else q.call_price for q in self.quotes])

    def puts(self) -> np.ndarray:
        return np.array([np.nan if q.put_price is None else q.put_price for q in self.quotes])

    def moneyness(self, strike):
        return moneyness(self, strike)


@dataclass(frozen=True)
class Surface:
    slices: tuple[MarketSlice, ...]
    pricing_date: dt.date | None = None

    def __post_init__(self):
        object.__setattr__(self, "slices", tuple(self.slices))
        days = [s.maturity_days for s in self.slices]
        if any(b <= a for a, b in zip(days, days[1:])):
            raise ValidationError("slices must be sorted by strictly increasing maturity")
        for s in self.slices:
            if s.pricing_date != self.pricing_date:
                raise ValidationError("all slices must share the surface pricing date")

    def __len__(self):
        return len(self.slices)

    def __iter__(self):
        return iter(self.slices)

    def __getitem__(self, i):
        return self.slices[i]

    @property
    def maturities(self) -> np.ndarray:
        return np.array([s.time_to_maturity for s in self.slices])

    def slice_for_days(self, days: int) -> MarketSlice:
        for s in self.slices:
            if s.maturity_days == days:
                return s
        raise KeyError(f"no slice with maturity {days} days")


@dataclass(frozen=True)
class ChainConfig:
    """Curve settings used when the chain file leaves forward/discount empty.

    ``spot=None`` means a missing forward is an error.  ``discount=None``
    means a missing discount is an error.
    """

    spot: float | None = None
    discount: float | None = 1.0
    volume: float = 1.0
    pricing_date: dt.date | None = None


def moneyness(slice: MarketSlice, strike):
    """(K - F) / F for a scalar or array of strikes."""
    F = slice.forward
    return (np.asarray(strike, dtype=float) - F) / F if np.ndim(strike) else (float(strike) - F) / F


def _cell(value: str, row_no: int, column: str) -> float | None:
    value = value.strip()
    if value == "":
        return None
    try:
        out = float(value)
    except ValueError:
        raise ParseError(f"row {row_no}: column {column!r} is not a number: {value!r}") from None
    if not math.isfinite(out):
        raise ParseError(f"row {row_no}: column {column!r} is not finite: {value!r}")
    return out


def load_chain(path: str | Path, config: ChainConfig | None = None) -> Surface:
    """Read a chain CSV into a validated :class:`Surface`."""
    config = config or ChainConfig()
    path = Path(path)
    rows: dict[int, list[tuple[int, float, float | None, float | None, float | None, float | None]]] = {}
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ParseError(f"{path}: empty file, header required") from None
        header = [h.strip() for h in header]
        if tuple(header) != CSV_COLUMNS:
            raise ParseError(f"{path}: header must be {','.join(CSV_COLUMNS)}, got {','.join(header)}")
        for row_no, row in enumerate(reader, start=2):
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != len(CSV_COLUMNS):
                raise ParseError(f"row {row_no}: expected {len(CSV_COLUMNS)} columns, got {len(row)}")
            days = _cell(row[0], row_no, "maturity_days")
            strike = _cell(row[1], row_no, "strike")
            if days is None or strike is None:
                raise ParseError(f"row {row_no}: maturity_days and strike are required")
            if days != int(days):
                raise ParseError(f"row {row_no}: maturity_days must be an integer, got {row[0]!r}")
            call, put, fwd, disc = (_cell(row[i], row_no, CSV_COLUMNS[i]) for i in range(2, 6))
            rows.setdefault(int(days), []).append((row_no, strike, call, put, fwd, disc))

    slices = []
    for days in sorted(rows):
        entries = rows[days]
        fwd = _consistent([e[4] for e in entries], days, "forward")
        disc = _consistent([e[5] for e in entries], days, "discount")
        if fwd is None:
            if config.spot is None:
                raise ConfigurationError(f"maturity {days}d: no forward in file and no spot configured")
            fwd = config.spot
        if disc is None:
            if config.discount is None:
                raise ConfigurationError(f"maturity {days}d: no discount in file and no default configured")
            disc = config.discount
        try:
            quotes = [OptionQuote(e[1], e[2], e[3]) for e in entries]
        except ValidationError as exc:
            raise ValidationError(f"maturity {days}d: {exc}") from None
        slices.append(
            MarketSlice(days, fwd, quotes, discount=disc, volume=config.volume, pricing_date=config.pricing_date)
        )
    return Surface(slices, pricing_date=config.pricing_date)


def _consistent(values: list[float | None], days: int, name: str) -> float | None:
    present = {v for v in values if v is not None}
    if len(present) > 1:
        raise ValidationError(f"maturity {days}d: conflicting {name} values {sorted(present)}")
    return present.pop() if present else None


def save_chain(surface: Surface | Iterable[MarketSlice], path: str | Path) -> None:
    """Write a surface in the chain CSV schema.

    Floats are written with ``repr`` so that a reload is bit-exact.
    """
    slices: Sequence[MarketSlice] = surface.slices if isinstance(surface, Surface) else list(surface)
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(CSV_COLUMNS)
        for s in slices:
            for q in s.quotes:
                w.writerow([
                    s.maturity_days,
                    repr(q.strike),
                    "" if q.call_price is None else repr(q.call_price),
                    "" if q.put_price is None else repr(q.put_price),
                    repr(s.forward),
                    repr(s.discount),
                ])
