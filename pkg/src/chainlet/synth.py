"""Deterministic synthetic transaction streams with planted cohorts.

The generator produces daily background traffic plus two planted
behaviours: forwarders that collect several same-day payments and
sweep them in one spend, and holders that receive payments and leave
them untouched for the rest of the window.  Background skews small:
with the default degree weights roughly 57% of background
transactions have fewer than two inputs and fewer than two outputs,
matching the shape of real payment traffic where most transactions
are simple transfers.

Planted addresses never enter the background spending pool.  That is
deliberate: a background spend of a holder's address would give its
funding transaction a successor and silently destroy the resting
behaviour the cohort exists to exhibit.

All randomness flows through one seeded generator and every draw
happens in a fixed order, so equal configurations produce

byte-identical streams.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass, field
from datetime import date, timedelta
from random import Random

from .errors import UsageError
from .graph import DEFAULT_WINDOW_OFFSET_MIN, AddressId, TransactionRecord, window_bounds


class GenConfigError(UsageError):
    """Raised for generator configurations that cannot be honoured."""


# Background in-degree weights for 0..5 inputs and out-degree weights
# for 1..5 outputs.  P(inputs < 2) * P(outputs < 2) = 0.78 * 0.72,
# about 57% of background transactions.
DEFAULT_IN_WEIGHTS = (0.10, 0.68, 0.12, 0.06, 0.03, 0.01)
DEFAULT_OUT_WEIGHTS = (0.72, 0.17, 0.06, 0.03, 0.02)

RANSOM_BASE = 50_000_000
DM_PAYMENT_BASE = 5_000_000


@dataclass(frozen=True)
class GenConfig:
    seed: int = 7
    days: int = 3
    background_per_day: int = 500
    rs_forwarders: int = 0
    dm_holders: int = 0
    start_day: date = date(2016, 6, 1)
    window_offset_minutes: int = DEFAULT_WINDOW_OFFSET_MIN
    in_degree_weights: tuple[float, ...] = DEFAULT_IN_WEIGHTS
    out_degree_weights: tuple[float, ...] = DEFAULT_OUT_WEIGHTS
    reuse_prob: float = 0.35


def validate_config(config: GenConfig) -> None:
    if config.days < 1:
        raise GenConfigError("days must be at least 1")
    if config.background_per_day < 0:
        raise GenConfigError("background_per_day cannot be negative")
    if config.rs_forwarders < 0 or config.dm_holders < 0:
        raise GenConfigError("cohort sizes cannot be negative")
    planted = config.rs_forwarders + config.dm_holders
    if planted > 0 and config.background_per_day < 1:
        raise GenConfigError(
            "planted cohorts need background traffic to fund their payers"
        )
    for name, weights in (
        ("in_degree_weights", config.in_degree_weights),
        ("out_degree_weights", config.out_degree_weights),
    ):
        if not weights or any(w < 0 for w in weights) or sum(weights) <= 0:
            raise GenConfigError(f"{name} must be non-negative with positive sum")
    if not 0.0 <= config.reuse_prob <= 1.0:
        raise GenConfigError("reuse_prob must lie in [0, 1]")


@dataclass
class GenResult:
    config: GenConfig
    records: list[TransactionRecord]
    labels: dict[AddressId, str]
    counts: dict[str, int] = field(default_factory=dict)

    def manifest(self) -> dict:
        cfg = dataclasses.asdict(self.config)
        cfg["start_day"] = self.config.start_day.isoformat()
        cfg["in_degree_weights"] = list(self.config.in_degree_weights)
        cfg["out_degree_weights"] = list(self.config.out_degree_weights)
        return {"config": cfg, "counts": dict(sorted(self.counts.items()))}


class _Stream:
    """Mutable generation state shared by the per-day builders."""

    def __init__(self, config: GenConfig) -> None:
        self.rng = Random(config.seed)
        self.config = config
        self.records: list[TransactionRecord] = []
        self.pool: list[AddressId] = []
        self.pool_seen: set[AddressId] = set()
        self.tx_counter = 0
        self.white_counter = 0
        self.motif_counter = 0

    def next_tx_id(self) -> str:
        tid = f"tx{self.tx_counter:07d}"
        self.tx_counter += 1
        return tid

    def fresh_white(self) -> AddressId:
        addr = f"w{self.white_counter:06d}"
        self.white_counter += 1
        return addr

    def fresh_motif(self, prefix: str) -> AddressId:
        addr = f"{prefix}{self.motif_counter:06d}"
        self.motif_counter += 1
        return addr

    def add_to_pool(self, addr: AddressId) -> None:
        if addr not in self.pool_seen:
            self.pool_seen.add(addr)
            self.pool.append(addr)

    def pick_spenders(self, k: int) -> list[AddressId]:
        if not self.pool or k == 0:
            return []
        # Recent outputs are likelier spends, which yields same-day
        # successor pairs instead of a uniformly stale mix.
        if self.rng.random() < 0.5 and len(self.pool) > 200:
            window = self.pool[-200:]
        else:
            window = self.pool
        k = min(k, len(window))
        return self.rng.sample(window, k)

    def emit(
        self,
        ts: int,
        inputs: list[AddressId],
        outputs: list[tuple[AddressId, int]],
    ) -> TransactionRecord:
        fee = self.rng.randrange(50, 500) if inputs else 0
        input_values = None
        if inputs:
            total = sum(v for _, v in outputs) + fee
            share = total // len(inputs)
            values = [share] * len(inputs)
            values[0] += total - share * len(inputs)
            input_values = values
        rec = TransactionRecord.create(
            tx_id=self.next_tx_id(),
            timestamp=ts,
            inputs=inputs,
            outputs=outputs,
            input_values=input_values,
        )
        self.records.append(rec)
        return rec


def _background_day(state: _Stream, day_start: int) -> None:
    rng = state.rng
    cfg = state.config
    in_degrees = list(range(len(cfg.in_degree_weights)))
    out_degrees = list(range(1, len(cfg.out_degree_weights) + 1))
    for _ in range(cfg.background_per_day):
        ts = day_start + rng.randrange(86400)
        k_in = rng.choices(in_degrees, weights=cfg.in_degree_weights)[0]
        inputs = state.pick_spenders(k_in)
        k_out = rng.choices(out_degrees, weights=cfg.out_degree_weights)[0]
        outputs = []
        for _ in range(k_out):
            if state.pool and rng.random() < cfg.reuse_prob:
                addr = rng.choice(state.pool)
            else:
                addr = state.fresh_white()
            value = int(10 ** rng.uniform(3.0, 7.5))
            outputs.append((addr, value))
        if not inputs:
            # Coinbase style issuance keeps the pool funded.
            outputs = [(a, 2_500_000_000 // len(outputs)) for a, _ in outputs]
        state.emit(ts, inputs, outputs)
        for addr, _ in outputs:
            state.add_to_pool(addr)


def _forwarder_day(state: _Stream, day_start: int, forwarder: AddressId) -> int:
    """Plant one collect-and-sweep burst. Returns the payment count."""
    rng = state.rng
    n_pay = rng.randint(2, 4)
    base_ts = day_start + rng.randrange(3600, 80000)
    payment_total = 0
    for k in range(n_pay):
        victim = rng.choice(state.pool)
        ransom = RANSOM_BASE + rng.randrange(-RANSOM_BASE // 20, RANSOM_BASE // 20 + 1)
        change = rng.randrange(10_000, 5_000_000)
        state.emit(
            base_ts + k * 60,
            [victim],
            [(forwarder, ransom), (state.fresh_motif("vc"), change)],
        )
        payment_total += ransom
    sweep_ts = base_ts + n_pay * 60 + rng.randrange(60, 600)
    n_out = rng.randint(1, 2)
    keep = payment_total - rng.randrange(500, 2000)
    if n_out == 1:
        outs = [(state.fresh_motif("rx"), keep)]
    else:
        half = keep // 2
        outs = [
            (state.fresh_motif("rx"), half),
            (state.fresh_motif("rx"), keep - half),
        ]
    state.emit(sweep_ts, [forwarder], outs)
    return n_pay


def _holder_day(state: _Stream, day_start: int, holder: AddressId) -> int:
    """Plant resting payments to one holder. Returns the payment count."""
    rng = state.rng
    n_pay = rng.randint(1, 3)
    base_ts = day_start + rng.randrange(3600, 80000)
    for k in range(n_pay):
        buyer = rng.choice(state.pool)
        amount = DM_PAYMENT_BASE + rng.randrange(
            -DM_PAYMENT_BASE // 10, DM_PAYMENT_BASE // 10 + 1
        )
        change = rng.randrange(10_000, 2_000_000)
        state.emit(
            base_ts + k * 120,
            [buyer],
            [(holder, amount), (state.fresh_motif("bc"), change)],
        )
    return n_pay


def generate(config: GenConfig) -> GenResult:
    """Build the full stream for a configuration.

    Records come back sorted by (timestamp, tx_id).  The labels map
    holds exactly the planted addresses; everything else is implicitly
    White.
    """
    validate_config(config)
    state = _Stream(config)
    labels: dict[AddressId, str] = {}
    background_before = 0
    rs_payments = 0
    dm_payments = 0

    forwarders = [state.fresh_motif("rs") for _ in range(config.rs_forwarders)]
    holders = [state.fresh_motif("dm") for _ in range(config.dm_holders)]
    for addr in forwarders:
        labels[addr] = "RS"
    for addr in holders:
        labels[addr] = "DM"

    for day_index in range(config.days):
        day = config.start_day + timedelta(days=day_index)
        day_start, _ = window_bounds(day, config.window_offset_minutes)
        _background_day(state, day_start)
        for i, addr in enumerate(forwarders):
            if i % config.days == day_index:
                rs_payments += _forwarder_day(state, day_start, addr)
        for i, addr in enumerate(holders):
            if i % config.days == day_index:
                dm_payments += _holder_day(state, day_start, addr)
    background_before = config.background_per_day * config.days

    state.records.sort(key=lambda r: (r.timestamp, r.tx_id))
    counts = {
        "transactions": len(state.records),
        "background": background_before,
        "rs_forwarders": config.rs_forwarders,
        "rs_payments": rs_payments,
        "dm_holders": config.dm_holders,
        "dm_payments": dm_payments,
    }
    return GenResult(config=config, records=state.records, labels=labels, counts=counts)
