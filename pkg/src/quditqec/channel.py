"""Monte-Carlo noise injection and brute-force maximum-likelihood recovery.

Each trial corrupts an encoded state register by register, decodes by
projecting every candidate-corrected state onto the code space, and scores
the recovered logical state against the input.  Trials are independent and
derive their randomness from (seed, trial index) through numpy's seed
sequence, so runs reproduce bit for bit at any parallelism degree.

The decoder assumes the code passed verification against the same family;
on an unverified pairing it still runs, but in-family corruptions are then
allowed to decode wrong (that is precisely what verification failure
means, and the trial records will show it).
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix, vstack

from .codes import CodeSpec
from .cyclotomic import PhaseScalar
from .errors import (ErrorPattern, PatternFamily, SingleRegisterError,
                     apply_pattern, weyl_basis)
from .states import RegisterState, index_of_ket, inner_product
from .verifier import _branch_tables, _family_matrix

SUCCESS_FIDELITY = 1.0 - 1e-6
PROJECTION_FLOOR = 1e-9
TRIAL_CHUNK = 250


class UncorrectableError(RuntimeError):
    """No candidate pattern projects the corrupted state onto the code space."""


@dataclass(frozen=True)
class ChannelConfig:
    """Per-register error channel: probability, menu, seed, trial count.

    With no explicit menu the channel draws uniformly from the non-identity
    Weyl operators of the state it corrupts.  Menu weights must be
    nonnegative and sum to one within 1e-12.
    """

    p: float
    seed: int
    trials: int
    error_menu: tuple[SingleRegisterError, ...] | None = None
    weights: tuple[float, ...] | None = None

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("error probability must lie in [0, 1]")
        if not 0 <= self.seed < 2 ** 64:
            raise ValueError("seed must be a 64-bit nonnegative integer")
        if self.trials < 1:
            raise ValueError("trials must be positive")
        if self.error_menu is not None:
            menu = tuple(self.error_menu)
            if not menu:
                raise ValueError("error menu may not be empty")
            if any(op.is_identity for op in menu):
                raise ValueError("error menu entries must be non-identity")
            object.__setattr__(self, "error_menu", menu)
            if self.weights is not None:
                weights = tuple(float(w) for w in self.weights)
                if len(weights) != len(menu):
                    raise ValueError("one weight per menu entry required")
                if any(w < 0 for w in weights):
                    raise ValueError("menu weights must be nonnegative")
                if abs(math.fsum(weights) - 1.0) > 1e-12:
                    raise ValueError("menu weights must sum to 1")
                object.__setattr__(self, "weights", weights)
        elif self.weights is not None:
            raise ValueError("weights require an explicit error menu")

    def menu_for(self, n_levels: int) -> tuple[tuple[SingleRegisterError, ...],
                                               tuple[float, ...]]:
        menu = self.error_menu
        if menu is None:
            menu = tuple(weyl_basis(n_levels))
        weights = self.weights
        if weights is None:
            weights = (1.0 / len(menu),) * len(menu)
        return menu, weights


@dataclass(frozen=True)
class TrialRecord:
    injected: ErrorPattern
    in_family: bool
    chosen: ErrorPattern | None
    logical_fidelity: float
    success: bool

    def to_json(self) -> dict:
        return {"injected": self.injected.to_json(),
                "in_family": self.in_family,
                "chosen": None if self.chosen is None else self.chosen.to_json(),
                "logical_fidelity": self.logical_fidelity,
                "success": self.success}


def sample_channel(state: RegisterState, cfg: ChannelConfig,
                   trial: int) -> tuple[RegisterState, ErrorPattern]:
    """Corrupt each register independently with probability p.

    The draw is fully determined by (cfg.seed, trial): both feed one seed
    sequence, so trial streams are independent and reproducible in any
    execution order.
    """
    rng = np.random.default_rng([cfg.seed, trial])
    menu, weights = cfg.menu_for(state.n_levels)
    hits = rng.random(state.width) < cfg.p
    placed = {}
    for slot in np.flatnonzero(hits):
        pick = int(rng.choice(len(menu), p=weights))
        placed[int(slot) + 1] = menu[pick]
    pattern = ErrorPattern.from_dict(state.width, placed)
    return apply_pattern(state, pattern), pattern


class _Decoder:
    """Stacked candidate-corrected overlaps for one (code, family) pairing.

    Row (i, s) of the stacked matrix is pattern s applied to encoded ket i,
    so one sparse product against the corrupted vector yields every
    amplitude <i_enc| s^dagger |corrupted> at once.
    """

    def __init__(self, code: CodeSpec, family: PatternFamily):
        if family.width != code.width:
            raise ValueError(
                f"family width {family.width} does not match code width "
                f"{code.width}")
        self.code = code
        self.patterns = list(family)
        self.windows = code.logical_windows()
        n, width = code.n_levels, code.width
        tables = _branch_tables(self.patterns, n)
        self.stacked = vstack(
            [_family_matrix(code.encoded_kets[w], self.patterns, tables,
                            n, width) for w in self.windows],
            format="csr").conj()
        self.n_levels = n
        self.width = width

    def decode(self, corrupted: RegisterState) -> tuple[RegisterState,
                                                        ErrorPattern]:
        terms = corrupted.to_complex_terms()
        cols = np.array([index_of_ket(d, self.n_levels) for d in terms],
                        dtype=np.int64)
        data = np.array(list(terms.values()), dtype=np.complex128)
        vec = csr_matrix(
            (data, (cols, np.zeros(cols.size, dtype=np.int64))),
            shape=(self.n_levels ** self.width, 1))
        amps = (self.stacked @ vec).toarray().ravel()
        amps = amps.reshape(len(self.windows), len(self.patterns))
        projection_sq = np.abs(amps) ** 2
        per_pattern = projection_sq.sum(axis=0)
        best = int(per_pattern.argmax())
        if math.sqrt(float(per_pattern[best])) < PROJECTION_FLOOR:
            raise UncorrectableError(
                "no candidate pattern reaches the code space "
                f"(best projection {per_pattern[best]:.3e})")
        logical_amps = amps[:, best]
        norm = float(np.linalg.norm(logical_amps))
        state = RegisterState(
            self.n_levels, self.code.logical_width,
            {w: PhaseScalar.from_complex(complex(a) / norm)
             for w, a in zip(self.windows, logical_amps)})
        return state, self.patterns[best]


def decode_mld(code: CodeSpec, corrupted: RegisterState,
               family: PatternFamily) -> tuple[RegisterState, ErrorPattern]:
    """Brute-force maximum-likelihood decoding over the candidate family.

    For each candidate pattern s, in family order, the squared norm of the
    projection of the s-corrected state onto the code space is computed;
    the maximizer wins, ties going to the earlier pattern.  Returns the
    renormalized logical amplitudes and the chosen pattern.  Raises
    :class:`UncorrectableError` when every candidate projects below 1e-9.
    The caller is expected to have verified the (code, family) pairing.
    """
    return _Decoder(code, family).decode(corrupted)


@dataclass
class ChannelSummary:
    code_label: str
    n_levels: int
    logical_len: int
    p: float
    trials: int
    in_family_count: int
    success_count: int
    in_family_success_count: int
    conditional_success: float | None
    mean_fidelity: float
    seed: int
    records: tuple[TrialRecord, ...] | None = None

    def to_json(self) -> dict:
        return {"code": self.code_label, "N": self.n_levels,
                "L": self.logical_len, "p": self.p, "trials": self.trials,
                "in_family": self.in_family_count,
                "success": self.success_count,
                "conditional_success": self.conditional_success,
                "mean_fidelity": self.mean_fidelity, "seed": self.seed}


def _run_one(decoder: _Decoder, encoded: RegisterState,
             logical_input: RegisterState, cfg: ChannelConfig,
             family: PatternFamily, trial: int) -> TrialRecord:
    corrupted, injected = sample_channel(encoded, cfg, trial)
    in_family = family.contains(injected)
    try:
        recovered, chosen = decoder.decode(corrupted)
    except UncorrectableError:
        return TrialRecord(injected, in_family, None, 0.0, False)
    fidelity = abs(inner_product(logical_input, recovered).to_complex()) ** 2
    return TrialRecord(injected, in_family, chosen, fidelity,
                       fidelity >= SUCCESS_FIDELITY)


_WORKER: dict = {}


def _init_worker(code: CodeSpec, family: PatternFamily, cfg: ChannelConfig,
                 logical_input: RegisterState) -> None:
    decoder = _Decoder(code, family)
    encoded = code.encode(logical_input)
    _WORKER.update(decoder=decoder, encoded=encoded, family=family,
                   cfg=cfg, logical_input=logical_input)


def _trial_chunk(bounds: tuple[int, int]) -> list[TrialRecord]:
    start, stop = bounds
    return [_run_one(_WORKER["decoder"], _WORKER["encoded"],
                     _WORKER["logical_input"], _WORKER["cfg"],
                     _WORKER["family"], t) for t in range(start, stop)]


def run_trials(code: CodeSpec, cfg: ChannelConfig, family: PatternFamily,
               logical_input: RegisterState, jobs: int = 1,
               keep_records: bool = False) -> ChannelSummary:
    """Encode, corrupt, decode and score cfg.trials independent trials.

    The summary is a pure function of (code, cfg, family, input): trials
    derive their own seeds, chunks are fixed-size, and the reduction walks
    records in trial order, so any `jobs` value gives identical output.
    """
    if logical_input.width != code.logical_width:
        raise ValueError(
            f"logical input must have width {code.logical_width}")
    logical_input = logical_input.normalized()
    bounds = [(k, min(k + TRIAL_CHUNK, cfg.trials))
              for k in range(0, cfg.trials, TRIAL_CHUNK)]
    if jobs > 1 and len(bounds) > 1:
        with ProcessPoolExecutor(
                max_workers=jobs, initializer=_init_worker,
                initargs=(code, family, cfg, logical_input)) as pool:
            chunks = list(pool.map(_trial_chunk, bounds))
        records = [rec for chunk in chunks for rec in chunk]
    else:
        decoder = _Decoder(code, family)
        encoded = code.encode(logical_input)
        records = [_run_one(decoder, encoded, logical_input, cfg, family, t)
                   for t in range(cfg.trials)]

    in_family_count = sum(r.in_family for r in records)
    success_count = sum(r.success for r in records)
    in_family_success = sum(r.success for r in records if r.in_family)
    conditional = None if in_family_count == 0 \
        else in_family_success / in_family_count
    mean_fidelity = math.fsum(r.logical_fidelity for r in records) / len(records)
    return ChannelSummary(
        code.label, code.n_levels, code.logical_len, cfg.p, cfg.trials,
        in_family_count, success_count, in_family_success, conditional,
        mean_fidelity, cfg.seed,
        records=tuple(records) if keep_records else None)
