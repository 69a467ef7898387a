import math

import numpy as np
import pytest

from quditqec.channel import (ChannelConfig, UncorrectableError, decode_mld,
                              run_trials, sample_channel)
from quditqec.codes import build_identity_code, builtin
from quditqec.errors import (ErrorPattern, additive_flip, apply_pattern,
                             enumerate_family, weyl)
from quditqec.states import RegisterState, inner_product


def shor_setup():
    code = builtin("shor9", 2, 1)
    family = enumerate_family(9, 9, 1, n_levels=2)
    return code, family


def test_config_validation():
    with pytest.raises(ValueError):
        ChannelConfig(p=-0.1, seed=1, trials=10)
    with pytest.raises(ValueError):
        ChannelConfig(p=1.5, seed=1, trials=10)
    with pytest.raises(ValueError):
        ChannelConfig(p=0.1, seed=-1, trials=10)
    with pytest.raises(ValueError):
        ChannelConfig(p=0.1, seed=1, trials=0)
    with pytest.raises(ValueError):
        ChannelConfig(p=0.1, seed=1, trials=10, error_menu=())
    with pytest.raises(ValueError):
        ChannelConfig(p=0.1, seed=1, trials=10, error_menu=(weyl(0, 0),))
    with pytest.raises(ValueError):
        ChannelConfig(p=0.1, seed=1, trials=10, weights=(1.0,))
    menu = (weyl(1, 0), weyl(0, 1))
    with pytest.raises(ValueError):
        ChannelConfig(p=0.1, seed=1, trials=10, error_menu=menu,
                      weights=(1.0,))
    with pytest.raises(ValueError):
        ChannelConfig(p=0.1, seed=1, trials=10, error_menu=menu,
                      weights=(0.9, 0.2))
    with pytest.raises(ValueError):
        ChannelConfig(p=0.1, seed=1, trials=10, error_menu=menu,
                      weights=(-0.5, 1.5))
    cfg = ChannelConfig(p=0.1, seed=1, trials=10, error_menu=menu,
                        weights=(0.25, 0.75))
    assert cfg.weights == (0.25, 0.75)


def test_sample_channel_p_zero_is_identity():
    state = RegisterState.basis(2, (0, 1, 1, 0))
    cfg = ChannelConfig(p=0.0, seed=5, trials=1)
    for trial in range(8):
        corrupted, pattern = sample_channel(state, cfg, trial)
        assert pattern.support == ()
        assert corrupted.to_complex_terms() == state.to_complex_terms()


def test_sample_channel_p_one_single_op_menu():
    state = RegisterState.basis(2, (0, 0, 0))
    cfg = ChannelConfig(p=1.0, seed=9, trials=1,
                        error_menu=(additive_flip(1),))
    corrupted, pattern = sample_channel(state, cfg, 0)
    assert pattern.support == (1, 2, 3)
    assert list(corrupted.to_complex_terms()) == [(1, 1, 1)]


def test_sample_channel_deterministic_per_trial():
    state = RegisterState.basis(2, (0,) * 6)
    cfg = ChannelConfig(p=0.4, seed=123, trials=1)
    first = [sample_channel(state, cfg, t)[1] for t in range(20)]
    second = [sample_channel(state, cfg, t)[1] for t in range(20)]
    assert first == second
    assert len({p.support for p in first}) > 1


def test_decode_uncorrupted_shor9():
    code, family = shor_setup()
    encoded = code.encode(RegisterState.basis(2, (1,)))
    recovered, chosen = decode_mld(code, encoded, family)
    assert chosen.support == ()
    fid = abs(inner_product(RegisterState.basis(2, (1,)),
                            recovered).to_complex()) ** 2
    assert abs(fid - 1) < 1e-12


def test_decode_single_flip_shor9():
    code, family = shor_setup()
    logical = RegisterState.basis(2, (0,))
    corrupted = apply_pattern(code.encode(logical),
                              ErrorPattern.from_dict(9, {4: weyl(1, 0)}))
    recovered, chosen = decode_mld(code, corrupted, family)
    fid = abs(inner_product(logical, recovered).to_complex()) ** 2
    assert abs(fid - 1) < 1e-9
    assert dict(chosen.ops) == {4: weyl(1, 0)}


def test_decode_every_family_member_shor9():
    code, family = shor_setup()
    logical = RegisterState.basis(2, (1,))
    encoded = code.encode(logical)
    for pattern in family:
        recovered, _ = decode_mld(code, apply_pattern(encoded, pattern),
                                  family)
        fid = abs(inner_product(logical, recovered).to_complex()) ** 2
        assert fid > 1 - 1e-9, pattern.to_json()


def test_decode_weight_two_uncorrectable():
    # flips in two different blocks: no single-register candidate can
    # bring the state back to the code space (same-block pairs would be
    # repaired through degeneracy, e.g. X1X2 acts like X3)
    code, family = shor_setup()
    corrupted = apply_pattern(
        code.encode(RegisterState.basis(2, (0,))),
        ErrorPattern.from_dict(9, {1: weyl(1, 0), 4: weyl(1, 0)}))
    with pytest.raises(UncorrectableError):
        decode_mld(code, corrupted, family)


FAILING_SINGLES = {
    (3, (0, 1)), (5, (0, 1)), (7, (0, 1)), (8, (0, 1)), (9, (0, 1)),
    (10, (0, 1)), (10, (1, 1)), (11, (0, 1)), (12, (0, 1)), (12, (1, 0)),
    (12, (1, 1)), (13, (0, 1)), (14, (0, 1)), (14, (1, 1)), (15, (0, 1)),
    (15, (1, 0)), (15, (1, 1)), (16, (0, 1)), (16, (1, 0)), (16, (1, 1)),
}


def test_truncated_convolutional_single_error_fidelities():
    # Register digits of the encoded kets do not depend on the logical
    # word, so a phase pattern whose window parity sums collide with a
    # logical relabeling acts as an exact logical flip.  The decoder then
    # returns the flipped basis word and the fidelity drops to zero; the
    # 20 placements below are exactly the colliding ones at length 3.
    code = builtin("rate14_conv", 2, 3)
    family = enumerate_family(16, 8, 1, n_levels=2)
    logical = RegisterState.basis(2, (0, 1, 1))
    encoded = code.encode(logical)
    seen_failures = set()
    for pos in range(1, 17):
        for a, b in ((0, 1), (1, 0), (1, 1)):
            corrupted = apply_pattern(
                encoded, ErrorPattern.from_dict(16, {pos: weyl(a, b)}))
            recovered, _ = decode_mld(code, corrupted, family)
            fid = abs(inner_product(logical, recovered).to_complex()) ** 2
            if (pos, (a, b)) in FAILING_SINGLES:
                assert fid < 1e-9, (pos, a, b, fid)
                seen_failures.add((pos, (a, b)))
            else:
                assert fid > 1 - 1e-9, (pos, a, b, fid)
    assert seen_failures == FAILING_SINGLES


def test_run_trials_p_zero_all_succeed():
    code, family = shor_setup()
    cfg = ChannelConfig(p=0.0, seed=7, trials=40)
    summary = run_trials(code, cfg, family, RegisterState.basis(2, (0,)))
    assert summary.trials == 40
    assert summary.in_family_count == 40
    assert summary.success_count == 40
    assert summary.conditional_success == 1.0
    assert abs(summary.mean_fidelity - 1.0) < 1e-12


def test_run_trials_noisy_identity_code_degrades():
    code = build_identity_code(2, 2)
    family = enumerate_family(2, 2, 1, n_levels=2)
    cfg = ChannelConfig(p=0.5, seed=11, trials=300)
    summary = run_trials(code, cfg, family, RegisterState.basis(2, (0, 1)))
    assert summary.mean_fidelity < 0.9
    assert summary.success_count < summary.trials


def test_record_invariant_and_counts():
    code, family = shor_setup()
    cfg = ChannelConfig(p=0.15, seed=3, trials=120)
    summary = run_trials(code, cfg, family, RegisterState.basis(2, (1,)),
                         keep_records=True)
    records = summary.records
    assert len(records) == 120
    for rec in records:
        assert rec.success == (rec.logical_fidelity >= 1 - 1e-6)
        assert rec.in_family == family.contains(rec.injected)
    assert summary.success_count == sum(r.success for r in records)
    assert summary.in_family_count == sum(r.in_family for r in records)
    assert summary.in_family_success_count == \
        sum(r.success for r in records if r.in_family)


def test_jobs_do_not_change_summary():
    code = builtin("majority3", 2, 1)
    menu = (additive_flip(1),)
    family = enumerate_family(3, 3, 1, basis=menu)
    cfg = ChannelConfig(p=0.2, seed=2024, trials=600, error_menu=menu)
    logical = RegisterState.basis(2, (0,))
    solo = run_trials(code, cfg, family, logical, jobs=1)
    multi = run_trials(code, cfg, family, logical, jobs=3)
    assert solo.to_json() == multi.to_json()


def test_logical_width_mismatch():
    code, family = shor_setup()
    cfg = ChannelConfig(p=0.0, seed=1, trials=1)
    with pytest.raises(ValueError):
        run_trials(code, cfg, family, RegisterState.basis(2, (0, 1)))


def test_summary_json_keys():
    code, family = shor_setup()
    cfg = ChannelConfig(p=0.1, seed=42, trials=30)
    data = run_trials(code, cfg, family, RegisterState.basis(2, (0,))).to_json()
    assert data["code"] == "shor9"
    assert data["N"] == 2 and data["L"] == 1
    assert data["trials"] == 30 and data["seed"] == 42
    assert 0 <= data["mean_fidelity"] <= 1
