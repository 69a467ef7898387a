"""End-to-end acceptance checks, one per shipped guarantee.

Each test prints a single machine-greppable verdict line of the form
``[criterion NN] PASS/FAIL: detail`` (past pytest capture, so every line
shows up in the run log) and then asserts the guarantee.  Two guarantees
are known not to hold for the truncated convolutional code and their
tests fail by design; see the README for the analysis.
"""

import time

import numpy as np

from dense_oracle import dense_kl_check
from quditqec.channel import ChannelConfig, run_trials
from quditqec.classical import certify_radius
from quditqec.codes import build_identity_code, builtin, perfect5_block
from quditqec.errors import additive_flip, enumerate_family, weyl
from quditqec.states import RegisterState, inner_product
from quditqec.transforms import dualize, paste, theorem2_pipeline
from quditqec.verifier import kl_check, lambda_matrix, reevaluate_witness

TOL = 1e-9


def _line(capsys, num: int, ok: bool, detail: str) -> None:
    with capsys.disabled():
        print(f"\n[criterion {num:02d}] {'PASS' if ok else 'FAIL'}: {detail}",
              flush=True)


def _one_scalar_equal(reference, candidate) -> bool:
    """True when candidate equals reference up to a single global unit scalar."""
    windows = reference.logical_windows()
    if windows != candidate.logical_windows():
        return False
    first = windows[0]
    s = inner_product(reference.encoded_kets[first],
                      candidate.encoded_kets[first])
    if s.abs_sq_fraction() != 1:
        return False
    for w in windows:
        scaled = reference.encoded_kets[w].scaled(s)
        ket = candidate.encoded_kets[w]
        if len(scaled) != len(ket):
            return False
        for digits, amp in scaled:
            if not ket.amplitude(digits).equals(amp):
                return False
    return True


def test_criterion_01(capsys):
    code = builtin("shor9", 2, 1)
    family = enumerate_family(9, 9, 1, n_levels=2)
    report = kl_check(code, family, tol=TOL)
    ok = report.passed and len(family) == 28 and report.elapsed_seconds < 10
    _line(capsys, 1, ok, f"shor9 over {len(family)} single-register patterns: "
                 f"{report.verdict}, max deviation {report.max_deviation:.2e}"
                 f" in {report.elapsed_seconds:.2f}s")
    assert len(family) == 28
    assert report.elapsed_seconds < 10
    assert report.passed


def test_criterion_02(capsys):
    pasted = paste(dualize(builtin("majority3", 2, 1)),
                   builtin("majority3", 2, 3))
    shor = builtin("shor9", 2, 1)
    ok = _one_scalar_equal(shor, pasted)
    _line(capsys, 2, ok, "paste(majority3-dual, majority3 tripled) reproduces shor9 "
                 "exactly up to one global unit scalar")
    assert ok


def test_criterion_03(capsys):
    results = []
    for L in (1, 2, 3):
        piped = theorem2_pipeline(builtin("spin_conv", 2, L))
        target = builtin("rate14_conv", 2, L)
        results.append(_one_scalar_equal(target, piped))
    ok = all(results)
    _line(capsys, 3, ok, "pipeline(spin_conv) equals rate14_conv exactly up to one "
                 f"global unit scalar for L=1..3: {results}")
    assert ok


def test_criterion_04(capsys):
    code = builtin("rate14_conv", 2, 3)
    family = enumerate_family(16, 8, 1, n_levels=2)
    report = kl_check(code, family, tol=TOL, jobs=4)
    ok = report.passed and report.elapsed_seconds < 300
    _line(capsys, 4, ok, f"rate14_conv L=3 over {len(family)} one-per-8 patterns: "
                 f"{report.verdict}, max deviation {report.max_deviation:.3f}"
                 f", interior {report.interior_verdict}, "
                 f"{len(report.boundary_witnesses)} boundary witnesses "
                 f"in {report.elapsed_seconds:.1f}s")
    assert len(family) == 373
    assert report.elapsed_seconds < 300
    # the violations live on the truncation boundary: the first witness is
    # boundary-flagged and the interior sub-check never trips (at L=3 every
    # register is within reach of an end, so the interior is empty)
    assert report.witness is None or report.witness.boundary
    assert report.interior_verdict in ("pass", "vacuous")
    # known real failure: phase patterns near the ends collide with logical
    # relabelings after truncation, so the full family does not pass
    assert report.passed


def test_criterion_05(capsys):
    code = builtin("rate14_conv", 2, 3)
    family = enumerate_family(16, 4, 1, n_levels=2)
    report = kl_check(code, family, tol=TOL, fail_fast=True)
    reeval = 0.0 if report.witness is None \
        else reevaluate_witness(code, family, report.witness)
    ok = (not report.passed) and reeval > 1e-6
    _line(capsys, 5, ok, f"rate14_conv L=3 over {len(family)} one-per-4 patterns: "
                 f"{report.verdict}, witness reevaluates to {reeval:.3f}")
    assert len(family) == 6826
    assert not report.passed
    assert reeval > 1e-6


def test_criterion_06(capsys):
    code = builtin("perfect5", 2, 2)
    family = enumerate_family(code.width, 5, 1, n_levels=2)
    report = kl_check(code, family, tol=TOL, jobs=4)
    ok = report.passed and len(family) == 1486
    _line(capsys, 6, ok, f"perfect5 L=2 (width {code.width}) over {len(family)} "
                 f"one-per-5 patterns: {report.verdict}, max deviation "
                 f"{report.max_deviation:.2e} in {report.elapsed_seconds:.1f}s")
    assert len(family) == 1486
    assert report.passed


def test_criterion_07(capsys):
    rows = []
    for label, window in (("majority3", 3), ("spin_conv", 4)):
        for n in (2, 3):
            for L in (1, 2, 3):
                rows.append((label, n, L, window, True))
    # window-1 rows ask for more than the codes deliver, exercising the
    # equivalence in the failing direction as well
    rows.append(("majority3", 2, 1, 1, False))
    rows.append(("spin_conv", 2, 1, 1, False))

    outcomes = []
    for label, n, L, window, expect_pass in rows:
        code = builtin(label, n, L)
        flips = enumerate_family(
            code.width, window, 1,
            basis=tuple(additive_flip(a) for a in range(1, n)))
        phases = enumerate_family(
            code.width, window, 1,
            basis=tuple(weyl(0, b) for b in range(1, n)))
        flip_verdict = kl_check(code, flips, tol=TOL, jobs=4).verdict
        phase_verdict = kl_check(dualize(code), phases, tol=TOL,
                                 jobs=4).verdict
        outcomes.append((label, n, L, window, flip_verdict, phase_verdict,
                         expect_pass))

    matched = all(f == p for *_, f, p, _ in outcomes)
    expected = all((f == "pass") == e for *_, f, _p, e in outcomes)
    ok = matched and expected
    passes = sum(f == "pass" for *_, f, _p, _e in outcomes)
    _line(capsys, 7, ok, f"{len(outcomes)} rows: additive flips on the code and "
                 "phase patterns on its dual agree on every verdict "
                 f"({passes} pass, {len(outcomes) - passes} fail)")
    for label, n, L, window, f, p, e in outcomes:
        assert f == p, (label, n, L, window, f, p)
        assert (f == "pass") == e, (label, n, L, window, f, e)


def test_criterion_08(capsys):
    outer = builtin("spin_conv", 2, 2, flush=False)
    inner = dualize(builtin("spin_conv", 2, outer.width, flush=True))
    wrong = paste(outer, inner)
    family = enumerate_family(wrong.width, 8, 1, n_levels=2)
    report = kl_check(wrong, family, tol=TOL, fail_fast=True)
    reeval = 0.0 if report.witness is None \
        else reevaluate_witness(wrong, family, report.witness)
    ok = (not report.passed) and reeval > 1e-6
    _line(capsys, 8, ok, f"wrong-order paste (width {wrong.width}, "
                 f"{len(family)} patterns): {report.verdict}, "
                 f"witness reevaluates to {reeval:.3f}")
    assert len(family) == 127
    assert not report.passed
    assert reeval > 1e-6


def test_criterion_09(capsys):
    started = time.perf_counter()
    certified = certify_radius(2, 6)
    relaxed = certify_radius(2, 6, window=4, max_errors=2)
    elapsed = time.perf_counter() - started
    ok = certified.passed and (not relaxed.passed) \
        and relaxed.counterexample is not None and elapsed < 60
    _line(capsys, 9, ok, f"classical radius: one-per-4 {certified.verdict} "
                 f"({certified.corruptions_checked} corruptions), "
                 f"two-per-4 {relaxed.verdict} with counterexample, "
                 f"{elapsed:.1f}s")
    assert certified.passed
    assert certified.counterexample is None
    assert not relaxed.passed
    assert relaxed.counterexample is not None
    assert elapsed < 60


def test_criterion_10(capsys):
    code = builtin("rate14_conv", 2, 3)
    family = enumerate_family(16, 8, 1, n_levels=2)
    cfg = ChannelConfig(p=0.02, seed=20260814, trials=10000)
    logical = RegisterState.basis(2, (0, 1, 1))
    multi = run_trials(code, cfg, family, logical, jobs=4)
    solo = run_trials(code, cfg, family, logical, jobs=1)
    clean = multi.in_family_success_count == multi.in_family_count
    ok = multi.to_json() == solo.to_json() and clean
    _line(capsys, 10, ok, f"channel at p={cfg.p}: jobs=4 and jobs=1 summaries "
                  f"{'identical' if multi.to_json() == solo.to_json() else 'differ'}, "
                  f"{multi.in_family_success_count}/{multi.in_family_count} "
                  "in-family trials recovered "
                  f"(conditional {multi.conditional_success:.4f})")
    assert multi.to_json() == solo.to_json()
    # known real failure: some in-family phase patterns act as exact
    # logical flips after truncation (see criterion 04), so conditional
    # recovery stays below one no matter the decoder
    assert multi.in_family_success_count == multi.in_family_count


def test_criterion_11(capsys):
    cases = [
        (builtin("majority3", 2, 1), 3),
        (builtin("majority3", 2, 2), 3),
        (dualize(builtin("majority3", 2, 1)), 3),
        (builtin("spin_conv", 2, 1), 4),
        (build_identity_code(2, 4), 4),
        (perfect5_block(2), 5),
    ]
    agreements = []
    for code, window in cases:
        family = enumerate_family(code.width, window, 1, n_levels=2)
        report = kl_check(code, family, tol=TOL)
        verdict, lam, _ = dense_kl_check(code, family)
        same = report.verdict == verdict
        if same and report.passed:
            mine = lambda_matrix(code, family, precomputed=report).matrix
            same = bool(np.abs(mine - lam).max() < TOL)
        agreements.append(same)
    ok = all(agreements)
    _line(capsys, 11, ok, f"sparse verifier vs dense projector oracle on "
                  f"{len(cases)} small codes: verdicts and lambda matrices "
                  f"{'agree' if ok else 'disagree'}")
    assert all(agreements)
