"""Exhaustive recoverability checking of a code against an error-pattern family.

For every ordered operator pair (A, B) from the family and every logical
pair (i, j) the check evaluates <i_enc| A^dagger B |j_enc>.  Off-diagonal
entries (i != j) must vanish and diagonal entries must not depend on i;
the shared diagonal value is the lambda matrix entry for (A, B).  This is
the Knill-Laflamme criterion specialized to a finite pattern family.

Two engines share one report format.  The default engine expands each
error-applied ket into a sparse row over the full computational basis and
forms Gram blocks with scipy, which keeps the width-16 runs in the seconds
range.  The exact engine walks operator pairs with cyclotomic amplitudes
and certifies zeros symbolically; it is meant for small widths.

Deviations are classified as interior or boundary by whether either
pattern of the offending pair touches a flush register.  Truncating a
convolutional encoder can in principle disturb correctability near the
flush tail only, so reports keep the two populations separate.
"""

from __future__ import annotations

import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix

from .codes import CodeSpec
from .cyclotomic import PhaseScalar
from .errors import ErrorPattern, PatternFamily, apply_pattern
from .states import RegisterState, index_of_ket, inner_product

BOUNDARY_WITNESS_CAP = 10
LAMBDA_SAMPLE_DIM = 4
# eigendecomposition for the rank summary is skipped above this family size
LAMBDA_SUMMARY_MAX = 4096
# above this many estimated matrix entries the engine streams pair by pair
NNZ_CACHE_LIMIT = 25_000_000


class VerificationError(ValueError):
    """Raised when lambda extraction is requested for a failing code."""


@dataclass(frozen=True)
class KLWitness:
    """One overlap entry that violates the recoverability condition.

    Indices refer to the deterministic enumeration order of the family
    (pattern_a, pattern_b) and of the sorted logical windows (logical_i,
    logical_j).  `expected` is 0 for off-diagonal entries and the reference
    lambda value for diagonal ones.
    """

    pattern_a: int
    pattern_b: int
    logical_i: int
    logical_j: int
    observed: complex
    expected: complex
    deviation: float
    boundary: bool

    def to_json(self) -> dict:
        return {"pattern_a": self.pattern_a, "pattern_b": self.pattern_b,
                "logical_i": self.logical_i, "logical_j": self.logical_j,
                "observed": [self.observed.real, self.observed.imag],
                "expected": [self.expected.real, self.expected.imag],
                "deviation": self.deviation, "boundary": self.boundary}


@dataclass
class KLReport:
    verdict: str
    code_label: str
    tolerance: float
    exact: bool
    engine: str
    family_size: int
    logical_dim: int
    max_deviation: float
    witness: KLWitness | None
    interior_max_deviation: float
    interior_verdict: str
    boundary_witnesses: tuple[KLWitness, ...]
    lambda_samples: dict[tuple[int, int], complex]
    lambda_summary: dict | None
    elapsed_seconds: float
    family_json: dict = field(repr=False, default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"

    def to_json(self) -> dict:
        out = {"verdict": self.verdict,
               "code": self.code_label,
               "tolerance": self.tolerance,
               "exact": self.exact,
               "engine": self.engine,
               "family": self.family_json,
               "family_size": self.family_size,
               "logical_dim": self.logical_dim,
               "max_deviation": self.max_deviation,
               "interior_max_deviation": self.interior_max_deviation,
               "interior_verdict": self.interior_verdict,
               "boundary_witnesses": [w.to_json()
                                      for w in self.boundary_witnesses],
               "lambda_samples": [
                   {"pair": [a, b], "value": [v.real, v.imag]}
                   for (a, b), v in sorted(self.lambda_samples.items())],
               "elapsed_seconds": self.elapsed_seconds}
        if self.witness is not None:
            out["witness"] = self.witness.to_json()
        out["lambda_summary"] = self.lambda_summary
        return out


def _branch_tables(patterns, n_levels: int) -> dict:
    """Per-operator complex branch tables indexed by input digit."""
    tables: dict = {}
    for pattern in patterns:
        for _, op in pattern.ops:
            if op in tables:
                continue
            rows = []
            for digit in range(n_levels):
                row = []
                for new_digit, factor in op.branches(digit, n_levels):
                    value = factor.to_complex() \
                        if isinstance(factor, PhaseScalar) else complex(factor)
                    row.append((new_digit, value))
                rows.append(row)
            tables[op] = rows
    return tables


def _apply_terms(base: dict, pattern: ErrorPattern, tables: dict) -> dict:
    out = base
    for pos, op in pattern.ops:
        idx = pos - 1
        table = tables[op]
        nxt: dict = {}
        for digits, amp in out.items():
            for new_digit, factor in table[digits[idx]]:
                key = digits[:idx] + (new_digit,) + digits[idx + 1:]
                nxt[key] = nxt.get(key, 0j) + amp * factor
        out = nxt
    return out


def _monomial_table(op, n_levels: int):
    """(digit permutation-or-function, phase per input digit) for one-branch ops."""
    n = n_levels
    if op.kind == "weyl":
        digits = np.arange(n)
        perm = (digits + op.a) % n
        phase = np.exp(2j * np.pi * (op.b % n) * digits / n)
        return perm, phase
    if op.kind == "spin_flip":
        if len(op.table) != n:
            raise ValueError("spin flip table length does not match n_levels")
        return np.array([t % n for t in op.table]), np.ones(n, dtype=complex)
    if op.kind == "phase_shift":
        if len(op.phases) != n:
            raise ValueError("phase table length does not match n_levels")
        return np.arange(n), np.asarray(op.phases, dtype=complex)
    if op.kind == "identity":
        return np.arange(n), np.ones(n, dtype=complex)
    return None


def _family_matrix(ket: RegisterState, patterns, tables,
                   n_levels: int, width: int) -> csr_matrix:
    """Sparse matrix whose row p is pattern p applied to the ket."""
    n = n_levels
    base = ket.to_complex_terms()
    base_cols = np.array([index_of_ket(d, n) for d in base], dtype=np.int64)
    base_amps = np.array(list(base.values()), dtype=np.complex128)
    place = {pos: n ** (width - pos) for pos in range(1, width + 1)}
    monomial = {op: _monomial_table(op, n)
                for pattern in patterns for _, op in pattern.ops}

    rows: list[np.ndarray] = []
    cols: list[np.ndarray] = []
    data: list[np.ndarray] = []
    for p_idx, pattern in enumerate(patterns):
        if all(monomial[op] is not None for _, op in pattern.ops) \
                and n ** width < 2 ** 62:
            new_cols = base_cols
            new_amps = base_amps
            for pos, op in pattern.ops:
                perm, phase = monomial[op]
                digit = (new_cols // place[pos]) % n
                new_cols = new_cols + (perm[digit] - digit) * place[pos]
                new_amps = new_amps * phase[digit]
            rows.append(np.full(new_cols.size, p_idx, dtype=np.int64))
            cols.append(new_cols)
            data.append(new_amps)
        else:
            # dense single-register matrices fan out; keep the dict path
            applied = _apply_terms(base, pattern, tables)
            rows.append(np.full(len(applied), p_idx, dtype=np.int64))
            cols.append(np.array([index_of_ket(d, n) for d in applied],
                                 dtype=np.int64))
            data.append(np.array(list(applied.values()), dtype=np.complex128))
    mat = csr_matrix((np.concatenate(data),
                      (np.concatenate(rows), np.concatenate(cols))),
                     shape=(len(patterns), n ** width),
                     dtype=np.complex128)
    mat.sum_duplicates()
    return mat


def _compact_columns(mats: list[csr_matrix]) -> list[csr_matrix]:
    """Drop columns that are zero in every matrix, keeping a shared mapping.

    Gram blocks between the matrices are unchanged, but transposes and
    products no longer scale with N^width, which matters from width ~20 up.
    """
    occupied = np.unique(np.concatenate([m.indices for m in mats]))
    out = []
    for m in mats:
        indices = np.searchsorted(occupied, m.indices).astype(m.indices.dtype)
        out.append(csr_matrix((m.data, indices, m.indptr),
                              shape=(m.shape[0], occupied.size)))
    return out


def _scan_block(block, touches, tol):
    """Max deviation, its first row-major entry, interior max, boundary hits."""
    coo = block.tocoo()
    if coo.nnz == 0:
        return 0.0, None, 0.0, []
    order = np.lexsort((coo.col, coo.row))
    row, col = coo.row[order], coo.col[order]
    val = coo.data[order]
    mag = np.abs(val)
    worst = int(mag.argmax())
    boundary_mask = touches[row] | touches[col]
    interior = mag[~boundary_mask]
    interior_max = float(interior.max()) if interior.size else 0.0
    hits = []
    if boundary_mask.any():
        over = np.flatnonzero(boundary_mask & (mag > tol))
        for k in over[:BOUNDARY_WITNESS_CAP]:
            hits.append((int(row[k]), int(col[k]), complex(val[k])))
    top = (int(row[worst]), int(col[worst]), complex(val[worst]),
           bool(boundary_mask[worst]))
    return float(mag[worst]), top, interior_max, hits


def _lambda_entry(lam: csr_matrix, a: int, b: int) -> complex:
    return complex(lam[a, b])


def _float_engine(code: CodeSpec, patterns, family: PatternFamily,
                  tol: float, fail_fast: bool, jobs: int):
    n, width = code.n_levels, code.width
    logicals = code.logical_windows()
    tables = _branch_tables(patterns, n)
    touches = np.array(
        [bool(set(p.support) & code.boundary_registers) for p in patterns])
    dim = len(logicals)

    max_dev = 0.0
    interior_max = 0.0
    witness = None
    boundary: list[KLWitness] = []
    lam = None

    def gram_scan(mat_i, mat_j, diagonal):
        gram = (mat_i.conj() @ mat_j.T).tocsr()
        if diagonal:
            gram = (gram - lam).tocsr()
        gram.sort_indices()
        return _scan_block(gram, touches, tol)

    def reduce_block(i, j, scanned):
        nonlocal max_dev, interior_max, witness
        dev, top, block_interior, hits = scanned
        interior_max = max(interior_max, block_interior)
        if top is not None and dev > max_dev:
            a, b, value, on_boundary = top
            expected = _lambda_entry(lam, a, b) if i == j else 0j
            witness = KLWitness(a, b, i, j, expected + value, expected,
                                dev, on_boundary)
            max_dev = dev
        for a, b, value in hits:
            if len(boundary) >= BOUNDARY_WITNESS_CAP:
                break
            expected = _lambda_entry(lam, a, b) if i == j else 0j
            boundary.append(KLWitness(a, b, i, j, expected + value, expected,
                                      abs(value), True))

    def build(i):
        return _family_matrix(code.encoded_kets[logicals[i]], patterns,
                              tables, n, width)

    est_nnz = len(patterns) * sum(len(code.encoded_kets[w]) for w in logicals)
    if est_nnz <= NNZ_CACHE_LIMIT:
        mats = _compact_columns([build(i) for i in range(dim)])
        lam = (mats[0].conj() @ mats[0].T).tocsr()
        lam.sort_indices()
        pairs = [(i, j) for i in range(dim) for j in range(i, dim)]
        if jobs > 1 and not fail_fast:
            with ThreadPoolExecutor(max_workers=jobs) as pool:
                results = list(pool.map(
                    lambda p: gram_scan(mats[p[0]], mats[p[1]], p[0] == p[1]),
                    pairs))
            scan = zip(pairs, results)
        else:
            scan = (((i, j), gram_scan(mats[i], mats[j], i == j))
                    for i, j in pairs)
        for (i, j), scanned in scan:
            reduce_block(i, j, scanned)
            if fail_fast and max_dev > tol:
                break
        return max_dev, witness, interior_max, tuple(boundary), lam

    # Too many terms to keep every per-logical matrix alive (dense duals,
    # very long windows).  Stream the pairs, rebuilding the second matrix
    # each time; compact columns pairwise when the ambient dimension itself
    # is the problem.  Sequential regardless of jobs.  High-occupancy
    # matrices of manageable shape go through dense BLAS products instead
    # of sparse kernels, which are an order of magnitude slower there.
    wide = n ** width > 1 << 22
    entries = len(patterns) * n ** width
    dense_mode = not wide and entries <= 16_000_000 \
        and est_nnz >= 0.25 * entries * dim

    def fetch(i):
        mat = build(i)
        return mat.toarray() if dense_mode else mat

    lam_dense = None
    for i in range(dim):
        mat_i = fetch(i)
        if i == 0:
            if dense_mode:
                lam_dense = mat_i.conj() @ mat_i.T
                lam = csr_matrix(lam_dense)
            else:
                base = _compact_columns([mat_i])[0] if wide else mat_i
                lam = (base.conj() @ base.T).tocsr()
            lam.sort_indices()
        for j in range(i, dim):
            mat_j = mat_i if j == i else fetch(j)
            if dense_mode:
                gram = mat_i.conj() @ mat_j.T
                if i == j:
                    gram = gram - lam_dense
                scanned = _scan_block(csr_matrix(gram), touches, tol)
            else:
                if wide:
                    mat_a, mat_b = _compact_columns([mat_i, mat_j])
                else:
                    mat_a, mat_b = mat_i, mat_j
                scanned = gram_scan(mat_a, mat_b, i == j)
            reduce_block(i, j, scanned)
            if fail_fast and max_dev > tol:
                return max_dev, witness, interior_max, tuple(boundary), lam
    return max_dev, witness, interior_max, tuple(boundary), lam


def _exact_engine(code: CodeSpec, patterns, family: PatternFamily,
                  tol: float, fail_fast: bool):
    logicals = code.logical_windows()
    applied = [[apply_pattern(code.encoded_kets[w], p) for p in patterns]
               for w in logicals]
    touches = [bool(set(p.support) & code.boundary_registers)
               for p in patterns]
    size = len(patterns)
    lam_row: dict[tuple[int, int], PhaseScalar] = {}

    def reference(a, b):
        key = (a, b)
        if key not in lam_row:
            lam_row[key] = inner_product(applied[0][a], applied[0][b])
        return lam_row[key]

    max_dev = 0.0
    interior_max = 0.0
    witness = None
    boundary: list[KLWitness] = []
    failed = False

    for i in range(len(logicals)):
        for j in range(i, len(logicals)):
            for a in range(size):
                for b in range(size):
                    value = inner_product(applied[i][a], applied[j][b])
                    if i == j:
                        ref = reference(a, b)
                        diff = value - ref
                        expected = ref.to_complex()
                    else:
                        diff = value
                        expected = 0j
                    if diff.is_zero():
                        continue
                    dev = abs(diff.to_complex())
                    on_boundary = touches[a] or touches[b]
                    if not on_boundary:
                        interior_max = max(interior_max, dev)
                    elif dev > tol and len(boundary) < BOUNDARY_WITNESS_CAP:
                        boundary.append(KLWitness(
                            a, b, i, j, value.to_complex(), expected,
                            dev, True))
                    if dev > max_dev:
                        witness = KLWitness(a, b, i, j, value.to_complex(),
                                            expected, dev, on_boundary)
                        max_dev = dev
                    failed = True
                    if fail_fast:
                        return (max_dev, witness, interior_max,
                                tuple(boundary), lam_row, failed)
    return max_dev, witness, interior_max, tuple(boundary), lam_row, failed


def kl_check(code: CodeSpec, family: PatternFamily, tol: float = 1e-9,
             exact: bool = False, fail_fast: bool = False,
             jobs: int = 1) -> KLReport:
    """Check the code against every ordered pair of patterns in the family.

    Float mode passes when the maximal deviation stays at or below `tol`.
    Exact mode demands symbolic zeros and reports the float magnitude of
    any residue it finds.  `fail_fast` stops at the first witness; `jobs`
    partitions the Gram blocks across threads without changing the result
    (oversized runs stream sequentially and ignore `jobs`).
    """
    if family.width != code.width:
        raise ValueError(
            f"family width {family.width} does not match code width "
            f"{code.width}")
    if not code.encoded_kets:
        raise ValueError("code has no materialized encoded kets")
    patterns = list(family)
    started = time.perf_counter()

    if exact:
        max_dev, witness, interior_max, boundary, lam_row, failed = \
            _exact_engine(code, patterns, family, tol, fail_fast)
        ok = not failed
        engine = "exact"
        k = min(len(patterns), LAMBDA_SAMPLE_DIM)
        samples = {}
        if ok:
            for a in range(k):
                for b in range(k):
                    value = lam_row.get((a, b))
                    if value is None:
                        value = inner_product(
                            apply_pattern(code.encoded_kets[
                                code.logical_windows()[0]], patterns[a]),
                            apply_pattern(code.encoded_kets[
                                code.logical_windows()[0]], patterns[b]))
                    samples[(a, b)] = value.to_complex()
        summary = None
    else:
        max_dev, witness, interior_max, boundary, lam = \
            _float_engine(code, patterns, family, tol, fail_fast, jobs)
        ok = max_dev <= tol
        engine = "sparse-float"
        k = min(len(patterns), LAMBDA_SAMPLE_DIM)
        dense_corner = lam[:k, :k].toarray()
        samples = {(a, b): complex(dense_corner[a, b])
                   for a in range(k) for b in range(k)}
        summary = None
        if ok and len(patterns) <= LAMBDA_SUMMARY_MAX:
            summary = _summarize_lambda(lam.toarray(), tol)

    elapsed = time.perf_counter() - started
    # every register on the boundary leaves nothing for the interior check
    vacuous = set(range(1, code.width + 1)) <= code.boundary_registers
    return KLReport(
        verdict="pass" if ok else "fail",
        code_label=code.label,
        tolerance=tol,
        exact=exact,
        engine=engine,
        family_size=len(patterns),
        logical_dim=len(code.logical_windows()),
        max_deviation=max_dev,
        witness=None if ok else witness,
        interior_max_deviation=interior_max,
        interior_verdict="vacuous" if vacuous
        else ("pass" if interior_max <= tol else "fail"),
        boundary_witnesses=boundary if not ok else (),
        lambda_samples=samples,
        lambda_summary=summary,
        elapsed_seconds=elapsed,
        family_json=family.to_json(),
    )


def _summarize_lambda(matrix: np.ndarray, tol: float) -> dict:
    hermitian = 0.5 * (matrix + matrix.conj().T)
    eigenvalues = np.linalg.eigvalsh(hermitian)
    scale = max(1.0, float(eigenvalues.max(initial=0.0)))
    rank = int((eigenvalues > max(tol, 1e-9) * scale).sum())
    size = matrix.shape[0]
    identity_dev = float(np.abs(matrix - np.eye(size)).max())
    kind = "identity" if identity_dev <= max(tol, 1e-9) else "degenerate"
    return {"kind": kind, "rank": rank, "dim": size,
            "min_eigenvalue": float(eigenvalues.min(initial=0.0))}


@dataclass
class LambdaReport:
    matrix: np.ndarray
    kind: str
    rank: int
    kl: KLReport

    def to_json(self, include_matrix: bool = True) -> dict:
        out = {"kind": self.kind, "rank": self.rank,
               "dim": int(self.matrix.shape[0]),
               "verdict": self.kl.verdict,
               "tolerance": self.kl.tolerance}
        if include_matrix and self.matrix.shape[0] <= 64:
            out["matrix"] = [[[z.real, z.imag] for z in row]
                             for row in self.matrix.tolist()]
        return out


def lambda_matrix(code: CodeSpec, family: PatternFamily,
                  tol: float = 1e-9, jobs: int = 1,
                  precomputed: KLReport | None = None) -> LambdaReport:
    """Full lambda matrix over family pairs; only defined for passing codes.

    `precomputed` skips the verification pass when the caller already holds
    a report for exactly this (code, family) pairing.
    """
    report = precomputed if precomputed is not None \
        else kl_check(code, family, tol=tol, jobs=jobs)
    if not report.passed:
        raise VerificationError(
            f"code {code.label!r} fails the recoverability check "
            f"(max deviation {report.max_deviation:.3e}); "
            "the lambda matrix is undefined")
    n = code.n_levels
    patterns = list(family)
    tables = _branch_tables(patterns, n)
    first = code.encoded_kets[code.logical_windows()[0]]
    mat, = _compact_columns(
        [_family_matrix(first, patterns, tables, n, code.width)])
    lam = np.asarray((mat.conj() @ mat.T).todense())
    summary = _summarize_lambda(lam, tol)
    return LambdaReport(matrix=lam, kind=summary["kind"],
                        rank=summary["rank"], kl=report)


def reevaluate_witness(code: CodeSpec, family: PatternFamily,
                       witness: KLWitness) -> float:
    """Recompute a witness deviation through the exact state pathway.

    Independent of the sparse engine: patterns are re-applied with
    cyclotomic amplitudes and the overlap is taken term by term, so a
    reported failure can be confirmed outside the code that found it.
    """
    patterns = list(family)
    pat_a = patterns[witness.pattern_a]
    pat_b = patterns[witness.pattern_b]
    logicals = code.logical_windows()
    ket_i = code.encoded_kets[logicals[witness.logical_i]]
    ket_j = code.encoded_kets[logicals[witness.logical_j]]
    value = inner_product(apply_pattern(ket_i, pat_a),
                          apply_pattern(ket_j, pat_b)).to_complex()
    if witness.logical_i != witness.logical_j:
        return abs(value)
    ket_ref = code.encoded_kets[logicals[0]]
    ref = inner_product(apply_pattern(ket_ref, pat_a),
                        apply_pattern(ket_ref, pat_b)).to_complex()
    return abs(value - ref)
