"""Command-line front end: exact values, limits, simulation, sweeps,
unitary-integral verification, and a fast self-test.

Output is machine-readable JSON (or CSV for sweep output) with a stable
envelope: {schema_version, command, parameters, results, rng}.  Every
numeric result carries a provenance tag — "exact", "limit", or
"monte_carlo" — so downstream tooling never has to guess which numbers
came from formulas and which from sampling.  No environment variables
are consulted; a command's full behavior is determined by its flags,
and reruns with identical flags produce identical bytes.

Exit codes: 0 success, 1 validation error, 2 runtime or statistical
failure, 3 I/O error.
"""

from __future__ import annotations

import argparse
import json
import math
import sys

import numpy as np

from .ensembles import Kind, RngStream
from .errors import (
    ConsistencyError,
    DomainError,
    SingularityError,
    UnsupportedLimitError,
    ValidationError,
)
from .formulas import (
    LimitQuery,
    PairQuery,
    avg_relative_entropy,
    avg_relative_entropy_decomposed,
    limit_avg_relative_entropy,
    mean_entropy,
    mean_logdet,
)
from .harness import SweepConfig, compare, estimate_relative_entropy, run_sweep
from .specfun import (
    bernoulli_recurrence_residuals,
    digamma,
    digamma_half,
    digamma_int,
    weighted_digamma,
)
from .zonal import (
    cross_term_exact,
    factorized_cross_term_check,
    mc_unitary_integral,
    mc_weingarten_moment,
    partitions_of,
    unitary_integral_exact,
    zonal_C,
)

SCHEMA_VERSION = "1"
CSV_COLUMNS = (
    "pair",
    "m",
    "n1",
    "n2",
    "c1",
    "c2",
    "exact",
    "limit",
    "mc_mean",
    "mc_stderr",
    "n_samples",
    "seed",
    "z",
)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_RUNTIME = 2
EXIT_IO = 3

_PAIR_TOKENS = {
    "hs-hs": (Kind.HILBERT_SCHMIDT, Kind.HILBERT_SCHMIDT),
    "bh-bh": (Kind.BURES_HALL, Kind.BURES_HALL),
    "bh-hs": (Kind.BURES_HALL, Kind.HILBERT_SCHMIDT),
    "hs-bh": (Kind.HILBERT_SCHMIDT, Kind.BURES_HALL),
}


class _Parser(argparse.ArgumentParser):
    """argparse that reports flag problems as validation errors (exit 1)
    instead of its default SystemExit(2)."""

    def error(self, message):
        raise ValidationError(message)


def _envelope(command: str, parameters: dict, results: dict, seed=None, threads=None) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "parameters": parameters,
        "results": results,
        "rng": {"seed": seed, "threads": threads},
    }


def _cell(value) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _rows_to_csv(rows) -> str:
    lines = [",".join(CSV_COLUMNS)]
    for row in rows:
        lines.append(
            ",".join(
                _cell(v)
                for v in (
                    row.pair,
                    row.m,
                    row.n1,
                    row.n2,
                    row.c1,
                    row.c2,
                    row.exact,
                    row.limit,
                    row.mc_mean,
                    row.mc_stderr,
                    row.n_samples,
                    row.seed,
                    row.z_score,
                )
            )
        )
    return "\n".join(lines) + "\n"


def _write_output(text: str, out_path: str | None) -> None:
    if out_path is None:
        sys.stdout.write(text)
        return
    with open(out_path, "w", encoding="utf-8", newline="") as handle:
        handle.write(text)


def _emit(payload: dict, out_path: str | None) -> None:
    _write_output(json.dumps(payload, indent=2) + "\n", out_path)


def _parse_pair(token: str) -> tuple[Kind, Kind]:
    if token not in _PAIR_TOKENS:
        raise ValidationError(
            f"unknown pair {token!r}; choose from {sorted(_PAIR_TOKENS)}"
        )
    return _PAIR_TOKENS[token]


def _parse_float_list(text: str, flag: str) -> tuple[float, ...]:
    try:
        values = tuple(float(tok) for tok in text.split(",") if tok.strip())
    except ValueError as exc:
        raise ValidationError(f"{flag} expects comma-separated numbers, got {text!r}") from exc
    if not values:
        raise ValidationError(f"{flag} must list at least one value")
    return values


def _parse_int_list(text: str, flag: str) -> tuple[int, ...]:
    floats = _parse_float_list(text, flag)
    ints = tuple(int(round(v)) for v in floats)
    if any(abs(i - v) > 1e-9 for i, v in zip(ints, floats)):
        raise ValidationError(f"{flag} expects integers, got {text!r}")
    return ints


def cmd_exact(pair: str, m: int, n1: float, n2: float) -> tuple[int, dict]:
    rho_kind, sigma_kind = _parse_pair(pair)
    q = PairQuery(rho_kind, sigma_kind, m, n1, n2)
    value = avg_relative_entropy(q)
    results = {
        "value": {"value": value, "provenance": "exact"},
        "decomposition": {
            "mean_entropy_rho": {
                "value": mean_entropy(q.rho_kind, q.m, q.n1),
                "provenance": "exact",
            },
            "mean_logdet_sigma": {
                "value": mean_logdet(q.sigma_kind, q.m, q.n2),
                "provenance": "exact",
            },
            "composed_value": {
                "value": avg_relative_entropy_decomposed(q),
                "provenance": "exact",
            },
        },
    }
    parameters = {"pair": pair, "m": m, "n1": n1, "n2": n2}
    return EXIT_OK, _envelope("exact", parameters, results)


def cmd_limit(pair: str, c1: float, c2: float) -> tuple[int, dict]:
    rho_kind, sigma_kind = _parse_pair(pair)
    value = limit_avg_relative_entropy(LimitQuery(rho_kind, sigma_kind, c1, c2))
    results = {"value": {"value": value, "provenance": "limit"}}
    parameters = {"pair": pair, "c1": c1, "c2": c2}
    return EXIT_OK, _envelope("limit", parameters, results)


def cmd_simulate(
    pair: str,
    m: int,
    n1: float,
    n2: float,
    samples: int,
    seed: int,
    threads: int,
) -> tuple[int, dict]:
    rho_kind, sigma_kind = _parse_pair(pair)
    q = PairQuery(rho_kind, sigma_kind, m, n1, n2)
    exact = avg_relative_entropy(q)
    est = estimate_relative_entropy(q, samples, seed=seed, threads=threads)
    report = compare(est, exact)
    results = {
        "estimate": {
            "mean": est.mean,
            "stderr": est.stderr,
            "n_samples": est.n_samples,
            "method": est.method,
            "min_value": est.min_value,
            "chunks": est.chunks,
            "provenance": "monte_carlo",
        },
        "exact": {"value": exact, "provenance": "exact"},
        "comparison": {
            "z": report.z,
            "threshold": report.threshold,
            "passed": report.passed,
            "provenance": "monte_carlo",
        },
        "warnings": list(est.warnings),
    }
    parameters = {
        "pair": pair,
        "m": m,
        "n1": n1,
        "n2": n2,
        "samples": samples,
        "seed": seed,
        "threads": threads,
    }
    envelope = _envelope("simulate", parameters, results, seed=seed, threads=threads)
    return (EXIT_OK if report.passed else EXIT_RUNTIME), envelope


def cmd_figure(
    pair: str,
    c1_list: tuple[float, ...],
    c2: float,
    m_list: tuple[int, ...],
    samples: int,
    seed: int,
    threads: int,
    fmt: str,
) -> tuple[int, dict | str]:
    kinds = _parse_pair(pair)
    cfg = SweepConfig(
        pair=kinds,
        c1_list=c1_list,
        c2=c2,
        m_list=m_list,
        samples_per_point=samples,
        seed=seed,
        threads=threads,
    )
    rows = run_sweep(cfg)
    if fmt == "csv":
        return EXIT_OK, _rows_to_csv(rows)
    row_dicts = [
        {
            "pair": r.pair,
            "m": r.m,
            "n1": r.n1,
            "n2": r.n2,
            "c1": r.c1,
            "c2": r.c2,
            "exact": r.exact,
            "limit": r.limit,
            "mc_mean": r.mc_mean,
            "mc_stderr": r.mc_stderr,
            "n_samples": r.n_samples,
            "seed": r.seed,
            "z": r.z_score,
        }
        for r in rows
    ]
    results = {
        "rows": row_dicts,
        "column_provenance": {
            "exact": "exact",
            "limit": "limit",
            "mc_mean": "monte_carlo",
            "mc_stderr": "monte_carlo",
            "z": "monte_carlo",
        },
    }
    parameters = {
        "pair": pair,
        "c1": list(c1_list),
        "c2": c2,
        "m": list(m_list),
        "samples": samples,
        "seed": seed,
        "threads": threads,
    }
    return EXIT_OK, _envelope("figure", parameters, results, seed=seed, threads=threads)


def _random_hermitian(m: int, gen: np.random.Generator) -> np.ndarray:
    a = gen.standard_normal((m, m)) + 1j * gen.standard_normal((m, m))
    return (a + np.conj(a.T)) / 2.0


def _mc_check(name: str, est, exact: float) -> dict:
    """Pass/fail record for one Monte Carlo identity.

    A z-score is only meaningful when the spread is statistical.  When
    the integrand is constant over the group (e.g. a determinant), the
    reported stderr is rounding noise, so the comparison degrades to an
    exact relative residual instead.
    """
    base = {"name": name, "mean": est.mean, "stderr": est.stderr, "exact": exact,
            "provenance": "monte_carlo"}
    if est.stderr <= 1e-12:
        residual = abs(est.mean - exact) / max(1.0, abs(exact))
        base.update({"residual": residual, "passed": residual <= 1e-9})
    else:
        report = compare(est, exact)
        base.update({"z": report.z, "passed": report.passed})
    return base


def cmd_zonal_verify(m: int, l_max: int, samples: int, seed: int) -> tuple[int, dict]:
    """Check the three group-integral facts the exact averages rest on:
    the trace-power decomposition, the Haar integral of C_kappa, and the
    second moment of Haar matrix entries — plus the cross-term
    factorization they imply."""
    if not 1 <= m <= 6:
        raise ValidationError(f"m must lie in 1..6 for verification runs, got {m}")
    if not 1 <= l_max <= 4:
        raise ValidationError(f"l_max must lie in 1..4, got {l_max}")
    if samples < 1000:
        raise ValidationError(f"need at least 1000 samples, got {samples}")

    gen = RngStream(seed, 0).generator()
    checks: list[dict] = []

    eigs = gen.uniform(0.25, 2.0, size=m)
    for l in range(1, l_max + 1):
        total = math.fsum(zonal_C(kappa, eigs) for kappa in partitions_of(l, m))
        target = float(eigs.sum() ** l)
        residual = abs(total - target) / max(1.0, abs(target))
        checks.append(
            {
                "name": f"trace-power-decomposition-l{l}",
                "residual": residual,
                "passed": residual <= 1e-9,
                "provenance": "exact",
            }
        )

    x_mat = _random_hermitian(m, gen)
    y_mat = _random_hermitian(m, gen)
    stream = 1
    for l in range(1, l_max + 1):
        for kappa in partitions_of(l, m):
            est = mc_unitary_integral(x_mat, y_mat, kappa, samples, RngStream(seed, stream))
            stream += 1
            exact = unitary_integral_exact(x_mat, y_mat, kappa)
            name = "unitary-integral-" + ".".join(map(str, kappa))
            checks.append(_mc_check(name, est, exact))

    wg = mc_weingarten_moment(m, samples, RngStream(seed, 600))
    checks.append(
        {
            "name": "weingarten-second-moment",
            "max_z": wg.max_z,
            "u11_sq_mean": float(wg.mean[0, 0, 0, 0].real),
            "u11_sq_stderr": float(wg.stderr_real[0, 0, 0, 0]),
            "expected_u11_sq": 1.0 / m,
            "passed": wg.max_z <= 4.0,
            "provenance": "monte_carlo",
        }
    )

    rho_spec = gen.dirichlet(np.ones(m))
    sigma_spec = (gen.dirichlet(np.ones(m)) + 0.05) / (1.0 + 0.05 * m)
    est = factorized_cross_term_check(rho_spec, sigma_spec, samples, RngStream(seed, 601))
    checks.append(_mc_check("factorized-cross-term", est, cross_term_exact(sigma_spec)))

    passed = all(c["passed"] for c in checks)
    results = {"checks": checks, "passed": passed}
    parameters = {"m": m, "l_max": l_max, "samples": samples, "seed": seed}
    envelope = _envelope("zonal-verify", parameters, results, seed=seed, threads=1)
    return (EXIT_OK if passed else EXIT_RUNTIME), envelope


def _check(name: str, residual: float, tolerance: float) -> dict:
    return {
        "name": name,
        "max_residual": residual,
        "tolerance": tolerance,
        "passed": residual <= tolerance,
    }


def cmd_selftest(bernoulli_table=None) -> tuple[int, dict]:
    """Fast invariant suite: special-function identities, the closed-form
    composition identity, and pinned trivial values.  `bernoulli_table`
    exists for fault injection in tests: a corrupted table must fail the
    recurrence check by name."""
    checks: list[dict] = []

    residuals = bernoulli_recurrence_residuals(table=bernoulli_table)
    checks.append(
        _check(
            "bernoulli-recurrence",
            max(abs(float(r)) for r in residuals),
            0.0,
        )
    )

    grid = (0.5, 0.7, 1.0, 1.5, 2.3, 10.0, 100.0)
    checks.append(
        _check(
            "digamma-recurrence",
            max(abs(digamma(x + 1.0) - digamma(x) - 1.0 / x) for x in grid),
            1e-10,
        )
    )
    checks.append(
        _check(
            "digamma-duplication",
            max(
                abs(2.0 * digamma(2.0 * x) - digamma(x) - digamma(x + 0.5) - 2.0 * math.log(2.0))
                for x in (0.5, 1.0, 1.5, 2.0, 7.5, 40.0)
            ),
            1e-10,
        )
    )
    summation_worst = 0.0
    for alpha in (0.0, 0.5, 1.0, 2.0, 3.25):
        for m in (1, 2, 5, 17, 50):
            lhs = math.fsum(digamma(i + alpha) for i in range(1, m + 1))
            rhs = (m + alpha) * digamma(m + alpha) - weighted_digamma(alpha) - m
            summation_worst = max(summation_worst, abs(lhs - rhs))
    checks.append(_check("digamma-summation-formula", summation_worst, 1e-10))

    harmonic_worst = max(
        max(abs(digamma_int(l) - digamma(float(l))) for l in range(1, 101)),
        max(abs(digamma_half(l) - digamma(l + 0.5)) for l in range(0, 100)),
    )
    checks.append(_check("digamma-harmonic-oracle", harmonic_worst, 1e-13))

    composition_worst = 0.0
    for rho_kind, sigma_kind in _PAIR_TOKENS.values():
        for m in range(1, 9):
            for a1 in (0.0, 0.5, 1.0, 2.0, 3.0):
                for a2 in (0.0, 0.5, 1.0, 2.0, 3.0):
                    q = PairQuery(rho_kind, sigma_kind, m, m + a1, m + a2)
                    composition_worst = max(
                        composition_worst,
                        abs(avg_relative_entropy(q) - avg_relative_entropy_decomposed(q)),
                    )
    checks.append(_check("composition-identity", composition_worst, 1e-10))

    trivial_worst = max(
        max(
            abs(avg_relative_entropy(PairQuery(rk, sk, 1, 1, 1)))
            for rk, sk in _PAIR_TOKENS.values()
        ),
        abs(mean_entropy(Kind.HILBERT_SCHMIDT, 2, 2) - 1.0 / 3.0),
        abs(
            avg_relative_entropy(
                PairQuery(Kind.HILBERT_SCHMIDT, Kind.HILBERT_SCHMIDT, 2, 2, 2)
            )
            - 1.0
        ),
    )
    checks.append(_check("trivial-exact-values", trivial_worst, 1e-12))

    passed = all(c["passed"] for c in checks)
    failing = [c["name"] for c in checks if not c["passed"]]
    results = {"checks": checks, "passed": passed, "failing": failing}
    envelope = _envelope("selftest", {}, results)
    return (EXIT_OK if passed else EXIT_RUNTIME), envelope


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="qrelent",
        description=(
            "Exact ensemble averages of quantum relative entropy with "
            "Monte Carlo verification."
        ),
    )
    sub = parser.add_subparsers(dest="command", required=True)
    pair_kwargs = dict(choices=sorted(_PAIR_TOKENS), required=True)

    p_exact = sub.add_parser("exact", help="closed-form average for one pair")
    p_exact.add_argument("--pair", **pair_kwargs)
    p_exact.add_argument("--m", type=int, required=True)
    p_exact.add_argument("--n1", type=float, required=True)
    p_exact.add_argument("--n2", type=float, required=True)
    p_exact.add_argument("--out")

    p_limit = sub.add_parser("limit", help="large-dimension limit at fixed ratios")
    p_limit.add_argument("--pair", **pair_kwargs)
    p_limit.add_argument("--c1", type=float, required=True)
    p_limit.add_argument("--c2", type=float, required=True)
    p_limit.add_argument("--out")

    p_sim = sub.add_parser("simulate", help="Monte Carlo estimate vs the exact value")
    p_sim.add_argument("--pair", **pair_kwargs)
    p_sim.add_argument("--m", type=int, required=True)
    p_sim.add_argument("--n1", type=float, required=True)
    p_sim.add_argument("--n2", type=float, required=True)
    p_sim.add_argument("--samples", type=int, default=10000)
    p_sim.add_argument("--seed", type=int, default=0)
    p_sim.add_argument("--threads", type=int, default=1)
    p_sim.add_argument("--out")

    p_fig = sub.add_parser("figure", help="sweep a (c1, m) grid and emit rows")
    p_fig.add_argument("--pair", choices=sorted(_PAIR_TOKENS), default="hs-hs")
    p_fig.add_argument("--c1", default="1,2,3", help="comma list of rho aspect ratios")
    p_fig.add_argument("--c2", type=float, default=1.0)
    p_fig.add_argument("--m", default="2,4,8,16,32", help="comma list of dimensions")
    p_fig.add_argument("--samples", type=int, default=10000)
    p_fig.add_argument("--seed", type=int, default=0)
    p_fig.add_argument("--threads", type=int, default=1)
    p_fig.add_argument("--format", choices=("json", "csv"), default="csv")
    p_fig.add_argument("--out")

    p_zonal = sub.add_parser("zonal-verify", help="verify the unitary-integral identities")
    p_zonal.add_argument("--m", type=int, default=3)
    p_zonal.add_argument("--l-max", type=int, default=2, dest="l_max")
    p_zonal.add_argument("--samples", type=int, default=100000)
    p_zonal.add_argument("--seed", type=int, default=0)
    p_zonal.add_argument("--out")

    p_self = sub.add_parser("selftest", help="fast invariant suite")
    p_self.add_argument("--out")

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        if args.command == "exact":
            code, payload = cmd_exact(args.pair, args.m, args.n1, args.n2)
        elif args.command == "limit":
            code, payload = cmd_limit(args.pair, args.c1, args.c2)
        elif args.command == "simulate":
            code, payload = cmd_simulate(
                args.pair, args.m, args.n1, args.n2, args.samples, args.seed, args.threads
            )
        elif args.command == "figure":
            code, payload = cmd_figure(
                args.pair,
                _parse_float_list(args.c1, "--c1"),
                args.c2,
                _parse_int_list(args.m, "--m"),
                args.samples,
                args.seed,
                args.threads,
                args.format,
            )
        elif args.command == "zonal-verify":
            code, payload = cmd_zonal_verify(args.m, args.l_max, args.samples, args.seed)
        else:
            code, payload = cmd_selftest()
        if isinstance(payload, str):
            _write_output(payload, args.out)
        else:
            _emit(payload, args.out)
        return code
    except (ValidationError, DomainError, UnsupportedLimitError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except (ConsistencyError, SingularityError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
