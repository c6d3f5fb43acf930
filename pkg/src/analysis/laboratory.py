"""Experiment orchestration: one method per laboratory mode."""

import logging
import math
import time
from functools import partial
from fractions import Fraction
from typing import Callable, Optional

import polars as pl

from src.analysis.beta_sieve import (
    build_weights,
    scan_upper_bound,
    sieve_envelope,
    weighted_density_sum,
)
from src.analysis.digits import decay_at_rational, measure_hybrid_sum, measure_l1_constant
from src.analysis.exp_sums import reconstruct_main_term
from src.analysis.gaussian import verify_split
from src.analysis.local_factors import (
    local_second_moment_J,
    rho,
    rho_tilde,
    r_unrestricted,
    singular_series,
    singular_series_J,
    stable_depth,
)
from src.analysis.representations import build_ledger, collisions
from src.contracts import validate_all_contracts
from src.data.cache import SummaryCache
from src.errors import MajorArcDenominatorError, check_budget
from src.models.arcs import ArcMode, ArcPartition
from src.models.density import SeriesVariant
from src.models.digitset import DigitSet, StringModel
from src.models.experiment import Budgets, ExperimentConfig, ExperimentResult, LabConfig, Mode
from src.models.ledger import LedgerSummary
from src.models.sieve import SieveConfig

logger = logging.getLogger(__name__)

ProgressCallback = Callable[[int, int, str], None]

MAX_COLLISION_X = 10**8

HISTOGRAM_SCHEMA = {"k": pl.Int64, "r_star": pl.Int64, "count": pl.Int64}


def fraction_text(value: Fraction) -> str:
    return f"{value.numerator}/{value.denominator}"


class Laboratory:
    """Runs experiment modes and assembles their tables."""

    def __init__(
        self,
        lab_config: Optional[LabConfig] = None,
        cache: Optional[SummaryCache] = None,
    ):
        """
        Initialize the laboratory.

        Args:
            lab_config: Budgets and defaults (config/lab.yaml)
            cache: Ledger summary cache
        """
        self.lab = lab_config or LabConfig()
        self.cache = cache

    def _budgets(self, config: ExperimentConfig) -> Budgets:
        budgets = Budgets(**vars(self.lab.budgets))
        if config.budget is not None:
            budgets.max_ledger_x = config.budget
        return budgets

    def run(
        self,
        config: ExperimentConfig,
        progress_callback: Optional[ProgressCallback] = None,
    ) -> ExperimentResult:
        """
        Run one experiment.

        Args:
            config: Experiment configuration
            progress_callback: Optional callback(step, total, message)

        Returns:
            ExperimentResult with its tables and wall time
        """
        handlers = {
            Mode.AVG_R2: self.avg_r2,
            Mode.BIAS_TABLE: self.bias_table,
            Mode.OFFDIAG: self.offdiag,
            Mode.NONZERO: self.nonzero,
            Mode.ARCS: self.arcs,
            Mode.FOURIER: self.fourier,
            Mode.SIEVE_CHECK: self.sieve_check,
            Mode.LOCALFACTORS: self.localfactors,
        }
        logger.info(f"Running {config.mode.value} for {config.digit_set()} k={config.k_values}")
        start = time.perf_counter()
        result = handlers[config.mode](config, progress_callback)
        result.wall_time = time.perf_counter() - start
        logger.info(f"Finished {config.mode.value} in {result.wall_time:.2f}s")
        return result

    def _report(self, progress_callback, step: int, total: int, message: str) -> None:
        if progress_callback:
            progress_callback(step, total, message)
        logger.info(f"[{step}/{total}] {message}")

    def ledger_summary(
        self,
        X: int,
        ds: DigitSet,
        config: ExperimentConfig,
    ) -> LedgerSummary:
        """Cached summary of the ledger up to X."""
        if config.use_cache and self.cache:
            cached = self.cache.get(X, ds.to_text())
            if cached is not None:
                return cached
        ledger = build_ledger(
            X,
            ds,
            workers=config.workers,
            chunk_size=self.lab.chunk_size,
            budgets=self._budgets(config),
        )
        summary = ledger.summary()
        if config.use_cache and self.cache:
            self.cache.set(summary)
        return summary

    def _series(self, ds: DigitSet) -> tuple[Fraction, Fraction]:
        """Closed-form series (S or S_vector) and the 2-adically exact local value."""
        variant = SeriesVariant.S if ds.t == 1 else SeriesVariant.S_VECTOR
        limit = self.lab.budgets.certify_limit
        closed = singular_series(ds, variant, limit).value
        local = singular_series(ds, SeriesVariant.S_LOCAL, limit).value
        return closed, local

    def avg_r2(self, config: ExperimentConfig, progress_callback=None) -> ExperimentResult:
        """Σ r₂ over A(g^k) against (π/4)·S·#A(X) for every k."""
        ds = config.digit_set()
        closed, local = self._series(ds)
        rows, checks = [], []
        for i, k in enumerate(config.k_values, start=1):
            X = ds.g**k
            self._report(progress_callback, i, len(config.k_values), f"ledger X={ds.g}^{k}")
            s = self.ledger_summary(X, ds, config)
            predicted = math.pi / 4 * float(closed) * s.member_count
            predicted_local = math.pi / 4 * float(local) * s.member_count
            rows.append({
                "k": k,
                "X": X,
                "member_count": s.member_count,
                "sum_r2": s.sum_r2,
                "average_r2": s.sum_r2 / s.member_count if s.member_count else 0.0,
                "predicted": predicted,
                "ratio": s.sum_r2 / predicted if predicted else math.nan,
                "ratio_local": s.sum_r2 / predicted_local if predicted_local else math.nan,
                "r1_mass": s.r1_mass,
                "sum_r_star": s.sum_r_star,
            })
            checks.append({
                "k": k,
                "bracket_lower": s.bracket_lower,
                "sum_r2": s.sum_r2,
                "bracket_upper": s.bracket_upper,
                "bracket_holds": s.bracket_holds,
                "sandwich_holds": s.sandwich_holds,
            })
        return ExperimentResult(
            config=config,
            table=pl.DataFrame(rows),
            extra_tables={"checks": pl.DataFrame(checks)},
            summary={
                "singular_series": fraction_text(closed),
                "singular_series_local": fraction_text(local),
                "stable_depth": stable_depth(ds.g),
            },
        )

    def bias_table(self, config: ExperimentConfig, progress_callback=None) -> ExperimentResult:
        """One row per forbidden digit b at X = g^k."""
        g, k = config.g, config.k_values[0]
        X = g**k
        rows = []
        series_total = Fraction(0)
        digit_sets = DigitSet.singles(g)
        for i, ds in enumerate(digit_sets, start=1):
            b = ds.single_digit
            self._report(progress_callback, i, len(digit_sets), f"ledger for b={b}")
            closed, local = self._series(ds)
            series_total += closed
            s = self.ledger_summary(X, ds, config)
            average = s.sum_r2 / s.member_count if s.member_count else 0.0
            predicted = math.pi / 4 * float(closed)
            rows.append({
                "b": b,
                "sum_r2": s.sum_r2,
                "member_count": s.member_count,
                "predicted": predicted,
                "ratio": average / predicted if predicted else math.nan,
                "singular_series": fraction_text(closed),
                "singular_series_local": fraction_text(local),
                "ratio_local": average / (math.pi / 4 * float(local)) if local else math.nan,
            })
        digit_average = series_total / len(digit_sets)
        return ExperimentResult(
            config=config,
            table=pl.DataFrame(rows),
            summary={
                "X": X,
                "digit_average": fraction_text(digit_average),
                "digit_average_is_one": digit_average == 1,
            },
        )

    def offdiag(self, config: ExperimentConfig, progress_callback=None) -> ExperimentResult:
        """Quadruple count, defect sum and Gaussian collisions."""
        ds = config.digit_set()
        budgets = self._budgets(config)
        rows, collision_rows = [], []
        for i, k in enumerate(config.k_values, start=1):
            X = ds.g**k
            self._report(progress_callback, i, len(config.k_values), f"off-diagonal X={ds.g}^{k}")
            if X <= MAX_COLLISION_X:
                ledger = build_ledger(
                    X,
                    ds,
                    workers=config.workers,
                    chunk_size=self.lab.chunk_size,
                    budgets=budgets,
                )
                s = ledger.summary()
                for quad in collisions(ledger):
                    split = quad.gaussian
                    collision_rows.append({
                        "k": k,
                        "n": quad.n,
                        "p1": quad.first.p,
                        "q1": quad.first.q,
                        "p2": quad.second.p,
                        "q2": quad.second.q,
                        "common": f"{split.common[0]}+{split.common[1]}i" if split else "",
                        "cofactor": f"{split.cofactor[0]}+{split.cofactor[1]}i" if split else "",
                        "unit": f"{split.unit[0]}+{split.unit[1]}i" if split else "",
                        "degenerate": quad.degenerate,
                        "verified": verify_split(quad),
                    })
            else:
                s = self.ledger_summary(X, ds, config)
            rows.append({
                "k": k,
                "X": X,
                "member_count": s.member_count,
                "quadruple_count": s.quadruple_count,
                "defect_sum": s.defect_sum,
                "diagonal_reps": s.diagonal_reps,
                "relation_holds": s.defect_sum - s.quadruple_count == -s.diagonal_reps,
                "quadruple_share": s.quadruple_count / s.member_count if s.member_count else 0.0,
                "loglog_shape": math.log(math.log(X)) ** 4 / math.log(X) if X > 15 else math.nan,
            })
        extra = {"collisions": pl.DataFrame(collision_rows)} if collision_rows else {}
        return ExperimentResult(config=config, table=pl.DataFrame(rows), extra_tables=extra)

    def nonzero(self, config: ExperimentConfig, progress_callback=None) -> ExperimentResult:
        """#{r★ > 0}, #{r★ > 2}, the sandwich bounds and the r★ histogram."""
        ds = config.digit_set()
        closed, _ = self._series(ds)
        rows, hist_rows = [], []
        for i, k in enumerate(config.k_values, start=1):
            X = ds.g**k
            self._report(progress_callback, i, len(config.k_values), f"nonzero count X={ds.g}^{k}")
            s = self.ledger_summary(X, ds, config)
            rows.append({
                "k": k,
                "X": X,
                "member_count": s.member_count,
                "nonzero": s.nonzero,
                "above_two": s.above_two,
                "above_two_bound": s.above_two_bound,
                "sum_r_star": s.sum_r_star,
                "sum_r_star_sq": s.sum_r_star_sq,
                "cauchy_schwarz_lower": s.cauchy_schwarz_lower,
                "sandwich_holds": s.sandwich_holds,
                "normalized": s.nonzero * math.log(X) ** 2 / s.member_count if s.member_count else 0.0,
                "predicted_constant": math.pi / 2 * float(closed),
                "tilde_nonzero": s.tilde_nonzero,
                "tilde_sum": s.tilde_sum,
                "tilde_sum_sq": s.tilde_sum_sq,
            })
            hist_rows.extend({"k": k, "r_star": r, "count": c} for r, c in sorted(s.histogram.items()))
        return ExperimentResult(
            config=config,
            table=pl.DataFrame(rows),
            extra_tables={"histogram": pl.DataFrame(hist_rows, schema=HISTOGRAM_SCHEMA)},
        )

    def arcs(self, config: ExperimentConfig, progress_callback=None) -> ExperimentResult:
        """Plancherel reconstruction split into major and minor arcs."""
        ds = config.digit_set()
        budgets = self._budgets(config)
        mode = ArcMode.from_string(str(config.params.get("arc_mode", "power-log")))
        B = float(config.params.get("B", self.lab.width_exponent))
        rows, arc_rows, bucket_rows = [], [], []
        for i, k in enumerate(config.k_values, start=1):
            X = ds.g**k
            self._report(progress_callback, i, len(config.k_values), f"Plancherel split X={ds.g}^{k}")
            partition = ArcPartition(
                X,
                mode=mode,
                width_exponent=B,
                eta_scale=self.lab.eta_scale,
                dirichlet_exponent=self.lab.dirichlet_exponent,
            )
            report = reconstruct_main_term(X, ds, partition, with_buckets=True, budgets=budgets)
            rows.append({"k": k, **report.to_dict(), "arc_count": len(report.arcs)})
            arc_rows.extend({"k": k, **arc} for arc in report.arcs)
            bucket_rows.extend({"k": k, **bucket} for bucket in report.buckets)
        extra = {"arcs": pl.DataFrame(arc_rows)}
        if bucket_rows:
            extra["buckets"] = pl.DataFrame(bucket_rows)
        return ExperimentResult(config=config, table=pl.DataFrame(rows), extra_tables=extra)

    def fourier(self, config: ExperimentConfig, progress_callback=None) -> ExperimentResult:
        """L¹ constant, α_g, rational decay and hybrid sums of the digit transform."""
        ds = config.digit_set()
        budgets = self._budgets(config)
        rows, decay_rows, hybrid_rows = [], [], []
        for i, k in enumerate(config.k_values, start=1):
            self._report(progress_callback, i, len(config.k_values), f"Fourier analysis k={k}")
            sm = StringModel(ds, k)
            report = measure_l1_constant(
                sm,
                theta_samples=self.lab.theta_samples,
                refine_points=self.lab.refine_points,
                decay_denominators=self.lab.decay_denominators,
                budgets=budgets,
            )
            rows.append({
                "k": k,
                "X": sm.X,
                "C_g_estimate": report.C_g_estimate,
                "alpha_g": report.alpha_g,
                "c_g_estimate": report.c_g_estimate,
                "theta_samples": len(report.samples),
            })
            for s in self.lab.decay_denominators:
                if s**3 >= sm.X:
                    logger.debug(f"Skipping s={s}: s^3 >= X={sm.X}")
                    continue
                try:
                    ratio, exponent = decay_at_rational(1, s, sm)
                except MajorArcDenominatorError as e:
                    logger.debug(f"Skipping s={s}: {e}")
                    continue
                decay_rows.append({"k": k, "s": s, "ratio": ratio, "exponent": exponent})
            for S in (1, 2, 4):
                if (2 * S) ** 2 * int(config.params.get("D", 4)) > sm.X:
                    break
                hybrid = measure_hybrid_sum(sm, S, int(config.params.get("D", 4)), report.C_g_estimate, budgets)
                hybrid_rows.append({"k": k, **hybrid.to_dict()})
        extra = {}
        if decay_rows:
            extra["decay"] = pl.DataFrame(decay_rows)
        if hybrid_rows:
            extra["hybrid"] = pl.DataFrame(hybrid_rows)
        return ExperimentResult(config=config, table=pl.DataFrame(rows), extra_tables=extra)

    def sieve_check(self, config: ExperimentConfig, progress_callback=None) -> ExperimentResult:
        """Upper-bound scan and ρ_quad density sums for the β-sieve."""
        params = config.params
        z = int(params.get("z", 30))
        s = int(params.get("s", 3))
        kappa = float(params.get("kappa", self.lab.kappa))
        N = int(params.get("N", 10**5))
        check_budget("sieve scan length", N, self._budgets(config).max_sieve_window)

        cfg = SieveConfig.for_level(
            z, s, kappa=kappa, excluded_modulus=int(params.get("excluded_modulus", 1))
        )
        weights = build_weights(cfg)
        self._report(progress_callback, 1, 2, f"scanning n <= {N}")
        violations, checked = scan_upper_bound(weights, N)
        support_size = sum(1 for _ in weights.support(limit=N))
        table = pl.DataFrame([{
            "z": z,
            "s": s,
            "kappa": kappa,
            "beta": cfg.beta,
            "untruncated": weights.untruncated,
            "guarantee": cfg.guarantee,
            "support_up_to_N": support_size,
            "checked": checked,
            "violations": violations,
        }])

        self._report(progress_callback, 2, 2, "density sums")
        density_rows = []
        for a, b in params.get("pairs", [(1, 2), (1, 3), (2, 3), (1, 4), (3, 5)]):
            report = weighted_density_sum(weights, "rho_quad", {"a": a, "b": b})
            density_rows.append({
                "a": a,
                "b": b,
                "value": fraction_text(report.value),
                "product_bound": fraction_text(report.product_bound),
                "value_float": float(report.value),
                "ratio": report.ratio,
                "terms": report.terms,
            })
        X_ref = float(params.get("X", 10**10))
        return ExperimentResult(
            config=config,
            table=table,
            extra_tables={"density": pl.DataFrame(density_rows)},
            summary={"envelope": sieve_envelope(X_ref, z), "envelope_X": X_ref},
        )

    def localfactors(self, config: ExperimentConfig, progress_callback=None) -> ExperimentResult:
        """Density contracts, per-digit singular series and finite-J sums."""
        g = config.g
        q_max = int(config.params.get("q_max", 60))
        self._report(progress_callback, 1, 2, f"density contracts up to q={q_max}")
        limit = self.lab.budgets.certify_limit
        results = validate_all_contracts(
            {"rho": partial(rho, certify_limit=limit), "rho_tilde": rho_tilde, "r_unrestricted": r_unrestricted},
            max_modulus=q_max,
        )
        contract_rows = [
            {"contract": name, "passed": ok, "errors": len(errors)}
            for name, (ok, errors) in sorted(results.items())
        ]

        q_table = int(config.params.get("q_table", g))
        residue_rows = [
            {"q": q, "a": a, "rho": rho(a, q, limit), "rho_tilde": rho_tilde(a, q), "r": r_unrestricted(a, q)}
            for q in range(1, q_table + 1)
            for a in range(q)
        ]

        self._report(progress_callback, 2, 2, f"singular series for g={g}")
        rows = []
        depth = stable_depth(g)
        for ds in DigitSet.singles(g):
            b = ds.single_digit
            closed = singular_series(ds, SeriesVariant.S, limit).value
            row = {
                "b": b,
                "S": fraction_text(closed),
                "S_decimal": float(closed),
                "S_tilde": fraction_text(singular_series(ds, SeriesVariant.S_TILDE, limit).value),
                "S_local": fraction_text(singular_series(ds, SeriesVariant.S_LOCAL, limit).value),
            }
            for J in (1, 2, 3):
                if g**J <= 10**4:
                    row[f"S_J{J}"] = fraction_text(singular_series_J(ds, J, limit).value)
            if g <= 64:
                row["second_moment_J1"] = fraction_text(local_second_moment_J(ds, 1))
            rows.append(row)
        if config.forbidden and len(config.forbidden) > 1:
            ds = config.digit_set()
            extra_series = {
                "S_vector": fraction_text(singular_series(ds, SeriesVariant.S_VECTOR, limit).value),
                "S_tilde_vector": fraction_text(singular_series(ds, SeriesVariant.S_TILDE, limit).value),
            }
        else:
            extra_series = {}
        return ExperimentResult(
            config=config,
            table=pl.DataFrame(rows),
            extra_tables={
                "contracts": pl.DataFrame(contract_rows),
                "residues": pl.DataFrame(residue_rows),
            },
            summary={
                "stable_depth": depth,
                "all_contracts_pass": all(ok for ok, _ in results.values()),
                **extra_series,
            },
        )
