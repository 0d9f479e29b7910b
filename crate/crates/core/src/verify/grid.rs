use std::collections::{BTreeMap, BTreeSet};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::arith::{FunctionSpec, FunctionTable, SieveFunction};
use crate::error::{Error, Result};
use crate::pinch::{
    corollary_residuals, lemma_first_decompose, lemma_second_decompose, remark4_decompose,
    theorem0_decompose, theorem1_decompose, theorem2_decompose, theorem3_decompose,
    theorem3_envelope, DecompositionReport, Identity, Theorem3Form,
};
use crate::sums::ParameterTuple;

fn default_epsilon() -> f64 {
    0.1
}

fn default_c() -> f64 {
    1.0
}

fn default_slack() -> f64 {
    2.0
}

/// A grid of parameter tuples and the functions to run them on.
///
/// `g_transform` is `g′`; each tuple's `g` is its restriction to `[1, Q]`.
/// For the long identities `f` is read as `f′` too, restricted to
/// `[1, f_range]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub identities: Vec<Identity>,
    pub f: FunctionSpec,
    pub g_transform: FunctionSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub f_range: Option<u64>,
    #[serde(default)]
    pub x: Vec<u64>,
    pub h: Vec<u64>,
    #[serde(rename = "H")]
    pub shifts: Vec<u64>,
    #[serde(rename = "Q", default)]
    pub ranges: Vec<u64>,
    /// Adds `Q = k·H` for every `H` in the grid.
    #[serde(rename = "Q_multiple", default, skip_serializing_if = "Option::is_none")]
    pub range_multiple: Option<u64>,
    #[serde(rename = "N", default)]
    pub big_n: Vec<u64>,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    /// Surrogate constant in `Q ≤ c·x`.
    #[serde(default = "default_c")]
    pub c: f64,
    /// Added to every random seed in `f` and `g_transform`.
    #[serde(default)]
    pub seed: u64,
    /// Allowed growth of the fitted constant from one scale to the next.
    #[serde(default = "default_slack")]
    pub slack: f64,
}

/// A grid point that was not evaluated, with the reason.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SkippedTuple {
    pub identity: Identity,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tuple: Option<ParameterTuple>,
    pub reason: String,
}

impl GridConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: Self = serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if self.identities.is_empty() {
            return Err(Error::Parse("grid lists no identities".into()));
        }
        if !(self.epsilon > 0.0 && self.epsilon.is_finite()) {
            return Err(Error::Parse(format!("epsilon must be positive, got {}", self.epsilon)));
        }
        if !(self.c > 0.0 && self.c.is_finite()) {
            return Err(Error::Parse(format!("c must be positive, got {}", self.c)));
        }
        if !(self.slack >= 1.0) {
            return Err(Error::Parse(format!("slack must be at least 1, got {}", self.slack)));
        }
        if self.range_multiple == Some(0) || self.f_range == Some(0) {
            return Err(Error::Parse("Q_multiple and f_range must be positive".into()));
        }
        self.f.validate()?;
        self.g_transform.validate()
    }

    fn ranges_for(&self, shifts: u64) -> Vec<u64> {
        let mut out: BTreeSet<u64> = self.ranges.iter().copied().collect();
        if let Some(k) = self.range_multiple {
            out.insert(k * shifts);
        }
        out.into_iter().collect()
    }

    /// All induced tuples in report order, minus those failing the scale
    /// surrogates `Q ≤ c·x` (and `Q, D ≤ c·N`).
    pub fn tuples(&self) -> (Vec<(Identity, ParameterTuple)>, Vec<SkippedTuple>) {
        let identities: BTreeSet<Identity> = self.identities.iter().copied().collect();
        let mut keep = BTreeSet::new();
        let mut skipped = Vec::new();
        for &id in &identities {
            let scales = if id.is_long() { &self.big_n } else { &self.x };
            if scales.is_empty() {
                let what = if id.is_long() { "N" } else { "x" };
                skipped.push(SkippedTuple { identity: id, tuple: None, reason: format!("no {what} values") });
                continue;
            }
            for &scale in scales {
                for &h in &self.h {
                    for &shifts in &self.shifts {
                        let base = if id.is_long() {
                            ParameterTuple::long(scale, shifts, h)
                        } else {
                            ParameterTuple::short(scale, h, shifts)
                        };
                        if !id.uses_range() {
                            keep.insert((id, base));
                            continue;
                        }
                        let ranges = self.ranges_for(shifts);
                        if ranges.is_empty() {
                            skipped.push(SkippedTuple { identity: id, tuple: Some(base), reason: "no Q values".into() });
                        }
                        for q in ranges {
                            let t = base.with_range(q);
                            match self.scale_check(id, &t) {
                                Ok(()) => {
                                    keep.insert((id, t));
                                }
                                Err(e) => skipped.push(SkippedTuple { identity: id, tuple: Some(t), reason: e.to_string() }),
                            }
                        }
                    }
                }
            }
        }
        skipped.sort_by_key(|s| (s.identity, s.tuple));
        (keep.into_iter().collect(), skipped)
    }

    fn scale_check(&self, id: Identity, t: &ParameterTuple) -> Result<()> {
        let q = t.q()?;
        if id.is_long() {
            let n = t.big_n()?;
            ParameterTuple::check_scale(q, n, self.c, "Q")?;
            if let Some(d) = self.f_range {
                ParameterTuple::check_scale(d, n, self.c, "D")?;
            }
            Ok(())
        } else {
            ParameterTuple::check_scale(q, t.x()?, self.c, "Q")
        }
    }
}

/// The functions one identity is evaluated on.
pub struct Operands<'a> {
    pub f: &'a FunctionSpec,
    /// `g` as a sieve function; only its transform is used by the lemma and
    /// corollary forms.
    pub g: &'a SieveFunction,
    /// `f` as a sieve function, for the long identities.
    pub f_sieve: Option<&'a SieveFunction>,
}

fn padded_transform(g: &SieveFunction, n_max: u64) -> FunctionTable {
    FunctionTable::from_fn(n_max, |q| g.transform_at(q))
}

fn resolve_range(t: &ParameterTuple, g: &SieveFunction) -> Result<ParameterTuple> {
    match t.range {
        Some(q) if q != g.range() => {
            Err(Error::Hypothesis(format!("Q = {q} does not match the sieve range {}", g.range())))
        }
        _ => Ok(t.with_range(g.range())),
    }
}

/// Dispatches one identity at one tuple.
pub fn evaluate(
    identity: Identity,
    ops: &Operands<'_>,
    t: &ParameterTuple,
    epsilon: f64,
) -> Result<DecompositionReport> {
    let f = ops.f;
    match identity {
        Identity::Theorem0 => {
            let t = resolve_range(t, ops.g)?;
            let x = t.check_short()?;
            let window = ops.g.window(x - t.shifts, x + t.h - 1)?;
            theorem0_decompose(f, &window, &t)
        }
        Identity::Lemma1 => lemma_first_decompose(f, &padded_transform(ops.g, t.shifts), t),
        Identity::Lemma2 => lemma_second_decompose(f, ops.g.transform(), &resolve_range(t, ops.g)?),
        Identity::Remark4 => remark4_decompose(f, ops.g.transform(), &resolve_range(t, ops.g)?),
        Identity::Theorem1 => theorem1_decompose(f, ops.g, t),
        Identity::Theorem2 => theorem2_decompose(f, ops.g, t),
        Identity::Corollary1 | Identity::Corollary2 => {
            let (first, second) = corollary_residuals(f, &padded_transform(ops.g, t.shifts), t)?;
            Ok(if identity == Identity::Corollary1 { first } else { second })
        }
        Identity::Theorem3a | Identity::Theorem3b => {
            let fs = ops
                .f_sieve
                .ok_or_else(|| Error::Hypothesis("f must be a sieve function of range D".into()))?;
            let form = Theorem3Form::from_identity(identity).expect("long identity");
            theorem3_decompose(fs, ops.g, t, form, epsilon)
        }
    }
}

/// `|remainder| / (x^ε h²)`, or `|remainder| / E` for the long identities.
/// Requires `epsilon > 0` and `h ≥ 1`.
pub fn normalized_remainder(report: &DecompositionReport, epsilon: f64) -> f64 {
    debug_assert!(epsilon > 0.0 && report.tuple.h >= 1);
    let r = report.remainder.abs_f64();
    if r == 0.0 {
        return 0.0;
    }
    let t = &report.tuple;
    let scale = if report.identity.is_long() {
        theorem3_envelope(t.n.expect("long report carries N"), t.shifts, t.h, epsilon)
    } else {
        (t.x.expect("short report carries x") as f64).powf(epsilon) * (t.h as f64).powi(2)
    };
    r / scale
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridRow {
    pub report: DecompositionReport,
    pub normalized_remainder: f64,
    /// `|main| / |remainder|`; absent when the remainder vanishes.
    pub main_to_remainder: Option<f64>,
}

impl GridRow {
    pub fn new(report: DecompositionReport, epsilon: f64) -> Self {
        let normalized_remainder = normalized_remainder(&report, epsilon);
        let ratio = report.main_to_remainder();
        Self { report, normalized_remainder, main_to_remainder: ratio.is_finite().then_some(ratio) }
    }
}

/// Largest normalized remainder over the rows at one `x` (or `N`).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScaleConstant {
    pub scale: u64,
    pub constant: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentitySummary {
    pub identity: Identity,
    pub rows: usize,
    /// `C_ε`: the maximum normalized remainder.
    pub constant: f64,
    pub argmax: ParameterTuple,
    pub by_scale: Vec<ScaleConstant>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthViolation {
    pub identity: Identity,
    pub from_scale: u64,
    pub to_scale: u64,
    pub from: f64,
    pub to: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridReport {
    pub epsilon: f64,
    pub slack: f64,
    pub rows: Vec<GridRow>,
    pub skipped: Vec<SkippedTuple>,
    pub summary: Vec<IdentitySummary>,
    pub growth_violations: Vec<GrowthViolation>,
}

/// Everything in a [`GridReport`] except the rows.
#[derive(Serialize)]
struct SummaryView<'a> {
    epsilon: f64,
    slack: f64,
    summary: &'a [IdentitySummary],
    growth_violations: &'a [GrowthViolation],
    skipped: &'a [SkippedTuple],
}

impl GridReport {
    /// The summary recomputed from the rows matches the stored one, and so
    /// does every row's normalization.
    pub fn summary_consistent(&self) -> bool {
        self.rows
            .iter()
            .all(|r| r.normalized_remainder == normalized_remainder(&r.report, self.epsilon))
            && summarize(&self.rows) == self.summary
            && growth_violations(&self.summary, self.slack) == self.growth_violations
    }

    pub fn summary_json(&self) -> String {
        let view = SummaryView {
            epsilon: self.epsilon,
            slack: self.slack,
            summary: &self.summary,
            growth_violations: &self.growth_violations,
            skipped: &self.skipped,
        };
        serde_json::to_string_pretty(&view).expect("summaries always serialize")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("reports always serialize")
    }
}

/// Per-identity constants from the stored normalized remainders. Rows must
/// already be in report order.
pub fn summarize(rows: &[GridRow]) -> Vec<IdentitySummary> {
    let mut out: Vec<IdentitySummary> = Vec::new();
    for row in rows {
        let r = &row.report;
        let scale = if r.identity.is_long() { r.tuple.n } else { r.tuple.x }.unwrap_or(0);
        let v = row.normalized_remainder;
        let entry = match out.last_mut() {
            Some(s) if s.identity == r.identity => s,
            _ => {
                out.push(IdentitySummary {
                    identity: r.identity,
                    rows: 0,
                    constant: v,
                    argmax: r.tuple,
                    by_scale: Vec::new(),
                });
                out.last_mut().unwrap()
            }
        };
        entry.rows += 1;
        if v > entry.constant {
            entry.constant = v;
            entry.argmax = r.tuple;
        }
        match entry.by_scale.iter_mut().find(|s| s.scale == scale) {
            Some(s) => s.constant = s.constant.max(v),
            None => entry.by_scale.push(ScaleConstant { scale, constant: v }),
        }
    }
    for s in &mut out {
        s.by_scale.sort_by_key(|c| c.scale);
    }
    out
}

/// `C_ε` per identity, recomputed at `epsilon`.
pub fn fit_constant(report: &GridReport, epsilon: f64) -> Result<BTreeMap<Identity, f64>> {
    if report.rows.is_empty() {
        return Err(Error::EmptyGrid);
    }
    let mut out = BTreeMap::new();
    for row in &report.rows {
        let v = normalized_remainder(&row.report, epsilon);
        let c = out.entry(row.report.identity).or_insert(0.0f64);
        *c = c.max(v);
    }
    Ok(out)
}

/// Consecutive scales where the constant grows by more than `slack`.
pub fn growth_violations(summary: &[IdentitySummary], slack: f64) -> Vec<GrowthViolation> {
    let mut out = Vec::new();
    for s in summary {
        for pair in s.by_scale.windows(2) {
            if pair[1].constant > slack * pair[0].constant {
                out.push(GrowthViolation {
                    identity: s.identity,
                    from_scale: pair[0].scale,
                    to_scale: pair[1].scale,
                    from: pair[0].constant,
                    to: pair[1].constant,
                });
            }
        }
    }
    out
}

fn is_skip(e: &Error) -> bool {
    matches!(e, Error::Hypothesis(_) | Error::Precondition(_))
}

/// Evaluates every tuple of the grid, on at most `threads` workers.
///
/// Tuples violating a hypothesis are listed in `skipped`; any other failure
/// aborts the run.
pub fn run_grid(config: &GridConfig, threads: Option<usize>) -> Result<GridReport> {
    config.validate()?;
    let f = config.f.with_seed_offset(config.seed);
    let g_transform = config.g_transform.with_seed_offset(config.seed);
    let (mut tuples, mut skipped) = config.tuples();

    if tuples.iter().any(|(id, _)| id.is_long()) && config.f_range.is_none() {
        tuples.retain(|(id, t)| {
            if id.is_long() {
                skipped.push(SkippedTuple { identity: *id, tuple: Some(*t), reason: "f_range (D) is required".into() });
            }
            !id.is_long()
        });
    }
    let table_len = tuples.iter().map(|(_, t)| t.range.unwrap_or(0).max(t.shifts)).max().unwrap_or(0);
    let transform = g_transform.tabulate(table_len)?;
    let f_sieve = match config.f_range {
        Some(d) if tuples.iter().any(|(id, _)| id.is_long()) => Some(SieveFunction::from_transform(&f, d)?),
        _ => None,
    };

    let eval = |(id, t): &(Identity, ParameterTuple)| -> Result<DecompositionReport> {
        let g = SieveFunction::new(transform.truncated(t.range.unwrap_or(t.shifts))?)?;
        let ops = Operands { f: &f, g: &g, f_sieve: f_sieve.as_ref() };
        evaluate(*id, &ops, t, config.epsilon)
    };
    let pool = {
        let mut b = rayon::ThreadPoolBuilder::new();
        if let Some(n) = threads {
            b = b.num_threads(n);
        }
        b.build().map_err(|e| Error::Io(e.to_string()))?
    };
    let results: Vec<Result<DecompositionReport>> = pool.install(|| tuples.par_iter().map(eval).collect());

    let mut rows = Vec::with_capacity(results.len());
    for ((id, t), res) in tuples.iter().zip(results) {
        match res {
            Ok(report) => rows.push(GridRow::new(report, config.epsilon)),
            Err(e) if is_skip(&e) => {
                skipped.push(SkippedTuple { identity: *id, tuple: Some(*t), reason: e.to_string() })
            }
            Err(e) => return Err(e),
        }
    }
    if rows.is_empty() {
        return Err(Error::EmptyGrid);
    }
    skipped.sort_by_key(|s| (s.identity, s.tuple));
    let summary = summarize(&rows);
    let growth = growth_violations(&summary, config.slack);
    Ok(GridReport {
        epsilon: config.epsilon,
        slack: config.slack,
        rows,
        skipped,
        summary,
        growth_violations: growth,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::Builtin;
    use crate::scalar::{rational, Scalar};

    fn config(identities: &[Identity]) -> GridConfig {
        GridConfig {
            identities: identities.to_vec(),
            f: FunctionSpec::random(11, rational(1, 1)),
            g_transform: FunctionSpec::random(12, rational(1, 1)),
            f_range: None,
            x: vec![500, 5000],
            h: vec![2, 3],
            shifts: vec![8, 16],
            ranges: vec![],
            range_multiple: Some(2),
            big_n: vec![],
            epsilon: 0.1,
            c: 1.0,
            seed: 0,
            slack: 2.0,
        }
    }

    #[test]
    fn single_theorem0_tuple_with_constant_g() {
        let cfg = GridConfig {
            g_transform: FunctionSpec::builtin(Builtin::Delta),
            x: vec![100],
            h: vec![2],
            shifts: vec![5],
            ranges: vec![1],
            range_multiple: None,
            ..config(&[Identity::Theorem0])
        };
        let report = run_grid(&cfg, Some(1)).unwrap();
        assert_eq!(report.rows.len(), 1);
        assert!(report.rows[0].report.remainder.is_zero());
        assert_eq!(report.rows[0].normalized_remainder, 0.0);
        assert_eq!(report.summary[0].constant, 0.0);
    }

    #[test]
    fn rows_are_ordered_and_deterministic() {
        let cfg = config(&[Identity::Theorem2, Identity::Lemma1, Identity::Theorem0]);
        let a = run_grid(&cfg, Some(1)).unwrap();
        let b = run_grid(&cfg, Some(4)).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.to_json(), b.to_json());
        let keys: Vec<_> = a.rows.iter().map(|r| (r.report.identity, r.report.tuple)).collect();
        let mut sorted = keys.clone();
        sorted.sort();
        assert_eq!(keys, sorted);
        assert_eq!(a.rows.len(), 3 * 2 * 2 * 2);
        assert!(a.summary_consistent());
        assert!(a.rows.iter().all(|r| r.report.is_exact()));
    }

    #[test]
    fn invalid_tuples_are_listed() {
        let cfg = GridConfig { x: vec![20, 500], c: 0.5, ..config(&[Identity::Theorem1]) };
        let report = run_grid(&cfg, None).unwrap();
        // x = 20: Q = 2H exceeds c·x = 10 for both H
        assert!(report.skipped.iter().all(|s| s.tuple.unwrap().x == Some(20)));
        assert_eq!(report.skipped.len(), 4);
        assert!(report.skipped[0].reason.contains("Q <= c*x"));
        assert_eq!(report.rows.len(), 4);
    }

    #[test]
    fn empty_grid_is_an_error() {
        let cfg = GridConfig { x: vec![10], ..config(&[Identity::Theorem1]) };
        assert_eq!(run_grid(&cfg, None), Err(Error::EmptyGrid));
    }

    #[test]
    fn long_identities_need_f_range() {
        let cfg = GridConfig {
            big_n: vec![200],
            h: vec![4],
            shifts: vec![10],
            ..config(&[Identity::Theorem3a, Identity::Theorem0])
        };
        let report = run_grid(&cfg, None).unwrap();
        assert!(report.skipped.iter().any(|s| s.identity == Identity::Theorem3a && s.reason.contains("f_range")));
        let with_d = GridConfig { f_range: Some(20), ..cfg };
        let report = run_grid(&with_d, None).unwrap();
        let long: Vec<_> = report.rows.iter().filter(|r| r.report.identity.is_long()).collect();
        assert_eq!(long.len(), 1);
        assert!(long[0].normalized_remainder <= 1.0);
    }

    #[test]
    fn stored_example_normalization() {
        // lhs 14, main 17 at x = 30, h = 2
        let t = ParameterTuple::short(30, 2, 3).with_range(5);
        let g = SieveFunction::from_transform(&Builtin::One, 5).unwrap();
        let ops = Operands { f: &FunctionSpec::builtin(Builtin::One), g: &g, f_sieve: None };
        let report = evaluate(Identity::Theorem1, &ops, &t, 0.1).unwrap();
        assert_eq!(report.remainder, Scalar::from_int(-3));
        let v = normalized_remainder(&report, 0.1);
        assert!((v - 3.0 / (30f64.powf(0.1) * 4.0)).abs() < 1e-12);
        assert!((v - 0.534).abs() < 5e-4);
        // |remainder| = h² and ε → 0
        let small = normalized_remainder(&DecompositionReport { remainder: Scalar::from_int(4), ..report }, 1e-9);
        assert!((small - 1.0).abs() < 1e-6);
    }

    #[test]
    fn fit_constant_takes_the_max() {
        let report = run_grid(&config(&[Identity::Lemma2, Identity::Remark4]), None).unwrap();
        let fitted = fit_constant(&report, report.epsilon).unwrap();
        for s in &report.summary {
            assert_eq!(fitted[&s.identity], s.constant);
            assert_eq!(s.by_scale.len(), 2);
        }
        let single = GridReport { rows: report.rows[..1].to_vec(), ..report.clone() };
        assert_eq!(fit_constant(&single, 0.1).unwrap()[&Identity::Lemma2], single.rows[0].normalized_remainder);
        let empty = GridReport { rows: vec![], ..report };
        assert_eq!(fit_constant(&empty, 0.1), Err(Error::EmptyGrid));
    }

    #[test]
    fn growth_from_zero_is_a_violation() {
        let s = IdentitySummary {
            identity: Identity::Theorem0,
            rows: 2,
            constant: 1.0,
            argmax: ParameterTuple::short(100, 1, 2),
            by_scale: vec![ScaleConstant { scale: 10, constant: 0.0 }, ScaleConstant { scale: 100, constant: 1.0 }],
        };
        assert_eq!(growth_violations(std::slice::from_ref(&s), 2.0).len(), 1);
        let flat = IdentitySummary {
            by_scale: vec![ScaleConstant { scale: 10, constant: 1.0 }, ScaleConstant { scale: 100, constant: 2.0 }],
            ..s
        };
        assert!(growth_violations(&[flat], 2.0).is_empty());
    }

    #[test]
    fn config_json_defaults() {
        let cfg = GridConfig::from_json(
            r#"{"identities":["theorem1"],"f":{"kind":"builtin","name":"one"},
                "g_transform":{"kind":"builtin","name":"one"},"x":[30],"h":[2],"H":[3],"Q":[5]}"#,
        )
        .unwrap();
        assert_eq!((cfg.epsilon, cfg.c, cfg.seed, cfg.slack), (0.1, 1.0, 0, 2.0));
        let report = run_grid(&cfg, None).unwrap();
        assert_eq!(report.rows[0].report.lhs, Scalar::from_int(14));
        assert!(GridConfig::from_json(r#"{"identities":[]}"#).is_err());
        assert!(GridConfig::from_json(
            r#"{"identities":["theorem1"],"f":{"kind":"builtin","name":"one"},
                "g_transform":{"kind":"builtin","name":"one"},"h":[2],"H":[3],"bogus":1}"#
        )
        .is_err());
    }
}
