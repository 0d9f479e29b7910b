use super::report::{DecompositionReport, Identity};
use crate::arith::{FunctionWindow, SieveFunction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sums::{long_corr_average, ParameterTuple};

/// How `g(n − a)` is replaced on the right side.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Theorem3Form {
    /// `g(h⌊n/h⌋ − a)`
    Floor,
    /// `(1/h) Σ_{m≤h} g(m⌊n/m⌋ − a)`
    Averaged,
}

impl Theorem3Form {
    pub fn identity(self) -> Identity {
        match self {
            Theorem3Form::Floor => Identity::Theorem3a,
            Theorem3Form::Averaged => Identity::Theorem3b,
        }
    }

    pub fn from_identity(id: Identity) -> Option<Self> {
        match id {
            Identity::Theorem3a => Some(Theorem3Form::Floor),
            Identity::Theorem3b => Some(Theorem3Form::Averaged),
            _ => None,
        }
    }
}

/// `N^ε·H·(Nh/H + N/h + h)`.
pub fn theorem3_envelope(big_n: u64, shifts: u64, h: u64, epsilon: f64) -> f64 {
    let (n, hh, h) = (big_n as f64, shifts as f64, h as f64);
    n.powf(epsilon) * hh * (n * h / hh + n / h + h)
}

/// Prefix sums of `g` over a window, answering `S(k) = Σ_{a≤H} g(k − a)`.
struct ShiftSums {
    start: u64,
    shifts: u64,
    prefix: Vec<Scalar>,
}

impl ShiftSums {
    fn new(window: &FunctionWindow, shifts: u64) -> Self {
        let mut prefix = Vec::with_capacity(window.values().len() + 1);
        let mut acc = Scalar::zero();
        prefix.push(acc.clone());
        for v in window.values() {
            acc += v;
            prefix.push(acc.clone());
        }
        Self { start: window.start(), shifts, prefix }
    }

    /// Needs `k − H ≥ start` and `k − 1` inside the window.
    fn at(&self, k: u64) -> Scalar {
        let hi = (k - self.start) as usize;
        let lo = (k - self.shifts - self.start) as usize;
        &self.prefix[hi] - &self.prefix[lo]
    }
}

/// Long correlation average `Σ_{a≤H} Σ_{N<n≤2N} f(n)g(n−a)` against the
/// same sum with `n` inside `g` rounded down to a multiple of `h` (or
/// averaged over all roundings `m ≤ h`).
///
/// `f` and `g` are sieve functions of ranges `D` and `Q`. The report carries
/// the error envelope at `epsilon`.
pub fn theorem3_decompose(
    f: &SieveFunction,
    g: &SieveFunction,
    t: &ParameterTuple,
    form: Theorem3Form,
    epsilon: f64,
) -> Result<DecompositionReport> {
    let big_n = t.big_n()?;
    let (h, shifts) = (t.h, t.shifts);
    if h == 0 || shifts == 0 {
        return Err(Error::Hypothesis("h >= 1 and H >= 1".into()));
    }
    if shifts + h >= big_n {
        return Err(Error::Hypothesis(format!("H + h < N (H = {shifts}, h = {h}, N = {big_n})")));
    }
    let q_max = g.range();
    if let Some(tq) = t.range {
        if tq != q_max {
            return Err(Error::Hypothesis(format!("Q = {tq} does not match the sieve range {q_max}")));
        }
    }
    let degenerate = q_max <= shifts;
    if degenerate && !g.is_constant() {
        return Err(Error::Hypothesis(format!("H < Q (H = {shifts}, Q = {q_max})")));
    }
    if !(epsilon > 0.0) {
        return Err(Error::Domain(format!("epsilon must be positive, got {epsilon}")));
    }

    let f_window = f.window(big_n + 1, 2 * big_n)?;
    // smallest argument: m⌊n/m⌋ − a ≥ (N + 2 − h) − H
    let g_window = g.window(big_n + 2 - h - shifts, 2 * big_n - 1)?;
    let lhs = long_corr_average(&f_window, &g_window, big_n, shifts)?;

    let sums = ShiftSums::new(&g_window, shifts);
    let mut rhs = Scalar::zero();
    for (i, fv) in f_window.values().iter().enumerate() {
        if fv.is_zero() {
            continue;
        }
        let n = big_n + 1 + i as u64;
        let inner = match form {
            Theorem3Form::Floor => sums.at(h * (n / h)),
            Theorem3Form::Averaged => (1..=h).map(|m| sums.at(m * (n / m))).sum(),
        };
        rhs += &(fv * &inner);
    }
    if form == Theorem3Form::Averaged {
        rhs = rhs.div_int(h);
    }

    let tuple = t.with_range(q_max);
    let mut report = DecompositionReport::from_terms(form.identity(), tuple, lhs, vec![("rhs", rhs)]);
    report.degenerate = degenerate;
    report.envelope = Some(theorem3_envelope(big_n, shifts, h, epsilon));
    Ok(report)
}
