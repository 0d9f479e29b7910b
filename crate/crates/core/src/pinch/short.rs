use super::report::{DecompositionReport, Identity};
use super::{fractional_condition, FracVariant};
use crate::arith::{ArithmeticFunction, FunctionTable, SieveFunction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::sums::{short_corr_average, ParameterTuple, ShortInterval};

fn transform_at(transform: &FunctionTable, q: u64) -> Option<&Scalar> {
    transform.get(q).filter(|v| !v.is_zero())
}

/// `Σ_{lo<q≤hi} g′(q) Σ_{a≤H} Σ_{x<n≤x+h, n≡a mod q} f(n)`.
fn class_mass(interval: &ShortInterval, transform: &FunctionTable, lo: u64, hi: u64, shifts: u64) -> Scalar {
    let mut acc = Scalar::zero();
    for q in lo + 1..=hi {
        let Some(gq) = transform_at(transform, q) else { continue };
        let inner: Scalar = (1..=shifts).map(|a| interval.class_sum(a, q)).sum();
        if !inner.is_zero() {
            acc += &(gq * &inner);
        }
    }
    acc
}

/// `Σ_{a≤H} Σ_{lo<q≤hi, q|x−a} g′(q)`, with `g′` zero past the table.
///
/// For each `q` the admissible shifts are `a ≡ x (mod q)` in `[1, H]`,
/// counted in closed form. Requires `H < x`.
pub fn shifted_divisor_mass(transform: &FunctionTable, x: u64, shifts: u64, lo: u64, hi: u64) -> Scalar {
    debug_assert!(shifts < x);
    let mut acc = Scalar::zero();
    for q in lo + 1..=hi {
        let Some(gq) = transform_at(transform, q) else { continue };
        let first = match x % q {
            0 => q,
            r => r,
        };
        if first > shifts {
            continue;
        }
        let count = (shifts - first) / q + 1;
        acc += &gq.mul_int(count as i64);
    }
    acc
}

/// `Σ_{lo<q≤hi, q|n} g′(q)`.
pub fn upper_divisor_sum(transform: &FunctionTable, n: u64, lo: u64, hi: u64) -> Scalar {
    let mut acc = Scalar::zero();
    for q in lo + 1..=hi.min(n) {
        if n % q == 0 {
            if let Some(gq) = transform_at(transform, q) {
                acc += gq;
            }
        }
    }
    acc
}

/// `H·Σ_{q≤h} g′(q)/q`.
fn harmonic_coefficient(transform: &FunctionTable, h: u64, shifts: u64) -> Scalar {
    let mut acc = Scalar::zero();
    for q in 1..=h {
        if let Some(gq) = transform_at(transform, q) {
            acc += &gq.mul_int(shifts as i64).div_int(q);
        }
    }
    acc
}

fn require_table(transform: &FunctionTable, upto: u64, what: &str) -> Result<()> {
    if transform.n_max() < upto {
        return Err(Error::Domain(format!(
            "{what} table covers [1, {}] but [1, {upto}] is required",
            transform.n_max()
        )));
    }
    Ok(())
}

/// Resolves `Q` for a sieve `g` and decides whether the tuple is admitted
/// only as a degenerate constant case.
fn sieve_range(g: &SieveFunction, t: &ParameterTuple) -> Result<(u64, bool)> {
    let q = g.range();
    if let Some(tq) = t.range {
        if tq != q {
            return Err(Error::Hypothesis(format!("Q = {tq} does not match the sieve range {q}")));
        }
    }
    if q > t.shifts {
        return Ok((q, false));
    }
    if g.is_constant() {
        Ok((q, true))
    } else {
        Err(Error::Hypothesis(format!("H < Q (H = {}, Q = {q})", t.shifts)))
    }
}

/// `Σ_{a≤H} Σ_{x<n≤x+h} f(n)g(n−a)` against
/// `(Σ_{a≤H} g(x−a))·Σ_{x<n≤x+h} f(n)`.
pub fn theorem0_decompose<F, G>(f: &F, g: &G, t: &ParameterTuple) -> Result<DecompositionReport>
where
    F: ArithmeticFunction + ?Sized,
    G: ArithmeticFunction + ?Sized,
{
    let x = t.check_short()?;
    let interval = ShortInterval::new(f, x, t.h)?;
    let lhs = short_corr_average(&interval, g, t)?;
    let mut shifted = Scalar::zero();
    for a in 1..=t.shifts {
        shifted += &g.value(x - a)?;
    }
    let main = &shifted * interval.total();
    Ok(DecompositionReport::from_terms(Identity::Theorem0, *t, lhs, vec![("product", main)]))
}

/// Moduli `h < q ≤ H`: the class sums over all `a ≤ H` against
/// `(Σ g′(q)⌊H/q⌋ + Σ_{{x/q}≤{H/q}} g′(q))·Σf`.
///
/// `g′` only needs to cover `[1, H]`; no sieve structure is used.
pub fn lemma_first_decompose<F: ArithmeticFunction + ?Sized>(
    f: &F,
    transform: &FunctionTable,
    t: &ParameterTuple,
) -> Result<DecompositionReport> {
    let x = t.check_short()?;
    require_table(transform, t.shifts, "g'")?;
    let (h, shifts) = (t.h, t.shifts);
    let interval = ShortInterval::new(f, x, h)?;
    let lhs = class_mass(&interval, transform, h, shifts, shifts);

    let mut floor_coeff = Scalar::zero();
    let mut frac_coeff = Scalar::zero();
    for q in h + 1..=shifts {
        let Some(gq) = transform_at(transform, q) else { continue };
        floor_coeff += &gq.mul_int((shifts / q) as i64);
        if fractional_condition(x, shifts, q, FracVariant::FracFrac) {
            frac_coeff += gq;
        }
    }
    let total = interval.total();
    Ok(DecompositionReport::from_terms(
        Identity::Lemma1,
        *t,
        lhs,
        vec![("floor_part", &floor_coeff * total), ("fractional_part", &frac_coeff * total)],
    ))
}

fn lemma_second_parts<F: ArithmeticFunction + ?Sized>(
    f: &F,
    transform: &FunctionTable,
    t: &ParameterTuple,
) -> Result<(u64, u64, ShortInterval, Scalar, Scalar)> {
    let x = t.check_short()?;
    let q_max = t.q()?;
    if q_max <= t.shifts {
        return Err(Error::Hypothesis(format!("H < Q (H = {}, Q = {q_max})", t.shifts)));
    }
    require_table(transform, q_max, "g'")?;
    let interval = ShortInterval::new(f, x, t.h)?;
    let lhs = class_mass(&interval, transform, t.shifts, q_max, t.shifts);
    let mut coeff = Scalar::zero();
    for q in t.shifts + 1..=q_max {
        if let Some(gq) = transform_at(transform, q) {
            if fractional_condition(x, t.shifts, q, FracVariant::FracRatio) {
                coeff += gq;
            }
        }
    }
    let main = &coeff * interval.total();
    Ok((x, q_max, interval, lhs, main))
}

/// Moduli `H < q ≤ Q` against `(Σ_{{x/q}≤H/q} g′(q))·Σf`.
pub fn lemma_second_decompose<F: ArithmeticFunction + ?Sized>(
    f: &F,
    transform: &FunctionTable,
    t: &ParameterTuple,
) -> Result<DecompositionReport> {
    let (_, _, _, lhs, main) = lemma_second_parts(f, transform, t)?;
    Ok(DecompositionReport::from_terms(Identity::Lemma2, *t, lhs, vec![("fractional_part", main)]))
}

/// Same left side as [`lemma_second_decompose`], main term
/// `(Σ_{a≤H} Σ_{H<q≤Q, q|x−a} g′(q))·Σf`.
///
/// The two main terms differ exactly on moduli dividing `x`: there
/// `{x/q} = 0 ≤ H/q` holds but no `a ∈ [1, H]` has `q | x − a`. The
/// breakdown exposes that edge.
pub fn remark4_decompose<F: ArithmeticFunction + ?Sized>(
    f: &F,
    transform: &FunctionTable,
    t: &ParameterTuple,
) -> Result<DecompositionReport> {
    let (x, q_max, interval, lhs, lemma2_main) = lemma_second_parts(f, transform, t)?;
    let total = interval.total();
    let main = &shifted_divisor_mass(transform, x, t.shifts, t.shifts, q_max) * total;
    let edge = -(&upper_divisor_sum(transform, x, t.shifts, q_max) * total);
    Ok(DecompositionReport::with_main(
        Identity::Remark4,
        *t,
        lhs,
        main,
        vec![("lemma2_main", lemma2_main), ("q_divides_x_edge", edge)],
    ))
}

/// The three main-term pieces of the sieve decomposition, already
/// multiplied by `Σ_{x<n≤x+h} f(n)`:
///
/// * `term_I   = H Σ_{q≤h} g′(q)/q`
/// * `term_II  = Σ_{h<q≤H} g′(q)⌊H/q⌋`
/// * `term_III = Σ_{h<q≤Q, {x/q}≤{H/q}} g′(q)`
pub fn theorem1_main_terms(
    g: &SieveFunction,
    x: u64,
    h: u64,
    shifts: u64,
    interval_total: &Scalar,
) -> [(&'static str, Scalar); 3] {
    let transform = g.transform();
    let q_max = g.range();
    let term_i = harmonic_coefficient(transform, h, shifts);
    let mut term_ii = Scalar::zero();
    for q in h + 1..=shifts.min(q_max) {
        if let Some(gq) = transform_at(transform, q) {
            term_ii += &gq.mul_int((shifts / q) as i64);
        }
    }
    let mut term_iii = Scalar::zero();
    for q in h + 1..=q_max {
        if let Some(gq) = transform_at(transform, q) {
            if fractional_condition(x, shifts, q, FracVariant::FracFrac) {
                term_iii += gq;
            }
        }
    }
    [
        ("term_I", &term_i * interval_total),
        ("term_II", &term_ii * interval_total),
        ("term_III", &term_iii * interval_total),
    ]
}

/// Full short average for a sieve `g` of range `Q` against the
/// three-piece main term of [`theorem1_main_terms`].
pub fn theorem1_decompose<F: ArithmeticFunction + ?Sized>(
    f: &F,
    g: &SieveFunction,
    t: &ParameterTuple,
) -> Result<DecompositionReport> {
    let x = t.check_short()?;
    let (q_max, degenerate) = sieve_range(g, t)?;
    let interval = ShortInterval::new(f, x, t.h)?;
    let window = g.window(x + 1 - t.shifts, x + t.h - 1)?;
    let lhs = short_corr_average(&interval, &window, t)?;
    let terms = theorem1_main_terms(g, x, t.h, t.shifts, interval.total());
    let tuple = t.with_range(q_max);
    let mut report = DecompositionReport::from_terms(Identity::Theorem1, tuple, lhs, terms.into());
    report.degenerate = degenerate;
    Ok(report)
}

/// The short average against the four-term right side
///
/// * `term_A = (Σ_{a≤H} g(x−a))·Σf`
/// * `term_B = (H Σ_{q≤h} g′(q)/q)·Σf`
/// * `term_C = Σ_{a≤H} Σ_{h<q≤H} g′(q) Σ_{n≡a mod q} f(n)` (kept exact)
/// * `term_D = −(Σ_{a≤H} Σ_{q≤H, q|x−a} g′(q))·Σf`
pub fn theorem2_decompose<F: ArithmeticFunction + ?Sized>(
    f: &F,
    g: &SieveFunction,
    t: &ParameterTuple,
) -> Result<DecompositionReport> {
    let x = t.check_short()?;
    let (q_max, degenerate) = sieve_range(g, t)?;
    let (h, shifts) = (t.h, t.shifts);
    let transform = g.transform();
    let interval = ShortInterval::new(f, x, h)?;
    let window = g.window(x - shifts, x + h - 1)?;
    let lhs = short_corr_average(&interval, &window, t)?;
    let total = interval.total();

    let mut shifted = Scalar::zero();
    for a in 1..=shifts {
        shifted += &window.value(x - a)?;
    }
    let upto = shifts.min(q_max);
    let term_a = &shifted * total;
    let term_b = &harmonic_coefficient(transform, h, shifts) * total;
    let term_c = class_mass(&interval, transform, h, upto, shifts);
    let term_d = -(&shifted_divisor_mass(transform, x, shifts, 0, upto) * total);
    let mut report = DecompositionReport::from_terms(
        Identity::Theorem2,
        t.with_range(q_max),
        lhs,
        vec![("term_A", term_a), ("term_B", term_b), ("term_C", term_c), ("term_D", term_d)],
    );
    report.degenerate = degenerate;
    Ok(report)
}

/// The two consequences of splitting `g′` at `h`:
///
/// 1. `Σ_{a≤H} Σ_{h<q≤H} g′(q) Σ_{n≡a mod q} f(n)` against
///    `(Σ_{a≤H} Σ_{h<q≤H, q|x−a} g′(q))·Σf`;
/// 2. `(Σ_{a≤H} Σ_{q≤h, q|x−a} g′(q))·Σf` against `(H Σ_{q≤h} g′(q)/q)·Σf`.
pub fn corollary_residuals<F: ArithmeticFunction + ?Sized>(
    f: &F,
    transform: &FunctionTable,
    t: &ParameterTuple,
) -> Result<(DecompositionReport, DecompositionReport)> {
    let x = t.check_short()?;
    require_table(transform, t.shifts, "g'")?;
    let (h, shifts) = (t.h, t.shifts);
    let interval = ShortInterval::new(f, x, h)?;
    let total = interval.total();

    let lhs1 = class_mass(&interval, transform, h, shifts, shifts);
    let main1 = &shifted_divisor_mass(transform, x, shifts, h, shifts) * total;
    let first = DecompositionReport::from_terms(Identity::Corollary1, *t, lhs1, vec![("divisor_part", main1)]);

    let lhs2 = &shifted_divisor_mass(transform, x, shifts, 0, h) * total;
    let main2 = &harmonic_coefficient(transform, h, shifts) * total;
    let second = DecompositionReport::from_terms(Identity::Corollary2, *t, lhs2, vec![("harmonic_part", main2)]);
    Ok((first, second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::arith::{Builtin, RandomFunction};
    use crate::scalar::rational;
    use crate::sums::{ap_expansion, ap_sum, interval_sum};
    use proptest::prelude::*;

    fn ones(q: u64) -> SieveFunction {
        SieveFunction::from_transform(&Builtin::One, q).unwrap()
    }

    fn random_sieve(seed: u64, q: u64) -> SieveFunction {
        SieveFunction::new(RandomFunction::new(seed, rational(1, 1)).unwrap().tabulate(q)).unwrap()
    }

    fn random_f(seed: u64) -> RandomFunction {
        RandomFunction::new(seed, rational(1, 1)).unwrap()
    }

    /// `Σ_{a≤H} Σ_{lo<q≤hi} g′(q)·ap_sum(f, x, h, a, q)` by the scanning oracle.
    fn ap_mass_oracle<F: ArithmeticFunction>(f: &F, gp: &FunctionTable, t: &ParameterTuple, lo: u64, hi: u64) -> Scalar {
        let x = t.x.unwrap();
        let mut acc = Scalar::zero();
        for a in 1..=t.shifts {
            for q in lo + 1..=hi {
                acc += &(gp.at(q) * &ap_sum(f, x, t.h, a, q).unwrap());
            }
        }
        acc
    }

    fn divisor_mass_oracle(gp: &FunctionTable, x: u64, shifts: u64, lo: u64, hi: u64) -> Scalar {
        let mut acc = Scalar::zero();
        for a in 1..=shifts {
            for q in lo + 1..=hi {
                if (x - a) % q == 0 {
                    acc += gp.get(q).cloned().unwrap_or_default();
                }
            }
        }
        acc
    }

    #[test]
    fn worked_sieve_example() {
        let t = ParameterTuple::short(30, 2, 3).with_range(5);
        let g = ones(5);
        let r = theorem1_decompose(&Builtin::One, &g, &t).unwrap();
        // lhs by the double loop over truncated divisor counts, and again
        // through the residue-class expansion.
        assert_eq!(r.lhs, Scalar::from_int(14));
        assert_eq!(ap_expansion(&Builtin::One, &g, &t).unwrap(), Scalar::from_int(14));
        // (3·(1 + 1/2) + ⌊3/3⌋ + #{q ∈ {3,4,5}: 30 mod q ≤ 3 mod q})·2
        assert_eq!(r.term("term_I"), Some(&Scalar::from_int(9)));
        assert_eq!(r.term("term_II"), Some(&Scalar::from_int(2)));
        assert_eq!(r.term("term_III"), Some(&Scalar::from_int(6)));
        assert_eq!(r.main, Scalar::from_int(17));
        assert_eq!(r.remainder, Scalar::from_int(-3));
        assert!(!r.degenerate);
    }

    #[test]
    fn theorem0_constant_g_is_exact() {
        let f = random_f(1);
        let t = ParameterTuple::short(10_000, 4, 32);
        let r = theorem0_decompose(&f, &Builtin::One, &t).unwrap();
        assert!(r.remainder.is_zero());
    }

    #[test]
    fn theorem0_single_term() {
        let (f, g) = (random_f(2), random_f(3));
        let x = 500;
        let t = ParameterTuple::short(x, 1, 1);
        let r = theorem0_decompose(&f, &g, &t).unwrap();
        let expected = &f.value(x + 1).unwrap() * &(g.value(x).unwrap() - g.value(x - 1).unwrap());
        assert_eq!(r.remainder, expected);
    }

    #[test]
    fn theorem0_random_against_oracle() {
        let (f, g) = (random_f(4), random_f(5));
        let t = ParameterTuple::short(10_000, 4, 32);
        let r = theorem0_decompose(&f, &g, &t).unwrap();
        let lhs = crate::sums::short_corr_average(&f, &g, &t).unwrap();
        let shifted: Scalar = (1..=32).map(|a| g.value(10_000 - a).unwrap()).sum();
        let main = &shifted * &interval_sum(&f, 10_000, 4).unwrap();
        assert_eq!(r.lhs, lhs);
        assert_eq!(r.remainder, lhs - main);
    }

    #[test]
    fn hypothesis_violations() {
        let f = Builtin::One;
        assert!(matches!(
            theorem0_decompose(&f, &f, &ParameterTuple::short(10, 3, 2)),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            theorem1_decompose(&f, &ones(5), &ParameterTuple::short(8, 2, 6)),
            Err(Error::Hypothesis(_))
        ));
        // H ≥ Q with a non-constant g
        assert!(matches!(
            theorem1_decompose(&f, &ones(5), &ParameterTuple::short(100, 2, 6)),
            Err(Error::Hypothesis(_))
        ));
        // Q mismatch
        assert!(matches!(
            theorem2_decompose(&f, &ones(5), &ParameterTuple::short(100, 2, 3).with_range(7)),
            Err(Error::Hypothesis(_))
        ));
        let gp = Builtin::One.tabulate(10);
        assert!(matches!(
            lemma_second_decompose(&f, &gp, &ParameterTuple::short(100, 2, 3)),
            Err(Error::Hypothesis(_))
        ));
        assert!(matches!(
            lemma_second_decompose(&f, &gp, &ParameterTuple::short(100, 2, 3).with_range(12)),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lemma_first_example() {
        let t = ParameterTuple::short(30, 2, 3);
        let gp = Builtin::One.tabulate(3);
        let r = lemma_first_decompose(&Builtin::One, &gp, &t).unwrap();
        let oracle: Scalar = (1..=3).map(|a| ap_sum(&Builtin::One, 30, 2, a, 3).unwrap()).sum();
        assert_eq!(r.lhs, oracle);
        assert_eq!(r.main, Scalar::from_int(4));
        assert_eq!(r.remainder, oracle - Scalar::from_int(4));
    }

    #[test]
    fn vanishing_transform_gives_zero() {
        let t = ParameterTuple::short(1000, 3, 10).with_range(20);
        let gp = FunctionTable::from_fn(20, |q| if q <= 3 { Scalar::one() } else { Scalar::zero() });
        let f = random_f(6);
        for r in [
            lemma_first_decompose(&f, &gp, &t).unwrap(),
            lemma_second_decompose(&f, &gp, &t).unwrap(),
        ] {
            assert!(r.lhs.is_zero() && r.main.is_zero());
        }
        let zero = FunctionTable::from_fn(20, |_| Scalar::zero());
        let (a, b) = corollary_residuals(&f, &zero, &t).unwrap();
        assert!(a.remainder.is_zero() && b.remainder.is_zero());
    }

    #[test]
    fn lemma_second_single_modulus() {
        for x in 200..260u64 {
            let (h, shifts) = (3, 10);
            let t = ParameterTuple::short(x, h, shifts).with_range(shifts + 1);
            let gp = FunctionTable::from_fn(shifts + 1, |q| {
                if q == shifts + 1 { Scalar::one() } else { Scalar::zero() }
            });
            let r = lemma_second_decompose(&Builtin::One, &gp, &t).unwrap();
            let q = shifts + 1;
            let hits = (1..=shifts)
                .map(|a| (x + 1..=x + h).filter(|n| n % q == a % q).count() as i64)
                .sum::<i64>();
            assert_eq!(r.lhs, Scalar::from_int(hits));
            let indicator = (x % q <= shifts) as i64;
            assert_eq!(r.main, Scalar::from_int(indicator * h as i64));
        }
    }

    #[test]
    fn remark4_edge_on_divisors_of_x() {
        // x = 2Q, Q = H + 2, g′ ≡ 1
        let shifts = 10;
        let q_max = shifts + 2;
        let x = 2 * q_max;
        let t = ParameterTuple::short(x, 3, shifts).with_range(q_max);
        let gp = Builtin::One.tabulate(q_max);
        let l2 = lemma_second_decompose(&Builtin::One, &gp, &t).unwrap();
        let r4 = remark4_decompose(&Builtin::One, &gp, &t).unwrap();
        let dividing = (shifts + 1..=q_max).filter(|q| x % q == 0).count() as i64;
        assert_eq!(dividing, 1);
        assert_eq!(&l2.main - &r4.main, Scalar::from_int(dividing * 3));
        assert_eq!(r4.lhs, l2.lhs);
    }

    #[test]
    fn delta_transform_exact_cases() {
        let f = random_f(9);
        let g = SieveFunction::one();
        let t = ParameterTuple::short(777, 5, 20);
        let sf = interval_sum(&f, 777, 5).unwrap();
        let r1 = theorem1_decompose(&f, &g, &t).unwrap();
        assert!(r1.degenerate);
        assert!(r1.remainder.is_zero());
        assert_eq!(r1.main, sf.mul_int(20));
        let r2 = theorem2_decompose(&f, &g, &t).unwrap();
        assert!(r2.remainder.is_zero());
        assert_eq!(r2.term("term_A"), Some(&sf.mul_int(20)));
        assert_eq!(r2.term("term_B"), Some(&sf.mul_int(20)));
        assert_eq!(r2.term("term_C"), Some(&Scalar::zero()));
        assert_eq!(r2.term("term_D"), Some(&sf.mul_int(-20)));

        let delta = Builtin::Delta.tabulate(20);
        let (_, c2) = corollary_residuals(&f, &delta, &t).unwrap();
        assert_eq!(c2.lhs, sf.mul_int(20));
        assert!(c2.remainder.is_zero());
    }

    #[test]
    fn theorem2_terms_by_direct_loops() {
        let t = ParameterTuple::short(30, 2, 3).with_range(5);
        let g = ones(5);
        let f = Builtin::One;
        let r = theorem2_decompose(&f, &g, &t).unwrap();
        let sf = Scalar::from_int(2);
        let a: Scalar = (1..=3).map(|a| g.eval(30 - a).unwrap()).sum();
        let b = Scalar::ratio(9, 2);
        let c = ap_mass_oracle(&f, g.transform(), &t, 2, 3);
        let d = divisor_mass_oracle(g.transform(), 30, 3, 0, 3);
        assert_eq!(r.term("term_A"), Some(&(&a * &sf)));
        assert_eq!(r.term("term_B"), Some(&(&b * &sf)));
        assert_eq!(r.term("term_C"), Some(&c));
        assert_eq!(r.term("term_D"), Some(&-(&d * &sf)));
        assert_eq!(r.lhs, Scalar::from_int(14));
        assert_eq!(r.remainder, Scalar::from_int(14) - (&(&a + &b) * &sf + c - &d * &sf));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(40))]

        #[test]
        fn divisor_mass_matches_double_loop(seed in any::<u64>(), x in 100u64..5000, shifts in 1u64..60, lo in 0u64..30, span in 0u64..80) {
            let gp = RandomFunction::new(seed, rational(1, 1)).unwrap().tabulate(lo + span);
            prop_assert_eq!(
                shifted_divisor_mass(&gp, x, shifts, lo, lo + span),
                divisor_mass_oracle(&gp, x, shifts, lo, lo + span)
            );
        }

        #[test]
        fn lhs_agree_with_scanning_oracle(seed in any::<u64>(), x in 200u64..20_000, h in 1u64..8, extra in 0u64..20, q_extra in 1u64..40) {
            let shifts = h + extra + 1;
            let q_max = shifts + q_extra;
            let t = ParameterTuple::short(x, h, shifts).with_range(q_max);
            let f = random_f(seed);
            let g = random_sieve(seed ^ 77, q_max);
            let gp = g.transform();
            let l1 = lemma_first_decompose(&f, gp, &t).unwrap();
            prop_assert_eq!(&l1.lhs, &ap_mass_oracle(&f, gp, &t, h, shifts));
            let l2 = lemma_second_decompose(&f, gp, &t).unwrap();
            prop_assert_eq!(&l2.lhs, &ap_mass_oracle(&f, gp, &t, shifts, q_max));
            let (c1, c2) = corollary_residuals(&f, gp, &t).unwrap();
            prop_assert_eq!(&c1.lhs, &l1.lhs);
            let sf = interval_sum(&f, x, h).unwrap();
            prop_assert_eq!(c2.lhs, &divisor_mass_oracle(gp, x, shifts, 0, h) * &sf);
        }

        #[test]
        fn theorem1_composes_from_lemmas(seed in any::<u64>(), x in 200u64..50_000, h in 1u64..8, extra in 0u64..20, q_extra in 1u64..40) {
            let shifts = h + extra;
            let q_max = shifts + q_extra;
            let t = ParameterTuple::short(x, h, shifts).with_range(q_max);
            let f = random_f(seed);
            let g = random_sieve(seed.wrapping_add(1), q_max);
            let r1 = theorem1_decompose(&f, &g, &t).unwrap();
            let l1 = lemma_first_decompose(&f, g.transform(), &t).unwrap();
            let l2 = lemma_second_decompose(&f, g.transform(), &t).unwrap();
            let first = r1.term("term_I").unwrap();
            prop_assert_eq!(&r1.main, &(first + &(&l1.main + &l2.main)));
            prop_assert_eq!(&r1.lhs, &ap_expansion(&f, &g, &t).unwrap());
            prop_assert!(r1.is_exact() && r1.breakdown_consistent());
        }

        #[test]
        fn remark4_difference_is_divisor_edge(seed in any::<u64>(), k in 2u64..400, h in 1u64..6, extra in 0u64..10, q_extra in 1u64..30) {
            let shifts = h + extra;
            let q_max = shifts + q_extra;
            // multiples of lcm-ish numbers make q | x common
            let x = k * q_max;
            prop_assume!(shifts + h < x);
            let t = ParameterTuple::short(x, h, shifts).with_range(q_max);
            let f = random_f(seed);
            let gp = RandomFunction::new(seed ^ 5, rational(1, 1)).unwrap().tabulate(q_max);
            let l2 = lemma_second_decompose(&f, &gp, &t).unwrap();
            let r4 = remark4_decompose(&f, &gp, &t).unwrap();
            let edge: Scalar = (shifts + 1..=q_max).filter(|q| x % q == 0).map(|q| gp.at(q).clone()).sum();
            prop_assert_eq!(&l2.main - &r4.main, &edge * &interval_sum(&f, x, h).unwrap());
            prop_assert_eq!(l2.lhs, r4.lhs);
        }

        #[test]
        fn telescoping(seed in any::<u64>(), x in 100u64..100_000, shifts in 1u64..50, q_extra in 1u64..60) {
            let q_max = shifts + q_extra;
            prop_assume!(shifts < x);
            let g = random_sieve(seed, q_max);
            for a in 1..=shifts {
                let n = x - a;
                let upper = upper_divisor_sum(g.transform(), n, shifts, q_max);
                let lower = upper_divisor_sum(g.transform(), n, 0, shifts);
                prop_assert_eq!(upper, g.eval(n).unwrap() - lower);
            }
        }
    }
}
