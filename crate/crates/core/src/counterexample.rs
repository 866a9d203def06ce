//! A driving path with two distinct solutions when `R = [[1, a1], [1, 1]]`
//! and `a1 < -1`.
//!
//! The path `u` spirals outward from the origin through the breakpoints
//! `t_n = 2^-n`, alternating between the lines `u1 + u2 = 0` and
//! `u1 + a1 u2 = 0`. Writing `u = m - mbar` with `m`, `mbar`
//! nondecreasing, the common driving path `f = -(Rm ∧ R mbar)` admits both
//! `(g, m)` and `(gbar, mbar)` as solutions, where `g = (Ru)^+` and
//! `gbar = (Ru)^-`.
//!
//! Breakpoints accumulate at `t = 0`, so only `[t_depth, 1]` is
//! represented. At `t_depth` the regulators start from the variation the
//! infinite spiral accumulates on `(0, t_depth]`, which keeps `m - mbar = u`
//! and with it complementarity on the represented range. Everything omitted
//! is bounded by [`CounterexampleBundle::tail_bound`].

use crate::classify::ReflectionMatrix2;
use crate::dyadic::Dyadic;
use crate::error::{Error, Result};
use crate::path::{jordan_decompose, MonotoneDecomp, PLPath2, Vec2};
use crate::scalar::{Mode, Real, Scalar, FLOAT_EPS};
use crate::verifier::{verify, SolutionTriple, VerificationReport, VerifyOptions};

pub const DEFAULT_DEPTH: usize = 40;

#[derive(Debug, Clone, PartialEq)]
pub struct CounterexampleBundle<T> {
    pub r: ReflectionMatrix2<T>,
    pub u: PLPath2<T>,
    pub decomp: MonotoneDecomp<T>,
    pub f: PLPath2<T>,
    pub g: PLPath2<T>,
    pub gbar: PLPath2<T>,
    /// Index of the earliest breakpoint; the represented range is
    /// `[2^-depth, 1]`.
    pub depth: usize,
    /// Bound on `|u|`, `|m|`, `|mbar|`, `|f|`, `|g|` and `|gbar|` over the
    /// omitted interval `[0, 2^-depth]`.
    pub tail_bound: T,
}

impl<T: Real> CounterexampleBundle<T> {
    pub fn triple(&self) -> SolutionTriple<T> {
        SolutionTriple {
            r: self.r.clone(),
            f: self.f.clone(),
            g: self.g.clone(),
            m: self.decomp.m.clone(),
            tail_bound: Some(self.tail_bound.clone()),
        }
    }

    pub fn triple_bar(&self) -> SolutionTriple<T> {
        SolutionTriple {
            r: self.r.clone(),
            f: self.f.clone(),
            g: self.gbar.clone(),
            m: self.decomp.mbar.clone(),
            tail_bound: Some(self.tail_bound.clone()),
        }
    }

    /// `sup |g - gbar|` over breakpoints.
    pub fn gap(&self) -> Result<T> {
        Ok(self.g.sub(&self.gbar)?.sup_norm())
    }
}

fn powers<T: Real>(a1: &T, n: usize) -> Result<Vec<T>> {
    let rho = T::one().div_or(&a1.abs(), "1/|a1|")?;
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::one());
    for j in 1..=n {
        out.push(out[j - 1].clone() * rho.clone());
    }
    Ok(out)
}

fn check_args<T: Real>(a1: &T, depth: usize) -> Result<()> {
    if !(*a1 < -T::one()) {
        return Err(Error::ConstructionInvalid(format!(
            "a1 must be below -1, got {}",
            a1.to_f64()
        )));
    }
    if depth < 4 || !depth.is_multiple_of(4) {
        return Err(Error::ConstructionInvalid(format!(
            "depth must be a positive multiple of 4, got {depth}"
        )));
    }
    Ok(())
}

fn near_zero<T: Real>(x: &T, scale: &T) -> bool {
    match T::MODE {
        Mode::Exact => x.is_zero(),
        Mode::Float => x.to_f64().abs() <= FLOAT_EPS * scale.to_f64(),
    }
}

/// The spiral on the breakpoints `t_depth < ... < t_1 < t_0 = 1`.
pub fn build_u<T: Real>(a1: &T, depth: usize) -> Result<PLPath2<T>> {
    check_args(a1, depth)?;
    let p = powers(a1, depth / 2 + 2)?;
    let mut times = Vec::with_capacity(depth + 1);
    let mut values = Vec::with_capacity(depth + 1);
    let mut t = T::one();
    let mut pow_half = vec![t.clone()];
    for _ in 0..depth {
        t = t.half();
        pow_half.push(t.clone());
    }
    for n in (0..=depth).rev() {
        let k = n / 4;
        let (x1, x2) = match n % 4 {
            0 => (-p[2 * k].clone(), p[2 * k].clone()),
            1 => (-p[2 * k].clone(), -p[2 * k + 1].clone()),
            2 => (p[2 * k + 1].clone(), -p[2 * k + 1].clone()),
            _ => (p[2 * k + 1].clone(), p[2 * k + 2].clone()),
        };
        times.push(pow_half[n].clone());
        values.push(Vec2::new(x1, x2));
    }
    let u = PLPath2::new(times, values)?;

    let scale = T::one() + a1.abs();
    for v in u.values() {
        let diag = v.x1.clone() + v.x2.clone();
        let other = v.x1.clone() + a1.clone() * v.x2.clone();
        let s = scale.clone() * v.sup_norm();
        if !(near_zero(&diag, &s) || near_zero(&other, &s)) {
            return Err(Error::ConstructionInvalid(format!("breakpoint {:?} is off both lines", v.to_f64())));
        }
    }
    for w in u.values().windows(2) {
        let same1 = w[0].x1 == w[1].x1;
        let same2 = w[0].x2 == w[1].x2;
        if same1 == same2 {
            return Err(Error::ConstructionInvalid(
                "consecutive breakpoints must differ in exactly one coordinate".into(),
            ));
        }
    }
    Ok(u)
}

/// Variation accumulated by the infinite spiral on `(0, t_depth]`:
/// `(m(t_depth), mbar(t_depth))`.
fn tail_sums<T: Real>(a1: &T, depth: usize) -> Result<(Vec2<T>, Vec2<T>)> {
    let p = powers(a1, depth / 2 + 1)?;
    let rho = p[1].clone();
    let denom = T::one() - rho;
    let even = p[depth / 2].div_or(&denom, "tail sum")?;
    let odd = p[depth / 2 + 1].div_or(&denom, "tail sum")?;
    Ok((Vec2::new(odd.clone(), even.clone()), Vec2::new(even, odd)))
}

/// On the omitted interval `|u| <= |u(t_depth)|`, so `|Ru|`, hence `|g|`
/// and `|gbar|`, is at most `(1 + |a1|) |u(t_depth)|`; the regulators are
/// bounded by their values at `t_depth`, and `|f| <= max(|Rm|, |R mbar|)`.
fn tail_bound<T: Real>(a1: &T, u_depth: &Vec2<T>, m0: &Vec2<T>, mbar0: &Vec2<T>) -> T {
    let q = a1.abs();
    let reg = |v: &Vec2<T>| {
        let a = T::max_of(&v.x1, &(q.clone() * v.x2.clone()));
        T::max_of(&a, &(v.x1.clone() + v.x2.clone()))
    };
    let mut b = (T::one() + q.clone()) * u_depth.sup_norm();
    for x in [&m0.x1, &m0.x2, &mbar0.x1, &mbar0.x2] {
        b = T::max_of(&b, x);
    }
    b = T::max_of(&b, &reg(m0));
    T::max_of(&b, &reg(mbar0))
}

pub fn build_counterexample<T: Real>(a1: &T, depth: usize) -> Result<CounterexampleBundle<T>> {
    let u = build_u(a1, depth)?;
    let r = ReflectionMatrix2::new(a1.clone(), T::one());
    let (m0, mbar0) = tail_sums(a1, depth)?;
    let base = jordan_decompose(&u);
    let decomp = MonotoneDecomp {
        m: base.m.offset(&m0),
        mbar: base.mbar.offset(&mbar0),
    };
    let rm = r.apply_path(&decomp.m);
    let rmbar = r.apply_path(&decomp.mbar);
    let f = rm.min(&rmbar)?.map(|v| v.scale(&-T::one()));
    let diff = rm.sub(&rmbar)?;
    let g = diff.plus_part()?;
    let gbar = diff.minus_part()?;
    let tail_bound = tail_bound(a1, u.first(), &m0, &mbar0);
    Ok(CounterexampleBundle {
        r,
        u,
        decomp,
        f,
        g,
        gbar,
        depth,
        tail_bound,
    })
}

/// `g = Rm - (Rm ∧ R mbar)` and `gbar = R mbar - (Rm ∧ R mbar)` at every
/// breakpoint; exact in exact mode, within `2^-40` relative otherwise.
pub fn check_identities<T: Real>(b: &CounterexampleBundle<T>) -> bool {
    let inner = || -> Result<bool> {
        let rm = b.r.apply_path(&b.decomp.m);
        let rmbar = b.r.apply_path(&b.decomp.mbar);
        let mn = rm.min(&rmbar)?;
        let lhs = rm.sub(&mn)?;
        let lhs_bar = rmbar.sub(&mn)?;
        let scale = T::one() + rm.sup_norm() + rmbar.sup_norm();
        let close = |p: &PLPath2<T>, q: &PLPath2<T>| -> Result<bool> {
            let d = p.sub(q)?.sup_norm();
            Ok(near_zero(&d, &scale))
        };
        Ok(close(&lhs, &b.g)? && close(&lhs_bar, &b.gbar)?)
    };
    inner().unwrap_or(false)
}

/// Verifies both solutions on the represented range; the tail bound is
/// accepted up to `tail_tol`.
pub fn verify_bundle<T: Real>(
    b: &CounterexampleBundle<T>,
    tol: &T,
    tail_tol: &T,
) -> Result<[VerificationReport<T>; 2]> {
    let opts = VerifyOptions::new(tol.clone()).strict().with_tail_tol(tail_tol.clone());
    Ok([verify(&b.triple(), &opts)?, verify(&b.triple_bar(), &opts)?])
}

/// A bundle in whichever mode the construction could be carried out.
#[derive(Debug, Clone, PartialEq)]
pub enum AnyBundle {
    Exact(CounterexampleBundle<Dyadic>),
    Float(CounterexampleBundle<f64>),
}

impl AnyBundle {
    pub fn mode(&self) -> Mode {
        match self {
            AnyBundle::Exact(_) => Mode::Exact,
            AnyBundle::Float(_) => Mode::Float,
        }
    }
}

/// Builds exactly when every quantity is dyadic, otherwise in float mode.
/// With `force = Some(mode)` the mode is fixed and an exact request that
/// cannot be honored fails with [`Error::Inexact`].
pub fn build_auto(a1: &Scalar, depth: usize, force: Option<Mode>) -> Result<AnyBundle> {
    let exact_a1 = match a1 {
        Scalar::Exact(d) => Some(d.clone()),
        Scalar::Float(x) => Dyadic::from_f64(*x).ok(),
    };
    if force != Some(Mode::Float) {
        match &exact_a1 {
            Some(d) => match build_counterexample(d, depth) {
                Ok(b) => return Ok(AnyBundle::Exact(b)),
                Err(Error::Inexact(_)) if force.is_none() => {}
                Err(e) => return Err(e),
            },
            None if force == Some(Mode::Exact) => return Err(Error::Inexact("a1 is not dyadic")),
            None => {}
        }
    }
    Ok(AnyBundle::Float(build_counterexample(&a1.to_f64(), depth)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn dv(a: &str, b: &str) -> Vec2<Dyadic> {
        Vec2::new(d(a), d(b))
    }

    #[test]
    fn first_breakpoints() {
        let u = build_u(&d("-2"), 8).unwrap();
        let want = [
            ("1", dv("-1", "1")),
            ("1/2", dv("-1", "-1/2")),
            ("1/4", dv("1/2", "-1/2")),
            ("1/8", dv("1/2", "1/4")),
            ("1/16", dv("-1/4", "1/4")),
        ];
        for (t, v) in want {
            assert_eq!(u.eval(&d(t)).unwrap(), v, "t = {t}");
        }
        assert_eq!(*u.start(), d("1/256"));
        assert_eq!(u.len(), 9);
    }

    #[test]
    fn self_similar() {
        let u = build_u(&d("-2"), 40).unwrap();
        let quarter = d("1/4");
        for t in u.times() {
            let small = t.scale_pow2(-4);
            if small >= *u.start() {
                assert_eq!(u.eval(&small).unwrap(), u.eval(t).unwrap().scale(&quarter));
            }
        }
    }

    #[test]
    fn general_a1_in_float() {
        let u = build_u(&-3.0f64, 12).unwrap();
        let v = u.eval(&0.5).unwrap();
        assert_eq!(v.x1, -1.0);
        assert!((v.x2 + 1.0 / 3.0).abs() < 1e-15);
        assert!((v.x1 - 3.0 * v.x2).abs() < 1e-15);
        assert_eq!(build_u(&d("-3"), 12), Err(Error::Inexact("1/|a1|")));
    }

    #[test]
    fn rejects_bad_arguments() {
        for (a1, depth) in [(-1.0, 8), (0.5, 8), (-2.0, 6), (-2.0, 0)] {
            assert!(matches!(build_u(&a1, depth), Err(Error::ConstructionInvalid(_))));
        }
    }

    #[test]
    fn spiral_grows_outward() {
        let u = build_u(&-2.5f64, 40).unwrap();
        let norms: Vec<f64> = u
            .values()
            .iter()
            .zip(u.times())
            .filter(|(_, t)| (t.log2().round() as i64).rem_euclid(4) == 0)
            .map(|(v, _)| v.sup_norm())
            .collect();
        assert_eq!(norms.len(), 11);
        assert!(norms.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn bundle_identities_and_gap() {
        let b = build_counterexample(&d("-2"), 16).unwrap();
        assert!(check_identities(&b));
        for (gg, m) in [(&b.g, &b.decomp.m), (&b.gbar, &b.decomp.mbar)] {
            let rhs = b.f.add(&b.r.apply_path(m)).unwrap();
            let (l, r) = gg.refine(&rhs).unwrap();
            assert_eq!(l, r);
            assert!(gg.values().iter().all(|v| v.is_nonneg()));
        }
        assert_eq!(*b.g.last(), dv("0", "0"));
        assert_eq!(*b.gbar.last(), dv("3", "0"));
        assert_eq!(b.gap().unwrap(), d("3"));
        let mn = b.decomp.m.sub(&b.decomp.mbar).unwrap();
        assert_eq!(mn, b.u);
    }

    #[test]
    fn gap_is_one_plus_abs_a1() {
        for a1 in [-1.5f64, -3.0, -7.0] {
            let b = build_counterexample(&a1, 20).unwrap();
            let want = 1.0 - a1;
            assert!((b.gap().unwrap() - want).abs() < 1e-12 * want);
            assert!(check_identities(&b));
        }
    }

    #[test]
    fn both_solutions_verify_exactly() {
        let b = build_counterexample(&d("-2"), 40).unwrap();
        assert_eq!(b.tail_bound, d("1/262144"));
        assert_eq!(*b.decomp.m.first(), Vec2::new(Dyadic::pow2(-20), Dyadic::pow2(-19)));
        assert_eq!(*b.decomp.mbar.first(), Vec2::new(Dyadic::pow2(-19), Dyadic::pow2(-20)));
        assert!(b.f.first().sup_norm() <= b.tail_bound);
        let [r1, r2] = verify_bundle(&b, &Dyadic::zero(), &b.tail_bound).unwrap();
        for rep in [&r1, &r2] {
            assert!(rep.represented_pass && rep.pass, "{rep:?}");
            assert_eq!(rep.eq_residual, Dyadic::zero());
            assert_eq!(rep.comp_integrals, [Dyadic::zero(), Dyadic::zero()]);
        }
        // a tail tolerance below the bound is reported, not hidden
        let [r1, _] = verify_bundle(&b, &Dyadic::zero(), &Dyadic::pow2(-19)).unwrap();
        assert!(r1.represented_pass && !r1.pass);
    }

    #[test]
    fn float_bundle_verifies() {
        let b = build_counterexample(&-3.0f64, 24).unwrap();
        let [r1, r2] = verify_bundle(&b, &1e-12, &b.tail_bound).unwrap();
        assert!(r1.pass && r2.pass, "{r1:?} {r2:?}");
    }

    #[test]
    fn tail_sums_match_deep_variation() {
        for a1 in [-2.0f64, -3.0, -1.25] {
            let deep = 400;
            let u = build_u(&a1, deep).unwrap();
            let dec = jordan_decompose(&u);
            let t = 2f64.powi(-40);
            let m = dec.m.eval(&t).unwrap();
            let mbar = dec.mbar.eval(&t).unwrap();
            let (m0, mbar0) = tail_sums(&a1, 40).unwrap();
            for (x, y) in [(m.x1, m0.x1), (m.x2, m0.x2), (mbar.x1, mbar0.x1), (mbar.x2, mbar0.x2)] {
                assert!((x - y).abs() <= 1e-9 * y, "a1 = {a1}: {x} vs {y}");
            }
        }
    }

    #[test]
    fn auto_mode_selection() {
        let exact = |s: &str| Scalar::Exact(d(s));
        assert_eq!(build_auto(&exact("-2"), 8, None).unwrap().mode(), Mode::Exact);
        assert_eq!(build_auto(&Scalar::Float(-2.0), 8, None).unwrap().mode(), Mode::Exact);
        assert_eq!(build_auto(&exact("-3"), 8, None).unwrap().mode(), Mode::Float);
        // rho = 1/4 is dyadic but the tail sums carry a factor 4/3
        assert_eq!(build_auto(&exact("-4"), 8, None).unwrap().mode(), Mode::Float);
        assert_eq!(build_auto(&exact("-4"), 8, Some(Mode::Exact)), Err(Error::Inexact("tail sum")));
        assert_eq!(build_auto(&exact("-2"), 8, Some(Mode::Float)).unwrap().mode(), Mode::Float);
        assert!(matches!(
            build_auto(&exact("-1"), 8, None),
            Err(Error::ConstructionInvalid(_))
        ));
    }

    proptest::proptest! {
        #[test]
        fn float_construction_properties(a1 in -8.0f64..-1.05, turns in 1usize..7) {
            let depth = 4 * turns;
            let b = build_counterexample(&a1, depth).unwrap();
            proptest::prop_assert!(check_identities(&b));
            let want = 1.0 - a1;
            proptest::prop_assert!((b.gap().unwrap() - want).abs() <= 1e-12 * want);
            let [r1, r2] = verify_bundle(&b, &1e-12, &b.tail_bound).unwrap();
            proptest::prop_assert!(r1.pass && r2.pass, "{:?} {:?}", r1.failures, r2.failures);
            // u(t/16) = rho^2 u(t)
            let rho2 = 1.0 / (a1 * a1);
            for t in b.u.times() {
                if t / 16.0 >= *b.u.start() {
                    let lhs = b.u.eval(&(t / 16.0)).unwrap();
                    let rhs = b.u.eval(t).unwrap().scale(&rho2);
                    proptest::prop_assert!(lhs.sub(&rhs).sup_norm() <= 1e-15);
                }
            }
        }
    }
}
