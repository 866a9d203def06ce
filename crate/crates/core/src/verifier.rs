//! Certification of candidate solutions and uniqueness diagnostics for pairs
//! of solutions.
//!
//! A triple `(R, f, g, m)` solves the problem when `g = f + R m`, `g >= 0`,
//! `m(0) = 0`, `m` is nondecreasing, and `m_j` only grows where `g_j = 0`.
//! The last condition is checked through `∫ g_j dm_j`, which is exact for
//! piecewise-linear data, and optionally segment by segment.

use serde::{Deserialize, Serialize};

use crate::classify::ReflectionMatrix2;
use crate::error::{Error, Result};
use crate::path::{merge_times, trapezoid, PLPath1, PLPath2, Vec2};
use crate::scalar::Real;

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionTriple<T> {
    pub r: ReflectionMatrix2<T>,
    pub f: PLPath2<T>,
    pub g: PLPath2<T>,
    pub m: PLPath2<T>,
    /// For constructions truncated near `t = 0`: a bound on every path over
    /// the omitted initial interval. The represented range then starts at
    /// the truncation time rather than at zero.
    pub tail_bound: Option<T>,
}

impl<T: Real> SolutionTriple<T> {
    pub fn new(r: ReflectionMatrix2<T>, f: PLPath2<T>, g: PLPath2<T>, m: PLPath2<T>) -> Self {
        SolutionTriple {
            r,
            f,
            g,
            m,
            tail_bound: None,
        }
    }

    /// `f`, `g` and `m` on the union of their breakpoints.
    pub fn refined(&self) -> Result<Self> {
        let grid = merge_times(&merge_times(self.f.times(), self.g.times()), self.m.times());
        Ok(SolutionTriple {
            r: self.r.clone(),
            f: self.f.refine_to(&grid)?,
            g: self.g.refine_to(&grid)?,
            m: self.m.refine_to(&grid)?,
            tail_bound: self.tail_bound.clone(),
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerifyOptions<T> {
    pub tol: T,
    /// Also require `g_j = 0` (within `tol`) at both ends of every segment
    /// on which `m_j` grows.
    pub strict: bool,
    /// Largest acceptable tail bound; defaults to `tol`.
    pub tail_tol: Option<T>,
}

impl<T: Real> VerifyOptions<T> {
    pub fn new(tol: T) -> Self {
        VerifyOptions {
            tol,
            strict: false,
            tail_tol: None,
        }
    }

    pub fn strict(mut self) -> Self {
        self.strict = true;
        self
    }

    pub fn with_tail_tol(mut self, tail_tol: T) -> Self {
        self.tail_tol = Some(tail_tol);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct VerificationReport<T> {
    /// `max |g - f - R m|` over breakpoints.
    pub eq_residual: T,
    pub min_g: T,
    /// `|m|` at the first breakpoint.
    pub m_start: T,
    /// Most negative coordinate increment of `m` (zero when monotone).
    pub monotone_violation: T,
    /// `∫ g_1 dm_1` and `∫ g_2 dm_2`.
    pub comp_integrals: [T; 2],
    /// Total variation of `m`, which scales the complementarity tolerance.
    pub m_variation: T,
    /// `(segment, coordinate)` pairs failing the strict support check.
    pub strict_violations: Vec<(usize, usize)>,
    pub tail_bound: Option<T>,
    pub tol: T,
    /// Names of the failed conditions on the represented range.
    pub failures: Vec<&'static str>,
    /// All conditions hold on the represented range.
    pub represented_pass: bool,
    /// `represented_pass` and the tail bound is within tolerance.
    pub pass: bool,
}

pub fn verify<T: Real>(triple: &SolutionTriple<T>, opts: &VerifyOptions<T>) -> Result<VerificationReport<T>> {
    if opts.tol < T::zero() {
        return Err(Error::Usage("tolerance must be nonnegative".into()));
    }
    let tr = triple.refined()?;
    let n = tr.f.len();
    let tol = opts.tol.clone();
    let zero = T::zero();

    let mut eq_residual = zero.clone();
    let mut min_g: Option<T> = None;
    for i in 0..n {
        let rm = tr.r.apply(&tr.m.values()[i]);
        let resid = tr.g.values()[i].sub(&tr.f.values()[i]).sub(&rm).sup_norm();
        eq_residual = T::max_of(&eq_residual, &resid);
        let gmin = tr.g.values()[i].min_component();
        min_g = Some(match min_g {
            None => gmin,
            Some(cur) => T::min_of(&cur, &gmin),
        });
    }
    let min_g = min_g.unwrap_or_else(T::zero);
    let m_start = tr.m.first().sup_norm();

    let mut monotone_violation = zero.clone();
    for inc in tr.m.increments() {
        monotone_violation = T::min_of(&monotone_violation, &inc.min_component());
    }

    let comp_integrals = [
        trapezoid(&tr.g.component(0), &tr.m.component(0)),
        trapezoid(&tr.g.component(1), &tr.m.component(1)),
    ];
    let m_variation = tr.m.total_variation();

    let mut strict_violations = Vec::new();
    if opts.strict {
        for (seg, inc) in tr.m.increments().iter().enumerate() {
            for j in 0..2 {
                if *inc.get(j) > zero {
                    let a = tr.g.values()[seg].get(j).abs();
                    let b = tr.g.values()[seg + 1].get(j).abs();
                    if a > tol || b > tol {
                        strict_violations.push((seg, j));
                    }
                }
            }
        }
    }

    let comp_tol = tol.clone() * T::max_of(&T::one(), &m_variation);
    let start_tol = match &tr.tail_bound {
        Some(b) => tol.clone() + b.clone(),
        None => tol.clone(),
    };
    let mut failures = Vec::new();
    if eq_residual > tol {
        failures.push("equation");
    }
    if min_g < -tol.clone() {
        failures.push("nonnegativity");
    }
    if m_start > start_tol {
        failures.push("regulator start");
    }
    if monotone_violation < -tol.clone() {
        failures.push("regulator monotonicity");
    }
    if comp_integrals[0] > comp_tol || comp_integrals[1] > comp_tol {
        failures.push("complementarity");
    }
    if !strict_violations.is_empty() {
        failures.push("strict complementarity");
    }
    let represented_pass = failures.is_empty();
    let tail_ok = match &tr.tail_bound {
        None => true,
        Some(b) => *b <= opts.tail_tol.clone().unwrap_or_else(|| tol.clone()),
    };

    Ok(VerificationReport {
        eq_residual,
        min_g,
        m_start,
        monotone_violation,
        comp_integrals,
        m_variation,
        strict_violations,
        tail_bound: tr.tail_bound.clone(),
        tol,
        failures,
        represented_pass,
        pass: represented_pass && tail_ok,
    })
}

/// Half-open pieces of the plane cut by the diagonals `u2 = u1` and
/// `u2 = -u1`. Each boundary ray belongs to exactly one piece: `(1,1)` to N,
/// `(-1,1)` to W, and both `(-1,-1)` and `(1,-1)` to S.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Sector {
    N,
    E,
    S,
    W,
    Origin,
}

/// Membership predicates `[N, E, S, W]`.
pub fn sector_membership<T: Real>(p: &Vec2<T>) -> [bool; 4] {
    let (u1, u2) = (&p.x1, &p.x2);
    let zero = T::zero();
    let (n1, n2) = (-u1.clone(), -u2.clone());
    [
        *u2 > zero && n2 < *u1 && u1 <= u2,
        *u1 > zero && n1 < *u2 && u2 < u1,
        *u2 < zero && u2 <= u1 && *u1 <= n2,
        *u1 < zero && u1 < u2 && *u2 <= n1,
    ]
}

pub fn sector_of<T: Real>(p: &Vec2<T>) -> Sector {
    let [n, e, s, w] = sector_membership(p);
    if n {
        Sector::N
    } else if e {
        Sector::E
    } else if s {
        Sector::S
    } else if w {
        Sector::W
    } else {
        Sector::Origin
    }
}

impl Sector {
    /// The signed coordinate equal to `max(|u1|, |u2|)` inside this sector.
    pub fn lyapunov_coordinate<T: Real>(self, p: &Vec2<T>) -> T {
        match self {
            Sector::N => p.x2.clone(),
            Sector::E => p.x1.clone(),
            Sector::S => -p.x2.clone(),
            Sector::W => -p.x1.clone(),
            Sector::Origin => T::zero(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct UniquenessDiagnostics<T> {
    /// Difference of the regulators, `m - mbar`.
    pub u: PLPath2<T>,
    /// `max(|u1|, |u2|)` at the breakpoints of `u`. Along a segment `v` is
    /// convex, so its maximum is attained at a breakpoint.
    pub v: PLPath1<T>,
    pub sectors: Vec<Sector>,
    /// `v` does not grow across any segment starting with `v > tol`.
    pub v_monotone_on_support: bool,
    /// First segment where that fails.
    pub first_increase: Option<usize>,
    pub max_v: T,
}

fn check_same_problem<T: Real>(s1: &SolutionTriple<T>, s2: &SolutionTriple<T>, tol: &T) -> Result<()> {
    let da1 = (s1.r.a1.clone() - s2.r.a1.clone()).abs();
    let da2 = (s1.r.a2.clone() - s2.r.a2.clone()).abs();
    if da1 > *tol || da2 > *tol {
        return Err(Error::Usage("solutions use different reflection matrices".into()));
    }
    let df = s1.f.sub(&s2.f)?.sup_norm();
    if df > *tol {
        return Err(Error::Usage(format!(
            "solutions use different driving paths (sup difference {:e})",
            df.to_f64()
        )));
    }
    Ok(())
}

pub fn compare_solutions<T: Real>(
    s1: &SolutionTriple<T>,
    s2: &SolutionTriple<T>,
    tol: &T,
) -> Result<UniquenessDiagnostics<T>> {
    check_same_problem(s1, s2, tol)?;
    let u = s1.m.sub(&s2.m)?;
    let v_vals: Vec<T> = u.values().iter().map(Vec2::sup_norm).collect();
    let sectors = u.values().iter().map(sector_of).collect();
    let first_increase = v_vals
        .windows(2)
        .position(|w| w[0] > *tol && w[1] > w[0].clone() + tol.clone());
    let max_v = v_vals.iter().fold(T::zero(), |acc, x| T::max_of(&acc, x));
    Ok(UniquenessDiagnostics {
        v: PLPath1::new(u.times().to_vec(), v_vals)?,
        u,
        sectors,
        v_monotone_on_support: first_increase.is_none(),
        first_increase,
        max_v,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct E2Check<T> {
    pub holds: bool,
    /// `(segment, coordinate)` of the first violation.
    pub first_violation: Option<(usize, usize)>,
    /// Largest amount by which a product exceeded its allowance.
    pub worst_excess: T,
}

/// For the critical matrix `[[1, -1], [1, 1]]`, two solutions must satisfy
/// `(u1 + u2) du2 <= 0` and `(u1 - u2) du1 <= 0` with `u = m - mbar`.
/// Each segment is checked with midpoint `u`; the allowance on coordinate
/// `j` is `tol` times the variation of `m_j` and `mbar_j` on the segment.
pub fn check_e2_signs<T: Real>(s1: &SolutionTriple<T>, s2: &SolutionTriple<T>, tol: &T) -> Result<E2Check<T>> {
    let crit = ReflectionMatrix2::<T>::critical();
    for s in [s1, s2] {
        let off = T::max_of(
            &(s.r.a1.clone() - crit.a1.clone()).abs(),
            &(s.r.a2.clone() - crit.a2.clone()).abs(),
        );
        if off > *tol {
            return Err(Error::Usage("sign check requires R = [[1, -1], [1, 1]]".into()));
        }
    }
    let (m, mbar) = s1.m.refine(&s2.m)?;
    let mut first_violation = None;
    let mut worst_excess = T::zero();
    let dm = m.increments();
    let dmbar = mbar.increments();
    for seg in 0..dm.len() {
        let u0 = m.values()[seg].sub(&mbar.values()[seg]);
        let u1 = m.values()[seg + 1].sub(&mbar.values()[seg + 1]);
        let mid = u0.add(&u1);
        let du = u1.sub(&u0);
        // products with the midpoint doubled, hence the halving below
        let prods = [
            (mid.x1.clone() - mid.x2.clone()) * du.x1.clone(),
            (mid.x1.clone() + mid.x2.clone()) * du.x2.clone(),
        ];
        for (j, prod) in prods.into_iter().enumerate() {
            let allowance = tol.clone() * (dm[seg].get(j).abs() + dmbar[seg].get(j).abs());
            let excess = prod.half() - allowance;
            if excess > T::zero() {
                if first_violation.is_none() {
                    first_violation = Some((seg, j));
                }
                worst_excess = T::max_of(&worst_excess, &excess);
            }
        }
    }
    Ok(E2Check {
        holds: first_violation.is_none(),
        first_violation,
        worst_excess,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn path(times: &[&str], vals: &[(&str, &str)]) -> PLPath2<Dyadic> {
        PLPath2::new(
            times.iter().map(|t| d(t)).collect(),
            vals.iter().map(|(a, b)| Vec2::new(d(a), d(b))).collect(),
        )
        .unwrap()
    }

    fn identity_triple() -> SolutionTriple<Dyadic> {
        SolutionTriple::new(
            ReflectionMatrix2::identity(),
            path(&["0", "1"], &[("0", "0"), ("-1", "-1")]),
            path(&["0", "1"], &[("0", "0"), ("0", "0")]),
            path(&["0", "1"], &[("0", "0"), ("1", "1")]),
        )
    }

    #[test]
    fn identity_reflection_passes_at_zero_tolerance() {
        let rep = verify(&identity_triple(), &VerifyOptions::new(d("0")).strict()).unwrap();
        assert!(rep.pass, "{rep:?}");
        assert_eq!(rep.eq_residual, d("0"));
        assert_eq!(rep.comp_integrals, [d("0"), d("0")]);
    }

    #[test]
    fn interior_push_fails_complementarity() {
        let tr = SolutionTriple::new(
            ReflectionMatrix2::identity(),
            path(&["0", "1"], &[("1", "1"), ("1", "1")]),
            path(&["0", "1"], &[("1", "1"), ("2", "1")]),
            path(&["0", "1"], &[("0", "0"), ("1", "0")]),
        );
        let rep = verify(&tr, &VerifyOptions::new(d("0"))).unwrap();
        assert_eq!(rep.comp_integrals[0], d("1.5"));
        assert!(!rep.pass);
        assert_eq!(rep.failures, vec!["complementarity"]);
    }

    #[test]
    fn each_condition_can_fail() {
        let base = identity_triple();
        let mut t = base.clone();
        t.g = path(&["0", "1"], &[("0", "0"), ("0", "1")]);
        let rep = verify(&t, &VerifyOptions::new(d("0"))).unwrap();
        assert!(rep.failures.contains(&"equation"));

        let mut t = base.clone();
        t.f = path(&["0", "1"], &[("0", "0"), ("-1", "-2")]);
        t.g = path(&["0", "1"], &[("0", "0"), ("0", "-1")]);
        let rep = verify(&t, &VerifyOptions::new(d("0"))).unwrap();
        assert_eq!(rep.failures, vec!["nonnegativity"]);

        let mut t = base.clone();
        t.m = path(&["0", "1"], &[("1", "0"), ("1", "1")]);
        t.f = path(&["0", "1"], &[("-1", "0"), ("-1", "-1")]);
        let rep = verify(&t, &VerifyOptions::new(d("0"))).unwrap();
        assert_eq!(rep.failures, vec!["regulator start"]);

        let mut t = base;
        t.m = path(&["0", "0.5", "1"], &[("0", "0"), ("2", "0.5"), ("1", "1")]);
        t.f = path(&["0", "0.5", "1"], &[("0", "0"), ("-2", "-0.5"), ("-1", "-1")]);
        t.g = path(&["0", "1"], &[("0", "0"), ("0", "0")]);
        let rep = verify(&t, &VerifyOptions::new(d("0"))).unwrap();
        assert_eq!(rep.failures, vec!["regulator monotonicity"]);
        assert_eq!(rep.monotone_violation, d("-1"));
    }

    #[test]
    fn strict_mode_flags_support() {
        // a push starting away from the face passes the integral check at
        // this tolerance but not the per-segment one
        let tr = SolutionTriple::new(
            ReflectionMatrix2::identity(),
            path(&["0", "1"], &[("1", "0"), ("-1", "0")]),
            path(&["0", "1"], &[("1", "0"), ("0", "0")]),
            path(&["0", "1"], &[("0", "0"), ("1", "0")]),
        );
        let loose = verify(&tr, &VerifyOptions::new(d("0.5"))).unwrap();
        assert!(loose.pass);
        let strict = verify(&tr, &VerifyOptions::new(d("0.5")).strict()).unwrap();
        assert_eq!(strict.strict_violations, vec![(0, 0)]);
        assert!(!strict.pass);
    }

    #[test]
    fn verify_rejects_mismatched_horizons() {
        let mut t = identity_triple();
        t.g = path(&["0", "2"], &[("0", "0"), ("0", "0")]);
        assert!(matches!(
            verify(&t, &VerifyOptions::new(d("0"))),
            Err(Error::HorizonMismatch(..))
        ));
    }

    #[test]
    fn verify_is_refinement_invariant() {
        let t = identity_triple();
        let grid: Vec<Dyadic> = ["0", "0.125", "0.5", "0.75", "1"].iter().map(|s| d(s)).collect();
        let fine = SolutionTriple {
            f: t.f.refine_to(&grid).unwrap(),
            g: t.g.refine_to(&grid).unwrap(),
            m: t.m.refine_to(&grid).unwrap(),
            ..t.clone()
        };
        let a = verify(&t, &VerifyOptions::new(d("0"))).unwrap();
        let b = verify(&fine, &VerifyOptions::new(d("0"))).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn sector_examples() {
        let s = |a: &str, b: &str| sector_of(&Vec2::new(d(a), d(b)));
        assert_eq!(s("0", "1"), Sector::N);
        assert_eq!(s("1", "1"), Sector::N);
        assert_eq!(s("-1", "1"), Sector::W);
        assert_eq!(s("1", "-1"), Sector::S);
        assert_eq!(s("-1", "-1"), Sector::S);
        assert_eq!(s("1", "0"), Sector::E);
        assert_eq!(s("-1", "0"), Sector::W);
        assert_eq!(s("0", "-1"), Sector::S);
        assert_eq!(s("0", "0"), Sector::Origin);
    }

    #[test]
    fn sectors_partition_the_plane() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..1_000_000 {
            let p = Vec2::new(rng.gen_range(-1.0..1.0f64), rng.gen_range(-1.0..1.0f64));
            if p.x1 == 0.0 && p.x2 == 0.0 {
                continue;
            }
            let hits = sector_membership(&p).iter().filter(|b| **b).count();
            assert_eq!(hits, 1, "{p:?}");
            let sec = sector_of(&p);
            assert_eq!(sec.lyapunov_coordinate(&p), p.sup_norm());
        }
        // boundary rays and axes, exactly
        for k in -8i64..=8 {
            for l in -8i64..=8 {
                if k == 0 && l == 0 {
                    continue;
                }
                let p = Vec2::new(Dyadic::from_i64(k), Dyadic::from_i64(l));
                assert_eq!(sector_membership(&p).iter().filter(|b| **b).count(), 1, "{k} {l}");
                assert_eq!(sector_of(&p).lyapunov_coordinate(&p), p.sup_norm());
            }
        }
    }

    #[test]
    fn identical_solutions_have_zero_difference() {
        let t = identity_triple();
        let diag = compare_solutions(&t, &t, &d("0")).unwrap();
        assert_eq!(diag.max_v, d("0"));
        assert!(diag.v_monotone_on_support);
        assert!(diag.sectors.iter().all(|s| *s == Sector::Origin));
    }

    #[test]
    fn compare_rejects_different_problems() {
        let t = identity_triple();
        let mut other = t.clone();
        other.f = path(&["0", "1"], &[("0", "0"), ("-1", "0")]);
        assert!(matches!(compare_solutions(&t, &other, &d("0")), Err(Error::Usage(_))));
        let mut other = t.clone();
        other.r = ReflectionMatrix2::critical();
        assert!(matches!(compare_solutions(&t, &other, &d("0")), Err(Error::Usage(_))));
    }

    #[test]
    fn e2_signs() {
        let crit = ReflectionMatrix2::<Dyadic>::critical();
        let mut t = identity_triple();
        t.r = crit.clone();
        assert!(check_e2_signs(&t, &t, &d("0")).unwrap().holds);
        assert!(matches!(
            check_e2_signs(&identity_triple(), &identity_triple(), &d("0")),
            Err(Error::Usage(_))
        ));
        // u moving straight away from the origin in N violates the first line
        let mut other = t.clone();
        other.m = path(&["0", "1"], &[("0", "0"), ("1", "0")]);
        let chk = check_e2_signs(&t, &other, &d("0")).unwrap();
        assert!(!chk.holds);
        assert_eq!(chk.first_violation, Some((0, 1)));
    }
}
