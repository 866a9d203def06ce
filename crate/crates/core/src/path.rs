//! Continuous piecewise-linear paths, their monotone (Jordan) decomposition,
//! lattice operations and Stieltjes integration.
//!
//! A path is a strictly increasing list of breakpoint times with a value at
//! each breakpoint; between breakpoints it is the linear interpolant. All
//! operations return new paths. Operations whose result is not piecewise
//! linear on the input grid (`min`, positive and negative parts) insert the
//! crossing points, so their output is again exact.

use crate::error::{Error, Result};
use crate::scalar::{Real, FLOAT_EPS};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Vec2<T> {
    pub x1: T,
    pub x2: T,
}

impl<T: Real> Vec2<T> {
    pub fn new(x1: T, x2: T) -> Self {
        Vec2 { x1, x2 }
    }

    pub fn zero() -> Self {
        Vec2::new(T::zero(), T::zero())
    }

    /// Coordinate `j` in `{0, 1}`.
    pub fn get(&self, j: usize) -> &T {
        match j {
            0 => &self.x1,
            1 => &self.x2,
            _ => panic!("coordinate index {j} out of range"),
        }
    }

    /// Componentwise order: `x1 >= 0` and `x2 >= 0`.
    pub fn is_nonneg(&self) -> bool {
        self.x1 >= T::zero() && self.x2 >= T::zero()
    }

    pub fn sup_norm(&self) -> T {
        T::max_of(&self.x1.abs(), &self.x2.abs())
    }

    pub fn min_component(&self) -> T {
        T::min_of(&self.x1, &self.x2)
    }

    pub fn add(&self, o: &Vec2<T>) -> Vec2<T> {
        Vec2::new(self.x1.clone() + o.x1.clone(), self.x2.clone() + o.x2.clone())
    }

    pub fn sub(&self, o: &Vec2<T>) -> Vec2<T> {
        Vec2::new(self.x1.clone() - o.x1.clone(), self.x2.clone() - o.x2.clone())
    }

    pub fn scale(&self, c: &T) -> Vec2<T> {
        Vec2::new(c.clone() * self.x1.clone(), c.clone() * self.x2.clone())
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [self.x1.to_f64(), self.x2.to_f64()]
    }
}

fn check_times<T: Real>(times: &[T]) -> Result<()> {
    if times.is_empty() {
        return Err(Error::InvalidPath("a path needs at least one breakpoint".into()));
    }
    for (i, w) in times.windows(2).enumerate() {
        if !(w[0] < w[1]) {
            return Err(Error::InvalidPath(format!(
                "times not strictly increasing at index {}",
                i + 1
            )));
        }
    }
    if times[0].to_f64().is_nan() {
        return Err(Error::InvalidPath("NaN time".into()));
    }
    Ok(())
}

/// Two times are the same breakpoint: exact equality in exact mode, and
/// within `FLOAT_EPS` relative spacing in float mode.
pub(crate) fn same_time<T: Real>(a: &T, b: &T, scale: f64) -> bool {
    match T::MODE {
        crate::scalar::Mode::Exact => a == b,
        crate::scalar::Mode::Float => (a.to_f64() - b.to_f64()).abs() <= FLOAT_EPS * scale,
    }
}

fn time_scale<T: Real>(times: &[T]) -> f64 {
    let first = times.first().map(|t| t.to_f64().abs()).unwrap_or(0.0);
    let last = times.last().map(|t| t.to_f64().abs()).unwrap_or(0.0);
    1f64.max(first).max(last)
}

/// Sorted union of two strictly increasing grids.
pub fn merge_times<T: Real>(a: &[T], b: &[T]) -> Vec<T> {
    let scale = time_scale(a).max(time_scale(b));
    let mut out: Vec<T> = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() || j < b.len() {
        let next = if j >= b.len() || (i < a.len() && a[i] <= b[j]) {
            i += 1;
            &a[i - 1]
        } else {
            j += 1;
            &b[j - 1]
        };
        match out.last() {
            Some(last) if same_time(last, next, scale) => {}
            _ => out.push(next.clone()),
        }
    }
    out
}

fn same_horizon<T: Real>(a: &[T], b: &[T]) -> Result<()> {
    let scale = time_scale(a).max(time_scale(b));
    let (a0, a1, b0, b1) = (&a[0], &a[a.len() - 1], &b[0], &b[b.len() - 1]);
    if same_time(a0, b0, scale) && same_time(a1, b1, scale) {
        Ok(())
    } else {
        Err(Error::HorizonMismatch(
            a0.to_f64(),
            a1.to_f64(),
            b0.to_f64(),
            b1.to_f64(),
        ))
    }
}

/// Index `i` of the segment `[times[i], times[i+1]]` containing `t`, or the
/// last index when `t` is the final time.
fn locate<T: Real>(times: &[T], t: &T) -> Result<usize> {
    let n = times.len();
    let scale = time_scale(times);
    let out_of_domain = || Error::Domain {
        t: t.to_f64(),
        start: times[0].to_f64(),
        end: times[n - 1].to_f64(),
    };
    if *t < times[0] {
        if same_time(t, &times[0], scale) {
            return Ok(0);
        }
        return Err(out_of_domain());
    }
    if *t > times[n - 1] {
        if same_time(t, &times[n - 1], scale) {
            return Ok(n - 1);
        }
        return Err(out_of_domain());
    }
    if !(t >= &times[0]) {
        return Err(out_of_domain());
    }
    let idx = times.partition_point(|s| s <= t);
    Ok(idx.saturating_sub(1))
}

fn interpolate<T: Real>(t0: &T, t1: &T, v0: &T, v1: &T, t: &T) -> Result<T> {
    if t == t0 || v0 == v1 {
        return Ok(v0.clone());
    }
    if t == t1 {
        return Ok(v1.clone());
    }
    let num = (v1.clone() - v0.clone()) * (t.clone() - t0.clone());
    let delta = num.div_or(&(t1.clone() - t0.clone()), "linear interpolation")?;
    Ok(v0.clone() + delta)
}

/// Scalar piecewise-linear path (one coordinate of a [`PLPath2`]).
#[derive(Debug, Clone, PartialEq)]
pub struct PLPath1<T> {
    times: Vec<T>,
    values: Vec<T>,
}

impl<T: Real> PLPath1<T> {
    pub fn new(times: Vec<T>, values: Vec<T>) -> Result<Self> {
        check_times(&times)?;
        if times.len() != values.len() {
            return Err(Error::InvalidPath(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        Ok(PLPath1 { times, values })
    }

    pub fn constant(times: Vec<T>, c: T) -> Result<Self> {
        let values = vec![c; times.len()];
        PLPath1::new(times, values)
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[T] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> &T {
        &self.times[0]
    }

    pub fn end(&self) -> &T {
        &self.times[self.times.len() - 1]
    }

    pub fn eval(&self, t: &T) -> Result<T> {
        let i = locate(&self.times, t)?;
        if i + 1 == self.times.len() {
            return Ok(self.values[i].clone());
        }
        interpolate(
            &self.times[i],
            &self.times[i + 1],
            &self.values[i],
            &self.values[i + 1],
            t,
        )
    }

    /// Resamples onto `grid`, which must span the same horizon.
    pub fn refine_to(&self, grid: &[T]) -> Result<Self> {
        check_times(grid)?;
        same_horizon(&self.times, grid)?;
        if grid.len() == self.times.len() && grid == self.times.as_slice() {
            return Ok(self.clone());
        }
        let mut values = Vec::with_capacity(grid.len());
        let mut seg = 0usize;
        let n = self.times.len();
        for t in grid {
            while seg + 1 < n && self.times[seg + 1] <= *t {
                seg += 1;
            }
            let v = if seg + 1 == n || *t <= self.times[seg] {
                self.values[seg].clone()
            } else {
                interpolate(
                    &self.times[seg],
                    &self.times[seg + 1],
                    &self.values[seg],
                    &self.values[seg + 1],
                    t,
                )?
            };
            values.push(v);
        }
        Ok(PLPath1 {
            times: grid.to_vec(),
            values,
        })
    }

    /// Both paths on the union of their breakpoints.
    pub fn refine(&self, other: &Self) -> Result<(Self, Self)> {
        same_horizon(&self.times, &other.times)?;
        let grid = merge_times(&self.times, &other.times);
        Ok((self.refine_to(&grid)?, other.refine_to(&grid)?))
    }

    fn zip_linear(&self, other: &Self, f: impl Fn(&T, &T) -> T) -> Result<Self> {
        let (a, b) = self.refine(other)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| f(x, y)).collect();
        Ok(PLPath1 {
            times: a.times,
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_linear(other, |x, y| x.clone() + y.clone())
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_linear(other, |x, y| x.clone() - y.clone())
    }

    /// `self + c * other`.
    pub fn add_scaled(&self, c: &T, other: &Self) -> Result<Self> {
        self.zip_linear(other, |x, y| x.clone() + c.clone() * y.clone())
    }

    pub fn scale(&self, c: &T) -> Self {
        self.map(|v| c.clone() * v.clone())
    }

    pub fn neg(&self) -> Self {
        self.map(|v| -v.clone())
    }

    pub fn map(&self, f: impl Fn(&T) -> T) -> Self {
        PLPath1 {
            times: self.times.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    /// Pointwise minimum, with breakpoints inserted where the arguments cross.
    pub fn min(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.refine(other)?;
        let scale = time_scale(&a.times);
        let n = a.times.len();
        let mut times = Vec::with_capacity(n);
        let mut values = Vec::with_capacity(n);
        for i in 0..n {
            if i > 0 {
                let d0 = a.values[i - 1].clone() - b.values[i - 1].clone();
                let d1 = a.values[i].clone() - b.values[i].clone();
                let zero = T::zero();
                let crosses = (d0 < zero && d1 > zero) || (d0 > zero && d1 < zero);
                if crosses {
                    let (t0, t1) = (&a.times[i - 1], &a.times[i]);
                    let denom = d0.clone() - d1;
                    let dt = (t1.clone() - t0.clone()) * d0.clone();
                    let tc = t0.clone() + dt.div_or(&denom, "crossing time")?;
                    let dv = (a.values[i].clone() - a.values[i - 1].clone()) * d0;
                    let vc = a.values[i - 1].clone() + dv.div_or(&denom, "crossing value")?;
                    let inside = tc > *t0
                        && tc < *t1
                        && !same_time(&tc, t0, scale)
                        && !same_time(&tc, t1, scale);
                    if inside {
                        times.push(tc);
                        values.push(vc);
                    }
                }
            }
            times.push(a.times[i].clone());
            values.push(T::min_of(&a.values[i], &b.values[i]));
        }
        Ok(PLPath1 { times, values })
    }

    pub fn max(&self, other: &Self) -> Result<Self> {
        Ok(self.neg().min(&other.neg())?.neg())
    }

    /// `max(p, 0)`.
    pub fn plus_part(&self) -> Result<Self> {
        let zero = PLPath1::constant(self.times.clone(), T::zero())?;
        self.max(&zero)
    }

    /// `max(-p, 0)`.
    pub fn minus_part(&self) -> Result<Self> {
        self.neg().plus_part()
    }

    /// Segment increments `v[i+1] - v[i]`.
    pub fn increments(&self) -> Vec<T> {
        self.values
            .windows(2)
            .map(|w| w[1].clone() - w[0].clone())
            .collect()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.values.windows(2).all(|w| w[0] <= w[1])
    }

    pub fn total_variation(&self) -> T {
        self.increments()
            .into_iter()
            .fold(T::zero(), |acc, d| acc + d.abs())
    }

    /// Largest `|value|` over breakpoints, which is the sup norm.
    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| T::max_of(&acc, &v.abs()))
    }
}

/// `∫ g dm` for piecewise-linear `g` and nondecreasing piecewise-linear `m`.
///
/// On each segment both paths are affine in `t`, so the trapezoid rule is
/// exact.
pub fn stieltjes<T: Real>(g: &PLPath1<T>, m: &PLPath1<T>) -> Result<T> {
    let (g, m) = g.refine(m)?;
    if let Some(segment) = m.values.windows(2).position(|w| w[1] < w[0]) {
        return Err(Error::DecreasingIntegrator { segment });
    }
    Ok(trapezoid(&g, &m))
}

/// Trapezoid sum on an already common grid, without the monotonicity check.
pub(crate) fn trapezoid<T: Real>(g: &PLPath1<T>, m: &PLPath1<T>) -> T {
    debug_assert_eq!(g.times.len(), m.times.len());
    let mut acc = T::zero();
    for i in 1..g.values.len() {
        let dm = m.values[i].clone() - m.values[i - 1].clone();
        if dm.is_zero() {
            continue;
        }
        let gm = (g.values[i - 1].clone() + g.values[i].clone()).half();
        acc = acc + gm * dm;
    }
    acc
}

/// Continuous piecewise-linear path into the plane.
#[derive(Debug, Clone, PartialEq)]
pub struct PLPath2<T> {
    times: Vec<T>,
    values: Vec<Vec2<T>>,
}

impl<T: Real> PLPath2<T> {
    pub fn new(times: Vec<T>, values: Vec<Vec2<T>>) -> Result<Self> {
        check_times(&times)?;
        if times.len() != values.len() {
            return Err(Error::InvalidPath(format!(
                "{} times but {} values",
                times.len(),
                values.len()
            )));
        }
        Ok(PLPath2 { times, values })
    }

    pub fn constant(times: Vec<T>, c: Vec2<T>) -> Result<Self> {
        let values = vec![c; times.len()];
        PLPath2::new(times, values)
    }

    /// Joins two coordinate paths, refining both onto a common grid.
    pub fn from_components(c1: &PLPath1<T>, c2: &PLPath1<T>) -> Result<Self> {
        let (a, b) = c1.refine(c2)?;
        let values = a
            .values
            .into_iter()
            .zip(b.values)
            .map(|(x1, x2)| Vec2 { x1, x2 })
            .collect();
        Ok(PLPath2 {
            times: a.times,
            values,
        })
    }

    pub fn times(&self) -> &[T] {
        &self.times
    }

    pub fn values(&self) -> &[Vec2<T>] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn start(&self) -> &T {
        &self.times[0]
    }

    pub fn end(&self) -> &T {
        &self.times[self.times.len() - 1]
    }

    pub fn first(&self) -> &Vec2<T> {
        &self.values[0]
    }

    pub fn last(&self) -> &Vec2<T> {
        &self.values[self.values.len() - 1]
    }

    pub fn component(&self, j: usize) -> PLPath1<T> {
        PLPath1 {
            times: self.times.clone(),
            values: self.values.iter().map(|v| v.get(j).clone()).collect(),
        }
    }

    pub fn eval(&self, t: &T) -> Result<Vec2<T>> {
        let i = locate(&self.times, t)?;
        if i + 1 == self.times.len() {
            return Ok(self.values[i].clone());
        }
        let (t0, t1) = (&self.times[i], &self.times[i + 1]);
        let (v0, v1) = (&self.values[i], &self.values[i + 1]);
        Ok(Vec2::new(
            interpolate(t0, t1, &v0.x1, &v1.x1, t)?,
            interpolate(t0, t1, &v0.x2, &v1.x2, t)?,
        ))
    }

    pub fn refine_to(&self, grid: &[T]) -> Result<Self> {
        let c1 = self.component(0).refine_to(grid)?;
        let c2 = self.component(1).refine_to(grid)?;
        PLPath2::from_components(&c1, &c2)
    }

    /// Both paths on the union of their breakpoints; each output evaluates
    /// identically to its input.
    pub fn refine(&self, other: &Self) -> Result<(Self, Self)> {
        same_horizon(&self.times, &other.times)?;
        let grid = merge_times(&self.times, &other.times);
        Ok((self.refine_to(&grid)?, other.refine_to(&grid)?))
    }

    fn zip_linear(&self, other: &Self, f: impl Fn(&Vec2<T>, &Vec2<T>) -> Vec2<T>) -> Result<Self> {
        let (a, b) = self.refine(other)?;
        let values = a.values.iter().zip(&b.values).map(|(x, y)| f(x, y)).collect();
        Ok(PLPath2 {
            times: a.times,
            values,
        })
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_linear(other, Vec2::add)
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.zip_linear(other, Vec2::sub)
    }

    pub fn map(&self, f: impl Fn(&Vec2<T>) -> Vec2<T>) -> Self {
        PLPath2 {
            times: self.times.clone(),
            values: self.values.iter().map(f).collect(),
        }
    }

    pub fn offset(&self, c: &Vec2<T>) -> Self {
        self.map(|v| v.add(c))
    }

    /// Image under the 2x2 matrix `[[r11, r12], [r21, r22]]`.
    pub fn apply_matrix(&self, m: &[[T; 2]; 2]) -> Self {
        self.map(|v| {
            Vec2::new(
                m[0][0].clone() * v.x1.clone() + m[0][1].clone() * v.x2.clone(),
                m[1][0].clone() * v.x1.clone() + m[1][1].clone() * v.x2.clone(),
            )
        })
    }

    fn componentwise(&self, f: impl Fn(&PLPath1<T>) -> Result<PLPath1<T>>) -> Result<Self> {
        PLPath2::from_components(&f(&self.component(0))?, &f(&self.component(1))?)
    }

    /// Componentwise minimum with crossing breakpoints inserted.
    pub fn min(&self, other: &Self) -> Result<Self> {
        let (a, b) = self.refine(other)?;
        let c1 = a.component(0).min(&b.component(0))?;
        let c2 = a.component(1).min(&b.component(1))?;
        PLPath2::from_components(&c1, &c2)
    }

    pub fn plus_part(&self) -> Result<Self> {
        self.componentwise(PLPath1::plus_part)
    }

    pub fn minus_part(&self) -> Result<Self> {
        self.componentwise(PLPath1::minus_part)
    }

    pub fn increments(&self) -> Vec<Vec2<T>> {
        self.values.windows(2).map(|w| w[1].sub(&w[0])).collect()
    }

    pub fn is_nondecreasing(&self) -> bool {
        self.increments().iter().all(Vec2::is_nonneg)
    }

    /// Sum of the coordinate total variations.
    pub fn total_variation(&self) -> T {
        self.component(0).total_variation() + self.component(1).total_variation()
    }

    pub fn sup_norm(&self) -> T {
        self.values
            .iter()
            .fold(T::zero(), |acc, v| T::max_of(&acc, &v.sup_norm()))
    }

    /// One row per breakpoint with header `t,x1,x2`. Exact values are
    /// written as exact decimals.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t,x1,x2\n");
        for (t, v) in self.times.iter().zip(&self.values) {
            out.push_str(&format!(
                "{},{},{}\n",
                t.to_scalar(),
                v.x1.to_scalar(),
                v.x2.to_scalar()
            ));
        }
        out
    }
}

/// `u(t) = u(start) + m(t) - mbar(t)` with `m`, `mbar` nondecreasing and
/// starting at zero.
#[derive(Debug, Clone, PartialEq)]
pub struct MonotoneDecomp<T> {
    pub m: PLPath2<T>,
    pub mbar: PLPath2<T>,
}

/// Minimal decomposition: each coordinate increment of each segment goes
/// wholly to `m` when positive and wholly to `mbar` when negative.
pub fn jordan_decompose<T: Real>(u: &PLPath2<T>) -> MonotoneDecomp<T> {
    let mut m = Vec::with_capacity(u.len());
    let mut mbar = Vec::with_capacity(u.len());
    let mut up = Vec2::<T>::zero();
    let mut down = Vec2::<T>::zero();
    m.push(up.clone());
    mbar.push(down.clone());
    let zero = T::zero();
    for d in u.increments() {
        if d.x1 > zero {
            up.x1 = up.x1 + d.x1;
        } else {
            down.x1 = down.x1 - d.x1;
        }
        if d.x2 > zero {
            up.x2 = up.x2 + d.x2;
        } else {
            down.x2 = down.x2 - d.x2;
        }
        m.push(up.clone());
        mbar.push(down.clone());
    }
    MonotoneDecomp {
        m: PLPath2 {
            times: u.times.clone(),
            values: m,
        },
        mbar: PLPath2 {
            times: u.times.clone(),
            values: mbar,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::Dyadic;
    use proptest::prelude::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn dv(a: &str, b: &str) -> Vec2<Dyadic> {
        Vec2::new(d(a), d(b))
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(PLPath1::<f64>::new(vec![], vec![]).is_err());
        assert!(PLPath1::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        assert!(PLPath1::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(PLPath1::new(vec![0.0, f64::NAN], vec![1.0, 1.0]).is_err());
    }

    #[test]
    fn eval_interpolates_and_hits_breakpoints() {
        let p = PLPath2::new(
            vec![d("0.5"), d("1")],
            vec![dv("-1", "-0.5"), dv("-1", "1")],
        )
        .unwrap();
        assert_eq!(p.eval(&d("0.75")).unwrap(), dv("-1", "0.25"));
        assert_eq!(p.eval(&d("1")).unwrap(), dv("-1", "1"));
        assert_eq!(p.eval(&d("0.5")).unwrap(), dv("-1", "-0.5"));
        assert!(matches!(p.eval(&d("0.25")), Err(Error::Domain { .. })));
        assert!(matches!(p.eval(&d("1.5")), Err(Error::Domain { .. })));
    }

    #[test]
    fn eval_reports_inexact() {
        let p = PLPath1::new(vec![d("0"), d("3")], vec![d("0"), d("1")]).unwrap();
        assert_eq!(p.eval(&d("1")), Err(Error::Inexact("linear interpolation")));
        assert_eq!(p.eval(&d("1.5")).unwrap(), d("0.5"));
    }

    #[test]
    fn refine_unions_grids() {
        let p = PLPath1::new(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        let q = PLPath1::new(vec![0.0, 0.5, 1.0], vec![1.0, 0.0, 1.0]).unwrap();
        let (a, b) = p.refine(&q).unwrap();
        assert_eq!(a.times(), &[0.0, 0.5, 1.0]);
        assert_eq!(a.values(), &[0.0, 1.0, 2.0]);
        assert_eq!(b, q);
        let (a, b) = q.refine(&q).unwrap();
        assert_eq!((a, b), (q.clone(), q));
    }

    #[test]
    fn refine_rejects_horizon_mismatch() {
        let p = PLPath1::new(vec![0.0, 1.0], vec![0.0, 2.0]).unwrap();
        let q = PLPath1::new(vec![0.0, 2.0], vec![0.0, 2.0]).unwrap();
        assert!(matches!(p.refine(&q), Err(Error::HorizonMismatch(..))));
    }

    #[test]
    fn min_inserts_crossing() {
        let p = PLPath1::new(vec![d("0"), d("1")], vec![d("0"), d("1")]).unwrap();
        let q = PLPath1::new(vec![d("0"), d("1")], vec![d("1"), d("0")]).unwrap();
        let r = p.min(&q).unwrap();
        assert_eq!(r.times(), &[d("0"), d("0.5"), d("1")]);
        assert_eq!(r.values(), &[d("0"), d("0.5"), d("0")]);
    }

    #[test]
    fn min_reports_non_dyadic_crossing() {
        let p = PLPath1::new(vec![d("0"), d("1")], vec![d("-1"), d("2")]).unwrap();
        assert_eq!(p.plus_part(), Err(Error::Inexact("crossing time")));
        let pf = PLPath1::new(vec![0.0, 1.0], vec![-1.0, 2.0]).unwrap();
        let plus = pf.plus_part().unwrap();
        assert_eq!(plus.len(), 3);
        assert!((plus.times()[1] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn float_crossings_are_deduplicated() {
        let eps = 1e-14;
        let p = PLPath1::new(vec![0.0, 1.0], vec![-eps, 1.0]).unwrap();
        let plus = p.plus_part().unwrap();
        assert_eq!(plus.len(), 2);
    }

    #[test]
    fn plus_and_minus_parts() {
        let p = PLPath1::constant(vec![d("0"), d("1")], d("-1")).unwrap();
        assert_eq!(p.plus_part().unwrap().values(), &[d("0"), d("0")]);
        assert_eq!(p.minus_part().unwrap().values(), &[d("1"), d("1")]);
    }

    #[test]
    fn jordan_single_segment() {
        let u = PLPath2::new(vec![d("0"), d("1")], vec![dv("0", "0"), dv("2", "-3")]).unwrap();
        let dec = jordan_decompose(&u);
        assert_eq!(dec.m.values(), &[dv("0", "0"), dv("2", "0")]);
        assert_eq!(dec.mbar.values(), &[dv("0", "0"), dv("0", "3")]);
        assert_eq!(dec.m.eval(&d("0.5")).unwrap(), dv("1", "0"));
    }

    #[test]
    fn jordan_constant_path() {
        let u = PLPath2::constant(vec![0.0, 0.5, 1.0], Vec2::new(3.0, -1.0)).unwrap();
        let dec = jordan_decompose(&u);
        assert!(dec.m.values().iter().all(|v| *v == Vec2::zero()));
        assert!(dec.mbar.values().iter().all(|v| *v == Vec2::zero()));
    }

    #[test]
    fn stieltjes_basic() {
        let g = PLPath1::new(vec![d("0"), d("1")], vec![d("0"), d("1")]).unwrap();
        assert_eq!(stieltjes(&g, &g).unwrap(), d("0.5"));
        let zero = PLPath1::constant(vec![d("0"), d("1")], d("0")).unwrap();
        assert_eq!(stieltjes(&zero, &g).unwrap(), d("0"));
        let dec = g.neg();
        assert_eq!(
            stieltjes(&g, &dec),
            Err(Error::DecreasingIntegrator { segment: 0 })
        );
    }

    #[test]
    fn csv_export() {
        let p = PLPath2::new(vec![d("0"), d("0.5")], vec![dv("1", "-0.25"), dv("0", "0")]).unwrap();
        assert_eq!(p.to_csv(), "t,x1,x2\n0,1,-0.25\n0.5,0,0\n");
    }

    fn arb_path(n: usize) -> impl Strategy<Value = PLPath1<Dyadic>> {
        (
            proptest::collection::vec(1i64..8, n),
            proptest::collection::vec(-64i64..64, n + 1),
        )
            .prop_map(|(steps, vals)| {
                let mut t = Dyadic::zero();
                let mut times = vec![t.clone()];
                for s in steps {
                    t = t + Dyadic::pow2(-s);
                    times.push(t.clone());
                }
                let values = vals.into_iter().map(|v| Dyadic::new(v, -3)).collect();
                PLPath1::new(times, values).unwrap()
            })
    }

    fn arb_pair() -> impl Strategy<Value = (PLPath1<Dyadic>, PLPath1<Dyadic>)> {
        (1usize..6).prop_flat_map(|n| (arb_path(n), arb_path(n))).prop_map(|(a, b)| {
            // give b the horizon of a
            let b = PLPath1::new(a.times().to_vec(), b.values().to_vec()).unwrap();
            (a, b)
        })
    }

    /// Pairs whose difference takes values in `{-s, 0, s}` at breakpoints,
    /// so every crossing lands on a dyadic time.
    fn arb_crossing_pair() -> impl Strategy<Value = (PLPath1<Dyadic>, PLPath1<Dyadic>)> {
        (1usize..6)
            .prop_flat_map(|n| (arb_path(n), proptest::collection::vec(-1i64..=1, n + 1), -3i64..3))
            .prop_map(|(a, signs, k)| {
                let b = a
                    .values()
                    .iter()
                    .zip(signs)
                    .map(|(v, s)| v.clone() - Dyadic::new(s, k))
                    .collect();
                let b = PLPath1::new(a.times().to_vec(), b).unwrap();
                (a, b)
            })
    }

    proptest! {
        #[test]
        fn jordan_reconstructs_exactly(p in (1usize..8).prop_flat_map(arb_path),
                                       q in (1usize..8).prop_flat_map(arb_path)) {
            let q = PLPath1::new(p.times().to_vec(),
                                 q.values().iter().cloned().cycle().take(p.len()).collect()).unwrap();
            let u = PLPath2::from_components(&p, &q).unwrap();
            let dec = jordan_decompose(&u);
            prop_assert!(dec.m.is_nondecreasing() && dec.mbar.is_nondecreasing());
            for i in 0..u.len() {
                let rebuilt = u.first().add(&dec.m.values()[i]).sub(&dec.mbar.values()[i]);
                prop_assert_eq!(&rebuilt, &u.values()[i]);
            }
            for (a, b) in dec.m.increments().iter().zip(dec.mbar.increments()) {
                prop_assert!(a.x1.is_zero() || b.x1.is_zero());
                prop_assert!(a.x2.is_zero() || b.x2.is_zero());
            }
        }

        #[test]
        fn lattice_identities((a, b) in arb_crossing_pair()) {
            let mn = a.min(&b).unwrap();
            let diff = a.sub(&b).unwrap();
            let lhs1 = a.sub(&mn).unwrap();
            let lhs2 = b.sub(&mn).unwrap();
            let plus = diff.plus_part().unwrap();
            let minus = diff.minus_part().unwrap();
            let (l1, r1) = lhs1.refine(&plus).unwrap();
            let (l2, r2) = lhs2.refine(&minus).unwrap();
            prop_assert_eq!(l1, r1);
            prop_assert_eq!(l2, r2);
            // min is piecewise linear on its own grid: check midpoints
            let t = mn.times();
            for w in t.windows(2) {
                let mid = (w[0].clone() + w[1].clone()).half();
                let want = Dyadic::min(a.eval(&mid).unwrap(), b.eval(&mid).unwrap());
                prop_assert_eq!(mn.eval(&mid).unwrap(), want);
            }
        }

        #[test]
        fn stieltjes_nonneg_and_refinement_invariant((g, m) in arb_pair(), extra in 1i64..6) {
            let g = g.map(|v| v.abs());
            let mut acc = Dyadic::zero();
            let mv: Vec<Dyadic> = m.values().iter().map(|v| { acc = acc.clone() + v.abs(); acc.clone() }).collect();
            let m = PLPath1::new(m.times().to_vec(), mv).unwrap();
            let s = stieltjes(&g, &m).unwrap();
            prop_assert!(s >= Dyadic::zero());
            let mut grid = g.times().to_vec();
            let mid = (grid[0].clone() + grid[1].clone()).half();
            let q = (grid[0].clone() + mid.clone() * Dyadic::from_i64(extra)).scale_pow2(-3);
            grid.push(mid);
            if q > grid[0] && q < *g.end() { grid.push(q); }
            grid.sort();
            grid.dedup();
            let s2 = stieltjes(&g.refine_to(&grid).unwrap(), &m.refine_to(&grid).unwrap()).unwrap();
            prop_assert_eq!(s, s2);
        }
    }
}
