//! Numerical solvers (float mode).
//!
//! [`solve_fixed_point`] iterates one-dimensional reflections coordinate by
//! coordinate; it contracts when `sqrt(|a1 a2|) < 1`. The one-dimensional
//! regulator is computed exactly on piecewise-linear input by inserting the
//! time at which `-h` first exceeds its running maximum on a segment, so a
//! converged result satisfies complementarity up to the stopping tolerance.
//!
//! [`solve_grid`] marches along a time grid and solves a 2x2 linear
//! complementarity problem per step by enumerating support sets.

use crate::classify::ReflectionMatrix2;
use crate::error::{Error, Result};
use crate::path::{merge_times, PLPath1, PLPath2, Vec2};
use crate::scalar::FLOAT_EPS;
use crate::verifier::SolutionTriple;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Sweep {
    /// Both coordinates updated from the previous iterate.
    Jacobi,
    /// The second coordinate sees the freshly updated first one.
    GaussSeidel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    /// Sup-norm change between iterates below which iteration stops.
    pub tol: f64,
    pub max_iter: usize,
    /// Extra breakpoints; merged with those of the driving path.
    pub grid: Option<Vec<f64>>,
    /// Weight of the new iterate, in `(0, 1]`.
    pub damping: f64,
    pub sweep: Sweep,
    /// Starting regulator for the fixed-point iteration; zero when absent.
    pub initial_m: Option<PLPath2<f64>>,
    /// Insert the exact kinks of each one-dimensional reflection. When off,
    /// reflections are evaluated on the base grid only.
    pub exact_crossings: bool,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            tol: 1e-9,
            max_iter: 10_000,
            grid: None,
            damping: 1.0,
            sweep: Sweep::GaussSeidel,
            initial_m: None,
            exact_crossings: true,
        }
    }
}

impl SolveConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0) {
            return Err(Error::Usage(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(Error::Usage("max_iter must be at least 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(Error::Usage(format!("damping must lie in (0, 1], got {}", self.damping)));
        }
        if let Some(grid) = &self.grid {
            PLPath1::constant(grid.clone(), 0.0)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub g: PLPath2<f64>,
    pub m: PLPath2<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub residual: f64,
}

impl SolveResult {
    pub fn triple(&self, r: &ReflectionMatrix2<f64>, f: &PLPath2<f64>) -> SolutionTriple<f64> {
        SolutionTriple::new(r.clone(), f.clone(), self.g.clone(), self.m.clone())
    }
}

/// One-dimensional regulator on grid values:
/// `m_k = max(m_{k-1}, max(0, -h_k))`.
pub fn skorokhod_1d(h: &[f64]) -> Vec<f64> {
    let mut out = Vec::with_capacity(h.len());
    let mut level = 0.0f64;
    for &x in h {
        level = level.max(-x);
        out.push(level);
    }
    out
}

/// One-dimensional regulator of a piecewise-linear path, with a breakpoint
/// inserted wherever `-h` overtakes its running maximum inside a segment.
/// The output is the exact regulator of the interpolated input.
pub fn reflect_path(h: &PLPath1<f64>) -> PLPath1<f64> {
    let t = h.times();
    let v = h.values();
    let scale = 1f64.max(t[0].abs()).max(t[t.len() - 1].abs());
    let mut times = Vec::with_capacity(t.len() + 8);
    let mut vals = Vec::with_capacity(t.len() + 8);
    let mut level = 0f64.max(-v[0]);
    times.push(t[0]);
    vals.push(level);
    for i in 1..t.len() {
        let a = -v[i - 1];
        let b = -v[i];
        if b > level {
            if a < level {
                let tc = t[i - 1] + (t[i] - t[i - 1]) * (level - a) / (b - a);
                if tc - t[i - 1] > FLOAT_EPS * scale && t[i] - tc > FLOAT_EPS * scale {
                    times.push(tc);
                    vals.push(level);
                }
            }
            level = b;
        }
        times.push(t[i]);
        vals.push(level);
    }
    PLPath1::new(times, vals).expect("refinement of a valid grid")
}

fn reflect(h: &PLPath1<f64>, exact: bool) -> PLPath1<f64> {
    if exact {
        reflect_path(h)
    } else {
        PLPath1::new(h.times().to_vec(), skorokhod_1d(h.values())).expect("same grid")
    }
}

/// Drops interior breakpoints that are not on `base` and where the path is
/// locally constant; keeps the iterates from accumulating stale kinks.
fn prune(p: PLPath1<f64>, base: &[f64]) -> PLPath1<f64> {
    let t = p.times();
    let v = p.values();
    if t.len() <= base.len() {
        return p;
    }
    let mut times = Vec::with_capacity(t.len());
    let mut vals = Vec::with_capacity(t.len());
    let mut b = 0;
    for i in 0..t.len() {
        while b < base.len() && base[b] < t[i] {
            b += 1;
        }
        let on_base = b < base.len() && base[b] == t[i];
        let interior = i > 0 && i + 1 < t.len();
        if interior && !on_base && v[i - 1] == v[i] && v[i] == v[i + 1] {
            continue;
        }
        times.push(t[i]);
        vals.push(v[i]);
    }
    PLPath1::new(times, vals).expect("subset of a valid grid")
}

fn damp(old: &PLPath1<f64>, new: PLPath1<f64>, alpha: f64) -> Result<PLPath1<f64>> {
    if alpha == 1.0 {
        return Ok(new);
    }
    old.scale(&(1.0 - alpha)).add_scaled(&alpha, &new)
}

fn sup_diff(a: &PLPath1<f64>, b: &PLPath1<f64>) -> Result<f64> {
    Ok(a.sub(b)?.sup_norm())
}

fn check_driving_path(f: &PLPath2<f64>) -> Result<()> {
    if !f.first().is_nonneg() {
        return Err(Error::InvalidInput(format!(
            "driving path must start in the quadrant, f(0) = {:?}",
            f.first().to_f64()
        )));
    }
    if f.values().iter().any(|v| !v.x1.is_finite() || !v.x2.is_finite()) {
        return Err(Error::InvalidInput("driving path has non-finite values".into()));
    }
    Ok(())
}

fn base_grid(f: &PLPath2<f64>, cfg: &SolveConfig) -> Result<Vec<f64>> {
    match &cfg.grid {
        None => Ok(f.times().to_vec()),
        Some(g) => {
            let grid = PLPath1::constant(g.clone(), 0.0)?;
            f.component(0).refine(&grid)?;
            Ok(merge_times(f.times(), g))
        }
    }
}

fn assemble(r: &ReflectionMatrix2<f64>, f: &PLPath2<f64>, m: PLPath2<f64>) -> Result<(PLPath2<f64>, PLPath2<f64>)> {
    let (f, m) = f.refine(&m)?;
    let g = f.add(&r.apply_path(&m))?;
    Ok((g, m))
}

/// Iterates `m_j <- reflect(f_j + R_{j,i} m_i)` until the sup-norm change is
/// below `cfg.tol`.
pub fn solve_fixed_point(r: &ReflectionMatrix2<f64>, f: &PLPath2<f64>, cfg: &SolveConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_driving_path(f)?;
    let base = base_grid(f, cfg)?;
    let f = f.refine_to(&base)?;
    let (f1, f2) = (f.component(0), f.component(1));
    let (mut m1, mut m2) = match &cfg.initial_m {
        Some(m0) => {
            let m0 = m0.refine_to(&merge_times(&base, m0.times()))?;
            (m0.component(0), m0.component(1))
        }
        None => {
            let zero = PLPath1::constant(base.clone(), 0.0)?;
            (zero.clone(), zero)
        }
    };
    let alpha = cfg.damping;
    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    let mut converged = false;
    while iterations < cfg.max_iter {
        iterations += 1;
        let h1 = f1.add_scaled(&r.a1, &m2)?;
        let new1 = damp(&m1, reflect(&h1, cfg.exact_crossings), alpha)?;
        let source = match cfg.sweep {
            Sweep::GaussSeidel => &new1,
            Sweep::Jacobi => &m1,
        };
        let h2 = f2.add_scaled(&r.a2, source)?;
        let new2 = damp(&m2, reflect(&h2, cfg.exact_crossings), alpha)?;
        residual = sup_diff(&new1, &m1)?.max(sup_diff(&new2, &m2)?);
        m1 = prune(new1, &base);
        m2 = prune(new2, &base);
        if residual < cfg.tol {
            converged = true;
            break;
        }
    }
    let (g, m) = assemble(r, &f, PLPath2::from_components(&m1, &m2)?)?;
    Ok(SolveResult {
        g,
        m,
        iterations,
        converged,
        residual,
    })
}

/// One time step of the discrete complementarity problem: find
/// `dm >= 0` with `g = g_prev + delta_f + R dm >= 0` and `dm_j g_j = 0`.
///
/// All four support sets are tried; among admissible ones the smallest
/// support wins, then the lexicographically smallest `dm`.
pub fn lcp_step(
    r: &ReflectionMatrix2<f64>,
    g_prev: &Vec2<f64>,
    delta_f: &Vec2<f64>,
) -> Result<(Vec2<f64>, Vec2<f64>)> {
    let w = g_prev.add(delta_f);
    let (a1, a2) = (r.a1, r.a2);
    let eps = FLOAT_EPS
        * (1.0 + g_prev.sup_norm() + delta_f.sup_norm())
        * (1.0 + a1.abs() + a2.abs());
    let ok = |x: f64| x >= -eps;

    let mut candidates: Vec<(usize, [f64; 2])> = Vec::with_capacity(4);
    if ok(w.x1) && ok(w.x2) {
        candidates.push((0, [0.0, 0.0]));
    }
    {
        let d1 = -w.x1;
        if ok(d1) && ok(w.x2 + a2 * d1) {
            candidates.push((1, [d1, 0.0]));
        }
    }
    {
        let d2 = -w.x2;
        if ok(d2) && ok(w.x1 + a1 * d2) {
            candidates.push((1, [0.0, d2]));
        }
    }
    let det = 1.0 - a1 * a2;
    if det.abs() > eps {
        let d1 = (-w.x1 + a1 * w.x2) / det;
        let d2 = (a2 * w.x1 - w.x2) / det;
        if ok(d1) && ok(d2) {
            candidates.push((2, [d1, d2]));
        }
    }
    let best = candidates
        .into_iter()
        .min_by(|a, b| {
            a.0.cmp(&b.0)
                .then(a.1[0].total_cmp(&b.1[0]))
                .then(a.1[1].total_cmp(&b.1[1]))
        })
        .ok_or(Error::StepInfeasible { step: 0 })?;
    let dm = Vec2::new(best.1[0].max(0.0), best.1[1].max(0.0));
    let raw = w.add(&r.apply(&dm));
    let g = Vec2::new(
        if dm.x1 > 0.0 { 0.0 } else { raw.x1.max(0.0) },
        if dm.x2 > 0.0 { 0.0 } else { raw.x2.max(0.0) },
    );
    Ok((g, dm))
}

/// Time-marching solver built from [`lcp_step`].
pub fn solve_grid(r: &ReflectionMatrix2<f64>, f: &PLPath2<f64>, cfg: &SolveConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_driving_path(f)?;
    let base = base_grid(f, cfg)?;
    let f = f.refine_to(&base)?;
    let fv = f.values();
    let mut g = Vec::with_capacity(fv.len());
    let mut m = Vec::with_capacity(fv.len());
    g.push(fv[0].clone());
    m.push(Vec2::zero());
    let mut residual = 0f64;
    for k in 1..fv.len() {
        let delta_f = fv[k].sub(&fv[k - 1]);
        let (g_next, dm) = lcp_step(r, &g[k - 1], &delta_f).map_err(|e| match e {
            Error::StepInfeasible { .. } => Error::StepInfeasible { step: k - 1 },
            other => other,
        })?;
        let m_next = m[k - 1].add(&dm);
        residual = residual.max(g_next.sub(&fv[k]).sub(&r.apply(&m_next)).sup_norm());
        g.push(g_next);
        m.push(m_next);
    }
    Ok(SolveResult {
        g: PLPath2::new(base.clone(), g)?,
        m: PLPath2::new(base, m)?,
        iterations: fv.len() - 1,
        converged: true,
        residual,
    })
}
