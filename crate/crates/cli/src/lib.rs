//! Command-line front end.
//!
//! Machine-readable results go to standard output as JSON, human summaries
//! to standard error. Exit status is 0 on success, 1 when a verification
//! fails or a solve does not converge, and 2 on usage or input errors.

pub mod figure;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use skorokhod::counterexample::DEFAULT_DEPTH;
use skorokhod::io::{
    any_bundle_to_json, classification_to_json, diagnostics_to_json, path_from_json, report_to_json,
    scalar_to_json, solve_result_to_json, triple_to_json, AnyTriple,
};
use skorokhod::{
    build_auto, check_e2_signs, check_identities, classify, compare_solutions, normalize, solve_fixed_point,
    solve_grid, verify, verify_bundle, AnyBundle, CounterexampleBundle, Dyadic, Error, GeneralMatrix2, Mode,
    Real, ReflectionMatrix2, Scalar, SolutionTriple, SolveConfig, Sweep, VerifyOptions,
};

pub use figure::{emit_figure, FigureOptions};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "skorokhod", version, about = "Two-dimensional Skorokhod problems on the quadrant")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Exact,
    Float,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Float => Mode::Float,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Method {
    Fixed,
    Grid,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepArg {
    GaussSeidel,
    Jacobi,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Classify R = [[1, a1], [a2, 1]], or a general matrix after normalization.
    Classify {
        #[arg(long, allow_hyphen_values = true, required_unless_present = "general")]
        a1: Option<String>,
        #[arg(long, allow_hyphen_values = true, required_unless_present = "general")]
        a2: Option<String>,
        /// r11,r12,r21,r22 with positive diagonal.
        #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["a1", "a2"])]
        general: Option<String>,
        /// Defaults to exact when every entry is dyadic.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
    },
    /// Solve for a piecewise-linear driving path (float mode).
    Solve {
        /// a1,a2
        #[arg(long, allow_hyphen_values = true)]
        matrix: String,
        /// Driving path document.
        #[arg(long)]
        f: PathBuf,
        #[arg(long, value_enum, default_value = "fixed")]
        method: Method,
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
        #[arg(long, default_value_t = 10_000)]
        max_iter: usize,
        #[arg(long, default_value_t = 1.0)]
        damping: f64,
        #[arg(long, value_enum, default_value = "gauss-seidel")]
        sweep: SweepArg,
        /// Add a uniform grid with this many steps to the path's breakpoints.
        #[arg(long)]
        grid_steps: Option<usize>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Build the two-solution construction for R = [[1, a1], [1, 1]], a1 < -1.
    Counterexample {
        #[arg(long, allow_hyphen_values = true)]
        a1: String,
        #[arg(long, default_value_t = DEFAULT_DEPTH)]
        depth: usize,
        /// Defaults to exact when the construction is dyadic.
        #[arg(long, value_enum)]
        mode: Option<ModeArg>,
        /// Verify both solutions and exit 1 if either fails.
        #[arg(long)]
        verify: bool,
        /// Verification tolerance; 0 in exact mode and 1e-9 in float mode by default.
        #[arg(long)]
        tol: Option<String>,
        /// Largest acceptable tail bound.
        #[arg(long, default_value = "1/262144")]
        tail_tol: String,
        /// Write the full bundle here.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write the first solution as a triple document.
        #[arg(long)]
        triple1: Option<PathBuf>,
        /// Write the second solution as a triple document.
        #[arg(long)]
        triple2: Option<PathBuf>,
        /// Also draw the spiral.
        #[arg(long)]
        figure: Option<PathBuf>,
        #[arg(long, default_value_t = 600)]
        size: u32,
        /// Draw only t_n with n <= this index.
        #[arg(long)]
        from_index: Option<usize>,
    },
    /// Check whether a triple solves the problem.
    Verify {
        #[arg(long)]
        triple: PathBuf,
        /// a1,a2; overrides the matrix stored in the triple.
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        /// 0 in exact mode and 1e-9 in float mode by default.
        #[arg(long)]
        tol: Option<String>,
        /// Defaults to the tolerance.
        #[arg(long)]
        tail_tol: Option<String>,
        /// Also check support segment by segment.
        #[arg(long)]
        strict: bool,
    },
    /// Uniqueness diagnostics for two solutions of the same problem.
    Compare {
        #[arg(long)]
        s1: PathBuf,
        #[arg(long)]
        s2: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        matrix: Option<String>,
        #[arg(long)]
        tol: Option<String>,
    },
    /// Draw the spiral of the two-solution construction as SVG.
    Figure {
        #[arg(long, allow_hyphen_values = true, default_value = "-2")]
        a1: String,
        #[arg(long, default_value_t = 28)]
        depth: usize,
        #[arg(long, default_value_t = 600)]
        size: u32,
        #[arg(long)]
        from_index: Option<usize>,
        /// Standard output when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Failure that maps to an exit status.
enum Failure {
    Usage(String),
    Lib(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Lib(e)
    }
}

type CmdResult = std::result::Result<i32, Failure>;

struct Io<'a> {
    out: &'a mut dyn Write,
    err: &'a mut dyn Write,
}

impl Io<'_> {
    fn json(&mut self, v: &Value) {
        let _ = writeln!(self.out, "{}", serde_json::to_string_pretty(v).expect("serializable"));
    }

    fn note(&mut self, msg: impl AsRef<str>) {
        let _ = writeln!(self.err, "{}", msg.as_ref());
    }
}

/// Parses `argv` (including the program name) and runs the command.
pub fn run<I, S>(argv: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            if code == EXIT_OK {
                let _ = write!(out, "{text}");
            } else {
                let _ = write!(err, "{text}");
            }
            return code;
        }
    };
    let mut io = Io { out, err };
    match dispatch(cli.command, &mut io) {
        Ok(code) => code,
        Err(Failure::Usage(msg)) => {
            io.note(format!("error: {msg}"));
            EXIT_USAGE
        }
        Err(Failure::Lib(e)) => {
            io.note(format!("error: {e}"));
            EXIT_USAGE
        }
    }
}

fn dispatch(cmd: Command, io: &mut Io) -> CmdResult {
    match cmd {
        Command::Classify { a1, a2, general, mode } => cmd_classify(a1, a2, general, mode, io),
        Command::Solve {
            matrix,
            f,
            method,
            tol,
            max_iter,
            damping,
            sweep,
            grid_steps,
            out,
        } => {
            let cfg = SolveConfig {
                tol,
                max_iter,
                damping,
                sweep: match sweep {
                    SweepArg::GaussSeidel => Sweep::GaussSeidel,
                    SweepArg::Jacobi => Sweep::Jacobi,
                },
                ..SolveConfig::default()
            };
            cmd_solve(&matrix, &f, method, cfg, grid_steps, out.as_deref(), io)
        }
        Command::Counterexample {
            a1,
            depth,
            mode,
            verify,
            tol,
            tail_tol,
            out,
            triple1,
            triple2,
            figure,
            size,
            from_index,
        } => {
            let bundle = build_auto(&parse_auto(&a1)?, depth, mode.map(Mode::from))?;
            let fig = FigureOptions { size, from_index };
            let paths = Outputs {
                out,
                triple1,
                triple2,
                figure,
            };
            match &bundle {
                AnyBundle::Exact(b) => cmd_counterexample(b, &bundle, verify, tol, &tail_tol, &paths, &fig, io),
                AnyBundle::Float(b) => cmd_counterexample(b, &bundle, verify, tol, &tail_tol, &paths, &fig, io),
            }
        }
        Command::Verify {
            triple,
            matrix,
            tol,
            tail_tol,
            strict,
        } => {
            let doc = read_json(&triple)?;
            let m = matrix.as_deref().map(split_pair).transpose()?;
            match AnyTriple::from_json(&doc, m)? {
                AnyTriple::Exact(t) => cmd_verify(&t, tol, tail_tol, strict, io),
                AnyTriple::Float(t) => cmd_verify(&t, tol, tail_tol, strict, io),
            }
        }
        Command::Compare { s1, s2, matrix, tol } => {
            let m = matrix.as_deref().map(split_pair).transpose()?;
            let t1 = AnyTriple::from_json(&read_json(&s1)?, m)?;
            let t2 = AnyTriple::from_json(&read_json(&s2)?, m)?;
            match (t1, t2) {
                (AnyTriple::Exact(a), AnyTriple::Exact(b)) => cmd_compare(&a, &b, tol, io),
                (AnyTriple::Float(a), AnyTriple::Float(b)) => cmd_compare(&a, &b, tol, io),
                _ => Err(Error::ModeMismatch.into()),
            }
        }
        Command::Figure {
            a1,
            depth,
            size,
            from_index,
            out,
        } => {
            let opts = FigureOptions { size, from_index };
            let svg = match build_auto(&parse_auto(&a1)?, depth, None)? {
                AnyBundle::Exact(b) => emit_figure(&b, &opts),
                AnyBundle::Float(b) => emit_figure(&b, &opts),
            };
            match out {
                Some(p) => {
                    write_file(&p, &svg)?;
                    io.note(format!("wrote {}", p.display()));
                }
                None => {
                    let _ = write!(io.out, "{svg}");
                }
            }
            Ok(EXIT_OK)
        }
    }
}

fn read_json(p: &Path) -> std::result::Result<Value, Failure> {
    let text = fs::read_to_string(p).map_err(|e| Failure::Usage(format!("cannot read {}: {e}", p.display())))?;
    Ok(serde_json::from_str(&text).map_err(Error::from)?)
}

fn write_file(p: &Path, contents: &str) -> std::result::Result<(), Failure> {
    fs::write(p, contents).map_err(|e| Failure::Usage(format!("cannot write {}: {e}", p.display())))
}

fn write_json(p: &Path, v: &Value) -> std::result::Result<(), Failure> {
    write_file(p, &(serde_json::to_string_pretty(v).expect("serializable") + "\n"))
}

fn split_pair(s: &str) -> std::result::Result<(&str, &str), Failure> {
    s.split_once(',')
        .map(|(a, b)| (a.trim(), b.trim()))
        .ok_or_else(|| Failure::Usage(format!("expected a1,a2 but got {s:?}")))
}

/// Exact when the literal is dyadic, float otherwise.
fn parse_auto(s: &str) -> std::result::Result<Scalar, Failure> {
    Scalar::parse(s, Mode::Exact)
        .or_else(|_| Scalar::parse(s, Mode::Float))
        .map_err(Failure::from)
}

fn parse_in<T: Real>(s: &str) -> std::result::Result<T, Failure> {
    Ok(T::from_scalar(&Scalar::parse(s, T::MODE)?)?)
}

fn default_tol<T: Real>(tol: Option<String>) -> std::result::Result<T, Failure> {
    match tol {
        Some(s) => parse_in(&s),
        None => match T::MODE {
            Mode::Exact => Ok(T::zero()),
            Mode::Float => parse_in("1e-9"),
        },
    }
}

fn cmd_classify(
    a1: Option<String>,
    a2: Option<String>,
    general: Option<String>,
    mode: Option<ModeArg>,
    io: &mut Io,
) -> CmdResult {
    let entries: Vec<String> = match (&general, a1, a2) {
        (Some(g), _, _) => {
            let v: Vec<String> = g.split(',').map(|s| s.trim().to_string()).collect();
            if v.len() != 4 {
                return Err(Failure::Usage(format!("--general needs four entries, got {g:?}")));
            }
            v
        }
        (None, Some(a1), Some(a2)) => vec![a1, a2],
        _ => return Err(Failure::Usage("give --a1 and --a2, or --general".into())),
    };
    let mode = match mode {
        Some(m) => m.into(),
        None if entries.iter().all(|e| Scalar::parse(e, Mode::Exact).is_ok()) => Mode::Exact,
        None => Mode::Float,
    };
    fn go<T: Real>(entries: &[String], io: &mut Io) -> CmdResult {
        let vals = entries.iter().map(|e| parse_in::<T>(e)).collect::<Result<Vec<_>, _>>()?;
        let (r, diag) = if vals.len() == 4 {
            let g = GeneralMatrix2 {
                r11: vals[0].clone(),
                r12: vals[1].clone(),
                r21: vals[2].clone(),
                r22: vals[3].clone(),
            };
            let (r, d1, d2) = normalize(&g)?;
            (r, Some([d1, d2]))
        } else {
            (ReflectionMatrix2::new(vals[0].clone(), vals[1].clone()), None)
        };
        let c = classify(&r);
        let mut doc = classification_to_json(&r, &c);
        if let Some([d1, d2]) = diag {
            doc["diagonal"] = json!([scalar_to_json(&d1), scalar_to_json(&d2)]);
        }
        io.json(&doc);
        io.note(format!(
            "{}: spectral radius {:.8}; {}",
            c.regime.label(),
            c.radius.value,
            c.regime.uniqueness_note()
        ));
        Ok(EXIT_OK)
    }
    match mode {
        Mode::Exact => go::<Dyadic>(&entries, io),
        Mode::Float => go::<f64>(&entries, io),
    }
}

fn cmd_solve(
    matrix: &str,
    f: &Path,
    method: Method,
    mut cfg: SolveConfig,
    grid_steps: Option<usize>,
    out: Option<&Path>,
    io: &mut Io,
) -> CmdResult {
    let (a1, a2) = split_pair(matrix)?;
    let r = ReflectionMatrix2::new(parse_in::<f64>(a1)?, parse_in::<f64>(a2)?);
    let path = path_from_json::<f64>(&read_json(f)?)?;
    if let Some(n) = grid_steps {
        if n == 0 {
            return Err(Failure::Usage("--grid-steps must be positive".into()));
        }
        let (s, e) = (*path.start(), *path.end());
        cfg.grid = Some((0..=n).map(|k| s + (e - s) * k as f64 / n as f64).collect());
    }
    let res = match method {
        Method::Fixed => solve_fixed_point(&r, &path, &cfg)?,
        Method::Grid => solve_grid(&r, &path, &cfg)?,
    };
    let doc = solve_result_to_json(&r, &path, &res);
    match out {
        Some(p) => {
            write_json(p, &doc)?;
            io.json(&json!({
                "out": p.display().to_string(),
                "iterations": res.iterations,
                "converged": res.converged,
                "residual": res.residual,
            }));
        }
        None => io.json(&doc),
    }
    io.note(format!(
        "{} after {} iteration(s), last change {:e}",
        if res.converged { "converged" } else { "did not converge" },
        res.iterations,
        res.residual
    ));
    Ok(if res.converged { EXIT_OK } else { EXIT_FAIL })
}

struct Outputs {
    out: Option<PathBuf>,
    triple1: Option<PathBuf>,
    triple2: Option<PathBuf>,
    figure: Option<PathBuf>,
}

#[allow(clippy::too_many_arguments)]
fn cmd_counterexample<T: Real>(
    b: &CounterexampleBundle<T>,
    any: &AnyBundle,
    do_verify: bool,
    tol: Option<String>,
    tail_tol: &str,
    paths: &Outputs,
    fig: &FigureOptions,
    io: &mut Io,
) -> CmdResult {
    if let Some(p) = &paths.out {
        write_json(p, &any_bundle_to_json(any))?;
    }
    if let Some(p) = &paths.triple1 {
        write_json(p, &triple_to_json(&b.triple()))?;
    }
    if let Some(p) = &paths.triple2 {
        write_json(p, &triple_to_json(&b.triple_bar()))?;
    }
    if let Some(p) = &paths.figure {
        write_file(p, &emit_figure(b, fig))?;
    }
    let gap_at_1 = b.gbar.last().sub(b.g.last());
    let mut doc = json!({
        "mode": T::MODE,
        "matrix": [scalar_to_json(&b.r.a1), scalar_to_json(&b.r.a2)],
        "depth": b.depth,
        "represented_start": scalar_to_json(b.u.start()),
        "tail_bound": scalar_to_json(&b.tail_bound),
        "gap_at_1": [scalar_to_json(&gap_at_1.x1), scalar_to_json(&gap_at_1.x2)],
        "identities": check_identities(b),
    });
    io.note(format!(
        "built {:?} construction, depth {}, tail bound {:e}, solutions differ by ({}, {}) at t = 1",
        T::MODE,
        b.depth,
        b.tail_bound.to_f64(),
        gap_at_1.x1.to_f64(),
        gap_at_1.x2.to_f64()
    ));
    let mut code = EXIT_OK;
    if do_verify {
        let tol: T = default_tol(tol)?;
        let tail_tol: T = parse_in(tail_tol)?;
        let [r1, r2] = verify_bundle(b, &tol, &tail_tol)?;
        let pass = r1.pass && r2.pass && check_identities(b);
        doc["verification"] = json!([report_to_json(&r1), report_to_json(&r2)]);
        doc["pass"] = json!(pass);
        io.note(format!(
            "solution 1: {}; solution 2: {}",
            if r1.pass { "pass" } else { "FAIL" },
            if r2.pass { "pass" } else { "FAIL" }
        ));
        if !pass {
            code = EXIT_FAIL;
        }
    }
    io.json(&doc);
    Ok(code)
}

fn cmd_verify<T: Real>(
    t: &SolutionTriple<T>,
    tol: Option<String>,
    tail_tol: Option<String>,
    strict: bool,
    io: &mut Io,
) -> CmdResult {
    let mut opts = VerifyOptions::new(default_tol::<T>(tol)?);
    if strict {
        opts = opts.strict();
    }
    if let Some(tt) = tail_tol {
        opts = opts.with_tail_tol(parse_in(&tt)?);
    }
    let rep = verify(t, &opts)?;
    io.json(&report_to_json(&rep));
    if rep.pass {
        io.note("pass");
        Ok(EXIT_OK)
    } else {
        let why = if rep.failures.is_empty() {
            "tail bound above tolerance".to_string()
        } else {
            rep.failures.join(", ")
        };
        io.note(format!("FAIL: {why}"));
        Ok(EXIT_FAIL)
    }
}

fn cmd_compare<T: Real>(a: &SolutionTriple<T>, b: &SolutionTriple<T>, tol: Option<String>, io: &mut Io) -> CmdResult {
    let tol: T = default_tol(tol)?;
    let d = compare_solutions(a, b, &tol)?;
    let crit = ReflectionMatrix2::<T>::critical();
    let e2 = if a.r == crit {
        Some(check_e2_signs(a, b, &tol)?)
    } else {
        None
    };
    io.json(&diagnostics_to_json(&d, e2.as_ref()));
    io.note(format!(
        "max |m1 - m2| = {:e}; v {} on its support",
        d.max_v.to_f64(),
        if d.v_monotone_on_support { "nonincreasing" } else { "increases" }
    ));
    Ok(EXIT_OK)
}
