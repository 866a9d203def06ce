//! SVG rendering of the counterexample spiral.

use std::fmt::Write;

use skorokhod::{CounterexampleBundle, Real};

#[derive(Debug, Clone, PartialEq)]
pub struct FigureOptions {
    /// Width and height of the square canvas in pixels.
    pub size: u32,
    /// Show only the breakpoints `t_n` with `n <= from_index`.
    pub from_index: Option<usize>,
}

impl Default for FigureOptions {
    fn default() -> Self {
        FigureOptions {
            size: 600,
            from_index: None,
        }
    }
}

fn num(x: f64) -> String {
    let s = format!("{x:.3}");
    if s == "-0.000" {
        "0.000".into()
    } else {
        s
    }
}

/// The path `u` in the `(u1, u2)` plane with the lines `u1 + u2 = 0` and
/// `u1 + a1 u2 = 0`, breakpoints marked and labelled by index. Output
/// depends only on the bundle and the options.
pub fn emit_figure<T: Real>(b: &CounterexampleBundle<T>, opts: &FigureOptions) -> String {
    let depth = b.depth;
    let last = opts.from_index.unwrap_or(depth).min(depth);
    // values are stored from t_depth up to t_0
    let pts: Vec<(usize, [f64; 2])> = b
        .u
        .values()
        .iter()
        .enumerate()
        .map(|(i, v)| (depth - i, v.to_f64()))
        .filter(|(n, _)| *n <= last)
        .collect();
    let extent = pts
        .iter()
        .map(|(_, p)| p[0].abs().max(p[1].abs()))
        .fold(0.0f64, f64::max)
        .max(f64::MIN_POSITIVE);
    let size = opts.size.max(64) as f64;
    let centre = size / 2.0;
    let scale = 0.42 * size / extent;
    let map = |p: [f64; 2]| (centre + p[0] * scale, centre - p[1] * scale);
    let half = 1.2 * extent;
    let inv = 1.0 / b.r.a1.to_f64().abs();

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{0}" height="{0}" viewBox="0 0 {0} {0}">"#,
        num(size)
    );
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    for (label, slope) in [("u1+u2=0", -1.0), ("u1+a1*u2=0", inv)] {
        let (x0, y0) = map([-half, -half * slope]);
        let (x1, y1) = map([half, half * slope]);
        let _ = writeln!(
            s,
            r#"<line x1="{}" y1="{}" x2="{}" y2="{}" stroke="gray" stroke-dasharray="4 3"><title>{label}</title></line>"#,
            num(x0),
            num(y0),
            num(x1),
            num(y1)
        );
    }
    let poly: Vec<String> = pts
        .iter()
        .map(|(_, p)| {
            let (x, y) = map(*p);
            format!("{},{}", num(x), num(y))
        })
        .collect();
    let _ = writeln!(
        s,
        r#"<polyline points="{}" fill="none" stroke="green" stroke-width="1.5"/>"#,
        poly.join(" ")
    );
    for (n, p) in &pts {
        let (x, y) = map(*p);
        let _ = writeln!(s, r#"<circle cx="{}" cy="{}" r="2.5" fill="black"/>"#, num(x), num(y));
        if (p[0].abs().max(p[1].abs())) * scale >= 12.0 {
            let _ = writeln!(
                s,
                r#"<text x="{}" y="{}" font-family="sans-serif" font-size="11">t{n}</text>"#,
                num(x + 4.0),
                num(y - 4.0)
            );
        }
    }
    s.push_str("</svg>\n");
    s
}
