//! Static SVG of an environment with pursuer paths.

use std::fmt::Write;

use pursuit_core::geometry::{Environment, Point};

const WIDTH: f64 = 800.0;
const MARGIN: f64 = 20.0;
const COLORS: [&str; 8] = ["#d62728", "#1f77b4", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#17becf"];

/// `paths[k][i]` is pursuer `i` at waypoint `k`.
pub fn render(env: &Environment, paths: &[Vec<Point>], web: Option<&[Point]>) -> String {
    let (lo, hi) = env.bounds();
    let scale = (WIDTH - 2.0 * MARGIN) / (hi.x - lo.x).max(hi.y - lo.y);
    let height = (hi.y - lo.y) * scale + 2.0 * MARGIN;
    // Flip y so the drawing has the usual mathematical orientation.
    let xy = |p: Point| ((p.x - lo.x) * scale + MARGIN, (hi.y - p.y) * scale + MARGIN);
    let ring = |pts: &[Point]| {
        let mut d = String::new();
        for (k, &p) in pts.iter().enumerate() {
            let (x, y) = xy(p);
            write!(d, "{}{x:.2},{y:.2} ", if k == 0 { "M" } else { "L" }).unwrap();
        }
        d.push('Z');
        d
    };

    let mut s = String::new();
    writeln!(s, r#"<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH:.0}" height="{height:.0}" viewBox="0 0 {WIDTH:.0} {height:.0}">"#).unwrap();
    let mut d = ring(env.outer());
    for h in env.holes() {
        d.push(' ');
        d.push_str(&ring(h));
    }
    writeln!(s, r##"<path d="{d}" fill="#f4f4f4" fill-rule="evenodd" stroke="#222" stroke-width="1.5"/>"##).unwrap();

    if let Some(points) = web {
        for &p in points {
            let (x, y) = xy(p);
            writeln!(s, r##"<circle cx="{x:.2}" cy="{y:.2}" r="2.5" fill="#999"/>"##).unwrap();
        }
    }

    let n = paths.first().map_or(0, Vec::len);
    for i in 0..n {
        let color = COLORS[i % COLORS.len()];
        let pts: Vec<String> = paths
            .iter()
            .map(|w| {
                let (x, y) = xy(w[i]);
                format!("{x:.2},{y:.2}")
            })
            .collect();
        writeln!(
            s,
            r#"<polyline points="{}" fill="none" stroke="{color}" stroke-width="2" stroke-opacity="0.8"/>"#,
            pts.join(" ")
        )
        .unwrap();
        for w in paths {
            let (x, y) = xy(w[i]);
            writeln!(s, r#"<circle cx="{x:.2}" cy="{y:.2}" r="3.5" fill="{color}"/>"#).unwrap();
        }
    }
    s.push_str("</svg>\n");
    s
}
