//! CSV and SVG renderings of a likelihood hull.

use std::fmt::Write as _;

use serde::Serialize;

use crate::design::compute_l_star;
use crate::geometry::{rank, LikelihoodHull};
use crate::model::ModelInstance;

/// Scales at which corners of the feasible cone are sampled along its spine.
const CONE_SCALES: [f64; 5] = [0.25, 0.5, 1.0, 2.0, 4.0];

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PlotRow {
    pub kind: String,
    pub label: String,
    pub l: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HullPlot {
    pub reference: usize,
    /// Labels of the likelihood coordinates, one per effort.
    pub coordinates: Vec<String>,
    pub dim_t: usize,
    pub rows: Vec<PlotRow>,
}

/// Collects generators, recession directions, the origin, `l*` (when the
/// reference effort has positive surplus over `e_1`) and corners of the
/// reference effort's feasible cone. The cone `{l : l_j >= (c* - c_j)/w}` is
/// a union of orthants whose corners run along the spine `c* - c`.
pub fn hull_plot(m: &ModelInstance, hull: &LikelihoodHull) -> HullPlot {
    let reference = hull.reference;
    let ne = m.num_efforts();
    let mut rows = Vec::new();
    for (label, g) in hull.labels.iter().zip(&hull.generators) {
        rows.push(PlotRow {
            kind: "generator".into(),
            label: label.clone(),
            l: g.clone(),
        });
    }
    for (label, d) in hull.direction_labels.iter().zip(&hull.directions) {
        rows.push(PlotRow {
            kind: "direction".into(),
            label: label.clone(),
            l: d.clone(),
        });
    }
    rows.push(PlotRow {
        kind: "point".into(),
        label: "origin".into(),
        l: vec![0.0; ne],
    });
    if let Ok(ls) = compute_l_star(m, reference) {
        rows.push(PlotRow {
            kind: "point".into(),
            label: "l_star".into(),
            l: ls.l,
        });
    }
    let spine: Vec<f64> = (0..ne).map(|j| m.cost(reference) - m.cost(j)).collect();
    if spine.iter().any(|&v| v != 0.0) {
        for s in CONE_SCALES {
            rows.push(PlotRow {
                kind: "cone_corner".into(),
                label: format!("w={:.4}", 1.0 / s),
                l: spine.iter().map(|v| v * s).collect(),
            });
        }
    }
    let mut vecs = hull.generators.clone();
    vecs.extend(hull.directions.iter().cloned());
    HullPlot {
        reference,
        coordinates: m.efforts.iter().map(|e| format!("l_{}", e.label)).collect(),
        dim_t: rank(&vecs, 1e-9),
        rows,
    }
}

impl HullPlot {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("kind,label");
        for c in &self.coordinates {
            let _ = write!(out, ",{c}");
        }
        out.push('\n');
        for r in &self.rows {
            let _ = write!(out, "{},{}", r.kind, r.label);
            for v in &r.l {
                let _ = write!(out, ",{v}");
            }
            out.push('\n');
        }
        out
    }

    /// Projection on coordinates `(a, b)`: the hull polygon, its points and
    /// the cone spine.
    pub fn to_svg(&self, a: usize, b: usize) -> String {
        const SIZE: f64 = 480.0;
        const PAD: f64 = 40.0;
        let pts: Vec<(f64, f64)> = self.rows.iter().map(|r| (r.l[a], r.l[b])).collect();
        let (mut x0, mut x1, mut y0, mut y1) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for &(x, y) in &pts {
            x0 = x0.min(x);
            x1 = x1.max(x);
            y0 = y0.min(y);
            y1 = y1.max(y);
        }
        let span = (x1 - x0).max(y1 - y0).max(1e-9);
        let sx = |x: f64| PAD + (x - x0) / span * (SIZE - 2.0 * PAD);
        let sy = |y: f64| SIZE - PAD - (y - y0) / span * (SIZE - 2.0 * PAD);

        let mut svg = String::new();
        let _ = writeln!(
            svg,
            r#"<svg xmlns="http://www.w3.org/2000/svg" width="{SIZE}" height="{SIZE}" viewBox="0 0 {SIZE} {SIZE}" font-family="sans-serif" font-size="11">"#
        );
        let _ = writeln!(svg, r#"<rect width="100%" height="100%" fill="white"/>"#);
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#bbb"/>"##,
            sx(x0), sy(0.0), sx(x0 + span), sy(0.0)
        );
        let _ = writeln!(
            svg,
            r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#bbb"/>"##,
            sx(0.0), sy(y0), sx(0.0), sy(y0 + span)
        );
        let generators: Vec<(f64, f64)> = self
            .rows
            .iter()
            .zip(&pts)
            .filter(|(r, _)| r.kind == "generator")
            .map(|(_, &p)| p)
            .collect();
        let polygon = convex_hull(&generators);
        if polygon.len() >= 2 {
            let path: Vec<String> = polygon.iter().map(|&(x, y)| format!("{:.2},{:.2}", sx(x), sy(y))).collect();
            let _ = writeln!(
                svg,
                r##"<polygon points="{}" fill="#4a90d9" fill-opacity="0.2" stroke="#4a90d9"/>"##,
                path.join(" ")
            );
        }
        let corners: Vec<&(f64, f64)> = self
            .rows
            .iter()
            .zip(&pts)
            .filter(|(r, _)| r.kind == "cone_corner")
            .map(|(_, p)| p)
            .collect();
        if let (Some(first), Some(last)) = (corners.first(), corners.last()) {
            let _ = writeln!(
                svg,
                r##"<line x1="{:.2}" y1="{:.2}" x2="{:.2}" y2="{:.2}" stroke="#d9534f" stroke-dasharray="4 3"/>"##,
                sx(first.0), sy(first.1), sx(last.0), sy(last.1)
            );
        }
        for (r, &(x, y)) in self.rows.iter().zip(&pts) {
            let colour = match (r.kind.as_str(), r.label.as_str()) {
                (_, "l_star") => "#d9534f",
                ("generator", _) => "#1f4e79",
                ("direction", _) => "#8e44ad",
                ("cone_corner", _) => continue,
                _ => "#333",
            };
            let _ = writeln!(
                svg,
                r#"<circle cx="{:.2}" cy="{:.2}" r="3.5" fill="{colour}"/><text x="{:.2}" y="{:.2}">{}</text>"#,
                sx(x),
                sy(y),
                sx(x) + 5.0,
                sy(y) - 5.0,
                r.label
            );
        }
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{:.2}">{} vs {}</text>"#,
            PAD,
            PAD / 2.0,
            self.coordinates[a],
            self.coordinates[b]
        );
        svg.push_str("</svg>\n");
        svg
    }
}

/// Andrew's monotone chain, counter-clockwise.
fn convex_hull(points: &[(f64, f64)]) -> Vec<(f64, f64)> {
    let mut p = points.to_vec();
    p.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
    p.dedup();
    if p.len() < 3 {
        return p;
    }
    let cross = |o: (f64, f64), a: (f64, f64), b: (f64, f64)| {
        (a.0 - o.0) * (b.1 - o.1) - (a.1 - o.1) * (b.0 - o.0)
    };
    let mut hull: Vec<(f64, f64)> = Vec::with_capacity(2 * p.len());
    for pass in 0..2 {
        let start = hull.len();
        let iter: Box<dyn Iterator<Item = &(f64, f64)>> = if pass == 0 {
            Box::new(p.iter())
        } else {
            Box::new(p.iter().rev())
        };
        for &q in iter {
            while hull.len() >= start + 2 && cross(hull[hull.len() - 2], hull[hull.len() - 1], q) <= 0.0 {
                hull.pop();
            }
            hull.push(q);
        }
        hull.pop();
    }
    hull
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::hull_of_f;
    use crate::model::example_one;

    #[test]
    fn example_one_rows_and_svg() {
        let m = example_one();
        let plot = hull_plot(&m, &hull_of_f(&m, 2).unwrap());
        assert_eq!(plot.dim_t, 2);
        let csv = plot.to_csv();
        assert!(csv.starts_with("kind,label,l_e1,l_e2,l_e3\n"));
        assert_eq!(csv.lines().filter(|l| l.starts_with("generator")).count(), 3);
        assert!(csv.contains("point,l_star"));
        let svg = plot.to_svg(0, 1);
        assert!(svg.starts_with("<svg") && svg.contains("<polygon"));
    }

    #[test]
    fn monotone_chain() {
        let sq = [(0.0, 0.0), (1.0, 0.0), (1.0, 1.0), (0.0, 1.0), (0.5, 0.5)];
        let h = convex_hull(&sq);
        assert_eq!(h.len(), 4);
        assert!(!h.contains(&(0.5, 0.5)));
    }
}
