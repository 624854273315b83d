//! Projection of rate systems onto the `(R1, R2)` plane, two-dimensional
//! polygons, and an independent membership oracle.

mod fme;
mod oracle;

use std::fmt::Write as _;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use fme::{fme_project, project_or_empty};
pub use oracle::{membership_oracle, MembershipOracle};

/// Feasibility slack used throughout projection.
pub const FEAS_TOL: f64 = 1e-9;

/// `a1·R1 + a2·R2 <= b` with `max(|a1|, |a2|) = 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct HalfPlane {
    pub a1: Ratio<i64>,
    pub a2: Ratio<i64>,
    pub b: f64,
}

fn gcd(a: i64, b: i64) -> i64 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

fn ratio_f64(r: &Ratio<i64>) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

impl HalfPlane {
    /// From an integer direction; `None` for the zero direction.
    pub fn from_integer(a1: i64, a2: i64, b: f64) -> Option<Self> {
        let m = a1.abs().max(a2.abs());
        if m == 0 {
            return None;
        }
        Some(Self {
            a1: Ratio::new(a1, m),
            a2: Ratio::new(a2, m),
            b: b / m as f64,
        })
    }

    pub fn coeffs(&self) -> [f64; 2] {
        [ratio_f64(&self.a1), ratio_f64(&self.a2)]
    }

    /// `a·p − b`; positive outside.
    pub fn slack(&self, p: [f64; 2]) -> f64 {
        let [a1, a2] = self.coeffs();
        a1 * p[0] + a2 * p[1] - self.b
    }
}

/// Convex polygon in the `(R1, R2)` plane (possibly a segment or a point).
#[derive(Debug, Clone, PartialEq)]
pub struct Polytope2D {
    /// Counterclockwise around the centroid.
    pub vertices: Vec<[f64; 2]>,
    /// Irredundant; each tight at some vertex.
    pub halfplanes: Vec<HalfPlane>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct PolytopeFile {
    vertices: Vec<[f64; 2]>,
    halfplanes: Vec<[f64; 3]>,
}

impl Serialize for Polytope2D {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        PolytopeFile {
            vertices: self.vertices.clone(),
            halfplanes: self
                .halfplanes
                .iter()
                .map(|h| {
                    let [a1, a2] = h.coeffs();
                    [a1, a2, h.b]
                })
                .collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Polytope2D {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let f = PolytopeFile::deserialize(d)?;
        let ratio = |v: f64| {
            Ratio::<i64>::approximate_float(v)
                .ok_or_else(|| D::Error::custom(format!("coefficient {v} is not rational")))
        };
        let halfplanes = f
            .halfplanes
            .iter()
            .map(|[a1, a2, b]| {
                Ok(HalfPlane {
                    a1: ratio(*a1)?,
                    a2: ratio(*a2)?,
                    b: *b,
                })
            })
            .collect::<std::result::Result<_, D::Error>>()?;
        Ok(Polytope2D {
            vertices: f.vertices,
            halfplanes,
        })
    }
}

impl Polytope2D {
    /// Largest half-plane slack at `p`; nonpositive inside.
    pub fn margin(&self, p: [f64; 2]) -> f64 {
        self.halfplanes
            .iter()
            .map(|h| h.slack(p))
            .fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn contains_point(&self, p: [f64; 2], tol: f64) -> bool {
        self.margin(p) <= tol
    }

    /// `max λ·R1 + (1 − λ)·R2` over the region, with its maximizer.
    pub fn support(&self, lambda: f64) -> (f64, [f64; 2]) {
        self.vertices
            .iter()
            .map(|v| (lambda * v[0] + (1.0 - lambda) * v[1], *v))
            .fold((f64::NEG_INFINITY, [0.0, 0.0]), |b, c| {
                if c.0 > b.0 {
                    c
                } else {
                    b
                }
            })
    }

    pub fn max_r1(&self) -> f64 {
        self.vertices.iter().map(|v| v[0]).fold(0.0, f64::max)
    }

    pub fn max_r2(&self) -> f64 {
        self.vertices.iter().map(|v| v[1]).fold(0.0, f64::max)
    }

    /// True iff every vertex of either polygon lies within `tol` (in each
    /// coordinate) of some vertex of the other.
    pub fn same_vertices(&self, other: &Polytope2D, tol: f64) -> bool {
        let covered = |a: &[[f64; 2]], b: &[[f64; 2]]| {
            a.iter().all(|p| {
                b.iter()
                    .any(|q| (p[0] - q[0]).abs() <= tol && (p[1] - q[1]).abs() <= tol)
            })
        };
        covered(&self.vertices, &other.vertices) && covered(&other.vertices, &self.vertices)
    }

    /// Largest coordinate distance from a vertex of one polygon to the
    /// nearest vertex of the other.
    pub fn vertex_distance(&self, other: &Polytope2D) -> f64 {
        let one_way = |a: &[[f64; 2]], b: &[[f64; 2]]| {
            a.iter()
                .map(|p| {
                    b.iter()
                        .map(|q| (p[0] - q[0]).abs().max((p[1] - q[1]).abs()))
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(0.0, f64::max)
        };
        one_way(&self.vertices, &other.vertices).max(one_way(&other.vertices, &self.vertices))
    }

    pub fn is_origin(&self, tol: f64) -> bool {
        self.vertices
            .iter()
            .all(|v| v[0].abs() <= tol && v[1].abs() <= tol)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// `R1,R2` rows, 12 significant digits.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("R1,R2\n");
        for v in &self.vertices {
            let _ = writeln!(out, "{},{}", sig12(v[0]), sig12(v[1]));
        }
        out
    }
}

/// Formats with 12 significant digits, trimming trailing zeros.
pub fn sig12(v: f64) -> String {
    if v == 0.0 || !v.is_finite() {
        return if v.is_finite() {
            "0".into()
        } else {
            v.to_string()
        };
    }
    let s = format!("{:.11e}", v);
    let (mant, exp) = s.split_once('e').expect("exponent form");
    let exp: i32 = exp.parse().expect("integer exponent");
    let mant = mant.trim_end_matches('0').trim_end_matches('.');
    if (-5..12).contains(&exp) {
        let digits = (11 - exp).max(0) as usize;
        let fixed = format!("{:.*}", digits, v);
        if fixed.contains('.') {
            fixed
                .trim_end_matches('0')
                .trim_end_matches('.')
                .to_string()
        } else {
            fixed
        }
    } else {
        format!("{mant}e{exp}")
    }
}

/// True iff every vertex of `inner` satisfies every half-plane of `outer`
/// within `tol`.
pub fn polytope_contains(outer: &Polytope2D, inner: &Polytope2D, tol: f64) -> bool {
    containment_margin(outer, inner) <= tol
}

/// Worst half-plane slack of `outer` over the vertices of `inner`, with the
/// offending vertex.
pub fn containment_violation(outer: &Polytope2D, inner: &Polytope2D) -> (f64, [f64; 2]) {
    inner.vertices.iter().map(|v| (outer.margin(*v), *v)).fold(
        (f64::NEG_INFINITY, [0.0, 0.0]),
        |b, c| if c.0 > b.0 { c } else { b },
    )
}

pub fn containment_margin(outer: &Polytope2D, inner: &Polytope2D) -> f64 {
    containment_violation(outer, inner).0
}

/// Builds the polygon cut out by integer-direction rows `a·R <= b`.
/// Reaching `guard` in either coordinate means the region is unbounded.
pub(crate) fn polygon_from_rows(rows: &[([i64; 2], f64)], guard: f64) -> Result<Polytope2D> {
    let mut lines: Vec<([i64; 2], f64)> = Vec::new();
    for &(a, b) in rows {
        let g = gcd(a[0], a[1]);
        if g == 0 {
            if b < -FEAS_TOL {
                return Err(Error::Infeasible { violation: -b });
            }
            continue;
        }
        let a = [a[0] / g, a[1] / g];
        let b = b / g as f64;
        match lines.iter_mut().find(|(d, _)| *d == a) {
            Some(l) => l.1 = l.1.min(b),
            None => lines.push((a, b)),
        }
    }
    let vertices = polygon_vertices(&lines)?;
    if vertices
        .iter()
        .any(|v| v[0] >= guard - FEAS_TOL || v[1] >= guard - FEAS_TOL)
    {
        return Err(Error::Unbounded);
    }
    let kept = irredundant(&lines, &vertices, guard);
    Ok(Polytope2D {
        vertices,
        halfplanes: kept
            .iter()
            .filter_map(|(a, b)| HalfPlane::from_integer(a[0], a[1], *b))
            .collect(),
    })
}

fn slack(line: &([i64; 2], f64), p: [f64; 2]) -> f64 {
    line.0[0] as f64 * p[0] + line.0[1] as f64 * p[1] - line.1
}

fn scale(line: &([i64; 2], f64)) -> f64 {
    line.0[0].abs().max(line.0[1].abs()) as f64
}

/// Vertices of `{R : a·R <= b for every line}`, counterclockwise, or the
/// infeasibility error. The region must be bounded.
fn polygon_vertices(lines: &[([i64; 2], f64)]) -> Result<Vec<[f64; 2]>> {
    let mut pts: Vec<[f64; 2]> = Vec::new();
    let mut best_violation = f64::INFINITY;
    for i in 0..lines.len() {
        for j in i + 1..lines.len() {
            let ([a, b], e) = lines[i];
            let ([c, d], f) = lines[j];
            let det = a * d - b * c;
            if det == 0 {
                continue;
            }
            let det = det as f64;
            let mut p = [
                (e * d as f64 - b as f64 * f) / det,
                (a as f64 * f - e * c as f64) / det,
            ];
            let worst = lines
                .iter()
                .map(|l| slack(l, p) / scale(l))
                .fold(f64::NEG_INFINITY, f64::max);
            best_violation = best_violation.min(worst);
            if worst > FEAS_TOL {
                continue;
            }
            for x in &mut p {
                if *x <= 0.0 && *x > -FEAS_TOL {
                    *x = 0.0;
                }
            }
            if !pts
                .iter()
                .any(|q| (p[0] - q[0]).abs() <= 1e-10 && (p[1] - q[1]).abs() <= 1e-10)
            {
                pts.push(p);
            }
        }
    }
    if pts.is_empty() {
        return Err(Error::Infeasible {
            violation: best_violation.max(0.0),
        });
    }
    order_ccw(&mut pts);
    Ok(pts)
}

/// Sorts by angle around the centroid, ties broken lexicographically.
pub(crate) fn order_ccw(pts: &mut [[f64; 2]]) {
    let n = pts.len() as f64;
    let cx = pts.iter().map(|p| p[0]).sum::<f64>() / n;
    let cy = pts.iter().map(|p| p[1]).sum::<f64>() / n;
    pts.sort_by(|p, q| {
        let ap = (p[1] - cy).atan2(p[0] - cx);
        let aq = (q[1] - cy).atan2(q[0] - cx);
        ap.total_cmp(&aq)
            .then(p[0].total_cmp(&q[0]))
            .then(p[1].total_cmp(&q[1]))
    });
}

/// Keeps rows tight at some vertex, then drops those implied by the rest.
fn irredundant(
    lines: &[([i64; 2], f64)],
    vertices: &[[f64; 2]],
    guard: f64,
) -> Vec<([i64; 2], f64)> {
    let mut kept: Vec<([i64; 2], f64)> = lines
        .iter()
        .filter(|l| {
            vertices
                .iter()
                .any(|v| slack(l, *v).abs() <= FEAS_TOL * scale(l))
        })
        .copied()
        .collect();
    kept.sort_by(|x, y| {
        let ax = (x.0[1] as f64).atan2(x.0[0] as f64);
        let ay = (y.0[1] as f64).atan2(y.0[0] as f64);
        ax.total_cmp(&ay)
    });
    let bigger = guard * 4.0 + 1.0;
    let boxed = [
        ([1, 0], bigger),
        ([0, 1], bigger),
        ([-1, 0], bigger),
        ([0, -1], bigger),
    ];
    let mut i = 0;
    while i < kept.len() {
        let others: Vec<([i64; 2], f64)> = kept
            .iter()
            .enumerate()
            .filter(|(k, _)| *k != i)
            .map(|(_, l)| *l)
            .chain(boxed)
            .collect();
        let implied = match polygon_vertices(&others) {
            Ok(vs) => vs
                .iter()
                .all(|v| slack(&kept[i], *v) <= FEAS_TOL * scale(&kept[i])),
            Err(_) => false,
        };
        if implied {
            kept.remove(i);
        } else {
            i += 1;
        }
    }
    kept
}

#[cfg(test)]
mod tests {
    use super::*;

    fn square(s: f64) -> Polytope2D {
        polygon_from_rows(
            &[([1, 0], s), ([0, 1], s), ([-1, 0], 0.0), ([0, -1], 0.0)],
            100.0,
        )
        .unwrap()
    }

    #[test]
    fn square_from_rows() {
        let p = square(1.0);
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(p.halfplanes.len(), 4);
        assert!(p.contains_point([0.5, 0.5], 0.0));
        assert!(!p.contains_point([1.5, 0.5], 1e-9));
    }

    #[test]
    fn containment_examples() {
        let p = square(1.0);
        assert!(polytope_contains(&p, &p, 1e-9));
        assert!(!polytope_contains(&p, &square(1.1), 1e-7));
        let origin = polygon_from_rows(
            &[([1, 0], 0.0), ([0, 1], 0.0), ([-1, 0], 0.0), ([0, -1], 0.0)],
            10.0,
        )
        .unwrap();
        assert!(origin.is_origin(0.0));
        assert!(polytope_contains(&p, &origin, 0.0));
    }

    #[test]
    fn redundant_rows_are_pruned() {
        let p = polygon_from_rows(
            &[
                ([1, 0], 1.0),
                ([0, 1], 1.0),
                ([1, 1], 3.0),
                ([2, 2], 4.0),
                ([-1, 0], 0.0),
                ([0, -1], 0.0),
                ([1, 0], 2.0),
            ],
            100.0,
        )
        .unwrap();
        assert_eq!(p.halfplanes.len(), 4);
    }

    #[test]
    fn segment_keeps_end_caps() {
        let p = polygon_from_rows(
            &[([1, 0], 1.0), ([0, 1], 0.0), ([-1, 0], 0.0), ([0, -1], 0.0)],
            100.0,
        )
        .unwrap();
        assert_eq!(p.vertices.len(), 2);
        assert!(p.contains_point([0.5, 0.0], 0.0));
        assert!(!p.contains_point([1.5, 0.0], 1e-9));
        assert!(!p.contains_point([0.5, 0.1], 1e-9));
    }

    #[test]
    fn guard_and_infeasibility() {
        assert!(matches!(
            polygon_from_rows(
                &[([1, 0], 5.0), ([0, 1], 5.0), ([-1, 0], 0.0), ([0, -1], 0.0)],
                5.0
            ),
            Err(Error::Unbounded)
        ));
        assert!(matches!(
            polygon_from_rows(
                &[
                    ([1, 0], -1.0),
                    ([-1, 0], 0.0),
                    ([0, 1], 1.0),
                    ([0, -1], 0.0)
                ],
                5.0
            ),
            Err(Error::Infeasible { .. })
        ));
    }

    #[test]
    fn json_and_csv() {
        let p = square(0.25);
        let back = Polytope2D::from_json(&p.to_json().unwrap()).unwrap();
        assert_eq!(back, p);
        assert!(p.to_csv().starts_with("R1,R2\n"));
        assert_eq!(sig12(0.1 + 0.2), "0.3");
        assert_eq!(sig12(1.0 / 3.0), "0.333333333333");
        assert_eq!(sig12(2.0), "2");
    }
}
