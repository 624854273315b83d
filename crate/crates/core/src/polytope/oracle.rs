//! Membership by exhaustive vertex enumeration of the full rate polytope.

use crate::error::Result;
use crate::region::{RateSystem, Sense};

const TOL: f64 = 1e-9;
const PIVOT_TOL: f64 = 1e-9;

/// Projected vertex hull of a rate system, built without elimination.
#[derive(Debug, Clone)]
pub struct MembershipOracle {
    /// Counterclockwise hull of the projected vertices; empty when the
    /// system has no nonnegative solution.
    hull: Vec<[f64; 2]>,
}

/// Decides whether `point` lies in the projection of `system`.
pub fn membership_oracle(system: &RateSystem, point: [f64; 2]) -> Result<bool> {
    Ok(MembershipOracle::new(system)?.contains(point, TOL))
}

struct Plane {
    a: Vec<f64>,
    b: f64,
}

struct Search<'a> {
    n: usize,
    ineqs: &'a [Plane],
    /// Reduced rows `[a | b]` with their pivot columns.
    basis: Vec<(Vec<f64>, usize)>,
    points: Vec<Vec<f64>>,
}

impl Search<'_> {
    /// Reduces `row` against the current basis; `None` if it is dependent.
    fn reduce(&self, a: &[f64], b: f64) -> Option<(Vec<f64>, usize)> {
        let mut r: Vec<f64> = a.iter().copied().chain([b]).collect();
        for (e, p) in &self.basis {
            let f = r[*p] / e[*p];
            if f != 0.0 {
                for (x, y) in r.iter_mut().zip(e) {
                    *x -= f * y;
                }
            }
        }
        let (p, m) = r[..self.n]
            .iter()
            .enumerate()
            .map(|(i, x)| (i, x.abs()))
            .fold((0, 0.0), |b, c| if c.1 > b.1 { c } else { b });
        (m > PIVOT_TOL).then_some((r, p))
    }

    fn solve(&self) -> Vec<f64> {
        let mut x = vec![0.0; self.n];
        for (e, p) in self.basis.iter().rev() {
            let mut rhs = e[self.n];
            for (j, c) in e[..self.n].iter().enumerate() {
                if j != *p {
                    rhs -= c * x[j];
                }
            }
            x[*p] = rhs / e[*p];
        }
        x
    }

    fn dfs(&mut self, start: usize) {
        if self.basis.len() == self.n {
            let x = self.solve();
            let feasible = self
                .ineqs
                .iter()
                .all(|h| h.a.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>() <= h.b + TOL);
            if feasible {
                self.points.push(x);
            }
            return;
        }
        let need = self.n - self.basis.len();
        for i in start..self.ineqs.len() {
            if self.ineqs.len() - i < need {
                break;
            }
            if let Some(r) = self.reduce(&self.ineqs[i].a, self.ineqs[i].b) {
                self.basis.push(r);
                self.dfs(i + 1);
                self.basis.pop();
            }
        }
    }
}

impl MembershipOracle {
    pub fn new(system: &RateSystem) -> Result<Self> {
        let n = system.vars.len();
        let mut ineqs: Vec<Plane> = Vec::new();
        let mut eqs: Vec<Plane> = Vec::new();
        let as_f = |c: &[i64]| c.iter().map(|v| *v as f64).collect::<Vec<f64>>();
        for r in &system.rows {
            let a = as_f(&r.coeffs);
            match r.sense {
                Sense::Le => ineqs.push(Plane { a, b: r.rhs }),
                Sense::Ge => ineqs.push(Plane {
                    a: a.iter().map(|v| -v).collect(),
                    b: -r.rhs,
                }),
                Sense::Eq => eqs.push(Plane { a, b: r.rhs }),
            }
        }
        let big = 1e3 + 10.0 * system.rows.iter().map(|r| r.rhs.abs()).sum::<f64>();
        for j in 0..n {
            let mut a = vec![0.0; n];
            a[j] = -1.0;
            ineqs.push(Plane { a, b: 0.0 });
            let capped = system.rows.iter().any(|r| {
                matches!(r.sense, Sense::Le | Sense::Eq)
                    && r.coeffs[j] > 0
                    && r.coeffs.iter().all(|c| *c >= 0)
            });
            if !capped {
                let mut a = vec![0.0; n];
                a[j] = 1.0;
                ineqs.push(Plane { a, b: big });
            }
        }

        let mut search = Search {
            n,
            ineqs: &ineqs,
            basis: Vec::new(),
            points: Vec::new(),
        };
        for e in &eqs {
            match search.reduce(&e.a, e.b) {
                Some(r) => search.basis.push(r),
                None => {
                    // Dependent on earlier equalities: consistent only if the
                    // residual right-hand side vanishes.
                    let mut r: Vec<f64> = e.a.iter().copied().chain([e.b]).collect();
                    for (row, p) in &search.basis {
                        let f = r[*p] / row[*p];
                        for (x, y) in r.iter_mut().zip(row) {
                            *x -= f * y;
                        }
                    }
                    if r[n].abs() > TOL {
                        return Ok(Self { hull: Vec::new() });
                    }
                }
            }
        }
        search.dfs(0);

        let dot = |c: &[i64], x: &[f64]| c.iter().zip(x).map(|(a, v)| *a as f64 * v).sum::<f64>();
        let projected: Vec<[f64; 2]> = search
            .points
            .iter()
            .map(|x| [dot(&system.r1, x), dot(&system.r2, x)])
            .collect();
        Ok(Self {
            hull: convex_hull(projected),
        })
    }

    pub fn is_empty(&self) -> bool {
        self.hull.is_empty()
    }

    pub fn hull(&self) -> &[[f64; 2]] {
        &self.hull
    }

    /// Euclidean signed distance to the hull boundary: positive outside.
    /// Lower-dimensional hulls report the distance to the point or segment.
    pub fn margin(&self, p: [f64; 2]) -> f64 {
        match self.hull.len() {
            0 => f64::INFINITY,
            1 => dist(p, self.hull[0]),
            2 => seg_dist(p, self.hull[0], self.hull[1]),
            k => {
                let edges = (0..k).map(|i| (self.hull[i], self.hull[(i + 1) % k]));
                let mut worst = f64::NEG_INFINITY;
                for (a, b) in edges.clone() {
                    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
                    let s = (ex * (p[1] - a[1]) - ey * (p[0] - a[0])) / (ex * ex + ey * ey).sqrt();
                    // Counterclockwise hull: the interior is on the left.
                    worst = worst.max(-s);
                }
                if worst > 0.0 {
                    edges
                        .map(|(a, b)| seg_dist(p, a, b))
                        .fold(f64::INFINITY, f64::min)
                } else {
                    worst
                }
            }
        }
    }

    pub fn contains(&self, p: [f64; 2], tol: f64) -> bool {
        self.margin(p) <= tol
    }
}

fn dist(p: [f64; 2], q: [f64; 2]) -> f64 {
    ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2)).sqrt()
}

fn seg_dist(p: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    let (ex, ey) = (b[0] - a[0], b[1] - a[1]);
    let l2 = ex * ex + ey * ey;
    if l2 == 0.0 {
        return dist(p, a);
    }
    let t = (((p[0] - a[0]) * ex + (p[1] - a[1]) * ey) / l2).clamp(0.0, 1.0);
    dist(p, [a[0] + t * ex, a[1] + t * ey])
}

/// Monotone chain over points snapped to a 1e-12 grid; collinear and
/// duplicate points are dropped.
fn convex_hull(pts: Vec<[f64; 2]>) -> Vec<[f64; 2]> {
    let snap = |v: f64| (v * 1e12).round() / 1e12 + 0.0;
    let mut pts: Vec<[f64; 2]> = pts.into_iter().map(|p| [snap(p[0]), snap(p[1])]).collect();
    pts.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let cross = |o: [f64; 2], a: [f64; 2], b: [f64; 2]| {
        (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
    };
    let mut lower: Vec<[f64; 2]> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && cross(lower[lower.len() - 2], lower[lower.len() - 1], *p) <= 0.0 {
            lower.pop();
        }
        lower.push(*p);
    }
    let mut upper: Vec<[f64; 2]> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && cross(upper[upper.len() - 2], upper[upper.len() - 1], *p) <= 0.0 {
            upper.pop();
        }
        upper.push(*p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::region::RateRow;

    fn row(coeffs: &[i64], sense: Sense, rhs: f64) -> RateRow {
        RateRow {
            label: String::new(),
            coeffs: coeffs.to_vec(),
            sense,
            rhs,
        }
    }

    #[test]
    fn point_beyond_the_only_bound_is_rejected() {
        let s = RateSystem {
            vars: vec!["a".into(), "b".into()],
            rows: vec![row(&[1, 0], Sense::Le, 1.0), row(&[0, 1], Sense::Le, 1.0)],
            r1: vec![1, 0],
            r2: vec![0, 1],
        };
        assert!(!membership_oracle(&s, [2.0, 0.0]).unwrap());
        assert!(membership_oracle(&s, [1.0, 1.0]).unwrap());
        let o = MembershipOracle::new(&s).unwrap();
        assert!((o.margin([2.0, 0.5]) - 1.0).abs() < 1e-12);
        assert!((o.margin([0.5, 0.5]) + 0.5).abs() < 1e-12);
    }

    #[test]
    fn empty_and_degenerate_systems() {
        let s = RateSystem {
            vars: vec!["a".into()],
            rows: vec![row(&[1], Sense::Le, 0.0)],
            r1: vec![1],
            r2: vec![0],
        };
        let o = MembershipOracle::new(&s).unwrap();
        assert_eq!(o.hull().len(), 1);
        assert!(o.contains([0.0, 0.0], 0.0));
        let e = RateSystem {
            vars: vec!["a".into()],
            rows: vec![row(&[1], Sense::Le, 1.0), row(&[1], Sense::Ge, 2.0)],
            r1: vec![1],
            r2: vec![0],
        };
        assert!(MembershipOracle::new(&e).unwrap().is_empty());
    }

    #[test]
    fn equality_rows_are_always_tight() {
        let s = RateSystem {
            vars: vec!["a".into(), "b".into()],
            rows: vec![row(&[1, 0], Sense::Eq, 0.5), row(&[1, 1], Sense::Le, 1.0)],
            r1: vec![1, 0],
            r2: vec![0, 1],
        };
        let o = MembershipOracle::new(&s).unwrap();
        assert!(o.contains([0.5, 0.5], 1e-12));
        assert!(!o.contains([0.2, 0.2], 1e-9));
    }

    #[test]
    fn round_off_left_of_a_corner_keeps_the_corner() {
        let hull = convex_hull(vec![
            [-3.3e-16, 0.0279],
            [-3.3e-16, 0.0999],
            [0.0, 0.0],
            [8.9e-16, 0.0],
            [0.0823, 0.0],
            [0.0823, 0.0279],
            [0.01036, 0.0999],
        ]);
        assert!(hull.contains(&[0.0, 0.0]), "{hull:?}");
        assert_eq!(hull.len(), 5);
    }
}
