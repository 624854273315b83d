//! Fourier–Motzkin elimination with integer left-hand sides.

use std::collections::HashMap;

use super::{gcd, polygon_from_rows, Polytope2D, FEAS_TOL};
use crate::error::{Error, Result};
use crate::region::{RateSystem, Sense};

/// `a·z <= b` over `z = (x, R1, R2)`; `hist` marks the original rows it
/// was combined from.
#[derive(Debug, Clone)]
struct Row {
    a: Vec<i64>,
    b: f64,
    hist: u128,
}

fn normalize(a: &mut [i64], b: &mut f64) {
    let g = a.iter().fold(0, |g, &c| gcd(g, c));
    if g > 1 {
        for c in a.iter_mut() {
            *c /= g;
        }
        *b /= g as f64;
    }
}

/// Coordinatewise bound that no bounded projection can reach.
pub(crate) fn guard_bound(system: &RateSystem) -> f64 {
    system.rows.iter().map(|r| r.rhs.abs()).sum::<f64>() + 1.0
}

/// Projects the nonnegative solutions of `system` onto `(R1, R2)`.
pub fn fme_project(system: &RateSystem) -> Result<Polytope2D> {
    let n = system.vars.len();
    let width = n + 2;
    let guard = guard_bound(system);

    let mut ineqs: Vec<Row> = Vec::new();
    let mut eqs: Vec<(Vec<i64>, f64)> = Vec::new();
    let push = |ineqs: &mut Vec<Row>, a: Vec<i64>, b: f64| {
        ineqs.push(Row { a, b, hist: 0 });
    };
    for r in &system.rows {
        let mut a = r.coeffs.clone();
        a.extend([0, 0]);
        match r.sense {
            Sense::Le => push(&mut ineqs, a, r.rhs),
            Sense::Ge => push(&mut ineqs, a.iter().map(|c| -c).collect(), -r.rhs),
            Sense::Eq => eqs.push((a, r.rhs)),
        }
    }
    for j in 0..n {
        let mut a = vec![0; width];
        a[j] = -1;
        push(&mut ineqs, a, 0.0);
    }
    for (k, proj) in [&system.r1, &system.r2].into_iter().enumerate() {
        let mut a = proj.clone();
        a.extend([0, 0]);
        a[n + k] = -1;
        eqs.push((a, 0.0));
        let mut g = vec![0; width];
        g[n + k] = 1;
        push(&mut ineqs, g, guard);
        let mut nn = vec![0; width];
        nn[n + k] = -1;
        push(&mut ineqs, nn, 0.0);
    }

    substitute_equalities(&mut ineqs, eqs, n)?;

    let chernikov = ineqs.len() <= 128;
    for (i, r) in ineqs.iter_mut().enumerate() {
        r.hist = if chernikov { 1u128 << i } else { 0 };
    }
    let mut rows = tidy(ineqs)?;
    let mut eliminated = 0u32;
    loop {
        let choice = (0..n)
            .filter_map(|j| {
                let pos = rows.iter().filter(|r| r.a[j] > 0).count();
                let neg = rows.iter().filter(|r| r.a[j] < 0).count();
                (pos + neg > 0)
                    .then(|| (pos * neg) as i64 - (pos + neg) as i64)
                    .map(|cost| (cost, j))
            })
            .min();
        let Some((_, j)) = choice else { break };
        eliminated += 1;
        rows = eliminate(&rows, j, chernikov.then_some(eliminated))?;
    }

    let plane: Vec<([i64; 2], f64)> = rows.iter().map(|r| ([r.a[n], r.a[n + 1]], r.b)).collect();
    polygon_from_rows(&plane, guard)
}

/// Like [`fme_project`], mapping an empty region to `None`.
pub fn project_or_empty(system: &RateSystem) -> Result<Option<Polytope2D>> {
    match fme_project(system) {
        Ok(p) => Ok(Some(p)),
        Err(Error::Infeasible { .. }) => Ok(None),
        Err(e) => Err(e),
    }
}

/// Removes each equality by solving it for one rate variable. Equalities
/// that touch only the plane coordinates become a pair of inequalities.
fn substitute_equalities(
    ineqs: &mut Vec<Row>,
    mut eqs: Vec<(Vec<i64>, f64)>,
    n: usize,
) -> Result<()> {
    while let Some(pos) = pick_pivot(&eqs, n) {
        let (k, j) = pos;
        let (e, eb) = eqs.swap_remove(k);
        let p = e[j];
        for r in ineqs.iter_mut() {
            let c = r.a[j];
            if c == 0 {
                continue;
            }
            for (x, y) in r.a.iter_mut().zip(&e) {
                *x = p.abs() * *x - p.signum() * c * y;
            }
            r.b = p.abs() as f64 * r.b - (p.signum() * c) as f64 * eb;
            normalize(&mut r.a, &mut r.b);
        }
        for (a, b) in eqs.iter_mut() {
            let c = a[j];
            if c == 0 {
                continue;
            }
            for (x, y) in a.iter_mut().zip(&e) {
                *x = p * *x - c * y;
            }
            *b = p as f64 * *b - c as f64 * eb;
            normalize(a, b);
        }
    }
    for (a, b) in eqs {
        if a.iter().all(|c| *c == 0) {
            if b.abs() > FEAS_TOL {
                return Err(Error::Infeasible { violation: b.abs() });
            }
            continue;
        }
        ineqs.push(Row {
            a: a.iter().map(|c| -c).collect(),
            b: -b,
            hist: 0,
        });
        ineqs.push(Row { a, b, hist: 0 });
    }
    Ok(())
}

/// An equality and a rate-variable column to solve for, preferring unit
/// pivots.
fn pick_pivot(eqs: &[(Vec<i64>, f64)], n: usize) -> Option<(usize, usize)> {
    let mut best: Option<(i64, usize, usize)> = None;
    for (k, (a, _)) in eqs.iter().enumerate() {
        for (j, c) in a.iter().take(n).enumerate() {
            if *c != 0 && best.is_none_or(|(m, _, _)| c.abs() < m) {
                best = Some((c.abs(), k, j));
            }
        }
    }
    best.map(|(_, k, j)| (k, j))
}

/// Drops constant rows (failing if one is violated) and parallel
/// duplicates, keeping the tightest.
fn tidy(rows: Vec<Row>) -> Result<Vec<Row>> {
    let mut out: Vec<Row> = Vec::with_capacity(rows.len());
    let mut seen: HashMap<Vec<i64>, usize> = HashMap::new();
    for mut r in rows {
        normalize(&mut r.a, &mut r.b);
        if r.a.iter().all(|c| *c == 0) {
            if r.b < -FEAS_TOL {
                return Err(Error::Infeasible { violation: -r.b });
            }
            continue;
        }
        match seen.get(&r.a) {
            Some(&i) => {
                let o = &mut out[i];
                if r.b < o.b || (r.b == o.b && r.hist.count_ones() < o.hist.count_ones()) {
                    *o = r;
                }
            }
            None => {
                seen.insert(r.a.clone(), out.len());
                out.push(r);
            }
        }
    }
    Ok(out)
}

fn eliminate(rows: &[Row], j: usize, step: Option<u32>) -> Result<Vec<Row>> {
    let mut out: Vec<Row> = rows.iter().filter(|r| r.a[j] == 0).cloned().collect();
    let pos: Vec<&Row> = rows.iter().filter(|r| r.a[j] > 0).collect();
    let neg: Vec<&Row> = rows.iter().filter(|r| r.a[j] < 0).collect();
    for p in &pos {
        for q in &neg {
            let hist = p.hist | q.hist;
            if let Some(k) = step {
                if hist.count_ones() > k + 1 {
                    continue;
                }
            }
            let alpha = p.a[j];
            let beta = -q.a[j];
            let a =
                p.a.iter()
                    .zip(&q.a)
                    .map(|(x, y)| beta * x + alpha * y)
                    .collect();
            out.push(Row {
                a,
                b: beta as f64 * p.b + alpha as f64 * q.b,
                hist,
            });
        }
    }
    tidy(out)
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
    fn binning_segment() {
        let s = RateSystem {
            vars: vec!["R1pb".into(), "R1pb'".into()],
            rows: vec![row(&[1, 1], Sense::Le, 1.0), row(&[0, 1], Sense::Ge, 0.0)],
            r1: vec![1, 0],
            r2: vec![0, 0],
        };
        let p = fme_project(&s).unwrap();
        assert_eq!(p.vertices.len(), 2);
        assert!(p.same_vertices(
            &super::super::polygon_from_rows(
                &[([1, 0], 1.0), ([-1, 0], 0.0), ([0, 1], 0.0), ([0, -1], 0.0)],
                10.0
            )
            .unwrap(),
            1e-12
        ));
    }

    #[test]
    fn equality_pins_are_substituted() {
        let s = RateSystem {
            vars: vec!["a".into(), "b".into()],
            rows: vec![row(&[1, 0], Sense::Eq, 0.25), row(&[1, 1], Sense::Le, 1.0)],
            r1: vec![1, 0],
            r2: vec![0, 1],
        };
        let p = fme_project(&s).unwrap();
        assert!(p.contains_point([0.25, 0.75], 1e-12));
        assert!(!p.contains_point([0.0, 0.0], 1e-9));
        assert!(!p.contains_point([0.25, 0.8], 1e-9));
    }

    #[test]
    fn infeasible_binning_is_reported() {
        let s = RateSystem {
            vars: vec!["a".into(), "b".into()],
            rows: vec![row(&[0, 1], Sense::Ge, 2.0), row(&[1, 1], Sense::Le, 1.0)],
            r1: vec![1, 0],
            r2: vec![0, 0],
        };
        assert!(matches!(fme_project(&s), Err(Error::Infeasible { .. })));
        assert!(project_or_empty(&s).unwrap().is_none());
    }

    #[test]
    fn missing_bound_is_unbounded() {
        let s = RateSystem {
            vars: vec!["a".into(), "b".into()],
            rows: vec![row(&[1, 0], Sense::Le, 1.0)],
            r1: vec![1, 0],
            r2: vec![0, 1],
        };
        assert!(matches!(fme_project(&s), Err(Error::Unbounded)));
    }
}
