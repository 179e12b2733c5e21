//! Simultaneous root finding for complex polynomials.
//!
//! Aberth-Ehrlich iteration from perturbed unit-circle starts, followed by
//! cluster detection for multiple roots. Each approximate root carries an
//! inclusion radius n*|f/f'|; roots whose inclusion disks overlap are merged
//! into one root with multiplicity, and the cluster centroid is polished by
//! multiplicity-aware Newton steps. Distance-only thresholds under-merge
//! triple roots at double precision, which is why the radii participate.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::Polynomial;

const MAX_ITERATIONS: usize = 200;
const EPS: f64 = f64::EPSILON;
/// Inclusion radii are capped so that well-separated roots (the contract
/// guarantees callers separation >= 1e-3) can never be merged spuriously.
const INCLUSION_CAP: f64 = 1e-4;

/// Roots of a polynomial with multiplicities and the achieved residual.
#[derive(Debug, Clone)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
    pub multiplicities: Vec<usize>,
    /// max |f(root)| over the reported roots
    pub residual: f64,
}

impl RootSet {
    /// Total number of roots counted with multiplicity.
    pub fn total_multiplicity(&self) -> usize {
        self.multiplicities.iter().sum()
    }

    /// Roots repeated according to multiplicity.
    pub fn expanded(&self) -> Vec<Complex64> {
        let mut out = Vec::with_capacity(self.total_multiplicity());
        for (r, &m) in self.roots.iter().zip(&self.multiplicities) {
            out.extend(std::iter::repeat(*r).take(m));
        }
        out
    }

    pub fn max_multiplicity(&self) -> usize {
        self.multiplicities.iter().copied().max().unwrap_or(0)
    }
}

/// |f| evaluation noise floor at |z|: eps * sum |a_i| |z|^i.
fn noise_floor(coeffs: &[Complex64], z_norm: f64) -> f64 {
    let mut s = 0.0;
    let mut p = 1.0;
    for c in coeffs {
        s += c.norm() * p;
        p *= z_norm;
    }
    8.0 * EPS * s.max(EPS)
}

/// All complex roots of f with residual <= tol; roots with overlapping
/// inclusion disks (or closer than max(1e-7, 1e3*tol)) are merged into one
/// root with multiplicity.
pub fn find_roots(f: &Polynomial<Complex64>, tol: f64) -> Result<RootSet> {
    let n = match f.degree() {
        Some(n) if n >= 1 => n,
        other => {
            return Err(Error::DegreeTooSmall {
                min: 1,
                got: other.unwrap_or(0),
            })
        }
    };
    let monic = f.clone().into_monic();
    if n == 1 {
        let root = monic.coeff(0) * Complex64::new(-1.0, 0.0);
        let residual = f.eval(&root).norm();
        return Ok(RootSet {
            roots: vec![root],
            multiplicities: vec![1],
            residual,
        });
    }

    let deriv = monic.derivative();
    let coeffs = monic.coeffs();

    // perturbed unit-circle starts; the fixed angular offset breaks the
    // symmetry of real and self-reciprocal inputs
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let theta = 2.0 * std::f64::consts::PI * (k as f64 + 0.37) / (n as f64) + 0.41;
            Complex64::from_polar(1.0 + 1e-3 * (k as f64 + 1.0) / (n as f64), theta)
        })
        .collect();

    for _ in 0..MAX_ITERATIONS {
        let mut max_corr: f64 = 0.0;
        for i in 0..n {
            let fz = monic.eval(&z[i]);
            if fz.norm() <= noise_floor(coeffs, z[i].norm()) {
                continue; // settled at the attainable accuracy
            }
            let dfz = deriv.eval(&z[i]);
            let w = if dfz.norm() > 0.0 {
                fz / dfz
            } else {
                // nudge off the stationary point, deterministically
                z[i] += Complex64::new(1e-8, 1e-8);
                continue;
            };
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    let d = z[i] - z[j];
                    if d.norm() > 0.0 {
                        s += d.inv();
                    }
                }
            }
            let denom = Complex64::new(1.0, 0.0) - w * s;
            let corr = if denom.norm() > 1e-300 { w / denom } else { w };
            if corr.is_finite() {
                z[i] -= corr;
                max_corr = max_corr.max(corr.norm());
            }
        }
        let settled = z
            .iter()
            .all(|zi| monic.eval(zi).norm() <= noise_floor(coeffs, zi.norm()));
        if settled || max_corr < 1e-15 * (1.0 + z.iter().map(|v| v.norm()).fold(0.0, f64::max)) {
            break;
        }
    }
    // inclusion radius per approximation
    let radii: Vec<f64> = z
        .iter()
        .map(|zi| {
            let fz = monic.eval(zi).norm();
            let dfz = deriv.eval(zi).norm();
            if dfz > 0.0 {
                ((n as f64) * fz / dfz).min(INCLUSION_CAP)
            } else {
                INCLUSION_CAP
            }
        })
        .collect();

    // union-find merge: distance threshold or overlapping inclusion disks
    let threshold = 1e-7f64.max(1e3 * tol);
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(parent: &mut Vec<usize>, i: usize) -> usize {
        if parent[i] != i {
            let r = find(parent, parent[i]);
            parent[i] = r;
        }
        parent[i]
    }
    for i in 0..n {
        for j in i + 1..n {
            let d = (z[i] - z[j]).norm();
            if d <= threshold.max(radii[i] + radii[j]) {
                let (ri, rj) = (find(&mut parent, i), find(&mut parent, j));
                if ri != rj {
                    parent[ri] = rj;
                }
            }
        }
    }
    let mut clusters: std::collections::BTreeMap<usize, Vec<usize>> = Default::default();
    for i in 0..n {
        let r = find(&mut parent, i);
        clusters.entry(r).or_default().push(i);
    }

    // polish each cluster representative with multiplicity-aware Newton
    let mut roots = Vec::new();
    let mut mults = Vec::new();
    for members in clusters.values() {
        let m = members.len();
        let mut c = members.iter().map(|&i| z[i]).sum::<Complex64>() / (m as f64);
        let mut best_c = c;
        let mut best_f = monic.eval(&c).norm();
        for _ in 0..10 {
            let fc = monic.eval(&c);
            let dfc = deriv.eval(&c);
            if dfc.norm() == 0.0 {
                break;
            }
            let step = fc / dfc * (m as f64);
            if !step.is_finite() {
                break;
            }
            c -= step;
            let fn_new = monic.eval(&c).norm();
            if fn_new < best_f {
                best_f = fn_new;
                best_c = c;
            } else {
                break;
            }
        }
        roots.push(best_c);
        mults.push(m);
    }

    // canonical ordering for determinism
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| {
        (roots[a].re, roots[a].im)
            .partial_cmp(&(roots[b].re, roots[b].im))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let roots: Vec<Complex64> = order.iter().map(|&i| roots[i]).collect();
    let mults: Vec<usize> = order.iter().map(|&i| mults[i]).collect();

    let residual = roots.iter().map(|r| f.eval(r).norm()).fold(0.0, f64::max);
    if residual > tol {
        return Err(Error::NonConvergence {
            iterations: MAX_ITERATIONS,
            residual,
            best: roots,
        });
    }
    Ok(RootSet {
        roots,
        multiplicities: mults,
        residual,
    })
}
