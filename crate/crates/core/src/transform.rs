//! Tschirnhaus transformations and the reduction of quintics to
//! one-parameter form.
//!
//! `tschirnhaus` pushes a polynomial map through the roots by eliminating x
//! from (f(x), y - phi(x)) with a resultant, evaluated at interpolation nodes
//! so the exact rational path stays exact. `bring_jerrard` performs the
//! classical staged reduction of a monic quintic to y^5 + p y + q: a linear
//! shift, a quadratic Tschirnhaus map removing the y^4 and y^3 coefficients
//! (one closed-form quadratic), and a quartic map removing y^2. The quartic
//! stage walks a line contained in the quadric {s2 = 0}; the line exists by
//! one square root, and the remaining condition s3 = 0 restricted to the line
//! is a genuine cubic solved in closed form, so the whole construction uses
//! only radicals of degree <= 4. Every stage rescales the working quintic to
//! keep roots O(1), which is what keeps the final residuals near machine
//! precision.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly::{discriminant, interpolate, resultant, Polynomial};
use crate::roots::{find_roots, RootSet};
use crate::scalar::Field;

/// Root map y = phi(x) of degree >= 1 and (when applied) < deg f.
#[derive(Debug, Clone)]
pub struct TschirnhausMap<F: Field> {
    phi: Polynomial<F>,
}

impl<F: Field> TschirnhausMap<F> {
    pub fn new(phi: Polynomial<F>) -> Result<Self> {
        match phi.degree() {
            Some(d) if d >= 1 => Ok(TschirnhausMap { phi }),
            _ => Err(Error::invalid("transformation must have degree >= 1")),
        }
    }

    pub fn identity() -> Self {
        TschirnhausMap {
            phi: Polynomial::x(),
        }
    }

    pub fn phi(&self) -> &Polynomial<F> {
        &self.phi
    }

    /// Same root map with phi reduced modulo f. The reduction may collapse
    /// to a constant (every root maps to the same point); that degenerate
    /// map is representable here so the transform of it stays well defined.
    pub fn reduced_mod(&self, f: &Polynomial<F>) -> Result<Self> {
        Ok(TschirnhausMap {
            phi: self.phi.rem(f)?,
        })
    }
}

/// Monic polynomial whose roots are phi(x_i) over the roots x_i of f,
/// counted with multiplicity: the resultant in x of f(x) and y - phi(x),
/// normalized monic in y. Exact when f and phi are rational.
pub fn tschirnhaus<F: Field>(
    f: &Polynomial<F>,
    map: &TschirnhausMap<F>,
) -> Result<Polynomial<F>> {
    let n = f.degree().unwrap_or(0);
    if n < 2 {
        return Err(Error::DegreeTooSmall { min: 2, got: n });
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let d = match map.phi.degree() {
        // constant map (possible after reduction): every root goes to c
        None | Some(0) => {
            let c = map.phi.coeff(0);
            let mut acc = Polynomial::constant(F::one());
            let factor = Polynomial::linear(c.neg(), F::one());
            for _ in 0..n {
                acc = acc.mul(&factor);
            }
            return Ok(acc);
        }
        Some(d) => d,
    };
    if d >= n {
        return Err(Error::ReduceModulo {
            deg_phi: d,
            deg_f: n,
        });
    }
    // R(y) = res_x(f, y - phi) has degree n in y; sample at n+1 nodes.
    let neg_phi = map.phi.neg();
    let mut points = Vec::with_capacity(n + 1);
    for k in 0..=n {
        let y = F::interpolation_node(k, n + 1);
        let g = neg_phi.add(&Polynomial::constant(y.clone()));
        points.push((y, resultant(f, &g)?));
    }
    let r = interpolate(&points);
    if r.degree() != Some(n) {
        return Err(Error::invalid(
            "transformed polynomial degenerated; this should not happen for deg phi < deg f",
        ));
    }
    Ok(r.into_monic())
}

/// Preimage of y under the root map: the root x of f minimizing |phi(x) - y|.
/// Errors when nothing is within `tol` or when two distinct roots of f both
/// land within `tol` of y (a critical configuration).
pub fn recover_root(
    f: &Polynomial<Complex64>,
    map: &TschirnhausMap<Complex64>,
    y: Complex64,
    tol: f64,
) -> Result<Complex64> {
    let scale = f.max_coeff_norm().max(1.0);
    let roots = find_roots(f, 1e-8 * scale)?;
    let mut best = (f64::INFINITY, Complex64::new(0.0, 0.0));
    let mut within = 0usize;
    for x in &roots.roots {
        let d = (map.phi.eval(x) - y).norm();
        if d <= tol {
            within += 1;
        }
        if d < best.0 {
            best = (d, *x);
        }
    }
    if best.0 > tol {
        return Err(Error::NoPreimage { closest: best.0 });
    }
    if within >= 2 {
        return Err(Error::AmbiguousPreimage { count: within });
    }
    Ok(best.1)
}

/// Removes the x^(n-1) coefficient of a monic polynomial: returns
/// (f(x - a1/n), a1/n). The roots shift by +a1/n.
pub fn depress<F: Field>(f: &Polynomial<F>) -> Result<(Polynomial<F>, F)> {
    let n = f.degree().unwrap_or(0);
    if n < 1 {
        return Err(Error::DegreeTooSmall { min: 1, got: n });
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let shift = f.coeff(n - 1) / F::from_i64(n as i64);
    if shift.is_zero() {
        return Ok((f.clone(), shift));
    }
    let sub = Polynomial::linear(shift.clone().neg(), F::one());
    Ok((f.compose(&sub), shift))
}

/// Result of the Bring-Jerrard reduction of a quintic.
#[derive(Debug, Clone)]
pub struct BringJerrardResult {
    pub p: Complex64,
    pub q: Complex64,
    pub map: TschirnhausMap<Complex64>,
    /// max |coefficient| of y^4, y^3, y^2 in the transformed quintic
    pub residuals: f64,
}

/// Roots of a x^2 + b x + c, degree drops handled.
pub fn solve_quadratic(a: Complex64, b: Complex64, c: Complex64) -> Vec<Complex64> {
    let scale = a.norm().max(b.norm()).max(c.norm());
    if scale == 0.0 {
        return Vec::new();
    }
    if a.norm() <= 1e-14 * scale {
        if b.norm() <= 1e-14 * scale {
            return Vec::new();
        }
        return vec![-c / b];
    }
    let disc = b * b - 4.0 * a * c;
    let s = disc.sqrt();
    // pick the branch that avoids cancellation in b +/- s
    let t = if (b.conj() * s).re >= 0.0 { -(b + s) } else { -(b - s) };
    let q = t / 2.0;
    if q.norm() > 0.0 {
        vec![q / a, c / q]
    } else {
        vec![Complex64::new(0.0, 0.0), -b / a]
    }
}

/// Roots of c3 x^3 + c2 x^2 + c1 x + c0 by Cardano, then Newton-polished.
pub fn solve_cubic(c3: Complex64, c2: Complex64, c1: Complex64, c0: Complex64) -> Vec<Complex64> {
    let scale = c3.norm().max(c2.norm()).max(c1.norm()).max(c0.norm());
    if scale == 0.0 {
        return Vec::new();
    }
    if c3.norm() <= 1e-12 * scale {
        return solve_quadratic(c2, c1, c0);
    }
    let a = c2 / c3;
    let b = c1 / c3;
    let c = c0 / c3;
    // depressed: t^3 + p t + q with x = t - a/3
    let p = b - a * a / 3.0;
    let q = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let half_q = q / 2.0;
    let d = half_q * half_q + (p / 3.0) * (p / 3.0) * (p / 3.0);
    let sd = d.sqrt();
    // cube-root argument with the larger magnitude is better conditioned
    let u3 = if (-half_q + sd).norm() >= (-half_q - sd).norm() {
        -half_q + sd
    } else {
        -half_q - sd
    };
    let omega = Complex64::new(-0.5, 3.0f64.sqrt() / 2.0);
    let mut roots = Vec::with_capacity(3);
    if u3.norm() == 0.0 {
        // p = q = 0: triple root at -a/3
        return vec![-a / 3.0; 3];
    }
    let u0 = u3.cbrt();
    for k in 0..3 {
        let u = u0 * omega.powu(k);
        let v = -p / (3.0 * u);
        let t = u + v;
        let mut x = t - a / 3.0;
        // two Newton steps on the original cubic to clean up roundoff
        for _ in 0..2 {
            let fx = ((c3 * x + c2) * x + c1) * x + c0;
            let dfx = (3.0 * c3 * x + 2.0 * c2) * x + c1;
            if dfx.norm() > 0.0 {
                let step = fx / dfx;
                if step.is_finite() {
                    x -= step;
                }
            }
        }
        roots.push(x);
    }
    roots
}

/// sum h(x_i) over the roots of a monic polynomial, given its power sums.
fn root_sum(h: &Polynomial<Complex64>, psums: &[Complex64]) -> Complex64 {
    h.coeffs()
        .iter()
        .enumerate()
        .map(|(k, c)| c * psums[k])
        .sum()
}

/// min_{i<j} |v_i - v_j| / max_i |v_i|: the scale-free conditioning metric
/// used to choose between auxiliary-equation roots.
fn normalized_min_distance(vals: &[Complex64]) -> f64 {
    let scale = vals.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-300);
    let mut min_d = f64::INFINITY;
    for i in 0..vals.len() {
        for j in i + 1..vals.len() {
            min_d = min_d.min((vals[i] - vals[j]).norm());
        }
    }
    min_d / scale
}

fn lex_le(a: Complex64, b: Complex64) -> bool {
    (a.re, a.im) <= (b.re, b.im)
}

struct StageState {
    /// composite root map from the original quintic, reduced mod f
    psi: Polynomial<Complex64>,
    /// current transformed quintic tschirnhaus(f, psi), cleaned and monic
    g: Polynomial<Complex64>,
}

impl StageState {
    /// Applies a stage map sigma (on the current roots), folds in a scale
    /// normalization, recomputes the end-to-end quintic, and zeroes the
    /// coefficients the finished stages have eliminated.
    fn apply(
        &mut self,
        f: &Polynomial<Complex64>,
        sigma: &Polynomial<Complex64>,
        images: &[Complex64],
        kill_upto: usize,
    ) -> Result<()> {
        let lambda = images.iter().map(|v| v.norm()).fold(0.0, f64::max).max(1e-3);
        let inv = Complex64::new(1.0 / lambda, 0.0);
        let scaled = sigma.scale(&inv);
        let psi = scaled.compose(&self.psi).rem(f)?;
        let map = TschirnhausMap::new(psi.clone())?;
        let mut g = tschirnhaus(f, &map)?;
        // the eliminated coefficients are exact zeros of the construction;
        // drop the roundoff so later power sums see clean input
        let eps = 1e-11 * g.max_coeff_norm().max(1.0);
        let mut coeffs = g.coeffs().to_vec();
        for k in (5 - kill_upto)..5 {
            if coeffs[k].norm() <= eps {
                coeffs[k] = Complex64::new(0.0, 0.0);
            }
        }
        g = Polynomial::new(coeffs);
        self.psi = psi;
        self.g = g;
        Ok(())
    }
}

/// Reduces a monic quintic with nonzero discriminant to y^5 + p y + q.
pub fn bring_jerrard(f: &Polynomial<Complex64>, tol: f64) -> Result<BringJerrardResult> {
    let n = f.degree().unwrap_or(0);
    if n != 5 {
        return Err(Error::invalid(format!("expected a quintic, got degree {n}")));
    }
    if !f.is_monic() {
        return Err(Error::NotMonic);
    }
    let scale = f.max_coeff_norm().max(1.0);
    let disc = discriminant(f)?;
    if disc.norm() <= 1e-8 * scale.powi(8) {
        return Err(Error::DegenerateQuintic);
    }

    let mut state = StageState {
        psi: Polynomial::x(),
        g: f.clone(),
    };
    let stage_eps = |g: &Polynomial<Complex64>| 1e-12 * g.max_coeff_norm().max(1.0);

    // linear shift: kill the y^4 coefficient
    if state.g.coeff(4).norm() > stage_eps(&state.g) {
        let shift = state.g.coeff(4) / 5.0;
        let sigma = Polynomial::linear(shift, Complex64::new(1.0, 0.0));
        let roots = find_roots(&state.g, 1e-6 * state.g.max_coeff_norm().max(1.0))?;
        let images: Vec<Complex64> = roots.expanded().iter().map(|x| sigma.eval(x)).collect();
        state.apply(f, &sigma, &images, 1)?;
    }

    // quadratic stage: kill y^3 while keeping y^4 zero
    if state.g.coeff(3).norm() > stage_eps(&state.g) {
        quadratic_stage(f, &mut state)?;
    }

    // quartic stage: kill y^2 while keeping y^4 and y^3 zero
    if state.g.coeff(2).norm() > stage_eps(&state.g) {
        quartic_stage(f, &mut state)?;
    }

    let residuals = state.g.coeff(4).norm().max(state.g.coeff(3).norm()).max(
        // measure on the raw end-to-end transform, before cleaning
        {
            let map = TschirnhausMap::new(state.psi.clone())?;
            let raw = tschirnhaus(f, &map)?;
            raw.coeff(4)
                .norm()
                .max(raw.coeff(3).norm())
                .max(raw.coeff(2).norm())
        },
    );
    if residuals > tol {
        return Err(Error::ResidualTooLarge {
            residual: residuals,
            tol,
        });
    }
    Ok(BringJerrardResult {
        p: state.g.coeff(1),
        q: state.g.coeff(0),
        map: TschirnhausMap::new(state.psi.clone())?,
        residuals,
    })
}

/// sigma(u) = u^2 + alpha u + beta with s1 = s2 = 0 for the images.
/// With p1 = 0 this pins beta = -p2/5 and alpha solves
/// p2 a^2 + 2 p3 a + (p4 - p2^2/5) = 0.
fn quadratic_stage(f: &Polynomial<Complex64>, state: &mut StageState) -> Result<()> {
    let p = state.g.power_sums(4)?;
    let beta = -p[2] / 5.0;
    let candidates = solve_quadratic(p[2], 2.0 * p[3], p[4] - p[2] * p[2] / 5.0);
    if candidates.is_empty() {
        return Err(Error::invalid("quadratic stage has no solutions"));
    }
    let roots = find_roots(&state.g, 1e-6 * state.g.max_coeff_norm().max(1.0))?;
    let xs = roots.expanded();
    let mut best: Option<(f64, Complex64, Polynomial<Complex64>, Vec<Complex64>)> = None;
    for alpha in candidates {
        if !alpha.is_finite() {
            continue;
        }
        let sigma = Polynomial::new(vec![beta, alpha, Complex64::new(1.0, 0.0)]);
        let images: Vec<Complex64> = xs.iter().map(|x| sigma.eval(x)).collect();
        let metric = normalized_min_distance(&images);
        let better = match &best {
            None => true,
            Some((m, a, _, _)) => metric > *m || (metric == *m && lex_le(alpha, *a)),
        };
        if better {
            best = Some((metric, alpha, sigma, images));
        }
    }
    let (_, _, sigma, images) = best.ok_or_else(|| Error::invalid("quadratic stage failed"))?;
    state.apply(f, &sigma, &images, 2)
}

/// sigma(u) = u^4 + a u^3 + b u^2 + c u + d with s1 = s2 = s3 = 0.
///
/// s1 pins d linearly. Because the working quintic is principal (p1 = p2 = 0)
/// the surface {s2 = 0} in (a, b, c) has no c^2 term, so a point on it costs
/// nothing and a line inside it costs one square root; s3 restricted to the
/// line is a cubic in the line parameter.
fn quartic_stage(f: &Polynomial<Complex64>, state: &mut StageState) -> Result<()> {
    let p = state.g.power_sums(12)?;
    let scale_q = p.iter().map(|v| v.norm()).fold(1.0, f64::max);

    // Q(a, b, c) = qa2 a^2 + qb2 b^2 + qab ab + qag ac + qbg bc
    //            + la a + lb b + lg c + c00
    let qa2 = p[6] - p[3] * p[3] / 5.0;
    let qb2 = p[4];
    let qab = 2.0 * p[5];
    let qag = 2.0 * p[4];
    let qbg = 2.0 * p[3];
    let la = 2.0 * p[7] - 0.4 * p[3] * p[4];
    let lb = 2.0 * p[6];
    let lg = 2.0 * p[5];
    let c00 = p[8] - p[4] * p[4] / 5.0;

    let quad = |a: Complex64, b: Complex64, c: Complex64| {
        qa2 * a * a + qb2 * b * b + qab * a * b + qag * a * c + qbg * b * c
    };
    let polar = |u: [Complex64; 3], v: [Complex64; 3]| {
        2.0 * qa2 * u[0] * v[0]
            + 2.0 * qb2 * u[1] * v[1]
            + qab * (u[0] * v[1] + u[1] * v[0])
            + qag * (u[0] * v[2] + u[2] * v[0])
            + qbg * (u[1] * v[2] + u[2] * v[1])
    };

    let roots = find_roots(&state.g, 1e-6 * state.g.max_coeff_norm().max(1.0))?;
    let xs = roots.expanded();

    let anchor_candidates: [(f64, f64); 10] = [
        (0.0, 0.0),
        (1.0, 0.0),
        (0.0, 1.0),
        (1.0, 1.0),
        (-1.0, 1.0),
        (2.0, 1.0),
        (1.0, 2.0),
        (-1.0, -1.0),
        (3.0, 2.0),
        (2.0, -1.0),
    ];

    for &(ar, br) in &anchor_candidates {
        let a0 = Complex64::new(ar, 0.0);
        let b0 = Complex64::new(br, 0.0);
        // gamma coefficient of Q at (a0, b0, .): linear because there is no c^2
        let lcoef = qag * a0 + qbg * b0 + lg;
        if lcoef.norm() <= 1e-8 * scale_q {
            continue;
        }
        let g0 = -(qa2 * a0 * a0 + qb2 * b0 * b0 + qab * a0 * b0 + la * a0 + lb * b0 + c00) / lcoef;
        let v0 = [a0, b0, g0];

        // directions with Q(v0 + t d) identically zero:
        // tangency (linear in d) and q(d) = 0 (one square root)
        let ma = 2.0 * qa2 * a0 + qab * b0 + qag * g0 + la;
        let mb = 2.0 * qb2 * b0 + qab * a0 + qbg * g0 + lb;
        let mg = lcoef; // = qag a0 + qbg b0 + lg
        let w1 = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 0.0),
            -ma / mg,
        ];
        let w2 = [
            Complex64::new(0.0, 0.0),
            Complex64::new(1.0, 0.0),
            -mb / mg,
        ];
        let qa = quad(w1[0], w1[1], w1[2]);
        let qc = quad(w2[0], w2[1], w2[2]);
        let qb = polar(w1, w2);
        let mut dirs: Vec<[Complex64; 3]> = Vec::new();
        if qa.norm() <= 1e-10 * scale_q {
            dirs.push(w1);
        }
        for s in solve_quadratic(qa, qb, qc) {
            if s.is_finite() {
                dirs.push([
                    s * w1[0] + w2[0],
                    s * w1[1] + w2[1],
                    s * w1[2] + w2[2],
                ]);
            }
        }

        let mut best: Option<(f64, Complex64, Polynomial<Complex64>, Vec<Complex64>)> = None;
        for dir in dirs {
            let dmax = dir.iter().map(|v| v.norm()).fold(0.0, f64::max);
            if !(dmax.is_finite() && dmax > 0.0) {
                continue;
            }
            let dir = [dir[0] / dmax, dir[1] / dmax, dir[2] / dmax];
            let d0 = -(p[4] + v0[0] * p[3]) / 5.0;
            let dd = -dir[0] * p[3] / 5.0;
            let phi0 = Polynomial::new(vec![d0, v0[2], v0[1], v0[0], Complex64::new(1.0, 0.0)]);
            let dphi = Polynomial::new(vec![dd, dir[2], dir[1], dir[0]]);
            // s3(t) = sum (phi0 + t dphi)^3 over the roots: a cubic in t
            let phi0_2 = phi0.mul(&phi0);
            let dphi_2 = dphi.mul(&dphi);
            let c0 = root_sum(&phi0_2.mul(&phi0), &p);
            let c1 = 3.0 * root_sum(&phi0_2.mul(&dphi), &p);
            let c2 = 3.0 * root_sum(&phi0.mul(&dphi_2), &p);
            let c3 = root_sum(&dphi_2.mul(&dphi), &p);
            for t in solve_cubic(c3, c2, c1, c0) {
                if !t.is_finite() {
                    continue;
                }
                let sigma = phi0.add(&dphi.scale(&t));
                let images: Vec<Complex64> = xs.iter().map(|x| sigma.eval(x)).collect();
                // sanity: the three power-sum conditions must hold
                let iscale: f64 = images.iter().map(|v| v.norm()).fold(1.0, f64::max);
                let s1: Complex64 = images.iter().sum();
                let s2: Complex64 = images.iter().map(|v| v * v).sum();
                let s3: Complex64 = images.iter().map(|v| v * v * v).sum();
                if s1.norm() > 1e-5 * iscale
                    || s2.norm() > 1e-5 * iscale * iscale
                    || s3.norm() > 1e-5 * iscale * iscale * iscale
                {
                    continue;
                }
                let metric = normalized_min_distance(&images);
                let better = match &best {
                    None => true,
                    Some((m, tt, _, _)) => metric > *m || (metric == *m && lex_le(t, *tt)),
                };
                if better {
                    best = Some((metric, t, sigma, images));
                }
            }
        }
        if let Some((metric, _, sigma, images)) = best {
            if metric > 1e-9 {
                return state.apply(f, &sigma, &images, 3);
            }
        }
    }
    Err(Error::invalid(
        "quartic stage failed: no admissible transformation found",
    ))
}

/// The single parameter c = p / q^(4/5) and the principal 5th root of q.
#[derive(Debug, Clone, Copy)]
pub struct OneParamForm {
    pub c: Complex64,
    pub scale: Complex64,
}

/// Normalizes y^5 + p y + q to z^5 + c z + 1 via y = scale * z.
/// Principal branches throughout; c is computed as p * scale / q so the
/// branch choice is consistent by construction.
pub fn one_param_normalize(p: Complex64, q: Complex64) -> Result<OneParamForm> {
    if q.norm() == 0.0 {
        return Err(Error::ZeroQ);
    }
    let scale = q.powf(0.2);
    let c = p * scale / q;
    Ok(OneParamForm { c, scale })
}

/// The one-parameter quintic family y^5 + 15 y^4 - 10 g y^2 + 3 g^2.
pub fn klein_family(gamma: Complex64) -> Polynomial<Complex64> {
    Polynomial::new(vec![
        3.0 * gamma * gamma,
        Complex64::new(0.0, 0.0),
        -10.0 * gamma,
        Complex64::new(0.0, 0.0),
        Complex64::new(15.0, 0.0),
        Complex64::new(1.0, 0.0),
    ])
}

/// Checks that two complex multisets agree within `tol` under greedy
/// nearest matching. Test and verification helper.
pub fn multisets_match(a: &[Complex64], b: &[Complex64], tol: f64) -> bool {
    if a.len() != b.len() {
        return false;
    }
    let mut used = vec![false; b.len()];
    for x in a {
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, y) in b.iter().enumerate() {
            if !used[j] {
                let d = (x - y).norm();
                if d < best.0 {
                    best = (d, j);
                }
            }
        }
        if best.1 == usize::MAX || best.0 > tol {
            return false;
        }
        used[best.1] = true;
    }
    true
}

/// Roots of f pushed through the map, for verifying transforms root-wise.
pub fn image_roots(
    f: &Polynomial<Complex64>,
    map: &TschirnhausMap<Complex64>,
    tol: f64,
) -> Result<Vec<Complex64>> {
    let rs: RootSet = find_roots(f, tol)?;
    Ok(rs.expanded().iter().map(|x| map.phi().eval(x)).collect())
}
