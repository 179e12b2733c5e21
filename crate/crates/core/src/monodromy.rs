//! Numerical analytic continuation of root systems along loops in parameter
//! space: the permutations of petal loops generate the monodromy group, small
//! loops around a critical point generate its inertia group.
//!
//! Families are monic with coefficients affine-linear in the parameters, so
//! restricting to a complex line gives a one-parameter family whose
//! discriminant is an honest univariate polynomial: its roots are the
//! critical values the petals must encircle.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::perm::{closure, PermGroup, Permutation};
use crate::poly::{discriminant, interpolate, Polynomial};
use crate::roots::find_roots;
use crate::scalar::Field;

/// Monic degree-n family; coefficient j (of x^(n-1-j)) is the affine form
/// rows[j][0] + sum_k rows[j][k] * alpha_(k-1).
#[derive(Debug, Clone, PartialEq)]
pub struct ParamFamily {
    n: usize,
    m: usize,
    rows: Vec<Vec<Complex64>>,
}

impl ParamFamily {
    pub fn new(n: usize, m: usize, rows: Vec<Vec<Complex64>>) -> Result<Self> {
        if n < 1 || m < 1 {
            return Err(Error::invalid("family needs n >= 1 and m >= 1"));
        }
        if rows.len() != n || rows.iter().any(|r| r.len() != m + 1) {
            return Err(Error::invalid(format!(
                "coefficient matrix must be {n} rows of {} entries",
                m + 1
            )));
        }
        Ok(ParamFamily { n, m, rows })
    }

    /// x^n + a_1 x^(n-1) + ... + a_n with every coefficient its own parameter.
    pub fn general(n: usize) -> Self {
        let rows = (0..n)
            .map(|j| {
                let mut row = vec![Complex64::new(0.0, 0.0); n + 1];
                row[j + 1] = Complex64::new(1.0, 0.0);
                row
            })
            .collect();
        ParamFamily {
            n,
            m: n,
            rows,
        }
    }

    /// x^n - alpha, the single-branch-point power family.
    pub fn power(n: usize) -> Self {
        let mut rows = vec![vec![Complex64::new(0.0, 0.0); 2]; n];
        rows[n - 1][1] = Complex64::new(-1.0, 0.0);
        ParamFamily { n, m: 1, rows }
    }

    /// The one-parameter quintic y^5 + 15y^4 - 10g y^2 + 3g^2 encoded as an
    /// affine family in (g, g^2); instantiate at (g, g*g) to match it.
    pub fn klein() -> Self {
        let z = Complex64::new(0.0, 0.0);
        let rows = vec![
            vec![Complex64::new(15.0, 0.0), z, z], // y^4
            vec![z, z, z],                          // y^3
            vec![z, Complex64::new(-10.0, 0.0), z], // y^2
            vec![z, z, z],                          // y^1
            vec![z, z, Complex64::new(3.0, 0.0)],   // y^0
        ];
        ParamFamily { n: 5, m: 2, rows }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn rows(&self) -> &[Vec<Complex64>] {
        &self.rows
    }

    /// The monic polynomial at the given parameter point.
    pub fn instantiate(&self, alpha: &[Complex64]) -> Result<Polynomial<Complex64>> {
        if alpha.len() != self.m {
            return Err(Error::invalid(format!(
                "expected {} parameters, got {}",
                self.m,
                alpha.len()
            )));
        }
        let mut coeffs = vec![Complex64::new(0.0, 0.0); self.n + 1];
        coeffs[self.n] = Complex64::new(1.0, 0.0);
        for (j, row) in self.rows.iter().enumerate() {
            let mut v = row[0];
            for (k, a) in alpha.iter().enumerate() {
                v += row[k + 1] * a;
            }
            coeffs[self.n - 1 - j] = v;
        }
        Ok(Polynomial::new(coeffs))
    }

    /// Discriminant of the family restricted to base + s*dir, as a
    /// polynomial in s (degree <= 2n-1), via interpolation at unit-circle
    /// nodes. Exactly-zero samples at every node mean the whole line sits
    /// inside the discriminant locus.
    pub fn line_discriminant(
        &self,
        base: &[Complex64],
        dir: &[Complex64],
    ) -> Result<Polynomial<Complex64>> {
        let count = 2 * self.n;
        let mut points = Vec::with_capacity(count);
        let mut scale: f64 = 0.0;
        for k in 0..count {
            let s = Complex64::interpolation_node(k, count);
            let alpha: Vec<Complex64> = base
                .iter()
                .zip(dir)
                .map(|(b, d)| b + s * d)
                .collect();
            let d = discriminant(&self.instantiate(&alpha)?)?;
            scale = scale.max(d.norm());
            points.push((s, d));
        }
        if scale == 0.0 {
            return Ok(Polynomial::zero());
        }
        Ok(interpolate(&points).trim_relative(1e-11))
    }
}

/// Piecewise-linear closed path in parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    waypoints: Vec<Vec<Complex64>>,
}

impl Loop {
    /// First waypoint is the basepoint and must equal the last exactly.
    pub fn new(waypoints: Vec<Vec<Complex64>>) -> Result<Self> {
        if waypoints.len() < 2 {
            return Err(Error::invalid("loop needs at least two waypoints"));
        }
        if waypoints.first() != waypoints.last() {
            return Err(Error::invalid("loop must be closed (first = last)"));
        }
        for w in waypoints.windows(2) {
            if w[0] == w[1] {
                return Err(Error::invalid("consecutive waypoints must differ"));
            }
        }
        let m = waypoints[0].len();
        if waypoints.iter().any(|w| w.len() != m) {
            return Err(Error::invalid("waypoints must share a dimension"));
        }
        Ok(Loop { waypoints })
    }

    pub fn basepoint(&self) -> &[Complex64] {
        &self.waypoints[0]
    }

    pub fn waypoints(&self) -> &[Vec<Complex64>] {
        &self.waypoints
    }

    pub fn reversed(&self) -> Loop {
        let mut w = self.waypoints.clone();
        w.reverse();
        Loop { waypoints: w }
    }

    /// self followed by other; both must share the basepoint.
    pub fn concat(&self, other: &Loop) -> Result<Loop> {
        if self.basepoint() != other.basepoint() {
            return Err(Error::invalid("loops must share a basepoint"));
        }
        let mut w = self.waypoints.clone();
        w.extend_from_slice(&other.waypoints[1..]);
        Ok(Loop { waypoints: w })
    }

    /// Circle of the given radius around a center in a 1-parameter space,
    /// based at center + radius, with `segments` polygon vertices.
    pub fn circle_1d(center: Complex64, radius: f64, segments: usize) -> Loop {
        let mut w = Vec::with_capacity(segments + 1);
        for k in 0..=segments {
            let theta = 2.0 * std::f64::consts::PI * (k % segments) as f64 / segments as f64;
            w.push(vec![center + Complex64::from_polar(radius, theta)]);
        }
        Loop { waypoints: w }
    }
}

/// Continuation controls.
#[derive(Debug, Clone, Copy)]
pub struct TrackOptions {
    /// first step size, as a fraction of each segment
    pub initial_step: f64,
    /// abort threshold: the path is declared near-critical below this
    pub min_step: f64,
    pub newton_tol: f64,
    /// a corrected root may move at most (min pairwise distance)/this
    pub collision_factor: f64,
}

impl Default for TrackOptions {
    fn default() -> Self {
        TrackOptions {
            initial_step: 1e-2,
            min_step: 1e-8,
            newton_tol: 1e-12,
            collision_factor: 4.0,
        }
    }
}

impl TrackOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.min_step > 0.0 && self.min_step <= self.initial_step) {
            return Err(Error::invalid("need 0 < min_step <= initial_step"));
        }
        if !(self.newton_tol > 0.0) {
            return Err(Error::invalid("newton_tol must be positive"));
        }
        if !(self.collision_factor >= 2.0) {
            return Err(Error::invalid("collision_factor must be >= 2"));
        }
        Ok(())
    }
}

/// One accepted continuation step, for plotting root braids.
#[derive(Debug, Clone)]
pub struct TraceRow {
    pub step: usize,
    pub point: Vec<Complex64>,
    pub roots: Vec<Complex64>,
}

/// Critical values on a line: roots of the restricted discriminant after
/// normalizing its coefficients to unit scale, so the residual tolerance and
/// the root finder's clustering threshold keep their intended meaning.
fn critical_values(d: &Polynomial<Complex64>) -> Result<crate::roots::RootSet> {
    let dscale = d.max_coeff_norm();
    let inv = Complex64::new(1.0 / dscale, 0.0);
    find_roots(&d.scale(&inv), 1e-7)
}

fn min_pairwise(roots: &[Complex64]) -> f64 {
    let mut d = f64::INFINITY;
    for i in 0..roots.len() {
        for j in i + 1..roots.len() {
            d = d.min((roots[i] - roots[j]).norm());
        }
    }
    d
}

fn lerp(a: &[Complex64], b: &[Complex64], t: f64) -> Vec<Complex64> {
    a.iter().zip(b).map(|(x, y)| x + (y - x) * t).collect()
}

/// Tracks all n roots around the loop and returns the permutation sigma with
/// root_i(end) = root_sigma(i)(start), plus the recorded trace.
pub fn track_loop_traced(
    fam: &ParamFamily,
    lp: &Loop,
    opts: &TrackOptions,
) -> Result<(Permutation, Vec<TraceRow>)> {
    opts.validate()?;
    if lp.basepoint().len() != fam.m() {
        return Err(Error::invalid("loop dimension does not match family"));
    }
    let base_poly = fam.instantiate(lp.basepoint())?;
    let scale = base_poly.max_coeff_norm().max(1.0);
    let base_roots_set = find_roots(&base_poly, 1e-8 * scale)?;
    if base_roots_set.max_multiplicity() > 1 {
        return Err(Error::NearCriticalPath {
            point: lp.basepoint().to_vec(),
        });
    }
    let base_roots = base_roots_set.roots.clone();
    let n = base_roots.len();
    let base_min_dist = min_pairwise(&base_roots);

    let mut cur = base_roots.clone();
    let mut trace = vec![TraceRow {
        step: 0,
        point: lp.basepoint().to_vec(),
        roots: cur.clone(),
    }];
    let mut step_no = 0usize;

    for seg in lp.waypoints().windows(2) {
        let (wa, wb) = (&seg[0], &seg[1]);
        let pa = fam.instantiate(wa)?;
        let pb = fam.instantiate(wb)?;
        // coefficients are affine along the segment, so the t-derivative of
        // the polynomial is the constant difference pb - pa
        let q = pb.sub(&pa);
        let mut t = 0.0f64;
        let mut h = opts.initial_step;
        while t < 1.0 {
            h = h.min(1.0 - t);
            let p_t = pa.add(&q.scale(&Complex64::new(t, 0.0)));
            let dp_t = p_t.derivative();
            let t_next = t + h;
            let p_next = pa.add(&q.scale(&Complex64::new(t_next, 0.0)));
            let dp_next = p_next.derivative();
            let dmin = min_pairwise(&cur);
            let guard = dmin / opts.collision_factor;

            let mut accepted = true;
            let mut corrected = Vec::with_capacity(n);
            'roots: for x in &cur {
                let fp = dp_t.eval(x);
                if fp.norm() == 0.0 {
                    accepted = false;
                    break;
                }
                let pred = x - q.eval(x) / fp * h;
                // Newton on the target polynomial
                let mut y = pred;
                let mut ok = false;
                for _ in 0..12 {
                    let d = p_next.eval(&y) / dp_next.eval(&y);
                    if !d.is_finite() {
                        accepted = false;
                        break 'roots;
                    }
                    y -= d;
                    if d.norm() <= opts.newton_tol * (1.0 + y.norm()) {
                        ok = true;
                        break;
                    }
                }
                if !ok || (y - pred).norm() >= guard {
                    accepted = false;
                    break;
                }
                corrected.push(y);
            }

            if accepted {
                t = t_next;
                cur = corrected;
                step_no += 1;
                trace.push(TraceRow {
                    step: step_no,
                    point: lerp(wa, wb, t),
                    roots: cur.clone(),
                });
                h = (h * 1.6).min(0.25);
            } else {
                h *= 0.5;
                if h < opts.min_step {
                    return Err(Error::NearCriticalPath {
                        point: lerp(wa, wb, t),
                    });
                }
            }
        }
    }

    // match the transported roots back onto the base labeling
    let guard = base_min_dist / opts.collision_factor;
    let mut images = vec![usize::MAX; n];
    let mut used = vec![false; n];
    for (i, x) in cur.iter().enumerate() {
        let mut best = (f64::INFINITY, usize::MAX);
        for (j, b) in base_roots.iter().enumerate() {
            let d = (x - b).norm();
            if d < best.0 {
                best = (d, j);
            }
        }
        if best.0 >= guard || best.1 == usize::MAX || used[best.1] {
            return Err(Error::NearCriticalPath {
                point: lp.basepoint().to_vec(),
            });
        }
        used[best.1] = true;
        images[i] = best.1;
    }
    Ok((Permutation::from_images(images)?, trace))
}

pub fn track_loop(fam: &ParamFamily, lp: &Loop, opts: &TrackOptions) -> Result<Permutation> {
    track_loop_traced(fam, lp, opts).map(|(p, _)| p)
}

fn random_direction(rng: &mut ChaCha8Rng, m: usize) -> Vec<Complex64> {
    let mut dir: Vec<Complex64> = (0..m)
        .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
        .collect();
    let norm = dir.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
    if norm > 1e-9 {
        for c in dir.iter_mut() {
            *c /= norm;
        }
    } else {
        dir[0] = Complex64::new(1.0, 0.0);
    }
    dir
}

/// Petal loops on the line base + s*dir: one polygonal loop from the
/// basepoint around each critical value on the line.
fn petals_on_line(
    fam: &ParamFamily,
    base: &[Complex64],
    dir: &[Complex64],
) -> Result<Vec<Loop>> {
    let d = fam.line_discriminant(base, dir)?;
    if d.is_zero_poly() {
        return Err(Error::LineInDiscriminantLocus);
    }
    let deg = d.degree().unwrap_or(0);
    if deg == 0 {
        return Ok(Vec::new());
    }
    let dscale = d.max_coeff_norm().max(1.0);
    if d.eval(&Complex64::new(0.0, 0.0)).norm() <= 1e-10 * dscale {
        return Err(Error::NearCriticalPath {
            point: base.to_vec(),
        });
    }
    let crit = critical_values(&d)?;
    let mut svals = crit.roots.clone();
    // canonical petal order: by argument, then modulus
    svals.sort_by(|a, b| {
        (a.arg(), a.norm())
            .partial_cmp(&(b.arg(), b.norm()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut loops = Vec::with_capacity(svals.len());
    for (k, s) in svals.iter().enumerate() {
        let mut r = s.norm() / 3.0;
        for (j, other) in svals.iter().enumerate() {
            if j != k {
                r = r.min((s - other).norm() / 3.0);
            }
        }
        if !(r > 0.0) {
            continue; // critical value at the basepoint was excluded above
        }
        let unit = s / s.norm();
        let entry = s - unit * r;
        const SEGS: usize = 16;
        let theta0 = (entry - s).arg();
        let mut sway = vec![Complex64::new(0.0, 0.0), entry];
        for j in 1..SEGS {
            let theta = theta0 + 2.0 * std::f64::consts::PI * j as f64 / SEGS as f64;
            sway.push(s + Complex64::from_polar(r, theta));
        }
        sway.push(entry);
        sway.push(Complex64::new(0.0, 0.0));
        let waypoints: Vec<Vec<Complex64>> = sway
            .iter()
            .map(|sv| base.iter().zip(dir).map(|(b, dd)| b + sv * dd).collect())
            .collect();
        loops.push(Loop::new(waypoints)?);
    }
    Ok(loops)
}

/// Seeded petal construction on one random line through the basepoint.
pub fn petal_loops(fam: &ParamFamily, basepoint: &[Complex64], seed: u64) -> Result<Vec<Loop>> {
    if basepoint.len() != fam.m() {
        return Err(Error::invalid("basepoint dimension does not match family"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let dir = random_direction(&mut rng, fam.m());
    petals_on_line(fam, basepoint, &dir)
}

fn seeded_basepoint(fam: &ParamFamily, rng: &mut ChaCha8Rng) -> Result<Vec<Complex64>> {
    for _ in 0..40 {
        let alpha: Vec<Complex64> = (0..fam.m())
            .map(|_| Complex64::new(rng.gen_range(-1.5..1.5), rng.gen_range(-1.5..1.5)))
            .collect();
        let p = fam.instantiate(&alpha)?;
        let d = discriminant(&p)?;
        if d.norm() > 1e-6 * p.max_coeff_norm().max(1.0) {
            return Ok(alpha);
        }
    }
    Err(Error::invalid(
        "could not find a regular basepoint for the family",
    ))
}

/// Monodromy group: closure of the permutations of petal loops on `lines`
/// seeded random lines through a seeded random regular basepoint.
pub fn monodromy_group_with_lines(
    fam: &ParamFamily,
    opts: &TrackOptions,
    seed: u64,
    max_order: usize,
    lines: usize,
) -> Result<PermGroup> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let base = seeded_basepoint(fam, &mut rng)?;
    let mut perms: Vec<Permutation> = Vec::new();
    let mut line_budget = 3 * lines.max(1);
    let mut done = 0;
    while done < lines.max(1) {
        if line_budget == 0 {
            return Err(Error::invalid("petal tracking failed on every line tried"));
        }
        line_budget -= 1;
        let dir = random_direction(&mut rng, fam.m());
        let petals = match petals_on_line(fam, &base, &dir) {
            Ok(p) => p,
            Err(Error::LineInDiscriminantLocus) => continue,
            Err(e) => return Err(e),
        };
        let mut ok = true;
        let mut line_perms = Vec::new();
        for petal in &petals {
            match track_loop(fam, petal, opts) {
                Ok(p) => line_perms.push(p),
                Err(Error::NearCriticalPath { .. }) => {
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if ok {
            perms.extend(line_perms);
            done += 1;
        }
    }
    if perms.is_empty() {
        return Ok(PermGroup::trivial(fam.n()));
    }
    closure(&perms, max_order)
}

pub fn monodromy_group(
    fam: &ParamFamily,
    opts: &TrackOptions,
    seed: u64,
    max_order: usize,
) -> Result<PermGroup> {
    monodromy_group_with_lines(fam, opts, seed, max_order, 1)
}

/// Inertia group at a critical point: closure of the permutation of a small
/// circle of the given radius around it, on a seeded random line.
pub fn inertia_group(
    fam: &ParamFamily,
    critical: &[Complex64],
    radius: f64,
    opts: &TrackOptions,
    seed: u64,
) -> Result<PermGroup> {
    if critical.len() != fam.m() {
        return Err(Error::invalid("point dimension does not match family"));
    }
    if !(radius > 0.0) {
        return Err(Error::invalid("radius must be positive"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut last_err = Error::LineInDiscriminantLocus;
    for _ in 0..4 {
        let dir = random_direction(&mut rng, fam.m());
        let d = fam.line_discriminant(critical, &dir)?;
        if d.is_zero_poly() {
            last_err = Error::LineInDiscriminantLocus;
            continue;
        }
        let dscale = d.max_coeff_norm().max(1.0);
        // basepoint on the circle must be regular
        let s0 = Complex64::new(radius, 0.0);
        if d.eval(&s0).norm() <= 1e-10 * dscale {
            return Err(Error::RadiusTooSmall {
                point: critical.to_vec(),
            });
        }
        // every critical value on the line must be well inside or well outside
        if let Some(deg) = d.degree() {
            if deg >= 1 {
                let crit = critical_values(&d)?;
                for s in &crit.roots {
                    let r = s.norm();
                    if r > 0.25 * radius && r < 1.5 * radius {
                        return Err(Error::RadiusTooSmall {
                            point: critical.to_vec(),
                        });
                    }
                }
            }
        }
        let sloop = Loop::circle_1d(Complex64::new(0.0, 0.0), radius, 24);
        let waypoints: Vec<Vec<Complex64>> = sloop
            .waypoints()
            .iter()
            .map(|sv| {
                critical
                    .iter()
                    .zip(&dir)
                    .map(|(c, dd)| c + sv[0] * dd)
                    .collect()
            })
            .collect();
        let lp = Loop::new(waypoints)?;
        match track_loop(fam, &lp, opts) {
            Ok(p) => {
                if p.is_identity() {
                    return Ok(PermGroup::trivial(fam.n()));
                }
                return closure(&[p], 1_000_000);
            }
            Err(e @ Error::NearCriticalPath { .. }) => {
                last_err = e;
                continue;
            }
            Err(e) => return Err(e),
        }
    }
    Err(last_err)
}

/// Comparison of the monodromy group against the closure of sampled
/// inertia groups.
#[derive(Debug, Clone)]
pub struct TheoremReport {
    pub holds: bool,
    pub monodromy_order: usize,
    pub inertia_closure_order: usize,
}

/// True iff the closure of the inertia groups sampled at `strata_points`
/// equals the monodromy group of the family.
pub fn verify_monodromy_theorem(
    fam: &ParamFamily,
    strata_points: &[Vec<Complex64>],
    radius: f64,
    opts: &TrackOptions,
    seed: u64,
    max_order: usize,
) -> Result<TheoremReport> {
    let mono = monodromy_group(fam, opts, seed, max_order)?;
    let mut gens: Vec<Permutation> = Vec::new();
    for (k, pt) in strata_points.iter().enumerate() {
        let g = inertia_group(fam, pt, radius, opts, seed.wrapping_add(k as u64 + 1))?;
        gens.extend_from_slice(g.elements());
    }
    let inertia_closure = if gens.is_empty() {
        PermGroup::trivial(fam.n())
    } else {
        closure(&gens, max_order)?
    };
    Ok(TheoremReport {
        holds: mono.same_group(&inertia_closure),
        monodromy_order: mono.order(),
        inertia_closure_order: inertia_closure.order(),
    })
}
