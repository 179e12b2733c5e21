//! The group-invariant form Phi: the product over the group of the linear
//! forms t_1 x_{S(1)} + ... + t_n x_{S(n)}, its vanishing on coincidence
//! subspaces, restricted forms, stratification of parameter points, and the
//! chain lower bound on resolvent parameters.
//!
//! Phi is kept factored (group + roots); an exact sparse expansion is
//! attached when the group is small enough. Vanishing on the subspace cut
//! out by the block-sum conditions is decided by sampling; a form that is
//! not identically zero there vanishes only on a measure-zero subset, so a
//! false positive needs every sample to hit it.

use std::collections::HashMap;

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::monodromy::ParamFamily;
use crate::perm::{max_chain_with, ChainParity, PermGroup, Permutation, SetPartition};
use crate::roots::{find_roots, RootSet};

/// Sparse polynomial in t_1..t_nt and (optionally) formal x_1..x_nx.
/// Numeric-root expansions have nx = 0 and complex coefficients.
#[derive(Debug, Clone)]
pub struct MultiPoly {
    nt: usize,
    nx: usize,
    terms: HashMap<(Box<[u8]>, Box<[u8]>), Complex64>,
}

impl MultiPoly {
    fn one(nt: usize, nx: usize) -> Self {
        let mut terms = HashMap::new();
        terms.insert(
            (
                vec![0u8; nt].into_boxed_slice(),
                vec![0u8; nx].into_boxed_slice(),
            ),
            Complex64::new(1.0, 0.0),
        );
        MultiPoly { nt, nx, terms }
    }

    fn insert_term(&mut self, key: (Box<[u8]>, Box<[u8]>), val: Complex64) {
        let entry = self.terms.entry(key).or_insert(Complex64::new(0.0, 0.0));
        *entry += val;
        if entry.norm() == 0.0 {
            // keep exact cancellations out of the map
        }
    }

    /// Multiplies by sum of monomial terms (t index, coefficient, x index).
    fn mul_linear(&self, items: &[(usize, Complex64, Option<usize>)]) -> Self {
        let mut out = MultiPoly {
            nt: self.nt,
            nx: self.nx,
            terms: HashMap::with_capacity(self.terms.len() * items.len()),
        };
        for ((texp, xexp), coef) in &self.terms {
            for (ti, c, xi) in items {
                let mut t2 = texp.clone();
                t2[*ti] += 1;
                let mut x2 = xexp.clone();
                if let Some(xi) = xi {
                    x2[*xi] += 1;
                }
                out.insert_term((t2, x2), coef * c);
            }
        }
        out
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn max_coeff_norm(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn eval(&self, t: &[Complex64], x: &[Complex64]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for ((texp, xexp), coef) in &self.terms {
            let mut term = *coef;
            for (i, &e) in texp.iter().enumerate() {
                for _ in 0..e {
                    term *= t[i];
                }
            }
            for (i, &e) in xexp.iter().enumerate() {
                for _ in 0..e {
                    term *= x[i];
                }
            }
            acc += term;
        }
        acc
    }

    pub fn coeff(&self, texp: &[u8], xexp: &[u8]) -> Complex64 {
        self.terms
            .get(&(
                texp.to_vec().into_boxed_slice(),
                xexp.to_vec().into_boxed_slice(),
            ))
            .copied()
            .unwrap_or(Complex64::new(0.0, 0.0))
    }

    /// Substitutes t_dep := -(sum of t_j over js) for each dependent entry;
    /// singleton blocks substitute t_dep := 0.
    fn substitute_neg_sums(&self, dependents: &[(usize, Vec<usize>)]) -> Self {
        let mut cur = self.clone();
        for (dep, js) in dependents {
            let mut out = MultiPoly {
                nt: cur.nt,
                nx: cur.nx,
                terms: HashMap::with_capacity(cur.terms.len()),
            };
            for ((texp, xexp), coef) in &cur.terms {
                let e = texp[*dep] as usize;
                let mut base = texp.clone();
                base[*dep] = 0;
                if e == 0 {
                    out.insert_term((base, xexp.clone()), *coef);
                    continue;
                }
                if js.is_empty() {
                    continue; // t_dep = 0 kills the term
                }
                // expand (-(t_j1 + ... + t_jk))^e one factor at a time
                let mut partial = MultiPoly {
                    nt: cur.nt,
                    nx: cur.nx,
                    terms: HashMap::from([((base, xexp.clone()), *coef)]),
                };
                let items: Vec<(usize, Complex64, Option<usize>)> = js
                    .iter()
                    .map(|&j| (j, Complex64::new(-1.0, 0.0), None))
                    .collect();
                for _ in 0..e {
                    partial = partial.mul_linear(&items);
                }
                for (k, v) in partial.terms {
                    out.insert_term(k, v);
                }
            }
            cur = out;
        }
        cur.terms.retain(|_, v| v.norm() > 0.0);
        cur
    }
}

/// Root data a form is built over.
#[derive(Debug, Clone)]
pub enum PhiRoots {
    Numeric(Vec<Complex64>),
    /// formal x_1..x_n
    Symbolic,
}

impl PhiRoots {
    pub fn from_root_set(rs: &RootSet) -> Self {
        PhiRoots::Numeric(rs.expanded())
    }
}

/// The invariant form: one linear factor per group element.
#[derive(Debug, Clone)]
pub struct FormPhi {
    n: usize,
    group: Vec<Permutation>,
    roots: PhiRoots,
    expanded: Option<MultiPoly>,
}

/// Symbolic expansions beyond this many sparse terms are refused rather
/// than ground out.
const EXPANSION_TERM_GUARD: usize = 500_000;

pub const DEFAULT_EXPAND_LIMIT: usize = 24;

/// Builds Phi for the group over the given roots. The factored form is
/// always present; the exact expansion is attached when the group order is
/// within `expand_limit`. Symbolic roots above the limit cannot even be
/// evaluated, so that combination is an error.
pub fn build_phi(group: &PermGroup, roots: PhiRoots, expand_limit: usize) -> Result<FormPhi> {
    let n = group.n();
    if let PhiRoots::Numeric(xs) = &roots {
        if xs.len() != n {
            return Err(Error::invalid(format!(
                "group degree {n} vs {} roots",
                xs.len()
            )));
        }
    }
    let order = group.order();
    let within = order <= expand_limit;
    let expanded = match (&roots, within) {
        (PhiRoots::Numeric(xs), true) => Some(expand(group, Some(xs), n)?),
        (PhiRoots::Numeric(_), false) => None,
        (PhiRoots::Symbolic, true) => Some(expand(group, None, n)?),
        (PhiRoots::Symbolic, false) => {
            return Err(Error::EvaluationOnly {
                order,
                limit: expand_limit,
            })
        }
    };
    Ok(FormPhi {
        n,
        group: group.elements().to_vec(),
        roots,
        expanded,
    })
}

fn expand(group: &PermGroup, xs: Option<&[Complex64]>, n: usize) -> Result<MultiPoly> {
    let nx = if xs.is_some() { 0 } else { n };
    let mut poly = MultiPoly::one(n, nx);
    for s in group.elements() {
        let items: Vec<(usize, Complex64, Option<usize>)> = (0..n)
            .map(|i| match xs {
                Some(xs) => (i, xs[s.apply(i)], None),
                None => (i, Complex64::new(1.0, 0.0), Some(s.apply(i))),
            })
            .collect();
        poly = poly.mul_linear(&items);
        if poly.num_terms() > EXPANSION_TERM_GUARD {
            return Err(Error::EvaluationOnly {
                order: group.order(),
                limit: group.order(),
            });
        }
    }
    Ok(poly)
}

impl FormPhi {
    pub fn n(&self) -> usize {
        self.n
    }

    pub fn group(&self) -> &[Permutation] {
        &self.group
    }

    pub fn roots(&self) -> &PhiRoots {
        &self.roots
    }

    pub fn expanded(&self) -> Option<&MultiPoly> {
        self.expanded.as_ref()
    }

    fn numeric_roots(&self) -> Result<&[Complex64]> {
        match &self.roots {
            PhiRoots::Numeric(xs) => Ok(xs),
            PhiRoots::Symbolic => Err(Error::invalid(
                "operation needs a form built over numeric roots",
            )),
        }
    }

    /// One linear factor: sum_i t_i x_{S(i)}.
    fn factor_eval(s: &Permutation, t: &[Complex64], xs: &[Complex64]) -> Complex64 {
        t.iter()
            .enumerate()
            .map(|(i, ti)| ti * xs[s.apply(i)])
            .sum()
    }

    /// Product of the factors over explicitly supplied root values.
    pub fn eval_with_roots(&self, t: &[Complex64], xs: &[Complex64]) -> Result<Complex64> {
        if t.len() != self.n || xs.len() != self.n {
            return Err(Error::invalid("t and roots must have length n"));
        }
        Ok(self
            .group
            .iter()
            .map(|s| Self::factor_eval(s, t, xs))
            .product())
    }
}

/// Evaluates the factored product at t.
pub fn phi_eval(phi: &FormPhi, t: &[Complex64]) -> Result<Complex64> {
    let xs = phi.numeric_roots()?.to_vec();
    phi.eval_with_roots(t, &xs)
}

/// True iff permuting the roots by g leaves the form unchanged at `trials`
/// random t vectors (the factor multiset is merely reordered when g is in
/// the defining group).
pub fn phi_invariant_under(phi: &FormPhi, g: &Permutation, trials: usize) -> Result<bool> {
    if g.degree() != phi.n {
        return Err(Error::DegreeMismatch {
            left: g.degree(),
            right: phi.n,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x1a4a1a);
    let xs: Vec<Complex64> = match &phi.roots {
        PhiRoots::Numeric(v) => v.clone(),
        // generic formal values stand in for symbolic roots
        PhiRoots::Symbolic => (0..phi.n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect(),
    };
    let permuted: Vec<Complex64> = (0..phi.n).map(|i| xs[g.apply(i)]).collect();
    for _ in 0..trials.max(1) {
        let t: Vec<Complex64> = (0..phi.n)
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let a = phi.eval_with_roots(&t, &xs)?;
        let b = phi.eval_with_roots(&t, &permuted)?;
        if (a - b).norm() > 1e-8 * a.norm().max(b.norm()).max(1.0) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// Parameterization of the solution set of the block-sum conditions: for
/// each block the largest index is dependent and carries minus the sum of
/// the rest; singleton blocks force their coordinate to zero.
#[derive(Debug, Clone)]
pub struct SubspaceBasis {
    n: usize,
    pub free: Vec<usize>,
    pub dependent: Vec<(usize, Vec<usize>)>,
}

impl SubspaceBasis {
    pub fn dim(&self) -> usize {
        self.free.len()
    }

    /// Full t vector from values of the free coordinates.
    pub fn embed(&self, free_vals: &[Complex64]) -> Result<Vec<Complex64>> {
        if free_vals.len() != self.free.len() {
            return Err(Error::invalid("wrong number of free coordinates"));
        }
        let mut t = vec![Complex64::new(0.0, 0.0); self.n];
        for (slot, v) in self.free.iter().zip(free_vals) {
            t[*slot] = *v;
        }
        for (dep, js) in &self.dependent {
            t[*dep] = -js.iter().map(|&j| t[j]).sum::<Complex64>();
        }
        Ok(t)
    }
}

pub fn coincidence_subspace_basis(partition: &SetPartition) -> SubspaceBasis {
    let mut free = Vec::new();
    let mut dependent = Vec::new();
    for block in partition.blocks() {
        let dep = *block.last().expect("blocks are nonempty");
        let others: Vec<usize> = block[..block.len() - 1].to_vec();
        free.extend_from_slice(&others);
        dependent.push((dep, others));
    }
    free.sort_unstable();
    SubspaceBasis {
        n: partition.n(),
        free,
        dependent,
    }
}

/// Result of a sampled vanishing test.
#[derive(Debug, Clone, Copy)]
pub struct VanishOutcome {
    pub vanishes: bool,
    /// the all-singletons partition collapses the subspace to the origin,
    /// where the form vanishes for the empty reason
    pub degenerate_subspace: bool,
}

/// Samples the subspace cut out by the partition's block sums and tests
/// whether some factor of Phi vanishes (relative to its own magnitude) at
/// every sample.
pub fn phi_vanishes_on(
    phi: &FormPhi,
    partition: &SetPartition,
    samples: usize,
    tol: f64,
) -> Result<VanishOutcome> {
    if partition.n() != phi.n {
        return Err(Error::DegreeMismatch {
            left: partition.n(),
            right: phi.n,
        });
    }
    let xs = phi.numeric_roots()?;
    let basis = coincidence_subspace_basis(partition);
    if basis.dim() == 0 {
        return Ok(VanishOutcome {
            vanishes: true,
            degenerate_subspace: true,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x7a615e5);
    for _ in 0..samples.max(1) {
        let free: Vec<Complex64> = (0..basis.dim())
            .map(|_| Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
            .collect();
        let t = basis.embed(&free)?;
        let some_factor_vanishes = phi.group.iter().any(|s| {
            let val = FormPhi::factor_eval(s, &t, xs);
            let scale: f64 = t
                .iter()
                .enumerate()
                .map(|(i, ti)| ti.norm() * xs[s.apply(i)].norm())
                .sum();
            val.norm() <= tol * scale.max(1e-12)
        });
        if !some_factor_vanishes {
            return Ok(VanishOutcome {
                vanishes: false,
                degenerate_subspace: false,
            });
        }
    }
    Ok(VanishOutcome {
        vanishes: true,
        degenerate_subspace: false,
    })
}

/// Phi with the dependent coordinates substituted out: a form in the free
/// coordinates only.
#[derive(Debug, Clone)]
pub struct RestrictedPhi {
    pub free: Vec<usize>,
    /// per factor, coefficients of the free coordinates (numeric roots)
    pub factors: Option<Vec<Vec<Complex64>>>,
    /// exact restricted expansion when the source form had one
    pub expanded: Option<MultiPoly>,
    pub all_coefficients_vanish: bool,
}

pub fn restrict_phi(phi: &FormPhi, partition: &SetPartition) -> Result<RestrictedPhi> {
    if partition.n() != phi.n {
        return Err(Error::DegreeMismatch {
            left: partition.n(),
            right: phi.n,
        });
    }
    let basis = coincidence_subspace_basis(partition);

    // block dependent index for every point
    let mut dep_of = vec![0usize; phi.n];
    for (dep, js) in &basis.dependent {
        dep_of[*dep] = *dep;
        for &j in js {
            dep_of[j] = *dep;
        }
    }

    let factors = match &phi.roots {
        PhiRoots::Numeric(xs) => Some(
            phi.group
                .iter()
                .map(|s| {
                    basis
                        .free
                        .iter()
                        .map(|&i| xs[s.apply(i)] - xs[s.apply(dep_of[i])])
                        .collect::<Vec<_>>()
                })
                .collect::<Vec<_>>(),
        ),
        PhiRoots::Symbolic => None,
    };

    let expanded = phi
        .expanded
        .as_ref()
        .map(|e| e.substitute_neg_sums(&basis.dependent));

    // The restriction of a product of linear forms is identically zero iff
    // one factor restricts to the zero form, which is decidable factor by
    // factor; thresholding the expanded coefficients instead would drown in
    // the magnitude spread of large-group expansions.
    let all_coefficients_vanish = if basis.free.is_empty() {
        true
    } else {
        match (&factors, &phi.roots) {
            (Some(fs), PhiRoots::Numeric(xs)) => {
                let scale = xs.iter().map(|x| x.norm()).fold(1.0, f64::max);
                fs.iter().any(|f| f.iter().all(|c| c.norm() <= 1e-8 * scale))
            }
            // formal roots are pairwise distinct, so no factor collapses
            _ => false,
        }
    };

    Ok(RestrictedPhi {
        free: basis.free,
        factors,
        expanded,
        all_coefficients_vanish,
    })
}

/// A coincidence stratum: the partition, a parameter point realizing it,
/// and a complex codimension.
#[derive(Debug, Clone)]
pub struct Stratum {
    pub partition: SetPartition,
    pub sample_point: Vec<Complex64>,
    pub complex_codim: usize,
}

/// Clusters the roots at `alpha` at scale `tol` into a coincidence
/// partition. Indices refer to the canonically sorted root list.
pub fn stratify_point(fam: &ParamFamily, alpha: &[Complex64], tol: f64) -> Result<Stratum> {
    let p = fam.instantiate(alpha)?;
    let scale = p.max_coeff_norm().max(1.0);
    let rs = find_roots(&p, 1e-7 * scale)?;
    let roots = rs.expanded();
    let n = roots.len();

    // single-linkage clustering at scale tol
    let mut labels: Vec<usize> = (0..n).collect();
    loop {
        let mut merged = false;
        for i in 0..n {
            for j in i + 1..n {
                if (roots[i] - roots[j]).norm() < tol && labels[i] != labels[j] {
                    let (a, b) = (labels[i].min(labels[j]), labels[i].max(labels[j]));
                    for l in labels.iter_mut() {
                        if *l == b {
                            *l = a;
                        }
                    }
                    merged = true;
                }
            }
        }
        if !merged {
            break;
        }
    }
    // ambiguity guard: distinct clusters must be clearly separated
    for i in 0..n {
        for j in i + 1..n {
            if labels[i] != labels[j] && (roots[i] - roots[j]).norm() < 10.0 * tol {
                return Err(Error::AmbiguousClustering);
            }
        }
    }
    let mut blocks: HashMap<usize, Vec<usize>> = HashMap::new();
    for (i, l) in labels.iter().enumerate() {
        blocks.entry(*l).or_default().push(i);
    }
    let partition = SetPartition::from_blocks(n, blocks.into_values().collect())?;
    let codim = n - partition.block_count();
    Ok(Stratum {
        partition,
        sample_point: alpha.to_vec(),
        complex_codim: codim,
    })
}

/// Solves the complex system A x = b with full pivoting; free variables are
/// zero; returns None when the system is inconsistent beyond tol.
fn solve_affine(a: &[Vec<Complex64>], b: &[Complex64], tol: f64) -> Option<Vec<Complex64>> {
    let rows = a.len();
    let cols = if rows > 0 { a[0].len() } else { 0 };
    let mut m: Vec<Vec<Complex64>> = a.to_vec();
    let mut rhs = b.to_vec();
    let mut colperm: Vec<usize> = (0..cols).collect();
    let scale = a
        .iter()
        .flatten()
        .map(|c| c.norm())
        .chain(b.iter().map(|c| c.norm()))
        .fold(1.0, f64::max);

    let mut rank = 0;
    while rank < rows.min(cols) {
        // full pivot
        let mut best = (0.0f64, rank, rank);
        for i in rank..rows {
            for j in rank..cols {
                let w = m[i][j].norm();
                if w > best.0 {
                    best = (w, i, j);
                }
            }
        }
        if best.0 <= 1e-12 * scale {
            break;
        }
        m.swap(rank, best.1);
        rhs.swap(rank, best.1);
        if best.2 != rank {
            for row in m.iter_mut() {
                row.swap(rank, best.2);
            }
            colperm.swap(rank, best.2);
        }
        for i in rank + 1..rows {
            let f = m[i][rank] / m[rank][rank];
            for j in rank..cols {
                let v = m[rank][j];
                m[i][j] -= f * v;
            }
            let v = rhs[rank];
            rhs[i] -= f * v;
        }
        rank += 1;
    }
    // consistency of the eliminated rows
    for i in rank..rows {
        if rhs[i].norm() > tol * scale {
            return None;
        }
    }
    // back substitution, free variables zero
    let mut x = vec![Complex64::new(0.0, 0.0); cols];
    for i in (0..rank).rev() {
        let mut v = rhs[i];
        for j in i + 1..cols {
            v -= m[i][j] * x[j];
        }
        x[i] = v / m[i][i];
    }
    let mut out = vec![Complex64::new(0.0, 0.0); cols];
    for (pos, &orig) in colperm.iter().enumerate() {
        out[orig] = x[pos];
    }
    Some(out)
}

/// Planted root values tried when realizing a stratum, in order. The first
/// candidate puts the largest block at 0: a high-multiplicity root at the
/// origin is the one place double precision resolves it exactly, and
/// families like x^2 - a only meet some strata there anyway.
fn candidate_block_values(block_sizes: &[usize]) -> Vec<Vec<Complex64>> {
    let r = block_sizes.len();
    let mut out: Vec<Vec<Complex64>> = Vec::new();
    let real = |k: i64| Complex64::new(k as f64, 0.0);
    let largest = block_sizes
        .iter()
        .enumerate()
        .max_by_key(|(_, &s)| s)
        .map(|(i, _)| i)
        .unwrap_or(0);
    let mut zero_first = vec![Complex64::new(0.0, 0.0); r];
    let mut next = 1i64;
    for (i, v) in zero_first.iter_mut().enumerate() {
        if i != largest {
            *v = real(next);
            next += 1;
        }
    }
    out.push(zero_first);
    out.push((1..=r as i64).map(real).collect());
    out.push((0..r as i64).map(real).collect());
    out.push((0..r as i64).map(|k| real(k - (r as i64) / 2)).collect());
    out.push((0..r as i64).map(|k| real(-(k + 1))).collect());
    let mut rng = ChaCha8Rng::seed_from_u64(0x5742a7a);
    for _ in 0..8 {
        let mut vals: Vec<Complex64> = Vec::new();
        while vals.len() < r {
            let v = Complex64::new(rng.gen_range(-2.0..2.0), rng.gen_range(-2.0..2.0));
            if vals.iter().all(|w| (w - v).norm() > 0.3) {
                vals.push(v);
            }
        }
        out.push(vals);
    }
    out
}

/// A parameter point whose polynomial has exactly the given coincidence
/// pattern: plant one root value per block, expand, and solve the
/// affine-linear system for the parameters.
pub fn realize_stratum(fam: &ParamFamily, partition: &SetPartition) -> Result<Vec<Complex64>> {
    let n = fam.n();
    if partition.n() != n {
        return Err(Error::DegreeMismatch {
            left: partition.n(),
            right: n,
        });
    }
    let sizes: Vec<usize> = partition.blocks().iter().map(|b| b.len()).collect();
    for values in candidate_block_values(&sizes) {
        // target polynomial with the planted pattern
        let mut roots: Vec<Complex64> = Vec::with_capacity(n);
        for (b, block) in partition.blocks().iter().enumerate() {
            roots.extend(std::iter::repeat(values[b]).take(block.len()));
        }
        let target = crate::poly::Polynomial::monic_from_roots(&roots);
        // rows[j] is the affine form for the coefficient of x^(n-1-j)
        let a: Vec<Vec<Complex64>> = fam.rows().iter().map(|row| row[1..].to_vec()).collect();
        let b: Vec<Complex64> = fam
            .rows()
            .iter()
            .enumerate()
            .map(|(j, row)| target.coeff(n - 1 - j) - row[0])
            .collect();
        let Some(alpha) = solve_affine(&a, &b, 1e-9) else {
            continue;
        };
        // the target carries the requested pattern by construction (planted
        // values are distinct), so hitting it coefficient-wise is enough
        let realized = fam.instantiate(&alpha)?;
        let scale = target.max_coeff_norm().max(1.0);
        let hit = (0..n).all(|k| (realized.coeff(k) - target.coeff(k)).norm() <= 1e-8 * scale);
        if hit {
            return Ok(alpha);
        }
    }
    Err(Error::StratumNotRealizable)
}

/// Which permutations are admissible as chain elements.
#[derive(Debug, Clone, Copy)]
pub enum ChainConstraint<'a> {
    Any,
    EvenOnly,
    Group(&'a PermGroup),
}

/// Longest strict coarsening chain of coincidence partitions that are both
/// admissible under the constraint and realizable in the family, with the
/// identity/transposition bottom exclusion. Returns the chain as strata;
/// stratum k of the returned chain carries complex codimension k, the
/// one-extra-equation-per-step count of the nested critical manifolds.
pub fn parameter_lower_bound(
    fam: &ParamFamily,
    constraint: ChainConstraint<'_>,
) -> Result<(usize, Vec<Stratum>)> {
    let n = fam.n();
    let mut realizable_memo: HashMap<SetPartition, bool> = HashMap::new();
    let parity = match constraint {
        ChainConstraint::EvenOnly => ChainParity::EvenOnly,
        _ => ChainParity::Any,
    };
    let mut admit = |p: &SetPartition| -> bool {
        if let ChainConstraint::Group(g) = constraint {
            if !g.contains(&p.realizing_permutation()) {
                return false;
            }
        }
        *realizable_memo
            .entry(p.clone())
            .or_insert_with(|| realize_stratum(fam, p).is_ok())
    };
    let (len, witness) = max_chain_with(n, parity, Some(&mut admit));
    let mut chain = Vec::with_capacity(witness.len());
    for (k, p) in witness.iter().enumerate() {
        let point = realize_stratum(fam, p)?;
        chain.push(Stratum {
            partition: p.clone(),
            sample_point: point,
            complex_codim: k + 1,
        });
    }
    Ok((len, chain))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::perm::closure;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sym_group(n: usize) -> PermGroup {
        let mut gens = vec![Permutation::from_cycles(&[vec![1, 2]], n).unwrap()];
        if n > 2 {
            gens.push(Permutation::from_cycles(&[(1..=n).collect::<Vec<_>>()], n).unwrap());
        }
        closure(&gens, 10_000).unwrap()
    }

    #[test]
    fn s2_symbolic_expansion_matches_hand_formula() {
        // (t1 x1 + t2 x2)(t1 x2 + t2 x1)
        //   = x1 x2 (t1^2 + t2^2) + (x1^2 + x2^2) t1 t2
        let g = sym_group(2);
        let phi = build_phi(&g, PhiRoots::Symbolic, 24).unwrap();
        let e = phi.expanded().unwrap();
        assert_eq!(e.coeff(&[2, 0], &[1, 1]), c(1.0, 0.0));
        assert_eq!(e.coeff(&[0, 2], &[1, 1]), c(1.0, 0.0));
        assert_eq!(e.coeff(&[1, 1], &[2, 0]), c(1.0, 0.0));
        assert_eq!(e.coeff(&[1, 1], &[0, 2]), c(1.0, 0.0));
        assert_eq!(e.coeff(&[2, 0], &[2, 0]), c(0.0, 0.0));

        // coefficients are symmetric in x by construction; spot-check by
        // swapping x values in evaluation
        let t = [c(0.3, 0.1), c(-0.7, 0.4)];
        let x = [c(1.5, -0.2), c(0.4, 0.9)];
        let xs = [x[1], x[0]];
        assert!((e.eval(&t, &x) - e.eval(&t, &xs)).norm() < 1e-12);
    }

    #[test]
    fn trivial_group_single_factor() {
        let g = PermGroup::trivial(3);
        let phi = build_phi(
            &g,
            PhiRoots::Numeric(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]),
            24,
        )
        .unwrap();
        assert_eq!(phi.group().len(), 1);
        // t1 x1 + t2 x2 + t3 x3 at t = (1,1,1)
        let v = phi_eval(&phi, &[c(1.0, 0.0); 3]).unwrap();
        assert!((v - c(6.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn large_group_is_factored_only() {
        let g = sym_group(5);
        let roots: Vec<Complex64> = (0..5).map(|k| c(k as f64 + 1.0, 0.0)).collect();
        let phi = build_phi(&g, PhiRoots::Numeric(roots), 24).unwrap();
        assert!(phi.expanded().is_none());
        assert!(matches!(
            build_phi(&g, PhiRoots::Symbolic, 24),
            Err(Error::EvaluationOnly { order: 120, limit: 24 })
        ));
    }

    #[test]
    fn phi_eval_examples() {
        let g = sym_group(2);
        let phi = build_phi(&g, PhiRoots::Numeric(vec![c(2.0, 0.0), c(3.0, 0.0)]), 24).unwrap();
        // zero vector kills every factor
        assert_eq!(phi_eval(&phi, &[c(0.0, 0.0), c(0.0, 0.0)]).unwrap(), c(0.0, 0.0));
        // (2 + 3)(3 + 2) = 25
        let v = phi_eval(&phi, &[c(1.0, 0.0), c(1.0, 0.0)]).unwrap();
        assert!((v - c(25.0, 0.0)).norm() < 1e-12);
        // t = e1 picks prod_S x_{S(1)} = 2 * 3 = 6
        let v = phi_eval(&phi, &[c(1.0, 0.0), c(0.0, 0.0)]).unwrap();
        assert!((v - c(6.0, 0.0)).norm() < 1e-12);

        // expansion agrees with the factored product at random t
        let e = phi.expanded().unwrap();
        let t = [c(0.37, -0.21), c(0.84, 0.55)];
        let direct = phi_eval(&phi, &t).unwrap();
        assert!((e.eval(&t, &[]) - direct).norm() < 1e-8 * direct.norm().max(1.0));
    }

    #[test]
    fn invariance_examples() {
        let g = sym_group(2);
        let phi = build_phi(&g, PhiRoots::Numeric(vec![c(2.0, 0.0), c(3.0, 0.0)]), 24).unwrap();
        let id = Permutation::identity(2);
        let swap = Permutation::from_cycles(&[vec![1, 2]], 2).unwrap();
        assert!(phi_invariant_under(&phi, &id, 8).unwrap());
        assert!(phi_invariant_under(&phi, &swap, 8).unwrap());

        // a proper-subgroup form is generically not invariant under outsiders
        let trivial = PermGroup::trivial(2);
        let phi1 = build_phi(
            &trivial,
            PhiRoots::Numeric(vec![c(2.0, 0.0), c(3.0, 0.0)]),
            24,
        )
        .unwrap();
        assert!(!phi_invariant_under(&phi1, &swap, 8).unwrap());
    }

    #[test]
    fn group_invariance_exhaustive_s3() {
        let g = sym_group(3);
        let phi = build_phi(
            &g,
            PhiRoots::Numeric(vec![c(1.3, 0.2), c(-0.4, 0.9), c(0.7, -1.1)]),
            24,
        )
        .unwrap();
        for s in g.elements() {
            assert!(phi_invariant_under(&phi, s, 6).unwrap());
        }
    }

    #[test]
    fn group_invariance_exhaustive_s4() {
        // order 24 sits exactly on the expansion limit
        let g = sym_group(4);
        let phi = build_phi(
            &g,
            PhiRoots::Numeric(vec![c(1.3, 0.2), c(-0.4, 0.9), c(0.7, -1.1), c(-1.6, 0.3)]),
            24,
        )
        .unwrap();
        assert!(phi.expanded().is_some());
        for s in g.elements() {
            assert!(phi_invariant_under(&phi, s, 4).unwrap());
        }
    }

    #[test]
    fn subspace_basis_examples() {
        let p = SetPartition::parse("{1,2}{3}", 3).unwrap();
        let b = coincidence_subspace_basis(&p);
        assert_eq!(b.free, vec![0]);
        assert_eq!(b.dim(), 1);
        let t = b.embed(&[c(2.0, 0.0)]).unwrap();
        assert_eq!(t[0], c(2.0, 0.0));
        assert_eq!(t[1], c(-2.0, 0.0));
        assert_eq!(t[2], c(0.0, 0.0));

        let p = SetPartition::singletons(4);
        assert_eq!(coincidence_subspace_basis(&p).dim(), 0);

        let p = SetPartition::parse("{1,2,3}{4,5}", 5).unwrap();
        let b = coincidence_subspace_basis(&p);
        assert_eq!(b.free, vec![0, 1, 3]);
    }

    #[test]
    fn vanishing_with_planted_coincidence() {
        let g = sym_group(3);
        // x1 = x2, third root distinct
        let phi = build_phi(
            &g,
            PhiRoots::Numeric(vec![c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]),
            24,
        )
        .unwrap();
        let p12 = SetPartition::parse("{1,2}{3}", 3).unwrap();
        assert!(phi_vanishes_on(&phi, &p12, 20, 1e-8).unwrap().vanishes);

        // all roots distinct: no nontrivial vanishing
        let phi = build_phi(
            &g,
            PhiRoots::Numeric(vec![c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0)]),
            24,
        )
        .unwrap();
        let out = phi_vanishes_on(&phi, &p12, 20, 1e-8).unwrap();
        assert!(!out.vanishes);

        // all-singletons partition: subspace is the origin
        let out = phi_vanishes_on(&phi, &SetPartition::singletons(3), 20, 1e-8).unwrap();
        assert!(out.vanishes && out.degenerate_subspace);
    }

    #[test]
    fn restriction_s2_hand_computation() {
        // substitute t2 = -t1: (t1 x1 - t1 x2)(t1 x2 - t1 x1) = -t1^2 (x1 - x2)^2
        let g = sym_group(2);
        let phi = build_phi(&g, PhiRoots::Symbolic, 24).unwrap();
        let p = SetPartition::parse("{1,2}", 2).unwrap();
        let r = restrict_phi(&phi, &p).unwrap();
        assert!(!r.all_coefficients_vanish);
        let e = r.expanded.unwrap();
        assert_eq!(e.coeff(&[2, 0], &[2, 0]), c(-1.0, 0.0));
        assert_eq!(e.coeff(&[2, 0], &[1, 1]), c(2.0, 0.0));
        assert_eq!(e.coeff(&[2, 0], &[0, 2]), c(-1.0, 0.0));
    }

    #[test]
    fn restriction_numeric_with_coincidence_vanishes() {
        let g = sym_group(3);
        let phi = build_phi(
            &g,
            PhiRoots::Numeric(vec![c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0)]),
            24,
        )
        .unwrap();
        let p = SetPartition::parse("{1,2}{3}", 3).unwrap();
        let r = restrict_phi(&phi, &p).unwrap();
        assert!(r.all_coefficients_vanish);

        // sampled agreement
        let v = phi_vanishes_on(&phi, &p, 20, 1e-8).unwrap();
        assert_eq!(r.all_coefficients_vanish, v.vanishes);
    }

    #[test]
    fn vanishing_iff_brute_force_n3() {
        // over all partitions and all planted coincidence patterns, the
        // sampled vanishing test must match the combinatorial predicate:
        // some group image of the partition refines the pattern
        let g = sym_group(3);
        let partitions = crate::perm::all_partitions(3);
        for pattern in &partitions {
            // roots constant on the blocks of `pattern`, distinct across blocks
            let mut roots = vec![c(0.0, 0.0); 3];
            for (bi, block) in pattern.blocks().iter().enumerate() {
                for &i in block {
                    roots[i] = c(1.0 + bi as f64 * 1.7, 0.3 * bi as f64);
                }
            }
            let phi = build_phi(&g, PhiRoots::Numeric(roots), 24).unwrap();
            for p in &partitions {
                let got = phi_vanishes_on(&phi, p, 20, 1e-8).unwrap().vanishes;
                let expected = oracle_matches(p, pattern, &g);
                assert_eq!(
                    got, expected,
                    "partition {p} on pattern {pattern}: sampled {got}, oracle {expected}"
                );
                // and the exact-expansion route agrees
                let r = restrict_phi(&phi, p).unwrap();
                assert_eq!(r.all_coefficients_vanish, expected);
            }
        }
    }

    /// independent combinatorial oracle: exists S in G with every block of
    /// S(partition) inside one coincidence class of the pattern
    pub(crate) fn oracle_matches(
        partition: &SetPartition,
        pattern: &SetPartition,
        g: &PermGroup,
    ) -> bool {
        let n = partition.n();
        let mut class = vec![0usize; n];
        for (k, b) in pattern.blocks().iter().enumerate() {
            for &i in b {
                class[i] = k;
            }
        }
        g.elements().iter().any(|s| {
            partition.blocks().iter().all(|b| {
                let c0 = class[s.apply(b[0])];
                b.iter().all(|&i| class[s.apply(i)] == c0)
            })
        })
    }

    #[test]
    fn stratify_examples() {
        let fam = ParamFamily::general(5);
        let point = |roots: &[Complex64]| -> Vec<Complex64> {
            let p = crate::poly::Polynomial::monic_from_roots(roots);
            (0..5).map(|j| p.coeff(4 - j)).collect()
        };
        let s = stratify_point(
            &fam,
            &point(&[c(1.0, 0.0), c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0)]),
            1e-6,
        )
        .unwrap();
        assert_eq!(s.partition.to_string(), "{1,2}{3}{4}{5}");
        assert_eq!(s.complex_codim, 1);

        let s = stratify_point(
            &fam,
            &point(&[c(1.0, 0.0); 3].iter().chain(&[c(2.0, 0.0); 2]).copied().collect::<Vec<_>>()),
            1e-6,
        )
        .unwrap();
        assert_eq!(s.partition.to_string(), "{1,2,3}{4,5}");
        assert_eq!(s.complex_codim, 3);

        let s = stratify_point(
            &fam,
            &point(&[c(1.0, 0.0), c(2.0, 0.0), c(3.0, 0.0), c(4.0, 0.0), c(5.0, 0.0)]),
            1e-6,
        )
        .unwrap();
        assert!(s.partition.is_singletons());
        assert_eq!(s.complex_codim, 0);
    }

    #[test]
    fn stratify_ambiguous_clustering_errors() {
        // gap of 5 tol between clusters is inside the 10x guard band
        let fam = ParamFamily::general(3);
        let p = crate::poly::Polynomial::monic_from_roots(&[
            c(0.0, 0.0),
            c(0.05, 0.0),
            c(1.0, 0.0),
        ]);
        let alpha: Vec<Complex64> = (0..3).map(|j| p.coeff(2 - j)).collect();
        assert!(matches!(
            stratify_point(&fam, &alpha, 1e-2),
            Err(Error::AmbiguousClustering)
        ));
    }

    #[test]
    fn realize_stratum_examples() {
        let fam = ParamFamily::general(3);
        let p = SetPartition::parse("{1,2}{3}", 3).unwrap();
        let alpha = realize_stratum(&fam, &p).unwrap();
        let s = stratify_point(&fam, &alpha, 1e-6).unwrap();
        assert_eq!(s.partition, p);

        let fam5 = ParamFamily::general(5);
        let whole = SetPartition::parse("{1,2,3,4,5}", 5).unwrap();
        let alpha = realize_stratum(&fam5, &whole).unwrap();
        let s = stratify_point(&fam5, &alpha, 1e-6).unwrap();
        assert_eq!(s.partition, whole);

        // constant nonzero discriminant: nothing nontrivial is realizable
        let z = c(0.0, 0.0);
        let fam_const = ParamFamily::new(
            2,
            1,
            vec![vec![z, z], vec![c(1.0, 0.0), z]],
        )
        .unwrap();
        let p2 = SetPartition::parse("{1,2}", 2).unwrap();
        assert!(matches!(
            realize_stratum(&fam_const, &p2),
            Err(Error::StratumNotRealizable)
        ));
    }

    #[test]
    fn realize_stratum_power_family_needs_zero() {
        // x^2 - a only has its double root at a = 0, so the planted value
        // must be 0; the candidate list covers it
        let fam = ParamFamily::power(2);
        let p = SetPartition::parse("{1,2}", 2).unwrap();
        let alpha = realize_stratum(&fam, &p).unwrap();
        assert!(alpha[0].norm() < 1e-9);
    }

    #[test]
    fn lower_bound_quintic_even_chain() {
        let fam = ParamFamily::general(5);
        let (q1, chain) = parameter_lower_bound(&fam, ChainConstraint::EvenOnly).unwrap();
        assert_eq!(q1, 2);
        assert_eq!(chain.len(), 2);
        assert_eq!(chain[0].partition.to_string(), "{1,2,3}{4}{5}");
        assert_eq!(chain[1].partition.to_string(), "{1,2,3,4,5}");
        assert_eq!(chain[0].complex_codim, 1);
        assert_eq!(chain[1].complex_codim, 2);
        // the sample points genuinely realize the chain patterns
        for s in &chain {
            let verified = stratify_point(&fam, &s.sample_point, 1e-6).unwrap();
            assert_eq!(verified.partition, s.partition);
        }
    }

    #[test]
    fn lower_bound_with_explicit_group_constraint() {
        // alternating group on 5 points as an explicit constraint gives the
        // same bound as the parity flag
        let a5 = closure(
            &[
                Permutation::from_cycles(&[vec![1, 2, 3]], 5).unwrap(),
                Permutation::from_cycles(&[vec![3, 4, 5]], 5).unwrap(),
            ],
            1000,
        )
        .unwrap();
        let fam = ParamFamily::general(5);
        let (q1, _) = parameter_lower_bound(&fam, ChainConstraint::Group(&a5)).unwrap();
        assert_eq!(q1, 2);
    }

    #[test]
    fn lower_bound_square_root_family_excluded_bottom() {
        // {1,2} is realizable but is a transposition, and the bottom
        // exclusion leaves nothing
        let fam = ParamFamily::power(2);
        let (q1, chain) = parameter_lower_bound(&fam, ChainConstraint::Any).unwrap();
        assert_eq!(q1, 0);
        assert!(chain.is_empty());
    }
}
