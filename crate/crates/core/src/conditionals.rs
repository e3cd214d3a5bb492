//! Finite-conditional distributions, their limits along filtrations, the
//! consistency identities between them, reconstruction of multi-site
//! kernels from one-site kernels, and the Markov radius.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::fields::{ensure_in_window, FiniteDistribution, RandomField};
use crate::lattice::{configuration_count, Alphabet, Configuration, Filtration, Site, Symbol, Volume};
use crate::scalar::Scalar;

/// `g_V^z`: a distribution on the target volume given a finite condition.
#[derive(Clone, Debug, PartialEq)]
pub struct ConditionalKernel<S> {
    condition: Configuration,
    dist: FiniteDistribution<S>,
}

impl<S: Scalar> ConditionalKernel<S> {
    pub fn new(condition: Configuration, dist: FiniteDistribution<S>) -> Result<Self> {
        if !condition.volume().is_disjoint(dist.volume()) {
            return Err(Error::Domain(format!(
                "condition on {} overlaps the target {}",
                condition.volume(),
                dist.volume()
            )));
        }
        Ok(ConditionalKernel { condition, dist })
    }

    pub fn target(&self) -> &Volume {
        self.dist.volume()
    }

    pub fn condition(&self) -> &Configuration {
        &self.condition
    }

    pub fn alphabet(&self) -> &Alphabet {
        self.dist.alphabet()
    }

    pub fn dist(&self) -> &FiniteDistribution<S> {
        &self.dist
    }

    pub fn probs(&self) -> &[S] {
        self.dist.probs()
    }

    pub fn prob_at(&self, index: usize) -> &S {
        self.dist.prob_at(index)
    }

    pub fn prob(&self, x: &Configuration) -> Result<&S> {
        self.dist.prob(x)
    }

    pub fn tolerance(&self) -> f64 {
        self.dist.tolerance()
    }

    /// Same probabilities (exact or within tolerance); conditions are ignored.
    pub fn same_law(&self, other: &ConditionalKernel<S>) -> bool {
        self.dist.approx_eq(&other.dist)
    }

    pub fn sup_distance(&self, other: &ConditionalKernel<S>) -> S {
        self.dist.sup_distance(&other.dist)
    }
}

/// Contribution of each configuration on `sub` to the mixed-radix index on `big`.
pub(crate) fn embedding(big: &Volume, sub: &Volume, q: usize) -> Result<Vec<usize>> {
    let positions = big.positions_of(sub)?;
    let n = big.len();
    let count = q.pow(sub.len() as u32);
    Ok((0..count)
        .map(|i| {
            let mut rest = i;
            let mut acc = 0;
            for &p in positions.iter().rev() {
                acc += (rest % q) * q.pow((n - 1 - p) as u32);
                rest /= q;
            }
            acc
        })
        .collect())
}

fn check_condition_geometry(window: &Volume, target: &Volume, z: &Configuration) -> Result<()> {
    ensure_in_window(window, target)?;
    ensure_in_window(window, z.volume())?;
    if !target.is_disjoint(z.volume()) {
        return Err(Error::Domain(format!(
            "condition on {} overlaps the target {target}",
            z.volume()
        )));
    }
    Ok(())
}

fn null_condition(z: &Configuration, alphabet: &Alphabet) -> Error {
    Error::NullCondition {
        stage: None,
        detail: format!("P({}) = 0", z.display(alphabet)),
    }
}

/// `g_V^z(x) = P_{V∪Λ}(xz) / P_Λ(z)`, by point evaluation of the field.
pub fn finite_conditional<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    target: &Volume,
    z: &Configuration,
) -> Result<ConditionalKernel<S>> {
    check_condition_geometry(m.window(), target, z)?;
    let alphabet = m.alphabet();
    let q = alphabet.size();
    let n = configuration_count(target, alphabet)?;
    let joint = (0..n)
        .map(|i| m.prob(&Configuration::from_index(target, q, i).concat(z)?))
        .collect::<Result<Vec<S>>>()?;
    normalize_kernel(joint, target, z, alphabet, m.tolerance())
}

fn normalize_kernel<S: Scalar>(
    joint: Vec<S>,
    target: &Volume,
    z: &Configuration,
    alphabet: &Alphabet,
    tol: f64,
) -> Result<ConditionalKernel<S>> {
    let total = S::sum(&joint);
    if !(total > S::zero()) {
        return Err(null_condition(z, alphabet));
    }
    let probs = joint.iter().map(|p| p.div_ref(&total)).collect();
    Ok(ConditionalKernel {
        condition: z.clone(),
        dist: FiniteDistribution::from_parts_unchecked(target.clone(), alphabet.clone(), probs, tol),
    })
}

/// Conditional kernel read off a joint table on exactly `target ∪ dom(z)`.
pub fn conditional_from_joint<S: Scalar>(
    joint: &FiniteDistribution<S>,
    target: &Volume,
    z: &Configuration,
) -> Result<ConditionalKernel<S>> {
    let q = joint.alphabet().size();
    if &target.union(z.volume()) != joint.volume() || !target.is_disjoint(z.volume()) {
        return Err(Error::Domain(format!(
            "joint on {} does not split as {target} + {}",
            joint.volume(),
            z.volume()
        )));
    }
    let emb_t = embedding(joint.volume(), target, q)?;
    let base: usize = embedding(joint.volume(), z.volume(), q)?[z.index(q)];
    let vals = emb_t.iter().map(|e| joint.prob_at(base + e).clone()).collect();
    normalize_kernel(vals, target, z, joint.alphabet(), joint.tolerance())
}

/// A boundary condition: a configuration on (part of) the window outside the
/// target, read stage by stage through its restrictions.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Boundary {
    label: String,
    config: Configuration,
}

impl Boundary {
    pub fn new(label: impl Into<String>, config: Configuration) -> Self {
        Boundary {
            label: label.into(),
            config,
        }
    }

    pub fn from_fn(label: impl Into<String>, domain: Volume, f: impl FnMut(&Site) -> Symbol) -> Self {
        Boundary::new(label, Configuration::from_fn(domain, f))
    }

    pub fn constant(label: impl Into<String>, domain: Volume, symbol: Symbol) -> Self {
        Boundary::new(label, Configuration::constant(domain, symbol))
    }

    /// Independent uniform symbols from a seeded generator.
    pub fn random(label: impl Into<String>, domain: Volume, alphabet: &Alphabet, seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let q = alphabet.size();
        Boundary::from_fn(label, domain, |_| Symbol(rng.gen_range(0..q) as u8))
    }

    /// Binary boundary whose fraction of `one` symbols inside stage `n` is
    /// `densities[n]` (rounded), for every stage of the filtration. Sites
    /// beyond the last stage follow the last density.
    pub fn density_schedule(
        label: impl Into<String>,
        domain: Volume,
        filtration: &Filtration,
        densities: &[(u32, u32)],
        zero: Symbol,
        one: Symbol,
    ) -> Result<Self> {
        if densities.len() != filtration.len() {
            return Err(Error::Argument(format!(
                "{} densities for {} stages",
                densities.len(),
                filtration.len()
            )));
        }
        let mut shells: Vec<Volume> = Vec::new();
        let mut covered = Volume::empty();
        for stage in filtration.stages() {
            let s = stage.intersection(&domain);
            shells.push(s.difference(&covered));
            covered = s;
        }
        shells.push(domain.difference(&covered));
        let mut assignment: Vec<(Site, Symbol)> = Vec::with_capacity(domain.len());
        let mut ones_so_far = 0usize;
        let mut size_so_far = 0usize;
        for (n, shell) in shells.iter().enumerate() {
            let (num, den) = densities[n.min(densities.len() - 1)];
            let size = size_so_far + shell.len();
            let target = (2 * num as usize * size + den as usize) / (2 * den as usize);
            let add = if n < filtration.len() {
                if target < ones_so_far || target - ones_so_far > shell.len() {
                    return Err(Error::Argument(format!(
                        "density {num}/{den} unreachable at stage {}: stages grow too slowly",
                        n + 1
                    )));
                }
                target - ones_so_far
            } else {
                target.saturating_sub(ones_so_far).min(shell.len())
            };
            // Spread `add` ones evenly through the shell.
            let len = shell.len();
            for (i, site) in shell.iter().enumerate() {
                let here = (i + 1) * add / len.max(1) > i * add / len.max(1);
                assignment.push((site.clone(), if here { one } else { zero }));
            }
            ones_so_far += add;
            size_so_far = size;
        }
        assignment.sort_by(|a, b| a.0.cmp(&b.0));
        let symbols = assignment.into_iter().map(|(_, s)| s).collect();
        Ok(Boundary::new(label, Configuration::new(domain, symbols)?))
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    /// Restriction to `stage` (which must lie inside the boundary's domain).
    pub fn at(&self, stage: &Volume) -> Result<Configuration> {
        self.config.restrict(stage)
    }
}

/// A finite family of boundary conditions standing in for an admissible set.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BoundaryFamily {
    description: String,
    members: Vec<Boundary>,
}

impl BoundaryFamily {
    pub fn new(description: impl Into<String>, members: Vec<Boundary>) -> Self {
        BoundaryFamily {
            description: description.into(),
            members,
        }
    }

    pub fn members(&self) -> &[Boundary] {
        &self.members
    }

    pub fn description(&self) -> &str {
        &self.description
    }

    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

/// Stage-by-stage finite conditionals along one boundary condition.
#[derive(Clone, Debug, PartialEq)]
pub struct LimitEstimate<S> {
    pub target: Volume,
    pub boundary_label: String,
    pub stage_sizes: Vec<usize>,
    pub values: Vec<ConditionalKernel<S>>,
    /// `gaps[k]` is the sup-distance between stages `k+1` and `k+2` (1-based).
    pub gaps: Vec<S>,
    pub converged: bool,
    pub final_gap: Option<S>,
    pub gaps_non_increasing: bool,
}

impl<S: Scalar> LimitEstimate<S> {
    /// Gap to the previous stage, `None` for the first stage.
    pub fn gap_to_previous(&self, stage: usize) -> Option<&S> {
        stage.checked_sub(1).and_then(|k| self.gaps.get(k))
    }
}

/// Finite conditionals of `target` given the boundary restricted to each
/// stage `Λ_n \ target`.
pub fn limit_along_filtration<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    target: &Volume,
    boundary: &Boundary,
    filtration: &Filtration,
    gap_tol: &S,
) -> Result<LimitEstimate<S>> {
    let mut values = Vec::with_capacity(filtration.len());
    let mut stage_sizes = Vec::with_capacity(filtration.len());
    for (n, stage) in filtration.stages().iter().enumerate() {
        let cond_volume = stage.difference(target);
        let z = boundary.at(&cond_volume)?;
        let k = finite_conditional(m, target, &z).map_err(|e| match e {
            Error::NullCondition { detail, .. } => Error::NullCondition {
                stage: Some(n + 1),
                detail,
            },
            other => other,
        })?;
        stage_sizes.push(stage.len());
        values.push(k);
    }
    let gaps: Vec<S> = values.windows(2).map(|w| w[1].sup_distance(&w[0])).collect();
    let final_gap = gaps.last().cloned();
    let converged = final_gap.as_ref().is_some_and(|g| g <= gap_tol);
    let gaps_non_increasing = gaps.windows(2).all(|w| w[1] <= w[0]);
    Ok(LimitEstimate {
        target: target.clone(),
        boundary_label: boundary.label.clone(),
        stage_sizes,
        values,
        gaps,
        converged,
        final_gap,
        gaps_non_increasing,
    })
}

/// `g_V^z(xy) g_I^{zy}(u) = g_V^z(uy) g_I^{zy}(x)` for all `x, u` on `I` and `y` on `V \ I`.
pub fn check_pair_consistency<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    inner: &Volume,
    outer: &Volume,
    z: &Configuration,
) -> Result<bool> {
    if !inner.is_subset(outer) {
        return Err(Error::Domain(format!("{inner} is not contained in {outer}")));
    }
    check_condition_geometry(m.window(), outer, z)?;
    let joint = m.marginal(&outer.union(z.volume()))?;
    pair_consistency_from_joint(&joint, inner, outer, z, m.tolerance())
}

pub(crate) fn pair_consistency_from_joint<S: Scalar>(
    joint: &FiniteDistribution<S>,
    inner: &Volume,
    outer: &Volume,
    z: &Configuration,
    tol: f64,
) -> Result<bool> {
    let q = joint.alphabet().size();
    let rest = outer.difference(inner);
    let g_outer = conditional_from_joint(joint, outer, z)?;
    let emb_i = embedding(outer, inner, q)?;
    let emb_y = embedding(outer, &rest, q)?;
    for (yi, ey) in emb_y.iter().enumerate() {
        let y = Configuration::from_index(&rest, q, yi);
        let g_inner = conditional_from_joint(joint, inner, &z.concat(&y)?)?;
        for (xi, ex) in emb_i.iter().enumerate() {
            for (ui, eu) in emb_i.iter().enumerate() {
                let lhs = g_outer.prob_at(ex + ey).mul_ref(g_inner.prob_at(ui));
                let rhs = g_outer.prob_at(eu + ey).mul_ref(g_inner.prob_at(xi));
                if !lhs.approx_eq(&rhs, tol) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// The eight-factor identity between one-site kernels at `t` and `s`:
/// `g_t^{zy}(x) g_s^{zx}(v) g_t^{zv}(u) g_s^{zu}(y) = g_t^{zy}(u) g_s^{zu}(v) g_t^{zv}(x) g_s^{zx}(y)`.
pub fn check_one_point_consistency<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    t: &Site,
    s: &Site,
    z: &Configuration,
) -> Result<bool> {
    if t == s {
        return Err(Error::Argument("the two sites must differ".into()));
    }
    let pair = Volume::new([t.clone(), s.clone()]);
    check_condition_geometry(m.window(), &pair, z)?;
    let joint = m.marginal(&pair.union(z.volume()))?;
    let vt = Volume::single(t.clone());
    let vs = Volume::single(s.clone());
    let q = joint.alphabet().size();
    let at_t: Vec<ConditionalKernel<S>> = (0..q)
        .map(|y| conditional_from_joint(&joint, &vt, &z.concat(&Configuration::constant(vs.clone(), Symbol(y as u8)))?))
        .collect::<Result<_>>()?;
    let at_s: Vec<ConditionalKernel<S>> = (0..q)
        .map(|x| conditional_from_joint(&joint, &vs, &z.concat(&Configuration::constant(vt.clone(), Symbol(x as u8)))?))
        .collect::<Result<_>>()?;
    Ok(eight_factor_holds(q, m.tolerance(), |y, x| at_t[y].prob_at(x).clone(), |x, y| {
        at_s[x].prob_at(y).clone()
    }))
}

/// `gt(y, x)` is `g_t^{zy}(x)`; `gs(x, y)` is `g_s^{zx}(y)`.
pub(crate) fn eight_factor_holds<S: Scalar>(
    q: usize,
    tol: f64,
    gt: impl Fn(usize, usize) -> S,
    gs: impl Fn(usize, usize) -> S,
) -> bool {
    eight_factor_residuals(q, gt, gs, |l, r| l.approx_eq(r, tol)).is_none()
}

/// First `(x, u, y, v)` where the identity fails, if any.
pub(crate) fn eight_factor_residuals<S: Scalar>(
    q: usize,
    gt: impl Fn(usize, usize) -> S,
    gs: impl Fn(usize, usize) -> S,
    mut eq: impl FnMut(&S, &S) -> bool,
) -> Option<([usize; 4], S, S)> {
    for x in 0..q {
        for u in 0..q {
            for y in 0..q {
                for v in 0..q {
                    let lhs = gt(y, x).mul_ref(&gs(x, v)).mul_ref(&gt(v, u)).mul_ref(&gs(u, y));
                    let rhs = gt(y, u).mul_ref(&gs(u, v)).mul_ref(&gt(v, x)).mul_ref(&gs(x, y));
                    if !eq(&lhs, &rhs) {
                        return Some(([x, u, y, v], lhs, rhs));
                    }
                }
            }
        }
    }
    None
}

/// Rebuilds `g_V^z` from one-site kernels, visiting `V` in canonical order.
///
/// `one_point(t, c)` must return the kernel at `t` given `c`, a configuration
/// on `(V \ t) ∪ dom(z)`. `reference` defaults to the all-first-symbol
/// configuration.
pub fn reconstruct_from_one_point<S, F>(
    one_point: F,
    target: &Volume,
    z: &Configuration,
    reference: Option<&Configuration>,
    alphabet: &Alphabet,
) -> Result<ConditionalKernel<S>>
where
    S: Scalar,
    F: Fn(&Site, &Configuration) -> Result<ConditionalKernel<S>>,
{
    reconstruct_with_order(one_point, target, target.sites(), z, reference, alphabet)
}

/// [`reconstruct_from_one_point`] with an explicit visiting order `t_1, ..., t_n`.
pub fn reconstruct_with_order<S, F>(
    one_point: F,
    target: &Volume,
    order: &[Site],
    z: &Configuration,
    reference: Option<&Configuration>,
    alphabet: &Alphabet,
) -> Result<ConditionalKernel<S>>
where
    S: Scalar,
    F: Fn(&Site, &Configuration) -> Result<ConditionalKernel<S>>,
{
    if order.len() != target.len() || &Volume::new(order.iter().cloned()) != target {
        return Err(Error::Argument("visiting order is not a permutation of the target".into()));
    }
    if !target.is_disjoint(z.volume()) {
        return Err(Error::Domain(format!(
            "condition on {} overlaps the target {target}",
            z.volume()
        )));
    }
    let q = alphabet.size();
    let n = order.len();
    let count = configuration_count(target, alphabet)?;
    let default_ref;
    let u = match reference {
        Some(u) => {
            if u.volume() != target {
                return Err(Error::Domain(format!("reference lives on {}, not {target}", u.volume())));
            }
            u
        }
        None => {
            default_ref = Configuration::constant(target.clone(), alphabet.first());
            &default_ref
        }
    };
    let u_sym: Vec<Symbol> = order.iter().map(|t| u.get(t).expect("u on target")).collect();

    // ratios[j][prefix * q + a] = g_{t_j}^{z (xu)_j}(a) / g_{t_j}^{z (xu)_j}(u_{t_j}),
    // where the prefix encodes x_{t_1}, ..., x_{t_{j-1}}.
    let mut ratios: Vec<Vec<S>> = Vec::with_capacity(n);
    for (j, tj) in order.iter().enumerate() {
        let after: Vec<(Site, Symbol)> = order[j + 1..]
            .iter()
            .cloned()
            .zip(u_sym[j + 1..].iter().copied())
            .collect();
        let prefixes = q.pow(j as u32);
        let mut row = Vec::with_capacity(prefixes * q);
        for p in 0..prefixes {
            let mut pairs = after.clone();
            let mut rest = p;
            for i in (0..j).rev() {
                pairs.push((order[i].clone(), Symbol((rest % q) as u8)));
                rest /= q;
            }
            let cond = pairs_to_config(pairs)?.concat(z)?;
            let k = one_point(tj, &cond)?;
            if k.target() != &Volume::single(tj.clone()) {
                return Err(Error::Argument(format!("one-point kernel for {tj} has target {}", k.target())));
            }
            let denom = k.prob_at(u_sym[j].index());
            for a in 0..q {
                let num = k.prob_at(a);
                if denom.is_zero() || num.is_zero() {
                    return Err(Error::Positivity(format!(
                        "zero one-point probability at j={} (site {tj}) given {}",
                        j + 1,
                        cond.display(alphabet)
                    )));
                }
                row.push(num.div_ref(denom));
            }
        }
        ratios.push(row);
    }

    let order_pos: Vec<usize> = order
        .iter()
        .map(|t| target.index_of(t).expect("order covers target"))
        .collect();
    let mut weights = Vec::with_capacity(count);
    for xi in 0..count {
        let x = Configuration::from_index(target, q, xi);
        let digits: Vec<usize> = order_pos.iter().map(|&p| x.symbols()[p].index()).collect();
        let mut w = S::one();
        let mut prefix = 0usize;
        for j in 0..n {
            w = w.mul_ref(&ratios[j][prefix * q + digits[j]]);
            prefix = prefix * q + digits[j];
        }
        weights.push(w);
    }
    let total = S::sum(&weights);
    let probs = weights.iter().map(|w| w.div_ref(&total)).collect();
    Ok(ConditionalKernel {
        condition: z.clone(),
        dist: FiniteDistribution::from_parts_unchecked(target.clone(), alphabet.clone(), probs, crate::scalar::DEFAULT_TOL),
    })
}

fn pairs_to_config(mut pairs: Vec<(Site, Symbol)>) -> Result<Configuration> {
    pairs.sort_by(|a, b| a.0.cmp(&b.0));
    let (sites, symbols): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
    Configuration::new(Volume::new(sites), symbols)
}

/// Exhaustive up to this many subsets / conditions, sampled beyond.
const MARKOV_EXHAUSTIVE: usize = 4096;
const MARKOV_SAMPLES: usize = 256;
const MARKOV_SEED: u64 = 0x6766_6c5f_6d61_726b;

/// Smallest `r <= max_r` such that one-site kernels at `t` depend only on
/// the condition inside `ball(t, r)`, for every conditioning volume that
/// contains that ball. `None` when no such radius exists.
///
/// Conditioning volumes and conditions are enumerated exhaustively while
/// there are at most 4096 of them, otherwise sampled with a fixed seed.
pub fn markov_radius<S: Scalar, M: RandomField<S> + ?Sized>(m: &M, t: &Site, max_r: u32) -> Result<Option<u32>> {
    let window = m.window();
    if !Volume::ball(t, max_r).is_subset(window) {
        return Err(Error::Geometry(format!(
            "ball of radius {max_r} around {t} leaves the window"
        )));
    }
    let target = Volume::single(t.clone());
    let outside = window.without(t);
    let q = m.alphabet().size();
    let mut rng = ChaCha8Rng::seed_from_u64(MARKOV_SEED);
    'radius: for r in 0..=max_r {
        let ball = Volume::ball(t, r).intersection(&outside);
        let refs: Vec<ConditionalKernel<S>> = {
            let joint = m.marginal(&ball.union(&target))?;
            let nb = configuration_count(&ball, m.alphabet())?;
            (0..nb)
                .map(|i| conditional_from_joint(&joint, &target, &Configuration::from_index(&ball, q, i)))
                .collect::<Result<_>>()?
        };
        let rest = outside.difference(&ball);
        let masks: Vec<u64> = if rest.len() < 63 && (1usize << rest.len()) <= MARKOV_EXHAUSTIVE {
            (0..(1u64 << rest.len())).collect()
        } else {
            let full = if rest.len() >= 64 { u64::MAX } else { (1u64 << rest.len()) - 1 };
            let mut v = vec![0, full];
            v.extend((0..MARKOV_SAMPLES).map(|_| rng.gen::<u64>() & full));
            v
        };
        for mask in masks {
            let lambda = ball.union(&rest.subset_by_mask(mask));
            let pos_ball = lambda.positions_of(&ball)?;
            let key = |z: &Configuration| pos_ball.iter().fold(0usize, |acc, &p| acc * q + z.symbols()[p].index());
            let total = (q as u128).saturating_pow(lambda.len() as u32 + 1);
            if total <= MARKOV_EXHAUSTIVE as u128 * 16 {
                let joint = m.marginal(&lambda.union(&target))?;
                for zi in 0..q.pow(lambda.len() as u32) {
                    let z = Configuration::from_index(&lambda, q, zi);
                    let k = conditional_from_joint(&joint, &target, &z)?;
                    if !k.dist.approx_eq(&refs[key(&z)].dist) {
                        continue 'radius;
                    }
                }
            } else {
                for _ in 0..MARKOV_SAMPLES / 4 {
                    let z = Configuration::from_fn(lambda.clone(), |_| Symbol(rng.gen_range(0..q) as u8));
                    let k = finite_conditional(m, &target, &z)?;
                    if !k.dist.approx_eq(&refs[key(&z)].dist) {
                        continue 'radius;
                    }
                }
            }
        }
        return Ok(Some(r));
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::{table_field, ProductField, TableField};
    use crate::scalar::Rational;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn bernoulli(window: Volume, p: Rational) -> ProductField<Rational> {
        ProductField::new(window, Alphabet::binary(), vec![r(1, 1) - &p, p]).unwrap()
    }

    fn weights_table(n: i32, seed: u64) -> TableField<Rational> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Volume::interval(0, n - 1);
        let weights = (0..1usize << n).map(|_| r(rng.gen_range(1..=50), 1)).collect();
        TableField::new(FiniteDistribution::from_weights(w, Alphabet::binary(), weights).unwrap())
    }

    #[test]
    fn product_field_conditionals_ignore_the_condition() {
        let m = bernoulli(Volume::interval(0, 4), r(1, 3));
        let z = Configuration::parse("(0)=1;(3)=0;(4)=1", &Alphabet::binary()).unwrap();
        let k = finite_conditional(&m, &Volume::single(Site::from(2)), &z).unwrap();
        assert_eq!(k.probs(), &[r(2, 3), r(1, 3)]);
    }

    #[test]
    fn null_condition_is_reported() {
        let w = Volume::interval(0, 1);
        let m = table_field(w, Alphabet::binary(), vec![r(1, 2), r(1, 2), r(0, 1), r(0, 1)]).unwrap();
        let z = Configuration::parse("(0)=1", &Alphabet::binary()).unwrap();
        let e = finite_conditional(&m, &Volume::single(Site::from(1)), &z).unwrap_err();
        assert!(matches!(e, Error::NullCondition { stage: None, .. }));
    }

    #[test]
    fn overlapping_condition_is_rejected() {
        let m = bernoulli(Volume::interval(0, 2), r(1, 2));
        let z = Configuration::parse("(1)=1", &Alphabet::binary()).unwrap();
        assert!(finite_conditional(&m, &Volume::interval(0, 1), &z).is_err());
    }

    #[test]
    fn pair_and_one_point_identities_on_a_table() {
        let m = weights_table(4, 7);
        let window = m.window().clone();
        let inner = Volume::single(Site::from(1));
        let outer = Volume::new([Site::from(1), Site::from(2)]);
        for zi in 0..4 {
            let z = Configuration::from_index(&Volume::new([Site::from(0), Site::from(3)]), 2, zi);
            assert!(check_pair_consistency(&m, &inner, &outer, &z).unwrap());
            assert!(check_one_point_consistency(&m, &Site::from(1), &Site::from(2), &z).unwrap());
        }
        let _ = window;
    }

    #[test]
    fn perturbed_one_point_kernel_breaks_the_eight_factor_identity() {
        let m = weights_table(3, 11);
        let (t, s) = (Site::from(0), Site::from(1));
        let z = Configuration::parse("(2)=1", &Alphabet::binary()).unwrap();
        let kernel = |site: &Site, other: &Site, v: usize| {
            let c = z.concat(&Configuration::constant(Volume::single(other.clone()), Symbol(v as u8))).unwrap();
            finite_conditional(&m, &Volume::single(site.clone()), &c).unwrap()
        };
        let gt = |y: usize, x: usize| kernel(&t, &s, y).prob_at(x).clone();
        let gs = |x: usize, y: usize| kernel(&s, &t, x).prob_at(y).clone();
        assert!(eight_factor_holds(2, 0.0, gt, gs));
        let bumped = |y: usize, x: usize| {
            let p = kernel(&t, &s, y);
            let w = if y == 1 { [p.prob_at(0) * r(1, 1), p.prob_at(1) * r(101, 100)] } else { [p.prob_at(0).clone(), p.prob_at(1).clone()] };
            &w[x] / (&w[0] + &w[1])
        };
        assert!(!eight_factor_holds(2, 0.0, bumped, gs));
    }

    #[test]
    fn limit_for_product_field_is_immediate() {
        let w = Volume::interval(-6, 6);
        let m = bernoulli(w.clone(), r(1, 4));
        let f = crate::lattice::box_filtration(&Site::from(0), &[1, 2, 4, 6], &w).unwrap();
        let t = Volume::single(Site::from(0));
        let b = Boundary::random("random", w.difference(&t), &Alphabet::binary(), 3);
        let est = limit_along_filtration(&m, &t, &b, &f, &r(0, 1)).unwrap();
        assert!(est.converged);
        assert_eq!(est.final_gap, Some(r(0, 1)));
        assert!(est.gap_to_previous(0).is_none());
        assert_eq!(est.stage_sizes, vec![3, 5, 9, 13]);
    }

    #[test]
    fn density_schedule_hits_each_stage() {
        let w = Volume::interval(-40, 40);
        let t = Volume::single(Site::from(0));
        let f = crate::lattice::box_filtration(&Site::from(0), &[2, 8, 26], &w).unwrap();
        let b = Boundary::density_schedule("osc", w.difference(&t), &f, &[(1, 4), (3, 4), (1, 4)], Symbol(0), Symbol(1)).unwrap();
        for (stage, (num, den)) in f.stages().iter().zip([(1, 4), (3, 4), (1, 4)]) {
            let z = b.at(&stage.difference(&t)).unwrap();
            let n = z.len();
            assert_eq!(z.count(Symbol(1)), (2 * num * n + den) / (2 * den), "stage of size {n}");
        }
        let slow = crate::lattice::box_filtration(&Site::from(0), &[2, 3], &w).unwrap();
        assert!(Boundary::density_schedule("x", w.difference(&t), &slow, &[(0, 1), (1, 1)], Symbol(0), Symbol(1)).is_err());
    }

    #[test]
    fn single_site_reconstruction_returns_the_kernel() {
        let m = weights_table(3, 5);
        let t = Volume::single(Site::from(1));
        let z = Configuration::parse("(0)=1;(2)=0", &Alphabet::binary()).unwrap();
        let direct = finite_conditional(&m, &t, &z).unwrap();
        let rec = reconstruct_from_one_point(
            |s: &Site, c: &Configuration| finite_conditional(&m, &Volume::single(s.clone()), c),
            &t,
            &z,
            None,
            m.alphabet(),
        )
        .unwrap();
        assert_eq!(rec.probs(), direct.probs());
    }

    #[test]
    fn reconstruction_rejects_zero_one_point_probabilities() {
        let w = Volume::interval(0, 1);
        let m = table_field(w.clone(), Alphabet::binary(), vec![r(1, 2), r(0, 1), r(1, 4), r(1, 4)]).unwrap();
        let e = reconstruct_from_one_point(
            |s: &Site, c: &Configuration| finite_conditional(&m, &Volume::single(s.clone()), c),
            &w,
            &Configuration::empty(),
            None,
            m.alphabet(),
        )
        .unwrap_err();
        assert!(matches!(e, Error::Positivity(ref msg) if msg.contains("j=")));
    }

    #[test]
    fn markov_radius_of_product_is_zero() {
        let m = bernoulli(Volume::interval(0, 6), r(2, 5));
        assert_eq!(markov_radius(&m, &Site::from(3), 2).unwrap(), Some(0));
        assert!(matches!(markov_radius(&m, &Site::from(1), 2), Err(Error::Geometry(_))));
    }
}
