//! A-priori objects: one-point specifications, specifications, one-point
//! transition energy fields, their axiom validators, and constructions from
//! finite-range potentials and measure systems.
//!
//! Boundary arguments are finite configurations; for fields and potentials
//! restricted to a window, a configuration on the whole complement of the
//! target inside the window plays the part of an infinite boundary.

use alloc::boxed::Box;
use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::conditionals::{
    eight_factor_residuals, embedding, finite_conditional, reconstruct_from_one_point, Boundary, ConditionalKernel,
};
use crate::energy::{energy_distance, exchange_violation, gibbs_form_from_energy, transition_energy, TransitionEnergy};
use crate::error::{Error, Result};
use crate::fields::{FiniteDistribution, RandomField};
use crate::lattice::{configuration_count, Alphabet, Configuration, Filtration, Site, Symbol, Volume};
use crate::scalar::{Scalar, DEFAULT_TOL};

/// `q_t^z`: one-site kernels indexed by a site and a boundary condition.
pub trait OnePointSpec<S: Scalar>: Send + Sync {
    fn window(&self) -> &Volume;
    fn alphabet(&self) -> &Alphabet;
    fn kernel(&self, t: &Site, boundary: &Configuration) -> Result<ConditionalKernel<S>>;
    fn tolerance(&self) -> f64 {
        DEFAULT_TOL
    }
}

/// `q_V^z` for finite volumes `V`.
pub trait Specification<S: Scalar>: Send + Sync {
    fn window(&self) -> &Volume;
    fn alphabet(&self) -> &Alphabet;
    fn kernel(&self, v: &Volume, boundary: &Configuration) -> Result<ConditionalKernel<S>>;
    fn tolerance(&self) -> f64 {
        DEFAULT_TOL
    }
}

/// `δ_t^z(x, u)`: one-site transition energies.
pub trait OnePointTef<S: Scalar>: Send + Sync {
    fn window(&self) -> &Volume;
    fn alphabet(&self) -> &Alphabet;
    fn energy(&self, t: &Site, boundary: &Configuration) -> Result<TransitionEnergy<S>>;
    fn tolerance(&self) -> f64 {
        DEFAULT_TOL
    }
}

macro_rules! forward_refs {
    ($tr:ident, $method:ident, $arg:ty, $out:ty) => {
        impl<S: Scalar, T: $tr<S> + ?Sized> $tr<S> for &T {
            fn window(&self) -> &Volume {
                (**self).window()
            }
            fn alphabet(&self) -> &Alphabet {
                (**self).alphabet()
            }
            fn $method(&self, a: &$arg, b: &Configuration) -> Result<$out> {
                (**self).$method(a, b)
            }
            fn tolerance(&self) -> f64 {
                (**self).tolerance()
            }
        }
        impl<S: Scalar, T: $tr<S> + ?Sized> $tr<S> for Box<T> {
            fn window(&self) -> &Volume {
                (**self).window()
            }
            fn alphabet(&self) -> &Alphabet {
                (**self).alphabet()
            }
            fn $method(&self, a: &$arg, b: &Configuration) -> Result<$out> {
                (**self).$method(a, b)
            }
            fn tolerance(&self) -> f64 {
                (**self).tolerance()
            }
        }
    };
}

forward_refs!(OnePointSpec, kernel, Site, ConditionalKernel<S>);
forward_refs!(Specification, kernel, Volume, ConditionalKernel<S>);
forward_refs!(OnePointTef, energy, Site, TransitionEnergy<S>);

/// The one-point finite conditionals of a field.
#[derive(Clone, Debug)]
pub struct FieldOnePoint<M>(pub M);

impl<S: Scalar, M: RandomField<S>> OnePointSpec<S> for FieldOnePoint<M> {
    fn window(&self) -> &Volume {
        self.0.window()
    }
    fn alphabet(&self) -> &Alphabet {
        self.0.alphabet()
    }
    fn kernel(&self, t: &Site, boundary: &Configuration) -> Result<ConditionalKernel<S>> {
        finite_conditional(&self.0, &Volume::single(t.clone()), boundary)
    }
    fn tolerance(&self) -> f64 {
        self.0.tolerance()
    }
}

/// The finite conditionals of a field on arbitrary volumes.
#[derive(Clone, Debug)]
pub struct FieldSpec<M>(pub M);

impl<S: Scalar, M: RandomField<S>> Specification<S> for FieldSpec<M> {
    fn window(&self) -> &Volume {
        self.0.window()
    }
    fn alphabet(&self) -> &Alphabet {
        self.0.alphabet()
    }
    fn kernel(&self, v: &Volume, boundary: &Configuration) -> Result<ConditionalKernel<S>> {
        finite_conditional(&self.0, v, boundary)
    }
    fn tolerance(&self) -> f64 {
        self.0.tolerance()
    }
}

// ---------------------------------------------------------------------------
// Fixtures and reports

/// `(t, s, z)` with `z` on a volume disjoint from `{t, s}`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OnePointFixture {
    pub t: Site,
    pub s: Site,
    pub z: Configuration,
}

/// `(I, V, z)` with `I` a nonempty proper subset of `V`, `z` disjoint from `V`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpecFixture {
    pub inner: Volume,
    pub outer: Volume,
    pub z: Configuration,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FixtureSet<F> {
    pub fixtures: Vec<F>,
    /// Size of the quantified space the fixtures are drawn from.
    pub population: u128,
    pub exhaustive: bool,
    pub seed: Option<u64>,
}

fn pow_u128(q: usize, e: usize) -> u128 {
    (q as u128).checked_pow(e as u32).unwrap_or(u128::MAX)
}

fn random_config(rng: &mut ChaCha8Rng, v: Volume, q: usize) -> Configuration {
    Configuration::from_fn(v, |_| Symbol(rng.gen_range(0..q) as u8))
}

/// Ordered site pairs of the window with full boundaries on the rest:
/// all of them when there are at most `samples`, else `samples` drawn with
/// `seed`.
pub fn one_point_fixtures(window: &Volume, alphabet: &Alphabet, samples: usize, seed: u64) -> FixtureSet<OnePointFixture> {
    let n = window.len();
    let q = alphabet.size();
    if n < 2 {
        return FixtureSet {
            fixtures: Vec::new(),
            population: 0,
            exhaustive: true,
            seed: None,
        };
    }
    let population = ((n * (n - 1)) as u128).saturating_mul(pow_u128(q, n - 2));
    let mut fixtures = Vec::new();
    if population <= samples as u128 {
        for t in window.iter() {
            for s in window.iter().filter(|s| *s != t) {
                let rest = window.without(t).without(s);
                for zi in 0..q.pow(rest.len() as u32) {
                    fixtures.push(OnePointFixture {
                        t: t.clone(),
                        s: s.clone(),
                        z: Configuration::from_index(&rest, q, zi),
                    });
                }
            }
        }
        return FixtureSet {
            fixtures,
            population,
            exhaustive: true,
            seed: None,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let t = rng.gen_range(0..n);
        let s = (t + rng.gen_range(1..n)) % n;
        let (t, s) = (window.sites()[t].clone(), window.sites()[s].clone());
        let rest = window.without(&t).without(&s);
        fixtures.push(OnePointFixture {
            t,
            s,
            z: random_config(&mut rng, rest, q),
        });
    }
    FixtureSet {
        fixtures,
        population,
        exhaustive: false,
        seed: Some(seed),
    }
}

/// `(I, V, z)` with `2 <= |V| <= max_volume`, `z` the full boundary on the
/// window outside `V`; exhaustive or sampled as for [`one_point_fixtures`].
pub fn spec_fixtures(
    window: &Volume,
    alphabet: &Alphabet,
    max_volume: usize,
    samples: usize,
    seed: u64,
) -> FixtureSet<SpecFixture> {
    let n = window.len();
    let q = alphabet.size();
    let max_volume = max_volume.min(n);
    let mut population: u128 = 0;
    for k in 2..=max_volume {
        let choose = binomial(n, k);
        let inners = (1u128 << k) - 2;
        population = population.saturating_add(choose.saturating_mul(inners).saturating_mul(pow_u128(q, n - k)));
    }
    let mut fixtures = Vec::new();
    if population <= samples as u128 && n < 64 {
        for mask in 1u64..(1u64 << n) {
            let k = mask.count_ones() as usize;
            if k < 2 || k > max_volume {
                continue;
            }
            let outer = window.subset_by_mask(mask);
            let rest = window.difference(&outer);
            for imask in 1u64..(1u64 << k) - 1 {
                let inner = outer.subset_by_mask(imask);
                for zi in 0..q.pow(rest.len() as u32) {
                    fixtures.push(SpecFixture {
                        inner: inner.clone(),
                        outer: outer.clone(),
                        z: Configuration::from_index(&rest, q, zi),
                    });
                }
            }
        }
        return FixtureSet {
            fixtures,
            population,
            exhaustive: true,
            seed: None,
        };
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..samples {
        let k = rng.gen_range(2..=max_volume.max(2));
        let mut picked = BTreeSet::new();
        while picked.len() < k {
            picked.insert(rng.gen_range(0..n));
        }
        let outer = Volume::new(picked.iter().map(|&i| window.sites()[i].clone()));
        let imask = rng.gen_range(1u64..(1u64 << k) - 1);
        let inner = outer.subset_by_mask(imask);
        let rest = window.difference(&outer);
        fixtures.push(SpecFixture {
            inner,
            outer,
            z: random_config(&mut rng, rest, q),
        });
    }
    FixtureSet {
        fixtures,
        population,
        exhaustive: false,
        seed: Some(seed),
    }
}

fn binomial(n: usize, k: usize) -> u128 {
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i as u128 + 1))
}

#[derive(Clone, Debug, PartialEq)]
pub struct Violation {
    pub fixture: String,
    pub detail: String,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ValidationReport {
    pub axiom: String,
    pub fixtures_checked: usize,
    pub population: u128,
    pub exhaustive: bool,
    /// Violations in fixture order, at most [`MAX_LISTED_VIOLATIONS`].
    pub violations: Vec<Violation>,
    pub violation_count: usize,
    pub max_residual: f64,
}

pub const MAX_LISTED_VIOLATIONS: usize = 1000;

impl ValidationReport {
    pub fn new(axiom: impl Into<String>) -> Self {
        ValidationReport {
            axiom: axiom.into(),
            fixtures_checked: 0,
            population: 0,
            exhaustive: true,
            violations: Vec::new(),
            violation_count: 0,
            max_residual: 0.0,
        }
    }

    /// Folds per-fixture outcomes, in order.
    pub fn from_outcomes<F>(axiom: impl Into<String>, set: &FixtureSet<F>, outcomes: impl IntoIterator<Item = Outcome>) -> Self {
        let mut report = ValidationReport::new(axiom);
        report.population = set.population;
        report.exhaustive = set.exhaustive;
        for o in outcomes {
            report.record(o);
        }
        report
    }

    pub fn record(&mut self, outcome: Outcome) {
        self.fixtures_checked += 1;
        self.max_residual = self.max_residual.max(outcome.residual);
        if let Some(v) = outcome.violation {
            self.violation_count += 1;
            if self.violations.len() < MAX_LISTED_VIOLATIONS {
                self.violations.push(v);
            }
        }
    }

    pub fn passed(&self) -> bool {
        self.violation_count == 0
    }

    /// Concatenates another report's fixtures (same axiom label kept).
    pub fn merge(&mut self, other: ValidationReport) {
        self.fixtures_checked += other.fixtures_checked;
        self.population = self.population.saturating_add(other.population);
        self.exhaustive &= other.exhaustive;
        self.max_residual = self.max_residual.max(other.max_residual);
        self.violation_count += other.violation_count;
        let room = MAX_LISTED_VIOLATIONS.saturating_sub(self.violations.len());
        self.violations.extend(other.violations.into_iter().take(room));
    }
}

/// Result of checking one fixture.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub residual: f64,
    pub violation: Option<Violation>,
}

fn check_normalized<S: Scalar>(k: &ConditionalKernel<S>, what: &str) -> Result<()> {
    let total = S::sum(k.probs());
    if !total.approx_eq(&S::one(), k.tolerance().max(if S::EXACT { 0.0 } else { DEFAULT_TOL })) {
        return Err(Error::Validation(format!("{what} sums to {}", total.render())));
    }
    if k.probs().iter().any(|p| !(*p > S::zero())) {
        return Err(Error::Validation(format!("{what} has a non-positive entry")));
    }
    Ok(())
}

fn with_site(z: &Configuration, site: &Site, sym: usize) -> Result<Configuration> {
    z.concat(&Configuration::constant(Volume::single(site.clone()), Symbol(sym as u8)))
}

fn one_point_label(fx: &OnePointFixture, alphabet: &Alphabet) -> String {
    format!("t={} s={} z={}", fx.t, fx.s, fx.z.display(alphabet))
}

/// The eight-factor identity for one fixture.
pub fn check_1spec_fixture<S: Scalar, Q: OnePointSpec<S> + ?Sized>(q: &Q, fx: &OnePointFixture) -> Result<Outcome> {
    let alphabet = q.alphabet();
    let n = alphabet.size();
    let at_t: Vec<ConditionalKernel<S>> = (0..n)
        .map(|y| q.kernel(&fx.t, &with_site(&fx.z, &fx.s, y)?))
        .collect::<Result<_>>()?;
    let at_s: Vec<ConditionalKernel<S>> = (0..n)
        .map(|x| q.kernel(&fx.s, &with_site(&fx.z, &fx.t, x)?))
        .collect::<Result<_>>()?;
    for k in at_t.iter().chain(&at_s) {
        check_normalized(k, &format!("kernel at {} given {}", k.target(), k.condition().display(alphabet)))?;
    }
    let tol = q.tolerance();
    let mut worst = 0.0f64;
    let found = eight_factor_residuals(
        n,
        |y, x| at_t[y].prob_at(x).clone(),
        |x, y| at_s[x].prob_at(y).clone(),
        |l, r| {
            worst = worst.max(S::residual(l, r));
            l.approx_eq(r, tol)
        },
    );
    Ok(Outcome {
        residual: worst,
        violation: found.map(|([x, u, y, v], l, r)| Violation {
            fixture: one_point_label(fx, alphabet),
            detail: format!(
                "x={} u={} y={} v={}: {} != {}",
                alphabet.name(Symbol(x as u8)),
                alphabet.name(Symbol(u as u8)),
                alphabet.name(Symbol(y as u8)),
                alphabet.name(Symbol(v as u8)),
                l.render(),
                r.render()
            ),
            residual: S::residual(&l, &r),
        }),
    })
}

pub fn validate_1spec<S: Scalar, Q: OnePointSpec<S> + ?Sized>(q: &Q, set: &FixtureSet<OnePointFixture>) -> Result<ValidationReport> {
    let outcomes = set.fixtures.iter().map(|fx| check_1spec_fixture(q, fx)).collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport::from_outcomes("one-point specification", set, outcomes))
}

/// `q_V^z(xy) q_I^{zy}(u) = q_V^z(uy) q_I^{zy}(x)` for one fixture.
pub fn check_spec_fixture<S: Scalar, Q: Specification<S> + ?Sized>(q: &Q, fx: &SpecFixture) -> Result<Outcome> {
    let alphabet = q.alphabet();
    let n = alphabet.size();
    let rest = fx.outer.difference(&fx.inner);
    if fx.inner.is_empty() || rest.is_empty() {
        return Err(Error::Argument(format!("{} is not a nonempty proper subset of {}", fx.inner, fx.outer)));
    }
    let g_outer = q.kernel(&fx.outer, &fx.z)?;
    check_normalized(&g_outer, &format!("kernel on {}", fx.outer))?;
    let emb_i = embedding(&fx.outer, &fx.inner, n)?;
    let emb_y = embedding(&fx.outer, &rest, n)?;
    let tol = q.tolerance();
    let mut worst = 0.0f64;
    let mut violation = None;
    for (yi, ey) in emb_y.iter().enumerate() {
        let y = Configuration::from_index(&rest, n, yi);
        let g_inner = q.kernel(&fx.inner, &fx.z.concat(&y)?)?;
        check_normalized(&g_inner, &format!("kernel on {}", fx.inner))?;
        for (xi, ex) in emb_i.iter().enumerate() {
            for (ui, eu) in emb_i.iter().enumerate() {
                let lhs = g_outer.prob_at(ex + ey).mul_ref(g_inner.prob_at(ui));
                let rhs = g_outer.prob_at(eu + ey).mul_ref(g_inner.prob_at(xi));
                let res = S::residual(&lhs, &rhs);
                worst = worst.max(res);
                if violation.is_none() && !lhs.approx_eq(&rhs, tol) {
                    violation = Some(Violation {
                        fixture: format!("I={} V={} z={}", fx.inner, fx.outer, fx.z.display(alphabet)),
                        detail: format!(
                            "x={} u={} y={}: {} != {}",
                            Configuration::from_index(&fx.inner, n, xi).display(alphabet),
                            Configuration::from_index(&fx.inner, n, ui).display(alphabet),
                            y.display(alphabet),
                            lhs.render(),
                            rhs.render()
                        ),
                        residual: res,
                    });
                }
            }
        }
    }
    Ok(Outcome {
        residual: worst,
        violation,
    })
}

pub fn validate_spec<S: Scalar, Q: Specification<S> + ?Sized>(q: &Q, set: &FixtureSet<SpecFixture>) -> Result<ValidationReport> {
    let outcomes = set.fixtures.iter().map(|fx| check_spec_fixture(q, fx)).collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport::from_outcomes("specification", set, outcomes))
}

/// Per-site cocycle and two-site exchange for one fixture.
pub fn check_tef_fixture<S: Scalar, D: OnePointTef<S> + ?Sized>(d: &D, fx: &OnePointFixture) -> Result<Outcome> {
    let alphabet = d.alphabet();
    let n = alphabet.size();
    let dt: Vec<TransitionEnergy<S>> = (0..n)
        .map(|y| d.energy(&fx.t, &with_site(&fx.z, &fx.s, y)?))
        .collect::<Result<_>>()?;
    let ds: Vec<TransitionEnergy<S>> = (0..n)
        .map(|x| d.energy(&fx.s, &with_site(&fx.z, &fx.t, x)?))
        .collect::<Result<_>>()?;
    let label = || one_point_label(fx, alphabet);
    for e in dt.iter().chain(&ds) {
        if let Some((x, y, u)) = e.cocycle_violation() {
            return Ok(Outcome {
                residual: f64::INFINITY,
                violation: Some(Violation {
                    fixture: label(),
                    detail: format!(
                        "cocycle fails at {} given {} for ({}, {}, {})",
                        e.volume(),
                        e.condition().display(alphabet),
                        alphabet.name(Symbol(x as u8)),
                        alphabet.name(Symbol(y as u8)),
                        alphabet.name(Symbol(u as u8))
                    ),
                    residual: f64::INFINITY,
                }),
            });
        }
    }
    let tol = d.tolerance();
    let mut worst = 0.0f64;
    let found = exchange_violation(
        n,
        |y, x, u| dt[y].ratio(x, u).clone(),
        |x, y, v| ds[x].ratio(y, v).clone(),
        |l, r| {
            worst = worst.max(S::residual(l, r));
            l.approx_eq(r, tol)
        },
    );
    Ok(Outcome {
        residual: worst,
        violation: found.map(|([x, u, y, v], l, r)| Violation {
            fixture: label(),
            detail: format!(
                "exchange fails at x={} u={} y={} v={}: ln-difference {}",
                alphabet.name(Symbol(x as u8)),
                alphabet.name(Symbol(u as u8)),
                alphabet.name(Symbol(y as u8)),
                alphabet.name(Symbol(v as u8)),
                crate::scalar::render_f64(l.ln() - r.ln())
            ),
            residual: S::residual(&l, &r),
        }),
    })
}

pub fn validate_tef<S: Scalar, D: OnePointTef<S> + ?Sized>(d: &D, set: &FixtureSet<OnePointFixture>) -> Result<ValidationReport> {
    let outcomes = set.fixtures.iter().map(|fx| check_tef_fixture(d, fx)).collect::<Result<Vec<_>>>()?;
    Ok(ValidationReport::from_outcomes("one-point transition energy field", set, outcomes))
}

// ---------------------------------------------------------------------------
// Conversions

/// `q_t^z(x) = exp δ_t^z(x, u) / Σ_α exp δ_t^z(α, u)`.
#[derive(Clone, Debug)]
pub struct TefOnePoint<D>(pub D);

pub fn onepoint_spec_from_tef<S: Scalar, D: OnePointTef<S>>(d: D) -> TefOnePoint<D> {
    TefOnePoint(d)
}

impl<S: Scalar, D: OnePointTef<S>> OnePointSpec<S> for TefOnePoint<D> {
    fn window(&self) -> &Volume {
        self.0.window()
    }
    fn alphabet(&self) -> &Alphabet {
        self.0.alphabet()
    }
    fn kernel(&self, t: &Site, boundary: &Configuration) -> Result<ConditionalKernel<S>> {
        let e = self.0.energy(t, boundary)?;
        gibbs_form_from_energy(&e, &Configuration::constant(Volume::single(t.clone()), self.0.alphabet().first()))
    }
    fn tolerance(&self) -> f64 {
        self.0.tolerance()
    }
}

/// `δ_t^z(x, u) = ln q_t^z(x) - ln q_t^z(u)`.
#[derive(Clone, Debug)]
pub struct OnePointTefOf<Q>(pub Q);

pub fn tef_from_1spec<S: Scalar, Q: OnePointSpec<S>>(q: Q) -> OnePointTefOf<Q> {
    OnePointTefOf(q)
}

impl<S: Scalar, Q: OnePointSpec<S>> OnePointTef<S> for OnePointTefOf<Q> {
    fn window(&self) -> &Volume {
        self.0.window()
    }
    fn alphabet(&self) -> &Alphabet {
        self.0.alphabet()
    }
    fn energy(&self, t: &Site, boundary: &Configuration) -> Result<TransitionEnergy<S>> {
        transition_energy(&self.0.kernel(t, boundary)?)
    }
    fn tolerance(&self) -> f64 {
        self.0.tolerance()
    }
}

/// Kernels on finite volumes rebuilt from a one-point specification.
#[derive(Clone, Debug)]
pub struct ReconstructedSpec<Q> {
    one_point: Q,
    order: Option<Vec<Site>>,
}

pub fn spec_from_onepoint<S: Scalar, Q: OnePointSpec<S>>(q: Q) -> ReconstructedSpec<Q> {
    ReconstructedSpec { one_point: q, order: None }
}

impl<Q> ReconstructedSpec<Q> {
    /// Visit sites in this order (restricted to each target) instead of canonically.
    pub fn with_order(mut self, order: Vec<Site>) -> Self {
        self.order = Some(order);
        self
    }

    pub fn one_point(&self) -> &Q {
        &self.one_point
    }
}

impl<S: Scalar, Q: OnePointSpec<S>> Specification<S> for ReconstructedSpec<Q> {
    fn window(&self) -> &Volume {
        self.one_point.window()
    }
    fn alphabet(&self) -> &Alphabet {
        self.one_point.alphabet()
    }
    fn kernel(&self, v: &Volume, boundary: &Configuration) -> Result<ConditionalKernel<S>> {
        let one_point = |t: &Site, c: &Configuration| self.one_point.kernel(t, c);
        let alphabet = self.one_point.alphabet();
        let k = match &self.order {
            None => reconstruct_from_one_point(one_point, v, boundary, None, alphabet)?,
            Some(order) => {
                let order: Vec<Site> = order.iter().filter(|s| v.contains(s)).cloned().collect();
                crate::conditionals::reconstruct_with_order(one_point, v, &order, boundary, None, alphabet)?
            }
        };
        let tol = self.one_point.tolerance();
        ConditionalKernel::new(k.condition().clone(), k.dist().clone().with_tolerance(tol))
    }
    fn tolerance(&self) -> f64 {
        self.one_point.tolerance()
    }
}

// ---------------------------------------------------------------------------
// Potentials

/// One translation-invariant interaction: `Φ_{a+offsets}(x) = value` when the
/// configuration on `a + offsets` equals `config`.
#[derive(Clone, Debug, PartialEq)]
pub struct PotentialTerm {
    pub offsets: Vec<Site>,
    pub config: Vec<Symbol>,
    pub value: f64,
}

/// A finite-range, translation-invariant potential.
#[derive(Clone, Debug, PartialEq)]
pub struct Potential {
    dim: usize,
    alphabet: Alphabet,
    terms: Vec<PotentialTerm>,
}

impl Potential {
    pub fn new(dim: usize, alphabet: Alphabet, terms: Vec<PotentialTerm>) -> Result<Self> {
        for term in &terms {
            if term.offsets.is_empty() || term.offsets.len() != term.config.len() {
                return Err(Error::Argument("potential term needs one symbol per offset".into()));
            }
            if term.offsets.iter().any(|o| o.dim() != dim) {
                return Err(Error::Argument(format!("potential term offsets must be {dim}-dimensional")));
            }
            if term.config.iter().any(|s| s.index() >= alphabet.size()) {
                return Err(Error::Argument("potential term symbol outside the alphabet".into()));
            }
            if !term.value.is_finite() {
                return Err(Error::Argument("potential values must be finite".into()));
            }
            let distinct: BTreeSet<&Site> = term.offsets.iter().collect();
            if distinct.len() != term.offsets.len() {
                return Err(Error::Argument("repeated offset in a potential term".into()));
            }
        }
        Ok(Potential { dim, alphabet, terms })
    }

    /// `Φ_{t,t'}(x) = -β x_t x_{t'}` on nearest-neighbor pairs, `Φ_t(x) = -h x_t`,
    /// spins `{-1, +1}`.
    pub fn ising(beta: f64, h: f64, dim: usize) -> Self {
        let spins = Alphabet::spins();
        let mut terms = Vec::new();
        for axis in 0..dim {
            let origin = Site::new(vec![0; dim]);
            let mut step = vec![0; dim];
            step[axis] = 1;
            for a in spins.symbols() {
                for b in spins.symbols() {
                    let prod = (spins.value(a) * spins.value(b)) as f64;
                    terms.push(PotentialTerm {
                        offsets: vec![origin.clone(), Site::new(step.clone())],
                        config: vec![a, b],
                        value: -beta * prod,
                    });
                }
            }
        }
        if h != 0.0 {
            for a in spins.symbols() {
                terms.push(PotentialTerm {
                    offsets: vec![Site::new(vec![0; dim])],
                    config: vec![a],
                    value: -h * spins.value(a) as f64,
                });
            }
        }
        Potential { dim, alphabet: spins, terms }
    }

    pub fn zero(dim: usize, alphabet: Alphabet) -> Self {
        Potential {
            dim,
            alphabet,
            terms: Vec::new(),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn terms(&self) -> &[PotentialTerm] {
        &self.terms
    }

    /// Largest L-infinity distance between two sites of one template.
    pub fn range(&self) -> u32 {
        self.terms
            .iter()
            .flat_map(|t| t.offsets.iter().flat_map(move |a| t.offsets.iter().map(move |b| a.linf_dist(b))))
            .max()
            .unwrap_or(0)
    }

    /// Distinct templates (offset lists), in first-appearance order.
    fn templates(&self) -> Vec<&[Site]> {
        let mut out: Vec<&[Site]> = Vec::new();
        for t in &self.terms {
            if !out.iter().any(|o| *o == t.offsets.as_slice()) {
                out.push(&t.offsets);
            }
        }
        out
    }

    /// Translates of the templates that meet `v` and lie inside `window`.
    fn placements(&self, v: &Volume, window: &Volume) -> Vec<(&[Site], Vec<Site>)> {
        let mut seen = BTreeSet::new();
        let mut out = Vec::new();
        for (k, template) in self.templates().into_iter().enumerate() {
            for site in v.iter() {
                for o in template {
                    let anchor: Vec<i32> = site.coords().iter().zip(o.coords()).map(|(a, b)| a - b).collect();
                    let placed: Vec<Site> = template.iter().map(|p| p.offset(&anchor)).collect();
                    if placed.iter().all(|p| window.contains(p)) && seen.insert((k, anchor)) {
                        out.push((template, placed));
                    }
                }
            }
        }
        out
    }

    /// `H_V^b(x) = Σ Φ_A((x b)_A)` over interactions `A ⊆ window` meeting `V`.
    /// Interactions reaching outside the window are dropped (free boundary).
    pub fn energy_on(&self, window: &Volume, x: &Configuration, boundary: &Configuration) -> Result<f64> {
        let full = x.concat(boundary)?;
        let mut h = 0.0;
        for (template, placed) in self.placements(x.volume(), window) {
            let mut symbols = Vec::with_capacity(placed.len());
            for p in &placed {
                match full.get(p) {
                    Some(s) => symbols.push(s),
                    None => {
                        return Err(Error::Geometry(format!(
                            "boundary does not cover {p}, needed by an interaction at {}",
                            x.volume()
                        )))
                    }
                }
            }
            h += self
                .terms
                .iter()
                .filter(|t| t.offsets.as_slice() == template && t.config == symbols)
                .map(|t| t.value)
                .sum::<f64>();
        }
        Ok(h)
    }
}

/// One-point Hamiltonian `H_t^z(x) = Σ_{A ∋ t} Φ_A(x z)`, as a table on `{t}`.
pub fn hamiltonian_from_potential(
    phi: &Potential,
    window: &Volume,
    t: &Site,
    boundary: &Configuration,
) -> Result<crate::energy::HamiltonianTable<f64>> {
    let vt = Volume::single(t.clone());
    let q = phi.alphabet.size();
    let values: Vec<f64> = (0..q)
        .map(|a| phi.energy_on(window, &Configuration::constant(vt.clone(), Symbol(a as u8)), boundary))
        .collect::<Result<_>>()?;
    let min = values.iter().cloned().fold(f64::INFINITY, f64::min);
    crate::energy::HamiltonianTable::from_boltzmann(
        vt,
        boundary.clone(),
        phi.alphabet.clone(),
        values.iter().map(|h| libm::exp(-(h - min))).collect(),
        DEFAULT_TOL,
    )
}

/// The one-point transition energy field of a potential on a window:
/// `δ_t^z(x, u) = H_t^z(u) - H_t^z(x)`.
#[derive(Clone, Debug)]
pub struct PotentialTef {
    phi: Potential,
    window: Volume,
    tol: f64,
}

pub fn tef_from_potential(phi: Potential, window: Volume) -> PotentialTef {
    PotentialTef {
        phi,
        window,
        tol: DEFAULT_TOL,
    }
}

impl PotentialTef {
    pub fn potential(&self) -> &Potential {
        &self.phi
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }
}

impl OnePointTef<f64> for PotentialTef {
    fn window(&self) -> &Volume {
        &self.window
    }
    fn alphabet(&self) -> &Alphabet {
        &self.phi.alphabet
    }
    fn energy(&self, t: &Site, boundary: &Configuration) -> Result<TransitionEnergy<f64>> {
        let vt = Volume::single(t.clone());
        let q = self.phi.alphabet.size();
        let h: Vec<f64> = (0..q)
            .map(|a| self.phi.energy_on(&self.window, &Configuration::constant(vt.clone(), Symbol(a as u8)), boundary))
            .collect::<Result<_>>()?;
        let mut ratios = Vec::with_capacity(q * q);
        for hx in &h {
            for hu in &h {
                ratios.push(libm::exp(hu - hx));
            }
        }
        TransitionEnergy::from_ratios(vt, boundary.clone(), self.phi.alphabet.clone(), ratios, self.tol)
    }
    fn tolerance(&self) -> f64 {
        self.tol
    }
}

/// `P_V(x | b) ∝ exp(-H_V^b(x))`, normalized by full enumeration of `V`.
pub fn finite_volume_gibbs(phi: &Potential, window: &Volume, v: &Volume, boundary: &Configuration) -> Result<FiniteDistribution<f64>> {
    if !v.is_disjoint(boundary.volume()) {
        return Err(Error::Domain(format!("boundary on {} overlaps {v}", boundary.volume())));
    }
    let q = phi.alphabet.size();
    let n = configuration_count(v, &phi.alphabet)?;
    let energies: Vec<f64> = (0..n)
        .map(|i| phi.energy_on(window, &Configuration::from_index(v, q, i), boundary))
        .collect::<Result<_>>()?;
    let min = energies.iter().cloned().fold(f64::INFINITY, f64::min);
    let weights = energies.iter().map(|h| libm::exp(-(h - min))).collect();
    FiniteDistribution::from_weights(v.clone(), phi.alphabet.clone(), weights)
}

// ---------------------------------------------------------------------------
// Measure systems

/// Un-normalized positive weights `μ_V(x)` for finite volumes.
pub trait MeasureSystem<S: Scalar>: Send + Sync {
    fn alphabet(&self) -> &Alphabet;
    fn weight(&self, x: &Configuration) -> Result<S>;
}

/// `μ_V = P_V` for a field.
#[derive(Clone, Debug)]
pub struct MarginalMeasures<M>(pub M);

impl<S: Scalar, M: RandomField<S>> MeasureSystem<S> for MarginalMeasures<M> {
    fn alphabet(&self) -> &Alphabet {
        self.0.alphabet()
    }
    fn weight(&self, x: &Configuration) -> Result<S> {
        self.0.prob(x)
    }
}

/// `μ_V(x) = exp(-Σ_{A ⊆ V} Φ_A(x_A))`: free-boundary Gibbs weights.
#[derive(Clone, Debug)]
pub struct PotentialMeasures {
    pub phi: Potential,
}

impl MeasureSystem<f64> for PotentialMeasures {
    fn alphabet(&self) -> &Alphabet {
        &self.phi.alphabet
    }
    fn weight(&self, x: &Configuration) -> Result<f64> {
        // Interactions are kept only when they fit inside the volume itself.
        let h = self.phi.energy_on(x.volume(), x, &Configuration::empty())?;
        Ok(libm::exp(-h))
    }
}

/// Stage-wise energies `δ_t^{z_Λ}(x, u) = ln μ_{t∪Λ}(x z_Λ) / μ_{t∪Λ}(u z_Λ)`.
#[derive(Clone, Debug)]
pub struct StagedTef<S> {
    pub site: Site,
    pub boundary_label: String,
    pub stages: Vec<TransitionEnergy<S>>,
    /// `gaps[k]`: log-scale sup distance between stages `k+1` and `k+2`.
    pub gaps: Vec<f64>,
    /// First stage (1-based) from which every later gap is within tolerance.
    pub stable_from: Option<usize>,
    pub stabilized: bool,
}

impl<S: Scalar> StagedTef<S> {
    /// The deepest-stage energy, offered only once the stages have stabilized.
    pub fn evaluator(&self) -> Option<&TransitionEnergy<S>> {
        if self.stabilized {
            self.stages.last()
        } else {
            None
        }
    }
}

pub fn tef_from_measure_system<S: Scalar, Mu: MeasureSystem<S> + ?Sized>(
    mu: &Mu,
    t: &Site,
    filtration: &Filtration,
    boundary: &Boundary,
    tol: f64,
) -> Result<StagedTef<S>> {
    let vt = Volume::single(t.clone());
    let alphabet = mu.alphabet();
    let q = alphabet.size();
    let mut stages = Vec::with_capacity(filtration.len());
    for (n, stage) in filtration.stages().iter().enumerate() {
        let z = boundary.at(&stage.difference(&vt))?;
        let w: Vec<S> = (0..q)
            .map(|a| mu.weight(&Configuration::constant(vt.clone(), Symbol(a as u8)).concat(&z)?))
            .collect::<Result<_>>()?;
        if w.iter().any(|x| !(*x > S::zero())) {
            return Err(Error::Positivity(format!("μ vanishes at stage {}", n + 1)));
        }
        let mut ratios = Vec::with_capacity(q * q);
        for x in &w {
            for u in &w {
                ratios.push(x.div_ref(u));
            }
        }
        stages.push(TransitionEnergy::from_ratios(vt.clone(), z, alphabet.clone(), ratios, tol)?);
    }
    let gaps: Vec<f64> = stages.windows(2).map(|p| energy_distance(&p[1], &p[0])).collect();
    let stable_from = if gaps.is_empty() {
        None
    } else {
        let bad = gaps.iter().rposition(|g| *g > tol);
        match bad {
            None => Some(1),
            Some(k) if k + 1 < gaps.len() => Some(k + 2),
            Some(_) => None,
        }
    };
    Ok(StagedTef {
        site: t.clone(),
        boundary_label: boundary.label().to_string(),
        stages,
        gaps,
        stabilized: stable_from.is_some(),
        stable_from,
    })
}
