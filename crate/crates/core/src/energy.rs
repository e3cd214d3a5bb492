//! Transition energies `Δ_V^z(x, u) = ln g_V^z(x) - ln g_V^z(u)` and
//! Hamiltonians, stored multiplicatively.
//!
//! An energy is kept as the ratio table `exp Δ(x, u) = g(x) / g(u)`, and a
//! Hamiltonian as its Boltzmann weights `exp(-H(x))`, so every identity is
//! a product identity (exact in rational mode). Logarithms appear only when
//! values are read out.

use alloc::format;
use alloc::vec::Vec;

use crate::conditionals::{conditional_from_joint, embedding, finite_conditional, BoundaryFamily, ConditionalKernel};
use crate::error::{Error, Result};
use crate::fields::{FiniteDistribution, RandomField};
use crate::lattice::{configuration_count, Alphabet, Configuration, Filtration, Site, Volume};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct TransitionEnergy<S> {
    volume: Volume,
    condition: Configuration,
    alphabet: Alphabet,
    n: usize,
    /// Row-major `n x n`: `ratios[x * n + u] = exp Δ(x, u)`.
    ratios: Vec<S>,
    tol: f64,
}

/// `Δ(x, u) = ln(k(x) / k(u))` for a strictly positive kernel.
pub fn transition_energy<S: Scalar>(k: &ConditionalKernel<S>) -> Result<TransitionEnergy<S>> {
    let probs = k.probs();
    if let Some(i) = probs.iter().position(|p| !(*p > S::zero())) {
        return Err(Error::Positivity(format!(
            "g({}) = 0 given {}",
            Configuration::from_index(k.target(), k.alphabet().size(), i).display(k.alphabet()),
            k.condition().display(k.alphabet())
        )));
    }
    let n = probs.len();
    let mut ratios = Vec::with_capacity(n * n);
    for x in probs {
        for u in probs {
            ratios.push(x.div_ref(u));
        }
    }
    Ok(TransitionEnergy {
        volume: k.target().clone(),
        condition: k.condition().clone(),
        alphabet: k.alphabet().clone(),
        n,
        ratios,
        tol: k.tolerance(),
    })
}

impl<S: Scalar> TransitionEnergy<S> {
    /// An energy given directly by its ratio table (`exp Δ`, row-major).
    pub fn from_ratios(
        volume: Volume,
        condition: Configuration,
        alphabet: Alphabet,
        ratios: Vec<S>,
        tol: f64,
    ) -> Result<Self> {
        let n = configuration_count(&volume, &alphabet)?;
        if ratios.len() != n * n {
            return Err(Error::Argument(format!(
                "{} ratios for {n} configurations (need {})",
                ratios.len(),
                n * n
            )));
        }
        if ratios.iter().any(|r| !(*r > S::zero())) {
            return Err(Error::Positivity("energy ratios must be positive and finite".into()));
        }
        Ok(TransitionEnergy {
            volume,
            condition,
            alphabet,
            n,
            ratios,
            tol,
        })
    }

    pub fn volume(&self) -> &Volume {
        &self.volume
    }

    pub fn condition(&self) -> &Configuration {
        &self.condition
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Number of configurations on the volume.
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    /// `exp Δ(x, u)` by configuration index.
    pub fn ratio(&self, x: usize, u: usize) -> &S {
        &self.ratios[x * self.n + u]
    }

    /// `Δ(x, u)` by configuration index.
    pub fn log_value(&self, x: usize, u: usize) -> f64 {
        self.ratio(x, u).ln()
    }

    pub fn ratio_of(&self, x: &Configuration, u: &Configuration) -> Result<&S> {
        let q = self.alphabet.size();
        for c in [x, u] {
            if c.volume() != &self.volume {
                return Err(Error::Domain(format!("configuration on {} for an energy on {}", c.volume(), self.volume)));
            }
        }
        Ok(self.ratio(x.index(q), u.index(q)))
    }

    /// `Δ(x, x) = 0` and `Δ(x, u) = -Δ(u, x)`.
    pub fn check_antisymmetry(&self) -> bool {
        let one = S::one();
        (0..self.n).all(|x| {
            self.ratio(x, x).approx_eq(&one, self.tol)
                && (x + 1..self.n).all(|u| self.ratio(x, u).mul_ref(self.ratio(u, x)).approx_eq(&one, self.tol))
        })
    }

    /// First `(x, y, u)` with `Δ(x, u) != Δ(x, y) + Δ(y, u)`, if any.
    ///
    /// The full triple identity is equivalent to `Δ(y, y) = 0` together with
    /// the triples through the first configuration, `Δ(x, u) = Δ(x, 0) + Δ(0, u)`,
    /// which is what is scanned.
    pub fn cocycle_violation(&self) -> Option<(usize, usize, usize)> {
        let one = S::one();
        if let Some(y) = (0..self.n).find(|&y| !self.ratio(y, y).approx_eq(&one, self.tol)) {
            return Some((y, y, y));
        }
        for x in 0..self.n {
            for u in 0..self.n {
                if !self.ratio(x, 0).mul_ref(self.ratio(0, u)).approx_eq(self.ratio(x, u), self.tol) {
                    return Some((x, 0, u));
                }
            }
        }
        None
    }

    pub fn check_cocycle(&self) -> bool {
        self.cocycle_violation().is_none()
    }
}

pub fn check_cocycle<S: Scalar>(e: &TransitionEnergy<S>) -> bool {
    e.check_cocycle()
}

/// Kernel `g(x) = exp Δ(x, u) / Σ_α exp Δ(α, u)` with `u` the reference.
pub fn gibbs_form_from_energy<S: Scalar>(e: &TransitionEnergy<S>, reference: &Configuration) -> Result<ConditionalKernel<S>> {
    if let Some((x, y, u)) = e.cocycle_violation() {
        let q = e.alphabet.size();
        let show = |i| Configuration::from_index(&e.volume, q, i).display(&e.alphabet);
        return Err(Error::InconsistentEnergy(format!(
            "Δ({}, {}) != Δ({}, {}) + Δ({}, {})",
            show(x),
            show(u),
            show(x),
            show(y),
            show(y),
            show(u)
        )));
    }
    if reference.volume() != &e.volume {
        return Err(Error::Domain(format!("reference on {}, energy on {}", reference.volume(), e.volume)));
    }
    let u = reference.index(e.alphabet.size());
    let weights: Vec<S> = (0..e.n).map(|x| e.ratio(x, u).clone()).collect();
    let total = S::sum(&weights);
    let probs = weights.iter().map(|w| w.div_ref(&total)).collect();
    ConditionalKernel::new(
        e.condition.clone(),
        FiniteDistribution::from_parts_unchecked(e.volume.clone(), e.alphabet.clone(), probs, e.tol),
    )
}

/// Decomposition of the energy of a union into energies of its parts:
/// `Δ_{V∪I}^z(xy, uv) = Δ_V^{zy}(x, u) + Δ_I^{zu}(y, v) = Δ_I^{zx}(y, v) + Δ_V^{zv}(x, u)`
/// for all `x, u` on `V` and `y, v` on `I`.
pub fn check_decomposition<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    v: &Volume,
    i: &Volume,
    z: &Configuration,
) -> Result<bool> {
    if !v.is_disjoint(i) {
        return Err(Error::Domain(format!("{v} and {i} overlap")));
    }
    let vi = v.union(i);
    if !vi.is_disjoint(z.volume()) {
        return Err(Error::Domain(format!("condition on {} overlaps {vi}", z.volume())));
    }
    let joint = m.marginal(&vi.union(z.volume()))?;
    let q = m.alphabet().size();
    let tol = m.tolerance();
    let whole = transition_energy(&conditional_from_joint(&joint, &vi, z)?)?;
    let nv = configuration_count(v, m.alphabet())?;
    let ni = configuration_count(i, m.alphabet())?;
    let on_v: Vec<TransitionEnergy<S>> = (0..ni)
        .map(|y| energy_given(&joint, v, z, &Configuration::from_index(i, q, y)))
        .collect::<Result<_>>()?;
    let on_i: Vec<TransitionEnergy<S>> = (0..nv)
        .map(|x| energy_given(&joint, i, z, &Configuration::from_index(v, q, x)))
        .collect::<Result<_>>()?;
    let ev = embedding(&vi, v, q)?;
    let ei = embedding(&vi, i, q)?;
    for x in 0..nv {
        for u in 0..nv {
            for y in 0..ni {
                for w in 0..ni {
                    let lhs = whole.ratio(ev[x] + ei[y], ev[u] + ei[w]);
                    let first = on_v[y].ratio(x, u).mul_ref(on_i[u].ratio(y, w));
                    let second = on_i[x].ratio(y, w).mul_ref(on_v[w].ratio(x, u));
                    if !lhs.approx_eq(&first, tol) || !lhs.approx_eq(&second, tol) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

fn energy_given<S: Scalar>(
    joint: &FiniteDistribution<S>,
    target: &Volume,
    z: &Configuration,
    extra: &Configuration,
) -> Result<TransitionEnergy<S>> {
    transition_energy(&conditional_from_joint(joint, target, &z.concat(extra)?)?)
}

/// Two-site exchange of one-point energies:
/// `δ_t^{zy}(x, u) + δ_s^{zu}(y, v) = δ_s^{zx}(y, v) + δ_t^{zv}(x, u)`.
pub fn check_one_point_exchange<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    t: &Site,
    s: &Site,
    z: &Configuration,
) -> Result<bool> {
    if t == s {
        return Err(Error::Argument("the two sites must differ".into()));
    }
    let vt = Volume::single(t.clone());
    let vs = Volume::single(s.clone());
    let pair = vt.union(&vs);
    if !pair.is_disjoint(z.volume()) {
        return Err(Error::Domain(format!("condition on {} overlaps {pair}", z.volume())));
    }
    let joint = m.marginal(&pair.union(z.volume()))?;
    let q = m.alphabet().size();
    let dt: Vec<TransitionEnergy<S>> = (0..q)
        .map(|y| energy_given(&joint, &vt, z, &Configuration::from_index(&vs, q, y)))
        .collect::<Result<_>>()?;
    let ds: Vec<TransitionEnergy<S>> = (0..q)
        .map(|x| energy_given(&joint, &vs, z, &Configuration::from_index(&vt, q, x)))
        .collect::<Result<_>>()?;
    Ok(exchange_holds(q, m.tolerance(), |y, x, u| dt[y].ratio(x, u).clone(), |x, y, v| {
        ds[x].ratio(y, v).clone()
    }))
}

/// `dt(y, x, u) = exp δ_t^{zy}(x, u)`, `ds(x, y, v) = exp δ_s^{zx}(y, v)`.
pub(crate) fn exchange_holds<S: Scalar>(
    q: usize,
    tol: f64,
    dt: impl Fn(usize, usize, usize) -> S,
    ds: impl Fn(usize, usize, usize) -> S,
) -> bool {
    exchange_violation(q, dt, ds, |a, b| a.approx_eq(b, tol)).is_none()
}

pub(crate) fn exchange_violation<S: Scalar>(
    q: usize,
    dt: impl Fn(usize, usize, usize) -> S,
    ds: impl Fn(usize, usize, usize) -> S,
    mut eq: impl FnMut(&S, &S) -> bool,
) -> Option<([usize; 4], S, S)> {
    for x in 0..q {
        for u in 0..q {
            for y in 0..q {
                for v in 0..q {
                    let lhs = dt(y, x, u).mul_ref(&ds(u, y, v));
                    let rhs = ds(x, y, v).mul_ref(&dt(v, x, u));
                    if !eq(&lhs, &rhs) {
                        return Some(([x, u, y, v], lhs, rhs));
                    }
                }
            }
        }
    }
    None
}

/// An extended-real Hamiltonian value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum HamiltonianValue {
    Finite(f64),
    PosInfinity,
}

impl HamiltonianValue {
    pub fn is_finite(&self) -> bool {
        matches!(self, HamiltonianValue::Finite(_))
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            HamiltonianValue::Finite(v) => *v,
            HamiltonianValue::PosInfinity => f64::INFINITY,
        }
    }
}

impl core::fmt::Display for HamiltonianValue {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            HamiltonianValue::Finite(v) => f.write_str(&crate::scalar::render_f64(*v)),
            HamiltonianValue::PosInfinity => f.write_str("inf"),
        }
    }
}

/// `H(x)` on a volume, stored as `exp(-H(x))`; a zero weight is `H = +∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct HamiltonianTable<S> {
    volume: Volume,
    condition: Configuration,
    alphabet: Alphabet,
    boltzmann: Vec<S>,
    tol: f64,
}

/// `H(x) = -Δ(x, gauge)`, so that `H(gauge) = 0` and `Δ(x, u) = H(u) - H(x)`.
pub fn hamiltonian_from_energy<S: Scalar>(e: &TransitionEnergy<S>, gauge: &Configuration) -> Result<HamiltonianTable<S>> {
    if gauge.volume() != &e.volume {
        return Err(Error::Domain(format!("gauge on {}, energy on {}", gauge.volume(), e.volume)));
    }
    let g = gauge.index(e.alphabet.size());
    Ok(HamiltonianTable {
        volume: e.volume.clone(),
        condition: e.condition.clone(),
        alphabet: e.alphabet.clone(),
        boltzmann: (0..e.n).map(|x| e.ratio(x, g).clone()).collect(),
        tol: e.tol,
    })
}

impl<S: Scalar> HamiltonianTable<S> {
    /// From weights `exp(-H(x))`; zero weights stand for `H = +∞`.
    pub fn from_boltzmann(volume: Volume, condition: Configuration, alphabet: Alphabet, boltzmann: Vec<S>, tol: f64) -> Result<Self> {
        let n = configuration_count(&volume, &alphabet)?;
        if boltzmann.len() != n {
            return Err(Error::Argument(format!("{} weights for {n} configurations", boltzmann.len())));
        }
        if boltzmann.iter().any(|b| *b < S::zero()) {
            return Err(Error::Argument("Boltzmann weights must be non-negative".into()));
        }
        Ok(HamiltonianTable {
            volume,
            condition,
            alphabet,
            boltzmann,
            tol,
        })
    }

    pub fn volume(&self) -> &Volume {
        &self.volume
    }

    pub fn condition(&self) -> &Configuration {
        &self.condition
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn len(&self) -> usize {
        self.boltzmann.len()
    }

    pub fn is_empty(&self) -> bool {
        self.boltzmann.is_empty()
    }

    pub fn boltzmann(&self, x: usize) -> &S {
        &self.boltzmann[x]
    }

    pub fn value(&self, x: usize) -> HamiltonianValue {
        let b = &self.boltzmann[x];
        if b.is_zero() {
            HamiltonianValue::PosInfinity
        } else {
            HamiltonianValue::Finite(-b.ln())
        }
    }

    pub fn values(&self) -> Vec<HamiltonianValue> {
        (0..self.len()).map(|x| self.value(x)).collect()
    }

    pub fn is_finite(&self) -> bool {
        self.boltzmann.iter().all(|b| !b.is_zero())
    }

    fn require_finite(&self) -> Result<()> {
        if let Some(x) = self.boltzmann.iter().position(|b| b.is_zero()) {
            return Err(Error::Positivity(format!(
                "H({}) = +inf",
                Configuration::from_index(&self.volume, self.alphabet.size(), x).display(&self.alphabet)
            )));
        }
        Ok(())
    }

    /// The energy `Δ(x, u) = H(u) - H(x)`.
    pub fn energy(&self) -> Result<TransitionEnergy<S>> {
        self.require_finite()?;
        let n = self.len();
        let mut ratios = Vec::with_capacity(n * n);
        for x in &self.boltzmann {
            for u in &self.boltzmann {
                ratios.push(x.div_ref(u));
            }
        }
        Ok(TransitionEnergy {
            volume: self.volume.clone(),
            condition: self.condition.clone(),
            alphabet: self.alphabet.clone(),
            n,
            ratios,
            tol: self.tol,
        })
    }

    /// `g(x) = exp(-H(x)) / Σ_α exp(-H(α))`.
    pub fn gibbs_form(&self) -> Result<ConditionalKernel<S>> {
        self.require_finite()?;
        let total = S::sum(&self.boltzmann);
        let probs = self.boltzmann.iter().map(|b| b.div_ref(&total)).collect();
        ConditionalKernel::new(
            self.condition.clone(),
            FiniteDistribution::from_parts_unchecked(self.volume.clone(), self.alphabet.clone(), probs, self.tol),
        )
    }

    /// Whether `H - H'` is constant (both finite everywhere).
    pub fn differs_by_constant(&self, other: &HamiltonianTable<S>) -> bool {
        if self.volume != other.volume || self.len() != other.len() || !self.is_finite() || !other.is_finite() {
            return false;
        }
        let c = self.boltzmann[0].div_ref(&other.boltzmann[0]);
        self.boltzmann
            .iter()
            .zip(&other.boltzmann)
            .all(|(a, b)| a.div_ref(b).approx_eq(&c, self.tol))
    }
}

/// Hamiltonians with the all-first-symbol gauge, from the field's kernel.
pub fn field_hamiltonian<S: Scalar, M: RandomField<S> + ?Sized>(m: &M, v: &Volume, z: &Configuration) -> Result<HamiltonianTable<S>> {
    let e = transition_energy(&finite_conditional(m, v, z)?)?;
    hamiltonian_from_energy(&e, &Configuration::constant(v.clone(), m.alphabet().first()))
}

/// `H_{V∪I}^z(xy) + H_V^{zy}(u) = H_{V∪I}^z(uy) + H_V^{zy}(x)` for `x, u` on
/// `V` and `y` on `I`, with canonical gauges.
pub fn check_hamiltonian_consistency<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    v: &Volume,
    i: &Volume,
    z: &Configuration,
) -> Result<bool> {
    if !v.is_disjoint(i) {
        return Err(Error::Domain(format!("{v} and {i} overlap")));
    }
    let vi = v.union(i);
    let joint = m.marginal(&vi.union(z.volume()))?;
    let q = m.alphabet().size();
    let first = m.alphabet().first();
    let tol = m.tolerance();
    let h_whole = hamiltonian_from_energy(
        &transition_energy(&conditional_from_joint(&joint, &vi, z)?)?,
        &Configuration::constant(vi.clone(), first),
    )?;
    let ev = embedding(&vi, v, q)?;
    let ei = embedding(&vi, i, q)?;
    for (y, ey) in ei.iter().enumerate() {
        let h_v = hamiltonian_from_energy(
            &energy_given(&joint, v, z, &Configuration::from_index(i, q, y))?,
            &Configuration::constant(v.clone(), first),
        )?;
        for (x, ex) in ev.iter().enumerate() {
            for (u, eu) in ev.iter().enumerate() {
                let lhs = h_whole.boltzmann(ex + ey).mul_ref(h_v.boltzmann(u));
                let rhs = h_whole.boltzmann(eu + ey).mul_ref(h_v.boltzmann(x));
                if !lhs.approx_eq(&rhs, tol) {
                    return Ok(false);
                }
            }
        }
    }
    Ok(true)
}

/// Sup-distance between two one-point energies, on the log scale.
pub fn energy_distance<S: Scalar>(a: &TransitionEnergy<S>, b: &TransitionEnergy<S>) -> f64 {
    let mut worst = 0.0f64;
    for x in 0..a.n {
        for u in 0..a.n {
            let d = (a.ratio(x, u).div_ref(b.ratio(x, u))).ln().abs();
            worst = worst.max(d);
        }
    }
    worst
}

/// For each stage `Λ_n` but the last: the sup, over pairs of boundaries in
/// the family that agree on `Λ_n \ t`, of `|Δ_t(x, u) - Δ'_t(x, u)|`, both
/// energies taken at the deepest stage. Stages where no two distinct
/// boundaries agree contribute 0.
pub fn energy_quasilocality_modulus<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    t: &Site,
    filtration: &Filtration,
    family: &BoundaryFamily,
) -> Result<Vec<f64>> {
    let target = Volume::single(t.clone());
    let deep = filtration.last().difference(&target);
    let energies: Vec<TransitionEnergy<S>> = family
        .members()
        .iter()
        .map(|b| transition_energy(&finite_conditional(m, &target, &b.at(&deep)?)?))
        .collect::<Result<_>>()?;
    let stages = filtration.stages();
    let mut out = Vec::with_capacity(stages.len().saturating_sub(1));
    for stage in &stages[..stages.len() - 1] {
        let shell = stage.difference(&target);
        let restricted: Vec<Configuration> = family.members().iter().map(|b| b.at(&shell)).collect::<Result<_>>()?;
        let mut worst = 0.0f64;
        for a in 0..energies.len() {
            for b in a + 1..energies.len() {
                if restricted[a] == restricted[b] {
                    worst = worst.max(energy_distance(&energies[a], &energies[b]));
                }
            }
        }
        out.push(worst);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;
    use crate::fields::TableField;
    use crate::lattice::Symbol;
    use crate::scalar::Rational;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    fn table(n: i32, seed: u64) -> TableField<Rational> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let w = Volume::interval(0, n - 1);
        let weights = (0..1usize << n).map(|_| r(rng.gen_range(1..=30), 1)).collect();
        TableField::new(FiniteDistribution::from_weights(w, Alphabet::binary(), weights).unwrap())
    }

    #[test]
    fn energy_laws_and_round_trip() {
        let m = table(4, 1);
        let v = Volume::new([Site::from(0), Site::from(2)]);
        let z = Configuration::parse("(1)=1;(3)=0", &Alphabet::binary()).unwrap();
        let k = finite_conditional(&m, &v, &z).unwrap();
        let e = transition_energy(&k).unwrap();
        assert!(e.check_antisymmetry());
        assert!(e.check_cocycle());
        for u in 0..4 {
            let back = gibbs_form_from_energy(&e, &Configuration::from_index(&v, 2, u)).unwrap();
            assert_eq!(back.probs(), k.probs());
        }
        let h = hamiltonian_from_energy(&e, &Configuration::from_index(&v, 2, 2)).unwrap();
        assert_eq!(h.value(2), HamiltonianValue::Finite(0.0));
        assert_eq!(h.gibbs_form().unwrap().probs(), k.probs());
        let h2 = hamiltonian_from_energy(&e, &Configuration::from_index(&v, 2, 1)).unwrap();
        assert!(h.differs_by_constant(&h2));
        assert_eq!(h.energy().unwrap(), e);
    }

    #[test]
    fn broken_cocycle_is_rejected() {
        let v = Volume::single(Site::from(0));
        let alpha = Alphabet::from_names(&["a", "b", "c"]).unwrap();
        // Antisymmetric but not additive: Δ(a,b)=Δ(b,c)=Δ(c,a)=ln 2.
        let two = r(2, 1);
        let half = r(1, 2);
        let one = r(1, 1);
        let ratios = vec![
            one.clone(), two.clone(), half.clone(),
            half.clone(), one.clone(), two.clone(),
            two.clone(), half.clone(), one.clone(),
        ];
        let e = TransitionEnergy::from_ratios(v.clone(), Configuration::empty(), alpha, ratios, 0.0).unwrap();
        assert!(e.check_antisymmetry());
        assert!(!e.check_cocycle());
        let err = gibbs_form_from_energy(&e, &Configuration::constant(v, Symbol(0))).unwrap_err();
        assert!(matches!(err, Error::InconsistentEnergy(_)));
    }

    #[test]
    fn decomposition_and_exchange_on_tables() {
        let m = table(5, 9);
        let v = Volume::single(Site::from(1));
        let i = Volume::new([Site::from(2), Site::from(4)]);
        let z = Configuration::parse("(0)=1", &Alphabet::binary()).unwrap();
        assert!(check_decomposition(&m, &v, &i, &z).unwrap());
        assert!(check_hamiltonian_consistency(&m, &v, &i, &z).unwrap());
        assert!(check_one_point_exchange(&m, &Site::from(0), &Site::from(3), &Configuration::parse("(4)=0", &Alphabet::binary()).unwrap()).unwrap());
    }

    #[test]
    fn infinite_hamiltonian_is_displayed_but_not_used() {
        let v = Volume::single(Site::from(0));
        let h = HamiltonianTable::from_boltzmann(v, Configuration::empty(), Alphabet::binary(), vec![r(0, 1), r(1, 1)], 0.0).unwrap();
        assert_eq!(h.value(0), HamiltonianValue::PosInfinity);
        assert_eq!(h.value(1), HamiltonianValue::Finite(0.0));
        assert!(matches!(h.gibbs_form(), Err(Error::Positivity(_))));
    }
}
