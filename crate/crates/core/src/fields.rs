//! Random fields as providers of exact finite-dimensional distributions.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lattice::{configuration_count, Alphabet, Configuration, Volume};
use crate::scalar::{Rational, Scalar, DEFAULT_TOL};

/// Dense probability table over every configuration of a volume.
///
/// Entries are indexed by [`Configuration::index`], so the table order is the
/// canonical enumeration order.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteDistribution<S> {
    volume: Volume,
    alphabet: Alphabet,
    probs: Vec<S>,
    tol: f64,
}

impl<S: Scalar> FiniteDistribution<S> {
    /// Validates nonnegativity, completeness and normalization.
    pub fn new(volume: Volume, alphabet: Alphabet, probs: Vec<S>) -> Result<Self> {
        let d = FiniteDistribution {
            volume,
            alphabet,
            probs,
            tol: DEFAULT_TOL,
        };
        d.validate()?;
        Ok(d)
    }

    /// Normalizes nonnegative weights with a positive total.
    pub fn from_weights(volume: Volume, alphabet: Alphabet, weights: Vec<S>) -> Result<Self> {
        let n = configuration_count(&volume, &alphabet)?;
        if weights.len() != n {
            return Err(Error::Validation(format!(
                "table has {} entries, the volume needs {n}",
                weights.len()
            )));
        }
        if weights.iter().any(|w| *w < S::zero()) {
            return Err(Error::Validation("negative weight".into()));
        }
        let total = S::sum(&weights);
        if !(total > S::zero()) {
            return Err(Error::Validation("weights sum to zero".into()));
        }
        let probs = weights.iter().map(|w| w.div_ref(&total)).collect();
        Ok(FiniteDistribution {
            volume,
            alphabet,
            probs,
            tol: DEFAULT_TOL,
        })
    }

    pub(crate) fn from_parts_unchecked(volume: Volume, alphabet: Alphabet, probs: Vec<S>, tol: f64) -> Self {
        FiniteDistribution {
            volume,
            alphabet,
            probs,
            tol,
        }
    }

    /// Checks every invariant, naming the first one violated.
    pub fn validate(&self) -> Result<()> {
        let n = configuration_count(&self.volume, &self.alphabet)?;
        if self.probs.len() != n {
            return Err(Error::Validation(format!(
                "key set incomplete: {} entries for {n} configurations",
                self.probs.len()
            )));
        }
        if let Some(i) = self.probs.iter().position(|p| *p < S::zero()) {
            return Err(Error::Validation(format!(
                "negative probability {} at {}",
                self.probs[i].render(),
                self.configuration(i).display(&self.alphabet)
            )));
        }
        let total = S::sum(&self.probs);
        if !total.approx_eq(&S::one(), self.tol) {
            return Err(Error::Validation(format!(
                "probabilities sum to {}, not 1",
                total.render()
            )));
        }
        Ok(())
    }

    pub fn with_tolerance(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn tolerance(&self) -> f64 {
        self.tol
    }

    pub fn volume(&self) -> &Volume {
        &self.volume
    }

    pub fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob_at(&self, index: usize) -> &S {
        &self.probs[index]
    }

    pub fn configuration(&self, index: usize) -> Configuration {
        Configuration::from_index(&self.volume, self.alphabet.size(), index)
    }

    /// Probability of a configuration on exactly this volume.
    pub fn prob(&self, c: &Configuration) -> Result<&S> {
        if c.volume() != &self.volume {
            return Err(Error::Domain(format!(
                "configuration on {} queried in a table on {}",
                c.volume(),
                self.volume
            )));
        }
        Ok(&self.probs[c.index(self.alphabet.size())])
    }

    pub fn iter(&self) -> impl Iterator<Item = (Configuration, &S)> + '_ {
        self.probs
            .iter()
            .enumerate()
            .map(move |(i, p)| (self.configuration(i), p))
    }

    /// Sum over the sites outside `target`.
    pub fn marginalize(&self, target: &Volume) -> Result<FiniteDistribution<S>> {
        if target == &self.volume {
            return Ok(self.clone());
        }
        let proj = Projector::new(&self.volume, target, self.alphabet.size())?;
        let mut out = vec![S::zero(); proj.target_len()];
        for (i, p) in self.probs.iter().enumerate() {
            let j = proj.project(i);
            out[j] = out[j].add_ref(p);
        }
        Ok(FiniteDistribution::from_parts_unchecked(
            target.clone(),
            self.alphabet.clone(),
            out,
            self.tol,
        ))
    }

    /// Every entry strictly positive (float mode: above the tolerance).
    pub fn is_positive(&self) -> bool {
        self.probs.iter().all(|p| p.is_positive(self.tol))
    }

    /// Entrywise equality (exact or within tolerance).
    pub fn approx_eq(&self, other: &FiniteDistribution<S>) -> bool {
        self.volume == other.volume
            && self.alphabet == other.alphabet
            && self.probs.len() == other.probs.len()
            && self
                .probs
                .iter()
                .zip(&other.probs)
                .all(|(a, b)| a.approx_eq(b, self.tol.max(other.tol)))
    }

    /// Largest entrywise absolute difference.
    pub fn sup_distance(&self, other: &FiniteDistribution<S>) -> S {
        self.probs
            .iter()
            .zip(&other.probs)
            .fold(S::zero(), |m, (a, b)| S::max_of(m, a.abs_diff(b)))
    }
}

/// Free-function form of [`FiniteDistribution::marginalize`].
pub fn marginalize<S: Scalar>(p: &FiniteDistribution<S>, target: &Volume) -> Result<FiniteDistribution<S>> {
    p.marginalize(target)
}

/// Maps indices on a volume to indices on a sub-volume.
#[derive(Clone, Debug)]
pub(crate) struct Projector {
    /// (divisor in the big index, multiplier in the small index) per kept site.
    strides: Vec<(usize, usize)>,
    q: usize,
    target_len: usize,
}

impl Projector {
    pub(crate) fn new(from: &Volume, to: &Volume, q: usize) -> Result<Self> {
        let positions = from.positions_of(to)?;
        let n = from.len();
        let m = positions.len();
        let strides = positions
            .iter()
            .enumerate()
            .map(|(k, &p)| (q.pow((n - 1 - p) as u32), q.pow((m - 1 - k) as u32)))
            .collect();
        Ok(Projector {
            strides,
            q,
            target_len: q.pow(m as u32),
        })
    }

    pub(crate) fn project(&self, i: usize) -> usize {
        self.strides
            .iter()
            .map(|&(div, mul)| (i / div) % self.q * mul)
            .sum()
    }

    pub(crate) fn target_len(&self) -> usize {
        self.target_len
    }
}

/// A probability measure on configurations of a finite window, queried
/// through its finite-dimensional distributions.
pub trait RandomField<S: Scalar>: Send + Sync {
    fn window(&self) -> &Volume;
    fn alphabet(&self) -> &Alphabet;

    /// `P_V(c)` where `V` is the domain of `c`.
    fn prob(&self, c: &Configuration) -> Result<S>;

    /// The full table `P_V`.
    fn marginal(&self, v: &Volume) -> Result<FiniteDistribution<S>> {
        ensure_in_window(self.window(), v)?;
        let n = configuration_count(v, self.alphabet())?;
        let q = self.alphabet().size();
        let probs = (0..n)
            .map(|i| self.prob(&Configuration::from_index(v, q, i)))
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteDistribution::from_parts_unchecked(
            v.clone(),
            self.alphabet().clone(),
            probs,
            self.tolerance(),
        ))
    }

    fn tolerance(&self) -> f64 {
        DEFAULT_TOL
    }

    fn describe(&self) -> String {
        "random field".into()
    }
}

impl<S: Scalar, T: RandomField<S> + ?Sized> RandomField<S> for &T {
    fn window(&self) -> &Volume {
        (**self).window()
    }
    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }
    fn prob(&self, c: &Configuration) -> Result<S> {
        (**self).prob(c)
    }
    fn marginal(&self, v: &Volume) -> Result<FiniteDistribution<S>> {
        (**self).marginal(v)
    }
    fn tolerance(&self) -> f64 {
        (**self).tolerance()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

impl<S: Scalar, T: RandomField<S> + ?Sized> RandomField<S> for Box<T> {
    fn window(&self) -> &Volume {
        (**self).window()
    }
    fn alphabet(&self) -> &Alphabet {
        (**self).alphabet()
    }
    fn prob(&self, c: &Configuration) -> Result<S> {
        (**self).prob(c)
    }
    fn marginal(&self, v: &Volume) -> Result<FiniteDistribution<S>> {
        (**self).marginal(v)
    }
    fn tolerance(&self) -> f64 {
        (**self).tolerance()
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

pub(crate) fn ensure_in_window(window: &Volume, v: &Volume) -> Result<()> {
    if !v.is_subset(window) {
        return Err(Error::Domain(format!("volume {v} is not inside the window {window}")));
    }
    Ok(())
}

/// A field given by its full table on the window.
#[derive(Clone, Debug)]
pub struct TableField<S> {
    joint: FiniteDistribution<S>,
}

impl<S: Scalar> TableField<S> {
    pub fn new(joint: FiniteDistribution<S>) -> Self {
        TableField { joint }
    }

    pub fn joint(&self) -> &FiniteDistribution<S> {
        &self.joint
    }
}

/// Builds a [`TableField`], validating the table.
pub fn table_field<S: Scalar>(window: Volume, alphabet: Alphabet, probs: Vec<S>) -> Result<TableField<S>> {
    Ok(TableField::new(FiniteDistribution::new(window, alphabet, probs)?))
}

impl<S: Scalar> RandomField<S> for TableField<S> {
    fn window(&self) -> &Volume {
        self.joint.volume()
    }

    fn alphabet(&self) -> &Alphabet {
        self.joint.alphabet()
    }

    fn prob(&self, c: &Configuration) -> Result<S> {
        let window = self.joint.volume();
        ensure_in_window(window, c.volume())?;
        let q = self.joint.alphabet().size();
        let n = window.len();
        let positions = window.positions_of(c.volume())?;
        let stride = |p: usize| q.pow((n - 1 - p) as u32);
        let base: usize = positions
            .iter()
            .zip(c.symbols())
            .map(|(&p, s)| s.index() * stride(p))
            .sum();
        let free: Vec<usize> = (0..n)
            .filter(|p| !positions.contains(p))
            .map(stride)
            .collect();
        // Odometer over the free sites.
        let mut digits = vec![0usize; free.len()];
        let mut total = S::zero();
        loop {
            let idx = base + digits.iter().zip(&free).map(|(d, s)| d * s).sum::<usize>();
            total = total.add_ref(self.joint.prob_at(idx));
            let mut k = 0;
            loop {
                if k == digits.len() {
                    return Ok(total);
                }
                digits[k] += 1;
                if digits[k] < q {
                    break;
                }
                digits[k] = 0;
                k += 1;
            }
        }
    }

    fn marginal(&self, v: &Volume) -> Result<FiniteDistribution<S>> {
        ensure_in_window(self.window(), v)?;
        self.joint.marginalize(v)
    }

    fn tolerance(&self) -> f64 {
        self.joint.tolerance()
    }

    fn describe(&self) -> String {
        format!("table field on {} sites", self.joint.volume().len())
    }
}

/// Independent identically distributed sites.
#[derive(Clone, Debug)]
pub struct ProductField<S> {
    window: Volume,
    alphabet: Alphabet,
    site_law: Vec<S>,
}

impl<S: Scalar> ProductField<S> {
    pub fn new(window: Volume, alphabet: Alphabet, site_law: Vec<S>) -> Result<Self> {
        let probe = Volume::single(
            window
                .iter()
                .next()
                .cloned()
                .ok_or_else(|| Error::Argument("empty window".into()))?,
        );
        FiniteDistribution::new(probe, alphabet.clone(), site_law.clone())?;
        Ok(ProductField {
            window,
            alphabet,
            site_law,
        })
    }

    pub fn site_law(&self) -> &[S] {
        &self.site_law
    }
}

impl<S: Scalar> RandomField<S> for ProductField<S> {
    fn window(&self) -> &Volume {
        &self.window
    }
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn prob(&self, c: &Configuration) -> Result<S> {
        ensure_in_window(&self.window, c.volume())?;
        Ok(c.symbols()
            .iter()
            .fold(S::one(), |acc, s| acc.mul_ref(&self.site_law[s.index()])))
    }
    fn describe(&self) -> String {
        let law: Vec<String> = self.site_law.iter().map(|p| p.render()).collect();
        format!("product field, site law [{}]", law.join(","))
    }
}

/// Float view of an exact field.
#[derive(Clone, Debug)]
pub struct FloatView<M>(pub M);

impl<M: RandomField<Rational>> RandomField<f64> for FloatView<M> {
    fn window(&self) -> &Volume {
        self.0.window()
    }
    fn alphabet(&self) -> &Alphabet {
        self.0.alphabet()
    }
    fn prob(&self, c: &Configuration) -> Result<f64> {
        Ok(Scalar::to_f64(&self.0.prob(c)?))
    }
    fn describe(&self) -> String {
        format!("{} (float view)", self.0.describe())
    }
}

/// `marginalize(marginal(S), V) == marginal(V)` for `V ⊂ S ⊆ window`.
pub fn check_marginal_consistency<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    outer: &Volume,
    inner: &Volume,
) -> Result<bool> {
    ensure_in_window(m.window(), outer)?;
    if !inner.is_subset(outer) {
        return Err(Error::Domain(format!("{inner} is not contained in {outer}")));
    }
    let via_outer = m.marginal(outer)?.marginalize(inner)?;
    let direct = m.marginal(inner)?;
    let tol = m.tolerance();
    Ok(via_outer.len() == direct.len()
        && via_outer
            .probs()
            .iter()
            .zip(direct.probs())
            .all(|(a, b)| a.approx_eq(b, tol)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{Site, Symbol};

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn uniform_two_sites_marginal() {
        let w = Volume::interval(0, 1);
        let t = table_field(w.clone(), Alphabet::binary(), vec![r(1, 4); 4]).unwrap();
        let m = t.marginal(&Volume::single(Site::from(0))).unwrap();
        assert_eq!(m.probs(), &[r(1, 2), r(1, 2)]);
        assert_eq!(t.joint().marginalize(&w).unwrap(), *t.joint());
        assert!(t.joint().is_positive());
    }

    #[test]
    fn zero_entry_is_not_positive() {
        let t = table_field(Volume::interval(0, 0), Alphabet::binary(), vec![r(0, 1), r(1, 1)]).unwrap();
        assert!(!t.joint().is_positive());
    }

    #[test]
    fn invalid_tables_are_rejected() {
        let w = Volume::interval(0, 0);
        let e = table_field(w.clone(), Alphabet::binary(), vec![r(1, 2), r(1, 3)]).unwrap_err();
        assert!(matches!(e, Error::Validation(ref m) if m.contains("sum")));
        let e = table_field(w.clone(), Alphabet::binary(), vec![r(3, 2), r(-1, 2)]).unwrap_err();
        assert!(matches!(e, Error::Validation(ref m) if m.contains("negative")));
        let e = table_field(w, Alphabet::binary(), vec![r(1, 1)]).unwrap_err();
        assert!(matches!(e, Error::Validation(ref m) if m.contains("incomplete")));
    }

    #[test]
    fn single_site_window_marginal_is_table() {
        let w = Volume::interval(5, 5);
        let t = table_field(w.clone(), Alphabet::binary(), vec![r(1, 3), r(2, 3)]).unwrap();
        assert_eq!(t.marginal(&w).unwrap(), *t.joint());
    }

    #[test]
    fn product_table_marginals() {
        let p = [r(1, 3), r(2, 3)];
        let w = Volume::interval(0, 1);
        let mut probs = Vec::new();
        for a in &p {
            for b in &p {
                probs.push(a * b);
            }
        }
        let t = table_field(w.clone(), Alphabet::binary(), probs).unwrap();
        for s in w.iter() {
            assert_eq!(t.marginal(&Volume::single(s.clone())).unwrap().probs(), &p);
        }
    }

    #[test]
    fn point_probability_matches_marginal_table() {
        let w = Volume::interval(0, 2);
        let weights: Vec<Rational> = (1..=8).map(|k| r(k, 1)).collect();
        let t = TableField::new(FiniteDistribution::from_weights(w, Alphabet::binary(), weights).unwrap());
        let v = Volume::new([Site::from(0), Site::from(2)]);
        let m = t.marginal(&v).unwrap();
        for (c, p) in m.iter() {
            assert_eq!(&t.prob(&c).unwrap(), p);
        }
        // weights 1..8 with site 0 = 1 are 5..8 → 26/36
        let c = Configuration::constant(Volume::single(Site::from(0)), Symbol(1));
        assert_eq!(t.prob(&c).unwrap(), r(26, 36));
        assert_eq!(t.prob(&Configuration::empty()).unwrap(), r(1, 1));
    }

    #[test]
    fn float_mode_tolerance() {
        let w = Volume::interval(0, 0);
        assert!(table_field(w.clone(), Alphabet::binary(), vec![0.3, 0.7 + 1e-14]).is_ok());
        assert!(table_field(w, Alphabet::binary(), vec![0.3, 0.7 + 1e-9]).is_err());
    }
}
