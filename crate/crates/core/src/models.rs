//! Reference models: the two-sided Markov chain pair with identical one-point
//! conditionals, the Bernoulli mixture whose conditionals do not converge
//! uniformly, and a nearest-neighbor Ising field.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use num_bigint::BigInt;

use crate::energy::HamiltonianValue;
use crate::error::{Error, Result};
use crate::fields::{ensure_in_window, FiniteDistribution, RandomField, TableField};
use crate::lattice::{configuration_count, Alphabet, Configuration, Site, Symbol, Volume};
use crate::scalar::{Rational, Scalar, DEFAULT_TOL};
use crate::specifications::{finite_volume_gibbs, Potential};

/// One of the chains `P^+`, `P^-` on sites `1..=N` with spins `{-1, +1}`:
/// `P^±_{1..n}(x) = Π_{j<n} (1 + c_j x_j x_{j+1})/2 · (1 ± x_n k_n)/2`,
/// `k_t = c_t ··· c_{N-1} κ`.
#[derive(Clone, Debug)]
pub struct MarkovChainPair {
    window: Volume,
    alphabet: Alphabet,
    c: Vec<Rational>,
    k: Vec<Rational>,
    plus: bool,
}

fn in_unit_interval(v: &Rational) -> bool {
    *v > Rational::zero() && *v < Rational::one()
}

/// The pair `(P^+, P^-)` with couplings `c_1..c_{N-1}` and tail `κ = k_N`.
pub fn example1_pair(n: usize, c: &[Rational], kappa: &Rational) -> Result<(MarkovChainPair, MarkovChainPair)> {
    if n < 2 {
        return Err(Error::Argument("the chain needs at least two sites".into()));
    }
    if c.len() != n - 1 {
        return Err(Error::Argument(format!("{} couplings for N = {n} (need {})", c.len(), n - 1)));
    }
    if let Some(bad) = c.iter().find(|v| !in_unit_interval(v)) {
        return Err(Error::Argument(format!("coupling {} not in (0,1)", bad.render())));
    }
    if !in_unit_interval(kappa) {
        return Err(Error::Argument(format!("kappa {} not in (0,1)", kappa.render())));
    }
    // k[t-1] = k_t
    let mut k = vec![kappa.clone(); n];
    for t in (0..n - 1).rev() {
        k[t] = &c[t] * &k[t + 1];
    }
    let make = |plus| MarkovChainPair {
        window: Volume::interval(1, n as i32),
        alphabet: Alphabet::spins(),
        c: c.to_vec(),
        k: k.clone(),
        plus,
    };
    Ok((make(true), make(false)))
}

impl MarkovChainPair {
    pub fn horizon(&self) -> usize {
        self.k.len()
    }

    /// `c_j`, 1-based.
    pub fn coupling(&self, j: usize) -> &Rational {
        &self.c[j - 1]
    }

    /// `k_t`, 1-based.
    pub fn tail(&self, t: usize) -> &Rational {
        &self.k[t - 1]
    }

    pub fn is_plus(&self) -> bool {
        self.plus
    }

    fn spin(&self, s: Symbol) -> i64 {
        self.alphabet.value(s)
    }

    fn site_index(site: &Site) -> usize {
        site.coords()[0] as usize
    }

    /// `P^±_{1..n}(x)` from the closed form.
    pub fn prefix_prob(&self, x: &[i64]) -> Rational {
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        let mut p = Rational::one();
        for j in 0..x.len().saturating_sub(1) {
            p *= (Rational::one() + &self.c[j] * Rational::from_int(x[j] * x[j + 1])) * &half;
        }
        if let Some(&last) = x.last() {
            let sign = if self.plus { 1 } else { -1 };
            p *= (Rational::one() + &self.k[x.len() - 1] * Rational::from_int(sign * last)) * &half;
        }
        p
    }
}

/// `(1 + c_{t-1} y_{t-1} x)(1 + c_t x y_{t+1}) / (2 (1 + c_{t-1} c_t y_{t-1} y_{t+1}))`.
pub fn example1_conditional(c_prev: &Rational, c_next: &Rational, y_prev: i64, x: i64, y_next: i64) -> Rational {
    let one = Rational::one();
    let num = (&one + c_prev * Rational::from_int(y_prev * x)) * (&one + c_next * Rational::from_int(x * y_next));
    let den = Rational::from_int(2) * (&one + c_prev * c_next * Rational::from_int(y_prev * y_next));
    num / den
}

impl RandomField<Rational> for MarkovChainPair {
    fn window(&self) -> &Volume {
        &self.window
    }

    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }

    /// Sums the prefix closed form over the free sites below the last
    /// specified one, left to right.
    fn prob(&self, c: &Configuration) -> Result<Rational> {
        ensure_in_window(&self.window, c.volume())?;
        let Some(last) = c.volume().sites().last() else {
            return Ok(Rational::one());
        };
        let m = Self::site_index(last);
        let half = Rational::new(BigInt::from(1), BigInt::from(2));
        let spins = [-1i64, 1];
        let fixed: Vec<Option<i64>> = (1..=m)
            .map(|t| c.get(&Site::from(t as i32)).map(|s| self.spin(s)))
            .collect();
        // msg[a]: summed weight of sites 1..j with x_j = spins[a].
        let allowed = |j: usize, a: usize| fixed[j].is_none_or(|v| v == spins[a]);
        let mut msg: [Rational; 2] = core::array::from_fn(|a| if allowed(0, a) { Rational::one() } else { Rational::zero() });
        for j in 1..m {
            let next: [Rational; 2] = core::array::from_fn(|b| {
                if !allowed(j, b) {
                    return Rational::zero();
                }
                let mut acc = Rational::zero();
                for a in 0..2 {
                    if !msg[a].is_zero() {
                        let w = (Rational::one() + &self.c[j - 1] * Rational::from_int(spins[a] * spins[b])) * &half;
                        acc += &msg[a] * w;
                    }
                }
                acc
            });
            msg = next;
        }
        let sign = if self.plus { 1 } else { -1 };
        let mut total = Rational::zero();
        for a in 0..2 {
            if !msg[a].is_zero() {
                total += &msg[a] * (Rational::one() + &self.k[m - 1] * Rational::from_int(sign * spins[a])) * &half;
            }
        }
        Ok(total)
    }

    fn tolerance(&self) -> f64 {
        0.0
    }

    fn describe(&self) -> String {
        format!(
            "example1{}:N={}",
            if self.plus { "+" } else { "-" },
            self.horizon()
        )
    }
}

/// Mixing exponent of the Bernoulli mixture.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Tau {
    Integer(u32),
    Real(f64),
}

impl Tau {
    pub fn to_f64(self) -> f64 {
        match self {
            Tau::Integer(n) => n as f64,
            Tau::Real(v) => v,
        }
    }
}

/// `P_V(x) = ∫_0^1 p^{|x|} (1-p)^{|V|-|x|} τ p^{τ-1} dp = τ B(|x| + τ, |V| - |x| + 1)`
/// on `{0, 1}`.
#[derive(Clone, Debug)]
pub struct BernoulliMixture {
    tau: Tau,
    window: Volume,
    alphabet: Alphabet,
}

pub fn example2_model(tau: Tau, window: Volume) -> Result<BernoulliMixture> {
    match tau {
        Tau::Integer(0) => return Err(Error::Argument("tau must be positive".into())),
        Tau::Real(v) if !(v > 0.0 && v.is_finite()) => return Err(Error::Argument("tau must be positive".into())),
        _ => {}
    }
    Ok(BernoulliMixture {
        tau,
        window,
        alphabet: Alphabet::binary(),
    })
}

impl BernoulliMixture {
    pub fn tau(&self) -> Tau {
        self.tau
    }

    /// `P_V(x)` for `|V| = n`, `|x| = k`: `τ (k+τ-1)! (n-k)! / (n+τ)!` for integer `τ`.
    pub fn exact_weight(&self, n: usize, k: usize) -> Result<Rational> {
        let Tau::Integer(tau) = self.tau else {
            return Err(Error::Argument("exact mode needs an integer tau".into()));
        };
        let tau = tau as usize;
        let fact = |m: usize| (1..=m).fold(BigInt::from(1), |acc, i| acc * BigInt::from(i));
        Ok(Rational::new(
            BigInt::from(tau) * fact(k + tau - 1) * fact(n - k),
            fact(n + tau),
        ))
    }

    /// The same weight through log-Gamma.
    pub fn float_weight(&self, n: usize, k: usize) -> f64 {
        let tau = self.tau.to_f64();
        let (n, k) = (n as f64, k as f64);
        libm::exp(libm::log(tau) + libm::lgamma(k + tau) + libm::lgamma(n - k + 1.0) - libm::lgamma(n + tau + 1.0))
    }

    fn ones(c: &Configuration) -> usize {
        c.count(Symbol(1))
    }

    fn table<S: Scalar>(&self, v: &Volume, weight: impl Fn(usize, usize) -> Result<S>) -> Result<FiniteDistribution<S>> {
        ensure_in_window(&self.window, v)?;
        let count = configuration_count(v, &self.alphabet)?;
        let n = v.len();
        let by_k: Vec<S> = (0..=n).map(|k| weight(n, k)).collect::<Result<_>>()?;
        let probs = (0..count).map(|i| by_k[i.count_ones() as usize].clone()).collect();
        Ok(FiniteDistribution::from_parts_unchecked(v.clone(), self.alphabet.clone(), probs, self.tol_for::<S>()))
    }

    fn tol_for<S: Scalar>(&self) -> f64 {
        if S::EXACT {
            0.0
        } else {
            DEFAULT_TOL
        }
    }
}

/// `g_t^z(1) = (|z| + τ) / (|Λ| + τ + 1)`.
pub fn example2_conditional(tau: u32, lambda_size: usize, ones: usize) -> Rational {
    Rational::new(BigInt::from(ones as u64 + tau as u64), BigInt::from(lambda_size as u64 + tau as u64 + 1))
}

impl RandomField<Rational> for BernoulliMixture {
    fn window(&self) -> &Volume {
        &self.window
    }
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn prob(&self, c: &Configuration) -> Result<Rational> {
        ensure_in_window(&self.window, c.volume())?;
        self.exact_weight(c.len(), Self::ones(c))
    }
    fn marginal(&self, v: &Volume) -> Result<FiniteDistribution<Rational>> {
        self.table(v, |n, k| self.exact_weight(n, k))
    }
    fn tolerance(&self) -> f64 {
        0.0
    }
    fn describe(&self) -> String {
        format!("example2:tau={}", self.tau.to_f64())
    }
}

impl RandomField<f64> for BernoulliMixture {
    fn window(&self) -> &Volume {
        &self.window
    }
    fn alphabet(&self) -> &Alphabet {
        &self.alphabet
    }
    fn prob(&self, c: &Configuration) -> Result<f64> {
        ensure_in_window(&self.window, c.volume())?;
        Ok(self.float_weight(c.len(), Self::ones(c)))
    }
    fn marginal(&self, v: &Volume) -> Result<FiniteDistribution<f64>> {
        self.table(v, |n, k| Ok(self.float_weight(n, k)))
    }
    fn describe(&self) -> String {
        format!("example2:tau={}", self.tau.to_f64())
    }
}

/// The limiting one-point Hamiltonian along boundaries of density `p`:
/// `-x ln p - (1-x) ln(1-p)` inside `(0,1)`; `0` or `+∞` at the endpoints.
pub fn example2_limiting_hamiltonian(p: &Rational, x: u8) -> Result<HamiltonianValue> {
    if *p < Rational::zero() || *p > Rational::one() || x > 1 {
        return Err(Error::Argument(format!("density {} / symbol {x} out of range", p.render())));
    }
    let favoured = if p.is_zero() {
        Some(0)
    } else if *p == Rational::one() {
        Some(1)
    } else {
        None
    };
    Ok(match favoured {
        Some(f) if f == x => HamiltonianValue::Finite(0.0),
        Some(_) => HamiltonianValue::PosInfinity,
        None => {
            let v = if x == 1 {
                -Scalar::ln(p)
            } else {
                -Scalar::ln(&(Rational::one() - p))
            };
            HamiltonianValue::Finite(v)
        }
    })
}

/// Nearest-neighbor Ising field on `{1..side}^d` with free boundary.
#[derive(Clone, Debug)]
pub struct IsingDemo {
    beta: f64,
    h: f64,
    potential: Potential,
    field: TableField<f64>,
}

impl IsingDemo {
    pub fn new(beta: f64, h: f64, dim: usize, side: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::Argument(format!("dimension {dim} not supported (1 or 2)")));
        }
        if side == 0 {
            return Err(Error::Argument("window side must be positive".into()));
        }
        if !beta.is_finite() || !h.is_finite() {
            return Err(Error::Argument("beta and h must be finite".into()));
        }
        let window = Volume::box_range(&vec![1; dim], &vec![side as i32; dim]);
        let potential = Potential::ising(beta, h, dim);
        let joint = finite_volume_gibbs(&potential, &window, &window, &Configuration::empty())?;
        Ok(IsingDemo {
            beta,
            h,
            potential,
            field: TableField::new(joint),
        })
    }

    pub fn potential(&self) -> &Potential {
        &self.potential
    }

    pub fn field(&self) -> &TableField<f64> {
        &self.field
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn h(&self) -> f64 {
        self.h
    }
}

impl RandomField<f64> for IsingDemo {
    fn window(&self) -> &Volume {
        self.field.window()
    }
    fn alphabet(&self) -> &Alphabet {
        self.field.alphabet()
    }
    fn prob(&self, c: &Configuration) -> Result<f64> {
        self.field.prob(c)
    }
    fn marginal(&self, v: &Volume) -> Result<FiniteDistribution<f64>> {
        self.field.marginal(v)
    }
    fn describe(&self) -> String {
        format!("ising:beta={},h={},d={},window={}", self.beta, self.h, self.potential.dim(), self.window().len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::conditionals::{finite_conditional, markov_radius};
    use crate::fields::check_marginal_consistency;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn example1_initial_law() {
        let (plus, minus) = example1_pair(4, &[r(1, 2), r(1, 2), r(1, 2)], &r(1, 2)).unwrap();
        assert_eq!(plus.tail(1), &r(1, 16));
        let up = Configuration::parse("(1)=+1", &Alphabet::spins()).unwrap();
        assert_eq!(plus.prob(&up).unwrap(), r(17, 32));
        assert_eq!(minus.prob(&up).unwrap(), r(15, 32));
        assert!(check_marginal_consistency(&plus, &Volume::interval(1, 4), &Volume::new([Site::from(2), Site::from(4)])).unwrap());
    }

    #[test]
    fn example1_parameters_are_checked() {
        assert!(example1_pair(3, &[r(1, 2)], &r(1, 2)).is_err());
        assert!(example1_pair(3, &[r(1, 2), r(1, 1)], &r(1, 2)).is_err());
        assert!(example1_pair(3, &[r(1, 2), r(1, 2)], &r(0, 1)).is_err());
    }

    #[test]
    fn example1_neighbor_conditional() {
        let (plus, minus) = example1_pair(6, &vec![r(1, 2); 5], &r(1, 2)).unwrap();
        let z = Configuration::parse("(2)=+1;(4)=+1;(6)=-1", &Alphabet::spins()).unwrap();
        let t = Volume::single(Site::from(3));
        let a = finite_conditional(&plus, &t, &z).unwrap();
        let b = finite_conditional(&minus, &t, &z).unwrap();
        assert_eq!(a.probs(), b.probs());
        assert_eq!(a.probs()[1], r(9, 10));
        assert_eq!(example1_conditional(&r(1, 2), &r(1, 2), 1, 1, 1), r(9, 10));
    }

    #[test]
    fn example2_small_values() {
        let m = example2_model(Tau::Integer(1), Volume::interval(0, 3)).unwrap();
        let c = |s| Configuration::parse(s, &Alphabet::binary()).unwrap();
        assert_eq!(RandomField::<Rational>::prob(&m, &c("(0)=1;(1)=1")).unwrap(), r(1, 3));
        assert_eq!(RandomField::<Rational>::prob(&m, &c("(0)=1;(1)=0")).unwrap(), r(1, 6));
        let k = finite_conditional::<Rational, _>(&m, &Volume::single(Site::from(0)), &c("(1)=1;(2)=0")).unwrap();
        assert_eq!(k.probs()[1], example2_conditional(1, 2, 1));
        let f = RandomField::<f64>::prob(&m, &c("(0)=1;(1)=0")).unwrap();
        assert!((f - 1.0 / 6.0).abs() < 1e-14);
    }

    #[test]
    fn example2_hamiltonian_cases() {
        assert_eq!(example2_limiting_hamiltonian(&r(0, 1), 0).unwrap(), HamiltonianValue::Finite(0.0));
        assert_eq!(example2_limiting_hamiltonian(&r(0, 1), 1).unwrap(), HamiltonianValue::PosInfinity);
        assert_eq!(example2_limiting_hamiltonian(&r(1, 1), 0).unwrap(), HamiltonianValue::PosInfinity);
        let v = example2_limiting_hamiltonian(&r(1, 2), 1).unwrap().to_f64();
        assert!((v - core::f64::consts::LN_2).abs() < 1e-15);
        assert!(example2_limiting_hamiltonian(&r(3, 2), 1).is_err());
    }

    #[test]
    fn ising_demo_is_markov() {
        let m = IsingDemo::new(0.4, 0.0, 1, 7).unwrap();
        assert_eq!(markov_radius(&m, &Site::from(4), 1).unwrap(), Some(1));
    }
}
