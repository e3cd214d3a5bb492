//! Finite evidence for (and against) the uniform convergence of one-point
//! finite conditionals: convergence reports over a family of boundary
//! generators, filtration independence, quasilocality moduli, and searches
//! for non-convergent boundaries.
//!
//! Nothing here certifies Gibbsianness. A family of generators is a finite
//! stand-in for a set of admissible boundary conditions; verdicts are
//! "evidence", "witness" or "inconclusive".

use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::conditionals::{limit_along_filtration, Boundary, BoundaryFamily, ConditionalKernel, LimitEstimate};
use crate::energy::{energy_distance, transition_energy, TransitionEnergy};
use crate::error::{Error, Result};
use crate::fields::RandomField;
use crate::lattice::{Alphabet, Configuration, Filtration, Site, Symbol, Volume};
use crate::scalar::Scalar;
use crate::specifications::OnePointSpec;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    UniformEvidence,
    DivergenceWitness,
    Inconclusive,
}

impl Verdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            Verdict::UniformEvidence => "uniform-evidence",
            Verdict::DivergenceWitness => "divergence-witness",
            Verdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct StageSummary<S> {
    /// 1-based stage number.
    pub n: usize,
    pub volume_size: usize,
    /// Sup over generators of the gap to the previous stage; `None` at stage 1.
    pub sup_gap: Option<S>,
}

/// A generator whose stage-to-stage gaps stay large.
#[derive(Clone, Debug, PartialEq)]
pub struct Witness<S> {
    pub label: String,
    pub gaps: Vec<S>,
    /// Smallest of the last three gaps.
    pub persistent_gap: S,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConvergenceReport<S> {
    pub site: Site,
    pub filtration: String,
    pub family: String,
    pub family_size: usize,
    pub gap_tol: S,
    pub stages: Vec<StageSummary<S>>,
    pub per_generator: Vec<LimitEstimate<S>>,
    pub verdict: Verdict,
    pub witness: Option<Witness<S>>,
}

/// Number of trailing gaps the verdict rules look at.
pub const VERDICT_WINDOW: usize = 3;

fn last_three<S: Clone>(gaps: &[S]) -> Option<&[S]> {
    (gaps.len() >= VERDICT_WINDOW).then(|| &gaps[gaps.len() - VERDICT_WINDOW..])
}

/// Non-increasing (gaps at or below `tol` count as zero) and ending at or
/// below `tol`.
fn settles<V: PartialOrd>(tail: &[V], tol: &V) -> bool {
    tail.windows(2).all(|w| w[1] <= w[0] || w[1] <= *tol) && tail[tail.len() - 1] <= *tol
}

fn min_of<S: Scalar>(xs: &[S]) -> S {
    xs.iter().skip(1).fold(xs[0].clone(), |m, x| if *x < m { x.clone() } else { m })
}

fn ten_times<S: Scalar>(tol: &S) -> S {
    tol.mul_ref(&S::from_int(10))
}

/// Largest persistent gap among generators whose last three gaps are all
/// at least `10 * tol`.
fn strongest_witness<S: Scalar>(estimates: &[LimitEstimate<S>], tol: &S) -> Option<Witness<S>> {
    let bar = ten_times(tol);
    let mut best: Option<Witness<S>> = None;
    for est in estimates {
        let Some(tail) = last_three(&est.gaps) else { continue };
        let persistent = min_of(tail);
        if persistent >= bar && best.as_ref().is_none_or(|b| persistent > b.persistent_gap) {
            best = Some(Witness {
                label: est.boundary_label.clone(),
                gaps: est.gaps.clone(),
                persistent_gap: persistent,
            });
        }
    }
    best
}

impl<S: Scalar> ConvergenceReport<S> {
    /// Builds the report from per-generator estimates (in family order).
    ///
    /// Uniform evidence: the last three sup-gaps are non-increasing and the
    /// final one is at most `gap_tol`. Divergence witness: some generator's
    /// last three gaps are all at least `10 * gap_tol`. Otherwise inconclusive,
    /// which includes filtrations with fewer than four stages.
    pub fn assemble(
        site: &Site,
        filtration: &Filtration,
        family: &BoundaryFamily,
        per_generator: Vec<LimitEstimate<S>>,
        gap_tol: &S,
    ) -> Self {
        let stages: Vec<StageSummary<S>> = filtration
            .stages()
            .iter()
            .enumerate()
            .map(|(k, v)| StageSummary {
                n: k + 1,
                volume_size: v.len(),
                sup_gap: (k > 0).then(|| {
                    per_generator
                        .iter()
                        .map(|e| e.gaps[k - 1].clone())
                        .fold(S::zero(), S::max_of)
                }),
            })
            .collect();
        let sup_gaps: Vec<S> = stages.iter().filter_map(|s| s.sup_gap.clone()).collect();
        let witness = strongest_witness(&per_generator, gap_tol);
        let verdict = match last_three(&sup_gaps) {
            Some(tail) if settles(tail, gap_tol) => {
                Verdict::UniformEvidence
            }
            _ if witness.is_some() => Verdict::DivergenceWitness,
            _ => Verdict::Inconclusive,
        };
        ConvergenceReport {
            site: site.clone(),
            filtration: filtration.describe(),
            family: family.description().to_string(),
            family_size: family.len(),
            gap_tol: gap_tol.clone(),
            stages,
            per_generator,
            witness: if verdict == Verdict::DivergenceWitness { witness } else { None },
            verdict,
        }
    }

    pub fn sup_gaps(&self) -> Vec<Option<S>> {
        self.stages.iter().map(|s| s.sup_gap.clone()).collect()
    }
}

/// Finite conditionals at `t` along one generator, with null conditions
/// reported against the generator.
pub fn generator_estimate<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    t: &Site,
    filtration: &Filtration,
    boundary: &Boundary,
    gap_tol: &S,
) -> Result<LimitEstimate<S>> {
    limit_along_filtration(m, &Volume::single(t.clone()), boundary, filtration, gap_tol).map_err(|e| match e {
        Error::NullCondition { stage, detail } => Error::NullCondition {
            stage,
            detail: format!("generator {}: {detail}", boundary.label()),
        },
        other => other,
    })
}

pub fn uniform_convergence_report<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    t: &Site,
    filtration: &Filtration,
    family: &BoundaryFamily,
    gap_tol: &S,
) -> Result<ConvergenceReport<S>> {
    let estimates = family
        .members()
        .iter()
        .map(|b| generator_estimate(m, t, filtration, b, gap_tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(ConvergenceReport::assemble(t, filtration, family, estimates, gap_tol))
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceRow<S> {
    pub label: String,
    /// Sup-distance of each filtration's deepest-stage kernel to the first one's.
    pub distances: Vec<S>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct IndependenceReport<S> {
    pub site: Site,
    pub filtrations: Vec<String>,
    pub rows: Vec<IndependenceRow<S>>,
    pub max_distance: S,
    pub agree: bool,
}

/// Deepest-stage kernels of every generator under each filtration, compared
/// against the first filtration.
pub fn filtration_independence_check<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    t: &Site,
    filtrations: &[Filtration],
    family: &BoundaryFamily,
    tol: &S,
) -> Result<IndependenceReport<S>> {
    if filtrations.len() < 2 {
        return Err(Error::Argument("need at least two filtrations to compare".into()));
    }
    let target = Volume::single(t.clone());
    let mut rows = Vec::with_capacity(family.len());
    let mut max_distance = S::zero();
    for b in family.members() {
        let kernels: Vec<ConditionalKernel<S>> = filtrations
            .iter()
            .map(|f| {
                let z = b.at(&f.last().difference(&target))?;
                crate::conditionals::finite_conditional(m, &target, &z)
            })
            .collect::<Result<_>>()?;
        let distances: Vec<S> = kernels.iter().map(|k| k.sup_distance(&kernels[0])).collect();
        for d in &distances {
            max_distance = S::max_of(max_distance, d.clone());
        }
        rows.push(IndependenceRow {
            label: b.label().to_string(),
            distances,
        });
    }
    Ok(IndependenceReport {
        site: t.clone(),
        filtrations: filtrations.iter().map(|f| f.describe()).collect(),
        rows,
        agree: max_distance <= *tol,
        max_distance,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum QuasilocalVerdict {
    QuasilocalEvidence,
    ViolationWitness,
    Inconclusive,
}

impl QuasilocalVerdict {
    pub fn as_str(&self) -> &'static str {
        match self {
            QuasilocalVerdict::QuasilocalEvidence => "quasilocal-evidence",
            QuasilocalVerdict::ViolationWitness => "violation-witness",
            QuasilocalVerdict::Inconclusive => "inconclusive",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModulusStage<V> {
    pub n: usize,
    pub volume_size: usize,
    /// Generator pairs that agree on the stage.
    pub pairs: usize,
    /// `None` when no two generators agree on the stage.
    pub modulus: Option<V>,
    /// Labels of a pair attaining the modulus.
    pub attained_by: Option<(String, String)>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModulusReport<V> {
    pub site: Site,
    pub quantity: String,
    pub family: String,
    pub family_size: usize,
    pub stages: Vec<ModulusStage<V>>,
    pub verdict: QuasilocalVerdict,
}

/// Per stage `Λ_n` (all but the deepest): the sup, over generator pairs that
/// agree on `Λ_n \ t`, of `distance` between their deepest-stage objects.
///
/// Evidence iff the last three moduli are non-increasing and the final one is
/// at most `tol`; witness iff the last three are all at least `10 * tol`.
fn modulus_report<T, V: PartialOrd + Clone>(
    t: &Site,
    quantity: &str,
    filtration: &Filtration,
    family: &BoundaryFamily,
    deep: &[T],
    distance: impl Fn(&T, &T) -> V,
    tol: &V,
    ten_tol: &V,
) -> Result<ModulusReport<V>> {
    let target = Volume::single(t.clone());
    let stages = filtration.stages();
    let mut out = Vec::with_capacity(stages.len().saturating_sub(1));
    for (k, stage) in stages[..stages.len() - 1].iter().enumerate() {
        let shell = stage.difference(&target);
        let restricted: Vec<Configuration> = family.members().iter().map(|b| b.at(&shell)).collect::<Result<_>>()?;
        let mut pairs = 0;
        let mut best: Option<(V, usize, usize)> = None;
        for a in 0..deep.len() {
            for b in a + 1..deep.len() {
                if restricted[a] == restricted[b] {
                    pairs += 1;
                    let d = distance(&deep[a], &deep[b]);
                    if best.as_ref().is_none_or(|(w, _, _)| d > *w) {
                        best = Some((d, a, b));
                    }
                }
            }
        }
        let labels = |a: usize, b: usize| (family.members()[a].label().to_string(), family.members()[b].label().to_string());
        out.push(ModulusStage {
            n: k + 1,
            volume_size: stage.len(),
            pairs,
            attained_by: best.as_ref().map(|(_, a, b)| labels(*a, *b)),
            modulus: best.map(|(d, _, _)| d),
        });
    }
    let tail: Option<Vec<V>> = (out.len() >= VERDICT_WINDOW)
        .then(|| out[out.len() - VERDICT_WINDOW..].iter().map(|s| s.modulus.clone()).collect::<Option<Vec<V>>>())
        .flatten();
    let verdict = match tail {
        Some(tail) if settles(&tail, tol) => {
            QuasilocalVerdict::QuasilocalEvidence
        }
        Some(tail) if tail.iter().all(|v| v >= ten_tol) => QuasilocalVerdict::ViolationWitness,
        _ => QuasilocalVerdict::Inconclusive,
    };
    Ok(ModulusReport {
        site: t.clone(),
        quantity: quantity.to_string(),
        family: family.description().to_string(),
        family_size: family.len(),
        stages: out,
        verdict,
    })
}

/// Quasilocality of one-point kernels: table sup-distance between generator
/// pairs agreeing on each stage, evaluated at the deepest stage.
pub fn quasilocality_report<S: Scalar, Q: OnePointSpec<S> + ?Sized>(
    q: &Q,
    t: &Site,
    filtration: &Filtration,
    family: &BoundaryFamily,
    tol: &S,
) -> Result<ModulusReport<S>> {
    let deep_volume = filtration.last().difference(&Volume::single(t.clone()));
    let kernels: Vec<ConditionalKernel<S>> = family
        .members()
        .iter()
        .map(|b| q.kernel(t, &b.at(&deep_volume)?))
        .collect::<Result<_>>()?;
    modulus_report(t, "kernel", filtration, family, &kernels, |a, b| a.sup_distance(b), tol, &ten_times(tol))
}

/// The same protocol on one-point transition energies (log-ratio distance).
pub fn energy_criterion_report<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    t: &Site,
    filtration: &Filtration,
    family: &BoundaryFamily,
    tol: f64,
) -> Result<ModulusReport<f64>> {
    let target = Volume::single(t.clone());
    let deep_volume = filtration.last().difference(&target);
    let energies: Vec<TransitionEnergy<S>> = family
        .members()
        .iter()
        .map(|b| transition_energy(&crate::conditionals::finite_conditional(m, &target, &b.at(&deep_volume)?)?))
        .collect::<Result<_>>()?;
    modulus_report(t, "energy", filtration, family, &energies, energy_distance, &tol, &(10.0 * tol))
}

/// How [`non_gibbs_witness`] builds its candidate generators.
#[derive(Clone, Debug)]
pub enum WitnessStrategy {
    /// Binary boundaries whose density alternates between two values from
    /// one stage to the next.
    OscillatingDensity,
    /// Boundaries constant on every shell `Λ_n \ Λ_{n-1}`, all symbol
    /// patterns (sampled with the seed beyond 4096 patterns).
    ExhaustiveSmall { seed: u64 },
    UserFamily(BoundaryFamily),
}

impl WitnessStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            WitnessStrategy::OscillatingDensity => "oscillating-density",
            WitnessStrategy::ExhaustiveSmall { .. } => "exhaustive-small",
            WitnessStrategy::UserFamily(_) => "user-family",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WitnessSearch<S> {
    pub strategy: String,
    pub generators_tried: usize,
    pub estimates: Vec<LimitEstimate<S>>,
    /// `None` means none found, which is not evidence of Gibbsianness.
    pub witness: Option<Witness<S>>,
}

/// Density pairs tried by the oscillating strategy, in order.
pub const OSCILLATION_PAIRS: [((u32, u32), (u32, u32)); 4] = [((1, 4), (3, 4)), ((3, 4), (1, 4)), ((1, 3), (2, 3)), ((0, 1), (1, 1))];

/// Boundaries on `window \ t` whose density alternates `a, b, a, ...` by
/// stage; schedules that the stage sizes cannot realize are skipped.
pub fn oscillating_family(window: &Volume, t: &Site, filtration: &Filtration, alphabet: &Alphabet) -> BoundaryFamily {
    let domain = window.without(t);
    let (zero, one) = (Symbol(0), Symbol((alphabet.size() - 1) as u8));
    let mut members = Vec::new();
    for (a, b) in OSCILLATION_PAIRS {
        let schedule: Vec<(u32, u32)> = (0..filtration.len()).map(|k| if k % 2 == 0 { a } else { b }).collect();
        let label = format!("oscillating {}/{}-{}/{}", a.0, a.1, b.0, b.1);
        if let Ok(g) = Boundary::density_schedule(label, domain.clone(), filtration, &schedule, zero, one) {
            members.push(g);
        }
    }
    BoundaryFamily::new(
        format!("oscillating densities, {} generators", members.len()),
        members,
    )
}

/// Boundaries constant on each shell of the filtration (and on the rest of
/// the window, which follows the last shell).
pub fn shell_constant_family(
    window: &Volume,
    t: &Site,
    filtration: &Filtration,
    alphabet: &Alphabet,
    seed: u64,
) -> BoundaryFamily {
    const LIMIT: usize = 4096;
    let domain = window.without(t);
    let q = alphabet.size();
    let shells = filtration.len();
    let total = (q as u128).checked_pow(shells as u32).unwrap_or(u128::MAX);
    let patterns: Vec<Vec<usize>> = if total <= LIMIT as u128 {
        (0..total as usize)
            .map(|mut i| {
                let mut p = alloc::vec![0; shells];
                for k in (0..shells).rev() {
                    p[k] = i % q;
                    i /= q;
                }
                p
            })
            .collect()
    } else {
        use rand::Rng;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..LIMIT).map(|_| (0..shells).map(|_| rng.gen_range(0..q)).collect()).collect()
    };
    let stage_of = |s: &Site| filtration.stages().iter().position(|v| v.contains(s)).unwrap_or(shells - 1);
    let members = patterns
        .iter()
        .map(|p| {
            let label = format!(
                "shells {}",
                p.iter().map(|&i| alphabet.name(Symbol(i as u8))).collect::<Vec<_>>().join(",")
            );
            Boundary::from_fn(label, domain.clone(), |s| Symbol(p[stage_of(s)] as u8))
        })
        .collect::<Vec<_>>();
    BoundaryFamily::new(
        format!(
            "shell-constant, {} of {} patterns{}",
            members.len(),
            total,
            if total > LIMIT as u128 { " sampled" } else { "" }
        ),
        members,
    )
}

/// Searches a strategy's generators for one whose finite conditionals at
/// `t` fail the Cauchy criterion at resolution `10 * tol` over the last
/// three stages.
pub fn non_gibbs_witness<S: Scalar, M: RandomField<S> + ?Sized>(
    m: &M,
    t: &Site,
    filtration: &Filtration,
    strategy: &WitnessStrategy,
    tol: &S,
) -> Result<WitnessSearch<S>> {
    let family = match strategy {
        WitnessStrategy::OscillatingDensity => oscillating_family(m.window(), t, filtration, m.alphabet()),
        WitnessStrategy::ExhaustiveSmall { seed } => shell_constant_family(m.window(), t, filtration, m.alphabet(), *seed),
        WitnessStrategy::UserFamily(f) => f.clone(),
    };
    let estimates = family
        .members()
        .iter()
        .map(|b| generator_estimate(m, t, filtration, b, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(WitnessSearch {
        strategy: strategy.name().to_string(),
        generators_tried: estimates.len(),
        witness: strongest_witness(&estimates, tol),
        estimates,
    })
}

/// Constant boundaries for every symbol plus `random` seeded uniform ones.
pub fn standard_family(window: &Volume, t: &Site, alphabet: &Alphabet, random: usize, seed: u64) -> BoundaryFamily {
    let domain = window.without(t);
    let mut members: Vec<Boundary> = alphabet
        .symbols()
        .map(|s| Boundary::constant(format!("constant {}", alphabet.name(s)), domain.clone(), s))
        .collect();
    for k in 0..random {
        members.push(Boundary::random(
            format!("random #{k} (seed {})", seed.wrapping_add(k as u64)),
            domain.clone(),
            alphabet,
            seed.wrapping_add(k as u64),
        ));
    }
    BoundaryFamily::new(
        format!("{} constant + {random} random (seed {seed})", alphabet.size()),
        members,
    )
}

/// Generators for the Bernoulli mixture: the oscillating densities plus, for
/// every stage but the last, a pair that agrees (density 1/2) inside the
/// stage and has density 1/4 resp. 3/4 outside it.
pub fn mixture_adversarial_family(window: &Volume, t: &Site, filtration: &Filtration) -> Result<BoundaryFamily> {
    let alphabet = Alphabet::binary();
    let domain = window.without(t);
    let mut members = oscillating_family(window, t, filtration, &alphabet).members().to_vec();
    let periodic = |s: &Site, num: usize, den: usize| {
        // Site position along the domain gives an evenly spread pattern.
        let i = domain.index_of(s).unwrap_or(0);
        ((i + 1) * num / den > i * num / den) as u8
    };
    let stages = filtration.stages();
    for (k, stage) in stages[..stages.len() - 1].iter().enumerate() {
        for (num, name) in [(1usize, "1/4"), (3, "3/4")] {
            let label = format!("agree on stage {} then {name}", k + 1);
            members.push(Boundary::from_fn(label, domain.clone(), |s| {
                if stage.contains(s) {
                    Symbol(periodic(s, 1, 2))
                } else {
                    Symbol(periodic(s, num, 4))
                }
            }));
        }
    }
    Ok(BoundaryFamily::new(
        format!(
            "mixture adversarial: oscillating densities + {} agree-then-split pairs",
            stages.len() - 1
        ),
        members,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fields::ProductField;
    use crate::lattice::box_filtration;
    use crate::models::{example2_model, IsingDemo, Tau};
    use crate::scalar::Rational;
    use crate::specifications::FieldOnePoint;

    fn r(n: i64, d: i64) -> Rational {
        Rational::from_ratio(n, d)
    }

    #[test]
    fn product_field_gives_uniform_evidence() {
        let w = Volume::interval(-6, 6);
        let m = ProductField::new(w.clone(), Alphabet::binary(), alloc::vec![r(1, 3), r(2, 3)]).unwrap();
        let t = Site::from(0);
        let f = box_filtration(&t, &[1, 2, 3, 4, 6], &w).unwrap();
        let fam = standard_family(&w, &t, m.alphabet(), 3, 1);
        let rep = uniform_convergence_report(&m, &t, &f, &fam, &r(0, 1)).unwrap();
        assert_eq!(rep.verdict, Verdict::UniformEvidence);
        assert!(rep.stages[0].sup_gap.is_none());
        assert!(rep.stages[1..].iter().all(|s| s.sup_gap == Some(r(0, 1))));
        let search = non_gibbs_witness(&m, &t, &f, &WitnessStrategy::OscillatingDensity, &r(0, 1)).unwrap();
        assert!(search.witness.is_none());
    }

    #[test]
    fn mixture_oscillation_is_a_witness() {
        let w = Volume::interval(-242, 242);
        let t = Site::from(0);
        let m = example2_model(Tau::Integer(1), w.clone()).unwrap();
        let f = box_filtration(&t, &[2, 8, 26, 80, 242], &w).unwrap();
        let search = non_gibbs_witness::<Rational, _>(&m, &t, &f, &WitnessStrategy::OscillatingDensity, &r(1, 1_000_000)).unwrap();
        let wit = search.witness.expect("witness");
        assert!(wit.persistent_gap >= r(2, 5), "{:?}", wit);
        let fam = mixture_adversarial_family(&w, &t, &f).unwrap();
        let rep = uniform_convergence_report::<Rational, _>(&m, &t, &f, &fam, &r(1, 1_000_000)).unwrap();
        assert_eq!(rep.verdict, Verdict::DivergenceWitness);
        let ql = quasilocality_report::<Rational, _>(&FieldOnePoint(&m), &t, &f, &fam, &r(1, 1_000_000)).unwrap();
        assert_eq!(ql.verdict, QuasilocalVerdict::ViolationWitness);
        assert!(ql.stages[0].modulus.clone().unwrap() >= r(2, 5));
    }

    #[test]
    fn ising_is_uniform_and_filtration_independent() {
        let m = IsingDemo::new(0.4, 0.0, 1, 11).unwrap();
        let w = m.window().clone();
        let t = Site::from(6);
        let f = box_filtration(&t, &[1, 2, 3, 4, 5], &w).unwrap();
        let fam = standard_family(&w, &t, m.alphabet(), 4, 7);
        let rep = uniform_convergence_report(&m, &t, &f, &fam, &1e-12).unwrap();
        assert_eq!(rep.verdict, Verdict::UniformEvidence);
        let g = crate::lattice::lopsided_filtration(&t, &[1, 2, 3], 2, 1, &w).unwrap();
        let h = crate::lattice::lopsided_filtration(&t, &[1, 2, 4], 1, 1, &w).unwrap();
        let ind = filtration_independence_check(&m, &t, &[f.clone(), g, h], &fam, &1e-12).unwrap();
        assert!(ind.agree, "{:?}", ind.max_distance);
        let en = energy_criterion_report(&m, &t, &f, &standard_family(&w, &t, m.alphabet(), 0, 0), 1e-9).unwrap();
        assert!(en.stages.iter().all(|s| s.modulus.is_none() || s.modulus.unwrap() < 1e-9));
    }
}
