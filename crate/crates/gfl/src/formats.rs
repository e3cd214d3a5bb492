//! Text formats: distribution tables, potential files, energy and
//! Hamiltonian tables.
//!
//! A distribution table is
//!
//! ```text
//! volume (0);(1)
//! alphabet 0 1
//! (0)=0;(1)=0	1/4
//! (0)=0;(1)=1	1/4
//! ...
//! ```
//!
//! Blank lines and lines starting with `#` are ignored. Values are `n/d`,
//! integers or decimals; decimals are read exactly in rational mode.

use std::collections::BTreeMap;

use gfl_core::energy::{HamiltonianTable, TransitionEnergy};
use gfl_core::scalar::parse_rational;
use gfl_core::specifications::{Outcome, PotentialTerm, ValidationReport, Violation};
use gfl_core::{Alphabet, Configuration, Error, FiniteDistribution, Potential, Rational, Result, Scalar, Site, Volume};

/// A parsed but unchecked distribution table.
#[derive(Clone, Debug)]
pub struct RawTable {
    pub volume: Volume,
    pub alphabet: Alphabet,
    /// `(line number, configuration, value text)` in file order.
    pub entries: Vec<(usize, Configuration, String)>,
}

fn content_lines(text: &str) -> impl Iterator<Item = (usize, &str)> {
    text.lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty() && !l.starts_with('#'))
}

fn parse_error(line: usize, msg: impl std::fmt::Display) -> Error {
    Error::Parse(format!("line {line}: {msg}"))
}

pub fn parse_table(text: &str) -> Result<RawTable> {
    let mut volume = None;
    let mut alphabet = None;
    let mut entries = Vec::new();
    for (no, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("volume ") {
            volume = Some(Volume::parse(rest)?);
            continue;
        }
        if let Some(rest) = line.strip_prefix("alphabet ") {
            let names: Vec<&str> = rest.split_whitespace().collect();
            alphabet = Some(Alphabet::from_names(&names)?);
            continue;
        }
        let alphabet = alphabet.as_ref().ok_or_else(|| parse_error(no, "entry before the `alphabet` header"))?;
        let (config, value) = line
            .rsplit_once(char::is_whitespace)
            .ok_or_else(|| parse_error(no, "expected `configuration<TAB>value`"))?;
        let config = Configuration::parse(config.trim(), alphabet).map_err(|e| parse_error(no, e))?;
        entries.push((no, config, value.trim().to_string()));
    }
    Ok(RawTable {
        volume: volume.ok_or_else(|| Error::Parse("missing `volume` header".into()))?,
        alphabet: alphabet.ok_or_else(|| Error::Parse("missing `alphabet` header".into()))?,
        entries,
    })
}

/// Parses a table value in the given numeric mode.
pub fn parse_value<S: ModeScalar>(text: &str) -> Option<S> {
    let exact = parse_rational(text)?;
    if S::EXACT || text.contains('/') {
        Some(S::from_rational(&exact))
    } else {
        text.trim().parse::<f64>().ok().map(S::from_f64)
    }
}

/// Conversions the CLI needs beyond [`Scalar`].
pub trait ModeScalar: Scalar {
    fn from_rational(r: &Rational) -> Self;
    fn from_f64(v: f64) -> Self;
}

impl ModeScalar for Rational {
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn from_f64(v: f64) -> Self {
        Rational::from_float(v).unwrap_or_else(Rational::zero)
    }
}

impl ModeScalar for f64 {
    fn from_rational(r: &Rational) -> Self {
        r.to_f64()
    }
    fn from_f64(v: f64) -> Self {
        v
    }
}

impl RawTable {
    /// Well-formedness as a validation report: every configuration of the
    /// volume listed once, values readable and non-negative, total mass one.
    pub fn check<S: ModeScalar>(&self) -> ValidationReport {
        let mut report = ValidationReport::new("table");
        let q = self.alphabet.size();
        let expected = match gfl_core::lattice::configuration_count(&self.volume, &self.alphabet) {
            Ok(n) => n,
            Err(e) => {
                report.record(violation("header", e.to_string(), f64::INFINITY));
                return report;
            }
        };
        report.population = expected as u128;
        let mut seen: BTreeMap<usize, usize> = BTreeMap::new();
        let mut total = S::zero();
        for (no, config, value) in &self.entries {
            let label = format!("line {no}: {}", config.display(&self.alphabet));
            if config.volume() != &self.volume {
                report.record(violation(&label, format!("configuration is not on {}", self.volume), f64::INFINITY));
                continue;
            }
            let index = config.index(q);
            if let Some(first) = seen.insert(index, *no) {
                report.record(violation(&label, format!("duplicate of line {first}"), f64::INFINITY));
                continue;
            }
            match parse_value::<S>(value) {
                None => report.record(violation(&label, format!("unreadable value `{value}`"), f64::INFINITY)),
                Some(v) if v < S::zero() => {
                    report.record(violation(&label, format!("negative probability {}", v.render()), v.to_f64().abs()));
                }
                Some(v) => {
                    total = total.add_ref(&v);
                    report.record(Outcome { residual: 0.0, violation: None });
                }
            }
        }
        if seen.len() < expected {
            let missing = (0..expected).find(|i| !seen.contains_key(i)).unwrap_or(0);
            let example = Configuration::from_index(&self.volume, q, missing).display(&self.alphabet);
            report.record(violation(
                "key set",
                format!("{} of {expected} configurations missing, e.g. {example}", expected - seen.len()),
                f64::INFINITY,
            ));
        }
        let tol = if S::EXACT { 0.0 } else { gfl_core::DEFAULT_TOL };
        if !total.approx_eq(&S::one(), tol) {
            report.record(violation("normalization", format!("probabilities sum to {}", total.render()), S::residual(&total, &S::one())));
        }
        report
    }

    /// The distribution, provided [`RawTable::check`] passes.
    pub fn distribution<S: ModeScalar>(&self) -> Result<FiniteDistribution<S>> {
        let report = self.check::<S>();
        if let Some(v) = report.violations.first() {
            return Err(Error::Validation(format!("{}: {}", v.fixture, v.detail)));
        }
        let q = self.alphabet.size();
        let mut probs = vec![S::zero(); self.entries.len()];
        for (_, config, value) in &self.entries {
            probs[config.index(q)] = parse_value::<S>(value).expect("checked");
        }
        FiniteDistribution::new(self.volume.clone(), self.alphabet.clone(), probs)
    }
}

fn violation(fixture: &str, detail: String, residual: f64) -> Outcome {
    Outcome {
        residual,
        violation: Some(Violation {
            fixture: fixture.to_string(),
            detail,
            residual,
        }),
    }
}

fn alphabet_line(a: &Alphabet) -> String {
    format!("alphabet {}", a.names().join(" "))
}

pub fn render_table<S: Scalar>(d: &FiniteDistribution<S>) -> String {
    let mut out = format!("volume {}\n{}\n", d.volume(), alphabet_line(d.alphabet()));
    for (c, p) in d.iter() {
        out.push_str(&format!("{}\t{}\n", c.display(d.alphabet()), p.render()));
    }
    out
}

/// Energies as `x<TAB>u<TAB>value`: `exp Δ(x,u)` as an exact ratio in
/// rational mode, `Δ(x,u)` in float mode.
pub fn render_energy<S: Scalar>(e: &TransitionEnergy<S>) -> String {
    let a = e.alphabet();
    let q = a.size();
    let column = if S::EXACT { "exp_delta" } else { "delta" };
    let mut out = format!(
        "# transition energy, columns x u {column}\nvolume {}\n{}\ncondition {}\n",
        e.volume(),
        alphabet_line(a),
        e.condition().display(a)
    );
    for x in 0..e.len() {
        for u in 0..e.len() {
            let value = if S::EXACT {
                e.ratio(x, u).render()
            } else {
                gfl_core::scalar::render_f64(e.log_value(x, u))
            };
            out.push_str(&format!(
                "{}\t{}\t{value}\n",
                Configuration::from_index(e.volume(), q, x).display(a),
                Configuration::from_index(e.volume(), q, u).display(a)
            ));
        }
    }
    out
}

/// Hamiltonians as `x<TAB>value`: `exp(-H(x))` exactly in rational mode,
/// `H(x)` (or `inf`) in float mode.
pub fn render_hamiltonian<S: Scalar>(h: &HamiltonianTable<S>, gauge: &Configuration) -> String {
    let a = h.alphabet();
    let q = a.size();
    let column = if S::EXACT { "exp_minus_h" } else { "h" };
    let mut out = format!(
        "# hamiltonian, columns x {column}\nvolume {}\n{}\ncondition {}\ngauge {}\n",
        h.volume(),
        alphabet_line(a),
        h.condition().display(a),
        gauge.display(a)
    );
    for x in 0..h.len() {
        let value = if S::EXACT { h.boltzmann(x).render() } else { h.value(x).to_string() };
        out.push_str(&format!("{}\t{value}\n", Configuration::from_index(h.volume(), q, x).display(a)));
    }
    out
}

/// Sites of `(0),(1)` in the order written.
fn parse_site_list(s: &str) -> Result<Vec<Site>> {
    let mut sites = Vec::new();
    let mut rest = s.trim();
    while !rest.is_empty() {
        let start = rest.find('(').ok_or_else(|| Error::Parse(format!("expected `(` in `{s}`")))?;
        let end = rest[start..].find(')').ok_or_else(|| Error::Parse(format!("unbalanced `{s}`")))? + start;
        sites.push(Site::parse(&rest[start..=end])?);
        rest = rest[end + 1..].trim_start_matches([',', ' ', ';']);
    }
    Ok(sites)
}

/// Potential file: optional `alphabet` header (default `-1 +1`), then lines
/// `offsets | configuration | value`, e.g. `(0),(1) | +1,+1 | -0.5`.
pub fn parse_potential(text: &str) -> Result<Potential> {
    let mut alphabet = Alphabet::spins();
    let mut terms = Vec::new();
    let mut dim = None;
    for (no, line) in content_lines(text) {
        if let Some(rest) = line.strip_prefix("alphabet ") {
            let names: Vec<&str> = rest.split_whitespace().collect();
            alphabet = Alphabet::from_names(&names)?;
            continue;
        }
        let parts: Vec<&str> = line.split('|').map(str::trim).collect();
        let [offsets, config, value] = parts[..] else {
            return Err(parse_error(no, "expected `offsets | configuration | value`"));
        };
        let offsets = parse_site_list(offsets).map_err(|e| parse_error(no, e))?;
        let config = config
            .split(',')
            .map(|name| alphabet.symbol(name.trim()).ok_or_else(|| parse_error(no, format!("unknown symbol `{}`", name.trim()))))
            .collect::<Result<Vec<_>>>()?;
        let value: f64 = value.parse().map_err(|_| parse_error(no, format!("bad value `{value}`")))?;
        let d = offsets.first().map(|s| s.dim()).unwrap_or(1);
        if *dim.get_or_insert(d) != d {
            return Err(parse_error(no, "offsets of different dimensions"));
        }
        terms.push(PotentialTerm { offsets, config, value });
    }
    Potential::new(dim.unwrap_or(1), alphabet, terms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_round_trips_exactly() {
        let text = "# two sites\nvolume (0);(1)\nalphabet 0 1\n(0)=0;(1)=0\t1/8\n(0)=0;(1)=1\t3/8\n(0)=1;(1)=0\t0.25\n(0)=1;(1)=1\t1/4\n";
        let raw = parse_table(text).unwrap();
        assert!(raw.check::<Rational>().passed());
        let d = raw.distribution::<Rational>().unwrap();
        let again = parse_table(&render_table(&d)).unwrap().distribution::<Rational>().unwrap();
        assert_eq!(d, again);
        assert_eq!(render_table(&d).lines().nth(4), Some("(0)=1;(1)=0\t1/4"));
    }

    #[test]
    fn malformed_tables_report_each_problem() {
        let text = "volume (0);(1)\nalphabet 0 1\n(0)=0;(1)=0\t1/2\n(0)=0;(1)=0\t1/8\n(0)=1;(1)=0\t-1/8\n";
        let report = parse_table(text).unwrap().check::<Rational>();
        let details: Vec<&str> = report.violations.iter().map(|v| v.detail.as_str()).collect();
        assert_eq!(report.violation_count, 4, "{details:?}");
        assert!(details[0].starts_with("duplicate"));
        assert!(details[1].starts_with("negative"));
        assert!(details[2].contains("2 of 4 configurations missing"));
        assert!(details[3].contains("sum to 1/2"));
    }

    #[test]
    fn potential_file_matches_builtin_ising() {
        let text = "alphabet -1 +1\n(0),(1) | -1,-1 | -0.5\n(0),(1) | -1,+1 | 0.5\n(0),(1) | +1,-1 | 0.5\n(0),(1) | +1,+1 | -0.5\n";
        let phi = parse_potential(text).unwrap();
        assert_eq!(phi, Potential::ising(0.5, 0.0, 1));
        assert!(parse_potential("(0) | +1 | x").is_err());
    }
}
