//! Site, filtration, boundary-family and tolerance specs resolved against a
//! model's window.

use gfl_core::conditionals::{Boundary, BoundaryFamily};
use gfl_core::diagnostics::{mixture_adversarial_family, oscillating_family, shell_constant_family, standard_family};
use gfl_core::lattice::lopsided_filtration;
use gfl_core::{Alphabet, Error, Filtration, Result, Site, Volume};

use crate::formats::{parse_value, ModeScalar};

fn bounds(window: &Volume) -> Result<(Vec<i32>, Vec<i32>)> {
    let first = window.sites().first().ok_or_else(|| Error::Argument("empty window".into()))?;
    let d = first.dim();
    let mut lo = first.coords().to_vec();
    let mut hi = lo.clone();
    for s in window.iter() {
        for k in 0..d {
            lo[k] = lo[k].min(s.coords()[k]);
            hi[k] = hi[k].max(s.coords()[k]);
        }
    }
    Ok((lo, hi))
}

/// `center` is the window's middle site (rounded down); otherwise a site literal.
pub fn parse_site(spec: &str, window: &Volume) -> Result<Site> {
    let site = if spec == "center" {
        let (lo, hi) = bounds(window)?;
        Site::new(lo.iter().zip(&hi).map(|(a, b)| a + (b - a) / 2).collect::<Vec<_>>())
    } else {
        Site::parse(spec)?
    };
    if !window.contains(&site) {
        return Err(Error::Argument(format!("site {site} is outside the window")));
    }
    Ok(site)
}

/// L-infinity radius at which the box around `t` covers the window.
fn covering_radius(t: &Site, window: &Volume) -> u32 {
    window.iter().map(|s| s.linf_dist(t)).max().unwrap_or(0)
}

/// `3^k - 1` while below the covering radius, then the covering radius;
/// radii `1, 2, ...` when that leaves fewer than four stages.
pub fn auto_radii(t: &Site, window: &Volume) -> Vec<u32> {
    let cover = covering_radius(t, window).max(1);
    let mut radii: Vec<u32> = (1..).map(|k| 3u32.pow(k) - 1).take_while(|&r| r < cover).collect();
    radii.push(cover);
    if radii.len() < 4 {
        radii = (1..=cover).collect();
    }
    radii
}

/// Box-shaped filtration specs, keeping the radii for the lopsided variants.
#[derive(Clone, Debug, PartialEq)]
pub struct FiltrationSpec {
    pub left: u32,
    pub right: u32,
    pub radii: Vec<u32>,
}

impl FiltrationSpec {
    pub fn parse(spec: &str, t: &Site, window: &Volume) -> Result<Self> {
        let radii_of = |list: &str| -> Result<Vec<u32>> {
            list.split(',')
                .map(|r| r.trim().parse().map_err(|_| Error::Parse(format!("bad radius `{r}`"))))
                .collect()
        };
        if spec == "auto" {
            return Ok(FiltrationSpec { left: 1, right: 1, radii: auto_radii(t, window) });
        }
        if let Some(list) = spec.strip_prefix("box:") {
            return Ok(FiltrationSpec { left: 1, right: 1, radii: radii_of(list)? });
        }
        if let Some(rest) = spec.strip_prefix("lopsided:") {
            let (lr, list) = rest.split_once(':').ok_or_else(|| Error::Parse("lopsided:L/R:radii".into()))?;
            let (l, r) = lr.split_once('/').ok_or_else(|| Error::Parse("lopsided:L/R:radii".into()))?;
            let num = |v: &str| v.trim().parse::<u32>().map_err(|_| Error::Parse(format!("bad factor `{v}`")));
            return Ok(FiltrationSpec { left: num(l)?, right: num(r)?, radii: radii_of(list)? });
        }
        Err(Error::Parse(format!("unknown filtration `{spec}`")))
    }

    /// Stages that the window caps to the same volume are merged.
    pub fn build(&self, t: &Site, window: &Volume) -> Result<Filtration> {
        let mut stages: Vec<Volume> = Vec::new();
        for &r in &self.radii {
            let v = lopsided_filtration(t, &[r], self.left, self.right, window)?.last().clone();
            if stages.last() != Some(&v) {
                stages.push(v);
            }
        }
        Filtration::new(stages)
    }

    pub fn describe(&self) -> String {
        let radii: Vec<String> = self.radii.iter().map(|r| r.to_string()).collect();
        if self.left == 1 && self.right == 1 {
            format!("box:{}", radii.join(","))
        } else {
            format!("lopsided:{}/{}:{}", self.left, self.right, radii.join(","))
        }
    }

    /// This filtration plus lopsided boxes (2/1 and 1/2) over all radii but
    /// the last, so the deepest stages differ from the window; variants that
    /// build to the same stages are dropped.
    pub fn independence_variants(&self, t: &Site, window: &Volume) -> Result<Vec<(FiltrationSpec, Filtration)>> {
        let radii = if self.radii.len() > 1 { self.radii[..self.radii.len() - 1].to_vec() } else { self.radii.clone() };
        let mut out = vec![(self.clone(), self.build(t, window)?)];
        for (left, right) in [(2, 1), (1, 2)] {
            let spec = FiltrationSpec { left, right, radii: radii.clone() };
            let f = spec.build(t, window)?;
            if out.iter().all(|(_, g)| g != &f) {
                out.push((spec, f));
            }
        }
        Ok(out)
    }
}

pub struct FamilyOptions {
    pub random: usize,
    pub seed: u64,
}

/// Generators named by `spec` (tokens joined by `+`), in token order.
pub fn build_family(
    spec: &str,
    window: &Volume,
    t: &Site,
    filtration: &Filtration,
    alphabet: &Alphabet,
    opts: &FamilyOptions,
) -> Result<BoundaryFamily> {
    let domain = window.without(t);
    let mut members: Vec<Boundary> = Vec::new();
    let mut parts: Vec<String> = Vec::new();
    for token in spec.split('+').map(str::trim) {
        let fam = match token {
            "constants" => standard_family(window, t, alphabet, 0, opts.seed),
            "random" => {
                let all = standard_family(window, t, alphabet, opts.random, opts.seed);
                let randoms = all.members()[alphabet.size()..].to_vec();
                BoundaryFamily::new(format!("{} random (seed {})", opts.random, opts.seed), randoms)
            }
            "standard" => standard_family(window, t, alphabet, opts.random, opts.seed),
            "oscillating" => oscillating_family(window, t, filtration, alphabet),
            "shells" => shell_constant_family(window, t, filtration, alphabet, opts.seed),
            "adversarial" => {
                if alphabet.size() != 2 {
                    return Err(Error::Argument("the adversarial family needs a binary alphabet".into()));
                }
                mixture_adversarial_family(window, t, filtration)?
            }
            other => return Err(Error::Parse(format!("unknown boundary family `{other}`"))),
        };
        parts.push(fam.description().to_string());
        members.extend(fam.members().iter().cloned());
    }
    debug_assert!(members.iter().all(|b| b.config().volume() == &domain));
    Ok(BoundaryFamily::new(parts.join(" + "), members))
}

pub fn parse_tol<S: ModeScalar>(text: &str) -> Result<S> {
    parse_value::<S>(text)
        .filter(|v| *v >= S::zero())
        .ok_or_else(|| Error::Argument(format!("tolerance `{text}` is not a non-negative number")))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn auto_filtrations() {
        let w = Volume::interval(1, 485);
        let t = parse_site("center", &w).unwrap();
        assert_eq!(t, Site::from(243));
        assert_eq!(auto_radii(&t, &w), vec![2, 8, 26, 80, 242]);
        let w = Volume::interval(1, 11);
        let t = parse_site("center", &w).unwrap();
        assert_eq!(auto_radii(&t, &w), vec![1, 2, 3, 4, 5]);
        let spec = FiltrationSpec::parse("auto", &t, &w).unwrap();
        let variants = spec.independence_variants(&t, &w).unwrap();
        assert_eq!(variants.len(), 3);
        let f = &variants[1].1;
        assert_eq!(f.stages()[0], Volume::interval(4, 7));
        assert_eq!(f.last(), &Volume::interval(1, 10));
        assert_eq!(variants[2].1.last(), &Volume::interval(2, 11));
        assert!(parse_site("(12)", &w).is_err());
    }
}
