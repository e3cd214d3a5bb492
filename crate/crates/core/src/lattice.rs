//! Sites, volumes, configurations, filtrations and neighborhood systems.
//!
//! The infinite lattice only ever appears through a finite window volume.
//! Volumes keep their sites sorted lexicographically; configurations store
//! one symbol per site in that order, which fixes a canonical enumeration
//! order (first site most significant).

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::sync::atomic::{AtomicUsize, Ordering};

use crate::error::{Error, Result};

/// Default cap on `|X|^|V|` for any dense enumeration.
pub const DEFAULT_ENUM_CAP: usize = 1 << 24;

static ENUM_CAP: AtomicUsize = AtomicUsize::new(DEFAULT_ENUM_CAP);

/// Current enumeration cap.
pub fn enumeration_cap() -> usize {
    ENUM_CAP.load(Ordering::Relaxed)
}

/// Overrides the enumeration cap process-wide.
pub fn set_enumeration_cap(cap: usize) {
    ENUM_CAP.store(cap.max(1), Ordering::Relaxed);
}

/// A point of `Z^d`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Site(Vec<i32>);

impl Site {
    pub fn new(coords: impl Into<Vec<i32>>) -> Self {
        let coords = coords.into();
        assert!(!coords.is_empty(), "a site needs at least one coordinate");
        Site(coords)
    }

    pub fn coords(&self) -> &[i32] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn offset(&self, by: &[i32]) -> Site {
        Site(self.0.iter().zip(by).map(|(a, b)| a + b).collect())
    }

    pub fn linf_dist(&self, other: &Site) -> u32 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0)
    }

    pub fn l1_dist(&self, other: &Site) -> u32 {
        self.0.iter().zip(&other.0).map(|(a, b)| a.abs_diff(*b)).sum()
    }

    /// Parses `(i)` or `(i,j,...)`.
    pub fn parse(s: &str) -> Result<Site> {
        let s = s.trim();
        let inner = s
            .strip_prefix('(')
            .and_then(|r| r.strip_suffix(')'))
            .ok_or_else(|| Error::Parse(format!("site `{s}` is not parenthesized")))?;
        let coords = inner
            .split(',')
            .map(|c| {
                c.trim()
                    .parse::<i32>()
                    .map_err(|_| Error::Parse(format!("bad coordinate `{c}` in site `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        if coords.is_empty() {
            return Err(Error::Parse(format!("empty site `{s}`")));
        }
        Ok(Site(coords))
    }
}

impl From<i32> for Site {
    fn from(c: i32) -> Self {
        Site(vec![c])
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str(")")
    }
}

/// A finite set of sites in canonical (sorted) order.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Volume {
    sites: Vec<Site>,
}

impl Volume {
    pub fn new(sites: impl IntoIterator<Item = Site>) -> Self {
        let mut sites: Vec<Site> = sites.into_iter().collect();
        sites.sort();
        sites.dedup();
        Volume { sites }
    }

    pub fn empty() -> Self {
        Volume::default()
    }

    pub fn single(site: Site) -> Self {
        Volume { sites: vec![site] }
    }

    /// One-dimensional interval `{lo, ..., hi}`.
    pub fn interval(lo: i32, hi: i32) -> Self {
        Volume {
            sites: (lo..=hi).map(Site::from).collect(),
        }
    }

    /// The box `lo[k] <= x[k] <= hi[k]`.
    pub fn box_range(lo: &[i32], hi: &[i32]) -> Self {
        assert_eq!(lo.len(), hi.len());
        let mut sites = vec![Vec::<i32>::new()];
        for (&a, &b) in lo.iter().zip(hi) {
            let mut next = Vec::new();
            for prefix in &sites {
                for c in a..=b {
                    let mut p = prefix.clone();
                    p.push(c);
                    next.push(p);
                }
            }
            sites = next;
        }
        if lo.is_empty() {
            return Volume::empty();
        }
        Volume::new(sites.into_iter().map(Site))
    }

    /// L-infinity ball of `radius` around `center`.
    pub fn ball(center: &Site, radius: u32) -> Self {
        let r = radius as i32;
        let lo: Vec<i32> = center.coords().iter().map(|c| c - r).collect();
        let hi: Vec<i32> = center.coords().iter().map(|c| c + r).collect();
        Volume::box_range(&lo, &hi)
    }

    pub fn sites(&self) -> &[Site] {
        &self.sites
    }

    pub fn iter(&self) -> core::slice::Iter<'_, Site> {
        self.sites.iter()
    }

    pub fn len(&self) -> usize {
        self.sites.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sites.is_empty()
    }

    pub fn contains(&self, site: &Site) -> bool {
        self.sites.binary_search(site).is_ok()
    }

    pub fn index_of(&self, site: &Site) -> Option<usize> {
        self.sites.binary_search(site).ok()
    }

    pub fn is_subset(&self, other: &Volume) -> bool {
        self.sites.iter().all(|s| other.contains(s))
    }

    pub fn is_disjoint(&self, other: &Volume) -> bool {
        self.sites.iter().all(|s| !other.contains(s))
    }

    pub fn union(&self, other: &Volume) -> Volume {
        Volume::new(self.sites.iter().chain(other.sites.iter()).cloned())
    }

    pub fn difference(&self, other: &Volume) -> Volume {
        Volume {
            sites: self.sites.iter().filter(|s| !other.contains(s)).cloned().collect(),
        }
    }

    pub fn intersection(&self, other: &Volume) -> Volume {
        Volume {
            sites: self.sites.iter().filter(|s| other.contains(s)).cloned().collect(),
        }
    }

    pub fn without(&self, site: &Site) -> Volume {
        self.difference(&Volume::single(site.clone()))
    }

    /// Positions of `sub`'s sites within `self`.
    pub fn positions_of(&self, sub: &Volume) -> Result<Vec<usize>> {
        sub.sites
            .iter()
            .map(|s| {
                self.index_of(s)
                    .ok_or_else(|| Error::Domain(format!("site {s} is not in volume {self}")))
            })
            .collect()
    }

    /// All subsets, ordered by bitmask over the canonical site order.
    pub fn subsets(&self) -> impl Iterator<Item = Volume> + '_ {
        assert!(self.len() < 32, "subset enumeration limited to 31 sites");
        (0u32..(1u32 << self.len())).map(move |mask| self.subset_by_mask(mask as u64))
    }

    pub fn subset_by_mask(&self, mask: u64) -> Volume {
        Volume {
            sites: self
                .sites
                .iter()
                .enumerate()
                .filter(|(i, _)| mask >> i & 1 == 1)
                .map(|(_, s)| s.clone())
                .collect(),
        }
    }

    /// Parses `(0);(1)` or `(0,0),(0,1)`. Both `;` and `),(` separators are accepted.
    pub fn parse(s: &str) -> Result<Volume> {
        let s = s.trim();
        if s.is_empty() || s == "{}" {
            return Ok(Volume::empty());
        }
        let mut sites = Vec::new();
        let mut depth = 0usize;
        let mut start = None;
        for (i, ch) in s.char_indices() {
            match ch {
                '(' => {
                    if depth == 0 {
                        start = Some(i);
                    }
                    depth += 1;
                }
                ')' => {
                    depth = depth.checked_sub(1).ok_or_else(|| Error::Parse(format!("unbalanced `{s}`")))?;
                    if depth == 0 {
                        let from = start.take().unwrap_or(0);
                        sites.push(Site::parse(&s[from..=i])?);
                    }
                }
                ',' | ';' | ' ' if depth == 0 => {}
                _ if depth == 0 => return Err(Error::Parse(format!("unexpected `{ch}` in volume `{s}`"))),
                _ => {}
            }
        }
        if depth != 0 {
            return Err(Error::Parse(format!("unbalanced `{s}`")));
        }
        Ok(Volume::new(sites))
    }
}

impl fmt::Display for Volume {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.sites.is_empty() {
            return f.write_str("{}");
        }
        for (i, s) in self.sites.iter().enumerate() {
            if i > 0 {
                f.write_str(";")?;
            }
            write!(f, "{s}")?;
        }
        Ok(())
    }
}

impl FromIterator<Site> for Volume {
    fn from_iter<T: IntoIterator<Item = Site>>(iter: T) -> Self {
        Volume::new(iter)
    }
}

/// Index of a symbol within its [`Alphabet`].
#[derive(Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Debug)]
pub struct Symbol(pub u8);

impl Symbol {
    pub fn index(self) -> usize {
        self.0 as usize
    }
}

/// Largest supported alphabet.
pub const MAX_ALPHABET: usize = 64;

/// Finite single-site state space, `2 <= |X| <= MAX_ALPHABET`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Alphabet {
    names: Vec<String>,
    values: Vec<i64>,
}

impl Alphabet {
    /// Symbols with explicit numeric values (used by potentials).
    pub fn new(names: Vec<String>, values: Vec<i64>) -> Result<Self> {
        if names.len() < 2 || names.len() > MAX_ALPHABET {
            return Err(Error::Argument(format!(
                "alphabet size {} outside 2..={MAX_ALPHABET}",
                names.len()
            )));
        }
        if names.len() != values.len() {
            return Err(Error::Argument("alphabet names and values differ in length".into()));
        }
        for (i, n) in names.iter().enumerate() {
            if names[..i].contains(n) {
                return Err(Error::Argument(format!("duplicate symbol `{n}`")));
            }
            if n.is_empty() || n.contains(|c: char| matches!(c, ';' | '=' | '(' | ')' | ',' | '\t' | ' ')) {
                return Err(Error::Argument(format!("invalid symbol name `{n}`")));
            }
        }
        Ok(Alphabet { names, values })
    }

    /// Names are parsed as integers when possible, otherwise valued by index.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self> {
        let values = names
            .iter()
            .enumerate()
            .map(|(i, n)| n.as_ref().trim_start_matches('+').parse::<i64>().unwrap_or(i as i64))
            .collect();
        Alphabet::new(names.iter().map(|n| n.as_ref().to_string()).collect(), values)
    }

    /// `{0, 1}`.
    pub fn binary() -> Self {
        Alphabet::new(vec!["0".into(), "1".into()], vec![0, 1]).unwrap()
    }

    /// `{-1, +1}`, in that order.
    pub fn spins() -> Self {
        Alphabet::new(vec!["-1".into(), "+1".into()], vec![-1, 1]).unwrap()
    }

    pub fn size(&self) -> usize {
        self.names.len()
    }

    pub fn symbols(&self) -> impl Iterator<Item = Symbol> {
        (0..self.names.len() as u8).map(Symbol)
    }

    pub fn first(&self) -> Symbol {
        Symbol(0)
    }

    pub fn name(&self, s: Symbol) -> &str {
        &self.names[s.index()]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn value(&self, s: Symbol) -> i64 {
        self.values[s.index()]
    }

    pub fn symbol(&self, name: &str) -> Option<Symbol> {
        let name = name.trim();
        self.names
            .iter()
            .position(|n| n == name)
            .or_else(|| {
                // `1` and `+1` name the same spin.
                let v: i64 = name.trim_start_matches('+').parse().ok()?;
                self.names
                    .iter()
                    .position(|n| n.trim_start_matches('+').parse::<i64>().ok() == Some(v))
            })
            .map(|i| Symbol(i as u8))
    }

    pub fn symbol_with_value(&self, value: i64) -> Option<Symbol> {
        self.values.iter().position(|&v| v == value).map(|i| Symbol(i as u8))
    }
}

/// `|X|^|V|`, or a capacity error when it exceeds the enumeration cap.
pub fn configuration_count(volume: &Volume, alphabet: &Alphabet) -> Result<usize> {
    let cap = enumeration_cap();
    let mut count: u128 = 1;
    for _ in 0..volume.len() {
        count = count.saturating_mul(alphabet.size() as u128);
    }
    if count > cap as u128 {
        return Err(Error::Capacity { required: count, cap });
    }
    Ok(count as usize)
}

/// An assignment of symbols to every site of one volume.
#[derive(Clone, PartialEq, Eq, Hash, Debug, Default)]
pub struct Configuration {
    volume: Volume,
    symbols: Vec<Symbol>,
}

impl Configuration {
    pub fn new(volume: Volume, symbols: Vec<Symbol>) -> Result<Self> {
        if volume.len() != symbols.len() {
            return Err(Error::Argument(format!(
                "{} symbols for a volume of {} sites",
                symbols.len(),
                volume.len()
            )));
        }
        Ok(Configuration { volume, symbols })
    }

    pub fn empty() -> Self {
        Configuration::default()
    }

    pub fn constant(volume: Volume, symbol: Symbol) -> Self {
        let symbols = vec![symbol; volume.len()];
        Configuration { volume, symbols }
    }

    pub fn from_fn(volume: Volume, mut f: impl FnMut(&Site) -> Symbol) -> Self {
        let symbols = volume.iter().map(&mut f).collect();
        Configuration { volume, symbols }
    }

    /// Decodes a mixed-radix index (first site most significant).
    pub fn from_index(volume: &Volume, q: usize, mut index: usize) -> Self {
        let mut symbols = vec![Symbol(0); volume.len()];
        for slot in symbols.iter_mut().rev() {
            *slot = Symbol((index % q) as u8);
            index /= q;
        }
        Configuration {
            volume: volume.clone(),
            symbols,
        }
    }

    /// Mixed-radix index over an alphabet of size `q`.
    pub fn index(&self, q: usize) -> usize {
        self.symbols.iter().fold(0, |acc, s| acc * q + s.index())
    }

    pub fn volume(&self) -> &Volume {
        &self.volume
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn get(&self, site: &Site) -> Option<Symbol> {
        self.volume.index_of(site).map(|i| self.symbols[i])
    }

    pub fn iter(&self) -> impl Iterator<Item = (&Site, Symbol)> {
        self.volume.iter().zip(self.symbols.iter().copied())
    }

    /// Number of sites carrying `symbol`.
    pub fn count(&self, symbol: Symbol) -> usize {
        self.symbols.iter().filter(|&&s| s == symbol).count()
    }

    /// Concatenation over disjoint domains.
    pub fn concat(&self, other: &Configuration) -> Result<Configuration> {
        if other.is_empty() {
            return Ok(self.clone());
        }
        if self.is_empty() {
            return Ok(other.clone());
        }
        let mut pairs: Vec<(Site, Symbol)> = Vec::with_capacity(self.len() + other.len());
        let (mut i, mut j) = (0, 0);
        let (a, b) = (self.volume.sites(), other.volume.sites());
        while i < a.len() || j < b.len() {
            if j == b.len() || (i < a.len() && a[i] < b[j]) {
                pairs.push((a[i].clone(), self.symbols[i]));
                i += 1;
            } else if i == a.len() || b[j] < a[i] {
                pairs.push((b[j].clone(), other.symbols[j]));
                j += 1;
            } else {
                return Err(Error::DomainConflict {
                    site: a[i].to_string(),
                });
            }
        }
        let (sites, symbols): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Ok(Configuration {
            volume: Volume { sites },
            symbols,
        })
    }

    /// Restriction to `target`, which must lie inside the domain.
    pub fn restrict(&self, target: &Volume) -> Result<Configuration> {
        let symbols = target
            .iter()
            .map(|s| {
                self.get(s).ok_or_else(|| {
                    Error::Domain(format!("site {s} is outside the configuration domain {}", self.volume))
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Configuration {
            volume: target.clone(),
            symbols,
        })
    }

    /// Restriction to `target` intersected with the domain.
    pub fn restrict_lenient(&self, target: &Volume) -> Configuration {
        self.restrict(&target.intersection(&self.volume))
            .expect("intersection lies in the domain")
    }

    /// Same domain, one site changed.
    pub fn with(&self, site: &Site, symbol: Symbol) -> Result<Configuration> {
        let i = self
            .volume
            .index_of(site)
            .ok_or_else(|| Error::Domain(format!("site {site} not in {}", self.volume)))?;
        let mut out = self.clone();
        out.symbols[i] = symbol;
        Ok(out)
    }

    /// Textual literal `(0,0)=+1;(0,1)=-1`.
    pub fn display(&self, alphabet: &Alphabet) -> String {
        let mut out = String::new();
        for (i, (site, sym)) in self.iter().enumerate() {
            if i > 0 {
                out.push(';');
            }
            out.push_str(&format!("{site}={}", alphabet.name(sym)));
        }
        out
    }

    /// Parses the `site=symbol` literal; an empty string is the empty configuration.
    pub fn parse(s: &str, alphabet: &Alphabet) -> Result<Configuration> {
        let s = s.trim();
        if s.is_empty() || s == "{}" {
            return Ok(Configuration::empty());
        }
        let mut pairs = Vec::new();
        for part in s.split(';') {
            let part = part.trim();
            if part.is_empty() {
                continue;
            }
            let (site, sym) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("`{part}` is not of the form site=symbol")))?;
            let site = Site::parse(site)?;
            let sym = alphabet
                .symbol(sym)
                .ok_or_else(|| Error::Parse(format!("unknown symbol `{}`", sym.trim())))?;
            pairs.push((site, sym));
        }
        pairs.sort_by(|a, b| a.0.cmp(&b.0));
        for w in pairs.windows(2) {
            if w[0].0 == w[1].0 {
                return Err(Error::DomainConflict {
                    site: w[0].0.to_string(),
                });
            }
        }
        let (sites, symbols): (Vec<_>, Vec<_>) = pairs.into_iter().unzip();
        Ok(Configuration {
            volume: Volume { sites },
            symbols,
        })
    }
}

/// All `|X|^|V|` configurations on `volume` in canonical lexicographic order.
pub fn enumerate_configurations(volume: &Volume, alphabet: &Alphabet) -> Result<Vec<Configuration>> {
    let n = configuration_count(volume, alphabet)?;
    let q = alphabet.size();
    Ok((0..n).map(|i| Configuration::from_index(volume, q, i)).collect())
}

/// An increasing sequence of volumes.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Filtration {
    volumes: Vec<Volume>,
}

impl Filtration {
    /// Requires `Λ_n ⊊ Λ_{n+1}` and at least one stage.
    pub fn new(volumes: Vec<Volume>) -> Result<Self> {
        if volumes.is_empty() {
            return Err(Error::Argument("a filtration needs at least one stage".into()));
        }
        for (n, w) in volumes.windows(2).enumerate() {
            if !(w[0].is_subset(&w[1]) && w[0].len() < w[1].len()) {
                return Err(Error::Argument(format!(
                    "stage {} is not strictly contained in stage {}",
                    n + 1,
                    n + 2
                )));
            }
        }
        Ok(Filtration { volumes })
    }

    pub fn stages(&self) -> &[Volume] {
        &self.volumes
    }

    pub fn len(&self) -> usize {
        self.volumes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.volumes.is_empty()
    }

    pub fn last(&self) -> &Volume {
        self.volumes.last().expect("nonempty")
    }

    /// Stage volumes with `target` removed.
    pub fn conditioning_volumes(&self, target: &Volume) -> Vec<Volume> {
        self.volumes.iter().map(|v| v.difference(target)).collect()
    }

    pub fn describe(&self) -> String {
        let sizes: Vec<String> = self.volumes.iter().map(|v| v.len().to_string()).collect();
        format!("{} stages, sizes [{}]", self.volumes.len(), sizes.join(","))
    }
}

/// Boxes of the given radii around `center`, intersected with `window`.
pub fn box_filtration(center: &Site, radii: &[u32], window: &Volume) -> Result<Filtration> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("box radii must be strictly increasing".into()));
    }
    let volumes = radii
        .iter()
        .map(|&r| Volume::ball(center, r).intersection(window))
        .collect();
    Filtration::new(volumes)
}

/// Boxes `[center - left*r, center + right*r]` per coordinate: skewed but nested.
pub fn lopsided_filtration(
    center: &Site,
    radii: &[u32],
    left: u32,
    right: u32,
    window: &Volume,
) -> Result<Filtration> {
    if radii.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::Argument("box radii must be strictly increasing".into()));
    }
    let volumes = radii
        .iter()
        .map(|&r| {
            let lo: Vec<i32> = center.coords().iter().map(|c| c - (left * r) as i32).collect();
            let hi: Vec<i32> = center.coords().iter().map(|c| c + (right * r) as i32).collect();
            Volume::box_range(&lo, &hi).intersection(window)
        })
        .collect();
    Filtration::new(volumes)
}

/// Neighbors of every site of a window.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct NeighborhoodSystem {
    neighbors: BTreeMap<Site, Volume>,
}

impl NeighborhoodSystem {
    pub fn new(neighbors: BTreeMap<Site, Volume>) -> Result<Self> {
        let sys = NeighborhoodSystem { neighbors };
        for (t, nb) in &sys.neighbors {
            if nb.contains(t) {
                return Err(Error::Argument(format!("site {t} is its own neighbor")));
            }
        }
        if !sys.is_symmetric() {
            return Err(Error::Argument("neighborhood system is not symmetric".into()));
        }
        Ok(sys)
    }

    /// Sites at L1 distance one, within `window`.
    pub fn nearest_neighbor(window: &Volume) -> Self {
        let neighbors = window
            .iter()
            .map(|t| {
                let nb = window.iter().filter(|s| s.l1_dist(t) == 1).cloned().collect();
                (t.clone(), nb)
            })
            .collect();
        NeighborhoodSystem { neighbors }
    }

    pub fn neighbors(&self, t: &Site) -> Option<&Volume> {
        self.neighbors.get(t)
    }

    pub fn is_symmetric(&self) -> bool {
        self.neighbors.iter().all(|(t, nb)| {
            nb.iter()
                .all(|s| self.neighbors.get(s).is_some_and(|back| back.contains(t)))
        })
    }
}
