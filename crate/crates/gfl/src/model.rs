//! Model descriptors such as `example1:N=8,c=1/2,kappa=1/2`,
//! `example2:tau=1,window=12`, `ising:beta=0.4,d=1,window=11`,
//! `product:p=1/3,window=8`, `table:path/to/file.tbl` and
//! `potential:path=file.pot,window=11`.
//!
//! `window=n` means the sites `{1..n}` (or `{1..n}^d`).

use std::collections::BTreeMap;
use std::path::PathBuf;

use gfl_core::fields::FloatView;
use gfl_core::models::{BernoulliMixture, MarkovChainPair};
use gfl_core::scalar::parse_rational;
use gfl_core::specifications::{finite_volume_gibbs, Potential};
use gfl_core::{
    example1_pair, example2_model, Alphabet, Configuration, Error, IsingDemo, ProductField, RandomField, Rational,
    Result, Scalar, TableField, Tau, Volume,
};

use crate::formats::{parse_potential, parse_table, RawTable};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Rational,
    Float,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Rational => "rational",
            Mode::Float => "float",
        }
    }
}

pub type FieldBox<S> = Box<dyn RandomField<S>>;

pub enum Model {
    Example1 { plus: MarkovChainPair, minus: MarkovChainPair, sign_plus: bool },
    Example2(BernoulliMixture),
    Product(ProductField<Rational>),
    Table { raw: RawTable, path: PathBuf },
    /// A finite-range potential on a window (the Ising demo included).
    Potential { phi: Potential, window: Volume, field: TableField<f64>, describe: String },
}

fn params(body: &str) -> Result<BTreeMap<String, String>> {
    let mut out = BTreeMap::new();
    for part in body.split(',').filter(|p| !p.trim().is_empty()) {
        let (k, v) = part
            .split_once('=')
            .ok_or_else(|| Error::Parse(format!("model parameter `{part}` is not key=value")))?;
        out.insert(k.trim().to_string(), v.trim().to_string());
    }
    Ok(out)
}

struct Params {
    kind: String,
    map: BTreeMap<String, String>,
}

impl Params {
    fn take(&mut self, key: &str) -> Option<String> {
        self.map.remove(key)
    }

    fn rational(&mut self, key: &str, default: &str) -> Result<Rational> {
        let text = self.take(key).unwrap_or_else(|| default.to_string());
        parse_rational(&text).ok_or_else(|| Error::Parse(format!("{}: `{key}` = `{text}` is not a number", self.kind)))
    }

    fn float(&mut self, key: &str, default: f64) -> Result<f64> {
        match self.take(key) {
            None => Ok(default),
            Some(t) => t.parse().map_err(|_| Error::Parse(format!("{}: `{key}` = `{t}` is not a number", self.kind))),
        }
    }

    fn int(&mut self, key: &str, default: usize) -> Result<usize> {
        match self.take(key) {
            None => Ok(default),
            Some(t) => t.parse().map_err(|_| Error::Parse(format!("{}: `{key}` = `{t}` is not an integer", self.kind))),
        }
    }

    fn finish(self) -> Result<()> {
        match self.map.keys().next() {
            Some(k) => Err(Error::Parse(format!("{}: unknown parameter `{k}`", self.kind))),
            None => Ok(()),
        }
    }
}

fn side_window(side: usize, dim: usize) -> Result<Volume> {
    if side == 0 || !(1..=2).contains(&dim) {
        return Err(Error::Argument(format!("window {side} in dimension {dim} not supported")));
    }
    Ok(Volume::box_range(&vec![1; dim], &vec![side as i32; dim]))
}

impl Model {
    pub fn parse(descriptor: &str) -> Result<Model> {
        let (kind, body) = descriptor.split_once(':').unwrap_or((descriptor, ""));
        if kind == "table" {
            let path = PathBuf::from(body.strip_prefix("path=").unwrap_or(body));
            let text = std::fs::read_to_string(&path)
                .map_err(|e| Error::Argument(format!("cannot read {}: {e}", path.display())))?;
            return Ok(Model::Table { raw: parse_table(&text)?, path });
        }
        let mut p = Params {
            kind: kind.to_string(),
            map: params(body)?,
        };
        let model = match kind {
            "example1" => {
                let n = p.int("N", 8)?;
                let c = p.rational("c", "1/2")?;
                let kappa = p.rational("kappa", "1/2")?;
                let sign = p.take("sign").unwrap_or_else(|| "+".into());
                if n < 2 {
                    return Err(Error::Argument("example1 needs N >= 2".into()));
                }
                let (plus, minus) = example1_pair(n, &vec![c; n - 1], &kappa)?;
                Model::Example1 {
                    plus,
                    minus,
                    sign_plus: match sign.as_str() {
                        "+" | "plus" => true,
                        "-" | "minus" => false,
                        other => return Err(Error::Parse(format!("example1: sign `{other}` (use + or -)"))),
                    },
                }
            }
            "example2" => {
                let tau_text = p.take("tau").unwrap_or_else(|| "1".into());
                let tau = match tau_text.parse::<u32>() {
                    Ok(n) => Tau::Integer(n),
                    Err(_) => Tau::Real(
                        tau_text
                            .parse()
                            .map_err(|_| Error::Parse(format!("example2: tau `{tau_text}` is not a number")))?,
                    ),
                };
                let side = p.int("window", 12)?;
                let dim = p.int("d", 1)?;
                Model::Example2(example2_model(tau, side_window(side, dim)?)?)
            }
            "ising" => {
                let beta = p.float("beta", 0.4)?;
                let h = p.float("h", 0.0)?;
                let dim = p.int("d", 1)?;
                let side = p.int("window", 11)?;
                let demo = IsingDemo::new(beta, h, dim, side)?;
                let describe = RandomField::<f64>::describe(&demo);
                Model::Potential {
                    phi: demo.potential().clone(),
                    window: RandomField::<f64>::window(&demo).clone(),
                    field: demo.field().clone(),
                    describe,
                }
            }
            "product" => {
                let prob = p.rational("p", "1/2")?;
                let side = p.int("window", 8)?;
                let dim = p.int("d", 1)?;
                let law = vec![Rational::one() - &prob, prob];
                Model::Product(ProductField::new(side_window(side, dim)?, Alphabet::binary(), law)?)
            }
            "potential" => {
                let path = p.take("path").ok_or_else(|| Error::Parse("potential: missing path=".into()))?;
                let text = std::fs::read_to_string(&path).map_err(|e| Error::Argument(format!("cannot read {path}: {e}")))?;
                let phi = parse_potential(&text)?;
                let side = p.int("window", 11)?;
                let window = side_window(side, phi.dim())?;
                let joint = finite_volume_gibbs(&phi, &window, &window, &Configuration::empty())?;
                Model::Potential {
                    describe: format!("potential:{path},window={side}"),
                    phi,
                    window,
                    field: TableField::new(joint),
                }
            }
            other => return Err(Error::Parse(format!("unknown model kind `{other}`"))),
        };
        p.finish()?;
        Ok(model)
    }

    pub fn window(&self) -> Volume {
        match self {
            Model::Example1 { plus, .. } => RandomField::<Rational>::window(plus).clone(),
            Model::Example2(m) => RandomField::<Rational>::window(m).clone(),
            Model::Product(m) => m.window().clone(),
            Model::Table { raw, .. } => raw.volume.clone(),
            Model::Potential { window, .. } => window.clone(),
        }
    }

    pub fn alphabet(&self) -> Alphabet {
        match self {
            Model::Example1 { .. } => Alphabet::spins(),
            Model::Example2(_) | Model::Product(_) => Alphabet::binary(),
            Model::Table { raw, .. } => raw.alphabet.clone(),
            Model::Potential { phi, .. } => phi.alphabet().clone(),
        }
    }

    pub fn supports_rational(&self) -> bool {
        match self {
            Model::Example2(m) => RandomField::<Rational>::prob(m, &Configuration::empty()).is_ok(),
            Model::Potential { .. } => false,
            _ => true,
        }
    }

    /// `auto` picks rational whenever the model supports it.
    pub fn resolve_mode(&self, requested: &str) -> Result<Mode> {
        match requested {
            "auto" => Ok(if self.supports_rational() { Mode::Rational } else { Mode::Float }),
            "rational" if self.supports_rational() => Ok(Mode::Rational),
            "rational" => Err(Error::Argument("this model has no exact form; use --mode float".into())),
            "float" => Ok(Mode::Float),
            other => Err(Error::Argument(format!("unknown mode `{other}`"))),
        }
    }

    pub fn rational_field(&self) -> Result<FieldBox<Rational>> {
        Ok(match self {
            Model::Example1 { plus, minus, sign_plus } => Box::new(if *sign_plus { plus.clone() } else { minus.clone() }),
            Model::Example2(m) => Box::new(m.clone()),
            Model::Product(m) => Box::new(m.clone()),
            Model::Table { raw, .. } => Box::new(TableField::new(raw.distribution::<Rational>()?)),
            Model::Potential { .. } => return Err(Error::Argument("potential models are float only".into())),
        })
    }

    pub fn float_field(&self) -> Result<FieldBox<f64>> {
        Ok(match self {
            Model::Example2(m) => Box::new(m.clone()),
            Model::Table { raw, .. } => Box::new(TableField::new(raw.distribution::<f64>()?)),
            Model::Potential { field, .. } => Box::new(field.clone()),
            _ => Box::new(FloatView(self.rational_field()?)),
        })
    }

    pub fn potential(&self) -> Option<(&Potential, &Volume)> {
        match self {
            Model::Potential { phi, window, .. } => Some((phi, window)),
            _ => None,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            Model::Example1 { plus, minus, sign_plus } => {
                RandomField::<Rational>::describe(if *sign_plus { plus } else { minus })
            }
            Model::Example2(m) => RandomField::<Rational>::describe(m),
            Model::Product(m) => m.describe(),
            Model::Table { path, .. } => format!("table:{}", path.display()),
            Model::Potential { describe, .. } => describe.clone(),
        }
    }
}

/// A field in the requested numeric mode.
pub trait FieldIn: Scalar {
    fn field(model: &Model) -> Result<FieldBox<Self>>;
}

impl FieldIn for Rational {
    fn field(model: &Model) -> Result<FieldBox<Self>> {
        model.rational_field()
    }
}

impl FieldIn for f64 {
    fn field(model: &Model) -> Result<FieldBox<Self>> {
        model.float_field()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn descriptors_parse() {
        let m = Model::parse("example1:N=8,c=1/2,kappa=1/2").unwrap();
        assert_eq!(m.window().len(), 8);
        assert_eq!(m.resolve_mode("auto").unwrap(), Mode::Rational);
        let m = Model::parse("example2:tau=1,window=12").unwrap();
        assert_eq!(m.window(), Volume::interval(1, 12));
        let m = Model::parse("ising:beta=0.4,d=1,window=11").unwrap();
        assert_eq!(m.resolve_mode("auto").unwrap(), Mode::Float);
        assert!(m.resolve_mode("rational").is_err());
        assert!(Model::parse("example2:tau=1.5").unwrap().resolve_mode("auto").unwrap() == Mode::Float);
        assert!(Model::parse("ising:beta=0.4,colour=red").is_err());
        assert!(Model::parse("nothing").is_err());
    }
}
