//! TOML run configuration.
//!
//! ```toml
//! seed = 7
//!
//! [channels]
//! forward = "bsc_pair 0.1 0.3"
//!
//! [channels.backward]
//! input = 2
//! legit_output = 2
//! eve_output = 3
//! legit = [[0.9, 0.1], [0.1, 0.9]]
//! eve = [["1/2", 0, "1/2"], [0, "1/2", "1/2"]]
//! ```
//!
//! Probabilities are TOML numbers or strings holding a decimal or a ratio
//! `a/b`; decimals are parsed to the nearest double.

use std::fmt;
use std::ops::Range;
use std::path::PathBuf;

use serde::de::{self, MapAccess, Visitor};
use serde::{Deserialize, Deserializer};
use skec_core::bounds::{AuxSizes, DirectionAux, PlanLengths, SearchConfig};
use skec_core::icc::DEFAULT_ALPHA;
use skec_core::{make_bsc_pair, Alphabet, ConditionalPmf, Dmbc, Pmf, TwoDmbcSetup};
use toml::Spanned;

/// A configuration problem, located by line and field when possible.
#[derive(Debug, Clone, PartialEq)]
pub struct ConfigError {
    pub line: Option<usize>,
    pub field: Option<String>,
    pub message: String,
}

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match (self.line, &self.field) {
            (Some(l), Some(k)) => write!(f, "line {l}, field `{k}`: {}", self.message),
            (Some(l), None) => write!(f, "line {l}: {}", self.message),
            (None, Some(k)) => write!(f, "field `{k}`: {}", self.message),
            (None, None) => f.write_str(&self.message),
        }
    }
}

impl std::error::Error for ConfigError {}

fn line_of(text: &str, offset: usize) -> usize {
    text[..offset.min(text.len())].matches('\n').count() + 1
}

struct Locator<'a> {
    text: &'a str,
}

impl Locator<'_> {
    fn err(&self, span: &Range<usize>, field: impl Into<String>, message: impl fmt::Display) -> ConfigError {
        ConfigError { line: Some(line_of(self.text, span.start)), field: Some(field.into()), message: message.to_string() }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Format {
    #[default]
    Csv,
    Jsonl,
}

/// Whether the bounds command computes the sd-only quantities.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SdMode {
    /// Only for sd-2DMBC setups.
    #[default]
    Auto,
    /// Refuse setups that are not sd-2DMBCs.
    Require,
    Skip,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    #[default]
    Special,
    General,
}

/// Alice (`a`) or Bob (`b`) opens the protocol.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Initiator {
    #[default]
    A,
    B,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulateConfig {
    pub variant: Variant,
    pub initiator: Initiator,
    /// Fixed lengths, or a tight split of a total (special variant only).
    pub lengths: PlanLengths,
    pub alpha: f64,
    pub epsilon: Option<f64>,
    pub kappa: Option<u32>,
    pub sessions: usize,
    pub delta: f64,
    pub leakage: bool,
    pub per_session: bool,
    pub p_xf: Option<Pmf>,
    pub p_xb: Option<Pmf>,
    /// Auxiliary laws of the general variant, in the initiator's orientation.
    pub aux: Option<DirectionAux>,
}

/// Cartesian BSC grid applied to both directions, legit-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub legit: Vec<f64>,
    pub eve: Vec<f64>,
}

impl SweepConfig {
    pub fn points(&self) -> Vec<(f64, f64)> {
        self.legit.iter().flat_map(|&l| self.eve.iter().map(move |&e| (l, e))).collect()
    }
}

/// Everything a command needs, after merging the file with the flags.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub seed: u64,
    pub setup: Option<TwoDmbcSetup>,
    pub search: SearchConfig,
    pub sd: SdMode,
    pub simulate: Option<SimulateConfig>,
    pub sweep: Option<SweepConfig>,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub workers: Option<usize>,
}

impl RunConfig {
    /// Parses a configuration; `seed` overrides the file's seed.
    pub fn parse(text: &str, seed: Option<u64>) -> Result<RunConfig, ConfigError> {
        let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError {
            line: e.span().map(|s| line_of(text, s.start)),
            field: None,
            message: e.message().trim().to_string(),
        })?;
        let loc = Locator { text };
        let seed = seed.or(raw.seed).unwrap_or(0);
        let setup = raw.channels.as_ref().map(|c| c.to_setup(&loc)).transpose()?;
        let search = raw.search.map(|s| s.into_config(seed)).unwrap_or(SearchConfig { seed, ..SearchConfig::default() });
        let simulate = raw.simulate.as_ref().map(|s| simulate_config(s, &loc, setup.as_ref())).transpose()?;
        let sweep = raw.sweep.as_ref().map(|s| sweep_config(s, &loc)).transpose()?;
        Ok(RunConfig {
            seed,
            setup,
            search,
            sd: raw.bounds.map(|b| b.sd).unwrap_or_default(),
            simulate,
            sweep,
            out: None,
            format: Format::Csv,
            workers: None,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    seed: Option<u64>,
    channels: Option<RawChannels>,
    search: Option<RawSearch>,
    bounds: Option<RawBounds>,
    simulate: Option<Spanned<RawSimulate>>,
    sweep: Option<Spanned<RawSweep>>,
}

/// A probability given as a number, a decimal string or a ratio string.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Prob(f64);

impl<'de> Deserialize<'de> for Prob {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl Visitor<'_> for V {
            type Value = Prob;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a probability (number, decimal string or \"a/b\")")
            }
            fn visit_f64<E: de::Error>(self, v: f64) -> Result<Prob, E> {
                Ok(Prob(v))
            }
            fn visit_i64<E: de::Error>(self, v: i64) -> Result<Prob, E> {
                Ok(Prob(v as f64))
            }
            fn visit_u64<E: de::Error>(self, v: u64) -> Result<Prob, E> {
                Ok(Prob(v as f64))
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<Prob, E> {
                parse_prob(v).map(Prob).map_err(E::custom)
            }
        }
        d.deserialize_any(V)
    }
}

fn parse_prob(s: &str) -> Result<f64, String> {
    let s = s.trim();
    let bad = || format!("cannot read {s:?} as a probability");
    let v = match s.split_once('/') {
        Some((a, b)) => {
            let a: f64 = a.trim().parse().map_err(|_| bad())?;
            let b: f64 = b.trim().parse().map_err(|_| bad())?;
            if b == 0.0 {
                return Err(bad());
            }
            a / b
        }
        None => s.parse().map_err(|_| bad())?,
    };
    if !v.is_finite() || !(0.0..=1.0).contains(&v) {
        return Err(format!("{s} is not in [0, 1]"));
    }
    Ok(v)
}

fn probs(v: &[Prob]) -> Vec<f64> {
    v.iter().map(|p| p.0).collect()
}

fn rows(v: &[Vec<Prob>]) -> Vec<Vec<f64>> {
    v.iter().map(|r| probs(r)).collect()
}

#[derive(Deserialize)]
#[serde(untagged)]
enum AlphabetSpec {
    Size(usize),
    Labels(Vec<String>),
}

impl AlphabetSpec {
    fn build(&self) -> skec_core::Result<Alphabet> {
        match self {
            AlphabetSpec::Size(n) => Alphabet::new(*n),
            AlphabetSpec::Labels(l) => Alphabet::with_labels(l.iter().cloned()),
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannelTable {
    input: AlphabetSpec,
    legit_output: AlphabetSpec,
    eve_output: AlphabetSpec,
    /// `P(y|x)`, one row per input symbol.
    legit: Option<Vec<Vec<Prob>>>,
    /// `P(z|x)`.
    eve: Option<Vec<Vec<Prob>>>,
    /// `P(y,z|x)` with column `y * |Z| + z`.
    law: Option<Vec<Vec<Prob>>>,
}

enum ChannelEntry {
    BscPair(f64, f64),
    Table(RawChannelTable),
}

impl<'de> Deserialize<'de> for ChannelEntry {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        struct V;
        impl<'de> Visitor<'de> for V {
            type Value = ChannelEntry;
            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("a shorthand such as \"bsc_pair 0.1 0.3\" or a channel table")
            }
            fn visit_str<E: de::Error>(self, v: &str) -> Result<ChannelEntry, E> {
                parse_shorthand(v).map_err(E::custom)
            }
            fn visit_map<A: MapAccess<'de>>(self, map: A) -> Result<ChannelEntry, A::Error> {
                RawChannelTable::deserialize(de::value::MapAccessDeserializer::new(map)).map(ChannelEntry::Table)
            }
        }
        d.deserialize_any(V)
    }
}

fn parse_shorthand(s: &str) -> Result<ChannelEntry, String> {
    let words: Vec<&str> = s.split(|c: char| c.is_whitespace() || c == ',').filter(|w| !w.is_empty()).collect();
    match words.as_slice() {
        ["bsc_pair", p, q] => Ok(ChannelEntry::BscPair(parse_prob(p)?, parse_prob(q)?)),
        ["bsc_pair", ..] => Err(format!("\"bsc_pair\" takes two crossovers, got {s:?}")),
        _ => Err(format!("unknown channel shorthand {s:?}; expected \"bsc_pair <p_legit> <p_eve>\"")),
    }
}

impl ChannelEntry {
    fn build(&self) -> Result<Dmbc, (String, String)> {
        let core = |k: &'static str| move |e: skec_core::Error| (k.to_string(), e.to_string());
        match self {
            ChannelEntry::BscPair(p, q) => make_bsc_pair(*p, *q).map_err(core("")),
            ChannelEntry::Table(t) => {
                let input = t.input.build().map_err(core("input"))?;
                let ly = t.legit_output.build().map_err(core("legit_output"))?;
                let lz = t.eve_output.build().map_err(core("eve_output"))?;
                match (&t.legit, &t.eve, &t.law) {
                    (Some(l), Some(e), None) => {
                        let l = ConditionalPmf::new(input.clone(), ly.clone(), rows(l)).map_err(core("legit"))?;
                        let e = ConditionalPmf::new(input, lz.clone(), rows(e)).map_err(core("eve"))?;
                        let d = Dmbc::from_components(&l, &e).map_err(core(""))?;
                        // keep the labels of the declared alphabets
                        Dmbc::new(d.law().clone(), ly, lz).map_err(core(""))
                    }
                    (None, None, Some(law)) => {
                        let out = Alphabet::new(ly.size() * lz.size()).map_err(core("law"))?;
                        let law = ConditionalPmf::new(input, out, rows(law)).map_err(core("law"))?;
                        Dmbc::new(law, ly, lz).map_err(core("law"))
                    }
                    _ => Err((String::new(), "give either `legit` and `eve`, or `law`".into())),
                }
            }
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawChannels {
    forward: Spanned<ChannelEntry>,
    backward: Spanned<ChannelEntry>,
}

impl RawChannels {
    fn to_setup(&self, loc: &Locator) -> Result<TwoDmbcSetup, ConfigError> {
        let one = |name: &str, c: &Spanned<ChannelEntry>| {
            c.get_ref().build().map_err(|(k, m)| {
                let field = if k.is_empty() { format!("channels.{name}") } else { format!("channels.{name}.{k}") };
                loc.err(&c.span(), field, m)
            })
        };
        Ok(TwoDmbcSetup::new(one("forward", &self.forward)?, one("backward", &self.backward)?))
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSearch {
    restarts: Option<usize>,
    tolerance: Option<f64>,
    max_sweeps: Option<usize>,
    seed: Option<u64>,
    sizes: Option<AuxSizes>,
}

impl RawSearch {
    fn into_config(self, seed: u64) -> SearchConfig {
        let d = SearchConfig::default();
        SearchConfig {
            restarts: self.restarts.unwrap_or(d.restarts),
            tolerance: self.tolerance.unwrap_or(d.tolerance),
            max_sweeps: self.max_sweeps.unwrap_or(d.max_sweeps),
            seed: self.seed.unwrap_or(seed),
            sizes: self.sizes,
            parallel: true,
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawBounds {
    #[serde(default)]
    sd: SdMode,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawAux {
    p_xf: Vec<Prob>,
    p_v_given_yf: Vec<Vec<Prob>>,
    p_w1: Vec<Prob>,
    p_w2_given_w1: Vec<Vec<Prob>>,
    p_xb_given_w1: Vec<Vec<Prob>>,
}

impl RawAux {
    fn build(&self) -> Result<DirectionAux, (String, String)> {
        let e = |k: &'static str| move |e: skec_core::Error| (k.to_string(), e.to_string());
        Ok(DirectionAux {
            p_xf: Pmf::from_probs(probs(&self.p_xf)).map_err(e("p_xf"))?,
            p_v_given_yf: ConditionalPmf::from_rows(rows(&self.p_v_given_yf)).map_err(e("p_v_given_yf"))?,
            p_w1: Pmf::from_probs(probs(&self.p_w1)).map_err(e("p_w1"))?,
            p_w2_given_w1: ConditionalPmf::from_rows(rows(&self.p_w2_given_w1)).map_err(e("p_w2_given_w1"))?,
            p_xb_given_w1: ConditionalPmf::from_rows(rows(&self.p_xb_given_w1)).map_err(e("p_xb_given_w1"))?,
        })
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSimulate {
    #[serde(default)]
    variant: Variant,
    #[serde(default)]
    initiator: Initiator,
    n_f: Option<usize>,
    n_b: Option<usize>,
    total: Option<usize>,
    alpha: Option<f64>,
    epsilon: Option<f64>,
    kappa: Option<u32>,
    sessions: Option<usize>,
    delta: Option<f64>,
    leakage: Option<bool>,
    per_session: Option<bool>,
    p_xf: Option<Vec<Prob>>,
    p_xb: Option<Vec<Prob>>,
    aux: Option<RawAux>,
}

fn simulate_config(
    raw: &Spanned<RawSimulate>,
    loc: &Locator,
    setup: Option<&TwoDmbcSetup>,
) -> Result<SimulateConfig, ConfigError> {
    {
        let span = raw.span();
        let err = |k: &str, m: &str| loc.err(&span, format!("simulate.{k}"), m);
        let r = raw.get_ref();
        let lengths = match (r.n_f, r.n_b, r.total) {
            (Some(n_f), Some(n_b), None) => PlanLengths::Fixed { n_f, n_b },
            (None, None, Some(total)) if r.variant == Variant::Special => PlanLengths::Tight { total },
            (None, None, Some(_)) => return Err(err("total", "the general variant needs explicit `n_f` and `n_b`")),
            _ => return Err(err("n_f", "give `n_f` and `n_b`, or `total`")),
        };
        let alpha = r.alpha.unwrap_or(DEFAULT_ALPHA);
        if !(alpha > 0.0 && alpha.is_finite()) {
            return Err(err("alpha", "must be positive"));
        }
        if let Some(e) = r.epsilon {
            if !(e > 0.0 && e.is_finite()) {
                return Err(err("epsilon", "must be positive"));
            }
        }
        let delta = r.delta.unwrap_or(0.1);
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(err("delta", "must be in (0, 1]"));
        }
        let sessions = r.sessions.unwrap_or(1000);
        if sessions == 0 {
            return Err(err("sessions", "must be positive"));
        }
        let pmf = |k: &str, v: &Option<Vec<Prob>>| {
            v.as_ref().map(|v| Pmf::from_probs(probs(v)).map_err(|e| err(k, &e.to_string()))).transpose()
        };
        let p_xf = pmf("p_xf", &r.p_xf)?;
        let p_xb = pmf("p_xb", &r.p_xb)?;
        let aux = match &r.aux {
            Some(a) if r.variant == Variant::General => {
                let aux = a.build().map_err(|(k, m)| err(&format!("aux.{k}"), &m))?;
                if let Some(s) = setup {
                    let s = match r.initiator {
                        Initiator::A => s.clone(),
                        Initiator::B => s.reversed(),
                    };
                    aux.check(&s).map_err(|e| err("aux", &e.to_string()))?;
                }
                Some(aux)
            }
            Some(_) => return Err(err("aux", "auxiliary laws apply to the general variant only")),
            None => None,
        };
        if r.variant == Variant::General && (p_xf.is_some() || p_xb.is_some()) {
            return Err(err("p_xf", "the general variant takes its input laws from `aux`"));
        }
        Ok(SimulateConfig {
            variant: r.variant,
            initiator: r.initiator,
            lengths,
            alpha,
            epsilon: r.epsilon,
            kappa: r.kappa,
            sessions,
            delta,
            leakage: r.leakage.unwrap_or(true),
            per_session: r.per_session.unwrap_or(false),
            p_xf,
            p_xb,
            aux,
        })
    }
}

/// A single value, a list, or an inclusive range with a step or a count.
#[derive(Deserialize)]
#[serde(untagged)]
enum GridSpec {
    One(f64),
    List(Vec<f64>),
    Step { from: f64, to: f64, step: f64 },
    Count { from: f64, to: f64, count: usize },
}

impl GridSpec {
    fn values(&self) -> Result<Vec<f64>, String> {
        let v = match self {
            GridSpec::One(x) => vec![*x],
            GridSpec::List(v) => v.clone(),
            GridSpec::Step { from, to, step } => {
                if !(*step > 0.0) {
                    return Err("step must be positive".into());
                }
                let n = ((to - from) / step + 1e-9).floor();
                if n < 0.0 {
                    return Err("`to` is below `from`".into());
                }
                (0..=n as usize).map(|k| from + k as f64 * step).collect()
            }
            GridSpec::Count { from, to, count } => match count {
                0 => vec![],
                1 => vec![*from],
                c => (0..*c).map(|k| from + (to - from) * k as f64 / (c - 1) as f64).collect(),
            },
        };
        if v.is_empty() {
            return Err("grid is empty".into());
        }
        if let Some(x) = v.iter().find(|x| !(0.0..=0.5).contains(*x)) {
            return Err(format!("crossover {x} outside [0, 0.5]"));
        }
        Ok(v)
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSweep {
    legit: GridSpec,
    eve: GridSpec,
}

fn sweep_config(raw: &Spanned<RawSweep>, loc: &Locator) -> Result<SweepConfig, ConfigError> {
    let r = raw.get_ref();
    let legit = r.legit.values().map_err(|m| loc.err(&raw.span(), "sweep.legit", m))?;
    let eve = r.eve.values().map_err(|m| loc.err(&raw.span(), "sweep.eve", m))?;
    Ok(SweepConfig { legit, eve })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn shorthand_and_tables_agree() {
        let short = RunConfig::parse("[channels]\nforward = \"bsc_pair 0.1 0.3\"\nbackward = \"bsc_pair 0.1, 0.3\"\n", None)
            .unwrap();
        let table = RunConfig::parse(
            r#"
[channels.forward]
input = 2
legit_output = 2
eve_output = 2
legit = [[0.9, 0.1], [0.1, 0.9]]
eve = [[0.7, 0.3], [0.3, 0.7]]

[channels.backward]
input = 2
legit_output = 2
eve_output = 2
law = [[0.63, 0.27, 0.07, 0.03], [0.03, 0.07, 0.27, 0.63]]
"#,
            None,
        )
        .unwrap();
        let (a, b) = (short.setup.unwrap(), table.setup.unwrap());
        for (x, y) in [(&a.forward, &b.forward), (&a.backward, &b.backward)] {
            for i in 0..2 {
                for (p, q) in x.law().row(i).iter().zip(y.law().row(i)) {
                    assert!((p - q).abs() < 1e-15);
                }
            }
        }
    }

    #[test]
    fn decimal_strings_parse_to_nearest_double() {
        assert_eq!(parse_prob("0.1").unwrap(), 0.1);
        assert_eq!(parse_prob("1/3").unwrap(), 1.0 / 3.0);
        assert!(parse_prob("1.5").is_err());
        assert!(parse_prob("x").is_err());
    }

    #[test]
    fn seed_defaults_to_zero_and_flag_wins() {
        assert_eq!(RunConfig::parse("", None).unwrap().seed, 0);
        assert_eq!(RunConfig::parse("seed = 5", None).unwrap().seed, 5);
        assert_eq!(RunConfig::parse("seed = 5", Some(9)).unwrap().seed, 9);
        assert_eq!(RunConfig::parse("seed = 5", Some(9)).unwrap().search.seed, 9);
    }

    #[test]
    fn bad_row_reports_line_and_field() {
        let text = "seed = 1\n\n[channels]\nforward = \"bsc_pair 0.1 0.3\"\n\n[channels.backward]\ninput = 2\nlegit_output = 2\neve_output = 2\nlegit = [[0.9, 0.2], [0.1, 0.9]]\neve = [[0.5, 0.5], [0.5, 0.5]]\n";
        let e = RunConfig::parse(text, None).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("channels.backward.legit"));
        assert!(e.line.is_some_and(|l| (6..=11).contains(&l)), "{e}");
    }

    #[test]
    fn syntax_and_unknown_fields_report_lines() {
        let e = RunConfig::parse("seed = 1\n[search]\nrestart = 3\n", None).unwrap_err();
        assert_eq!(e.line, Some(3), "{e}");
        let e = RunConfig::parse("seed = \n", None).unwrap_err();
        assert_eq!(e.line, Some(1), "{e}");
        let e = RunConfig::parse("[channels]\nforward = \"bsc 0.1\"\nbackward = \"bsc_pair 0 0\"\n", None).unwrap_err();
        assert_eq!(e.line, Some(2), "{e}");
    }

    #[test]
    fn grids() {
        let c = RunConfig::parse("[sweep]\nlegit = 0.1\neve = { from = 0.1, to = 0.5, step = 0.1 }\n", None).unwrap();
        let s = c.sweep.unwrap();
        assert_eq!(s.points().len(), 5);
        assert!((s.eve[4] - 0.5).abs() < 1e-12);
        let c = RunConfig::parse("[sweep]\nlegit = [0.0, 0.1]\neve = { from = 0.0, to = 0.2, count = 3 }\n", None).unwrap();
        assert_eq!(c.sweep.unwrap().points(), vec![(0.0, 0.0), (0.0, 0.1), (0.0, 0.2), (0.1, 0.0), (0.1, 0.1), (0.1, 0.2)]);
        let e = RunConfig::parse("[sweep]\nlegit = []\neve = 0.1\n", None).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("sweep.legit"));
        let e = RunConfig::parse("[sweep]\nlegit = 0.1\neve = [0.2, 0.7]\n", None).unwrap_err();
        assert!(e.message.contains("0.7"));
    }

    #[test]
    fn simulate_lengths() {
        let c = RunConfig::parse("[simulate]\ntotal = 16\n", None).unwrap().simulate.unwrap();
        assert_eq!(c.lengths, PlanLengths::Tight { total: 16 });
        assert_eq!((c.sessions, c.alpha, c.delta), (1000, DEFAULT_ALPHA, 0.1));
        let e = RunConfig::parse("[simulate]\nn_f = 4\n", None).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("simulate.n_f"));
        let e = RunConfig::parse("[simulate]\nvariant = \"general\"\ntotal = 8\n", None).unwrap_err();
        assert_eq!(e.field.as_deref(), Some("simulate.total"));
    }
}
