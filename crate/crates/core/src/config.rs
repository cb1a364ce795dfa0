//! Experiment configurations: one table of commands and typed parameters
//! drives the command-line flags, the JSON config files and normalization.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::abelian::FiniteAbelianGroup;
use crate::bohr::BohrSpec;
use crate::counterexample::GrowthPolicy;
use crate::density::FolnerFamily;
use crate::error::{LabError, Result};
use crate::frequency::Frequency;
use crate::hartman::HartmanSequence;
use crate::means::TrigPolynomial;
use crate::rules::{split_top, SetRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    Group,
    /// Subset literal of the command's group, checked when the command runs.
    Subset,
    Rule,
    Bohr,
    Sequence,
    Frequency,
    /// Comma-separated frequencies; `grid(Q)` stands for every `j/q` with `q <= Q`.
    FrequencyList,
    FloatList,
    Policy,
    /// Trigonometric polynomial `c@theta,...`.
    Phi,
    /// `centered` or `initial`.
    Family,
    Int,
    Float,
    Flag,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Fallback {
    Required,
    Optional,
    Value(&'static str),
}

#[derive(Clone, Copy, Debug)]
pub struct ParamSpec {
    pub name: &'static str,
    pub kind: Kind,
    pub default: Fallback,
    pub help: &'static str,
}

#[derive(Clone, Copy, Debug)]
pub struct CommandSpec {
    pub group: &'static str,
    pub name: &'static str,
    pub about: &'static str,
    pub params: &'static [ParamSpec],
}

impl CommandSpec {
    pub fn path(&self) -> String {
        format!("{} {}", self.group, self.name)
    }

    pub fn param(&self, name: &str) -> Option<&ParamSpec> {
        self.params.iter().find(|p| p.name == name)
    }
}

const fn p(name: &'static str, kind: Kind, default: Fallback, help: &'static str) -> ParamSpec {
    ParamSpec {
        name,
        kind,
        default,
        help,
    }
}

use Fallback::{Optional, Required, Value as D};
use Kind::*;

const GROUP: ParamSpec = p("group", Group, Required, "finite abelian group, e.g. Z6 or Z2xZ3");

pub const COMMANDS: &[CommandSpec] = &[
    CommandSpec {
        group: "group",
        name: "dft",
        about: "Fourier coefficients of the indicator of A",
        params: &[GROUP, p("a", Subset, Required, "subset, e.g. {0,2,4} or 0x15")],
    },
    CommandSpec {
        group: "group",
        name: "convolve",
        about: "1_A * 1_B with its positivity set against A + B",
        params: &[GROUP, p("a", Subset, Required, "first subset"), p("b", Subset, Required, "second subset")],
    },
    CommandSpec {
        group: "group",
        name: "kneser",
        about: "stabilizer certificate of A + B, or an exhaustive scan without A and B",
        params: &[GROUP, p("a", Subset, Optional, "first subset"), p("b", Subset, Optional, "second subset")],
    },
    CommandSpec {
        group: "group",
        name: "steinhaus",
        about: "level set of 1_A * 1_B against A + B, or an exhaustive scan without A and B",
        params: &[GROUP, p("a", Subset, Optional, "first subset"), p("b", Subset, Optional, "second subset")],
    },
    CommandSpec {
        group: "density",
        name: "scan",
        about: "Folner lower/upper density and upper Banach density on a window",
        params: &[
            p("rule", Rule, Required, "set rule, e.g. mod(3,1) or floor_pow(n,1.5)"),
            p("lo", Int, D("-100000"), "window start"),
            p("hi", Int, D("100000"), "window end"),
            p("family", Family, D("centered"), "Folner family: centered or initial"),
            p("depth", Int, D("1000"), "Folner index N; the tail [N/2, N] is scanned"),
            p("len", Int, D("1000"), "Banach window length"),
        ],
    },
    CommandSpec {
        group: "density",
        name: "classify",
        about: "thick, syndetic and piecewise syndetic reports on a window",
        params: &[
            p("rule", Rule, Required, "set rule"),
            p("lo", Int, D("0"), "window start"),
            p("hi", Int, D("100000"), "window end"),
            p("len", Int, D("10"), "run length for thickness"),
            p("gap", Int, D("10"), "gap bound for syndeticity"),
        ],
    },
    CommandSpec {
        group: "bohr",
        name: "window",
        about: "Bohr set on a window with the density lower bound",
        params: &[
            p("spec", Bohr, Required, "bohr(d=1; theta=0.618; eps=0.1; center=0)"),
            p("lo", Int, D("0"), "window start"),
            p("hi", Int, D("99999"), "window end"),
        ],
    },
    CommandSpec {
        group: "bohr",
        name: "scan",
        about: "ranked Bohr candidates contained in the target along a run",
        params: &[
            p("rule", Rule, Required, "target set rule"),
            p("lo", Int, D("0"), "window start"),
            p("hi", Int, D("99999"), "window end"),
            p("rank", Int, D("1"), "largest rank tried"),
            p("eps", FloatList, D("0.05,0.1,0.25"), "radius grid"),
            p("thetas", FrequencyList, D("grid(12)"), "frequency grid"),
            p("seeds", Int, D("8"), "grid frequencies kept by coefficient size"),
            p("centers", Int, D("4"), "centers tried per frequency tuple"),
            p("run-len", Int, D("0"), "run length; 0 means a quarter of the window"),
        ],
    },
    CommandSpec {
        group: "bohr",
        name: "embed",
        about: "translates of finite pieces of a Bohr set inside a target",
        params: &[
            p("spec", Bohr, Required, "Bohr set supplying the probes"),
            p("rule", Rule, Required, "target set rule"),
            p("lo", Int, D("0"), "window start"),
            p("hi", Int, D("9999"), "window end"),
            p("k", Int, D("3"), "probe size"),
            p("probes", Int, D("100"), "number of sampled probes"),
            p("seed", Int, D("0"), "sampling seed"),
        ],
    },
    CommandSpec {
        group: "means",
        name: "coeff",
        about: "mean Fourier coefficient of an indicator with its half-depth delta",
        params: &[
            p("rule", Rule, Required, "set rule"),
            p("theta", Frequency, Required, "frequency"),
            p("family", Family, D("initial"), "Folner family when no sequence is given"),
            p("seq", Sequence, Optional, "average along this sequence instead"),
            p("depth", Int, D("100000"), "averaging depth"),
        ],
    },
    CommandSpec {
        group: "means",
        name: "weyl",
        about: "Weyl averages along a sequence at N and at the powers of ten below it",
        params: &[
            p("seq", Sequence, Required, "pow(2.5), poly(0,1), logpow(1.2) or custom(<rule>)"),
            p("theta", Frequency, Required, "frequency"),
            p("N", Int, D("1000000"), "number of terms"),
        ],
    },
    CommandSpec {
        group: "means",
        name: "brn",
        about: "trigonometric reconstruction of an indicator from mean coefficients",
        params: &[
            p("rule", Rule, Required, "set rule"),
            p("thetas", FrequencyList, Required, "frequencies, e.g. grid(6) or 0,1/2"),
            p("family", Family, D("initial"), "Folner family"),
            p("depth", Int, D("100000"), "averaging depth"),
            p("check", Int, D("10000"), "sup-norm error measured on [0, check)"),
        ],
    },
    CommandSpec {
        group: "example",
        name: "build",
        about: "block parameters and intervals of the counterexample",
        params: &[
            p("a1", Int, D("10"), "first block start"),
            p("policy", Policy, D("b:19/10,a:3n"), "growth policy"),
            p("depth", Int, D("6"), "number of blocks"),
        ],
    },
    CommandSpec {
        group: "example",
        name: "verify",
        about: "per-block localization defect, half-mean obstruction and Bohr scan",
        params: &[
            p("a1", Int, D("10"), "first block start"),
            p("policy", Policy, D("b:19/10,a:3n"), "growth policy"),
            p("depth", Int, D("6"), "number of blocks"),
            p("phi", Phi, D("1@0"), "rational trigonometric polynomial"),
            p("scan", Flag, D("true"), "run the Bohr scan on the last block"),
            p("eps", FloatList, D("0.05,0.1,0.25"), "radius grid"),
            p("thetas", FrequencyList, D("grid(12)"), "frequency grid"),
            p("seeds", Int, D("8"), "grid frequencies kept by coefficient size"),
            p("centers", Int, D("4"), "centers tried per frequency"),
        ],
    },
    CommandSpec {
        group: "suite",
        name: "acceptance",
        about: "runs the acceptance criteria and writes one artifact set per criterion",
        params: &[p("strict", Flag, D("false"), "exit 1 when a criterion fails")],
    },
];

pub fn command_spec(path: &str) -> Result<&'static CommandSpec> {
    COMMANDS
        .iter()
        .find(|c| c.path() == path)
        .ok_or_else(|| LabError::parse(format!("unknown command {path:?}")))
}

/// Every `j/q` with `1 <= q <= max_q`, in lowest terms, by value.
pub fn rational_grid_upto(max_q: u64) -> Vec<Frequency> {
    let mut v: Vec<Frequency> = (1..=max_q)
        .flat_map(|q| (0..q as i64).map(move |j| Frequency::rational(j, q).unwrap()))
        .collect();
    v.sort_by(|a, b| a.theta().total_cmp(&b.theta()));
    v.dedup();
    v
}

/// Comma list of frequencies and `grid(Q)` items; repeats dropped.
pub fn parse_frequency_list(s: &str) -> Result<Vec<Frequency>> {
    let mut out: Vec<Frequency> = Vec::new();
    for item in split_top(s, ',') {
        let item = item.trim();
        let more = match item.strip_prefix("grid(").and_then(|r| r.strip_suffix(')')) {
            Some(q) => {
                let q: u64 = q.trim().parse().map_err(|_| LabError::parse(format!("bad grid {item:?}")))?;
                if q == 0 || q > 4096 {
                    return Err(LabError::domain(format!("grid bound must lie in [1, 4096], got {q}")));
                }
                rational_grid_upto(q)
            }
            None => vec![item.parse()?],
        };
        for f in more {
            if !out.contains(&f) {
                out.push(f);
            }
        }
    }
    if out.is_empty() {
        return Err(LabError::parse("empty frequency list"));
    }
    Ok(out)
}

pub fn parse_float_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|t| {
            t.trim()
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| LabError::parse(format!("bad number {t:?}")))
        })
        .collect()
}

pub fn parse_family(s: &str) -> Result<FolnerFamily> {
    match s.trim() {
        "centered" => Ok(FolnerFamily::Centered),
        "initial" => Ok(FolnerFamily::Initial),
        other => Err(LabError::parse(format!("unknown Folner family {other:?}, expected centered or initial"))),
    }
}

fn as_text(name: &str, v: &Value) -> Result<String> {
    match v {
        Value::String(s) => Ok(s.trim().to_string()),
        Value::Number(n) => Ok(n.to_string()),
        Value::Bool(b) => Ok(b.to_string()),
        _ => Err(LabError::parse(format!("parameter {name} must be a string, number or boolean"))),
    }
}

/// Canonical JSON value of one parameter.
fn canonical(spec: &ParamSpec, v: &Value) -> Result<Value> {
    let name = spec.name;
    let text = as_text(name, v)?;
    let bad = |e: LabError| LabError::parse(format!("parameter {name}: {e}"));
    Ok(match spec.kind {
        Int => match v {
            Value::Number(n) if n.is_i64() => v.clone(),
            _ => Value::from(
                text.parse::<i64>()
                    .map_err(|_| LabError::parse(format!("parameter {name} must be an integer, got {text:?}")))?,
            ),
        },
        Float => {
            let x = match v {
                Value::Number(n) => n.as_f64(),
                _ => text.parse::<f64>().ok(),
            }
            .filter(|x| x.is_finite())
            .ok_or_else(|| LabError::parse(format!("parameter {name} must be a number, got {text:?}")))?;
            Value::from(x)
        }
        Flag => match (v, text.as_str()) {
            (Value::Bool(b), _) => Value::Bool(*b),
            (_, "true") => Value::Bool(true),
            (_, "false") => Value::Bool(false),
            _ => return Err(LabError::parse(format!("parameter {name} must be true or false"))),
        },
        Group => Value::from(text.parse::<FiniteAbelianGroup>().map_err(bad)?.to_string()),
        Rule => Value::from(text.parse::<SetRule>().map_err(bad)?.to_string()),
        Bohr => Value::from(text.parse::<BohrSpec>().map_err(bad)?.to_string()),
        Sequence => Value::from(text.parse::<HartmanSequence>().map_err(bad)?.to_string()),
        Kind::Frequency => Value::from(text.parse::<crate::frequency::Frequency>().map_err(bad)?.to_string()),
        FrequencyList => {
            parse_frequency_list(&text).map_err(bad)?;
            Value::from(text)
        }
        FloatList => {
            let xs: Vec<String> = parse_float_list(&text).map_err(bad)?.iter().map(|x| x.to_string()).collect();
            Value::from(xs.join(","))
        }
        Policy => Value::from(text.parse::<GrowthPolicy>().map_err(bad)?.to_string()),
        Phi => Value::from(text.parse::<TrigPolynomial>().map_err(bad)?.to_string()),
        Family => {
            parse_family(&text).map_err(bad)?;
            Value::from(text)
        }
        Subset => Value::from(text),
    })
}

/// A command with its parameters and output directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub command: String,
    #[serde(default)]
    pub params: BTreeMap<String, Value>,
    #[serde(default)]
    pub out: Option<String>,
}

impl ExperimentConfig {
    pub fn new(command: &str) -> Self {
        ExperimentConfig {
            command: command.to_string(),
            params: BTreeMap::new(),
            out: None,
        }
    }

    pub fn with(mut self, name: &str, v: impl Into<Value>) -> Self {
        self.params.insert(name.to_string(), v.into());
        self
    }

    pub fn spec(&self) -> Result<&'static CommandSpec> {
        command_spec(&self.command)
    }

    /// Pretty JSON with sorted parameter keys.
    pub fn to_text(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn from_text(s: &str) -> Result<Self> {
        serde_json::from_str(s).map_err(|e| LabError::parse(format!("config: {e}")))
    }

    /// Parameters from a config file: either the full form or a flat map of flags.
    pub fn merge_file(&mut self, text: &str) -> Result<()> {
        let v: Value = serde_json::from_str(text).map_err(|e| LabError::parse(format!("config file: {e}")))?;
        let Value::Object(mut obj) = v else {
            return Err(LabError::parse("config file must hold a JSON object"));
        };
        if let Some(params) = obj.remove("params") {
            if let Some(cmd) = obj.get("command").and_then(Value::as_str) {
                if cmd != self.command {
                    return Err(LabError::parse(format!("config is for {cmd:?}, not {:?}", self.command)));
                }
            }
            if let Some(out) = obj.get("out").and_then(Value::as_str) {
                self.out.get_or_insert_with(|| out.to_string());
            }
            let Value::Object(p) = params else {
                return Err(LabError::parse("config params must be an object"));
            };
            obj = p;
        }
        for (k, v) in obj {
            self.params.entry(k).or_insert(v);
        }
        Ok(())
    }

    /// Checks every parameter, writes defaults explicitly and canonicalizes
    /// literals. Idempotent.
    pub fn normalize(&self) -> Result<Self> {
        let spec = self.spec()?;
        if let Some(k) = self.params.keys().find(|k| spec.param(k).is_none()) {
            return Err(LabError::parse(format!("{} takes no parameter {k:?}", spec.path())));
        }
        let mut params = BTreeMap::new();
        for ps in spec.params {
            let given = self.params.get(ps.name).filter(|v| !v.is_null());
            let v = match (given, ps.default) {
                (Some(v), _) => v.clone(),
                (None, D(d)) => Value::from(d),
                (None, Optional) => continue,
                (None, Required) => {
                    return Err(LabError::parse(format!("{} needs --{}", spec.path(), ps.name)));
                }
            };
            params.insert(ps.name.to_string(), canonical(ps, &v)?);
        }
        Ok(ExperimentConfig {
            command: self.command.clone(),
            params,
            out: self.out.clone(),
        })
    }

    fn raw(&self, name: &str) -> Result<&Value> {
        self.params
            .get(name)
            .ok_or_else(|| LabError::parse(format!("missing parameter {name:?}")))
    }

    pub fn has(&self, name: &str) -> bool {
        self.params.contains_key(name)
    }

    pub fn text(&self, name: &str) -> Result<String> {
        as_text(name, self.raw(name)?)
    }

    pub fn int(&self, name: &str) -> Result<i64> {
        let t = self.text(name)?;
        t.parse().map_err(|_| LabError::parse(format!("parameter {name} must be an integer, got {t:?}")))
    }

    /// A nonnegative integer.
    pub fn count(&self, name: &str) -> Result<u64> {
        let v = self.int(name)?;
        u64::try_from(v).map_err(|_| LabError::domain(format!("parameter {name} must be nonnegative, got {v}")))
    }

    pub fn flag(&self, name: &str) -> Result<bool> {
        Ok(self.text(name)? == "true")
    }

    pub fn parsed<T: std::str::FromStr<Err = LabError>>(&self, name: &str) -> Result<T> {
        self.text(name)?.parse()
    }

    pub fn frequencies(&self, name: &str) -> Result<Vec<Frequency>> {
        parse_frequency_list(&self.text(name)?)
    }

    pub fn floats(&self, name: &str) -> Result<Vec<f64>> {
        parse_float_list(&self.text(name)?)
    }

    pub fn family(&self, name: &str) -> Result<FolnerFamily> {
        parse_family(&self.text(name)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn defaults_become_explicit() {
        let c = ExperimentConfig::new("means weyl")
            .with("seq", "pow(2.5)")
            .with("theta", "0.41421356")
            .normalize()
            .unwrap();
        assert_eq!(c.params["N"], Value::from(1_000_000));
        assert_eq!(c.normalize().unwrap(), c);
        let k = ExperimentConfig::new("group kneser").with("group", "Z6").normalize().unwrap();
        assert!(!k.has("a"));
    }

    #[test]
    fn validation_errors() {
        let missing = ExperimentConfig::new("means weyl").with("seq", "pow(2.5)").normalize();
        assert!(matches!(missing, Err(LabError::Parse(_))));
        let extra = ExperimentConfig::new("group dft").with("group", "Z6").with("a", "{0}").with("zz", 1).normalize();
        assert!(extra.is_err());
        let bad = ExperimentConfig::new("density scan").with("rule", "mod(0,1)").normalize();
        assert!(bad.is_err());
        assert!(ExperimentConfig::new("group fly").normalize().is_err());
    }

    #[test]
    fn literals_are_canonical() {
        let c = ExperimentConfig::new("example verify")
            .with("phi", " 1@0 ")
            .with("eps", "0.10, 0.2")
            .with("depth", "4")
            .normalize()
            .unwrap();
        assert_eq!(c.params["phi"], Value::from("1@0"));
        assert_eq!(c.params["eps"], Value::from("0.1,0.2"));
        assert_eq!(c.params["depth"], Value::from(4));
        assert_eq!(c.params["scan"], Value::Bool(true));
    }

    #[test]
    fn flat_and_full_config_files() {
        let mut c = ExperimentConfig::new("group kneser").with("a", "{0}");
        c.merge_file(r#"{"group": "Z6", "a": "{0,2}", "b": "{0,3}"}"#).unwrap();
        assert_eq!(c.params["a"], Value::from("{0}"));
        assert_eq!(c.params["group"], Value::from("Z6"));
        let mut d = ExperimentConfig::new("group kneser");
        d.merge_file(&c.to_text()).unwrap();
        assert_eq!(d.params, c.params);
        let mut e = ExperimentConfig::new("group dft");
        assert!(e.merge_file(&c.to_text()).is_err());
    }

    #[test]
    fn frequency_lists() {
        assert_eq!(parse_frequency_list("grid(3)").unwrap().len(), 4);
        assert_eq!(parse_frequency_list("grid(12)").unwrap().len(), 46);
        assert_eq!(parse_frequency_list("1/2,0.5,2/4").unwrap().len(), 2);
        assert!(parse_frequency_list("grid(0)").is_err());
    }

    fn value() -> impl Strategy<Value = Value> {
        prop_oneof![
            any::<i64>().prop_map(Value::from),
            any::<f64>().prop_filter("finite", |x| x.is_finite()).prop_map(Value::from),
            any::<bool>().prop_map(Value::Bool),
            "[ -~]{0,12}".prop_map(Value::from),
        ]
    }

    proptest! {
        #[test]
        fn text_round_trip(
            cmd in 0..COMMANDS.len(),
            params in proptest::collection::btree_map("[a-zN-][a-z0-9-]{0,6}", value(), 0..6),
            out in proptest::option::of("[a-z/]{1,10}"),
        ) {
            let c = ExperimentConfig { command: COMMANDS[cmd].path(), params, out };
            prop_assert_eq!(ExperimentConfig::from_text(&c.to_text()).unwrap(), c);
        }

        #[test]
        fn normalized_round_trip(depth in 1i64..7, a1 in 2i64..50, scan in any::<bool>()) {
            let c = ExperimentConfig::new("example verify")
                .with("depth", depth)
                .with("a1", a1.to_string())
                .with("scan", scan)
                .normalize()
                .unwrap();
            prop_assert_eq!(ExperimentConfig::from_text(&c.to_text()).unwrap(), c.clone());
            prop_assert_eq!(c.normalize().unwrap(), c);
        }
    }
}
