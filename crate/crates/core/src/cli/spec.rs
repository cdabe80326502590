//! Problem specification files.
//!
//! A file holds one problem or `{"problems": [...]}`. Every field is written
//! back on serialization, so parsing and re-serializing is lossless.

use serde::{Deserialize, Serialize};

use crate::embedding::{Embedding, FunctionTable, SearchMode};
use crate::error::{Error, Result};
use crate::group::{cyclic_digits, AbelianGroup};
use crate::prob::{compose_markov, ConditionalPmf, JointPmf};
use crate::rate::region::conditional_grid;
use crate::rate::theorem::MAX_PERMUTED_DIGITS;
use crate::rate::{
    optimal_reconstruction, ChannelGrid, Channels, Distortion, FixedEmbedding, GroupChoice, OptionPolicy, Retention,
    SweepConfig,
};
use crate::sim::SimConfig;

/// Distortion measure for reconstructing a function of `(X, Y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "preset", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DistortionSpec {
    /// `d = 1[z != F(x, y)]`; `function[x][y]` is `F`. The reconstruction
    /// alphabet defaults to `0..=max F`.
    HammingOnFunction {
        function: Vec<Vec<usize>>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        z_size: Option<usize>,
    },
    /// Hamming distortion on the pair `(x, y)`.
    Lossless,
    /// Explicit `values[x][y][z]`.
    Table { values: Vec<Vec<Vec<f64>>> },
}

/// Auxiliary channel pair `P_{U|X}`, `P_{V|Y}` (rows indexed by the source
/// symbol).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChannelSpec {
    pub u: Vec<Vec<f64>>,
    pub v: Vec<Vec<f64>>,
}

/// Which auxiliary channels to sweep.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum AuxiliarySpec {
    /// `U = X`, `V = Y`: lossless coding of the function.
    #[default]
    Identity,
    /// Every channel on the lattice of step `sweep.grid_step`.
    Grid { u: usize, v: usize },
    List { channels: Vec<ChannelSpec> },
}

/// A group element: digits in canonical factor order, or an integer for a
/// group written as a single cyclic `Zn`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ElementSpec {
    Integer(u64),
    Digits(Vec<u64>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EmbeddingSpec {
    pub group: String,
    pub s_u: Vec<ElementSpec>,
    pub s_v: Vec<ElementSpec>,
    /// Also try every reassignment of the symbols among the same elements.
    #[serde(default)]
    pub relabel: bool,
}

/// Groups tried for the reconstruction function.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(tag = "policy", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GroupPolicy {
    /// Every class with order between the image size and `|U||V|`.
    #[default]
    Auto,
    List { groups: Vec<String> },
    Embeddings { embeddings: Vec<EmbeddingSpec> },
}

fn default_grid_step() -> f64 {
    0.1
}

fn default_permutation_cap() -> usize {
    MAX_PERMUTED_DIGITS
}

fn default_embedding_limit() -> usize {
    4096
}

fn default_search() -> SearchMode {
    SearchMode::All
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    #[serde(default = "default_grid_step")]
    pub grid_step: f64,
    /// Finer step for a second pass around frontier channels.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub refine: Option<f64>,
    /// Largest number of digits whose orders are all tried.
    #[serde(default = "default_permutation_cap")]
    pub permutation_cap: usize,
    #[serde(default)]
    pub options: OptionPolicy,
    #[serde(default)]
    pub retention: Retention,
    #[serde(default = "default_embedding_limit")]
    pub embedding_limit: usize,
    #[serde(default = "default_search")]
    pub embedding_search: SearchMode,
}

impl Default for SweepSpec {
    fn default() -> Self {
        SweepSpec {
            grid_step: default_grid_step(),
            refine: None,
            permutation_cap: default_permutation_cap(),
            options: OptionPolicy::Min,
            retention: Retention::Pareto,
            embedding_limit: default_embedding_limit(),
            embedding_search: default_search(),
        }
    }
}

/// One distributed coding problem.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    /// `P_XY` with rows indexed by `x`.
    pub pmf: Vec<Vec<f64>>,
    pub distortion: DistortionSpec,
    #[serde(default)]
    pub auxiliary: AuxiliarySpec,
    #[serde(default)]
    pub groups: GroupPolicy,
    #[serde(default)]
    pub sweep: SweepSpec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sim: Option<SimConfig>,
}

/// Contents of a specification file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpecFile {
    Many { problems: Vec<ProblemSpec> },
    One(ProblemSpec),
}

impl SpecFile {
    pub fn parse(text: &str) -> Result<Self> {
        let file: SpecFile = serde_json::from_str(text).map_err(|e| Error::Parse(format!("problem spec: {e}")))?;
        for p in file.problems() {
            p.validate()?;
        }
        Ok(file)
    }

    pub fn problems(&self) -> &[ProblemSpec] {
        match self {
            SpecFile::Many { problems } => problems,
            SpecFile::One(p) => std::slice::from_ref(p),
        }
    }

    /// Compact JSON with fields in declaration order.
    pub fn canonical_json(&self) -> String {
        serde_json::to_string(self).expect("spec serializes")
    }
}

impl ProblemSpec {
    pub fn joint_pmf(&self) -> Result<JointPmf> {
        JointPmf::from_rows(&self.pmf)
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.pmf.len(), self.pmf.first().map_or(0, Vec::len))
    }

    pub fn distortion(&self) -> Result<Distortion> {
        let (nx, ny) = self.sizes();
        match &self.distortion {
            DistortionSpec::HammingOnFunction { function, z_size } => {
                if function.len() != nx || function.iter().any(|r| r.len() != ny) {
                    return Err(Error::arg(format!("target function must be {nx} x {ny}")));
                }
                let flat: Vec<usize> = function.concat();
                let z = z_size.unwrap_or_else(|| flat.iter().max().map_or(1, |m| m + 1));
                Distortion::hamming_on_function(nx, ny, &flat, z)
            }
            DistortionSpec::Lossless => Distortion::lossless_pair(nx, ny),
            DistortionSpec::Table { values } => {
                if values.len() != nx || values.iter().any(|r| r.len() != ny) {
                    return Err(Error::arg(format!("distortion table must be {nx} x {ny} x |Z|")));
                }
                let nz = values[0][0].len();
                if values.iter().flatten().any(|c| c.len() != nz) {
                    return Err(Error::arg("ragged distortion table"));
                }
                Distortion::new(nx, ny, nz, values.iter().flatten().flatten().copied().collect())
            }
        }
    }

    pub fn channels(&self) -> Result<Channels> {
        let (nx, ny) = self.sizes();
        match &self.auxiliary {
            AuxiliarySpec::Identity => {
                Ok(Channels::List(vec![(ConditionalPmf::identity(nx), ConditionalPmf::identity(ny))]))
            }
            AuxiliarySpec::Grid { u, v } => Ok(Channels::Grid(ChannelGrid::new(nx, ny, *u, *v, self.sweep.grid_step)?)),
            AuxiliarySpec::List { channels } => {
                let mut out = Vec::with_capacity(channels.len());
                for c in channels {
                    let cu = ConditionalPmf::from_rows(&c.u)?;
                    let cv = ConditionalPmf::from_rows(&c.v)?;
                    if c.u.len() != nx || c.v.len() != ny {
                        return Err(Error::arg("channel rows must match the source alphabets"));
                    }
                    out.push((cu, cv));
                }
                Ok(Channels::List(out))
            }
        }
    }

    /// The reconstruction `G(U, V)` under the identity channel, i.e. the
    /// function the decoder needs when `U = X`, `V = Y`.
    pub fn target_function(&self) -> Result<FunctionTable> {
        let (nx, ny) = self.sizes();
        let pmf = compose_markov(&self.joint_pmf()?, &ConditionalPmf::identity(nx), &ConditionalPmf::identity(ny))?;
        optimal_reconstruction(&pmf, &self.distortion()?)
    }

    pub fn sweep_config(&self) -> Result<SweepConfig> {
        let groups = match &self.groups {
            GroupPolicy::Auto => GroupChoice::Auto,
            GroupPolicy::List { groups } => {
                GroupChoice::List(groups.iter().map(|g| AbelianGroup::parse(g)).collect::<Result<_>>()?)
            }
            GroupPolicy::Embeddings { embeddings } => {
                GroupChoice::Embeddings(embeddings.iter().map(EmbeddingSpec::build).collect::<Result<_>>()?)
            }
        };
        if self.sweep.permutation_cap > MAX_PERMUTED_DIGITS {
            return Err(Error::arg(format!("permutation cap is at most {MAX_PERMUTED_DIGITS} digits")));
        }
        Ok(SweepConfig {
            groups,
            embedding_mode: self.sweep.embedding_search,
            embedding_limit: self.sweep.embedding_limit,
            policy: self.sweep.options.clone(),
            retention: self.sweep.retention,
            refine: self.sweep.refine,
            max_digits: self.sweep.permutation_cap,
        })
    }

    /// Checks everything that can be checked without running a sweep.
    pub fn validate(&self) -> Result<()> {
        let pmf = self.joint_pmf()?;
        if pmf.rank() != 2 {
            return Err(Error::arg("pmf must be a matrix"));
        }
        self.distortion()?;
        match &self.auxiliary {
            AuxiliarySpec::Grid { u, v } => {
                conditional_grid(1, *u, self.sweep.grid_step, usize::MAX)?;
                conditional_grid(1, *v, self.sweep.grid_step, usize::MAX)?;
            }
            _ => {
                self.channels()?;
            }
        }
        if let Some(step) = self.sweep.refine {
            if !(step > 0.0 && step < self.sweep.grid_step) {
                return Err(Error::arg("refinement step must be below the grid step"));
            }
        }
        self.sweep_config()?;
        if let Some(sim) = &self.sim {
            sim.validate()?;
        }
        Ok(())
    }
}

impl ElementSpec {
    fn index(&self, group: &AbelianGroup, cyclic: Option<u64>) -> Result<usize> {
        let digits = match (self, cyclic) {
            (ElementSpec::Digits(d), _) => d.clone(),
            (ElementSpec::Integer(x), Some(n)) => cyclic_digits(n, *x)?,
            (ElementSpec::Integer(_), None) => {
                return Err(Error::arg(format!("elements of {group} must be given as digit lists")));
            }
        };
        Ok(group.index_of(&group.element(digits)?))
    }
}

impl EmbeddingSpec {
    pub fn build(&self) -> Result<FixedEmbedding> {
        let group = AbelianGroup::parse(&self.group)?;
        // integers are allowed for groups written as one cyclic term
        let cyclic = self
            .group
            .trim()
            .trim_start_matches(['Z', 'z'])
            .trim_start_matches('_')
            .parse::<u64>()
            .ok();
        let s_u = self.s_u.iter().map(|e| e.index(&group, cyclic)).collect::<Result<Vec<_>>>()?;
        let s_v = self.s_v.iter().map(|e| e.index(&group, cyclic)).collect::<Result<Vec<_>>>()?;
        let n = group.order() as usize;
        let embedding = Embedding::new(group, s_u, s_v, vec![None; n])?;
        Ok(FixedEmbedding { embedding, relabel: self.relabel })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const XOR: &str = r#"{
        "name": "xor",
        "pmf": [[0.4, 0.1], [0.1, 0.4]],
        "distortion": {"preset": "hamming-on-function", "function": [[0, 1], [1, 0]]}
    }"#;

    #[test]
    fn parses_with_defaults_and_round_trips() {
        let file = SpecFile::parse(XOR).unwrap();
        let p = &file.problems()[0];
        assert_eq!(p.auxiliary, AuxiliarySpec::Identity);
        assert_eq!(p.groups, GroupPolicy::Auto);
        assert_eq!(p.sweep.grid_step, 0.1);
        let again = SpecFile::parse(&file.canonical_json()).unwrap();
        assert_eq!(again, file);
        assert_eq!(again.canonical_json(), file.canonical_json());
    }

    #[test]
    fn rejects_bad_input() {
        assert!(SpecFile::parse(r#"{"pmf": [[0.5, 0.6]], "distortion": {"preset": "lossless"}}"#).is_err());
        assert!(SpecFile::parse(r#"{"pmf": [[1.0]], "distortion": {"preset": "lossless"}, "extra": 1}"#).is_err());
        let bad_fn = r#"{"pmf": [[0.5, 0.5]], "distortion": {"preset": "hamming-on-function", "function": [[0]]}}"#;
        assert!(SpecFile::parse(bad_fn).is_err());
    }

    #[test]
    fn embedding_elements() {
        let e = EmbeddingSpec {
            group: "Z7".into(),
            s_u: (0..4).map(ElementSpec::Integer).collect(),
            s_v: [0, 6, 5, 4].into_iter().map(ElementSpec::Integer).collect(),
            relabel: false,
        };
        let fixed = e.build().unwrap();
        assert_eq!(fixed.embedding.s_v(), &[0, 6, 5, 4]);
        let bits = EmbeddingSpec {
            group: "Z2^3".into(),
            s_u: vec![ElementSpec::Digits(vec![0, 0, 1]), ElementSpec::Integer(1)],
            s_v: vec![],
            relabel: false,
        };
        assert!(bits.build().is_err());
    }
}
