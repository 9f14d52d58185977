//! JSON artifacts and scene resolution for the command-line tool.
//!
//! Every file the tool reads or writes is a JSON document with a `schema`
//! tag and phases rendered as exact `"p/q"` strings.  Output is canonical:
//! two-space pretty printing, struct-order keys, one trailing newline — so
//! serializing a parsed canonical file reproduces it byte for byte.
//!
//! A *scene* bundles one evaluation problem: a surface (named model, file
//! reference, or inline description), an optional datum file (absent means
//! "generate a pure-gauge datum from the seed"), and optional choice and
//! group references.  Relative paths inside a scene resolve against the
//! directory containing the scene file, so scene bundles can be moved as a
//! unit.
//!
//! [`OrientifoldDatum`] keeps its local data in maps keyed by index tuples,
//! which JSON objects cannot express, so the wire form [`DatumFile`] writes
//! each map as a list of `[indices..., value]` rows in key order.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::cohomology::TwistedCochain;
use crate::cover::{DomainChoice, DoubleCover, IndexScheme, Surface, SurfaceSpec};
use crate::data::{OrientifoldDatum, Transport, Violation};
use crate::descent::{FlatEquivariantDatum, FlatGerbeDatum, FlatJandlDatum};
use crate::group::OrientifoldGroup;
use crate::holonomy::HolonomyValue;
use crate::phase::Phase;

pub const SCHEMA_SCENE: &str = "orientifold/scene/1";
pub const SCHEMA_SURFACE: &str = "orientifold/surface/1";
pub const SCHEMA_GROUP: &str = "orientifold/group/1";
pub const SCHEMA_DATUM: &str = "orientifold/datum/1";
pub const SCHEMA_CHOICE: &str = "orientifold/choice/1";
pub const SCHEMA_FLAT: &str = "orientifold/flat-equivariant/1";
pub const SCHEMA_JANDL: &str = "orientifold/flat-jandl/1";
pub const SCHEMA_GERBE: &str = "orientifold/flat-gerbe/1";
pub const SCHEMA_VALIDATION: &str = "orientifold/validation-report/1";
pub const SCHEMA_HOLONOMY: &str = "orientifold/holonomy-report/1";
pub const SCHEMA_COHOMOLOGY: &str = "orientifold/cohomology-report/1";
pub const SCHEMA_CLASSIFY: &str = "orientifold/classify-report/1";
pub const SCHEMA_DESCEND: &str = "orientifold/descend-report/1";

/// Largest choice space `--sweep all` is willing to enumerate.
pub const SWEEP_ALL_CAP: u128 = 1 << 20;

// ---------------------------------------------------------------------------
// errors

/// Anything that can go wrong between a file on disk and a runnable scene.
/// [`SceneError::exit_code`] fixes the process-level meaning: 2 for input
/// that could not be read or understood, 1 for well-formed input the
/// semantics refuse.
#[derive(Debug, thiserror::Error)]
pub enum SceneError {
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// serde_json's message already carries line and column.
    #[error("{path}: {source}")]
    Parse {
        path: String,
        #[source]
        source: serde_json::Error,
    },
    #[error("{path}: schema is {found:?}, expected {want:?}")]
    Schema { path: String, found: String, want: &'static str },
    #[error("surface: {0}")]
    Surface(#[from] crate::cover::SurfaceError),
    #[error("group: {0}")]
    Group(#[from] crate::group::GroupError),
    #[error("datum: {0}")]
    Datum(#[from] crate::data::DatumError),
    #[error("cohomology: {0}")]
    Cohomology(#[from] crate::cohomology::CohomologyError),
    #[error("descent: {0}")]
    Descent(#[from] crate::descent::DescentError),
    /// Malformed request (bad flag value, unknown name, infeasible ask).
    #[error("{0}")]
    Invalid(String),
    /// Well-formed input refused on semantic grounds.
    #[error("{0}")]
    Refused(String),
}

impl SceneError {
    pub fn exit_code(&self) -> i32 {
        match self {
            SceneError::Refused(_) => 1,
            SceneError::Descent(e) => match e {
                // shape problems mean the file itself is malformed
                crate::descent::DescentError::Shape
                | crate::descent::DescentError::BadRank
                | crate::descent::DescentError::GaugeShape => 2,
                _ => 1,
            },
            _ => 2,
        }
    }
}

// ---------------------------------------------------------------------------
// canonical reading and writing

/// Canonical rendering: pretty JSON plus a trailing newline.
pub fn to_canonical_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("artifact types serialize");
    s.push('\n');
    s
}

pub fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, SceneError> {
    let text = fs::read_to_string(path).map_err(|source| SceneError::Io {
        path: path.display().to_string(),
        source,
    })?;
    serde_json::from_str(&text).map_err(|source| SceneError::Parse {
        path: path.display().to_string(),
        source,
    })
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<(), SceneError> {
    fs::write(path, to_canonical_json(value)).map_err(|source| SceneError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn check_schema(path: &Path, found: &str, want: &'static str) -> Result<(), SceneError> {
    if found == want {
        Ok(())
    } else {
        Err(SceneError::Schema {
            path: path.display().to_string(),
            found: found.to_string(),
            want,
        })
    }
}

// ---------------------------------------------------------------------------
// artifact files

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SurfaceFile {
    pub schema: String,
    pub surface: SurfaceSpec,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GroupFile {
    pub schema: String,
    pub group: OrientifoldGroup,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ChoiceFile {
    pub schema: String,
    pub choice: DomainChoice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FlatFile {
    pub schema: String,
    pub datum: FlatEquivariantDatum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JandlFile {
    pub schema: String,
    pub datum: FlatJandlDatum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GerbeFile {
    pub schema: String,
    pub datum: FlatGerbeDatum,
}

/// Wire form of a local datum: every tuple-keyed map becomes a list of
/// `[indices..., value]` rows, sorted by key.  Lossless both ways.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatumFile {
    pub schema: String,
    pub rank: usize,
    pub scheme: IndexScheme,
    pub face_b: Vec<(usize, usize, Phase)>,
    pub edge_a: Vec<(usize, usize, usize, Phase)>,
    pub g_v: Vec<(usize, usize, usize, usize, Phase)>,
    pub edge_pi: Vec<(usize, usize, Phase)>,
    pub chi_v: Vec<(usize, usize, usize, Phase)>,
    pub f_v: Vec<(usize, usize, Phase)>,
    pub edge_t: Vec<(usize, usize, Transport)>,
    pub g_big: Vec<(usize, usize, usize, Transport)>,
    pub h_big: Vec<(usize, usize, Transport)>,
}

impl DatumFile {
    pub fn from_datum(d: &OrientifoldDatum) -> DatumFile {
        DatumFile {
            schema: SCHEMA_DATUM.to_string(),
            rank: d.rank,
            scheme: d.scheme.clone(),
            face_b: d.face_b.iter().map(|(&(a, b), v)| (a, b, v.clone())).collect(),
            edge_a: d.edge_a.iter().map(|(&(a, b, c), v)| (a, b, c, v.clone())).collect(),
            g_v: d.g_v.iter().map(|(&(a, b, c, e), v)| (a, b, c, e, v.clone())).collect(),
            edge_pi: d.edge_pi.iter().map(|(&(a, b), v)| (a, b, v.clone())).collect(),
            chi_v: d.chi_v.iter().map(|(&(a, b, c), v)| (a, b, c, v.clone())).collect(),
            f_v: d.f_v.iter().map(|(&(a, b), v)| (a, b, v.clone())).collect(),
            edge_t: d.edge_t.iter().map(|(&(a, b), v)| (a, b, v.clone())).collect(),
            g_big: d.g_big.iter().map(|(&(a, b, c), v)| (a, b, c, v.clone())).collect(),
            h_big: d.h_big.iter().map(|(&(a, b), v)| (a, b, v.clone())).collect(),
        }
    }

    pub fn into_datum(self) -> OrientifoldDatum {
        OrientifoldDatum {
            rank: self.rank,
            scheme: self.scheme,
            face_b: self.face_b.into_iter().map(|(a, b, v)| ((a, b), v)).collect(),
            edge_a: self.edge_a.into_iter().map(|(a, b, c, v)| ((a, b, c), v)).collect(),
            g_v: self.g_v.into_iter().map(|(a, b, c, e, v)| ((a, b, c, e), v)).collect(),
            edge_pi: self.edge_pi.into_iter().map(|(a, b, v)| ((a, b), v)).collect(),
            chi_v: self.chi_v.into_iter().map(|(a, b, c, v)| ((a, b, c), v)).collect(),
            f_v: self.f_v.into_iter().map(|(a, b, v)| ((a, b), v)).collect(),
            edge_t: self.edge_t.into_iter().map(|(a, b, v)| ((a, b), v)).collect(),
            g_big: self.g_big.into_iter().map(|(a, b, c, v)| ((a, b, c), v)).collect(),
            h_big: self.h_big.into_iter().map(|(a, b, v)| ((a, b), v)).collect(),
        }
    }
}

/// Wire form of a holonomy value: exact values stay `"p/q"`, matrix-rank
/// values surface as a complex number.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ValueWire {
    Exact { angle: Phase },
    Complex { re: f64, im: f64 },
}

impl ValueWire {
    pub fn from_value(v: &HolonomyValue) -> ValueWire {
        match v {
            HolonomyValue::Exact(p) => ValueWire::Exact { angle: p.clone() },
            HolonomyValue::Complex(z) => ValueWire::Complex { re: z.re, im: z.im },
        }
    }
}

/// Wire form of a twisted cochain; the reader checks the length against the
/// group before use.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CochainWire {
    pub degree: usize,
    pub values: Vec<Phase>,
}

impl CochainWire {
    pub fn from_cochain(c: &TwistedCochain) -> CochainWire {
        CochainWire { degree: c.degree, values: c.values.clone() }
    }

    pub fn into_cochain(self, group: &OrientifoldGroup) -> Result<TwistedCochain, SceneError> {
        let c = TwistedCochain { degree: self.degree, values: self.values };
        c.check_shape(group)?;
        Ok(c)
    }
}

// ---------------------------------------------------------------------------
// reports

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ValidationFile {
    pub schema: String,
    pub rank: usize,
    pub clean: bool,
    pub violations: Vec<Violation>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HolonomyFile {
    pub schema: String,
    pub value: ValueWire,
    pub rank: usize,
    pub choices_swept: usize,
    pub invariant: bool,
    pub exhaustive: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CohomologyFile {
    pub schema: String,
    pub group: String,
    pub epsilon: Vec<i8>,
    pub degree: usize,
    pub order: u128,
    pub invariant_factors: Vec<u64>,
    pub representatives: Vec<CochainWire>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClassifyFile {
    pub schema: String,
    pub group: String,
    pub epsilon: Vec<i8>,
    pub classes: u128,
    pub invariant_factors: Vec<u64>,
    /// one degree-2 cocycle per class, trivial class first
    pub twists: Vec<CochainWire>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DescendFile {
    pub schema: String,
    /// `"jandl"` when the group has reflections, else `"plain"`
    pub kind: String,
    pub clean: bool,
    pub violations: Vec<Violation>,
    /// where the quotient datum was written, if `--out` was given
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub written: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub jandl: Option<FlatJandlDatum>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub plain: Option<FlatGerbeDatum>,
}

// ---------------------------------------------------------------------------
// scenes

/// A surface reference inside a scene: a model name (`"klein"`), a path to
/// a surface file (anything containing `.json`), or an inline description.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SurfaceRef {
    Name(String),
    Inline(SurfaceSpec),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SceneFile {
    pub schema: String,
    pub surface: SurfaceRef,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub datum: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub group: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub choice: Option<String>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_rank")]
    pub rank: usize,
}

fn default_rank() -> usize {
    1
}

/// A scene resolved against the filesystem: surface built, double cover
/// constructed, datum loaded or generated, references followed.
pub struct LoadedScene {
    pub cover: DoubleCover,
    pub datum: OrientifoldDatum,
    pub choice: Option<DomainChoice>,
    pub group: Option<OrientifoldGroup>,
    pub seed: u64,
    pub rank: usize,
    /// whether the datum came from a file (false: generated pure gauge)
    pub datum_from_file: bool,
}

impl SceneFile {
    pub fn surface_spec(&self, base: &Path) -> Result<SurfaceSpec, SceneError> {
        match &self.surface {
            SurfaceRef::Inline(spec) => Ok(spec.clone()),
            SurfaceRef::Name(s) if s.contains(".json") => {
                let path = base.join(s);
                let file: SurfaceFile = read_json(&path)?;
                check_schema(&path, &file.schema, SCHEMA_SURFACE)?;
                Ok(file.surface)
            }
            SurfaceRef::Name(s) => Ok(SurfaceSpec::named(s)?),
        }
    }

    /// Resolve every reference.  `seed` and `rank` from the command line
    /// take precedence over the scene's stored values.
    pub fn resolve(
        &self,
        base: &Path,
        seed_override: Option<u64>,
        rank_override: Option<usize>,
    ) -> Result<LoadedScene, SceneError> {
        let seed = seed_override.unwrap_or(self.seed);
        let rank = rank_override.unwrap_or(self.rank);
        let spec = self.surface_spec(base)?;
        let surface = Surface::build(&spec)?;
        let cover = DoubleCover::new(surface)?;

        let group = match &self.group {
            None => None,
            Some(rel) => {
                let path = base.join(rel);
                let file: GroupFile = read_json(&path)?;
                check_schema(&path, &file.schema, SCHEMA_GROUP)?;
                Some(file.group)
            }
        };

        let (datum, datum_from_file) = match &self.datum {
            Some(rel) => {
                let path = base.join(rel);
                let file: DatumFile = read_json(&path)?;
                check_schema(&path, &file.schema, SCHEMA_DATUM)?;
                let d = file.into_datum();
                if let Some(r) = rank_override {
                    if r != d.rank {
                        return Err(SceneError::Invalid(format!(
                            "--rank {r} conflicts with the datum file's rank {}",
                            d.rank
                        )));
                    }
                }
                (d, true)
            }
            None => {
                let scheme = default_scheme(&cover);
                (crate::data::generate_pure_gauge(&cover, &scheme, rank, seed, None)?, false)
            }
        };

        let choice = match &self.choice {
            None => None,
            Some(rel) => {
                let path = base.join(rel);
                let file: ChoiceFile = read_json(&path)?;
                check_schema(&path, &file.schema, SCHEMA_CHOICE)?;
                Some(file.choice)
            }
        };

        Ok(LoadedScene { cover, datum, choice, group, seed, rank, datum_from_file })
    }
}

/// The default index scheme for generated data: two indices everywhere,
/// swapped by the involution, so conventions with nontrivial index action
/// get exercised.
pub fn default_scheme(dc: &DoubleCover) -> IndexScheme {
    IndexScheme::full(dc, 2, vec![1, 0])
}

pub fn load_scene(path: &Path) -> Result<(SceneFile, PathBuf), SceneError> {
    let file: SceneFile = read_json(path)?;
    check_schema(path, &file.schema, SCHEMA_SCENE)?;
    let base = path.parent().unwrap_or_else(|| Path::new(".")).to_path_buf();
    Ok((file, base))
}

// ---------------------------------------------------------------------------
// named groups

/// Groups addressable by name on the command line.  `cyclic-N` and
/// `reflecting-cyclic-N` take the order from the suffix.
pub fn named_group(name: &str) -> Result<OrientifoldGroup, SceneError> {
    match name {
        "trivial" => Ok(OrientifoldGroup::trivial()),
        "jandl" => Ok(OrientifoldGroup::jandl()),
        "z2z2-projection" => Ok(OrientifoldGroup::z2z2_projection()),
        "symmetric-3" => Ok(OrientifoldGroup::symmetric_3()),
        _ => {
            let make = |rest: &str, reflecting: bool| -> Result<OrientifoldGroup, SceneError> {
                let n: usize = rest.parse().map_err(|_| {
                    SceneError::Invalid(format!("bad cyclic group order in {name:?}"))
                })?;
                Ok(OrientifoldGroup::cyclic(n, reflecting)?)
            };
            if let Some(rest) = name.strip_prefix("reflecting-cyclic-") {
                make(rest, true)
            } else if let Some(rest) = name.strip_prefix("cyclic-") {
                make(rest, false)
            } else {
                Err(SceneError::Invalid(format!(
                    "unknown group {name:?}; expected a file path or one of \
                     trivial, jandl, z2z2-projection, symmetric-3, cyclic-N, \
                     reflecting-cyclic-N"
                )))
            }
        }
    }
}

/// `--group` accepts a path (anything containing `.json`) or a name.
pub fn group_ref(arg: &str) -> Result<OrientifoldGroup, SceneError> {
    if arg.contains(".json") {
        let path = Path::new(arg);
        let file: GroupFile = read_json(path)?;
        check_schema(path, &file.schema, SCHEMA_GROUP)?;
        Ok(file.group)
    } else {
        named_group(arg)
    }
}

/// Rebuild a group with the sign character replaced; the table and element
/// names carry over, and the construction checks re-run (a non-homomorphic
/// override is rejected).
pub fn override_epsilon(
    group: &OrientifoldGroup,
    epsilon: &[i8],
) -> Result<OrientifoldGroup, SceneError> {
    let n = group.order();
    if epsilon.len() != n {
        return Err(SceneError::Invalid(format!(
            "--epsilon lists {} signs for a group of order {n}",
            epsilon.len()
        )));
    }
    let elements = (0..n).map(|a| group.name(a).to_string()).collect();
    let table = (0..n).map(|a| (0..n).map(|b| group.mul(a, b)).collect()).collect();
    Ok(OrientifoldGroup::new(elements, table, epsilon.to_vec())?)
}

/// Parse `--epsilon 1,-1,1,-1`.
pub fn parse_epsilon(arg: &str) -> Result<Vec<i8>, SceneError> {
    arg.split(',')
        .map(|s| match s.trim() {
            "1" | "+1" => Ok(1),
            "-1" => Ok(-1),
            other => Err(SceneError::Invalid(format!(
                "bad sign {other:?} in --epsilon; expected 1 or -1"
            ))),
        })
        .collect()
}

impl fmt::Display for ValueWire {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ValueWire::Exact { angle } => write!(f, "{angle}"),
            ValueWire::Complex { re, im } => write!(f, "{re}{im:+}i"),
        }
    }
}

// ---------------------------------------------------------------------------
