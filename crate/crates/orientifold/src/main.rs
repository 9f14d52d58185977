//! Command-line front end: evaluate, validate, generate, and classify
//! orientifold local data from JSON artifacts.
//!
//! Every command is deterministic given its inputs and `--seed`.  Reports go
//! to stdout as canonical JSON (or to `--out`); a one-line verdict goes to
//! stderr.  Exit codes: 0 success, 1 semantic failure (validation findings,
//! broken invariance, refused quotient), 2 unreadable or malformed input.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use orientifold::cohomology::{cohomology, TwistedCochain};
use orientifold::cover::{canonical_choice, count_choices, validate_choice};
use orientifold::data::{generate_pure_gauge, Violation};
use orientifold::descent::quotient;
use orientifold::descent::QuotientOutput;
use orientifold::group::OrientifoldGroup;
use orientifold::holonomy::{holonomy, holonomy_sweep};
use orientifold::phase::Phase;
use orientifold::scene::{
    default_scheme, group_ref, load_scene, override_epsilon, parse_epsilon, read_json,
    to_canonical_json, write_json, ClassifyFile, CochainWire, CohomologyFile, DatumFile,
    DescendFile, FlatFile, GerbeFile, GroupFile, HolonomyFile, JandlFile, LoadedScene, SceneError,
    ValidationFile, ValueWire, SCHEMA_CLASSIFY, SCHEMA_COHOMOLOGY, SCHEMA_DESCEND, SCHEMA_FLAT,
    SCHEMA_GERBE, SCHEMA_GROUP, SCHEMA_HOLONOMY, SCHEMA_JANDL, SCHEMA_VALIDATION, SWEEP_ALL_CAP,
};

#[derive(Parser)]
#[command(name = "orientifold", version, about = "Unoriented surface holonomy from local data")]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Check a scene's datum against the full relation list.
    Validate {
        #[arg(long)]
        scene: PathBuf,
        /// comparison tolerance for matrix-valued relations (exact at rank 1)
        #[arg(long)]
        tolerance: Option<f64>,
        /// write the report here instead of stdout
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Evaluate holonomy, optionally sweeping the choice space.
    Holonomy {
        #[arg(long)]
        scene: PathBuf,
        /// `all` or a sample count; omitted means one canonical evaluation
        #[arg(long)]
        sweep: Option<String>,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        tolerance: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate a pure-gauge datum for a scene's surface.
    Generate {
        #[arg(long)]
        scene: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        rank: Option<usize>,
        /// twist constant `p/q` (group cohomology class; must be a cocycle)
        #[arg(long)]
        twist: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Twisted group cohomology of a named or file-backed group.
    Cohomology {
        /// group name (`jandl`, `z2z2-projection`, ...) or a JSON file
        #[arg(long)]
        group: String,
        /// override the sign character, e.g. `1,-1,1,-1`
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        degree: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// List the degree-2 classes available as twists for a group.
    Classify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        epsilon: Option<String>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Quotient a flat equivariant datum and validate the result.
    Descend {
        /// flat equivariant datum file
        #[arg(long)]
        datum: PathBuf,
        /// optional cross-check: must equal the group stored in the datum
        #[arg(long)]
        group: Option<String>,
        #[arg(long)]
        tolerance: Option<f64>,
        /// write the quotient datum here (report still goes to stdout)
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.cmd) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

/// Print the primary artifact canonically, to `--out` or stdout.
fn emit<T: serde::Serialize>(out: &Option<PathBuf>, value: &T) -> Result<(), SceneError> {
    match out {
        Some(path) => write_json(path, value),
        None => {
            print!("{}", to_canonical_json(value));
            Ok(())
        }
    }
}

fn run(cmd: Cmd) -> Result<ExitCode, SceneError> {
    match cmd {
        Cmd::Validate { scene, tolerance, out } => cmd_validate(&scene, tolerance, &out),
        Cmd::Holonomy { scene, sweep, seed, tolerance, out } => {
            cmd_holonomy(&scene, sweep.as_deref(), seed, tolerance, &out)
        }
        Cmd::Generate { scene, seed, rank, twist, out } => {
            cmd_generate(&scene, seed, rank, twist.as_deref(), &out)
        }
        Cmd::Cohomology { group, epsilon, degree, out } => {
            cmd_cohomology(&group, epsilon.as_deref(), degree, &out)
        }
        Cmd::Classify { group, epsilon, out } => cmd_classify(&group, epsilon.as_deref(), &out),
        Cmd::Descend { datum, group, tolerance, out } => {
            cmd_descend(&datum, group.as_deref(), tolerance, &out)
        }
    }
}

/// Validation shared by `validate` and `holonomy`: relation report plus a
/// shape check of any choice override.
fn validate_loaded(loaded: &LoadedScene, tol: f64) -> ValidationFile {
    let report = loaded.datum.validate(&loaded.cover, tol);
    let mut violations = report.violations.clone();
    if let Some(choice) = &loaded.choice {
        if let Err(e) = validate_choice(&loaded.cover, &loaded.datum.scheme, choice) {
            violations.push(Violation {
                relation: "choice".into(),
                location: "choice override".into(),
                detail: e.to_string(),
            });
        }
    }
    ValidationFile {
        schema: SCHEMA_VALIDATION.into(),
        rank: loaded.datum.rank,
        clean: violations.is_empty(),
        violations,
    }
}

fn cmd_validate(
    scene: &Path,
    tolerance: Option<f64>,
    out: &Option<PathBuf>,
) -> Result<ExitCode, SceneError> {
    let (file, base) = load_scene(scene)?;
    let loaded = file.resolve(&base, None, None)?;
    let report = validate_loaded(&loaded, tolerance.unwrap_or(1e-9));
    emit(out, &report)?;
    if report.clean {
        eprintln!("validate: clean");
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("validate: {} violation(s)", report.violations.len());
        Ok(ExitCode::from(1))
    }
}

fn cmd_holonomy(
    scene: &Path,
    sweep: Option<&str>,
    seed: Option<u64>,
    tolerance: Option<f64>,
    out: &Option<PathBuf>,
) -> Result<ExitCode, SceneError> {
    let (file, base) = load_scene(scene)?;
    let loaded = file.resolve(&base, seed, None)?;
    let check = validate_loaded(&loaded, tolerance.unwrap_or(1e-9));
    if !check.clean {
        print!("{}", to_canonical_json(&check));
        eprintln!("holonomy: refused, scene datum has {} violation(s)", check.violations.len());
        return Ok(ExitCode::from(1));
    }
    let d = &loaded.datum;
    let dc = &loaded.cover;

    let report = match sweep {
        None => {
            let choice = match &loaded.choice {
                Some(c) => c.clone(),
                None => canonical_choice(dc, &d.scheme),
            };
            let value = holonomy(d, dc, &choice)
                .map_err(|e| SceneError::Invalid(format!("holonomy: {e}")))?;
            HolonomyFile {
                schema: SCHEMA_HOLONOMY.into(),
                value: ValueWire::from_value(&value),
                rank: d.rank,
                choices_swept: 1,
                invariant: true,
                exhaustive: count_choices(dc, &d.scheme, 1).is_some(),
            }
        }
        Some("all") => {
            if count_choices(dc, &d.scheme, SWEEP_ALL_CAP).is_none() {
                return Err(SceneError::Invalid(format!(
                    "--sweep all: choice space exceeds {SWEEP_ALL_CAP}; give a sample count"
                )));
            }
            let sw = holonomy_sweep(d, dc, SWEEP_ALL_CAP, 0, loaded.seed)
                .map_err(|e| SceneError::Invalid(format!("holonomy: {e}")))?;
            HolonomyFile {
                schema: SCHEMA_HOLONOMY.into(),
                value: ValueWire::from_value(&sw.value),
                rank: sw.rank,
                choices_swept: sw.choices_swept,
                invariant: sw.invariant,
                exhaustive: sw.exhaustive,
            }
        }
        Some(n) => {
            let samples: usize = n.parse().map_err(|_| {
                SceneError::Invalid(format!("--sweep expects `all` or a count, got {n:?}"))
            })?;
            // cap 1: enumerate only when the space is a single point,
            // otherwise draw the requested samples
            let sw = holonomy_sweep(d, dc, 1, samples, loaded.seed)
                .map_err(|e| SceneError::Invalid(format!("holonomy: {e}")))?;
            HolonomyFile {
                schema: SCHEMA_HOLONOMY.into(),
                value: ValueWire::from_value(&sw.value),
                rank: sw.rank,
                choices_swept: sw.choices_swept,
                invariant: sw.invariant,
                exhaustive: sw.exhaustive,
            }
        }
    };

    emit(out, &report)?;
    if report.invariant {
        eprintln!(
            "holonomy: {} ({} choice(s){})",
            report.value,
            report.choices_swept,
            if report.exhaustive { ", exhaustive" } else { "" }
        );
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!("holonomy: NOT invariant across {} choices", report.choices_swept);
        Ok(ExitCode::from(1))
    }
}

fn cmd_generate(
    scene: &Path,
    seed: Option<u64>,
    rank: Option<usize>,
    twist: Option<&str>,
    out: &Option<PathBuf>,
) -> Result<ExitCode, SceneError> {
    let (file, base) = load_scene(scene)?;
    let spec = file.surface_spec(&base)?;
    let surface = orientifold::cover::Surface::build(&spec)?;
    let cover = orientifold::cover::DoubleCover::new(surface)?;
    let scheme = default_scheme(&cover);
    let seed = seed.unwrap_or(file.seed);
    let rank = rank.unwrap_or(file.rank);

    let twist_data = match twist {
        None => None,
        Some(s) => {
            let c: Phase = s
                .parse()
                .map_err(|e| SceneError::Invalid(format!("bad --twist {s:?}: {e}")))?;
            let group = match &file.group {
                Some(rel) => {
                    let path = base.join(rel);
                    let gf: GroupFile = read_json(&path)?;
                    if gf.schema != SCHEMA_GROUP {
                        return Err(SceneError::Schema {
                            path: path.display().to_string(),
                            found: gf.schema,
                            want: SCHEMA_GROUP,
                        });
                    }
                    gf.group
                }
                None => OrientifoldGroup::jandl(),
            };
            let r = *group
                .reflections()
                .first()
                .ok_or_else(|| SceneError::Invalid("twist group has no reflection".into()))?;
            let mut cochain = TwistedCochain::zero(&group, 2);
            cochain.set(&group, &[r, r], c);
            Some((group, cochain))
        }
    };
    let twist_ref = twist_data.as_ref().map(|(g, c)| (g, c));

    let d = generate_pure_gauge(&cover, &scheme, rank, seed, twist_ref)?;
    let datum_file = DatumFile::from_datum(&d);
    emit(out, &datum_file)?;
    eprintln!("generate: rank {rank} datum, seed {seed}");
    Ok(ExitCode::SUCCESS)
}

/// Resolve `--group`/`--epsilon` into a group plus its display label.
fn resolve_group(arg: &str, epsilon: Option<&str>) -> Result<(OrientifoldGroup, String), SceneError> {
    let mut group = group_ref(arg)?;
    if let Some(eps) = epsilon {
        group = override_epsilon(&group, &parse_epsilon(eps)?)?;
    }
    Ok((group, arg.to_string()))
}

fn cmd_cohomology(
    garg: &str,
    epsilon: Option<&str>,
    degree: usize,
    out: &Option<PathBuf>,
) -> Result<ExitCode, SceneError> {
    let (group, label) = resolve_group(garg, epsilon)?;
    let h = cohomology(&group, degree)?;
    let report = CohomologyFile {
        schema: SCHEMA_COHOMOLOGY.into(),
        group: label,
        epsilon: (0..group.order()).map(|a| group.epsilon(a)).collect(),
        degree,
        order: h.order(),
        invariant_factors: h.invariant_factors.clone(),
        representatives: h.representatives.iter().map(CochainWire::from_cochain).collect(),
    };
    emit(out, &report)?;
    eprintln!(
        "cohomology: degree {degree}, order {}, factors {:?}",
        report.order, report.invariant_factors
    );
    Ok(ExitCode::SUCCESS)
}

fn cmd_classify(
    garg: &str,
    epsilon: Option<&str>,
    out: &Option<PathBuf>,
) -> Result<ExitCode, SceneError> {
    let (group, label) = resolve_group(garg, epsilon)?;
    let h = cohomology(&group, 2)?;

    // expand the generators into the full class list, trivial class first
    let mut twists = vec![TwistedCochain::zero(&group, 2)];
    for (rep, &order) in h.representatives.iter().zip(&h.invariant_factors) {
        let mut next = Vec::with_capacity(twists.len() * order as usize);
        for base in &twists {
            let mut power = base.clone();
            for j in 0..order {
                if j > 0 {
                    power = power.mul(rep);
                }
                next.push(power.clone());
            }
        }
        twists = next;
    }

    let report = ClassifyFile {
        schema: SCHEMA_CLASSIFY.into(),
        group: label,
        epsilon: (0..group.order()).map(|a| group.epsilon(a)).collect(),
        classes: h.order(),
        invariant_factors: h.invariant_factors.clone(),
        twists: twists.iter().map(CochainWire::from_cochain).collect(),
    };
    emit(out, &report)?;
    eprintln!("classify: {} twist class(es)", report.classes);
    Ok(ExitCode::SUCCESS)
}

fn cmd_descend(
    datum: &Path,
    group: Option<&str>,
    tolerance: Option<f64>,
    out: &Option<PathBuf>,
) -> Result<ExitCode, SceneError> {
    let file: FlatFile = read_json(datum)?;
    if file.schema != SCHEMA_FLAT {
        return Err(SceneError::Schema {
            path: datum.display().to_string(),
            found: file.schema,
            want: SCHEMA_FLAT,
        });
    }
    let d = file.datum;
    if let Some(garg) = group {
        let g = group_ref(garg)?;
        if g != d.group {
            return Err(SceneError::Invalid(format!(
                "--group {garg:?} does not match the group stored in {}",
                datum.display()
            )));
        }
    }

    let tol = tolerance.unwrap_or(1e-9);
    let input_report = d.validate(tol);
    if !input_report.is_clean() {
        let vf = ValidationFile {
            schema: SCHEMA_VALIDATION.into(),
            rank: d.rank,
            clean: false,
            violations: input_report.violations.clone(),
        };
        print!("{}", to_canonical_json(&vf));
        eprintln!(
            "descend: refused, input datum has {} violation(s)",
            vf.violations.len()
        );
        return Ok(ExitCode::from(1));
    }

    let quotient_out = quotient(&d)?;
    let mut report = DescendFile {
        schema: SCHEMA_DESCEND.into(),
        kind: String::new(),
        clean: false,
        violations: Vec::new(),
        written: None,
        jandl: None,
        plain: None,
    };
    match quotient_out {
        QuotientOutput::Jandl(j) => {
            let vr = j.validate(tol);
            report.kind = "jandl".into();
            report.clean = vr.is_clean();
            report.violations = vr.violations;
            match out {
                Some(path) => {
                    write_json(path, &JandlFile { schema: SCHEMA_JANDL.into(), datum: j })?;
                    report.written = Some(path.display().to_string());
                }
                None => report.jandl = Some(j),
            }
        }
        QuotientOutput::Plain(p) => {
            let vr = p.validate(tol);
            report.kind = "plain".into();
            report.clean = vr.is_clean();
            report.violations = vr.violations;
            match out {
                Some(path) => {
                    write_json(path, &GerbeFile { schema: SCHEMA_GERBE.into(), datum: p })?;
                    report.written = Some(path.display().to_string());
                }
                None => report.plain = Some(p),
            }
        }
    }
    print!("{}", to_canonical_json(&report));
    if report.clean {
        eprintln!("descend: {} quotient, validator clean", report.kind);
        Ok(ExitCode::SUCCESS)
    } else {
        eprintln!(
            "descend: {} quotient FAILED validation ({} violation(s))",
            report.kind,
            report.violations.len()
        );
        Ok(ExitCode::from(1))
    }
}
