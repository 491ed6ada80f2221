use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::de::DeserializeOwned;
use serde::Serialize;
use serde_json::{json, Value};

use gctqft_core::abelian::FiniteAbelianGroup;
use gctqft_core::barcohomology::{
    classify_braided, classify_symmetric, max_enum_from_env, ClassifyMode,
};
use gctqft_core::cellular::{relative_homology, CwComplex};
use gctqft_core::corpus;
use gctqft_core::exactring::lcm;
use gctqft_core::groupcat::{
    anomaly_product_closed_form, check_category, normalizability_report, CategoryPresentation,
    FORMAT,
};
use gctqft_core::tqft::{
    check_modularity_criterion, compose_check, glue_compare, induced_hom, induced_hom_explicit,
    state_space, Bordism, ComplexDocument, Composition, GluingDocument,
};

#[derive(Parser, Debug)]
#[command(
    name = "gctqft",
    version,
    about = "Group-categories and homological field theories on CW complexes"
)]
struct Cli {
    /// Write the JSON report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Order conditions, pentagon, hexagons and balance for a presentation.
    CheckCategory { file: PathBuf },
    /// Equivalence classes of braided (or symmetric) categories over a group.
    Classify {
        #[arg(long)]
        group: String,
        #[arg(long)]
        level: Option<u64>,
        #[arg(long, value_enum, default_value_t = Mode::Auto)]
        mode: Mode,
        #[arg(long)]
        symmetric: bool,
    },
    /// Relative homology of a pair of named subcomplexes.
    Homology {
        file: PathBuf,
        /// `X,A`; a single name means `A` is empty.
        #[arg(long)]
        pair: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        group: String,
    },
    /// Basis of the state space of a boundary pair `(Y, W)`.
    StateSpace {
        file: PathBuf,
        #[arg(long)]
        pair: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        group: String,
        #[arg(long)]
        level: Option<u64>,
    },
    /// Matrix of the homomorphism a bordism induces on state spaces.
    InducedMap {
        file: PathBuf,
        /// A bordism name from the file, or `X,Y0,Y1` by subcomplex names.
        #[arg(long)]
        bordism: String,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        group: String,
        #[arg(long)]
        level: Option<u64>,
        #[arg(long, value_enum, default_value_t = Oracle::Both)]
        oracle: Oracle,
    },
    /// Composition criterion and composite versus glued matrix.
    ComposeCheck {
        file: PathBuf,
        /// A composition name from the file.
        #[arg(long, conflicts_with_all = ["first", "second"])]
        composition: Option<String>,
        #[arg(long, requires = "second")]
        first: Option<String>,
        #[arg(long, requires = "first")]
        second: Option<String>,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        group: String,
        #[arg(long)]
        level: Option<u64>,
    },
    /// Algebraic versus geometric gluing of state spaces.
    ModularityCheck {
        file: PathBuf,
        #[arg(long)]
        dim: usize,
        #[arg(long)]
        group: String,
    },
    /// Gauss sums and the normalizability verdict.
    Anomaly { file: PathBuf },
    /// Write (or list) the bundled example files.
    Corpus {
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(ValueEnum, Clone, Copy, Debug)]
enum Mode {
    Full,
    Presentation,
    Auto,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Oracle {
    Defining,
    Explicit,
    Both,
}

/// Anything that maps to exit code 2.
#[derive(Debug)]
struct Failure(String);

impl fmt::Display for Failure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<gctqft_core::Error> for Failure {
    fn from(e: gctqft_core::Error) -> Self {
        Failure(e.to_string())
    }
}

struct Report {
    command: Value,
    result: Value,
    passed: bool,
}

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report serialization")
}

fn read_json<T: DeserializeOwned>(path: &Path) -> Result<T, Failure> {
    let text = fs::read_to_string(path).map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| Failure(format!("{}: {e}", path.display())))
}

fn parse_group(s: &str) -> Result<FiniteAbelianGroup, Failure> {
    let mut orders = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        let n: u64 = part
            .parse()
            .map_err(|_| Failure(format!("bad group order {part:?} in {s:?}")))?;
        if n != 1 {
            orders.push(n);
        }
    }
    Ok(FiniteAbelianGroup::new(orders)?)
}

fn default_level(g: &FiniteAbelianGroup) -> u64 {
    g.orders().iter().fold(1, |acc, &n| lcm(acc, 2 * n))
}

fn load_complex(path: &Path) -> Result<(ComplexDocument, CwComplex), Failure> {
    let doc: ComplexDocument = read_json(path)?;
    let cx = doc
        .load()
        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
    Ok((doc, cx))
}

fn split_names(s: &str, want: usize, flag: &str) -> Result<Vec<String>, Failure> {
    let mut parts: Vec<String> = s.split(',').map(|p| p.trim().to_string()).collect();
    if parts.len() == want - 1 {
        parts.push(String::new());
    }
    if parts.len() != want {
        return Err(Failure(format!(
            "--{flag} expects {want} comma-separated names, got {s:?}"
        )));
    }
    Ok(parts)
}

fn run(command: &Command) -> Result<Report, Failure> {
    let cap = max_enum_from_env();
    match command {
        Command::CheckCategory { file } => {
            let p: CategoryPresentation = read_json(file)?;
            let r = check_category(&p);
            Ok(Report {
                command: json!({"name": "check-category", "file": file}),
                passed: r.all_hold(),
                result: json!({"presentation": p.to_string(), "all_hold": r.all_hold(), "checks": r}),
            })
        }
        Command::Classify {
            group,
            level,
            mode,
            symmetric,
        } => {
            let g = parse_group(group)?;
            let level = level.unwrap_or_else(|| default_level(&g));
            let mode = match mode {
                Mode::Full => ClassifyMode::Full,
                Mode::Presentation => ClassifyMode::Presentation,
                Mode::Auto => ClassifyMode::Auto,
            };
            let r = if *symmetric {
                classify_symmetric(&g, level, mode, cap)?
            } else {
                classify_braided(&g, level, mode, cap)?
            };
            Ok(Report {
                command: json!({"name": "classify", "group": g.orders(), "level": level, "symmetric": symmetric}),
                passed: true,
                result: to_value(&r),
            })
        }
        Command::Homology {
            file,
            pair,
            dim,
            group,
        } => {
            let (_, cx) = load_complex(file)?;
            let g = parse_group(group)?;
            let names = split_names(pair, 2, "pair")?;
            let h = relative_homology(&cx, &cx.named(&names[0])?, &cx.named(&names[1])?, *dim, &g)?;
            Ok(Report {
                command: json!({"name": "homology", "file": file, "pair": names, "dim": dim, "group": g.orders()}),
                passed: true,
                result: json!({"group": h.group.to_string(), "summary": h.describe(&cx)}),
            })
        }
        Command::StateSpace {
            file,
            pair,
            dim,
            group,
            level,
        } => {
            let (_, cx) = load_complex(file)?;
            let g = parse_group(group)?;
            let level = level.unwrap_or_else(|| default_level(&g));
            let names = split_names(pair, 2, "pair")?;
            let s = state_space(
                &cx,
                &cx.named(&names[0])?,
                &cx.named(&names[1])?,
                *dim,
                &g,
                level,
            )?;
            Ok(Report {
                command: json!({"name": "state-space", "file": file, "pair": names, "dim": dim, "group": g.orders(), "level": level}),
                passed: true,
                result: to_value(&s.summary(&cx)),
            })
        }
        Command::InducedMap {
            file,
            bordism,
            dim,
            group,
            level,
            oracle,
        } => {
            let (doc, cx) = load_complex(file)?;
            let g = parse_group(group)?;
            let level = level.unwrap_or_else(|| default_level(&g));
            let b = if bordism.contains(',') {
                let names = split_names(bordism, 3, "bordism")?;
                Bordism::new(
                    &cx,
                    cx.named(&names[0])?,
                    cx.named(&names[1])?,
                    cx.named(&names[2])?,
                    *dim,
                    &g,
                    level,
                )?
            } else {
                doc.bordism(&cx, bordism, *dim, &g, level)?
            };
            let defining = match oracle {
                Oracle::Explicit => None,
                _ => Some(induced_hom(&b)?),
            };
            let explicit = match oracle {
                Oracle::Defining => None,
                _ => Some(induced_hom_explicit(&b)?),
            };
            let agree = match (&defining, &explicit) {
                (Some(d), Some(e)) => Some(d.counts == e.counts),
                _ => None,
            };
            let main = defining
                .as_ref()
                .or(explicit.as_ref())
                .expect("one oracle runs");
            let mut result = to_value(&main.summary(&cx));
            if let Some(e) = &explicit {
                result["explicit_counts"] = to_value(&e.counts);
            }
            result["oracles_agree"] = to_value(&agree);
            Ok(Report {
                command: json!({
                    "name": "induced-map", "file": file, "bordism": bordism, "dim": dim,
                    "group": g.orders(), "level": level, "oracle": format!("{oracle:?}").to_lowercase(),
                }),
                passed: agree != Some(false),
                result,
            })
        }
        Command::ComposeCheck {
            file,
            composition,
            first,
            second,
            dim,
            group,
            level,
        } => {
            let (doc, cx) = load_complex(file)?;
            let g = parse_group(group)?;
            let level = level.unwrap_or_else(|| default_level(&g));
            let c = match (composition, first, second) {
                (Some(name), _, _) => doc.composition(&cx, name, *dim, &g, level)?,
                (None, Some(a), Some(b)) => Composition::new(
                    doc.bordism(&cx, a, *dim, &g, level)?,
                    doc.bordism(&cx, b, *dim, &g, level)?,
                )?,
                _ => {
                    return Err(Failure(
                        "give --composition or both --first and --second".into(),
                    ))
                }
            };
            let r = compose_check(&c)?;
            Ok(Report {
                command: json!({
                    "name": "compose-check", "file": file, "composition": composition, "first": first,
                    "second": second, "dim": dim, "group": g.orders(), "level": level,
                }),
                passed: r.criterion_holds && r.equal,
                result: to_value(&r),
            })
        }
        Command::ModularityCheck { file, dim, group } => {
            let doc: GluingDocument = read_json(file)?;
            let data = doc
                .load()
                .map_err(|e| Failure(format!("{}: {e}", file.display())))?;
            let g = parse_group(group)?;
            let r = glue_compare(&data, *dim, &g)?;
            let criterion = check_modularity_criterion(&data, *dim, &g)?;
            Ok(Report {
                command: json!({"name": "modularity-check", "file": file, "dim": dim, "group": g.orders()}),
                passed: r.iso,
                result: json!({"comparison": r, "criterion": criterion}),
            })
        }
        Command::Anomaly { file } => {
            let p: CategoryPresentation = read_json(file)?;
            let r = normalizability_report(&p)?;
            let closed_form = match p.group().orders() {
                [n] => {
                    let l = p.sigma_diag()[0].multiplicative_order();
                    l.map(|l| anomaly_product_closed_form(*n, l))
                        .transpose()
                        .ok()
                        .flatten()
                }
                _ => None,
            };
            Ok(Report {
                command: json!({"name": "anomaly", "file": file}),
                passed: true,
                result: json!({"presentation": p.to_string(), "report": r, "closed_form_product": closed_form}),
            })
        }
        Command::Corpus { out } => {
            let files = corpus::corpus()?;
            if let Some(dir) = out {
                fs::create_dir_all(dir).map_err(|e| Failure(format!("{}: {e}", dir.display())))?;
                for f in &files {
                    let path = dir.join(&f.path);
                    fs::write(&path, &f.contents)
                        .map_err(|e| Failure(format!("{}: {e}", path.display())))?;
                }
            }
            let paths: Vec<&str> = files.iter().map(|f| f.path.as_str()).collect();
            Ok(Report {
                command: json!({"name": "corpus", "out": out}),
                passed: true,
                result: json!({"files": paths}),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let report = match run(&cli.command) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    };
    let doc = json!({
        "format": FORMAT,
        "command": report.command,
        "passed": report.passed,
        "result": report.result,
    });
    let mut text = serde_json::to_string_pretty(&doc).expect("report serialization");
    text.push('\n');
    match &cli.output {
        Some(path) => {
            if let Err(e) = fs::write(path, &text) {
                eprintln!("error: {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => print!("{text}"),
    }
    if report.passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
