//! Command-line surface: instance files in, reports and certificates out.
//!
//! Exit codes: 0 when the condition holds or the check passes, 1 for a
//! semantic negative, 2 for malformed input or an exceeded guard.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::embed::{self, EmbeddingCertificate};
use crate::error::{Error, Result};
use crate::group::{closure_from_generators, Group};
use crate::gset::GSet;
use crate::hset::{self, POWER_OBJECT_LIMIT};
use crate::oracle::{self, Verdict};

pub const EXIT_OK: i32 = 0;
pub const EXIT_NEGATIVE: i32 = 1;
pub const EXIT_ERROR: i32 = 2;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct InstanceFile {
    group: GroupSpec,
    #[serde(rename = "M")]
    m: GSetSpec,
    #[serde(rename = "X")]
    x: GSetSpec,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GroupSpec {
    order: Option<usize>,
    table: Option<Vec<Vec<usize>>>,
    names: Option<Vec<String>>,
    generators: Option<Vec<GeneratorSpec>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GeneratorSpec {
    #[serde(rename = "on_M")]
    on_m: Vec<usize>,
    #[serde(rename = "on_X")]
    on_x: Vec<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct GSetSpec {
    size: usize,
    action: Option<Vec<Vec<usize>>>,
    labels: Option<Vec<String>>,
}

/// A parsed and validated instance: a group and two G-sets over it.
#[derive(Debug, Clone)]
pub struct Instance {
    pub group: Arc<Group>,
    pub m: GSet,
    pub x: GSet,
}

impl Instance {
    pub fn from_json(text: &str) -> Result<Instance> {
        let file: InstanceFile =
            serde_json::from_str(text).map_err(|e| Error::Input(format!("instance: {e}")))?;
        let (group, m_action, x_action) = match (&file.group.table, &file.group.generators) {
            // The Cayley form wins when both are present.
            (Some(table), _) => {
                if let Some(order) = file.group.order {
                    if order != table.len() {
                        return Err(Error::InvalidGroup(format!(
                            "order {order} does not match a table with {} rows",
                            table.len()
                        )));
                    }
                }
                let group = Group::from_table(table.clone(), file.group.names.clone())?;
                let m_action = file.m.action.clone().ok_or_else(|| {
                    Error::Input("M.action is required with a Cayley table".into())
                })?;
                let x_action = file.x.action.clone().ok_or_else(|| {
                    Error::Input("X.action is required with a Cayley table".into())
                })?;
                (group, m_action, x_action)
            }
            (None, Some(gens)) => {
                if file.m.action.is_some() || file.x.action.is_some() {
                    return Err(Error::Input(
                        "actions must be omitted when the group is given by generators".into(),
                    ));
                }
                let pairs: Vec<_> = gens
                    .iter()
                    .map(|g| (g.on_m.clone(), g.on_x.clone()))
                    .collect();
                let generated = closure_from_generators(&pairs, file.m.size, file.x.size)?;
                (generated.group, generated.on_m, generated.on_x)
            }
            (None, None) => {
                return Err(Error::Input(
                    "group needs either \"table\" or \"generators\"".into(),
                ))
            }
        };
        let group = Arc::new(group);
        let m = with_labels(
            GSet::new(Arc::clone(&group), file.m.size, m_action)?,
            file.m.labels,
        )?;
        let x = with_labels(
            GSet::new(Arc::clone(&group), file.x.size, x_action)?,
            file.x.labels,
        )?;
        Ok(Instance { group, m, x })
    }

    pub fn load(path: &Path) -> Result<Instance> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
        Instance::from_json(&text)
    }

    /// The instance in Cayley-table form.
    pub fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Out<'a> {
            group: GroupOut<'a>,
            #[serde(rename = "M")]
            m: GSetOut<'a>,
            #[serde(rename = "X")]
            x: GSetOut<'a>,
        }
        #[derive(Serialize)]
        struct GroupOut<'a> {
            order: usize,
            table: &'a [Vec<usize>],
            #[serde(skip_serializing_if = "Option::is_none")]
            names: Option<&'a [String]>,
        }
        #[derive(Serialize)]
        struct GSetOut<'a> {
            size: usize,
            action: &'a [Vec<usize>],
            #[serde(skip_serializing_if = "Option::is_none")]
            labels: Option<&'a [String]>,
        }
        fn gset(g: &GSet) -> GSetOut<'_> {
            GSetOut {
                size: g.size(),
                action: g.action(),
                labels: g.labels(),
            }
        }
        serde_json::to_string_pretty(&Out {
            group: GroupOut {
                order: self.group.order(),
                table: self.group.table(),
                names: self.group.names(),
            },
            m: gset(&self.m),
            x: gset(&self.x),
        })
        .expect("instance serializes")
    }
}

fn with_labels(g: GSet, labels: Option<Vec<String>>) -> Result<GSet> {
    match labels {
        Some(l) => g.with_labels(l),
        None => Ok(g),
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "gset-power",
    version,
    about = "Embed finite G-sets into iterated power objects"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Which {
    #[value(name = "M")]
    M,
    #[value(name = "X")]
    X,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report G_M, G_X and whether G_M ⊆ G_X.
    Check {
        instance: PathBuf,
        #[arg(long)]
        json: bool,
    },
    /// Build an embedding certificate for X.
    Embed {
        instance: PathBuf,
        /// Write the certificate here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Check a certificate against an instance.
    Verify {
        instance: PathBuf,
        certificate: PathBuf,
        #[arg(long)]
        json: bool,
        /// Also check this many random mutations of the certificate.
        #[arg(long, default_value_t = 0)]
        fuzz: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print P^n of one of the instance's G-sets.
    Power {
        instance: PathBuf,
        #[arg(long, value_enum, default_value = "M")]
        gset: Which,
        #[arg(long, default_value_t = 1)]
        times: usize,
        #[arg(long)]
        json: bool,
    },
    /// Search M_1 … M_L exhaustively for a copy of X.
    Oracle {
        instance: PathBuf,
        #[arg(long, default_value_t = 1)]
        max_level: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

/// Captured result of one invocation.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

impl Outcome {
    fn ok(code: i32, stdout: String) -> Self {
        Outcome {
            code,
            stdout,
            stderr: String::new(),
        }
    }

    fn error(code: i32, message: impl std::fmt::Display) -> Self {
        Outcome {
            code,
            stdout: String::new(),
            stderr: format!("error: {message}\n"),
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => execute(cli.command),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_ERROR } else { EXIT_OK };
            let text = e.render().to_string();
            if e.use_stderr() {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            } else {
                Outcome::ok(code, text)
            }
        }
    }
}

pub fn execute(command: Command) -> Outcome {
    let result = match command {
        Command::Check { instance, json } => cmd_check(&instance, json),
        Command::Embed { instance, out } => cmd_embed(&instance, out.as_deref()),
        Command::Verify {
            instance,
            certificate,
            json,
            fuzz,
            seed,
        } => cmd_verify(&instance, &certificate, json, fuzz, seed),
        Command::Power {
            instance,
            gset,
            times,
            json,
        } => cmd_power(&instance, gset, times, json),
        Command::Oracle {
            instance,
            max_level,
            out,
        } => cmd_oracle(&instance, max_level, out.as_deref()),
    };
    result.unwrap_or_else(|e| {
        let code = match e {
            Error::KernelCondition => EXIT_NEGATIVE,
            _ => EXIT_ERROR,
        };
        Outcome::error(code, e)
    })
}

fn write_or_print(out: Option<&Path>, text: String) -> Result<String> {
    match out {
        Some(path) => {
            std::fs::write(path, &text)
                .map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
            Ok(format!("wrote {}\n", path.display()))
        }
        None => Ok(text),
    }
}

pub fn cmd_check(path: &Path, json: bool) -> Result<Outcome> {
    let inst = Instance::load(path)?;
    let report = embed::check_conditions(&inst.m, &inst.x)?;
    let code = if report.cond2 { EXIT_OK } else { EXIT_NEGATIVE };
    let text = if json {
        let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
        s.push('\n');
        s
    } else {
        let g = &inst.group;
        let mut s = String::new();
        let _ = writeln!(s, "G_M = {}", g.format_elements(report.kernel_m.members()));
        let _ = writeln!(s, "G_X = {}", g.format_elements(report.kernel_x.members()));
        let _ = writeln!(
            s,
            "condition (1) card X < χ(M): holds ({})",
            report.cond1_note
        );
        let verdict = if report.cond2 {
            "holds"
        } else {
            "fails (G_M ⊄ G_X)"
        };
        let _ = writeln!(s, "condition (2) G_M ⊆ G_X: {verdict}");
        s
    };
    Ok(Outcome::ok(code, text))
}

pub fn certificate_json(cert: &EmbeddingCertificate) -> String {
    let mut s = serde_json::to_string_pretty(cert).expect("certificate serializes");
    s.push('\n');
    s
}

pub fn cmd_embed(path: &Path, out: Option<&Path>) -> Result<Outcome> {
    let inst = Instance::load(path)?;
    let cert = embed::embed(&inst.m, &inst.x)?;
    Ok(Outcome::ok(
        EXIT_OK,
        write_or_print(out, certificate_json(&cert))?,
    ))
}

pub fn cmd_verify(
    path: &Path,
    cert_path: &Path,
    json: bool,
    fuzz: usize,
    seed: u64,
) -> Result<Outcome> {
    let inst = Instance::load(path)?;
    let text = std::fs::read_to_string(cert_path)
        .map_err(|e| Error::Input(format!("{}: {e}", cert_path.display())))?;
    let cert: EmbeddingCertificate =
        serde_json::from_str(&text).map_err(|e| Error::Input(format!("certificate: {e}")))?;
    let report = embed::verify_certificate(&inst.m, &inst.x, &cert);

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let accepted_mutants = (0..fuzz)
        .filter(|_| {
            let mutant = embed::mutate_certificate(&cert, &inst.m, &mut rng);
            embed::verify_certificate(&inst.m, &inst.x, &mutant).passed
        })
        .count();

    let code = if report.passed {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let mut s = if json {
        #[derive(Serialize)]
        struct Out<'a> {
            #[serde(flatten)]
            report: &'a embed::VerificationReport,
            #[serde(skip_serializing_if = "Option::is_none")]
            fuzz: Option<FuzzOut>,
        }
        #[derive(Serialize)]
        struct FuzzOut {
            mutants: usize,
            accepted: usize,
            seed: u64,
        }
        let out = Out {
            report: &report,
            fuzz: (fuzz > 0).then_some(FuzzOut {
                mutants: fuzz,
                accepted: accepted_mutants,
                seed,
            }),
        };
        serde_json::to_string_pretty(&out).expect("report serializes")
    } else {
        let mut s = match &report.failure {
            None => "pass".to_string(),
            Some(f) => format!("fail: {}: {}", f.check, f.detail),
        };
        if fuzz > 0 {
            let _ = write!(
                s,
                "\nfuzz: {accepted_mutants} of {fuzz} mutants accepted (seed {seed})"
            );
        }
        s
    };
    s.push('\n');
    Ok(Outcome::ok(code, s))
}

pub fn cmd_power(path: &Path, which: Which, times: usize, json: bool) -> Result<Outcome> {
    let inst = Instance::load(path)?;
    let base = match which {
        Which::M => &inst.m,
        Which::X => &inst.x,
    };
    let power = hset::iterated_power(base, times, POWER_OBJECT_LIMIT)?;
    let texts: Vec<String> = power.points().iter().map(|h| h.to_string()).collect();
    let text = if json {
        #[derive(Serialize)]
        struct Out<'a> {
            level: usize,
            size: usize,
            points: &'a [String],
            action: &'a [Vec<usize>],
        }
        let mut s = serde_json::to_string_pretty(&Out {
            level: power.level(),
            size: texts.len(),
            points: &texts,
            action: power.gset().action(),
        })
        .expect("power object serializes");
        s.push('\n');
        s
    } else {
        let name = match which {
            Which::M => "M",
            Which::X => "X",
        };
        let mut s = format!(
            "P^{times}({name}): {} points at level {}\n",
            texts.len(),
            power.level()
        );
        for (i, t) in texts.iter().enumerate() {
            let _ = writeln!(s, "  {i}: {t}");
        }
        for g in inst.group.elements() {
            let row: Vec<String> = power.gset().perm(g).iter().map(|p| p.to_string()).collect();
            let _ = writeln!(s, "{} ↦ [{}]", inst.group.element_name(g), row.join(" "));
        }
        s
    };
    Ok(Outcome::ok(EXIT_OK, text))
}

pub fn cmd_oracle(path: &Path, max_level: usize, out: Option<&Path>) -> Result<Outcome> {
    let inst = Instance::load(path)?;
    let report = oracle::subobject_search(&inst.x, &inst.m, max_level)?;
    let code = if report.verdict == Verdict::Found {
        EXIT_OK
    } else {
        EXIT_NEGATIVE
    };
    let mut s = serde_json::to_string_pretty(&report).expect("report serializes");
    s.push('\n');
    Ok(Outcome::ok(code, write_or_print(out, s)?))
}
