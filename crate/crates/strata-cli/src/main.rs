//! `strata`: generate blow-up corpora, analyze foliation models, run the
//! theorem check suites, export dual graphs, and evaluate control
//! invariants.
//!
//! Exit codes: 0 success, 1 a check suite failed, 2 malformed input.

mod docs;
mod dot;

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use anyhow::{anyhow, bail, Context, Result};
use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use strata_core::blowup::blowup_sequence;
use strata_core::control::{control_invariant, t_sequence, theta, zeta, CovectorSpace, LOCALLY_SIMPLE_THRESHOLD};
use strata_core::corpus::{instance, CorpusSpec};
use strata_core::nodal::{separating_blocks, NodalData, SeparatorReport};
use strata_core::parity::{components_by_parity, components_by_search, ComponentsError, Provenance};
use strata_core::pi1::{
    replay_tietze, simply_connected_verdict, edge_path_presentation, Pi1Certificate, Pi1Verdict,
    Pi1Witness, DEFAULT_TIETZE_BUDGET,
};
use strata_core::residue::derive_nodal_data;
use strata_core::separatrix::{camacho_sad_check, nod_vs_sep_equivalence, FoliatedModel, TraceComponent};
use strata_core::structure::truncate;
use strata_core::{IndexId, StrataStructure};

use docs::{
    parse_centers, to_json_string, MatrixDoc, ModelDoc, NodalDoc, ResiduesDoc, StructureDoc,
    TraceDoc,
};

#[derive(Parser)]
#[command(name = "strata", version, about = "Divisor strata toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, Default, PartialEq, Eq, ValueEnum)]
enum Format {
    #[default]
    Json,
    Table,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Suite {
    Componentcount,
    Simplyconnected,
    Camachosad,
    Nodsep,
}

#[derive(Subcommand)]
enum Command {
    /// Run a blow-up sequence and write the trace.
    Generate {
        /// Ambient dimension of the starting germ.
        #[arg(long)]
        dim: usize,
        /// Semicolon-separated center specs, e.g. "P[];P[0];S[0,1]".
        #[arg(long)]
        blowups: String,
        /// Output file (stdout when absent).
        #[arg(short = 'o', long = "output")]
        output: Option<PathBuf>,
    },
    /// Analyze a structure, trace or model file: blocks, separator,
    /// components, simple connectedness.
    Analyze {
        file: PathBuf,
        /// Residue model to derive nodal data from.
        #[arg(long)]
        residues: Option<PathBuf>,
        /// Explicit nodal data (wins over residues).
        #[arg(long)]
        nodal: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
    /// Run a named check suite over a model file or a random corpus.
    Check {
        suite: Suite,
        /// Model file to check (alternative to --random).
        file: Option<PathBuf>,
        /// Model file to check (same as the positional argument).
        #[arg(long)]
        model: Option<PathBuf>,
        /// Number of random corpus instances.
        #[arg(long)]
        random: Option<usize>,
        /// Restrict the corpus to one ambient dimension.
        #[arg(long)]
        dim: Option<usize>,
        #[arg(long, default_value_t = 8)]
        max_blowups: usize,
        #[arg(long, default_value_t = 7)]
        seed: u64,
    },
    /// Write the dual graph as DOT, styling separator and nodal edges.
    Export {
        file: PathBuf,
        #[arg(long)]
        residues: Option<PathBuf>,
        #[arg(long)]
        nodal: Option<PathBuf>,
        /// Output DOT file (stdout when absent).
        #[arg(long)]
        dot: Option<PathBuf>,
    },
    /// Evaluate the control invariants of a covector matrix.
    Invariant {
        #[arg(long)]
        matrix: PathBuf,
        /// Caller-supplied multiplicity to complete the invariant.
        #[arg(long)]
        nu: Option<u64>,
        #[arg(long, value_enum, default_value_t)]
        format: Format,
    },
}

fn main() {
    let cli = Cli::parse();
    let code = match run(cli) {
        Ok(code) => code,
        Err(e) => {
            let line = format!("{:#}", e).replace('\n', " ");
            eprintln!("error: {}", line);
            2
        }
    };
    std::process::exit(code);
}

fn budget() -> Result<usize> {
    match std::env::var("STRATA_BUDGET") {
        Ok(v) => v
            .trim()
            .parse::<usize>()
            .map_err(|_| anyhow!("STRATA_BUDGET must be a nonnegative integer, got {:?}", v)),
        Err(_) => Ok(DEFAULT_TIETZE_BUDGET),
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("reading {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("parsing {}", path.display()))
}

fn write_output(path: Option<&Path>, content: &str) -> Result<()> {
    match path {
        Some(path) => std::fs::write(path, content)
            .with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{}", content);
            Ok(())
        }
    }
}

/// A loaded analysis subject: structure plus whatever data came with it.
struct Subject {
    structure: StrataStructure,
    names: Vec<String>,
    nodal: NodalData,
    model: Option<ModelDoc>,
}

fn load_subject(
    file: &Path,
    residues: Option<&Path>,
    nodal: Option<&Path>,
) -> Result<Subject> {
    let value: serde_json::Value = read_json(file)?;
    let (structure_doc, model): (StructureDoc, Option<ModelDoc>) =
        if value.get("final").is_some() {
            let trace: TraceDoc = serde_json::from_value(value)
                .with_context(|| format!("parsing {}", file.display()))?;
            (trace.final_structure, None)
        } else {
            let model: ModelDoc = serde_json::from_value(value)
                .with_context(|| format!("parsing {}", file.display()))?;
            (model.structure_doc(), Some(model))
        };
    let structure = structure_doc.to_core()?;
    let names = structure_doc.components.clone();

    // Explicit nodal data wins over residues; flags win over in-file data.
    let nodal_data = if let Some(path) = nodal {
        let doc: NodalDoc = read_json(path)?;
        doc.to_core()?
    } else if let Some(path) = residues {
        let doc: ResiduesDoc = read_json(path)?;
        derive_nodal_data(&structure, &doc.to_core()?).map_err(|e| anyhow!("{}", e))?
    } else if let Some(entries) = model.as_ref().and_then(|m| m.nodal.clone()) {
        NodalDoc { nodal: entries }.to_core()?
    } else if let Some(doc) = model.as_ref().and_then(|m| m.residues.clone()) {
        derive_nodal_data(&structure, &doc.to_core()?).map_err(|e| anyhow!("{}", e))?
    } else {
        NodalData::empty()
    };
    Ok(Subject { structure, names, nodal: nodal_data, model })
}

#[derive(Serialize)]
struct Pi1Doc {
    status: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    certificate: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    steps: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    witness: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    generators_left: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    relators_left: Option<usize>,
}

impl Pi1Doc {
    fn from_verdict(v: &Pi1Verdict) -> Self {
        match v {
            Pi1Verdict::SimplyConnected(cert) => {
                let (certificate, steps) = match cert {
                    Pi1Certificate::Tietze(r) => ("tietze".to_string(), r.steps.len()),
                    Pi1Certificate::BlowupProvenance { blowups } => {
                        ("blowup".to_string(), *blowups)
                    }
                };
                Pi1Doc {
                    status: "simply_connected".to_string(),
                    certificate: Some(certificate),
                    steps: Some(steps),
                    witness: None,
                    generators_left: None,
                    relators_left: None,
                }
            }
            Pi1Verdict::NotSimplyConnected(witness) => Pi1Doc {
                status: "not_simply_connected".to_string(),
                certificate: None,
                steps: None,
                witness: Some(match witness {
                    Pi1Witness::Disconnected { components } => {
                        format!("disconnected into {} components", components)
                    }
                    Pi1Witness::InvariantFactor(f) => format!("invariant factor {}", f),
                }),
                generators_left: None,
                relators_left: None,
            },
            Pi1Verdict::Unknown { generators_left, relators_left } => Pi1Doc {
                status: "unknown".to_string(),
                certificate: None,
                steps: None,
                witness: None,
                generators_left: Some(*generators_left),
                relators_left: Some(*relators_left),
            },
        }
    }
}

#[derive(Serialize)]
struct AnalyzeReport {
    blocks: usize,
    separating: usize,
    separator: Vec<Vec<u32>>,
    components: Vec<Vec<u32>>,
    component_count: usize,
    /// Parity route vs graph search; absent when parity does not apply.
    agreement: Option<bool>,
    pi1: Pi1Doc,
}

fn indices_doc(sets: &[BTreeSet<IndexId>]) -> Vec<Vec<u32>> {
    sets.iter()
        .map(|c| c.iter().map(|i| i.0).collect())
        .collect()
}

fn analyze_report(subject: &Subject, tietze_budget: usize) -> Result<AnalyzeReport> {
    let separator: SeparatorReport = separating_blocks(&subject.structure, &subject.nodal)
        .map_err(|e| anyhow!("{}", e))?;
    let searched = components_by_search(&separator.residual);
    let verdict = simply_connected_verdict(&subject.structure, tietze_budget);
    let parity = components_by_parity(&subject.structure, &subject.nodal, Provenance::CallerAsserted);
    let (components, agreement) = match parity {
        Ok(report) => {
            let agree = report.components == searched;
            (report.components, Some(agree))
        }
        Err(ComponentsError::NotConnected | ComponentsError::ParityInconsistent { .. }) => {
            (searched, None)
        }
        Err(e) => return Err(anyhow!("{}", e)),
    };
    Ok(AnalyzeReport {
        blocks: separator.blocks.len(),
        separating: separator.separating_count(),
        separator: separator
            .separator_set
            .iter()
            .map(|j| j.members().iter().map(|i| i.0).collect())
            .collect(),
        component_count: components.len(),
        components: indices_doc(&components),
        agreement,
        pi1: Pi1Doc::from_verdict(&verdict),
    })
}

fn render_analyze(report: &AnalyzeReport, format: Format) -> String {
    match format {
        Format::Json => to_json_string(report),
        Format::Table => {
            let mut out = String::new();
            let sets = |v: &Vec<Vec<u32>>| {
                if v.is_empty() {
                    "-".to_string()
                } else {
                    v.iter()
                        .map(|s| {
                            format!(
                                "{{{}}}",
                                s.iter().map(u32::to_string).collect::<Vec<_>>().join(",")
                            )
                        })
                        .collect::<Vec<_>>()
                        .join(" ")
                }
            };
            out.push_str(&format!("{:<20}{}\n", "blocks", report.blocks));
            out.push_str(&format!("{:<20}{}\n", "separating blocks", report.separating));
            out.push_str(&format!("{:<20}{}\n", "separator", sets(&report.separator)));
            out.push_str(&format!("{:<20}{}\n", "components", sets(&report.components)));
            out.push_str(&format!("{:<20}{}\n", "component count", report.component_count));
            out.push_str(&format!(
                "{:<20}{}\n",
                "agreement",
                report.agreement.map_or("n/a".to_string(), |b| b.to_string())
            ));
            let pi1 = match (&report.pi1.certificate, &report.pi1.witness) {
                (Some(cert), _) => format!(
                    "{} ({}, {} steps)",
                    report.pi1.status,
                    cert,
                    report.pi1.steps.unwrap_or(0)
                ),
                (None, Some(witness)) => format!("{} ({})", report.pi1.status, witness),
                _ => report.pi1.status.clone(),
            };
            out.push_str(&format!("{:<20}{}\n", "pi1", pi1));
            out
        }
    }
}

fn corpus_for(n: usize, dim: Option<usize>, max_blowups: usize, seed: u64) -> Result<(CorpusSpec, usize)> {
    if max_blowups == 0 {
        bail!("--max-blowups must be at least 1");
    }
    if let Some(d) = dim {
        if d < 2 {
            bail!("--dim must be at least 2 for random corpora");
        }
    }
    let dims: Vec<usize> = dim.map_or_else(|| vec![2, 3, 4], |d| vec![d]);
    Ok((CorpusSpec::new(&dims, max_blowups, seed), n))
}

fn check_instance(suite: Suite, s: &StrataStructure, nodal: &NodalData, traces: &[TraceComponent], tietze_budget: usize) -> bool {
    match suite {
        Suite::Componentcount => {
            let Ok(parity) = components_by_parity(s, nodal, Provenance::BlowupConstruction) else {
                return false;
            };
            let searched = components_by_search(&parity.separator.residual);
            parity.components == searched
                && searched.len() == parity.separator.separating_count() + 1
        }
        Suite::Simplyconnected => {
            match simply_connected_verdict(s, tietze_budget) {
                Pi1Verdict::SimplyConnected(Pi1Certificate::Tietze(reduction)) => {
                    if s.indices().len() <= 1 {
                        true
                    } else {
                        let base = *s.indices().first().expect("nonempty");
                        edge_path_presentation(&truncate(s, 3), base)
                            .is_ok_and(|p| replay_tietze(&p, &reduction.steps).is_ok())
                    }
                }
                Pi1Verdict::SimplyConnected(_) => true,
                _ => false,
            }
        }
        Suite::Nodsep => nod_vs_sep_equivalence(s, nodal)
            .is_ok_and(|report| report.holds()),
        Suite::Camachosad => {
            let model = FoliatedModel {
                structure: s.clone(),
                nodal: nodal.clone(),
                residues: None,
                traces: traces.to_vec(),
            };
            camacho_sad_check(&model).is_ok_and(|r| r.all_pass())
        }
    }
}

/// For the random camachosad suite: one covering separatrix per component,
/// then the same model with one deleted, which must fail on exactly that
/// component.
fn camachosad_random_instance(s: &StrataStructure, nodal: &NodalData) -> bool {
    let Ok(report) = separating_blocks(s, nodal) else {
        return false;
    };
    let components = components_by_search(&report.residual);
    if components.is_empty() {
        return true;
    }
    let traces: Vec<TraceComponent> = components
        .iter()
        .enumerate()
        .map(|(t, c)| TraceComponent {
            id: format!("t{}", t),
            host: *c.first().expect("nonempty component"),
            adjacent: BTreeSet::new(),
        })
        .collect();
    let covered = FoliatedModel {
        structure: s.clone(),
        nodal: nodal.clone(),
        residues: None,
        traces: traces.clone(),
    };
    if !camacho_sad_check(&covered).is_ok_and(|r| r.all_pass()) {
        return false;
    }
    let mut pruned = traces;
    let removed = pruned.pop().expect("nonempty");
    let uncovered = FoliatedModel {
        structure: s.clone(),
        nodal: nodal.clone(),
        residues: None,
        traces: pruned,
    };
    camacho_sad_check(&uncovered).is_ok_and(|r| {
        let failing: Vec<_> = r.failing().collect();
        failing.len() == 1 && failing[0].component.contains(&removed.host)
    })
}

fn run_check(
    suite: Suite,
    file: Option<&Path>,
    random: Option<usize>,
    dim: Option<usize>,
    max_blowups: usize,
    seed: u64,
    tietze_budget: usize,
) -> Result<i32> {
    let (passed, total) = match (file, random) {
        (Some(_), Some(_)) => bail!("give either a model file or --random, not both"),
        (None, None) => bail!("check needs a model file or --random N"),
        (Some(path), None) => {
            let subject = load_subject(path, None, None)?;
            let traces = subject
                .model
                .as_ref()
                .map(|m| m.trace_components())
                .unwrap_or_default();
            let ok =
                check_instance(suite, &subject.structure, &subject.nodal, &traces, tietze_budget);
            (ok as usize, 1)
        }
        (None, Some(n)) => {
            let (spec, total) = corpus_for(n, dim, max_blowups, seed)?;
            let mut passed = 0;
            for i in 0..total {
                let inst = instance(&spec, i);
                let ok = match suite {
                    Suite::Simplyconnected => inst.trace.structures().iter().all(|s| {
                        check_instance(suite, s, &NodalData::empty(), &[], tietze_budget)
                    }),
                    Suite::Camachosad => {
                        let s = inst.trace.final_structure();
                        derive_nodal_data(&s, &inst.model)
                            .is_ok_and(|nodal| camachosad_random_instance(&s, &nodal))
                    }
                    _ => {
                        let s = inst.trace.final_structure();
                        derive_nodal_data(&s, &inst.model).is_ok_and(|nodal| {
                            check_instance(suite, &s, &nodal, &[], tietze_budget)
                        })
                    }
                };
                passed += ok as usize;
            }
            (passed, total)
        }
    };
    println!("{}/{} pass", passed, total);
    Ok(if passed == total { 0 } else { 1 })
}

#[derive(Serialize)]
struct InvariantReport {
    n: usize,
    e: usize,
    rank: usize,
    tangent_dim: usize,
    theta: usize,
    t_sequence: Vec<usize>,
    chain: Vec<Vec<usize>>,
    zeta: u8,
    #[serde(skip_serializing_if = "Option::is_none")]
    invariant: Option<[u64; 3]>,
    #[serde(skip_serializing_if = "Option::is_none")]
    locally_simple: Option<bool>,
}

fn run_invariant(matrix: &Path, nu: Option<u64>, format: Format) -> Result<i32> {
    let doc: MatrixDoc = read_json(matrix)?;
    let space = CovectorSpace::new(doc.n, doc.e, doc.to_rows()?).map_err(|e| anyhow!("{}", e))?;
    let ts = t_sequence(&space);
    let zeta_value = zeta(&space).map_err(|e| anyhow!("{}", e))?;
    let (invariant, locally_simple) = match nu {
        Some(nu) => {
            let inv = control_invariant(nu, &space).map_err(|e| anyhow!("{}", e))?;
            (
                Some([inv.multiplicity, inv.tangent_dim as u64, inv.zeta as u64]),
                Some(inv <= LOCALLY_SIMPLE_THRESHOLD),
            )
        }
        None => (None, None),
    };
    let report = InvariantReport {
        n: space.ambient(),
        e: space.divisor_count(),
        rank: space.rank(),
        tangent_dim: space.tangent_dim(),
        theta: theta(&space),
        t_sequence: ts.values,
        chain: ts.chain.iter().map(|j| j.iter().copied().collect()).collect(),
        zeta: zeta_value,
        invariant,
        locally_simple,
    };
    let rendered = match format {
        Format::Json => to_json_string(&report),
        Format::Table => {
            let mut out = String::new();
            out.push_str(&format!("{:<16}{}\n", "rank", report.rank));
            out.push_str(&format!("{:<16}{}\n", "tangent dim", report.tangent_dim));
            out.push_str(&format!("{:<16}{}\n", "theta", report.theta));
            out.push_str(&format!("{:<16}{:?}\n", "t sequence", report.t_sequence));
            out.push_str(&format!("{:<16}{}\n", "zeta", report.zeta));
            if let Some([m, d, z]) = report.invariant {
                out.push_str(&format!("{:<16}({}, {}, {})\n", "invariant", m, d, z));
                out.push_str(&format!(
                    "{:<16}{}\n",
                    "locally simple",
                    report.locally_simple.unwrap_or(false)
                ));
            }
            out
        }
    };
    print!("{}", rendered);
    Ok(0)
}

fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Generate { dim, blowups, output } => {
            let centers = parse_centers(&blowups)?;
            let trace = blowup_sequence(dim, &centers).map_err(|e| anyhow!("{}", e))?;
            let doc = TraceDoc::from_core(&trace)?;
            write_output(output.as_deref(), &to_json_string(&doc))?;
            Ok(0)
        }
        Command::Analyze { file, residues, nodal, format } => {
            let subject = load_subject(&file, residues.as_deref(), nodal.as_deref())?;
            let report = analyze_report(&subject, budget()?)?;
            print!("{}", render_analyze(&report, format));
            Ok(0)
        }
        Command::Check { suite, file, model, random, dim, max_blowups, seed } => {
            let file = match (file, model) {
                (Some(a), Some(b)) if a != b => {
                    bail!("positional file and --model disagree");
                }
                (a, b) => a.or(b),
            };
            run_check(suite, file.as_deref(), random, dim, max_blowups, seed, budget()?)
        }
        Command::Export { file, residues, nodal, dot } => {
            let subject = load_subject(&file, residues.as_deref(), nodal.as_deref())?;
            let separator = separating_blocks(&subject.structure, &subject.nodal)
                .map_err(|e| anyhow!("{}", e))?;
            let rendered = dot::dual_graph_dot(
                &subject.structure,
                &subject.names,
                &subject.nodal,
                &separator.separator_set,
            );
            write_output(dot.as_deref(), &rendered)?;
            Ok(0)
        }
        Command::Invariant { matrix, nu, format } => run_invariant(&matrix, nu, format),
    }
}
