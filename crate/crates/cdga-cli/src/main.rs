//! `dga`: command-line front end for the cdga workbench.
//!
//! Reads `.dga` files, runs the library pipelines, and prints either a
//! human table (sorted by degree) or a schema-stable JSON report
//! `{command, cutoff, verdict, data}`. Exit codes: 0 = success / property
//! holds, 1 = property violated, 2 = invalid input, 3 = resource bound
//! exceeded.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use cdga::algebra::DGAlgebra;
use cdga::cohomology::{betti, cohomology_basis, CohomologyClass};
use cdga::error::Error as LibError;
use cdga::fibration::{
    algebraic_fiber, attach_odd_sphere, build_tower, fiber_dimension_probe, finite_subtower,
    gysin_verify, FiberVerdict, Fibration,
};
use cdga::format::{parse, parse_element, print_algebra, print_fibration, ParsedInput};
use cdga::minimal::{compare_models, minimal_model, psi_to_sphere, ModelTarget};
use cdga::verify::{
    injectivity_check, lift_fibration, search_killing_fibrations, sphere_engine, SearchSpace,
    SphereEngineOutcome, DEFAULT_ENUMERATION_CAP,
};

#[derive(Parser)]
#[command(
    name = "dga",
    version,
    about = "Exact workbench for commutative differential graded algebras over Q"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Emit a machine-readable JSON report instead of tables.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for the per-degree parallelism (default: all cores).
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Check d-degree homogeneity and d^2 = 0 through the cutoff, plus the
    /// stage filtration for fibrations.
    Validate {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
    },
    /// Betti numbers (and optionally representatives) through the cutoff.
    Cohomology {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
        /// Also list canonical representatives per degree.
        #[arg(long)]
        reps: bool,
    },
    /// Attach one odd generator with differential the given even class.
    Attach {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
        #[arg(long)]
        max_degree: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify the Gysin sequence of a single odd attachment.
    Gysin {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
    },
    /// Iterate the even-cohomology-killing construction to convergence.
    KillEven {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, default_value_t = 8)]
        max_stages: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Extract the finite sub-tower killing a class.
    Subtower {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
        #[arg(long)]
        max_degree: usize,
        #[arg(long, default_value_t = 8)]
        max_stages: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// The algebraic fiber of a fibration (base generators set to zero).
    Fiber {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Evidence verdict on the fiber's cohomological dimension.
    Probe {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
        #[arg(long)]
        margin: Option<usize>,
    },
    /// Sullivan minimal model of the input through the cutoff.
    MinimalModel {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Compare the minimal model with the bouquet model through the cutoff
    /// (which must be odd: 2N - 1).
    CompareModels {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
    },
    /// Project a minimal odd algebra onto a single sphere along a class.
    Psi {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
        #[arg(long)]
        max_degree: usize,
    },
    /// Exact kernel of the map induced on cohomology by the inclusion,
    /// for degrees below the (even) cutoff.
    Injectivity {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
    },
    /// The v^n contradiction engine over a single odd sphere base.
    SphereEngine {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
        #[arg(long)]
        power_bound: Option<u32>,
    },
    /// Exhaustive sweep of small fibrations killing a class.
    Search {
        file: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        class: String,
        #[arg(long)]
        max_degree: usize,
        /// Comma-separated fiber generator degrees to draw from.
        #[arg(long)]
        fiber_degrees: String,
        #[arg(long, default_value_t = 2)]
        max_fiber_gens: usize,
        /// Inclusive coefficient range, e.g. -2,2.
        #[arg(long, default_value = "-2,2", allow_hyphen_values = true)]
        coeff_range: String,
        #[arg(long)]
        cap: Option<u128>,
    },
    /// Rebuild a fibration over a minimal model of its base.
    Lift {
        file: PathBuf,
        #[arg(long)]
        max_degree: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Verdict {
    Pass,
    Violated,
    InvalidInput,
    ResourceBound,
}

impl Verdict {
    fn code(self) -> u8 {
        match self {
            Verdict::Pass => 0,
            Verdict::Violated => 1,
            Verdict::InvalidInput => 2,
            Verdict::ResourceBound => 3,
        }
    }

    fn label(self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Violated => "violated",
            Verdict::InvalidInput => "invalid-input",
            Verdict::ResourceBound => "resource-bound",
        }
    }
}

struct Outcome {
    verdict: Verdict,
    data: Value,
    human: String,
}

struct Failure {
    verdict: Verdict,
    message: String,
}

impl From<LibError> for Failure {
    fn from(e: LibError) -> Self {
        let verdict = match &e {
            LibError::EnumerationCap { .. } => Verdict::ResourceBound,
            _ => Verdict::InvalidInput,
        };
        Failure {
            verdict,
            message: e.to_string(),
        }
    }
}

impl From<cdga::format::ParseError> for Failure {
    fn from(e: cdga::format::ParseError) -> Self {
        Failure {
            verdict: Verdict::InvalidInput,
            message: e.to_string(),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(n) = cli.threads {
        // Ignore "already initialized": only the first build wins.
        let _ = rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build_global();
    }
    let (command_name, cutoff) = describe(&cli.command);
    match run(&cli.command) {
        Ok(outcome) => {
            if cli.json {
                let report = json!({
                    "command": command_name,
                    "cutoff": cutoff,
                    "verdict": outcome.verdict.label(),
                    "data": outcome.data,
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                print!("{}", outcome.human);
            }
            ExitCode::from(outcome.verdict.code())
        }
        Err(failure) => {
            if cli.json {
                let report = json!({
                    "command": command_name,
                    "cutoff": cutoff,
                    "verdict": failure.verdict.label(),
                    "data": { "error": failure.message },
                });
                println!(
                    "{}",
                    serde_json::to_string_pretty(&report).expect("serializable")
                );
            } else {
                eprintln!("error: {}", failure.message);
            }
            ExitCode::from(failure.verdict.code())
        }
    }
}

fn describe(cmd: &Command) -> (&'static str, usize) {
    match cmd {
        Command::Validate { max_degree, .. } => ("validate", *max_degree),
        Command::Cohomology { max_degree, .. } => ("cohomology", *max_degree),
        Command::Attach { max_degree, .. } => ("attach", *max_degree),
        Command::Gysin { max_degree, .. } => ("gysin", *max_degree),
        Command::KillEven { max_degree, .. } => ("kill-even", *max_degree),
        Command::Subtower { max_degree, .. } => ("subtower", *max_degree),
        Command::Fiber { max_degree, .. } => ("fiber", *max_degree),
        Command::Probe { max_degree, .. } => ("probe", *max_degree),
        Command::MinimalModel { max_degree, .. } => ("minimal-model", *max_degree),
        Command::CompareModels { max_degree, .. } => ("compare-models", *max_degree),
        Command::Psi { max_degree, .. } => ("psi", *max_degree),
        Command::Injectivity { max_degree, .. } => ("injectivity", *max_degree),
        Command::SphereEngine { max_degree, .. } => ("sphere-engine", *max_degree),
        Command::Search { max_degree, .. } => ("search", *max_degree),
        Command::Lift { max_degree, .. } => ("lift", *max_degree),
    }
}

fn load(path: &Path) -> Result<ParsedInput, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure {
        verdict: Verdict::InvalidInput,
        message: format!("cannot read {}: {e}", path.display()),
    })?;
    Ok(parse(&text)?)
}

fn require_fibration(input: ParsedInput) -> Result<Fibration, Failure> {
    match input {
        ParsedInput::Fibration(f) => Ok(f),
        ParsedInput::Algebra(_) => Err(Failure {
            verdict: Verdict::InvalidInput,
            message: "this command needs a fibration (`fiber ... stage n` lines)".to_string(),
        }),
    }
}

fn class_from(alg: &DGAlgebra, expr: &str) -> Result<CohomologyClass, Failure> {
    let elem = parse_element(alg, expr)?;
    Ok(CohomologyClass::new(alg, elem)?)
}

fn write_output(path: &Option<PathBuf>, text: &str) -> Result<(), Failure> {
    if let Some(p) = path {
        std::fs::write(p, text).map_err(|e| Failure {
            verdict: Verdict::InvalidInput,
            message: format!("cannot write {}: {e}", p.display()),
        })?;
    }
    Ok(())
}

fn betti_table(b: &[usize]) -> String {
    let mut out = String::from("degree  dim\n");
    for (n, dim) in b.iter().enumerate() {
        out.push_str(&format!("{n:>6}  {dim}\n"));
    }
    out
}

fn verdict_json(v: &FiberVerdict) -> Value {
    match v {
        FiberVerdict::FiniteUpTo(d) => json!({ "kind": "finite-up-to", "top_degree": d }),
        FiberVerdict::NonzeroNearCutoff { nonzero_degrees } => json!({
            "kind": "nonzero-near-cutoff",
            "nonzero_degrees": nonzero_degrees,
        }),
    }
}

fn verdict_text(v: &FiberVerdict) -> String {
    match v {
        FiberVerdict::FiniteUpTo(d) => format!("FiniteUpTo({d})"),
        FiberVerdict::NonzeroNearCutoff { nonzero_degrees } => {
            format!("NonzeroNearCutoff(degrees {nonzero_degrees:?})")
        }
    }
}

fn run(cmd: &Command) -> Result<Outcome, Failure> {
    match cmd {
        Command::Validate { file, max_degree } => {
            let input = load(file)?;
            let report = input.total().validate(*max_degree);
            let mut human = String::new();
            let mut data = json!({
                "algebra_violations": report
                    .violations
                    .iter()
                    .map(|v| v.to_string())
                    .collect::<Vec<_>>(),
            });
            let mut pass = report.passed();
            if report.passed() {
                human.push_str(&format!("d^2 = 0 and degrees valid through {max_degree}\n"));
            } else {
                for v in &report.violations {
                    human.push_str(&format!("violation: {v}\n"));
                }
            }
            if let ParsedInput::Fibration(fib) = &input {
                let freport = fib.validate();
                pass = pass && freport.filtration_ok();
                human.push_str(&format!(
                    "filtration: {}\nminimal: {}\n",
                    if freport.filtration_ok() {
                        "ok"
                    } else {
                        "violated"
                    },
                    freport.minimal()
                ));
                data["fibration"] = json!({
                    "filtration_ok": freport.filtration_ok(),
                    "minimal": freport.minimal(),
                    "violations": freport
                        .filtration_violations
                        .iter()
                        .map(|v| format!(
                            "stage-{} generator `{}` uses stage-{} generator `{}`",
                            v.stage, v.generator, v.offending_stage, v.offending
                        ))
                        .collect::<Vec<_>>(),
                });
            }
            Ok(Outcome {
                verdict: if pass { Verdict::Pass } else { Verdict::Violated },
                data,
                human,
            })
        }

        Command::Cohomology {
            file,
            max_degree,
            reps,
        } => {
            let input = load(file)?;
            let alg = input.total();
            let b = betti(alg, *max_degree)?;
            let mut human = betti_table(&b);
            let mut data = json!({ "betti": b });
            if *reps {
                let mut all = Vec::new();
                for n in 0..=*max_degree {
                    let h = cohomology_basis(alg, n)?;
                    let rendered: Vec<String> =
                        h.representatives.iter().map(|r| alg.render(r)).collect();
                    if !rendered.is_empty() {
                        human.push_str(&format!("H^{n}: {}\n", rendered.join(", ")));
                    }
                    all.push(rendered);
                }
                data["representatives"] = json!(all);
            }
            Ok(Outcome {
                verdict: Verdict::Pass,
                data,
                human,
            })
        }

        Command::Attach {
            file,
            class,
            max_degree,
            output,
        } => {
            let input = load(file)?;
            let base = input.total().clone();
            let beta = class_from(&base, class)?;
            let (fib, euler) = attach_odd_sphere(&base, &beta)?;
            let b = betti(fib.total(), *max_degree)?;
            let gen = fib.total().generator(euler.attached)?;
            let human = format!(
                "attached `{}` of degree {} with d = {}\n{}",
                gen.name,
                gen.degree,
                base.render(&euler.euler_class.representative),
                betti_table(&b)
            );
            write_output(output, &print_fibration(&fib))?;
            Ok(Outcome {
                verdict: Verdict::Pass,
                data: json!({
                    "generator": gen.name,
                    "generator_degree": gen.degree,
                    "euler_degree": euler.euler_class.degree,
                    "total_betti": b,
                }),
                human,
            })
        }

        Command::Gysin { file, max_degree } => {
            let fib = require_fibration(load(file)?)?;
            let report = gysin_verify(&fib, *max_degree)?;
            let pass = report.passed();
            let mut human = format!(
                "gysin nodes checked: {} (euler degree {})\n",
                report.nodes.len(),
                report.euler_degree
            );
            for node in &report.nodes {
                human.push_str(&format!(
                    "i={:>2}  base: {}  total: {}  connecting: {}  kernel-law: {}\n",
                    node.i,
                    node.exact_at_upper_base,
                    node.exact_at_total,
                    node.exact_at_connecting,
                    node.kernel_law
                ));
            }
            human.push_str(if pass { "gysin: pass\n" } else { "gysin: FAIL\n" });
            Ok(Outcome {
                verdict: if pass { Verdict::Pass } else { Verdict::Violated },
                data: json!({
                    "euler_degree": report.euler_degree,
                    "nodes": report
                        .nodes
                        .iter()
                        .map(|n| json!({
                            "i": n.i,
                            "exact_at_upper_base": n.exact_at_upper_base,
                            "exact_at_total": n.exact_at_total,
                            "exact_at_connecting": n.exact_at_connecting,
                            "kernel_law": n.kernel_law,
                        }))
                        .collect::<Vec<_>>(),
                }),
                human,
            })
        }

        Command::KillEven {
            file,
            max_degree,
            max_stages,
            output,
        } => {
            let input = load(file)?;
            let a0 = input.total().clone();
            let tower = build_tower(&a0, *max_degree, *max_stages)?;
            let zero_map_failure = tower.verify_zero_map()?;
            let mut human = String::new();
            let mut stages = Vec::new();
            for round in 1..=tower.rounds() {
                let added = tower.generators_added_at(round);
                human.push_str(&format!(
                    "stage {round}: added {} generator(s): {}\n",
                    added.len(),
                    added.join(", ")
                ));
                stages.push(json!({ "round": round, "added": added }));
            }
            human.push_str(&format!(
                "converged: {} after {} stage(s)\n",
                tower.converged,
                tower.rounds()
            ));
            if !tower.residual_even.is_empty() {
                human.push_str(&format!("residual even betti: {:?}\n", tower.residual_even));
            }
            write_output(output, &print_fibration(tower.last()))?;
            let verdict = if zero_map_failure.is_some() {
                Verdict::Violated
            } else if tower.converged {
                Verdict::Pass
            } else {
                Verdict::ResourceBound
            };
            Ok(Outcome {
                verdict,
                data: json!({
                    "converged": tower.converged,
                    "rounds": tower.rounds(),
                    "stages": stages,
                    "residual_even": tower.residual_even,
                    "zero_map_ok": zero_map_failure.is_none(),
                }),
                human,
            })
        }

        Command::Subtower {
            file,
            class,
            max_degree,
            max_stages,
            output,
        } => {
            let input = load(file)?;
            let a0 = input.total().clone();
            let alpha = class_from(&a0, class)?;
            let tower = build_tower(&a0, *max_degree, *max_stages)?;
            let sub = match finite_subtower(&tower, &alpha) {
                Ok(sub) => sub,
                Err(LibError::ClassNotKilled) => {
                    return Ok(Outcome {
                        verdict: Verdict::Violated,
                        data: json!({ "killed": false, "rounds": tower.rounds() }),
                        human: format!(
                            "class does not die within {} recorded stage(s)\n",
                            tower.rounds()
                        ),
                    })
                }
                Err(e) => return Err(e.into()),
            };
            let names: Vec<String> = sub
                .fiber()
                .iter()
                .map(|fg| sub.total().generators()[fg.id.index()].name.clone())
                .collect();
            let human = format!(
                "sub-tower generators ({}): {}\n",
                names.len(),
                if names.is_empty() {
                    "(none; class already dies in the base)".to_string()
                } else {
                    names.join(", ")
                }
            );
            write_output(output, &print_fibration(&sub))?;
            Ok(Outcome {
                verdict: Verdict::Pass,
                data: json!({ "killed": true, "generators": names }),
                human,
            })
        }

        Command::Fiber {
            file,
            max_degree: _,
            output,
        } => {
            let fib = require_fibration(load(file)?)?;
            let fiber = algebraic_fiber(&fib)?;
            let text = print_algebra(&fiber);
            write_output(output, &text)?;
            Ok(Outcome {
                verdict: Verdict::Pass,
                data: json!({
                    "generators": fiber
                        .generators()
                        .iter()
                        .map(|g| json!({ "name": g.name, "degree": g.degree }))
                        .collect::<Vec<_>>(),
                    "text": text,
                }),
                human: text,
            })
        }

        Command::Probe {
            file,
            max_degree,
            margin,
        } => {
            let fib = require_fibration(load(file)?)?;
            let probe = fiber_dimension_probe(&fib, *max_degree, *margin)?;
            let human = format!(
                "fiber betti: {:?}\nverdict: {}\n",
                probe.fiber_betti,
                verdict_text(&probe.verdict)
            );
            Ok(Outcome {
                verdict: Verdict::Pass,
                data: json!({
                    "fiber_betti": probe.fiber_betti,
                    "margin": probe.margin,
                    "fiber_verdict": verdict_json(&probe.verdict),
                }),
                human,
            })
        }

        Command::MinimalModel {
            file,
            max_degree,
            output,
        } => {
            let input = load(file)?;
            let target = input.total().clone();
            let mm = minimal_model(ModelTarget::Algebra(target), *max_degree)?;
            mm.verify_minimality()?;
            mm.verify_quasi_iso()?;
            let counts = mm.generator_counts();
            let mut human = String::from("degree  generators\n");
            for (deg, count) in &counts {
                human.push_str(&format!("{deg:>6}  {count}\n"));
            }
            human.push_str(&format!(
                "quasi-isomorphism verified through degree {max_degree}\n"
            ));
            write_output(output, &print_algebra(&mm.model))?;
            Ok(Outcome {
                verdict: Verdict::Pass,
                data: json!({
                    "generator_counts": counts
                        .iter()
                        .map(|(d, c)| json!([d, c]))
                        .collect::<Vec<_>>(),
                    "quasi_iso_verified": true,
                }),
                human,
            })
        }

        Command::CompareModels { file, max_degree } => {
            if *max_degree % 2 == 0 {
                return Err(Failure {
                    verdict: Verdict::InvalidInput,
                    message: "compare-models needs an odd --max-degree (2N - 1)".to_string(),
                });
            }
            let input = load(file)?;
            let b = input.total().clone();
            let big_n = (*max_degree).div_ceil(2);
            let cmp = compare_models(&b, big_n)?;
            let mut human = format!("comparison through degree {max_degree} (N = {big_n})\n");
            human.push_str("degree  model  bouquet\n");
            let mut degrees: Vec<usize> = cmp
                .model_counts
                .keys()
                .chain(cmp.bouquet_counts.keys())
                .copied()
                .collect();
            degrees.sort_unstable();
            degrees.dedup();
            for d in degrees {
                human.push_str(&format!(
                    "{d:>6}  {:>5}  {:>7}\n",
                    cmp.model_counts.get(&d).copied().unwrap_or(0),
                    cmp.bouquet_counts.get(&d).copied().unwrap_or(0)
                ));
            }
            human.push_str(&format!("counts agree: {}\n", cmp.counts_agree));
            Ok(Outcome {
                verdict: if cmp.counts_agree {
                    Verdict::Pass
                } else {
                    Verdict::Violated
                },
                data: json!({
                    "model_counts": cmp
                        .model_counts
                        .iter()
                        .map(|(d, c)| json!([d, c]))
                        .collect::<Vec<_>>(),
                    "bouquet_counts": cmp
                        .bouquet_counts
                        .iter()
                        .map(|(d, c)| json!([d, c]))
                        .collect::<Vec<_>>(),
                    "counts_agree": cmp.counts_agree,
                    "phi_verified": true,
                }),
                human,
            })
        }

        Command::Psi {
            file,
            class,
            max_degree,
        } => {
            let input = load(file)?;
            let mb = input.total().clone();
            let alpha = class_from(&mb, class)?;
            let proj = psi_to_sphere(&mb, &alpha)?;
            let chain = proj.psi.validate(*max_degree);
            let pivot = mb.generator(proj.pivot)?.name.clone();
            let human = format!(
                "pivot generator: {pivot}\neta degree: {}\nchain map: {}\n",
                proj.eta_degree,
                chain.passed()
            );
            Ok(Outcome {
                verdict: if chain.passed() {
                    Verdict::Pass
                } else {
                    Verdict::Violated
                },
                data: json!({
                    "pivot": pivot,
                    "eta_degree": proj.eta_degree,
                    "chain_map": chain.passed(),
                }),
                human,
            })
        }

        Command::Injectivity { file, max_degree } => {
            if *max_degree % 2 == 1 {
                return Err(Failure {
                    verdict: Verdict::InvalidInput,
                    message: "injectivity needs an even --max-degree (2N)".to_string(),
                });
            }
            let fib = require_fibration(load(file)?)?;
            let report = injectivity_check(&fib, *max_degree / 2)?;
            let mut human = String::new();
            if let Some(w) = &report.precondition_warning {
                human.push_str(&format!("warning: {w}\n"));
            }
            let mut kernels = Vec::new();
            for d in &report.degrees {
                if d.kernel_dimension > 0 {
                    for w in &d.witnesses {
                        human.push_str(&format!(
                            "degree {}: [{}] dies, preimage {}\n",
                            d.degree,
                            fib.base().render(&w.class_element),
                            fib.total().render(&w.preimage)
                        ));
                    }
                }
                kernels.push(json!({
                    "degree": d.degree,
                    "base_dimension": d.base_dimension,
                    "kernel_dimension": d.kernel_dimension,
                    "witnesses": d
                        .witnesses
                        .iter()
                        .map(|w| json!({
                            "class": fib.base().render(&w.class_element),
                            "preimage": fib.total().render(&w.preimage),
                        }))
                        .collect::<Vec<_>>(),
                }));
            }
            human.push_str(&format!(
                "injective below degree {}: {}\nfiber verdict: {}\n",
                *max_degree,
                report.injective(),
                verdict_text(&report.fiber_probe.verdict)
            ));
            Ok(Outcome {
                verdict: if report.injective() {
                    Verdict::Pass
                } else {
                    Verdict::Violated
                },
                data: json!({
                    "injective": report.injective(),
                    "degrees": kernels,
                    "boundary_degree": {
                        "degree": report.boundary_degree.degree,
                        "kernel_dimension": report.boundary_degree.kernel_dimension,
                    },
                    "fiber_verdict": verdict_json(&report.fiber_probe.verdict),
                    "warning": report.precondition_warning,
                }),
                human,
            })
        }

        Command::SphereEngine {
            file,
            max_degree,
            power_bound,
        } => {
            let fib = require_fibration(load(file)?)?;
            let report = sphere_engine(&fib, *max_degree, *power_bound)?;
            let (verdict, human, data) = match &report.outcome {
                SphereEngineOutcome::TrivialCase => (
                    Verdict::Pass,
                    "trivial case: |x| = 1\n".to_string(),
                    json!({ "outcome": "trivial-case" }),
                ),
                SphereEngineOutcome::Injective => (
                    Verdict::Pass,
                    "no v with dv = x: the class survives\n".to_string(),
                    json!({ "outcome": "injective" }),
                ),
                SphereEngineOutcome::PersistentFiber { v, nonzero_powers } => {
                    let mut text = format!(
                        "v = {} solves dv = x; no power v^n is exact for n <= {}\n",
                        fib.total().render(v),
                        report.power_bound
                    );
                    for (n, deg) in nonzero_powers {
                        text.push_str(&format!("[v^{n}] != 0 in fiber degree {deg}\n"));
                    }
                    (
                        Verdict::Pass,
                        text,
                        json!({
                            "outcome": "persistent-fiber",
                            "v": fib.total().render(v),
                            "nonzero_powers": nonzero_powers
                                .iter()
                                .map(|(n, d)| json!([n, d]))
                                .collect::<Vec<_>>(),
                        }),
                    )
                }
                SphereEngineOutcome::ContradictionTrace { v, minimal_n, .. } => (
                    Verdict::Violated,
                    format!(
                        "contradiction: [v^{minimal_n}] = 0 certified [v^{}] = 0, v = {}\n",
                        minimal_n - 1,
                        fib.total().render(v)
                    ),
                    json!({ "outcome": "contradiction-trace", "minimal_n": minimal_n }),
                ),
            };
            Ok(Outcome {
                verdict,
                data,
                human,
            })
        }

        Command::Search {
            file,
            class,
            max_degree,
            fiber_degrees,
            max_fiber_gens,
            coeff_range,
            cap,
        } => {
            let input = load(file)?;
            let base = input.total().clone();
            let target = class_from(&base, class)?;
            let pool: Vec<usize> = fiber_degrees
                .split(',')
                .filter(|s| !s.trim().is_empty())
                .map(|s| {
                    s.trim().parse::<usize>().map_err(|_| Failure {
                        verdict: Verdict::InvalidInput,
                        message: format!("bad fiber degree `{s}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            let parts: Vec<&str> = coeff_range.split(',').collect();
            if parts.len() != 2 {
                return Err(Failure {
                    verdict: Verdict::InvalidInput,
                    message: "coeff-range must be `min,max`".to_string(),
                });
            }
            let lo: i64 = parts[0].trim().parse().map_err(|_| Failure {
                verdict: Verdict::InvalidInput,
                message: "bad coefficient minimum".to_string(),
            })?;
            let hi: i64 = parts[1].trim().parse().map_err(|_| Failure {
                verdict: Verdict::InvalidInput,
                message: "bad coefficient maximum".to_string(),
            })?;
            let space = SearchSpace {
                base,
                fiber_degree_pool: pool,
                max_fiber_generators: *max_fiber_gens,
                coeff_min: lo,
                coeff_max: hi,
                cutoff: *max_degree,
                enumeration_cap: cap.unwrap_or(DEFAULT_ENUMERATION_CAP),
            };
            let report = search_killing_fibrations(&space, &target)?;
            let mut human = format!(
                "{} candidate(s), {} valid, {} hit(s) kill the class\n",
                report.total_candidates,
                report.valid_candidates,
                report.hits.len()
            );
            let mut finite_hits = 0usize;
            let mut hits = Vec::new();
            for hit in &report.hits {
                let finite = matches!(hit.probe.verdict, FiberVerdict::FiniteUpTo(_));
                if finite {
                    finite_hits += 1;
                }
                human.push_str(&format!(
                    "hit #{}: degrees {:?}; {}; fiber {}\n",
                    hit.index,
                    hit.fiber_degrees,
                    hit.differentials.join("; "),
                    verdict_text(&hit.probe.verdict)
                ));
                hits.push(json!({
                    "index": hit.index.to_string(),
                    "fiber_degrees": hit.fiber_degrees,
                    "differentials": hit.differentials,
                    "fiber_verdict": verdict_json(&hit.probe.verdict),
                }));
            }
            human.push_str(&format!("hits with finite fiber verdict: {finite_hits}\n"));
            Ok(Outcome {
                verdict: if finite_hits == 0 {
                    Verdict::Pass
                } else {
                    Verdict::Violated
                },
                data: json!({
                    "total_candidates": report.total_candidates.to_string(),
                    "valid_candidates": report.valid_candidates.to_string(),
                    "hits": hits,
                    "finite_verdict_hits": finite_hits,
                }),
                human,
            })
        }

        Command::Lift {
            file,
            max_degree,
            output,
        } => {
            let fib = require_fibration(load(file)?)?;
            let max_dx = fib
                .fiber()
                .iter()
                .map(|fg| fib.total().generators()[fg.id.index()].degree + 1)
                .max()
                .unwrap_or(0);
            let cutoff = (*max_degree).max(max_dx);
            let mm = minimal_model(ModelTarget::Algebra(fib.base().clone()), cutoff)?;
            let lift = lift_fibration(&fib, &mm, *max_degree)?;
            lift.verify(&mm, *max_degree)?;
            let mut human = String::from("lifted differentials:\n");
            let mut lifted = Vec::new();
            for fg in lift.lifted.fiber() {
                let name = lift.lifted.total().generators()[fg.id.index()].name.clone();
                let image = lift.lifted.total().differential_of(fg.id)?;
                let g_image = lift.g.image_of(fg.id)?;
                human.push_str(&format!(
                    "d {name} = {}   (g({name}) = {})\n",
                    lift.lifted.total().render(image),
                    fib.total().render(g_image)
                ));
                lifted.push(json!({
                    "generator": name,
                    "differential": lift.lifted.total().render(image),
                    "g_image": fib.total().render(g_image),
                }));
            }
            human.push_str(&format!(
                "quasi-isomorphism verified through degree {max_degree}\n"
            ));
            write_output(output, &print_fibration(&lift.lifted))?;
            Ok(Outcome {
                verdict: Verdict::Pass,
                data: json!({ "lifted": lifted, "verified": true }),
                human,
            })
        }
    }
}
