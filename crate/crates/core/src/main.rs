use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use online_domset::adversary::det::{run_against, verify_ratio_cases, AdversaryParams};
use online_domset::adversary::rand::{
    build_rand_adversary, check_lemma17, evaluate_rand_adversary, MonteCarlo, ProbabilityOracle, RaExact,
};
use online_domset::analysis::{
    block_cost_audit, block_routine, check_lemma4, check_lemma5, check_properties, classify_blocks, normalize,
    normalize_step, theorem2_audit, AnalysisError, Property,
};
use online_domset::harness::{
    exhaustive_small_sweep, generate, run_experiment, uniform_specs, GeneratorKind, GeneratorSpec, RevealOrder,
};
use online_domset::online::{
    run_algorithm_a, run_algorithm_b, run_baseline_greedy, run_ra_sampled, verify_membership_table, AlgorithmKind,
    RaSampled,
};
use online_domset::opt::{enumerate_optimal_sets, min_dominating_set_tree, DEFAULT_ENUM_CAP};
use online_domset::tree::{parse_parents_json, validate};
use online_domset::{OnlineTreeInput, RaMixture};

#[derive(Parser)]
#[command(name = "online-domset", version, about = "Online dominating set on trees")]
struct Cli {
    /// Instance file, `{"parents":[0,1,2,2]}`.
    #[arg(long, global = true)]
    input: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum RunAlg {
    A,
    B,
    Ra,
    RaSample,
    Greedy,
}

#[derive(Clone, Copy, ValueEnum)]
enum DetAlg {
    A,
    B,
    Greedy,
    AlwaysNew,
    NeverNew,
}

#[derive(Clone, Copy, ValueEnum)]
enum RandAlg {
    Ra,
}

#[derive(Subcommand)]
enum Command {
    /// Check an instance file against the input rules.
    Validate,
    /// Run one algorithm and print its trace.
    Run {
        #[arg(long, value_enum)]
        alg: RunAlg,
    },
    /// Minimum dominating set by the tree DP.
    Opt {
        /// Also list every optimal set (n <= 14).
        #[arg(long)]
        enumerate: bool,
    },
    /// Block decomposition, kinds, and per-block RA costs.
    Blocks,
    /// Structural properties and lemma checks for one instance.
    CheckLemmas {
        /// Use every optimal set instead of the DP witness.
        #[arg(long)]
        all_opt: bool,
    },
    /// One normalizing step towards a property, or the whole driver.
    Normalize {
        /// p1 to p6; omit to run every step until all properties hold.
        #[arg(long)]
        target: Option<Property>,
        #[arg(long, default_value_t = 64)]
        max_steps: usize,
    },
    /// Adaptive adversary against a deterministic algorithm.
    AdversaryDet {
        #[arg(long, value_enum)]
        alg: DetAlg,
        #[arg(long, default_value_t = 98)]
        max_length: usize,
        #[arg(long, default_value_t = 100)]
        max_t0: usize,
        #[arg(long, default_value_t = 100)]
        max_t1: usize,
    },
    /// Path-and-pendant adversary against RA.
    AdversaryRand {
        #[arg(long, value_enum, default_value = "ra")]
        alg: RandAlg,
        #[arg(long)]
        m: usize,
        /// Estimate by sampling instead of the exact mixture.
        #[arg(long)]
        trials: Option<u64>,
    },
    /// Emit one generated instance.
    Generate {
        #[arg(long, default_value = "uniform-attachment")]
        kind: GeneratorKind,
        #[arg(long)]
        n: usize,
        #[arg(long, default_value = "bfs")]
        order: RevealOrder,
    },
    /// Every parent array up to `max_n` vertices.
    Sweep {
        #[arg(long, default_value_t = 8)]
        max_n: usize,
    },
    /// Batch of uniform-attachment instances under every algorithm.
    Experiment {
        #[arg(long, default_value_t = 100)]
        count: usize,
        #[arg(long, default_value_t = 200)]
        max_n: usize,
    },
}

enum Failure {
    Usage(String),
    Violation(String),
}

type Outcome = Result<(String, bool), Failure>;

fn usage(e: impl std::fmt::Display) -> Failure {
    Failure::Usage(e.to_string())
}

fn read_parents(cli: &Cli) -> Result<Vec<usize>, Failure> {
    let path = cli.input.as_ref().ok_or_else(|| usage("--input is required"))?;
    let text = fs::read_to_string(path).map_err(|e| usage(format!("{}: {e}", path.display())))?;
    parse_parents_json(&text).map_err(usage)
}

fn read_input(cli: &Cli) -> Result<OnlineTreeInput, Failure> {
    OnlineTreeInput::new(read_parents(cli)?).map_err(usage)
}

fn pretty(v: &impl serde::Serialize) -> String {
    serde_json::to_string_pretty(v).expect("reports serialize")
}

fn json_only(cli: &Cli) -> Result<(), Failure> {
    match cli.format {
        Format::Json => Ok(()),
        Format::Csv => Err(usage("this subcommand only emits json")),
    }
}

fn execute(cli: &Cli) -> Outcome {
    match &cli.command {
        Command::Validate => {
            json_only(cli)?;
            let parents = read_parents(cli)?;
            let v = validate(&parents);
            Ok((pretty(&json!({ "valid": v.is_ok(), "n": parents.len(), "validation": v })), v.is_ok()))
        }
        Command::Run { alg } => {
            json_only(cli)?;
            let input = read_input(cli)?;
            let out = match alg {
                RunAlg::A => json!({ "trace": run_algorithm_a(&input) }),
                RunAlg::B => json!({ "trace": run_algorithm_b(&input) }),
                RunAlg::Greedy => json!({ "trace": run_baseline_greedy(&input) }),
                RunAlg::RaSample => json!({ "seed": cli.seed, "trace": run_ra_sampled(&input, cli.seed) }),
                RunAlg::Ra => {
                    let mix = RaMixture::run(&input);
                    let e = mix.expected_cost();
                    json!({ "a": mix.a, "b": mix.b, "expected_cost": format!("{}/{}", e.numer(), e.denom()) })
                }
            };
            Ok((pretty(&out), true))
        }
        Command::Opt { enumerate } => {
            json_only(cli)?;
            let input = read_input(cli)?;
            let view = input.view();
            let mut res = min_dominating_set_tree(&view).map_err(usage)?;
            if *enumerate {
                res.all = Some(enumerate_optimal_sets(&view, DEFAULT_ENUM_CAP).map_err(usage)?);
            }
            Ok((pretty(&res), true))
        }
        Command::Blocks => {
            json_only(cli)?;
            let input = read_input(cli)?;
            let view = input.view();
            let assignment = block_routine(&view);
            let costs = block_cost_audit(&view, &assignment).map_err(usage)?;
            let witness = min_dominating_set_tree(&view).map_err(usage)?.witness;
            let classification = classify_blocks(&view, &assignment, &witness);
            let audit = theorem2_audit(&input, &witness);
            let ok = costs.all_ok && audit.as_ref().map_or(true, |a| a.consistent);
            let out = json!({
                "assignment": assignment,
                "costs": costs,
                "optset": witness,
                "classification": classification.as_ref().map_err(|e| e.to_string()).ok(),
                "classification_error": classification.err().map(|e| e.to_string()),
                "audit": audit.as_ref().ok(),
                "audit_error": audit.as_ref().err().map(|e| e.to_string()),
            });
            Ok((pretty(&out), ok))
        }
        Command::CheckLemmas { all_opt } => {
            json_only(cli)?;
            let input = read_input(cli)?;
            let view = input.view();
            let sets = if *all_opt {
                enumerate_optimal_sets(&view, DEFAULT_ENUM_CAP).map_err(usage)?
            } else {
                vec![min_dominating_set_tree(&view).map_err(usage)?.witness]
            };
            let properties = check_properties(&input, &sets).map_err(usage)?;
            let lemma4 = check_lemma4(&input, &sets).map_err(usage)?;
            let lemma5 = check_lemma5(&input, &sets).map_err(usage)?;
            let membership = verify_membership_table(&input);
            let lemma17 = check_lemma17(&input, &RaExact).map_err(usage)?;
            let ok = lemma4.ok() && lemma5.ok() && membership.all_ok() && lemma17.all_ok();
            let out = json!({
                "properties": properties,
                "lemma4": lemma4,
                "lemma5": lemma5,
                "membership_mismatches": membership.mismatches().collect::<Vec<_>>(),
                "lemma17": lemma17,
                "ok": ok,
            });
            Ok((pretty(&out), ok))
        }
        Command::Normalize { target, max_steps } => {
            json_only(cli)?;
            let input = read_input(cli)?;
            match target {
                Some(t) => match normalize_step(&input, *t, None) {
                    Ok(report) => {
                        let ok = report.monotone();
                        Ok((pretty(&report), ok))
                    }
                    Err(AnalysisError::AlreadySatisfied(p)) => {
                        Ok((pretty(&json!({ "already_satisfied": p.to_string() })), true))
                    }
                    Err(e) => Err(Failure::Violation(e.to_string())),
                },
                None => {
                    let outcome = normalize(&input, None, *max_steps).map_err(usage)?;
                    let ok = outcome.ratio >= outcome.initial_ratio;
                    Ok((pretty(&outcome), ok))
                }
            }
        }
        Command::AdversaryDet { alg, max_length, max_t0, max_t1 } => {
            json_only(cli)?;
            let params = AdversaryParams::new(*max_length, *max_t0, *max_t1).map_err(usage)?;
            let kind = match alg {
                DetAlg::A => AlgorithmKind::A,
                DetAlg::B => AlgorithmKind::B,
                DetAlg::Greedy => AlgorithmKind::Greedy,
                DetAlg::AlwaysNew => AlgorithmKind::AlwaysNew,
                DetAlg::NeverNew => AlgorithmKind::NeverNew,
            };
            let tr = run_against(kind, params).map_err(usage)?;
            let cert = verify_ratio_cases(&tr);
            let ok = cert.is_ok();
            let r = tr.ratio();
            let out = json!({
                "ratio": format!("{}/{}", r.numer(), r.denom()),
                "certificate": cert.as_ref().ok(),
                "certificate_error": cert.as_ref().err().map(|e| e.to_string()),
                "input": tr.input,
                "transcript": tr,
            });
            Ok((pretty(&out), ok))
        }
        Command::AdversaryRand { alg: RandAlg::Ra, m, trials } => {
            json_only(cli)?;
            let sampled;
            let oracle: &dyn ProbabilityOracle = match trials {
                Some(t) => {
                    sampled = MonteCarlo::new("ra-sample", RaSampled::new, *t, cli.seed);
                    &sampled
                }
                None => &RaExact,
            };
            let tr = build_rand_adversary(*m, oracle).map_err(usage)?;
            let eval = evaluate_rand_adversary(&tr, oracle).map_err(usage)?;
            Ok((pretty(&json!({ "input": tr.input, "transcript": tr, "evaluation": eval })), true))
        }
        Command::Generate { kind, n, order } => {
            json_only(cli)?;
            let input = generate(&GeneratorSpec::new(*kind, *n, cli.seed, *order)).map_err(usage)?;
            Ok((input.to_json(), true))
        }
        Command::Sweep { max_n } => {
            let report = exhaustive_small_sweep(*max_n).map_err(|e| match e {
                online_domset::harness::HarnessError::BoundViolated { .. } => Failure::Violation(e.to_string()),
                other => usage(other),
            })?;
            let ok = report.ok();
            let text = match cli.format {
                Format::Json => pretty(&report),
                Format::Csv => {
                    let mut s = String::from("n,instances,shapes,max_ratio,argmax,membership_failures,oracle_failures\n");
                    for r in &report.rows {
                        s += &format!(
                            "{},{},{},{}/{},\"{}\",{},{}\n",
                            r.n,
                            r.instances,
                            r.shapes,
                            r.max_ratio.numer(),
                            r.max_ratio.denom(),
                            r.argmax,
                            r.membership_failures,
                            r.oracle_failures
                        );
                    }
                    s
                }
            };
            Ok((text, ok))
        }
        Command::Experiment { count, max_n } => {
            let specs = uniform_specs(*count, (*max_n).max(2), cli.seed);
            let mut report = run_experiment(&specs, &AlgorithmKind::ALL).map_err(|e| Failure::Violation(e.to_string()))?;
            report.metadata.seed = Some(cli.seed);
            let text = match cli.format {
                Format::Json => report.to_json(),
                Format::Csv => report.to_csv().map_err(usage)?,
            };
            Ok((text, true))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(&cli) {
        Ok((text, ok)) => {
            let text = text.trim_end();
            let written = match &cli.output {
                Some(path) => fs::write(path, format!("{text}\n")),
                None => {
                    // a closed pipe downstream is not an error worth reporting
                    let _ = writeln!(std::io::stdout().lock(), "{text}");
                    Ok(())
                }
            };
            if let Err(e) = written {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            if ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Violation(msg)) => {
            let v: Value = json!({ "violation": msg });
            eprintln!("{v}");
            ExitCode::from(1)
        }
    }
}
