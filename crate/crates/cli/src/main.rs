//! conelab: load cone-geometry instances, run the chamber pipelines, and
//! emit machine-readable reports.
//!
//! Every numeric value in a report is an exact rational serialized as "p/q"
//! (or "p"); reports are deterministic apart from the timings field. Exit
//! codes: 0 completed, 1 validation or verdict failure, 2 usage/parse error,
//! 3 guard tripped.

use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use conelab_core::chamberwalk::{
    enumerate_chambers, enumerate_up_to_group, make_nef, movable_precheck, Chamber,
    DEFAULT_CHAMBER_GUARD, DEFAULT_FLOP_GUARD,
};
use conelab_core::conestruct::{
    build_k, build_u, lift_to_absolute, relative_effective_predicate, relative_movable_cone,
    verify_u_translates, SlicePolytope, DEFAULT_LIFT_M, DEFAULT_LIFT_NU,
};
use conelab_core::error::Error;
use conelab_core::exactq::{format_rational, parse_rational, QVec};
use conelab_core::groupact::{
    fundamental_domain_check, pi_slice_barycenter, quotient_translation, TranslationLattice,
};
use conelab_core::instances;
use conelab_core::polycone::{build_dual_pair, ConeInput, PolyCone};
use conelab_core::rayclass::{
    classify_ray, k_trivial_face, records_from_instance, type_finiteness_check,
};
use conelab_core::varmodel::{
    cone_to_json, load_and_validate, qvec_to_json, seed_nef_cone, trivial_subspace,
    VarietyInstance,
};

#[derive(Parser)]
#[command(
    name = "conelab",
    version,
    about = "Exact wall-and-chamber computations for nef and movable divisor cones"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Bundled instance name (toy-vertical, i2-chain, quadric-net) or a path
    /// to an instance file.
    #[arg(long, global = true)]
    instance: Option<String>,

    /// Divisor class as comma-separated rationals, e.g. "1,7/2".
    #[arg(long, global = true)]
    divisor: Option<String>,

    /// Cone as semicolon-separated rays of comma-separated rationals,
    /// e.g. "1,0;1,5".
    #[arg(long, global = true)]
    sigma: Option<String>,

    /// Expansion budget for orbit enumeration.
    #[arg(long, global = true)]
    budget: Option<usize>,

    /// Sample count for coverage checks.
    #[arg(long, global = true)]
    samples: Option<usize>,

    /// Group word length budget for disjointness checks.
    #[arg(long, global = true)]
    word_budget: Option<usize>,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Seed for sampling reproducibility.
    #[arg(long, global = true)]
    seed: Option<u64>,
}

#[derive(Subcommand)]
enum Command {
    /// Load and validate an instance, reporting its structural facts.
    Validate,
    /// Describe the relative movable cone and effective predicate.
    Cones,
    /// Flop a divisor class to a chamber whose nef cone contains it.
    MakeNef,
    /// Enumerate the chambers meeting a subcone of the big region.
    Chambers,
    /// Enumerate chambers up to the instance group.
    Orbits,
    /// Build the cones K and U and run the fundamental-domain checks.
    Fundamental,
    /// Classify the listed extremal rays and run the finiteness checks.
    ClassifyRays,
    /// Lift a relative movable class to the absolute movable cone.
    Lift,
}

struct Guards {
    flop: usize,
    chamber: usize,
}

fn guards_from_env() -> Guards {
    let read = |name: &str, default: usize| {
        std::env::var(name)
            .ok()
            .and_then(|v| v.parse().ok())
            .unwrap_or(default)
    };
    Guards {
        flop: read("CONELAB_GUARD_FLOPS", DEFAULT_FLOP_GUARD),
        chamber: read("CONELAB_GUARD_CHAMBERS", DEFAULT_CHAMBER_GUARD),
    }
}

fn parse_divisor(raw: &str, expected_dims: &[usize]) -> Result<QVec, Error> {
    let entries: Result<Vec<_>, Error> =
        raw.split(',').map(|s| parse_rational(s.trim())).collect();
    let v = QVec::new(entries?);
    if !expected_dims.contains(&v.dim()) {
        return Err(Error::input(format!(
            "divisor has {} entries, expected one of {:?}",
            v.dim(),
            expected_dims
        )));
    }
    Ok(v)
}

fn parse_sigma(inst: &VarietyInstance, raw: &str) -> Result<PolyCone, Error> {
    let mut rays = Vec::new();
    for part in raw.split(';') {
        let ray = parse_divisor(part, &[inst.rank(), inst.quotient_dim()])?;
        let ray = if ray.dim() == inst.rank() {
            inst.project_divisor(&ray)
        } else {
            ray
        };
        rays.push(ray);
    }
    build_dual_pair(ConeInput::Generators(rays), inst.quotient_dim())
}

fn bundled_sigma(inst: &VarietyInstance) -> Option<Result<PolyCone, Error>> {
    let rays = inst.metadata.get("bundled_sigma")?.as_array()?;
    let parse = || -> Result<PolyCone, Error> {
        let mut projected = Vec::new();
        for r in rays {
            let entries: Result<Vec<_>, Error> = r
                .as_array()
                .ok_or_else(|| Error::input("bundled_sigma entries must be arrays".to_string()))?
                .iter()
                .map(|s| {
                    parse_rational(s.as_str().ok_or_else(|| {
                        Error::input("bundled_sigma entries must be rational strings".to_string())
                    })?)
                })
                .collect();
            projected.push(inst.project_divisor(&QVec::new(entries?)));
        }
        build_dual_pair(ConeInput::Generators(projected), inst.quotient_dim())
    };
    Some(parse())
}

fn frame_json(ch: &Chamber) -> Value {
    json!(ch
        .frame()
        .iter()
        .map(|g| g.to_strings())
        .collect::<Vec<_>>())
}

fn run(cli: &Cli) -> Result<(Value, Vec<String>), Error> {
    let guards = guards_from_env();
    let name = cli
        .instance
        .clone()
        .ok_or_else(|| Error::input("--instance is required".to_string()))?;
    let text = match instances::bundled(&name) {
        Some(t) => t.to_string(),
        None => fs::read_to_string(&name).map_err(|e| Error::Parse {
            path: name.clone(),
            message: e.to_string(),
        })?,
    };
    let mut completeness: Vec<String> = Vec::new();

    // `validate` reports violations as a verdict rather than an error.
    if matches!(cli.command, Command::Validate) {
        return match load_and_validate(&text, &name) {
            Ok((inst, summary)) => {
                let (t_basis, _) = trivial_subspace(&inst);
                let translations: Vec<Value> = inst
                    .group_generators
                    .iter()
                    .map(|g| {
                        let vector = quotient_translation(&inst, &g.matrix)
                            .map(|c| qvec_to_json(&c.vector))
                            .unwrap_or(Value::Null);
                        json!({ "label": g.label, "translation_vector": vector })
                    })
                    .collect();
                Ok((
                    json!({
                        "valid": true,
                        "reducible_fibres": summary.reducible_fibre_pairs,
                        "exceptional_divisors": summary.exceptional_divisor_count,
                        "partition_members": summary.partition_members,
                        "trivial_subspace_dim": summary.trivial_subspace_dim,
                        "trivial_subspace_basis": t_basis.iter().map(qvec_to_json).collect::<Vec<_>>(),
                        "quotient_dim": summary.quotient_dim,
                        "group_generators": translations,
                        "dual_span_rank_identity": conelab_core::varmodel::dual_span_rank_identity(&inst),
                    }),
                    completeness,
                ))
            }
            Err(Error::Validation { violations }) => Ok((
                json!({ "valid": false, "violations": violations }),
                completeness,
            )),
            Err(e) => Err(e),
        };
    }

    let (inst, _summary) = load_and_validate(&text, &name)?;

    let verdicts = match cli.command {
        Command::Validate => unreachable!(),
        Command::Cones => {
            let movable = relative_movable_cone(&inst)?;
            let pred = relative_effective_predicate(&inst)?;
            json!({
                "relative_movable": {
                    "base": cone_to_json(&movable.base),
                    "strict_functionals": movable.strict_functionals.iter().map(qvec_to_json).collect::<Vec<_>>(),
                },
                "relative_effective": {
                    "strict_piece_functional": qvec_to_json(&inst.f_functional()),
                    "ray_piece": cone_to_json(&pred.ray_piece),
                    "includes_zero": true,
                },
                "seed_nef_cone": cone_to_json(&seed_nef_cone(&inst)?),
            })
        }
        Command::MakeNef => {
            let raw = cli
                .divisor
                .as_ref()
                .ok_or_else(|| Error::input("make-nef requires --divisor".to_string()))?;
            let d = parse_divisor(raw, &[inst.rank()])?;
            let (precheck_ok, witness) = movable_precheck(&inst, &d);
            if !precheck_ok {
                return Ok((
                    json!({
                        "movable_precheck": false,
                        "witness_ray": witness.map(|r| qvec_to_json(&r.curve)),
                    }),
                    completeness,
                ));
            }
            let (ch, path) = make_nef(&inst, &d, guards.flop)?;
            json!({
                "movable_precheck": true,
                "path_length": path.len(),
                "path": path.iter().map(qvec_to_json).collect::<Vec<_>>(),
                "final_chamber_frame": frame_json(&ch),
            })
        }
        Command::Chambers => {
            let sigma = match &cli.sigma {
                Some(raw) => parse_sigma(&inst, raw)?,
                None => bundled_sigma(&inst).ok_or_else(|| {
                    Error::input("no --sigma given and the instance bundles none".to_string())
                })??,
            };
            let chambers = enumerate_chambers(&inst, &sigma, guards.chamber, guards.flop)?;
            json!({
                "chamber_count": chambers.len(),
                "chambers": chambers.iter().map(|ch| json!({
                    "frame": frame_json(ch),
                    "path_from_seed": ch.path_from_seed().iter().map(qvec_to_json).collect::<Vec<_>>(),
                })).collect::<Vec<_>>(),
            })
        }
        Command::Orbits => {
            let budget = cli.budget.unwrap_or(512);
            let word_budget = cli.word_budget.unwrap_or(5);
            let result = enumerate_up_to_group(&inst, budget, word_budget, guards.flop)?;
            if !result.complete {
                completeness.push(format!(
                    "orbit enumeration incomplete: budget {budget} hit with an open frontier"
                ));
            }
            if result.word_budget_limited {
                completeness.push(format!(
                    "orbit reduction word-budget-limited at {word_budget} (non-translation group): representatives may be under-merged"
                ));
            }
            json!({
                "representatives": result.representatives.iter().map(frame_json).collect::<Vec<_>>(),
                "representative_count": result.representatives.len(),
                "visited": result.assignments.iter().map(|(frame, rep, exps)| json!({
                    "frame": json!(frame.iter().map(|g| g.to_strings()).collect::<Vec<_>>()),
                    "representative": rep,
                    "reducing_exponents": exps,
                })).collect::<Vec<_>>(),
                "complete": result.complete,
            })
        }
        Command::Fundamental => {
            let lattice = TranslationLattice::build(&inst)?;
            let seed_cone = seed_nef_cone(&inst)?;
            let center = pi_slice_barycenter(&inst, &lattice.chart, &seed_cone)?;
            let pi_cell = SlicePolytope::dirichlet(&lattice, &center)?;
            let k_cover = build_k(&inst, &pi_cell)?;
            let samples = cli.samples.unwrap_or(1000);
            let word_budget = cli.word_budget.unwrap_or(5);
            let seed = cli.seed.unwrap_or(0);
            let fd = fundamental_domain_check(&inst, &k_cover, samples, word_budget, seed)?;
            if fd.word_budget_limited {
                completeness.push(format!(
                    "fundamental-domain reductions word-budget-limited at {word_budget} (non-translation group)"
                ));
            }

            // U is built over the seed-chamber section of the cell so its
            // chamber list stays finite for synthetic wall rules as well.
            let pi_u = SlicePolytope::dirichlet(&lattice, &center)?
                .restrict_to_cone(&lattice.chart, &seed_cone);
            let k_u = build_k(&inst, &pi_u)?;
            let u = build_u(
                &inst,
                &k_u,
                DEFAULT_LIFT_M,
                DEFAULT_LIFT_NU,
                guards.chamber,
                guards.flop,
            )?;
            let witnesses = verify_u_translates(&inst, &u.u, &u.chambers)?;
            json!({
                "k": cone_to_json(&k_cover),
                "fundamental_domain": {
                    "samples": fd.samples,
                    "coverage_hits": fd.coverage_hits,
                    "coverage_failures": fd.coverage_failures,
                    "words_checked": fd.words_checked,
                    "disjointness_violations": fd.disjointness_violations,
                    "verdict": fd.verdict,
                },
                "u": {
                    "cone": cone_to_json(&u.u),
                    "lifted_generators": u.lifted_generators.iter().map(qvec_to_json).collect::<Vec<_>>(),
                    "ample": qvec_to_json(&u.ample),
                    "chamber_count": u.chambers.len(),
                    "translate_witnesses": witnesses.iter().map(|w| json!({
                        "chamber_frame": json!(w.chamber_frame.iter().map(|g| g.to_strings()).collect::<Vec<_>>()),
                        "exponents": w.exponents,
                        "found": w.found,
                    })).collect::<Vec<_>>(),
                },
            })
        }
        Command::ClassifyRays => {
            let records = records_from_instance(&inst);
            let mut ray_reports = Vec::new();
            let mut all_consistent = true;
            for (i, rec) in records.iter().enumerate() {
                let verdict = classify_ray(&inst, rec)?;
                all_consistent &= verdict.consistent;
                ray_reports.push(json!({
                    "index": i,
                    "curve": qvec_to_json(&rec.curve),
                    "k_pairing": format_rational(&verdict.k_pairing),
                    "coarse": verdict.coarse,
                    "consistent": verdict.consistent,
                    "notes": verdict.notes,
                }));
            }
            let face = k_trivial_face(&inst)?;
            let divisorial: Vec<_> = records_from_instance(&inst)
                .into_iter()
                .filter(|r| r.exceptional_divisor.is_some())
                .collect();
            let finiteness = type_finiteness_check(&inst, &divisorial)?;
            json!({
                "rays": ray_reports,
                "all_consistent": all_consistent,
                "k_trivial_face": {
                    "equal": face.equal,
                    "witness": face.witness.as_ref().map(qvec_to_json),
                },
                "type_finiteness": finiteness,
            })
        }
        Command::Lift => {
            let raw = cli
                .divisor
                .as_ref()
                .ok_or_else(|| Error::input("lift requires --divisor".to_string()))?;
            let d = parse_divisor(raw, &[inst.rank(), inst.quotient_dim()])?;
            let rel = if d.dim() == inst.rank() && !inst.is_relative {
                inst.project_divisor(&d)
            } else {
                d
            };
            let report = lift_to_absolute(&inst, &rel, DEFAULT_LIFT_M, DEFAULT_LIFT_NU)?;
            json!({
                "input_class": qvec_to_json(&report.input_class),
                "lifted_class": qvec_to_json(&report.lifted_class),
                "m": report.m,
                "nus": report.nus,
            })
        }
    };
    Ok((verdicts, completeness))
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Validate => "validate",
        Command::Cones => "cones",
        Command::MakeNef => "make-nef",
        Command::Chambers => "chambers",
        Command::Orbits => "orbits",
        Command::Fundamental => "fundamental",
        Command::ClassifyRays => "classify-rays",
        Command::Lift => "lift",
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let guards = guards_from_env();
    let start = Instant::now();
    let outcome = run(&cli);
    let elapsed = start.elapsed().as_millis();

    let (verdicts, completeness, exit) = match outcome {
        Ok((verdicts, completeness)) => {
            // A failed validation or a negative check verdict exits 1; a
            // budget-limited partial result exits 3 like any tripped guard.
            let failed = verdicts.get("valid") == Some(&Value::Bool(false))
                || verdicts.get("all_consistent") == Some(&Value::Bool(false))
                || verdicts.get("movable_precheck") == Some(&Value::Bool(false))
                || verdicts
                    .pointer("/fundamental_domain/verdict")
                    .and_then(Value::as_str)
                    .map(|v| v.starts_with("not"))
                    .unwrap_or(false);
            let code = if failed {
                ExitCode::from(1)
            } else if !completeness.is_empty() {
                ExitCode::from(3)
            } else {
                ExitCode::SUCCESS
            };
            (verdicts, completeness, code)
        }
        Err(Error::GuardTripped { guard, limit }) => (
            json!({ "error": format!("{guard} guard tripped (limit {limit})") }),
            vec![format!("{guard} guard tripped at {limit}")],
            ExitCode::from(3),
        ),
        Err(e @ (Error::Parse { .. } | Error::Input(_))) => {
            eprintln!("conelab: {e}");
            return ExitCode::from(2);
        }
        Err(Error::Validation { violations }) => (
            json!({ "error": "instance validation failed", "violations": violations }),
            Vec::new(),
            ExitCode::from(1),
        ),
        Err(e) => (
            json!({ "error": e.to_string() }),
            Vec::new(),
            ExitCode::from(1),
        ),
    };

    let report = json!({
        "command": command_name(&cli.command),
        "instance": cli.instance.clone().unwrap_or_default(),
        "verdicts": verdicts,
        "guards": {
            "flop_guard": guards.flop,
            "chamber_guard": guards.chamber,
        },
        "completeness": completeness,
        "timings_ms": elapsed,
    });
    let rendered = serde_json::to_string_pretty(&report).expect("report serializes");
    match &cli.out {
        Some(path) => {
            if let Err(e) = fs::write(path, rendered + "\n") {
                eprintln!("conelab: cannot write {}: {e}", path.display());
                return ExitCode::from(2);
            }
        }
        None => println!("{rendered}"),
    }
    exit
}
