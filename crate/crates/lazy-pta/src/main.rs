use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use lazy_pta::analyses::{
    generate_program, oracle_enumerate, run_andersen, run_conventional_may, run_lpta, run_spta,
    sanity_check, AnalysisResult, CorpusParams, LptaOptions, OracleConfig,
};
use lazy_pta::callstrings::lookup_longest_prefix;
use lazy_pta::dataflow::{PtRel, Universe, VarSet};
use lazy_pta::lang::{parse_program, Program};
use lazy_pta::report::{emit_dot, emit_json, emit_text, Dumps, Mode};
use lazy_pta::Error;

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum AnalysisKind {
    Lpta,
    Spta,
    Conventional,
    Andersen,
    All,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Auto,
    Intra,
    Inter,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Text,
    Json,
    Dot,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum DumpArg {
    Liveness,
    PointsTo,
    Must,
    Contexts,
    Stats,
}

/// Batch points-to analyzer for the small pointer language.
#[derive(Debug, Parser)]
#[command(name = "lazy-pta", version)]
struct Cli {
    /// Input program (.pt). Omit together with --generate to analyze a
    /// generated program.
    input: Option<PathBuf>,

    #[arg(long, value_enum, default_value = "lpta")]
    analysis: AnalysisKind,

    /// Intra- or interprocedural; auto picks inter when the program has
    /// calls or more than one procedure.
    #[arg(long, value_enum, default_value = "auto")]
    mode: ModeArg,

    /// Tables to include (repeatable). Default: points-to + stats.
    #[arg(long, value_enum)]
    dump: Vec<DumpArg>,

    #[arg(long, value_enum, default_value = "text")]
    format: FormatArg,

    /// Propagate points-to for all pointers instead of only live ones.
    #[arg(long)]
    eager: bool,

    /// Exit nonzero when a guaranteed write through an undefined pointer
    /// is detected.
    #[arg(long)]
    strict_sanity: bool,

    /// Write output here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,

    /// Start pointers undefined-free: no ?-pairs at program entry.
    #[arg(long)]
    no_undef_seed: bool,

    /// Analyze a generated program with this seed (or $LAZY_PTA_SEED).
    #[arg(long, num_args = 0..=1, default_missing_value = "-1")]
    generate: Option<i64>,

    /// Cross-check the analysis against bounded concrete execution.
    #[arg(long)]
    oracle: bool,

    #[arg(long, default_value_t = 4)]
    branch_bound: usize,

    #[arg(long, default_value_t = 4)]
    recursion_bound: usize,

    #[arg(long, default_value_t = 2_000_000)]
    step_cap: usize,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => code,
        Err(Error::Parse { .. }) => ExitCode::from(2),
        Err(Error::Analysis(_)) => ExitCode::from(1),
    }
}

fn load(cli: &Cli) -> Result<(String, Program), Error> {
    if let Some(seed_arg) = cli.generate {
        let seed: u64 = if seed_arg < 0 {
            std::env::var("LAZY_PTA_SEED")
                .ok()
                .and_then(|s| s.parse().ok())
                .unwrap_or(0)
        } else {
            seed_arg as u64
        };
        let program = generate_program(seed, &CorpusParams::default());
        return Ok((format!("generated-{seed}"), program));
    }
    let path = cli.input.as_ref().ok_or_else(|| {
        Error::parse(0, 0, "no input file given (and --generate not set)")
    })?;
    let source = std::fs::read_to_string(path)
        .map_err(|e| Error::parse(0, 0, format!("cannot read {}: {e}", path.display())))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "program".to_string());
    let program = parse_program(&source)?;
    Ok((name, program))
}

fn run(cli: &Cli) -> Result<ExitCode, Error> {
    let (name, program) = load(cli)?;
    let interprocedural = match cli.mode {
        ModeArg::Intra => false,
        ModeArg::Inter => true,
        ModeArg::Auto => program.procs.len() > 1 || program.call_sites > 0,
    };
    let mode = if interprocedural { Mode::Inter } else { Mode::Intra };

    let dumps = if cli.dump.is_empty() {
        Dumps::default()
    } else {
        Dumps {
            liveness: cli.dump.contains(&DumpArg::Liveness),
            points_to: cli.dump.contains(&DumpArg::PointsTo),
            must: cli.dump.contains(&DumpArg::Must),
            contexts: cli.dump.contains(&DumpArg::Contexts),
            stats: cli.dump.contains(&DumpArg::Stats),
        }
    };

    let kinds: Vec<AnalysisKind> = match cli.analysis {
        AnalysisKind::All => vec![
            AnalysisKind::Lpta,
            AnalysisKind::Spta,
            AnalysisKind::Conventional,
            AnalysisKind::Andersen,
        ],
        k => vec![k],
    };

    let u = Universe::of(&program);
    let mut out = String::new();
    let mut sanity_bad = false;
    for kind in kinds {
        let (label, result): (&str, AnalysisResult) = match kind {
            AnalysisKind::Lpta => {
                let opts = LptaOptions { interprocedural, eager: cli.eager, ..Default::default() };
                ("lpta", run_lpta(&program, &opts)?)
            }
            AnalysisKind::Spta => {
                ("spta", run_spta(&program, interprocedural, !cli.no_undef_seed)?)
            }
            AnalysisKind::Conventional => {
                if cli.analysis == AnalysisKind::All && interprocedural {
                    continue; // intraprocedural only
                }
                ("conventional", run_conventional_may(&program)?)
            }
            AnalysisKind::Andersen => {
                let summary = run_andersen(&program);
                let result = AnalysisResult {
                    metas: Vec::new(),
                    facts: Vec::new(),
                    uin: Vec::new(),
                    uout: Vec::new(),
                    contexts: None,
                    stats: Default::default(),
                    summary: Some(summary),
                };
                ("andersen", result)
            }
            AnalysisKind::All => unreachable!(),
        };

        if cli.strict_sanity && kind == AnalysisKind::Lpta {
            let report = sanity_check(&program, &result);
            if !report.ok() {
                for (id, stmt) in &report.flagged {
                    eprintln!("sanity: n{id} `{stmt}` always writes through an undefined pointer");
                }
                sanity_bad = true;
            }
        }

        if cli.oracle && kind == AnalysisKind::Lpta {
            report_oracle(&program, &result, cli)?;
        }

        out.push_str(&match cli.format {
            FormatArg::Text => emit_text(&name, label, mode, &result, &u, &dumps),
            FormatArg::Json => emit_json(&name, label, mode, &result, &u, &dumps),
            FormatArg::Dot => emit_dot(&name, &program, &result, &dumps)?,
        });
    }

    match &cli.output {
        Some(path) => {
            let mut f = std::fs::File::create(path)
                .map_err(|e| Error::Analysis(format!("cannot write {}: {e}", path.display())))?;
            f.write_all(out.as_bytes())
                .map_err(|e| Error::Analysis(e.to_string()))?;
        }
        None => print!("{out}"),
    }

    Ok(if sanity_bad { ExitCode::from(3) } else { ExitCode::SUCCESS })
}

/// Checks that every location a live pointer concretely held at a node is
/// covered by the analysis' Ain at that node.
fn report_oracle(program: &Program, result: &AnalysisResult, cli: &Cli) -> Result<(), Error> {
    let config = OracleConfig {
        branch_bound: cli.branch_bound,
        recursion_bound: cli.recursion_bound,
        step_cap: cli.step_cap,
    };
    let oracle = oracle_enumerate(program, &config)?;
    // The oracle walks the supergraph; an intra-mode result uses the
    // contracted CFG, so recompute on the supergraph for the comparison.
    let recomputed;
    let result = if result.metas.len() == oracle.observed.len() {
        result
    } else {
        let opts = LptaOptions { interprocedural: true, ..Default::default() };
        recomputed = run_lpta(program, &opts)?;
        &recomputed
    };
    let empty_vars = VarSet::new();
    let empty_rel = PtRel::new();
    let mut misses = 0usize;
    for (i, per_sigma) in oracle.observed.iter().enumerate() {
        for (sigma, obs) in per_sigma {
            // liveness and points-to for this calling context; a pointer
            // dead in this context is allowed to be unresolved here
            let (lin, ain) = match &result.contexts {
                Some(ctx) => (
                    lookup_longest_prefix(&ctx.lin[i], sigma).unwrap_or(&empty_vars),
                    lookup_longest_prefix(&ctx.ain[i], sigma).unwrap_or(&empty_rel),
                ),
                None => (&result.facts[i].lin, &result.facts[i].ain),
            };
            for (ptr, locs) in obs {
                if !lin.contains(ptr) {
                    continue;
                }
                for loc in locs {
                    if loc != "?" && !ain.contains(&(ptr.clone(), loc.clone())) {
                        eprintln!(
                            "oracle: n{} <{sigma}> observed {ptr}->{loc} not in ain",
                            result.metas[i].id
                        );
                        misses += 1;
                    }
                }
            }
        }
    }
    eprintln!(
        "oracle: {} paths, truncated={}, misses={misses}",
        oracle.paths, oracle.truncated
    );
    if misses > 0 {
        return Err(Error::Analysis(format!("oracle found {misses} uncovered observations")));
    }
    Ok(())
}
