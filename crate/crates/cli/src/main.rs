//! `permfourier` command-line front end.

mod failure;
mod output;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use permfourier::gft::gft_forward;
use permfourier::perm::degree_from_len;
use permfourier::pipeline::{run_plan, sample_computational, sample_fourier};
use permfourier::verify::run_battery;
use permfourier::{ExperimentPlan, GroupFunction, ModelState, Normalization, Permutation, RunReport};
use serde::Serialize;

use failure::{Failure, Kind};

const DEFAULT_GUARD: usize = 8;

#[derive(Debug, Parser)]
#[command(name = "permfourier", version, about = "Fourier-space inference over permutations")]
struct Cli {
    /// Largest degree n any command will accept.
    #[arg(long, global = true, default_value_t = DEFAULT_GUARD)]
    n_guard: usize,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Basis {
    Computational,
    Fourier,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Execute a plan and write posterior, spectrum, ledger and report files.
    Run {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Overrides the seed stored in the plan.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long, default_value_t = Normalization::Unitary)]
        normalization: Normalization,
        /// Also write this many computational-basis draws to samples.csv.
        #[arg(long, default_value_t = 0)]
        samples: usize,
    },
    /// Run the property battery and print a pass/fail table.
    Verify {
        #[arg(long, default_value_t = 4)]
        n_max: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Machine-readable output instead of the text table.
        #[arg(long, value_enum)]
        format: Option<Format>,
    },
    /// Transform a `rank,value` CSV and report per-block energies.
    Spectrum {
        #[arg(long)]
        input: PathBuf,
        #[arg(long, default_value_t = Normalization::Unitary)]
        normalization: Normalization,
        /// Output directory; prints to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Execute a plan and draw measurement outcomes from the final state.
    Sample {
        #[arg(long)]
        plan: PathBuf,
        #[arg(long, default_value_t = 1000)]
        count: usize,
        #[arg(long, value_enum, default_value_t = Basis::Computational)]
        basis: Basis,
        #[arg(long)]
        seed: Option<u64>,
        /// Output file; prints to stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Csv)]
        format: Format,
    },
}

type Outcome = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) if !err.use_stderr() => {
            let _ = err.print();
            return ExitCode::SUCCESS;
        }
        Err(err) => {
            let message = err.to_string();
            let first = message.lines().next().unwrap_or("invalid arguments").trim_start_matches("error: ");
            return report(Failure::new(Kind::Invalid, first));
        }
    };
    let guard = cli.n_guard;
    let result = match cli.command {
        Command::Run { plan, out, seed, normalization, samples } => cmd_run(&plan, &out, seed, normalization, samples, guard),
        Command::Verify { n_max, seed, format } => cmd_verify(n_max, seed, format, guard),
        Command::Spectrum { input, normalization, out, format } => cmd_spectrum(&input, normalization, out.as_deref(), format, guard),
        Command::Sample { plan, count, basis, seed, out, format } => {
            cmd_sample(&plan, count, basis, seed, out.as_deref(), format, guard)
        }
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => report(f),
    }
}

fn report(failure: Failure) -> ExitCode {
    let code = failure.exit_code;
    let line = String::from_utf8(output::json(&failure)).expect("utf8");
    eprintln!("{line}");
    ExitCode::from(code)
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::io(path, e))
}

fn write(path: &Path, bytes: &[u8]) -> Outcome {
    fs::write(path, bytes).map_err(|e| Failure::io(path, e))
}

fn emit(out: Option<&Path>, bytes: &[u8]) -> Outcome {
    match out {
        Some(path) => write(path, bytes),
        None => std::io::stdout().lock().write_all(bytes).map_err(|e| Failure::io(Path::new("<stdout>"), e)),
    }
}

fn load_plan(path: &Path, seed: Option<u64>, guard: usize) -> Result<ExperimentPlan, Failure> {
    let text = read(path)?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    let mut plan: ExperimentPlan = serde_path_to_error::deserialize(de).map_err(|err| {
        let field = err.path().to_string();
        Failure::new(Kind::Invalid, err.into_inner()).with_field(field)
    })?;
    if let Some(seed) = seed {
        plan.seed = seed;
    }
    if plan.n > guard {
        return Err(Failure::guard(plan.n, guard));
    }
    plan.validate()?;
    Ok(plan)
}

fn csv_writer() -> csv::Writer<Vec<u8>> {
    csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new())
}

fn finish_csv(w: csv::Writer<Vec<u8>>) -> Result<Vec<u8>, Failure> {
    w.into_inner().map_err(|e| Failure::new(Kind::Io, e))
}

fn csv_err(e: csv::Error) -> Failure {
    Failure::new(Kind::Io, e)
}

fn posterior_csv(state: &ModelState) -> Result<Vec<u8>, Failure> {
    let n = state.n();
    let mut w = csv_writer();
    w.write_record(["rank", "one_line", "probability"]).map_err(csv_err)?;
    for (rank, h) in state.distribution().iter().enumerate() {
        let sigma = Permutation::from_rank(n, rank)?;
        w.write_record([rank.to_string(), output::one_line_field(&sigma.one_line()), output::float(*h)])
            .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn draws_csv(draws: &[Permutation]) -> Result<Vec<u8>, Failure> {
    let mut w = csv_writer();
    w.write_record(["draw", "rank", "one_line"]).map_err(csv_err)?;
    for (i, sigma) in draws.iter().enumerate() {
        w.write_record([i.to_string(), sigma.rank().to_string(), output::one_line_field(&sigma.one_line())])
            .map_err(csv_err)?;
    }
    finish_csv(w)
}

fn cmd_run(plan_path: &Path, out: &Path, seed: Option<u64>, normalization: Normalization, samples: usize, guard: usize) -> Outcome {
    let plan = load_plan(plan_path, seed, guard)?;
    let (state, report): (ModelState, RunReport) = run_plan(&plan)?;
    fs::create_dir_all(out).map_err(|e| Failure::io(out, e))?;
    write(&out.join("posterior.csv"), &posterior_csv(&state)?)?;
    write(&out.join("spectrum.json"), &output::json_line(&state.spectrum(normalization)))?;
    let ledger: Vec<u8> = state.ledger().iter().flat_map(output::json_line).collect();
    write(&out.join("ledger.jsonl"), &ledger)?;
    write(&out.join("report.json"), &output::json_line(&report))?;
    if samples > 0 {
        write(&out.join("samples.csv"), &draws_csv(&sample_computational(&state, samples, plan.seed))?)?;
    }
    let bound = report.lower_bound.map_or_else(|| "none".to_string(), output::float);
    println!("p_tot={} lower_bound={bound}", output::float(report.p_tot));
    Ok(())
}

fn cmd_verify(n_max: usize, seed: u64, format: Option<Format>, guard: usize) -> Outcome {
    if n_max > guard {
        return Err(Failure::guard(n_max, guard));
    }
    if n_max == 0 {
        return Err(Failure::new(Kind::Invalid, "n_max must be at least 1").with_field("n_max"));
    }
    let results = run_battery(n_max, seed)?;
    let bytes = match format {
        Some(Format::Json) => output::json_line(&results),
        Some(Format::Csv) => {
            let mut w = csv_writer();
            w.write_record(["check", "passed", "detail"]).map_err(csv_err)?;
            for r in &results {
                w.write_record([r.name, if r.passed { "true" } else { "false" }, &r.detail]).map_err(csv_err)?;
            }
            finish_csv(w)?
        }
        None => {
            let width = results.iter().map(|r| r.name.len()).max().unwrap_or(0);
            let mut s = String::new();
            for r in &results {
                let mark = if r.passed { "PASS" } else { "FAIL" };
                s.push_str(&format!("{mark}  {:<width$}  {}\n", r.name, r.detail));
            }
            s.into_bytes()
        }
    };
    emit(None, &bytes)?;
    let failed: Vec<&str> = results.iter().filter(|r| !r.passed).map(|r| r.name).collect();
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::new(Kind::VerifyFailed, format!("failed checks: {}", failed.join(", "))))
    }
}

fn read_function(path: &Path, guard: usize) -> Result<GroupFunction, Failure> {
    let text = read(path)?;
    let mut reader = csv::ReaderBuilder::new().has_headers(false).trim(csv::Trim::All).from_reader(text.as_bytes());
    let mut rows = Vec::new();
    for (line, record) in reader.records().enumerate() {
        let record = record.map_err(|e| Failure::new(Kind::Invalid, e).with_field(format!("row {}", line + 1)))?;
        let field = |i: usize| record.get(i).unwrap_or("");
        let rank = field(0).parse::<usize>();
        if line == 0 && rank.is_err() {
            continue;
        }
        let bad = |what: &str| Failure::new(Kind::Invalid, format!("cannot parse {what}")).with_field(format!("row {}", line + 1));
        let rank = rank.map_err(|_| bad("rank"))?;
        let value = field(1).parse::<f64>().map_err(|_| bad("value"))?;
        rows.push((line + 1, rank, value));
    }
    let n = degree_from_len(rows.len())?;
    if n > guard {
        return Err(Failure::guard(n, guard));
    }
    let mut values = vec![None; rows.len()];
    for (line, rank, value) in rows {
        let slot = values
            .get_mut(rank)
            .ok_or_else(|| Failure::new(Kind::Invalid, format!("rank {rank} out of range")).with_field(format!("row {line}")))?;
        if slot.replace(value).is_some() {
            return Err(Failure::new(Kind::Invalid, format!("duplicate rank {rank}")).with_field(format!("row {line}")));
        }
    }
    Ok(GroupFunction::new(n, values.into_iter().map(|v| v.expect("every rank filled")).collect())?)
}

#[derive(Serialize)]
struct Energy {
    partition: String,
    dimension: usize,
    energy: f64,
    probability: f64,
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    n: usize,
    spectrum: &'a permfourier::FourierSpectrum,
    energies: &'a [Energy],
}

fn cmd_spectrum(input: &Path, normalization: Normalization, out: Option<&Path>, format: Format, guard: usize) -> Outcome {
    let h = read_function(input, guard)?;
    let spectrum = gft_forward(&h, normalization);
    let unitary = spectrum.renormalized(Normalization::Unitary);
    let total = unitary.total_energy();
    let energies: Vec<Energy> = unitary
        .energies()
        .into_iter()
        .map(|(l, e)| Energy {
            partition: l.key(),
            dimension: l.dimension(),
            energy: e,
            probability: if total > 0.0 { e / total } else { 0.0 },
        })
        .collect();
    let energy_csv = || -> Result<Vec<u8>, Failure> {
        let mut w = csv_writer();
        w.write_record(["partition", "dimension", "energy", "probability"]).map_err(csv_err)?;
        for e in &energies {
            w.write_record([e.partition.clone(), e.dimension.to_string(), output::float(e.energy), output::float(e.probability)])
                .map_err(csv_err)?;
        }
        finish_csv(w)
    };
    match out {
        Some(dir) => {
            fs::create_dir_all(dir).map_err(|e| Failure::io(dir, e))?;
            write(&dir.join("spectrum.json"), &output::json_line(&spectrum))?;
            match format {
                Format::Json => write(&dir.join("energies.json"), &output::json_line(&energies)),
                Format::Csv => write(&dir.join("energies.csv"), &energy_csv()?),
            }
        }
        None => match format {
            Format::Json => emit(None, &output::json_line(&SpectrumOutput { n: h.n(), spectrum: &spectrum, energies: &energies })),
            Format::Csv => emit(None, &energy_csv()?),
        },
    }
}

#[derive(Serialize)]
struct FourierDraws {
    law: Vec<(String, f64)>,
    draws: Vec<String>,
}

fn cmd_sample(
    plan_path: &Path,
    count: usize,
    basis: Basis,
    seed: Option<u64>,
    out: Option<&Path>,
    format: Format,
    guard: usize,
) -> Outcome {
    let plan = load_plan(plan_path, seed, guard)?;
    let (state, _) = run_plan(&plan)?;
    let bytes = match basis {
        Basis::Computational => {
            let draws = sample_computational(&state, count, plan.seed);
            match format {
                Format::Csv => draws_csv(&draws)?,
                Format::Json => output::json_line(&draws),
            }
        }
        Basis::Fourier => {
            let (draws, law) = sample_fourier(&state, count, plan.seed);
            match format {
                Format::Csv => {
                    let mut w = csv_writer();
                    w.write_record(["draw", "partition"]).map_err(csv_err)?;
                    for (i, l) in draws.iter().enumerate() {
                        w.write_record([i.to_string(), l.key()]).map_err(csv_err)?;
                    }
                    finish_csv(w)?
                }
                Format::Json => output::json_line(&FourierDraws {
                    law: law.into_iter().map(|(l, w)| (l.key(), w)).collect(),
                    draws: draws.iter().map(|l| l.key()).collect(),
                }),
            }
        }
    };
    emit(out, &bytes)
}
