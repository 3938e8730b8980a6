//! Command-line front end.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::config::{load_value, parse_scalar, set_dotted, ExperimentConfig};
use crate::runner::{run_experiment, write_csv, write_json, write_outputs, ExperimentOutput, Summary};
use crate::setup::{prepare, Derived};
use crate::ExperimentError;

#[derive(Debug, Parser)]
#[command(name = "mtqite", version, about = "QITE / MT-QITE ground-state preparation experiments")]
pub struct Cli {
    /// Overrides the seed of the config.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run an experiment and write its CSV and JSON results.
    Run { config: PathBuf },
    /// List the model builders and their parameters.
    Models,
    /// Validate a config and print derived quantities without running it.
    Check { config: PathBuf },
    /// Run a config once per value of one parameter.
    Sweep {
        config: PathBuf,
        /// Dotted config key, e.g. `model.u`.
        #[arg(long)]
        param: String,
        /// Comma-separated values, parsed as TOML scalars.
        #[arg(long, value_delimiter = ',', required = true)]
        values: Vec<String>,
    },
}

const MODELS: &str = "\
tfim       n (≥ 2), h_over_j          −Σ Z_i Z_i+1 + (h/J) Σ X_i, open chain
xxz        n (≥ 2), j                 Σ X_i X_i+1 + Y_i Y_i+1 + J Z_i Z_i+1, open chain
hubbard    n_sites (≥ 1), u           −Σ_<ij>σ (a†_iσ a_jσ + h.c.) + U Σ n_i↑ n_i↓, Jordan–Wigner, mode = 2·site + spin
pauli_sum  terms ([[coeff, label]])   explicit Pauli sum, qubit 0 leftmost in each label
molecule   fcidump (path)             chemist-notation integrals from an FCIDUMP file, UCCGSD operator pool
";

fn load(path: &Path, seed: Option<u64>) -> Result<ExperimentConfig, ExperimentError> {
    let (mut value, base) = load_value(path)?;
    if let Some(s) = seed {
        set_dotted(&mut value, "seed", toml::Value::Integer(s as i64))?;
    }
    ExperimentConfig::from_toml_value(value, &base)
}

fn report(out: &mut dyn Write, summary: &Summary) -> std::io::Result<()> {
    writeln!(out, "{}: exact energy {:.10}", summary.name, summary.derived.exact_energy)?;
    for (name, s) in [("mtqite", &summary.mtqite), ("qite", &summary.qite)] {
        if let Some(s) = s {
            writeln!(
                out,
                "  {name:<6} runs {:>3}  infidelity mean {:.3e} best {:.3e}  |ΔE| mean {:.3e}  linear paulis {:.0}  rotations {:.0}",
                s.runs,
                s.final_infidelity.mean,
                s.final_infidelity.best,
                s.final_energy_error.mean,
                s.linear_paulis.mean,
                s.rotations.mean
            )?;
        }
    }
    let inv = &summary.invariants;
    writeln!(
        out,
        "  invariants: monotonicity violations {}, diagonal violations {}",
        inv.monotonicity_violations, inv.diagonal_violations
    )
}

fn print_derived(out: &mut dyn Write, name: &str, d: &Derived) -> std::io::Result<()> {
    writeln!(out, "{name}")?;
    writeln!(out, "  qubits                 {}", d.n_qubits)?;
    writeln!(out, "  hamiltonian terms      {}", d.hamiltonian_terms)?;
    writeln!(out, "  exact energy           {:.12}", d.exact_energy)?;
    writeln!(out, "  partition terms        {}", d.partition_terms)?;
    writeln!(out, "  domains                {:?}", d.domains)?;
    writeln!(out, "  symmetry links         {:?}", d.symmetry_links)?;
    writeln!(out, "  stabilizer             {:?}", d.stabilizer)?;
    writeln!(out, "  sector                 {:?}", d.sector)?;
    writeln!(out, "  formulation            {}", d.formulation)?;
    writeln!(out, "  basis sizes            {:?}", d.basis_sizes)?;
    writeln!(out, "  measurements / ref     {:?}", d.measurements_per_reference)?;
    writeln!(out, "  grid                   {:?}", d.grid)?;
    writeln!(out, "  initial states         {}", d.initial_states)?;
    writeln!(out, "  mtqite linear / step   {} ({} with links)", d.mtqite_linear_per_step, d.mtqite_linear_per_step_linked)?;
    writeln!(out, "  qite linear / step     {}", d.qite_linear_per_step)?;
    writeln!(out, "  scan candidates        {}", d.scan_candidates)?;
    writeln!(out, "  scan paulis / step     {}", d.scan_paulis_per_step)
}

fn flush_partial(cfg: &ExperimentConfig, e: ExperimentError) -> ExperimentError {
    if let ExperimentError::Partial { output, source } = e {
        if let Err(w) = write_outputs(cfg, &output) {
            eprintln!("could not write partial results: {w}");
        }
        *source
    } else {
        e
    }
}

fn run(out: &mut dyn Write, path: &Path, seed: Option<u64>) -> Result<(), ExperimentError> {
    let cfg = load(path, seed)?;
    let output = run_experiment(&cfg).map_err(|e| flush_partial(&cfg, e))?;
    let (csv, json) = write_outputs(&cfg, &output)?;
    report(out, &output.summary)?;
    writeln!(out, "  wrote {} and {}", csv.display(), json.display())?;
    Ok(())
}

fn check(out: &mut dyn Write, path: &Path, seed: Option<u64>) -> Result<(), ExperimentError> {
    let cfg = load(path, seed)?;
    let setup = prepare(&cfg)?;
    print_derived(out, &cfg.name, &Derived::from_setup(&setup))?;
    Ok(())
}

fn sweep(out: &mut dyn Write, path: &Path, param: &str, values: &[String], seed: Option<u64>) -> Result<(), ExperimentError> {
    let (base_value, base_dir) = load_value(path)?;
    let mut configs = Vec::new();
    for v in values {
        let mut doc = base_value.clone();
        set_dotted(&mut doc, param, parse_scalar(v.trim()))?;
        if let Some(s) = seed {
            set_dotted(&mut doc, "seed", toml::Value::Integer(s as i64))?;
        }
        configs.push((v.trim().to_string(), ExperimentConfig::from_toml_value(doc, &base_dir)?));
    }
    let first = &configs[0].1;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for (v, cfg) in &configs {
        let output: ExperimentOutput = run_experiment(cfg).map_err(|e| match e {
            ExperimentError::Partial { source, .. } => *source,
            e => e,
        })?;
        report(out, &output.summary)?;
        rows.extend(output.rows.into_iter().map(|r| (v.clone(), r)));
        summaries.push(serde_json::json!({ "param": param, "value": v, "summary": output.summary }));
    }
    let csv = first.output_dir().join(format!("{}_sweep.csv", first.name));
    let json = first.output_dir().join(format!("{}_sweep.json", first.name));
    let flat: Vec<_> = rows.iter().map(|(_, r)| r.clone()).collect();
    let values_by_row: Vec<&str> = rows.iter().map(|(v, _)| v.as_str()).collect();
    let index = std::cell::Cell::new(0usize);
    write_csv(&csv, &flat, &["sweep_param", "sweep_value"], &|_| {
        let i = index.get();
        index.set(i + 1);
        vec![param.to_string(), values_by_row[i].to_string()]
    })?;
    write_json(&json, &summaries)?;
    writeln!(out, "wrote {} and {}", csv.display(), json.display())?;
    Ok(())
}

/// Runs the CLI and returns the process exit code.
pub fn main_with_args<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 {
                write!(out, "{}", e.render())
            } else {
                write!(err, "{}", e.render())
            };
            return code;
        }
    };
    let result = match &cli.command {
        Command::Run { config } => run(out, config, cli.seed),
        Command::Models => out.write_all(MODELS.as_bytes()).map_err(Into::into),
        Command::Check { config } => check(out, config, cli.seed),
        Command::Sweep { config, param, values } => sweep(out, config, param, values, cli.seed),
    };
    match result {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}
