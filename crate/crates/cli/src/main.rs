use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use polarflip_core::analysis::{fer_hypothetical, fer_theoretical, ga_evolve, omega_sweep};
use polarflip_core::construction::{mask_from_hex, parse_hex};
use polarflip_core::sim::{
    emit_results, sweep, DecoderKind, DecoderSpec, Format, OmegaMode, Provenance, Report, StopRule, VERSION,
};
use polarflip_core::{build_critical_set, omega_star, DecodeTree, PolarCode};

mod grid;

use grid::{parse_count, parse_grid};

#[derive(Parser)]
#[command(name = "polarflip", version, about = "Polar-code SC / SC-Flip / Fast-TSCF simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte-Carlo FER, iteration and step statistics over an Eb/N0 grid.
    Simulate(SimulateArgs),
    /// Simulated TSCF FER as a function of the threshold Ω at one Eb/N0.
    OmegaSweep(OmegaSweepArgs),
    /// Gaussian-approximation FER estimates over an Eb/N0 grid.
    Analyze(AnalyzeArgs),
    /// Special-node classification of the decoding tree, as JSON.
    TreeDump(TreeDumpArgs),
}

#[derive(Args)]
struct CodeArgs {
    /// Code as `n,K`: length 2^n with K non-frozen positions (CRC included).
    #[arg(long, value_name = "n,K")]
    code: String,
    /// CRC length in bits; 0 disables the CRC.
    #[arg(long, default_value_t = 16)]
    crc_len: usize,
    /// CRC generator without the leading term, in hex.
    #[arg(long, default_value = "0x1021")]
    crc_poly: String,
    /// Explicit frozen mask in hex (MSB first, 1 = frozen); overrides the
    /// 5G construction. K must match its number of non-frozen positions.
    #[arg(long, value_name = "HEX")]
    frozen_mask: Option<String>,
}

impl CodeArgs {
    fn build(&self) -> Result<PolarCode> {
        let (n, k) = self
            .code
            .split_once(',')
            .context("--code expects `n,K`, e.g. `10,512`")?;
        let n: usize = n.trim().parse().context("--code: n is not an integer")?;
        let k: usize = k.trim().parse().context("--code: K is not an integer")?;
        let poly = parse_hex(&self.crc_poly)?;
        let code = match &self.frozen_mask {
            None => PolarCode::build(n, k, self.crc_len, poly)?,
            Some(hex) => {
                if n > 10 {
                    bail!("n = {n} exceeds the supported maximum of 10");
                }
                let code = PolarCode::from_frozen_mask(mask_from_hex(hex, 1 << n)?, self.crc_len, poly)?;
                if code.k() != k {
                    bail!("K = {k} but the frozen mask has {} non-frozen positions", code.k());
                }
                code
            }
        };
        Ok(code)
    }
}

#[derive(Args)]
struct OutputArgs {
    /// Output file; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// `csv` or `json`.
    #[arg(long, default_value = "csv")]
    format: Format,
}

impl OutputArgs {
    fn writer(&self) -> Result<Box<dyn Write>> {
        Ok(match &self.out {
            Some(path) => Box::new(BufWriter::new(
                File::create(path).with_context(|| format!("cannot create {}", path.display()))?,
            )),
            None => Box::new(BufWriter::new(io::stdout().lock())),
        })
    }
}

#[derive(Args)]
struct StopArgs {
    /// Stop a point once this many frame errors are observed.
    #[arg(long, default_value = "200", value_parser = parse_count)]
    min_errors: u64,
    /// Stop a point after this many frames regardless of errors.
    #[arg(long, default_value = "1e7", value_parser = parse_count)]
    max_frames: u64,
    #[arg(long, default_value_t = 1)]
    seed: u64,
}

impl StopArgs {
    fn rule(&self) -> StopRule {
        StopRule::new(self.min_errors, self.max_frames)
    }
}

#[derive(Args)]
struct SimulateArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Decoders, comma-separated: SC, SCO, SCF, TSCF, FAST_SC, FAST_SCF, FAST_TSCF.
    #[arg(long, value_delimiter = ',', default_value = "TSCF")]
    decoder: Vec<DecoderKind>,
    /// Maximum number of extra decoding attempts for flip decoders.
    #[arg(long, default_value_t = 10)]
    tmax: usize,
    /// Threshold for thresholded decoders: `auto` for 2(Eb/N0 + 3), or a value.
    #[arg(long, default_value = "auto")]
    omega: OmegaMode,
    /// Eb/N0 points in dB: a list `1,1.5,2` or a range `start:step:stop`.
    #[arg(long, value_parser = parse_grid)]
    ebn0: Grid,
    #[command(flatten)]
    stop: StopArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct OmegaSweepArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Operating point in dB.
    #[arg(long)]
    ebn0: f64,
    /// Ω values: a list or a range `start:step:stop`.
    #[arg(long, default_value = "2:2:20", value_parser = parse_grid)]
    omega_grid: Grid,
    #[arg(long, default_value_t = 10)]
    tmax: usize,
    #[command(flatten)]
    stop: StopArgs,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Eb/N0 points in dB: a list or a range `start:step:stop`.
    #[arg(long, value_parser = parse_grid)]
    ebn0: Grid,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct TreeDumpArgs {
    #[command(flatten)]
    code: CodeArgs,
    /// Largest special node, as a stage (node size 2^stage).
    #[arg(long)]
    max_stage: Option<usize>,
    /// Dump the full tree without special nodes.
    #[arg(long, conflicts_with = "max_stage")]
    unpruned: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

type Grid = Vec<f64>;

fn main() {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::OmegaSweep(a) => run_omega_sweep(a),
        Command::Analyze(a) => analyze(a),
        Command::TreeDump(a) => tree_dump(a),
    };
    if let Err(e) = result {
        eprintln!("error: {e:#}");
        std::process::exit(1);
    }
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let code = a.code.build()?;
    if a.decoder.is_empty() {
        bail!("no decoder given");
    }
    let specs: Vec<DecoderSpec> = a
        .decoder
        .iter()
        .map(|&k| DecoderSpec::new(k, a.tmax, a.omega))
        .collect();
    for s in &specs {
        s.validate(&code)?;
    }
    let stop = a.stop.rule();
    let results = sweep(&code, &specs, &a.ebn0, a.stop.seed, stop)?;
    let report = Report {
        provenance: Provenance {
            code: code.descriptor(),
            seed: a.stop.seed,
            decoders: specs,
            stop,
            version: VERSION.to_string(),
        },
        results,
    };
    let mut w = a.output.writer()?;
    emit_results(&mut w, &report, a.output.format)?;
    w.flush()?;
    Ok(())
}

fn run_omega_sweep(a: OmegaSweepArgs) -> Result<()> {
    let code = a.code.build()?;
    let s = omega_sweep(&code, a.ebn0, &a.omega_grid, a.tmax, a.stop.rule(), a.stop.seed)?;
    let mut w = a.output.writer()?;
    match a.output.format {
        Format::Csv => s.write_csv(&mut w)?,
        Format::Json => {
            #[derive(Serialize)]
            struct Out<'a> {
                code: polarflip_core::CodeDescriptor,
                seed: u64,
                ebn0_db: f64,
                t_max: usize,
                omega_star: f64,
                omega_opt: f64,
                band: Vec<f64>,
                rows: &'a [polarflip_core::analysis::SweepRow],
                version: &'static str,
            }
            let out = Out {
                code: code.descriptor(),
                seed: a.stop.seed,
                ebn0_db: a.ebn0,
                t_max: a.tmax,
                omega_star: omega_star(a.ebn0).value(),
                omega_opt: s.best().omega,
                band: s.band(),
                rows: &s.rows,
                version: VERSION,
            };
            serde_json::to_writer_pretty(&mut w, &out)?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct AnalyzeRow {
    ebn0_db: f64,
    fer_theoretical: f64,
    fer_hypothetical: f64,
    critical_set_size: usize,
}

fn analyze(a: AnalyzeArgs) -> Result<()> {
    let code = a.code.build()?;
    let cs = build_critical_set(&code);
    let rows = a
        .ebn0
        .iter()
        .map(|&x| {
            let profile = ga_evolve(&code, x);
            Ok(AnalyzeRow {
                ebn0_db: x,
                fer_theoretical: fer_theoretical(&code, &profile)?.value,
                fer_hypothetical: fer_hypothetical(&code, &profile, &cs)?.value,
                critical_set_size: cs.len(),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let mut w = a.output.writer()?;
    match a.output.format {
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            for r in &rows {
                c.serialize(r)?;
            }
            if rows.is_empty() {
                c.write_record(["ebn0_db", "fer_theoretical", "fer_hypothetical", "critical_set_size"])?;
            }
            c.flush()?;
        }
        Format::Json => {
            serde_json::to_writer_pretty(
                &mut w,
                &serde_json::json!({
                    "code": code.descriptor(),
                    "critical_set": cs.indices(),
                    "rows": rows,
                    "version": VERSION,
                }),
            )?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

fn tree_dump(a: TreeDumpArgs) -> Result<()> {
    let code = a.code.build()?;
    let tree = if a.unpruned {
        DecodeTree::unpruned(code.frozen_mask())
    } else if let Some(s) = a.max_stage {
        DecodeTree::classify_capped(code.frozen_mask(), s)
    } else {
        DecodeTree::classify(&code)
    };
    let nodes: serde_json::Value = serde_json::from_str(&tree.dump_json()?)?;
    let out = serde_json::json!({
        "code": code.descriptor(),
        "steps_per_iteration": tree.steps_per_iteration(),
        "critical_set": build_critical_set(&code).indices(),
        "nodes": nodes,
    });
    let text = serde_json::to_string_pretty(&out)? + "\n";
    match &a.out {
        Some(p) => std::fs::write(p, text).with_context(|| format!("cannot write {}", p.display()))?,
        None => io::stdout().write_all(text.as_bytes())?,
    }
    Ok(())
}
