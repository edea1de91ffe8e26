mod config;
mod error;
mod wav;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use sbadpcm::adpcm::{CodecConfig, DEFAULT_FRAME_LENGTH};
use sbadpcm::bwe::{extend_bandwidth, spectrum_dump, BweConfig};
use sbadpcm::eval::{evaluate_internal, evaluate_pair, grid, sweep, to_csv};
use sbadpcm::qmf::{design_prototype, prototype_to_text};
use sbadpcm::quantizer::QuantizerTables;
use sbadpcm::signal::{FULL_RATE, HALF_RATE};
use sbadpcm::subband::{bit_rate, decode, encode};
use sbadpcm::{Bitstream, PredictorKind};

use crate::error::{CliError, CliResult};

#[derive(Parser)]
#[command(name = "sbadpcm", version, about = "Two-band sub-band ADPCM speech codec")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Encode a 16 kHz mono WAV into a bitstream file
    Encode {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        codec: CodecArgs,
    },
    /// Decode a bitstream file into a 16 kHz WAV
    Decode {
        input: PathBuf,
        output: PathBuf,
        #[command(flatten)]
        side: SideArgs,
    },
    /// SEGSNR of a decoded file against the original, or, without a decoded
    /// file, G_p and SEGSNR from a local encoding run
    Eval {
        original: PathBuf,
        decoded: Option<PathBuf>,
        #[command(flatten)]
        codec: CodecArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// All 16 bit allocations for the requested predictors plus the bit-rate grid
    Sweep {
        input: PathBuf,
        /// Repeatable; defaults to every predictor
        #[arg(long = "predictor")]
        predictors: Vec<PredictorKind>,
        #[arg(long, default_value_t = DEFAULT_FRAME_LENGTH)]
        frame: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[command(flatten)]
        side: SideArgs,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Extend an 8 kHz narrowband WAV to 16 kHz
    Bwe {
        input: PathBuf,
        output: PathBuf,
        #[arg(long, default_value_t = -12.0, allow_negative_numbers = true)]
        gain_db: f64,
        /// Gain-matching frame at 16 kHz
        #[arg(long, default_value_t = 400)]
        frame: usize,
    },
    /// Hann-windowed magnitude spectrum of an 8 or 16 kHz WAV
    Spectrum {
        input: PathBuf,
        #[arg(long, default_value_t = 512)]
        window: usize,
        #[arg(long)]
        csv: Option<PathBuf>,
    },
    /// Write the QMF prototype, one coefficient per line
    Prototype {
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Write the default quantizer step-size multiplier tables
    Tables {
        #[arg(long)]
        output: Option<PathBuf>,
    },
}

/// Parameters that are not carried in the bitstream and must match on both sides.
#[derive(Args, Clone, Default)]
struct SideArgs {
    /// TOML file with a [train] section
    #[arg(long)]
    config: Option<PathBuf>,
    /// Quantizer multiplier tables in text form
    #[arg(long)]
    tables: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct CodecArgs {
    #[arg(long, default_value_t = PredictorKind::Lpc10)]
    predictor: PredictorKind,
    #[arg(long, default_value_t = 4)]
    nq_low: u8,
    #[arg(long, default_value_t = 2)]
    nq_high: u8,
    #[arg(long, default_value_t = DEFAULT_FRAME_LENGTH)]
    frame: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    side: SideArgs,
}

impl SideArgs {
    fn base_config(&self) -> CliResult<CodecConfig<f64>> {
        let mut cfg = CodecConfig::<f64>::default();
        if let Some(path) = &self.config {
            config::load(path)?.train.apply(&mut cfg.train);
        }
        if let Some(path) = &self.tables {
            cfg.quantizer = QuantizerTables::parse(&config::read_text(path)?)
                .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
        }
        Ok(cfg)
    }
}

impl CodecArgs {
    fn codec_config(&self) -> CliResult<CodecConfig<f64>> {
        let mut cfg = self.side.base_config()?;
        cfg.predictor = self.predictor;
        cfg.nq_low = self.nq_low;
        cfg.nq_high = self.nq_high;
        cfg.frame_length = self.frame;
        cfg.seed_base = self.seed;
        cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
        Ok(cfg)
    }
}

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| CliError::io(p, e)),
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| CliError::io(Path::new("<stdout>"), e)),
    }
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Encode { input, output, codec } => {
            let cfg = codec.codec_config()?;
            let x = wav::read(&input, &[FULL_RATE])?;
            let bytes = encode(&x, &cfg)?.to_bytes();
            fs::write(&output, &bytes).map_err(|e| CliError::io(&output, e))?;
            let rate = bit_rate(cfg.nq_low, cfg.nq_high)?;
            eprintln!(
                "{}: {} samples, {} bytes, {} bits/sample ({} kbps)",
                output.display(),
                x.len(),
                bytes.len(),
                rate.bits_per_sample,
                rate.kbps
            );
        }
        Command::Decode { input, output, side } => {
            let base = side.base_config()?;
            let bytes = fs::read(&input).map_err(|e| CliError::io(&input, e))?;
            let bs = Bitstream::from_bytes(&bytes).map_err(|e| CliError::Corrupt {
                path: input.clone(),
                message: e.to_string(),
            })?;
            let y = decode(&bs, &base)?;
            wav::write(&output, &y)?;
        }
        Command::Eval {
            original,
            decoded,
            codec,
            csv,
        } => {
            let cfg = codec.codec_config()?;
            let bank = design_prototype();
            let x = wav::read(&original, &[FULL_RATE])?;
            let rows = match decoded {
                Some(path) => {
                    let y = wav::read(&path, &[FULL_RATE])?;
                    evaluate_pair(&x, &y, &cfg, &bank)?
                }
                None => evaluate_internal(&x, &cfg, &bank)?,
            };
            write_out(csv.as_deref(), &to_csv(&rows))?;
        }
        Command::Sweep {
            input,
            predictors,
            frame,
            seed,
            side,
            csv,
        } => {
            let mut base = side.base_config()?;
            base.frame_length = frame;
            base.seed_base = seed;
            base.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let predictors = if predictors.is_empty() {
                PredictorKind::ALL.to_vec()
            } else {
                predictors
            };
            let x = wav::read(&input, &[FULL_RATE])?;
            let rows = sweep(&x, &predictors, &base, &design_prototype())?;
            write_out(csv.as_deref(), &to_csv(&rows))?;
            if csv.is_some() {
                let mut text = String::new();
                for p in &predictors {
                    text.push_str(&format!("SEGSNR F, {} (rows nq_low 2..5, columns nq_high 2..5)\n", p.name()));
                    text.push_str(&format_grid(&grid(&rows, p.name(), "F", "SEG")));
                }
                text.push_str("bits/sample\n");
                text.push_str(&format_grid(&grid(&rows, "-", "F", "BPS")));
                write_out(None, &text)?;
            }
        }
        Command::Bwe {
            input,
            output,
            gain_db,
            frame,
        } => {
            let cfg = BweConfig {
                gain_db,
                frame_length: frame,
            };
            cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
            let x = wav::read(&input, &[HALF_RATE])?;
            let y = extend_bandwidth(&x, &design_prototype(), &cfg)?;
            wav::write(&output, &y)?;
        }
        Command::Spectrum { input, window, csv } => {
            let x = wav::read(&input, &[HALF_RATE, FULL_RATE])?;
            if window < 2 || window > x.len() {
                return Err(CliError::Usage(format!(
                    "--window must be in 2..={} for this file",
                    x.len()
                )));
            }
            let mut text = String::from("frequency_hz,db\n");
            for r in spectrum_dump(&x, window)? {
                text.push_str(&format!("{:.4},{:.4}\n", r.frequency_hz, r.db));
            }
            write_out(csv.as_deref(), &text)?;
        }
        Command::Prototype { output } => {
            write_out(output.as_deref(), &prototype_to_text(&design_prototype::<f64>()))?;
        }
        Command::Tables { output } => {
            write_out(output.as_deref(), &QuantizerTables::<f64>::default().to_text())?;
        }
    }
    Ok(())
}

fn format_grid(g: &[[f64; 4]; 4]) -> String {
    g.iter()
        .map(|row| row.iter().map(|v| format!("{v:7.2}")).collect::<String>() + "\n")
        .collect()
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("sbadpcm: {e}");
            e.exit_code()
        }
    }
}
