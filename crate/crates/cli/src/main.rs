use std::fs::File;
use std::io::{BufWriter, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use grlbwt::io::write_collection;
use grlbwt::{grl_bwt, invert_bcr, load_rlbwt, read_collection, save_rlbwt, Config, InputFormat, Report};

#[derive(Parser)]
#[command(name = "grlbwt", version, about = "BCR BWT construction for string collections")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Build the run-length BWT of a string collection.
    Build {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
        #[command(flatten)]
        opts: BuildOpts,
        /// Print per-level statistics.
        #[arg(long)]
        stats: bool,
    },
    /// Recover the strings of a BWT file, one per line.
    Invert {
        input: PathBuf,
        #[arg(short, long)]
        output: PathBuf,
    },
    /// Describe a BWT file, or build a collection's BWT and print statistics.
    Stats {
        input: PathBuf,
        #[command(flatten)]
        opts: BuildOpts,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Lines,
    Fasta,
    Raw,
}

impl From<Format> for InputFormat {
    fn from(f: Format) -> Self {
        match f {
            Format::Lines => InputFormat::Lines,
            Format::Fasta => InputFormat::Fasta,
            Format::Raw => InputFormat::Raw,
        }
    }
}

#[derive(Args)]
struct BuildOpts {
    #[arg(long, value_enum, default_value = "lines")]
    format: Format,
    /// Separator byte: a single character, `\0`, `0xNN` or a decimal value.
    #[arg(long, default_value = "$", value_parser = parse_sep)]
    sep: u8,
    /// Directory for temporary files (default: $GRLBWT_TMPDIR or the system one).
    #[arg(long)]
    tmp: Option<PathBuf>,
    /// Buffer size per temporary stream, in MiB.
    #[arg(long, default_value_t = 8)]
    buffer_mb: usize,
    /// Keep the temporary round files.
    #[arg(long)]
    keep_temp: bool,
}

impl BuildOpts {
    fn config(&self) -> Result<Config> {
        if self.buffer_mb == 0 {
            bail!("--buffer-mb must be at least 1");
        }
        Ok(Config {
            tmp_dir: self.tmp.clone(),
            buffer_bytes: self.buffer_mb << 20,
            keep_temp: self.keep_temp,
            separator: self.sep,
        })
    }
}

fn parse_sep(s: &str) -> Result<u8, String> {
    if s.len() == 1 {
        return Ok(s.as_bytes()[0]);
    }
    if s == "\\0" {
        return Ok(0);
    }
    if let Some(hex) = s.strip_prefix("0x").or_else(|| s.strip_prefix("0X")) {
        return u8::from_str_radix(hex, 16).map_err(|e| format!("bad hex byte `{s}`: {e}"));
    }
    s.parse::<u8>()
        .map_err(|_| format!("`{s}` is not a single byte, `\\0`, `0xNN` or 0-255"))
}

fn build(input: &Path, opts: &BuildOpts) -> Result<(grlbwt::RlbwtFile, Report)> {
    let config = opts.config()?;
    let collection = read_collection(input, opts.format.into(), opts.sep)?;
    let (file, report) = grl_bwt(&collection, &config).context("building the BWT")?;
    Ok((file, report))
}

fn print_report(report: &Report, seconds: f64) {
    println!("strings   {}", report.k);
    println!("symbols   {}", report.n);
    println!("levels    {}", report.h);
    println!("runs      {}", report.bwt_runs());
    if report.bwt_runs() > 0 {
        println!("n/r       {:.2}", report.n as f64 / report.bwt_runs() as f64);
    }
    println!("seconds   {seconds:.3}");
    println!();
    println!(
        "{:>5} {:>12} {:>10} {:>10} {:>12} {:>10} {:>10} {:>12}",
        "level", "n", "sigma", "phrases", "dict", "pbwt_runs", "bwt_runs", "chain_steps"
    );
    for l in &report.levels {
        println!(
            "{:>5} {:>12} {:>10} {:>10} {:>12} {:>10} {:>10} {:>12}",
            l.level, l.text_len, l.sigma, l.phrases, l.dict_symbols, l.pbwt_runs, l.bwt_runs, l.chain_steps
        );
    }
    if let Some(dir) = &report.temp_dir {
        println!();
        println!("temporary files kept in {}", dir.display());
    }
}

fn is_rlbwt(path: &Path) -> Result<bool> {
    let mut magic = [0u8; 4];
    let mut f = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let n = f.read(&mut magic).with_context(|| format!("reading {}", path.display()))?;
    Ok(n == 4 && &magic == b"GRLB")
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Build {
            input,
            output,
            opts,
            stats,
        } => {
            let start = Instant::now();
            let (file, report) = build(&input, &opts)?;
            save_rlbwt(&output, &file).with_context(|| format!("writing {}", output.display()))?;
            if stats {
                print_report(&report, start.elapsed().as_secs_f64());
            }
        }
        Command::Invert { input, output } => {
            let file = load_rlbwt(&input)?;
            let bwt = file.to_bytes()?;
            let strings = invert_bcr(&bwt, file.map.separator()).context("inverting the BWT")?;
            if strings.iter().any(|s| s.contains(&b'\n')) {
                bail!("a recovered string contains a newline and cannot be written one per line");
            }
            let f = File::create(&output).with_context(|| format!("creating {}", output.display()))?;
            let mut w = BufWriter::new(f);
            write_collection(&mut w, &strings, InputFormat::Lines, file.map.separator())
                .with_context(|| format!("writing {}", output.display()))?;
            w.flush()?;
        }
        Command::Stats { input, opts } => {
            if is_rlbwt(&input)? {
                let file = load_rlbwt(&input)?;
                let n = file.runs.total();
                println!("strings   {}", file.k);
                println!("symbols   {n}");
                println!("sigma     {}", file.map.sigma());
                println!("runs      {}", file.runs.run_count());
                println!("n/r       {:.2}", n as f64 / file.runs.run_count().max(1) as f64);
            } else {
                let start = Instant::now();
                let (_, report) = build(&input, &opts)?;
                print_report(&report, start.elapsed().as_secs_f64());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("grlbwt: {e:#}");
            ExitCode::FAILURE
        }
    }
}
