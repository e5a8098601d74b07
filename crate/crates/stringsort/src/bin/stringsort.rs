use std::process::ExitCode;

use clap::Parser;

use stringsort::bench::{list_algorithms, parse_size, run, BenchConfig, BenchError, InputMode, InputSource, SizeCap};

/// Run a string sorter on generated or loaded input and print a RESULT line.
#[derive(Debug, Parser)]
#[command(name = "stringsort", version)]
struct Cli {
    /// Algorithm id (see --list).
    #[arg(long, default_value = "seq-s5-uic")]
    algo: String,
    /// random, random2 or file:PATH.
    #[arg(long, default_value = "random", value_parser = parse_input)]
    input: InputSource,
    /// lines or suffixes.
    #[arg(long, default_value = "lines", value_parser = parse_mode)]
    mode: InputMode,
    /// String count (e.g. 1Mi) or byte count with a trailing B (e.g. 100MiB).
    #[arg(long, value_parser = parse_cap)]
    size: Option<SizeCap>,
    #[arg(long, default_value_t = 3)]
    reps: usize,
    #[arg(long, default_value_t = 1)]
    threads: usize,
    /// Partitions for the partition-then-merge sorters.
    #[arg(long, default_value_t = 1)]
    parts: usize,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    /// Check the output against the input.
    #[arg(long)]
    verify: bool,
    /// Request the LCP array (checked too when --verify is given).
    #[arg(long)]
    lcp: bool,
    /// Count character comparisons, string accesses and auxiliary memory.
    #[arg(long)]
    stats: bool,
    /// Print the algorithm catalog and exit.
    #[arg(long)]
    list: bool,
}

fn parse_input(s: &str) -> Result<InputSource, String> {
    s.parse().map_err(|e: BenchError| e.to_string())
}

fn parse_mode(s: &str) -> Result<InputMode, String> {
    s.parse().map_err(|e: BenchError| e.to_string())
}

fn parse_cap(s: &str) -> Result<SizeCap, String> {
    parse_size(s).map_err(|e| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    if cli.list {
        for a in list_algorithms() {
            println!("{:<20} {:<9} {}", a.id, a.module, a.description);
        }
        return ExitCode::SUCCESS;
    }
    let config = BenchConfig {
        algo: cli.algo,
        input: cli.input,
        mode: cli.mode,
        size: cli.size,
        reps: cli.reps,
        threads: cli.threads,
        parts: cli.parts,
        seed: cli.seed,
        verify: cli.verify,
        lcp: cli.lcp,
        stats: cli.stats,
    };
    match run(&config) {
        Ok(report) => {
            for (i, t) in report.rep_times_ms.iter().enumerate() {
                println!("# rep {} time_ms={t:.3}", i + 1);
            }
            println!("{}", report.row);
            ExitCode::SUCCESS
        }
        Err(e) => {
            if let BenchError::VerificationFailed { report, .. } = &e {
                println!("{}", report.row);
            }
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
