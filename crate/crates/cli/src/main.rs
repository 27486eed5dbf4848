use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use aitlab::complexity::{ComplexityRow, DepthProfile, COMPLEXITY_CSV_HEADER};
use aitlab::lab::{
    claim_ids, cmd_enumerate, cmd_inspect, cmd_report, parse_range, Format, Lab, LabConfig, Source,
};
use aitlab::{BitString, DbKey, LabError};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(name = "aitlab", version, about = "Budgeted algorithmic statistics lab")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    opts: Opts,
}

#[derive(Subcommand)]
enum Command {
    /// Enumerate (or reuse) every database the report needs.
    Enumerate,
    /// Run claim suites against the cache and emit the report bundle.
    Report,
    /// Print the dossier for one string.
    Inspect { x: String },
    /// Busy-beaver table per length.
    Bb,
    /// k_x and k'_x for every string in the length range.
    Depth,
}

#[derive(Args)]
struct Opts {
    /// JSON config file; flags override its keys.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// String lengths, e.g. 2..=6.
    #[arg(long, global = true)]
    n: Option<String>,
    #[arg(long, global = true)]
    steps: Option<u64>,
    #[arg(long, global = true)]
    bits: Option<u32>,
    /// Slack sweep range, e.g. 0..=8.
    #[arg(long, global = true)]
    slack: Option<String>,
    /// Comma-separated claim ids, `all` or `none`.
    #[arg(long, global = true, default_value = "all")]
    claims: String,
    /// Output file; stdout when absent.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[arg(long, global = true)]
    format: Option<String>,
}

impl Opts {
    fn config(&self) -> Result<LabConfig, LabError> {
        let mut c = match &self.config {
            Some(p) => LabConfig::from_file(p)?,
            None => LabConfig::default(),
        };
        if let Some(r) = &self.n {
            (c.n_min, c.n_max) = parse_range(r)?;
        }
        if let Some(s) = self.steps {
            c.max_steps = s;
        }
        if let Some(b) = self.bits {
            c.max_program_bits = b;
            c.plain_cap = c.plain_cap.min(b);
            c.bb_cap = c.bb_cap.min(b);
        }
        if let Some(r) = &self.slack {
            (c.slack_min, c.slack_max) = parse_range(r)?;
        }
        if let Some(w) = self.workers {
            c.workers = w;
        }
        if let Some(f) = &self.format {
            c.format = f.parse()?;
        }
        c.validate()?;
        Ok(c)
    }

    fn claims(&self) -> Vec<String> {
        match self.claims.as_str() {
            "all" => claim_ids().map(String::from).collect(),
            "none" | "" => Vec::new(),
            list => list.split(',').map(|s| s.trim().to_string()).collect(),
        }
    }

    fn emit(&self, text: &str) -> Result<(), LabError> {
        match &self.out {
            Some(p) => aitlab::enumeration::write_atomic(p, text.as_bytes()),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

fn run(cli: &Cli) -> Result<bool, LabError> {
    let opts = &cli.opts;
    let config = opts.config()?;
    match &cli.command {
        Command::Enumerate => {
            let lab = cmd_enumerate(config)?;
            eprintln!(
                "{} databases ready ({} enumerated, {} from cache) in {}",
                lab.enumerated + lab.loaded,
                lab.enumerated,
                lab.loaded,
                lab.config.cache_dir.display()
            );
            Ok(true)
        }
        Command::Report => {
            let format = config.format;
            let bundle = cmd_report(config, &opts.claims(), Source::Cache)?;
            for line in bundle.summary_lines() {
                eprintln!("{line}");
            }
            opts.emit(&match format {
                Format::Json => bundle.to_json(),
                Format::Csv => bundle.to_csv(),
            })?;
            Ok(!bundle.any_fail())
        }
        Command::Inspect { x } => {
            let x: BitString = x
                .parse()
                .map_err(|e| LabError::Config(format!("bad string {x:?}: {e}")))?;
            let n = x.len() as u32;
            if !config.lengths().contains(&n) {
                return Err(LabError::Config(format!(
                    "string length {n} outside the configured range {}..={}",
                    config.n_min, config.n_max
                )));
            }
            let mut lab = Lab::open(config, Source::Cache)?;
            lab.prepare()?;
            opts.emit(&cmd_inspect(&x, &lab)?)?;
            Ok(true)
        }
        Command::Bb => {
            let mut lab = Lab::open(config, Source::Enumerate)?;
            let keys: Vec<DbKey> = lab.config.lengths().map(DbKey::plain).collect();
            lab.ensure(keys)?;
            let mut s = String::from("n,k,bb,champion,champion_steps\n");
            for n in lab.config.lengths() {
                let plain = lab.catalog.plain(n)?;
                for k in 0..=lab.config.bb_cap {
                    if let Some(e) = plain.bb_entry(k) {
                        writeln!(
                            s,
                            "{n},{k},{},{},{}",
                            e.value.to_nat_big(),
                            e.champion.to_field(),
                            e.champion_steps
                        )
                        .unwrap();
                    }
                }
            }
            opts.emit(&s)?;
            Ok(true)
        }
        Command::Depth => {
            let mut lab = Lab::open(config, Source::Enumerate)?;
            let keys = lab.stage_a();
            lab.ensure(keys)?;
            let slack = lab.config.depth_slack;
            let mut s = format!("{COMPLEXITY_CSV_HEADER}\n");
            for n in lab.config.lengths() {
                for x in BitString::all_of_len(n as usize) {
                    let p = DepthProfile::compute(&lab.catalog, &x, slack)?;
                    let witness = lab
                        .catalog
                        .given(n, &BitString::new())?
                        .table
                        .witness(&x)
                        .map_or("-".into(), BitString::to_field);
                    let show = |v: Option<u32>| v.map_or("inf".to_string(), |v| v.to_string());
                    for (quantity, value) in [
                        ("K", p.k.to_string()),
                        ("k_x", show(p.k_x)),
                        ("kprime_x", show(p.kprime_x)),
                    ] {
                        let row = ComplexityRow {
                            quantity: quantity.into(),
                            n,
                            x: x.to_field(),
                            slack,
                            value,
                            witness: witness.clone(),
                        };
                        writeln!(s, "{}", row.to_csv()).unwrap();
                    }
                }
            }
            opts.emit(&s)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("aitlab: {e}");
            ExitCode::from(2)
        }
    }
}
