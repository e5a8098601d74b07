//! Benchmark runs and the RESULT line format.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use stringsort_core::strset::{lcp_array_oracle, metrics, oracle_sort, verify};
use stringsort_core::{MetricsReport, SortStats, StringSet};

use super::gen::{gen_random, gen_random2, GenLimit};
use super::registry::{find_algorithm, Algorithm, SortParams};

/// Errors of a benchmark run.
#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("unknown algorithm `{0}`; see --list")]
    UnknownAlgorithm(String),
    #[error("cannot load input {path}: {reason}")]
    InputLoadError { path: String, reason: String },
    #[error("invalid argument: {0}")]
    Usage(String),
    #[error("verification failed: {detail}")]
    VerificationFailed { detail: String, report: Box<RunReport> },
}

impl BenchError {
    /// Process exit code: 1 for a failed verification, 2 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::VerificationFailed { .. } => 1,
            _ => 2,
        }
    }
}

/// Where the strings come from.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InputSource {
    Random,
    Random2,
    File(PathBuf),
}

impl FromStr for InputSource {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "random" => Ok(Self::Random),
            "random2" => Ok(Self::Random2),
            _ => match s.strip_prefix("file:") {
                Some(path) if !path.is_empty() => Ok(Self::File(path.into())),
                _ => Err(BenchError::Usage(format!("input `{s}` is not random, random2 or file:PATH"))),
            },
        }
    }
}

impl fmt::Display for InputSource {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Random => f.write_str("random"),
            Self::Random2 => f.write_str("random2"),
            Self::File(p) => {
                let name = p.file_name().map(|n| n.to_string_lossy().into_owned()).unwrap_or_default();
                write!(f, "file:{}", name.replace(char::is_whitespace, "_"))
            }
        }
    }
}

/// How a file becomes strings.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InputMode {
    Lines,
    Suffixes,
}

impl FromStr for InputMode {
    type Err = BenchError;

    fn from_str(s: &str) -> Result<Self, BenchError> {
        match s {
            "lines" => Ok(Self::Lines),
            "suffixes" => Ok(Self::Suffixes),
            _ => Err(BenchError::Usage(format!("mode `{s}` is not lines or suffixes"))),
        }
    }
}

/// Input size cap.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SizeCap {
    /// At most this many strings (suffix mode: text characters).
    Count(usize),
    /// At most this many bytes of input (generators: characters including
    /// terminators).
    Bytes(usize),
}

/// Parses `1000`, `64Ki`, `2Mi`, `1Gi` (string counts) or the same with a
/// trailing `B` (bytes). Prefixes are binary.
pub fn parse_size(s: &str) -> Result<SizeCap, BenchError> {
    let bad = || BenchError::Usage(format!("size `{s}` is not N, NKi, NMi or NGi with optional trailing B"));
    let (body, bytes) = match s.strip_suffix('B') {
        Some(b) => (b, true),
        None => (s, false),
    };
    let (digits, scale) = [("Ki", 1usize << 10), ("Mi", 1 << 20), ("Gi", 1 << 30)]
        .iter()
        .find_map(|&(suffix, scale)| body.strip_suffix(suffix).map(|d| (d, scale)))
        .unwrap_or((body, 1));
    let value: usize = digits.parse().map_err(|_| bad())?;
    let value = value.checked_mul(scale).ok_or_else(bad)?;
    Ok(if bytes { SizeCap::Bytes(value) } else { SizeCap::Count(value) })
}

/// One benchmark invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BenchConfig {
    pub algo: String,
    pub input: InputSource,
    pub mode: InputMode,
    pub size: Option<SizeCap>,
    pub reps: usize,
    pub threads: usize,
    pub parts: usize,
    pub seed: u64,
    pub verify: bool,
    pub lcp: bool,
    pub stats: bool,
}

impl Default for BenchConfig {
    fn default() -> Self {
        Self {
            algo: "seq-s5-uic".into(),
            input: InputSource::Random,
            mode: InputMode::Lines,
            size: None,
            reps: 3,
            threads: 1,
            parts: 1,
            seed: 1,
            verify: false,
            lcp: false,
            stats: false,
        }
    }
}

/// Generators produce this many strings when no size is given.
pub const DEFAULT_COUNT: usize = 1 << 20;

/// Loads or generates the input of `config`.
pub fn load_input(config: &BenchConfig) -> Result<StringSet, BenchError> {
    let limit = match config.size {
        None => GenLimit::strings(DEFAULT_COUNT),
        Some(SizeCap::Count(n)) => GenLimit::strings(n),
        Some(SizeCap::Bytes(b)) => GenLimit::chars(b),
    };
    match (&config.input, config.mode) {
        (InputSource::Random, InputMode::Lines) => Ok(gen_random(limit, config.seed)),
        (InputSource::Random2, InputMode::Lines) => Ok(gen_random2(limit, config.seed)),
        (InputSource::Random | InputSource::Random2, InputMode::Suffixes) => {
            Err(BenchError::Usage("suffix mode needs a file input".into()))
        }
        (InputSource::File(path), mode) => {
            let load_err = |reason: String| BenchError::InputLoadError { path: path.display().to_string(), reason };
            let bytes = std::fs::read(path).map_err(|e| load_err(e.to_string()))?;
            let set = match mode {
                InputMode::Lines => StringSet::from_lines(truncate_lines(&bytes, config.size)),
                InputMode::Suffixes => {
                    let cap = match config.size {
                        None => bytes.len(),
                        Some(SizeCap::Count(n) | SizeCap::Bytes(n)) => n.min(bytes.len()),
                    };
                    StringSet::from_suffixes(&bytes[..cap])
                }
            };
            set.map_err(|e| load_err(e.to_string()))
        }
    }
}

/// Prefix of a line file holding at most the given lines or bytes.
fn truncate_lines(bytes: &[u8], size: Option<SizeCap>) -> &[u8] {
    match size {
        None => bytes,
        Some(SizeCap::Bytes(b)) => &bytes[..b.min(bytes.len())],
        Some(SizeCap::Count(n)) => {
            let end = bytes
                .iter()
                .enumerate()
                .filter(|(_, &c)| c == b'\n')
                .nth(n.wrapping_sub(1))
                .map_or(bytes.len(), |(i, _)| i + 1);
            if n == 0 {
                &bytes[..0]
            } else {
                &bytes[..end]
            }
        }
    }
}

/// The machine-readable summary of a run.
#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub algo: String,
    pub input: String,
    pub n: usize,
    /// Total characters N.
    pub total_chars: usize,
    /// Distinguishing prefix size D.
    pub distinguishing: usize,
    /// LCP sum L.
    pub lcp_sum: usize,
    /// Median time of the repetitions.
    pub time_ms: f64,
    pub threads: usize,
    pub reps: usize,
    /// Counters, present in statistics mode.
    pub char_cmp: Option<u64>,
    pub string_access: Option<u64>,
    pub peak_aux_bytes: Option<usize>,
    /// Outcome of verification, if requested.
    pub verified: Option<bool>,
}

/// Keys of a RESULT line in emission order.
pub const RESULT_KEYS: [&str; 13] = [
    "algo",
    "input",
    "n",
    "N",
    "D",
    "L",
    "time_ms",
    "threads",
    "reps",
    "char_cmp",
    "string_access",
    "peak_aux_bytes",
    "verified",
];

/// Placeholder for values that were not measured.
const MISSING: &str = "-";

fn opt<T: fmt::Display>(v: &Option<T>) -> String {
    v.as_ref().map_or_else(|| MISSING.to_string(), T::to_string)
}

impl fmt::Display for ResultRow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "RESULT algo={} input={} n={} N={} D={} L={} time_ms={:.3} threads={} reps={} char_cmp={} \
             string_access={} peak_aux_bytes={} verified={}",
            self.algo,
            self.input,
            self.n,
            self.total_chars,
            self.distinguishing,
            self.lcp_sum,
            self.time_ms,
            self.threads,
            self.reps,
            opt(&self.char_cmp),
            opt(&self.string_access),
            opt(&self.peak_aux_bytes),
            self.verified.map_or(MISSING, |v| if v { "1" } else { "0" }),
        )
    }
}

/// Why a line is not a valid RESULT line.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ParseRowError {
    #[error("line does not start with `RESULT `")]
    MissingPrefix,
    #[error("token `{0}` is not key=value")]
    BadToken(String),
    #[error("key `{0}` is missing")]
    MissingKey(&'static str),
    #[error("key `{0}` appears twice")]
    DuplicateKey(String),
    #[error("unknown key `{0}`")]
    UnknownKey(String),
    #[error("value of `{key}` is invalid: `{value}`")]
    BadValue { key: &'static str, value: String },
}

impl FromStr for ResultRow {
    type Err = ParseRowError;

    fn from_str(line: &str) -> Result<Self, ParseRowError> {
        let rest = line.trim_end().strip_prefix("RESULT ").ok_or(ParseRowError::MissingPrefix)?;
        let mut values: [Option<&str>; RESULT_KEYS.len()] = [None; RESULT_KEYS.len()];
        for token in rest.split_whitespace() {
            let (k, v) = token.split_once('=').ok_or_else(|| ParseRowError::BadToken(token.into()))?;
            let i = RESULT_KEYS.iter().position(|&key| key == k).ok_or_else(|| ParseRowError::UnknownKey(k.into()))?;
            if values[i].replace(v).is_some() {
                return Err(ParseRowError::DuplicateKey(k.into()));
            }
        }
        let get = |i: usize| values[i].ok_or(ParseRowError::MissingKey(RESULT_KEYS[i]));
        fn num<T: FromStr>(key: &'static str, v: &str) -> Result<T, ParseRowError> {
            v.parse().map_err(|_| ParseRowError::BadValue { key, value: v.into() })
        }
        fn maybe<T: FromStr>(key: &'static str, v: &str) -> Result<Option<T>, ParseRowError> {
            if v == MISSING {
                Ok(None)
            } else {
                num(key, v).map(Some)
            }
        }
        Ok(ResultRow {
            algo: get(0)?.into(),
            input: get(1)?.into(),
            n: num("n", get(2)?)?,
            total_chars: num("N", get(3)?)?,
            distinguishing: num("D", get(4)?)?,
            lcp_sum: num("L", get(5)?)?,
            time_ms: num("time_ms", get(6)?)?,
            threads: num("threads", get(7)?)?,
            reps: num("reps", get(8)?)?,
            char_cmp: maybe("char_cmp", get(9)?)?,
            string_access: maybe("string_access", get(10)?)?,
            peak_aux_bytes: maybe("peak_aux_bytes", get(11)?)?,
            verified: match get(12)? {
                "1" => Some(true),
                "0" => Some(false),
                MISSING => None,
                v => return Err(ParseRowError::BadValue { key: "verified", value: v.into() }),
            },
        })
    }
}

/// Everything a run produced.
#[derive(Debug, Clone, PartialEq)]
pub struct RunReport {
    pub row: ResultRow,
    /// Per-repetition sort times in milliseconds.
    pub rep_times_ms: Vec<f64>,
}

/// Median of a non-empty sample; the mean of the two middle values for
/// even sizes.
pub fn median(values: &[f64]) -> f64 {
    assert!(!values.is_empty(), "median of nothing");
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let m = v.len() / 2;
    if v.len() % 2 == 1 {
        v[m]
    } else {
        (v[m - 1] + v[m]) / 2.0
    }
}

/// Runs the configured sorter from the registry.
pub fn run(config: &BenchConfig) -> Result<RunReport, BenchError> {
    let algo = find_algorithm(&config.algo).ok_or_else(|| BenchError::UnknownAlgorithm(config.algo.clone()))?;
    run_with(config, &algo)
}

/// Runs `algo` on the input of `config`: each repetition starts from the
/// input order in a freshly allocated handle array and times only the sort.
pub fn run_with(config: &BenchConfig, algo: &Algorithm) -> Result<RunReport, BenchError> {
    if config.reps == 0 || config.threads == 0 || config.parts == 0 {
        return Err(BenchError::Usage("reps, threads and parts must be at least 1".into()));
    }
    let set = load_input(config)?;
    let st = set.strings();
    let params = SortParams {
        threads: config.threads,
        parts: config.parts,
        seed: config.seed,
        lcp: config.lcp,
        ..SortParams::default()
    };
    let mut times = Vec::with_capacity(config.reps);
    let mut counters = None;
    let mut last = (Vec::new(), None);
    for _ in 0..config.reps {
        let mut order = set.handles().to_vec();
        let mut stats = SortStats::new();
        let start = Instant::now();
        let lcp = if config.stats {
            (algo.counted)(st, &mut order, &params, &mut stats)
        } else {
            (algo.plain)(st, &mut order, &params)
        };
        times.push(start.elapsed().as_secs_f64() * 1e3);
        if config.stats {
            counters = Some(stats);
        }
        last = (order, lcp);
    }
    let (order, lcp) = last;

    let verdict = config.verify.then(|| {
        let lcp = if config.lcp { lcp.as_deref() } else { None };
        verify(st, &order, set.handles(), lcp)
    });
    let m = input_metrics(&set, if matches!(verdict, Some(Ok(()))) { Some(&order) } else { None });
    let row = ResultRow {
        algo: algo.id.to_string(),
        input: config.input.to_string(),
        n: m.n,
        total_chars: m.total_chars,
        distinguishing: m.distinguishing,
        lcp_sum: m.lcp_sum,
        time_ms: median(&times),
        threads: config.threads,
        reps: config.reps,
        char_cmp: counters.map(|s| s.char_cmp),
        string_access: counters.map(|s| s.string_access),
        peak_aux_bytes: counters.map(|s| s.bytes_aux),
        verified: verdict.as_ref().map(Result::is_ok),
    };
    let report = RunReport { row, rep_times_ms: times };
    match verdict {
        Some(Err(e)) => Err(BenchError::VerificationFailed { detail: e.to_string(), report: Box::new(report) }),
        _ => Ok(report),
    }
}

/// n, N, D and L of the input, from an already verified order when there is
/// one and from the reference sort otherwise.
fn input_metrics(set: &StringSet, sorted: Option<&[usize]>) -> MetricsReport {
    let st = set.strings();
    let owned;
    let order = match sorted {
        Some(o) => o,
        None => {
            owned = oracle_sort(st, set.handles());
            &owned
        }
    };
    let lcp = lcp_array_oracle(st, order).expect("order is sorted");
    metrics(set, order, &lcp)
}
