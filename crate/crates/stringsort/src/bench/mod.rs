//! Benchmark harness: inputs, the sorter catalog and RESULT lines.

mod gen;
mod registry;
mod run;

pub use gen::{gen_random, gen_random2, gen_url_like, GenLimit};
pub use registry::{find_algorithm, list_algorithms, Algorithm, CountedFn, PlainFn, SortParams};
pub use run::{
    load_input, median, parse_size, run, run_with, BenchConfig, BenchError, InputMode, InputSource, ParseRowError,
    ResultRow, RunReport, SizeCap, DEFAULT_COUNT, RESULT_KEYS,
};
