//! Timed runs over a grid of sizes, checked against independent oracles.

use std::fmt;
use std::time::{Duration, Instant};

use num_bigint::BigInt;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use recunfold::{Answer, Engine, Example, Term};
use sha2::{Digest, Sha256};

use crate::size::Size;
use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Mode {
    Original,
    Unfolded,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Original => "original",
            Mode::Unfolded => "unfolded",
        })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum BenchMode {
    Original,
    Unfolded,
    Both,
}

impl BenchMode {
    pub fn modes(self) -> &'static [Mode] {
        match self {
            BenchMode::Original => &[Mode::Original],
            BenchMode::Unfolded => &[Mode::Unfolded],
            BenchMode::Both => &[Mode::Original, Mode::Unfolded],
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    #[value(alias = "markdown")]
    Md,
}

#[derive(Clone, Debug)]
pub struct BenchConfig {
    pub example: Example,
    pub mode: BenchMode,
    pub sizes: Vec<Size>,
    pub reps: usize,
    pub seed: u64,
    pub format: Format,
    pub cache: bool,
    pub parallel: bool,
}

impl BenchConfig {
    pub fn new(example: Example, mode: BenchMode, sizes: Vec<Size>) -> Self {
        BenchConfig {
            example,
            mode,
            sizes,
            reps: 3,
            seed: 0,
            format: Format::Md,
            cache: true,
            parallel: false,
        }
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.example == Example::Countdown {
            return Err(CliError::Usage(
                "countdown has no answer to benchmark".into(),
            ));
        }
        if self.reps == 0 {
            return Err(CliError::Usage("--reps must be at least 1".into()));
        }
        if self.sizes.is_empty() {
            return Err(CliError::Usage("no sizes given".into()));
        }
        if self.example != Example::Summation {
            for s in &self.sizes {
                if s.as_usize().is_none_or(|n| n > 1 << 28) {
                    return Err(CliError::Usage(format!("list size {s} is too large")));
                }
            }
        }
        Ok(())
    }
}

/// Sizes used when none are given.
pub fn default_sizes(example: Example, mode: BenchMode) -> Vec<Size> {
    let original = mode != BenchMode::Unfolded;
    match (example, original) {
        (Example::Summation, true) => (15..=21).map(Size::pow2).collect(),
        (Example::Summation, false) => [25, 50, 100, 200]
            .into_iter()
            .flat_map(|k| [Size::pow2(k), Size::pow2_plus(k, 1)])
            .collect(),
        (_, true) => (9..=14).map(Size::pow2).collect(),
        (_, false) => (12..=17)
            .flat_map(|k| [-1, 0, 1].map(|d| Size::pow2_plus(k, d)))
            .collect(),
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct Timing {
    pub min: f64,
    pub mean: f64,
}

impl Timing {
    fn of(samples: &[Duration]) -> Self {
        let secs: Vec<f64> = samples.iter().map(Duration::as_secs_f64).collect();
        Timing {
            min: secs.iter().copied().fold(f64::INFINITY, f64::min),
            mean: secs.iter().sum::<f64>() / secs.len() as f64,
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct MeasurementRow {
    pub example: Example,
    pub size: Size,
    pub mode: Mode,
    pub unfolder: Timing,
    pub interpreter: Timing,
    pub total: Timing,
    /// Rules built by the first repetition.
    pub rules_generated: u64,
    pub applied_indices: Vec<usize>,
    pub checksum: String,
}

/// The goal for one benchmark case and the answer it must produce.
pub struct Case {
    pub goal: Term,
    pub expected: Term,
}

/// Seeded permutation of `1..=n`, one stream per size.
pub fn permutation(seed: u64, n: usize) -> Vec<i64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(n as u64);
    let mut v: Vec<i64> = (1..=n as i64).collect();
    v.shuffle(&mut rng);
    v
}

/// Builds the goal for `size` and its expected output without the engine.
pub fn case(engine: &mut Engine, example: Example, size: &Size, seed: u64) -> Case {
    let out = engine.machine.gen.fresh_term();
    let pred = example.program().predicate.name;
    match example {
        Example::Summation => {
            let n = size.value();
            Case {
                goal: Term::compound(pred, [Term::from(n.clone()), out]),
                expected: Term::from(n * (n + 1u32) / 2u32),
            }
        }
        Example::Reversal | Example::Sorting => {
            let items = permutation(seed, size.as_usize().expect("validated size"));
            let mut want = items.clone();
            if example == Example::Reversal {
                want.reverse();
            } else {
                want.sort_unstable();
            }
            let list = |v: &[i64]| Term::list(v.iter().map(|&x| Term::from(x)));
            Case {
                goal: Term::compound(pred, [list(&items), out]),
                expected: list(&want),
            }
        }
        Example::Countdown => unreachable!("rejected by validate"),
    }
}

pub fn checksum(t: &Term) -> String {
    hex::encode(Sha256::digest(t.to_string().as_bytes()))
}

fn new_engine(example: Example, cache: bool) -> Result<Engine, CliError> {
    let mut engine = Engine::new();
    example.register(&mut engine).map_err(CliError::from_core)?;
    engine.set_caching(cache);
    Ok(engine)
}

fn verify(
    example: Example,
    size: &Size,
    answer: &Answer,
    expected: &Term,
) -> Result<String, CliError> {
    let got = &answer.goal.args()[1];
    let (a, b) = (checksum(got), checksum(expected));
    if got != expected || a != b {
        return Err(CliError::Mismatch(format!(
            "{example} size {size}: answer checksum {a}, expected {b}"
        )));
    }
    Ok(a)
}

fn measure(
    engine: &mut Engine,
    cfg: &BenchConfig,
    size: &Size,
    mode: Mode,
) -> Result<MeasurementRow, CliError> {
    let mut unf = Vec::with_capacity(cfg.reps);
    let mut interp = Vec::with_capacity(cfg.reps);
    let mut total = Vec::with_capacity(cfg.reps);
    let mut first: Option<(u64, Vec<usize>, String)> = None;
    for _ in 0..cfg.reps {
        let Case { goal, expected } = case(engine, cfg.example, size, cfg.seed);
        let t0 = Instant::now();
        let (answer, t1) = match mode {
            Mode::Original => {
                let a = engine.call_original(&goal).map_err(CliError::from_core)?;
                (a, t0)
            }
            Mode::Unfolded => {
                let p = engine.prepare(&goal).map_err(CliError::from_core)?;
                let t1 = Instant::now();
                (
                    engine.interpret(&goal, &p).map_err(CliError::from_core)?,
                    t1,
                )
            }
        };
        let t2 = Instant::now();
        let sum = verify(cfg.example, size, &answer, &expected)?;
        unf.push(t1 - t0);
        interp.push(t2 - t1);
        total.push((t1 - t0) + (t2 - t1));
        first.get_or_insert((
            answer.stats.rules_generated,
            answer.stats.applied_rule_indices,
            sum,
        ));
    }
    let (rules_generated, applied_indices, checksum) = first.expect("reps >= 1");
    Ok(MeasurementRow {
        example: cfg.example,
        size: size.clone(),
        mode,
        unfolder: Timing::of(&unf),
        interpreter: Timing::of(&interp),
        total: Timing::of(&total),
        rules_generated,
        applied_indices,
        checksum,
    })
}

/// Runs every size under every requested mode. Rows come out in size order,
/// original before unfolded.
pub fn run_bench(cfg: &BenchConfig) -> Result<Vec<MeasurementRow>, CliError> {
    cfg.validate()?;
    let one_size = |engine: &mut Engine, size: &Size| {
        cfg.mode
            .modes()
            .iter()
            .map(|&mode| measure(engine, cfg, size, mode))
            .collect::<Result<Vec<_>, _>>()
    };
    let per_size: Vec<Vec<MeasurementRow>> = if cfg.parallel {
        cfg.sizes
            .par_iter()
            .map(|size| one_size(&mut new_engine(cfg.example, cfg.cache)?, size))
            .collect::<Result<_, _>>()?
    } else {
        let mut engine = new_engine(cfg.example, cfg.cache)?;
        cfg.sizes
            .iter()
            .map(|size| one_size(&mut engine, size))
            .collect::<Result<_, _>>()?
    };
    Ok(per_size.into_iter().flatten().collect())
}

/// Mean-time ratios between consecutive sizes of the same mode.
pub struct Ratio {
    pub mode: Mode,
    pub from: Size,
    pub to: Size,
    pub total: f64,
    pub interpreter: f64,
}

pub fn ratios(rows: &[MeasurementRow]) -> Vec<Ratio> {
    let mut out = Vec::new();
    for mode in [Mode::Original, Mode::Unfolded] {
        let rs: Vec<&MeasurementRow> = rows.iter().filter(|r| r.mode == mode).collect();
        for w in rs.windows(2) {
            out.push(Ratio {
                mode,
                from: w[0].size.clone(),
                to: w[1].size.clone(),
                total: w[1].total.mean / w[0].total.mean,
                interpreter: w[1].interpreter.mean / w[0].interpreter.mean,
            });
        }
    }
    out
}

/// The value of a size as a decimal when it is short enough to print.
pub fn size_value(s: &Size) -> String {
    let v: &BigInt = s.value();
    if v.bits() <= 64 {
        v.to_string()
    } else {
        format!("~2^{}", v.bits() - 1)
    }
}
