//! Seeded Monte Carlo over `(n, α, β)` grids.
//!
//! Every trial draws its sources from a seed that depends only on the master
//! seed, the cell index and the trial index, and per-cell aggregation sums
//! integers. The resulting reports and CSV are therefore identical for any
//! worker count or scheduling order.

use std::collections::BTreeMap;
use std::fmt;
use std::fmt::Write as _;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::events::{EventKind, Scanner};
use crate::model::{derive_params, generate_sources, Params};
use crate::reconstruct::{is_unique, Budget, Uniqueness};
use crate::theory::{
    classify_region, event_bounds, repeat_free_bound, u_statistic, v_statistic, RegionClass,
    Verdict,
};
use crate::{Error, Result};

pub const CSV_HEADER: &str = "alpha,beta,n,m,k,trials,measure,count,estimate,stderr,verdict";

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Measure {
    #[serde(rename = "uniqueness")]
    Uniqueness,
    #[serde(rename = "eventA")]
    EventA,
    #[serde(rename = "eventB")]
    EventB,
    #[serde(rename = "eventC")]
    EventC,
    #[serde(rename = "eventD")]
    EventD,
    #[serde(rename = "eventH")]
    EventH,
    V,
    U,
    #[serde(rename = "repeat_free")]
    RepeatFree,
}

impl Measure {
    pub const ALL: [Measure; 9] = [
        Measure::Uniqueness,
        Measure::EventA,
        Measure::EventB,
        Measure::EventC,
        Measure::EventD,
        Measure::EventH,
        Measure::V,
        Measure::U,
        Measure::RepeatFree,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Uniqueness => "uniqueness",
            Measure::EventA => "eventA",
            Measure::EventB => "eventB",
            Measure::EventC => "eventC",
            Measure::EventD => "eventD",
            Measure::EventH => "eventH",
            Measure::V => "V",
            Measure::U => "U",
            Measure::RepeatFree => "repeat_free",
        }
    }

    pub fn event(self) -> Option<EventKind> {
        match self {
            Measure::EventA => Some(EventKind::A),
            Measure::EventB => Some(EventKind::B),
            Measure::EventC => Some(EventKind::C),
            Measure::EventD => Some(EventKind::D),
            Measure::EventH => Some(EventKind::H),
            _ => None,
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Measure::ALL
            .into_iter()
            .find(|m| m.name() == s)
            .ok_or_else(|| Error::Parse(format!("unknown measure {s:?}")))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n_values: Vec<usize>,
    pub alpha_grid: Vec<f64>,
    pub beta_grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    #[serde(default)]
    pub budget: Budget,
    pub measures: Vec<Measure>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(Error::Config("trials must be at least 1".into()));
        }
        if self.n_values.is_empty() || self.alpha_grid.is_empty() || self.beta_grid.is_empty() {
            return Err(Error::Config(
                "n_values, alpha_grid and beta_grid must be nonempty".into(),
            ));
        }
        if self.measures.is_empty() {
            return Err(Error::Config("measures must be nonempty".into()));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let config: ExperimentConfig =
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        config.validate()?;
        Ok(config)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }
}

/// One aggregated quantity of a cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Estimate {
    /// Row label: a measure name, or `uniqueness_unknown`, `V_mean`, `U_mean`.
    pub label: String,
    pub count: u64,
    pub estimate: f64,
    pub stderr: f64,
    /// `3 / trials` when a proportion has `count` of 0 or `trials`.
    pub rule_of_three: Option<f64>,
}

impl Estimate {
    fn proportion(label: &str, count: u64, trials: usize) -> Self {
        let t = trials as f64;
        let p = count as f64 / t;
        let edge = count == 0 || count == trials as u64;
        Estimate {
            label: label.to_string(),
            count,
            estimate: p,
            stderr: (p * (1.0 - p) / t).sqrt(),
            rule_of_three: edge.then_some(3.0 / t),
        }
    }

    fn mean(label: &str, sum: u64, sum_sq: u128, trials: usize) -> Self {
        let t = trials as f64;
        let mean = sum as f64 / t;
        let var = if trials > 1 {
            ((sum_sq as f64 - t * mean * mean) / (t - 1.0)).max(0.0)
        } else {
            0.0
        };
        Estimate {
            label: label.to_string(),
            count: sum,
            estimate: mean,
            stderr: (var / t).sqrt(),
            rule_of_three: None,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CellReport {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub trials: usize,
    pub estimates: Vec<Estimate>,
    /// Uniqueness trials that ran out of solver budget.
    pub unknown_count: u64,
    pub region: RegionClass,
    pub repeat_free_bound: f64,
    pub event_bounds: BTreeMap<EventKind, f64>,
    /// Set when `(m, k)` derived from the grid point is not a valid parameter set.
    pub skipped: Option<String>,
}

impl CellReport {
    pub fn get(&self, label: &str) -> Option<&Estimate> {
        self.estimates.iter().find(|e| e.label == label)
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for child `index` of stream `seed`.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    splitmix64(splitmix64(seed) ^ splitmix64(index.wrapping_add(0x632B_E59B_D9B4_E019)))
}

#[derive(Default, Clone, Copy)]
struct Tally {
    hits: u64,
    unknown: u64,
    sum: u64,
    sum_sq: u128,
}

impl Tally {
    fn add(mut self, other: Tally) -> Tally {
        self.hits += other.hits;
        self.unknown += other.unknown;
        self.sum += other.sum;
        self.sum_sq += other.sum_sq;
        self
    }

    fn value(v: u64) -> Tally {
        Tally {
            hits: (v > 0) as u64,
            unknown: 0,
            sum: v,
            sum_sq: v as u128 * v as u128,
        }
    }
}

fn trial(params: &Params, seed: u64, measures: &[Measure], budget: Budget) -> Result<Vec<Tally>> {
    let x = generate_sources(params, seed);
    let k = params.k;
    let needs_scan = measures
        .iter()
        .any(|m| m.event().is_some() || *m == Measure::RepeatFree);
    let scanner = if needs_scan {
        Some(Scanner::new(&x, k)?)
    } else {
        None
    };
    measures
        .iter()
        .map(|&measure| {
            Ok(match measure {
                Measure::Uniqueness => match is_unique(&x, k, budget)? {
                    Uniqueness::Unique => Tally::default(),
                    Uniqueness::Ambiguous => Tally {
                        hits: 1,
                        ..Tally::default()
                    },
                    Uniqueness::Unknown => Tally {
                        unknown: 1,
                        ..Tally::default()
                    },
                },
                Measure::RepeatFree => Tally {
                    hits: !scanner.as_ref().expect("scanner built").has_repeat() as u64,
                    ..Tally::default()
                },
                Measure::V | Measure::U if params.m < 2 => Tally::default(),
                Measure::V => Tally::value(v_statistic(&x, k)?),
                Measure::U => Tally::value(u_statistic(&x, k)?),
                event => {
                    let kind = event.event().expect("event measure");
                    let hit = scanner
                        .as_ref()
                        .expect("scanner built")
                        .detect(kind)
                        .is_some();
                    Tally {
                        hits: hit as u64,
                        ..Tally::default()
                    }
                }
            })
        })
        .collect()
}

fn describe(params: &Params) -> String {
    format!("(n={}, m={}, k={})", params.n, params.m, params.k)
}

/// Run `trials` independent instances of `params`. Trial `t` uses the seed
/// `derive_seed(seed, t)`.
pub fn run_cell(
    params: &Params,
    trials: usize,
    seed: u64,
    measures: &[Measure],
    budget: Budget,
) -> Result<CellReport> {
    params.validate()?;
    if trials == 0 {
        return Err(Error::Config("trials must be at least 1".into()));
    }
    if measures.is_empty() {
        return Err(Error::Config("measures must be nonempty".into()));
    }
    let mut measures = measures.to_vec();
    measures.sort();
    measures.dedup();

    let zero = vec![Tally::default(); measures.len()];
    let totals = (0..trials as u64)
        .into_par_iter()
        .map(|t| {
            trial(params, derive_seed(seed, t), &measures, budget).map_err(|e| Error::Cell {
                cell: format!("{} trial {t}", describe(params)),
                source: Box::new(e),
            })
        })
        .try_reduce(
            || zero.clone(),
            |a, b| Ok(a.into_iter().zip(b).map(|(x, y)| x.add(y)).collect()),
        )?;

    let mut estimates = Vec::new();
    let mut unknown_count = 0;
    for (measure, tally) in measures.iter().zip(&totals) {
        match measure {
            Measure::Uniqueness => {
                unknown_count = tally.unknown;
                estimates.push(Estimate::proportion("uniqueness", tally.hits, trials));
                estimates.push(Estimate::proportion(
                    "uniqueness_unknown",
                    tally.unknown,
                    trials,
                ));
            }
            Measure::V | Measure::U => {
                estimates.push(Estimate::proportion(measure.name(), tally.hits, trials));
                let label = format!("{}_mean", measure.name());
                estimates.push(Estimate::mean(&label, tally.sum, tally.sum_sq, trials));
            }
            _ => estimates.push(Estimate::proportion(measure.name(), tally.hits, trials)),
        }
    }

    let (alpha, beta) = (params.effective_alpha(), params.effective_beta());
    Ok(CellReport {
        alpha,
        beta,
        n: params.n,
        m: params.m,
        k: params.k,
        trials,
        estimates,
        unknown_count,
        region: classify_region(alpha, beta),
        repeat_free_bound: repeat_free_bound(params),
        event_bounds: event_bounds(params),
        skipped: None,
    })
}

/// Evaluate every `(n, α, β)` cell of the grid, sorted by `(n, α, β)`.
/// Cell `c` in that order draws its trials from `derive_seed(master_seed, c)`.
pub fn run_grid(config: &ExperimentConfig) -> Result<Vec<CellReport>> {
    config.validate()?;
    let mut points = Vec::new();
    for &n in &config.n_values {
        for &alpha in &config.alpha_grid {
            for &beta in &config.beta_grid {
                points.push((n, alpha, beta));
            }
        }
    }
    points.sort_by(|a, b| {
        a.0.cmp(&b.0)
            .then(a.1.total_cmp(&b.1))
            .then(a.2.total_cmp(&b.2))
    });

    points
        .par_iter()
        .enumerate()
        .map(
            |(c, &(n, alpha, beta))| match derive_params(n, alpha, beta) {
                Ok(params) => {
                    let seed = derive_seed(config.master_seed, c as u64);
                    run_cell(
                        &params,
                        config.trials,
                        seed,
                        &config.measures,
                        config.budget,
                    )
                    .map(|mut r| {
                        r.alpha = alpha;
                        r.beta = beta;
                        r.region = classify_region(alpha, beta);
                        r
                    })
                }
                Err(e) => Ok(CellReport {
                    alpha,
                    beta,
                    n,
                    m: 0,
                    k: 0,
                    trials: 0,
                    estimates: Vec::new(),
                    unknown_count: 0,
                    region: classify_region(alpha, beta),
                    repeat_free_bound: f64::NAN,
                    event_bounds: BTreeMap::new(),
                    skipped: Some(e.to_string()),
                }),
            },
        )
        .collect()
}

/// [`run_grid`] on a dedicated pool of `threads` workers, or on the global
/// pool when `threads` is `None`.
pub fn run_grid_with_threads(
    config: &ExperimentConfig,
    threads: Option<usize>,
) -> Result<Vec<CellReport>> {
    match threads {
        None => run_grid(config),
        Some(t) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot build thread pool: {e}")))?;
            pool.install(|| run_grid(config))
        }
    }
}

/// One line of the CSV output.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CsvRow {
    pub alpha: f64,
    pub beta: f64,
    pub n: usize,
    pub m: usize,
    pub k: usize,
    pub trials: usize,
    pub measure: String,
    pub count: u64,
    pub estimate: f64,
    pub stderr: f64,
    pub verdict: Verdict,
}

/// Flatten reports into CSV rows. Skipped cells contribute nothing.
pub fn csv_rows(reports: &[CellReport]) -> Vec<CsvRow> {
    reports
        .iter()
        .flat_map(|r| {
            r.estimates.iter().map(move |e| CsvRow {
                alpha: r.alpha,
                beta: r.beta,
                n: r.n,
                m: r.m,
                k: r.k,
                trials: r.trials,
                measure: e.label.clone(),
                count: e.count,
                estimate: e.estimate,
                stderr: e.stderr,
                verdict: r.region.verdict,
            })
        })
        .collect()
}

pub fn emit_csv(reports: &[CellReport]) -> String {
    let mut w = csv::WriterBuilder::new()
        .has_headers(false)
        .from_writer(Vec::new());
    for row in csv_rows(reports) {
        w.serialize(row).expect("in-memory csv write");
    }
    let body =
        String::from_utf8(w.into_inner().expect("in-memory csv flush")).expect("csv is utf-8");
    format!("{CSV_HEADER}\n{body}")
}

pub fn parse_csv(text: &str) -> Result<Vec<CsvRow>> {
    let mut r = csv::Reader::from_reader(text.as_bytes());
    let header = r.headers().map_err(|e| Error::Parse(e.to_string()))?;
    if header.iter().collect::<Vec<_>>().join(",") != CSV_HEADER {
        return Err(Error::Parse(format!("unexpected csv header {header:?}")));
    }
    r.deserialize()
        .map(|row| row.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

fn heat_color(t: f64) -> String {
    let t = if t.is_finite() {
        t.clamp(0.0, 1.0)
    } else {
        0.0
    };
    let lerp = |a: f64, b: f64| (a + (b - a) * t).round() as u8;
    format!(
        "#{:02x}{:02x}{:02x}",
        lerp(49.0, 214.0),
        lerp(110.0, 60.0),
        lerp(220.0, 50.0)
    )
}

/// SVG heatmap of one row label over the `(α, β)` grid at the largest `n`
/// present, with the achievability line `β = max(2α+1, α+2)` and the converse
/// line `β = max(2α+1, α+3/2)` drawn as polylines.
///
/// Proportions are coloured on `[0, 1]`; `_mean` rows are scaled by their
/// maximum.
pub fn emit_svg_heatmap(reports: &[CellReport], measure: &str) -> String {
    let n = reports
        .iter()
        .filter(|r| r.get(measure).is_some())
        .map(|r| r.n)
        .max();
    let cells: Vec<(f64, f64, f64)> = reports
        .iter()
        .filter(|r| Some(r.n) == n)
        .filter_map(|r| r.get(measure).map(|e| (r.alpha, r.beta, e.estimate)))
        .collect();

    let mut alphas: Vec<f64> = cells.iter().map(|c| c.0).collect();
    let mut betas: Vec<f64> = cells.iter().map(|c| c.1).collect();
    for v in [&mut alphas, &mut betas] {
        v.sort_by(f64::total_cmp);
        v.dedup();
    }
    let scale = if measure.ends_with("_mean") {
        cells
            .iter()
            .map(|c| c.2)
            .fold(0.0, f64::max)
            .max(f64::MIN_POSITIVE)
    } else {
        1.0
    };

    let (width, height, margin) = (640.0, 480.0, 60.0);
    let (pw, ph) = (width - 2.0 * margin, height - 2.0 * margin);
    let span = |v: &[f64]| -> (f64, f64) {
        match (v.first(), v.last()) {
            (Some(&lo), Some(&hi)) => {
                let step = if v.len() > 1 {
                    (hi - lo) / (v.len() - 1) as f64
                } else {
                    1.0
                };
                (lo - step / 2.0, hi + step / 2.0)
            }
            _ => (0.0, 1.0),
        }
    };
    let (a0, a1) = span(&alphas);
    let (b0, b1) = span(&betas);
    let px = |a: f64| margin + (a - a0) / (a1 - a0) * pw;
    let py = |b: f64| height - margin - (b - b0) / (b1 - b0) * ph;
    let cw = pw / alphas.len().max(1) as f64;
    let ch = ph / betas.len().max(1) as f64;

    let mut svg = String::new();
    let _ = writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{width}" height="{height}" viewBox="0 0 {width} {height}">"#
    );
    let _ = writeln!(
        svg,
        r#"<rect width="{width}" height="{height}" fill="white"/>"#
    );
    let title = match n {
        Some(n) => format!("{measure} at n = {n}"),
        None => format!("{measure}: no data"),
    };
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="30" text-anchor="middle" font-size="16">{title}</text>"#,
        width / 2.0
    );
    for &(a, b, v) in &cells {
        let _ = writeln!(
            svg,
            r#"<rect x="{:.2}" y="{:.2}" width="{:.2}" height="{:.2}" fill="{}"><title>alpha={a} beta={b} value={v}</title></rect>"#,
            px(a) - cw / 2.0,
            py(b) - ch / 2.0,
            cw,
            ch,
            heat_color(v / scale)
        );
    }

    let line = |f: &dyn Fn(f64) -> f64, knee: f64| -> String {
        let mut xs = vec![a0, a1];
        if knee > a0 && knee < a1 {
            xs.insert(1, knee);
        }
        xs.iter()
            .map(|&a| format!("{:.2},{:.2}", px(a), py(f(a))))
            .collect::<Vec<_>>()
            .join(" ")
    };
    let _ = writeln!(
        svg,
        r#"<clipPath id="plot"><rect x="{margin}" y="{margin}" width="{pw}" height="{ph}"/></clipPath>"#
    );
    let _ = writeln!(
        svg,
        r#"<polyline class="achievability" clip-path="url(#plot)" fill="none" stroke="black" stroke-width="2" points="{}"/>"#,
        line(&|a| (2.0 * a + 1.0).max(a + 2.0), 1.0)
    );
    let _ = writeln!(
        svg,
        r#"<polyline class="converse" clip-path="url(#plot)" fill="none" stroke="black" stroke-width="2" stroke-dasharray="6 4" points="{}"/>"#,
        line(&|a| (2.0 * a + 1.0).max(a + 1.5), 0.5)
    );

    let _ = writeln!(
        svg,
        r##"<rect x="{margin}" y="{margin}" width="{pw}" height="{ph}" fill="none" stroke="#444"/>"##
    );
    let _ = writeln!(
        svg,
        r#"<text x="{}" y="{}" text-anchor="middle" font-size="14">alpha</text>"#,
        width / 2.0,
        height - 20.0
    );
    let _ = writeln!(
        svg,
        r#"<text x="20" y="{}" text-anchor="middle" font-size="14" transform="rotate(-90 20 {})">beta</text>"#,
        height / 2.0,
        height / 2.0
    );
    for &a in &alphas {
        let _ = writeln!(
            svg,
            r#"<text x="{:.2}" y="{}" text-anchor="middle" font-size="10">{a}</text>"#,
            px(a),
            height - margin + 14.0
        );
    }
    for &b in &betas {
        let _ = writeln!(
            svg,
            r#"<text x="{}" y="{:.2}" text-anchor="end" font-size="10">{b}</text>"#,
            margin - 4.0,
            py(b) + 3.0
        );
    }
    svg.push_str("</svg>\n");
    svg
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small_config() -> ExperimentConfig {
        ExperimentConfig {
            n_values: vec![32],
            alpha_grid: vec![0.2, 0.4],
            beta_grid: vec![1.5, 2.5, 3.5],
            trials: 20,
            master_seed: 11,
            budget: Budget::new(2, 50_000),
            measures: vec![
                Measure::Uniqueness,
                Measure::EventD,
                Measure::V,
                Measure::RepeatFree,
            ],
        }
    }

    #[test]
    fn measure_names_round_trip() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
            assert_eq!(
                serde_json::to_string(&m).unwrap(),
                format!("\"{}\"", m.name())
            );
        }
        assert!("eventZ".parse::<Measure>().is_err());
    }

    #[test]
    fn config_validation() {
        let mut c = small_config();
        assert!(c.validate().is_ok());
        assert_eq!(ExperimentConfig::from_json(&c.to_json()).unwrap(), c);
        c.measures.clear();
        assert!(matches!(c.validate(), Err(Error::Config(_))));
        let mut c = small_config();
        c.trials = 0;
        assert!(c.validate().is_err());
        let mut c = small_config();
        c.beta_grid.clear();
        assert!(c.validate().is_err());
        let json = r#"{"n_values":[16],"alpha_grid":[0.5],"beta_grid":[2.0],"trials":3,"master_seed":1,"measures":["V"]}"#;
        assert_eq!(
            ExperimentConfig::from_json(json).unwrap().budget,
            Budget::default()
        );
    }

    #[test]
    fn single_trial_counts_are_binary() {
        let p = Params::new(24, 3, 3).unwrap();
        let r = run_cell(&p, 1, 5, &Measure::ALL, Budget::default()).unwrap();
        for e in &r.estimates {
            if !e.label.ends_with("_mean") {
                assert!(e.count <= 1, "{e:?}");
            }
        }
    }

    #[test]
    fn estimates_are_count_over_trials() {
        let p = Params::new(40, 4, 5).unwrap();
        let r = run_cell(
            &p,
            200,
            3,
            &[Measure::EventA, Measure::EventD],
            Budget::default(),
        )
        .unwrap();
        for e in &r.estimates {
            let q = e.count as f64 / 200.0;
            assert_eq!(e.estimate, q);
            assert!((e.stderr - (q * (1.0 - q) / 200.0).sqrt()).abs() < 1e-15);
        }
        let d = r.get("eventD").unwrap();
        assert!(d.estimate <= r.event_bounds[&EventKind::D] + 3.0 * d.stderr);
    }

    #[test]
    fn rule_of_three_on_extreme_counts() {
        let p = Params::new(64, 2, 40).unwrap();
        let r = run_cell(&p, 50, 1, &[Measure::EventD], Budget::default()).unwrap();
        let e = r.get("eventD").unwrap();
        assert_eq!(e.count, 0);
        assert_eq!(e.rule_of_three, Some(3.0 / 50.0));
    }

    #[test]
    fn cell_is_independent_of_thread_count() {
        let p = Params::new(48, 4, 4).unwrap();
        let run = |t: usize| {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(t)
                .build()
                .unwrap();
            pool.install(|| run_cell(&p, 64, 99, &Measure::ALL, Budget::new(2, 20_000)).unwrap())
        };
        assert_eq!(run(1), run(8));
    }

    #[test]
    fn grid_is_sorted_and_matches_cells() {
        let mut c = small_config();
        c.alpha_grid = vec![0.4, 0.2];
        let reports = run_grid(&c).unwrap();
        assert_eq!(reports.len(), 6);
        let keys: Vec<(f64, f64)> = reports.iter().map(|r| (r.alpha, r.beta)).collect();
        let mut sorted = keys.clone();
        sorted.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.total_cmp(&b.1)));
        assert_eq!(keys, sorted);

        let one = ExperimentConfig {
            alpha_grid: vec![0.2],
            beta_grid: vec![1.5],
            ..small_config()
        };
        let grid = run_grid(&one).unwrap();
        let p = derive_params(32, 0.2, 1.5).unwrap();
        let cell = run_cell(
            &p,
            one.trials,
            derive_seed(one.master_seed, 0),
            &one.measures,
            one.budget,
        )
        .unwrap();
        assert_eq!(grid[0].estimates, cell.estimates);
    }

    #[test]
    fn csv_round_trip() {
        let reports = run_grid(&small_config()).unwrap();
        let text = emit_csv(&reports);
        assert!(text.starts_with(&format!("{CSV_HEADER}\n")));
        let rows = parse_csv(&text).unwrap();
        assert_eq!(rows, csv_rows(&reports));
        assert_eq!(rows.len(), 6 * 6);
        assert!(parse_csv("a,b\n1,2\n").is_err());
    }

    #[test]
    fn single_cell_has_one_row_per_label() {
        let p = Params::new(20, 2, 4).unwrap();
        let r = run_cell(&p, 5, 0, &[Measure::EventC], Budget::default()).unwrap();
        assert_eq!(parse_csv(&emit_csv(&[r])).unwrap().len(), 1);
    }

    #[test]
    fn svg_has_two_boundaries() {
        let reports = run_grid(&small_config()).unwrap();
        for label in ["uniqueness", "V_mean"] {
            let svg = emit_svg_heatmap(&reports, label);
            assert_eq!(svg.matches("<polyline").count(), 2);
            assert_eq!(svg.matches("<rect x=").count(), 6 + 2);
        }
    }

    #[test]
    fn skipped_cells() {
        let c = ExperimentConfig {
            beta_grid: vec![2.0, 9.0],
            ..small_config()
        };
        let reports = run_grid(&c).unwrap();
        assert_eq!(reports.len(), 4);
        // beta = 9 at n = 32 asks for k = 45, which clamps to n - 1 and stays valid.
        assert!(reports.iter().all(|r| r.skipped.is_none()));
        let c = ExperimentConfig {
            n_values: vec![2],
            ..small_config()
        };
        assert!(run_grid(&c).unwrap().iter().all(|r| r.skipped.is_some()));
    }
}
