//! Sweep drivers behind the `bosonic-bell` binary.
//!
//! A [`SweepConfig`] is assembled from `key=value` pairs (a config file
//! first, command-line flags on top) and handed to [`run`], which returns
//! the complete output text. Sweeps fan out over a rayon pool and are
//! collected back in grid order, so output bytes depend only on the config.

use std::fmt;
use std::str::FromStr;

use anyhow::{anyhow, bail, Context, Result};
use bosonic_bell::bell::{self, CorrelatorReport};
use bosonic_bell::{hamiltonian, lhv, spdc};
use rayon::prelude::*;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scenario {
    BecScan,
    SpdcFull,
    SpdcFixedN,
    LhvCheck,
    Expand,
    BoundQuery,
}

impl Scenario {
    pub fn name(self) -> &'static str {
        match self {
            Scenario::BecScan => "bec-scan",
            Scenario::SpdcFull => "spdc-full",
            Scenario::SpdcFixedN => "spdc-fixed-n",
            Scenario::LhvCheck => "lhv-check",
            Scenario::Expand => "expand",
            Scenario::BoundQuery => "bound",
        }
    }

    fn keys(self) -> &'static [&'static str] {
        match self {
            Scenario::BecScan => &["n", "m", "u_min", "u_max", "u_points", "tol"],
            Scenario::SpdcFull => &["m", "t_max", "t_points", "tol"],
            Scenario::SpdcFixedN => &["n"],
            Scenario::LhvCheck => &["m"],
            Scenario::Expand => &["m"],
            Scenario::BoundQuery => &["n", "m", "n_b", "k"],
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = anyhow::Error;

    fn from_str(s: &str) -> Result<Self> {
        [
            Scenario::BecScan,
            Scenario::SpdcFull,
            Scenario::SpdcFixedN,
            Scenario::LhvCheck,
            Scenario::Expand,
            Scenario::BoundQuery,
        ]
        .into_iter()
        .find(|sc| sc.name() == s || sc.name().replace('-', "_") == s)
        .ok_or_else(|| anyhow!("unknown scenario `{s}`"))
    }
}

/// Validated parameters for one run. Fields a scenario does not use keep
/// their defaults and are left out of the config echo.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub scenario: Scenario,
    /// Particle numbers: a single `N` for the BEC scan and bound query, the
    /// list of per-region `N` for the fixed-N sweep.
    pub n: Vec<usize>,
    pub orders: Vec<usize>,
    pub u_min: f64,
    pub u_max: f64,
    pub u_points: usize,
    /// The `t` grid is `t_max * i / t_points` for `i = 1..=t_points`.
    pub t_max: f64,
    pub t_points: usize,
    pub tol: f64,
    /// Second region of a two-region bound query.
    pub n_b: Option<usize>,
    pub k: Option<usize>,
}

impl SweepConfig {
    pub fn defaults(scenario: Scenario) -> Self {
        let base = SweepConfig {
            scenario,
            n: vec![100],
            orders: vec![70, 80, 90, 100],
            u_min: -1.3,
            u_max: -0.7,
            u_points: 121,
            t_max: 2.0,
            t_points: 50,
            tol: 1e-12,
            n_b: None,
            k: None,
        };
        match scenario {
            Scenario::BecScan => base,
            Scenario::SpdcFull => SweepConfig {
                orders: vec![1, 2, 3, 4, 5, 6],
                ..base
            },
            Scenario::SpdcFixedN => SweepConfig {
                n: vec![2, 3, 6, 12],
                ..base
            },
            Scenario::LhvCheck | Scenario::Expand => SweepConfig {
                orders: vec![3],
                ..base
            },
            Scenario::BoundQuery => SweepConfig {
                orders: vec![100],
                ..base
            },
        }
    }

    /// Applies `pairs` in order over the scenario defaults, so later pairs
    /// win, then validates.
    pub fn from_pairs<K: AsRef<str>, V: AsRef<str>>(
        scenario: Scenario,
        pairs: &[(K, V)],
    ) -> Result<Self> {
        let mut cfg = SweepConfig::defaults(scenario);
        for (key, value) in pairs {
            cfg.set(key.as_ref(), value.as_ref())?;
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let key = key.trim().to_ascii_lowercase();
        let value = value.trim();
        if !self.scenario.keys().contains(&key.as_str()) {
            bail!(
                "key `{key}` does not apply to {}; accepted: {}",
                self.scenario,
                self.scenario.keys().join(", ")
            );
        }
        let ctx = || format!("bad value `{value}` for `{key}`");
        match key.as_str() {
            "n" => self.n = parse_usize_list(value).with_context(ctx)?,
            "m" => self.orders = parse_usize_list(value).with_context(ctx)?,
            "u_min" => self.u_min = value.parse().with_context(ctx)?,
            "u_max" => self.u_max = value.parse().with_context(ctx)?,
            "u_points" => self.u_points = value.parse().with_context(ctx)?,
            "t_max" => self.t_max = value.parse().with_context(ctx)?,
            "t_points" => self.t_points = value.parse().with_context(ctx)?,
            "tol" => self.tol = value.parse().with_context(ctx)?,
            "n_b" => self.n_b = Some(value.parse().with_context(ctx)?),
            "k" => self.k = Some(value.parse().with_context(ctx)?),
            _ => unreachable!(),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.orders.is_empty() {
            bail!("particle and order lists must be non-empty");
        }
        if self.n.contains(&0) {
            bail!("particle numbers must be positive");
        }
        if self.orders.contains(&0) {
            bail!("orders must be at least 1");
        }
        if !(self.tol > 0.0 && self.tol < 1.0) {
            bail!("tol must lie in (0, 1), got {}", self.tol);
        }
        match self.scenario {
            Scenario::BecScan | Scenario::BoundQuery => {
                if self.n.len() != 1 {
                    bail!("{} takes a single particle number", self.scenario);
                }
                let n = self.n[0];
                if let Some(m) = self.orders.iter().find(|m| **m > n) {
                    bail!("order {m} exceeds N = {n}");
                }
            }
            Scenario::SpdcFixedN => {
                if self.n.iter().any(|n| *n > spdc::MAX_CUTOFF) {
                    bail!("per-region N above {}", spdc::MAX_CUTOFF);
                }
            }
            Scenario::LhvCheck | Scenario::Expand => {
                if self.orders.len() != 1 {
                    bail!("{} takes a single order m", self.scenario);
                }
            }
            Scenario::SpdcFull => {}
        }
        if self.scenario == Scenario::LhvCheck && self.orders[0] > lhv::MAX_BRUTE_FORCE_PARTIES {
            bail!("m must lie in 1..={}", lhv::MAX_BRUTE_FORCE_PARTIES);
        }
        if self.scenario == Scenario::BoundQuery {
            if self.orders.len() != 1 {
                bail!("bound takes a single order m");
            }
            if self.n_b.is_some() && self.k.is_none() {
                bail!("n_b given without k");
            }
            if let Some(k) = self.k {
                let n_b = self.n_b.unwrap_or(self.n[0]);
                if k == 0 || k > n_b {
                    bail!("k = {k} outside 1..={n_b}");
                }
            }
        }
        if self.scenario == Scenario::BecScan {
            if !(self.u_min.is_finite() && self.u_max.is_finite()) || self.u_min > self.u_max {
                bail!("U range [{}, {}] is empty", self.u_min, self.u_max);
            }
            if self.u_points == 0 || (self.u_points == 1 && self.u_min != self.u_max) {
                bail!(
                    "u_points = {} cannot span [{}, {}]",
                    self.u_points,
                    self.u_min,
                    self.u_max
                );
            }
        }
        if self.scenario == Scenario::SpdcFull
            && !(self.t_max > 0.0 && self.t_max.is_finite() && self.t_points > 0)
        {
            bail!("t grid needs t_max > 0 and t_points > 0");
        }
        Ok(())
    }

    /// Scan points from `u_max` down to `u_min`, endpoints included.
    pub fn u_grid(&self) -> Vec<f64> {
        if self.u_points == 1 {
            return vec![self.u_max];
        }
        let last = (self.u_points - 1) as f64;
        (0..self.u_points)
            .map(|i| {
                let w = i as f64 / last;
                self.u_max * (1.0 - w) + self.u_min * w
            })
            .collect()
    }

    pub fn t_grid(&self) -> Vec<f64> {
        (1..=self.t_points)
            .map(|i| self.t_max * i as f64 / self.t_points as f64)
            .collect()
    }

    /// `key=value` lines for the keys this scenario reads.
    pub fn echo(&self) -> Vec<String> {
        let join = |v: &[usize]| {
            v.iter()
                .map(ToString::to_string)
                .collect::<Vec<_>>()
                .join(",")
        };
        let mut out = vec![format!("scenario={}", self.scenario)];
        for key in self.scenario.keys() {
            let value = match *key {
                "n" => join(&self.n),
                "m" => join(&self.orders),
                "u_min" => fmt_float(self.u_min),
                "u_max" => fmt_float(self.u_max),
                "u_points" => self.u_points.to_string(),
                "t_max" => fmt_float(self.t_max),
                "t_points" => self.t_points.to_string(),
                "tol" => fmt_float(self.tol),
                "n_b" => match self.n_b {
                    Some(v) => v.to_string(),
                    None => continue,
                },
                "k" => match self.k {
                    Some(v) => v.to_string(),
                    None => continue,
                },
                _ => unreachable!(),
            };
            out.push(format!("{key}={value}"));
        }
        out
    }
}

/// `"70,80,90"` or an inclusive range `"1..6"`, or a mix of both.
pub fn parse_usize_list(s: &str) -> Result<Vec<usize>> {
    let mut out = Vec::new();
    for part in s.split(',').map(str::trim).filter(|p| !p.is_empty()) {
        if let Some((a, b)) = part.split_once("..") {
            let (a, b): (usize, usize) = (a.trim().parse()?, b.trim().parse()?);
            if a > b {
                bail!("empty range {part}");
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse()?);
        }
    }
    Ok(out)
}

/// Parses a `key=value` config file. Blank lines and `#` comments are
/// skipped.
pub fn parse_config_text(text: &str) -> Result<Vec<(String, String)>> {
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| anyhow!("line {}: expected key=value, got `{line}`", lineno + 1))?;
        pairs.push((k.trim().to_string(), v.trim().to_string()));
    }
    Ok(pairs)
}

/// Shortest round-trip digits; scientific notation outside `[1e-4, 1e16)`.
pub fn fmt_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || !a.is_finite() || (1e-4..1e16).contains(&a) {
        x.to_string()
    } else {
        format!("{x:e}")
    }
}

fn fmt_bool(b: bool) -> &'static str {
    if b {
        "true"
    } else {
        "false"
    }
}

/// Comment block (version, config echo, per-row failures), header, rows.
fn csv_text(
    cfg: &SweepConfig,
    failures: &[String],
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<String> {
    let mut buf = format!("# bosonic-bell {VERSION}\n");
    for line in cfg.echo().iter().chain(failures) {
        buf.push_str("# ");
        buf.push_str(line);
        buf.push('\n');
    }
    let mut w = csv::Writer::from_writer(buf.into_bytes());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    let bytes = w
        .into_inner()
        .map_err(|e| anyhow!("csv buffer: {}", e.error()))?;
    Ok(String::from_utf8(bytes)?)
}

fn report_fields(lead: String, r: &CorrelatorReport) -> Vec<String> {
    vec![
        lead,
        r.order_m.to_string(),
        fmt_float(r.log_correlator.log_magnitude()),
        fmt_float(r.log_bound),
        fmt_float(r.ratio()),
        fmt_bool(r.violates_bell).to_string(),
    ]
}

/// Ground state solved once per `U` and reused for every order.
pub fn run_bec_scan(cfg: &SweepConfig) -> Result<String> {
    let n = cfg.n[0];
    let per_u: Vec<Vec<Vec<String>>> = cfg
        .u_grid()
        .into_par_iter()
        .map(|u| {
            let h = hamiltonian::build_bose_hubbard(n, u)?;
            let g = hamiltonian::ground_state(&h, cfg.tol)
                .with_context(|| format!("ground state failed at U = {u}"))?;
            cfg.orders
                .iter()
                .map(|&m| {
                    Ok(report_fields(
                        fmt_float(u),
                        &bell::correlator_single(&g.state, m)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<_> = per_u.into_iter().flatten().collect();
    csv_text(
        cfg,
        &[],
        &["U", "m", "log_correlator", "log_bound", "ratio", "violates"],
        &rows,
    )
}

/// Rows whose bound series fails are dropped and listed as comments.
pub fn run_spdc_full(cfg: &SweepConfig) -> Result<String> {
    let points: Vec<(f64, usize)> = cfg
        .t_grid()
        .into_iter()
        .flat_map(|t| cfg.orders.iter().map(move |&m| (t, m)))
        .collect();
    let results: Vec<_> = points
        .par_iter()
        .map(|&(t, m)| spdc::full_state_report(t, m, cfg.tol))
        .collect();
    let mut rows = Vec::new();
    let mut failures = Vec::new();
    for ((t, m), res) in points.iter().zip(results) {
        match res {
            Ok(r) => rows.push(report_fields(fmt_float(*t), &r)),
            Err(e) => failures.push(format!("error t={t} m={m}: {e}")),
        }
    }
    csv_text(
        cfg,
        &failures,
        &["t", "m", "log_correlator", "log_bound", "ratio", "violates"],
        &rows,
    )
}

pub fn run_spdc_fixed_n(cfg: &SweepConfig) -> Result<String> {
    let per_n: Vec<Vec<Vec<String>>> = cfg
        .n
        .par_iter()
        .map(|&n| {
            let state = spdc::fixed_n_state(n)?;
            (1..=n)
                .map(|m| {
                    let r = spdc::fixed_n_correlator(&state, m)?;
                    Ok(vec![
                        n.to_string(),
                        m.to_string(),
                        fmt_float(r.ratio()),
                        fmt_bool(r.violates_bell).to_string(),
                    ])
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let rows: Vec<_> = per_n.into_iter().flatten().collect();
    csv_text(cfg, &[], &["N", "m", "ratio", "violates"], &rows)
}

pub fn run_lhv_check(cfg: &SweepConfig) -> Result<String> {
    let m = cfg.orders[0];
    let s = lhv::brute_force_search(m)?;
    Ok(format!(
        "parties: {m}\nstrategies: {}\nmaximum: {}\nbound: {}\nstrategies at maximum: {}\nbound attained: {}\n",
        s.vertices,
        s.max_value(),
        0.5f64.powi(m as i32),
        s.vertices_at_max,
        if s.bound_attained() { "yes" } else { "no" },
    ))
}

pub fn run_expand(cfg: &SweepConfig) -> Result<String> {
    let words = bell::expand_plus_power(cfg.orders[0])?;
    Ok(words.iter().map(|w| format!("{w}\n")).collect())
}

/// `10^x` as `d.dddddddddddde±k`, valid far beyond the `f64` range.
pub fn format_log10(log10: f64) -> String {
    if !log10.is_finite() {
        return if log10 < 0.0 {
            "0".into()
        } else {
            log10.to_string()
        };
    }
    let mut exponent = log10.floor();
    let mut mantissa = 10f64.powf(log10 - exponent);
    if mantissa >= 9.999_999_999_999_5 {
        mantissa /= 10.0;
        exponent += 1.0;
    }
    format!("{mantissa:.12}e{exponent}")
}

pub fn run_bound_query(cfg: &SweepConfig) -> Result<String> {
    let (n, m) = (cfg.n[0], cfg.orders[0]);
    let log_bound = match cfg.k {
        Some(k) => bell::bound_two_region_log(n, cfg.n_b.unwrap_or(n), m, k)?,
        None => bell::bound_single_log(n, m)?,
    };
    Ok(format!(
        "log_bound: {}\nbound: {}\n",
        fmt_float(log_bound),
        format_log10(log_bound / std::f64::consts::LN_10)
    ))
}

pub fn run(cfg: &SweepConfig) -> Result<String> {
    match cfg.scenario {
        Scenario::BecScan => run_bec_scan(cfg),
        Scenario::SpdcFull => run_spdc_full(cfg),
        Scenario::SpdcFixedN => run_spdc_fixed_n(cfg),
        Scenario::LhvCheck => run_lhv_check(cfg),
        Scenario::Expand => run_expand(cfg),
        Scenario::BoundQuery => run_bound_query(cfg),
    }
}
