//! Independent (ε, n) runs executed in parallel, summarised in one CSV.

use halftorus::morse::{find_critical_points, verify_theorem, MorseOptions, VerifyOptions};
use halftorus::perturbation::{determine_c, log_log_slope};
use halftorus::radial::RadialEigenpair;
use halftorus::spectral2d::solve_principal_2d;
use halftorus::{CriticalSet, Execution, TorusShape};

use crate::config::{ModeSpec, RunConfig};
use crate::error::{CliError, CliResult};
use crate::output::{num, Csv, OutDir};
use crate::pipeline::{eigen_options, grid_2d, radial_pair, Timing, VerificationReport};

/// One sweep member's result.
#[derive(Clone, Debug)]
pub struct SweepRow {
    pub eps: f64,
    pub n: u32,
    pub nphi: usize,
    pub ntheta: usize,
    pub tol: f64,
    pub lambda1_eps: f64,
    pub iterations: usize,
    pub residual: f64,
    pub count: usize,
    pub expected: usize,
    pub max_theta_dev: f64,
    pub max_phi_dev: f64,
    pub c_empirical: f64,
    pub verdict: &'static str,
    pub error: String,
    pub exit_code: u8,
    pub report: VerificationReport,
}

impl SweepRow {
    fn tag(&self) -> String {
        format!("n{}_eps{:e}", self.n, self.eps)
    }

    fn cells(&self) -> Vec<String> {
        vec![
            num(self.eps),
            self.n.to_string(),
            self.nphi.to_string(),
            self.ntheta.to_string(),
            num(self.tol),
            num(self.lambda1_eps),
            self.iterations.to_string(),
            num(self.residual),
            self.count.to_string(),
            self.expected.to_string(),
            num(self.max_theta_dev),
            num(self.max_phi_dev),
            num(self.c_empirical),
            self.verdict.to_string(),
            self.error.replace(',', ";"),
        ]
    }
}

const HEADER: [&str; 15] = [
    "eps",
    "n",
    "nphi",
    "ntheta",
    "tol",
    "lambda1_eps",
    "iterations",
    "residual",
    "count",
    "expected",
    "max_theta_dev",
    "max_phi_dev",
    "c_empirical",
    "verdict",
    "error",
];

fn run_member(cfg: &RunConfig, pair: &RadialEigenpair, eps: f64, n: u32) -> SweepRow {
    let mut row = SweepRow {
        eps,
        n,
        nphi: cfg.nphi,
        ntheta: cfg.ntheta.unwrap_or_else(|| halftorus::Grid2D::auto_ntheta(n)),
        tol: cfg.tol,
        lambda1_eps: f64::NAN,
        iterations: 0,
        residual: f64::NAN,
        count: 0,
        expected: 2 * n as usize,
        max_theta_dev: f64::NAN,
        max_phi_dev: f64::NAN,
        c_empirical: f64::NAN,
        verdict: "ERROR",
        error: String::new(),
        exit_code: 0,
        report: VerificationReport::default(),
    };
    if let Err(e) = member_body(cfg, pair, &mut row) {
        row.verdict = if e.exit_code() == 1 { "FAIL" } else { "ERROR" };
        row.error = e.to_string();
        row.exit_code = e.exit_code();
    }
    row
}

fn member_body(cfg: &RunConfig, pair: &RadialEigenpair, row: &mut SweepRow) -> CliResult<()> {
    let (eps, n) = (row.eps, row.n);
    let shape = TorusShape::new(cfg.major_radius, cfg.minor_radius, eps, n).map_err(CliError::stage("sweep"))?;
    let grid = grid_2d(cfg, n)?;
    let solve = solve_principal_2d(&shape, &grid, &eigen_options(cfg, Execution::Sequential))
        .map_err(CliError::stage("sweep"))?;
    row.lambda1_eps = solve.lambda1_eps;
    row.iterations = solve.iterations;
    row.residual = solve.residual;
    let morse = MorseOptions {
        exec: Execution::Sequential,
        ..Default::default()
    };
    let search = find_critical_points(&solve, &morse).map_err(CliError::stage("sweep"))?;
    let r = &mut row.report;
    r.provenance = vec![
        ("config_hash".into(), cfg.hash()),
        ("eps".into(), num(eps)),
        ("mode".into(), n.to_string()),
        ("nphi".into(), grid.nphi().to_string()),
        ("ntheta".into(), grid.ntheta().to_string()),
    ];
    r.sections.push((
        "solve2d".into(),
        vec![
            ("lambda1_eps".into(), num(solve.lambda1_eps)),
            ("residual".into(), num(solve.residual)),
            ("iterations".into(), solve.iterations.to_string()),
        ],
    ));
    if eps == 0.0 {
        row.expected = 0;
        let pass = match &search.set {
            CriticalSet::Circle { phi, .. } => {
                row.max_phi_dev = (phi - pair.phi_star).abs();
                row.max_phi_dev <= cfg.tol_phi_band
            }
            CriticalSet::Isolated(p) => {
                row.count = p.len();
                false
            }
        };
        r.checks.push(crate::pipeline::Check {
            name: "critical_circle".into(),
            pass,
            measured: format!("|phi - phi*| = {}", num(row.max_phi_dev)),
        });
    } else {
        let points = search.set.points().to_vec();
        row.count = points.len();
        let opts = VerifyOptions {
            tol_theta: cfg.tol_theta,
            tol_phi_band: cfg.tol_phi_band,
            experimental_below_threshold: cfg.experimental_below_threshold,
        };
        let rep = verify_theorem(&points, eps, n, pair, &opts).map_err(CliError::stage("sweep"))?;
        row.max_theta_dev = rep.max_theta_deviation;
        row.max_phi_dev = rep.max_phi_deviation;
        row.c_empirical = determine_c(pair, &solve).map_err(CliError::stage("sweep"))?.empirical;
        for (name, pass, measured) in [
            (
                "count",
                rep.count_ok,
                format!("{} of {}", row.count, rep.expected_count),
            ),
            ("theta_locations", rep.location_ok, num(rep.max_theta_deviation)),
            ("phi_band", rep.band_ok, num(rep.max_phi_deviation)),
            (
                "alternation",
                rep.alternation_ok,
                format!("{} maxima, {} saddles", rep.maxima, rep.saddles),
            ),
            (
                "euler_characteristic",
                rep.euler_ok,
                format!("{} - {}", rep.maxima, rep.saddles),
            ),
        ] {
            r.checks.push(crate::pipeline::Check {
                name: name.into(),
                pass,
                measured,
            });
        }
    }
    row.verdict = if row.report.passed() { "PASS" } else { "FAIL" };
    Ok(())
}

/// Largest swept `|ε|` such that the count is `2n` at it and at every
/// smaller swept amplitude. Empirical only.
pub fn empirical_eps2(rows: &[SweepRow], n: u32) -> Option<f64> {
    let mut amps: Vec<(f64, bool)> = rows
        .iter()
        .filter(|r| r.n == n && r.eps != 0.0)
        .map(|r| (r.eps.abs(), r.count == 2 * n as usize && r.error.is_empty()))
        .collect();
    amps.sort_by(|a, b| a.0.total_cmp(&b.0));
    amps.iter().take_while(|a| a.1).last().map(|a| a.0)
}

/// Summary of a finished sweep.
pub struct SweepOutcome {
    pub rows: Vec<SweepRow>,
    /// `(n, λ₁ at ε = 0, slope)` per mode.
    pub stationarity: Vec<(u32, f64, f64)>,
}

pub fn run_sweep(cfg: &RunConfig) -> CliResult<SweepOutcome> {
    cfg.validate()?;
    if cfg.eps_list.is_empty() {
        return Err(CliError::Config("sweep needs a non-empty eps_list".into()));
    }
    let mut out = OutDir::create(&cfg.out)?;
    let result = sweep_into(cfg, &mut out);
    if let Err(e) = &result {
        out.mark_failed(e)?;
    }
    result
}

fn sweep_into(cfg: &RunConfig, out: &mut OutDir) -> CliResult<SweepOutcome> {
    let exec = Execution::default();
    let mut timing = Timing::default();
    let t = std::time::Instant::now();
    out.write("config.resolved.txt", &cfg.canonical())?;
    let pair = radial_pair(cfg, exec)?;
    let nmin =
        halftorus::perturbation::min_mode_threshold(&pair.shape, pair.lambda1).map_err(CliError::stage("sweep"))?;
    let specs = if cfg.n_list.is_empty() {
        vec![cfg.n]
    } else {
        cfg.n_list.clone()
    };
    let mut modes: Vec<u32> = Vec::new();
    for n in specs.iter().map(|s: &ModeSpec| s.resolve(nmin)) {
        if !modes.contains(&n) {
            modes.push(n);
        }
    }
    let mut members = Vec::new();
    for &n in &modes {
        members.push((0.0, n, true));
        for &e in &cfg.eps_list {
            if e != 0.0 {
                members.push((e, n, false));
            }
        }
        if cfg.eps_list.contains(&0.0) {
            members.push((0.0, n, false));
        }
    }
    let results = exec.map(&members, |&(e, n, _)| run_member(cfg, &pair, e, n));

    let mut stationarity = Vec::new();
    let mut rows = Vec::new();
    let mut baselines = Vec::new();
    for (row, &(_, n, is_baseline)) in results.into_iter().zip(&members) {
        if is_baseline {
            baselines.push((n, row.lambda1_eps, row.error.clone()));
        } else {
            rows.push(row);
        }
    }
    for (n, lambda0, _) in &baselines {
        let (x, y): (Vec<f64>, Vec<f64>) = rows
            .iter()
            .filter(|r| r.n == *n && r.eps != 0.0 && r.lambda1_eps.is_finite())
            .map(|r| (r.eps, (r.lambda1_eps - lambda0).abs()))
            .unzip();
        let slope = if x.len() >= 2 { log_log_slope(&x, &y) } else { f64::NAN };
        stationarity.push((*n, *lambda0, slope));
    }

    let mut csv = Csv::new(&HEADER);
    for row in &rows {
        csv.row(&row.cells());
    }
    for &(n, lambda0, slope) in &stationarity {
        csv.comment(&format!(
            "stationarity n={n} lambda0={} slope={}",
            num(lambda0),
            num(slope)
        ));
    }
    for &n in &modes {
        let eps2 = empirical_eps2(&rows, n).map_or_else(|| "none".to_string(), num);
        csv.comment(&format!("empirical_eps2 n={n} eps={eps2}"));
    }
    out.write("sweep.csv", &csv.into_string())?;
    for row in &rows {
        out.write(&format!("runs/{}/report.txt", row.tag()), &row.report.render())?;
    }
    timing.0.push(("sweep", t.elapsed().as_secs_f64()));
    out.write("timing.txt", &timing.render())?;

    if let Some((n, _, msg)) = baselines.iter().find(|b| !b.2.is_empty()) {
        return Err(CliError::Member {
            tag: format!("n{n}_eps0"),
            code: 2,
            message: msg.clone(),
        });
    }
    if let Some(bad) = rows.iter().find(|r| r.verdict == "ERROR") {
        return Err(CliError::Member {
            tag: bad.tag(),
            code: bad.exit_code,
            message: bad.error.clone(),
        });
    }
    if let Some(bad) = rows.iter().find(|r| r.verdict == "FAIL") {
        return Err(CliError::Theorem(format!("sweep member {} failed", bad.tag())));
    }
    Ok(SweepOutcome { rows, stationarity })
}
