//! Staged run: radial → perturbation → 2D solve → critical points → verification.

use std::fmt::Write as _;
use std::time::Instant;

use halftorus::linalg::InverseIterOptions;
use halftorus::morse::{
    check_theta_profile, find_critical_points, theta_derivative_profile, verify_theorem, CriticalSearch, MorseOptions,
    VerifyOptions,
};
use halftorus::perturbation::{
    bn_min_scan, first_order_check, min_mode_threshold, solve_mode_bvp, BandOrdering, BvpOptions, C1_TOLERANCE,
};
use halftorus::radial::{solve_radial, RadialEigenpair};
use halftorus::spectral2d::solve_principal_2d;
use halftorus::{CriticalSet, EigenSolveResult, Execution, Grid2D, PerturbationField, RadialGrid, TorusShape};

use crate::config::RunConfig;
use crate::error::{CliError, CliResult};
use crate::output::{field_matrix, gnuplot_triples, num, Csv, OutDir};

/// Last stage a subcommand runs; every earlier stage runs too.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    Radial,
    Perturb,
    Solve2D,
    Critical,
    Verify,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Radial => "radial",
            Stage::Perturb => "perturb",
            Stage::Solve2D => "solve2d",
            Stage::Critical => "critical",
            Stage::Verify => "verify",
        }
    }
}

/// One verdict line.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub measured: String,
}

/// Deterministic run report; timing is kept separately.
#[derive(Clone, Debug, Default)]
pub struct VerificationReport {
    pub provenance: Vec<(String, String)>,
    pub sections: Vec<(String, Vec<(String, String)>)>,
    pub checks: Vec<Check>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failed_checks(&self) -> Vec<&Check> {
        self.checks.iter().filter(|c| !c.pass).collect()
    }

    fn check(&mut self, name: &str, pass: bool, measured: String) {
        self.checks.push(Check {
            name: name.to_string(),
            pass,
            measured,
        });
    }

    fn section(&mut self, name: &str, entries: Vec<(&str, String)>) {
        self.sections.push((
            name.to_string(),
            entries.into_iter().map(|(k, v)| (k.to_string(), v)).collect(),
        ));
    }

    pub fn render(&self) -> String {
        let mut s = String::from("halftorus verification report\n\n[provenance]\n");
        for (k, v) in &self.provenance {
            let _ = writeln!(s, "{k} = {v}");
        }
        for (name, entries) in &self.sections {
            let _ = writeln!(s, "\n[{name}]");
            for (k, v) in entries {
                let _ = writeln!(s, "{k} = {v}");
            }
        }
        s.push_str("\n[verdict]\n");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{} {} : {}",
                if c.pass { "PASS" } else { "FAIL" },
                c.name,
                c.measured
            );
        }
        let _ = writeln!(s, "overall = {}", if self.passed() { "PASS" } else { "FAIL" });
        s
    }
}

/// Wall-clock time per stage.
#[derive(Clone, Debug, Default)]
pub struct Timing(pub Vec<(&'static str, f64)>);

impl Timing {
    pub fn render(&self) -> String {
        let mut s = String::new();
        for (k, v) in &self.0 {
            let _ = writeln!(s, "{k} {v:.6}");
        }
        s
    }
}

/// Everything a finished pipeline produced in memory.
pub struct PipelineOutput {
    pub report: VerificationReport,
    pub timing: Timing,
    pub pair: RadialEigenpair,
    pub nmin: u32,
    pub mode: u32,
    pub field: Option<PerturbationField>,
    pub solve: Option<EigenSolveResult>,
    pub critical: Option<CriticalSearch>,
}

pub fn eigen_options(cfg: &RunConfig, exec: Execution) -> InverseIterOptions {
    InverseIterOptions {
        tol: cfg.tol,
        max_iter: cfg.maxit,
        exec,
        ..Default::default()
    }
}

fn bvp_options(cfg: &RunConfig) -> BvpOptions {
    BvpOptions {
        experimental_below_threshold: cfg.experimental_below_threshold,
        ..Default::default()
    }
}

pub fn radial_pair(cfg: &RunConfig, exec: Execution) -> CliResult<RadialEigenpair> {
    let base = TorusShape::unperturbed(cfg.major_radius, cfg.minor_radius).map_err(CliError::stage("radial"))?;
    let grid = RadialGrid::new(cfg.nphi).map_err(CliError::stage("radial"))?;
    solve_radial(&base, &grid, &eigen_options(cfg, exec)).map_err(CliError::stage("radial"))
}

pub fn grid_2d(cfg: &RunConfig, n: u32) -> CliResult<Grid2D> {
    Grid2D::new(cfg.nphi, cfg.ntheta.unwrap_or_else(|| Grid2D::auto_ntheta(n))).map_err(CliError::stage("solve2d"))
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Runs every stage up to `upto`, writing artifacts into `out`.
pub fn run_stages(cfg: &RunConfig, upto: Stage, out: &mut OutDir, command: &str) -> CliResult<PipelineOutput> {
    cfg.validate()?;
    let exec = Execution::default();
    let mut report = VerificationReport::default();
    let mut timing = Timing::default();
    report.provenance = vec![
        ("command".into(), command.to_string()),
        ("config_hash".into(), cfg.hash()),
        ("version".into(), env!("CARGO_PKG_VERSION").to_string()),
    ];
    out.write("config.resolved.txt", &cfg.canonical())?;

    // radial
    let t = Instant::now();
    let pair = radial_pair(cfg, exec)?;
    let nmin = min_mode_threshold(&pair.shape, pair.lambda1).map_err(CliError::stage("radial"))?;
    let n = cfg.n.resolve(nmin);
    let shape = TorusShape::new(cfg.major_radius, cfg.minor_radius, cfg.eps, n).map_err(CliError::stage("radial"))?;
    report.provenance.push(("mode".into(), format!("{n} (from {})", cfg.n)));
    report.provenance.push(("nphi".into(), cfg.nphi.to_string()));
    report.section(
        "radial",
        vec![
            ("lambda1", num(pair.lambda1)),
            ("phi_star", num(pair.phi_star)),
            ("uprime0", num(pair.uprime0)),
            ("uprime_pi", num(pair.uprime_pi)),
            ("nmin", nmin.to_string()),
            ("residual", num(pair.residual)),
            ("iterations", pair.iterations.to_string()),
        ],
    );
    let norm = pair.surface_norm_sq();
    report.check(
        "radial_normalization",
        (norm - 1.0).abs() <= 1e-12,
        format!("|U|^2 = {}", num(norm)),
    );
    report.check(
        "radial_boundary_slopes",
        pair.uprime0 > 0.0 && pair.uprime_pi < 0.0,
        format!("U'(0) = {}, U'(pi) = {}", num(pair.uprime0), num(pair.uprime_pi)),
    );
    let flux = pair.fluxes();
    report.check(
        "radial_flux_monotone",
        flux.windows(2).all(|w| w[1] < w[0]),
        format!("{} faces", flux.len()),
    );
    let spline = pair.spline();
    let mut csv = Csv::new(&["phi", "U", "dU"]);
    for i in 0..pair.grid.nodes() {
        csv.row(&[num(pair.grid.phi(i)), num(pair.values[i]), num(spline.slopes()[i])]);
    }
    out.write("radial.csv", &csv.into_string())?;
    timing.0.push(("radial", t.elapsed().as_secs_f64()));

    let mut output = PipelineOutput {
        report,
        timing,
        pair,
        nmin,
        mode: n,
        field: None,
        solve: None,
        critical: None,
    };
    if upto == Stage::Radial {
        return Ok(output);
    }

    // perturbation
    let t = Instant::now();
    let pair = &output.pair;
    let below = n < nmin;
    let field = PerturbationField::new(pair, n, &bvp_options(cfg)).map_err(CliError::stage("perturb"))?;
    let c1 = solve_mode_bvp(pair, n, &vec![0.0; pair.grid.nodes()], BandOrdering::Forward)
        .map_err(CliError::stage("perturb"))?;
    let c1_norm = max_abs(&c1.values);
    let bn_min = bn_min_scan(&pair.shape, pair.lambda1, n, 10_000);
    let c2_star = field.c2_at(pair.phi_star);
    let a_max = max_abs(&field.a);
    output.report.section(
        "perturbation",
        vec![
            ("mode", n.to_string()),
            ("below_threshold", below.to_string()),
            ("c2_at_phi_star", num(c2_star)),
            ("c2_max", num(max_abs(&field.c2))),
            ("c2_residual", num(field.c2_residual)),
            ("bn_min", num(bn_min)),
            ("c1_norm", num(c1_norm)),
            ("c_analytic", num(0.0)),
        ],
    );
    if below {
        output.report.section(
            "experimental",
            vec![(
                "note",
                format!("n = {n} is below Nmin = {nmin}; perturbation checks are not applied"),
            )],
        );
    } else {
        output
            .report
            .check("bn_positive", bn_min > 0.0, format!("min B_n = {}", num(bn_min)));
        output.report.check(
            "c2_positive_at_phi_star",
            c2_star > 0.0,
            format!("C2(phi*) = {}", num(c2_star)),
        );
        output.report.check(
            "c2_residual",
            field.c2_residual <= 1e-6 * a_max,
            format!("{} <= 1e-6 * {}", num(field.c2_residual), num(a_max)),
        );
        output
            .report
            .check("c1_zero", c1_norm <= C1_TOLERANCE, format!("|C1| = {}", num(c1_norm)));
    }
    let mut csv = Csv::new(&["phi", "U", "C2", "A", "Bn"]);
    for i in 0..pair.grid.nodes() {
        csv.row(&[
            num(pair.grid.phi(i)),
            num(pair.values[i]),
            num(field.c2[i]),
            num(field.a[i]),
            num(field.bn[i]),
        ]);
    }
    out.write("c2.csv", &csv.into_string())?;
    output.timing.0.push(("perturb", t.elapsed().as_secs_f64()));
    output.field = Some(field);
    if upto == Stage::Perturb {
        return Ok(output);
    }

    // 2D solve
    let t = Instant::now();
    let grid = grid_2d(cfg, n)?;
    let solve = solve_principal_2d(&shape, &grid, &eigen_options(cfg, exec)).map_err(CliError::stage("solve2d"))?;
    output
        .report
        .provenance
        .push(("ntheta".into(), grid.ntheta().to_string()));
    output.report.provenance.push(("tol".into(), num(cfg.tol)));
    let mut entries = vec![
        ("lambda1_eps", num(solve.lambda1_eps)),
        ("lambda1_shift", num(solve.lambda1_eps - output.pair.lambda1)),
        ("residual", num(solve.residual)),
        ("iterations", solve.iterations.to_string()),
        ("symmetric_grid", grid.resolves_symmetry(n).to_string()),
    ];
    let snorm = solve.surface_norm_sq();
    output.report.check(
        "field_normalization",
        (snorm - 1.0).abs() <= 1e-12,
        format!("|u|^2 = {}", num(snorm)),
    );
    if shape.eps() != 0.0 {
        let chk = first_order_check(&output.pair, output.field.as_ref().expect("perturbation ran"), &solve)
            .map_err(CliError::stage("solve2d"))?;
        entries.push(("first_order_error", num(chk.field_error)));
        entries.push(("sin_component_error", num(chk.sin_error)));
        entries.push(("cos_component_max", num(chk.cos_magnitude)));
        entries.push(("c_empirical", num(chk.c.empirical)));
        if grid.resolves_symmetry(n) {
            let dr = solve.reflected().max_abs_diff(&solve.field);
            output
                .report
                .check("reflection_symmetry", dr <= 1e-10, format!("max diff = {}", num(dr)));
        }
    }
    output.report.section("solve2d", entries);
    out.write("field.txt", &field_matrix(&grid, &solve.field))?;
    out.write("field_gnuplot.dat", &gnuplot_triples(&grid, &solve.field))?;
    output.timing.0.push(("solve2d", t.elapsed().as_secs_f64()));
    output.solve = Some(solve);
    if upto == Stage::Solve2D {
        return Ok(output);
    }

    // critical points
    let t = Instant::now();
    let solve = output.solve.as_ref().expect("2D solve ran");
    let search = find_critical_points(solve, &MorseOptions::default()).map_err(CliError::stage("critical"))?;
    let mut csv = Csv::new(&[
        "phi",
        "theta",
        "kind",
        "value",
        "grad_norm",
        "u_phiphi",
        "u_phitheta",
        "u_thetatheta",
    ]);
    match &search.set {
        CriticalSet::Circle { phi, fourier_power } => {
            output.report.section(
                "critical",
                vec![
                    ("kind", "circle".to_string()),
                    ("phi", num(*phi)),
                    ("fourier_power", num(*fourier_power)),
                ],
            );
            let d = (phi - output.pair.phi_star).abs();
            output.report.check(
                "critical_circle",
                shape.eps() == 0.0 && d <= cfg.tol_phi_band && *fourier_power < 1e-10,
                format!("|phi - phi*| = {}, power = {}", num(d), num(*fourier_power)),
            );
        }
        CriticalSet::Isolated(points) => {
            for p in points {
                csv.row(&[
                    num(p.phi),
                    num(p.theta),
                    p.kind.as_str().to_string(),
                    num(p.value),
                    num(p.grad_norm),
                    num(p.hessian[0][0]),
                    num(p.hessian[0][1]),
                    num(p.hessian[1][1]),
                ]);
            }
            output.report.section(
                "critical",
                vec![
                    ("kind", "isolated".to_string()),
                    ("count", points.len().to_string()),
                    ("candidates", search.candidates.to_string()),
                    ("dropped", search.dropped.to_string()),
                ],
            );
            if shape.eps() == 0.0 {
                output.report.check(
                    "critical_circle",
                    false,
                    format!("{} isolated points on an axisymmetric surface", points.len()),
                );
            }
        }
    }
    out.write("critical_points.csv", &csv.into_string())?;
    output.timing.0.push(("critical", t.elapsed().as_secs_f64()));
    output.critical = Some(search);
    if upto == Stage::Critical {
        return Ok(output);
    }

    // verification
    let t = Instant::now();
    if shape.eps() != 0.0 {
        let points = output
            .critical
            .as_ref()
            .expect("critical points ran")
            .set
            .points()
            .to_vec();
        let opts = VerifyOptions {
            tol_theta: cfg.tol_theta,
            tol_phi_band: cfg.tol_phi_band,
            experimental_below_threshold: cfg.experimental_below_threshold,
        };
        let rep = verify_theorem(&points, shape.eps(), n, &output.pair, &opts).map_err(CliError::stage("verify"))?;
        let r = &mut output.report;
        r.check(
            "count",
            rep.count_ok,
            format!("{} points, expected {}", rep.points.len(), rep.expected_count),
        );
        r.check(
            "theta_locations",
            rep.location_ok,
            format!(
                "max deviation {} <= {}",
                num(rep.max_theta_deviation),
                num(rep.tol_theta)
            ),
        );
        r.check(
            "phi_band",
            rep.band_ok,
            format!(
                "max deviation {} <= {}",
                num(rep.max_phi_deviation),
                num(rep.tol_phi_band)
            ),
        );
        r.check(
            "alternation",
            rep.alternation_ok,
            format!("{} maxima, {} saddles", rep.maxima, rep.saddles),
        );
        r.check(
            "euler_characteristic",
            rep.euler_ok,
            format!("{} - {} = 0", rep.maxima, rep.saddles),
        );
        if !rep.failures.is_empty() {
            let entries = rep
                .failures
                .iter()
                .enumerate()
                .map(|(i, f)| (format!("failure_{i}"), f.clone()))
                .collect();
            r.sections.push(("verification_failures".to_string(), entries));
        }
        let solve = output.solve.as_ref().expect("2D solve ran");
        if solve.grid.resolves_symmetry(n) {
            let mut csv = Csv::new(&["k", "phi", "du_dtheta", "d2u_dtheta2"]);
            let mut first_ok = true;
            let mut sign_ok = true;
            let mut worst_first = 0.0f64;
            for k in 0..2 * n as usize {
                let chk = check_theta_profile(solve, k, output.pair.phi_star, cfg.band_delta)
                    .map_err(CliError::stage("verify"))?;
                first_ok &= chk.first_ok;
                sign_ok &= chk.sign_ok;
                worst_first = worst_first.max(chk.max_first / chk.first_bound);
                let prof = theta_derivative_profile(solve, k).map_err(CliError::stage("verify"))?;
                for i in 0..prof.phi.len() {
                    csv.row(&[k.to_string(), num(prof.phi[i]), num(prof.first[i]), num(prof.second[i])]);
                }
            }
            out.write("theta_profiles.csv", &csv.into_string())?;
            output.report.check(
                "theta_derivative_zero",
                first_ok,
                format!("max |du/dtheta| / bound = {}", num(worst_first)),
            );
            output.report.check(
                "theta_second_derivative_sign",
                sign_ok,
                format!("band |phi - phi*| <= {}", num(cfg.band_delta)),
            );
        }
    }
    output.timing.0.push(("verify", t.elapsed().as_secs_f64()));
    Ok(output)
}

/// Runs a subcommand end to end: artifacts, report, timing and failure marker.
pub fn run_pipeline(cfg: &RunConfig, upto: Stage) -> CliResult<VerificationReport> {
    cfg.validate()?;
    let mut out = OutDir::create(&cfg.out)?;
    match run_stages(cfg, upto, &mut out, upto.name()) {
        Ok(o) => {
            out.write("report.txt", &o.report.render())?;
            out.write("timing.txt", &o.timing.render())?;
            if o.report.passed() {
                Ok(o.report)
            } else {
                let names: Vec<String> = o.report.failed_checks().iter().map(|c| c.name.clone()).collect();
                let err = CliError::Theorem(names.join(", "));
                out.mark_failed(&err)?;
                Err(err)
            }
        }
        Err(e) => {
            out.mark_failed(&e)?;
            Err(e)
        }
    }
}
