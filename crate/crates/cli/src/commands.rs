//! Subcommands. Each one validates its whole configuration and reads its
//! inputs before anything is written to the output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::sync::Arc;

use nsh_core::equilibria::{
    constant_solutions, second_variation_at_constant, thresholds, SobolevConstants, SobolevOptions,
};
use nsh_core::functionals::{ridge_energy_formula, FibrationDiagnostics, Moments};
use nsh_core::io::{read_field, Repr};
use nsh_core::lattice::{distinctness_condition, lattice_same, ExactMatrix, LatticeSpec};
use nsh_core::nehari::{
    bump_energy_bound, classify_starts, minimize_ridge_with, verify_solution, IrreducibilityOptions,
    NehariOptions, NehariResult, SobolevValues,
};
use nsh_core::tiling::{residual_box, residual_entire, tiling_report, ResidualReport};
use nsh_core::{Basis, DomainKind, NshError, Params, SpectralField};
use serde_json::{json, Value};

use crate::config::{BetaSpec, RunConfig};
use crate::json::float;
use crate::{json, pgm, CliError, Outcome, EMPTY_MESSAGE, EXIT_EMPTY, EXIT_NOT_CONVERGED, EXIT_OK, TOOL_NAME, VERSION};

pub fn tool() -> Value {
    json!({ "name": TOOL_NAME, "version": VERSION })
}

/// Files collected in memory and written together once computation is done.
#[derive(Default)]
struct Artifacts {
    files: Vec<(String, String)>,
}

impl Artifacts {
    fn add(&mut self, name: &str, body: String) {
        self.files.push((name.to_string(), body));
    }

    fn write(&self, dir: &Path) -> Result<Vec<PathBuf>, CliError> {
        std::fs::create_dir_all(dir)?;
        self.files
            .iter()
            .map(|(name, body)| {
                let path = dir.join(name);
                std::fs::write(&path, body)?;
                Ok(path)
            })
            .collect()
    }
}

fn sobolev_options(cfg: &RunConfig) -> SobolevOptions {
    SobolevOptions {
        random_starts: cfg.sobolev_starts,
        seed: cfg.seed,
        ..SobolevOptions::default()
    }
}

/// The Sobolev constants depend on `α` only; `β` is a placeholder here.
fn alpha_params(alpha: f64) -> Result<Params, CliError> {
    Ok(Params::new(alpha, 1.0)?)
}

fn sobolev_values(sc: &SobolevConstants) -> SobolevValues {
    SobolevValues {
        s2: sc.s2.value,
        s3: sc.s3.value,
        s4: sc.s4.value,
    }
}

fn constants_json(sc: &SobolevConstants, alpha: &Params) -> Value {
    json!({
        "S2": sc.s2.value,
        "S3": sc.s3.value,
        "S4": sc.s4.value,
        "beta0": sc.beta0(alpha),
        "beta_nehari_empty": 2.0 * sc.s2.value,
        "estimates": sc,
    })
}

fn params_for(cfg: &RunConfig, basis: &Arc<Basis>) -> Result<(Params, Option<SobolevConstants>), CliError> {
    let alpha = cfg.require_alpha()?;
    let spec = cfg.require_beta()?;
    let pa = alpha_params(alpha)?;
    if spec.needs_constants() {
        let sc = SobolevConstants::compute(basis, &pa, &sobolev_options(cfg))?;
        let beta = spec.resolve(sc.s2.value, sc.beta0(&pa));
        Ok((Params::new(alpha, beta)?, Some(sc)))
    } else {
        Ok((Params::new(alpha, spec.resolve(0.0, 0.0))?, None))
    }
}

fn load_field(cfg: &RunConfig) -> Result<SpectralField, CliError> {
    let path = cfg.require_field()?;
    read_field(path).map_err(|e| CliError::Validation(format!("{}: {e}", path.display())))
}

fn residual_of(u: &SpectralField, p: &Params) -> Result<ResidualReport, CliError> {
    Ok(match u.domain().kind() {
        DomainKind::NeumannBox => residual_box(u, p)?,
        DomainKind::SkewTorus => residual_entire(u, p)?,
    })
}

fn finish(cfg: &RunConfig, artifacts: Artifacts, report: &Value, exit_code: i32, message: Option<String>) -> Result<Outcome, CliError> {
    artifacts.write(&cfg.out)?;
    Ok(Outcome {
        exit_code,
        report: json::to_string(report),
        message,
    })
}

pub fn cmd_constants(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let alpha = cfg.require_alpha()?;
    let spec = cfg.require_beta()?;
    let pa = alpha_params(alpha)?;
    let threshold = pa.constant_threshold();
    let refuse = |beta: f64| {
        CliError::Validation(format!(
            "β ≤ 2√(1−α): no constant solutions for beta = {beta} (threshold {threshold})"
        ))
    };
    if let BetaSpec::Value(b) = spec {
        if b <= threshold {
            return Err(refuse(b));
        }
    }
    let (thr, sc) = thresholds(&pa, &cfg.domain, cfg.modes, &cfg.sweep, &sobolev_options(cfg))?;
    let beta = spec.resolve(sc.s2.value, sc.beta0(&pa));
    if beta <= threshold {
        return Err(refuse(beta));
    }
    let p = Params::new(alpha, beta)?;
    let cs = constant_solutions(&p, &cfg.domain)?;
    let basis = Basis::new(cfg.domain.clone(), cfg.modes)?;
    let one = SpectralField::constant(basis, 1.0);
    let report = json!({
        "tool": tool(),
        "command": "constants",
        "config": cfg.echo(),
        "alpha": alpha,
        "beta": beta,
        "constant_solutions": cs,
        "second_variation_constant_direction": {
            "c_minus": second_variation_at_constant(&p, cs.c_minus, &one),
            "c_plus": second_variation_at_constant(&p, cs.c_plus, &one),
        },
        "sobolev": constants_json(&sc, &pa),
        "thresholds": thr,
    });
    let mut art = Artifacts::default();
    art.add("constants.json", json::to_string(&report));
    finish(cfg, art, &report, EXIT_OK, None)
}

pub fn cmd_fibration(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let u = load_field(cfg)?;
    let (p, _) = params_for(cfg, u.basis())?;
    let diag = FibrationDiagnostics::of(&u, &p)?;
    let ridge = ridge_energy_formula(&u, &p).ok();
    let report = json!({
        "tool": tool(),
        "command": "fibration",
        "config": cfg.echo(),
        "alpha": p.alpha(),
        "beta": p.beta(),
        "moments": Moments::of(&u, &p),
        "fibration": diag,
        "ridge": ridge,
    });
    let mut art = Artifacts::default();
    art.add("fibration.json", json::to_string(&report));
    finish(cfg, art, &report, EXIT_OK, None)
}

/// Everything a ridge solve produces, before it is written anywhere.
pub struct SolveRun {
    pub params: Params,
    pub constants: SobolevConstants,
    pub bump_bound: Option<f64>,
    pub result: Result<NehariResult, NshError>,
    pub residual: Option<ResidualReport>,
    pub warnings: Vec<String>,
}

pub fn solve_on(cfg: &RunConfig, basis: &Arc<Basis>, spec: BetaSpec) -> Result<SolveRun, CliError> {
    let alpha = cfg.require_alpha()?;
    let pa = alpha_params(alpha)?;
    let sc = SobolevConstants::compute(basis, &pa, &sobolev_options(cfg))?;
    let beta = spec.resolve(sc.s2.value, sc.beta0(&pa));
    let p = Params::new(alpha, beta)?;
    let mut warnings = Vec::new();
    let [r, inner, outer] = cfg.bump;
    let bump_bound = match bump_energy_bound(basis, &p, r, inner, outer) {
        Ok(e) => Some(e),
        Err(e) => {
            warnings.push(format!("no plateau-bump bound: {e}"));
            None
        }
    };
    let opts = NehariOptions {
        starts: cfg.starts,
        seed: cfg.seed,
        sphere: cfg.sphere.clone(),
        extra_starts: if cfg.sobolev_start { vec![sc.s3.minimizer.clone()] } else { Vec::new() },
        h_tolerance: cfg.h_tolerance,
    };
    let irr = IrreducibilityOptions {
        bump_bound,
        profile_bandwidth: matches!(basis.domain().kind(), DomainKind::NeumannBox).then_some(cfg.modes),
    };
    let result = minimize_ridge_with(basis, &p, &opts, Some(&sobolev_values(&sc)), &irr);
    let result = match result {
        Err(e @ NshError::EmptyManifold { .. }) => Err(e),
        Err(e) => return Err(e.into()),
        Ok(r) => Ok(r),
    };
    let residual = match &result {
        Ok(r) => Some(residual_of(&r.u, &p)?),
        Err(_) => None,
    };
    Ok(SolveRun {
        params: p,
        constants: sc,
        bump_bound,
        result,
        residual,
        warnings,
    })
}

fn iterations_csv(r: &NehariResult) -> String {
    let mut s = String::from("iter,value,residual,step\n");
    for h in &r.history {
        let _ = writeln!(s, "{},{},{},{}", h.iter, float(h.value), float(h.residual), float(h.step));
    }
    s
}

pub fn cmd_solve(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let spec = cfg.require_beta()?;
    cfg.require_alpha()?;
    let basis = Basis::new(cfg.domain.clone(), cfg.modes)?;
    let run = solve_on(cfg, &basis, spec)?;
    let p = run.params;
    let pa = alpha_params(p.alpha())?;
    let mut art = Artifacts::default();
    let base = |status: &str| {
        json!({
            "tool": tool(),
            "command": "solve",
            "config": cfg.echo(),
            "status": status,
            "alpha": p.alpha(),
            "beta": p.beta(),
            "constants": constants_json(&run.constants, &pa),
            "bump_bound": run.bump_bound,
            "warnings": run.warnings,
        })
    };
    match &run.result {
        Err(_) => {
            let opts = NehariOptions {
                starts: cfg.starts,
                seed: cfg.seed,
                ..NehariOptions::default()
            };
            let mut report = base("empty_manifold");
            report["starts"] = serde_json::to_value(classify_starts(&basis, &p, &opts)).unwrap();
            art.add("diagnostics.json", json::to_string(&report));
            finish(cfg, art, &report, EXIT_EMPTY, Some(EMPTY_MESSAGE.to_string()))
        }
        Ok(r) => {
            let status = if r.converged { "converged" } else { "not_converged" };
            let mut report = base(status);
            report["result"] = serde_json::to_value(r).unwrap();
            report["residual"] = serde_json::to_value(run.residual).unwrap();
            report["fibration"] = serde_json::to_value(FibrationDiagnostics::of(&r.u, &p)?).unwrap();
            art.add("field.csv", nsh_core::io::format_field(&r.u, Repr::Values));
            art.add("diagnostics.json", json::to_string(&report));
            art.add("iterations.csv", iterations_csv(r));
            if cfg.emit_pgm {
                if let Some(img) = pgm::render(&r.u) {
                    art.add("field.pgm", img);
                }
            }
            let (code, msg) = if r.converged {
                (EXIT_OK, None)
            } else {
                (EXIT_NOT_CONVERGED, Some("ridge minimization did not converge".to_string()))
            };
            finish(cfg, art, &report, code, msg)
        }
    }
}

pub const SWEEP_HEADER: &str =
    "R,volume,status,energy,E_c_minus,bump_bound,below_bump_bound,axis_dependence,S2,S3,S4,beta0,beta,gradient_residual,nehari_residual,H";

fn opt(x: Option<f64>) -> String {
    x.map(float).unwrap_or_default()
}

pub fn cmd_sweep(cfg: &RunConfig) -> Result<Outcome, CliError> {
    if cfg.sweep.is_empty() {
        return Err(CliError::Validation("sweep list is empty".into()));
    }
    let alpha = cfg.require_alpha()?;
    let mut spec = cfg.require_beta()?;
    let pa = alpha_params(alpha)?;
    if spec.needs_constants() {
        // a relative β is fixed once, on the configured domain
        let basis = Basis::new(cfg.domain.clone(), cfg.modes)?;
        let sc = SobolevConstants::compute(&basis, &pa, &sobolev_options(cfg))?;
        spec = BetaSpec::Value(spec.resolve(sc.s2.value, sc.beta0(&pa)));
    }
    let mut csv = String::from(SWEEP_HEADER);
    csv.push('\n');
    let mut rows = Vec::new();
    for &r in &cfg.sweep {
        let domain = cfg.domain.with_stretch(r)?;
        let volume = domain.volume();
        let row = Basis::new(domain, cfg.modes)
            .map_err(CliError::from)
            .and_then(|b| solve_on(cfg, &b, spec));
        let line = match row {
            Err(e) => format!("{},{},error: {},,,,,,,,,,,,,", float(r), float(volume), e.to_string().replace(',', ";")),
            Ok(run) => {
                let s = sobolev_values(&run.constants);
                let beta0 = run.constants.beta0(&pa);
                match &run.result {
                    Err(_) => format!(
                        "{},{},empty_manifold,,,{},,,{},{},{},{},{},,,",
                        float(r),
                        float(volume),
                        opt(run.bump_bound),
                        float(s.s2),
                        float(s.s3),
                        float(s.s4),
                        float(beta0),
                        float(run.params.beta())
                    ),
                    Ok(res) => {
                        let irr = &res.irreducibility;
                        let dep: Vec<String> = irr.axis_dependence.iter().map(|&d| float(d)).collect();
                        format!(
                            "{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
                            float(r),
                            float(volume),
                            if res.converged { "converged" } else { "not_converged" },
                            float(res.energy),
                            opt(irr.e_c_minus),
                            opt(run.bump_bound),
                            irr.below_bump_bound.map(|b| b.to_string()).unwrap_or_default(),
                            dep.join(";"),
                            float(s.s2),
                            float(s.s3),
                            float(s.s4),
                            float(beta0),
                            float(run.params.beta()),
                            float(res.gradient_residual),
                            float(res.nehari_residual),
                            float(res.h_value)
                        )
                    }
                }
            }
        };
        rows.push(line.clone());
        csv.push_str(&line);
        csv.push('\n');
    }
    let report = json!({
        "tool": tool(),
        "command": "sweep",
        "config": cfg.echo(),
        "columns": SWEEP_HEADER.split(',').collect::<Vec<_>>(),
        "rows": rows,
    });
    let mut art = Artifacts::default();
    art.add("sweep.csv", csv);
    finish(cfg, art, &report, EXIT_OK, None)
}

pub fn cmd_tile(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let u = load_field(cfg)?;
    if u.domain().kind() != DomainKind::NeumannBox {
        return Err(CliError::Validation("tile needs a box field; tori are already periodic".into()));
    }
    let counts = cfg.counts.clone().unwrap_or_else(|| vec![2; u.domain().dim()]);
    let (p, _) = params_for(cfg, u.basis())?;
    let (tiling, cell, report) = tiling_report(&u, &p, &counts)?;
    let period: Vec<f64> = u.domain().lengths().unwrap().iter().map(|l| 2.0 * l).collect();
    let out = json!({
        "tool": tool(),
        "command": "tile",
        "config": cfg.echo(),
        "alpha": p.alpha(),
        "beta": p.beta(),
        "report": report,
        "period_cell": {
            "generators": period.iter().enumerate().map(|(i, &l)| {
                (0..period.len()).map(|j| if i == j { l } else { 0.0 }).collect::<Vec<_>>()
            }).collect::<Vec<_>>(),
            "file": "cell.csv",
        },
        "tiled": { "lengths": tiling.assembled.domain().lengths(), "file": "tiled.csv" },
    });
    let mut art = Artifacts::default();
    art.add("tiled.csv", nsh_core::io::format_field(&tiling.assembled, Repr::Values));
    art.add("cell.csv", nsh_core::io::format_field(&cell, Repr::Values));
    art.add("tiling.json", json::to_string(&out));
    if cfg.emit_pgm {
        if let Some(img) = pgm::render(&tiling.assembled) {
            art.add("tiled.pgm", img);
        }
    }
    finish(cfg, art, &out, EXIT_OK, None)
}

fn matrix_arg(s: &str, what: &str) -> Result<ExactMatrix, CliError> {
    ExactMatrix::parse(s).map_err(|e| CliError::Validation(format!("{what}: {e}")))
}

pub fn cmd_lattice(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let (m, from, to) = match (&cfg.matrix, &cfg.from, &cfg.to) {
        (Some(m), None, None) => (matrix_arg(m, "matrix")?, None, None),
        (None, Some(a), Some(b)) => {
            let ha = LatticeSpec::new(matrix_arg(a, "from")?)?;
            let hb = LatticeSpec::new(matrix_arg(b, "to")?)?;
            if ha.generators().dim() != hb.generators().dim() {
                return Err(CliError::Validation("from and to have different dimensions".into()));
            }
            (ha.transition_to(&hb)?, Some(a.clone()), Some(b.clone()))
        }
        _ => return Err(CliError::Validation("lattice needs --matrix, or both --from and --to".into())),
    };
    let det = m.det()?;
    if det.is_zero() {
        return Err(CliError::Validation("transition matrix is singular".into()));
    }
    let (same, same_err) = match lattice_same(&m) {
        Ok(b) => (Some(b), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let report = json!({
        "tool": tool(),
        "command": "lattice",
        "from": from,
        "to": to,
        "matrix": m.to_string(),
        "determinant": det.to_string(),
        "rational": m.is_rational(),
        "same_lattice": same,
        "same_lattice_error": same_err,
        "distinctness": distinctness_condition(&m),
    });
    let mut art = Artifacts::default();
    art.add("lattice.json", json::to_string(&report));
    finish(cfg, art, &report, EXIT_OK, None)
}

pub fn cmd_verify(cfg: &RunConfig) -> Result<Outcome, CliError> {
    let u = load_field(cfg)?;
    let alpha = cfg.require_alpha()?;
    let spec = cfg.require_beta()?;
    let pa = alpha_params(alpha)?;
    let sc = SobolevConstants::compute(u.basis(), &pa, &sobolev_options(cfg))?;
    let p = Params::new(alpha, spec.resolve(sc.s2.value, sc.beta0(&pa)))?;
    let fib = FibrationDiagnostics::of(&u, &p)?;
    let ineq = verify_solution(&u, &p, Some(&sobolev_values(&sc)), cfg.h_tolerance);
    let m = Moments::of(&u, &p);
    let gradient_residual = nsh_core::functionals::relative_gradient_residual(&u, &p);
    let residual = residual_of(&u, &p)?;
    let mut failed: Vec<String> = ineq.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect();
    if gradient_residual > cfg.sphere.residual_tol {
        failed.push("gradient_residual".into());
    }
    let report = json!({
        "tool": tool(),
        "command": "verify",
        "config": cfg.echo(),
        "alpha": alpha,
        "beta": p.beta(),
        "constants": constants_json(&sc, &pa),
        "energy": m.energy(&p),
        "Q": m.q,
        "L": m.l_value(&p),
        "H": m.h_value(&p),
        "gradient_residual": gradient_residual,
        "residual": residual,
        "fibration": fib,
        "inequalities": ineq,
        "failed": failed,
        "passed": failed.is_empty(),
    });
    let mut art = Artifacts::default();
    art.add("verify.json", json::to_string(&report));
    let (code, msg) = if failed.is_empty() {
        (EXIT_OK, None)
    } else {
        (EXIT_NOT_CONVERGED, Some(format!("verification failed: {}", failed.join(", "))))
    };
    finish(cfg, art, &report, code, msg)
}
