use std::fmt::Write as _;
use std::fs;
use std::io::Write as _;
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{Context, Result};
use bcs_gap::acceptance::{self, AcceptanceConfig};
use bcs_gap::asymptotics::{
    csv_row, predict_tc, predict_xi, SweepRecord, CSV_HEADER, CSV_SCHEMA_VERSION, THM1_TARGET, UNIVERSAL_RATIO,
};
use bcs_gap::fermi_ops::{b_mu, spectrum as fermi_spectrum, SphericalSpectrum};
use bcs_gap::gap_solver::solve_gap;
use bcs_gap::potential::{admissibility, AdmissibilityOptions, RadialPotential, Verdict};
use bcs_gap::sweep::run_point;
use bcs_gap::tc_solver::critical_temperature;
use rayon::prelude::*;
use serde::Serialize;

use crate::cache::{point_key, Cache};
use crate::config::{ConfigError, RunConfig};

/// Builds the potential; unreadable or malformed inputs are configuration
/// errors, an inadmissible table is a check failure.
fn potential(cfg: &RunConfig) -> Result<RadialPotential> {
    cfg.potential
        .build()
        .map_err(|e| match e.downcast_ref::<bcs_gap::Error>() {
            Some(bcs_gap::Error::Rejected(_)) => e,
            _ => ConfigError(e).into(),
        })
}

fn exit(ok: bool) -> ExitCode {
    if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

/// Runs `job` at every μ on the pool and returns results in μ order.
fn per_mu<T: Send>(cfg: &RunConfig, job: impl Fn(f64) -> T + Sync) -> Vec<(f64, T)> {
    cfg.mus
        .par_iter()
        .map(|&mu| {
            let start = Instant::now();
            let out = job(mu);
            log::info!("mu = {mu}: {:.2?}", start.elapsed());
            (mu, out)
        })
        .collect()
}

fn write_file(cfg: &RunConfig, name: &str, contents: &str) -> Result<()> {
    if let Some(dir) = &cfg.out {
        fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
        let path = dir.join(name);
        fs::write(&path, contents).with_context(|| format!("cannot write {}", path.display()))?;
        log::info!("wrote {}", path.display());
    }
    Ok(())
}

pub fn potential_info(cfg: &RunConfig) -> Result<ExitCode> {
    let v = potential(cfg)?;
    let mut opts = AdmissibilityOptions::new(cfg.admissibility_tol);
    opts.assume_rearrangement_condition = cfg.assume_rearrangement;
    let r = admissibility(&v, opts)?;
    println!(
        "potential: {} g = {} range = {}",
        v.kind().name(),
        v.coupling(),
        v.range()
    );
    println!("verdict: {}", r.verdict.name());
    println!("V^(0): {:.10e}", r.fourier_at_zero);
    println!(
        "V^ <= 0 on samples: {} (largest positive sample {:.3e})",
        r.fourier_nonpositive,
        r.worst_fourier_violation + 0.0
    );
    println!("L1 norm: {:.6e}", r.l1_norm);
    println!("L3/2 norm: {:.6e}", r.l32_norm);
    println!("|x|V L2 norm: {:.6e}", r.weighted_l2_norm);
    println!(
        "s* estimate: {:.4} (from above {:.4}, from below {:.4})",
        r.s_star_estimate, r.s_star_plus, r.s_star_minus
    );
    println!("sign dominance (heuristic): {}", r.sign_dominance_estimate);
    println!("rearrangement condition checked: {}", r.rearrangement_checked);
    for reason in &r.reasons {
        println!("note: {reason}");
    }
    Ok(exit(r.verdict != Verdict::Rejected))
}

pub fn spectrum(cfg: &RunConfig) -> Result<ExitCode> {
    let v = potential(cfg)?;
    let results = per_mu(cfg, |mu| -> Result<_> {
        let s = fermi_spectrum(&v, mu, cfg.l_max)?;
        let b = cfg
            .kappas
            .iter()
            .map(|&k| b_mu(&v, mu, k))
            .collect::<bcs_gap::Result<Vec<_>>>()?;
        Ok((s, b))
    });
    let target = SphericalSpectrum::trace_target(&v)?;
    let mut csv = String::from("mu,ell,eigenvalue\n");
    let mut ok = true;
    for (mu, r) in &results {
        match r {
            Ok((s, b)) => {
                println!("mu = {mu}");
                println!("  e_mu = {:.12e} at l = {}", s.e_mu, s.argmin);
                println!(
                    "  trace over l <= {}: {:.10e} (full trace {target:.10e})",
                    cfg.l_max, s.trace_partial
                );
                for d in b {
                    println!(
                        "  kappa = {}: <W> = {:.10e}, b = {:.10e}",
                        d.kappa, d.w_expect, d.b_mu_kappa
                    );
                }
                for (l, e) in s.eigenvalues.iter().enumerate() {
                    writeln!(csv, "{},{l},{}", fmt(*mu), fmt(*e))?;
                }
            }
            Err(e) => {
                ok = false;
                println!("mu = {mu}: failed: {e:#}");
            }
        }
    }
    write_file(cfg, "spectrum.csv", &csv)?;
    Ok(exit(ok))
}

fn fmt(x: f64) -> String {
    bcs_gap::asymptotics::format_float(x)
}

pub fn gap(cfg: &RunConfig) -> Result<ExitCode> {
    let v = potential(cfg)?;
    let results = per_mu(cfg, |mu| solve_gap(&v, mu, &cfg.gap));
    let mut csv = String::from("mu,p,delta\n");
    let mut ok = true;
    for (mu, r) in &results {
        match r {
            Ok(gap) => {
                let xi = gap.energy_gap();
                let d = gap.delta_fermi();
                let b0 = b_mu(&v, *mu, 0.0)?.b_mu_kappa;
                println!("mu = {mu}");
                println!("  Xi = {xi:.12e} (Xi/mu = {:.6e})", xi / mu);
                println!("  Delta(sqrt mu) = {d:.12e}");
                println!("  leading-order Xi = {:.6e}", predict_xi(*mu, b0)?.value);
                println!(
                    "  {} nodes, {} iterations, residual {:.2e}, certificate {:.2e}",
                    gap.grid().len(),
                    gap.iterations,
                    gap.residual,
                    gap.certificate()
                );
                for (p, delta) in gap.grid().p.iter().zip(gap.values()) {
                    writeln!(csv, "{},{},{}", fmt(*mu), fmt(*p), fmt(delta))?;
                }
            }
            Err(e) => {
                ok = false;
                println!("mu = {mu}: failed: {e}");
            }
        }
    }
    write_file(cfg, "gap_profile.csv", &csv)?;
    Ok(exit(ok))
}

pub fn tc(cfg: &RunConfig) -> Result<ExitCode> {
    let v = potential(cfg)?;
    let mut tc_cfg = cfg.tc;
    tc_cfg.grid = cfg.gap.grid;
    let results = per_mu(cfg, |mu| critical_temperature(&v, mu, &tc_cfg));
    let mut ok = true;
    for (mu, r) in &results {
        match r {
            Ok(t) => {
                let b0 = b_mu(&v, *mu, 0.0)?.b_mu_kappa;
                println!("mu = {mu}");
                println!("  T_c = {:.12e} (T_c/mu = {:.6e})", t.t_c, t.t_c / mu);
                println!("  leading-order T_c = {:.6e}", predict_tc(*mu, b0)?.value);
                println!(
                    "  lambda_max(T_c) = {:.12}, {} bisection steps",
                    t.lambda_max_at_tc, t.bisection_iters
                );
            }
            Err(e) => {
                ok = false;
                println!("mu = {mu}: failed: {e}");
            }
        }
    }
    Ok(exit(ok))
}

#[derive(Serialize)]
struct JsonRow<'a> {
    schema_version: u32,
    #[serde(flatten)]
    record: &'a SweepRecord,
}

/// Trend of the sweep's first-κ rows: per-μ ratio and functional plus whether
/// both deviations shrink over the last two doublings.
pub fn summary(v: &RadialPotential, rows: &[SweepRecord]) -> String {
    let mut s = String::new();
    let firsts: Vec<&SweepRecord> = rows.iter().filter(|r| r.kappa == rows[0].kappa).collect();
    let _ = writeln!(s, "potential {} g = {}", v.kind().name(), v.coupling());
    let _ = writeln!(
        s,
        "{:>10} {:>12} {:>12} {:>12} {:>12}  status",
        "mu", "Xi/T_c", "|dev|", "functional", "|dev|"
    );
    for r in &firsts {
        let _ = writeln!(
            s,
            "{:>10} {:>12.6} {:>12.3e} {:>12.6} {:>12.3e}  {}",
            r.mu,
            r.ratio,
            (r.ratio - UNIVERSAL_RATIO).abs(),
            r.thm1_functional,
            (r.thm1_functional - THM1_TARGET).abs(),
            r.status
        );
    }
    let ok: Vec<&&SweepRecord> = firsts.iter().filter(|r| r.is_ok()).collect();
    let trend = |f: &dyn Fn(&SweepRecord) -> f64| -> &'static str {
        if ok.len() < 3 {
            return "undetermined (fewer than three converged points)";
        }
        let d: Vec<f64> = ok[ok.len() - 3..].iter().map(|r| f(r)).collect();
        if d[1] <= d[0] && d[2] <= d[1] {
            "non-increasing"
        } else {
            "not monotone"
        }
    };
    let _ = writeln!(
        s,
        "Xi/T_c deviation from {UNIVERSAL_RATIO:.6} over the last three points: {}",
        trend(&|r| (r.ratio - UNIVERSAL_RATIO).abs())
    );
    let _ = writeln!(
        s,
        "functional deviation from {THM1_TARGET:.7} over the last three points: {}",
        trend(&|r| (r.thm1_functional - THM1_TARGET).abs())
    );
    s
}

pub fn sweep(cfg: &RunConfig, force: bool) -> Result<ExitCode> {
    let v = potential(cfg)?;
    let sc = cfg.sweep_config();
    let describe = v.describe();
    let mut cache = match &cfg.out {
        Some(dir) => {
            fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
            let c = Cache::open(dir)?;
            log::info!("{} cached points in {}", c.len(), dir.display());
            Some(c)
        }
        None => None,
    };
    let results = per_mu(cfg, |mu| {
        let key = point_key(&describe, mu, &sc);
        if !force {
            if let Some(rows) = cache.as_ref().and_then(|c| c.get(&key)) {
                return (key, rows.clone(), true);
            }
        }
        (key, run_point(&v, mu, &sc), false)
    });
    let mut rows = Vec::new();
    for (mu, (key, recs, cached)) in results {
        if cached {
            log::info!("mu = {mu}: cached");
        } else if let Some(c) = cache.as_mut() {
            c.insert(key, &recs)?;
        }
        for r in recs.iter().filter(|r| !r.is_ok()) {
            log::warn!("mu = {mu}, kappa = {}: {}", r.kappa, r.status);
        }
        rows.extend(recs);
    }
    let mut csv = format!("{CSV_HEADER}\n");
    let mut jsonl = String::new();
    for r in &rows {
        csv.push_str(&csv_row(r));
        csv.push('\n');
        jsonl.push_str(&serde_json::to_string(&JsonRow {
            schema_version: CSV_SCHEMA_VERSION,
            record: r,
        })?);
        jsonl.push('\n');
    }
    let text = summary(&v, &rows);
    if cfg.out.is_some() {
        write_file(cfg, "sweep.csv", &csv)?;
        write_file(cfg, "sweep.jsonl", &jsonl)?;
        write_file(cfg, "summary.txt", &text)?;
        print!("{text}");
    } else {
        std::io::stdout().write_all(csv.as_bytes())?;
        eprint!("{text}");
    }
    Ok(exit(rows.iter().any(|r| r.is_ok())))
}

pub fn verify(cfg: &RunConfig, only: Vec<String>) -> Result<ExitCode> {
    let acc = AcceptanceConfig {
        g: cfg.potential.g,
        mus: cfg.mus.clone(),
        kappas: cfg.kappas.clone(),
        kinds: cfg.kinds.clone(),
        grid: cfg.gap.grid,
        only,
    };
    let unknown = acc.unknown_filters();
    if !unknown.is_empty() {
        let keys: Vec<&str> = acceptance::CRITERIA.iter().map(|c| c.1).collect();
        return Err(ConfigError(anyhow::anyhow!(
            "unknown check(s) {}; known: {}",
            unknown.join(", "),
            keys.join(", ")
        ))
        .into());
    }
    let results = acceptance::run(&acc);
    for r in &results {
        println!("{r}");
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} of {} checks passed", results.len() - failed, results.len());
    Ok(exit(failed == 0))
}
