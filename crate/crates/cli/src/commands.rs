use qpcocycle::arithmetic::{check_dc, check_sdc, DiophantineParams};
use qpcocycle::cocycle::{finite_lyapunov, phase_grid};
use qpcocycle::gordon::{criterion, gordon_report, Criterion};
use qpcocycle::reducibility::{build_conjugation, perturbation_report, subcritical_probe};
use qpcocycle::spectrum::{edge_slack, gap_profile_of, FiniteOperator};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use crate::config::{grid, CampaignConfig};
use crate::error::{in_module, CliError};
use crate::output::{num, Sink};
use crate::svg;

pub fn scan_lyapunov(cfg: &CampaignConfig, sink: &mut Sink) -> Result<(), CliError> {
    let c = &cfg.lyapunov;
    let params = cfg.model()?;
    let id = cfg.omega_id();
    let mut rows = Vec::new();
    let mut pts = Vec::new();
    for e in grid(c.e_min, c.e_max, c.e_step)? {
        let est = finite_lyapunov(&params, e, c.n, c.phases).map_err(in_module("cocycle"))?;
        rows.push(format!(
            "{},{},{},{},{},{},{}",
            num(e),
            id,
            num(params.coupling()),
            c.n,
            c.phases,
            num(est.value),
            num(est.stderr)
        ));
        pts.push((e, est.value));
    }
    sink.csv("lyapunov.csv", "E,omega_id,K,n,phases,L,stderr", &rows)?;
    sink.svg("lyapunov.svg", || {
        svg::line_plot(
            &format!("Lyapunov exponent, K = {}", params.coupling()),
            "E",
            "L(E)",
            &pts,
        )
    })
}

fn thetas(cfg: &CampaignConfig) -> Vec<f64> {
    let count = cfg.spectrum.thetas.max(1);
    if cfg.spectrum.random_thetas {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.run.seed);
        (0..count).map(|_| rng.gen::<f64>()).collect()
    } else {
        phase_grid(count)
    }
}

pub fn spectrum(cfg: &CampaignConfig, sink: &mut Sink) -> Result<(), CliError> {
    let c = &cfg.spectrum;
    let params = cfg.model()?;
    let mut rows = Vec::new();
    let mut ladder = Vec::new();
    let mut ops = Vec::new();
    let mut window = (f64::INFINITY, f64::NEG_INFINITY);
    let mut extremes = (f64::INFINITY, f64::NEG_INFINITY);
    for theta in thetas(cfg) {
        let op = FiniteOperator::build(&params, theta, c.sites).map_err(in_module("spectrum"))?;
        let (glo, ghi) = op.gershgorin();
        let (a, b) = (c.e_min.unwrap_or(glo), c.e_max.unwrap_or(ghi));
        window = (window.0.min(a), window.1.max(b));
        let first = op.count_below(a);
        let res = op.analyze(a, b, c.tol).map_err(in_module("spectrum"))?;
        for (i, e) in res.eigenvalues.iter().enumerate() {
            let d = res.decay[i];
            rows.push(format!(
                "{},{},{},{},{},{},{}",
                num(theta),
                c.sites,
                first + i,
                num(*e),
                num(res.residuals[i]),
                num(d.rate),
                num(d.quality)
            ));
            ladder.push((theta, *e));
        }
        if let (Some(lo), Some(hi)) = (res.eigenvalues.first(), res.eigenvalues.last()) {
            extremes = (extremes.0.min(*lo), extremes.1.max(*hi));
        }
        ops.push(op);
    }
    let gaps = gap_profile_of(&ops, window.0, window.1, c.gap_resolution)
        .map_err(in_module("spectrum"))?;
    sink.csv(
        "eigenvalues.csv",
        "theta,N,index,E,residual,decay_rate,fit_quality",
        &rows,
    )?;
    let sup_f = params.sup_f();
    sink.json(
        "spectrum.json",
        &json!({
            "window": [window.0, window.1],
            "min_eigenvalue": extremes.0,
            "max_eigenvalue": extremes.1,
            "edge_slack": edge_slack(c.sites),
            "max_over_exp_K_sup_f": extremes.1 / (params.coupling().abs() * sup_f).exp(),
            "gaps": gaps,
        }),
    )?;
    sink.svg("ladder.svg", || {
        svg::ladder(
            &format!("Eigenvalues, K = {}, N = {}", params.coupling(), c.sites),
            "theta",
            "E",
            &ladder,
        )
    })
}

pub fn reduce(cfg: &CampaignConfig, sink: &mut Sink) -> Result<(), CliError> {
    let c = &cfg.reduce;
    let params = cfg.model()?;
    let conj = build_conjugation(&params, c.divisor_floor).map_err(in_module("reducibility"))?;
    let pert = perturbation_report(&conj, c.e_max);
    let energies: Vec<f64> = (1..=c.probe_points)
        .map(|j| c.e_max * j as f64 / c.probe_points as f64)
        .collect();
    let probe =
        subcritical_probe(&params, &energies, c.n, c.phases).map_err(in_module("cocycle"))?;
    let report = conj.report();
    sink.json(
        "conjugation.json",
        &json!({
            "k_hat": report.k_hat,
            "strip_budget": report.strip_budget,
            "beta_proxy": report.beta_proxy,
            "norms": report.norms,
            "residuals": report.residuals,
            "perturbation": pert,
        }),
    )?;
    let rows: Vec<String> = probe
        .iter()
        .map(|r| {
            format!(
                "{},{},{},{},{}",
                num(r.energy),
                num(r.lyapunov.value),
                num(r.lyapunov.stderr),
                num(r.rotation),
                r.flagged
            )
        })
        .collect();
    sink.csv("probe.csv", "E,L,stderr,rotation,flagged", &rows)?;
    sink.svg("probe.svg", || {
        let pts: Vec<(f64, f64)> = probe.iter().map(|r| (r.energy, r.rotation)).collect();
        svg::line_plot("Rotation number near E = 0", "E", "rotation", &pts)
    })
}

fn criterion_json(c: &Criterion) -> serde_json::Value {
    json!({
        "beta_proxy": c.beta_proxy,
        "threshold": c.threshold,
        "criterion_met": c.met,
        "margin": c.margin,
        "degenerate": c.degenerate,
        "caveat": Criterion::CAVEAT,
    })
}

pub fn gordon_probe(cfg: &CampaignConfig, sink: &mut Sink) -> Result<(), CliError> {
    let c = &cfg.gordon;
    let params = cfg.model()?;
    let report =
        gordon_report(&params, c.energy, c.theta, &c.stages).map_err(in_module("gordon"))?;
    sink.json("gordon.json", &report)
}

pub fn classify_freq(cfg: &CampaignConfig, sink: &mut Sink) -> Result<(), CliError> {
    let c = &cfg.classify;
    let omega = cfg.frequency()?;
    let params = cfg.model()?;
    let n_max = match omega.available_terms() {
        Some(t) => c.n_max.min(t),
        None => c.n_max,
    };
    let beta = omega.beta(n_max).map_err(in_module("arithmetic"))?;
    let shown = c.convergents.min(n_max);
    let convergents: Vec<String> = omega
        .convergents(shown)
        .map_err(in_module("arithmetic"))?
        .iter()
        .map(|cv| format!("{}/{}", cv.p, cv.q))
        .collect();
    let dp = DiophantineParams::new(c.kappa, c.tau).map_err(|e| CliError::Config(e.to_string()))?;
    let dc = check_dc(&omega, dp, c.dc_range);
    let sdc =
        check_sdc(&omega, c.kappa, c.dc_range).map_err(|e| CliError::Config(e.to_string()))?;
    let crit = criterion(&params).map_err(in_module("gordon"))?;
    sink.json(
        "classify.json",
        &json!({
            "omega": omega,
            "omega_value": omega.value(),
            "convergents": convergents,
            "beta": beta,
            "dc": dc,
            "sdc": sdc,
            "K": params.coupling(),
            "criterion": criterion_json(&crit),
        }),
    )
}

pub fn phase_diagram(cfg: &CampaignConfig, sink: &mut Sink) -> Result<(), CliError> {
    let c = &cfg.phase_diagram;
    let energies = grid(c.e_min, c.e_max, c.e_step)?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for &k in &c.k_list {
        let params = cfg.model_with(k)?;
        let mut line = Vec::with_capacity(energies.len());
        for &e in &energies {
            let est = finite_lyapunov(&params, e, c.n, c.phases).map_err(in_module("cocycle"))?;
            rows.push(format!(
                "{},{},{},{}",
                num(k),
                num(e),
                num(est.value),
                num(est.stderr)
            ));
            line.push(est.value);
        }
        values.push(line);
    }
    sink.csv("phase.csv", "K,E,L,stderr", &rows)?;
    sink.svg("phase.svg", || {
        svg::heatmap(
            "Lyapunov exponent over (E, K)",
            "E",
            "K",
            &energies,
            &c.k_list,
            &values,
        )
    })
}
