use qgf_core::cv::cv_iterate_spectrum;
use qgf_core::filter::{cosine_coefficients, gaussian_coefficients, FilterParams};
use qgf_core::noise::{noisy_overlap_table, zne_table, Channel, NoiseModel, MAX_DM_QUBITS};
use qgf_core::overlap::{Evolver, OverlapProblem, OverlapTable, ShotPlan, TableMode};
use qgf_core::pauli::{build_tfim, PauliSum};
use qgf_core::resources::{
    max_evolution_time, shots_per_term, total_shots_closed, total_shots_summed, worst_case_depth, ResourceInputs,
};
use qgf_core::scan::{grid_scan, iterative_deepen_with, ScanGrid, ScanPoint, ScanResult};
use qgf_core::spectrum::MAX_DIAG_QUBITS;
use qgf_core::state::{prepare_ghz_z, prepare_qaoa_random, prepare_x_ground, StateVector};
use qgf_core::QgfError;
use serde::Serialize;
use serde_json::json;

use crate::config::{ExperimentConfig, InitialState, ModeConfig};
use crate::error::CliError;
use crate::output::{csv_bytes, read_json, RunDir};

/// Largest register held as a state vector.
pub const MAX_STATE_QUBITS: usize = 24;

const TABLE_FILE: &str = "tables/overlap.json";

fn hamiltonian(cfg: &ExperimentConfig) -> Result<PauliSum, CliError> {
    let m = &cfg.model;
    if m.n > MAX_STATE_QUBITS {
        return Err(QgfError::ResourceLimit(format!("state vectors limited to {MAX_STATE_QUBITS} qubits, got {}", m.n)).into());
    }
    Ok(build_tfim(m.n, m.j, m.g, m.periodic)?.shift_spectrum(m.shift))
}

fn initial_state(cfg: &ExperimentConfig) -> Result<StateVector, CliError> {
    let n = cfg.model.n;
    Ok(match cfg.initial_state {
        InitialState::GhzZ => prepare_ghz_z(n)?,
        InitialState::XGround => prepare_x_ground(n)?,
        InitialState::QaoaRandom { seed } => prepare_qaoa_random(n, seed)?,
    })
}

fn problem(cfg: &ExperimentConfig) -> Result<OverlapProblem, CliError> {
    Ok(OverlapProblem::new(hamiltonian(cfg)?, initial_state(cfg)?)?)
}

fn exact_lambda0(p: &OverlapProblem) -> Result<Option<f64>, CliError> {
    if p.hamiltonian().n_qubits() > MAX_DIAG_QUBITS {
        return Ok(None);
    }
    Ok(Some(p.spectrum()?.ground_energy()))
}

fn table_mode(mode: &ModeConfig) -> Result<TableMode, CliError> {
    let evolver = |s: Option<usize>| match s {
        Some(steps_per_slice) => Evolver::Trotter { steps_per_slice },
        None => Evolver::Exact,
    };
    Ok(match mode {
        ModeConfig::Exact { trotter_steps_per_slice } => TableMode::Exact { evolver: evolver(*trotter_steps_per_slice) },
        ModeConfig::Sampled { shots, seed, trotter_steps_per_slice } => TableMode::Sampled {
            evolver: evolver(*trotter_steps_per_slice),
            shots: ShotPlan::Uniform(*shots),
            seed: *seed,
        },
        ModeConfig::Noisy { channel, p, steps_per_slice, .. } => TableMode::Noisy {
            noise: NoiseModel::new(*channel, *p)?,
            steps_per_slice: steps_per_slice.unwrap_or(1),
        },
    })
}

/// Fills in a missing μ range: from `offset - Σ|c_l|` (a lower bound on the
/// spectrum) up to the initial Rayleigh quotient, snapped outward to the step.
fn resolve_mu_range(cfg: &mut ExperimentConfig, p: &OverlapProblem) -> Result<(), CliError> {
    if cfg.scan.mu_range.is_some() {
        return Ok(());
    }
    let h = p.hamiltonian();
    let lo = h.identity_offset() - h.terms().iter().map(|(c, _)| c.abs()).sum::<f64>();
    let hi = h.expectation(p.initial_state())?;
    let step = cfg.scan.mu_step;
    cfg.scan.mu_range = Some([(lo / step).floor() * step, (hi / step).ceil() * step]);
    Ok(())
}

fn grid(cfg: &ExperimentConfig) -> Result<ScanGrid, CliError> {
    let s = &cfg.scan;
    let [a, b] = s.mu_range.expect("mu range resolved");
    let [c, d] = s.inv_sigma_sq_range;
    Ok(ScanGrid::from_ranges((a, b, s.mu_step), (c, d, s.inv_sigma_sq_step))?)
}

#[derive(Serialize)]
struct Summary {
    best_mu: f64,
    best_inv_sigma_sq: f64,
    best_energy: f64,
    exact_lambda0: Option<f64>,
    error: Option<f64>,
    m_y: usize,
    phi_m: f64,
}

impl Summary {
    fn new(best: &ScanPoint, lambda0: Option<f64>, m_y: usize, delta_y: f64) -> Self {
        Self {
            best_mu: best.mu,
            best_inv_sigma_sq: best.inv_sigma_sq,
            best_energy: best.energy,
            exact_lambda0: lambda0,
            error: lambda0.map(|l| (best.energy - l).abs()),
            m_y,
            phi_m: m_y as f64 * delta_y,
        }
    }
}

fn table_key(cfg: &ExperimentConfig) -> serde_json::Value {
    json!({ "model": cfg.model, "initial_state": cfg.initial_state })
}

fn save_table(dir: &RunDir, cfg: &ExperimentConfig, t: &OverlapTable) -> Result<(), CliError> {
    dir.write_json(TABLE_FILE, &json!({ "problem": table_key(cfg), "table": t }))
}

/// A stored table for the same problem, slice and mode, if there is one.
fn stored_table(dir: &RunDir, cfg: &ExperimentConfig, mode: &TableMode) -> Option<OverlapTable> {
    let v = read_json(&dir.path(TABLE_FILE))?;
    if v.get("problem")? != &table_key(cfg) {
        return None;
    }
    let t: OverlapTable = serde_json::from_value(v.get("table")?.clone()).ok()?;
    (t.delta_y == cfg.filter.delta_y && &t.mode == mode).then_some(t)
}

pub fn scan(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    let p = problem(&cfg)?;
    resolve_mu_range(&mut cfg, &p)?;
    let grid = grid(&cfg)?;
    let mode = table_mode(&cfg.mode)?;
    let dir = RunDir::create(&cfg, "scan")?;
    let (dy, m_y) = (cfg.filter.delta_y, cfg.filter.m_y);
    let table = match stored_table(&dir, &cfg, &mode) {
        Some(t) if t.m_y >= m_y => t.truncated(m_y)?,
        Some(t) => p.extend(&t, m_y)?,
        None => p.compute(dy, m_y, &mode)?,
    };
    if stored_table(&dir, &cfg, &mode).is_none_or(|t| t.m_y < m_y) {
        save_table(&dir, &cfg, &table)?;
    }
    let result = grid_scan(&table, &grid)?;
    dir.write_rows("scan", &result.points)?;
    dir.write_json("summary.json", &Summary::new(&result.best, exact_lambda0(&p)?, m_y, dy))
}

#[derive(Serialize)]
struct StageRow {
    m_y: usize,
    phi_m: f64,
    mu: f64,
    inv_sigma_sq: f64,
    best_energy: f64,
    error: Option<f64>,
}

pub fn iterate(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    let p = problem(&cfg)?;
    resolve_mu_range(&mut cfg, &p)?;
    let grid = grid(&cfg)?;
    let mode = table_mode(&cfg.mode)?;
    let dir = RunDir::create(&cfg, "iterate")?;
    let lambda0 = exact_lambda0(&p)?;
    let schedule = cfg.filter.cutoffs();
    let mut last: Option<ScanResult> = None;
    let (records, _) = iterative_deepen_with(&p, cfg.filter.delta_y, &schedule, &grid, &mode, |_, table, scan| {
        save_table(&dir, &cfg, table).map_err(|e| QgfError::Io(std::io::Error::other(e.to_string())))?;
        last = Some(scan.clone());
        Ok(())
    })?;
    let rows: Vec<StageRow> = records
        .iter()
        .map(|r| StageRow {
            m_y: r.m_y,
            phi_m: r.phi_m,
            mu: r.mu,
            inv_sigma_sq: r.inv_sigma_sq,
            best_energy: r.energy,
            error: lambda0.map(|l| (r.energy - l).abs()),
        })
        .collect();
    dir.write_rows("iterate", &rows)?;
    let best = last.expect("at least one stage").best;
    let m_y = *schedule.last().expect("nonempty schedule");
    dir.write_json("summary.json", &Summary::new(&best, lambda0, m_y, cfg.filter.delta_y))
}

#[derive(Serialize)]
struct NoiseRow {
    channel: &'static str,
    m_y: usize,
    phi_m: f64,
    noiseless_energy: f64,
    noisy_energy: f64,
    mitigated_energy: f64,
    noiseless_error: f64,
    noisy_error: f64,
    mitigated_error: f64,
}

pub fn noise(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    let (p_noise, steps, scales) = match &cfg.mode {
        ModeConfig::Noisy { p, steps_per_slice, zne_scales, .. } => {
            (*p, steps_per_slice.expect("validated"), zne_scales.clone())
        }
        _ => (1e-4, 20, vec![1.0, 2.0]),
    };
    if cfg.model.n + 1 > MAX_DM_QUBITS {
        return Err(QgfError::ResourceLimit(format!(
            "noisy runs hold n + 1 qubits as a density matrix, limit is {MAX_DM_QUBITS}"
        ))
        .into());
    }
    let p = problem(&cfg)?;
    let lambda0 = p.spectrum()?.ground_energy();
    // Trotter and channel errors dominate wherever the denominator is small,
    // so without a configured range the filter sits on the exact ground energy.
    cfg.scan.mu_range.get_or_insert([lambda0, lambda0]);
    let grid = grid(&cfg)?;
    let dir = RunDir::create(&cfg, "noise")?;
    let dy = cfg.filter.delta_y;
    let cutoffs = cfg.filter.cutoffs();
    let m_max = *cutoffs.iter().max().expect("nonempty schedule");
    let noiseless = p.compute(dy, m_max, &TableMode::Exact { evolver: Evolver::Trotter { steps_per_slice: steps } })?;
    dir.write_json("tables/noiseless.json", &noiseless)?;
    let best = |t: &OverlapTable, m: usize| -> Result<f64, CliError> { Ok(grid_scan(&t.truncated(m)?, &grid)?.best.energy) };
    let mut rows = Vec::new();
    for (name, channel) in [("bit_flip", Channel::BitFlip), ("phase_flip", Channel::PhaseFlip)] {
        let base = NoiseModel::new(channel, p_noise)?;
        let mut tables = Vec::with_capacity(scales.len());
        for &c in &scales {
            let t = noisy_overlap_table(p.hamiltonian(), p.initial_state(), dy, m_max, steps, &base.scaled(c)?)?;
            dir.write_json(&format!("tables/{name}_scale_{c}.json"), &t)?;
            tables.push(t);
        }
        let mitigated = zne_table(&scales, &tables)?;
        dir.write_json(&format!("tables/{name}_mitigated.json"), &mitigated)?;
        let raw = match scales.iter().position(|&c| c == 1.0) {
            Some(i) => tables[i].clone(),
            None => noisy_overlap_table(p.hamiltonian(), p.initial_state(), dy, m_max, steps, &base)?,
        };
        for &m in &cutoffs {
            let (e0, e1, e2) = (best(&noiseless, m)?, best(&raw, m)?, best(&mitigated, m)?);
            rows.push(NoiseRow {
                channel: name,
                m_y: m,
                phi_m: m as f64 * dy,
                noiseless_energy: e0,
                noisy_energy: e1,
                mitigated_energy: e2,
                noiseless_error: (e0 - lambda0).abs(),
                noisy_error: (e1 - lambda0).abs(),
                mitigated_error: (e2 - lambda0).abs(),
            });
        }
    }
    dir.write_rows("noise", &rows)?;
    dir.write_json("summary.json", &json!({ "exact_lambda0": lambda0, "p": p_noise, "zne_scales": scales }))
}

pub fn cv(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    let p = problem(&cfg)?;
    let spec = p.spectrum()?;
    let lambda0 = spec.ground_energy();
    if cfg.cv.schedule.is_none() {
        cfg.cv.schedule = Some((0..8).map(|i| -lambda0 + 0.5 * i as f64).collect());
    }
    let dir = RunDir::create(&cfg, "cv")?;
    let schedule = cfg.cv.schedule.as_deref().expect("schedule resolved");
    let stages = cv_iterate_spectrum(spec, p.initial_state(), cfg.cv.s, schedule, cfg.cv.weight)?;
    dir.write_rows("cv", &stages)?;
    let last = stages.last().expect("nonempty schedule");
    dir.write_json(
        "summary.json",
        &json!({ "exact_lambda0": lambda0, "final_energy": last.energy, "error": last.energy_error }),
    )
}

#[derive(Serialize)]
struct ResponseRow {
    phi_m: f64,
    m_y: usize,
    lambda: f64,
    g_re: f64,
    g_im: f64,
    gaussian: f64,
    cosine: Option<f64>,
}

#[derive(Serialize)]
struct WindowRow {
    phi_m: f64,
    m_y: usize,
    window_edge: f64,
}

pub fn filter_response(cfg: ExperimentConfig) -> Result<(), CliError> {
    let dir = RunDir::create(&cfg, "filter-response")?;
    let r = &cfg.response;
    let dy = cfg.filter.delta_y;
    let sigma_sq = 1.0 / r.inv_sigma_sq;
    let [lo, hi] = r.lambda_range;
    let lambdas = qgf_core::scan::axis((lo, hi, r.lambda_step))?;
    let cosine = match r.cosine_power {
        Some(power) => {
            let delta = (sigma_sq / 2.0).sqrt();
            Some(cosine_coefficients(delta * (power as f64).sqrt(), delta, r.mu, f64::INFINITY)?)
        }
        None => None,
    };
    let mut rows = Vec::new();
    let mut windows = Vec::new();
    for &phi in &r.phi_m {
        let m_y = (phi / dy).round() as usize;
        let coeffs = gaussian_coefficients(&FilterParams::new(r.mu, r.inv_sigma_sq, dy, m_y)?)?;
        windows.push(WindowRow { phi_m: phi, m_y, window_edge: phi * sigma_sq / 2.0 });
        for &l in &lambdas {
            let g = coeffs.response(l);
            rows.push(ResponseRow {
                phi_m: phi,
                m_y,
                lambda: l,
                g_re: g.re,
                g_im: g.im,
                gaussian: (-(l - r.mu).powi(2) / sigma_sq).exp(),
                cosine: cosine.as_ref().map(|c| c.response(l).re),
            });
        }
    }
    dir.write_rows("filter_response", &rows)?;
    dir.write_rows("windows", &windows)?;
    Ok(())
}

#[derive(Serialize)]
struct BudgetRow {
    quantity: &'static str,
    y: Option<i64>,
    value: f64,
}

pub fn budget(mut cfg: ExperimentConfig) -> Result<(), CliError> {
    let b = &cfg.budget;
    if b.a0_sq.is_none() || b.big_l.is_none() || b.delta_gap.is_none() {
        let p = problem(&cfg)?;
        let spec = p.spectrum()?;
        let a0 = spec.ground_state().inner(p.initial_state()).norm_sqr();
        let terms = p.hamiltonian().terms().len() as f64;
        let gap = spec.gap();
        let b = &mut cfg.budget;
        b.a0_sq.get_or_insert(a0);
        b.big_l.get_or_insert(terms);
        b.delta_gap.get_or_insert(gap);
    }
    cfg.budget.eps_term.get_or_insert(cfg.budget.epsilon);
    let b = &cfg.budget;
    let r = ResourceInputs {
        a0_sq: b.a0_sq.expect("resolved"),
        epsilon: b.epsilon,
        sigma_sq: b.sigma_sq,
        lambda_m: b.lambda_m,
        big_l: b.big_l.expect("resolved"),
        delta_gap: b.delta_gap.expect("resolved"),
    };
    if !(r.delta_gap > 0.0) {
        return Err(CliError::Config("budget.delta_gap: the model's spectral gap is zero; set it explicitly".into()));
    }
    let dy = cfg.filter.delta_y;
    let phi = max_evolution_time(&r)?;
    let y_max = (2.0 * phi / dy).floor() as i64;
    let mut rows = Vec::with_capacity(y_max as usize + 6);
    for y in 0..=y_max {
        rows.push(BudgetRow { quantity: "shots_per_term", y: Some(y), value: shots_per_term(&r, y, dy)? });
    }
    let worst = worst_case_depth(&r)?;
    for (quantity, value) in [
        ("phi_m", phi),
        ("total_shots_summed", total_shots_summed(&r, dy)?),
        ("total_shots_closed", total_shots_closed(&r, dy)?),
        ("worst_case_time", worst.t),
        ("worst_case_gate_count", worst.gate_count),
    ] {
        rows.push(BudgetRow { quantity, y: None, value });
    }
    let dir = RunDir::create(&cfg, "budget")?;
    dir.write_rows("budget", &rows)?;
    print!("{}", String::from_utf8_lossy(&csv_bytes(&rows)?));
    Ok(())
}
