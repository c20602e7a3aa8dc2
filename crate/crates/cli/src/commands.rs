use std::f64::consts::PI;
use std::fmt::Write as _;

use dho_core::car_fock::{annihilation_residual, car_residual, transformed_family, transformed_vacuum};
use dho_core::finite_dilation::{dilate_propagator, hs_scaling};
use dho_core::linalg::{CMat, CVec, RVec, C64};
use dho_core::quasifree::{kms_residual, kms_state, two_point_direct, two_point_via_fock};
use dho_core::semigroup_dilation::{
    compress, critical_kernel, decay_expectation, fock_decay_expectation, inject_halfline, lyapunov_gram,
    min_window, shift, spectral_amplitude_closed, spectral_amplitude_fft, spectral_mass,
};
use dho_core::{
    DampingRegime, DhoGenerator, EvolutionConvention, FockRep, HalfLineGrid, OneParticleSpace, PhaseSpace,
};

use crate::config::{Convention, ScenarioConfig};
use crate::report::Report;
use crate::Failure;

const FOCK_MODE_LIMIT: usize = 6;
const HS_MODES: [usize; 4] = [1, 2, 4, 8];

fn generator(cfg: &ScenarioConfig) -> Result<DhoGenerator, Failure> {
    Ok(DhoGenerator::new(&PhaseSpace::new(cfg.n_modes)?, cfg.omega, cfg.gamma)?)
}

fn normalized(v: &[f64]) -> RVec {
    let v = RVec::from_row_slice(v);
    let n = v.norm();
    v / n
}

/// `(m, n)` from the config; both default to a kernel vector at critical
/// damping and to the normalised all-ones vector otherwise.
fn vectors(cfg: &ScenarioConfig, g: &DhoGenerator) -> Result<(RVec, RVec), Failure> {
    let fallback = if g.regime() == DampingRegime::Critical {
        critical_kernel(g)?.remove(0)
    } else {
        normalized(&vec![1.0; 2 * cfg.n_modes])
    };
    let m = cfg.vectors.m.as_deref().map(normalized).unwrap_or(fallback);
    let n = cfg.vectors.n.as_deref().map(normalized).unwrap_or_else(|| m.clone());
    Ok((m, n))
}

fn require_half_line(cfg: &ScenarioConfig, g: &DhoGenerator) -> Result<(), Failure> {
    if !(cfg.gamma > 0.0) {
        return Err(Failure::Config(
            "half-line dilation requires gamma > 0 (the injection is not an isometry without damping)".into(),
        ));
    }
    let needed = min_window(g)?;
    if cfg.t_max < needed {
        return Err(Failure::Config(format!("t_max = {} is below the required window {needed:.6}", cfg.t_max)));
    }
    Ok(())
}

fn decay_grid(cfg: &ScenarioConfig) -> Result<HalfLineGrid, Failure> {
    let longest = cfg.t_samples.iter().copied().fold(0.0, f64::max);
    let grid = HalfLineGrid::new(cfg.dt, cfg.t_max, longest)?;
    for &t in &cfg.t_samples {
        grid.steps(t)?;
    }
    Ok(grid)
}

fn num(x: f64) -> String {
    format!("{x:.16e}")
}

pub fn evolve(cfg: &ScenarioConfig) -> Result<String, Failure> {
    let g = generator(cfg)?;
    let dim = g.space().dim();
    let mut out = String::from("t");
    for r in 1..=dim {
        for c in 1..=dim {
            write!(out, ",T_{r}_{c}").unwrap();
        }
    }
    out.push_str(",sigma_max,oracle_residual\n");
    for &t in &cfg.t_samples {
        let closed = g.evolve_closed_form(t)?;
        let oracle = g.evolve_oracle(t)?;
        let mut row = vec![num(t)];
        let m = closed.matrix();
        for r in 0..dim {
            for c in 0..dim {
                row.push(num(m[(r, c)]));
            }
        }
        row.push(num(closed.sigma_max()));
        row.push(num((m - oracle.matrix()).norm()));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn decay(cfg: &ScenarioConfig) -> Result<String, Failure> {
    let g = generator(cfg)?;
    require_half_line(cfg, &g)?;
    let grid = decay_grid(cfg)?;
    let (m, n) = vectors(cfg, &g)?;
    let critical = g.regime() == DampingRegime::Critical;
    if cfg.decay.fock && 2 * cfg.n_modes + 2 > FOCK_MODE_LIMIT {
        return Err(Failure::Config(format!(
            "the Fock route needs 2*n_modes + 2 <= {FOCK_MODE_LIMIT}; disable [decay] fock for n_modes = {}",
            cfg.n_modes
        )));
    }

    let mut header = vec!["t", "one_particle", "grid"];
    if cfg.decay.fock {
        header.push("fock");
    }
    if critical {
        header.push("reference");
    }
    let mut out = header.join(",");
    out.push('\n');
    for &t in &cfg.t_samples {
        let v = decay_expectation(&g, &m, &n, t, &grid)?;
        let mut row = vec![num(t), num(v.analytic.re), num(v.grid.re)];
        if cfg.decay.fock {
            row.push(num(fock_decay_expectation(&g, &m, &n, t, &grid, FOCK_MODE_LIMIT)?.re));
        }
        if critical {
            row.push(num((-2.0 * cfg.gamma * t).exp()));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn spectrum(cfg: &ScenarioConfig) -> Result<String, Failure> {
    let g = generator(cfg)?;
    require_half_line(cfg, &g)?;
    let band = &cfg.energy_band;
    let nyquist = PI / (4.0 * cfg.dt);
    if band.min.abs().max(band.max.abs()) > nyquist {
        return Err(Failure::Config(format!("energy band exceeds |E| <= pi/(4 dt) = {nyquist:.6}")));
    }
    let (m, _) = vectors(cfg, &g)?;
    let grid = HalfLineGrid::new(cfg.dt, cfg.t_max, 0.0)?;
    let fft = spectral_amplitude_fft(&g, &m, &grid, Some(band.step()))?;
    let closed = spectral_amplitude_closed(&g, &m, &fft.energies)?;

    let mut out = String::from("E,closed_power,fft_power,deviation\n");
    for (k, &e) in fft.energies.iter().enumerate() {
        if e < band.min || e > band.max {
            continue;
        }
        let a = &closed.amplitudes[k];
        let b = &fft.amplitudes[k];
        let row = [num(e), num(a.norm_squared()), num(b.norm_squared()), num((a - b).norm())];
        out.push_str(&row.join(","));
        out.push('\n');
    }
    Ok(out)
}

pub fn verify(cfg: &ScenarioConfig) -> Result<Report, Failure> {
    let g = generator(cfg)?;
    if cfg.verify.half_line {
        require_half_line(cfg, &g)?;
    }
    let mut report = Report::default();
    let (m, n) = vectors(cfg, &g)?;
    let n_modes = cfg.n_modes;

    let mut oracle = 0.0_f64;
    let mut semigroup = 0.0_f64;
    let mut contraction = f64::NEG_INFINITY;
    let mut orth = 0.0_f64;
    let mut comp = 0.0_f64;
    let mut split = 0.0_f64;
    for &t in &cfg.t_samples {
        let closed = g.evolve_closed_form(t)?;
        oracle = oracle.max((closed.matrix() - g.evolve_oracle(t)?.matrix()).norm());
        let half = g.evolve_closed_form(t / 2.0)?.into_matrix();
        semigroup = semigroup.max((&half * &half - closed.matrix()).norm());
        contraction = contraction.max(closed.sigma_max() - 1.0);
        let (d, pair) = dilate_propagator(&g, t)?;
        orth = orth.max(d.orthogonality_residual());
        comp = comp.max((d.compress() - closed.matrix()).norm());
        split = split.max((pair.reconstruct() - d.u()).norm());
    }
    report.row("closed_form_vs_oracle", 1e-9, oracle);
    report.row("semigroup_law", 1e-10, semigroup);
    report.row("quadratic_identity", 1e-12, g.quadratic_residual());
    report.row("lyapunov_identity", 1e-13, g.lyapunov_residual());
    report.row("contraction_excess", 1e-12, contraction);
    report.row("dilation_orthogonality", 1e-10, orth);
    report.row("dilation_compression", 1e-10, comp);
    report.row("bogoliubov_reconstruction", 1e-12, split);

    let t_hs = cfg.t_samples.iter().copied().find(|&t| t > 0.0).unwrap_or(1.0);
    let hs = hs_scaling(cfg.omega, cfg.gamma, t_hs, &HS_MODES)?;
    let base = hs[0].1;
    let ratios: Vec<f64> = hs.iter().map(|(_, v)| v / base).collect();
    if base > 0.0 {
        for (&(k, _), r) in hs.iter().zip(&ratios).skip(1) {
            report.row(&format!("hs_ratio_n{k}"), 1e-10, (r - k as f64).abs() / k as f64);
        }
        report.note(format!(
            "hs ratios for n_modes 1:2:4:8 at t = {t_hs}: {}",
            ratios.iter().map(|r| format!("{r:.12}")).collect::<Vec<_>>().join(":")
        ));
    } else {
        report.note("hs_norm_sq vanishes (orthogonal propagator); ratios undefined".into());
    }

    let mut plain_car = 0.0_f64;
    for d in 1..=6 {
        let rep = FockRep::new(d)?;
        let family: Vec<_> = (0..d).map(|k| rep.creator(k)).collect();
        plain_car = plain_car.max(car_residual(&family));
    }
    report.row("car_relations", 1e-12, plain_car);

    let d = 2 * n_modes;
    if d <= FOCK_MODE_LIMIT {
        let rep = FockRep::new(d)?;
        let sp = OneParticleSpace::new(dho_core::DoubledSpace::new(g.space()).jt().clone())?;
        let (_, pair) = dilate_propagator(&g, t_hs)?;
        let family = transformed_family(&rep, &sp, &pair)?
            .iter()
            .map(|f| f.to_operator(&rep))
            .collect::<Result<Vec<_>, _>>()?;
        report.row("transformed_car", 1e-10, car_residual(&family));
        let omega = transformed_vacuum(&rep, &sp, &pair)?;
        report.row("transformed_vacuum", 1e-9, annihilation_residual(&rep, &sp, &pair, &omega)?);
    } else {
        report.note(format!("transformed CAR skipped: {d} complex modes exceed {FOCK_MODE_LIMIT}"));
    }

    let re = |x: f64| C64::new(x, 0.0);
    let h = CMat::from_row_slice(2, 2, &[re(cfg.omega), re(cfg.gamma), re(cfg.gamma), re(-cfg.omega)]);
    let beta = cfg.verify.beta;
    let state = kms_state(&h, beta)?;
    let x = CVec::from_vec(vec![C64::new(0.6, 0.0), C64::new(0.0, 0.8)]);
    let y = CVec::from_vec(vec![C64::new(0.3, -0.1), C64::new(1.0, 0.2)]);
    let quasifree = (two_point_via_fock(&state, &x, &y)? - two_point_direct(&state, &x, &y)?).norm();
    report.row("quasifree_fock_vs_direct", 1e-10, quasifree);
    let convention = match cfg.verify.convention {
        Convention::Heisenberg => EvolutionConvention::Heisenberg,
        Convention::Reversed => EvolutionConvention::Reversed,
    };
    report.row("kms_condition", 1e-10, kms_residual(&state, &h, beta, &x, &y, convention)?);

    if cfg.verify.half_line {
        half_line_checks(cfg, &g, &m, &n, &mut report)?;
    } else {
        report.note("half-line checks disabled".into());
    }
    Ok(report)
}

fn half_line_checks(
    cfg: &ScenarioConfig,
    g: &DhoGenerator,
    m: &RVec,
    n: &RVec,
    report: &mut Report,
) -> Result<(), Failure> {
    let grid = decay_grid(cfg)?;
    report.row(
        "lyapunov_gram",
        1e-10,
        (lyapunov_gram(g)? - g.space().identity()).norm(),
    );

    let jm = inject_halfline(g, m, &grid)?;
    report.row("halfline_isometry", 1e-6, (jm.norm_sq() - 1.0).abs());
    let mut comp = 0.0_f64;
    let mut routes = 0.0_f64;
    for &t in &cfg.t_samples {
        let tm = g.evolve_closed_form(t)?.into_matrix() * m;
        comp = comp.max((compress(&shift(&jm, t)?, g)? - tm).norm());
        routes = routes.max(decay_expectation(g, m, n, t, &grid)?.deviation());
    }
    report.row("halfline_compression", 1e-6, comp);
    report.row("decay_routes", 1e-6, routes);

    if 2 * cfg.n_modes + 2 <= FOCK_MODE_LIMIT {
        let mut fock = 0.0_f64;
        for &t in &cfg.t_samples {
            let reference = decay_expectation(g, m, n, t, &grid)?.analytic;
            fock = fock.max((fock_decay_expectation(g, m, n, t, &grid, FOCK_MODE_LIMIT)? - reference).norm());
        }
        report.row("decay_fock_route", 1e-6, fock);
    } else {
        report.note("Fock decay route skipped: truncated subspace exceeds 6 modes".into());
    }

    let horizon = cfg.t_samples.iter().copied().fold(0.0, f64::max).max(1.0);
    let values: Vec<f64> = (0..50)
        .map(|i| {
            let t = horizon * i as f64 / 49.0;
            let tt = g.evolve_closed_form(t)?.into_matrix();
            Ok((&tt * m).norm_squared())
        })
        .collect::<Result<_, Failure>>()?;
    let rise = values.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    report.row("decay_monotone", 0.0, rise);

    let spectrum_grid = HalfLineGrid::new(cfg.dt, cfg.t_max, 0.0)?;
    let fft = spectral_amplitude_fft(g, m, &spectrum_grid, None)?;
    let closed = spectral_amplitude_closed(g, m, &fft.energies)?;
    let limit = 10.0_f64.min(PI / (4.0 * cfg.dt));
    let sup = fft
        .energies
        .iter()
        .enumerate()
        .filter(|(_, e)| e.abs() <= limit)
        .map(|(k, _)| (&fft.amplitudes[k] - &closed.amplitudes[k]).norm())
        .fold(0.0, f64::max);
    report.row("spectrum_fft_vs_closed", 1e-4, sup);
    report.row("spectral_mass", 1e-4, (spectral_mass(g, m, 200_000)? - 1.0).abs());

    if g.regime() == DampingRegime::Critical {
        let kernel = critical_kernel(g)?;
        report.row("critical_kernel_dim", 0.5, (kernel.len() as f64 - cfg.n_modes as f64).abs());
        let mut worst = 0.0_f64;
        for v in &kernel {
            for &t in &cfg.t_samples {
                let tt = g.evolve_closed_form(t)?.into_matrix();
                worst = worst.max((&tt * v - v * (-cfg.gamma * t).exp()).norm());
            }
        }
        report.row("critical_exponential", 1e-10, worst);
    }
    Ok(())
}
