//! Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

use std::f64::consts::PI;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::process::ExitCode;
use std::time::Instant;

use micropolar::continuum::{
    decay_curves, enstrophy_identity_residual, l2_norm_continuum, logspace, profile_error_curves,
    ContinuumProfile, QuadratureSpec,
};
use micropolar::datagen::{make_continuum_profile, make_torus_field, Coupling, DataKind, DataSpec};
use micropolar::linear::oracle::{oracle_gap, random_case};
use micropolar::linear::{apply_linear, propagator_matrix, PropagatorMatrix};
use micropolar::solver::{difference_from_linear, energy_balance_residual, run, Solver, SolverConfig};
use micropolar::spectral::grad_norm_sq;
use micropolar::{Complex64 as C, GridSpec, MaterialParams, StateSpectral};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn params(mu: f64, chi: f64, gamma: f64, kappa: f64) -> MaterialParams {
    MaterialParams::new(mu, chi, gamma, kappa).unwrap()
}

fn log_uniform(rng: &mut ChaCha8Rng, lo: f64, hi: f64) -> f64 {
    rng.random_range(lo.ln()..hi.ln()).exp()
}

fn random_direction(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z: f64 = rng.random_range(-1.0..1.0);
    let phi: f64 = rng.random_range(0.0..2.0 * PI);
    let s = (1.0 - z * z).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

fn random_params(rng: &mut ChaCha8Rng) -> MaterialParams {
    let opt = |rng: &mut ChaCha8Rng| if rng.random_bool(0.5) { 0.0 } else { log_uniform(rng, 0.1, 10.0) };
    let (g, k) = (opt(rng), opt(rng));
    params(log_uniform(rng, 0.1, 10.0), log_uniform(rng, 0.1, 10.0), g, k)
}

fn frobenius_diff(a: &PropagatorMatrix, b: &PropagatorMatrix) -> f64 {
    let mut s = 0.0;
    for i in 0..6 {
        for j in 0..6 {
            s += (a.0[i][j] - b.0[i][j]).norm_sqr();
        }
    }
    s.sqrt()
}

fn torus_grid(n: usize) -> GridSpec {
    GridSpec::new(n, 2.0 * PI).unwrap()
}

fn torus_data(g: &GridSpec, amp: f64, seed: u64) -> StateSpectral {
    let spec = DataSpec {
        kind: DataKind::TorusRandom,
        q: 1.0,
        sigma: 2.0,
        amplitude: amp,
        w_amplitude: amp,
        seed,
        ..DataSpec::default()
    };
    make_torus_field(g, &spec, None).unwrap()
}

fn profile(q: f64, amp: f64, w_amp: f64) -> ContinuumProfile {
    make_continuum_profile(&DataSpec {
        q,
        amplitude: amp,
        w_amplitude: w_amp,
        ..DataSpec::default()
    })
    .unwrap()
}

fn symbol_oracle() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let draws = 1000;
    let mut worst: f64 = 0.0;
    for _ in 0..draws {
        let c = random_case(&mut rng);
        let g = oracle_gap(&c.params, c.xi, c.t).map_err(|e| e.to_string())?;
        worst = worst.max(g.scaled);
    }
    check(worst <= 1e-8, format!("max |K - K_oracle|/(1+|K_oracle|) = {worst:.3e} over {draws} draws"))
}

fn identity_cases() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut at_zero_time: f64 = 0.0;
    let mut at_zero_freq: f64 = 0.0;
    for _ in 0..200 {
        let p = random_params(&mut rng);
        let r = log_uniform(&mut rng, 1e-4, 1e3);
        let xi = random_direction(&mut rng).map(|d| d * r);
        let k = propagator_matrix(&p, xi, 0.0).map_err(|e| e.to_string())?;
        at_zero_time = at_zero_time.max(frobenius_diff(&k, &PropagatorMatrix::identity()));
        for t in std::iter::once(0.0).chain(logspace(1e-3, 1e3, 13)) {
            let k = propagator_matrix(&p, [0.0; 3], t).map_err(|e| e.to_string())?;
            let mut expect = PropagatorMatrix::identity();
            for i in 3..6 {
                expect.0[i][i] = C::new((-4.0 * p.chi * t).exp(), 0.0);
            }
            at_zero_freq = at_zero_freq.max(frobenius_diff(&k, &expect));
        }
    }
    check(
        at_zero_time <= 1e-14 && at_zero_freq <= 1e-12,
        format!("|K(xi,0) - I| = {at_zero_time:.3e}, |K(0,t) - diag(I, e^(-4chi t) I)| = {at_zero_freq:.3e}"),
    )
}

fn longitudinal_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut worst: f64 = 0.0;
    for _ in 0..1000 {
        let p = random_params(&mut rng);
        let r = log_uniform(&mut rng, 1e-4, 1e3);
        let t = log_uniform(&mut rng, 1e-3, 1e3);
        let d = random_direction(&mut rng);
        let xi = d.map(|x| x * r);
        let k = propagator_matrix(&p, xi, t).map_err(|e| e.to_string())?;
        let expect = (-4.0 * p.chi * t - (p.gamma + p.kappa) * t * r * r).exp();
        // d^T K_ww d and |K_ww d - (d^T K_ww d) d|, |K_uw d|.
        let kd: Vec<C> = (0..6).map(|i| (0..3).map(|j| k.0[i][3 + j] * d[j]).sum()).collect();
        let long: C = (0..3).map(|i| kd[3 + i] * d[i]).sum();
        let leak: f64 = (0..3).map(|i| (kd[3 + i] - long * d[i]).norm()).fold(0.0, f64::max);
        let to_u: f64 = (0..3).map(|i| kd[i].norm()).fold(0.0, f64::max);
        worst = worst.max((long - expect).norm()).max(leak).max(to_u);
    }
    check(worst <= 1e-12, format!("max longitudinal deviation {worst:.3e} over 1000 draws"))
}

fn semigroup() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let g = GridSpec::new(16, 5.0).unwrap();
    let mut worst: f64 = 0.0;
    for seed in 0..10 {
        let p = random_params(&mut rng);
        let z = make_torus_field(
            &g,
            &DataSpec {
                kind: DataKind::TorusRandom,
                sigma: 4.0,
                w_amplitude: 1.0,
                seed,
                ..DataSpec::default()
            },
            Some(8),
        )
        .unwrap();
        let (t, s) = (log_uniform(&mut rng, 1e-3, 10.0), log_uniform(&mut rng, 1e-3, 10.0));
        let whole = apply_linear(&p, &z, t + s).unwrap();
        let split = apply_linear(&p, &apply_linear(&p, &z, s).unwrap(), t).unwrap();
        let denom = whole.energy().sqrt().max(f64::MIN_POSITIVE);
        worst = worst.max(whole.sub(&split).unwrap().energy().sqrt() / denom);
    }
    check(worst <= 1e-10, format!("max relative semigroup defect {worst:.3e} over 10 states"))
}

fn linear_decay_rates() -> Outcome {
    let p = params(1.0, 1.0, 0.0, 0.0);
    let times = logspace(1e2, 1e4, 9);
    let quad = QuadratureSpec::for_window(1.0, 1e4);
    let mut ok = true;
    let mut detail = Vec::new();
    for q in [0.0, 1.0] {
        let gamma = q + 1.5;
        let c = decay_curves(&p, &profile(q, 1.0, 0.0), &times, &quad).map_err(|e| e.to_string())?;
        let (su, sw) = (c["uL"].fitted_slope, c["wL"].fitted_slope);
        ok &= (su + gamma).abs() <= 0.10 && (sw + gamma + 1.0).abs() <= 0.15;
        detail.push(format!("q={q}: |u|^2 {su:.4} (target {:.1}), |w|^2 {sw:.4} (target {:.1})", -gamma, -gamma - 1.0));
    }
    check(ok, detail.join("; "))
}

fn profile_errors() -> Outcome {
    let p = params(1.0, 1.0, 0.0, 0.0);
    let times = logspace(10.0, 1e3, 9);
    let quad = QuadratureSpec::for_window(1.0, 1e3);
    let (eu, ew) = profile_error_curves(&p, &profile(0.0, 1.0, 0.0), &times, &quad).map_err(|e| e.to_string())?;
    let (_, ew0) = profile_error_curves(&p, &profile(0.0, 0.0, 1.0), &times, &quad).map_err(|e| e.to_string())?;
    let last_decade: Vec<f64> = times
        .iter()
        .zip(&eu.values)
        .filter(|(t, _)| **t >= 1e2)
        .map(|(t, e)| t * e)
        .collect();
    let t_err_monotone = last_decade.windows(2).all(|w| w[1] <= w[0]);
    check(
        eu.fitted_slope <= -0.9 && ew.fitted_slope <= -1.35 && ew0.fitted_slope <= -1.85 && t_err_monotone,
        format!(
            "w0=0: u slope {:.4}, w slope {:.4}; u0=0: w slope {:.4}; t*err_u non-increasing on [1e2,1e3]: {t_err_monotone}",
            eu.fitted_slope, ew.fitted_slope, ew0.fitted_slope
        ),
    )
}

fn enstrophy() -> Outcome {
    let prof = profile(0.0, 1.0, 1.0);
    let times = logspace(1.0, 1e3, 13);
    let mut worst: f64 = 0.0;
    let mut monotone = true;
    for (mu, chi, gamma, kappa) in [(1.0, 1.0, 0.0, 0.0), (1.0, 1.0, 0.5, 0.0), (2.0, 1.0, 0.0, 1.0)] {
        let p = params(mu, chi, gamma, kappa);
        for (t1, t2) in [(1.0, 2.0), (10.0, 20.0)] {
            let quad = QuadratureSpec::for_window(1.0, t2);
            let b = enstrophy_identity_residual(&p, &prof, t1, t2, &quad).map_err(|e| e.to_string())?;
            worst = worst.max(b.relative());
        }
        let quad = QuadratureSpec::for_window(1.0, 1e3);
        let c = decay_curves(&p, &prof, &times, &quad).map_err(|e| e.to_string())?;
        monotone &= c["F"].is_non_increasing(0.0);
    }
    check(
        worst <= 1e-6 && monotone,
        format!("max relative residual {worst:.3e}; F non-increasing: {monotone}"),
    )
}

fn faster_than_heat() -> Outcome {
    let p = params(1.0, 1.0, 0.0, 0.0);
    let prof = make_continuum_profile(&DataSpec {
        w_amplitude: 1.0,
        coupling: Coupling::U0EqualsMinusHalfCurlW0,
        ..DataSpec::default()
    })
    .unwrap();
    let t = 1e3;
    let quad = QuadratureSpec::for_window(1.0, t);
    let coupled = decay_curves(&p, &prof, &[t / 4.0, t / 2.0, t], &quad).map_err(|e| e.to_string())?["uL"].values[2];
    let heat = l2_norm_continuum(
        |x: [f64; 3]| {
            let h = (-p.mu * t * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2])).exp();
            prof.u0_hat(x).map(|z| z * h)
        },
        &quad,
    )
    .map_err(|e| e.to_string())?
    .powi(2);
    check(
        coupled * 10.0 <= heat,
        format!("|u_L(1e3)|^2 = {coupled:.3e}, heat flow of u0 = {heat:.3e}, factor {:.1}", heat / coupled),
    )
}

fn energy_neutrality() -> Outcome {
    let g = torus_grid(32);
    let s = Solver::new(SolverConfig::new(g, params(0.1, 0.1, 0.1, 0.1), 1e-3, 1e-3)).map_err(|e| e.to_string())?;
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut worst: f64 = 0.0;
    for seed in 0..100 {
        let spec = DataSpec {
            kind: DataKind::TorusRandom,
            q: rng.random_range(0.0..2.0),
            sigma: rng.random_range(1.0..6.0),
            amplitude: 1.0,
            w_amplitude: rng.random_range(0.0..2.0),
            seed,
            ..DataSpec::default()
        };
        let z = make_torus_field(&g, &spec, None).unwrap();
        let n = s.nonlinear_rhs(&z).map_err(|e| e.to_string())?;
        let prod = z.u.inner(&n.u).unwrap().re + z.w.inner(&n.w).unwrap().re;
        let scale = z.energy() * (grad_norm_sq(&z.u) + grad_norm_sq(&z.w)).sqrt();
        worst = worst.max(prod.abs() / scale);
    }
    check(worst <= 1e-11, format!("max |<N(z), z>| / (E |grad z|) = {worst:.3e} over 100 states"))
}

fn balance_residual(dt: f64) -> Result<(f64, f64), String> {
    let g = torus_grid(32);
    let p = params(0.1, 0.1, 0.1, 0.1);
    let z0 = torus_data(&g, 0.05, 7);
    let traj = run(SolverConfig::new(g, p, dt, 1.0), &z0).map_err(|e| e.to_string())?;
    let r = energy_balance_residual(&traj, &p, 0.0, 1.0).map_err(|e| e.to_string())?;
    Ok((r, z0.energy()))
}

fn energy_balance_convergence() -> Outcome {
    let (coarse, _) = balance_residual(2e-3)?;
    let (fine, e0) = balance_residual(1e-3)?;
    let ratio = coarse / fine;
    check(
        (3.5..=4.5).contains(&ratio) && fine.abs() <= 1e-5 * e0,
        format!(
            "residual {coarse:.3e} (dt=2e-3), {fine:.3e} (dt=1e-3), ratio {ratio:.3}, |residual|/E(0) = {:.3e}",
            fine.abs() / e0
        ),
    )
}

fn linear_limit() -> Outcome {
    let g = torus_grid(16);
    let p = params(0.1, 0.1, 0.1, 0.1);
    let z0 = torus_data(&g, 1.0, 5);
    let mut cfg = SolverConfig::new(g, p, 0.01, 1.0);
    cfg.nonlinear = false;
    cfg.snapshot_every = Some(1);
    let traj = run(cfg, &z0).map_err(|e| e.to_string())?;
    let scale = z0.u.max_abs().max(z0.w.max_abs());
    let mut masked: f64 = 0.0;
    for (t, z) in &traj.snapshots {
        let d = z.sub(&apply_linear(&p, &z0, *t).unwrap()).unwrap();
        masked = masked.max(d.u.max_abs().max(d.w.max_abs()) / scale);
    }
    let mut gaps = Vec::new();
    for eps in [0.0, 0.5, 1.0, 2.0, 4.0, 8.0] {
        let mut cfg = SolverConfig::new(g, p, 0.01, 1.0);
        cfg.epsilon = eps;
        cfg.snapshot_every = Some(10);
        let traj = run(cfg, &z0).map_err(|e| e.to_string())?;
        let gap = difference_from_linear(&traj, &p).map_err(|e| e.to_string())?;
        gaps.push(gap.values.iter().copied().fold(0.0, f64::max));
    }
    let shrinking = gaps.windows(2).all(|w| w[1] < w[0]);
    let listed: Vec<String> = gaps.iter().map(|g| format!("{g:.3e}")).collect();
    check(
        masked <= 1e-12 && shrinking,
        format!(
            "masked run vs linear flow {masked:.3e}; max gap over eps 0,0.5,1,2,4,8: [{}]",
            listed.join(", ")
        ),
    )
}

fn max_gap(amp: f64) -> Result<f64, String> {
    let g = torus_grid(16);
    let p = params(0.1, 0.1, 0.1, 0.1);
    let z0 = torus_data(&g, amp, 7);
    let mut cfg = SolverConfig::new(g, p, 0.01, 2.0);
    cfg.snapshot_every = Some(10);
    let traj = run(cfg, &z0).map_err(|e| e.to_string())?;
    let gap = difference_from_linear(&traj, &p).map_err(|e| e.to_string())?;
    Ok(gap.values.iter().copied().fold(0.0, f64::max))
}

fn quadratic_fluctuation() -> Outcome {
    let full = max_gap(0.05)?;
    let half = max_gap(0.025)?;
    let ratio = full / half;
    check(
        (3.2..=4.8).contains(&ratio),
        format!("max gap {full:.3e} at amplitude 0.05, {half:.3e} at 0.025, ratio {ratio:.3}"),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("symbol matches matrix-exponential oracle", symbol_oracle),
        ("identity cases", identity_cases),
        ("longitudinal block is exact", longitudinal_exactness),
        ("semigroup property", semigroup),
        ("linear decay rates", linear_decay_rates),
        ("profile errors", profile_errors),
        ("enstrophy identity", enstrophy),
        ("coupled data decays faster than heat", faster_than_heat),
        ("Galerkin energy neutrality", energy_neutrality),
        ("energy balance converges at second order", energy_balance_convergence),
        ("linear limit and mollification", linear_limit),
        ("quadratic smallness of the fluctuation", quadratic_fluctuation),
    ];
    let mut failed = 0;
    for (k, (name, f)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|e| {
            let msg = e
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| e.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_default();
            Err(format!("panicked: {msg}"))
        });
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(d) => println!("PASS {:>2} {name}: {d} [{secs:.1}s]", k + 1),
            Err(d) => {
                failed += 1;
                println!("FAIL {:>2} {name}: {d} [{secs:.1}s]", k + 1)
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
