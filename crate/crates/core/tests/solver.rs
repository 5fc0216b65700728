use std::collections::BTreeMap;
use std::f64::consts::PI;

use micropolar::datagen::{make_torus_field, DataKind, DataSpec};
use micropolar::linear::apply_linear;
use micropolar::solver::{
    difference_from_linear, energy_balance_residual, run, write_trajectory_csv, Solver, SolverConfig,
    TRAJECTORY_HEADER,
};
use micropolar::spectral::grad_norm_sq;
use micropolar::{Complex64 as C, GridSpec, MaterialParams, SpectralField, StateSpectral};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ZERO: C = C::new(0.0, 0.0);

fn params() -> MaterialParams {
    MaterialParams::new(0.1, 0.1, 0.1, 0.1).unwrap()
}

fn grid(n: usize) -> GridSpec {
    GridSpec::new(n, 2.0 * PI).unwrap()
}

fn data(g: &GridSpec, amp: f64, seed: u64) -> StateSpectral {
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

fn max_abs_diff(a: &StateSpectral, b: &StateSpectral) -> f64 {
    a.sub(b).unwrap().u.max_abs().max(a.sub(b).unwrap().w.max_abs())
}

#[test]
fn zero_state_stays_zero() {
    let g = grid(16);
    let traj = run(SolverConfig::new(g, params(), 0.01, 0.1), &StateSpectral::zeros(g)).unwrap();
    assert_eq!(traj.final_state, StateSpectral::zeros(g));
    assert!(traj.energies().iter().all(|&e| e == 0.0));
}

#[test]
fn masked_advection_reproduces_linear_flow() {
    let g = grid(16);
    let z0 = data(&g, 1.0, 3);
    let mut cfg = SolverConfig::new(g, params(), 0.05, 1.0);
    cfg.nonlinear = false;
    cfg.snapshot_every = Some(1);
    let traj = run(cfg, &z0).unwrap();
    let scale = z0.u.max_abs().max(z0.w.max_abs());
    for (t, z) in &traj.snapshots {
        let lin = apply_linear(&params(), &z0, *t).unwrap();
        assert!(max_abs_diff(z, &lin) <= 1e-12 * scale, "t={t}");
    }
}

#[test]
fn advection_is_energy_neutral() {
    let g = grid(16);
    let s = Solver::new(SolverConfig::new(g, params(), 0.01, 0.01)).unwrap();
    for seed in 0..5 {
        let z = data(&g, 1.0, seed);
        let n = s.nonlinear_rhs(&z).unwrap();
        let p = z.u.inner(&n.u).unwrap().re + z.w.inner(&n.w).unwrap().re;
        let grad = (grad_norm_sq(&z.u) + grad_norm_sq(&z.w)).sqrt();
        assert!(p.abs() <= 1e-11 * z.energy() * grad, "seed {seed}: {p}");
    }
}

/// Direct convolution of the advection terms over the nonzero modes of `z`.
fn advection_by_convolution(g: &GridSpec, z: &StateSpectral, n_cut: i64) -> StateSpectral {
    let support: Vec<usize> = (0..g.len())
        .filter(|&i| z.u.at(i) != [ZERO; 3] || z.w.at(i) != [ZERO; 3])
        .collect();
    let mut acc: BTreeMap<[i64; 3], ([C; 3], [C; 3])> = BTreeMap::new();
    for &p in &support {
        let v = z.u.at(p);
        for &q in &support {
            let xq = g.wavenumber(q);
            let (mp, mq) = (g.mode(p), g.mode(q));
            let k = [mp[0] + mq[0], mp[1] + mq[1], mp[2] + mq[2]];
            if k.iter().map(|c| c * c).sum::<i64>() > n_cut * n_cut {
                continue;
            }
            let vdq = (v[0] * xq[0] + v[1] * xq[1] + v[2] * xq[2]) * C::new(0.0, 1.0);
            let e = acc.entry(k).or_insert(([ZERO; 3], [ZERO; 3]));
            let (uq, wq) = (z.u.at(q), z.w.at(q));
            for c in 0..3 {
                e.0[c] += vdq * uq[c];
                e.1[c] += vdq * wq[c];
            }
        }
    }
    let mut u = SpectralField::zeros(*g);
    let mut w = SpectralField::zeros(*g);
    for (k, (a, b)) in acc {
        let idx = g.index_of(k);
        if g.is_nyquist(idx) {
            continue;
        }
        let xi = g.wavenumber(idx);
        let r: f64 = xi.iter().map(|x| x * x).sum();
        let proj = if r > 0.0 {
            let d = (a[0] * xi[0] + a[1] * xi[1] + a[2] * xi[2]) / r;
            [0, 1, 2].map(|c| a[c] - d * xi[c])
        } else {
            a
        };
        u.set(idx, proj.map(|x| -x));
        w.set(idx, b.map(|x| -x));
    }
    StateSpectral::new(u, w).unwrap()
}

fn sparse_state(g: &GridSpec, rng: &mut ChaCha8Rng, modes: usize, n_cut: i64) -> StateSpectral {
    let mut u = SpectralField::zeros(*g);
    let mut w = SpectralField::zeros(*g);
    let mut placed = 0;
    while placed < modes {
        let m = [0; 3].map(|_| rng.random_range(-n_cut..=n_cut));
        if m.iter().map(|c| c * c).sum::<i64>() > n_cut * n_cut || m == [0, 0, 0] {
            continue;
        }
        let idx = g.index_of(m);
        let xi = g.wavenumber(idx);
        let r: f64 = xi.iter().map(|x| x * x).sum();
        let mut draw = || [0; 3].map(|_| C::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let a = draw();
        let d = (a[0] * xi[0] + a[1] * xi[1] + a[2] * xi[2]) / r;
        let a = [0, 1, 2].map(|c| a[c] - d * xi[c]);
        let b = draw();
        let neg = g.conjugate_index(idx);
        u.set(idx, a);
        u.set(neg, a.map(|x| x.conj()));
        w.set(idx, b);
        w.set(neg, b.map(|x| x.conj()));
        placed += 1;
    }
    StateSpectral::new(u, w).unwrap()
}

#[test]
fn pseudospectral_advection_matches_direct_convolution() {
    let g = grid(16);
    let n_cut = 5;
    let s = Solver::new(SolverConfig::new(g, params(), 0.01, 0.01)).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let z = sparse_state(&g, &mut rng, 4, n_cut);
        let fast = s.nonlinear_rhs(&z).unwrap();
        let slow = advection_by_convolution(&g, &z, n_cut);
        let scale = slow.u.max_abs().max(slow.w.max_abs());
        assert!(scale > 0.0);
        assert!(max_abs_diff(&fast, &slow) <= 1e-12 * scale);
    }
}

#[test]
fn single_transverse_mode_is_steady_under_advection() {
    let g = grid(16);
    let s = Solver::new(SolverConfig::new(g, params(), 0.01, 0.01)).unwrap();
    let mut u = SpectralField::zeros(g);
    let mut w = SpectralField::zeros(g);
    let idx = g.index_of([2, 0, 0]);
    let neg = g.conjugate_index(idx);
    u.set(idx, [ZERO, C::new(0.3, -0.2), C::new(0.1, 0.5)]);
    u.set(neg, [ZERO, C::new(0.3, 0.2), C::new(0.1, -0.5)]);
    w.set(idx, [C::new(1.0, 0.0), C::new(0.0, 0.4), ZERO]);
    w.set(neg, [C::new(1.0, 0.0), C::new(0.0, -0.4), ZERO]);
    let n = s.nonlinear_rhs(&StateSpectral::new(u, w).unwrap()).unwrap();
    assert!(n.u.max_abs() <= 1e-15 && n.w.max_abs() <= 1e-15);
}

#[test]
fn run_preserves_support_and_incompressibility() {
    let g = grid(16);
    let z0 = data(&g, 1.0, 9);
    let mut cfg = SolverConfig::new(g, params(), 0.02, 0.4);
    cfg.snapshot_every = Some(5);
    let s = Solver::new(cfg).unwrap();
    let traj = s.run(&z0).unwrap();
    for (t, z) in &traj.snapshots {
        assert!(s.is_admissible(z), "t={t}");
        assert!(z.divergence_defect() <= 1e-11, "t={t}");
        assert!(z.u.is_hermitian(1e-12 * z0.u.max_abs()));
    }
}

#[test]
fn rejects_untruncated_or_compressible_data() {
    let g = grid(16);
    let s = Solver::new(SolverConfig::new(g, params(), 0.01, 0.01)).unwrap();
    let mut z = StateSpectral::zeros(g);
    z.w.set(g.index_of([7, 0, 0]), [C::new(1.0, 0.0); 3]);
    assert!(s.run(&z).is_err());
    assert!(s.nonlinear_rhs(&z).is_err());
    let mut z = StateSpectral::zeros(g);
    z.u.set(g.index_of([1, 0, 0]), [C::new(1.0, 0.0), ZERO, ZERO]);
    assert!(s.run(&z).is_err());
}

#[test]
fn rotation_is_sourced_by_velocity() {
    let g = grid(16);
    let mut z0 = data(&g, 1.0, 4);
    z0.w = SpectralField::zeros(g);
    let traj = run(SolverConfig::new(g, params(), 0.01, 0.5), &z0).unwrap();
    assert!(traj.records[1].e_w > 0.0);
    let last = traj.records.last().unwrap().e_w;
    let peak = traj.records.iter().map(|r| r.e_w).fold(0.0, f64::max);
    assert!(last < peak);
}

#[test]
fn energy_never_increases() {
    let g = grid(16);
    let z0 = data(&g, 1.0, 2);
    let dt = 0.01;
    let traj = run(SolverConfig::new(g, params(), dt, 1.0), &z0).unwrap();
    let e = traj.energies();
    for k in 1..e.len() {
        assert!(e[k] <= e[k - 1] * (1.0 + dt * dt), "step {k}");
    }
    assert!(e[e.len() - 1] <= e[0]);
}

#[test]
fn mean_modes_follow_the_linear_law() {
    let g = grid(16);
    let mut z0 = data(&g, 1.0, 6);
    z0.u.set(0, [C::new(0.2, 0.0), C::new(-0.1, 0.0), ZERO]);
    z0.w.set(0, [ZERO, C::new(0.5, 0.0), C::new(0.3, 0.0)]);
    let p = params();
    let t = 0.5;
    let traj = run(SolverConfig::new(g, p, 0.01, t), &z0).unwrap();
    let zf = &traj.final_state;
    for c in 0..3 {
        assert!((zf.u.at(0)[c] - z0.u.at(0)[c]).norm() <= 1e-13);
    }
    let mut cfg = SolverConfig::new(g, p, 0.01, t);
    cfg.nonlinear = false;
    let masked = run(cfg, &z0).unwrap().final_state;
    let decay = (-4.0 * p.chi * t).exp();
    for c in 0..3 {
        assert!((masked.w.at(0)[c] - z0.w.at(0)[c] * decay).norm() <= 1e-14);
    }
}

#[test]
fn balance_residual_basics() {
    let g = grid(16);
    let z0 = data(&g, 0.05, 1);
    let traj = run(SolverConfig::new(g, params(), 0.01, 0.2), &z0).unwrap();
    assert_eq!(energy_balance_residual(&traj, &params(), 0.1, 0.1).unwrap(), 0.0);
    assert!(energy_balance_residual(&traj, &params(), 0.2, 0.1).is_err());
    assert!(energy_balance_residual(&traj, &params(), 0.105, 0.2).is_err());
    let r = energy_balance_residual(&traj, &params(), 0.0, 0.2).unwrap();
    assert!(r.abs() <= 1e-4 * z0.energy(), "{r}");
}

#[test]
fn spinless_balance_drops_zero_coefficients() {
    let g = grid(16);
    let p = MaterialParams::new(0.1, 0.1, 0.0, 0.0).unwrap();
    let z0 = data(&g, 1.0, 8);
    let traj = run(SolverConfig::new(g, p, 0.01, 0.2), &z0).unwrap();
    let r = &traj.records[3];
    assert_eq!(r.dissipation(&p), p.mu * r.d_grad_u + p.chi * r.d_curl2w);
}

#[test]
fn gap_from_linear_starts_at_zero() {
    let g = grid(16);
    let z0 = data(&g, 1.0, 12);
    let mut cfg = SolverConfig::new(g, params(), 0.02, 1.0);
    cfg.snapshot_every = Some(5);
    let traj = run(cfg, &z0).unwrap();
    let gap = difference_from_linear(&traj, &params()).unwrap();
    assert_eq!(gap.values[0], 0.0);
    assert!(gap.values[1] > 0.0);
    assert_eq!(gap.times.len(), 11);
}

#[test]
fn trajectory_csv_layout() {
    let g = grid(8);
    let mut cfg = SolverConfig::new(g, params(), 0.1, 0.4);
    cfg.record_every = 2;
    let traj = run(cfg, &data(&g, 1.0, 0)).unwrap();
    let mut out = Vec::new();
    write_trajectory_csv(&mut out, &traj).unwrap();
    let text = String::from_utf8(out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], TRAJECTORY_HEADER);
    assert_eq!(lines.len(), 4);
    assert!(lines[1..].iter().all(|l| l.split(',').count() == 7));
}

#[test]
fn config_validation() {
    let g = grid(16);
    let mut cfg = SolverConfig::new(g, params(), 0.03, 0.1);
    assert!(cfg.validate().is_err());
    cfg.dt = 0.025;
    cfg.record_every = 3;
    assert!(cfg.validate().is_err());
    cfg.record_every = 2;
    cfg.validate().unwrap();
    cfg.n_cut = 9;
    assert!(cfg.validate().is_err());
}
