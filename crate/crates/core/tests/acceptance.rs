//! Acceptance checks, one line per criterion. Runs without the libtest
//! harness so every line is printed whether it passes or not.

use std::f64::consts::PI;
use std::process::ExitCode;

use num_complex::Complex64 as C64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use nonherm::config::{Experiment, ExperimentConfig};
use nonherm::experiments::{self, Table};
use nonherm::hamiltonian::{
    build_heff, evolve_pure, exceptional_eigenvector, kraus_matrix, pt_apply,
    pt_fixed_representative, pt_invariance_check, spectrum, trotter_evolve, trotter_schedule,
    trotter_step_operator, HeffParams, KrausMode,
};
use nonherm::linalg::{CMatrix, CVector};
use nonherm::observables::{asymptotic_mz, concurrence};
use nonherm::quantum::{bell_state, DensityMatrix, PureState};
use nonherm::vqc::{
    build_training_set, finite_difference_gradient, parameter_shift_gradient, pqc_output, train,
    ParamVector, TrainingConfig,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

type M2 = [[C64; 2]; 2];

fn m2_mul(a: &M2, b: &M2) -> M2 {
    let mut r = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            r[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    r
}

/// `exp(-iHt)` by scaling and squaring of a 30-term Taylor series.
fn expm_oracle(omega: f64, gamma: f64, t: f64) -> M2 {
    let h: M2 = [
        [C64::new(0.0, gamma / 2.0), C64::new(omega / 2.0, 0.0)],
        [C64::new(omega / 2.0, 0.0), C64::new(0.0, -gamma / 2.0)],
    ];
    let norm = (omega.abs() + gamma) / 2.0 * t;
    let squarings = (norm.max(1.0).log2().ceil() as u32) + 4;
    let dt = t / f64::from(2u32.pow(squarings));
    let x: M2 = [
        [h[0][0] * C64::new(0.0, -dt), h[0][1] * C64::new(0.0, -dt)],
        [h[1][0] * C64::new(0.0, -dt), h[1][1] * C64::new(0.0, -dt)],
    ];
    let one = C64::new(1.0, 0.0);
    let zero = C64::new(0.0, 0.0);
    let mut sum: M2 = [[one, zero], [zero, one]];
    let mut term = sum;
    for k in 1..30 {
        term = m2_mul(&term, &x);
        let inv = 1.0 / k as f64;
        term = [[term[0][0] * inv, term[0][1] * inv], [term[1][0] * inv, term[1][1] * inv]];
        for i in 0..2 {
            for j in 0..2 {
                sum[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        sum = m2_mul(&sum, &sum);
    }
    sum
}

fn oracle_evolve(omega: f64, gamma: f64, t: f64, psi: [C64; 2]) -> [C64; 2] {
    let a = expm_oracle(omega, gamma, t);
    let v = [
        a[0][0] * psi[0] + a[0][1] * psi[1],
        a[1][0] * psi[0] + a[1][1] * psi[1],
    ];
    let n = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    [v[0] / n, v[1] / n]
}

/// Eigenvalues of a 4×4 complex matrix from its characteristic polynomial
/// (Faddeev–LeVerrier) and Durand–Kerner root finding.
fn eigenvalues_4x4(a: &[[C64; 4]; 4]) -> [C64; 4] {
    let zero = C64::new(0.0, 0.0);
    let mul = |x: &[[C64; 4]; 4], y: &[[C64; 4]; 4]| {
        let mut r = [[zero; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                for k in 0..4 {
                    r[i][j] += x[i][k] * y[k][j];
                }
            }
        }
        r
    };
    let mut coeffs = [C64::new(1.0, 0.0), zero, zero, zero, zero];
    let mut mk = [[zero; 4]; 4];
    for (i, row) in mk.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    for k in 1..=4 {
        let am = mul(a, &mk);
        let tr = am[0][0] + am[1][1] + am[2][2] + am[3][3];
        let ck = -tr / k as f64;
        coeffs[k] = ck;
        mk = am;
        for (i, row) in mk.iter_mut().enumerate() {
            row[i] += ck;
        }
    }
    let eval = |z: C64| coeffs.iter().fold(zero, |acc, &c| acc * z + c);
    let seed = C64::new(0.4, 0.9);
    let mut roots = [seed, seed * seed, seed * seed * seed, seed * seed * seed * seed];
    for _ in 0..2000 {
        for i in 0..4 {
            let r = roots[i];
            let mut denom = C64::new(1.0, 0.0);
            for (j, &s) in roots.iter().enumerate() {
                if j != i {
                    denom *= r - s;
                }
            }
            roots[i] = r - eval(r) / denom;
        }
    }
    roots
}

fn concurrence_oracle(rho: &CMatrix) -> f64 {
    let yy = [
        [0.0, 0.0, 0.0, -1.0],
        [0.0, 0.0, 1.0, 0.0],
        [0.0, 1.0, 0.0, 0.0],
        [-1.0, 0.0, 0.0, 0.0],
    ];
    let zero = C64::new(0.0, 0.0);
    let mut tilde = [[zero; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for l in 0..4 {
                    tilde[i][j] += yy[i][k] * rho[(k, l)].conj() * yy[l][j];
                }
            }
        }
    }
    let mut prod = [[zero; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                prod[i][j] += rho[(i, k)] * tilde[k][j];
            }
        }
    }
    let mut l: Vec<f64> = eigenvalues_4x4(&prod)
        .iter()
        .map(|z| z.re.max(0.0).sqrt())
        .collect();
    l.sort_by(|a, b| b.partial_cmp(a).unwrap());
    (l[0] - l[1] - l[2] - l[3]).max(0.0)
}

fn run_table(experiment: Experiment, json: &str) -> Table {
    let cfg = ExperimentConfig::from_json(json).expect("config");
    experiments::run(experiment, &cfg, 0).expect("run").table
}

fn state_distance(a: &PureState, b: &PureState) -> f64 {
    (1.0 - a.fidelity(b)).max(0.0).sqrt()
}

fn criterion_1() -> Outcome {
    let t = run_table(
        Experiment::SpectrumSweep,
        r#"{"gamma": 1.0, "omega_grid": {"start": -2.0, "stop": 2.0, "points": 4001}}"#,
    );
    let omegas = t.floats("omega");
    let cols = ["re_lambda_plus", "im_lambda_plus", "re_lambda_minus", "im_lambda_minus"];
    let vals: Vec<Vec<f64>> = cols.iter().map(|c| t.floats(c)).collect();
    let mut max_dev: f64 = 0.0;
    let mut structure = true;
    let mut ep_rows = 0;
    for (i, &w) in omegas.iter().enumerate() {
        let d = w * w - 1.0;
        let (re, im) = if d >= 0.0 { (d.sqrt() / 2.0, 0.0) } else { (0.0, (-d).sqrt() / 2.0) };
        max_dev = max_dev
            .max((vals[0][i] - re).abs())
            .max((vals[1][i] - im).abs())
            .max((vals[2][i] + re).abs())
            .max((vals[3][i] + im).abs());
        let p = HeffParams::new(w, 1.0).unwrap();
        let h = build_heff(p);
        let lam = C64::new(vals[0][i], vals[1][i]);
        let det = (h[(0, 0)] - lam) * (h[(1, 1)] - lam) - h[(0, 1)] * h[(1, 0)];
        max_dev = max_dev.max(det.norm());
        if w.abs() == 1.0 {
            ep_rows += 1;
            structure &= vals.iter().all(|v| v[i] == 0.0);
        } else if w.abs() > 1.0 {
            structure &= vals[1][i] == 0.0 && vals[3][i] == 0.0 && vals[0][i] > 0.0;
        } else {
            structure &= vals[0][i] == 0.0 && vals[2][i] == 0.0 && vals[1][i] > 0.0;
        }
    }
    let pass = structure && ep_rows == 2 && max_dev < 1e-12;
    outcome(
        pass,
        format!(
            "{} grid points, structure {}, EP rows {ep_rows}, max deviation from closed form {max_dev:.2e}",
            omegas.len(),
            if structure { "ok" } else { "broken" }
        ),
    )
}

fn criterion_2() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst: f64 = 0.0;
    for _ in 0..100 {
        let p = HeffParams::new(rng.random_range(-3.0..3.0), rng.random_range(0.0..3.0)).unwrap();
        worst = worst.max(pt_invariance_check(p));
    }
    let mut ep_err: f64 = 0.0;
    let mut phase_err: f64 = 0.0;
    for (positive, expected) in [(true, C64::new(0.0, 1.0)), (false, C64::new(0.0, -1.0))] {
        let v = exceptional_eigenvector(positive);
        let w = if positive { 1.0 } else { -1.0 };
        let h = build_heff(HeffParams::new(w, 1.0).unwrap());
        ep_err = ep_err.max(h.mul_vec(&v).norm());
        let image = pt_apply(&v);
        phase_err = phase_err.max(image.max_abs_diff(&v.scale(expected)));
        let fixed = pt_fixed_representative(&v).expect("PT-invariant ray");
        ep_err = ep_err.max(pt_apply(&fixed).max_abs_diff(&fixed));
        let s = spectrum(HeffParams::new(w, 1.0).unwrap());
        ep_err = ep_err.max((s.phi_plus.inner(&v).norm() - 1.0).abs());
    }
    let pass = worst < 1e-14 && ep_err < 1e-14 && phase_err < 1e-14;
    outcome(
        pass,
        format!(
            "max |σx·H*·σx − H| {worst:.1e} over 100 draws; EP fixed-point residual {ep_err:.1e}; printed EP vectors map to ±i·v (residual {phase_err:.1e})"
        ),
    )
}

fn criterion_3() -> Outcome {
    let (omega, gamma, t) = (0.01, 0.01 / 8.0, 300.0);
    let p = HeffParams::new(omega, gamma).unwrap();
    let psi = PureState::zero();
    let ex = oracle_evolve(omega, gamma, t, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let oracle = PureState::new(CVector::new(ex.to_vec())).unwrap();
    let exact = evolve_pure(p, t, &psi).unwrap();
    let lib_vs_oracle = state_distance(&exact, &oracle);
    let d300 = state_distance(&trotter_evolve(&psi, p, t, 300, KrausMode::ExactKraus).unwrap().state, &exact);
    let d600 = state_distance(&trotter_evolve(&psi, p, t, 600, KrausMode::ExactKraus).unwrap().state, &exact);
    let ratio = d300 / d600;
    let kraus_gap = kraus_matrix(KrausMode::ExactKraus, 0.1).max_abs_diff(&kraus_matrix(KrausMode::GaussianKraus, 0.1));
    let pass = lib_vs_oracle < 1e-10 && d300 < 5e-3 && (ratio - 2.0).abs() <= 0.3 && kraus_gap < 1e-6;
    outcome(
        pass,
        format!(
            "distance K=300 {d300:.3e}, K=600 {d600:.3e}, ratio {ratio:.3}; exact vs Taylor oracle {lib_vs_oracle:.1e}; Kraus gap at φ=0.1 {kraus_gap:.2e}"
        ),
    )
}

fn criterion_4() -> Outcome {
    let p = HeffParams::new(0.01, 0.00125).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let mut tele: f64 = 0.0;
    for _ in 0..5 {
        let amps: Vec<C64> = (0..2)
            .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
            .collect();
        let psi = PureState::normalized(CVector::new(amps)).unwrap();
        for mode in [KrausMode::ExactKraus, KrausMode::GaussianKraus] {
            let steps = 200;
            let run = trotter_evolve(&psi, p, 200.0, steps, mode).unwrap();
            let op = trotter_step_operator(&trotter_schedule(p, 200.0, steps).unwrap(), mode);
            let mut v = psi.amplitudes().clone();
            for _ in 0..steps {
                v = op.mul_vec(&v);
            }
            tele = tele.max((run.cumulative_probability - v.norm_sqr()).abs());
        }
    }
    let q = HeffParams::from_ratio(0.01, 0.89).unwrap();
    let run = trotter_evolve(&PureState::zero(), q, 500.0, 500, KrausMode::ExactKraus).unwrap();
    let mut logp = Vec::with_capacity(501);
    let mut acc = 0.0;
    logp.push(acc);
    for pk in &run.per_step {
        acc += pk.ln();
        logp.push(acc);
    }
    let xs: Vec<f64> = (100..=500).map(|k| k as f64).collect();
    let ys: Vec<f64> = (100..=500).map(|k| logp[k]).collect();
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    let syy: f64 = ys.iter().map(|y| (y - my) * (y - my)).sum();
    let slope = sxy / sxx;
    let r2 = sxy * sxy / (sxx * syy);
    let pass = tele < 1e-10 && r2 > 0.99 && slope < 0.0;
    outcome(
        pass,
        format!(
            "telescoping residual {tele:.1e}; ω=0.89Γ log-probability slope {slope:.3e}/step, R² {r2:.6}, P(500) {:.3e}",
            run.cumulative_probability
        ),
    )
}

fn criterion_5() -> Outcome {
    let t8 = run_table(
        Experiment::P0Dynamics,
        r#"{"omega": 0.01, "omega_over_gamma": 8.0, "steps": 800, "engine": "exact"}"#,
    );
    let p0 = t8.floats("p0");
    let first_min = (1..p0.len() - 1).find(|&k| p0[k] <= p0[k - 1] && p0[k] < p0[k + 1]).unwrap_or(0);
    let g = 0.01 / 8.0;
    let ex = oracle_evolve(0.01, g, first_min as f64, [C64::new(1.0, 0.0), C64::new(0.0, 0.0)]);
    let oracle_gap = (ex[0].norm_sqr() - p0[first_min]).abs();
    let t089 = run_table(
        Experiment::P0Dynamics,
        r#"{"omega": 0.01, "omega_over_gamma": 0.89, "steps": 800, "engine": "exact"}"#,
    );
    let q = t089.floats("p0");
    let p777 = q[777];
    let later_min = q[100..].iter().cloned().fold(f64::INFINITY, f64::min);
    let lam = (0.01f64 * 0.01 - g * g).sqrt() / 2.0;
    let analytic_zero = (PI - (2.0 * lam / g).atan()) / lam;
    let window_min = p0[280..=340].iter().cloned().fold(f64::INFINITY, f64::min);
    let pass = (280..=340).contains(&first_min)
        && p0[first_min] <= 0.08
        && oracle_gap < 1e-10
        && (0.72..=0.76).contains(&p777)
        && later_min >= 0.72;
    outcome(
        pass,
        format!(
            "ω=8Γ first minimum at step {first_min} value {:.2e} (analytic zero of ⟨0|A_t|0⟩ at t = {analytic_zero:.2}; min over [280, 340] {window_min:.2e}; P₀(300) {:.4}, reference 0.0403); ω=0.89Γ P₀(777) {p777:.4} (reference 0.7382), min after step 100 {later_min:.4}",
            p0[first_min],
            p0[300]
        ),
    )
}

fn criterion_6() -> Outcome {
    let t = run_table(
        Experiment::MzPhaseSweep,
        r#"{"omega": 0.01, "gamma_ratios": [0.7, 0.8, 0.9, 1.0, 1.1, 1.2]}"#,
    );
    let ratios = t.floats("omega_over_gamma");
    let sim = t.floats("mz_long_time_simulated");
    let formula = t.floats("mz_asymptotic_formula");
    let mut pass = true;
    let mut parts = Vec::new();
    for (i, &r) in ratios.iter().enumerate() {
        let target = if r < 1.0 { (1.0 - r * r).sqrt() } else { 0.0 };
        let tol = if r < 1.0 { 0.01 } else { 0.02 };
        pass &= (sim[i] - target).abs() < tol && (formula[i] - target).abs() < 1e-12;
        parts.push(format!("{r:.1}→{:.4}", sim[i]));
    }
    let monotone = sim.windows(2).take(3).all(|w| w[1] < w[0]);
    let at_ep = sim[3].abs() < 0.01;
    let mz = run_table(
        Experiment::MzDynamics,
        r#"{"omega": 0.01, "omega_over_gamma": 0.8, "steps": 8000, "record_every": 100}"#,
    );
    let tail = *mz.floats("mz").last().unwrap();
    let p = HeffParams::from_ratio(0.01, 0.8).unwrap();
    pass &= monotone && at_ep && (tail - 0.6).abs() < 0.01 && (asymptotic_mz(p).unwrap() - 0.6).abs() < 1e-12;
    outcome(
        pass,
        format!(
            "simulated {}; monotone to EP {monotone}; ω=0.8Γ Mz(8000) {tail:.4}",
            parts.join(", ")
        ),
    )
}

fn criterion_7() -> Outcome {
    let p = HeffParams::new(0.01, 0.00125).unwrap();
    let ts = build_training_set(p, 300.0).unwrap();
    let mut reached = 0;
    let mut costs = Vec::new();
    let mut trained = None;
    for seed in 0..5 {
        let cfg = TrainingConfig {
            max_iterations: 2000,
            target_cost: 1e-4,
            seed,
            ..TrainingConfig::default()
        };
        let out = train(&ts, &cfg).unwrap();
        let best = out
            .trace
            .iterations
            .iter()
            .filter(|e| e.iteration <= 2000)
            .map(|e| e.cost)
            .fold(f64::INFINITY, f64::min);
        costs.push(format!("{best:.1e}@{}", out.trace.iterations.len() - 1));
        if best < 1e-3 {
            reached += 1;
            trained.get_or_insert(out.params);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut grad_err: f64 = 0.0;
    for _ in 0..20 {
        let r = ParamVector::random(&mut rng);
        let ps = parameter_shift_gradient(&r, &ts).unwrap();
        let fd = finite_difference_gradient(&r, &ts, 1e-5).unwrap();
        grad_err = ps.iter().zip(&fd).map(|(a, b)| (a - b).abs()).fold(grad_err, f64::max);
    }
    let mut min_fid = f64::NAN;
    if let Some(params) = trained {
        min_fid = 1.0;
        for _ in 0..20 {
            let amps: Vec<C64> = (0..2)
                .map(|_| C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)))
                .collect();
            let psi = PureState::normalized(CVector::new(amps)).unwrap();
            let (out, _) = pqc_output(&params, &psi).unwrap();
            let a = psi.amplitudes();
            let ex = oracle_evolve(0.01, 0.00125, 300.0, [a[0], a[1]]);
            let ideal = PureState::new(CVector::new(ex.to_vec())).unwrap();
            min_fid = min_fid.min(out.fidelity(&ideal));
        }
    }
    let pass = reached >= 3 && grad_err < 1e-5 && min_fid > 0.995;
    outcome(
        pass,
        format!(
            "{reached}/5 seeds below 1e-3 (best cost@iterations: {}); max |PS − FD| {grad_err:.1e}; held-out min fidelity {min_fid:.6}",
            costs.join(" ")
        ),
    )
}

fn criterion_8() -> Outcome {
    let broken_rate = {
        let p = HeffParams::from_ratio(0.01, 0.89).unwrap();
        (p.gamma * p.gamma - p.omega * p.omega).sqrt()
    };
    let horizon = (20.0 / broken_rate).ceil() as usize;
    let t089 = run_table(
        Experiment::ConcurrenceDynamics,
        &format!(r#"{{"omega": 0.01, "omega_over_gamma": 0.89, "steps": {horizon}}}"#),
    );
    let c089 = t089.floats("concurrence");
    let max_rise = c089.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let end = *c089.last().unwrap();
    let t2 = run_table(
        Experiment::ConcurrenceDynamics,
        r#"{"omega": 0.01, "omega_over_gamma": 2.0, "steps": 4000, "record_every": 25}"#,
    );
    let c2 = t2.floats("concurrence");
    let big_rise = c2.windows(2).map(|w| w[1] - w[0]).fold(f64::NEG_INFINITY, f64::max);
    let bell = bell_state().to_density();
    let werner = DensityMatrix::new(&bell.matrix().scale_real(0.5) + &CMatrix::identity(4).scale_real(0.125)).unwrap();
    let cb = concurrence(&bell).unwrap().value;
    let cw = concurrence(&werner).unwrap().value;
    let ob = concurrence_oracle(bell.matrix());
    let ow = concurrence_oracle(werner.matrix());
    let pass = max_rise <= 1e-3
        && end < 0.1
        && big_rise > 0.01
        && (cb - 1.0).abs() < 1e-9
        && (cw - 0.25).abs() < 1e-9
        && (cb - ob).abs() < 1e-9
        && (cw - ow).abs() < 1e-9;
    outcome(
        pass,
        format!(
            "ω=0.89Γ max rise {max_rise:.1e}/step, C(t={horizon}) {end:.2e}; ω=2Γ largest rise {big_rise:.4}; Bell {cb:.12} (oracle {ob:.12}), Werner {cw:.12} (oracle {ow:.12})"
        ),
    )
}

fn criterion_9() -> Outcome {
    let t089 = run_table(
        Experiment::BlochTrajectory,
        r#"{"omega": 0.01, "omega_over_gamma": 0.89, "steps": 4000, "record_every": 10}"#,
    );
    let n089 = t089.floats("bloch_norm");
    let t8 = run_table(
        Experiment::BlochTrajectory,
        r#"{"omega": 0.01, "omega_over_gamma": 8.0, "steps": 2000}"#,
    );
    let n8 = t8.floats("bloch_norm");
    let max8 = n8.iter().cloned().fold(0.0, f64::max);
    let start = n089[0];
    let end = *n089.last().unwrap();
    let pass = start < 1e-9 && end > 0.99 && max8 < 0.3;
    outcome(
        pass,
        format!("ω=0.89Γ norm {start:.1e} → {end:.6}; ω=8Γ max norm {max8:.4} (reference ≈ 0.245)"),
    )
}

fn criterion_10() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let ck_cfg = ExperimentConfig::from_json(
        r#"{"omega": 0.01, "gamma": 0.00125, "t": 300.0, "max_iterations": 40}"#,
    )
    .unwrap();
    let ck_out = dir.path().join("train.csv");
    experiments::run_to_files(Experiment::Train, &ck_cfg, b"", 3, &ck_out).unwrap();
    let ck_path = dir.path().join("train.csv.checkpoint.json");
    let cases: Vec<(Experiment, String)> = vec![
        (Experiment::SpectrumSweep, r#"{"gamma": 1.0, "omega_grid": {"start": -2.0, "stop": 2.0, "points": 81}}"#.into()),
        (Experiment::P0Dynamics, r#"{"omega": 0.01, "omega_over_gamma": 8.0, "steps": 400}"#.into()),
        (Experiment::P0Dynamics, r#"{"omega": 0.01, "omega_over_gamma": 8.0, "steps": 400, "engine": "trotter_exact_kraus", "K": 2}"#.into()),
        (Experiment::P0Dynamics, r#"{"omega": 0.01, "omega_over_gamma": 8.0, "steps": 400, "engine": "trotter_gaussian_kraus"}"#.into()),
        (
            Experiment::P0Dynamics,
            format!(
                r#"{{"omega": 0.01, "gamma": 0.00125, "engine": "trained_pqc", "checkpoints": [{:?}]}}"#,
                ck_path.to_str().unwrap()
            ),
        ),
        (Experiment::MzDynamics, r#"{"omega": 0.01, "omega_over_gamma": 0.8, "steps": 500}"#.into()),
        (Experiment::MzPhaseSweep, r#"{"omega": 0.01, "gamma_ratios": [0.7, 1.0, 1.2]}"#.into()),
        (Experiment::Train, r#"{"omega": 0.01, "gamma": 0.00125, "t": 300.0, "max_iterations": 30}"#.into()),
        (Experiment::Train, r#"{"omega": 0.01, "gamma": 0.00125, "t_values": [100.0, 300.0], "max_iterations": 10, "evaluation": "serial"}"#.into()),
        (Experiment::ConcurrenceDynamics, r#"{"omega": 0.01, "omega_over_gamma": 2.0, "steps": 300}"#.into()),
        (Experiment::ConcurrenceDynamics, r#"{"omega": 0.01, "omega_over_gamma": 2.0, "steps": 300, "engine": "trotter_exact_kraus"}"#.into()),
        (Experiment::BlochTrajectory, r#"{"omega": 0.01, "omega_over_gamma": 0.89, "steps": 300}"#.into()),
    ];
    let mut identical = 0;
    let mut failures = Vec::new();
    for (exp, json) in &cases {
        let cfg = ExperimentConfig::from_json(json).unwrap();
        let a = experiments::run(*exp, &cfg, 5).unwrap().table.to_csv().unwrap();
        let b = experiments::run(*exp, &cfg, 5).unwrap().table.to_csv().unwrap();
        if a == b && !a.is_empty() {
            identical += 1;
        } else {
            failures.push(exp.name());
        }
    }
    let covered: std::collections::HashSet<_> = cases.iter().map(|(e, _)| *e).collect();
    let pass = identical == cases.len() && covered.len() == Experiment::ALL.len();
    outcome(
        pass,
        format!(
            "{identical}/{} configurations byte-identical across reruns, {} of {} experiments covered{}",
            cases.len(),
            covered.len(),
            Experiment::ALL.len(),
            if failures.is_empty() { String::new() } else { format!("; differing: {}", failures.join(", ")) }
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("spectrum", criterion_1),
        ("PT invariance", criterion_2),
        ("Trotter convergence", criterion_3),
        ("postselection decay", criterion_4),
        ("P0 dynamics", criterion_5),
        ("Mz phase transition", criterion_6),
        ("training", criterion_7),
        ("concurrence", criterion_8),
        ("Bloch purification", criterion_9),
        ("determinism", criterion_10),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        println!(
            "criterion {:>2} [{name}]: {} :: {}",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail
        );
        if !o.pass {
            failed += 1;
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
