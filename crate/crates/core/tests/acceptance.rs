//! Acceptance suite: one line per criterion, non-zero exit if any criterion fails.

mod common;

use std::f64::consts::PI;
use std::time::Instant;

use gausskin_core::distributions::{
    fokker_planck_residual_with, marginal_distribution, standard_sample_grid, DistributionKind,
    ResidualOptions,
};
use gausskin_core::oracle::{
    compare_to_analytic, default_grid, gauss_hermite_expect, riccati_integrate, splitstep_evolve,
    GridWavefunction,
};
use gausskin_core::scenario::{preset, Scenario, PRESET_NAMES};
use gausskin_core::thermo::{
    conditional_entropy, entropy_production, joint_entropy, joint_entropy_closed_form,
    marginal_entropy, maslov_index, mean_quantum_potential, phase_space_internal_energy,
    quantum_potential, quantum_potential_central_variance, quantum_potential_gradient,
    quantum_potential_variance, temperature, virial_residual,
};
use gausskin_core::{
    covariance, evolve_state_with, flow_state, gamma_matrix, state_rates, symplecticity_defect,
    GaussianState, HamiltonianSpec, Result, Stepper, Trajectory,
};

struct Outcome {
    pass: bool,
    detail: String,
}

fn state_at(scenario: &Scenario, t: f64) -> Result<GaussianState> {
    let s0 = scenario.initial_state()?;
    let steps = ((1000.0 * t).ceil() as usize).max(1);
    evolve_state_with(&scenario.hamiltonian, &s0, t, steps, Stepper::Magnus4)
}

fn central_difference<F>(state: &GaussianState, spec: &HamiltonianSpec, h: f64, f: F) -> Result<f64>
where
    F: Fn(&GaussianState) -> Result<f64>,
{
    let fwd = flow_state(spec, state, h, 1, Stepper::Magnus4)?;
    let bwd = flow_state(spec, state, -h, 1, Stepper::Magnus4)?;
    Ok((f(&fwd)? - f(&bwd)?) / (2.0 * h))
}

/// Error at `h` is within `limit`, and halving `2h → h` cuts the error by ≈4 unless both
/// are already at rounding level.
fn second_order(e_h: f64, e_2h: f64, limit: f64) -> bool {
    let floor = 1e-10;
    e_h <= limit && (e_2h < floor || (3.0..5.0).contains(&(e_2h / e_h)))
}

fn criterion_1() -> Result<Outcome> {
    let sc = preset("parametric_oscillator")?;
    let s0 = sc.initial_state()?;
    let reference = joint_entropy_closed_form(1, &sc.constants);
    let mut worst = (joint_entropy(&s0)? - reference).abs();
    let mut count = 0;
    for point in Trajectory::new(&sc.hamiltonian, &s0, sc.t_end, 10_000, sc.stepper)? {
        let state = point?.state;
        worst = worst.max((joint_entropy(&state)? - reference).abs());
        count += 1;
    }
    Ok(Outcome {
        pass: worst <= 1e-9 && count == 10_000,
        detail: format!("parametric oscillator, {count} steps to t = 20: max |S - n kB (1 + ln pi hbar)| = {worst:.2e} (limit 1e-9)"),
    })
}

fn criterion_2() -> Result<Outcome> {
    let mut worst_defect = 0.0_f64;
    let mut worst_purity = 0.0_f64;
    for name in PRESET_NAMES {
        let sc = preset(name)?;
        let s0 = sc.initial_state()?;
        let n = s0.n as i32;
        let purity = (0.5 * sc.constants.hbar).powi(2 * n);
        let steps = sc.steps.max(10_000);
        for point in Trajectory::new(&sc.hamiltonian, &s0, sc.t_end, steps, sc.stepper)? {
            let point = point?;
            worst_defect = worst_defect.max(symplecticity_defect(&point.flow));
            let det = covariance(&point.state)?.determinant();
            worst_purity = worst_purity.max((det / purity - 1.0).abs());
        }
    }
    Ok(Outcome {
        pass: worst_defect <= 1e-9 && worst_purity <= 1e-8,
        detail: format!(
            "all presets, >= 1e4 steps: max symplecticity defect {worst_defect:.2e} (limit 1e-9), max relative det-Sigma drift {worst_purity:.2e} (limit 1e-8)"
        ),
    })
}

fn criterion_3() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut worst = 0.0_f64;
    for name in PRESET_NAMES {
        let sc = preset(name)?;
        let s0 = sc.initial_state()?;
        let exact = evolve_state_with(&sc.hamiltonian, &s0, 5.0, 5000, Stepper::Magnus4)?;
        let ric = riccati_integrate(&sc.hamiltonian, &gamma_matrix(&s0)?, 0.0, 5.0, 5000)?;
        let d = ric.max_abs_diff(&gamma_matrix(&exact)?);
        worst = worst.max(d);
        parts.push(format!("{name} {d:.1e}"));
    }
    Ok(Outcome {
        pass: worst <= 1e-7,
        detail: format!("max |Gamma_iwasawa - Gamma_riccati| at t = 5: {} (limit 1e-7)", parts.join(", ")),
    })
}

fn criterion_4() -> Result<Outcome> {
    let mut parts = Vec::new();
    let mut worst = 0.0_f64;
    for name in ["harmonic_oscillator", "free_particle", "parametric_oscillator"] {
        let sc = preset(name)?;
        let s0 = sc.initial_state()?;
        let grid = default_grid(&sc.hamiltonian, &s0, 1.0)?;
        let psi0 = GridWavefunction::from_state(&s0, grid)?;
        let psi1 = splitstep_evolve(&sc.hamiltonian, &psi0, 1.0, 2000)?;
        let exact = evolve_state_with(&sc.hamiltonian, &s0, 1.0, 2000, Stepper::Magnus4)?;
        let d = compare_to_analytic(&psi1, &exact)?;
        worst = worst.max(d);
        parts.push(format!("{name} {d:.1e}"));
    }
    Ok(Outcome {
        pass: worst <= 1e-4,
        detail: format!("L2 distance at t = 1 (4096 points, 2000 steps): {} (limit 1e-4)", parts.join(", ")),
    })
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs().max(f64::MIN_POSITIVE)
}

fn criterion_5() -> Result<Outcome> {
    let mut r = common::rng(5);
    let mut kin = 0.0_f64;
    let mut qmax = 0.0_f64;
    let mut virial = 0.0_f64;
    let mut virial_quad = 0.0_f64;
    let mut mean_quad = 0.0_f64;
    let mut isserlis = 0.0_f64;
    let mut fourth_moment = 0.0_f64;
    let mut central = 0.0_f64;
    for k in 0..1000 {
        let n = 1 + k % 2;
        let state = common::random_state(&mut r, n);
        let spec = common::random_spec(&mut r, n);
        let kb = state.constants.kb;
        let mq = mean_quantum_potential(&state, &spec)?;
        let (_, temp) = temperature(&state, &spec)?;
        kin = kin.max((mq - 0.5 * kb * temp).abs() / mq.abs().max(1.0));
        let top = quantum_potential(&state, &spec, &state.mean_q)?;
        qmax = qmax.max((top - 2.0 * mq).abs() / mq.abs().max(1.0));
        virial = virial.max(virial_residual(&state, &spec)?.abs() / mq.abs().max(1.0));

        let rho = marginal_distribution(&state)?;
        let q_of = |x: &nalgebra::DVector<f64>| quantum_potential(&state, &spec, x).unwrap();
        let x_grad_q = |x: &nalgebra::DVector<f64>| {
            let g = quantum_potential_gradient(&state, &spec, x).unwrap();
            (x - &state.mean_q).dot(&g)
        };
        mean_quad = mean_quad.max(rel(gauss_hermite_expect(&rho, q_of, 20)?, mq));
        let vq = gauss_hermite_expect(&rho, x_grad_q, 20)?;
        virial_quad = virial_quad.max((2.0 * mq + vq).abs() / mq.abs().max(1.0));

        let formula = quantum_potential_variance(&state, &spec)?;
        let var_q = gauss_hermite_expect(&rho, |x| (q_of(x) - mq).powi(2), 20)?;
        isserlis = isserlis.max(rel(formula, var_q));
        let m4 = gauss_hermite_expect(&rho, |x| x_grad_q(x).powi(2), 20)?;
        fourth_moment = fourth_moment.max(rel(formula, m4));
        central = central.max(rel(quantum_potential_central_variance(&state, &spec)?, var_q));
    }
    let pass = kin <= 1e-10
        && qmax <= 1e-10
        && virial <= 1e-9
        && virial_quad <= 1e-9
        && mean_quad <= 1e-9
        && isserlis <= 1e-8;
    Ok(Outcome {
        pass,
        detail: format!(
            "1000 random states: <Q> vs kB T/2 {kin:.1e}, Q_max vs 2<Q> {qmax:.1e} (limits 1e-10); virial {virial:.1e}, virial by quadrature {virial_quad:.1e}, <Q> by quadrature {mean_quad:.1e} (limits 1e-9); \
             kB^2([Tr T]^2 + 2 Tr T^2) vs quadrature of (Q - <Q>)^2: max rel. error {isserlis:.2e} (limit 1e-8). \
             [diagnostic: same formula vs quadrature of ((q-<q>).grad Q)^2 {fourth_moment:.1e}; 0.5 kB^2 Tr T^2 vs quadrature of (Q - <Q>)^2 {central:.1e}]"
        ),
    })
}

fn criterion_6() -> Result<Outcome> {
    let mut ok = true;
    let mut worst_match = 0.0_f64;
    let mut worst_balance = 0.0_f64;
    let mut ratios = Vec::new();
    for name in ["free_particle", "coupled_2d"] {
        let sc = preset(name)?;
        let spec = &sc.hamiltonian;
        for t in [0.5, 1.0, 2.0, 4.0] {
            let state = state_at(&sc, t)?;
            let prod = entropy_production(&state, spec)?;
            let err = |h: f64| -> Result<f64> {
                Ok((central_difference(&state, spec, h, marginal_entropy)? - prod).abs())
            };
            let (e1, e2) = (err(1e-3)?, err(2e-3)?);
            ok &= second_order(e1, e2, 1e-6);
            worst_match = worst_match.max(e1);
            if e2 >= 1e-10 {
                ratios.push(e2 / e1);
            }
            let dq = central_difference(&state, spec, 1e-3, marginal_entropy)?;
            let dc = central_difference(&state, spec, 1e-3, conditional_entropy)?;
            worst_balance = worst_balance.max((dq + dc).abs());
        }
    }
    ok &= worst_balance <= 1e-9;
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(a, b), &r| (a.min(r), b.max(r)));
    Ok(Outcome {
        pass: ok,
        detail: format!(
            "free_particle, coupled_2d at t in {{0.5,1,2,4}}: max |dS_q/dt (FD, h=1e-3) - kB Tr(b - gc)| = {worst_match:.1e} (limit 1e-6), error ratio 2h/h in [{lo:.2}, {hi:.2}], max |dS_q/dt + dS_p|q/dt| = {worst_balance:.1e} (limit 1e-9)"
        ),
    })
}

fn criterion_7() -> Result<Outcome> {
    let mut ok = true;
    let mut worst = 0.0_f64;
    let mut worst_at = String::new();
    let mut ratios = Vec::new();
    for name in PRESET_NAMES {
        let sc = preset(name)?;
        let spec = &sc.hamiltonian;
        let state = state_at(&sc, 1.0)?;
        let sd = marginal_distribution(&state)?.cov.diagonal().map(f64::sqrt);
        let kinds = [
            ("joint", DistributionKind::Joint),
            ("marginal", DistributionKind::Marginal),
            ("conditional at <q>", DistributionKind::Conditional(state.mean_q.clone())),
            ("conditional at <q>+sd", DistributionKind::Conditional(&state.mean_q + &sd)),
        ];
        for (label, kind) in kinds {
            let grid = standard_sample_grid(&state, &kind)?;
            let res = |h: f64| {
                fokker_planck_residual_with(&state, spec, &kind, &grid, ResidualOptions { h, ..Default::default() })
            };
            let (e1, e2) = (res(1e-3)?, res(2e-3)?);
            ok &= second_order(e1, e2, 1e-6);
            if e1 > worst {
                worst = e1;
                worst_at = format!("{name} {label}");
            }
            if e2 >= 1e-10 {
                ratios.push(e2 / e1);
            }
        }
    }
    let (lo, hi) = ratios
        .iter()
        .fold((f64::INFINITY, 0.0_f64), |(a, b), &r| (a.min(r), b.max(r)));
    Ok(Outcome {
        pass: ok,
        detail: format!(
            "joint/marginal/conditional on all presets at t = 1, 21-point-per-axis grids: max residual {worst:.2e} ({worst_at}) at h = 1e-3 (limit 1e-6), residual ratio 2h/h in [{lo:.2}, {hi:.2}]"
        ),
    })
}

fn criterion_8() -> Result<Outcome> {
    let ho = HamiltonianSpec::harmonic_oscillator();
    let g0 = GaussianState::initial_ground(1, &[0.0], &[0.0])?;
    let end = evolve_state_with(&ho, &g0, 2.0 * PI, 1000, Stepper::Midpoint)?;
    let mu = maslov_index(g0.alpha, end.alpha);
    let mut ok = (mu - 2.0).abs() <= 1e-8;
    let mut worst = 0.0_f64;
    for name in PRESET_NAMES {
        let sc = preset(name)?;
        let spec = &sc.hamiltonian;
        for t in [0.7, 1.9, 3.1] {
            let state = state_at(&sc, t)?;
            let rate = state_rates(&state, spec)?.alpha;
            let err = |h: f64| -> Result<f64> {
                Ok((central_difference(&state, spec, h, |s| Ok(s.alpha))? - rate).abs())
            };
            let (e1, e2) = (err(1e-3)?, err(2e-3)?);
            ok &= second_order(e1, e2, 1e-6);
            worst = worst.max(e1);
        }
    }
    Ok(Outcome {
        pass: ok,
        detail: format!(
            "oscillator over one period: mu = {mu:.12} (|mu - 2| limit 1e-8); max |d alpha/dt (FD, h=1e-3) - Tr(c s^-2)| over presets = {worst:.1e} (limit 1e-6, second order)"
        ),
    })
}

fn criterion_9() -> Result<Outcome> {
    let spec = HamiltonianSpec::harmonic_oscillator();
    let g = GaussianState::initial_ground(1, &[0.0], &[0.0])?;
    let u = phase_space_internal_energy(&g, &spec)?;
    let target = 0.5 * g.hbar();
    Ok(Outcome {
        pass: (u - target).abs() <= 1e-10,
        detail: format!("unit oscillator ground state: U = {u:.15} vs hbar omega / 2 = {target} (limit 1e-10)"),
    })
}

fn main() {
    type Criterion = fn() -> Result<Outcome>;
    let criteria: [(u32, &str, f64, Criterion); 9] = [
        (1, "equilibrium entropy", 5.0, criterion_1),
        (2, "symplectic structure and purity", 5.0, criterion_2),
        (3, "Riccati-Iwasawa equivalence", 10.0, criterion_3),
        (4, "PDE differential test", 60.0, criterion_4),
        (5, "thermodynamic identities", 30.0, criterion_5),
        (6, "entropy production balance", 5.0, criterion_6),
        (7, "Fokker-Planck residuals", 30.0, criterion_7),
        (8, "Maslov index and alpha rate", 5.0, criterion_8),
        (9, "oscillator ground-state energy", 1.0, criterion_9),
    ];
    let mut failed = Vec::new();
    for (id, title, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let (pass, detail) = match outcome {
            Ok(o) => (o.pass && secs < budget, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        println!(
            "criterion {id} [{}] {title}: {detail}; {secs:.2} s (budget {budget} s)",
            if pass { "PASS" } else { "FAIL" }
        );
        if !pass {
            failed.push(id);
        }
    }
    if failed.is_empty() {
        println!("acceptance: all 9 criteria passed");
    } else {
        println!("acceptance: failed criteria {failed:?}");
        std::process::exit(1);
    }
}
