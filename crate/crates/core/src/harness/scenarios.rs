use std::collections::BTreeMap;

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::config::*;
use super::error::HarnessError;
use super::output::{ResultEnvelope, Table};
use crate::ccp::{
    action_phase_decompose, ccp, chain_rule_compose, deviation_up_to_phase, ergodicity_check, kd_distribution,
    reconstruct_wavefunction,
};
use crate::dynamics::{
    classical_density, coarse_grain_decay, free_ccp_analytic, free_gradient_check, gradient_check,
    midpoint_ccp_analytic, BandLimit, FreeCcpNumeric, GradientReport, MidpointCcpNumeric,
};
use crate::error::{LabError, Result};
use crate::hilbert::{
    discretize_hamiltonian, eigensystem, make_momentum_basis, make_position_basis, HilbertSpec, OperatorMatrix,
    StateVector,
};
use crate::weak::{analytic_weak_value, bias_scan, estimate_weak_value, simulate, WeakSimConfig};

type Space = HilbertSpec<f64>;

struct Output {
    summary: BTreeMap<String, f64>,
    table: Table,
}

impl Output {
    fn new(table: Table) -> Self {
        Output { summary: BTreeMap::new(), table }
    }

    fn with(mut self, key: &str, value: f64) -> Self {
        self.summary.insert(key.to_owned(), value);
        self
    }
}

/// Runs a validated configuration. Numerical failures carry the library's
/// error and map to exit code 3.
pub fn run_scenario(config: &ScenarioConfig) -> std::result::Result<ResultEnvelope, HarnessError> {
    let space = config.space.hilbert()?;
    let output = dispatch(config, space).map_err(|e| HarnessError::numerical(config.scenario.name(), e))?;
    Ok(ResultEnvelope {
        scenario: config.scenario.name().to_owned(),
        version: env!("CARGO_PKG_VERSION").to_owned(),
        scalar: "f64".to_owned(),
        config: config.clone(),
        wall_clock_seconds: None,
        summary: output.summary,
        table: output.table,
    })
}

fn dispatch(config: &ScenarioConfig, space: Space) -> Result<Output> {
    let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
    match &config.params {
        ScenarioParams::Kd(p) => kd(&build_state(&p.state, space, &mut rng, "E")?),
        ScenarioParams::Ccp(p) => {
            let m = build_state(&p.m, space, &mut rng, "m")?;
            let a = build_state(&p.a, space, &mut rng, "a")?;
            let b = build_state(&p.b, space, &mut rng, "b")?;
            single_ccp(&m, &a, &b)
        }
        ScenarioParams::Ergodicity(p) => ergodicity(&build_state(&p.state, space, &mut rng, "E")?),
        ScenarioParams::Reconstruct(p) => {
            reconstruct(&build_state(&p.state, space, &mut rng, "E")?, p.reference, p.alt_reference)
        }
        ScenarioParams::ChainRule(p) => {
            let m = build_state(&p.m, space, &mut rng, "m")?;
            let e = build_state(&p.state, space, &mut rng, "E")?;
            chain_rule(&m, &e, p.reference)
        }
        ScenarioParams::ActionPhase(p) => action_phase(&build_state(&p.state, space, &mut rng, "E")?, p.momentum),
        ScenarioParams::FreePropagator(p) => free_propagator(p, space),
        ScenarioParams::Midpoint(p) => midpoint(p, space),
        ScenarioParams::Classical(p) => classical(p, space),
        ScenarioParams::Gradient(GradientParams::Eigenstate { potential, n, momentum }) => {
            let (e, energy) = eigenstate(space, potential, *n)?;
            let v = |x: f64| potential.value(x, space.mass);
            let report = gradient_check(&e, energy, space.momentum_index(*momentum), &v, &space)?;
            Ok(gradient_output(&report).with("energy", energy))
        }
        ScenarioParams::Gradient(GradientParams::Free { x0, p0, t, x_start, step, samples }) => {
            let report = free_gradient_check(*x0, *p0, *t, *x_start, *step, *samples, &space)?;
            Ok(gradient_output(&report))
        }
        ScenarioParams::CoarseGrain(p) => {
            let (e, energy) = eigenstate(space, &p.potential, p.n)?;
            let v = |x: f64| p.potential.value(x, space.mass);
            let r = coarse_grain_decay(&e, energy, space.momentum_index(p.momentum), &v, &space, p.action_ratio)?;
            let mut table = Table::new(&[
                "window",
                "window_width",
                "min_momentum_gap",
                "fine_mass",
                "coarse_mass",
                "ratio",
                "region_start",
                "region_len",
            ]);
            table.push(vec![
                r.window as f64,
                r.window_width,
                r.min_momentum_gap,
                r.fine_mass,
                r.coarse_mass,
                r.ratio,
                r.region.0 as f64,
                r.region.1 as f64,
            ]);
            Ok(Output::new(table).with("energy", energy).with("ratio", r.ratio))
        }
        ScenarioParams::Weak(p) => {
            let wc = weak_config(
                &p.pre,
                &p.post,
                &p.projector,
                p.coupling,
                p.pointer_width,
                p.trials,
                config.seed,
                space,
                &mut rng,
            )?;
            weak_sim(&wc)
        }
        ScenarioParams::BiasScan(p) => {
            let first = p.couplings[0];
            let wc = weak_config(
                &p.pre,
                &p.post,
                &p.projector,
                first,
                p.pointer_width,
                p.trials,
                config.seed,
                space,
                &mut rng,
            )?;
            scan(&wc, &p.couplings)
        }
    }
}

/// `n`-th eigenpair of the grid Hamiltonian for `potential`.
pub fn eigenstate(space: Space, potential: &PotentialSpec, n: usize) -> Result<(StateVector<f64>, f64)> {
    let h = discretize_hamiltonian(space, |x| potential.value(x, space.mass))?;
    let system = eigensystem(&h)?;
    let e = system.states.get(n)?.clone().with_label(format!("E{n}"));
    Ok((e, system.energies[n]))
}

pub fn build_state(spec: &StateSpec, space: Space, rng: &mut ChaCha8Rng, label: &str) -> Result<StateVector<f64>> {
    let s = match spec {
        StateSpec::Random {} => StateVector::random(space, rng),
        StateSpec::Position { index } => StateVector::position_eigenstate(space, *index)?,
        StateSpec::Momentum { frequency } => StateVector::momentum_eigenstate(space, space.momentum_index(*frequency))?,
        StateSpec::Gaussian { x0, p0, width } => {
            let amps = space
                .positions()
                .into_iter()
                .map(|x| {
                    let d = space.ring_displacement(*x0, x);
                    Complex::from_polar((-d * d / (4.0 * width * width)).exp(), p0 * d / space.hbar)
                })
                .collect();
            StateVector::new(amps, space, label)?
        }
        StateSpec::Eigenstate { n, potential } => eigenstate(space, potential, *n)?.0,
        StateSpec::Amplitudes { re, im } => {
            StateVector::new(re.iter().zip(im).map(|(&r, &i)| Complex::new(r, i)).collect(), space, label)?
        }
    };
    Ok(s.with_label(label))
}

fn kd(e: &StateVector<f64>) -> Result<Output> {
    let space = *e.space();
    let xb = make_position_basis(space)?;
    let pb = make_momentum_basis(space)?;
    let dist = kd_distribution(e, &xb, &pb)?;
    let mut table = Table::new(&["x", "p", "rho_re", "rho_im"]);
    for (j, x) in dist.x_labels.iter().enumerate() {
        for (k, p) in dist.p_labels.iter().enumerate() {
            let v = dist.matrix[(j, k)];
            table.push(vec![*x, *p, v.re, v.im]);
        }
    }
    let marginal_error =
        dist.row_sums().iter().zip(e.amplitudes()).map(|(r, a)| (r - a.norm_sqr()).norm()).fold(0.0, f64::max);
    let total = dist.total();
    Ok(Output::new(table)
        .with("total_re", total.re)
        .with("total_im", total.im)
        .with("max_marginal_error", marginal_error))
}

fn single_ccp(m: &StateVector<f64>, a: &StateVector<f64>, b: &StateVector<f64>) -> Result<Output> {
    let v = ccp(m, a, b)?;
    let mut table = Table::new(&["value_re", "value_im", "magnitude", "action_phase", "overlap_re", "overlap_im"]);
    table.push(vec![
        v.value.re,
        v.value.im,
        v.magnitude,
        v.action_phase,
        v.denominator_overlap.re,
        v.denominator_overlap.im,
    ]);
    Ok(Output::new(table))
}

fn ergodicity(e: &StateVector<f64>) -> Result<Output> {
    let space = *e.space();
    let report = ergodicity_check(e, &make_position_basis(space)?, &make_momentum_basis(space)?)?;
    let mut table = Table::new(&["x", "p", "residual"]);
    for (j, row) in report.residual.iter().enumerate() {
        for (k, r) in row.iter().enumerate() {
            table.push(vec![space.position(j), space.momentum(k), *r]);
        }
    }
    Ok(Output::new(table)
        .with("max_residual", report.max_residual)
        .with("excluded_columns", report.excluded_columns.len() as f64))
}

fn reconstruct(e: &StateVector<f64>, reference: i64, alt: i64) -> Result<Output> {
    let space = *e.space();
    let xb = make_position_basis(space)?;
    let pb = make_momentum_basis(space)?;
    let r0 = reconstruct_wavefunction(e, &xb, &pb, space.momentum_index(reference))?;
    let r1 = reconstruct_wavefunction(e, &xb, &pb, space.momentum_index(alt))?;
    let mut table = Table::new(&["x", "psi_re", "psi_im", "rec_re", "rec_im", "alt_re", "alt_im"]);
    let mut born = 0.0f64;
    for (j, psi) in e.amplitudes().iter().enumerate() {
        let (a, b) = (r0.raw[j], r1.raw[j]);
        born = born.max((a.norm_sqr() - psi.norm_sqr()).abs());
        table.push(vec![space.position(j), psi.re, psi.im, a.re, a.im, b.re, b.im]);
    }
    Ok(Output::new(table)
        .with("deviation_up_to_phase", deviation_up_to_phase(&r0.raw, e.amplitudes()))
        .with("alt_deviation_up_to_phase", deviation_up_to_phase(&r1.raw, e.amplitudes()))
        .with("max_born_error", born))
}

fn chain_rule(m: &StateVector<f64>, e: &StateVector<f64>, reference: i64) -> Result<Output> {
    let space = *e.space();
    let xb = make_position_basis(space)?;
    let p0 = StateVector::momentum_eigenstate(space, space.momentum_index(reference))?.with_label("p0");
    let composed = chain_rule_compose(m, e, &xb, &p0)?;
    let direct = ccp(m, e, &p0)?.value;
    let mut table = Table::new(&["composed_re", "composed_im", "direct_re", "direct_im", "difference"]);
    table.push(vec![composed.re, composed.im, direct.re, direct.im, (composed - direct).norm()]);
    Ok(Output::new(table))
}

fn action_phase(e: &StateVector<f64>, momentum: i64) -> Result<Output> {
    let space = *e.space();
    let xb = make_position_basis(space)?;
    let p = StateVector::momentum_eigenstate(space, space.momentum_index(momentum))?.with_label("p");
    let mut table = Table::new(&["x", "ccp_re", "ccp_im", "magnitude", "born_magnitude", "action_phase"]);
    let mut gap = 0.0f64;
    for (j, x) in xb.vectors().iter().enumerate() {
        let d = action_phase_decompose(e, x, &p)?;
        gap = gap.max((d.ccp.magnitude - d.born_magnitude).abs());
        table.push(vec![
            space.position(j),
            d.ccp.value.re,
            d.ccp.value.im,
            d.ccp.magnitude,
            d.born_magnitude,
            d.ccp.action_phase,
        ]);
    }
    Ok(Output::new(table).with("max_magnitude_gap", gap))
}

/// Probe grid indices spread evenly over `[centre - spread, centre + spread]`.
fn probes(space: &Space, centre: f64, spread: f64, count: usize) -> Vec<usize> {
    (0..count).map(|i| space.nearest_index(centre - spread + 2.0 * spread * i as f64 / (count - 1) as f64)).collect()
}

fn relative(numeric: Complex<f64>, analytic: Complex<f64>) -> f64 {
    (numeric - analytic).norm() / analytic.norm()
}

fn free_propagator(p: &FreePropagatorParams, space: Space) -> Result<Output> {
    let band = BandLimit { flat: p.band_flat, zero: p.band_zero };
    let j0 = space.nearest_index(p.x0);
    let k0 = space.momentum_index((p.p0 / space.dp()).round() as i64);
    let (x0, p0) = (space.position(j0), space.momentum(k0));
    let numeric = FreeCcpNumeric::new(j0, k0, p.t, space, band)?;
    let mut table = Table::new(&["x", "numeric_re", "numeric_im", "analytic_re", "analytic_im", "relative_error"]);
    let mut worst = 0.0f64;
    for j in probes(&space, x0 + p0 * p.t / space.mass, p.spread, p.probes) {
        let n = numeric.at(j)?;
        let a = free_ccp_analytic(space.position(j), x0, p0, p.t, &space)?;
        let r = relative(n, a);
        worst = worst.max(r);
        table.push(vec![space.position(j), n.re, n.im, a.re, a.im, r]);
    }
    Ok(Output::new(table).with("x0", x0).with("p0", p0).with("max_relative_error", worst))
}

fn midpoint(p: &MidpointParams, space: Space) -> Result<Output> {
    let band = BandLimit { flat: p.band_flat, zero: p.band_zero };
    let (ji, jf) = (space.nearest_index(p.x_i), space.nearest_index(p.x_f));
    let (xi, xf) = (space.position(ji), space.position(jf));
    let numeric = MidpointCcpNumeric::new(ji, jf, p.t, space, band)?;
    let mut table = Table::new(&["x", "numeric_re", "numeric_im", "analytic_re", "analytic_im", "relative_error"]);
    let mut worst = 0.0f64;
    for j in probes(&space, 0.5 * (xi + xf), p.spread, p.probes) {
        let n = numeric.at(j)?;
        let a = midpoint_ccp_analytic(space.position(j), xi, xf, p.t, &space)?;
        let r = relative(n, a);
        worst = worst.max(r);
        table.push(vec![space.position(j), n.re, n.im, a.re, a.im, r]);
    }
    let c = numeric.completeness();
    Ok(Output::new(table)
        .with("x_i", xi)
        .with("x_f", xf)
        .with("completeness_re", c.re)
        .with("completeness_im", c.im)
        .with("max_relative_error", worst))
}

fn classical(p: &ClassicalParams, space: Space) -> Result<Output> {
    let v = |x: f64| p.potential.value(x, space.mass);
    let d = classical_density(&v, p.energy, &space)?;
    let mut table = Table::new(&["x", "density", "cell_mass"]);
    for (j, (rho, mass)) in d.marginal.iter().zip(&d.cell_mass).enumerate() {
        table.push(vec![space.position(j), *rho, *mass]);
    }
    Ok(Output::new(table)
        .with("period", d.period)
        .with("turning_left", d.turning_points.0)
        .with("turning_right", d.turning_points.1)
        .with("total_mass", d.cell_mass.iter().sum()))
}

fn gradient_output(r: &GradientReport<f64>) -> Output {
    let mut table = Table::new(&["x", "phase", "gradient", "prediction", "relative_error", "branch", "raw_gradient"]);
    for row in &r.rows {
        table.push(vec![
            row.x,
            row.phase,
            row.gradient,
            row.prediction,
            row.relative_error,
            row.branch as f64,
            row.raw_gradient,
        ]);
    }
    Output::new(table)
        .with("median_relative_error", r.median_relative_error())
        .with("max_abs_error", r.max_abs_error())
        .with("momentum", r.momentum)
}

#[allow(clippy::too_many_arguments)]
fn weak_config(
    pre: &StateSpec,
    post: &StateSpec,
    projector: &StateSpec,
    coupling: f64,
    pointer_width: f64,
    trials: usize,
    seed: u64,
    space: Space,
    rng: &mut ChaCha8Rng,
) -> Result<WeakSimConfig<f64>> {
    let pre = build_state(pre, space, rng, "a")?;
    let post = build_state(post, space, rng, "b")?;
    let m = build_state(projector, space, rng, "m")?;
    Ok(WeakSimConfig {
        pre,
        post,
        observable: OperatorMatrix::projector(&m),
        coupling,
        pointer_width,
        trials,
        master_seed: seed,
    })
}

fn weak_sim(wc: &WeakSimConfig<f64>) -> Result<Output> {
    if !(wc.coupling > 0.0) {
        return Err(LabError::InvalidParameter("coupling must be positive".into()));
    }
    let record = simulate(wc)?;
    let est = estimate_weak_value(&record)?;
    let exact = analytic_weak_value(wc)?;
    let mut table = Table::new(&[
        "coupling",
        "re",
        "im",
        "stderr_re",
        "stderr_im",
        "analytic_re",
        "analytic_im",
        "accepted",
        "total",
        "acceptance_probability",
    ]);
    table.push(vec![
        wc.coupling,
        est.re,
        est.im,
        est.stderr_re,
        est.stderr_im,
        exact.re,
        exact.im,
        record.accepted_trials as f64,
        record.total_trials as f64,
        record.config.acceptance_probability,
    ]);
    Ok(Output::new(table).with("acceptance_fraction", record.acceptance_fraction()))
}

fn scan(wc: &WeakSimConfig<f64>, couplings: &[f64]) -> Result<Output> {
    let s = bias_scan(wc, couplings)?;
    let mut table =
        Table::new(&["coupling", "re", "im", "stderr_re", "stderr_im", "deviation", "indistinguishable_from_previous"]);
    for r in &s.rows {
        let e = &r.estimate;
        table.push(vec![
            r.coupling,
            e.re,
            e.im,
            e.stderr_re,
            e.stderr_im,
            r.deviation,
            f64::from(u8::from(r.indistinguishable_from_previous)),
        ]);
    }
    Ok(Output::new(table)
        .with("analytic_re", s.analytic.re)
        .with("analytic_im", s.analytic.im)
        .with("monotone", f64::from(u8::from(s.is_monotone()))))
}
