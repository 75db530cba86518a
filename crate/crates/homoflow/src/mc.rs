//! Stochastic particle simulation of the toy model, used as an independent
//! oracle for the deterministic solvers.
//!
//! Each particle carries (rho, zeta). Between collisions zeta drifts at
//! unit speed; a collision multiplies rho by zeta and resets zeta to one,
//! so the product rho * zeta is continuous across the jump. Collisions
//! arrive from a Poisson clock whose rate is either a prescribed constant
//! or, in self-consistent mode, the ensemble average of (rho zeta)^(-a)
//! refreshed on a geometric synchronisation schedule.
//!
//! Determinism is part of the contract: every particle owns its own
//! counter-based generator stream derived from (seed, index), particles are
//! processed in fixed-size chunks, and all cross-chunk reductions fold the
//! ordered chunk results sequentially. Identical parameters therefore give
//! bit-identical trajectories for any worker count.

use crate::toy::InitialProfile;
use crate::{Error, Result};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

/// Fixed chunk width for parallel passes; independent of the worker count.
const CHUNK: usize = 4096;

/// One particle: x = log rho plus the drift coordinate and its own stream.
#[derive(Debug, Clone)]
pub struct Particle {
    /// log rho.
    pub x: f64,
    /// Drift coordinate, at least one.
    pub zeta: f64,
    rng: ChaCha8Rng,
}

impl Particle {
    pub fn rho(&self) -> f64 {
        self.x.exp()
    }
}

/// Weighted particle population at a single time.
#[derive(Debug, Clone)]
pub struct ParticleEnsemble {
    particles: Vec<Particle>,
    /// Current simulation time.
    pub t: f64,
    /// Per-particle weight; never changes after construction.
    pub weight: f64,
    /// Sum of all weights, computed once at construction.
    pub total_mass: f64,
}

impl ParticleEnsemble {
    /// Draws n particles from the initial law: zeta = 1 and rho with
    /// density proportional to G0(log rho) d rho, i.e. X = log rho follows
    /// G0(X) e^X. Weights are 1/n so the ensemble carries unit mass.
    pub fn from_profile(n: usize, profile: &InitialProfile, seed: u64) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidParameter(
                "need at least one particle".into(),
            ));
        }
        let weight = 1.0 / n as f64;
        let mut particles: Vec<Particle> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(i as u64);
                Particle {
                    x: 0.0,
                    zeta: 1.0,
                    rng,
                }
            })
            .collect();
        sample_initial_positions(&mut particles, profile)?;
        let total_mass = particles.iter().map(|_| weight).sum();
        Ok(Self {
            particles,
            t: 0.0,
            weight,
            total_mass,
        })
    }

    /// Builds an ensemble from explicit (rho, zeta) states with equal
    /// weights; the generator streams are fresh. Intended for tests and for
    /// replaying recorded states.
    pub fn from_states(states: &[(f64, f64)]) -> Result<Self> {
        if states.is_empty() {
            return Err(Error::InvalidParameter("empty state list".into()));
        }
        if states.iter().any(|(r, z)| !(*r > 0.0) || !(*z >= 1.0)) {
            return Err(Error::InvalidParameter(
                "states need rho > 0 and zeta >= 1".into(),
            ));
        }
        let weight = 1.0 / states.len() as f64;
        let particles = states
            .iter()
            .enumerate()
            .map(|(i, (r, z))| {
                let mut rng = ChaCha8Rng::seed_from_u64(0);
                rng.set_stream(i as u64);
                Particle {
                    x: r.ln(),
                    zeta: *z,
                    rng,
                }
            })
            .collect();
        let total_mass = states.iter().map(|_| weight).sum();
        Ok(Self {
            particles,
            t: 0.0,
            weight,
            total_mass,
        })
    }

    pub fn len(&self) -> usize {
        self.particles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.particles.is_empty()
    }

    pub fn particles(&self) -> &[Particle] {
        &self.particles
    }
}

/// Collision clock driving the population.
#[derive(Debug, Clone, Copy)]
pub enum RateMode {
    /// Prescribed constant rate.
    Constant(f64),
    /// Rate equal to the ensemble average of (rho zeta)^(-a).
    SelfConsistent { a: f64 },
}

/// One collision, for optional event logs.
#[derive(Debug, Clone, Copy)]
pub struct CollisionEvent {
    pub t: f64,
    pub x_before: f64,
    pub zeta_before: f64,
    pub x_after: f64,
}

/// Moment summary at one record time.
#[derive(Debug, Clone)]
pub struct SummaryRow {
    pub t: f64,
    pub mass: f64,
    pub epsilon: f64,
    /// (estimate, standard error) per requested order, aligned with the
    /// trajectory's beta list.
    pub moments: Vec<(f64, f64)>,
}

/// Recorded simulation output plus the final population.
#[derive(Debug, Clone)]
pub struct McTrajectory {
    pub betas: Vec<f64>,
    pub rows: Vec<SummaryRow>,
    pub events: Option<Vec<CollisionEvent>>,
    pub ensemble: ParticleEnsemble,
}

/// Simulation request.
#[derive(Debug, Clone)]
pub struct McRun {
    pub n_particles: usize,
    pub mode: RateMode,
    pub t_end: f64,
    pub seed: u64,
    /// Strictly increasing, within (0, t_end]; 0 is always recorded first.
    pub record_times: Vec<f64>,
    /// Orders for the recorded moments E[(rho zeta)^beta].
    pub betas: Vec<f64>,
    /// Keep a full collision log; meant for small populations.
    pub log_events: bool,
}

/// Runs the event-driven simulation.
///
/// The clock rate is frozen over each synchronisation segment, so the
/// exponential gaps are exact within a segment and the only discretisation
/// is the refresh schedule itself, which tightens geometrically: the next
/// boundary is max(1.02 t, t + 1e-3). Constant mode needs no refresh and
/// uses the record times alone.
pub fn simulate(run: &McRun, profile: &InitialProfile) -> Result<McTrajectory> {
    match run.mode {
        RateMode::Constant(e) => {
            if !(e.is_finite() && e >= 0.0) {
                return Err(Error::InvalidParameter(
                    "constant rate must be finite and nonnegative".into(),
                ));
            }
        }
        RateMode::SelfConsistent { a } => {
            if !(a > 0.0 && a < 1.0) {
                return Err(Error::InvalidParameter(
                    "self-consistent exponent must lie strictly between 0 and 1".into(),
                ));
            }
        }
    }
    if !(run.t_end.is_finite() && run.t_end > 0.0) {
        return Err(Error::InvalidParameter("horizon must be positive".into()));
    }
    if run.record_times.windows(2).any(|w| !(w[1] > w[0]))
        || run
            .record_times
            .iter()
            .any(|t| !(*t > 0.0 && *t <= run.t_end))
    {
        return Err(Error::InvalidParameter(
            "record times must increase strictly within (0, t_end]".into(),
        ));
    }

    let mut ensemble = ParticleEnsemble::from_profile(run.n_particles, profile, run.seed)?;
    let mut events = run.log_events.then(Vec::new);

    // segment boundaries: record times, always t_end, and in self-consistent
    // mode the geometric refresh schedule
    let mut bounds: Vec<f64> = run.record_times.clone();
    if bounds.last().copied() != Some(run.t_end) {
        bounds.push(run.t_end);
    }
    if matches!(run.mode, RateMode::SelfConsistent { .. }) {
        let mut t = 0.0f64;
        while t < run.t_end {
            t = (1.02 * t).max(t + 1e-3);
            bounds.push(t.min(run.t_end));
        }
    }
    bounds.sort_by(|a, b| a.partial_cmp(b).unwrap());
    bounds.dedup();

    let mut rows = Vec::new();
    let mut eps_now = current_rate(&ensemble, run.mode);
    let mut record_iter = run.record_times.iter().copied().peekable();
    rows.push(summarize(&ensemble, eps_now, &run.betas));

    for &t1 in &bounds {
        let t0 = ensemble.t;
        if t1 > t0 {
            advance_segment(&mut ensemble, t1, eps_now, &mut events);
        }
        eps_now = current_rate(&ensemble, run.mode);
        if record_iter.peek().copied() == Some(t1) {
            record_iter.next();
            rows.push(summarize(&ensemble, eps_now, &run.betas));
        }
    }

    Ok(McTrajectory {
        betas: run.betas.clone(),
        rows,
        events,
        ensemble,
    })
}

/// Weighted sample moment of (rho zeta)^beta with a batch-means standard
/// error over about sqrt(n) contiguous batches.
pub fn empirical_moment(ensemble: &ParticleEnsemble, beta: f64) -> (f64, f64) {
    let n = ensemble.particles.len();
    let nb = (n as f64).sqrt().round().max(1.0) as usize;
    let means: Vec<f64> = (0..nb)
        .into_par_iter()
        .map(|b| {
            let lo = b * n / nb;
            let hi = (b + 1) * n / nb;
            let sum: f64 = ensemble.particles[lo..hi]
                .iter()
                .map(|p| (beta * (p.x + p.zeta.ln())).exp())
                .sum();
            sum / (hi - lo) as f64
        })
        .collect();
    let grand = means.iter().sum::<f64>() / nb as f64;
    if nb < 2 {
        return (grand, f64::INFINITY);
    }
    let var = means.iter().map(|m| (m - grand) * (m - grand)).sum::<f64>() / (nb - 1) as f64;
    (grand, (var / nb as f64).sqrt())
}

/// Renders the recorded summary rows as CSV. Full 17-digit floats so that
/// two runs agree on bytes exactly when they agree on every double.
pub fn summary_csv(trajectory: &McTrajectory) -> String {
    let mut out = String::from("t,mass,epsilon");
    for beta in &trajectory.betas {
        out.push_str(&format!(",moment_{beta},se_{beta}"));
    }
    out.push('\n');
    for row in &trajectory.rows {
        out.push_str(&format!(
            "{:.16e},{:.16e},{:.16e}",
            row.t, row.mass, row.epsilon
        ));
        for (m, se) in &row.moments {
            out.push_str(&format!(",{m:.16e},{se:.16e}"));
        }
        out.push('\n');
    }
    out
}

/// Fits the constant in t * eps(t) ~ const over the last decade of record
/// times of a self-consistent run and reports it against 1 - a.
#[derive(Debug, Clone, Copy)]
pub struct RateTraceReport {
    pub fitted: f64,
    pub expected: f64,
    pub samples: usize,
}

pub fn epsilon_trace_check(trajectory: &McTrajectory, a: f64) -> Result<RateTraceReport> {
    let t_end = trajectory
        .rows
        .last()
        .map(|r| r.t)
        .ok_or_else(|| Error::WindowTooShort("empty trajectory".into()))?;
    let vals: Vec<f64> = trajectory
        .rows
        .iter()
        .filter(|r| r.t >= t_end / 10.0 && r.t > 0.0)
        .map(|r| r.t * r.epsilon)
        .collect();
    if vals.len() < 2 {
        return Err(Error::WindowTooShort(
            "need at least two record points in the last decade".into(),
        ));
    }
    Ok(RateTraceReport {
        fitted: vals.iter().sum::<f64>() / vals.len() as f64,
        expected: 1.0 - a,
        samples: vals.len(),
    })
}

fn current_rate(ensemble: &ParticleEnsemble, mode: RateMode) -> f64 {
    match mode {
        RateMode::Constant(e) => e,
        RateMode::SelfConsistent { a } => {
            let partials: Vec<f64> = ensemble
                .particles
                .par_chunks(CHUNK)
                .map(|chunk| {
                    chunk
                        .iter()
                        .map(|p| (-a * (p.x + p.zeta.ln())).exp())
                        .sum::<f64>()
                })
                .collect();
            // ordered fold keeps the reduction independent of worker count
            let sum: f64 = partials.iter().sum();
            ensemble.weight * sum / ensemble.total_mass
        }
    }
}

fn advance_segment(
    ensemble: &mut ParticleEnsemble,
    t1: f64,
    rate: f64,
    events: &mut Option<Vec<CollisionEvent>>,
) {
    let t0 = ensemble.t;
    let chunk_events: Vec<Vec<CollisionEvent>> = ensemble
        .particles
        .par_chunks_mut(CHUNK)
        .map(|chunk| {
            let mut log = Vec::new();
            for p in chunk {
                let mut t = t0;
                if rate > 0.0 {
                    loop {
                        // u in (0, 1]; the clock is exact at frozen rate
                        let u = 1.0 - p.rng.gen::<f64>();
                        let gap = -u.ln() / rate;
                        if t + gap >= t1 {
                            break;
                        }
                        t += gap;
                        p.zeta += gap;
                        let before = (p.x, p.zeta);
                        p.x += p.zeta.ln();
                        p.zeta = 1.0;
                        if events.is_some() {
                            log.push(CollisionEvent {
                                t,
                                x_before: before.0,
                                zeta_before: before.1,
                                x_after: p.x,
                            });
                        }
                    }
                }
                p.zeta += t1 - t;
            }
            log
        })
        .collect();
    if let Some(sink) = events.as_mut() {
        for mut chunk in chunk_events {
            sink.append(&mut chunk);
        }
    }
    ensemble.t = t1;
}

fn summarize(ensemble: &ParticleEnsemble, epsilon: f64, betas: &[f64]) -> SummaryRow {
    SummaryRow {
        t: ensemble.t,
        mass: ensemble.total_mass,
        epsilon,
        moments: betas
            .iter()
            .map(|b| empirical_moment(ensemble, *b))
            .collect(),
    }
}

fn sample_initial_positions(particles: &mut [Particle], profile: &InitialProfile) -> Result<()> {
    // the target law in X is G0(X) e^X; Gaussians tilt in closed form,
    // compact profiles go through rejection against a constant envelope
    let plan = SamplePlan::build(profile)?;
    particles.par_iter_mut().for_each(|p| {
        p.x = plan.draw(&mut p.rng, profile);
    });
    Ok(())
}

enum SamplePlan {
    /// Exact: the exponential tilt of a Gaussian is the shifted Gaussian.
    Shifted { mean: f64, sigma: f64 },
    /// Rejection on [lo, hi] with bound >= sup G0(x) e^x.
    Rejection { lo: f64, hi: f64, bound: f64 },
}

impl SamplePlan {
    fn build(profile: &InitialProfile) -> Result<Self> {
        if let Some((mean, sigma)) = profile.gaussian_parameters() {
            return Ok(SamplePlan::Shifted {
                mean: mean + sigma * sigma,
                sigma,
            });
        }
        let (lo, hi) = profile.support().ok_or_else(|| {
            Error::Unsupported("initial sampling needs a Gaussian or compact profile".into())
        })?;
        // sup of the tilted density is bounded by sup G0 times e^hi; a scan
        // locates sup G0 up to the grid, padded for safety
        let mut sup = 0.0f64;
        for k in 0..=4096 {
            let x = lo + (hi - lo) * k as f64 / 4096.0;
            sup = sup.max(profile.density(x));
        }
        if sup <= 0.0 {
            return Err(Error::Degenerate("profile has no mass to sample".into()));
        }
        Ok(SamplePlan::Rejection {
            lo,
            hi,
            bound: 1.05 * sup * hi.exp(),
        })
    }

    fn draw(&self, rng: &mut ChaCha8Rng, profile: &InitialProfile) -> f64 {
        match self {
            SamplePlan::Shifted { mean, sigma } => {
                // Box-Muller: two uniforms to one normal
                let u1: f64 = 1.0 - rng.gen::<f64>();
                let u2: f64 = rng.gen();
                let z = (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos();
                mean + sigma * z
            }
            SamplePlan::Rejection { lo, hi, bound } => loop {
                let x = lo + (hi - lo) * rng.gen::<f64>();
                let y = bound * rng.gen::<f64>();
                if y < profile.density(x) * x.exp() {
                    return x;
                }
            },
        }
    }
}
