//! White-noise visibility and separating-hyperplane search.
//!
//! Mixing `|φ⁺⟩` with white noise at visibility `v` multiplies every
//! correlator by `v`, so a correlation functional with local bound `L` and
//! quantum value `Q` is violated exactly when `v > L / Q`.
//!
//! [`gilbert_separate`] computes the distance from a correlation point to
//! the local polytope with Gilbert's algorithm, augmented with away steps
//! that shift weight off the worst vertex already in use. The difference
//! between the point and its nearest local point is a Bell functional, and
//! it is certified against the exact local bound before being reported as
//! separating. [`robustness_search`] iterates this: separate, re-optimize
//! the measurements, add noise, repeat.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::functional::BellFunctional;
use crate::localbound::{
    local_bound_graycode_with, ExactOracle, HeuristicOracle, LinearOracle, LocalBoundOptions,
    StrategyAssignment,
};
use crate::matrix::Matrix;
use crate::polyhedra::{UnitVec3, VertexSet};
use crate::quantum::{
    correlation_point_from_vectors, correlation_point_maxent, seesaw_max, CorrelationPoint,
    SeeSawConfig, VectorStart,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CriticalVisibility {
    pub visibility: f64,
    /// False when the quantum value does not exceed the local bound; the
    /// visibility is then reported as 1.
    pub violation: bool,
}

pub fn critical_visibility(local: f64, quantum: f64) -> Result<CriticalVisibility> {
    if !local.is_finite() || !quantum.is_finite() || quantum <= 0.0 {
        return Err(Error::invalid(format!(
            "critical visibility needs a positive quantum value, got {quantum}"
        )));
    }
    if quantum <= local {
        return Ok(CriticalVisibility {
            visibility: 1.0,
            violation: false,
        });
    }
    Ok(CriticalVisibility {
        visibility: local / quantum,
        violation: true,
    })
}

pub fn mix_white_noise(p: &CorrelationPoint, v: f64) -> Result<CorrelationPoint> {
    if !(0.0..=1.0).contains(&v) {
        return Err(Error::invalid(format!("visibility {v} outside [0, 1]")));
    }
    CorrelationPoint::new(p.entries().map(|e| v * e))
}

#[derive(Clone, Debug)]
pub struct GilbertConfig {
    pub max_iter: usize,
    /// Stop once a step shortens the distance by less than this, or once the
    /// distance itself drops below it.
    pub tol: f64,
    /// Random starts for the best-response oracle used inside the loop;
    /// zero runs the exact oracle at every step.
    pub heuristic_starts: usize,
    pub seed: u64,
    pub local: LocalBoundOptions,
}

impl Default for GilbertConfig {
    fn default() -> Self {
        GilbertConfig {
            max_iter: 2000,
            tol: 1e-10,
            heuristic_starts: 32,
            seed: 0,
            local: LocalBoundOptions::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GilbertResult {
    /// Nearest local point found, equal (up to rounding) to the convex
    /// combination in `support`.
    pub closest_point: CorrelationPoint,
    pub support: Vec<(StrategyAssignment, f64)>,
    /// `target − closest_point`, scaled so that its largest coefficient has
    /// magnitude one.
    pub hyperplane: BellFunctional,
    pub distance: f64,
    pub distance_trace: Vec<f64>,
    pub iterations: usize,
    pub exact_oracle_calls: usize,
    /// Exact local bound of `hyperplane`.
    pub certified_local: f64,
    /// `hyperplane` evaluated at the target.
    pub target_value: f64,
    pub separated: bool,
}

fn canonical(s: StrategyAssignment) -> StrategyAssignment {
    if s.a_signs[0] < 0 {
        s.negated()
    } else {
        s
    }
}

enum Move {
    /// Towards an oracle vertex.
    Toward(StrategyAssignment),
    /// Away from a vertex already in the support.
    Away(usize),
}

struct Step {
    kind: Move,
    /// Applied as `s ← s + lambda·direction`.
    direction: Matrix,
    lambda: f64,
    distance: f64,
}

fn line_search(t: &Matrix, s: &Matrix, direction: Matrix, max: f64, kind: Move) -> Step {
    let d = t.sub(s);
    let ee = direction.dot(&direction);
    let lambda = if ee > 0.0 { (d.dot(&direction) / ee).clamp(0.0, max) } else { 0.0 };
    let moved = Matrix::from_fn(s.rows(), s.cols(), |i, j| {
        s.get(i, j) + lambda * direction.get(i, j)
    });
    Step {
        kind,
        direction,
        lambda,
        distance: t.sub(&moved).norm(),
    }
}

/// Segment projection onto the oracle vertex for `t − s`.
fn toward_step(oracle: &mut dyn LinearOracle, t: &Matrix, s: &Matrix) -> Result<Step> {
    let (vertex, _) = oracle.maximize(&t.sub(s))?;
    let w = vertex.correlations();
    Ok(line_search(t, s, w.sub(s), 1.0, Move::Toward(canonical(vertex))))
}

/// Moves weight off the support vertex least aligned with `t − s`.
fn away_step(t: &Matrix, s: &Matrix, support: &[(StrategyAssignment, f64)]) -> Option<Step> {
    let d = t.sub(s);
    let (i, (v, alpha)) = support
        .iter()
        .enumerate()
        .map(|(i, (v, a))| (i, (v.correlations(), *a)))
        .min_by(|a, b| d.dot(&a.1 .0).total_cmp(&d.dot(&b.1 .0)))?;
    if alpha >= 1.0 {
        return None;
    }
    Some(line_search(t, s, s.sub(&v), alpha / (1.0 - alpha), Move::Away(i)))
}

fn better(a: Step, b: Option<Step>) -> Step {
    match b {
        Some(b) if b.distance < a.distance => b,
        _ => a,
    }
}

pub fn gilbert_separate(target: &CorrelationPoint, config: &GilbertConfig) -> Result<GilbertResult> {
    let t = target.entries();
    let mut exact = ExactOracle {
        options: config.local.clone(),
    };
    let mut heuristic = (config.heuristic_starts > 0)
        .then(|| HeuristicOracle::new(config.heuristic_starts, config.seed));
    let mut exact_calls = 0;

    let first = match heuristic.as_mut() {
        Some(h) => h.maximize(t)?.0,
        None => {
            exact_calls += 1;
            exact.maximize(t)?.0
        }
    };
    let first = canonical(first);
    let mut s = first.correlations();
    let mut support = vec![(first, 1.0)];
    let mut distance = t.sub(&s).norm();
    let mut trace = vec![distance];
    let mut iterations = 0;

    while iterations < config.max_iter && distance > config.tol {
        let toward = match heuristic.as_mut() {
            Some(h) => toward_step(h, t, &s)?,
            None => {
                exact_calls += 1;
                toward_step(&mut exact, t, &s)?
            }
        };
        let mut step = better(toward, away_step(t, &s, &support));
        if distance - step.distance < config.tol && heuristic.is_some() {
            exact_calls += 1;
            step = better(toward_step(&mut exact, t, &s)?, Some(step));
        }
        if distance - step.distance < config.tol {
            break;
        }
        iterations += 1;
        let lambda = step.lambda;
        match step.kind {
            Move::Toward(vertex) => {
                for (_, weight) in &mut support {
                    *weight *= 1.0 - lambda;
                }
                match support.iter_mut().find(|(v, _)| *v == vertex) {
                    Some((_, weight)) => *weight += lambda,
                    None => support.push((vertex, lambda)),
                }
            }
            Move::Away(i) => {
                for (_, weight) in &mut support {
                    *weight *= 1.0 + lambda;
                }
                support[i].1 -= lambda;
            }
        }
        support.retain(|(_, weight)| *weight > 1e-15);
        for (i, v) in s.as_mut_slice().iter_mut().enumerate() {
            *v += lambda * step.direction.as_slice()[i];
        }
        distance = step.distance;
        trace.push(distance);
    }

    let diff = t.sub(&s);
    let scale = diff.max_abs();
    let coeffs = if scale > 0.0 { diff.map(|v| v / scale) } else { diff };
    let hyperplane = BellFunctional::new("gilbert", coeffs)?;
    let certified_local = local_bound_graycode_with(&hyperplane, &config.local)?.value;
    let target_value = hyperplane.value_at(t)?;
    let separated =
        scale > 0.0 && target_value > certified_local + 1e-9 * certified_local.abs().max(1.0);
    Ok(GilbertResult {
        closest_point: CorrelationPoint::new(s.map(|v| v.clamp(-1.0, 1.0)))?,
        support,
        hyperplane,
        distance,
        distance_trace: trace,
        iterations,
        exact_oracle_calls: exact_calls,
        certified_local,
        target_value,
        separated,
    })
}

/// How the target of each round is derived from the previous round's
/// optimal measurements.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseSchedule {
    /// Every round mixes the fresh quantum point at `1 − noise_step`.
    #[default]
    Fixed,
    /// Round `k` (from zero) mixes at `1 − (k + 1)·noise_step`, floored at 0.
    Cumulative,
}

#[derive(Clone, Debug)]
pub struct RobustnessConfig {
    pub noise_step: f64,
    pub max_rounds: usize,
    /// Rounds without a new best visibility before stopping.
    pub patience: usize,
    pub schedule: NoiseSchedule,
    pub gilbert: GilbertConfig,
    pub seesaw: SeeSawConfig,
}

impl Default for RobustnessConfig {
    fn default() -> Self {
        RobustnessConfig {
            noise_step: 0.005,
            max_rounds: 50,
            patience: 5,
            schedule: NoiseSchedule::Fixed,
            gilbert: GilbertConfig::default(),
            seesaw: SeeSawConfig::default(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessRound {
    pub round: usize,
    /// Visibility of the noise mixed into this round's target.
    pub target_visibility: f64,
    pub functional: BellFunctional,
    pub local: f64,
    pub quantum: f64,
    pub visibility: f64,
    pub gilbert_iterations: usize,
    pub distance: f64,
    pub alice: Vec<UnitVec3>,
    pub bob: Vec<UnitVec3>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    MaxRounds,
    Patience,
    /// The noisy target fell inside the local polytope.
    NotSeparated,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RobustnessTrace {
    pub rounds: Vec<RobustnessRound>,
    /// Minimum visibility over the rounds; 1 when no round completed.
    pub best_visibility: f64,
    /// Best visibility after each round.
    pub best_history: Vec<f64>,
    pub stop_reason: StopReason,
}

impl RobustnessTrace {
    pub fn best_round(&self) -> Option<&RobustnessRound> {
        self.rounds
            .iter()
            .find(|r| r.visibility == self.best_visibility)
    }
}

pub fn robustness_search(
    alice: &VertexSet,
    bob: &VertexSet,
    config: &RobustnessConfig,
) -> Result<RobustnessTrace> {
    robustness_search_with(alice, bob, config, |_| {})
}

/// [`robustness_search`] with a callback after every completed round.
pub fn robustness_search_with(
    alice: &VertexSet,
    bob: &VertexSet,
    config: &RobustnessConfig,
    mut on_round: impl FnMut(&RobustnessRound),
) -> Result<RobustnessTrace> {
    if !(0.0..=1.0).contains(&config.noise_step) {
        return Err(Error::invalid("noise step must lie in [0, 1]"));
    }
    let mut seesaw = config.seesaw.clone();
    seesaw.dim = 3;
    let mut target = correlation_point_maxent(alice, bob)?;
    let mut target_visibility = 1.0;
    let mut rounds: Vec<RobustnessRound> = Vec::new();
    let mut best_history = Vec::new();
    let mut best = f64::INFINITY;
    let mut stale = 0;
    let mut stop_reason = StopReason::MaxRounds;

    for round in 0..config.max_rounds {
        let g = gilbert_separate(&target, &config.gilbert)?;
        if !g.separated {
            stop_reason = StopReason::NotSeparated;
            break;
        }
        let (prev_a, prev_b) = match rounds.last() {
            Some(r) => (&r.alice[..], &r.bob[..]),
            None => (&alice.vertices[..], &bob.vertices[..]),
        };
        seesaw.extra_starts = vec![VectorStart::from_measurements(prev_a, prev_b)];
        let q = seesaw_max(&g.hyperplane, &seesaw)?;
        let (new_a, new_b) = q
            .bloch_measurements()
            .ok_or_else(|| Error::invalid("see-saw returned non-3D vectors"))?;
        let vis = critical_visibility(g.certified_local, q.value)?;
        let record = RobustnessRound {
            round,
            target_visibility,
            functional: g.hyperplane,
            local: g.certified_local,
            quantum: q.value,
            visibility: vis.visibility,
            gilbert_iterations: g.iterations,
            distance: g.distance,
            alice: new_a,
            bob: new_b,
        };
        on_round(&record);

        if record.visibility < best {
            best = record.visibility;
            stale = 0;
        } else {
            stale += 1;
        }
        best_history.push(best);

        target_visibility = match config.schedule {
            NoiseSchedule::Fixed => 1.0 - config.noise_step,
            NoiseSchedule::Cumulative => (1.0 - (round + 1) as f64 * config.noise_step).max(0.0),
        };
        let fresh = correlation_point_from_vectors(&record.alice, &record.bob)?;
        target = mix_white_noise(&fresh, target_visibility)?;
        rounds.push(record);
        if stale >= config.patience {
            stop_reason = StopReason::Patience;
            break;
        }
    }

    Ok(RobustnessTrace {
        best_visibility: best.min(1.0),
        rounds,
        best_history,
        stop_reason,
    })
}
