//! Monte Carlo extremal search over pure two-qubit states and Pauli channels
//! with a fixed average probability, plus the closed-form surface and slice
//! tables.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use rayon::prelude::*;

use crate::bounds::{critical_m0, m_dep, m_low, m_up};
use crate::error::{Error, Result};
use crate::pauli::PauliChannel;
use crate::states::{general_pure_state, negativity, EulerAngles, TwoQubitState};

const SIMPLEX_STREAM: u64 = 1;
const SPHERE_STREAM: u64 = 2;

/// Sampling sizes and seed for a boundary scan.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SampleGrid {
    pub n_simplex: usize,
    pub n_sphere: usize,
    pub gamma_steps: usize,
    pub seed: u64,
}

impl Default for SampleGrid {
    fn default() -> Self {
        Self {
            n_simplex: 25,
            n_sphere: 150,
            gamma_steps: 7,
            seed: 0,
        }
    }
}

impl SampleGrid {
    fn validate(&self) -> Result<()> {
        if self.n_simplex == 0 || self.n_sphere == 0 || self.gamma_steps == 0 {
            return Err(Error::EmptyGrid);
        }
        Ok(())
    }
}

/// A state (by its Euler angles) paired with a channel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanPoint {
    pub angles: EulerAngles,
    pub channel: PauliChannel,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundaryScanResult {
    pub min_value: f64,
    pub max_value: f64,
    pub argmin: ScanPoint,
    pub argmax: ScanPoint,
    pub n_evaluated: usize,
}

/// `((alpha1, alpha2), (beta1, beta2))`: azimuth and polar angle per qubit.
pub type AnglePair = ((f64, f64), (f64, f64));

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// `n` channels uniform on the simplex `p1 + p2 + p3 = 3Ω`.
pub fn sample_simplex(omega: f64, n: usize, seed: u64) -> Result<Vec<PauliChannel>> {
    if !(omega > 0.0 && omega <= 4.0 / 3.0) {
        return Err(Error::OutOfRange(format!("omega = {omega} outside (0, 4/3]")));
    }
    let mut rng = stream_rng(seed, SIMPLEX_STREAM);
    (0..n)
        .map(|_| {
            let e: [f64; 3] = std::array::from_fn(|_| Exp1.sample(&mut rng));
            let total: f64 = e.iter().sum();
            let p = e.map(|x| 3.0 * omega * x / total);
            PauliChannel::from_probabilities(p[0], p[1], p[2])
        })
        .collect()
}

fn sphere_point<R: Rng + ?Sized>(rng: &mut R) -> (f64, f64) {
    let azimuth = rng.random_range(0.0..2.0 * PI);
    let polar = (1.0 - 2.0 * rng.random::<f64>()).clamp(-1.0, 1.0).acos();
    (azimuth, polar)
}

/// `n` angle pairs, each point area-uniform on the unit sphere.
pub fn sample_sphere_pairs(n: usize, seed: u64) -> Vec<AnglePair> {
    let mut rng = stream_rng(seed, SPHERE_STREAM);
    (0..n)
        .map(|_| {
            let a = sphere_point(&mut rng);
            let b = sphere_point(&mut rng);
            (a, b)
        })
        .collect()
}

/// `steps` equally spaced values from 0 to 2π inclusive.
pub fn gamma_grid(steps: usize) -> Vec<f64> {
    if steps <= 1 {
        return vec![0.0; steps];
    }
    let step = 2.0 * PI / (steps - 1) as f64;
    (0..steps).map(|k| k as f64 * step).collect()
}

/// The Cartesian product of states and channels a scan evaluates.
#[derive(Debug, Clone, PartialEq)]
pub struct ScanSpace {
    pub states: Vec<EulerAngles>,
    pub channels: Vec<PauliChannel>,
}

impl ScanSpace {
    pub fn from_grid(omega: f64, grid: &SampleGrid) -> Result<Self> {
        grid.validate()?;
        let channels = sample_simplex(omega, grid.n_simplex, grid.seed)?;
        let gammas = gamma_grid(grid.gamma_steps);
        let states = sample_sphere_pairs(grid.n_sphere, grid.seed)
            .into_iter()
            .flat_map(|((a1, a2), (b1, b2))| gammas.iter().map(move |&g| EulerAngles::new(a1, a2, g, b1, b2)))
            .collect();
        Ok(Self { states, channels })
    }

    pub fn inject_state(&mut self, angles: EulerAngles) {
        self.states.push(angles);
    }

    pub fn inject_channel(&mut self, channel: PauliChannel) {
        self.channels.push(channel);
    }

    pub fn len(&self) -> usize {
        self.states.len() * self.channels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Flat index `s * n_channels + c`.
    pub fn point(&self, flat: usize) -> ScanPoint {
        let nc = self.channels.len();
        ScanPoint {
            angles: self.states[flat / nc],
            channel: self.channels[flat % nc],
        }
    }

    /// Every value in flat-index order.
    pub fn evaluate(&self, theta: f64) -> Result<Vec<f64>> {
        if self.is_empty() {
            return Err(Error::EmptyGrid);
        }
        let states: Vec<TwoQubitState> = self
            .states
            .iter()
            .map(|a| general_pure_state(theta, a))
            .collect::<Result<_>>()?;
        let rows: Vec<Vec<f64>> = states
            .par_iter()
            .map(|rho| {
                self.channels
                    .iter()
                    .map(|ch| negativity(&ch.apply_local(ch, rho)?))
                    .collect::<Result<Vec<f64>>>()
            })
            .collect::<Result<_>>()?;
        Ok(rows.into_iter().flatten().collect())
    }

    /// Extremes of `values`; ties go to the lowest flat index.
    pub fn extremes(&self, values: &[f64]) -> Result<BoundaryScanResult> {
        if values.is_empty() || values.len() != self.len() {
            return Err(Error::EmptyGrid);
        }
        let (mut imin, mut imax) = (0, 0);
        for (i, &v) in values.iter().enumerate() {
            if v < values[imin] {
                imin = i;
            }
            if v > values[imax] {
                imax = i;
            }
        }
        Ok(BoundaryScanResult {
            min_value: values[imin],
            max_value: values[imax],
            argmin: self.point(imin),
            argmax: self.point(imax),
            n_evaluated: values.len(),
        })
    }

    pub fn scan(&self, theta: f64) -> Result<BoundaryScanResult> {
        self.extremes(&self.evaluate(theta)?)
    }
}

pub fn boundary_scan(omega: f64, theta: f64, grid: &SampleGrid) -> Result<BoundaryScanResult> {
    ScanSpace::from_grid(omega, grid)?.scan(theta)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Objective {
    Min,
    Max,
}

impl Objective {
    fn improves(self, candidate: f64, current: f64) -> bool {
        const EPS: f64 = 1e-14;
        match self {
            Objective::Min => candidate < current - EPS,
            Objective::Max => candidate > current + EPS,
        }
    }
}

/// Outcome of a local refinement.
#[derive(Debug, Clone, PartialEq)]
pub struct Refinement {
    pub start: ScanPoint,
    pub point: ScanPoint,
    pub value: f64,
    /// Objective after each accepted move, starting with the initial value.
    pub history: Vec<f64>,
}

pub const REFINE_ANGLE_STEP: f64 = 0.1;
pub const REFINE_PROB_STEP: f64 = 0.05;
pub const REFINE_MIN_STEP: f64 = 1e-6;
const REFINE_MAX_MOVES: usize = 100_000;

fn objective_value(theta: f64, angles: &EulerAngles, ch: &PauliChannel) -> Result<f64> {
    negativity(&ch.apply_local(ch, &general_pure_state(theta, angles)?)?)
}

/// Moves `amount` of probability from axis `from` to axis `to`, clipped at the
/// simplex edge.
fn shift_probability(ch: &PauliChannel, from: usize, to: usize, amount: f64) -> Option<PauliChannel> {
    let mut p = ch.probabilities();
    let t = amount.min(p[from]);
    if t <= 0.0 {
        return None;
    }
    p[from] -= t;
    p[to] += t;
    PauliChannel::from_probabilities(p[0], p[1], p[2]).ok()
}

/// Projected coordinate search over the five Euler angles and the channel
/// simplex (at fixed `Ω`). Steps halve after a sweep with no improvement.
pub fn refine_extreme(start: ScanPoint, objective: Objective, theta: f64) -> Result<Refinement> {
    let mut point = start;
    let mut value = objective_value(theta, &point.angles, &point.channel)?;
    let mut history = vec![value];
    let (mut angle_step, mut prob_step) = (REFINE_ANGLE_STEP, REFINE_PROB_STEP);

    while angle_step >= REFINE_MIN_STEP && history.len() < REFINE_MAX_MOVES {
        let mut improved = false;
        for k in 0..5 {
            for sign in [1.0, -1.0] {
                let mut a = point.angles.as_array();
                a[k] += sign * angle_step;
                let angles = EulerAngles::from_array(a);
                let v = objective_value(theta, &angles, &point.channel)?;
                if objective.improves(v, value) {
                    point.angles = angles;
                    value = v;
                    history.push(v);
                    improved = true;
                }
            }
        }
        for from in 0..3 {
            for to in 0..3 {
                if from == to {
                    continue;
                }
                let Some(channel) = shift_probability(&point.channel, from, to, prob_step) else {
                    continue;
                };
                let v = objective_value(theta, &point.angles, &channel)?;
                if objective.improves(v, value) {
                    point.channel = channel;
                    value = v;
                    history.push(v);
                    improved = true;
                }
            }
        }
        if !improved {
            angle_step /= 2.0;
            prob_step /= 2.0;
        }
    }
    Ok(Refinement {
        start,
        point,
        value,
        history,
    })
}

/// Distance from `ch` to the nearest flip channel with the same `Ω`, in
/// probability units.
pub fn distance_to_flip_vertex(ch: &PauliChannel) -> f64 {
    let p = ch.probabilities();
    let total: f64 = p.iter().sum();
    (0..3)
        .map(|axis| {
            (0..3)
                .map(|i| {
                    let target = if i == axis { total } else { 0.0 };
                    (p[i] - target).powi(2)
                })
                .sum::<f64>()
                .sqrt()
        })
        .fold(f64::INFINITY, f64::min)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfaceRow {
    pub m0: f64,
    pub omega: f64,
    pub m_low: f64,
    pub m_up: f64,
    pub m_dep: f64,
    /// `m0 >= critical_m0(omega)`.
    pub critical: bool,
}

pub fn surface_data(m0_grid: &[f64], omega_grid: &[f64]) -> Vec<SurfaceRow> {
    m0_grid
        .iter()
        .flat_map(|&m0| {
            omega_grid.iter().map(move |&omega| SurfaceRow {
                m0,
                omega,
                m_low: m_low(m0, omega),
                m_up: m_up(m0, omega),
                m_dep: m_dep(m0, omega),
                critical: critical_m0(omega).is_ok_and(|c| m0 >= c),
            })
        })
        .collect()
}

/// Bounds relative to the initial negativity.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SliceRow {
    pub omega: f64,
    pub low: f64,
    pub up: f64,
    pub dep: f64,
}

pub fn slice_data(m0: f64, omega_grid: &[f64]) -> Result<Vec<SliceRow>> {
    if !(m0 > 0.0 && m0 <= 1.0) {
        return Err(Error::OutOfRange(format!("m0 = {m0} outside (0, 1]")));
    }
    Ok(omega_grid
        .iter()
        .map(|&omega| SliceRow {
            omega,
            low: m_low(m0, omega) / m0,
            up: m_up(m0, omega) / m0,
            dep: m_dep(m0, omega) / m0,
        })
        .collect())
}

/// Uniform grid of `n` points on `[a, b]`.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![a],
        _ => (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect(),
    }
}
