//! Feed-to-cell illumination, cell-to-point channels and field superposition.
//!
//! Channels are narrowband scalar gains. The free-space model is a spherical
//! wave `(λ / 4πr)·e^{-j2πr/λ}` with no element pattern.

use num_complex::Complex;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::model::{CoefficientSchedule, ComplexEnvelope, Point3, PointSet, SurfaceGeometry};
use crate::scalar::{integer_ratio, Scalar};

pub fn free_space_gain<T: Scalar>(
    src: Point3<T>,
    dst: Point3<T>,
    wavelength: T,
) -> Result<Complex<T>> {
    if !(wavelength.is_finite() && wavelength > T::zero()) {
        return Err(Error::Domain(format!(
            "wavelength must be > 0, got {wavelength}"
        )));
    }
    let r = src.distance(&dst);
    if !(r > T::zero()) {
        return Err(Error::Domain(
            "free-space gain needs distinct endpoints".into(),
        ));
    }
    let magnitude = wavelength / (T::lit(4.0) * T::PI() * r);
    let turns = (r / wavelength).fract();
    Ok(Complex::from_polar(magnitude, -T::two_pi() * turns))
}

#[derive(Debug, Clone, PartialEq)]
pub enum ChannelKind<T> {
    /// Every gain is one.
    Identity,
    FreeSpace {
        wavelength: T,
    },
    /// `obs[cell][point]`; feed gains default to one.
    ExplicitMatrix {
        obs: Vec<Vec<Complex<T>>>,
        feed: Option<Vec<Complex<T>>>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChannelModel<T> {
    pub kind: ChannelKind<T>,
    /// Complex-Gaussian noise variance per sample at each observation point.
    pub noise_psd: T,
}

impl<T: Scalar> ChannelModel<T> {
    pub fn identity() -> Self {
        Self {
            kind: ChannelKind::Identity,
            noise_psd: T::zero(),
        }
    }

    pub fn free_space(wavelength: T) -> Self {
        Self {
            kind: ChannelKind::FreeSpace { wavelength },
            noise_psd: T::zero(),
        }
    }

    pub fn explicit(obs: Vec<Vec<Complex<T>>>) -> Self {
        Self {
            kind: ChannelKind::ExplicitMatrix { obs, feed: None },
            noise_psd: T::zero(),
        }
    }

    pub fn with_noise(mut self, noise_psd: T) -> Self {
        self.noise_psd = noise_psd;
        self
    }
}

/// Gains from the feed to every cell and from every cell to every
/// observation point.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelSet<T> {
    feed_gains: Vec<Complex<T>>,
    // [point][cell]
    obs_gains: Vec<Vec<Complex<T>>>,
}

impl<T: Scalar> ChannelSet<T> {
    pub fn feed_gains(&self) -> &[Complex<T>] {
        &self.feed_gains
    }

    /// Gains from every cell to observation point `point`.
    pub fn point_gains(&self, point: usize) -> &[Complex<T>] {
        &self.obs_gains[point]
    }

    pub fn gain(&self, cell: usize, point: usize) -> Complex<T> {
        self.obs_gains[point][cell]
    }

    pub fn point_count(&self) -> usize {
        self.obs_gains.len()
    }

    pub fn cell_count(&self) -> usize {
        self.feed_gains.len()
    }
}

/// Builds feed and observation gains. Observation points are the non-feed
/// entries of `points`, in order. Without a feed point the surface is taken
/// as uniformly illuminated (unit feed gains).
pub fn build_channels<T: Scalar>(
    geometry: &SurfaceGeometry<T>,
    points: &PointSet<T>,
    model: &ChannelModel<T>,
) -> Result<ChannelSet<T>> {
    if !(model.noise_psd >= T::zero()) {
        return Err(Error::Config(format!(
            "noise_psd must be >= 0, got {}",
            model.noise_psd
        )));
    }
    let cells = geometry.cell_count();
    let observers = points.observation_points();
    let ones = |n: usize| vec![Complex::new(T::one(), T::zero()); n];
    match &model.kind {
        ChannelKind::Identity => Ok(ChannelSet {
            feed_gains: ones(cells),
            obs_gains: vec![ones(cells); observers.len()],
        }),
        ChannelKind::FreeSpace { wavelength } => {
            if !(*wavelength > T::zero()) {
                return Err(Error::Config(format!(
                    "wavelength must be > 0, got {wavelength}"
                )));
            }
            points.validate_against(geometry)?;
            let positions = geometry.cell_positions();
            let feed_gains = match points.feed() {
                Some(feed) => positions
                    .iter()
                    .map(|c| free_space_gain(feed, *c, *wavelength))
                    .collect::<Result<_>>()?,
                None => ones(cells),
            };
            let obs_gains = observers
                .iter()
                .map(|(p, _)| {
                    positions
                        .iter()
                        .map(|c| free_space_gain(*c, *p, *wavelength))
                        .collect::<Result<Vec<_>>>()
                })
                .collect::<Result<_>>()?;
            Ok(ChannelSet {
                feed_gains,
                obs_gains,
            })
        }
        ChannelKind::ExplicitMatrix { obs, feed } => {
            if obs.len() != cells || obs.iter().any(|row| row.len() != observers.len()) {
                return Err(Error::Config(format!(
                    "explicit channel must be {cells} cells x {} points",
                    observers.len()
                )));
            }
            let feed_gains = match feed {
                Some(f) if f.len() != cells => {
                    return Err(Error::Config(format!(
                        "explicit feed gains must have {cells} entries, got {}",
                        f.len()
                    )))
                }
                Some(f) => f.clone(),
                None => ones(cells),
            };
            let obs_gains = (0..observers.len())
                .map(|p| obs.iter().map(|row| row[p]).collect())
                .collect();
            Ok(ChannelSet {
                feed_gains,
                obs_gains,
            })
        }
    }
}

/// Receiver noise: variance per complex sample, and a seed plus stream id
/// selecting an independent deterministic sequence.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec<T> {
    pub variance: T,
    pub seed: u64,
    pub stream: u64,
}

impl<T: Scalar> NoiseSpec<T> {
    pub fn none() -> Self {
        Self {
            variance: T::zero(),
            seed: 0,
            stream: 0,
        }
    }

    pub fn new(variance: T, seed: u64, stream: u64) -> Self {
        Self {
            variance,
            seed,
            stream,
        }
    }
}

/// Circular complex Gaussian samples with the variance of a [`NoiseSpec`].
pub struct ComplexGaussian<T> {
    rng: ChaCha8Rng,
    sigma: f64,
    _scalar: std::marker::PhantomData<T>,
}

impl<T: Scalar> ComplexGaussian<T> {
    pub fn new(spec: &NoiseSpec<T>) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
        rng.set_stream(spec.stream);
        let variance = spec.variance.to_f64().unwrap_or(0.0);
        Self {
            rng,
            sigma: (variance / 2.0).sqrt(),
            _scalar: std::marker::PhantomData,
        }
    }

    pub fn sample(&mut self) -> Complex<T> {
        let re: f64 = StandardNormal.sample(&mut self.rng);
        let im: f64 = StandardNormal.sample(&mut self.rng);
        Complex::new(T::lit(re * self.sigma), T::lit(im * self.sigma))
    }
}

fn add_noise<T: Scalar>(samples: &mut [Complex<T>], noise: &NoiseSpec<T>) -> Result<()> {
    if !(noise.variance >= T::zero()) {
        return Err(Error::Config(format!(
            "noise variance must be >= 0, got {}",
            noise.variance
        )));
    }
    if noise.variance > T::zero() {
        let mut gen = ComplexGaussian::new(noise);
        for s in samples.iter_mut() {
            *s = *s + gen.sample();
        }
    }
    Ok(())
}

/// Field at one observation point: `Σ gain_c · field_c` plus receiver noise.
pub fn superpose<T: Scalar>(
    fields: &[ComplexEnvelope<T>],
    gains: &[Complex<T>],
    noise: &NoiseSpec<T>,
) -> Result<ComplexEnvelope<T>> {
    let first = fields
        .first()
        .ok_or_else(|| Error::Contract("superpose needs at least one cell field".into()))?;
    first.require_nonempty("superpose")?;
    if gains.len() != fields.len() {
        return Err(Error::Contract(format!(
            "{} gains for {} cell fields",
            gains.len(),
            fields.len()
        )));
    }
    if let Some(i) = fields
        .iter()
        .position(|f| f.len() != first.len() || !first.same_timebase(f))
    {
        return Err(Error::Contract(format!(
            "cell field {i} does not share length, rate, carrier and t0 with cell 0"
        )));
    }
    let mut out = vec![Complex::new(T::zero(), T::zero()); first.len()];
    for (field, g) in fields.iter().zip(gains) {
        for (acc, x) in out.iter_mut().zip(field.samples()) {
            *acc = *acc + *g * *x;
        }
    }
    add_noise(&mut out, noise)?;
    Ok(first.with_samples(out))
}

/// Per-cell incident field: `feed_gain_c · carrier`.
pub fn illuminate<T: Scalar>(
    carrier: &ComplexEnvelope<T>,
    feed_gains: &[Complex<T>],
) -> Vec<ComplexEnvelope<T>> {
    feed_gains
        .iter()
        .map(|g| carrier.with_samples(carrier.samples().iter().map(|x| *g * *x).collect()))
        .collect()
}

/// Field at one observation point for the whole illuminate → reflect →
/// superpose chain, without materialising per-cell envelopes.
///
/// Cells sharing a schedule sequence are folded into one effective gain
/// `Σ feed_c · obs_c` before the time loop. `schedule` may run at any rate
/// that divides the carrier's sample rate; coefficients are held.
pub fn observe<T: Scalar>(
    carrier: &ComplexEnvelope<T>,
    schedule: &CoefficientSchedule<T>,
    feed_gains: &[Complex<T>],
    point_gains: &[Complex<T>],
    noise: &NoiseSpec<T>,
) -> Result<ComplexEnvelope<T>> {
    carrier.require_nonempty("observe")?;
    let cells = schedule.cell_count();
    if feed_gains.len() != cells || point_gains.len() != cells {
        return Err(Error::Contract(format!(
            "schedule covers {cells} cells but got {} feed and {} point gains",
            feed_gains.len(),
            point_gains.len()
        )));
    }
    let hold = integer_ratio(carrier.sample_rate(), schedule.control_rate()).ok_or_else(|| {
        Error::Contract(format!(
            "envelope rate {} Hz is not an integer multiple of schedule rate {} Hz",
            carrier.sample_rate(),
            schedule.control_rate()
        ))
    })?;
    if schedule.len() * hold != carrier.len() {
        return Err(Error::Contract(format!(
            "schedule spans {} envelope samples, carrier has {}",
            schedule.len() * hold,
            carrier.len()
        )));
    }
    let zero = Complex::new(T::zero(), T::zero());
    let effective: Vec<(Complex<T>, Vec<Complex<T>>)> = schedule
        .groups()
        .into_iter()
        .zip(schedule.sequences())
        .filter(|(cells, _)| !cells.is_empty())
        .map(|(cells, seq)| {
            let g = cells
                .iter()
                .fold(zero, |acc, &c| acc + point_gains[c] * feed_gains[c]);
            (g, seq.iter().map(|c| c.to_complex()).collect())
        })
        .collect();
    let mut out = vec![zero; carrier.len()];
    for (g, seq) in &effective {
        for (k, (acc, x)) in out.iter_mut().zip(carrier.samples()).enumerate() {
            *acc = *acc + *g * (seq[k / hold] * *x);
        }
    }
    add_noise(&mut out, noise)?;
    Ok(carrier.with_samples(out))
}
