//! Shared constants, spherical/Cartesian geometry, and the domain types the
//! rest of the crate is built on.
//!
//! Conventions (fixed once, used everywhere):
//! - FOA channels are stored in ACN order `W, Y, Z, X`.
//! - Azimuth is measured counterclockwise from +x in degrees, range
//!   `(-180, 180]`; elevation up from the horizontal plane, range `[-90, 90]`.
//! - The azimuth of a pole vector (`|z| = 1`) is 0 by convention so
//!   round-trips are deterministic.

use crate::error::{Error, Result};

/// Audio sample rate in Hz. Input WAV files at any other rate are rejected.
pub const SAMPLE_RATE: u32 = 24_000;
/// Number of sound event classes.
pub const N_CLASSES: usize = 13;
/// Number of parallel output tracks per class.
pub const N_TRACKS: usize = 3;
/// Number of mel bands in the feature representation.
pub const N_MELS: usize = 64;
/// Feature channels: 4 log-mel (W, Y, Z, X) + 3 intensity-vector components.
pub const FEATURE_CHANNELS: usize = 7;
/// STFT window length in samples (Hann).
pub const STFT_WINDOW: usize = 1024;
/// STFT hop in samples (20 ms).
pub const STFT_HOP: usize = 480;
/// Label frame duration in milliseconds.
pub const LABEL_FRAME_MS: usize = 100;
/// Feature frames per label frame (100 ms / 20 ms).
pub const FRAMES_PER_LABEL: usize = 5;
/// Label frames per scoring segment (1 s).
pub const SEGMENT_FRAMES: usize = 10;
/// Flattened output size per frame: tracks x classes x (Rx, Ry, Rz, D).
pub const OUTPUT_NEURONS: usize = 156;
/// Audio samples per label frame.
pub const SAMPLES_PER_LABEL_FRAME: usize = 2400;

// Output-head arithmetic and frame-alignment invariants, checked at compile time.
const _: () = assert!(N_TRACKS * N_CLASSES * 4 == OUTPUT_NEURONS);
const _: () = assert!(SAMPLES_PER_LABEL_FRAME == FRAMES_PER_LABEL * STFT_HOP);
const _: () = assert!(LABEL_FRAME_MS * SAMPLE_RATE as usize == SAMPLES_PER_LABEL_FRAME * 1000);

/// Channel ordering tag for [`FoaClip`]. Only ACN (W, Y, Z, X) is supported.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ChannelOrder {
    Wyzx,
}

/// A 4-channel first-order-ambisonics clip at 24 kHz.
#[derive(Debug, Clone, PartialEq)]
pub struct FoaClip {
    samples: Vec<Vec<f32>>,
    sample_rate: u32,
    channel_order: ChannelOrder,
}

impl FoaClip {
    /// Wraps raw channel data, validating channel count, sample rate,
    /// equal channel lengths, and finiteness.
    pub fn new(samples: Vec<Vec<f32>>, sample_rate: u32) -> Result<Self> {
        if samples.len() != 4 {
            return Err(Error::Domain(format!(
                "FOA clip must have exactly 4 channels, got {}",
                samples.len()
            )));
        }
        if sample_rate != SAMPLE_RATE {
            return Err(Error::Domain(format!(
                "FOA clip must be {SAMPLE_RATE} Hz, got {sample_rate}"
            )));
        }
        let n = samples[0].len();
        if samples.iter().any(|ch| ch.len() != n) {
            return Err(Error::Domain("FOA channels have unequal lengths".into()));
        }
        if samples.iter().flatten().any(|s| !s.is_finite()) {
            return Err(Error::Domain("FOA clip contains non-finite samples".into()));
        }
        Ok(FoaClip {
            samples,
            sample_rate,
            channel_order: ChannelOrder::Wyzx,
        })
    }

    pub fn samples(&self) -> &[Vec<f32>] {
        &self.samples
    }

    pub fn sample_rate(&self) -> u32 {
        self.sample_rate
    }

    pub fn channel_order(&self) -> ChannelOrder {
        self.channel_order
    }

    /// Samples per channel.
    pub fn n_samples(&self) -> usize {
        self.samples[0].len()
    }

    /// Consumes the clip, returning the channel data.
    pub fn into_samples(self) -> Vec<Vec<f32>> {
        self.samples
    }
}

/// One labeled event frame from a metadata table.
///
/// `frame` counts 100 ms label frames; `distance` is in meters (the on-disk
/// CSV column is centimeters, converted at the I/O boundary).
#[derive(Debug, Clone, PartialEq)]
pub struct EventAnnotation {
    pub frame: usize,
    pub class_id: usize,
    pub source_id: u32,
    pub azimuth: f64,
    pub elevation: f64,
    pub distance: f64,
}

impl EventAnnotation {
    /// Checks class range, angle ranges, and positive distance.
    pub fn validate(&self) -> Result<()> {
        if self.class_id >= N_CLASSES {
            return Err(Error::Domain(format!(
                "class_id {} out of range (max {})",
                self.class_id,
                N_CLASSES - 1
            )));
        }
        check_angles(self.azimuth, self.elevation)?;
        if !(self.distance > 0.0) || !self.distance.is_finite() {
            return Err(Error::Domain(format!(
                "distance must be > 0 and finite, got {}",
                self.distance
            )));
        }
        Ok(())
    }
}

/// Cartesian direction vector. Unit-norm wherever a DOA is meant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DoaVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl DoaVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        DoaVector { x, y, z }
    }

    pub fn zero() -> Self {
        DoaVector::new(0.0, 0.0, 0.0)
    }

    pub fn norm(&self) -> f64 {
        (self.x * self.x + self.y * self.y + self.z * self.z).sqrt()
    }

    pub fn dot(&self, other: &DoaVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn scaled(&self, s: f64) -> DoaVector {
        DoaVector::new(self.x * s, self.y * s, self.z * s)
    }

    pub fn add(&self, other: &DoaVector) -> DoaVector {
        DoaVector::new(self.x + other.x, self.y + other.y, self.z + other.z)
    }

    /// Unit vector in the same direction; zero vectors are a domain error.
    pub fn normalized(&self) -> Result<DoaVector> {
        let n = self.norm();
        if n <= 0.0 || !n.is_finite() {
            return Err(Error::Domain("cannot normalize a zero-length vector".into()));
        }
        Ok(self.scaled(1.0 / n))
    }
}

fn check_angles(azimuth: f64, elevation: f64) -> Result<()> {
    if !azimuth.is_finite() || azimuth <= -180.0 || azimuth > 180.0 {
        return Err(Error::Domain(format!(
            "azimuth {azimuth} outside (-180, 180]"
        )));
    }
    if !elevation.is_finite() || !(-90.0..=90.0).contains(&elevation) {
        return Err(Error::Domain(format!(
            "elevation {elevation} outside [-90, 90]"
        )));
    }
    Ok(())
}

/// Wraps an azimuth in degrees into `(-180, 180]`.
pub fn wrap_azimuth(mut az: f64) -> f64 {
    while az > 180.0 {
        az -= 360.0;
    }
    while az <= -180.0 {
        az += 360.0;
    }
    az
}

/// Spherical (degrees) to Cartesian unit vector:
/// `x = cos el * cos az`, `y = cos el * sin az`, `z = sin el`.
pub fn sph_to_cart(azimuth: f64, elevation: f64) -> Result<DoaVector> {
    check_angles(azimuth, elevation)?;
    let az = azimuth.to_radians();
    let el = elevation.to_radians();
    Ok(DoaVector::new(
        el.cos() * az.cos(),
        el.cos() * az.sin(),
        el.sin(),
    ))
}

/// Cartesian to spherical degrees `(azimuth, elevation)`.
///
/// The input is normalized first; a pole vector gets azimuth 0.
pub fn cart_to_sph(v: DoaVector) -> Result<(f64, f64)> {
    let u = v.normalized()?;
    let horiz = u.x.hypot(u.y);
    if horiz < 1e-12 {
        // Pole: azimuth pinned to 0.
        return Ok((0.0, if u.z >= 0.0 { 90.0 } else { -90.0 }));
    }
    let az = wrap_azimuth(u.y.atan2(u.x).to_degrees());
    let el = u.z.asin().to_degrees();
    Ok((az, el.clamp(-90.0, 90.0)))
}

/// Angle between two nonzero vectors in degrees, in `[0, 180]`.
pub fn angular_distance(u: DoaVector, v: DoaVector) -> Result<f64> {
    let a = u.normalized()?;
    let b = v.normalized()?;
    Ok(a.dot(&b).clamp(-1.0, 1.0).acos().to_degrees())
}
