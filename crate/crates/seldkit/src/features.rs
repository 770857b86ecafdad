//! FOA feature extraction: a clip becomes a `7 x T x 64` tensor of four
//! log-mel channels (W, Y, Z, X) plus three mel-projected, per-bin-normalized
//! intensity-vector components.
//!
//! Pinned analysis parameters: 1024-sample Hann window, 480-sample hop
//! (20 ms, so 5 feature frames tile one 100 ms label frame), non-centered
//! framing, 64 triangular mel filters between 50 Hz and 12 kHz on the HTK mel
//! scale, each filter normalized to sum 1 over the 513 FFT bins.

use std::sync::OnceLock;

use rustfft::num_complex::Complex64;
use rustfft::FftPlanner;

use crate::error::{Error, Result};
use crate::io::{TensorFile, TensorHeader};
use crate::types::{DoaVector, FoaClip, FEATURE_CHANNELS, N_MELS, SAMPLE_RATE, STFT_HOP, STFT_WINDOW};

/// One-sided FFT bin count for the pinned window.
pub const N_BINS: usize = STFT_WINDOW / 2 + 1;

/// Mel filterbank band edges in Hz.
pub const MEL_FMIN: f64 = 50.0;
pub const MEL_FMAX: f64 = 12_000.0;

/// Additive floor inside `10*log10(power + EPS)`; silence maps to -100 dB.
pub const LOG_FLOOR_EPS: f64 = 1e-10;

/// Names of the 7 feature channels, in storage order.
pub const CHANNEL_NAMES: [&str; FEATURE_CHANNELS] = [
    "logmel_W", "logmel_Y", "logmel_Z", "logmel_X", "iv_x", "iv_y", "iv_z",
];

/// Feature frame hop in milliseconds.
pub const HOP_MS: f64 = STFT_HOP as f64 * 1000.0 / SAMPLE_RATE as f64;

/// Complex 4-channel STFT, `[4][T][513]`, non-centered Hann frames.
pub struct Spectrogram {
    values: Vec<Complex64>,
    n_frames: usize,
    pub win: usize,
    pub hop: usize,
}

impl Spectrogram {
    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    #[inline]
    pub fn at(&self, channel: usize, frame: usize, bin: usize) -> Complex64 {
        self.values[(channel * self.n_frames + frame) * N_BINS + bin]
    }
}

/// The `7 x T x 64` input tensor, stored row-major as `[channel][frame][mel]`
/// in `f32` (the on-disk dtype).
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureTensor {
    values: Vec<f32>,
    n_frames: usize,
}

impl FeatureTensor {
    pub fn from_values(values: Vec<f32>, n_frames: usize) -> Result<Self> {
        if values.len() != FEATURE_CHANNELS * n_frames * N_MELS {
            return Err(Error::Shape(format!(
                "feature tensor needs {}x{}x{} values, got {}",
                FEATURE_CHANNELS,
                n_frames,
                N_MELS,
                values.len()
            )));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::Numeric("feature tensor contains non-finite values".into()));
        }
        Ok(FeatureTensor { values, n_frames })
    }

    pub fn n_frames(&self) -> usize {
        self.n_frames
    }

    #[inline]
    pub fn get(&self, channel: usize, frame: usize, mel: usize) -> f32 {
        self.values[(channel * self.n_frames + frame) * N_MELS + mel]
    }

    #[inline]
    pub fn set(&mut self, channel: usize, frame: usize, mel: usize, v: f32) {
        self.values[(channel * self.n_frames + frame) * N_MELS + mel] = v;
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn to_tensor_file(&self) -> TensorFile {
        let header = TensorHeader {
            shape: vec![FEATURE_CHANNELS, self.n_frames, N_MELS],
            sample_rate: SAMPLE_RATE,
            hop_ms: HOP_MS,
            channel_names: CHANNEL_NAMES.iter().map(|s| s.to_string()).collect(),
        };
        TensorFile {
            header,
            data: self.values.clone(),
        }
    }

    pub fn from_tensor_file(file: &TensorFile) -> Result<Self> {
        let shape = &file.header.shape;
        if shape.len() != 3 || shape[0] != FEATURE_CHANNELS || shape[2] != N_MELS {
            return Err(Error::Shape(format!(
                "expected feature shape [{FEATURE_CHANNELS}, T, {N_MELS}], got {shape:?}"
            )));
        }
        FeatureTensor::from_values(file.data.clone(), shape[1])
    }
}

fn hann_window(len: usize) -> Vec<f64> {
    (0..len)
        .map(|n| 0.5 * (1.0 - (2.0 * std::f64::consts::PI * n as f64 / len as f64).cos()))
        .collect()
}

/// Non-centered STFT of a clip; the clip must cover at least one window.
pub fn stft(clip: &FoaClip) -> Result<Spectrogram> {
    let n = clip.n_samples();
    if n < STFT_WINDOW {
        return Err(Error::Domain(format!(
            "clip has {n} samples; at least {STFT_WINDOW} required for one STFT frame"
        )));
    }
    let n_frames = (n - STFT_WINDOW) / STFT_HOP + 1;
    let window = hann_window(STFT_WINDOW);
    let fft = FftPlanner::<f64>::new().plan_fft_forward(STFT_WINDOW);

    let mut values = vec![Complex64::default(); 4 * n_frames * N_BINS];
    let mut buf = vec![Complex64::default(); STFT_WINDOW];
    for (ch, samples) in clip.samples().iter().enumerate() {
        for frame in 0..n_frames {
            let start = frame * STFT_HOP;
            for (i, slot) in buf.iter_mut().enumerate() {
                *slot = Complex64::new(samples[start + i] as f64 * window[i], 0.0);
            }
            fft.process(&mut buf);
            let base = (ch * n_frames + frame) * N_BINS;
            values[base..base + N_BINS].copy_from_slice(&buf[..N_BINS]);
        }
    }
    Ok(Spectrogram {
        values,
        n_frames,
        win: STFT_WINDOW,
        hop: STFT_HOP,
    })
}

fn hz_to_mel(f: f64) -> f64 {
    2595.0 * (1.0 + f / 700.0).log10()
}

fn mel_to_hz(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

fn build_filterbank() -> Vec<Vec<f64>> {
    let mel_lo = hz_to_mel(MEL_FMIN);
    let mel_hi = hz_to_mel(MEL_FMAX);
    // 64 triangles need 66 mel-spaced edge frequencies.
    let edges: Vec<f64> = (0..N_MELS + 2)
        .map(|i| mel_to_hz(mel_lo + (mel_hi - mel_lo) * i as f64 / (N_MELS + 1) as f64))
        .collect();
    let bin_hz = SAMPLE_RATE as f64 / STFT_WINDOW as f64;

    let mut rows = Vec::with_capacity(N_MELS);
    for m in 0..N_MELS {
        let (lo, center, hi) = (edges[m], edges[m + 1], edges[m + 2]);
        let mut row = vec![0.0; N_BINS];
        for (k, w) in row.iter_mut().enumerate() {
            let f = k as f64 * bin_hz;
            if f > lo && f < center {
                *w = (f - lo) / (center - lo);
            } else if (f - center).abs() < 1e-12 {
                *w = 1.0;
            } else if f > center && f < hi {
                *w = (hi - f) / (hi - center);
            }
        }
        let sum: f64 = row.iter().sum();
        assert!(sum > 0.0, "mel filter {m} has empty support");
        for w in &mut row {
            *w /= sum;
        }
        rows.push(row);
    }
    rows
}

/// The pinned `64 x 513` triangular mel filterbank, each row summing to 1.
pub fn mel_filterbank() -> &'static [Vec<f64>] {
    static FB: OnceLock<Vec<Vec<f64>>> = OnceLock::new();
    FB.get_or_init(build_filterbank)
}

/// Log-mel energies `10*log10(mel_power + 1e-10)`, shape `[4][T][64]`
/// flattened row-major.
pub fn logmel(spec: &Spectrogram) -> Vec<f64> {
    let fb = mel_filterbank();
    let t_len = spec.n_frames();
    let mut out = vec![0.0; 4 * t_len * N_MELS];
    let mut power = vec![0.0; N_BINS];
    for ch in 0..4 {
        for t in 0..t_len {
            for (k, p) in power.iter_mut().enumerate() {
                *p = spec.at(ch, t, k).norm_sqr();
            }
            for (m, row) in fb.iter().enumerate() {
                let mel_power: f64 = row.iter().zip(&power).map(|(w, p)| w * p).sum();
                out[(ch * t_len + t) * N_MELS + m] = 10.0 * (mel_power + LOG_FLOOR_EPS).log10();
            }
        }
    }
    out
}

/// Mel-projected sound intensity vectors, shape `[3][T][64]` flattened.
///
/// Per TF bin the intensity is `Re(conj(W) * (X, Y, Z))`; each component is
/// projected through the mel filterbank and the resulting 3-vector at each
/// `(t, mel)` cell is divided by its Euclidean norm plus `1e-10`, bounding
/// every component in `[-1, 1]`.
pub fn intensity_vectors(spec: &Spectrogram) -> Vec<f64> {
    // Clip channel storage order is W, Y, Z, X.
    const CH_W: usize = 0;
    const CH_Y: usize = 1;
    const CH_Z: usize = 2;
    const CH_X: usize = 3;

    let fb = mel_filterbank();
    let t_len = spec.n_frames();
    let mut out = vec![0.0; 3 * t_len * N_MELS];
    let mut ix = vec![0.0; N_BINS];
    let mut iy = vec![0.0; N_BINS];
    let mut iz = vec![0.0; N_BINS];
    for t in 0..t_len {
        for k in 0..N_BINS {
            let w = spec.at(CH_W, t, k).conj();
            ix[k] = (w * spec.at(CH_X, t, k)).re;
            iy[k] = (w * spec.at(CH_Y, t, k)).re;
            iz[k] = (w * spec.at(CH_Z, t, k)).re;
        }
        for (m, row) in fb.iter().enumerate() {
            let mx: f64 = row.iter().zip(&ix).map(|(w, v)| w * v).sum();
            let my: f64 = row.iter().zip(&iy).map(|(w, v)| w * v).sum();
            let mz: f64 = row.iter().zip(&iz).map(|(w, v)| w * v).sum();
            let norm = (mx * mx + my * my + mz * mz).sqrt() + 1e-10;
            out[(0 * t_len + t) * N_MELS + m] = mx / norm;
            out[(1 * t_len + t) * N_MELS + m] = my / norm;
            out[(2 * t_len + t) * N_MELS + m] = mz / norm;
        }
    }
    out
}

/// Full feature pipeline: `[logmel W,Y,Z,X ; iv x,y,z]` stacked on the
/// channel axis.
pub fn extract_features(clip: &FoaClip) -> Result<FeatureTensor> {
    let spec = stft(clip)?;
    let t_len = spec.n_frames();
    let lm = logmel(&spec);
    let iv = intensity_vectors(&spec);
    let mut values = Vec::with_capacity(FEATURE_CHANNELS * t_len * N_MELS);
    values.extend(lm.iter().map(|&v| v as f32));
    values.extend(iv.iter().map(|&v| v as f32));
    FeatureTensor::from_values(values, t_len)
}

/// Per-(channel, mel) mean and standard deviation over a corpus.
#[derive(Debug, Clone, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct FeatureStats {
    /// `[7][64]` row-major.
    pub mean: Vec<f64>,
    /// `[7][64]` row-major, floored at 1e-6.
    pub std: Vec<f64>,
}

/// Population statistics per channel-mel cell across all frames of all
/// tensors. Standard deviations are floored at 1e-6.
pub fn compute_stats(tensors: &[FeatureTensor]) -> Result<FeatureStats> {
    if tensors.is_empty() {
        return Err(Error::Domain("compute_stats needs at least one tensor".into()));
    }
    let cells = FEATURE_CHANNELS * N_MELS;
    let mut sum = vec![0.0f64; cells];
    let mut sumsq = vec![0.0f64; cells];
    let mut count = 0u64;
    for x in tensors {
        count += x.n_frames() as u64;
        for c in 0..FEATURE_CHANNELS {
            for t in 0..x.n_frames() {
                for m in 0..N_MELS {
                    let v = x.get(c, t, m) as f64;
                    sum[c * N_MELS + m] += v;
                    sumsq[c * N_MELS + m] += v * v;
                }
            }
        }
    }
    let n = count as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let std: Vec<f64> = sumsq
        .iter()
        .zip(&mean)
        .map(|(sq, mu)| (sq / n - mu * mu).max(0.0).sqrt().max(1e-6))
        .collect();
    Ok(FeatureStats { mean, std })
}

/// `(x - mean) / std` per channel-mel cell.
pub fn standardize(x: &FeatureTensor, stats: &FeatureStats) -> FeatureTensor {
    let mut out = x.clone();
    for c in 0..FEATURE_CHANNELS {
        for t in 0..x.n_frames() {
            for m in 0..N_MELS {
                let v = (x.get(c, t, m) as f64 - stats.mean[c * N_MELS + m])
                    / stats.std[c * N_MELS + m];
                out.set(c, t, m, v as f32);
            }
        }
    }
    out
}

/// Direction of the summed intensity-vector channels of a raw (not
/// standardized) feature tensor. Handy as a single-source DOA estimate.
pub fn mean_iv_direction(x: &FeatureTensor) -> Result<DoaVector> {
    let mut v = DoaVector::zero();
    for t in 0..x.n_frames() {
        for m in 0..N_MELS {
            v.x += x.get(4, t, m) as f64;
            v.y += x.get(5, t, m) as f64;
            v.z += x.get(6, t, m) as f64;
        }
    }
    v.normalized()
}
