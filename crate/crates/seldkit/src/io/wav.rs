//! FOA WAV reading and writing via the `hound` RIFF codec.
//!
//! Accepted input: 4 channels, 24 kHz, PCM 16/24-bit integer or 32-bit
//! float. Anything else is a format error — in particular there is no silent
//! resampling. Integer samples are scaled by the full negative range, so
//! 16-bit -32768 maps to exactly -1.0 and +32767 to 32767/32768.

use std::io::Cursor;
use std::path::Path;

use crate::error::{Error, Result};
use crate::types::{FoaClip, SAMPLE_RATE};

fn format_err(path: &Path, detail: impl Into<String>) -> Error {
    Error::Format {
        path: path.to_path_buf(),
        detail: detail.into(),
    }
}

pub fn read_foa_wav(path: &Path) -> Result<FoaClip> {
    let reader =
        hound::WavReader::open(path).map_err(|e| format_err(path, format!("bad WAV: {e}")))?;
    let spec = reader.spec();
    if spec.channels != 4 {
        return Err(format_err(
            path,
            format!("expected 4 channels, got {}", spec.channels),
        ));
    }
    if spec.sample_rate != SAMPLE_RATE {
        return Err(format_err(
            path,
            format!(
                "expected {SAMPLE_RATE} Hz, got {} (resampling is not performed)",
                spec.sample_rate
            ),
        ));
    }

    let interleaved: Vec<f32> = match (spec.sample_format, spec.bits_per_sample) {
        (hound::SampleFormat::Int, 16) => reader
            .into_samples::<i16>()
            .map(|s| s.map(|v| v as f32 / 32768.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format_err(path, format!("bad sample data: {e}")))?,
        (hound::SampleFormat::Int, 24) => reader
            .into_samples::<i32>()
            .map(|s| s.map(|v| v as f32 / 8_388_608.0))
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format_err(path, format!("bad sample data: {e}")))?,
        (hound::SampleFormat::Float, 32) => reader
            .into_samples::<f32>()
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| format_err(path, format!("bad sample data: {e}")))?,
        (fmt, bits) => {
            return Err(format_err(
                path,
                format!("unsupported sample format {fmt:?}/{bits}-bit"),
            ))
        }
    };

    if interleaved.len() % 4 != 0 {
        return Err(format_err(path, "sample count is not a multiple of 4"));
    }
    let n = interleaved.len() / 4;
    let mut channels = vec![Vec::with_capacity(n); 4];
    for frame in interleaved.chunks_exact(4) {
        for (ch, &s) in channels.iter_mut().zip(frame) {
            ch.push(s);
        }
    }
    FoaClip::new(channels, SAMPLE_RATE)
}

/// Writes a clip as 32-bit float WAV (atomic).
pub fn write_foa_wav(path: &Path, clip: &FoaClip) -> Result<()> {
    let spec = hound::WavSpec {
        channels: 4,
        sample_rate: clip.sample_rate(),
        bits_per_sample: 32,
        sample_format: hound::SampleFormat::Float,
    };
    let mut cursor = Cursor::new(Vec::new());
    {
        let mut writer = hound::WavWriter::new(&mut cursor, spec)
            .map_err(|e| format_err(path, format!("cannot encode WAV: {e}")))?;
        let chans = clip.samples();
        for i in 0..clip.n_samples() {
            for ch in chans {
                writer
                    .write_sample(ch[i])
                    .map_err(|e| format_err(path, format!("cannot encode WAV: {e}")))?;
            }
        }
        writer
            .finalize()
            .map_err(|e| format_err(path, format!("cannot encode WAV: {e}")))?;
    }
    super::write_atomic(path, cursor.get_ref())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write_pcm16(path: &Path, channels: u16, rate: u32, frames: usize, value: i16) {
        let spec = hound::WavSpec {
            channels,
            sample_rate: rate,
            bits_per_sample: 16,
            sample_format: hound::SampleFormat::Int,
        };
        let mut w = hound::WavWriter::create(path, spec).unwrap();
        for _ in 0..frames * channels as usize {
            w.write_sample(value).unwrap();
        }
        w.finalize().unwrap();
    }

    #[test]
    fn one_second_clip_has_24000_samples_per_channel() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("clip.wav");
        write_pcm16(&p, 4, SAMPLE_RATE, 24_000, 0);
        let clip = read_foa_wav(&p).unwrap();
        assert_eq!(clip.n_samples(), 24_000);
        assert_eq!(clip.samples().len(), 4);
    }

    #[test]
    fn wrong_channel_count_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("stereo.wav");
        write_pcm16(&p, 2, SAMPLE_RATE, 100, 0);
        assert!(matches!(read_foa_wav(&p), Err(Error::Format { .. })));
    }

    #[test]
    fn wrong_sample_rate_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("hi.wav");
        write_pcm16(&p, 4, 48_000, 100, 0);
        assert!(matches!(read_foa_wav(&p), Err(Error::Format { .. })));
    }

    #[test]
    fn malformed_riff_is_a_format_error() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("junk.wav");
        std::fs::write(&p, b"this is not a wav file at all").unwrap();
        assert!(matches!(read_foa_wav(&p), Err(Error::Format { .. })));
    }

    #[test]
    fn pcm16_full_scale_mapping() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("min.wav");
        write_pcm16(&p, 4, SAMPLE_RATE, 4, i16::MIN);
        let clip = read_foa_wav(&p).unwrap();
        assert_eq!(clip.samples()[0][0], -1.0);

        let p2 = dir.path().join("max.wav");
        write_pcm16(&p2, 4, SAMPLE_RATE, 4, i16::MAX);
        let clip = read_foa_wav(&p2).unwrap();
        assert_eq!(clip.samples()[0][0], 32767.0 / 32768.0);
    }

    #[test]
    fn float_round_trip_is_bit_exact() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("rt.wav");
        let chans: Vec<Vec<f32>> = (0..4)
            .map(|c| (0..500).map(|i| ((i * (c + 1)) as f32 * 0.37).sin() * 0.8).collect())
            .collect();
        let clip = FoaClip::new(chans, SAMPLE_RATE).unwrap();
        write_foa_wav(&p, &clip).unwrap();
        let back = read_foa_wav(&p).unwrap();
        assert_eq!(clip, back);
    }
}
