//! Short-time FFT magnitude spectrograms.

use super::{AudioSignal, FeatureSequence, FeaturesError, Modality};
use rustfft::num_complex::Complex;
use rustfft::FftPlanner;

/// Spectrogram parameters. The defaults (1024-point Hann window, 512-point
/// hop, log compression) produce 513-dim frames; the rectangular/no-log mode
/// exists for exact spectral checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectrogramConfig {
    pub window: usize,
    pub hop: usize,
    pub hann: bool,
    pub log_compress: bool,
}

impl Default for SpectrogramConfig {
    fn default() -> Self {
        SpectrogramConfig { window: 1024, hop: 512, hann: true, log_compress: true }
    }
}

impl SpectrogramConfig {
    pub fn rectangular(window: usize, hop: usize) -> Self {
        SpectrogramConfig { window, hop, hann: false, log_compress: false }
    }

    /// Number of retained bins: 0..window/2 inclusive.
    pub fn dim(&self) -> usize {
        self.window / 2 + 1
    }

    /// Stable string over all parameters, used for cache keying.
    pub fn cache_key(&self) -> String {
        format!(
            "spectrogram:w={},h={},hann={},log={}",
            self.window, self.hop, self.hann, self.log_compress
        )
    }
}

/// Computes the magnitude spectrogram. Frame `k` covers samples
/// `[k·hop, k·hop + window)` and is stamped with that range's start time;
/// the frame count is `floor((N − window)/hop) + 1`.
pub fn spectrogram(
    signal: &AudioSignal,
    config: &SpectrogramConfig,
) -> Result<FeatureSequence, FeaturesError> {
    assert!(config.window.is_power_of_two(), "window must be a power of two");
    assert!(config.hop > 0 && config.hop <= config.window, "0 < hop <= window required");
    let n = signal.samples.len();
    if n < config.window {
        return Err(FeaturesError::ShortSignal { len: n, window: config.window });
    }
    if let Some(index) = signal.samples.iter().position(|s| !s.is_finite()) {
        return Err(FeaturesError::NonFiniteSample { index });
    }

    let n_frames = (n - config.window) / config.hop + 1;
    let dim = config.dim();
    let window_fn: Vec<f64> = if config.hann {
        hann(config.window)
    } else {
        vec![1.0; config.window]
    };

    let mut planner = FftPlanner::<f64>::new();
    let fft = planner.plan_fft_forward(config.window);
    let mut buf = vec![Complex::new(0.0, 0.0); config.window];
    let mut frames = Vec::with_capacity(n_frames * dim);
    let mut times = Vec::with_capacity(n_frames);

    for k in 0..n_frames {
        let start = k * config.hop;
        for (i, slot) in buf.iter_mut().enumerate() {
            *slot = Complex::new(signal.samples[start + i] * window_fn[i], 0.0);
        }
        fft.process(&mut buf);
        for bin in buf.iter().take(dim) {
            let mag = bin.norm();
            frames.push(if config.log_compress { (1.0 + mag).ln() } else { mag });
        }
        times.push(start as f64 * 1000.0 / signal.sample_rate_hz as f64);
    }

    let mut seq = FeatureSequence::new(Modality::Audio, dim, frames);
    seq.frame_times_ms = Some(times);
    Ok(seq)
}

fn hann(window: usize) -> Vec<f64> {
    (0..window)
        .map(|i| {
            let x = std::f64::consts::PI * i as f64 / window as f64;
            x.sin().powi(2)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::TAU;

    fn signal(samples: Vec<f64>, rate: u32) -> AudioSignal {
        AudioSignal::new(samples, rate)
    }

    #[test]
    fn frame_count_formula() {
        let cfg = SpectrogramConfig::default();
        let seq = spectrogram(&signal(vec![0.0; 2048], 8000), &cfg).unwrap();
        assert_eq!(seq.n_frames(), 3);
        assert_eq!(seq.dim, 513);
    }

    #[test]
    fn frame_count_sweep() {
        for (n, window, hop) in
            [(1024, 1024, 512), (1025, 1024, 512), (1536, 1024, 512), (4096, 256, 128), (300, 256, 64)]
        {
            let cfg = SpectrogramConfig { window, hop, hann: true, log_compress: true };
            let seq = spectrogram(&signal(vec![0.01; n], 8000), &cfg).unwrap();
            assert_eq!(seq.n_frames(), (n - window) / hop + 1, "N={n} w={window} h={hop}");
        }
    }

    #[test]
    fn zero_signal_gives_zero_frames() {
        let cfg = SpectrogramConfig::default();
        let seq = spectrogram(&signal(vec![0.0; 2048], 8000), &cfg).unwrap();
        assert!(seq.frames.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn short_signal_rejected_with_padding_hint() {
        let cfg = SpectrogramConfig::default();
        let err = spectrogram(&signal(vec![0.0; 1023], 8000), &cfg).unwrap_err();
        assert!(err.to_string().contains("zero-pad"), "{err}");
    }

    #[test]
    fn non_finite_sample_rejected() {
        let cfg = SpectrogramConfig::rectangular(256, 128);
        let mut samples = vec![0.0; 512];
        samples[300] = f64::NAN;
        let err = spectrogram(&signal(samples, 8000), &cfg).unwrap_err();
        assert!(matches!(err, FeaturesError::NonFiniteSample { index: 300 }));
    }

    #[test]
    fn pure_tone_concentrates_in_its_bin() {
        // bin-16 sinusoid under a rectangular window: all off-bins below
        // 1e-9 of the peak
        let window = 1024;
        let cfg = SpectrogramConfig::rectangular(window, window);
        let samples: Vec<f64> =
            (0..window).map(|i| (TAU * 16.0 * i as f64 / window as f64).sin()).collect();
        let seq = spectrogram(&signal(samples, 8000), &cfg).unwrap();
        assert_eq!(seq.n_frames(), 1);
        let frame = seq.frame(0);
        let peak = frame[16];
        assert!((peak - window as f64 / 2.0).abs() < 1e-6, "peak {peak}");
        for (bin, &v) in frame.iter().enumerate() {
            if bin != 16 {
                assert!(v <= peak * 1e-9, "bin {bin} has {v}");
            }
        }
    }

    #[test]
    fn frame_times_are_start_times() {
        let cfg = SpectrogramConfig { window: 256, hop: 128, hann: true, log_compress: true };
        let seq = spectrogram(&signal(vec![0.0; 1024], 8000), &cfg).unwrap();
        let times = seq.frame_times_ms.unwrap();
        assert_eq!(times[0], 0.0);
        assert_eq!(times[1], 128.0 * 1000.0 / 8000.0);
    }

    #[test]
    fn parseval_rectangular_mode() {
        // sum over all N bins of |X|^2 equals N * sum |x|^2; reconstruct the
        // full spectrum from the retained half via conjugate symmetry
        let window = 512;
        let cfg = SpectrogramConfig::rectangular(window, window);
        let samples: Vec<f64> =
            (0..window).map(|i| ((i * 7919 % 104729) as f64 / 104729.0) - 0.5).collect();
        let time_energy: f64 = samples.iter().map(|s| s * s).sum();
        let seq = spectrogram(&signal(samples, 8000), &cfg).unwrap();
        let frame = seq.frame(0);
        let mut freq_energy = frame[0] * frame[0] + frame[window / 2] * frame[window / 2];
        for &m in &frame[1..window / 2] {
            freq_energy += 2.0 * m * m;
        }
        let expected = window as f64 * time_energy;
        assert!(
            (freq_energy - expected).abs() <= 1e-9 * expected.abs(),
            "freq {freq_energy} vs {expected}"
        );
    }

    #[test]
    fn log_compression_applied() {
        let window = 256;
        let samples: Vec<f64> =
            (0..window).map(|i| (TAU * 8.0 * i as f64 / window as f64).cos()).collect();
        let raw = spectrogram(
            &signal(samples.clone(), 8000),
            &SpectrogramConfig::rectangular(window, window),
        )
        .unwrap();
        let logged = spectrogram(
            &signal(samples, 8000),
            &SpectrogramConfig { window, hop: window, hann: false, log_compress: true },
        )
        .unwrap();
        for (r, l) in raw.frames.iter().zip(logged.frames.iter()) {
            assert!((l - (1.0 + r).ln()).abs() < 1e-12);
        }
    }

    #[test]
    fn hann_window_endpoints_and_symmetry() {
        let w = hann(8);
        assert_eq!(w[0], 0.0);
        for i in 1..8 {
            assert!((w[i] - w[(8 - i) % 8]).abs() < 1e-15);
        }
    }
}
