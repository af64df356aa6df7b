//! Waveform post-processing: log-decay fits, inter-channel delay, spectra.

use rustfft::{num_complex::Complex as FftComplex, FftPlanner};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// Extracted decay time, -1/slope of the log-envelope line.
    pub t1: f64,
    /// Intercept of the fitted line in log-amplitude.
    pub intercept: f64,
    pub r_squared: f64,
    pub peaks_used: usize,
}

/// Envelope points for the decay fit: local maxima of |v| above `floor`.
/// A monotone envelope (no interior maxima, e.g. a pure exponential) falls
/// back to every above-floor sample.
fn envelope_points(samples: &[(f64, f64)], floor: f64) -> Vec<(f64, f64)> {
    let mut peaks = Vec::new();
    for i in 1..samples.len().saturating_sub(1) {
        let a = samples[i - 1].1.abs();
        let b = samples[i].1.abs();
        let c = samples[i + 1].1.abs();
        if b > floor && b >= a && b >= c && (b > a || b > c) {
            peaks.push((samples[i].0, b));
        }
    }
    if peaks.len() < 3 {
        samples
            .iter()
            .filter(|(_, v)| v.abs() > floor)
            .map(|&(t, v)| (t, v.abs()))
            .collect()
    } else {
        peaks
    }
}

/// Least-squares line through (t_peak, ln |v_peak|); t1 = -1/slope.
pub fn t1_fit(samples: &[(f64, f64)], floor: f64) -> Result<DecayFit> {
    let points = envelope_points(samples, floor);
    if points.len() < 3 {
        return Err(Error::InsufficientPeaks {
            needed: 3,
            got: points.len(),
        });
    }
    let n = points.len() as f64;
    let logs: Vec<(f64, f64)> = points.iter().map(|&(t, v)| (t, v.ln())).collect();
    let mean_t = logs.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = logs.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = logs.iter().map(|p| (p.0 - mean_t).powi(2)).sum();
    let sxy: f64 = logs.iter().map(|p| (p.0 - mean_t) * (p.1 - mean_y)).sum();
    let syy: f64 = logs.iter().map(|p| (p.1 - mean_y).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientPeaks {
            needed: 3,
            got: points.len(),
        });
    }
    let slope = sxy / sxx;
    if slope >= 0.0 {
        return Err(Error::NoDecay { slope });
    }
    let r_squared = if syy == 0.0 { 1.0 } else { (sxy * sxy) / (sxx * syy) };
    Ok(DecayFit {
        t1: -1.0 / slope,
        intercept: mean_y - slope * mean_t,
        r_squared: r_squared.clamp(0.0, 1.0),
        peaks_used: points.len(),
    })
}

/// Delay of `b` relative to `a` by the argmax of |normalized
/// cross-correlation| over all lags; positive when `b` lags `a`. Ties break
/// toward the smallest |lag|. Also returns the signed peak correlation.
pub fn estimate_delay(a: &[(f64, f64)], b: &[(f64, f64)], dt: f64) -> Result<(f64, f64)> {
    if a.len() != b.len() || a.is_empty() {
        return Err(Error::ShapeMismatch {
            expected: format!("two equal-length series (len {})", a.len()),
            got: format!("len {}", b.len()),
        });
    }
    let n = a.len();
    let mean = |s: &[(f64, f64)]| s.iter().map(|p| p.1).sum::<f64>() / n as f64;
    let (ma, mb) = (mean(a), mean(b));
    let xa: Vec<f64> = a.iter().map(|p| p.1 - ma).collect();
    let xb: Vec<f64> = b.iter().map(|p| p.1 - mb).collect();
    let norm = |x: &[f64]| x.iter().map(|v| v * v).sum::<f64>().sqrt();
    let (na, nb) = (norm(&xa), norm(&xb));
    if na == 0.0 || nb == 0.0 {
        return Err(Error::UndefinedCorrelation);
    }

    let mut best_lag: i64 = 0;
    let mut best_corr = 0.0f64;
    let mut initialized = false;
    for abs_lag in 0..n as i64 {
        for lag in if abs_lag == 0 { vec![0] } else { vec![-abs_lag, abs_lag] } {
            // r(lag) = sum_t a[t] b[t + lag] / (||a|| ||b||)
            let mut sum = 0.0;
            for t in 0..n as i64 {
                let u = t + lag;
                if u >= 0 && u < n as i64 {
                    sum += xa[t as usize] * xb[u as usize];
                }
            }
            let corr = sum / (na * nb);
            if !initialized || corr.abs() > best_corr.abs() {
                best_corr = corr;
                best_lag = lag;
                initialized = true;
            }
        }
    }
    Ok((best_lag as f64 * dt, best_corr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WindowKind {
    None,
    Hann,
}

/// Single-sided DFT magnitude with zero-padding to the next power of two;
/// bin spacing 1/(N dt).
pub fn spectrum(samples: &[(f64, f64)]) -> Result<Vec<(f64, f64)>> {
    spectrum_with(samples, WindowKind::None)
}

pub fn spectrum_with(samples: &[(f64, f64)], window: WindowKind) -> Result<Vec<(f64, f64)>> {
    if samples.len() < 2 {
        return Err(Error::InsufficientData {
            needed: 2,
            got: samples.len(),
        });
    }
    let dt = samples[1].0 - samples[0].0;
    for (i, pair) in samples.windows(2).enumerate() {
        let step = pair[1].0 - pair[0].0;
        let deviation = (step - dt).abs();
        if deviation > 1e-9 * dt.abs().max(1e-300) {
            return Err(Error::NonUniformSampling {
                index: i + 1,
                deviation,
            });
        }
    }

    let n = samples.len().next_power_of_two();
    let mut buf: Vec<FftComplex<f64>> = Vec::with_capacity(n);
    let len = samples.len();
    for (i, &(_, v)) in samples.iter().enumerate() {
        let w = match window {
            WindowKind::None => 1.0,
            WindowKind::Hann => {
                let phase = std::f64::consts::TAU * i as f64 / (len - 1) as f64;
                0.5 * (1.0 - phase.cos())
            }
        };
        buf.push(FftComplex::new(v * w, 0.0));
    }
    buf.resize(n, FftComplex::new(0.0, 0.0));

    FftPlanner::new().plan_fft_forward(n).process(&mut buf);

    let df = 1.0 / (n as f64 * dt);
    Ok((0..=n / 2)
        .map(|k| (k as f64 * df, buf[k].norm()))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::TAU;

    fn sampled(f: impl Fn(f64) -> f64, dt: f64, n: usize) -> Vec<(f64, f64)> {
        (0..n).map(|i| (i as f64 * dt, f(i as f64 * dt))).collect()
    }

    mod decay {
        use super::*;

        #[test]
        fn damped_oscillation_recovers_the_decay_time() {
            let t1 = 7.4e-3;
            let series = sampled(
                |t| (-t / t1).exp() * (TAU * 500.0 * t).cos(),
                1e-5,
                4000, // 40 ms at 100 kHz
            );
            let fit = t1_fit(&series, 1e-3).unwrap();
            assert!(
                (fit.t1 - t1).abs() / t1 < 0.02,
                "t1 = {:.4e}, expected {t1:.4e}",
                fit.t1
            );
            assert!(fit.r_squared > 0.99);
        }

        #[test]
        fn pure_exponential_uses_all_samples_and_is_exact() {
            let tau = 0.35;
            let series = sampled(|t| (-t / tau).exp(), 1e-3, 1000);
            let fit = t1_fit(&series, 0.0).unwrap();
            assert!((fit.t1 - tau).abs() / tau < 1e-3);
            assert_eq!(fit.peaks_used, 1000);
            assert_relative_eq!(fit.r_squared, 1.0, epsilon = 1e-9);
        }

        #[test]
        fn constant_signal_reports_no_decay() {
            let series = sampled(|_| 2.0, 1e-3, 100);
            assert!(matches!(t1_fit(&series, 0.0), Err(Error::NoDecay { .. })));
        }

        #[test]
        fn growing_signal_reports_no_decay() {
            let series = sampled(|t| (t / 0.1).exp(), 1e-3, 100);
            assert!(matches!(t1_fit(&series, 0.0), Err(Error::NoDecay { .. })));
        }

        #[test]
        fn too_few_points_is_an_error() {
            let series = vec![(0.0, 1.0), (1.0, 0.5)];
            assert!(matches!(
                t1_fit(&series, 0.0),
                Err(Error::InsufficientPeaks { .. })
            ));
        }

        #[test]
        fn amplitude_scaling_leaves_t1_unchanged() {
            let series = sampled(|t| (-t / 0.02).exp() * (TAU * 200.0 * t).cos(), 1e-4, 1000);
            let scaled: Vec<(f64, f64)> = series.iter().map(|&(t, v)| (t, 17.0 * v)).collect();
            let f1 = t1_fit(&series, 0.0).unwrap();
            let f2 = t1_fit(&scaled, 0.0).unwrap();
            assert!((f1.t1 - f2.t1).abs() < 1e-12 * f1.t1.abs());
        }
    }

    mod delay {
        use super::*;

        fn burst(t: f64) -> f64 {
            // compactly supported wave packet centered at 25 ms
            let arg = (t - 0.025) / 0.005;
            (-arg * arg).exp() * (TAU * 400.0 * t).sin()
        }

        #[test]
        fn injected_shift_is_recovered_exactly() {
            let dt = 1e-4;
            let n = 1000;
            let a = sampled(burst, dt, n);
            let b: Vec<(f64, f64)> = (0..n)
                .map(|i| {
                    let t = i as f64 * dt;
                    (t, if i >= 142 { burst((i - 142) as f64 * dt) } else { 0.0 })
                })
                .collect();
            let (delay, corr) = estimate_delay(&a, &b, dt).unwrap();
            assert_relative_eq!(delay, 14.2e-3, epsilon = 1e-12);
            assert!(corr > 0.99);
        }

        #[test]
        fn identical_signals_have_zero_delay() {
            let a = sampled(burst, 1e-4, 1000);
            let (delay, corr) = estimate_delay(&a, &a, 1e-4).unwrap();
            assert_eq!(delay, 0.0);
            assert_relative_eq!(corr, 1.0, epsilon = 1e-12);
        }

        #[test]
        fn negated_signal_reports_negative_peak_at_zero_lag() {
            let a = sampled(burst, 1e-4, 1000);
            let b: Vec<(f64, f64)> = a.iter().map(|&(t, v)| (t, -v)).collect();
            let (delay, corr) = estimate_delay(&a, &b, 1e-4).unwrap();
            // brute-force oracle over all lags: |r| is maximal at lag 0
            assert_eq!(delay, 0.0);
            assert_relative_eq!(corr, -1.0, epsilon = 1e-12);
        }

        #[test]
        fn delay_is_antisymmetric() {
            let dt = 1e-4;
            let n = 1000;
            let a = sampled(burst, dt, n);
            let b: Vec<(f64, f64)> = (0..n)
                .map(|i| {
                    let t = i as f64 * dt;
                    (t, if i >= 57 { burst((i - 57) as f64 * dt) } else { 0.0 })
                })
                .collect();
            let (d_ab, _) = estimate_delay(&a, &b, dt).unwrap();
            let (d_ba, _) = estimate_delay(&b, &a, dt).unwrap();
            assert_relative_eq!(d_ab, -d_ba, epsilon = 1e-12);
        }

        #[test]
        fn zero_variance_is_rejected() {
            let a = sampled(|_| 1.0, 1e-4, 100);
            let b = sampled(burst, 1e-4, 100);
            assert!(matches!(
                estimate_delay(&a, &b, 1e-4),
                Err(Error::UndefinedCorrelation)
            ));
        }
    }

    mod spectra {
        use super::*;

        /// Direct DFT summation oracle at one bin.
        fn direct_dft_bin(samples: &[(f64, f64)], n_padded: usize, k: usize) -> f64 {
            let mut re = 0.0;
            let mut im = 0.0;
            for (i, &(_, v)) in samples.iter().enumerate() {
                let phase = -TAU * (k as f64) * (i as f64) / n_padded as f64;
                re += v * phase.cos();
                im += v * phase.sin();
            }
            (re * re + im * im).sqrt()
        }

        #[test]
        fn bin_exact_sine_concentrates_in_one_bin() {
            let n = 1024;
            let dt = 1e-3;
            let freq = 32.0 / (n as f64 * dt); // exactly bin 32
            let series = sampled(|t| (TAU * freq * t).sin(), dt, n);
            let spec = spectrum(&series).unwrap();
            let peak = spec[32].1;
            for (k, &(_, mag)) in spec.iter().enumerate() {
                if k != 32 {
                    assert!(mag < 1e-10 * peak, "sidelobe at bin {k}: {mag:.3e}");
                }
            }
            assert_relative_eq!(spec[32].0, freq, epsilon = 1e-12);
        }

        #[test]
        fn two_sines_give_two_dominant_bins_matching_direct_dft() {
            let n = 2048;
            let dt = 5e-4;
            let f1 = 64.0 / (n as f64 * dt);
            let f2 = 200.0 / (n as f64 * dt);
            let series = sampled(|t| (TAU * f1 * t).sin() + 0.5 * (TAU * f2 * t).sin(), dt, n);
            let spec = spectrum(&series).unwrap();
            let mut ranked: Vec<(usize, f64)> =
                spec.iter().enumerate().map(|(k, &(_, m))| (k, m)).collect();
            ranked.sort_by(|a, b| b.1.partial_cmp(&a.1).unwrap());
            let top: Vec<usize> = ranked[..2].iter().map(|&(k, _)| k).collect();
            assert!(top.contains(&64) && top.contains(&200), "top bins {top:?}");
            for &(k, mag) in &ranked[..2] {
                assert_relative_eq!(mag, direct_dft_bin(&series, n, k), max_relative = 1e-10);
            }
        }

        #[test]
        fn parseval_identity_holds() {
            let n = 1500; // padded to 2048
            let dt = 1e-3;
            let series = sampled(|t| (TAU * 37.3 * t).sin() + 0.2 * (TAU * 141.0 * t).cos(), dt, n);
            let spec = spectrum(&series).unwrap();
            let padded = series.len().next_power_of_two();
            let time_energy: f64 = series.iter().map(|&(_, v)| v * v).sum();
            // real input: interior bins appear twice in the two-sided sum
            let mut spec_energy = spec[0].1.powi(2) + spec[padded / 2].1.powi(2);
            for &(_, m) in &spec[1..padded / 2] {
                spec_energy += 2.0 * m * m;
            }
            spec_energy /= padded as f64;
            assert_relative_eq!(time_energy, spec_energy, max_relative = 1e-9);
        }

        #[test]
        fn non_uniform_sampling_is_rejected() {
            let mut series = sampled(|t| t.sin(), 1e-3, 64);
            series[10].0 += 3e-4;
            assert!(matches!(
                spectrum(&series),
                Err(Error::NonUniformSampling { .. })
            ));
        }

        #[test]
        fn hann_window_suppresses_leakage() {
            let n = 1024;
            let dt = 1e-3;
            let freq = 32.7 / (n as f64 * dt); // deliberately off-bin
            let series = sampled(|t| (TAU * freq * t).sin(), dt, n);
            let plain = spectrum_with(&series, WindowKind::None).unwrap();
            let hann = spectrum_with(&series, WindowKind::Hann).unwrap();
            let far_leak = |spec: &[(f64, f64)]| {
                let peak = spec.iter().map(|p| p.1).fold(0.0, f64::max);
                spec.iter()
                    .enumerate()
                    .filter(|(k, _)| (*k as i64 - 33).abs() > 20)
                    .map(|(_, p)| p.1)
                    .fold(0.0, f64::max)
                    / peak
            };
            assert!(far_leak(&hann) < far_leak(&plain) / 10.0);
        }
    }
}
