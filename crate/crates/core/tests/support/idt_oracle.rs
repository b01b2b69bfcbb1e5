//! Offline brute-force I-DT, written independently of the streaming
//! detector. Quadratic and slow; only for tests.

use gazepinch::{Direction, Fixation, FixationConfig, GazeSample, Millis};

fn dispersion(points: &[(Millis, Direction)]) -> f64 {
    let yaw_max = points.iter().map(|p| p.1.yaw).fold(f64::NEG_INFINITY, f64::max);
    let yaw_min = points.iter().map(|p| p.1.yaw).fold(f64::INFINITY, f64::min);
    let pitch_max = points.iter().map(|p| p.1.pitch).fold(f64::NEG_INFINITY, f64::max);
    let pitch_min = points.iter().map(|p| p.1.pitch).fold(f64::INFINITY, f64::min);
    (yaw_max - yaw_min) + (pitch_max - pitch_min)
}

/// All fixations in `samples`, oldest first, numbered from 0.
pub fn offline_idt(samples: &[GazeSample], cfg: &FixationConfig) -> Vec<Fixation> {
    let valid: Vec<(Millis, Direction)> = samples.iter().filter(|s| s.valid).map(|s| (s.t, s.dir)).collect();

    // split wherever two valid samples are too far apart
    let mut segments: Vec<&[(Millis, Direction)]> = Vec::new();
    let mut from = 0;
    for k in 1..=valid.len() {
        if k == valid.len() || valid[k].0 - valid[k - 1].0 > cfg.max_gap_ms {
            if k > from {
                segments.push(&valid[from..k]);
            }
            from = k;
        }
    }

    let mut out: Vec<Fixation> = Vec::new();
    for seg in segments {
        let mut i = 0;
        while i < seg.len() {
            let mut j = i;
            while j + 1 < seg.len() && dispersion(&seg[i..=j + 1]) <= cfg.dispersion_threshold_deg {
                j += 1;
            }
            if seg[j].0 - seg[i].0 >= cfg.min_duration_ms {
                let members = &seg[i..=j];
                let (mut sy, mut sp) = (0.0, 0.0);
                for (_, d) in members {
                    sy += d.yaw;
                    sp += d.pitch;
                }
                let n = members.len() as f64;
                out.push(Fixation {
                    id: out.len() as u64,
                    center: Direction {
                        yaw: sy / n,
                        pitch: sp / n,
                    },
                    start_ms: seg[i].0,
                    end_ms: seg[j].0,
                    dispersion_deg: dispersion(members),
                    ongoing: false,
                });
                i = j + 1;
            } else {
                i += 1;
            }
        }
    }

    // the last fixation is still open if nothing closed it
    if let (Some(last), Some(final_valid)) = (out.last_mut(), valid.last()) {
        let last_t = samples.last().map(|s| s.t).unwrap_or(0);
        if last.end_ms == final_valid.0 && last_t - last.end_ms <= cfg.max_gap_ms {
            last.ongoing = true;
        }
    }
    out
}
