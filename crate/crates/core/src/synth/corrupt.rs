use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use super::NoiseConfig;
use crate::extract::connected_components;
use crate::heatmap::{HeatmapStack, GEOMETRY, ICON_SEMANTICS, ROOM_SEMANTICS, SEMANTIC_TOLERANCE};

/// Each nonzero blob of a geometry channel is treated as one disk: dropped
/// with `dropout_prob`, otherwise shifted by a rounded U[-j, j]² offset.
/// Gaussian noise is then added to the geometry channels and clipped to
/// [0, 1]; semantic groups are renormalized where they no longer sum to one.
pub fn corrupt_heatmaps(stack: &HeatmapStack, noise: &NoiseConfig, seed: u64) -> HeatmapStack {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = stack.clone();
    let res = stack.resolution();
    let k = stack.channels();
    let geometry = GEOMETRY.start..GEOMETRY.end.min(k);

    for ch in geometry.clone() {
        let src = stack.plane(ch);
        let blobs = connected_components(src, res, f32::MIN_POSITIVE);
        if blobs.is_empty() {
            continue;
        }
        let mut moved = vec![0.0f32; res * res];
        for blob in blobs {
            let drop = noise.dropout_prob > 0.0 && rng.random_bool(noise.dropout_prob);
            let (dx, dy) = if noise.jitter_px > 0.0 {
                let j = noise.jitter_px;
                (
                    rng.random_range(-j..=j).round() as i64,
                    rng.random_range(-j..=j).round() as i64,
                )
            } else {
                (0, 0)
            };
            if drop {
                continue;
            }
            for (r, c) in blob.pixels {
                let (tr, tc) = (r as i64 + dy, c as i64 + dx);
                if tr < 0 || tc < 0 || tr >= res as i64 || tc >= res as i64 {
                    continue;
                }
                let t = tr as usize * res + tc as usize;
                moved[t] = moved[t].max(src[r * res + c]);
            }
        }
        out.plane_mut(ch).copy_from_slice(&moved);
    }

    if noise.heatmap_sigma > 0.0 {
        let n = Normal::new(0.0, noise.heatmap_sigma).expect("non-negative sigma");
        for ch in geometry {
            for v in out.plane_mut(ch) {
                *v = (*v + n.sample(&mut rng) as f32).clamp(0.0, 1.0);
            }
        }
    }

    for group in [ROOM_SEMANTICS, ICON_SEMANTICS] {
        if group.end > k {
            continue;
        }
        for px in 0..res * res {
            let sum: f64 = group.clone().map(|ch| out.plane(ch)[px] as f64).sum();
            if (sum - 1.0).abs() <= SEMANTIC_TOLERANCE || sum <= 0.0 {
                continue;
            }
            for ch in group.clone() {
                let v = &mut out.plane_mut(ch)[px];
                *v = (*v as f64 / sum) as f32;
            }
        }
    }
    out
}
