use super::HeatmapError;
use crate::raster::ChannelStack;

fn softplus(z: f64) -> f64 {
    z.max(0.0) + (-z.abs()).exp().ln_1p()
}

/// Mean binary cross entropy of logits against targets over every pixel and
/// channel, in the overflow-free softplus form.
pub fn sigmoid_ce(logits: &ChannelStack, targets: &ChannelStack) -> Result<f64, HeatmapError> {
    if !logits.same_shape(targets) {
        return Err(HeatmapError::Shape(format!(
            "{}x{}x{} logits vs {}x{}x{} targets",
            logits.resolution(),
            logits.resolution(),
            logits.channels(),
            targets.resolution(),
            targets.resolution(),
            targets.channels()
        )));
    }
    let n = logits.data().len();
    if n == 0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (&x, &y) in logits.data().iter().zip(targets.data()) {
        let (x, y) = (x as f64, y as f64);
        if y != 0.0 {
            total += y * softplus(-x);
        }
        if y != 1.0 {
            total += (1.0 - y) * softplus(x);
        }
    }
    Ok(total / n as f64)
}

/// Mean over pixels of `−log softmax(x)[label]`, with the group's channels as
/// classes and the maximum subtracted before exponentiation.
pub fn softmax_ce(logits: &ChannelStack, labels: &[usize]) -> Result<f64, HeatmapError> {
    let pixels = logits.resolution() * logits.resolution();
    if labels.len() != pixels {
        return Err(HeatmapError::Shape(format!(
            "{} labels for {pixels} pixels",
            labels.len()
        )));
    }
    let g = logits.channels();
    if pixels == 0 {
        return Ok(0.0);
    }
    let mut total = 0.0;
    for (i, &label) in labels.iter().enumerate() {
        if label >= g {
            return Err(HeatmapError::LabelOutOfRange {
                pixel: i,
                label,
                classes: g,
            });
        }
        let x = |k: usize| logits.plane(k)[i] as f64;
        let m = (0..g).map(x).fold(f64::NEG_INFINITY, f64::max);
        if m == f64::INFINITY {
            let tops = (0..g).filter(|&k| x(k) == f64::INFINITY).count();
            total += if x(label) == f64::INFINITY {
                (tops as f64).ln()
            } else {
                f64::INFINITY
            };
            continue;
        }
        let lse = m + (0..g).map(|k| (x(k) - m).exp()).sum::<f64>().ln();
        total += lse - x(label);
    }
    Ok(total / pixels as f64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn stack(data: Vec<f32>, channels: usize, res: usize) -> ChannelStack {
        ChannelStack::from_parts(res, (0..channels).map(|k| k.to_string()).collect(), data)
    }

    #[test]
    fn zero_logits_give_ln2() {
        let z = stack(vec![0.0; 3 * 16], 3, 4);
        let l = sigmoid_ce(&z, &z).unwrap();
        assert!((l - std::f64::consts::LN_2).abs() < 1e-12);
    }

    #[test]
    fn saturated_sigmoid_is_zero() {
        let x = stack(vec![f32::INFINITY, f32::NEG_INFINITY], 2, 1);
        let y = stack(vec![1.0, 0.0], 2, 1);
        assert_eq!(sigmoid_ce(&x, &y).unwrap(), 0.0);
    }

    #[test]
    fn sigmoid_shape_mismatch() {
        assert!(sigmoid_ce(&stack(vec![0.0; 4], 1, 2), &stack(vec![0.0; 8], 2, 2)).is_err());
    }

    #[test]
    fn uniform_softmax_is_ln_g() {
        let x = stack(vec![0.3; 10 * 4], 10, 2);
        let l = softmax_ce(&x, &[0, 3, 9, 5]).unwrap();
        assert!((l - 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn infinite_true_logit_is_zero() {
        let x = stack(vec![f32::INFINITY, 1.0, -2.0], 3, 1);
        assert_eq!(softmax_ce(&x, &[0]).unwrap(), 0.0);
        assert_eq!(softmax_ce(&x, &[1]).unwrap(), f64::INFINITY);
    }

    #[test]
    fn label_out_of_range() {
        let x = stack(vec![0.0; 3], 3, 1);
        assert_eq!(
            softmax_ce(&x, &[3]),
            Err(HeatmapError::LabelOutOfRange {
                pixel: 0,
                label: 3,
                classes: 3
            })
        );
    }
}
