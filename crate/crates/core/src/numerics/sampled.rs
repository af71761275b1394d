pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => {
            let step = (hi - lo) / (n - 1) as f64;
            (0..n)
                .map(|i| if i == n - 1 { hi } else { lo + step * i as f64 })
                .collect()
        }
    }
}

/// `n` points spaced uniformly in `ln x` between `lo` and `hi` (both > 0).
pub fn logspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    let (a, b) = (lo.ln(), hi.ln());
    linspace(a, b, n)
        .into_iter()
        .enumerate()
        .map(|(i, x)| if i == 0 { lo } else if i + 1 == n { hi } else { x.exp() })
        .collect()
}

/// Composite Simpson rule over uniformly spaced samples. An odd number of
/// intervals is closed with Simpson's 3/8 rule on the last three.
pub fn simpson(ys: &[f64], h: f64) -> Option<f64> {
    let n = ys.len().checked_sub(1)?;
    if n < 2 {
        return None;
    }
    let simpson_13 = |seg: &[f64]| -> f64 {
        let m = seg.len() - 1;
        let mut acc = seg[0] + seg[m];
        for (i, y) in seg.iter().enumerate().take(m).skip(1) {
            acc += if i % 2 == 1 { 4.0 * y } else { 2.0 * y };
        }
        acc * h / 3.0
    };
    if n % 2 == 0 {
        return Some(simpson_13(ys));
    }
    if n == 3 {
        return Some(3.0 * h / 8.0 * (ys[0] + 3.0 * ys[1] + 3.0 * ys[2] + ys[3]));
    }
    let head = &ys[..=n - 3];
    let tail = &ys[n - 3..];
    Some(simpson_13(head) + 3.0 * h / 8.0 * (tail[0] + 3.0 * tail[1] + 3.0 * tail[2] + tail[3]))
}

/// Piecewise-linear interpolation of `ys(xs)` at `x`; `xs` must be sorted
/// ascending. Returns `None` outside `[xs[0], xs[last]]`.
pub fn interpolate_linear(xs: &[f64], ys: &[f64], x: f64) -> Option<f64> {
    if xs.len() < 2 || xs.len() != ys.len() || x < xs[0] || x > xs[xs.len() - 1] {
        return None;
    }
    let i = xs.partition_point(|&v| v <= x).clamp(1, xs.len() - 1);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let w = if x1 > x0 { (x - x0) / (x1 - x0) } else { 0.0 };
    Some(ys[i - 1] + w * (ys[i] - ys[i - 1]))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids_hit_endpoints() {
        let g = logspace(1e-2, 1e5, 200);
        assert_eq!(g[0], 1e-2);
        assert_eq!(g[199], 1e5);
        assert!(g.windows(2).all(|w| w[1] > w[0]));
        assert_eq!(linspace(0.0, 1.0, 5), vec![0.0, 0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn simpson_exact_on_cubics() {
        for n in [4usize, 5, 7, 10] {
            let h = 2.0 / n as f64;
            let ys: Vec<f64> = (0..=n).map(|i| (i as f64 * h).powi(3)).collect();
            let v = simpson(&ys, h).unwrap();
            assert!((v - 4.0).abs() < 1e-12, "n={n} v={v}");
        }
        assert!(simpson(&[1.0, 2.0], 1.0).is_none());
    }

    #[test]
    fn linear_interpolation() {
        let xs = [0.0, 1.0, 3.0];
        let ys = [0.0, 2.0, 6.0];
        assert_eq!(interpolate_linear(&xs, &ys, 2.0), Some(4.0));
        assert_eq!(interpolate_linear(&xs, &ys, 3.0), Some(6.0));
        assert_eq!(interpolate_linear(&xs, &ys, 3.5), None);
    }
}
