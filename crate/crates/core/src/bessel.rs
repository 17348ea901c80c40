//! Bessel functions of the first kind, orders 0 and 1, on `[0, 20]`.

use crate::{Error, Real, Result};

/// Largest argument the evaluator is specified for.
pub const MAX_ARGUMENT: f64 = 20.0;

/// Position of the first maximum of `J_1`, the end of its monotone branch.
pub const J1_FIRST_MAX_ARG: f64 = 1.841_183_781_340_659_3;

/// Value of `J_1` at its first maximum.
pub const J1_FIRST_MAX: f64 = 0.581_865_224_281_596_4;

const SERIES_LIMIT: f64 = 2.0;

/// Bessel function `J_order(x)` for `order ∈ {0, 1}` and `0 ≤ x ≤ 20`.
pub fn bessel_j<T: Real>(order: u32, x: T) -> Result<T> {
    if order > 1 {
        return Err(Error::Domain(format!("Bessel order {order}")));
    }
    let xf = x.to_f64_lossy();
    if !(0.0..=MAX_ARGUMENT).contains(&xf) {
        return Err(Error::Domain(format!("Bessel argument {xf}")));
    }
    let v = if xf <= SERIES_LIMIT {
        series(order, xf)
    } else {
        miller(order, xf)
    };
    Ok(T::lit(v))
}

pub fn j0<T: Real>(x: T) -> Result<T> {
    bessel_j(0, x)
}

pub fn j1<T: Real>(x: T) -> Result<T> {
    bessel_j(1, x)
}

/// Ascending series `Σ (−1)^k (x/2)^{2k+n} / (k!(k+n)!)`.
fn series(order: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let q = -half * half;
    let mut term = if order == 0 { 1.0 } else { half };
    let mut sum = term;
    let n = f64::from(order);
    for k in 1..60 {
        let kf = k as f64;
        term *= q / (kf * (kf + n));
        sum += term;
        if term.abs() < 1e-18 * sum.abs().max(1e-300) {
            break;
        }
    }
    sum
}

/// Miller's downward recurrence normalised by `J_0 + 2Σ J_{2k} = 1`.
fn miller(order: u32, x: f64) -> f64 {
    let start = 2 * ((x as usize + 30) / 2);
    let (mut above, mut cur) = (0.0, 1e-30);
    let mut norm = 0.0;
    let mut j1 = 0.0;
    for k in (1..=start).rev() {
        // J_{k−1} = (2k/x) J_k − J_{k+1}
        let below = 2.0 * k as f64 / x * cur - above;
        above = cur;
        cur = below;
        match k - 1 {
            1 => j1 = cur,
            m if m > 0 && m % 2 == 0 => norm += 2.0 * cur,
            _ => {}
        }
    }
    norm += cur;
    if order == 0 {
        cur / norm
    } else {
        j1 / norm
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// `J_n(x) = (1/π)∫₀^π cos(nθ − x sin θ) dθ`, trapezoid rule on the
    /// periodic extension (spectrally accurate).
    fn integral_oracle(n: u32, x: f64) -> f64 {
        let m = 2000;
        let h = std::f64::consts::TAU / m as f64;
        (0..m)
            .map(|k| {
                let th = k as f64 * h;
                (f64::from(n) * th - x * th.sin()).cos()
            })
            .sum::<f64>()
            / m as f64
    }

    #[test]
    fn origin_values() {
        assert_eq!(j0(0.0_f64).unwrap(), 1.0);
        assert_eq!(j1(0.0_f64).unwrap(), 0.0);
    }

    #[test]
    fn agrees_with_integral_representation() {
        for i in 0..=400 {
            let x = i as f64 * 0.05;
            for n in 0..=1 {
                let v = bessel_j(n, x).unwrap();
                let o = integral_oracle(n, x);
                assert!((v - o).abs() < 1e-13, "J_{n}({x}) = {v} vs {o}");
            }
        }
    }

    #[test]
    fn series_and_recurrence_agree_across_the_switch() {
        for &x in &[1.5, 1.9, 2.0, 2.1, 2.5] {
            for n in 0..=1 {
                assert!((series(n, x) - miller(n, x)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn first_maximum_of_j1() {
        let v = j1(J1_FIRST_MAX_ARG).unwrap();
        assert!((v - J1_FIRST_MAX).abs() < 1e-15);
        let h = 1e-5;
        let d = (j1(J1_FIRST_MAX_ARG + h).unwrap() - j1(J1_FIRST_MAX_ARG - h).unwrap()) / (2.0 * h);
        assert!(d.abs() < 1e-9);
    }

    #[test]
    fn small_argument_series_oracle() {
        let x: f64 = 0.5171;
        let oracle = x / 2.0 - x.powi(3) / 16.0 + x.powi(5) / 384.0 - x.powi(7) / 18432.0
            + x.powi(9) / 1_474_560.0;
        assert!((j1(x).unwrap() - oracle).abs() < 1e-11);
        assert!((j1(x).unwrap() - 0.2500).abs() < 5e-5);
        assert!((j0(x).unwrap() - 0.9343).abs() < 5e-5);
    }

    #[test]
    fn domain_errors() {
        assert!(matches!(bessel_j(2, 1.0_f64), Err(Error::Domain(_))));
        assert!(bessel_j(0, -0.1_f64).is_err());
        assert!(bessel_j(0, 20.5_f64).is_err());
        assert!(j1(1.0_f32).is_ok());
    }
}
