//! Conversions between the `x/2π` laboratory units used in parameter tables
//! and the SI angular frequencies (rad/s) used internally.

use crate::Real;

/// `f/2π` in MHz → angular frequency in rad/s.
pub fn mhz<T: Real>(f_over_2pi_mhz: T) -> T {
    f_over_2pi_mhz * T::lit(1e6) * T::TAU()
}

/// `f/2π` in kHz → angular frequency in rad/s.
pub fn khz<T: Real>(f_over_2pi_khz: T) -> T {
    f_over_2pi_khz * T::lit(1e3) * T::TAU()
}

/// Angular frequency in rad/s → `f/2π` in MHz.
pub fn to_mhz<T: Real>(omega: T) -> T {
    omega / (T::lit(1e6) * T::TAU())
}

pub fn ns<T: Real>(t_ns: T) -> T {
    t_ns * T::lit(1e-9)
}

pub fn to_ns<T: Real>(t: T) -> T {
    t * T::lit(1e9)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trips() {
        let w: f64 = mhz(600.0);
        assert!((w - 2.0 * std::f64::consts::PI * 6e8).abs() < 1e-3);
        assert!((to_mhz(w) - 600.0).abs() < 1e-12);
        assert!((to_ns(ns(66.5_f64)) - 66.5).abs() < 1e-12);
        assert!((khz(4.0_f64) - 2.0 * std::f64::consts::PI * 4e3).abs() < 1e-9);
    }
}
