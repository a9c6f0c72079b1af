use core::fmt;

/// A delay that does not land on the sampling grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridError {
    pub delay: f64,
    pub sample_period: f64,
}

impl fmt::Display for GridError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "delay {} s is not a positive integer multiple of the sample period {} s",
            self.delay, self.sample_period
        )
    }
}

impl core::error::Error for GridError {}

/// Converts a delay in seconds to a whole number of samples.
///
/// The ratio has to be integral up to a relative rounding slack of `1e-9`,
/// since `0.13 / 0.001` is not exactly 130 in binary floating point.
pub fn grid_steps(delay: f64, sample_period: f64) -> Result<usize, GridError> {
    let err = GridError {
        delay,
        sample_period,
    };
    if !(delay.is_finite() && sample_period.is_finite()) || delay <= 0.0 || sample_period <= 0.0 {
        return Err(err);
    }
    let ratio = delay / sample_period;
    let steps = libm::round(ratio);
    if steps < 1.0 || libm::fabs(ratio - steps) > 1e-9 * steps.max(1.0) || steps > u32::MAX as f64 {
        return Err(err);
    }
    Ok(steps as usize)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn published_delays_are_aligned() {
        assert_eq!(grid_steps(0.1, 0.001), Ok(100));
        assert_eq!(grid_steps(0.13, 0.001), Ok(130));
        assert_eq!(grid_steps(0.37, 0.001), Ok(370));
        assert_eq!(grid_steps(0.7, 0.001), Ok(700));
    }

    #[test]
    fn misaligned_or_degenerate_delays_are_rejected() {
        assert!(grid_steps(0.1005, 0.001).is_err());
        assert!(grid_steps(0.0, 0.001).is_err());
        assert!(grid_steps(0.1, 0.0).is_err());
        assert!(grid_steps(f64::NAN, 0.001).is_err());
        assert!(grid_steps(0.0004, 0.001).is_err());
    }
}
