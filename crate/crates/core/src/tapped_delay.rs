//! Ring-buffer delay line with zero pre-history.
//!
//! `tap(k)` is the sample pushed `k` pushes ago, which on a uniform grid is
//! the signal delayed by `k * sample_period` seconds. Before `k + 1` samples
//! have been pushed the tap reads zero, mirroring a delay operator that
//! outputs zero until its lag has elapsed.

use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TapOutOfRange {
    pub steps: usize,
    pub capacity: usize,
}

impl fmt::Display for TapOutOfRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "tap {} exceeds delay line capacity {}",
            self.steps, self.capacity
        )
    }
}

impl core::error::Error for TapOutOfRange {}

#[derive(Debug, Clone, PartialEq)]
pub struct TappedDelayLine {
    // holds capacity + 1 samples: tap(0) ..= tap(capacity)
    history: Vec<f64>,
    // slot of tap(0)
    head: usize,
    count: u64,
}

impl TappedDelayLine {
    /// A line able to serve taps `0..=capacity`.
    pub fn new(capacity: usize) -> Self {
        Self {
            history: vec![0.0; capacity + 1],
            head: 0,
            count: 0,
        }
    }

    pub fn capacity(&self) -> usize {
        self.history.len() - 1
    }

    /// Number of samples pushed so far.
    pub fn count(&self) -> u64 {
        self.count
    }

    pub fn push(&mut self, sample: f64) {
        self.head = if self.head == 0 {
            self.history.len() - 1
        } else {
            self.head - 1
        };
        self.history[self.head] = sample;
        self.count += 1;
    }

    pub fn tap(&self, steps: usize) -> Result<f64, TapOutOfRange> {
        if steps > self.capacity() {
            return Err(TapOutOfRange {
                steps,
                capacity: self.capacity(),
            });
        }
        Ok(self.at(steps))
    }

    /// Unchecked-range variant for callers that sized the line themselves.
    #[inline]
    pub(crate) fn at(&self, steps: usize) -> f64 {
        debug_assert!(steps <= self.capacity());
        if steps as u64 >= self.count {
            return 0.0;
        }
        let len = self.history.len();
        let mut slot = self.head + steps;
        if slot >= len {
            slot -= len;
        }
        self.history[slot]
    }

    pub fn clear(&mut self) {
        self.history.iter_mut().for_each(|v| *v = 0.0);
        self.head = 0;
        self.count = 0;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn zero_pre_history() {
        let mut line = TappedDelayLine::new(4);
        line.push(1.0);
        assert_eq!(line.tap(0), Ok(1.0));
        assert_eq!(line.tap(1), Ok(0.0));
        assert_eq!(line.tap(4), Ok(0.0));
    }

    #[test]
    fn taps_follow_push_order() {
        let mut line = TappedDelayLine::new(2);
        for v in [1.0, 2.0, 3.0] {
            line.push(v);
        }
        assert_eq!(line.tap(0), Ok(3.0));
        assert_eq!(line.tap(2), Ok(1.0));
        line.push(4.0);
        assert_eq!(line.tap(2), Ok(2.0));
        assert_eq!(line.count(), 4);
    }

    #[test]
    fn over_capacity_is_a_usage_error() {
        let line = TappedDelayLine::new(3);
        assert_eq!(
            line.tap(4),
            Err(TapOutOfRange {
                steps: 4,
                capacity: 3
            })
        );
    }

    #[test]
    fn delayed_sine_on_grid() {
        let (ts, omega, phase) = (0.001, 2.5, 0.3);
        let lag = 100;
        let mut line = TappedDelayLine::new(lag);
        for k in 0..2000usize {
            line.push(libm::sin(omega * k as f64 * ts + phase));
            let t = k as f64 * ts;
            let expect = if k >= lag {
                libm::sin(omega * (k - lag) as f64 * ts + phase)
            } else {
                0.0
            };
            assert_eq!(line.tap(lag).unwrap(), expect, "t = {t}");
        }
    }

    #[test]
    fn clear_restores_empty_state() {
        let mut line = TappedDelayLine::new(2);
        line.push(5.0);
        line.clear();
        assert_eq!(line.tap(0), Ok(0.0));
        assert_eq!(line.count(), 0);
    }

    proptest! {
        #[test]
        fn delays_compose(xs in proptest::collection::vec(-10.0f64..10.0, 1..200), j in 0usize..20, k in 0usize..20) {
            let mut inner = TappedDelayLine::new(k);
            let mut outer = TappedDelayLine::new(j);
            let mut direct = TappedDelayLine::new(j + k);
            for &x in &xs {
                inner.push(x);
                outer.push(inner.tap(k).unwrap());
                direct.push(x);
                prop_assert_eq!(outer.tap(j).unwrap(), direct.tap(j + k).unwrap());
            }
        }

        #[test]
        fn taps_are_linear(
            pairs in proptest::collection::vec((-10.0f64..10.0, -10.0f64..10.0), 1..100),
            alpha in -3.0f64..3.0,
            beta in -3.0f64..3.0,
            k in 0usize..30,
        ) {
            let mut lx = TappedDelayLine::new(k);
            let mut ly = TappedDelayLine::new(k);
            let mut lz = TappedDelayLine::new(k);
            for &(x, y) in &pairs {
                lx.push(x);
                ly.push(y);
                lz.push(alpha * x + beta * y);
                let combo = alpha * lx.tap(k).unwrap() + beta * ly.tap(k).unwrap();
                prop_assert!((lz.tap(k).unwrap() - combo).abs() <= 1e-12);
            }
        }
    }
}
