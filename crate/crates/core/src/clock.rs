//! Time source for the search's wall-clock cap.

/// Seconds elapsed since the run started.
pub trait Clock {
    fn elapsed_secs(&self) -> f64;
}

/// A clock that never advances; runs stop on iteration limits only.
#[derive(Debug, Clone, Copy, Default)]
pub struct NoClock;

impl Clock for NoClock {
    fn elapsed_secs(&self) -> f64 {
        0.0
    }
}

impl<C: Clock + ?Sized> Clock for &C {
    fn elapsed_secs(&self) -> f64 {
        (**self).elapsed_secs()
    }
}
