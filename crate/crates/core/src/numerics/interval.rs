use super::rational::ExactRational;
use super::real::PrecisionReal;
use crate::error::{Error, Result};

/// An interval with independently open or closed ends.
#[derive(Debug, Clone, PartialEq)]
pub struct Interval<T> {
    lo: T,
    hi: T,
    pub lo_open: bool,
    pub hi_open: bool,
}

impl<T> Interval<T> {
    pub fn lo(&self) -> &T {
        &self.lo
    }

    pub fn hi(&self) -> &T {
        &self.hi
    }
}

impl Interval<ExactRational> {
    pub fn new(lo: ExactRational, hi: ExactRational, lo_open: bool, hi_open: bool) -> Result<Self> {
        if lo > hi {
            return Err(Error::OutOfRange(alloc::format!("[{lo}, {hi}]")));
        }
        Ok(Self { lo, hi, lo_open, hi_open })
    }

    pub fn open(lo: ExactRational, hi: ExactRational) -> Result<Self> {
        Self::new(lo, hi, true, true)
    }

    /// The closed unit interval `I = [0, 1]`.
    pub fn unit() -> Self {
        Self { lo: ExactRational::zero(), hi: ExactRational::one(), lo_open: false, hi_open: false }
    }

    pub fn width(&self) -> ExactRational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, x: &ExactRational) -> bool {
        let above = if self.lo_open { x > &self.lo } else { x >= &self.lo };
        let below = if self.hi_open { x < &self.hi } else { x <= &self.hi };
        above && below
    }
}

impl Interval<PrecisionReal> {
    /// Endpoints are ordered by their midpoints.
    pub fn new(lo: PrecisionReal, hi: PrecisionReal, lo_open: bool, hi_open: bool) -> Result<Self> {
        if lo.value() > hi.value() {
            return Err(Error::OutOfRange(alloc::format!("[{:?}, {:?}]", lo, hi)));
        }
        Ok(Self { lo, hi, lo_open, hi_open })
    }
}
