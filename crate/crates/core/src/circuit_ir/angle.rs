use std::f64::consts::PI;
use std::fmt;
use std::ops::{Add, Neg};

/// An exact angle `numerator / 2^k · π`.
///
/// Always kept reduced: the numerator is odd unless the denominator is 1.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct PhaseAngle {
    num: i64,
    log2_den: u32,
}

/// Largest denominator exponent the emitter's 15-digit radians can carry back.
const MAX_LOG2_DEN: u32 = 48;

impl PhaseAngle {
    pub const ZERO: PhaseAngle = PhaseAngle { num: 0, log2_den: 0 };
    pub const PI: PhaseAngle = PhaseAngle { num: 1, log2_den: 0 };

    pub fn new(numerator: i64, log2_den: u32) -> Self {
        let mut a = PhaseAngle {
            num: numerator,
            log2_den,
        };
        while a.log2_den > 0 && a.num % 2 == 0 {
            a.num /= 2;
            a.log2_den -= 1;
        }
        if a.num == 0 {
            a.log2_den = 0;
        }
        a
    }

    /// `π / 2^k`
    pub fn pi_over_pow2(k: u32) -> Self {
        Self::new(1, k)
    }

    /// `n · π`
    pub fn multiple_of_pi(n: i64) -> Self {
        Self::new(n, 0)
    }

    pub fn numerator(self) -> i64 {
        self.num
    }

    pub fn denominator(self) -> u64 {
        1u64 << self.log2_den
    }

    pub fn log2_denominator(self) -> u32 {
        self.log2_den
    }

    pub fn is_zero(self) -> bool {
        self.num == 0
    }

    pub fn half(self) -> Self {
        Self::new(self.num, self.log2_den + 1)
    }

    /// Reduces into `[0, 2π)`; only valid where the angle is a pure phase.
    pub fn wrap(self) -> Self {
        let period = 2i128 << self.log2_den;
        let num = (self.num as i128).rem_euclid(period);
        Self::new(num as i64, self.log2_den)
    }

    pub fn radians(self) -> f64 {
        self.num as f64 / self.denominator() as f64 * PI
    }

    /// Recovers a dyadic multiple of π from a decimal radian value, as printed
    /// by the emitter. Returns `None` if no denominator up to 2^48 fits.
    pub fn from_radians(radians: f64) -> Option<Self> {
        if !radians.is_finite() {
            return None;
        }
        let turns = radians / PI;
        if turns == 0.0 {
            return Some(Self::ZERO);
        }
        for k in 0..=MAX_LOG2_DEN {
            let scaled = turns * (1u64 << k) as f64;
            let nearest = scaled.round();
            if nearest != 0.0
                && (scaled - nearest).abs() <= 1e-9 * scaled.abs()
                && nearest.abs() < i64::MAX as f64
            {
                return Some(Self::new(nearest as i64, k));
            }
        }
        None
    }
}

impl Add for PhaseAngle {
    type Output = PhaseAngle;

    fn add(self, rhs: PhaseAngle) -> PhaseAngle {
        let k = self.log2_den.max(rhs.log2_den);
        let a = (self.num as i128) << (k - self.log2_den);
        let b = (rhs.num as i128) << (k - rhs.log2_den);
        let sum = i64::try_from(a + b).expect("phase angle numerator overflow");
        PhaseAngle::new(sum, k)
    }
}

impl Neg for PhaseAngle {
    type Output = PhaseAngle;

    fn neg(self) -> PhaseAngle {
        PhaseAngle {
            num: -self.num,
            log2_den: self.log2_den,
        }
    }
}

impl fmt::Display for PhaseAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{} pi", self.num, self.denominator())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn reduced_form() {
        let a = PhaseAngle::new(4, 3);
        assert_eq!((a.numerator(), a.denominator()), (1, 2));
        let z = PhaseAngle::new(0, 7);
        assert_eq!(z, PhaseAngle::ZERO);
        assert_eq!(PhaseAngle::new(6, 0).denominator(), 1);
    }

    #[test]
    fn arithmetic() {
        let q = PhaseAngle::pi_over_pow2(2);
        assert_eq!(q + q, PhaseAngle::pi_over_pow2(1));
        assert_eq!(q + (-q), PhaseAngle::ZERO);
        assert_eq!(PhaseAngle::PI.half(), PhaseAngle::pi_over_pow2(1));
        assert_eq!(PhaseAngle::new(7, 1).wrap(), PhaseAngle::new(3, 1));
        assert_eq!(PhaseAngle::new(-1, 2).wrap(), PhaseAngle::new(7, 2));
    }

    #[test]
    fn radians() {
        assert_eq!(PhaseAngle::pi_over_pow2(2).radians(), PI / 4.0);
        assert_eq!(format!("{}", PhaseAngle::new(-3, 2)), "-3/4 pi");
    }

    proptest! {
        #[test]
        fn radians_recover_through_fifteen_digits(num in -4096i64..4096, k in 0u32..24) {
            let a = PhaseAngle::new(num, k);
            let printed: f64 = format!("{:.14e}", a.radians()).parse().unwrap();
            prop_assert_eq!(PhaseAngle::from_radians(printed), Some(a));
        }
    }
}
