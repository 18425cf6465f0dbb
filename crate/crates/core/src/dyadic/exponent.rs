//! Exact exponent arithmetic.

use num_rational::Ratio;
use num_traits::{One, ToPrimitive};
use serde::{Deserialize, Serialize};

use crate::error::{ensure, Result};

/// Exact rational number used for all exponents.
pub type Rational = Ratio<i64>;

pub fn rational(n: i64, d: i64) -> Rational {
    Ratio::new(n, d)
}

pub fn to_f64(q: Rational) -> f64 {
    q.to_f64().expect("rational with i64 parts is always representable")
}

/// Hölder dual `s / (s - 1)`.
pub fn dual_exponent(s: Rational) -> Result<Rational> {
    ensure!(s > Rational::one(), Domain, "dual exponent requires s > 1, got {s}");
    Ok(s / (s - Rational::one()))
}

/// `2 - 2/s - 2/r`: the power of `2^{-(j+k)}` picked up by the bilinear
/// estimate after parabolic rescaling to tiles of `D_{j,k}`.
pub fn bilinear_scaling_exponent(s: Rational, r: Rational) -> Rational {
    let two = Rational::from_integer(2);
    two - two / s - two / r
}

/// The exponent pair `(s, r)` together with the dual `s'`.
///
/// The admissible region is `3/2 < s < 2` and `1 <= r <= s'`. The end point
/// `r = s'` is the scaling-critical line and is allowed so that it can be
/// scanned; [`ExponentPair::with_bounds_unchecked`] skips the range check on
/// `s` for boundary experiments.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "ExponentPairRepr", into = "ExponentPairRepr")]
pub struct ExponentPair {
    s: Rational,
    r: Rational,
}

#[derive(Serialize, Deserialize)]
struct ExponentPairRepr {
    s: [i64; 2],
    r: [i64; 2],
}

impl TryFrom<ExponentPairRepr> for ExponentPair {
    type Error = crate::error::Error;
    fn try_from(v: ExponentPairRepr) -> Result<Self> {
        ensure!(v.s[1] != 0 && v.r[1] != 0, Input, "zero denominator in exponent");
        ExponentPair::new(rational(v.s[0], v.s[1]), rational(v.r[0], v.r[1]))
    }
}

impl From<ExponentPair> for ExponentPairRepr {
    fn from(e: ExponentPair) -> Self {
        ExponentPairRepr {
            s: [*e.s.numer(), *e.s.denom()],
            r: [*e.r.numer(), *e.r.denom()],
        }
    }
}

impl ExponentPair {
    pub fn new(s: Rational, r: Rational) -> Result<Self> {
        ensure!(
            s > rational(3, 2) && s < Rational::from_integer(2),
            Domain,
            "exponent s must satisfy 3/2 < s < 2, got {s}"
        );
        Self::with_bounds_unchecked(s, r)
    }

    /// Only requires `s > 1` and `1 <= r <= s'`.
    pub fn with_bounds_unchecked(s: Rational, r: Rational) -> Result<Self> {
        let sd = dual_exponent(s)?;
        ensure!(r >= Rational::one(), Domain, "exponent r must be >= 1, got {r}");
        ensure!(r <= sd, Domain, "exponent r = {r} exceeds s' = {sd}");
        Ok(ExponentPair { s, r })
    }

    /// The pair `(s, s')` on the critical line.
    pub fn critical(s: Rational) -> Result<Self> {
        Self::new(s, dual_exponent(s)?)
    }

    pub fn s(&self) -> Rational {
        self.s
    }

    pub fn r(&self) -> Rational {
        self.r
    }

    pub fn s_dual(&self) -> Rational {
        self.s / (self.s - Rational::one())
    }

    pub fn is_critical(&self) -> bool {
        self.r == self.s_dual()
    }

    pub fn scaling_exponent(&self) -> Rational {
        bilinear_scaling_exponent(self.s, self.r)
    }

    /// `2s`, the Lebesgue exponent of the linear estimate.
    pub fn two_s(&self) -> f64 {
        2.0 * to_f64(self.s)
    }

    pub fn s_f64(&self) -> f64 {
        to_f64(self.s)
    }

    pub fn r_f64(&self) -> f64 {
        to_f64(self.r)
    }

    /// `1/s'` as a float.
    pub fn inv_s_dual(&self) -> f64 {
        to_f64(Rational::one() - Rational::one() / self.s)
    }
}

impl std::fmt::Display for ExponentPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "(s={}, r={}, s'={})", self.s, self.r, self.s_dual())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    #[test]
    fn dual_exponent_values() {
        assert_eq!(dual_exponent(rational(2, 1)).unwrap(), rational(2, 1));
        assert_eq!(dual_exponent(rational(5, 3)).unwrap(), rational(5, 2));
        assert_eq!(dual_exponent(rational(7, 4)).unwrap(), rational(7, 3));
    }

    #[test]
    fn dual_exponent_rejects_s_le_one() {
        assert!(dual_exponent(rational(1, 1)).is_err());
        assert!(dual_exponent(rational(1, 2)).is_err());
    }

    #[test]
    fn scaling_exponent_values() {
        let e = ExponentPair::new(rational(7, 4), rational(7, 3)).unwrap();
        assert_eq!(e.scaling_exponent(), Rational::zero());
        assert!(e.is_critical());
        assert_eq!(bilinear_scaling_exponent(rational(2, 1), rational(2, 1)), Rational::zero());
        // 2 - 6/5 - 1
        assert_eq!(bilinear_scaling_exponent(rational(5, 3), rational(2, 1)), rational(-1, 5));
    }

    #[test]
    fn pair_validation() {
        assert!(ExponentPair::new(rational(3, 2), rational(2, 1)).is_err());
        assert!(ExponentPair::new(rational(2, 1), rational(2, 1)).is_err());
        assert!(ExponentPair::new(rational(7, 4), rational(5, 2)).is_err());
        assert!(ExponentPair::new(rational(7, 4), rational(1, 2)).is_err());
        assert!(ExponentPair::with_bounds_unchecked(rational(2, 1), rational(2, 1)).is_ok());
    }

    #[test]
    fn pair_json() {
        let e = ExponentPair::new(rational(7, 4), rational(2, 1)).unwrap();
        let j = serde_json::to_string(&e).unwrap();
        assert_eq!(j, r#"{"s":[7,4],"r":[2,1]}"#);
        let back: ExponentPair = serde_json::from_str(&j).unwrap();
        assert_eq!(back, e);
        assert!(serde_json::from_str::<ExponentPair>(r#"{"s":[5,2],"r":[2,1]}"#).is_err());
    }

    proptest! {
        #[test]
        fn dual_is_involution(n in 2i64..400, d in 1i64..200) {
            prop_assume!(n > d);
            let s = rational(n, d);
            let sd = dual_exponent(s).unwrap();
            prop_assert_eq!(dual_exponent(sd).unwrap(), s);
        }

        #[test]
        fn critical_iff_zero_exponent(sn in 151i64..199, rn in 100i64..400) {
            let s = rational(sn, 100);
            let r = rational(rn, 100);
            let sd = dual_exponent(s).unwrap();
            let alpha = bilinear_scaling_exponent(s, r);
            prop_assert_eq!(alpha.is_zero(), r == sd);
            prop_assert_eq!(alpha < Rational::zero(), r < sd);
            prop_assert!(bilinear_scaling_exponent(s, sd).is_zero());
        }
    }
}
