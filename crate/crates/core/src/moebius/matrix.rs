use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// A determinant-one integer matrix, stored projectively.
///
/// `M` and `-M` denote the same Möbius map, so the constructor picks the
/// representative whose first row `(a, b)` is lexicographically positive.
/// Equality of maps is then equality of the stored entries.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix2 {
    a: BigInt,
    b: BigInt,
    c: BigInt,
    d: BigInt,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixClass {
    Identity,
    Elliptic,
    Parabolic,
    Hyperbolic,
}

impl fmt::Display for MatrixClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            MatrixClass::Identity => "identity",
            MatrixClass::Elliptic => "elliptic",
            MatrixClass::Parabolic => "parabolic",
            MatrixClass::Hyperbolic => "hyperbolic",
        };
        f.write_str(s)
    }
}

impl IntMatrix2 {
    pub fn new(
        a: impl Into<BigInt>,
        b: impl Into<BigInt>,
        c: impl Into<BigInt>,
        d: impl Into<BigInt>,
    ) -> Result<Self> {
        let (a, b, c, d) = (a.into(), b.into(), c.into(), d.into());
        if &a * &d - &b * &c != BigInt::one() {
            return Err(Error::Domain(format!(
                "determinant of [[{a},{b}],[{c},{d}]] is not 1"
            )));
        }
        Ok(Self::canonical(a, b, c, d))
    }

    /// Builds from entries already known to have determinant one.
    pub(crate) fn canonical(a: BigInt, b: BigInt, c: BigInt, d: BigInt) -> Self {
        let flip = a.is_negative() || (a.is_zero() && b.is_negative());
        if flip {
            IntMatrix2 { a: -a, b: -b, c: -c, d: -d }
        } else {
            IntMatrix2 { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        IntMatrix2 {
            a: BigInt::one(),
            b: BigInt::zero(),
            c: BigInt::zero(),
            d: BigInt::one(),
        }
    }

    pub fn a(&self) -> &BigInt {
        &self.a
    }
    pub fn b(&self) -> &BigInt {
        &self.b
    }
    pub fn c(&self) -> &BigInt {
        &self.c
    }
    pub fn d(&self) -> &BigInt {
        &self.d
    }

    pub fn entries(&self) -> [&BigInt; 4] {
        [&self.a, &self.b, &self.c, &self.d]
    }

    pub fn mul(&self, rhs: &IntMatrix2) -> IntMatrix2 {
        IntMatrix2::canonical(
            &self.a * &rhs.a + &self.b * &rhs.c,
            &self.a * &rhs.b + &self.b * &rhs.d,
            &self.c * &rhs.a + &self.d * &rhs.c,
            &self.c * &rhs.b + &self.d * &rhs.d,
        )
    }

    pub fn inverse(&self) -> IntMatrix2 {
        IntMatrix2::canonical(self.d.clone(), -&self.b, -&self.c, self.a.clone())
    }

    /// `self^e` for any integer exponent, by repeated squaring.
    pub fn pow(&self, e: i64) -> IntMatrix2 {
        let mut base = if e < 0 { self.inverse() } else { self.clone() };
        let mut n = e.unsigned_abs();
        let mut acc = IntMatrix2::identity();
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> BigInt {
        &self.a + &self.d
    }

    pub fn is_identity(&self) -> bool {
        *self == IntMatrix2::identity()
    }

    pub fn classify(&self) -> MatrixClass {
        if self.is_identity() {
            return MatrixClass::Identity;
        }
        let t = self.trace().abs();
        let two = BigInt::from(2);
        if t < two {
            MatrixClass::Elliptic
        } else if t == two {
            MatrixClass::Parabolic
        } else {
            MatrixClass::Hyperbolic
        }
    }
}

impl fmt::Debug for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[[{},{}],[{},{}]]", self.a, self.b, self.c, self.d)
    }
}

impl fmt::Display for IntMatrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

impl Serialize for IntMatrix2 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

/// Free function form used by the operation tables.
pub fn classify(m: &IntMatrix2) -> MatrixClass {
    m.classify()
}
