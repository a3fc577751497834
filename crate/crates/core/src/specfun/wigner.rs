use std::fmt;
use std::ops::{Add, Neg, Sub};
use std::sync::OnceLock;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// Integer or half-integer stored as twice its value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct HalfInt(i32);

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt(0);
    pub const HALF: HalfInt = HalfInt(1);
    pub const ONE: HalfInt = HalfInt(2);

    pub const fn from_twice(twice: i32) -> Self {
        HalfInt(twice)
    }

    pub const fn integer(n: i32) -> Self {
        HalfInt(2 * n)
    }

    /// Accepts values that are exact multiples of 1/2.
    pub fn from_f64(v: f64) -> Option<Self> {
        let t = 2.0 * v;
        (t.is_finite() && t == t.round() && t.abs() < i32::MAX as f64).then(|| HalfInt(t as i32))
    }

    pub const fn twice(self) -> i32 {
        self.0
    }

    pub fn value(self) -> f64 {
        self.0 as f64 / 2.0
    }

    pub const fn is_integer(self) -> bool {
        self.0 % 2 == 0
    }

    /// Projections m = -j, -j+1, ..., j.
    pub fn projections(self) -> impl Iterator<Item = HalfInt> {
        let j = self.0;
        (-j..=j).step_by(2).map(HalfInt)
    }

    /// 2j + 1.
    pub fn multiplicity(self) -> usize {
        (self.0 + 1).max(0) as usize
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 + o.0)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt(self.0 - o.0)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt(-self.0)
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.0 / 2)
        } else {
            write!(f, "{}/2", self.0)
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        if self.is_integer() {
            s.serialize_i32(self.0 / 2)
        } else {
            s.serialize_f64(self.value())
        }
    }
}

impl<'de> Deserialize<'de> for HalfInt {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = f64::deserialize(d)?;
        HalfInt::from_f64(v)
            .ok_or_else(|| serde::de::Error::custom(format!("{v} is not a multiple of 1/2")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WignerKind {
    ThreeJ,
    SixJ,
}

/// A Wigner symbol with its arguments and value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WignerSymbol {
    pub kind: WignerKind,
    pub arguments: [HalfInt; 6],
    pub value: f64,
}

impl WignerSymbol {
    pub fn three_j(a: [HalfInt; 6]) -> Self {
        WignerSymbol { kind: WignerKind::ThreeJ, arguments: a, value: wigner_3j(a[0], a[1], a[2], a[3], a[4], a[5]) }
    }

    pub fn six_j(a: [HalfInt; 6]) -> Self {
        WignerSymbol { kind: WignerKind::SixJ, arguments: a, value: wigner_6j(a[0], a[1], a[2], a[3], a[4], a[5]) }
    }
}

const CACHED_FACTORIALS: usize = 256;

fn factorial(n: i32) -> BigInt {
    static TABLE: OnceLock<Vec<BigInt>> = OnceLock::new();
    let table = TABLE.get_or_init(|| {
        let mut v = Vec::with_capacity(CACHED_FACTORIALS);
        v.push(BigInt::one());
        for k in 1..CACHED_FACTORIALS {
            let next = &v[k - 1] * BigInt::from(k);
            v.push(next);
        }
        v
    });
    let n = usize::try_from(n).expect("factorial of a negative number");
    if n < CACHED_FACTORIALS {
        table[n].clone()
    } else {
        (CACHED_FACTORIALS..=n).fold(table[CACHED_FACTORIALS - 1].clone(), |acc, k| acc * BigInt::from(k))
    }
}

/// Triangle condition on doubled values, including integer perimeter.
fn triangle(a: i32, b: i32, c: i32) -> bool {
    a >= 0 && b >= 0 && c >= 0 && c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

/// Δ(abc) from doubled values.
fn triangle_coefficient(a: i32, b: i32, c: i32) -> BigRational {
    BigRational::new(
        factorial((a + b - c) / 2) * factorial((a - b + c) / 2) * factorial((-a + b + c) / 2),
        factorial((a + b + c) / 2 + 1),
    )
}

/// Signed square root of r·s² as f64, with the sign of s.
fn signed_sqrt(radicand: BigRational, sum: BigRational) -> f64 {
    if sum.is_zero() {
        return 0.0;
    }
    let sign = if sum.is_negative() { -1.0 } else { 1.0 };
    let sq = radicand * &sum * &sum;
    sign * sq.to_f64().unwrap_or(f64::NAN).sqrt()
}

fn parity(n: i32) -> i32 {
    if n.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// Wigner 3j symbol (j1 j2 j3; m1 m2 m3) from the Racah sum in exact arithmetic.
/// Returns 0 for arguments violating a selection rule.
pub fn wigner_3j(j1: HalfInt, j2: HalfInt, j3: HalfInt, m1: HalfInt, m2: HalfInt, m3: HalfInt) -> f64 {
    let (j1, j2, j3, m1, m2, m3) = (j1.0, j2.0, j3.0, m1.0, m2.0, m3.0);
    if m1 + m2 + m3 != 0 || !triangle(j1, j2, j3) {
        return 0.0;
    }
    for (j, m) in [(j1, m1), (j2, m2), (j3, m3)] {
        if m.abs() > j || (j + m) % 2 != 0 {
            return 0.0;
        }
    }
    // Work with ordinary integers from here on.
    let h = |t: i32| t / 2;
    let k_min = 0.max(h(j2 - j3 - m1)).max(h(j1 - j3 + m2));
    let k_max = h(j1 + j2 - j3).min(h(j1 - m1)).min(h(j2 + m2));
    let mut sum = BigRational::zero();
    for k in k_min..=k_max {
        let den = factorial(k)
            * factorial(h(j3 - j2 + m1) + k)
            * factorial(h(j3 - j1 - m2) + k)
            * factorial(h(j1 + j2 - j3) - k)
            * factorial(h(j1 - m1) - k)
            * factorial(h(j2 + m2) - k);
        let term = BigRational::new(BigInt::from(parity(k)), den);
        sum += term;
    }
    let projections = factorial(h(j1 + m1))
        * factorial(h(j1 - m1))
        * factorial(h(j2 + m2))
        * factorial(h(j2 - m2))
        * factorial(h(j3 + m3))
        * factorial(h(j3 - m3));
    let radicand = triangle_coefficient(j1, j2, j3) * BigRational::from_integer(projections);
    parity(h(j1 - j2 - m3)) as f64 * signed_sqrt(radicand, sum)
}

/// Wigner 6j symbol {j1 j2 j3; j4 j5 j6} from the Racah sum in exact arithmetic.
/// Returns 0 when any of the four triads violates the triangle rule.
pub fn wigner_6j(j1: HalfInt, j2: HalfInt, j3: HalfInt, j4: HalfInt, j5: HalfInt, j6: HalfInt) -> f64 {
    let (j1, j2, j3, j4, j5, j6) = (j1.0, j2.0, j3.0, j4.0, j5.0, j6.0);
    let triads = [(j1, j2, j3), (j1, j5, j6), (j4, j2, j6), (j4, j5, j3)];
    if !triads.iter().all(|&(a, b, c)| triangle(a, b, c)) {
        return 0.0;
    }
    let a = triads.map(|(x, y, z)| (x + y + z) / 2);
    let b = [(j1 + j2 + j4 + j5) / 2, (j2 + j3 + j5 + j6) / 2, (j3 + j1 + j6 + j4) / 2];
    let t_min = *a.iter().max().unwrap();
    let t_max = *b.iter().min().unwrap();
    let mut sum = BigRational::zero();
    for t in t_min..=t_max {
        let den = a.iter().map(|&ai| factorial(t - ai)).product::<BigInt>()
            * b.iter().map(|&bi| factorial(bi - t)).product::<BigInt>();
        sum += BigRational::new(BigInt::from(parity(t)) * factorial(t + 1), den);
    }
    let radicand = triads
        .iter()
        .map(|&(x, y, z)| triangle_coefficient(x, y, z))
        .fold(BigRational::one(), |acc, d| acc * d);
    signed_sqrt(radicand, sum)
}
