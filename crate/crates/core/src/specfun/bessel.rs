use crate::error::{Error, Result};

/// Largest supported Bessel order.
pub const MAX_ORDER: u32 = 1000;

/// Values of J_m, Y_m and their derivatives at one argument.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BesselPair {
    pub order: u32,
    pub x: f64,
    pub j: f64,
    pub y: f64,
    pub j_prime: f64,
    pub y_prime: f64,
}

/// Evaluates J_m(x), Y_m(x) and their first derivatives.
///
/// J comes from Miller's downward recurrence normalized by J_0 + 2 Σ J_2k = 1,
/// Y from upward recurrence seeded with rational approximations of Y_0 and Y_1.
/// Derivatives use C'_m = C_{m-1} - (m/x) C_m.
pub fn bessel_jy(m: u32, x: f64) -> Result<BesselPair> {
    if m > MAX_ORDER {
        return Err(Error::OrderTooLarge(m));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonFinite { order: m, x });
    }
    let (j_prev, j) = j_with_previous(m, x);
    let (y_prev, y) = y_with_previous(m, x);
    let mx = m as f64 / x;
    let pair = BesselPair {
        order: m,
        x,
        j,
        y,
        j_prime: j_prev - mx * j,
        y_prime: y_prev - mx * y,
    };
    let finite = [pair.j, pair.y, pair.j_prime, pair.y_prime]
        .iter()
        .all(|v| v.is_finite());
    if finite {
        Ok(pair)
    } else {
        Err(Error::NonFinite { order: m, x })
    }
}

/// J_m(x) alone, defined for x >= 0 (J_0(0) = 1, J_m(0) = 0 otherwise).
pub fn bessel_j(m: u32, x: f64) -> Result<f64> {
    if m > MAX_ORDER {
        return Err(Error::OrderTooLarge(m));
    }
    if !(x >= 0.0) || !x.is_finite() {
        return Err(Error::NonFinite { order: m, x });
    }
    if x == 0.0 {
        return Ok(if m == 0 { 1.0 } else { 0.0 });
    }
    Ok(j_with_previous(m, x).1)
}

/// J_m(x) and J'_m(x) without evaluating Y, for x > 0.
pub fn bessel_j_with_derivative(m: u32, x: f64) -> Result<(f64, f64)> {
    if m > MAX_ORDER {
        return Err(Error::OrderTooLarge(m));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonFinite { order: m, x });
    }
    let (j_prev, j) = j_with_previous(m, x);
    Ok((j, j_prev - m as f64 / x * j))
}

/// Y_m(x) = sign * exp(ln_abs) together with the logarithmic derivative Y'_m / Y_m.
///
/// Usable far beyond the f64 range of Y_m itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct YLog {
    pub sign: f64,
    pub ln_abs: f64,
    pub log_derivative: f64,
}

impl YLog {
    /// Y_m(x_self) / Y_m(x_other).
    pub fn ratio_to(&self, other: &YLog) -> f64 {
        self.sign * other.sign * (self.ln_abs - other.ln_abs).exp()
    }
}

/// Overflow-free form of Y_m(x) from the same upward recurrence as [`bessel_jy`].
pub fn bessel_y_log(m: u32, x: f64) -> Result<YLog> {
    if m > MAX_ORDER {
        return Err(Error::OrderTooLarge(m));
    }
    if !(x > 0.0) || !x.is_finite() {
        return Err(Error::NonFinite { order: m, x });
    }
    let (mut prev, mut cur) = (-libm::y1(x), libm::y0(x)); // (Y_{-1}, Y_0)
    let mut ln_scale = 0.0;
    for n in 0..m {
        let next = (2.0 * n as f64 / x) * cur - prev;
        prev = cur;
        cur = next;
        let a = cur.abs();
        if a > 1e100 {
            prev /= a;
            cur /= a;
            ln_scale += a.ln();
        }
    }
    if cur == 0.0 || !cur.is_finite() {
        return Err(Error::NonFinite { order: m, x });
    }
    Ok(YLog {
        sign: cur.signum(),
        ln_abs: ln_scale + cur.abs().ln(),
        log_derivative: prev / cur - m as f64 / x,
    })
}

const SMALL_X: f64 = 1e-8;
const RESCALE_AT: f64 = 1e200;

/// Returns (J_{m-1}, J_m), with J_{-1} = -J_1.
fn j_with_previous(m: u32, x: f64) -> (f64, f64) {
    if x < SMALL_X {
        return if m == 0 {
            (-j_series(1, x), j_series(0, x))
        } else {
            (j_series(m - 1, x), j_series(m, x))
        };
    }
    let top = (m as f64).max(x);
    let mut n_start = (top + 20.0 + (40.0 * top).sqrt()) as u64;
    n_start += n_start % 2;

    let want_prev = m.checked_sub(1).map(u64::from);
    let want = u64::from(m);
    let need_j1 = m == 0;

    let mut j_next = 0.0_f64; // J_{n+1}
    let mut j_cur = 1e-30_f64; // J_n
    let mut sum = 0.0_f64; // 2 * sum of even orders above zero
    let mut stored = 0.0_f64;
    let mut stored_prev = 0.0_f64;
    let mut stored_j1 = 0.0_f64;

    let mut n = n_start;
    while n > 0 {
        let j_prev = (2.0 * n as f64 / x) * j_cur - j_next;
        j_next = j_cur;
        j_cur = j_prev;
        n -= 1;
        if n == want {
            stored = j_cur;
        }
        if Some(n) == want_prev {
            stored_prev = j_cur;
        }
        if need_j1 && n == 1 {
            stored_j1 = j_cur;
        }
        if n % 2 == 0 && n > 0 {
            sum += 2.0 * j_cur;
        }
        if j_cur.abs() > RESCALE_AT {
            let s = 1.0 / RESCALE_AT;
            j_cur *= s;
            j_next *= s;
            sum *= s;
            stored *= s;
            stored_prev *= s;
            stored_j1 *= s;
        }
    }
    let norm = j_cur + sum;
    if m == 0 {
        (-stored_j1 / norm, stored / norm)
    } else {
        (stored_prev / norm, stored / norm)
    }
}

/// Two-term power series, exact to double precision for x < 1e-8.
fn j_series(m: u32, x: f64) -> f64 {
    let half = 0.5 * x;
    let ln_lead = m as f64 * half.ln() - ln_factorial(m);
    ln_lead.exp() * (1.0 - half * half / (m as f64 + 1.0))
}

fn ln_factorial(m: u32) -> f64 {
    (2..=m).map(|k| (k as f64).ln()).sum()
}

/// Returns (Y_{m-1}, Y_m), with Y_{-1} = -Y_1.
fn y_with_previous(m: u32, x: f64) -> (f64, f64) {
    let y0 = libm::y0(x);
    let y1 = libm::y1(x);
    if m == 0 {
        return (-y1, y0);
    }
    let (mut prev, mut cur) = (y0, y1);
    for n in 1..m {
        let next = (2.0 * n as f64 / x) * cur - prev;
        prev = cur;
        cur = next;
        if !cur.is_finite() {
            break;
        }
    }
    (prev, cur)
}
