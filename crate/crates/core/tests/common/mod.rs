//! Test-only oracles that avoid the library's computation paths.
#![allow(dead_code)]

use std::collections::HashMap;

/// Clebsch-Gordan tables built from angular-momentum algebra: each |J J⟩ is the unit vector of
/// the M = J subspace orthogonal to all higher J (Condon-Shortley sign), and the remaining |J M⟩
/// follow by applying J₋ = J₁₋ + J₂₋. All angular momenta are passed doubled.
pub struct CgOracle {
    tables: HashMap<(i32, i32), HashMap<(i32, i32), Vec<f64>>>,
}

fn lower_factor(tj: i32, tm: i32) -> f64 {
    // √((j + m)(j − m + 1)) with doubled arguments.
    (((tj + tm) as f64 / 2.0) * ((tj - tm) as f64 / 2.0 + 1.0)).sqrt()
}

impl CgOracle {
    pub fn new() -> Self {
        CgOracle { tables: HashMap::new() }
    }

    fn index(tj2: i32, tm1: i32, tm2: i32, tj1: i32) -> usize {
        let i1 = ((tj1 - tm1) / 2) as usize;
        let i2 = ((tj2 - tm2) / 2) as usize;
        i1 * (tj2 as usize + 1) + i2
    }

    fn build(tj1: i32, tj2: i32) -> HashMap<(i32, i32), Vec<f64>> {
        let n = ((tj1 + 1) * (tj2 + 1)) as usize;
        let mut states: HashMap<(i32, i32), Vec<f64>> = HashMap::new();
        let mut tj = tj1 + tj2;
        while tj >= (tj1 - tj2).abs() {
            let mut v = vec![0.0; n];
            v[Self::index(tj2, tj1, tj - tj1, tj1)] = 1.0;
            for _ in 0..2 {
                let mut tjp = tj + 2;
                while tjp <= tj1 + tj2 {
                    let u = &states[&(tjp, tj)];
                    let dot: f64 = u.iter().zip(&v).map(|(a, b)| a * b).sum();
                    for (x, y) in v.iter_mut().zip(u) {
                        *x -= dot * y;
                    }
                    tjp += 2;
                }
            }
            let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
            let sign = if v[Self::index(tj2, tj1, tj - tj1, tj1)] < 0.0 { -1.0 } else { 1.0 };
            v.iter_mut().for_each(|x| *x *= sign / norm);
            let mut tm = tj;
            states.insert((tj, tm), v.clone());
            while tm > -tj {
                let mut w = vec![0.0; n];
                let mut tm1 = -tj1;
                while tm1 <= tj1 {
                    let mut tm2 = -tj2;
                    while tm2 <= tj2 {
                        let c = v[Self::index(tj2, tm1, tm2, tj1)];
                        if c != 0.0 {
                            if tm1 > -tj1 {
                                w[Self::index(tj2, tm1 - 2, tm2, tj1)] += c * lower_factor(tj1, tm1);
                            }
                            if tm2 > -tj2 {
                                w[Self::index(tj2, tm1, tm2 - 2, tj1)] += c * lower_factor(tj2, tm2);
                            }
                        }
                        tm2 += 2;
                    }
                    tm1 += 2;
                }
                let f = lower_factor(tj, tm);
                w.iter_mut().for_each(|x| *x /= f);
                tm -= 2;
                states.insert((tj, tm), w.clone());
                v = w;
            }
            tj -= 2;
        }
        states
    }

    /// ⟨j1 m1 j2 m2 | J M⟩, doubled arguments.
    pub fn cg(&mut self, tj1: i32, tm1: i32, tj2: i32, tm2: i32, tj: i32, tm: i32) -> f64 {
        if tm1 + tm2 != tm || tm1.abs() > tj1 || tm2.abs() > tj2 || tm.abs() > tj {
            return 0.0;
        }
        if tj > tj1 + tj2 || tj < (tj1 - tj2).abs() || (tj1 + tj2 + tj) % 2 != 0 {
            return 0.0;
        }
        let table = self.tables.entry((tj1, tj2)).or_insert_with(|| Self::build(tj1, tj2));
        table[&(tj, tm)][Self::index(tj2, tm1, tm2, tj1)]
    }

    /// 3j symbol from the Clebsch-Gordan table, doubled arguments.
    pub fn three_j(&mut self, a: [i32; 6]) -> f64 {
        let [tj1, tj2, tj3, tm1, tm2, tm3] = a;
        if tm1 + tm2 + tm3 != 0 {
            return 0.0;
        }
        let phase_twice = tj1 - tj2 - tm3;
        let sign = if (phase_twice / 2) % 2 == 0 { 1.0 } else { -1.0 };
        sign / ((tj3 + 1) as f64).sqrt() * self.cg(tj1, tm1, tj2, tm2, tj3, -tm3)
    }

    /// 6j symbol as the contraction of four 3j symbols over all projections.
    pub fn six_j(&mut self, a: [i32; 6]) -> f64 {
        let [j1, j2, j3, j4, j5, j6] = a;
        let mut sum = 0.0;
        for m1 in (-j1..=j1).step_by(2) {
            for m2 in (-j2..=j2).step_by(2) {
                let m3 = -m1 - m2;
                if m3.abs() > j3 {
                    continue;
                }
                for m5 in (-j5..=j5).step_by(2) {
                    let m6 = m5 - m1;
                    let m4 = m5 + m3;
                    if m6.abs() > j6 || m4.abs() > j4 {
                        continue;
                    }
                    let s = j1 + j2 + j3 + j4 + j5 + j6 - (m1 + m2 + m3 + m4 + m5 + m6);
                    let sign = if (s / 2) % 2 == 0 { 1.0 } else { -1.0 };
                    let p = self.three_j([j1, j2, j3, -m1, -m2, -m3])
                        * self.three_j([j1, j5, j6, m1, -m5, m6])
                        * self.three_j([j4, j2, j6, m4, m2, -m6])
                        * self.three_j([j4, j5, j3, -m4, m5, m3]);
                    sum += sign * p;
                }
            }
        }
        sum
    }
}

pub fn triangle(a: i32, b: i32, c: i32) -> bool {
    c >= (a - b).abs() && c <= a + b && (a + b + c) % 2 == 0
}

/// Relative error with an absolute floor for values near zero.
pub fn rel_err(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs().max(1e-300)
}
