//! Riemann zeta on the complex plane by Euler–Maclaurin summation, with its
//! derivative, and critical-line zeros from sign changes of Hardy's Z.

use alloc::string::String;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

type C = Complex64;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum ZetaError {
    #[error("zeta has a pole at s = 1")]
    PoleAt1,
    #[error("found {found} sign changes below T = {height} but N(T) = {expected}")]
    MissedZero {
        expected: usize,
        found: usize,
        height: f64,
    },
    #[error("line {line}: {reason}")]
    Parse { line: usize, reason: String },
    #[error("line {line}: ordinate {value} does not exceed the previous one")]
    Monotonicity { line: usize, value: f64 },
}

/// `B_2, B_4, …, B_30` as exact fractions.
const BERNOULLI: [(i128, i128); 15] = [
    (1, 6),
    (-1, 30),
    (1, 42),
    (-1, 30),
    (5, 66),
    (-691, 2730),
    (7, 6),
    (-3617, 510),
    (43867, 798),
    (-174611, 330),
    (854513, 138),
    (-236364091, 2730),
    (8553103, 6),
    (-23749461029, 870),
    (8615841276005, 14322),
];

/// `B_{2k}/(2k)!` for k = 1..=15.
fn em_coefficients() -> [f64; 15] {
    let mut out = [0.0; 15];
    let mut fact = 1.0f64;
    for (k, &(num, den)) in BERNOULLI.iter().enumerate() {
        let n = 2 * (k + 1);
        fact *= ((n - 1) * n) as f64;
        out[k] = num as f64 / den as f64 / fact;
    }
    out
}

/// Number of direct terms used for `s`.
pub fn default_terms(s: C) -> usize {
    15 + libm::ceil(0.5 * s.im.abs()) as usize + libm::ceil(0.5 * (-s.re).max(0.0)) as usize
}

/// `(ζ(s), ζ′(s))` with `n` direct terms.
pub fn zeta_with_derivative_terms(s: C, n: usize) -> Result<(C, C), ZetaError> {
    if (s - 1.0).norm() < 1e-12 {
        return Err(ZetaError::PoleAt1);
    }
    let n = n.max(2);
    let mut z = C::new(0.0, 0.0);
    let mut dz = C::new(0.0, 0.0);
    for k in 1..n {
        let lk = libm::log(k as f64);
        let t = (-s * lk).exp();
        z += t;
        dz -= t * lk;
    }
    let big_n = n as f64;
    let ln_n = libm::log(big_n);
    let n_pow = (-s * ln_n).exp(); // N^{-s}
    let n1 = n_pow * big_n; // N^{1-s}
    let sm1 = s - 1.0;
    z += n1 / sm1 + n_pow * 0.5;
    dz += -n1 * ln_n / sm1 - n1 / (sm1 * sm1) - n_pow * ln_n * 0.5;
    // Tail: Σ B_{2k}/(2k)! · s(s+1)…(s+2k−2) · N^{−s−2k+1}.
    let coeffs = em_coefficients();
    let mut p = s; // rising product, starts as s
    let mut dp = C::new(1.0, 0.0);
    let mut pow = n_pow / big_n; // N^{-s-1}
    for (k, &c) in coeffs.iter().enumerate() {
        if k > 0 {
            for j in [2 * k - 1, 2 * k] {
                let f = s + j as f64;
                dp = dp * f + p;
                p *= f;
            }
            pow /= big_n * big_n;
        }
        z += p * pow * c;
        dz += (dp - p * ln_n) * pow * c;
    }
    Ok((z, dz))
}

pub fn zeta_with_derivative(s: C) -> Result<(C, C), ZetaError> {
    zeta_with_derivative_terms(s, default_terms(s))
}

pub fn zeta(s: C) -> Result<C, ZetaError> {
    zeta_with_derivative(s).map(|v| v.0)
}

pub fn zeta_prime(s: C) -> Result<C, ZetaError> {
    zeta_with_derivative(s).map(|v| v.1)
}

/// `ln Γ(z)` for `Re z > 0`, continuous in `z` (not reduced mod 2πi).
pub fn ln_gamma(z: C) -> C {
    let mut shift = C::new(0.0, 0.0);
    let mut w = z;
    while w.norm() < 20.0 {
        shift += w.ln();
        w += 1.0;
    }
    let coeffs = [
        (1.0, 12.0),
        (-1.0, 360.0),
        (1.0, 1260.0),
        (-1.0, 1680.0),
        (1.0, 1188.0),
        (-691.0, 360360.0),
        (1.0, 156.0),
    ];
    let inv = w.inv();
    let inv2 = inv * inv;
    let mut series = C::new(0.0, 0.0);
    let mut pw = inv;
    for (num, den) in coeffs {
        series += pw * (num / den);
        pw *= inv2;
    }
    (w - 0.5) * w.ln() - w + 0.5 * libm::log(2.0 * PI) + series - shift
}

/// Riemann–Siegel theta, `Im ln Γ(1/4 + it/2) − (t/2) ln π`.
pub fn riemann_siegel_theta(t: f64) -> f64 {
    ln_gamma(C::new(0.25, 0.5 * t)).im - 0.5 * t * libm::log(PI)
}

/// `e^{iθ(t)} ζ(1/2 + it)`, real up to rounding for real `t`.
pub fn hardy_z_complex(t: f64) -> C {
    let z = zeta(C::new(0.5, t)).expect("critical line avoids s = 1");
    C::new(0.0, riemann_siegel_theta(t)).exp() * z
}

pub fn hardy_z(t: f64) -> f64 {
    hardy_z_complex(t).re
}

/// `N(T) = θ(T)/π + 1 + S(T)`, with `S(T)` from the change of `arg ζ` along
/// the segment `3 + iT → 1/2 + iT`.
pub fn zero_count(height: f64) -> f64 {
    let steps = 200 + libm::ceil(4.0 * height) as usize;
    let mut arg = 0.0f64;
    let mut prev = zeta(C::new(3.0, height)).expect("Re s = 3").arg();
    arg += prev;
    for k in 1..=steps {
        let sigma = 3.0 - 2.5 * k as f64 / steps as f64;
        let cur = zeta(C::new(sigma, height)).expect("Im s ≠ 0").arg();
        let mut d = cur - prev;
        while d > PI {
            d -= 2.0 * PI;
        }
        while d < -PI {
            d += 2.0 * PI;
        }
        arg += d;
        prev = cur;
    }
    riemann_siegel_theta(height) / PI + 1.0 + arg / PI
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ZeroSource {
    Computed,
    Ingested,
}

/// Increasing ordinates `γ₁ < γ₂ < …` of zeros `1/2 + iγ`.
#[derive(Clone, Debug, PartialEq)]
pub struct ZeroList {
    pub ordinates: Vec<f64>,
    pub source: ZeroSource,
}

impl ZeroList {
    /// One decimal ordinate per line; `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self, ZetaError> {
        let mut ordinates: Vec<f64> = Vec::new();
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let v: f64 = line.parse().map_err(|_| ZetaError::Parse {
                line: i + 1,
                reason: alloc::format!("not a number: {line:?}"),
            })?;
            if !v.is_finite() || v <= 0.0 {
                return Err(ZetaError::Parse {
                    line: i + 1,
                    reason: alloc::format!("ordinate must be positive: {line:?}"),
                });
            }
            if ordinates.last().is_some_and(|&p| v <= p) {
                return Err(ZetaError::Monotonicity {
                    line: i + 1,
                    value: v,
                });
            }
            ordinates.push(v);
        }
        Ok(ZeroList {
            ordinates,
            source: ZeroSource::Ingested,
        })
    }

    pub fn len(&self) -> usize {
        self.ordinates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ordinates.is_empty()
    }

    /// `γ_m`, 1-based.
    pub fn get(&self, m: usize) -> Option<f64> {
        m.checked_sub(1)
            .and_then(|i| self.ordinates.get(i).copied())
    }

    /// Largest `|ζ(1/2 + iγ)|` over the list.
    pub fn max_residual(&self) -> f64 {
        self.ordinates
            .iter()
            .map(|&g| {
                zeta(C::new(0.5, g))
                    .map(|z| z.norm())
                    .unwrap_or(f64::INFINITY)
            })
            .fold(0.0, f64::max)
    }

    /// Smallest `|ζ′(1/2 + iγ)|`; simple zeros keep this away from 0.
    pub fn min_derivative(&self) -> f64 {
        self.ordinates
            .iter()
            .map(|&g| zeta_prime(C::new(0.5, g)).map(|z| z.norm()).unwrap_or(0.0))
            .fold(f64::INFINITY, f64::min)
    }
}

/// Scans Hardy's Z from `t = 10` with the given step and returns the first
/// `count` sign changes refined by bisection, plus one more for validation.
fn scan_zeros(count: usize, step: f64) -> Vec<f64> {
    let mut out = Vec::with_capacity(count + 1);
    let mut t0 = 10.0;
    let mut z0 = hardy_z(t0);
    while out.len() < count + 1 {
        let t1 = t0 + step;
        let z1 = hardy_z(t1);
        if z0 == 0.0 {
            out.push(t0);
        } else if z0 * z1 < 0.0 {
            out.push(bisect(t0, t1, z0));
        }
        t0 = t1;
        z0 = z1;
    }
    out
}

fn bisect(mut lo: f64, mut hi: f64, mut zlo: f64) -> f64 {
    while hi - lo > 1e-11 {
        let mid = 0.5 * (lo + hi);
        let zm = hardy_z(mid);
        if zm == 0.0 {
            return mid;
        }
        if zm * zlo < 0.0 {
            hi = mid;
        } else {
            lo = mid;
            zlo = zm;
        }
    }
    0.5 * (lo + hi)
}

/// The first `count` zeros on the critical line, checked against `N(T)`.
pub fn find_zeros(count: usize) -> Result<ZeroList, ZetaError> {
    if count == 0 {
        return Ok(ZeroList {
            ordinates: Vec::new(),
            source: ZeroSource::Computed,
        });
    }
    let mut step = 0.05;
    for attempt in 0..2 {
        let mut found = scan_zeros(count, step);
        let height = 0.5 * (found[count - 1] + found[count]);
        let expected = libm::round(zero_count(height)) as usize;
        if expected == count {
            found.truncate(count);
            return Ok(ZeroList {
                ordinates: found,
                source: ZeroSource::Computed,
            });
        }
        if attempt == 1 {
            return Err(ZetaError::MissedZero {
                expected,
                found: count,
                height,
            });
        }
        step /= 2.0;
    }
    unreachable!("loop returns on the second attempt")
}
