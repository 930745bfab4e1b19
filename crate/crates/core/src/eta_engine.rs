//! Numerical evaluation of η, the eta quotients τ, λ, τ₅ and the functions
//! built from them: σ, j, the level-15 coordinate Z with its 96 avatars, and
//! Ψ, Φ.
//!
//! Every η evaluation first moves the argument into the standard fundamental
//! domain, so accuracy does not degrade near the real axis.

use alloc::collections::BTreeMap;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::{OnceCell, RefCell};
use core::f64::consts::PI;

use num_complex::Complex64;
use num_rational::Ratio;
use num_traits::Zero;
use thiserror::Error;

use crate::exactquad::{self, QuadNum};
use crate::sl2z::{CosetTable, GroupElem, INDEX};

type C = Complex64;

const I: C = C::new(0.0, 1.0);

#[derive(Clone, Debug, PartialEq, Error)]
pub enum EtaError {
    #[error("point {re} + {im}i is not in the upper half plane")]
    NotInUpperHalfPlane { re: f64, im: f64 },
    #[error("{what} is too close to a pole (|denominator| = {size:e})")]
    NearPole { what: &'static str, size: f64 },
    #[error("both roots of the Z quadratic fit equally well and no hint was given")]
    BranchAmbiguous,
    #[error("continuation stalled at parameter {at} (step {step:e})")]
    ContinuationStalled { at: f64, step: f64 },
    #[error("avatar index {0} is outside 1..=96")]
    BadIndex(usize),
}

/// A point of the open upper half plane.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct HPoint(C);

impl HPoint {
    pub fn new(z: C) -> Result<Self, EtaError> {
        if z.re.is_finite() && z.im.is_finite() && z.im > 0.0 {
            Ok(HPoint(z))
        } else {
            Err(EtaError::NotInUpperHalfPlane { re: z.re, im: z.im })
        }
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self, EtaError> {
        HPoint::new(C::new(re, im))
    }

    pub fn i() -> Self {
        HPoint(I)
    }

    /// `e^{2πi/3}`.
    pub fn omega() -> Self {
        HPoint(C::new(-0.5, libm::sqrt(3.0) / 2.0))
    }

    /// `e^{iθ}` for `0 < θ < π`.
    pub fn on_unit_circle(theta: f64) -> Self {
        HPoint(C::new(libm::cos(theta), libm::sin(theta)))
    }

    pub fn z(&self) -> C {
        self.0
    }

    pub fn re(&self) -> f64 {
        self.0.re
    }

    pub fn im(&self) -> f64 {
        self.0.im
    }

    /// `g·z`; stays in the upper half plane for `g ∈ SL(2,Z)`.
    pub fn apply(&self, g: &GroupElem) -> HPoint {
        HPoint(g.mobius(self.0))
    }
}

/// Returns `(z′, M)` with `z′ = M·z`, `|Re z′| ≤ 1/2` and `|z′| ≥ 1`.
pub fn reduce_to_fundamental(z: HPoint) -> (HPoint, GroupElem) {
    let (mut a, mut b, mut c, mut d) = (1i64, 0i64, 0i64, 1i64);
    let mut w = z.0;
    loop {
        let n = libm::floor(w.re + 0.5);
        w.re -= n;
        let n = n as i64;
        a -= n * c;
        b -= n * d;
        if w.norm_sqr() < 1.0 - 1e-15 {
            w = -w.inv();
            (a, b, c, d) = (-c, -d, a, b);
        } else {
            break;
        }
    }
    let m = GroupElem::new(a, b, c, d).expect("reduction keeps determinant 1");
    (HPoint(w), m)
}

/// Dedekind sum `s(h, k)` for `k > 0`, computed exactly by reciprocity.
pub fn dedekind_sum(h: i64, k: i64) -> Ratio<i128> {
    assert!(k > 0, "dedekind_sum needs k > 0");
    let mut h = h.rem_euclid(k) as i128;
    let mut k = k as i128;
    // s(h,k) + s(k,h) = −1/4 + (h/k + k/h + 1/(hk))/12
    let mut acc = Ratio::zero();
    let mut sign = Ratio::from_integer(1);
    while h != 0 {
        let term = Ratio::new(-1, 4)
            + (Ratio::new(h, k) + Ratio::new(k, h) + Ratio::new(1, h * k))
                / Ratio::from_integer(12);
        acc += sign * term;
        sign = -sign;
        let next = k.rem_euclid(h);
        k = h;
        h = next;
    }
    acc
}

fn normalized(m: &GroupElem) -> GroupElem {
    if m.c() < 0 || (m.c() == 0 && m.d() < 0) {
        m.neg()
    } else {
        *m
    }
}

/// Exact phase `φ` (mod 2) with `η(Mz) = e^{πiφ}·(cz+d)^{1/2}·η(z)`, for `M`
/// taken with `c > 0`, or `c = 0` and `d = 1`.
pub fn multiplier_phase(m: &GroupElem) -> Ratio<i128> {
    let m = normalized(m);
    let phase = if m.c() == 0 {
        Ratio::new(m.b() as i128, 12)
    } else {
        Ratio::new((m.a() + m.d()) as i128, 12 * m.c() as i128)
            - dedekind_sum(m.d(), m.c())
            - Ratio::new(1, 4)
    };
    let two = Ratio::from_integer(2);
    phase - (phase / two).floor() * two
}

/// The 24th root of unity `ε(M)` of the eta multiplier system.
pub fn eta_multiplier(m: &GroupElem) -> C {
    let p = multiplier_phase(m);
    let x = *p.numer() as f64 / *p.denom() as f64;
    C::new(0.0, PI * x).exp()
}

/// `e^{πiz/12} Σ_k (−1)^k q^{k(3k−1)/2}` over k ∈ Z; accurate when `|q|` is small.
pub fn eta_series(z: C, eps: f64) -> C {
    let q = (I * (2.0 * PI) * z).exp();
    let aq = q.norm();
    let mut sum = C::new(1.0, 0.0);
    let mut k: i32 = 1;
    loop {
        let e1 = k * (3 * k - 1) / 2;
        if libm::pow(aq, e1 as f64) < eps {
            break;
        }
        let e2 = k * (3 * k + 1) / 2;
        let term = q.powi(e1) + q.powi(e2);
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    (I * (PI / 12.0) * z).exp() * sum
}

/// Evaluation context: series cutoff, multiplier cache, the coset table and
/// the lazily built base values `Z_n(i)`.
#[derive(Debug)]
pub struct EtaContext {
    pub series_eps: f64,
    /// Relative size below which a denominator counts as a pole.
    pub pole_tol: f64,
    cache: RefCell<BTreeMap<[i64; 4], C>>,
    consts: FloatConsts,
    table: CosetTable,
    atlas: OnceCell<Vec<C>>,
}

impl Default for EtaContext {
    fn default() -> Self {
        EtaContext::new()
    }
}

/// `τ`, `λ` and `τ₅` at one point, sharing the four η values.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EtaQuotients {
    pub tau: C,
    pub lambda: C,
    pub tau5: C,
}

/// Stored position and value while following an avatar along a path.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct AvatarState {
    pub z: HPoint,
    pub value: C,
}

/// Residuals of the defining relations at a point, each scaled by the size
/// of the terms involved (and never by less than 1).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Residuals {
    pub quadratic: f64,
    pub b_relation: f64,
    pub b_relation_other_root: f64,
    pub quartic: f64,
    pub lambda_relation: f64,
    pub tau5_relation: f64,
    pub psi_square: f64,
    pub psi_square_claimed_denominator: f64,
    pub cubic: f64,
}

/// Ψ and Φ at a point.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PsiPhi {
    pub psi: C,
    pub phi: C,
    pub psi_square_residual: f64,
    pub cubic_residual: f64,
}

#[derive(Debug)]
struct FloatConsts {
    beta: f64,
    gamma: f64,
    delta: f64,
    lambda_weight: f64,
    rh_scale: f64,
    psi_scale: f64,
    c_poly: Vec<f64>,
    d_poly: Vec<f64>,
    b0: Vec<f64>,
    b1: Vec<f64>,
}

impl FloatConsts {
    fn new() -> Self {
        use exactquad::constants as k;
        FloatConsts {
            beta: k::beta().to_f64(),
            gamma: k::gamma().to_f64(),
            delta: k::delta().to_f64(),
            lambda_weight: k::lambda_weight().to_f64(),
            rh_scale: libm::sqrt(k::rh_scale_squared().to_f64()),
            psi_scale: (&QuadNum::from_fracs(0, 1, 3, 1) * &QuadNum::golden()).to_f64(),
            c_poly: k::c_poly().to_f64_coeffs(),
            d_poly: k::d_poly().to_f64_coeffs(),
            b0: k::b0().to_f64_coeffs(),
            b1: k::b1().to_f64_coeffs(),
        }
    }
}

fn horner(coeffs: &[f64], x: C) -> C {
    coeffs.iter().rev().fold(C::zero(), |acc, &c| acc * x + c)
}

fn horner_abs(coeffs: &[f64], x: f64) -> f64 {
    coeffs
        .iter()
        .rev()
        .fold(0.0, |acc, &c| acc * x + libm::fabs(c))
}

/// Chordal distance on the Riemann sphere; `∞` is allowed.
pub fn chordal(a: C, b: C) -> f64 {
    match (a.is_finite(), b.is_finite()) {
        (true, true) => {
            (a - b).norm() / (libm::sqrt(1.0 + a.norm_sqr()) * libm::sqrt(1.0 + b.norm_sqr()))
        }
        (true, false) => 1.0 / libm::sqrt(1.0 + a.norm_sqr()),
        (false, true) => 1.0 / libm::sqrt(1.0 + b.norm_sqr()),
        (false, false) => 0.0,
    }
}

fn infinity() -> C {
    C::new(f64::INFINITY, 0.0)
}

/// Shortest continuation step, as a fraction of the segment.
const MIN_STEP: f64 = 1e-12;
/// Chordal distance below which the two roots are treated as one.
const COINCIDE: f64 = 1e-7;

impl EtaContext {
    pub fn new() -> Self {
        EtaContext {
            series_eps: 1e-17,
            pole_tol: 1e-12,
            cache: RefCell::new(BTreeMap::new()),
            consts: FloatConsts::new(),
            table: CosetTable::embedded(),
            atlas: OnceCell::new(),
        }
    }

    pub fn table(&self) -> &CosetTable {
        &self.table
    }

    fn cached_multiplier(&self, m: &GroupElem) -> C {
        let key = m.entries();
        if let Some(v) = self.cache.borrow().get(&key) {
            return *v;
        }
        let v = eta_multiplier(m);
        let mut cache = self.cache.borrow_mut();
        if cache.len() > 4096 {
            cache.clear();
        }
        cache.insert(key, v);
        v
    }

    /// Dedekind η, via reduction to the fundamental domain.
    pub fn dedekind_eta(&self, z: HPoint) -> C {
        let (w, m) = reduce_to_fundamental(z);
        let n = normalized(&m.inverse());
        let base = eta_series(w.0, self.series_eps);
        if n.c() == 0 {
            return self.cached_multiplier(&n) * base;
        }
        self.cached_multiplier(&n) * n.automorphy(w.0).sqrt() * base
    }

    /// `η(z/m)`.
    pub fn eta_m(&self, z: HPoint, m: u32) -> C {
        self.dedekind_eta(HPoint(z.0 / m as f64))
    }

    pub fn quotients(&self, z: HPoint) -> EtaQuotients {
        let e1 = self.eta_m(z, 1);
        let e3 = self.eta_m(z, 3);
        let e5 = self.eta_m(z, 5);
        let e15 = self.eta_m(z, 15);
        EtaQuotients {
            tau: ((e3 * e5) / (e1 * e15)).powi(3),
            lambda: e3.powi(6) / (e1 * e5).powi(3),
            tau5: (e5 / e1).powi(6),
        }
    }

    /// `τ = (η₃η₅/η₁η₁₅)³`.
    pub fn tau(&self, z: HPoint) -> C {
        self.quotients(z).tau
    }

    /// `λ = η₁⁻³η₃⁶η₅⁻³`.
    pub fn lambda_fn(&self, z: HPoint) -> C {
        self.quotients(z).lambda
    }

    /// `τ₅ = (η₅/η₁)⁶`.
    pub fn tau5(&self, z: HPoint) -> C {
        let r = self.eta_m(z, 5) / self.eta_m(z, 1);
        r.powi(6)
    }

    /// `σ = (250τ⁴λ² − d(τ))/c(τ)`.
    pub fn sigma_from(&self, tau: C, lambda: C) -> Result<C, EtaError> {
        let k = &self.consts;
        let den = horner(&k.c_poly, tau);
        let scale = horner_abs(&k.c_poly, tau.norm()).max(1.0);
        if den.norm() < self.pole_tol * scale {
            return Err(EtaError::NearPole {
                what: "sigma",
                size: den.norm(),
            });
        }
        Ok((tau.powi(4) * lambda * lambda * 250.0 - horner(&k.d_poly, tau)) / den)
    }

    pub fn sigma(&self, z: HPoint) -> Result<C, EtaError> {
        let q = self.quotients(z);
        self.sigma_from(q.tau, q.lambda)
    }

    /// `j = (τ₅² + 10τ₅ + 5)³/τ₅`.
    pub fn j_fricke(&self, z: HPoint) -> Result<C, EtaError> {
        let t5 = self.tau5(z);
        j_from_tau5(t5, self.pole_tol)
    }

    /// Coefficients `(a, b, a)` of `aZ² + bZ + a = 0` at `z`.
    fn quadratic(&self, z: HPoint) -> (C, C) {
        let k = &self.consts;
        let q = self.quotients(z);
        let (t, l) = (q.tau, q.lambda);
        let big_l = t * t * l + t.powi(3) * k.lambda_weight / l;
        let rh = (t - k.beta) * (t * t + t * k.gamma + k.delta) * k.rh_scale;
        (big_l - rh, -(big_l * 3.0 - rh))
    }

    /// The two roots `r`, `1/r` of the Z quadratic at `z`.
    pub fn z_roots(&self, z: HPoint) -> [C; 2] {
        let (a, b) = self.quadratic(z);
        let disc = (b * b - a * a * 4.0).sqrt();
        let q = if (b.conj() * disc).re >= 0.0 {
            -(b + disc) * 0.5
        } else {
            -(b - disc) * 0.5
        };
        if q.is_zero() {
            // b = 0 and a = 0 cannot both hold for a nondegenerate point.
            return [C::new(1.0, 0.0), C::new(1.0, 0.0)];
        }
        let r1 = if a.is_zero() { infinity() } else { q / a };
        [r1, a / q]
    }

    /// Roots of the quadratic for avatar `n` at `z`, i.e. at `P_n·z`.
    pub fn avatar_roots(&self, n: usize, z: HPoint) -> Result<[C; 2], EtaError> {
        let p = self.rep(n)?;
        Ok(self.z_roots(z.apply(&p)))
    }

    fn rep(&self, n: usize) -> Result<GroupElem, EtaError> {
        if n == 0 || n > INDEX {
            return Err(EtaError::BadIndex(n));
        }
        Ok(self.table.rep(n))
    }

    /// `|B₁(Z)·τ + B₀(Z)|`, scaled by the size of its terms.
    pub fn b_relation_residual(&self, tau: C, z: C) -> f64 {
        let k = &self.consts;
        if !z.is_finite() {
            // Leading coefficients: b14·τ + b04.
            let lead = tau * k.b1[4] + k.b0[4];
            return lead.norm() / (libm::fabs(k.b1[4]) * tau.norm() + libm::fabs(k.b0[4])).max(1.0);
        }
        let v = horner(&k.b1, z) * tau + horner(&k.b0, z);
        let s = horner_abs(&k.b1, z.norm()) * tau.norm() + horner_abs(&k.b0, z.norm());
        v.norm() / s.max(1.0)
    }

    /// Root choice by the `B₁τ + B₀` residual, then the hint, then `Im Z > 0` at `z = i`.
    pub fn select_root(&self, z: HPoint, hint: Option<C>) -> Result<C, EtaError> {
        let roots = self.z_roots(z);
        let tau = self.tau(z);
        let r = [
            self.b_relation_residual(tau, roots[0]),
            self.b_relation_residual(tau, roots[1]),
        ];
        if r[0] * 2.0 < r[1] {
            return Ok(roots[0]);
        }
        if r[1] * 2.0 < r[0] {
            return Ok(roots[1]);
        }
        if let Some(h) = hint {
            return Ok(nearest(roots, h));
        }
        if (z.0 - I).norm() < 1e-14 {
            return Ok(if roots[0].im > 0.0 {
                roots[0]
            } else {
                roots[1]
            });
        }
        Err(EtaError::BranchAmbiguous)
    }

    /// Follows avatar `n` along the segment from `from.z` to `to`.
    pub fn continue_avatar(&self, n: usize, from: AvatarState, to: HPoint) -> Result<C, EtaError> {
        let p = self.rep(n)?;
        let z0 = from.z.0;
        let dz = to.0 - z0;
        if dz.norm() == 0.0 {
            return Ok(nearest(self.z_roots(to.apply(&p)), from.value));
        }
        let mut u = 0.0;
        let mut prev = from.value;
        let mut prev_prev: Option<(f64, C)> = None;
        let mut h = step_cap(z0, dz, 0.0);
        while u < 1.0 {
            let du = h.min(1.0 - u);
            let target = u + du;
            let point = HPoint(z0 + dz * target);
            let roots = self.z_roots(point.apply(&p));
            let pred = match prev_prev {
                Some((u_pp, z_pp)) => extrapolate(z_pp, prev, (target - u) / (u - u_pp)),
                None => prev,
            };
            let chosen = nearest(roots, pred);
            let gap = chordal(roots[0], roots[1]);
            let err = chordal(chosen, pred);
            // At points where r = 1/r (Z = ±1) the gap closes; there both
            // roots are within COINCIDE of each other and either is right.
            if err < 0.25 * gap || err < COINCIDE {
                prev_prev = Some((u, prev));
                prev = chosen;
                u = target;
                h = (du * 2.0).min(step_cap(z0, dz, u));
            } else {
                h = du / 2.0;
                if h < MIN_STEP {
                    return Err(EtaError::ContinuationStalled { at: u, step: h });
                }
            }
        }
        Ok(prev)
    }

    /// Base values `Z_n(i)` for all 96 avatars.
    pub fn atlas(&self) -> Result<&[C], EtaError> {
        if let Some(a) = self.atlas.get() {
            return Ok(a);
        }
        let built = self.build_atlas()?;
        Ok(self.atlas.get_or_init(|| built))
    }

    fn build_atlas(&self) -> Result<Vec<C>, EtaError> {
        let i = HPoint::i();
        let mut base: Vec<Option<C>> = vec![None; INDEX + 1];
        let roots = self.z_roots(i);
        base[1] = Some(if roots[0].im > 0.0 {
            roots[0]
        } else {
            roots[1]
        });
        let mut queue = alloc::collections::VecDeque::from([1usize]);
        while let Some(n) = queue.pop_front() {
            let row = self.table.row(n).map_err(|_| EtaError::BadIndex(n))?;
            let (nr, ns) = (row.n_r, row.n_s);
            let zn = base[n].expect("queued entries are set");
            // S fixes i: Z_{nS}(i) = Z_n(S·i) = Z_n(i).
            let at_s = nearest(self.avatar_roots(ns, i)?, zn);
            if base[ns].is_none() {
                base[ns] = Some(at_s);
                queue.push_back(ns);
            }
            // R = S·T: Z_{nR}(i) = Z_{nS}(i + 1).
            if base[nr].is_none() {
                let shifted = HPoint(I + 1.0);
                let v = self.continue_avatar(ns, AvatarState { z: i, value: at_s }, shifted)?;
                base[nr] = Some(nearest(self.avatar_roots(nr, i)?, v));
                queue.push_back(nr);
            }
        }
        Ok(base.into_iter().map(|v| v.unwrap_or(C::zero())).collect())
    }

    /// `Z_n(z)` with no history: reduce `z = M⁻¹·z′` and continue
    /// `Z_{n·M⁻¹}` from `i` to `z′` inside the fundamental domain.
    pub fn avatar_value(&self, n: usize, z: HPoint) -> Result<C, EtaError> {
        let p = self.rep(n)?;
        let (w, m) = reduce_to_fundamental(z);
        let k = self.table.coset_index_fast(&(p * m.inverse()));
        let start = AvatarState {
            z: HPoint::i(),
            value: self.atlas()?[k],
        };
        self.continue_avatar(k, start, w)
    }

    /// `Z(z)`: with a hint, the root nearest to it (unless the `B₁τ + B₀` residual decides);
    /// otherwise the globally consistent value.
    pub fn z_eval(&self, z: HPoint, hint: Option<C>) -> Result<C, EtaError> {
        match self.select_root(z, hint) {
            Err(EtaError::BranchAmbiguous) => self.avatar_value(1, z),
            other => other,
        }
    }

    /// `Z_n(z) = Z(P_n·z)`; with a state, continues from it and updates it.
    pub fn avatar_eval(
        &self,
        n: usize,
        z: HPoint,
        state: Option<&mut AvatarState>,
    ) -> Result<C, EtaError> {
        match state {
            Some(s) => {
                let v = self.continue_avatar(n, *s, z)?;
                *s = AvatarState { z, value: v };
                Ok(v)
            }
            None => self.avatar_value(n, z),
        }
    }

    /// Ψ from `B₁(Z)²σ` over `3√5·φ·(Z²−1)(Z²−Z+1)(Z²−3Z+1)`, then
    /// `Φ = (Ψ − Z)/(2(Z − 1))`.
    pub fn psi_phi(&self, z: HPoint, zv: C) -> Result<PsiPhi, EtaError> {
        let sigma = self.sigma(z)?;
        psi_phi_from(&self.consts, sigma, zv, self.pole_tol)
    }

    /// All residuals at `z` for the root `zv`.
    pub fn residuals(&self, z: HPoint, zv: C) -> Result<Residuals, EtaError> {
        let k = &self.consts;
        let q = self.quotients(z);
        let (t, l) = (q.tau, q.lambda);
        let sigma = self.sigma_from(t, l)?;
        let (a, b) = self.quadratic(z);
        let quadratic = (a * zv * zv + b * zv + a).norm()
            / (a.norm() * (zv.norm_sqr() + 1.0) + b.norm() * zv.norm()).max(1.0);
        let other = if zv.is_zero() { infinity() } else { zv.inv() };
        let quartic = (sigma * sigma - horner(&QUARTIC, t)).norm()
            / (sigma.norm_sqr() + horner_abs(&QUARTIC, t.norm())).max(1.0);
        let lam = (l * l
            - (horner(&k.c_poly, t) * sigma + horner(&k.d_poly, t)) / (t.powi(4) * 250.0))
            .norm()
            / (l.norm_sqr()).max(1.0);
        let t5_formula = (horner(&[-1.0, -9.0, 0.0, -9.0, 1.0], t)
            + horner(&[-1.0, -4.0, 1.0], t) * sigma)
            / (t * 2.0);
        let t5_scale = (horner_abs(&[1.0, 9.0, 0.0, 9.0, 1.0], t.norm())
            + horner_abs(&[1.0, 4.0, 1.0], t.norm()) * sigma.norm())
            / (2.0 * t.norm());
        let tau5_relation = (q.tau5 - t5_formula).norm() / t5_scale.max(1.0);
        let pp = psi_phi_from(&self.consts, sigma, zv, self.pole_tol)?;
        let claimed = psi_claimed_residual(&self.consts, sigma, zv);
        Ok(Residuals {
            quadratic,
            b_relation: self.b_relation_residual(t, zv),
            b_relation_other_root: self.b_relation_residual(t, other),
            quartic,
            lambda_relation: lam,
            tau5_relation,
            psi_square: pp.psi_square_residual,
            psi_square_claimed_denominator: claimed,
            cubic: pp.cubic_residual,
        })
    }
}

/// `τ⁴ − 10τ³ − 13τ² + 10τ + 1`, lowest degree first.
const QUARTIC: [f64; 5] = [1.0, 10.0, -13.0, -10.0, 1.0];

fn j_from_tau5(t5: C, tol: f64) -> Result<C, EtaError> {
    if t5.norm() < tol {
        return Err(EtaError::NearPole {
            what: "j",
            size: t5.norm(),
        });
    }
    Ok((t5 * t5 + t5 * 10.0 + 5.0).powi(3) / t5)
}

fn psi_phi_from(k: &FloatConsts, sigma: C, zv: C, tol: f64) -> Result<PsiPhi, EtaError> {
    let one = C::new(1.0, 0.0);
    let den = (zv * zv - one) * (zv * zv - zv + one) * (zv * zv - zv * 3.0 + one);
    let den_scale = ((zv.norm_sqr() + 1.0)
        * (zv.norm_sqr() + zv.norm() + 1.0)
        * (zv.norm_sqr() + 3.0 * zv.norm() + 1.0))
        .max(1.0);
    if !zv.is_finite() || den.norm() < tol * den_scale {
        return Err(EtaError::NearPole {
            what: "psi",
            size: den.norm(),
        });
    }
    if (zv - one).norm() < tol {
        return Err(EtaError::NearPole {
            what: "phi",
            size: (zv - one).norm(),
        });
    }
    let b1 = horner(&k.b1, zv);
    let psi = b1 * b1 * sigma / (den * k.psi_scale);
    let phi = (psi - zv) / ((zv - one) * 2.0);
    let cubic = horner(&[0.0, 4.0, -7.0, 4.0], zv);
    let psi_square = (psi * psi - cubic).norm()
        / (psi.norm_sqr() + horner_abs(&[0.0, 4.0, 7.0, 4.0], zv.norm())).max(1.0);
    let thm = (zv - one) * phi * phi + zv * phi - zv * (zv - one);
    let thm_scale =
        (zv - one).norm() * phi.norm_sqr() + zv.norm() * phi.norm() + zv.norm() * (zv - one).norm();
    Ok(PsiPhi {
        psi,
        phi,
        psi_square_residual: psi_square,
        cubic_residual: thm.norm() / thm_scale.max(1.0),
    })
}

/// `Ψ²` residual when Ψ uses the claimed denominator `(Z−1)²(Z²−Z+1)(Z²+3Z+1)`.
fn psi_claimed_residual(k: &FloatConsts, sigma: C, zv: C) -> f64 {
    let one = C::new(1.0, 0.0);
    let den = (zv - one).powi(2) * (zv * zv - zv + one) * (zv * zv + zv * 3.0 + one);
    let b1 = horner(&k.b1, zv);
    let psi = b1 * b1 * sigma / (den * k.psi_scale);
    let cubic = horner(&[0.0, 4.0, -7.0, 4.0], zv);
    (psi * psi - cubic).norm()
        / (psi.norm_sqr() + horner_abs(&[0.0, 4.0, 7.0, 4.0], zv.norm())).max(1.0)
}

fn nearest(roots: [C; 2], target: C) -> C {
    if chordal(roots[0], target) <= chordal(roots[1], target) {
        roots[0]
    } else {
        roots[1]
    }
}

/// Linear extrapolation through `a` then `b`, `ratio` step lengths past `b`;
/// done in `1/Z` when the values are large.
fn extrapolate(a: C, b: C, ratio: f64) -> C {
    if !a.is_finite() || !b.is_finite() {
        return b;
    }
    if b.norm() <= 1.0 {
        b + (b - a) * ratio
    } else if a.is_zero() {
        b
    } else {
        let (ia, ib) = (a.inv(), b.inv());
        let p = ib + (ib - ia) * ratio;
        if p.is_zero() {
            infinity()
        } else {
            p.inv()
        }
    }
}

/// Largest step (fraction of the segment) that moves at most a quarter of
/// the local height.
fn step_cap(z0: C, dz: C, u: f64) -> f64 {
    let here = (z0 + dz * u).im;
    let end = (z0 + dz).im;
    let h = here.min(end.max(here * 0.5));
    (0.25 * h / dz.norm()).clamp(MIN_STEP, 0.125)
}
