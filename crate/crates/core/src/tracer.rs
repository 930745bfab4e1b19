//! Continuation of the relation `ζ(s) = Z₄₁(z)` along the tree path from `c`
//! to `A(c)`: starting at a zeta zero `ρ_m`, the s-plane path ends near
//! another zero, which is then identified.

use alloc::string::String;
use alloc::vec::Vec;

use num_complex::Complex64;
use thiserror::Error;

use crate::eta_engine::{AvatarState, EtaContext, EtaError, HPoint};
use crate::sl2z::{element_a, in_k, word_a, GroupElem};
use crate::treepath::{build_path, TreePath, DEFAULT_POLE_CAP, DEFAULT_SAMPLES};
use crate::zeta::{zeta_with_derivative, ZeroList, ZetaError};

type C = Complex64;

/// The avatar followed by the experiment.
pub const AVATAR: usize = 41;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum TraceError {
    #[error("step collapsed below {step:e} at path parameter {t}")]
    StepCollapse { t: f64, step: f64 },
    #[error("|zeta'(s)| = {size:e} at path parameter {t}")]
    DerivativeSmall { t: f64, size: f64 },
    #[error("|Z_41| = {modulus:e} exceeds the pole cap at path parameter {t}")]
    Blocked { t: f64, modulus: f64 },
    #[error("|Z_41| = {value:e} at the start point, so (c, rho_m) is not on the relation")]
    StartInconsistent { value: f64 },
    #[error("no zero with index {0} in the zero list")]
    MissingZero(usize),
    #[error(transparent)]
    Eta(#[from] EtaError),
    #[error(transparent)]
    Zeta(#[from] ZetaError),
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TraceOptions {
    /// Nominal steps along the whole path.
    pub samples: usize,
    /// Newton stops once `|ζ(s) − w| < newton_tol·max(1, |w|)`.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Largest accepted move of `s` in one step.
    pub max_ds: f64,
    /// Smallest step, as a fraction of the path.
    pub min_step: f64,
    pub derivative_min: f64,
    pub pole_cap: f64,
    pub match_tol: f64,
    /// Required ratio between second-nearest and nearest zero distances.
    pub dominance: f64,
    /// Follow `A⁻¹` instead of `A`.
    pub reverse: bool,
}

impl Default for TraceOptions {
    fn default() -> Self {
        TraceOptions {
            samples: DEFAULT_SAMPLES,
            newton_tol: 1e-10,
            max_newton: 5,
            max_ds: 0.5,
            min_step: 1e-9,
            derivative_min: 1e-6,
            pole_cap: DEFAULT_POLE_CAP,
            match_tol: 1e-6,
            dominance: 10.0,
            reverse: false,
        }
    }
}

/// One traced path `Q_{A,ρ_m}`.
#[derive(Clone, Debug, PartialEq)]
pub struct TraceRecord {
    pub m: usize,
    pub gamma_start: f64,
    pub end: C,
    /// Index of the matched zero, when the match is unambiguous.
    pub matched: Option<usize>,
    pub nearest: usize,
    pub nearest_distance: f64,
    pub second_distance: f64,
    pub steps: usize,
    pub rejected_steps: usize,
    pub max_residual: f64,
    pub max_abs_z41: f64,
    pub end_abs_z41: f64,
}

/// The path `P_A` (or `P_{A⁻¹}`) starting at `c = e^{iθ_c}`.
pub fn experiment_path(theta_c: f64, reverse: bool) -> TreePath {
    let w = if reverse {
        word_a().inverse()
    } else {
        word_a()
    };
    build_path(&w, theta_c).expect("the word of A alternates")
}

/// Newton on `ζ(s) = w` from `s`; `None` if it does not settle.
fn correct(s: C, w: C, opts: &TraceOptions) -> Result<Option<(C, C, f64)>, ZetaError> {
    let mut s = s;
    for _ in 0..opts.max_newton {
        let (z, dz) = zeta_with_derivative(s)?;
        let res = (z - w).norm();
        if res < opts.newton_tol * w.norm().max(1.0) {
            return Ok(Some((s, dz, res)));
        }
        if dz.norm() == 0.0 {
            return Ok(None);
        }
        s -= (z - w) / dz;
    }
    let (z, dz) = zeta_with_derivative(s)?;
    let res = (z - w).norm();
    Ok((res < opts.newton_tol * w.norm().max(1.0)).then_some((s, dz, res)))
}

/// Traces from `ρ_m` along `path` and matches the end point against `zeros`.
pub fn trace(
    ctx: &EtaContext,
    m: usize,
    path: &TreePath,
    zeros: &ZeroList,
    opts: &TraceOptions,
) -> Result<TraceRecord, TraceError> {
    let gamma = zeros.get(m).ok_or(TraceError::MissingZero(m))?;
    let start = path.point(0.0);
    let w0 = ctx.avatar_eval(AVATAR, start, None)?;
    if w0.norm() >= 1e-6 {
        return Err(TraceError::StartInconsistent { value: w0.norm() });
    }
    let mut state = AvatarState {
        z: start,
        value: w0,
    };
    let (mut s, mut dz, _) = correct(C::new(0.5, gamma), w0, opts)?
        .ok_or(TraceError::DerivativeSmall { t: 0.0, size: 0.0 })?;
    let base = 1.0 / opts.samples.max(1) as f64;
    let mut h = base;
    let mut t = 0.0;
    let mut steps = 0;
    let mut rejected = 0;
    let mut max_res: f64 = 0.0;
    let mut max_z = w0.norm();
    while t < 1.0 {
        if dz.norm() < opts.derivative_min {
            return Err(TraceError::DerivativeSmall { t, size: dz.norm() });
        }
        let dt = h.min(1.0 - t);
        let t1 = if t + dt >= 1.0 - 1e-15 { 1.0 } else { t + dt };
        let mut trial = state;
        let w1 = ctx.avatar_eval(AVATAR, path.point(t1), Some(&mut trial))?;
        if !w1.is_finite() || w1.norm() > opts.pole_cap {
            return Err(TraceError::Blocked {
                t: t1,
                modulus: w1.norm(),
            });
        }
        let predicted = s + (w1 - state.value) / dz;
        let accepted = match correct(predicted, w1, opts)? {
            Some((s1, dz1, res)) if (s1 - s).norm() <= opts.max_ds => Some((s1, dz1, res)),
            _ => None,
        };
        match accepted {
            Some((s1, dz1, res)) => {
                s = s1;
                dz = dz1;
                state = trial;
                t = t1;
                steps += 1;
                max_res = max_res.max(res);
                max_z = max_z.max(w1.norm());
                h = (dt * 2.0).min(base);
            }
            None => {
                rejected += 1;
                h = dt / 2.0;
                if h < opts.min_step {
                    return Err(TraceError::StepCollapse { t, step: h });
                }
            }
        }
    }
    let (nearest, d1, d2) = nearest_zeros(zeros, s);
    let matched = (d1 < opts.match_tol && d2 >= opts.dominance * d1).then_some(nearest);
    Ok(TraceRecord {
        m,
        gamma_start: gamma,
        end: s,
        matched,
        nearest,
        nearest_distance: d1,
        second_distance: d2,
        steps,
        rejected_steps: rejected,
        max_residual: max_res,
        max_abs_z41: max_z,
        end_abs_z41: state.value.norm(),
    })
}

/// Index (1-based) of the zero nearest to `s`, its distance and the
/// distance to the runner-up.
fn nearest_zeros(zeros: &ZeroList, s: C) -> (usize, f64, f64) {
    let mut best = (0, f64::INFINITY);
    let mut second = f64::INFINITY;
    for (i, &g) in zeros.ordinates.iter().enumerate() {
        let d = (s - C::new(0.5, g)).norm();
        if d < best.1 {
            second = best.1;
            best = (i + 1, d);
        } else if d < second {
            second = d;
        }
    }
    (best.0, best.1, second)
}

/// Per-m outcome of an experiment run.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentEntry {
    pub m: usize,
    pub result: Result<TraceRecord, TraceError>,
}

impl ExperimentEntry {
    /// The end point matched `ρ_{m+1}`.
    pub fn hit(&self) -> bool {
        matches!(&self.result, Ok(r) if r.matched == Some(self.m + 1))
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentSummary {
    pub entries: Vec<ExperimentEntry>,
}

impl ExperimentSummary {
    pub fn from_entries(mut entries: Vec<ExperimentEntry>) -> Self {
        entries.sort_by_key(|e| e.m);
        ExperimentSummary { entries }
    }

    pub fn successes(&self) -> usize {
        self.entries.iter().filter(|e| e.hit()).count()
    }

    pub fn failures(&self) -> usize {
        self.entries.len() - self.successes()
    }

    pub fn max_residual(&self) -> f64 {
        self.entries
            .iter()
            .filter_map(|e| e.result.as_ref().ok())
            .map(|r| r.max_residual)
            .fold(0.0, f64::max)
    }
}

/// Runs `trace` for `m = 1..=max_m`, one after another.
pub fn run_experiment(
    ctx: &EtaContext,
    path: &TreePath,
    zeros: &ZeroList,
    max_m: usize,
    opts: &TraceOptions,
) -> ExperimentSummary {
    let entries = (1..=max_m)
        .map(|m| ExperimentEntry {
            m,
            result: trace(ctx, m, path, zeros, opts),
        })
        .collect();
    ExperimentSummary::from_entries(entries)
}

#[derive(Clone, Debug, PartialEq)]
pub struct FixingReport {
    pub exact: bool,
    /// `P₁·A·P₁⁻¹ ∈ K`; expected false.
    pub control: bool,
    pub samples: Vec<(C, f64)>,
    pub max_difference: f64,
}

impl FixingReport {
    pub fn ok(&self, tol: f64) -> bool {
        self.exact && !self.control && self.max_difference < tol
    }
}

/// Exact and numeric check that `A` fixes `Z_n`.
pub fn verify_fixing(ctx: &EtaContext, n: usize, c: HPoint) -> Result<FixingReport, EtaError> {
    let a = element_a();
    let table = ctx.table();
    let p = table.rep(n);
    let exact = in_k(&(p * a * p.inverse()));
    let control = in_k(&(GroupElem::IDENTITY * a));
    let mut points = Vec::from([c]);
    for (x, y) in [
        (0.0, 1.0),
        (0.1, 1.3),
        (-0.35, 0.95),
        (0.45, 2.0),
        (-0.2, 0.6),
        (0.3, 0.4),
        (1.7, 0.8),
        (-0.05, 0.15),
        (0.25, 3.5),
    ] {
        points.push(HPoint::from_parts(x, y)?);
    }
    let mut samples = Vec::with_capacity(points.len());
    let mut max_difference: f64 = 0.0;
    for z in points {
        let lhs = ctx.avatar_eval(n, z.apply(&a), None)?;
        let rhs = ctx.avatar_eval(n, z, None)?;
        let d = (lhs - rhs).norm() / rhs.norm().max(1.0);
        max_difference = max_difference.max(d);
        samples.push((z.z(), d));
    }
    Ok(FixingReport {
        exact,
        control,
        samples,
        max_difference,
    })
}

/// Short human-readable reason for a failed entry.
pub fn describe_failure(e: &ExperimentEntry) -> Option<String> {
    match &e.result {
        Ok(r) if r.matched == Some(e.m + 1) => None,
        Ok(r) => Some(alloc::format!(
            "ended nearest zero {} at distance {:e}",
            r.nearest,
            r.nearest_distance
        )),
        Err(err) => Some(alloc::format!("{err}")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::treepath::find_c;
    use crate::zeta::find_zeros;

    fn setup() -> (EtaContext, f64, ZeroList) {
        let ctx = EtaContext::new();
        let th = find_c(&ctx).unwrap().theta;
        (ctx, th, find_zeros(6).unwrap())
    }

    #[test]
    fn first_traces_hit_next_zero() {
        let (ctx, th, zeros) = setup();
        let path = experiment_path(th, false);
        let opts = TraceOptions::default();
        for m in 1..=3 {
            let r = trace(&ctx, m, &path, &zeros, &opts).unwrap();
            assert_eq!(r.matched, Some(m + 1), "{r:?}");
            assert!(r.max_residual < 1e-8);
            assert!(r.end_abs_z41 < 1e-5);
        }
    }

    #[test]
    fn refinement_is_stable() {
        let (ctx, th, zeros) = setup();
        let path = experiment_path(th, false);
        let coarse = trace(&ctx, 1, &path, &zeros, &TraceOptions::default()).unwrap();
        let fine_opts = TraceOptions {
            samples: 2 * DEFAULT_SAMPLES,
            ..TraceOptions::default()
        };
        let fine = trace(&ctx, 1, &path, &zeros, &fine_opts).unwrap();
        assert_eq!(coarse.matched, fine.matched);
        assert!((coarse.end - fine.end).norm() < 1e-8);
        let again = trace(&ctx, 1, &path, &zeros, &TraceOptions::default()).unwrap();
        assert_eq!(again, coarse);
    }

    #[test]
    fn empty_experiment() {
        let (ctx, th, zeros) = setup();
        let path = experiment_path(th, false);
        let s = run_experiment(&ctx, &path, &zeros, 0, &TraceOptions::default());
        assert!(s.entries.is_empty());
        assert_eq!(s.successes(), 0);
    }

    #[test]
    fn missing_zero_is_reported() {
        let (ctx, th, zeros) = setup();
        let path = experiment_path(th, false);
        assert_eq!(
            trace(&ctx, 99, &path, &zeros, &TraceOptions::default()),
            Err(TraceError::MissingZero(99))
        );
    }

    #[test]
    fn fixing() {
        let ctx = EtaContext::new();
        let c = find_c(&ctx).unwrap().c;
        let rep = verify_fixing(&ctx, AVATAR, c).unwrap();
        assert!(rep.exact);
        assert!(!rep.control);
        assert!(rep.max_difference < 1e-8, "{rep:?}");
        assert!(rep.samples[0].1 < 1e-8);
    }

    #[test]
    fn reversed_path_runs() {
        let (ctx, th, zeros) = setup();
        let path = experiment_path(th, true);
        assert_eq!(path.len(), 18);
        let r = trace(&ctx, 2, &path, &zeros, &TraceOptions::default());
        assert!(r.is_ok(), "{r:?}");
    }
}
