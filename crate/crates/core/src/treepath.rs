//! The arc `E = {e^{iθ} : π/2 ≤ θ ≤ 2π/3}`, its SL(2,Z)-images (the edges of
//! a tree with vertices at images of `i` and `ω`), the point `c ∈ E`, and
//! edge paths from `c` to `g(c)`.

use alloc::collections::VecDeque;
use alloc::vec::Vec;
use core::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::eta_engine::{chordal, AvatarState, EtaContext, EtaError, HPoint};
use crate::exactquad;
use crate::sl2z::{GroupElem, Letter, Word};

pub const THETA_I: f64 = PI / 2.0;
pub const THETA_OMEGA: f64 = 2.0 * PI / 3.0;

/// Default pole cap for [`pole_scan`].
pub const DEFAULT_POLE_CAP: f64 = 1e6;
/// Default samples along a whole path.
pub const DEFAULT_SAMPLES: usize = 2000;

#[derive(Clone, Debug, PartialEq, Error)]
pub enum TreeError {
    #[error("word is not reduced alternating at letter {position}")]
    NotReduced { position: usize },
    #[error("|Z_{avatar}| = {modulus:e} exceeds the pole cap at path parameter {t}")]
    Blocked { avatar: usize, t: f64, modulus: f64 },
    #[error(transparent)]
    Eta(#[from] EtaError),
}

/// The point `c = e^{iθ_c}` where `j(c)` equals the exact target value.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CPoint {
    pub theta: f64,
    pub c: HPoint,
    pub j: Complex64,
    pub j_target: f64,
}

/// Bisection on `θ ∈ [π/2, 2π/3]` for `Re j(e^{iθ}) = j_target`.
pub fn find_c(ctx: &EtaContext) -> Result<CPoint, EtaError> {
    let target = exactquad::exact_j_target().j.to_f64();
    let (mut lo, mut hi) = (THETA_I, THETA_OMEGA);
    // j falls from 1728 at i to 0 at ω.
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let j = ctx.j_fricke(HPoint::on_unit_circle(mid))?;
        if j.re > target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let theta = 0.5 * (lo + hi);
    let c = HPoint::on_unit_circle(theta);
    Ok(CPoint {
        theta,
        c,
        j: ctx.j_fricke(c)?,
        j_target: target,
    })
}

/// One oriented edge `g(E)`, traversed from `θ_from` to `θ_to`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Edge {
    pub g: GroupElem,
    pub theta_from: f64,
    pub theta_to: f64,
}

impl Edge {
    pub fn point(&self, s: f64) -> HPoint {
        let th = self.theta_from + (self.theta_to - self.theta_from) * s;
        HPoint::on_unit_circle(th).apply(&self.g)
    }

    pub fn start(&self) -> HPoint {
        self.point(0.0)
    }

    pub fn end(&self) -> HPoint {
        self.point(1.0)
    }
}

/// Edge path from `c` to `w(c)` through the prefix images `p_j(E)`.
#[derive(Clone, Debug, PartialEq)]
pub struct TreePath {
    pub word: Word,
    pub theta_c: f64,
    pub edges: Vec<Edge>,
}

fn vertex_angle(l: Letter) -> f64 {
    if l.is_rotation() {
        THETA_OMEGA
    } else {
        THETA_I
    }
}

/// Builds `P_w`; `w` must alternate between `S` and `R^{±1}`.
pub fn build_path(w: &Word, theta_c: f64) -> Result<TreePath, TreeError> {
    let letters = w.letters();
    for (k, pair) in letters.windows(2).enumerate() {
        if pair[0].is_rotation() == pair[1].is_rotation() {
            return Err(TreeError::NotReduced { position: k + 1 });
        }
    }
    let mut edges = Vec::with_capacity(letters.len() + 1);
    let mut g = GroupElem::IDENTITY;
    for j in 0..=letters.len() {
        let theta_from = if j == 0 {
            theta_c
        } else {
            vertex_angle(letters[j - 1])
        };
        let theta_to = if j == letters.len() {
            theta_c
        } else {
            vertex_angle(letters[j])
        };
        edges.push(Edge {
            g,
            theta_from,
            theta_to,
        });
        if j < letters.len() {
            g = g * letters[j].matrix();
        }
    }
    Ok(TreePath {
        word: w.clone(),
        theta_c,
        edges,
    })
}

impl TreePath {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }

    /// Point at parameter `t ∈ [0, 1]`; each edge takes an equal share.
    pub fn point(&self, t: f64) -> HPoint {
        let (j, s) = self.locate(t);
        self.edges[j].point(s)
    }

    fn locate(&self, t: f64) -> (usize, f64) {
        let k = self.edges.len();
        let x = t.clamp(0.0, 1.0) * k as f64;
        let j = (libm::floor(x) as usize).min(k - 1);
        (j, x - j as f64)
    }

    /// `|end(e_j) − start(e_{j+1})|` for every consecutive pair.
    pub fn endpoint_mismatches(&self) -> Vec<f64> {
        self.edges
            .windows(2)
            .map(|p| (p[0].end().z() - p[1].start().z()).norm())
            .collect()
    }

    /// No two edges carry the same matrix up to sign.
    pub fn edges_distinct(&self) -> bool {
        self.edges
            .iter()
            .enumerate()
            .all(|(i, a)| self.edges[i + 1..].iter().all(|b| !a.g.eq_up_to_sign(&b.g)))
    }

    pub fn start(&self) -> HPoint {
        self.edges[0].start()
    }

    pub fn end(&self) -> HPoint {
        self.edges[self.edges.len() - 1].end()
    }

    /// Uniform parameters plus, on every edge, the parameter where the arc
    /// angle equals `θ_c` (the image of `c` on that edge).
    pub fn grid(&self, samples: usize) -> Vec<f64> {
        let n = samples.max(2);
        let k = self.edges.len() as f64;
        let mut ts: Vec<f64> = (0..n).map(|i| i as f64 / (n - 1) as f64).collect();
        for (j, e) in self.edges.iter().enumerate() {
            let span = e.theta_to - e.theta_from;
            if span.abs() > 0.0 {
                let s = (self.theta_c - e.theta_from) / span;
                if (0.0..=1.0).contains(&s) {
                    ts.push((j as f64 + s) / k);
                }
            }
        }
        ts.sort_by(|a, b| a.total_cmp(b));
        ts.dedup_by(|a, b| (*a - *b).abs() < 1e-15);
        ts
    }
}

/// Outcome of a pole scan.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PoleScan {
    pub max_modulus: f64,
    pub at_t: f64,
    pub samples: usize,
}

/// Follows `Z_n` along the path grid, starting from its global value at the
/// start point; fails with `Blocked` once `|Z_n|` passes `cap`.
pub fn pole_scan(
    ctx: &EtaContext,
    path: &TreePath,
    n: usize,
    samples: usize,
    cap: f64,
) -> Result<PoleScan, TreeError> {
    let grid = path.grid(samples);
    let start = path.point(grid[0]);
    let mut state = AvatarState {
        z: start,
        value: ctx.avatar_eval(n, start, None)?,
    };
    let mut best = (state.value.norm(), grid[0]);
    let check = |v: Complex64, t: f64, best: &mut (f64, f64)| {
        let m = if v.is_finite() {
            v.norm()
        } else {
            f64::INFINITY
        };
        if m > cap {
            return Err(TreeError::Blocked {
                avatar: n,
                t,
                modulus: m,
            });
        }
        if m > best.0 {
            *best = (m, t);
        }
        Ok(())
    };
    check(state.value, grid[0], &mut best)?;
    let mut values = Vec::with_capacity(grid.len());
    values.push(state);
    for &t in &grid[1..] {
        let v = ctx.avatar_eval(n, path.point(t), Some(&mut state))?;
        check(v, t, &mut best)?;
        values.push(state);
    }
    // Refine around the largest sample.
    let idx = grid.iter().position(|&t| t == best.1).unwrap_or(0);
    let lo = idx.saturating_sub(1);
    let hi = (idx + 1).min(grid.len() - 1);
    let mut st = values[lo];
    let fine = 64;
    for k in 1..fine {
        let t = grid[lo] + (grid[hi] - grid[lo]) * k as f64 / fine as f64;
        let v = ctx.avatar_eval(n, path.point(t), Some(&mut st))?;
        check(v, t, &mut best)?;
    }
    Ok(PoleScan {
        max_modulus: best.0,
        at_t: best.1,
        samples: grid.len(),
    })
}

/// Enumerates reduced alternating words by length and returns the first one
/// whose path is blocked for avatar `n`.
pub fn search_blocked_word(
    ctx: &EtaContext,
    theta_c: f64,
    n: usize,
    max_letters: usize,
    samples: usize,
    cap: f64,
) -> Result<Option<(Word, TreeError)>, EtaError> {
    let mut queue: VecDeque<Vec<Letter>> = VecDeque::from([
        Vec::from([Letter::S]),
        Vec::from([Letter::R]),
        Vec::from([Letter::RInv]),
    ]);
    while let Some(letters) = queue.pop_front() {
        let word = Word::new(letters.clone());
        let path = build_path(&word, theta_c).expect("generated words alternate");
        match pole_scan(ctx, &path, n, samples, cap) {
            Err(e @ TreeError::Blocked { .. }) => return Ok(Some((word, e))),
            Err(TreeError::Eta(e)) => return Err(e),
            Err(TreeError::NotReduced { .. }) => unreachable!("generated words alternate"),
            Ok(_) => {}
        }
        if letters.len() < max_letters {
            let last = *letters.last().expect("nonempty");
            let next: &[Letter] = if last.is_rotation() {
                &[Letter::S]
            } else {
                &[Letter::R, Letter::RInv]
            };
            for &l in next {
                let mut w = letters.clone();
                w.push(l);
                queue.push_back(w);
            }
        }
    }
    Ok(None)
}

/// How `E` meets `g(E)` for one `g`.
#[derive(Clone, Debug, PartialEq)]
pub struct IntersectionCheck {
    pub label: alloc::string::String,
    pub g: GroupElem,
    pub expected: Meeting,
    pub ok: bool,
    /// Smallest distance between the two arcs away from any shared vertex.
    pub min_distance: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Meeting {
    Same,
    AtOmega,
    AtI,
    Empty,
}

fn arc_samples(g: &GroupElem, n: usize, keep: impl Fn(f64) -> bool) -> Vec<Complex64> {
    (0..=n)
        .map(|k| THETA_I + (THETA_OMEGA - THETA_I) * k as f64 / n as f64)
        .filter(|&th| keep(th))
        .map(|th| HPoint::on_unit_circle(th).apply(g).z())
        .collect()
}

fn min_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    a.iter()
        .flat_map(|x| b.iter().map(move |y| (x - y).norm()))
        .fold(f64::INFINITY, f64::min)
}

fn check_meeting(label: &str, g: GroupElem, expected: Meeting) -> IntersectionCheck {
    const N: usize = 400;
    const AWAY: f64 = 0.02;
    let everything = |_: f64| true;
    let (ok, dist) = match expected {
        Meeting::Same => {
            let a = arc_samples(&GroupElem::IDENTITY, N, everything);
            let b = arc_samples(&g, N, everything);
            // g(E) = E as sets: every image sample lies on E.
            let on_e = b.iter().all(|z| {
                let th = libm::atan2(z.im, z.re);
                (z.norm() - 1.0).abs() < 1e-12
                    && (THETA_I - 1e-12..=THETA_OMEGA + 1e-12).contains(&th)
            });
            (on_e && a.len() == b.len(), 0.0)
        }
        Meeting::AtOmega | Meeting::AtI => {
            let v = if expected == Meeting::AtOmega {
                HPoint::omega()
            } else {
                HPoint::i()
            };
            let shared = (v.apply(&g).z() - v.z()).norm() < 1e-12;
            let far = |th: f64| (HPoint::on_unit_circle(th).z() - v.z()).norm() > AWAY;
            let a = arc_samples(&GroupElem::IDENTITY, N, far);
            let b: Vec<Complex64> = arc_samples(&g, N, |_| true)
                .into_iter()
                .filter(|z| (z - v.z()).norm() > AWAY)
                .collect();
            let d = min_distance(&a, &b);
            (shared && d > 1e-6, d)
        }
        Meeting::Empty => {
            let a = arc_samples(&GroupElem::IDENTITY, N, everything);
            let b = arc_samples(&g, N, everything);
            let d = min_distance(&a, &b);
            (d > 1e-6, d)
        }
    };
    IntersectionCheck {
        label: label.into(),
        g,
        expected,
        ok,
        min_distance: dist,
    }
}

/// The local picture at the base edge: `±I` give `E` itself, `±R^{±1}` meet
/// it at `ω`, `±S` at `i`, and a panel of 50 other short words misses it.
pub fn verify_local_intersections() -> Vec<IntersectionCheck> {
    use alloc::format;
    let mut out = Vec::new();
    for (name, g) in [("I", GroupElem::IDENTITY), ("-I", GroupElem::NEG_IDENTITY)] {
        out.push(check_meeting(name, g, Meeting::Same));
    }
    for (name, g) in [("R", GroupElem::R), ("R^-1", GroupElem::R_INV)] {
        out.push(check_meeting(name, g, Meeting::AtOmega));
        out.push(check_meeting(
            &format!("-{name}"),
            g.neg(),
            Meeting::AtOmega,
        ));
    }
    out.push(check_meeting("S", GroupElem::S, Meeting::AtI));
    out.push(check_meeting("-S", GroupElem::S.neg(), Meeting::AtI));
    let excluded = [
        GroupElem::IDENTITY,
        GroupElem::R,
        GroupElem::R_INV,
        GroupElem::S,
    ];
    let mut seen: Vec<GroupElem> = excluded.to_vec();
    let gens = [
        ('T', GroupElem::T),
        ('t', GroupElem::T.inverse()),
        ('S', GroupElem::S),
        ('R', GroupElem::R),
        ('r', GroupElem::R_INV),
    ];
    let mut queue: VecDeque<(alloc::string::String, GroupElem)> =
        VecDeque::from([(alloc::string::String::new(), GroupElem::IDENTITY)]);
    let mut panel = 0;
    while let Some((name, g)) = queue.pop_front() {
        if panel >= 50 {
            break;
        }
        for (ch, m) in gens {
            let h = g * m;
            if seen.iter().any(|s| s.eq_up_to_sign(&h)) {
                continue;
            }
            seen.push(h);
            let label = format!("{name}{ch}");
            if panel < 50 {
                out.push(check_meeting(&label, h, Meeting::Empty));
                panel += 1;
            }
            queue.push_back((label, h));
        }
    }
    out
}

/// Largest `|Z_n|` seen and the parameter where it occurs, from an already
/// evaluated list of `(t, Z)` pairs.
pub fn max_modulus(values: &[(f64, Complex64)]) -> Option<(f64, f64)> {
    values
        .iter()
        .map(|&(t, v)| (v.norm(), t))
        .max_by(|a, b| a.0.total_cmp(&b.0))
}

/// Chordal jump between consecutive values, a cheap continuity monitor.
pub fn max_chordal_jump(values: &[(f64, Complex64)]) -> f64 {
    values
        .windows(2)
        .map(|p| chordal(p[0].1, p[1].1))
        .fold(0.0, f64::max)
}
