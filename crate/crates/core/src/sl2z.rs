//! SL(2,Z) machinery: generators, words, the congruence subgroups Γ(n),
//! Γ⁰(n), Γ¹(n) (upper-triangular convention, `b ≡ 0 mod n`), and the 96 right
//! cosets of `K = ⟨−I, Γ¹(15)⟩` that index the avatar functions.
//!
//! Matrices act on the upper half plane by Möbius transformations and on
//! functions on the right, `f^g(z) = f(g·z)`, so that `(f^g)^h = f^{gh}` and
//! the coset of `P_n·R` is the avatar `(Z_n)^R`.

use alloc::collections::BTreeMap;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::ops::Mul;
use core::str::FromStr;

use num_complex::Complex64;
use thiserror::Error;

/// Level of the congruence subgroup behind the avatars.
pub const LEVEL: i64 = 15;
/// `|Γ(1) : K|`.
pub const INDEX: usize = 96;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GroupError {
    #[error("matrix ({a}, {b}; {c}, {d}) has determinant {det}, not 1")]
    NotUnimodular {
        a: i64,
        b: i64,
        c: i64,
        d: i64,
        det: i64,
    },
    #[error("invalid letter {letter:?} at position {position} (expected R, r or S)")]
    BadLetter { letter: char, position: usize },
    #[error("coset enumeration did not close after {visited} elements")]
    NonClosure { visited: usize },
    #[error("coset table line {line}: {reason}")]
    Table { line: usize, reason: String },
    #[error("coset index {0} out of range 1..=96")]
    BadIndex(usize),
}

/// An element of SL(2,Z), `(a b; c d)` with `ad − bc = 1`.
///
/// Entries are `i64`; products overflow-check and panic, which no word used
/// in this crate comes near.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElem {
    a: i64,
    b: i64,
    c: i64,
    d: i64,
}

impl GroupElem {
    pub const IDENTITY: GroupElem = GroupElem::raw(1, 0, 0, 1);
    pub const NEG_IDENTITY: GroupElem = GroupElem::raw(-1, 0, 0, -1);
    /// `R = (0 −1; 1 1)`, of order 3 in PSL(2,Z).
    pub const R: GroupElem = GroupElem::raw(0, -1, 1, 1);
    pub const R_INV: GroupElem = GroupElem::raw(1, 1, -1, 0);
    /// `S = (0 −1; 1 0)`.
    pub const S: GroupElem = GroupElem::raw(0, -1, 1, 0);
    /// `T = (1 1; 0 1)`; `R = S·T`.
    pub const T: GroupElem = GroupElem::raw(1, 1, 0, 1);

    const fn raw(a: i64, b: i64, c: i64, d: i64) -> Self {
        GroupElem { a, b, c, d }
    }

    pub fn new(a: i64, b: i64, c: i64, d: i64) -> Result<Self, GroupError> {
        let det = a * d - b * c;
        if det != 1 {
            return Err(GroupError::NotUnimodular { a, b, c, d, det });
        }
        Ok(GroupElem { a, b, c, d })
    }

    pub fn entries(&self) -> [i64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn a(&self) -> i64 {
        self.a
    }
    pub fn b(&self) -> i64 {
        self.b
    }
    pub fn c(&self) -> i64 {
        self.c
    }
    pub fn d(&self) -> i64 {
        self.d
    }

    pub fn inverse(&self) -> Self {
        GroupElem::raw(self.d, -self.b, -self.c, self.a)
    }

    pub fn neg(&self) -> Self {
        GroupElem::raw(-self.a, -self.b, -self.c, -self.d)
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(GroupElem::IDENTITY, |acc, _| acc * *self)
    }

    /// Equality in PSL(2,Z).
    pub fn eq_up_to_sign(&self, other: &GroupElem) -> bool {
        self == other || self.neg() == *other
    }

    /// `T^n`.
    pub fn translation(n: i64) -> Self {
        GroupElem::raw(1, n, 0, 1)
    }

    /// Möbius action `(az + b)/(cz + d)`.
    pub fn mobius(&self, z: Complex64) -> Complex64 {
        let num = z * self.a as f64 + self.b as f64;
        let den = z * self.c as f64 + self.d as f64;
        num / den
    }

    /// `cz + d`, the automorphy factor.
    pub fn automorphy(&self, z: Complex64) -> Complex64 {
        z * self.c as f64 + self.d as f64
    }
}

impl Mul for GroupElem {
    type Output = GroupElem;
    fn mul(self, o: GroupElem) -> GroupElem {
        let m = |x: i64, y: i64, u: i64, v: i64| {
            x.checked_mul(y)
                .and_then(|p| u.checked_mul(v).and_then(|q| p.checked_add(q)))
                .expect("SL(2,Z) entry overflow")
        };
        GroupElem::raw(
            m(self.a, o.a, self.b, o.c),
            m(self.a, o.b, self.b, o.d),
            m(self.c, o.a, self.d, o.c),
            m(self.c, o.b, self.d, o.d),
        )
    }
}

impl fmt::Display for GroupElem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {}; {}, {})", self.a, self.b, self.c, self.d)
    }
}

/// Möbius action of `g` on `z`; `Im z > 0` implies the result has `Im > 0`.
pub fn mobius(g: &GroupElem, z: Complex64) -> Complex64 {
    g.mobius(z)
}

fn cong(x: i64, y: i64, n: i64) -> bool {
    (x - y).rem_euclid(n) == 0
}

/// Γ(n): `a ≡ d ≡ 1`, `b ≡ c ≡ 0 (mod n)`.
pub fn in_gamma(g: &GroupElem, n: i64) -> bool {
    cong(g.a, 1, n) && cong(g.d, 1, n) && cong(g.b, 0, n) && cong(g.c, 0, n)
}

/// Γ⁰(n): `b ≡ 0 (mod n)`.
pub fn in_gamma_upper0(g: &GroupElem, n: i64) -> bool {
    cong(g.b, 0, n)
}

/// Γ¹(n): in Γ⁰(n) with `a ≡ d ≡ 1 (mod n)`.
pub fn in_gamma_upper1(g: &GroupElem, n: i64) -> bool {
    in_gamma_upper0(g, n) && cong(g.a, 1, n) && cong(g.d, 1, n)
}

/// Membership in `K = ⟨−I, Γ¹(15)⟩`.
pub fn in_k(g: &GroupElem) -> bool {
    in_gamma_upper1(g, LEVEL) || in_gamma_upper1(&g.neg(), LEVEL)
}

/// A generator letter.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Letter {
    R,
    RInv,
    S,
}

impl Letter {
    pub fn matrix(self) -> GroupElem {
        match self {
            Letter::R => GroupElem::R,
            Letter::RInv => GroupElem::R_INV,
            Letter::S => GroupElem::S,
        }
    }

    /// Inverse letter in PSL(2,Z) (`S⁻¹ = −S` is written `S`).
    pub fn inverse(self) -> Letter {
        match self {
            Letter::R => Letter::RInv,
            Letter::RInv => Letter::R,
            Letter::S => Letter::S,
        }
    }

    pub fn to_char(self) -> char {
        match self {
            Letter::R => 'R',
            Letter::RInv => 'r',
            Letter::S => 'S',
        }
    }

    pub fn is_rotation(self) -> bool {
        !matches!(self, Letter::S)
    }
}

/// A word in `R`, `R⁻¹` and `S`. Compact notation writes `R⁻¹` as `r`.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct Word {
    letters: Vec<Letter>,
}

impl Word {
    pub fn new(letters: Vec<Letter>) -> Self {
        Word { letters }
    }

    pub fn empty() -> Self {
        Word::default()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word { letters }
    }

    /// Inverse word in PSL(2,Z).
    pub fn inverse(&self) -> Word {
        Word::new(self.letters.iter().rev().map(|l| l.inverse()).collect())
    }

    /// True when letters alternate between `S` and `R^{±1}`.
    pub fn is_alternating(&self) -> bool {
        self.letters
            .windows(2)
            .all(|w| w[0].is_rotation() != w[1].is_rotation())
    }

    /// Rewrites the word into alternating form using `S² = −I`, `R³ = −I`
    /// and `R² = −R⁻¹` (signs dropped, since the tree only sees PSL(2,Z)).
    pub fn normalize(&self) -> Word {
        // Exponent of R tracked mod 3 inside each rotation block.
        let mut out: Vec<Letter> = Vec::new();
        for &l in &self.letters {
            out.push(l);
            loop {
                let n = out.len();
                if n >= 2 && out[n - 1] == Letter::S && out[n - 2] == Letter::S {
                    out.truncate(n - 2);
                    continue;
                }
                if n >= 2 && out[n - 1].is_rotation() && out[n - 2].is_rotation() {
                    let e = rot_exp(out[n - 1]) + rot_exp(out[n - 2]);
                    out.truncate(n - 2);
                    match e.rem_euclid(3) {
                        1 => out.push(Letter::R),
                        2 => out.push(Letter::RInv),
                        _ => {}
                    }
                    continue;
                }
                break;
            }
        }
        Word::new(out)
    }

    /// Left-to-right matrix product; the empty word is the identity.
    pub fn eval(&self) -> GroupElem {
        word_eval(self)
    }
}

fn rot_exp(l: Letter) -> i32 {
    match l {
        Letter::R => 1,
        Letter::RInv => -1,
        Letter::S => 0,
    }
}

/// Product of the letters in written order.
pub fn word_eval(w: &Word) -> GroupElem {
    w.letters
        .iter()
        .fold(GroupElem::IDENTITY, |acc, l| acc * l.matrix())
}

impl FromStr for Word {
    type Err = GroupError;

    /// Accepts the compact form (`rSRSR`), `R^{-1}`/`R^-1` spellings, and `1`
    /// or the empty string for the identity.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() || s == "1" {
            return Ok(Word::empty());
        }
        let chars: Vec<char> = s.chars().collect();
        let mut letters = Vec::new();
        let mut i = 0;
        while i < chars.len() {
            match chars[i] {
                'S' => letters.push(Letter::S),
                'r' => letters.push(Letter::RInv),
                'R' => {
                    let rest: String = chars[i + 1..].iter().collect();
                    if let Some(skip) = ["^{-1}", "^-1", "⁻¹"]
                        .iter()
                        .find(|p| rest.starts_with(**p))
                        .map(|p| p.chars().count())
                    {
                        letters.push(Letter::RInv);
                        i += skip;
                    } else {
                        letters.push(Letter::R);
                    }
                }
                ' ' | '·' | '*' => {}
                other => {
                    return Err(GroupError::BadLetter {
                        letter: other,
                        position: i,
                    })
                }
            }
            i += 1;
        }
        Ok(Word::new(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.letters {
            write!(f, "{}", l.to_char())?;
        }
        Ok(())
    }
}

/// The element `A = (RSRSR)^4`, written with 17 alternating letters.
pub fn word_a() -> Word {
    "RSRSrSRSrSRSrSRSR".parse().expect("static word")
}

/// `A = (0 −1; 1 3)^4 = (−8 −21; 21 55)`.
pub fn element_a() -> GroupElem {
    GroupElem::raw(0, -1, 1, 3).pow(4)
}

/// Invariant of the right coset `K·g`: the first row of `g` mod 15, up to sign.
///
/// For `k ∈ Γ¹(15)` the first row of `k` is `(1, 0) mod 15`, so `k·g` and `g`
/// share their first row mod 15.
pub fn coset_key(g: &GroupElem) -> (i64, i64) {
    let p = (g.a.rem_euclid(LEVEL), g.b.rem_euclid(LEVEL));
    let n = ((-g.a).rem_euclid(LEVEL), (-g.b).rem_euclid(LEVEL));
    p.min(n)
}

/// One row of the coset table.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CosetRow {
    pub n: usize,
    pub matrix: GroupElem,
    pub word: Word,
    pub n_r: usize,
    pub n_s: usize,
}

/// The 96 coset representatives `P_n` with their words and the action columns.
#[derive(Clone, Debug)]
pub struct CosetTable {
    rows: Vec<CosetRow>,
    r_inv_perm: Vec<usize>,
    by_key: BTreeMap<(i64, i64), usize>,
}

const EMBEDDED_TABLE: &str = include_str!("../data/cosets.csv");

impl CosetTable {
    /// The table compiled into the crate.
    pub fn embedded() -> Self {
        CosetTable::parse(EMBEDDED_TABLE).expect("embedded coset table is well formed")
    }

    /// Parses `n,a,b,c,d,word,nR,nS` rows (header line optional).
    pub fn parse(text: &str) -> Result<Self, GroupError> {
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || line.starts_with("n,") {
                continue;
            }
            let bad = |reason: &str| GroupError::Table {
                line: line_no,
                reason: reason.into(),
            };
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 8 {
                return Err(bad("expected 8 comma-separated fields"));
            }
            let int = |s: &str| s.parse::<i64>().map_err(|_| bad("bad integer"));
            let idx = |s: &str| s.parse::<usize>().map_err(|_| bad("bad index"));
            let n = idx(fields[0])?;
            let matrix = GroupElem::new(
                int(fields[1])?,
                int(fields[2])?,
                int(fields[3])?,
                int(fields[4])?,
            )
            .map_err(|_| bad("matrix is not in SL(2,Z)"))?;
            let word: Word = fields[5].parse().map_err(|_| bad("bad word"))?;
            rows.push(CosetRow {
                n,
                matrix,
                word,
                n_r: idx(fields[6])?,
                n_s: idx(fields[7])?,
            });
        }
        if rows.len() != INDEX {
            return Err(GroupError::Table {
                line: 0,
                reason: alloc::format!("expected {INDEX} rows, found {}", rows.len()),
            });
        }
        for (i, row) in rows.iter().enumerate() {
            if row.n != i + 1 || !(1..=INDEX).contains(&row.n_r) || !(1..=INDEX).contains(&row.n_s)
            {
                return Err(GroupError::Table {
                    line: i + 1,
                    reason: "row numbers must run 1..=96 in order".into(),
                });
            }
        }
        let mut r_inv_perm = vec![0; INDEX + 1];
        for row in &rows {
            r_inv_perm[row.n_r] = row.n;
        }
        let by_key = rows.iter().map(|r| (coset_key(&r.matrix), r.n)).collect();
        Ok(CosetTable {
            rows,
            r_inv_perm,
            by_key,
        })
    }

    pub fn rows(&self) -> &[CosetRow] {
        &self.rows
    }

    pub fn row(&self, n: usize) -> Result<&CosetRow, GroupError> {
        n.checked_sub(1)
            .and_then(|i| self.rows.get(i))
            .ok_or(GroupError::BadIndex(n))
    }

    /// `P_n`.
    pub fn rep(&self, n: usize) -> GroupElem {
        self.rows[n - 1].matrix
    }

    /// The unique `n` with `g·P_n⁻¹ ∈ K`, by direct membership tests.
    pub fn coset_index(&self, g: &GroupElem) -> usize {
        self.rows
            .iter()
            .find(|r| in_k(&(*g * r.matrix.inverse())))
            .map(|r| r.n)
            .expect("the table rows partition SL(2,Z)")
    }

    /// Same as [`coset_index`](Self::coset_index) through the first-row key.
    pub fn coset_index_fast(&self, g: &GroupElem) -> usize {
        self.by_key[&coset_key(g)]
    }

    /// Next index after applying one letter, read from the table columns.
    pub fn step(&self, n: usize, l: Letter) -> usize {
        let row = &self.rows[n - 1];
        match l {
            Letter::R => row.n_r,
            Letter::S => row.n_s,
            Letter::RInv => self.r_inv_perm[n],
        }
    }

    /// Folds the letters of `w` through the nR/nS columns.
    pub fn avatar_apply(&self, n: usize, w: &Word) -> usize {
        w.letters().iter().fold(n, |k, &l| self.step(k, l))
    }

    /// `P_n·g·P_n⁻¹ ∈ K`, i.e. `Z_n^g = Z_n`.
    pub fn verify_stabilizer(&self, n: usize, g: &GroupElem) -> bool {
        let p = self.rep(n);
        in_k(&(p * *g * p.inverse()))
    }

    fn r_perm(&self) -> Vec<usize> {
        core::iter::once(0)
            .chain(self.rows.iter().map(|r| r.n_r))
            .collect()
    }

    fn s_perm(&self) -> Vec<usize> {
        core::iter::once(0)
            .chain(self.rows.iter().map(|r| r.n_s))
            .collect()
    }

    /// Full validation of the table against the group.
    pub fn verify(&self) -> TableReport {
        let rows: Vec<RowCheck> = self
            .rows
            .iter()
            .map(|row| {
                let w = word_eval(&row.word);
                RowCheck {
                    n: row.n,
                    word_ok: w.eq_up_to_sign(&row.matrix),
                    word_sign_flipped: w != row.matrix && w.eq_up_to_sign(&row.matrix),
                    n_r_ok: self.coset_index(&(row.matrix * GroupElem::R)) == row.n_r,
                    n_s_ok: self.coset_index(&(row.matrix * GroupElem::S)) == row.n_s,
                    chase_ok: self.avatar_apply(1, &row.word) == row.n,
                }
            })
            .collect();
        let r = self.r_perm();
        let s = self.s_perm();
        let enumeration = coset_enumerate(10 * INDEX);
        let enumeration_bijection = match &enumeration {
            Ok(e) => {
                let mut hit = [false; INDEX + 1];
                e.reps.len() == INDEX
                    && e.reps.iter().all(|g| {
                        let k = self.coset_index(g);
                        !core::mem::replace(&mut hit[k], true)
                    })
            }
            Err(_) => false,
        };
        let distinct = (0..INDEX).all(|i| {
            (i + 1..INDEX).all(|j| !in_k(&(self.rows[i].matrix * self.rows[j].matrix.inverse())))
        });
        TableReport {
            rows,
            r_is_permutation: is_permutation(&r),
            s_is_permutation: is_permutation(&s),
            s_squared_identity: compose_power(&s, 2),
            r_cubed_identity: compose_power(&r, 3),
            enumerated_cosets: enumeration.as_ref().map(|e| e.reps.len()).unwrap_or(0),
            enumeration_bijection,
            representatives_distinct: distinct,
            a_fixes_41: self.verify_stabilizer(41, &element_a()),
        }
    }
}

fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter()
        .skip(1)
        .all(|&k| (1..p.len()).contains(&k) && !core::mem::replace(&mut seen[k], true))
}

fn compose_power(p: &[usize], k: usize) -> bool {
    (1..p.len()).all(|n| (0..k).fold(n, |m, _| p[m]) == n)
}

/// Per-row verification outcome.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RowCheck {
    pub n: usize,
    /// `word_eval(w_n) = ±P_n`.
    pub word_ok: bool,
    /// The word evaluates to `−P_n` rather than `P_n`.
    pub word_sign_flipped: bool,
    pub n_r_ok: bool,
    pub n_s_ok: bool,
    /// `avatar_apply(1, w_n) = n`.
    pub chase_ok: bool,
}

impl RowCheck {
    pub fn ok(&self) -> bool {
        self.word_ok && self.n_r_ok && self.n_s_ok && self.chase_ok
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TableReport {
    pub rows: Vec<RowCheck>,
    pub r_is_permutation: bool,
    pub s_is_permutation: bool,
    pub s_squared_identity: bool,
    pub r_cubed_identity: bool,
    pub enumerated_cosets: usize,
    pub enumeration_bijection: bool,
    pub representatives_distinct: bool,
    pub a_fixes_41: bool,
}

impl TableReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(RowCheck::ok)
            && self.r_is_permutation
            && self.s_is_permutation
            && self.s_squared_identity
            && self.r_cubed_identity
            && self.enumerated_cosets == INDEX
            && self.enumeration_bijection
            && self.representatives_distinct
            && self.a_fixes_41
    }
}

/// Result of the breadth-first coset enumeration.
#[derive(Clone, Debug)]
pub struct CosetEnumeration {
    /// BFS-first representative of each coset, in discovery order.
    pub reps: Vec<GroupElem>,
    /// `r_perm[i]` is the coset of `reps[i]·R` (0-based).
    pub r_perm: Vec<usize>,
    pub s_perm: Vec<usize>,
}

/// Closes `{K·I}` under right multiplication by `R` and `S`, identifying
/// `g ~ h` iff `g·h⁻¹ ∈ K`. Independent of the embedded table.
pub fn coset_enumerate(cap: usize) -> Result<CosetEnumeration, GroupError> {
    let mut reps = vec![GroupElem::IDENTITY];
    let mut r_perm: Vec<Option<usize>> = vec![None];
    let mut s_perm: Vec<Option<usize>> = vec![None];
    let find =
        |reps: &[GroupElem], g: &GroupElem| reps.iter().position(|h| in_k(&(*g * h.inverse())));
    let mut head = 0;
    while head < reps.len() {
        for gen in [GroupElem::R, GroupElem::S] {
            let g = reps[head] * gen;
            let target = match find(&reps, &g) {
                Some(k) => k,
                None => {
                    if reps.len() >= cap {
                        return Err(GroupError::NonClosure {
                            visited: reps.len(),
                        });
                    }
                    reps.push(g);
                    r_perm.push(None);
                    s_perm.push(None);
                    reps.len() - 1
                }
            };
            if gen == GroupElem::R {
                r_perm[head] = Some(target);
            } else {
                s_perm[head] = Some(target);
            }
        }
        head += 1;
    }
    Ok(CosetEnumeration {
        reps,
        r_perm: r_perm.into_iter().map(|x| x.expect("closed")).collect(),
        s_perm: s_perm.into_iter().map(|x| x.expect("closed")).collect(),
    })
}
