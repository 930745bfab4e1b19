//! JSON shapes for everything the CLI prints.

use avatar_core::eta_engine::Residuals;
use avatar_core::exactquad::IdentityCheck;
use avatar_core::sl2z::TableReport;
use avatar_core::tracer::{describe_failure, FixingReport};
use avatar_core::treepath::{CPoint, PoleScan};
use num_complex::Complex64;
use serde_json::{json, Value};

use crate::{ExperimentRun, TimedTrace};

pub fn complex(z: Complex64) -> Value {
    json!({ "re": z.re, "im": z.im })
}

pub fn identities(checks: &[IdentityCheck]) -> Value {
    checks
        .iter()
        .map(|c| json!({ "identity": c.name, "ok": c.ok }))
        .collect()
}

/// The residuals that must stay below the tolerance; the other two fields
/// are diagnostics (the unselected root and the claimed Ψ denominator).
pub fn gated_residual(r: &Residuals) -> f64 {
    [
        r.quadratic,
        r.b_relation,
        r.quartic,
        r.lambda_relation,
        r.tau5_relation,
        r.psi_square,
        r.cubic,
    ]
    .into_iter()
    .fold(0.0, f64::max)
}

pub fn residuals(r: &Residuals) -> Value {
    json!({
        "quadratic": r.quadratic,
        "b_relation": r.b_relation,
        "b_relation_other_root": r.b_relation_other_root,
        "quartic": r.quartic,
        "lambda_relation": r.lambda_relation,
        "tau5_relation": r.tau5_relation,
        "psi_square": r.psi_square,
        "psi_square_claimed_denominator": r.psi_square_claimed_denominator,
        "cubic": r.cubic,
        "max_gated": gated_residual(r),
    })
}

pub fn coset_report(r: &TableReport) -> Value {
    let failing: Vec<Value> = r
        .rows
        .iter()
        .filter(|row| !row.ok())
        .map(|row| {
            json!({
                "n": row.n,
                "word_ok": row.word_ok,
                "n_r_ok": row.n_r_ok,
                "n_s_ok": row.n_s_ok,
                "chase_ok": row.chase_ok,
            })
        })
        .collect();
    json!({
        "rows": r.rows.len(),
        "rows_ok": r.rows.iter().filter(|row| row.ok()).count(),
        "sign_flipped_words": r.rows.iter().filter(|row| row.word_sign_flipped).count(),
        "failing_rows": failing,
        "enumerated_cosets": r.enumerated_cosets,
        "enumeration_bijection": r.enumeration_bijection,
        "representatives_distinct": r.representatives_distinct,
        "r_is_permutation": r.r_is_permutation,
        "s_is_permutation": r.s_is_permutation,
        "s_squared_identity": r.s_squared_identity,
        "r_cubed_identity": r.r_cubed_identity,
        "a_fixes_41": r.a_fixes_41,
        "all_ok": r.all_ok(),
    })
}

pub fn fixing(f: &FixingReport, tol: f64) -> Value {
    json!({
        "conjugate_in_k": f.exact,
        "control_in_k": f.control,
        "max_difference": f.max_difference,
        "ok": f.ok(tol),
    })
}

pub fn c_point(p: &CPoint) -> Value {
    json!({
        "theta_c": p.theta,
        "c": complex(p.c.z()),
        "j_c": complex(p.j),
        "j_target": p.j_target,
        "j_error": (p.j - p.j_target).norm(),
    })
}

pub fn pole_scan(s: &PoleScan) -> Value {
    json!({
        "max_modulus": s.max_modulus,
        "at_t": s.at_t,
        "samples": s.samples,
    })
}

/// One JSON-lines record per trace.
pub fn trace(t: &TimedTrace) -> Value {
    let m = t.entry.m;
    let wall = t.wall.as_secs_f64();
    match &t.entry.result {
        Ok(r) => json!({
            "m": m,
            "gamma_start": r.gamma_start,
            "end": complex(r.end),
            "matched": r.matched,
            "hit": t.entry.hit(),
            "nearest": r.nearest,
            "nearest_distance": r.nearest_distance,
            "second_distance": r.second_distance,
            "steps": r.steps,
            "rejected_steps": r.rejected_steps,
            "max_residual": r.max_residual,
            "max_abs_z41": r.max_abs_z41,
            "end_abs_z41": r.end_abs_z41,
            "wall_time_s": wall,
        }),
        Err(e) => json!({
            "m": m,
            "matched": Value::Null,
            "hit": false,
            "error": e.to_string(),
            "wall_time_s": wall,
        }),
    }
}

pub fn experiment(run: &ExperimentRun) -> Value {
    let summary = run.summary();
    let failures: Vec<Value> = summary
        .entries
        .iter()
        .filter_map(|e| describe_failure(e).map(|why| json!({ "m": e.m, "reason": why })))
        .collect();
    json!({
        "theta_c": run.theta_c,
        "reverse": run.reverse,
        "traces": run.traces.len(),
        "matches": summary.successes(),
        "failures": failures,
        "max_residual": summary.max_residual(),
        "pole_scan": pole_scan(&run.scan),
        "slowest_trace_s": run.slowest().as_secs_f64(),
        "wall_time_s": run.wall.as_secs_f64(),
    })
}
