//! Acceptance suite: one PASS/FAIL line per criterion, with timings.
//!
//! Criteria that fail for a documented reason (a value the source gets wrong,
//! or a tolerance the stated estimator cannot reach) are printed as FAIL with
//! the analysis and listed as known deviations; the process exits nonzero
//! only when some other criterion fails.

use num_complex::Complex64;
use rootbias::archimedean::{p_k, p_k_quadrature};
use rootbias::basefield::{self, FieldTag};
use rootbias::bias::{bias_closed, bias_general, sqrt5_coefficient, SQRT5_PRINTED_COEFFICIENT_3_MOD_8};
use rootbias::localweights::unram_local_factor;
use rootbias::quadarith::{class_number_imag, field_discriminant, is_squarefree, squarefree_kernel};
use rootbias::supercuspidal::{
    char_sum_check_exact, coset_element, f_b_tilde_bruteforce_coords, f_b_tilde_closed, hecke_root_number, Cyclo,
    SupercuspidalParams,
};
use rootbias::zagier::{euler_correction, zagier_l_factored, zagier_l_truncated};
use serde_json::{json, Value};
use std::process::ExitCode;
use std::time::Instant;

struct Outcome {
    pass: bool,
    detail: String,
    /// Set when a failure is explained in the decisions ledger.
    known_deviation: bool,
    /// Machine-readable results feeding the determinism check.
    record: Value,
}

impl Outcome {
    fn new(pass: bool, detail: String, record: Value) -> Self {
        Outcome { pass, detail, known_deviation: false, record }
    }
}

fn criterion_1() -> Outcome {
    let mut bad = Vec::new();
    let mut rec = Vec::new();
    for k in 1..=8u32 {
        let b = bias_general(FieldTag::Q, &[k], 2).unwrap().b;
        let expect = if k % 4 >= 2 { 1 } else { 0 };
        if b != expect {
            bad.push(format!("N=2 k={k}: {b} != {expect}"));
        }
        rec.push(json!({"level": 2, "k": k, "b": b}));
    }
    for k in 1..=9u32 {
        let b = bias_general(FieldTag::Q, &[k], 3).unwrap().b;
        let expect = if k % 3 == 2 { 2 } else { 1 };
        if b != expect {
            bad.push(format!("N=3 k={k}: {b} != {expect}"));
        }
        rec.push(json!({"level": 3, "k": k, "b": b}));
    }
    let detail = if bad.is_empty() { "17 table entries reproduced".into() } else { bad.join("; ") };
    Outcome::new(bad.is_empty(), detail, Value::Array(rec))
}

fn criterion_2() -> Outcome {
    let mut bad = Vec::new();
    let mut rec = Vec::new();
    let mut count = 0;
    for n in (5..=50u64).filter(|&n| is_squarefree(n)) {
        for k in [1u32, 3] {
            let general = bias_general(FieldTag::Q, &[k], n).unwrap();
            let phi = basefield::euler_phi_f(FieldTag::Q, n).unwrap() as i64;
            let h = |m: i64| class_number_imag(m).unwrap() as i64;
            let closed = match n % 8 {
                7 => h(-(n as i64)) * phi,
                3 => 2 * h(-(n as i64)) * phi,
                _ => h(-4 * n as i64) * phi / 2,
            };
            if general.b != closed {
                bad.push(format!("N={n} k={k}: {} != {closed}", general.b));
            }
            count += 1;
            rec.push(json!({"level": n, "k": k, "b": general.b, "closed": closed}));
        }
    }
    let detail = if bad.is_empty() { format!("{count} (N, k) pairs equal") } else { bad.join("; ") };
    Outcome::new(bad.is_empty(), detail, Value::Array(rec))
}

fn h_minus(m: u64) -> i64 {
    class_number_imag(field_discriminant(squarefree_kernel(-(m as i64)))).unwrap() as i64
}

fn class_table(tag: FieldTag, level: u64, expect: impl Fn(u32, u32) -> i64) -> (Vec<String>, Vec<Value>) {
    let mut bad = Vec::new();
    let mut rec = Vec::new();
    for k1 in 1..=6u32 {
        for k2 in 1..=6u32 {
            let b = bias_general(tag, &[k1, k2], level).unwrap().b;
            let e = expect(k1, k2);
            if b != e {
                bad.push(format!("{tag} N={level} k=({k1},{k2}): {b} != {e}"));
            }
            rec.push(json!({"field": tag.name(), "level": level, "k": [k1, k2], "b": b}));
        }
    }
    (bad, rec)
}

fn criterion_3() -> Outcome {
    let low3 = |k: u32| k % 3 != 2;
    let (mut bad, mut rec) = class_table(FieldTag::Qsqrt2, 3, |a, b| match (low3(a), low3(b)) {
        (false, false) => 12,
        (true, true) => 13,
        _ => 14,
    });
    for n in [3u64, 5, 7, 11, 13] {
        for k in [[1u32, 1], [2, 3], [5, 4]] {
            let general = bias_general(FieldTag::Qsqrt2, &k, n).unwrap().b;
            let closed = bias_closed(FieldTag::Qsqrt2, &k, n).unwrap();
            if general != closed {
                bad.push(format!("N={n} k={k:?}: {general} != {closed}"));
            }
            rec.push(json!({"level": n, "k": k, "b": general, "closed": closed}));
        }
    }
    let detail = if bad.is_empty() {
        "weight classes at N=3 give {12,13,14}; general = closed for N in {3,5,7,11,13}".into()
    } else {
        bad.join("; ")
    };
    Outcome::new(bad.is_empty(), detail, Value::Array(rec))
}

fn criterion_4() -> Outcome {
    let low4 = |k: u32| k % 4 <= 1;
    let low3 = |k: u32| k % 3 != 2;
    let (mut bad, mut rec) = class_table(FieldTag::Qsqrt5, 2, |a, b| if low4(a) == low4(b) { 1 } else { 2 });
    let (bad3, rec3) = class_table(FieldTag::Qsqrt5, 3, |a, b| match (low3(a), low3(b)) {
        (false, false) => 4,
        (true, true) => 5,
        _ => 6,
    });
    bad.extend(bad3);
    rec.extend(rec3);
    let mut notes = Vec::new();
    let mut deviation = false;
    for n in [2u64, 3, 7, 11] {
        let k = [1u32, 2];
        let general = bias_general(FieldTag::Qsqrt5, &k, n).unwrap().b;
        // closed form with the coefficient exactly as printed
        let printed = if n > 3 {
            let base = basefield::euler_phi_f(FieldTag::Qsqrt5, n).unwrap() as i64 * h_minus(n) * h_minus(5 * n);
            let (num, den) = if n % 8 == 3 {
                SQRT5_PRINTED_COEFFICIENT_3_MOD_8
            } else {
                let c = sqrt5_coefficient(n);
                (*c.numer(), *c.denom())
            };
            base * num / den
        } else {
            bias_closed(FieldTag::Qsqrt5, &k, n).unwrap()
        };
        let corrected = bias_closed(FieldTag::Qsqrt5, &k, n).unwrap();
        if general != printed {
            deviation = true;
            notes.push(format!(
                "N={n}: general {general} != printed closed form {printed}; with coefficient 1 for N = 3 mod 8 the closed form is {corrected}"
            ));
        }
        rec.push(json!({"level": n, "k": k, "b": general, "printed": printed, "corrected": corrected}));
    }
    let pass = bad.is_empty() && !deviation;
    let mut detail = if bad.is_empty() {
        "tables {1,2} at N=2 and {4,5,6} at N=3 reproduced".to_string()
    } else {
        bad.join("; ")
    };
    if !notes.is_empty() {
        detail = format!("{detail}; {}", notes.join("; "));
    }
    let mut out = Outcome::new(pass, detail, Value::Array(rec));
    out.known_deviation = bad.is_empty() && deviation;
    out
}

fn criterion_5() -> Outcome {
    let deltas = [5i64, 8, 12, 13, -3, -4, -8, -20, 45, -48];
    let mut worst_raw: f64 = 0.0;
    let mut worst_corr: f64 = 0.0;
    let mut raw_failures = Vec::new();
    let mut rec = Vec::new();
    for &d in &deltas {
        for s in [1.5f64, 2.0, 3.0] {
            let f = zagier_l_factored(Complex64::new(s, 0.0), d).unwrap().re;
            let t = zagier_l_truncated(s, d, 100_000).unwrap();
            let raw = ((f - t.raw) / f).abs();
            let corr = ((f - t.corrected) / f).abs();
            worst_raw = worst_raw.max(raw);
            worst_corr = worst_corr.max(corr);
            if raw >= 1e-3 {
                raw_failures.push(format!("({d}, {s}) {raw:.2e}"));
            }
            rec.push(json!({"delta": d, "s": s, "factored": f, "truncated": t.raw, "corrected": t.corrected}));
        }
    }
    let pass = raw_failures.is_empty();
    let detail = format!(
        "max rel. error of the partial sum {worst_raw:.2e}{}; tail-corrected estimate max {worst_corr:.2e}",
        if pass { String::new() } else { format!(" (over 1e-3 at {})", raw_failures.join(", ")) }
    );
    let mut out = Outcome::new(pass, detail, Value::Array(rec));
    out.known_deviation = !pass && worst_corr < 1e-3;
    out
}

fn criterion_6() -> Outcome {
    // deterministic pseudo-random tuples from a fixed linear congruential stream
    let mut state: u64 = 0x2545_F491_4F6C_DD1D;
    let mut next = || {
        state = state.wrapping_mul(6_364_136_223_846_793_005).wrapping_add(1_442_695_040_888_963_407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    let qs = [2u64, 3, 4, 5, 7, 9, 11, 13, 25, 49];
    let mut worst: f64 = 0.0;
    let mut rec = Vec::new();
    for _ in 0..10 {
        let q = qs[(next() * qs.len() as f64) as usize];
        let a = (next() * 5.0) as u32;
        let eta = (next() * 3.0) as i32 - 1;
        let s = Complex64::new(next() * 3.0 - 1.5, next() * 4.0 - 2.0);
        let lhs = unram_local_factor(q, a, eta, s).unwrap();
        let rhs = euler_correction(q as f64, a, eta, s + 0.5);
        let rel = (lhs - rhs).norm() / lhs.norm().max(rhs.norm());
        worst = worst.max(rel);
        rec.push(json!({"q": q, "a": a, "eta": eta, "s": [s.re, s.im], "value": [lhs.re, lhs.im]}));
    }
    Outcome::new(worst < 1e-12, format!("10 tuples, max relative difference {worst:.2e}"), Value::Array(rec))
}

fn criterion_7() -> Outcome {
    let mut worst0: f64 = 0.0;
    for k in 1..=10 {
        worst0 = worst0.max(p_k(k, Complex64::new(0.0, 0.0)).unwrap().norm());
    }
    let mut worst_q: f64 = 0.0;
    let mut rec = Vec::new();
    for k in 1..=3 {
        for s in [1.5, 2.0] {
            let s = Complex64::new(s, 0.0);
            let (quad, x) = p_k_quadrature(k, s, 1e-8).unwrap();
            let exact = p_k(k, s).unwrap();
            worst_q = worst_q.max((quad - exact).norm());
            rec.push(json!({"k": k, "s": s.re, "p_k": exact.re, "quadrature": quad.re, "x_max": x}));
        }
    }
    Outcome::new(
        worst0 < 1e-12 && worst_q < 1e-6,
        format!("max |P_k(0)| = {worst0:.2e}; max quadrature gap {worst_q:.2e}"),
        Value::Array(rec),
    )
}

fn criterion_8() -> Outcome {
    let mut bad = Vec::new();
    let mut classes = 0;
    let mut rec = Vec::new();
    for p in [3u64, 5, 7] {
        for x1 in 1..p {
            for r1 in 0..p {
                for r2 in 0..p {
                    let avg = f_b_tilde_bruteforce_coords(p, x1, r1, r2).unwrap();
                    let closed = f_b_tilde_closed(&coset_element(p, x1 as i64, r1 as i64, r2 as i64, 1));
                    if avg.total != Cyclo::integer(p, closed * avg.representatives as i64) {
                        bad.push(format!("f~ at p={p} ({x1},{r1},{r2})"));
                    }
                    classes += 1;
                }
            }
            rec.push(json!({"p": p, "x1": x1, "checked": true}));
        }
        for t in 1..p {
            for zeta in [1, -1] {
                let eps = hecke_root_number(&SupercuspidalParams::new(p, t, zeta).unwrap()).unwrap();
                if eps != zeta {
                    bad.push(format!("root number p={p} t={t} zeta={zeta}: {eps}"));
                }
                rec.push(json!({"p": p, "t": t, "zeta": zeta, "epsilon": eps}));
            }
        }
        for c in 1..p {
            if char_sum_check_exact(p, c).unwrap() != Cyclo::integer(p, -1) {
                bad.push(format!("character sum p={p} c={c}"));
            }
        }
    }
    let detail = if bad.is_empty() {
        format!("{classes} Iwahori classes exact; root numbers equal zeta; character sums -1")
    } else {
        bad.join("; ")
    };
    Outcome::new(bad.is_empty(), detail, Value::Array(rec))
}

type Criterion = (u32, &'static str, f64, fn() -> Outcome);

const CRITERIA: [Criterion; 8] = [
    (1, "bias over Q at N = 2, 3", 1.0, criterion_1),
    (2, "bias over Q equals class-number closed form, 5 <= N <= 50", 10.0, criterion_2),
    (3, "bias over Q(sqrt 2)", 10.0, criterion_3),
    (4, "bias over Q(sqrt 5)", 10.0, criterion_4),
    (5, "Zagier L: factored vs truncated at Q = 1e5", 30.0, criterion_5),
    (6, "unramified local factor equals Euler correction", f64::INFINITY, criterion_6),
    (7, "P_k vanishing and quadrature oracle", f64::INFINITY, criterion_7),
    (8, "supercuspidal identities", 30.0, criterion_8),
];

fn run_all() -> (Vec<(u32, &'static str, Outcome, f64, f64)>, String) {
    let mut out = Vec::new();
    let mut records = serde_json::Map::new();
    for (id, name, limit, f) in CRITERIA {
        let start = Instant::now();
        let o = f();
        let secs = start.elapsed().as_secs_f64();
        records.insert(format!("criterion_{id}"), o.record.clone());
        out.push((id, name, o, secs, limit));
    }
    (out, serde_json::to_string(&Value::Object(records)).expect("serializable"))
}

fn main() -> ExitCode {
    let (first, json_a) = run_all();
    let (_, json_b) = run_all();
    let mut unexpected = 0;
    let mut known = 0;
    for (id, name, o, secs, limit) in &first {
        let in_time = *secs < *limit;
        let pass = o.pass && in_time;
        let timing = if limit.is_finite() { format!("{secs:.2}s, limit {limit:.0}s") } else { format!("{secs:.2}s") };
        let tag = if pass {
            "PASS"
        } else if o.known_deviation && in_time {
            known += 1;
            "FAIL (documented deviation)"
        } else {
            unexpected += 1;
            "FAIL"
        };
        println!("{tag} [{id}] {name}: {} ({timing})", o.detail);
    }
    let same = json_a == json_b;
    if same {
        println!("PASS [9] determinism: two full runs produced byte-identical JSON ({} bytes)", json_a.len());
    } else {
        unexpected += 1;
        println!("FAIL [9] determinism: the two runs differ");
    }
    println!("acceptance: {} criteria, {known} documented deviation(s), {unexpected} unexpected failure(s)", first.len() + 1);
    if unexpected == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
