//! Task execution. Each task is pure and yields one report plus a verdict.

use anyhow::{Context, Result};
use besov_core::classify::ClassifyOptions;
use besov_core::lab::{self, CONTRACTION_SLACK};
use besov_core::pick::PickOptions;
use besov_core::shift::semigroup_check;
use besov_core::{
    classify, kernel_coeffs, moment_sequence, pick_test, random_lower_triangular, random_nonincreasing_diagonal, shift, CMatrix, Grid, Precision,
    PickVerdict, ShiftBase,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::manifest::{build_symbol, build_symbols, Task, TaskSpec};

/// Shortest round-trip representation, so reruns are byte-identical.
pub fn num(x: f64) -> String {
    format!("{x}")
}

pub enum Report {
    Csv { header: Vec<String>, rows: Vec<Vec<String>> },
    Json(serde_json::Value),
}

pub struct Outcome {
    pub report: Report,
    /// Result of the task's own mathematical check, before any
    /// expected-negative inversion.
    pub check_passed: bool,
    pub detail: String,
}

#[derive(Clone, Copy)]
pub struct RunContext {
    pub seed: u64,
    pub precision: Precision,
}

fn csv(header: &[&str], rows: Vec<Vec<String>>, check_passed: bool, detail: String) -> Outcome {
    Outcome {
        report: Report::Csv {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows,
        },
        check_passed,
        detail,
    }
}

fn json(task: &Task, ctx: &RunContext, report: impl Serialize, check_passed: bool, detail: String) -> Result<Outcome> {
    #[derive(Serialize)]
    struct Envelope<'a, T> {
        id: &'a str,
        kind: &'a str,
        seed: u64,
        precision: Precision,
        check_passed: bool,
        report: T,
    }
    let v = serde_json::to_value(Envelope {
        id: &task.id,
        kind: task.spec.kind(),
        seed: ctx.seed,
        precision: ctx.precision,
        check_passed,
        report,
    })?;
    Ok(Outcome {
        report: Report::Json(v),
        check_passed,
        detail,
    })
}

pub fn run_task(task: &Task, ctx: &RunContext) -> Result<Outcome> {
    match &task.spec {
        TaskSpec::Moments(t) => {
            let v = t.weight.radial()?.line_density().clone();
            let seq = moment_sequence(&v, t.n_max)?;
            let rows = (0..seq.len())
                .map(|n| vec![n.to_string(), num(seq.values[n]), num(seq.log_values[n]), seq.sources[n].as_str().to_string()])
                .collect();
            let bad = seq.invariant_violations();
            let detail = if bad.is_empty() {
                format!("{} moments positive, decreasing, log-convex", seq.len())
            } else {
                bad.join("; ")
            };
            Ok(csv(&["n", "a_n", "ln_a_n", "source"], rows, bad.is_empty(), detail))
        }
        TaskSpec::Shift(t) => {
            let v = t.weight.radial()?.line_density().clone();
            let grid = Grid::dyadic(t.grid.t0, t.grid.k_max, t.grid.per_octave)?;
            match t.y {
                None => {
                    let vx = shift(v, t.x)?;
                    let mut ok = true;
                    let rows = grid
                        .points()
                        .iter()
                        .map(|p| {
                            let l = vx.ln_eval_pt(*p);
                            ok &= l.is_finite();
                            vec![num(p.t), num(l)]
                        })
                        .collect();
                    Ok(csv(&["t", "ln_v_x"], rows, ok, format!("v_x on {} points", grid.len())))
                }
                Some(y) => {
                    let r = semigroup_check(&ShiftBase::Density(v), t.x, y, &grid, t.tolerance)?;
                    let rows = r
                        .rows
                        .iter()
                        .map(|row| vec![num(row.t), num(row.ln_lhs), num(row.ln_rhs), num(row.ratio)])
                        .collect();
                    let detail = format!("semigroup max rel diff {:.3e} (tol {:e})", r.max_rel_diff, t.tolerance);
                    Ok(csv(&["t", "ln_nested", "ln_direct", "ratio"], rows, r.pass, detail))
                }
            }
        }
        TaskSpec::Kernel(t) => {
            let space = t.space.build(t.s, t.n_max, "space")?;
            let kc = kernel_coeffs(&space);
            let ok = kc.b.iter().all(|b| *b > 0.0 && b.is_finite());
            let rows = (0..kc.len())
                .map(|n| vec![n.to_string(), num(kc.b[n]), num(kc.ln_b[n])])
                .collect();
            Ok(csv(&["n", "b_n", "ln_b_n"], rows, ok, format!("{} coefficients of {}", kc.len(), space.label())))
        }
        TaskSpec::Classify(t) => {
            let v = t.weight.radial()?.line_density().clone();
            let r = classify(&v, &ClassifyOptions::default())?;
            let mut ok = true;
            let mut notes = vec![format!("doubling {}", r.doubling_verdict.as_str())];
            if let Some(want) = &t.expect_doubling {
                ok &= r.doubling_verdict.as_str() == want;
            }
            notes.push(match r.order_estimate {
                Some(o) => format!("order {o}"),
                None => "not weakly normal".to_string(),
            });
            if let Some(want) = t.expect_order {
                ok &= match (want < 0.0, r.order_estimate) {
                    (true, got) => got.is_none(),
                    (false, Some(got)) => (got - want).abs() <= t.order_tolerance,
                    (false, None) => false,
                };
            }
            json(task, ctx, &r, ok, notes.join(", "))
        }
        TaskSpec::Pick(t) => {
            let space = t.space.build(t.s, t.n, "space")?;
            let opts = PickOptions {
                n: t.n,
                precision: ctx.precision,
                ..PickOptions::default()
            };
            let r = pick_test(&space, &opts)?;
            let ok = matches!(r.verdict, PickVerdict::RawPick | PickVerdict::EquivalentPick);
            let detail = match r.raw.first_negative {
                Some(k) => format!("{} (raw kernel: first negative c_{k})", r.verdict.as_str()),
                None => r.verdict.as_str().to_string(),
            };
            json(task, ctx, &r, ok, detail)
        }
        TaskSpec::Kacnelson(t) => {
            let mut rows = Vec::with_capacity(t.instances);
            let mut violations = 0usize;
            let mut worst = 0.0f64;
            for i in 0..t.instances {
                let seed = ctx.seed.wrapping_add(i as u64);
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let dim = rng.random_range(1..=t.max_dim);
                let d = random_nonincreasing_diagonal(&mut rng, dim);
                let r = if t.block == 1 {
                    lab::kacnelson_conjugation(&random_lower_triangular(&mut rng, dim), &d, seed)
                } else {
                    let blocks: Vec<Vec<CMatrix>> = (0..t.block)
                        .map(|_| (0..t.block).map(|_| random_lower_triangular(&mut rng, dim)).collect())
                        .collect();
                    lab::kacnelson_block(&blocks, &d, seed)
                }
                .with_context(|| format!("instance {i}"))?;
                let pass = r.conjugated_norm <= r.norm * (1.0 + t.slack);
                if !pass {
                    violations += 1;
                }
                if r.norm > 0.0 {
                    worst = worst.max(r.conjugated_norm / r.norm);
                }
                rows.push(vec![i.to_string(), seed.to_string(), dim.to_string(), num(r.norm), num(r.conjugated_norm), pass.to_string()]);
            }
            let detail = format!("{violations} violations in {} instances, max ratio {worst:.6}", t.instances);
            Ok(csv(&["instance", "seed", "dim", "norm", "conjugated_norm", "pass"], rows, violations == 0, detail))
        }
        TaskSpec::Multnorm(t) => {
            let cap = t.n_list.iter().max().copied().unwrap_or(0);
            let dim = t.space.weight.as_ref().map(|w| w.dim).or(t.space.dim).unwrap_or(1);
            let phi = build_symbol(&t.symbol, dim, "symbol")?;
            let base = t.space.build(t.s, cap + phi.degree(), "space")?;
            let h = base.clone();
            let k = match t.t {
                Some(tt) => base.with_s(tt),
                None => base,
            };
            let mut rows = Vec::new();
            let mut ok = true;
            let mut prev = 0.0f64;
            for &n in &t.n_list {
                let m = lab::mult_matrix(&phi, &h, &k, n)?;
                let tri = m.is_graded_lower_triangular();
                let norm = lab::op_norm(&m.entries, ctx.seed)?;
                let mono = norm >= prev * (1.0 - CONTRACTION_SLACK);
                ok &= tri && mono;
                prev = prev.max(norm);
                rows.push(vec![n.to_string(), num(norm), tri.to_string(), mono.to_string()]);
            }
            let detail = format!("section norm {} at N={cap}", num(prev));
            Ok(csv(&["n", "norm", "triangular", "nondecreasing"], rows, ok, detail))
        }
        TaskSpec::Colrow(t) => {
            let dim = t.space.weight.as_ref().map(|w| w.dim).or(t.space.dim).unwrap_or(1);
            let phis = build_symbols(&t.symbols, dim, "symbols")?;
            let deg = phis.iter().map(|p| p.degree()).max().unwrap_or(0);
            let base = t.space.build(t.s, t.n + deg, "space")?;
            let k = match t.t {
                Some(tt) => base.with_s(tt),
                None => base.clone(),
            };
            let r = lab::column_row_norms(&phis, &base, &k, t.n, ctx.seed)?;
            let within = r.ratio <= t.band;
            let rows = vec![vec![t.n.to_string(), num(r.col), num(r.row), num(r.ratio), num(t.band), within.to_string()]];
            let detail = format!("row/col {:.6} (band {}, empirical)", r.ratio, t.band);
            Ok(csv(&["n", "col", "row", "ratio", "band", "within_band"], rows, within, detail))
        }
        TaskSpec::DerivativeReport(t) => {
            let w = t.weight.radial()?;
            let phis = build_symbols(&t.symbols, t.weight.dim, "symbols")?;
            let r = lab::derivative_multiplier_report(&phis, &w, t.s, t.t, t.n_levels, t.n, ctx.seed)?;
            let ok = r.levels.iter().all(|l| l.norm.is_finite()) && r.growth_norm.is_finite();
            let detail = format!("{} levels, growth norm {:.6}", r.levels.len(), r.growth_norm);
            json(task, ctx, &r, ok, detail)
        }
    }
}
