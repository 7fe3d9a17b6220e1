//! Command handlers: parse inputs, call into the core crate, shape reports.

use std::path::Path;

use anyhow::{anyhow, Context as _, Result};
use fibspace_core::classes::{check_class, ClassId, ClassParams};
use fibspace_core::compactness::{compactness, CompactParams, CompactTarget};
use fibspace_core::duals::{check_dual_conditions, dual_membership, DualKind, MAX_HORIZON};
use fibspace_core::matrices::{truncate, MatrixOracle};
use fibspace_core::numerics::{
    cassini_residual, fib, fib_sum_residual, golden_ratio_gap, parse_rational, render, to_decimal, Lambda, Rational,
    Truncation, Verdict,
};
use fibspace_core::selftest::{run_selftest, SelftestParams};
use fibspace_core::spaces::{
    expand_in_basis, fbar_prefix, fhat_prefix, inverse_prefix, membership, space_norm, SequenceOracle, SpaceId,
};
use fibspace_core::spec::{lambda_to_json, parse_lambda, parse_matrix, parse_sequence};
use fibspace_core::Error;
use num_traits::Zero;
use serde_json::{json, Value};

use crate::report::{self, Outcome, Table};
use crate::{Cli, Command, GlobalArgs};

const SIG: usize = 12;

fn dec(q: &Rational) -> String {
    to_decimal(q, SIG)
}

/// Inline text, or the contents of the file it names.
fn load(text: &str) -> Result<String> {
    let path = Path::new(text);
    if !text.trim_start().starts_with('{') && path.is_file() {
        return std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()));
    }
    Ok(text.to_string())
}

struct Context {
    lambda: Lambda,
    trunc: Truncation,
    horizon: usize,
    args: GlobalArgs,
}

impl Context {
    fn new(args: &GlobalArgs) -> Result<Self> {
        let lambda = parse_lambda(&load(&args.lambda)?)?;
        let trunc = Truncation {
            depth: args.depth,
            window: args.window,
            tol: parse_rational(&args.tol)?,
            threshold: parse_rational(&args.threshold)?,
        };
        if args.horizon > MAX_HORIZON {
            return Err(Error::SubsetHorizon { requested: args.horizon, max: MAX_HORIZON }.into());
        }
        if trunc.window == 0 {
            return Err(anyhow!("--window must be at least 1"));
        }
        Ok(Context { lambda, trunc, horizon: args.horizon, args: args.clone() })
    }

    fn sequence(&self) -> Result<SequenceOracle> {
        let text = self.args.seq.as_deref().ok_or_else(|| anyhow!("--seq is required for this command"))?;
        Ok(parse_sequence(&load(text)?, &self.lambda)?)
    }

    fn matrix(&self) -> Result<MatrixOracle> {
        let text = self.args.matrix.as_deref().ok_or_else(|| anyhow!("--matrix is required for this command"))?;
        Ok(parse_matrix(&load(text)?, &self.lambda)?)
    }

    fn config(&self) -> Value {
        let mut c = json!({
            "lambda": lambda_to_json(&self.lambda),
            "depth": self.trunc.depth,
            "window": self.trunc.window,
            "tol": render(&self.trunc.tol),
            "threshold": render(&self.trunc.threshold),
            "horizon": self.horizon,
            "format": self.args.format.as_str(),
        });
        if let Some(s) = &self.args.seq {
            c["seq"] = json!(s);
        }
        if let Some(m) = &self.args.matrix {
            c["matrix"] = json!(m);
        }
        c
    }
}

fn command_name(c: &Command) -> &'static str {
    match c {
        Command::Fib { .. } => "fib",
        Command::Identities { .. } => "identities",
        Command::Transform { .. } => "transform",
        Command::Member { .. } => "member",
        Command::Norm => "norm",
        Command::Basis { .. } => "basis",
        Command::Dual { .. } => "dual",
        Command::Classify { .. } => "classify",
        Command::Compact { .. } => "compact",
        Command::Truncate { .. } => "truncate",
        Command::Selftest { .. } => "selftest",
    }
}

/// Runs the command and emits its report; `Ok(false)` is a verdict failure.
pub fn run(cli: &Cli) -> Result<bool> {
    let ctx = Context::new(&cli.global)?;
    let outcome = match &cli.command {
        Command::Fib { n } => cmd_fib(*n),
        Command::Identities { max } => cmd_identities(*max)?,
        Command::Transform { direction } => cmd_transform(&ctx, direction)?,
        Command::Member { space } => cmd_member(&ctx, space)?,
        Command::Norm => cmd_norm(&ctx)?,
        Command::Basis { space, order } => cmd_basis(&ctx, space, *order)?,
        Command::Dual { dual, space } => cmd_dual(&ctx, dual, space)?,
        Command::Classify { class, row_budget } => cmd_classify(&ctx, class, *row_budget)?,
        Command::Compact { target, grid_max } => cmd_compact(&ctx, target, *grid_max)?,
        Command::Truncate { order } => cmd_truncate(&ctx, *order)?,
        Command::Selftest { corrupt, seed } => cmd_selftest(&ctx, corrupt.clone(), *seed)?,
    };
    let text = report::render(ctx.args.format, command_name(&cli.command), &ctx.config(), &outcome);
    match &ctx.args.out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))?,
        None => print!("{text}"),
    }
    Ok(outcome.ok)
}

fn verdict_row(name: &str, v: &Verdict, extra: String) -> Vec<String> {
    vec![name.to_string(), v.status.as_str().to_string(), extra]
}

fn cmd_fib(n: usize) -> Outcome {
    let value = fib(n).to_string();
    let mut t = Table::new(&["n", "f_n"]);
    t.push(vec![n.to_string(), value.clone()]);
    Outcome::new(json!({"n": n, "value": value}), true).with_table(t)
}

fn cmd_identities(max: usize) -> Result<Outcome> {
    let mut rows = Vec::with_capacity(max + 1);
    let mut t = Table::new(&["n", "f_n", "cassini_residual", "sum_residual", "golden_gap_upper"]);
    let mut residuals_zero = true;
    let mut gaps_decreasing = true;
    let mut prev_gap: Option<fibspace_core::numerics::Interval> = None;
    for n in 0..=max {
        let cassini = if n >= 1 { Some(cassini_residual(n)?) } else { None };
        let sum = fib_sum_residual(n);
        let gap = if n >= 1 { Some(golden_ratio_gap(n)?) } else { None };
        residuals_zero &= sum.is_zero() && cassini.as_ref().is_none_or(Zero::is_zero);
        if let (Some(g), Some(p)) = (&gap, &prev_gap) {
            if n >= 3 {
                gaps_decreasing &= g.hi < p.lo;
            }
        }
        let gap_json =
            gap.as_ref().map(|g| json!({"lo": render(&g.lo), "hi": render(&g.hi), "hi_decimal": dec(&g.hi)}));
        t.push(vec![
            n.to_string(),
            fib(n).to_string(),
            cassini.as_ref().map(render).unwrap_or_default(),
            render(&sum),
            gap.as_ref().map(|g| dec(&g.hi)).unwrap_or_default(),
        ]);
        rows.push(json!({
            "n": n,
            "f_n": fib(n).to_string(),
            "cassini_residual": cassini.as_ref().map(render),
            "sum_residual": render(&sum),
            "golden_gap": gap_json,
        }));
        prev_gap = gap;
    }
    let ok = residuals_zero && gaps_decreasing;
    let result =
        json!({"max": max, "residuals_zero": residuals_zero, "gaps_decreasing": gaps_decreasing, "rows": rows});
    Ok(Outcome::new(result, ok).with_table(t))
}

fn cmd_transform(ctx: &Context, direction: &str) -> Result<Outcome> {
    let x = ctx.sequence()?;
    let depth = ctx.trunc.depth;
    let terms = match direction {
        "fhat" => fhat_prefix(&x, depth),
        "fbar" => fbar_prefix(&x, &ctx.lambda, depth)?,
        "inverse" => inverse_prefix(&x, &ctx.lambda, depth)?,
        other => return Err(anyhow!("unknown direction `{other}`")),
    };
    let mut t = Table::new(&["n", "exact", "decimal"]);
    for (n, v) in terms.iter().enumerate() {
        t.push(vec![n.to_string(), render(v), dec(v)]);
    }
    let result = json!({
        "direction": direction,
        "sequence": x.description(),
        "terms": terms.iter().map(render).collect::<Vec<_>>(),
        "decimals": terms.iter().map(dec).collect::<Vec<_>>(),
    });
    Ok(Outcome::new(result, true).with_table(t))
}

fn cmd_member(ctx: &Context, space: &str) -> Result<Outcome> {
    let x = ctx.sequence()?;
    let space = SpaceId::parse(space)?;
    let v = membership(&x, &space, &ctx.lambda, &ctx.trunc)?;
    let mut t = Table::new(&["space", "status", "note"]);
    t.push(verdict_row(&space.to_string(), &v, v.note.clone().unwrap_or_default()));
    let result = json!({"sequence": x.description(), "space": space.to_string(), "verdict": v.to_json()});
    Ok(Outcome::new(result, v.is_true()).with_table(t))
}

fn cmd_norm(ctx: &Context) -> Result<Outcome> {
    let x = ctx.sequence()?;
    let est = space_norm(&x, &ctx.lambda, &ctx.trunc)?;
    let mut t = Table::new(&["value", "decimal", "argmax", "status"]);
    t.push(vec![render(&est.value), dec(&est.value), est.argmax.to_string(), est.verdict.status.as_str().into()]);
    let result = json!({
        "sequence": x.description(),
        "value": render(&est.value),
        "decimal": dec(&est.value),
        "argmax": est.argmax,
        "verdict": est.verdict.to_json(),
    });
    Ok(Outcome::new(result, est.verdict.is_true()).with_table(t))
}

fn cmd_basis(ctx: &Context, space: &str, order: usize) -> Result<Outcome> {
    let x = ctx.sequence()?;
    let space = SpaceId::parse(space)?;
    let e = expand_in_basis(&x, &ctx.lambda, &space, order, &ctx.trunc)?;
    let mut t = Table::new(&["k", "alpha", "coefficient"]);
    for (k, a) in e.alphas.iter().enumerate() {
        t.push(vec![k.to_string(), render(a), e.coefficients.get(k).map(render).unwrap_or_default()]);
    }
    let result = json!({
        "sequence": x.description(),
        "space": space.to_string(),
        "order": e.order,
        "alphas": e.alphas.iter().map(render).collect::<Vec<_>>(),
        "limit": e.limit.as_ref().map(render),
        "coefficients": e.coefficients.iter().map(render).collect::<Vec<_>>(),
        "residual": e.residual.as_ref().map(render),
        "residual_decimal": e.residual.as_ref().map(dec),
        "scan": e.scan,
        "verdict": e.verdict.to_json(),
    });
    Ok(Outcome::new(result, e.verdict.is_true()).with_table(t))
}

fn cmd_dual(ctx: &Context, dual: &str, space: &str) -> Result<Outcome> {
    let a = ctx.sequence()?;
    let kind = DualKind::parse(dual)?;
    let space = SpaceId::parse(space)?;
    let report = check_dual_conditions(&a, &ctx.lambda, ctx.horizon, &ctx.trunc)?;
    let member = dual_membership(&a, &ctx.lambda, kind, &space, ctx.horizon, &ctx.trunc)?;
    let mut t = Table::new(&["condition", "status", "bound"]);
    for (name, c) in
        [("b1", &report.b1), ("b2", &report.b2), ("b3", &report.b3), ("b4", &report.b4), ("b5", &report.b5)]
    {
        t.push(verdict_row(name, &c.verdict, c.bound.as_ref().map(render).unwrap_or_default()));
    }
    t.push(verdict_row(&format!("{kind}-dual of {space}"), &member, String::new()));
    let result = json!({
        "sequence": a.description(),
        "dual": kind.to_string(),
        "space": space.to_string(),
        "conditions": report.to_json(),
        "membership": member.to_json(),
    });
    Ok(Outcome::new(result, member.is_true()).with_table(t))
}

fn cmd_classify(ctx: &Context, class: &str, row_budget: usize) -> Result<Outcome> {
    let a = ctx.matrix()?;
    let class = ClassId::parse(class)?;
    let params = ClassParams { trunc: ctx.trunc.clone(), horizon: ctx.horizon, row_budget };
    let r = check_class(&a, &ctx.lambda, &class, &params)?;
    let mut t = Table::new(&["condition", "status", "values"]);
    for c in &r.conditions {
        let values: Vec<String> = c.values.iter().map(|(k, v)| format!("{k}={}", render(v))).collect();
        t.push(verdict_row(c.id, &c.verdict, values.join(" ")));
    }
    t.push(verdict_row("overall", &r.overall, String::new()));
    let mut result = r.to_json();
    result["matrix"] = json!(a.description());
    Ok(Outcome::new(result, r.overall.is_true()).with_table(t))
}

fn cmd_compact(ctx: &Context, target: &str, grid_max: usize) -> Result<Outcome> {
    let a = ctx.matrix()?;
    let target = CompactTarget::parse(target)?;
    let params = CompactParams { trunc: ctx.trunc.clone(), horizon: ctx.horizon, grid_max };
    let r = compactness(&a, &ctx.lambda, target, &params)?;
    let mut t = Table::new(&["m", "tail_norm", "decimal"]);
    for (m, v) in &r.hmnc.samples {
        t.push(vec![m.to_string(), render(v), dec(v)]);
    }
    let mut result = r.to_json();
    result["matrix"] = json!(a.description());
    Ok(Outcome::new(result, r.verdict.is_true()).with_table(t))
}

fn cmd_truncate(ctx: &Context, order: usize) -> Result<Outcome> {
    let a = ctx.matrix()?;
    let d = truncate(&a, order)?;
    let rows: Vec<Vec<String>> = d.rows().iter().map(|r| r.iter().map(render).collect()).collect();
    let header: Vec<String> = (0..order).map(|k| k.to_string()).collect();
    let t = Table { header, rows: rows.clone() };
    Ok(Outcome::new(json!({"matrix": a.description(), "order": order, "rows": rows}), true).with_table(t))
}

fn cmd_selftest(ctx: &Context, corrupt: Option<String>, seed: u64) -> Result<Outcome> {
    let params = SelftestParams { trunc: ctx.trunc.clone(), seed, corrupt };
    let r = run_selftest(&ctx.lambda, &params)?;
    let mut t = Table::new(&["check", "passed", "detail"]);
    for c in &r.checks {
        t.push(vec![c.name.clone(), c.passed.to_string(), c.detail.clone()]);
    }
    Ok(Outcome::new(r.to_json(), r.passed()).with_table(t))
}
