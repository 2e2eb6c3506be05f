//! One function per subcommand, generic over the arithmetic backend.

use momentbc::bc_operators::{companion_operator, connecting_operator, response_matrix};
use momentbc::chebyshev::{moments_to_response, response_to_moments, LambdaMatrix};
use momentbc::debranges::{christoffel, reproducing_kernel, KernelForm};
use momentbc::determinacy::{hamburger_report, stieltjes_report, DeterminacyReport, Problem};
use momentbc::jacobi_sim::{dirichlet_spectral_data, simulate, Control, JacobiCoefficients};
use momentbc::moments::classify;
use momentbc::recovery::{
    exact_solution, moments_of_measure, relative_moment_error, solve_truncated, DiscreteMeasure,
};
use momentbc::{Diagnostic, MomentSequence, Rational, Scalar};
use serde_json::{Map, Value};

use crate::io::{
    array, float, float_text, list, matrix, parse_err, scalar_text, CliResult, Emit, Output, Table,
};

pub type Doc = Map<String, Value>;

/// Largest order whose Hankel block fits in `len` moments.
fn max_order(len: usize) -> usize {
    len.div_ceil(2)
}

fn require_order(order: usize) -> CliResult<usize> {
    if order == 0 {
        Err(parse_err("order must be at least 1"))
    } else {
        Ok(order)
    }
}

fn flag(b: bool) -> String {
    b.to_string()
}

fn opt_flag(b: Option<bool>) -> Value {
    b.map(Value::Bool).unwrap_or(Value::Null)
}

fn jacobi<T: Scalar>(doc: &Doc) -> CliResult<JacobiCoefficients<T>> {
    Ok(JacobiCoefficients::new(array(doc, "a")?, array(doc, "b")?)?)
}

pub fn check<T: Scalar + Emit>(doc: &Doc, order: Option<usize>) -> CliResult<Output> {
    let s: Vec<T> = array(doc, "moments")?;
    // Largest order whose S_1 test is available.
    let order = require_order(order.unwrap_or((s.len() / 2).max(1)))?;
    let c = classify(&s, order)?;
    let mut out = Output::new("check", T::BACKEND);
    out.set("order", order.into());
    out.set("verdict", serde_json::to_value(c.verdict).expect("verdict"));
    out.set("hamburger", c.verdict.is_hamburger().into());
    out.set("stieltjes", c.verdict.is_stieltjes().into());
    out.set("hausdorff", c.verdict.is_hausdorff().into());
    let mut table = Table::new(&["order", "s0_pd", "s1_pd", "s0_minus_s1_psd"]);
    let mut rows = Vec::new();
    for f in &c.orders {
        let mut m = Map::new();
        m.insert("order".into(), f.order.into());
        m.insert("s0_positive_definite".into(), f.s0_positive_definite.into());
        m.insert(
            "s1_positive_definite".into(),
            opt_flag(f.s1_positive_definite),
        );
        m.insert(
            "s0_minus_s1_semidefinite".into(),
            opt_flag(f.s0_minus_s1_semidefinite),
        );
        rows.push(Value::Object(m));
        let o = |b: Option<bool>| b.map(flag).unwrap_or_default();
        table.push(vec![
            f.order.to_string(),
            flag(f.s0_positive_definite),
            o(f.s1_positive_definite),
            o(f.s0_minus_s1_semidefinite),
        ]);
    }
    out.set("orders", Value::Array(rows));
    out.verdict = Some(serde_json::to_value(c.verdict).expect("verdict"));
    out.table = table;
    out.diagnostics = c.diagnostics;
    Ok(out)
}

pub fn transform<T: Scalar + Emit>(doc: &Doc, inverse: bool) -> CliResult<Output> {
    let mut out = Output::new("transform", T::BACKEND);
    let (key, values) = if inverse {
        let r: Vec<T> = array(doc, "response")?;
        ("moments", response_to_moments(&r))
    } else {
        let s: Vec<T> = array(doc, "moments")?;
        ("response", moments_to_response(&s).values)
    };
    if values.is_empty() {
        return Err(parse_err("input array is empty"));
    }
    out.set(key, list(&values));
    let lambda = LambdaMatrix::new(values.len());
    let integer = |i: usize, j: usize| {
        Value::Number(
            lambda
                .entry(i, j)
                .to_string()
                .parse()
                .expect("integer is valid JSON"),
        )
    };
    out.set(
        "lambda_matrix",
        Value::Array(
            (0..values.len())
                .map(|i| Value::Array((0..values.len()).map(|j| integer(i, j)).collect()))
                .collect(),
        ),
    );
    let mut table = Table::new(&["index", key]);
    for (i, v) in values.iter().enumerate() {
        table.push(vec![i.to_string(), v.text()]);
    }
    out.table = table;
    Ok(out)
}

pub fn operators<T: Scalar + Emit>(doc: &Doc, order: Option<usize>) -> CliResult<Output> {
    let s: Vec<T> = array(doc, "moments")?;
    let order = require_order(order.unwrap_or(max_order(s.len())))?;
    let r = moments_to_response(&s).values;
    let mut out = Output::new("operators", T::BACKEND);
    out.set("order", order.into());
    let c = connecting_operator(&r, order)?.entries;
    let rm = response_matrix(&r, order)?.entries;
    let mut named = vec![("connecting", c)];
    if s.len() >= 2 * order {
        named.push(("companion", companion_operator(&r, order)?.entries));
    } else {
        out.diagnostics.push(Diagnostic::new(
            "companion-skipped",
            format!(
                "the companion operator of order {order} needs {} moments",
                2 * order
            ),
        ));
    }
    named.push(("response_matrix", rm));
    let mut table = Table::new(&["operator", "row", "col", "value"]);
    for (name, m) in &named {
        out.set(name, matrix(m));
        for i in 0..m.rows() {
            for j in 0..m.cols() {
                table.push(vec![
                    name.to_string(),
                    i.to_string(),
                    j.to_string(),
                    m[(i, j)].text(),
                ]);
            }
        }
    }
    out.table = table;
    Ok(out)
}

/// Rational measure reproducing the input exactly, tried only in the exact backend.
fn certified<T: Scalar>(
    s: &[T],
    approx: &DiscreteMeasure<f64>,
) -> Option<DiscreteMeasure<Rational>> {
    if !T::EXACT {
        return None;
    }
    let s: Vec<Rational> = s.iter().map(Scalar::to_rational).collect();
    exact_solution(&s, approx)
}

/// Sets `atoms`, `weights`, `norming_constants` and `reproduced_moments`, exactly when possible.
fn emit_measure(
    out: &mut Output,
    approx: &DiscreteMeasure<f64>,
    exact: Option<&DiscreteMeasure<Rational>>,
    kmax: usize,
) {
    out.set("exact", exact.is_some().into());
    match exact {
        Some(m) => {
            out.set("atoms", list(m.atoms()));
            out.set("weights", list(m.weights()));
            out.set("norming_constants", list(&m.norming_constants()));
            out.set("reproduced_moments", list(&moments_of_measure(m, kmax)));
        }
        None => {
            out.set("atoms", list(approx.atoms()));
            out.set("weights", list(approx.weights()));
            out.set("norming_constants", list(&approx.norming_constants()));
            out.set(
                "reproduced_moments",
                list(&moments_of_measure(approx, kmax)),
            );
        }
    }
}

fn step_table(approx: &DiscreteMeasure<f64>, exact: Option<&DiscreteMeasure<Rational>>) -> Table {
    let mut table = Table::new(&["lambda", "weight", "cumulative_mass"]);
    match exact {
        Some(m) => {
            for ((x, f), w) in m.step_function().iter().zip(m.weights()) {
                table.push(vec![x.text(), w.text(), f.text()]);
            }
        }
        None => {
            for ((x, f), w) in approx.step_function().iter().zip(approx.weights()) {
                table.push(vec![float_text(*x), float_text(*w), float_text(*f)]);
            }
        }
    }
    table
}

pub fn solve<T: Scalar + Emit>(doc: &Doc, order: Option<usize>) -> CliResult<Output> {
    let s: Vec<T> = array(doc, "moments")?;
    let order = require_order(order.unwrap_or(s.len() / 2))?;
    let sol = solve_truncated(&MomentSequence::from_scalars(&s)?, order)?;
    let exact = certified(&s[..2 * order], &sol.measure);
    let mut out = Output::new("solve", T::BACKEND);
    out.set("order", order.into());
    emit_measure(&mut out, &sol.measure, exact.as_ref(), 2 * order - 1);
    let error = if exact.is_some() {
        0.0
    } else {
        sol.max_relative_moment_error
    };
    out.set("max_relative_moment_error", float(error));
    out.set("condition_estimate", float(sol.spectrum.condition_estimate));
    out.table = step_table(&sol.measure, exact.as_ref());
    out.table
        .notes
        .push(("max_relative_moment_error".into(), float_text(error)));
    out.diagnostics = sol.diagnostics;
    Ok(out)
}

pub fn simulate_cmd<T: Scalar + Emit>(
    doc: &Doc,
    horizon: Option<usize>,
    open: bool,
) -> CliResult<Output> {
    let j: JacobiCoefficients<T> = jacobi(doc)?;
    let horizon = match (horizon, doc.get("T")) {
        (Some(h), _) => h,
        (None, Some(v)) => {
            v.as_u64()
                .ok_or_else(|| parse_err("`T` must be a nonnegative integer"))? as usize
        }
        (None, None) => 2 * j.order(),
    };
    if horizon == 0 {
        return Err(parse_err("horizon must be at least 1"));
    }
    let control = match doc.get("control") {
        None => Control::Delta,
        Some(Value::String(s)) if s == "delta" => Control::Delta,
        Some(Value::Array(_)) => Control::Values(array(doc, "control")?),
        Some(_) => return Err(parse_err("`control` must be \"delta\" or an array")),
    };
    let field = simulate(&j, &control, horizon, !open);
    let response: Vec<T> = (1..=horizon)
        .map(|t| field.get(1, t as isize).clone())
        .collect();
    let mut out = Output::new("simulate", T::BACKEND);
    out.set("order", j.order().into());
    out.set("horizon", horizon.into());
    out.set("dirichlet", (!open).into());
    out.set(
        "control",
        if matches!(control, Control::Delta) {
            "delta".into()
        } else {
            "values".into()
        },
    );
    out.set("response", list(&response));
    if matches!(control, Control::Delta) {
        out.set("moments", list(&response_to_moments(&response)));
    }
    out.set(
        "field",
        Value::Array((0..=field.sites).map(|n| list(field.site(n))).collect()),
    );
    let mut table = Table::new(&["n", "t", "v"]);
    for n in 0..=field.sites {
        for (i, v) in field.site(n).iter().enumerate() {
            table.push(vec![n.to_string(), (i as isize - 1).to_string(), v.text()]);
        }
    }
    out.table = table;
    Ok(out)
}

pub struct KernelArgs {
    pub order: Option<usize>,
    pub z: String,
    pub lambda: String,
    pub grid: Option<(String, String, usize)>,
    pub tol: f64,
}

fn kernel_pair<T: Scalar>(s: &[T], order: usize, z: &T, l: &T) -> CliResult<(T, T, f64)> {
    let b = reproducing_kernel(s, order, z, l, KernelForm::Bilinear)?;
    let d = reproducing_kernel(s, order, z, l, KernelForm::Determinant)?;
    let scale = b.to_f64().abs().max(f64::MIN_POSITIVE);
    let residual = if b == d {
        0.0
    } else {
        (b.to_f64() - d.to_f64()).abs() / scale
    };
    Ok((b, d, residual))
}

pub fn kernel<T: Scalar + Emit>(doc: &Doc, args: &KernelArgs) -> CliResult<Output> {
    let s: Vec<T> = array(doc, "moments")?;
    let order = require_order(args.order.unwrap_or(max_order(s.len())))?;
    let mut out = Output::new("kernel", T::BACKEND);
    out.set("order", order.into());
    let mut worst = 0f64;
    if let Some((lo, hi, steps)) = &args.grid {
        if *steps < 2 {
            return Err(parse_err("grid needs at least 2 steps"));
        }
        let (lo, hi): (T, T) = (scalar_text(lo)?, scalar_text(hi)?);
        let width = hi - lo.clone();
        let denom = T::from_i64(*steps as i64 - 1);
        let points: Vec<T> = (0..*steps)
            .map(|i| lo.clone() + width.clone() * T::from_i64(i as i64) / denom.clone())
            .collect();
        let mut table = Table::new(&["z", "lambda", "k_bilinear", "k_determinant", "residual"]);
        let mut rows = Vec::new();
        for z in &points {
            for l in &points {
                let (b, d, res) = kernel_pair(&s, order, z, l)?;
                worst = worst.max(res);
                table.push(vec![
                    z.text(),
                    l.text(),
                    b.text(),
                    d.text(),
                    float_text(res),
                ]);
                rows.push(Value::Array(vec![
                    z.json(),
                    l.json(),
                    b.json(),
                    d.json(),
                    float(res),
                ]));
            }
        }
        out.set(
            "columns",
            serde_json::json!(["z", "lambda", "k_bilinear", "k_determinant", "residual"]),
        );
        out.set("grid", Value::Array(rows));
        out.table = table;
    } else {
        let z: T = scalar_text(&args.z)?;
        let l: T = scalar_text(&args.lambda)?;
        let (b, d, res) = kernel_pair(&s, order, &z, &l)?;
        worst = res;
        let ch = christoffel(&s, order, &l)?;
        out.set("z", z.json());
        out.set("lambda", l.json());
        out.set("k_bilinear", b.json());
        out.set("k_determinant", d.json());
        out.set("kernel_diagonal", ch.kernel_diagonal.json());
        out.set("kappa", ch.kappa.json());
        out.set("residual", float(res));
        let mut table = Table::new(&[
            "z",
            "lambda",
            "k_bilinear",
            "k_determinant",
            "kernel_diagonal",
            "kappa",
            "residual",
        ]);
        table.push(vec![
            z.text(),
            l.text(),
            b.text(),
            d.text(),
            ch.kernel_diagonal.text(),
            ch.kappa.text(),
            float_text(res),
        ]);
        out.table = table;
    }
    if worst > args.tol {
        out.diagnostics.push(Diagnostic::new(
            "forms-disagree",
            format!(
                "bilinear and determinant forms differ by {worst:.3e} (tolerance {:.3e})",
                args.tol
            ),
        ));
    }
    Ok(out)
}

fn determinacy_rows<T: Scalar + Emit>(rep: &DeterminacyReport<T>, out: &mut Output) {
    let (first, second) = match rep.problem {
        Problem::Hamburger => ("q1", "q2"),
        Problem::Stieltjes => ("M", "L"),
    };
    let mut header = vec!["T", first, "q1_ratio", second, "second_ratio"];
    if rep.problem == Problem::Stieltjes {
        header.push("xi");
    }
    header.extend(["forms_match", "sign_matched", "monotone_ok"]);
    let mut table = Table::new(&header);
    let mut rows = Vec::new();
    for (i, r) in rep.rows.iter().enumerate() {
        // For Stieltjes data the growing quantity is the length -L.
        let grows = |a: &T, b: &T| match rep.problem {
            Problem::Hamburger => a >= b,
            Problem::Stieltjes => a <= b,
        };
        let monotone =
            i == 0 || (r.q1 >= rep.rows[i - 1].q1 && grows(&r.second, &rep.rows[i - 1].second));
        let mut row = vec![
            r.order.to_string(),
            r.q1.text(),
            r.q1_ratio.text(),
            r.second.text(),
            r.second_ratio.text(),
        ];
        let mut m = Map::new();
        m.insert("order".into(), r.order.into());
        m.insert(first.into(), r.q1.json());
        m.insert("q1_ratio".into(), r.q1_ratio.json());
        m.insert(second.into(), r.second.json());
        m.insert("second_ratio".into(), r.second_ratio.json());
        if let Some(xi) = &r.xi_form {
            row.push(xi.text());
            m.insert("xi".into(), xi.json());
        }
        row.extend([
            flag(r.forms_match_ratios),
            flag(r.printed_sign_matched),
            flag(monotone),
        ]);
        m.insert("forms_match_ratios".into(), r.forms_match_ratios.into());
        m.insert("printed_sign_matched".into(), r.printed_sign_matched.into());
        m.insert("monotone_ok".into(), monotone.into());
        table.push(row);
        rows.push(Value::Object(m));
    }
    out.set("rows", Value::Array(rows));
    out.table = table;
}

pub fn determinacy<T: Scalar + Emit>(
    doc: &Doc,
    problem: Problem,
    tmax: Option<usize>,
) -> CliResult<Output> {
    let s: Vec<T> = array(doc, "moments")?;
    let tmax = require_order(tmax.unwrap_or(max_order(s.len())))?;
    let rep = match problem {
        Problem::Hamburger => hamburger_report(&s, tmax)?,
        Problem::Stieltjes => stieltjes_report(&s, tmax)?,
    };
    let mut out = Output::new("determinacy", T::BACKEND);
    out.set("problem", serde_json::to_value(problem).expect("problem"));
    out.set("tmax", tmax.into());
    determinacy_rows(&rep, &mut out);
    let mut verdict = Map::new();
    verdict.insert(
        "verdict".into(),
        serde_json::to_value(rep.verdict).expect("verdict"),
    );
    verdict.insert("q1_monotone".into(), rep.q1_monotone.into());
    verdict.insert("second_monotone".into(), rep.second_monotone.into());
    verdict.insert("finite_order_evidence_only".into(), true.into());
    for (k, v) in &verdict {
        out.set(k, v.clone());
    }
    out.verdict = Some(Value::Object(verdict));
    out.diagnostics = rep.diagnostics;
    Ok(out)
}

pub fn roundtrip<T: Scalar + Emit>(doc: &Doc, order: Option<usize>, tol: f64) -> CliResult<Output> {
    let j: JacobiCoefficients<T> = jacobi(doc)?;
    let order = require_order(order.unwrap_or(j.order()))?;
    if order > j.order() {
        return Err(parse_err(format!(
            "order {order} exceeds the Jacobi order {}",
            j.order()
        )));
    }
    let j = j.truncated(order);
    let field = simulate(&j, &Control::Delta, 2 * order, true);
    let r: Vec<T> = (1..=2 * order)
        .map(|t| field.get(1, t as isize).clone())
        .collect();
    let s = response_to_moments(&r);
    let sol = solve_truncated(&MomentSequence::from_scalars(&s)?, order)?;
    let exact = certified(&s, &sol.measure);
    let recovered = exact
        .as_ref()
        .map_or_else(|| sol.measure.clone(), DiscreteMeasure::to_f64);
    let target: Vec<f64> = s.iter().map(Scalar::to_f64).collect();
    let moment_error = if exact.is_some() {
        0.0
    } else {
        relative_moment_error(&sol.measure, &target)
    };
    let oracle = dirichlet_spectral_data(&j.to_f64(), order)?;
    let diff = |a: &[f64], b: &[f64]| {
        a.iter()
            .zip(b)
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max)
    };
    let atom_error = diff(recovered.atoms(), oracle.atoms());
    let weight_error = diff(recovered.weights(), oracle.weights());
    let passed = moment_error <= tol && atom_error <= tol && weight_error <= tol;

    let mut out = Output::new("roundtrip", T::BACKEND);
    out.set("order", order.into());
    out.set("moments", list(&s));
    emit_measure(&mut out, &sol.measure, exact.as_ref(), 2 * order - 1);
    out.set("oracle_atoms", list(oracle.atoms()));
    out.set("oracle_weights", list(oracle.weights()));
    out.set("max_relative_moment_error", float(moment_error));
    out.set("max_atom_error", float(atom_error));
    out.set("max_weight_error", float(weight_error));
    out.set("tolerance", float(tol));
    out.set("passed", passed.into());
    let mut table = Table::new(&["k", "atom", "oracle_atom", "weight", "oracle_weight"]);
    for k in 0..order {
        table.push(vec![
            k.to_string(),
            float_text(recovered.atoms()[k]),
            float_text(oracle.atoms()[k]),
            float_text(recovered.weights()[k]),
            float_text(oracle.weights()[k]),
        ]);
    }
    table
        .notes
        .push(("max_relative_moment_error".into(), float_text(moment_error)));
    out.table = table;
    out.diagnostics = sol.diagnostics;
    if !passed {
        out.diagnostics.push(Diagnostic::new(
            "tolerance-exceeded",
            format!("round-trip error above {tol:.3e}"),
        ));
    }
    Ok(out)
}
