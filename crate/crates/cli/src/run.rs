use std::collections::BTreeMap;

use euler_series::expr::parse_expression_with_precision;
use euler_series::oracle::{bisection_root, newton_root, RootResult};
use euler_series::{
    assemble_power_series, closed_form_coefficients, coefficient_sequence_reversion, coefficient_sequence_symbolic,
    convergence_diagnostic, log_series, omega_series, power_coefficient_sequence, refine_anchor_trace, root_series,
    ClosedFormFamily, Error, Expression, FamilyCoefficients, Scalar, SeriesApproximation, DEFAULT_PRECISION,
};

use crate::args::{Command, Common, Equation, FamilyKind, Route};
use crate::output::OutputRecord;

/// Why a command produced no result.
#[derive(Debug)]
pub enum Failure {
    /// Bad flag values, or `--exact` asked of something irrational.
    Usage(String),
    Engine(Error),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Engine(e)
    }
}

impl Failure {
    pub fn exit_code(&self) -> u8 {
        match self {
            Failure::Usage(_) => 1,
            Failure::Engine(e) => match e {
                Error::Syntax { .. } | Error::UnknownSymbol { .. } | Error::InvalidArgument(_) | Error::InvalidFamily(_) => 1,
                Error::NoConvergence { .. } => 3,
                _ => 2,
            },
        }
    }
}

type Outcome = Result<OutputRecord, Failure>;

/// Numeric settings shared by all commands.
struct Mode {
    /// `None` in exact mode.
    precision: Option<u32>,
}

impl Mode {
    fn new(common: &Common) -> Self {
        Mode { precision: (!common.exact).then_some(common.precision) }
    }

    fn bits(&self) -> usize {
        self.precision.map_or(DEFAULT_PRECISION, |p| p as usize)
    }

    fn exact(&self) -> bool {
        self.precision.is_none()
    }

    fn anchor(&self, text: Option<&str>) -> Result<Scalar, Failure> {
        let text = text.ok_or_else(|| Failure::Usage("--anchor is required".into()))?;
        let parsed = if self.exact() { Scalar::parse_exact(text) } else { Scalar::parse(text, self.bits()) };
        let value = parsed.ok_or_else(|| Failure::Usage(format!("invalid anchor {text:?}")))?;
        Ok(if self.exact() { value } else { value.promote(self.bits()) })
    }

    fn equation(&self, text: &str) -> Result<Expression, Failure> {
        let e = parse_expression_with_precision(text, self.bits())?;
        if self.exact() && e.requires_float() {
            return Err(Failure::Usage(
                "--exact: the expression needs floating point (decimal literal, exp, ln or fractional power)".into(),
            ));
        }
        Ok(e)
    }

    fn record(&self, command: &str, input: BTreeMap<String, String>) -> OutputRecord {
        OutputRecord::new(command, input, self.precision)
    }
}

fn rational(flag: &str, text: &str) -> Result<Scalar, Failure> {
    Scalar::parse_exact(text).ok_or_else(|| Failure::Usage(format!("--{flag}: invalid rational {text:?}")))
}

fn input_for(eq: &Equation) -> BTreeMap<String, String> {
    let mut input = BTreeMap::new();
    input.insert("expr".to_string(), eq.expr.clone());
    if let Some(a) = &eq.common.anchor {
        input.insert("anchor".to_string(), a.clone());
    }
    input.insert("order".to_string(), eq.common.order.to_string());
    input
}

fn set_series(record: &mut OutputRecord, series: &SeriesApproximation) {
    record.set_terms(series.terms(), series.partial_sums());
    record.value = Some(series.value().to_string());
    let report = convergence_diagnostic(series);
    record.verdict = Some(report.verdict.as_str().to_string());
    record.ratios = Some(report.ratios.iter().map(Scalar::to_string).collect());
    record.details.insert("last_term_magnitude".into(), report.last_term_magnitude.to_string());
}

pub fn run(command: &Command) -> Outcome {
    let mode = Mode::new(command.common());
    let name = command.name();
    match command {
        Command::Root(eq) => {
            let (e, v) = (mode.equation(&eq.expr)?, mode.anchor(eq.common.anchor.as_deref())?);
            let mut record = mode.record(name, input_for(eq));
            set_series(&mut record, &root_series(&e, &v, eq.common.order)?);
            Ok(record)
        }
        Command::Coeffs { eq, route } => {
            let (e, v) = (mode.equation(&eq.expr)?, mode.anchor(eq.common.anchor.as_deref())?);
            let coeffs = match route {
                Route::Symbolic => coefficient_sequence_symbolic(&e, &v, eq.common.order)?,
                Route::Reversion => coefficient_sequence_reversion(&e, &v, eq.common.order)?,
            };
            let mut input = input_for(eq);
            input.insert("route".into(), format!("{route:?}").to_lowercase());
            let mut record = mode.record(name, input);
            record.set_coefficients(coeffs.derivs());
            record.details.insert("V".into(), coeffs.anchor().value().to_string());
            record.details.insert("dV".into(), coeffs.anchor().derivative().to_string());
            Ok(record)
        }
        Command::Power { eq, n } => {
            let exponent = rational("n", n)?;
            let exponent = exponent.as_exact().expect("parsed exactly");
            if mode.exact() && !exponent.is_int() {
                return Err(Failure::Usage("--exact: a fractional exponent needs floating point".into()));
            }
            let (e, v) = (mode.equation(&eq.expr)?, mode.anchor(eq.common.anchor.as_deref())?);
            let coeffs = power_coefficient_sequence(&e, &v, exponent, eq.common.order)?;
            let mut input = input_for(eq);
            input.insert("n".into(), n.clone());
            let mut record = mode.record(name, input);
            set_series(&mut record, &assemble_power_series(&coeffs));
            record.set_coefficients(coeffs.derivs());
            Ok(record)
        }
        Command::Log(eq) => {
            if mode.exact() {
                return Err(Failure::Usage("--exact: logarithms are irrational; use omega for exact terms".into()));
            }
            let (e, v) = (mode.equation(&eq.expr)?, mode.anchor(eq.common.anchor.as_deref())?);
            let omega = omega_series(&e, &v, eq.common.order)?;
            let mut terms = omega.terms().to_vec();
            terms[0] = v.ln(mode.bits())?;
            let sums: Vec<Scalar> = omega.partial_sums().iter().map(|s| s + &terms[0]).collect();
            let mut record = mode.record(name, input_for(eq));
            record.set_terms(&terms, &sums);
            record.value = Some(log_series(&e, &v, eq.common.order)?.to_string());
            Ok(record)
        }
        Command::Omega(eq) => {
            let (e, v) = (mode.equation(&eq.expr)?, mode.anchor(eq.common.anchor.as_deref())?);
            let omega = omega_series(&e, &v, eq.common.order)?;
            let mut record = mode.record(name, input_for(eq));
            record.set_terms(omega.terms(), &omega.partial_sums());
            record.value = Some(omega.omega().to_string());
            Ok(record)
        }
        Command::Refine { eq, rounds } => {
            let (e, v) = (mode.equation(&eq.expr)?, mode.anchor(eq.common.anchor.as_deref())?);
            let trace = refine_anchor_trace(&e, &v, *rounds, eq.common.order)?;
            let mut input = input_for(eq);
            input.insert("rounds".into(), rounds.to_string());
            let mut record = mode.record(name, input);
            let last = trace.last().expect("trace includes the first anchor");
            record.value = Some(last.to_string());
            record.details.insert("residual".into(), euler_series::evaluate(&e, last)?.to_string());
            record.trace = trace.iter().map(Scalar::to_string).collect();
            Ok(record)
        }
        Command::Compare { eq, lo, hi, tol, max_iter } => compare(&mode, eq, lo.as_deref(), hi.as_deref(), tol, *max_iter),
        Command::Family { family, b, c, n, lambda, a, common } => {
            let params = FamilyParams { b: b.as_deref(), c: c.as_deref(), n: n.as_deref(), lambda: lambda.as_deref(), a: a.as_deref() };
            family_table(&mode, *family, &params, common)
        }
    }
}

fn oracle_fields(r: &RootResult) -> BTreeMap<String, String> {
    BTreeMap::from([
        ("value".to_string(), r.value.to_string()),
        ("residual".to_string(), r.residual.to_string()),
        ("iterations".to_string(), r.iterations.to_string()),
    ])
}

/// Series value against the oracles. The oracles always run in floating
/// point: exact Newton iterates double in size every step.
fn compare(mode: &Mode, eq: &Equation, lo: Option<&str>, hi: Option<&str>, tol: &str, max_iter: usize) -> Outcome {
    let (e, v) = (mode.equation(&eq.expr)?, mode.anchor(eq.common.anchor.as_deref())?);
    let tolerance = rational("tol", tol)?;
    let series = root_series(&e, &v, eq.common.order)?;
    let bits = mode.bits();
    let newton = newton_root(&e, &v.promote(bits), &tolerance, max_iter)?;

    let mut input = input_for(eq);
    input.insert("tol".into(), tol.to_string());
    input.insert("max_iter".into(), max_iter.to_string());
    let mut oracle = BTreeMap::from([("newton".to_string(), oracle_fields(&newton))]);
    let mut record_details = BTreeMap::new();
    record_details.insert("difference.newton".to_string(), (series.value() - &newton.value).abs().to_string());
    if let (Some(lo), Some(hi)) = (lo, hi) {
        input.insert("lo".into(), lo.to_string());
        input.insert("hi".into(), hi.to_string());
        let lo = rational("lo", lo)?.promote(bits);
        let hi = rational("hi", hi)?.promote(bits);
        let bisection = bisection_root(&e, &lo, &hi, &tolerance)?;
        record_details.insert("difference.bisection".to_string(), (series.value() - &bisection.value).abs().to_string());
        oracle.insert("bisection".to_string(), oracle_fields(&bisection));
    }
    let mut record = mode.record("compare", input);
    set_series(&mut record, &series);
    record.details.extend(record_details);
    record.oracle = Some(oracle);
    Ok(record)
}

struct FamilyParams<'a> {
    b: Option<&'a str>,
    c: Option<&'a str>,
    n: Option<&'a str>,
    lambda: Option<&'a str>,
    a: Option<&'a str>,
}

fn required(flag: &str, value: Option<&str>) -> Result<Scalar, Failure> {
    let text = value.ok_or_else(|| Failure::Usage(format!("--{flag} is required for this family")))?;
    rational(flag, text)
}

fn family_table(mode: &Mode, kind: FamilyKind, params: &FamilyParams, common: &Common) -> Outcome {
    let exact = |s: Scalar| s.as_exact().expect("parsed exactly").clone();
    let family = match kind {
        FamilyKind::Sqrt => ClosedFormFamily::SqrtShift { b: exact(required("b", params.b)?), c: exact(required("c", params.c)?) },
        FamilyKind::NthRoot => {
            let n = required("n", params.n)?;
            let n = exact(n)
                .is_int()
                .then(|| params.n.and_then(|t| t.parse::<u32>().ok()))
                .flatten()
                .ok_or_else(|| Failure::Usage("--n must be a positive integer for nth-root".into()))?;
            ClosedFormFamily::NthRootShift { b: exact(required("b", params.b)?), c: exact(required("c", params.c)?), n }
        }
        FamilyKind::Cubic => ClosedFormFamily::CubicExample,
        FamilyKind::Power => {
            let n = exact(required("n", params.n)?);
            let lambda = exact(required("lambda", params.lambda)?);
            if mode.exact() && !(n.is_int() && lambda.is_int()) {
                return Err(Failure::Usage("--exact: fractional exponents need floating point".into()));
            }
            ClosedFormFamily::GeneralPower { lambda, a: exact(required("a", params.a)?), n }
        }
    };
    family.validate()?;
    let anchor_text = common.anchor.clone().or_else(|| match kind {
        FamilyKind::Sqrt | FamilyKind::NthRoot => params.b.map(str::to_string),
        _ => None,
    });
    let v = mode.anchor(anchor_text.as_deref())?;

    let mut input = BTreeMap::new();
    input.insert("family".to_string(), format!("{kind:?}").to_lowercase());
    input.insert("order".to_string(), common.order.to_string());
    input.insert("anchor".to_string(), anchor_text.unwrap_or_default());
    for (flag, value) in [("b", params.b), ("c", params.c), ("n", params.n), ("lambda", params.lambda), ("a", params.a)] {
        if let Some(value) = value {
            input.insert(flag.to_string(), value.to_string());
        }
    }
    let mut record = mode.record("family", input);
    record.details.insert("equation".into(), family.equation().to_string());
    let series = match closed_form_coefficients(&family, &v, common.order)? {
        FamilyCoefficients::Root(c) => {
            record.set_coefficients(c.derivs());
            SeriesApproximation::from_derivatives(c.anchor().clone(), v.clone(), c.derivs())
        }
        FamilyCoefficients::Power(c) => {
            record.set_coefficients(c.derivs());
            SeriesApproximation::from_derivatives(c.anchor().clone(), c.leading().clone(), c.derivs())
        }
    };
    record.set_terms(series.terms(), series.partial_sums());
    record.value = Some(series.value().to_string());
    Ok(record)
}
