//! The single-shot subcommands: `invariants` (one extension) and `pairing`
//! (one ⟨α, β⟩ evaluation).

use std::process::ExitCode;

use ramify::parse::{format_element, parse_element};
use ramify::report::{RunHeader, SCHEMA_VERSION};
use ramify::{oracle_precision_floor, Error, Field, PadicElement, Result};

use crate::verify::{compute_one, to_json};
use crate::{
    emit, load_field, open_sink, InvariantsArgs, PairingArgs, EXIT_PRECISION, EXIT_VIOLATION,
};

pub fn run_invariants(args: &InvariantsArgs) -> Result<ExitCode> {
    let field = load_field(&args.field)?;
    let rho1 = parse_element(&field, &args.rho1)?;
    let rho2 = parse_element(&field, &args.rho2)?;
    let spec = field.validate_spec(&rho1, &rho2)?;
    if args.oracle {
        let floor = oracle_precision_floor(field.p, field.e, spec.b);
        if field.n_prec < floor {
            return Err(Error::precision(format!(
                "the tower oracle needs precision ≥ {floor} for break b = {} on this field \
                 (have {}); rerun with --precision {floor}",
                spec.b, field.n_prec
            )));
        }
    }
    let pm = field.pm_level()?;
    let r1 = format_element(&field, &spec.rho1, pm + 1)?;
    let r2 = format_element(&field, &spec.rho2, pm + 1)?;
    let report = compute_one(&field, &spec, &r1, &r2, args.oracle)?;

    let mut w = open_sink(&args.output.out)?;
    if args.output.pretty {
        emit(
            w.as_mut(),
            &format!(
                "field: p={} f={} e={} precision={}",
                field.p, field.f, field.e, field.n_prec
            ),
        )?;
        emit(w.as_mut(), &format!("rho1 = {r1}"))?;
        emit(w.as_mut(), &format!("rho2 = {r2}"))?;
        emit(w.as_mut(), &format!("b  = {}", report.b))?;
        emit(w.as_mut(), &format!("j0 = {}", report.j0))?;
        emit(w.as_mut(), &format!("k  = {}", report.k))?;
        emit(w.as_mut(), &format!("i1 = {}", report.i1))?;
        emit(w.as_mut(), &format!("t  = {}", report.t))?;
        emit(w.as_mut(), &format!("t' = {}", report.t_prime))?;
        emit(w.as_mut(), &format!("b* = {}", report.b_star))?;
        if let Some(or) = &report.oracle {
            emit(
                w.as_mut(),
                &format!(
                    "oracle: b={} i0={} i1={} i2={} i1'={} b*={}",
                    or.b, or.i0, or.i1, or.i2, or.i1_minpoly, or.b_star
                ),
            )?;
        }
        if report.degenerate {
            emit(w.as_mut(), "main theorem not applicable (i₁ = p²b − pb)")?;
        } else {
            emit(w.as_mut(), &format!("verdict: {}", report.verdict))?;
        }
        for n in &report.notes {
            emit(w.as_mut(), &format!("note: {n}"))?;
        }
    } else {
        let header = RunHeader::new("invariants", &field, None, None, args.oracle);
        emit(w.as_mut(), &to_json(&header)?)?;
        emit(w.as_mut(), &to_json(&report)?)?;
    }
    w.flush()
        .map_err(|e| Error::config(format!("cannot flush output: {e}")))?;

    Ok(match report.verdict.as_str() {
        "FAILED" => ExitCode::from(EXIT_VIOLATION),
        "error" => ExitCode::from(EXIT_PRECISION),
        _ => ExitCode::SUCCESS,
    })
}

pub fn run_pairing(args: &PairingArgs) -> Result<ExitCode> {
    let field = load_field(&args.field)?;
    let alpha = parse_element(&field, &args.alpha)?;
    let beta = parse_element(&field, &args.beta)?;
    ensure_principal_unit(&field, "alpha", &alpha)?;
    ensure_principal_unit(&field, "beta", &beta)?;
    let exponent = field.pairing(&alpha, &beta)?;

    let mut w = open_sink(&args.output.out)?;
    if args.output.pretty {
        emit(w.as_mut(), &format!("⟨α, β⟩ = ζ_{}^{}", field.p, exponent))?;
        emit(w.as_mut(), &format!("exponent = {exponent}"))?;
    } else {
        let obj = serde_json::json!({
            "schema": SCHEMA_VERSION,
            "kind": "pairing",
            "p": field.p,
            "alpha": args.alpha,
            "beta": args.beta,
            "exponent": exponent,
            "value": format!("zeta_{}^{}", field.p, exponent),
        });
        emit(w.as_mut(), &obj.to_string())?;
    }
    w.flush()
        .map_err(|e| Error::config(format!("cannot flush output: {e}")))?;
    Ok(ExitCode::SUCCESS)
}

/// The pairing is defined on principal units: x ≡ 1 mod π. Anything else is
/// rejected up front with a configuration error.
fn ensure_principal_unit(field: &Field, name: &str, x: &PadicElement) -> Result<()> {
    let diff = field.sub(x, &field.one());
    match field.val(&diff) {
        None => Ok(()), // x = 1 to working precision
        Some(v) if v >= 1 => Ok(()),
        Some(v) => Err(Error::config(format!(
            "{name} is not a principal unit: v({name} − 1) = {v} < 1"
        ))),
    }
}
