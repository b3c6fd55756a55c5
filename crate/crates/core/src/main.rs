use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use mldokit::hsd;
use mldokit::mlde;
use mldokit::mldo::{self, det_operator, BasisTag, DetVariant};
use mldokit::parse::{parse_almost, parse_form, parse_operator, parse_series};
use mldokit::qmring::QuasiModularForm as Form;
use mldokit::rational::{format_q, parse_q, Q};
use mldokit::suites;
use mldokit::Error;

#[derive(Parser)]
#[command(name = "mldokit", version, about = "Quasimodular forms and modular differential operators")]
struct Cli {
    /// Truncation order for q-expansions.
    #[arg(long, global = true, env = "MLDOKIT_ORDER", default_value_t = 50)]
    order: usize,

    /// Print a JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    D,
    Serre,
}

#[derive(Clone, Copy, ValueEnum)]
enum Pairing {
    L,
    Lambda,
}

#[derive(Subcommand)]
enum Cmd {
    /// q-expansion of a form.
    Eval { form: String },
    /// Iterated Ramanujan derivative.
    Derive {
        form: String,
        #[arg(long, default_value_t = 1)]
        n: u32,
    },
    /// Primitive projection of a quasimodular or almost holomorphic form.
    Pi { form: String },
    /// Rankin-Cohen and extended-bracket structure of a modular operator.
    Decompose {
        operator: String,
        #[arg(long, default_value = "0")]
        k: String,
    },
    /// Coefficients of an operator in one of the four bases.
    Convert {
        operator: String,
        #[arg(long, default_value = "0")]
        k: String,
        #[arg(long, default_value = "d")]
        basis: String,
    },
    /// Rankin-Cohen bracket of two forms.
    Bracket {
        f: String,
        g: String,
        #[arg(long)]
        n: u32,
        /// Use the extended bracket built from modified derivatives.
        #[arg(long)]
        extended: bool,
        /// Weight parameters, defaulting to the weights of the forms.
        #[arg(long)]
        kappa: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
    },
    /// Kaneko-Koike derivative.
    Kk {
        form: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: Option<String>,
    },
    /// Canonical higher Serre derivative.
    Vz {
        form: String,
        #[arg(long)]
        n: u32,
        #[arg(long)]
        k: Option<String>,
    },
    /// The modular form omega_m.
    Omega { m: u32 },
    /// The pairing {f, F}.
    Pair { f: String, big_f: String },
    /// The operator attached to a quasimodular form.
    Lambda {
        form: String,
        #[arg(long, default_value = "1")]
        k: String,
        #[arg(long, value_enum, default_value_t = Pairing::Lambda)]
        pairing: Pairing,
    },
    /// Indicial roots and Frobenius solutions.
    Solve {
        operator: String,
        #[arg(long, default_value = "0")]
        k: String,
        #[arg(long)]
        alpha: Option<String>,
    },
    /// Kernel of an operator inside M_k.
    Kernel {
        operator: String,
        #[arg(long)]
        k: u32,
    },
    /// Eigenvalues of the Kaneko-Zagier operators on M_k.
    Spectrum {
        #[arg(long)]
        k: u32,
    },
    /// Dimension of the space of modular operators of weight K.
    Dims {
        #[arg(long, default_value = "0")]
        k: String,
        #[arg(long = "K")]
        big_k: u32,
        /// Maximal order, default K/2.
        #[arg(long)]
        n: Option<u32>,
    },
    /// Determinant operator of a list of series.
    Det {
        #[arg(required = true)]
        series: Vec<String>,
        #[arg(long, value_enum, default_value_t = Variant::D)]
        variant: Variant,
        #[arg(long, default_value = "0")]
        k: String,
        #[arg(long)]
        monic: bool,
    },
    /// Run named verification suites (all when none is given).
    Verify { suites: Vec<String> },
}

impl Cmd {
    fn name(&self) -> &'static str {
        match self {
            Cmd::Eval { .. } => "eval",
            Cmd::Derive { .. } => "derive",
            Cmd::Pi { .. } => "pi",
            Cmd::Decompose { .. } => "decompose",
            Cmd::Convert { .. } => "convert",
            Cmd::Bracket { .. } => "bracket",
            Cmd::Kk { .. } => "kk",
            Cmd::Vz { .. } => "vz",
            Cmd::Omega { .. } => "omega",
            Cmd::Pair { .. } => "pair",
            Cmd::Lambda { .. } => "lambda",
            Cmd::Solve { .. } => "solve",
            Cmd::Kernel { .. } => "kernel",
            Cmd::Spectrum { .. } => "spectrum",
            Cmd::Dims { .. } => "dims",
            Cmd::Det { .. } => "det",
            Cmd::Verify { .. } => "verify",
        }
    }
}

enum Fail {
    Usage(String),
    Math(String),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        match e {
            Error::Parse { .. }
            | Error::MixedWeights(..)
            | Error::WeightMismatch(_)
            | Error::InvalidWeight(..)
            | Error::InvalidArgument(_) => Fail::Usage(e.to_string()),
            _ => Fail::Math(e.to_string()),
        }
    }
}

struct Report {
    ok: bool,
    text: String,
    result: Value,
    counterexample: Option<String>,
}

impl Report {
    fn ok(text: impl Into<String>, result: Value) -> Self {
        Report {
            ok: true,
            text: text.into(),
            result,
            counterexample: None,
        }
    }
}

fn rational(s: &str) -> Result<Q, Fail> {
    parse_q(s).map_err(|e| Fail::Usage(format!("bad rational `{s}`: {e}")))
}

fn form(s: &str) -> Result<Form, Fail> {
    Ok(parse_form(s)?)
}

fn weight_param(s: &Option<String>, f: &Form) -> Result<Q, Fail> {
    match s {
        Some(s) => rational(s),
        None => Ok(Q::from_integer(f.weight().into())),
    }
}

fn form_json(f: &Form) -> Value {
    serde_json::to_value(f).expect("forms serialize")
}

fn list(forms: &[Form]) -> String {
    forms.iter().map(|f| f.to_string()).collect::<Vec<_>>().join(", ")
}

fn run(cmd: &Cmd, order: usize) -> Result<Report, Fail> {
    match cmd {
        Cmd::Eval { form: s } => {
            let f = form(s)?;
            let series = f.to_qseries(order);
            Ok(Report::ok(series.to_string(), serde_json::to_value(&series).unwrap()))
        }
        Cmd::Derive { form: s, n } => {
            let d = form(s)?.derivative_n(*n);
            Ok(Report::ok(d.to_string(), form_json(&d)))
        }
        Cmd::Pi { form: s } => {
            if let Ok(f) = parse_form(s) {
                let p = f.primitive_projection();
                return Ok(Report::ok(p.to_string(), form_json(&p)));
            }
            let a = parse_almost(s)?;
            let p = a.projection_hat();
            let mut text = p.form.to_string();
            if p.degenerate {
                text.push_str(" (degenerate: weight 2 with positive Y-degree)");
            }
            Ok(Report::ok(
                text,
                json!({"form": serde_json::to_value(&p.form).unwrap(), "degenerate": p.degenerate}),
            ))
        }
        Cmd::Decompose { operator, k } => {
            let l = parse_operator(operator, &rational(k)?)?;
            let (g, kk) = l.rc_decomposition()?;
            let ext = match l.decompose_ext_rc() {
                Ok(ext) => Some(ext),
                Err(Error::PochhammerZero(_)) => None,
                Err(e) => return Err(e.into()),
            };
            let mut lines = Vec::new();
            if let Some(c) = &kk {
                lines.push(format!("K^{}: {}", l.order(), format_q(c)));
            }
            for (m, gm) in g.iter().enumerate() {
                if !gm.is_zero() {
                    lines.push(format!("[f, {gm}]_{m}"));
                }
            }
            match &ext {
                Some(ext) => lines.extend(ext.iter().map(|(r, gr)| format!("<{gr}, f>_{r}"))),
                None => lines.push("no extended bracket form: k is a non-positive integer".into()),
            }
            Ok(Report::ok(
                lines.join("\n"),
                json!({
                    "kk": kk.as_ref().map(format_q),
                    "rc": g.iter().map(form_json).collect::<Vec<_>>(),
                    "extended": ext.map(|ext| ext.iter().map(|(r, f)| json!({"n": r, "form": form_json(f)})).collect::<Vec<_>>()),
                }),
            ))
        }
        Cmd::Convert { operator, k, basis } => {
            let tag: BasisTag = basis.parse().map_err(|e: Error| Fail::Usage(e.to_string()))?;
            let l = parse_operator(operator, &rational(k)?)?;
            let b = l.to_basis(tag)?;
            Ok(Report::ok(
                list(&b),
                json!({"basis": tag, "coeffs": b.iter().map(form_json).collect::<Vec<_>>()}),
            ))
        }
        Cmd::Bracket {
            f,
            g,
            n,
            extended,
            kappa,
            lambda,
        } => {
            let (f, g) = (form(f)?, form(g)?);
            let kq = weight_param(kappa, &f)?;
            let lq = weight_param(lambda, &g)?;
            let b = if *extended {
                hsd::ext_bracket(&kq, &lq, *n, &f, &g)?
            } else {
                hsd::rc_bracket(&kq, &lq, *n, &f, &g)
            };
            Ok(Report::ok(b.to_string(), form_json(&b)))
        }
        Cmd::Kk { form: s, n, k } => {
            let f = form(s)?;
            let out = hsd::kk(&weight_param(k, &f)?, *n, &f);
            Ok(Report::ok(out.to_string(), form_json(&out)))
        }
        Cmd::Vz { form: s, n, k } => {
            let f = form(s)?;
            let out = hsd::vz(&weight_param(k, &f)?, *n, &f);
            Ok(Report::ok(out.to_string(), form_json(&out)))
        }
        Cmd::Omega { m } => {
            let rows: Vec<(u32, Form)> = (0..=*m).map(|i| (i, hsd::omega(i))).collect();
            let text = rows
                .iter()
                .map(|(i, f)| format!("{i:>3}  {f}"))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report::ok(
                text,
                Value::Array(rows.iter().map(|(_, f)| form_json(f)).collect()),
            ))
        }
        Cmd::Pair { f, big_f } => {
            let out = mldo::pair_braces(&form(f)?, &form(big_f)?)?;
            Ok(Report::ok(out.to_string(), form_json(&out)))
        }
        Cmd::Lambda { form: s, k, pairing } => {
            let f = form(s)?;
            let kq = rational(k)?;
            let l = match pairing {
                Pairing::L => mldo::l_from_qmf(&f, &kq)?,
                Pairing::Lambda => mldo::lambda_from_qmf(&f, &kq)?,
            };
            Ok(Report::ok(l.to_string(), serde_json::to_value(&l).unwrap()))
        }
        Cmd::Solve { operator, k, alpha } => {
            let l = parse_operator(operator, &rational(k)?)?;
            let ind = mlde::indicial_polynomial(&l);
            let roots = match alpha {
                Some(a) => vec![rational(a)?],
                None => mlde::rational_roots(&ind)?,
            };
            let mut text = vec![format!("indicial polynomial: {ind}")];
            let mut sols = Vec::new();
            for a in &roots {
                if sols.iter().any(|s: &mlde::FrobeniusSolution| &s.alpha == a) {
                    continue;
                }
                let s = mlde::frobenius_solve(&l, a, order)?;
                text.push(format!("alpha = {}: {}", format_q(a), s.series));
                sols.push(s);
            }
            Ok(Report::ok(text.join("\n"), serde_json::to_value(&sols).unwrap()))
        }
        Cmd::Kernel { operator, k } => {
            let l = parse_operator(operator, &Q::from_integer((*k).into()))?;
            let ker = mlde::kernel_in_mk(&l, *k, order)?;
            let text = if ker.is_empty() { "0".to_string() } else { list(&ker) };
            Ok(Report::ok(text, Value::Array(ker.iter().map(form_json).collect())))
        }
        Cmd::Spectrum { k } => {
            let spec = mlde::kz_spectrum(*k, order)?;
            let text = spec
                .iter()
                .map(|e| {
                    format!(
                        "n = {}  lambda = {}  q^{}  {}",
                        e.n,
                        format_q(&e.eigenvalue),
                        e.leading_exponent,
                        e.eigenform
                    )
                })
                .collect::<Vec<_>>()
                .join("\n");
            let result = spec
                .iter()
                .map(|e| {
                    json!({
                        "n": e.n,
                        "eigenvalue": format_q(&e.eigenvalue),
                        "leading_exponent": e.leading_exponent,
                        "eigenform": form_json(&e.eigenform),
                    })
                })
                .collect();
            let bad = spec.iter().find(|e| !e.certified());
            Ok(Report {
                ok: bad.is_none(),
                text,
                result: Value::Array(result),
                counterexample: bad.map(|e| {
                    format!("eigenform for n = {} starts at q^{}", e.n, e.leading_exponent)
                }),
            })
        }
        Cmd::Dims { k, big_k, n } => {
            rational(k)?;
            let d = mldo::dim_mldo(*big_k, n.unwrap_or(big_k / 2))?;
            Ok(Report::ok(d.to_string(), json!(d)))
        }
        Cmd::Det {
            series,
            variant,
            k,
            monic,
        } => {
            let basis = series
                .iter()
                .map(|s| parse_series(s, order))
                .collect::<Result<Vec<_>, _>>()?;
            let v = match variant {
                Variant::D => DetVariant::D,
                Variant::Serre => DetVariant::Serre(rational(k)?),
            };
            let c = det_operator(&basis, &v, *monic)?;
            let text = c
                .iter()
                .enumerate()
                .map(|(r, s)| format!("a_{r} = {s}"))
                .collect::<Vec<_>>()
                .join("\n");
            Ok(Report::ok(text, serde_json::to_value(&c).unwrap()))
        }
        Cmd::Verify { suites: names } => {
            let names: Vec<&str> = if names.is_empty() {
                suites::SUITE_NAMES.to_vec()
            } else {
                names.iter().map(String::as_str).collect()
            };
            let mut checks = Vec::new();
            for name in &names {
                match suites::suite(name) {
                    Some(c) => checks.extend(c),
                    None => {
                        return Err(Fail::Usage(format!(
                            "unknown suite `{name}`; known suites: {}",
                            suites::SUITE_NAMES.join(", ")
                        )))
                    }
                }
            }
            let reports = suites::run_parallel(&checks);
            let mut text = Vec::new();
            for r in &reports {
                text.push(r.to_string());
                text.extend(r.detail.iter().map(|d| format!("    {d}")));
            }
            let first = reports.iter().find(|r| !r.passed);
            Ok(Report {
                ok: first.is_none(),
                text: text.join("\n"),
                result: serde_json::to_value(&reports).unwrap(),
                counterexample: first.map(|r| {
                    format!("criterion {}: {}", r.id, r.counterexample.clone().unwrap_or_default())
                }),
            })
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.cmd.name();
    let (report, code) = match run(&cli.cmd, cli.order) {
        Ok(r) => {
            let code = if r.ok { 0 } else { 1 };
            (r, code)
        }
        Err(Fail::Usage(m)) => (
            Report {
                ok: false,
                text: format!("error: {m}"),
                result: Value::Null,
                counterexample: Some(m),
            },
            2,
        ),
        Err(Fail::Math(m)) => (
            Report {
                ok: false,
                text: format!("failed: {m}"),
                result: Value::Null,
                counterexample: Some(m),
            },
            1,
        ),
    };
    if cli.json {
        let v = json!({
            "subcommand": name,
            "ok": report.ok,
            "result": report.result,
            "counterexample": report.counterexample,
        });
        println!("{}", serde_json::to_string_pretty(&v).unwrap());
    } else if code == 0 {
        println!("{}", report.text);
    } else {
        if !report.text.is_empty() && report.result != Value::Null {
            println!("{}", report.text);
        }
        match &report.counterexample {
            Some(c) if report.result != Value::Null => eprintln!("counterexample: {c}"),
            _ => eprintln!("{}", report.text),
        }
    }
    ExitCode::from(code)
}
