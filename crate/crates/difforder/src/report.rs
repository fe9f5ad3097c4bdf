//! The report document.
//!
//! Everything the engine concluded about one system, in a form that is
//! deterministic byte for byte: exact values are rendered through their
//! canonical `Display` forms (which the parser maps back to the same
//! objects), maps are ordered, and the field layout is fixed.  The same
//! document drives both the JSON output and the human rendering, and
//! [`reverify`] rebuilds the mathematical objects from their strings and
//! re-runs the exact checks — so a report is not just a claim, it is a
//! certificate that travels.

use serde::{Deserialize, Serialize};

use crate::classifier::{Classification, SearchBounds, Verdict};
use crate::parse::{parse_ratfunc, parse_system, ParseError};
use crate::rat::{parse_rat, to_f64, Rat};
use crate::series::radius_hint;
use crate::vectorfield::{BChain, VectorField};
use crate::witness::Witness;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SystemSection {
    pub x1: String,
    pub x2: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundsSection {
    pub num_deg: u32,
    pub n_range: i64,
    pub max_denom_power: u32,
    pub darboux_deg: u32,
    pub cofactor_height: u64,
    pub series_order: u32,
    pub trials: u32,
    pub seed: u64,
}

impl From<&SearchBounds> for BoundsSection {
    fn from(b: &SearchBounds) -> BoundsSection {
        BoundsSection {
            num_deg: b.num_deg,
            n_range: b.n_range,
            max_denom_power: b.max_denom_power,
            darboux_deg: b.darboux_deg,
            cofactor_height: b.cofactor_height,
            series_order: b.series_order,
            trials: b.trials,
            seed: b.seed,
        }
    }
}

impl From<&BoundsSection> for SearchBounds {
    fn from(b: &BoundsSection) -> SearchBounds {
        SearchBounds {
            num_deg: b.num_deg,
            n_range: b.n_range,
            max_denom_power: b.max_denom_power,
            darboux_deg: b.darboux_deg,
            cofactor_height: b.cofactor_height,
            series_order: b.series_order,
            trials: b.trials,
            seed: b.seed,
        }
    }
}

/// The witness function(s), each rendered canonically, plus the defining
/// identity it satisfies and the template it makes invariant.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessSection {
    pub kind: String,
    /// `w` for order 0, `a` otherwise.
    pub value: String,
    /// Present only for order 1.
    pub n: Option<i64>,
    /// The identity the value satisfies, e.g. `X(a) = n*b0*a`.
    pub identity: String,
    /// The invariant differential polynomial built from the value.
    pub template: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FactorSection {
    pub kind: String,
    pub display: String,
    /// Defining data: `base`/`n` for the power form, `dx1`/`dx2` for the
    /// exponential form.
    pub data: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CurveSection {
    pub p: String,
    pub cofactor: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ChainSection {
    pub b0: String,
    pub b1: String,
    pub b2: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExclusionSection {
    pub order: u8,
    pub reason: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckSection {
    pub name: String,
    pub passed: bool,
    pub advisory: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SeriesSection {
    pub base: [String; 2],
    pub truncation: u32,
    /// The two right-hand sides of the compatible system for `u`.
    pub f: String,
    pub g: String,
    /// `[m, n, value]` triples, ordered by `(m, n)`; zeros omitted.
    pub coefficients: Vec<(u32, u32, String)>,
    pub radius_hint: Option<f64>,
}

/// The complete machine-readable result.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReportDocument {
    pub schema: String,
    pub system: SystemSection,
    pub bounds: BoundsSection,
    pub verdict: String,
    pub witness: Option<WitnessSection>,
    pub integrating_factor: Option<FactorSection>,
    pub invariant_curves: Vec<CurveSection>,
    pub chain: ChainSection,
    pub exclusions: Vec<ExclusionSection>,
    pub checks: Vec<CheckSection>,
    pub series: Option<SeriesSection>,
}

fn witness_section(w: &Witness) -> WitnessSection {
    let template = w.template().to_string();
    match w {
        Witness::FirstIntegral { w } => WitnessSection {
            kind: "first_integral".to_string(),
            value: w.to_string(),
            n: None,
            identity: "X(w) = 0".to_string(),
            template,
        },
        Witness::Order1 { a, n } => WitnessSection {
            kind: "order_1".to_string(),
            value: a.to_string(),
            n: Some(*n),
            identity: format!("X(a) = n*b0*a with n = {n}"),
            template,
        },
        Witness::Order2 { a } => WitnessSection {
            kind: "order_2".to_string(),
            value: a.to_string(),
            n: None,
            identity: "X(a) = b0*a + b1".to_string(),
            template,
        },
        Witness::Order3 { a } => WitnessSection {
            kind: "order_3".to_string(),
            value: a.to_string(),
            n: None,
            identity: "X(a) = 2*b0*a + b2".to_string(),
            template,
        },
    }
}

/// Assembles the document for one classification run.
pub fn build_report(
    field: &VectorField,
    bounds: &SearchBounds,
    out: &Classification,
) -> ReportDocument {
    let witness = match &out.verdict {
        Verdict::Finite(w) => Some(witness_section(w)),
        Verdict::AtLeastFourWithinBounds => None,
    };
    let integrating_factor = out.integrating_factor.as_ref().map(|f| {
        use crate::witness::IntegratingFactor;
        match f {
            IntegratingFactor::PowerOverX1 { base, n, x1 } => FactorSection {
                kind: "power_over_x1".to_string(),
                display: f.to_string(),
                data: vec![
                    ("base".to_string(), base.to_string()),
                    ("n".to_string(), n.to_string()),
                    ("x1".to_string(), x1.to_string()),
                ],
            },
            IntegratingFactor::ExponentialOverX1 { dx1, dx2, x1 } => FactorSection {
                kind: "exponential_over_x1".to_string(),
                display: f.to_string(),
                data: vec![
                    ("dx1".to_string(), dx1.to_string()),
                    ("dx2".to_string(), dx2.to_string()),
                    ("x1".to_string(), x1.to_string()),
                ],
            },
        }
    });
    let mut chain = BChain::new(field);
    let series = out.series.as_ref().map(|sol| {
        let sys = out
            .series_system
            .as_ref()
            .expect("series data always carries its system");
        SeriesSection {
            base: [sol.base.0.to_string(), sol.base.1.to_string()],
            truncation: sol.trunc,
            f: sys.f.to_string(),
            g: sys.g.to_string(),
            coefficients: sol
                .coeffs
                .iter()
                .map(|(&(m, n), v)| (m, n, v.to_string()))
                .collect(),
            radius_hint: radius_hint(sol),
        }
    });
    ReportDocument {
        schema: "v1".to_string(),
        system: SystemSection {
            x1: field.x1().to_string(),
            x2: field.x2().to_string(),
        },
        bounds: bounds.into(),
        verdict: out.verdict.label(),
        witness,
        integrating_factor,
        invariant_curves: out
            .generators
            .iter()
            .map(|g| CurveSection {
                p: g.p.to_string(),
                cofactor: g.cofactor.to_string(),
            })
            .collect(),
        chain: ChainSection {
            b0: chain.get(0).to_string(),
            b1: chain.get(1).to_string(),
            b2: chain.get(2).to_string(),
        },
        exclusions: out
            .exclusions
            .iter()
            .map(|e| ExclusionSection {
                order: e.order,
                reason: e.reason.clone(),
            })
            .collect(),
        checks: out
            .checks
            .iter()
            .map(|c| CheckSection {
                name: c.name.clone(),
                passed: c.passed,
                advisory: c.advisory,
                detail: c.detail.clone(),
            })
            .collect(),
        series,
    }
}

/// Canonical JSON rendering: fixed field order, two-space indentation,
/// trailing newline.
pub fn to_json(doc: &ReportDocument) -> String {
    let mut s = serde_json::to_string_pretty(doc).expect("document serializes");
    s.push('\n');
    s
}

pub fn from_json(s: &str) -> Result<ReportDocument, serde_json::Error> {
    serde_json::from_str(s)
}

/// Rebuilds the mathematical objects from their rendered strings and
/// re-runs the exact checks: the witness identity and template invariance,
/// the invariant-curve equations, and the derivative-chain values.  A
/// report that passes is self-certifying; tampering with any string breaks
/// it.
pub fn reverify(doc: &ReportDocument) -> Result<bool, ParseError> {
    let field = parse_system(&format!(
        "x1' = {}\nx2' = {}\n",
        doc.system.x1, doc.system.x2
    ))?;

    if let Some(ws) = &doc.witness {
        let value = parse_ratfunc(&ws.value)?;
        let witness = match ws.kind.as_str() {
            "first_integral" => Witness::FirstIntegral { w: value },
            "order_1" => Witness::Order1 {
                a: value,
                n: ws.n.unwrap_or(0),
            },
            "order_2" => Witness::Order2 { a: value },
            "order_3" => Witness::Order3 { a: value },
            _ => {
                return Err(ParseError {
                    line: 1,
                    col: 1,
                    message: format!("unknown witness kind '{}'", ws.kind),
                })
            }
        };
        if !witness.verify(&field) {
            return Ok(false);
        }
    }

    for c in &doc.invariant_curves {
        let p = crate::parse::parse_poly(&c.p)?;
        let k = crate::parse::parse_poly(&c.cofactor)?;
        if field.apply_poly(&p) != &p * &k {
            return Ok(false);
        }
    }

    let mut chain = BChain::new(&field);
    for (i, s) in [&doc.chain.b0, &doc.chain.b1, &doc.chain.b2]
        .into_iter()
        .enumerate()
    {
        if chain.get(i) != parse_ratfunc(s)? {
            return Ok(false);
        }
    }

    Ok(true)
}

/// Plain-text rendering of the same document.
pub fn render_human(doc: &ReportDocument) -> String {
    let mut out = String::new();
    let mut line = |s: String| {
        out.push_str(&s);
        out.push('\n');
    };
    line("system:".to_string());
    line(format!("  x1' = {}", doc.system.x1));
    line(format!("  x2' = {}", doc.system.x2));
    match doc.verdict.as_str() {
        "at_least_4_within_bounds" => line("verdict: order at least 4 within bounds".to_string()),
        v => line(format!("verdict: order {v}")),
    }
    if let Some(w) = &doc.witness {
        line(format!("witness ({}):", w.kind));
        let name = if w.kind == "first_integral" { "w" } else { "a" };
        line(format!("  {name} = {}", w.value));
        line(format!("  satisfies {}", w.identity));
        line(format!("  invariant template: {}", w.template));
    }
    if let Some(f) = &doc.integrating_factor {
        line(format!("integrating factor: {}", f.display));
        for (k, v) in &f.data {
            line(format!("  {k} = {v}"));
        }
    }
    line("derivative chain:".to_string());
    line(format!("  b0 = {}", doc.chain.b0));
    line(format!("  b1 = {}", doc.chain.b1));
    line(format!("  b2 = {}", doc.chain.b2));
    if doc.invariant_curves.is_empty() {
        line(format!(
            "invariant curves: none up to degree {}",
            doc.bounds.darboux_deg
        ));
    } else {
        line("invariant curves (X p = K p):".to_string());
        for c in &doc.invariant_curves {
            line(format!("  p = {}, K = {}", c.p, c.cofactor));
        }
    }
    if let Some(s) = &doc.series {
        line(format!(
            "series for u at base ({}, {}), truncated past total degree {}:",
            s.base[0], s.base[1], s.truncation
        ));
        line(format!("  d1(u) = f(x1, x2, u) with f = {}", s.f));
        line(format!("  d2(u) = g(x1, x2, u) with g = {}", s.g));
        let shown: Vec<String> = s
            .coefficients
            .iter()
            .take(12)
            .map(|(m, n, v)| format!("u[{m},{n}] = {v}"))
            .collect();
        if !shown.is_empty() {
            line(format!("  {}", shown.join(", ")));
        }
        if s.coefficients.len() > 12 {
            line(format!(
                "  ... {} more nonzero coefficient(s)",
                s.coefficients.len() - 12
            ));
        }
        if let Some(r) = s.radius_hint {
            line(format!("  advisory radius estimate: {r:.3}"));
        }
    }
    if !doc.exclusions.is_empty() {
        line("excluded orders:".to_string());
        for e in &doc.exclusions {
            line(format!("  order {}: {}", e.order, e.reason));
        }
    }
    line("checks:".to_string());
    for c in &doc.checks {
        let tag = match (c.passed, c.advisory) {
            (true, false) => "pass",
            (false, false) => "FAIL",
            (true, true) => "pass (advisory)",
            (false, true) => "note (advisory)",
        };
        line(format!("  [{tag}] {}: {}", c.name, c.detail));
    }
    out
}

/// Parses the rational scalar strings used in series sections.
pub fn parse_series_value(s: &str) -> Option<Rat> {
    parse_rat(s)
}

/// Floating-point view of a series coefficient, for consumers that plot.
pub fn series_value_f64(s: &str) -> Option<f64> {
    parse_rat(s).map(|r| to_f64(&r))
}
