//! Command-line frontend: subcommand dispatch, JSON certificate emission,
//! and the replay checker. Results go to stdout, diagnostics to stderr.
//!
//! Exit codes: 0 = True/success, 1 = False (with witness), 2 = Unknown,
//! 3 = usage or parse error, 4 = resource ceiling.

use std::path::PathBuf;
use std::sync::Arc;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::cert::{
    replay_doc, Certificate, CertificateDoc, ElemDoc, SearchBounds, TruthValue, WitnessDoc,
    TOOL_NAME, TOOL_VERSION,
};
use crate::decide::{build_torus_map, check_unit_additive, Hints};
use crate::error::{Result, UnitalError};
use crate::finite;
use crate::parse;
use crate::poly::MonomialOrder;
use crate::ring::{classify_unit_sum, RingPresentation, SumClass};
use crate::tower::{self, TowerBounds};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OrderArg {
    Grevlex,
    Lex,
}

#[derive(Debug, Parser)]
#[command(name = TOOL_NAME, version = TOOL_VERSION, about = "unit-additivity toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// emit stable JSON instead of text
    #[arg(long, global = true)]
    pub json: bool,
    /// monomial order for presentations
    #[arg(long, global = true, value_enum, default_value_t = OrderArg::Grevlex)]
    pub order: OrderArg,
    #[arg(long = "bound-summands", global = true, default_value_t = 2)]
    pub bound_summands: usize,
    #[arg(long = "bound-degree", global = true, default_value_t = 2)]
    pub bound_degree: u32,
    #[arg(long = "bound-terms", global = true, default_value_t = 2)]
    pub bound_terms: usize,
    #[arg(long = "bound-candidates", global = true, default_value_t = 5000)]
    pub bound_candidates: usize,
    /// tower level cap
    #[arg(long, global = true, default_value_t = 8)]
    pub levels: usize,
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// JSON hint file: {"embedding": {var: poly}, "weights": [ints]}
    #[arg(long, global = true)]
    pub hint: Option<PathBuf>,
    /// skip the certificate rules and run the counterexample search only
    #[arg(long = "search-only", global = true)]
    pub search_only: bool,
    /// rayon thread count for the finite audit
    #[arg(long, global = true)]
    pub threads: Option<usize>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// decide unit-additivity of a presented ring
    CheckUa { ring: String },
    /// exact unit test with certificate
    IsUnit { ring: String, element: String },
    /// classify the sum of two units
    ClassifySum { ring: String, u: String, v: String },
    /// unit-additivity dimension with certified bounds
    Udim { ring: String },
    /// unit-additive closure as a localization
    Closure { ring: String },
    /// kernel and injectivity of the map k[t,1/t] -> R, t -> IMAGE
    Kernel { ring: String, image: String },
    /// verify the chain-ring isomorphism round trip
    ChainIso { n: u32 },
    /// run the brute-force audits over the finite-ring corpus
    FiniteAudit {
        #[arg(long, default_value = "standard")]
        corpus: String,
        #[arg(long, value_enum, default_value_t = AuditFormat::Json)]
        format: AuditFormat,
    },
    /// re-verify an emitted certificate file
    Replay { file: PathBuf },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AuditFormat {
    Json,
    Csv,
}

impl Cli {
    fn bounds(&self) -> SearchBounds {
        SearchBounds {
            max_summands: self.bound_summands,
            max_degree: self.bound_degree,
            max_terms: self.bound_terms,
            max_candidates: self.bound_candidates,
            seed: self.seed,
        }
    }

    fn tower_bounds(&self) -> TowerBounds {
        TowerBounds { levels: self.levels, search: self.bounds(), ..TowerBounds::default() }
    }

    fn load_hints(&self) -> Result<Hints> {
        match &self.hint {
            None => Ok(Hints::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)
                    .map_err(|e| UnitalError::Io(format!("{}: {}", path.display(), e)))?;
                serde_json::from_str(&text)
                    .map_err(|e| UnitalError::HintRejected(format!("bad hint file: {}", e)))
            }
        }
    }

    fn ring(&self, text: &str) -> Result<Arc<RingPresentation>> {
        let expr = parse::parse_ring(text)?;
        let order = match self.order {
            OrderArg::Grevlex => MonomialOrder::GrevLex,
            OrderArg::Lex => MonomialOrder::Lex,
        };
        parse::elaborate_with_order(&expr, order)
    }
}

fn doc(
    query: &str,
    pres: &RingPresentation,
    verdict: TruthValue,
    rule: &str,
    bounds: SearchBounds,
    hint_errors: Vec<String>,
    witness: Option<WitnessDoc>,
    certificate: Option<Certificate>,
) -> CertificateDoc {
    CertificateDoc {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        query: query.to_string(),
        ring: parse::print_presentation(pres),
        prime_asserted: pres.prime_asserted(),
        verdict,
        rule: rule.to_string(),
        bounds,
        hint_errors,
        witness,
        certificate,
    }
}

#[derive(Debug, Serialize)]
struct UdimOutput {
    tool: String,
    version: String,
    query: String,
    ring: String,
    exact: Option<usize>,
    lower: usize,
    upper: Option<usize>,
    resource: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    closure: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    fraction_field: Option<String>,
    levels: Vec<CertificateDoc>,
}

#[derive(Debug, Serialize)]
struct KernelOutput {
    tool: String,
    version: String,
    query: String,
    ring: String,
    image: ElemDoc,
    kernel: Vec<String>,
    injective: bool,
    unit_certificate: Certificate,
}

/// Run one command; returns (exit code, stdout payload).
pub fn execute(cli: &Cli) -> Result<(i32, String)> {
    if let Some(n) = cli.threads {
        // best effort: the global pool can only be set once per process
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    match &cli.command {
        Command::CheckUa { ring } => {
            let pres = cli.ring(ring)?;
            let hints = cli.load_hints()?;
            let out = check_unit_additive(&pres, &cli.bounds(), &hints, cli.search_only)?;
            for e in &out.hint_errors {
                eprintln!("hint rejected: {}", e);
            }
            let witness = out.witness.map(|(u, v, sum)| WitnessDoc { u, v, sum });
            let d = doc(
                "check-ua",
                &pres,
                out.verdict.value,
                &out.verdict.rule,
                out.verdict.bounds.clone(),
                out.hint_errors.clone(),
                witness,
                out.verdict.certificate.clone(),
            );
            let code = out.verdict.value.exit_code();
            if cli.json {
                Ok((code, d.to_json()))
            } else {
                let mut s = format!("{}: {:?} (rule: {})", ring, d.verdict, d.rule);
                if let Some(w) = &d.witness {
                    s.push_str(&format!(
                        "\nwitness: u = {}, v = {}, sum = {}",
                        w.u.num, w.v.num, w.sum.num
                    ));
                }
                Ok((code, s))
            }
        }
        Command::IsUnit { ring, element } => {
            let pres = cli.ring(ring)?;
            let elem = parse::parse_element(&pres, element)?;
            let dec = elem.is_unit()?;
            let verdict = if dec.unit { TruthValue::True } else { TruthValue::False };
            let d = doc(
                "is-unit",
                &pres,
                verdict,
                "unit-test",
                cli.bounds(),
                Vec::new(),
                None,
                Some(dec.cert),
            );
            let code = verdict.exit_code();
            if cli.json {
                Ok((code, d.to_json()))
            } else {
                Ok((code, format!("{} in {}: {:?}", element, ring, verdict)))
            }
        }
        Command::ClassifySum { ring, u, v } => {
            let pres = cli.ring(ring)?;
            let eu = parse::parse_element(&pres, u)?;
            let ev = parse::parse_element(&pres, v)?;
            let class = classify_unit_sum(&eu, &ev)?;
            let (verdict, code) = match class.class {
                SumClass::Unit => (TruthValue::True, 0),
                SumClass::Nilpotent => (TruthValue::True, 0),
                SumClass::Neither => (TruthValue::False, 1),
            };
            let witness = Some(WitnessDoc { u: eu.to_doc(), v: ev.to_doc(), sum: class.sum.to_doc() });
            let d = doc(
                "classify-sum",
                &pres,
                verdict,
                &format!("{:?}", class.class),
                cli.bounds(),
                Vec::new(),
                witness,
                class.certificate,
            );
            if cli.json {
                Ok((code, d.to_json()))
            } else {
                Ok((
                    code,
                    format!("({}) + ({}) in {}: {:?}", u, v, ring, class.class),
                ))
            }
        }
        Command::Udim { ring } => {
            let pres = cli.ring(ring)?;
            let result = tower::udim(&pres, &cli.tower_bounds())?;
            let out = udim_output("udim", ring, &result, None, None);
            let code = udim_exit(&result);
            render_udim(cli.json, out, &result, code)
        }
        Command::Closure { ring } => {
            let pres = cli.ring(ring)?;
            let closure = tower::ua_closure(&pres, &cli.tower_bounds())?;
            let closure_desc = closure.closure.as_ref().map(|c| parse::print_presentation(c));
            let out = udim_output(
                "closure",
                ring,
                &closure.udim,
                closure_desc,
                closure.fraction_field.clone(),
            );
            let code = udim_exit(&closure.udim);
            render_udim(cli.json, out, &closure.udim, code)
        }
        Command::Kernel { ring, image } => {
            let pres = cli.ring(ring)?;
            let elem = parse::parse_element(&pres, image)?;
            let tm = build_torus_map(&pres, &elem)?;
            let out = KernelOutput {
                tool: TOOL_NAME.to_string(),
                version: TOOL_VERSION.to_string(),
                query: "kernel".to_string(),
                ring: parse::print_presentation(&pres),
                image: tm.image_of_t.clone(),
                kernel: tm.kernel.clone(),
                injective: tm.injective,
                unit_certificate: tm.unit_certificate.clone(),
            };
            let code = if tm.injective { 0 } else { 1 };
            if cli.json {
                Ok((code, serde_json::to_string_pretty(&out).expect("json")))
            } else {
                let kern = if tm.kernel.is_empty() {
                    "0".to_string()
                } else {
                    format!("({})", tm.kernel.join(", "))
                };
                Ok((
                    code,
                    format!(
                        "t -> {} in {}: kernel {}, injective: {}",
                        image, ring, kern, tm.injective
                    ),
                ))
            }
        }
        Command::ChainIso { n } => {
            let report = tower::chain_iso(*n, &crate::scalar::FieldDesc::rational())?;
            if cli.json {
                Ok((0, serde_json::to_string_pretty(&report).expect("json")))
            } else {
                let mut s = format!("chain({}) round trip:", n);
                for (id, ok) in &report.identities {
                    s.push_str(&format!("\n  {}: {}", id, if *ok { "ok" } else { "FAILED" }));
                }
                Ok((0, s))
            }
        }
        Command::FiniteAudit { corpus, format } => {
            let descs = match corpus.as_str() {
                "standard" => finite::standard_corpus(),
                "small" => finite::small_corpus(),
                other => {
                    return Err(UnitalError::Unsupported(format!("unknown corpus {}", other)))
                }
            };
            let report = finite::run_corpus_audits(&descs);
            let code = if report.violations.is_empty() { 0 } else { 1 };
            match format {
                AuditFormat::Json => {
                    Ok((code, serde_json::to_string_pretty(&report).expect("json")))
                }
                AuditFormat::Csv => {
                    let mut s = String::from("ring,audit,detail");
                    for v in &report.violations {
                        s.push_str(&format!(
                            "\n{},{},{}",
                            v.ring,
                            v.audit,
                            v.detail.replace(',', ";")
                        ));
                    }
                    Ok((code, s))
                }
            }
        }
        Command::Replay { file } => {
            let text = std::fs::read_to_string(file)
                .map_err(|e| UnitalError::Io(format!("{}: {}", file.display(), e)))?;
            replay_json(&text)?;
            Ok((0, "replay ok".to_string()))
        }
    }
}

/// Replay a JSON document: either a single certificate document or a
/// dimension output with embedded per-level documents.
pub fn replay_json(text: &str) -> Result<()> {
    let value: serde_json::Value = serde_json::from_str(text)
        .map_err(|e| UnitalError::Parse { line: 1, col: 1, msg: e.to_string() })?;
    if let Some(levels) = value.get("levels").and_then(|l| l.as_array()) {
        for level in levels {
            let doc: CertificateDoc = serde_json::from_value(level.clone())
                .map_err(|e| UnitalError::Parse { line: 1, col: 1, msg: e.to_string() })?;
            if doc.certificate.is_some() {
                replay_doc(&doc)?;
            }
        }
        return Ok(());
    }
    let doc: CertificateDoc = serde_json::from_value(value)
        .map_err(|e| UnitalError::Parse { line: 1, col: 1, msg: e.to_string() })?;
    replay_doc(&doc)
}

fn udim_output(
    query: &str,
    ring: &str,
    result: &tower::UdimResult,
    closure: Option<String>,
    fraction_field: Option<String>,
) -> UdimOutput {
    let levels = result
        .levels
        .iter()
        .map(|l| CertificateDoc {
            tool: TOOL_NAME.to_string(),
            version: TOOL_VERSION.to_string(),
            query: format!("{}-level-{}", query, l.index),
            ring: l.ring.clone(),
            prime_asserted: true,
            verdict: l.verdict.value,
            rule: l.verdict.rule.clone(),
            bounds: l.verdict.bounds.clone(),
            hint_errors: Vec::new(),
            witness: l.witness.clone().map(|(u, v, sum)| WitnessDoc { u, v, sum }),
            certificate: l.verdict.certificate.clone(),
        })
        .collect();
    UdimOutput {
        tool: TOOL_NAME.to_string(),
        version: TOOL_VERSION.to_string(),
        query: query.to_string(),
        ring: ring.to_string(),
        exact: result.exact,
        lower: result.lower,
        upper: result.upper,
        resource: result.resource.clone(),
        closure,
        fraction_field,
        levels,
    }
}

fn udim_exit(result: &tower::UdimResult) -> i32 {
    if result.exact.is_some() {
        0
    } else if result.resource.is_some() {
        4
    } else {
        2
    }
}

fn render_udim(
    json: bool,
    out: UdimOutput,
    result: &tower::UdimResult,
    code: i32,
) -> Result<(i32, String)> {
    if json {
        return Ok((code, serde_json::to_string_pretty(&out).expect("json")));
    }
    let mut s = match result.exact {
        Some(n) => format!("udim = {}", n),
        None => match result.upper {
            Some(u) => format!("udim in [{}, {}]", result.lower, u),
            None => format!("udim >= {} (unknown above)", result.lower),
        },
    };
    for l in &result.levels {
        s.push_str(&format!(
            "\n  level {}: {} -> {:?} (rule: {})",
            l.index, l.ring, l.verdict.value, l.verdict.rule
        ));
    }
    if let Some(c) = &out.closure {
        s.push_str(&format!("\nclosure: {}", c));
    }
    if let Some(f) = &out.fraction_field {
        s.push_str(&format!("\nfraction field: {}", f));
    }
    if let Some(r) = &result.resource {
        s.push_str(&format!("\nresource ceiling: {}", r));
    }
    Ok((code, s))
}

/// Entry point shared by the binary: parse arguments, run, print, and map
/// errors to exit codes.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            // clap renders its own help/version on stdout with success
            let code = if e.use_stderr() { 3 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok((code, out)) => {
            println!("{}", out);
            code
        }
        Err(UnitalError::Resource(msg)) => {
            eprintln!("resource ceiling: {}", msg);
            4
        }
        Err(UnitalError::ReplayFailed(msg)) => {
            eprintln!("replay failed: {}", msg);
            1
        }
        Err(e) => {
            eprintln!("error: {}", e);
            3
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> (i32, String) {
        let cli = Cli::try_parse_from(args).expect("parse");
        execute(&cli).expect("execute")
    }

    #[test]
    fn check_ua_exit_codes() {
        let (code, _) = run(&["unital", "check-ua", "Q[x]"]);
        assert_eq!(code, 0);
        let (code, out) = run(&["unital", "check-ua", "Q[x,y]/(y^2-x*y-1)"]);
        assert_eq!(code, 1);
        assert!(out.contains("witness"));
    }

    #[test]
    fn json_output_replays() {
        let (_, out) = run(&["unital", "check-ua", "Q[x,y]/(y^2-x*y-1)", "--json"]);
        replay_json(&out).unwrap();
        let (_, out) = run(&["unital", "is-unit", "Q[x][1/x]", "x", "--json"]);
        replay_json(&out).unwrap();
    }

    #[test]
    fn classify_sum_command() {
        let (code, out) = run(&["unital", "classify-sum", "Q[x][1/x]", "x", "1"]);
        assert_eq!(code, 1);
        assert!(out.contains("Neither"));
        let (code, _) = run(&["unital", "classify-sum", "ZZ", "1", "-1"]);
        assert_eq!(code, 0);
    }

    #[test]
    fn udim_command() {
        let (code, out) = run(&["unital", "udim", "ZZ", "--json"]);
        assert_eq!(code, 0);
        assert!(out.contains("\"exact\": 1"));
        replay_json(&out).unwrap();
    }

    #[test]
    fn kernel_command() {
        let (code, _) = run(&["unital", "kernel", "Q[x,y]/(y^2-x*y-1)", "y"]);
        assert_eq!(code, 0);
        let (code, out) = run(&["unital", "kernel", "Q[x]", "3"]);
        assert_eq!(code, 1);
        assert!(out.contains("t-3"));
    }

    #[test]
    fn parse_errors_are_usage_errors() {
        let cli = Cli::try_parse_from(["unital", "check-ua", "Q[x]/("]).unwrap();
        let err = execute(&cli).unwrap_err();
        assert!(matches!(err, UnitalError::Parse { col: 7, .. }));
    }

    #[test]
    fn deterministic_output_same_seed() {
        let a = run(&["unital", "check-ua", "Q[x,y]/(y^2-x*y-1)", "--json", "--seed", "7"]);
        let b = run(&["unital", "check-ua", "Q[x,y]/(y^2-x*y-1)", "--json", "--seed", "7"]);
        assert_eq!(a, b);
    }
}
