use std::f64::consts::{PI, SQRT_2};
use std::fmt::Write as _;
use std::path::Path;

use modheat_core::finite::ConjectureRow;
use modheat_core::gamma::{gamma_ball, pi_quotient};
use modheat_core::graph::{degree_transfer_check, is_covering, meq_check, MeqMode};
use modheat_core::kernel::{adjudicate, kernel_gamma_many, kernel_transfer_many, mass, LineOracle, PrefactorReading};
use modheat_core::line::{apply_stencil, line_weight, LineWindow};
use modheat_core::psl::is_prime;
use modheat_core::spectral::{
    completeness_entries, discrete_eigenvalue, eval_discrete, eval_generalized, lambda_of, Sign,
};
use modheat_core::{genus, spectrum, spectrum_of, VertexMap, DEFAULT_VERTEX_BUDGET};
use serde::Serialize;

use crate::config::{OutputFormat, RunConfig};
use crate::CliError;

/// Largest finite quotient the dense eigensolver is asked to handle.
pub const FINITE_BUDGET: usize = 2000;

/// Threshold on `abs_err` above which `heat` reports a violation.
pub const HEAT_TOL: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Status {
    Pass,
    Violation,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Output {
    pub text: String,
    pub status: Status,
}

fn json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("report types serialize");
    s.push('\n');
    s
}

fn sci(x: f64) -> String {
    format!("{x:.15e}")
}

/// Parses `a..b` (inclusive), a single integer, or a comma list of either.
pub fn parse_n_spec(spec: &str) -> Result<Vec<i64>, CliError> {
    let bad = || CliError::Argument(format!("invalid n specification {spec:?}"));
    let mut out = Vec::new();
    for part in spec.split(',') {
        let part = part.trim();
        if let Some((a, b)) = part.split_once("..") {
            let a: i64 = a.trim().parse().map_err(|_| bad())?;
            let b: i64 = b.trim().parse().map_err(|_| bad())?;
            if a > b {
                return Err(CliError::Argument(format!("empty range {part:?}")));
            }
            out.extend(a..=b);
        } else {
            out.push(part.parse().map_err(|_| bad())?);
        }
    }
    Ok(out)
}

#[derive(Clone, Debug, Serialize)]
pub struct HeatRow {
    pub t: f64,
    pub n: i64,
    pub k_formula: f64,
    pub k_transfer: f64,
    pub k_oracle: f64,
    pub abs_err: f64,
}

pub fn heat_rows(times: &[f64], ns: &[i64], cfg: &RunConfig) -> Result<Vec<HeatRow>, CliError> {
    if times.is_empty() || ns.is_empty() {
        return Err(CliError::Argument("heat needs at least one t and one n".into()));
    }
    if let Some(n) = ns.iter().find(|n| n.abs() > cfg.oracle_window) {
        return Err(CliError::Argument(format!(
            "n = {n} lies outside the oracle window [-{w}, {w}]",
            w = cfg.oracle_window
        )));
    }
    let mut rows = Vec::new();
    for &t in times {
        let ctx = format!("t = {t}");
        let oracle =
            LineOracle::new(t, cfg.oracle_window, cfg.oracle_terms).map_err(|e| CliError::from(e).context(&ctx))?;
        let formula = kernel_gamma_many(t, ns, cfg.quad_tol, PrefactorReading::FiberNormalized)
            .map_err(|e| CliError::from(e).context(&ctx))?;
        let transfer = kernel_transfer_many(t, ns, cfg.quad_tol).map_err(|e| CliError::from(e).context(&ctx))?;
        for (f, tr) in formula.iter().zip(&transfer) {
            let o = oracle
                .value(f.n)
                .map_err(|e| CliError::from(e).context(&format!("t = {t}, n = {}", f.n)))?;
            rows.push(HeatRow {
                t,
                n: f.n,
                k_formula: f.value,
                k_transfer: tr.value,
                k_oracle: o,
                abs_err: (f.value - o).abs().max((tr.value - o).abs()),
            });
        }
    }
    Ok(rows)
}

pub fn cmd_heat(times: &[f64], ns: &[i64], cfg: &RunConfig) -> Result<Output, CliError> {
    let rows = heat_rows(times, ns, cfg)?;
    let status = if rows.iter().all(|r| r.abs_err <= HEAT_TOL) {
        Status::Pass
    } else {
        Status::Violation
    };
    let text = match cfg.output_format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Csv => {
            let mut s = String::from("t,n,K_formula,K_transfer,K_oracle,abs_err\n");
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    r.t,
                    r.n,
                    sci(r.k_formula),
                    sci(r.k_transfer),
                    sci(r.k_oracle),
                    sci(r.abs_err)
                )
                .expect("writing to a String");
            }
            s
        }
    };
    Ok(Output { text, status })
}

#[derive(Serialize)]
struct Component {
    component: &'static str,
    lower: f64,
    upper: f64,
}

#[derive(Serialize)]
struct SpectrumReport {
    lambda0: f64,
    lambda1: f64,
    components: Vec<Component>,
    disjoint: bool,
}

pub fn cmd_spectrum(cfg: &RunConfig) -> Result<Output, CliError> {
    let s = spectrum();
    let components = vec![
        Component {
            component: "band",
            lower: s.intervals[0].0,
            upper: s.intervals[0].1,
        },
        Component {
            component: "eigenvalue",
            lower: s.points[0],
            upper: s.points[0],
        },
        Component {
            component: "band",
            lower: s.intervals[1].0,
            upper: s.intervals[1].1,
        },
        Component {
            component: "eigenvalue",
            lower: s.points[1],
            upper: s.points[1],
        },
    ];
    let disjoint = s.is_disjoint();
    let text = match cfg.output_format {
        OutputFormat::Json => json(&SpectrumReport {
            lambda0: s.lambda0,
            lambda1: s.lambda1,
            components,
            disjoint,
        }),
        OutputFormat::Csv => {
            let mut out = String::from("component,lower,upper\n");
            for c in &components {
                writeln!(out, "{},{:.12},{:.12}", c.component, c.lower, c.upper).expect("writing to a String");
            }
            out
        }
    };
    Ok(Output {
        text,
        status: if disjoint { Status::Pass } else { Status::Violation },
    })
}

#[derive(Serialize)]
struct FiniteRow {
    p: u32,
    size: usize,
    gap: f64,
    gap_minus_lambda0: f64,
    has_3_4: bool,
    has_7_4: bool,
    zero_multiplicity: usize,
    residual: f64,
    csv: String,
}

pub fn csv_name(p: u32) -> String {
    format!("eigenvalues_p{p}.csv")
}

/// Writes one eigenvalue CSV per prime into `out_dir` and returns the gap
/// table.
pub fn cmd_finite(primes: &[u32], out_dir: &Path, cfg: &RunConfig) -> Result<Output, CliError> {
    if primes.is_empty() {
        return Err(CliError::Argument("finite needs at least one prime".into()));
    }
    if let Some(p) = primes.iter().find(|&&p| !is_prime(p as u64)) {
        return Err(CliError::Argument(format!("{p} is not prime")));
    }
    std::fs::create_dir_all(out_dir)
        .map_err(|e| CliError::Argument(format!("cannot create {}: {e}", out_dir.display())))?;
    let mut rows = Vec::new();
    let mut ok = true;
    for &p in primes {
        let s = spectrum_of(p, cfg.zero_threshold, FINITE_BUDGET)
            .map_err(|e| CliError::from(e).context(&format!("p = {p}")))?;
        let path = out_dir.join(csv_name(p));
        std::fs::write(&path, s.to_csv())
            .map_err(|e| CliError::Argument(format!("cannot write {}: {e}", path.display())))?;
        let r = ConjectureRow::from_spectrum(&s);
        ok &= r.gap_holds() && r.residual <= 1e-8;
        rows.push(FiniteRow {
            p,
            size: r.size,
            gap: r.gap,
            gap_minus_lambda0: r.gap_minus_lambda0,
            has_3_4: r.has_three_quarters,
            has_7_4: r.has_seven_quarters,
            zero_multiplicity: r.zero_multiplicity,
            residual: r.residual,
            csv: csv_name(p),
        });
    }
    let text = match cfg.output_format {
        OutputFormat::Json => json(&rows),
        OutputFormat::Csv => {
            let mut s = String::from("p,size,gap,gap_minus_lambda0,has_3_4,has_7_4,zero_multiplicity,residual\n");
            for r in &rows {
                writeln!(
                    s,
                    "{},{},{},{},{},{},{},{}",
                    r.p,
                    r.size,
                    sci(r.gap),
                    sci(r.gap_minus_lambda0),
                    r.has_3_4,
                    r.has_7_4,
                    r.zero_multiplicity,
                    sci(r.residual)
                )
                .expect("writing to a String");
            }
            s
        }
    };
    Ok(Output {
        text,
        status: if ok { Status::Pass } else { Status::Violation },
    })
}

/// Fault injection for `verify`.
#[derive(Clone, Copy, Debug, Default)]
pub struct VerifyHooks {
    /// Lowers w(2, 3) of the line window used by the covering suite.
    pub corrupt_line_weight: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SuiteEntry {
    pub name: &'static str,
    pub passed: bool,
    pub measured: Option<f64>,
    pub tolerance: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjudicationEntry {
    pub t: f64,
    pub n: i64,
    pub oracle: f64,
    pub printed: f64,
    pub fiber_normalized: f64,
    pub printed_error: f64,
    pub fiber_normalized_error: f64,
}

#[derive(Clone, Debug, Serialize)]
pub struct AdjudicationSummary {
    pub gamma_ball_radius: u32,
    pub tolerance: f64,
    pub consistent: Vec<&'static str>,
    pub verdict: Option<&'static str>,
    pub rows: Vec<AdjudicationEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct VerifyReport {
    pub passed: bool,
    pub config: RunConfig,
    pub suites: Vec<SuiteEntry>,
    pub prefactor_adjudication: Option<AdjudicationSummary>,
}

const TIMES: [f64; 4] = [0.5, 1.0, 2.0, 5.0];

fn measured(name: &'static str, value: f64, tol: f64, detail: String) -> SuiteEntry {
    SuiteEntry {
        name,
        passed: value <= tol,
        measured: Some(value),
        tolerance: Some(tol),
        detail,
    }
}

fn failed(name: &'static str, err: impl std::fmt::Display) -> SuiteEntry {
    SuiteEntry {
        name,
        passed: false,
        measured: None,
        tolerance: None,
        detail: err.to_string(),
    }
}

fn run_suite(name: &'static str, f: impl FnOnce() -> Result<SuiteEntry, CliError>) -> SuiteEntry {
    f().unwrap_or_else(|e| failed(name, e))
}

fn spectrum_suite() -> SuiteEntry {
    let s = spectrum();
    let l0 = 0.875 - 0.5 * (25.0f64 / 16.0 + SQRT_2).sqrt();
    let l1 = 0.875 + 0.5 * (25.0f64 / 16.0 - SQRT_2).sqrt();
    let err = (s.lambda0 - l0).abs().max((s.lambda1 - l1).abs());
    let mut e = measured(
        "spectrum_endpoints",
        err,
        1e-12,
        format!("lambda0 = {:.12}, lambda1 = {:.12}", s.lambda0, s.lambda1),
    );
    e.passed &= s.is_disjoint();
    e
}

fn covering_suites(hooks: VerifyHooks) -> Vec<SuiteEntry> {
    let inner = || -> Result<Vec<SuiteEntry>, CliError> {
        let g = gamma_ball(12, DEFAULT_VERTEX_BUDGET)?;
        let window = LineWindow::symmetric(12)?;
        let line = window.graph_with(|i, j| {
            let w = line_weight(i, j);
            if hooks.corrupt_line_weight && i.min(j) == 2 && i.max(j) == 3 {
                w - 1
            } else {
                w
            }
        })?;
        let f = VertexMap::new(&g, &line, |w| w.pi_project())?;
        let cov = is_covering(&g, &line, &f);
        let deg = degree_transfer_check(&g, &line, &f);
        let mut out = vec![
            SuiteEntry {
                name: "covering",
                passed: cov.holds,
                measured: None,
                tolerance: None,
                detail: match &cov.witness {
                    Some(w) => format!("witness: {w}"),
                    None => format!("{} identities hold exactly", cov.checked),
                },
            },
            SuiteEntry {
                name: "degree_transfer",
                passed: deg.holds,
                measured: None,
                tolerance: None,
                detail: match &deg.witness {
                    Some(w) => format!("witness: {w}"),
                    None => format!("{} vertices", deg.checked),
                },
            },
        ];
        let (q, fq) = pi_quotient(&g)?;
        let fl = meq_check(&g, &q, &fq, 8, MeqMode::DEFAULT_FLOAT)?;
        let mut e = measured(
            "meq_float",
            fl.max_abs_error,
            1e-12,
            format!("k <= 8, {} comparisons on {} safe sources", fl.checked, fl.safe_sources),
        );
        e.passed &= fl.holds;
        out.push(e);
        let ex = meq_check(&g, &q, &fq, 8, MeqMode::Exact)?;
        out.push(SuiteEntry {
            name: "meq_exact",
            passed: ex.holds,
            measured: None,
            tolerance: None,
            detail: ex
                .witness
                .unwrap_or_else(|| format!("k <= 8, {} comparisons in Q(sqrt2)", ex.checked)),
        });
        Ok(out)
    };
    inner().unwrap_or_else(|e| vec![failed("covering", e)])
}

fn completeness_suite(cfg: &RunConfig) -> SuiteEntry {
    run_suite("completeness", || {
        let pairs: Vec<(i64, i64)> = (-10..=10).flat_map(|m| (-10..=10).map(move |n| (m, n))).collect();
        let c = completeness_entries(&pairs, cfg.quad_tol)?;
        let err = pairs
            .iter()
            .zip(&c.value)
            .map(|(&(m, n), v)| (v - if m == n { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        Ok(measured(
            "completeness",
            err,
            1e-8,
            format!("21x21 on [-10, 10], {} panels", c.panels),
        ))
    })
}

fn eigen_suites() -> Vec<SuiteEntry> {
    let mut disc: f64 = 0.0;
    for eps in Sign::BOTH {
        let lam = discrete_eigenvalue(eps);
        for m in -30..=30 {
            disc = disc.max((apply_stencil(|k| eval_discrete(eps, k), m) - lam * eval_discrete(eps, m)).abs());
        }
    }
    let gen = run_suite("generalized_eigen_residual", || {
        let mut gen: f64 = 0.0;
        for i in 0..50 {
            let x = PI * i as f64 / 49.0;
            for mu in Sign::BOTH {
                let lam = lambda_of(mu, x)?;
                for eps in Sign::BOTH {
                    let f = |k| eval_generalized(x, mu, eps, k).unwrap_or(f64::NAN);
                    for m in -30..=30 {
                        gen = gen.max((apply_stencil(f, m) - lam * f(m)).abs());
                    }
                }
            }
        }
        Ok(measured(
            "generalized_eigen_residual",
            gen,
            1e-10,
            "50 x-values, all (mu, eps), |m| <= 30".into(),
        ))
    });
    vec![
        measured("discrete_eigen_residual", disc, 1e-12, "|m| <= 30, both eps".into()),
        gen,
    ]
}

fn oracle_suites(cfg: &RunConfig) -> Vec<SuiteEntry> {
    let agreement = run_suite("oracle_agreement", || {
        let ns: Vec<i64> = (-12..=12).collect();
        let mut worst: f64 = 0.0;
        for t in TIMES {
            let o = LineOracle::new(t, cfg.oracle_window, cfg.oracle_terms)?;
            for v in kernel_transfer_many(t, &ns, cfg.quad_tol)? {
                worst = worst.max((v.value - o.value(v.n)?).abs().max(o.error_bound(v.n)?));
            }
        }
        Ok(measured(
            "oracle_agreement",
            worst,
            1e-8,
            "transfer route vs line series, |n| <= 12".into(),
        ))
    });
    let formula = run_suite("formula_agreement", || {
        let ns: Vec<i64> = (0..=12).collect();
        let mut worst: f64 = 0.0;
        for t in TIMES {
            let a = kernel_gamma_many(t, &ns, cfg.quad_tol, PrefactorReading::Printed)?;
            let b = kernel_transfer_many(t, &ns, cfg.quad_tol)?;
            for (x, y) in a.iter().zip(&b) {
                worst = worst.max((x.value - y.value).abs());
            }
        }
        Ok(measured(
            "formula_agreement",
            worst,
            1e-9,
            "closed form vs transfer route, 0 <= n <= 12".into(),
        ))
    });
    let initial = run_suite("initial_condition", || {
        let ns: Vec<i64> = (-12..=12).collect();
        let k = kernel_gamma_many(0.0, &ns, cfg.quad_tol, PrefactorReading::FiberNormalized)?;
        let err = k
            .iter()
            .map(|v| (v.value - if v.n == 0 { 1.0 } else { 0.0 }).abs())
            .fold(0.0, f64::max);
        Ok(measured(
            "initial_condition",
            err,
            1e-9,
            "K_0(n) vs delta, |n| <= 12".into(),
        ))
    });
    let mass_entry = run_suite("mass", || {
        let mut worst: f64 = 0.0;
        for t in TIMES {
            worst = worst.max((mass(t, 70, cfg.quad_tol)? - 1.0).abs());
        }
        Ok(measured(
            "mass",
            worst,
            1e-6,
            "sum of fiber size times K_t(n), |n| <= 70".into(),
        ))
    });
    vec![agreement, formula, initial, mass_entry]
}

fn adjudication(cfg: &RunConfig) -> (SuiteEntry, Option<AdjudicationSummary>) {
    let tol = 1e-8;
    let run = || -> Result<(SuiteEntry, AdjudicationSummary), CliError> {
        let ns: Vec<i64> = (-8..=-1).rev().collect();
        let mut rows = Vec::new();
        let mut verdicts = Vec::new();
        let mut consistent_all: Option<Vec<PrefactorReading>> = None;
        let mut oracle_bound: f64 = 0.0;
        for t in TIMES {
            let adj = adjudicate(
                t,
                &ns,
                cfg.gamma_ball_radius,
                cfg.oracle_terms,
                cfg.quad_tol,
                tol,
                DEFAULT_VERTEX_BUDGET,
            )?;
            for r in &adj.rows {
                oracle_bound = oracle_bound.max(r.oracle_bound);
                rows.push(AdjudicationEntry {
                    t,
                    n: r.n,
                    oracle: r.oracle,
                    printed: r.printed,
                    fiber_normalized: r.fiber_normalized,
                    printed_error: r.error(PrefactorReading::Printed),
                    fiber_normalized_error: r.error(PrefactorReading::FiberNormalized),
                });
            }
            verdicts.push(adj.verdict());
            consistent_all = Some(match consistent_all {
                None => adj.consistent.clone(),
                Some(prev) => prev.into_iter().filter(|r| adj.consistent.contains(r)).collect(),
            });
        }
        let consistent = consistent_all.unwrap_or_default();
        let verdict = match consistent.as_slice() {
            [only] => Some(*only),
            _ => None,
        };
        let trustworthy = oracle_bound <= tol / 100.0;
        let err = verdict
            .map(|v| {
                rows.iter()
                    .map(|r| match v {
                        PrefactorReading::Printed => r.printed_error,
                        PrefactorReading::FiberNormalized => r.fiber_normalized_error,
                    })
                    .fold(0.0, f64::max)
            })
            .unwrap_or(f64::INFINITY);
        let entry = SuiteEntry {
            name: "prefactor_adjudication",
            passed: verdict.is_some() && trustworthy && err <= tol,
            measured: verdict.map(|_| err),
            tolerance: Some(tol),
            detail: match (verdict, trustworthy) {
                (_, false) => format!("oracle error bound {oracle_bound:e} too large; increase gamma_ball_radius"),
                (Some(v), true) => format!("exactly one consistent reading: {}", v.name()),
                (None, true) => format!(
                    "expected exactly one consistent reading, found {:?}",
                    consistent.iter().map(|r| r.name()).collect::<Vec<_>>()
                ),
            },
        };
        let summary = AdjudicationSummary {
            gamma_ball_radius: cfg.gamma_ball_radius,
            tolerance: tol,
            consistent: consistent.iter().map(|r| r.name()).collect(),
            verdict: verdict.map(|v| v.name()),
            rows,
        };
        Ok((entry, summary))
    };
    match run() {
        Ok((e, s)) => (e, Some(s)),
        Err(e) => (failed("prefactor_adjudication", e), None),
    }
}

fn finite_suite(cfg: &RunConfig) -> SuiteEntry {
    run_suite("finite_spectra", || {
        let lambda0 = spectrum().lambda0;
        let mut residual: f64 = 0.0;
        let mut problems = Vec::new();
        let mut gaps = Vec::new();
        for p in [2u32, 3, 5, 7] {
            let s = spectrum_of(p, cfg.zero_threshold, FINITE_BUDGET)?;
            let r = ConjectureRow::from_spectrum(&s);
            residual = residual.max(r.residual);
            if r.gap < lambda0 {
                problems.push(format!("p = {p}: gap below lambda0"));
            }
            if !(r.has_three_quarters && r.has_seven_quarters) {
                problems.push(format!("p = {p}: 3/4 or 7/4 missing"));
            }
            if r.zero_multiplicity != 1 {
                problems.push(format!("p = {p}: zero multiplicity {}", r.zero_multiplicity));
            }
            gaps.push(format!("p={p} gap={:.6}", r.gap));
        }
        let mut e = measured("finite_spectra", residual, 1e-8, gaps.join(", "));
        if !problems.is_empty() {
            e.passed = false;
            e.detail = problems.join("; ");
        }
        Ok(e)
    })
}

fn genus_suite() -> SuiteEntry {
    let got: Result<Vec<u64>, _> = [3u32, 5, 7].iter().map(|&p| genus(p)).collect();
    match got {
        Ok(g) => SuiteEntry {
            name: "genus",
            passed: g == [0, 0, 3],
            measured: None,
            tolerance: None,
            detail: format!("genus(3, 5, 7) = {g:?}"),
        },
        Err(e) => failed("genus", e),
    }
}

pub fn verify_report(cfg: &RunConfig, hooks: VerifyHooks) -> VerifyReport {
    let mut suites = vec![spectrum_suite()];
    suites.extend(covering_suites(hooks));
    suites.push(completeness_suite(cfg));
    suites.extend(eigen_suites());
    suites.extend(oracle_suites(cfg));
    let (adj, summary) = adjudication(cfg);
    suites.push(adj);
    suites.push(finite_suite(cfg));
    suites.push(genus_suite());
    VerifyReport {
        passed: suites.iter().all(|s| s.passed),
        config: cfg.clone(),
        suites,
        prefactor_adjudication: summary,
    }
}

/// Runs every suite and renders the JSON report.
pub fn cmd_verify(cfg: &RunConfig, hooks: VerifyHooks) -> Output {
    let report = verify_report(cfg, hooks);
    Output {
        text: json(&report),
        status: if report.passed { Status::Pass } else { Status::Violation },
    }
}
