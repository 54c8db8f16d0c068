//! `carnot`: command-line front end for the Carnot group toolkit.

mod report;

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use carnot_core::abnormal::{detect_abnormal, detect_abnormal_f64, minor_system, nonvanishing_certificate};
use carnot_core::dynamics::{self, duality_check, uniform_grid, ControlPath, Dynamics, SpiralOptions};
use carnot_core::free_lie::FreeLie;
use carnot_core::io::{AlgebraFile, CurveTable};
use carnot_core::poly::format_monomial;
use carnot_core::prolongation::{prolong_with, ProlongedAlgebra, DEFAULT_MAX_DEPTH};
use carnot_core::rational::{self, Rational};
use carnot_core::{ExtremalFamily, GradedLieAlgebra};
use clap::{Parser, Subcommand, ValueEnum};
use report::{InputDigest, RunReport};
use serde_json::json;

#[derive(Parser)]
#[command(name = "carnot", version, about = "Extremal polynomials and abnormal curves in Carnot groups")]
struct Cli {
    /// Print a machine-readable JSON report instead of text.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Free nilpotent Lie algebra in a Hall basis.
    Free {
        #[arg(long)]
        rank: usize,
        #[arg(long)]
        step: usize,
        /// Write the algebra file here.
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Tanaka prolongation strata.
    Prolong {
        algebra: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        /// Write the prolonged algebra (nonpositive indices included).
        #[arg(long)]
        emit: Option<PathBuf>,
    },
    /// Extremal polynomials P_j^v.
    Polys {
        algebra: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        /// Only this index.
        #[arg(long, allow_hyphen_values = true)]
        index: Option<i64>,
    },
    /// Validates the algebra and checks X_i P_j^v = Σ_k c_ij^k P_k^v.
    Verify {
        algebra: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
    },
    /// Maximal minors of the matrix Q_jk and nonvanishing certificates.
    Minors {
        algebra: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        /// Keep degree-2 columns and rows out of the rank-two system.
        #[arg(long)]
        no_rank_two_reduction: bool,
        /// List every minor.
        #[arg(long)]
        all: bool,
    },
    /// Covectors whose abnormal variety contains the sampled curve.
    Detect {
        algebra: PathBuf,
        curve: PathBuf,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        /// Read samples as exact rationals.
        #[arg(long)]
        exact: bool,
        /// Relative singular-value threshold for floating samples.
        #[arg(long, default_value_t = 1e-9)]
        tol: f64,
    },
    /// RK4 integration of horizontal curves, adjoint equations or normal extremals.
    Integrate {
        algebra: PathBuf,
        #[arg(long, value_enum)]
        mode: Mode,
        /// Constant controls h_1..h_r, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        controls: Option<String>,
        /// Control table `t,h1..hr` (linear interpolation).
        #[arg(long)]
        controls_csv: Option<PathBuf>,
        /// Initial dual vector λ(0), comma separated.
        #[arg(long, allow_hyphen_values = true)]
        lambda0: Option<String>,
        /// Initial point (default: origin).
        #[arg(long, allow_hyphen_values = true)]
        x0: Option<String>,
        #[arg(long, default_value_t = 1.0)]
        t1: f64,
        #[arg(long, default_value_t = dynamics::DEFAULT_STEP)]
        step: f64,
        /// Largest accepted drift of the prime integrals.
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
        #[arg(long, default_value_t = DEFAULT_MAX_DEPTH)]
        max_depth: usize,
        /// Write the trajectory CSV here.
        #[arg(long)]
        output: Option<PathBuf>,
    },
    /// Spiral lift in the product of two free (3,4) groups and its Goh check.
    Spiral {
        #[arg(long, default_value_t = 2000)]
        samples: usize,
        #[arg(long, default_value_t = 1e-8)]
        tol: f64,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Normal,
    Horizontal,
    Adjoint,
}

struct Loaded {
    family: ExtremalFamily,
}

fn read_input(path: &Path, rep: &mut RunReport) -> Result<String> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    rep.inputs.push(InputDigest::of(&path.display().to_string(), text.as_bytes()));
    Ok(text)
}

/// Parses and validates the algebra; violations are input errors here.
fn load_algebra(path: &Path, rep: &mut RunReport) -> Result<(AlgebraFile, GradedLieAlgebra)> {
    let text = read_input(path, rep)?;
    let file = AlgebraFile::parse(&text).with_context(|| format!("{}", path.display()))?;
    let alg = file.to_algebra().with_context(|| format!("{}", path.display()))?;
    Ok((file, alg))
}

fn prolonged(file: &AlgebraFile, alg: &GradedLieAlgebra, max_depth: usize) -> Result<ProlongedAlgebra> {
    if alg.min_id() < 1 {
        return Ok(ProlongedAlgebra::from_graded(alg.clone())?);
    }
    Ok(prolong_with(alg, max_depth, &file.stratum_bases()?)?)
}

fn load(path: &Path, max_depth: usize, rep: &mut RunReport) -> Result<Loaded> {
    let (file, alg) = load_algebra(path, rep)?;
    let violations = alg.validate();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        bail!("{} is not a valid graded Lie algebra:\n  {}", path.display(), list.join("\n  "));
    }
    let p = prolonged(&file, &alg, max_depth)?;
    Ok(Loaded { family: ExtremalFamily::build(&p)? })
}

fn parse_list(s: &str, what: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|x| x.trim().parse::<f64>().map_err(|_| anyhow!("{what}: not a number: {x:?}")))
        .collect()
}

fn covector_text(v: &[Rational]) -> String {
    let mut out = String::new();
    for (k, c) in v.iter().enumerate() {
        if num_is_zero(c) {
            continue;
        }
        let neg = c < &rational::zero();
        let mag = rational::abs(c);
        if out.is_empty() {
            out.push_str(if neg { "-" } else { "" });
        } else {
            out.push_str(if neg { " - " } else { " + " });
        }
        if mag != rational::one() {
            out.push_str(&format!("{}*", rational::format(&mag)));
        }
        out.push_str(&format!("e{}", k + 1));
    }
    if out.is_empty() {
        "0".into()
    } else {
        out
    }
}

fn num_is_zero(c: &Rational) -> bool {
    c == &rational::zero()
}

fn range_text(ids: &[i64]) -> String {
    let contiguous = ids.windows(2).all(|w| w[1] == w[0] + 1);
    match (ids.first(), ids.last()) {
        (Some(a), Some(b)) if contiguous && ids.len() > 1 => format!("{a}..{b}"),
        _ => ids.iter().map(ToString::to_string).collect::<Vec<_>>().join(","),
    }
}

fn run(cli: &Cli, rep: &mut RunReport) -> Result<()> {
    match &cli.cmd {
        Cmd::Free { rank, step, emit } => {
            let f = FreeLie::build(*rank, *step)?;
            let alg = &f.algebra;
            let relations: Vec<String> = f
                .words
                .iter()
                .filter_map(|w| w.factors.map(|(u, v)| format!("X_{} = [X_{}, X_{}]", w.serial, u, v)))
                .collect();
            let by_degree: Vec<usize> = (1..=*step as i32).map(|d| alg.ids_of_degree(d).len()).collect();
            rep.line(format!("free({rank},{step}): dim {}, layers {:?}", alg.n(), by_degree));
            relations.iter().for_each(|r| rep.line(r.clone()));
            let file = AlgebraFile::from_algebra(alg);
            if let Some(path) = emit {
                std::fs::write(path, file.to_json()).with_context(|| format!("cannot write {}", path.display()))?;
                rep.line(format!("wrote {}", path.display()));
            }
            rep.results = json!({ "dim": alg.n(), "rank": rank, "step": step, "layers": by_degree, "relations": relations });
        }
        Cmd::Prolong { algebra, max_depth, emit } => {
            let (file, alg) = load_algebra(algebra, rep)?;
            let violations = alg.validate();
            if !violations.is_empty() {
                let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
                bail!("{} is not a valid graded Lie algebra:\n  {}", algebra.display(), list.join("\n  "));
            }
            let p = prolonged(&file, &alg, *max_depth)?;
            let mut strata = Vec::new();
            for s in p.strata() {
                let ids = if s.ids.is_empty() { "-".to_string() } else { range_text(&s.ids) };
                rep.line(format!("g_{}: dim {} (indices {})", s.degree, s.dim(), ids));
                strata.push(json!({ "degree": s.degree, "dim": s.dim(), "ids": s.ids }));
            }
            let status = if p.terminated() {
                "terminated"
            } else if p.possibly_infinite() {
                "truncated (possibly infinite)"
            } else {
                "not computed"
            };
            rep.line(format!("prolongation {status}; total dim {}", p.algebra().dim()));
            if let Some(path) = emit {
                let out = AlgebraFile::from_algebra(p.algebra());
                std::fs::write(path, out.to_json()).with_context(|| format!("cannot write {}", path.display()))?;
                rep.line(format!("wrote {}", path.display()));
            }
            rep.results = json!({ "strata": strata, "terminated": p.terminated(), "dim": p.algebra().dim() });
        }
        Cmd::Polys { algebra, max_depth, index } => {
            let fam = load(algebra, *max_depth, rep)?.family;
            let weights = fam.weights().to_vec();
            let ids: Vec<i64> = match index {
                Some(j) => vec![*j],
                None => fam.indices().collect(),
            };
            let mut out = serde_json::Map::new();
            for j in ids {
                let row = fam.q_row(j)?;
                let mut parts = Vec::new();
                let mut terms = serde_json::Map::new();
                for (k, q) in row.iter().enumerate() {
                    if !q.is_zero() {
                        let s = q.to_canonical_string(&weights);
                        parts.push(format!("v{}*({s})", k + 1));
                        terms.insert(format!("v{}", k + 1), json!(s));
                    }
                }
                let text = if parts.is_empty() { "0".into() } else { parts.join(" + ") };
                rep.line(format!("P_{j} = {text}"));
                out.insert(j.to_string(), serde_json::Value::Object(terms));
            }
            rep.results = json!({ "polynomials": out });
        }
        Cmd::Verify { algebra, max_depth } => {
            let (file, alg) = load_algebra(algebra, rep)?;
            let violations = alg.validate();
            rep.line(format!("{} violations", violations.len()));
            for v in &violations {
                rep.line(format!("  {v}"));
            }
            let mut residuals = Vec::new();
            if violations.is_empty() {
                let fam = ExtremalFamily::build(&prolonged(&file, &alg, *max_depth)?)?;
                residuals = fam.verify_structure();
                rep.line(format!("{} residuals", residuals.len()));
                let w = fam.weights().to_vec();
                for r in &residuals {
                    rep.line(format!("  X_{} Q_{},{}: {}", r.i, r.j, r.k, r.residual.to_canonical_string(&w)));
                }
            }
            if !violations.is_empty() || !residuals.is_empty() {
                rep.fail();
            }
            let w: Vec<String> = residuals.iter().map(|r| format!("({}, {}, {})", r.i, r.j, r.k)).collect();
            rep.results = json!({ "violations": violations, "residuals": w });
        }
        Cmd::Minors { algebra, max_depth, no_rank_two_reduction, all } => {
            let fam = load(algebra, *max_depth, rep)?.family;
            let ms = minor_system(&fam, !no_rank_two_reduction)?;
            let certs = nonvanishing_certificate(&ms);
            let size = ms.rows.len().min(ms.cols.len());
            let nonzero = certs.iter().filter(|c| c.is_some()).count();
            let mut listed = Vec::new();
            for (m, c) in ms.minors.iter().zip(&certs) {
                let cert = c.as_ref().map(|c| json!({ "monomial": format_monomial(&c.monomial), "coeff": rational::format(&c.coeff) }));
                listed.push(json!({ "rows": m.rows, "cols": m.cols, "terms": m.det.len(), "certificate": cert }));
                if *all {
                    let desc = match c {
                        Some(c) => format!("monomial {} coeff {}", format_monomial(&c.monomial), rational::format(&c.coeff)),
                        None => "vanishes".into(),
                    };
                    rep.line(format!("rows({}) cols({}): {desc}", range_text(&m.rows), range_text(&m.cols)));
                }
            }
            let pick = ms.minors.iter().zip(&certs).rev().find_map(|(m, c)| c.as_ref().map(|c| (m, c)));
            let summary = match pick {
                Some((m, c)) => format!(
                    "{} minors, certificate: monomial {} coeff {} in minor rows({})",
                    ms.minors.len(),
                    format_monomial(&c.monomial),
                    rational::format(&c.coeff),
                    range_text(&m.rows)
                ),
                None => format!("{} minors, all vanish", ms.minors.len()),
            };
            rep.lines.insert(0, format!("{}x{} system, rows {:?}, cols {:?}; {size}x{size} minors, {nonzero} nonzero", ms.rows.len(), ms.cols.len(), ms.rows, ms.cols));
            rep.lines.insert(1, summary);
            rep.results = json!({ "rows": ms.rows, "cols": ms.cols, "count": ms.minors.len(), "nonzero": nonzero, "minors": listed });
        }
        Cmd::Detect { algebra, curve, max_depth, exact, tol } => {
            let fam = load(algebra, *max_depth, rep)?.family;
            let table = CurveTable::parse(&read_input(curve, rep)?).with_context(|| format!("{}", curve.display()))?;
            if table.width() != fam.n() {
                bail!("{}: {} coordinate columns, algebra has dimension {}", curve.display(), table.width(), fam.n());
            }
            if *exact {
                let (_, xs) = table.to_exact().with_context(|| format!("{}", curve.display()))?;
                let d = detect_abnormal(&fam, &xs)?;
                rep.line(format!("corank >= {}", d.corank_lower_bound));
                let basis: Vec<String> = d.basis.iter().map(|v| covector_text(v)).collect();
                basis.iter().for_each(|b| rep.line(format!("v = {b}")));
                if d.few_samples {
                    rep.line("warning: fewer samples than the step; the space may be too large");
                }
                rep.results = json!({ "corank_lower_bound": d.corank_lower_bound, "basis": basis, "few_samples": d.few_samples });
            } else {
                let (_, xs) = table.to_f64().with_context(|| format!("{}", curve.display()))?;
                let d = detect_abnormal_f64(&fam, &xs, *tol)?;
                rep.line(format!("corank >= {}", d.corank_lower_bound));
                for v in &d.basis {
                    rep.line(format!("v = {}", v.iter().map(|&x| format!("{:.6e}", if x.abs() < 1e-12 { 0.0 } else { x })).collect::<Vec<_>>().join(",")));
                }
                if d.few_samples {
                    rep.line("warning: fewer samples than the step; the space may be too large");
                }
                rep.results = json!({ "corank_lower_bound": d.corank_lower_bound, "basis": d.basis, "spectrum": d.spectrum, "few_samples": d.few_samples });
            }
        }
        Cmd::Integrate { algebra, mode, controls, controls_csv, lambda0, x0, t1, step, tol, max_depth, output } => {
            if step.is_nan() || *step <= 0.0 || !t1.is_finite() {
                bail!("step must be positive and t1 finite");
            }
            let fam = load(algebra, *max_depth, rep)?.family;
            let (n, r) = (fam.n(), fam.algebra().rank());
            let dyn_ = Dynamics::from_fields(fam.algebra(), fam.fields())?;
            let x0 = match x0 {
                Some(s) => parse_list(s, "--x0")?,
                None => vec![0.0; n],
            };
            let h = match (controls, controls_csv) {
                (Some(s), None) => Some(ControlPath::Constant(parse_list(s, "--controls")?)),
                (None, Some(p)) => {
                    let table = CurveTable::parse(&read_input(p, rep)?).with_context(|| format!("{}", p.display()))?;
                    let (times, values) = table.to_f64().with_context(|| format!("{}", p.display()))?;
                    Some(ControlPath::Table { times, values })
                }
                (Some(_), Some(_)) => bail!("give either --controls or --controls-csv"),
                (None, None) => None,
            };
            let grid = uniform_grid(0.0, *t1, *step);
            let need = |what: &str| anyhow!("--mode {what} needs {}", if what == "normal" { "--lambda0" } else { "controls" });
            let curve = match mode {
                Mode::Horizontal => dyn_.integrate_horizontal(&h.ok_or_else(|| need("horizontal"))?, &x0, &grid)?,
                Mode::Adjoint => {
                    let l0 = parse_list(lambda0.as_deref().ok_or_else(|| anyhow!("--mode adjoint needs --lambda0"))?, "--lambda0")?;
                    dyn_.integrate_adjoint(&h.ok_or_else(|| need("adjoint"))?, &x0, &l0, &grid)?
                }
                Mode::Normal => {
                    let l0 = parse_list(lambda0.as_deref().ok_or_else(|| need("normal"))?, "--lambda0")?;
                    dyn_.integrate_normal(&l0, &x0, &grid)?
                }
            };
            let end = curve.gamma.last().expect("grid has nodes");
            rep.line(format!("{} steps of {step} on [0, {t1}], n = {n}, r = {r}", grid.len() - 1));
            rep.line(format!("x(t1) = {}", end.iter().map(|x| format!("{x:.12e}")).collect::<Vec<_>>().join(",")));
            let mut results = json!({ "steps": grid.len() - 1, "end": end });
            if curve.lambda.is_some() {
                if x0.iter().any(|&x| x != 0.0) {
                    rep.line("duality check skipped: the curve does not start at the origin");
                } else {
                    let drift = duality_check(&fam, &curve)?.into_iter().fold(0.0, f64::max);
                    rep.line(format!("max prime-integral drift {drift:.3e} (tol {tol:e})"));
                    if drift > *tol {
                        rep.fail();
                    }
                    results["drift"] = json!(drift);
                }
            }
            if let Some(path) = output {
                std::fs::write(path, carnot_core::io::write_curve_csv(&curve)).with_context(|| format!("cannot write {}", path.display()))?;
                rep.line(format!("wrote {}", path.display()));
            }
            rep.results = results;
        }
        Cmd::Spiral { samples, tol } => {
            if *samples < 2 {
                bail!("--samples must be at least 2");
            }
            let report = dynamics::spiral_example(SpiralOptions { samples: *samples, tol: *tol, ..SpiralOptions::default() })?;
            let cov = report.covector.iter().map(|(k, c)| format!("v_{k} = {}", rational::format(c))).collect::<Vec<_>>();
            rep.line(format!("product group: dim {}, rank {}, step {}", report.n, report.rank, report.step));
            rep.line(format!("covector: {}", cov.join(", ")));
            rep.line(format!(
                "goh residual {:.3e} on {} samples (tol {tol:e}); exact at t = 0: {}",
                report.goh.max_residual, report.samples_checked, report.origin_exact
            ));
            rep.line(format!("max |phi'| {:.4}, max |psi'| {:.4}, max |h| {:.4}", report.max_phi_prime, report.max_psi_prime, report.max_control_norm));
            rep.line(if report.passed { "PASS" } else { "FAIL" });
            if !report.passed {
                rep.fail();
            }
            rep.results = json!({
                "dim": report.n,
                "covector": cov,
                "max_residual": report.goh.max_residual,
                "samples": report.samples_checked,
                "origin_exact": report.origin_exact,
                "passed": report.passed,
            });
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut rep = RunReport::new(std::env::args().skip(1).collect());
    match run(&cli, &mut rep) {
        Ok(()) => {
            print!("{}", rep.render(cli.json));
            ExitCode::from(rep.status as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
