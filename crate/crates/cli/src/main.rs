use std::fs;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use num_bigint::BigInt;
use serde_json::{json, Value};

use cit_core::enumeration::{self, CountOptions};
use cit_core::golden::{self, VerifyOptions};
use cit_core::model::{Row, Triangle};
use cit_core::poly::{QPolynomial, RationalPolynomialInN};
use cit_core::{psi, qenum, sampler, Error};

#[derive(Parser)]
#[command(name = "cit", version, about = "Colored interlacing triangles: counts, q-polynomials and sampling")]
struct Cli {
    /// Print machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    /// Worker threads for count, qpoly and coeffs (default: all cores).
    #[arg(long, global = true, env = "CIT_THREADS")]
    threads: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum QMethod {
    /// Right-to-left transfer over the merged order.
    Transfer,
    /// Subset DP over color permutations of canonical top rows.
    Subset,
    /// Every triangle, one at a time (small n only).
    Exhaustive,
}

#[derive(Subcommand)]
enum Command {
    /// Exact count T_N(n).
    Count {
        #[arg(long)]
        depth: usize,
        #[arg(long)]
        colors: usize,
        /// Count every top row instead of one per boundary-involution orbit.
        #[arg(long)]
        no_symmetry: bool,
        /// Abort when a frontier holds more rows than this.
        #[arg(long)]
        max_frontier: Option<usize>,
        #[arg(long, default_value_t = 10_000_000)]
        batch_size: usize,
    },
    /// Coefficients of T_2(n; q), or of H_n^sigma(q) with --sigma.
    Qpoly {
        #[arg(long)]
        colors: Option<usize>,
        /// Bottom row, e.g. 1,3,4,2.
        #[arg(long, value_delimiter = ',')]
        sigma: Option<Vec<usize>>,
        #[arg(long, value_enum, default_value = "transfer")]
        method: QMethod,
        /// Divide by 2^(n-1) to print P_n(q).
        #[arg(long)]
        normalized: bool,
    },
    /// First k coefficients of P_n(q).
    Coeffs {
        #[arg(long)]
        colors: usize,
        #[arg(long, default_value_t = 6)]
        k_max: usize,
        /// Keep only bottom rows with at most this many inversions (may undercount).
        #[arg(long)]
        inv_cap: Option<usize>,
    },
    /// ψ of a triangle given as text (`n N` then one row per level) or JSON.
    Psi {
        /// File holding the triangle; `-` reads stdin.
        file: PathBuf,
    },
    /// The three classical q-analogs of the Genocchi medians.
    Analogs {
        #[arg(long)]
        colors: usize,
    },
    /// Hankel determinant of T_2(0; q), T_2(1; q), ... and its smallest root in (0, 1).
    Hankel {
        #[arg(long)]
        size: usize,
        #[arg(long, default_value_t = 0)]
        offset: usize,
        #[arg(long, default_value_t = 1e-9)]
        tolerance: f64,
    },
    /// Fits a_1..a_K from computed coefficients and transforms k!·a_k into cumulants.
    Cumulants {
        #[arg(long, default_value_t = 5)]
        order: usize,
    },
    /// Log-concavity, palindromicity and the coefficient laws.
    Conjectures {
        /// Largest n for the full-polynomial checks.
        #[arg(long, default_value_t = 8)]
        max_colors: usize,
        /// Largest n for the coefficient-law checks.
        #[arg(long, default_value_t = 16)]
        law_colors: usize,
    },
    /// Metropolis–Hastings sampling of depth-2 triangles.
    Sample {
        #[arg(long, required_unless_present = "preset")]
        colors: Option<usize>,
        #[arg(long, required_unless_present = "preset")]
        q: Option<f64>,
        #[arg(long, required_unless_present = "preset")]
        steps: Option<u64>,
        #[arg(long, default_value_t = 0)]
        burnin: u64,
        #[arg(long, default_value_t = 1)]
        thin: u64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
        /// fig2-top, fig2-bottom or fig3.
        #[arg(long, conflicts_with_all = ["colors", "q", "steps"])]
        preset: Option<String>,
        /// Also write level1.pgm and level2.pgm.
        #[arg(long)]
        pgm: bool,
        /// Also write final_state.json.
        #[arg(long)]
        final_state: bool,
    },
    /// Runs the reference suite; exits 1 if any check fails.
    Verify {
        /// Skip the slow count cells and P_8.
        #[arg(long)]
        fast: bool,
    },
}

/// Result of a subcommand: text, JSON, and whether every check passed.
struct Output {
    text: String,
    json: Value,
    ok: bool,
}

impl Output {
    fn ok(text: String, json: Value) -> Self {
        Output { text, json, ok: true }
    }
}

fn coeff_strings(p: &QPolynomial) -> Vec<String> {
    p.to_decimal_strings()
}

fn run(cli: &Cli) -> cit_core::Result<Output> {
    match &cli.command {
        Command::Count {
            depth,
            colors,
            no_symmetry,
            max_frontier,
            batch_size,
        } => {
            let opts = CountOptions {
                use_top_symmetry: !no_symmetry,
                batch_size: *batch_size,
                max_frontier: *max_frontier,
            };
            let r = enumeration::count_triangles_with(*depth, *colors, &opts)?;
            let json = json!({
                "depth": r.depth,
                "colors": r.n,
                "total": r.total.to_string(),
                "normalized": r.normalized.to_string(),
                "two_adic_valuation": r.two_adic,
                "states_checked": r.states_checked,
                "frontier_sizes": r.frontier_sizes,
                "elapsed_seconds": r.elapsed,
            });
            Ok(Output::ok(r.total.to_string(), json))
        }
        Command::Qpoly {
            colors,
            sigma,
            method,
            normalized,
        } => {
            let (n, poly) = match (sigma, colors) {
                (Some(s), c) => {
                    if c.is_some_and(|c| c != s.len()) {
                        return Err(Error::InvalidConfig("--colors disagrees with the length of --sigma".into()));
                    }
                    (s.len(), qenum::h_sigma_polynomial(s)?)
                }
                (None, Some(n)) => {
                    let p = match method {
                        QMethod::Subset => qenum::t2_q_polynomial(*n)?,
                        QMethod::Transfer => qenum::t2_q_polynomial_transfer(*n)?,
                        QMethod::Exhaustive => qenum::t2_q_polynomial_exhaustive(*n)?,
                    };
                    (*n, p)
                }
                (None, None) => {
                    return Err(Error::InvalidConfig("give --colors or --sigma".into()));
                }
            };
            let poly = if *normalized {
                poly.div_exact_scalar(&(BigInt::from(1) << (n - 1)))?
            } else {
                poly
            };
            let coeffs = coeff_strings(&poly);
            let json = json!({ "colors": n, "sigma": sigma, "normalized": normalized, "coefficients": coeffs });
            Ok(Output::ok(coeffs.join(" "), json))
        }
        Command::Coeffs {
            colors,
            k_max,
            inv_cap,
        } => {
            let low = qenum::low_coefficients(*colors, *k_max, *inv_cap)?;
            let coeffs: Vec<String> = low.coeffs.iter().map(|c| c.to_string()).collect();
            let mut text = coeffs.join(" ");
            if low.heuristic {
                text.push_str("\n(inversion cap set: values are lower bounds)");
            }
            let json = json!({
                "colors": low.n,
                "k_max": low.k_max,
                "coefficients": coeffs,
                "inv_cap": low.inv_cap,
                "heuristic": low.heuristic,
                "peak_states": low.peak_states,
            });
            Ok(Output::ok(text, json))
        }
        Command::Psi { file } => {
            let text = if file.as_os_str() == "-" {
                std::io::read_to_string(std::io::stdin())
                    .map_err(|e| Error::Parse(format!("cannot read stdin: {e}")))?
            } else {
                fs::read_to_string(file)
                    .map_err(|e| Error::Parse(format!("cannot read {}: {e}", file.display())))?
            };
            let t = Triangle::parse(&text)?;
            t.validate().map_err(|v| Error::NotInterlacing(v.to_string()))?;
            let mut per_level = Vec::new();
            for k in 1..t.depth() {
                let bottom = Row::new(t.n(), k, t.row(k).to_vec())?;
                let top = Row::new(t.n(), k + 1, t.row(k + 1).to_vec())?;
                let v = psi::psi_vertex(&bottom, &top)?;
                let f = psi::psi_formula(&bottom, &top)?;
                if v != f {
                    return Ok(Output {
                        text: format!("vertex model gives {v}, formula gives {f} at level {k}"),
                        json: json!({ "vertex": v, "formula": f, "level": k }),
                        ok: false,
                    });
                }
                per_level.push(v);
            }
            let total = psi::psi_total(&t)?;
            Ok(Output::ok(
                total.to_string(),
                json!({ "psi": total, "per_level": per_level }),
            ))
        }
        Command::Analogs { colors } => {
            let mut text = String::new();
            let mut json = serde_json::Map::new();
            for name in ["randrianarivony", "han-zeng", "zeng-zhou"] {
                let p = golden::compute_analog(name, *colors)?;
                text.push_str(&format!("{name}: {p}\n"));
                json.insert(name.into(), json!(coeff_strings(&p)));
            }
            Ok(Output::ok(text.trim_end().to_string(), Value::Object(json)))
        }
        Command::Hankel {
            size,
            offset,
            tolerance,
        } => {
            let r = qenum::hankel_report(*size, *offset, *tolerance)?;
            let root = r.smallest_positive_root.as_ref();
            let text = format!(
                "det = {}\nsmallest root in (0, 1): {}",
                r.determinant,
                root.map_or("none".to_string(), |b| format!("{:.10}", b.midpoint()))
            );
            let json = json!({
                "size": r.k,
                "offset": r.offset,
                "determinant": coeff_strings(&r.determinant),
                "root": root.map(|b| json!({
                    "lo": b.lo.to_string(),
                    "hi": b.hi.to_string(),
                    "midpoint": b.midpoint(),
                })),
            });
            Ok(Output::ok(text, json))
        }
        Command::Cumulants { order } => {
            let laws = fit_laws(*order)?;
            let mut all = vec![RationalPolynomialInN::one()];
            all.extend(laws.iter().map(|(_, p)| p.clone()));
            let kappa = qenum::moments_to_cumulants(&qenum::normalized_moments(&all))?;
            let mut text = String::new();
            for (i, k) in kappa.iter().enumerate() {
                text.push_str(&format!("kappa_{} = {}\n", i + 1, k));
            }
            let json = json!({
                "laws": laws.iter().map(|(k, p)| json!({"k": k, "law": p.to_string()})).collect::<Vec<_>>(),
                "cumulants": kappa.iter().map(|k| k.to_string()).collect::<Vec<_>>(),
            });
            Ok(Output::ok(text.trim_end().to_string(), json))
        }
        Command::Conjectures {
            max_colors,
            law_colors,
        } => conjectures(*max_colors, *law_colors),
        Command::Sample {
            colors,
            q,
            steps,
            burnin,
            thin,
            seed,
            out,
            preset,
            pgm,
            final_state,
        } => {
            let runs = match preset {
                Some(name) => sampler::preset(name, *seed)?
                    .into_iter()
                    .map(|(label, cfg)| (out.join(label), cfg))
                    .collect(),
                None => vec![(
                    out.clone(),
                    sampler::SamplerConfig {
                        n: colors.expect("required by clap"),
                        q: q.expect("required by clap"),
                        steps: steps.expect("required by clap"),
                        burn_in: *burnin,
                        thinning: *thin,
                        seed: *seed,
                        record_states: false,
                    },
                )],
            };
            let opts = sampler::OutputOptions {
                pgm: *pgm,
                final_state: *final_state,
            };
            let mut text = String::new();
            let mut summary = Vec::new();
            for (dir, cfg) in runs {
                let r = sampler::run(&cfg)?;
                sampler::write_outputs(&dir, &r, opts)?;
                text.push_str(&format!(
                    "{}: {} samples, acceptance {:.4}, final psi {}\n",
                    dir.display(),
                    r.stats.samples,
                    r.stats.acceptance_rate(),
                    r.final_state.psi()
                ));
                summary.push(json!({
                    "out": dir.display().to_string(),
                    "samples": r.stats.samples,
                    "acceptance_rate": r.stats.acceptance_rate(),
                    "final_psi": r.final_state.psi(),
                }));
            }
            Ok(Output::ok(text.trim_end().to_string(), json!(summary)))
        }
        Command::Verify { fast } => {
            let checks = golden::verify(VerifyOptions { fast: *fast })?;
            let ok = checks.iter().all(|c| c.passed);
            let mut text = String::new();
            for c in &checks {
                let mark = if c.passed { "ok  " } else { "FAIL" };
                text.push_str(&format!("{mark} {} {}\n", c.name, c.detail));
            }
            let failed = checks.iter().filter(|c| !c.passed).count();
            text.push_str(&format!("{} checks, {failed} failed", checks.len()));
            let json = json!({
                "passed": ok,
                "checks": checks.iter().map(|c| json!({
                    "name": c.name, "passed": c.passed, "detail": c.detail,
                })).collect::<Vec<_>>(),
            });
            Ok(Output { text, json, ok })
        }
    }
}

/// Fits `a_k(n)` for `k = 1..=order` from transfer coefficients at
/// `n = from, …, from + k` where `from` is the threshold of the law table.
fn fit_laws(order: usize) -> cit_core::Result<Vec<(usize, RationalPolynomialInN)>> {
    let table = golden::laws();
    let mut out = Vec::new();
    for k in 1..=order {
        let from = table.law(k).map_or(3, |l| l.from) as usize;
        let samples = (from..=from + k)
            .map(|n| {
                let low = qenum::low_coefficients(n, k + 1, None)?;
                Ok((n as i64, low.coeffs[k].clone()))
            })
            .collect::<cit_core::Result<Vec<_>>>()?;
        out.push((k, qenum::fit_coefficient_polynomial(k, &samples)?));
    }
    Ok(out)
}

fn conjectures(max_colors: usize, law_colors: usize) -> cit_core::Result<Output> {
    let mut ok = true;
    let mut text = String::new();
    let mut polys = Vec::new();
    for n in 1..=max_colors {
        let p = qenum::p_polynomial(n)?;
        let d = n * (n - 1) / 2;
        let lc = qenum::log_concavity_check(&p);
        let pal = qenum::palindrome_check(&p, d);
        ok &= lc && pal;
        text.push_str(&format!("n = {n}: log-concave {lc}, palindromic {pal}\n"));
        polys.push(json!({ "colors": n, "log_concave": lc, "palindromic": pal }));
    }
    let fitted = fit_laws(5)?;
    let table = golden::laws();
    let mut laws = Vec::new();
    for (k, fit) in &fitted {
        let want = table.law(*k).expect("laws for k <= 5").polynomial();
        let same = *fit == want;
        let lead = qenum::leading_coefficient_check(fit, *k);
        // the fit must keep holding past the points it was built from
        let from = table.law(*k).expect("listed").from as usize;
        let mut extra = Vec::new();
        for n in from + k + 1..=law_colors.max(from + k + 1) {
            extra.push((n as i64, qenum::low_coefficients(n, k + 1, None)?.coeffs[*k].clone()));
        }
        let holds = qenum::check_law(fit, &extra).iter().all(|c| c.holds());
        ok &= same && lead && holds;
        text.push_str(&format!(
            "a_{k}(n) = {fit}: matches conjecture {same}, k!·lead = 5^{k} {lead}, holds to n = {} {holds}\n",
            law_colors.max(from + k + 1)
        ));
        laws.push(json!({ "k": k, "law": fit.to_string(), "matches": same, "leading": lead, "holds": holds }));
    }
    Ok(Output {
        text: text.trim_end().to_string(),
        json: json!({ "passed": ok, "polynomials": polys, "laws": laws }),
        ok,
    })
}

fn exit_code(e: &Error) -> u8 {
    match e {
        Error::ResourceLimit { .. } | Error::TooLarge { .. } => 3,
        _ => 2,
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(t) = cli.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(t).build_global() {
            eprintln!("cit: cannot configure {t} threads: {e}");
            return ExitCode::from(2);
        }
    }
    match run(&cli) {
        Ok(out) => {
            if cli.json {
                println!("{}", serde_json::to_string_pretty(&out.json).expect("JSON output"));
            } else {
                println!("{}", out.text);
            }
            if out.ok {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            if cli.json {
                println!("{}", json!({ "error": e.to_string() }));
            }
            eprintln!("cit: {e}");
            ExitCode::from(exit_code(&e))
        }
    }
}
