use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use fuzzsphere::csquant::{quantize_expansion, quantize_quadrature, quantize_ylm_closed, HarmonicExpansion};
use fuzzsphere::export::{read_matrix, to_csv, to_json, write_matrix, Format, MatrixFile};
use fuzzsphere::fuzzy::{c_of_ell_closed, c_of_ell_printed, classical_limit_report, correspondence_residual, empirical_c, FuzzyParams};
use fuzzsphere::quad::SphereGrid;
use fuzzsphere::ssh::{lambda_matrices, ssh_eval};
use fuzzsphere::verify::{parse_tolerance, run, Suite, VerifyConfig};
use fuzzsphere::wigner::{three_j, ThreeJKey};
use fuzzsphere::{Complex, HalfInt, OperatorMatrix, PhiPeriod, SpherePoint, SshParams};

#[derive(Parser)]
#[command(name = "fuzzsphere", version, about = "Coherent-state quantization and the fuzzy sphere")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

/// Spins are twice-values: `--two-j 3` means j = 3/2.
#[derive(Args, Clone, Copy)]
struct Spin {
    #[arg(long)]
    two_j: u32,
    #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
    two_sigma: i32,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    psi: f64,
}

impl Spin {
    fn params(&self) -> Result<SshParams> {
        Ok(SshParams::new(self.two_j, self.two_sigma)?.with_psi(self.psi))
    }
}

#[derive(Args, Clone)]
struct Output {
    /// Matrix file; printed to stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = FormatArg::Json)]
    format: FormatArg,
}

#[derive(Clone, Copy, ValueEnum)]
enum FormatArg {
    Json,
    Csv,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Format {
        match f {
            FormatArg::Json => Format::Json,
            FormatArg::Csv => Format::Csv,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Builtin {
    X1,
    X2,
    X3,
    CosTheta,
}

impl Builtin {
    fn axis(self) -> usize {
        match self {
            Builtin::X1 => 1,
            Builtin::X2 => 2,
            Builtin::X3 | Builtin::CosTheta => 3,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Method {
    Closed,
    Quadrature,
}

#[derive(Subcommand)]
enum Command {
    /// Exact 3j-symbol from six twice-values j1 j2 j3 m1 m2 m3.
    Wigner3j {
        #[arg(long, num_args = 6, allow_hyphen_values = true, required = true)]
        two: Vec<i32>,
    },
    /// Value of a spin spherical harmonic.
    SshEval {
        #[command(flatten)]
        spin: Spin,
        #[arg(long, allow_hyphen_values = true)]
        two_mu: i32,
        #[arg(long)]
        theta: f64,
        #[arg(long, allow_hyphen_values = true)]
        phi: f64,
    },
    /// Print Λ1, Λ2, Λ3, Λ+, Λ-.
    Lambda {
        #[command(flatten)]
        spin: Spin,
    },
    /// Quantize a builtin, a single harmonic or an expansion `l:m:re[:im],...`.
    Quantize {
        #[arg(value_enum)]
        builtin: Option<Builtin>,
        #[arg(long, num_args = 2, value_names = ["L", "M"], allow_hyphen_values = true)]
        ylm: Option<Vec<i32>>,
        #[arg(long)]
        expansion: Option<String>,
        #[arg(long, value_enum, default_value_t = Method::Closed)]
        method: Method,
        #[command(flatten)]
        spin: Spin,
        #[arg(long)]
        n_theta: Option<usize>,
        #[arg(long)]
        n_phi: Option<usize>,
        #[command(flatten)]
        output: Output,
    },
    /// Compare CS-quantized and hatted harmonics, one line per ℓ.
    FuzzyCompare {
        #[command(flatten)]
        spin: Spin,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Commutator norms and lower symbols as j grows, with σ = j - offset.
    ClassicalLimit {
        #[arg(long, default_value_t = 0)]
        two_sigma_offset: i32,
        #[arg(long, value_delimiter = ',', default_values_t = vec![2, 4, 6, 8, 10, 12, 14, 16])]
        two_j: Vec<u32>,
        #[arg(long, default_value_t = 1.0)]
        r: f64,
    },
    /// Run invariant checks; exit status 1 if any fails.
    Verify {
        #[arg(long, default_value = "all")]
        suite: String,
        /// NAME=VALUE, NAME a check or a dotted prefix; repeatable.
        #[arg(long = "tol")]
        tol: Vec<String>,
        #[arg(long, default_value_t = 4)]
        max_two_j: u32,
    },
    /// Write a named matrix (identity, lambda1..3, lambda+, lambda-, ylm:L:M)
    /// or convert an existing matrix file.
    Export {
        #[arg(long)]
        matrix: Option<String>,
        #[arg(long, conflicts_with = "matrix")]
        from: Option<PathBuf>,
        #[arg(long, value_enum, default_value_t = FormatArg::Json)]
        from_format: FormatArg,
        #[arg(long, default_value_t = 0)]
        two_j: u32,
        #[arg(long, default_value_t = 0, allow_hyphen_values = true)]
        two_sigma: i32,
        #[command(flatten)]
        output: Output,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cmd: Command) -> Result<ExitCode> {
    match cmd {
        Command::Wigner3j { two } => wigner3j(&two)?,
        Command::SshEval {
            spin,
            two_mu,
            theta,
            phi,
        } => {
            let p = spin.params()?;
            let v = ssh_eval(&p, HalfInt::from_twice(two_mu), SpherePoint::new(theta, phi))?;
            println!("re={:.16e} im={:.16e}", v.re, v.im);
        }
        Command::Lambda { spin } => {
            let lam = lambda_matrices(&spin.params()?);
            for (name, m) in [
                ("lambda1", &lam.l1),
                ("lambda2", &lam.l2),
                ("lambda3", &lam.l3),
                ("lambda+", &lam.raise),
                ("lambda-", &lam.lower),
            ] {
                println!("{name}:");
                print!("{}", pretty(m));
            }
        }
        Command::Quantize {
            builtin,
            ylm,
            expansion,
            method,
            spin,
            n_theta,
            n_phi,
            output,
        } => quantize(builtin, ylm, expansion, method, spin, n_theta, n_phi, &output)?,
        Command::FuzzyCompare { spin, r } => fuzzy_compare(spin, r)?,
        Command::ClassicalLimit {
            two_sigma_offset,
            two_j,
            r,
        } => {
            let js: Vec<HalfInt> = two_j.iter().map(|t| HalfInt::from_twice(*t as i32)).collect();
            for row in classical_limit_report(HalfInt::from_twice(two_sigma_offset), &js, r)? {
                let ratio = row.ratio_to_previous.map_or("-".to_string(), |x| format!("{x:.12}"));
                println!(
                    "two_j={} two_sigma={} kappa={:.12} commutator_norm={:.15e} expected={:.15e} lower_symbol_deviation={:.6e} ratio_to_previous={ratio}",
                    row.two_j, row.two_sigma, row.kappa, row.commutator_norm, row.expected_norm, row.lower_symbol_deviation
                );
            }
        }
        Command::Verify { suite, tol, max_two_j } => {
            let suite: Suite = suite.parse()?;
            let mut config = VerifyConfig {
                max_two_j,
                ..VerifyConfig::default()
            };
            for t in &tol {
                let (k, v) = parse_tolerance(t)?;
                config.tolerances.insert(k, v);
            }
            let checks = run(suite, &config)?;
            let failed = checks.iter().filter(|c| !c.passed()).count();
            for c in &checks {
                println!("{c}");
            }
            eprintln!("{} checks, {failed} failed", checks.len());
            return Ok(if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE });
        }
        Command::Export {
            matrix,
            from,
            from_format,
            two_j,
            two_sigma,
            output,
        } => {
            let file = match (matrix, from) {
                (_, Some(path)) => read_matrix(&path, from_format.into())
                    .with_context(|| format!("reading {}", path.display()))?,
                (Some(name), None) => MatrixFile {
                    two_sigma,
                    matrix: named_matrix(&name, two_j, two_sigma)?,
                },
                (None, None) => bail!("give --matrix NAME or --from FILE"),
            };
            emit(&file, &output)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn wigner3j(two: &[i32]) -> Result<()> {
    let t: [i32; 6] = two.try_into().context("expected six values")?;
    for (i, (j, m)) in t[..3].iter().zip(&t[3..]).enumerate() {
        if *j < 0 {
            bail!("2j{} = {j} is negative", i + 1);
        }
        if (j - m) % 2 != 0 {
            bail!("2m{} = {m} and 2j{} = {j} differ in parity", i + 1, i + 1);
        }
    }
    let v = three_j(&ThreeJKey::from_twice(t))?;
    if v.is_zero() {
        println!("0");
    } else {
        println!("{v} ≈ {:.15}", v.to_f64());
    }
    Ok(())
}

fn named_matrix(name: &str, two_j: u32, two_sigma: i32) -> Result<OperatorMatrix> {
    let p = SshParams::new(two_j, two_sigma)?;
    let lam = lambda_matrices(&p);
    Ok(match name {
        "identity" => OperatorMatrix::identity(two_j),
        "lambda1" => lam.l1,
        "lambda2" => lam.l2,
        "lambda3" => lam.l3,
        "lambda+" => lam.raise,
        "lambda-" => lam.lower,
        _ => match name.strip_prefix("ylm:").and_then(|s| s.split_once(':')) {
            Some((l, m)) => quantize_ylm_closed(&p, l.parse()?, m.parse()?)?,
            None => bail!("unknown matrix `{name}`"),
        },
    })
}

#[allow(clippy::too_many_arguments)]
fn quantize(
    builtin: Option<Builtin>,
    ylm: Option<Vec<i32>>,
    expansion: Option<String>,
    method: Method,
    spin: Spin,
    n_theta: Option<usize>,
    n_phi: Option<usize>,
    output: &Output,
) -> Result<()> {
    let p = spin.params()?;
    let given = [builtin.is_some(), ylm.is_some(), expansion.is_some()];
    if given.iter().filter(|g| **g).count() != 1 {
        bail!("give exactly one of a builtin (x1, x2, x3, cos_theta), --ylm L M or --expansion");
    }
    let grid_for = |ell: u32| -> Result<SphereGrid> {
        let auto = SphereGrid::auto(p.two_j, ell);
        let period = if p.two_j % 2 == 0 { PhiPeriod::Single } else { PhiPeriod::Doubled };
        Ok(SphereGrid::new(n_theta.unwrap_or(auto.n_theta), n_phi.unwrap_or(auto.n_phi), period)?)
    };

    let matrix = if let Some(b) = builtin {
        let a = b.axis();
        let q = quantize_quadrature(&p, |x| Complex::new(x.cartesian()[a - 1], 0.0), &grid_for(1)?)?;
        println!("hermiticity_residual={:.3e}", q.hermiticity_residual());
        if p.two_sigma == 0 {
            println!("max_abs={:.3e}", q.max_abs());
            eprintln!("degenerate: quantization vanishes");
            OperatorMatrix::zeros(p.two_j)
        } else {
            let j = p.j().to_f64();
            let k = p.sigma().to_f64() / (j * (j + 1.0));
            let expect = lambda_matrices(&p).axis(a).scale(Complex::new(k, 0.0));
            println!("k={k:.16e}");
            println!("deviation_from_k_lambda{a}={:.3e}", q.max_abs_diff(&expect));
            q
        }
    } else if let Some(v) = ylm {
        let (l, m) = (v[0], v[1]);
        if l < 0 {
            bail!("ℓ = {l} is negative");
        }
        let l = l as u32;
        if l > p.two_j {
            eprintln!("truncated: l={l} m={m} (l > 2j = {})", p.two_j);
        }
        let q = match method {
            Method::Closed => quantize_ylm_closed(&p, l, m)?,
            Method::Quadrature => {
                let yp = SshParams::new(2 * l, 0)?;
                let mh = HalfInt::from_int(m);
                if m.unsigned_abs() > l {
                    bail!("|m| = {} exceeds ℓ = {l}", m.abs());
                }
                quantize_quadrature(&p, |x| ssh_eval(&yp, mh, x).expect("checked projection"), &grid_for(l)?)?
            }
        };
        println!("hermiticity_residual={:.3e}", q.hermiticity_residual());
        q
    } else {
        let f: HarmonicExpansion = expansion.expect("checked above").parse()?;
        let q = quantize_expansion(&p, &f)?;
        for ((l, m), c) in &q.truncated {
            eprintln!("truncated: l={l} m={m} coeff={}{:+}i (l > 2j = {})", c.re, c.im, p.two_j);
        }
        println!("hermiticity_residual={:.3e}", q.matrix.hermiticity_residual());
        q.matrix
    };
    if matrix.max_abs() == 0.0 && builtin.is_none() {
        eprintln!("zero matrix");
    }
    emit(
        &MatrixFile {
            two_sigma: p.two_sigma,
            matrix,
        },
        output,
    )
}

fn fuzzy_compare(spin: Spin, r: f64) -> Result<()> {
    let fp = FuzzyParams::new(spin.two_j, spin.two_sigma, r)?;
    println!("kappa={:.16e}", fp.kappa);
    for l in 0..=fp.two_j {
        let e = empirical_c(&fp, l)?;
        println!(
            "ell={l} c_empirical={:.15e} spread={:.3e} c_closed={:.15e} c_printed={:.15e} residual={:.3e}",
            e.mean,
            e.spread,
            c_of_ell_closed(&fp, l)?,
            c_of_ell_printed(&fp, l)?,
            correspondence_residual(&fp, l)?
        );
    }
    Ok(())
}

fn emit(file: &MatrixFile, output: &Output) -> Result<()> {
    let format: Format = output.format.into();
    match &output.out {
        Some(path) => {
            write_matrix(path, file, format).with_context(|| format!("writing {}", path.display()))?;
            eprintln!("wrote {}", path.display());
        }
        None => {
            let text = match format {
                Format::Json => to_json(file),
                Format::Csv => to_csv(&file.matrix)?,
            };
            std::io::stdout().write_all(text.as_bytes())?;
        }
    }
    Ok(())
}

fn pretty(m: &OperatorMatrix) -> String {
    let e = m.entries();
    let mut s = String::new();
    for r in 0..e.nrows() {
        let row: Vec<String> = (0..e.ncols())
            .map(|c| {
                let z = e[(r, c)];
                format!("{:>9.5}{:+.5}i", z.re, z.im)
            })
            .collect();
        s.push_str(&format!("  [{}]\n", row.join("  ")));
    }
    s
}
