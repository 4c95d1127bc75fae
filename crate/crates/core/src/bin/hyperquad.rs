use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use hyperquad::exactnum::parse_rational;
use hyperquad::family_reduce::{reduce_family, verify_reduction};
use hyperquad::hermitian::huang_kernel_check;
use hyperquad::io::{self, GermJson, MapJson};
use hyperquad::quadric::{complexified_identity, gauss_codazzi_residual, maps_into_quadric, normalize_bh, HypersurfaceGerm};
use hyperquad::rescale::{default_threshold, run_rescale_experiment};
use hyperquad::{Error, Result};

/// Exact checks for holomorphic maps into hyperquadrics.
#[derive(Parser)]
#[command(name = "hyperquad", version)]
struct Cli {
    /// Write JSON here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Residual of the mapping equation by weighted degree.
    CheckMap {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        germ: PathBuf,
        #[arg(long)]
        order: u32,
    },
    /// Normalize a transversal map; prints F♯, T and M♯.
    Normalize {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        germ: PathBuf,
        #[arg(long)]
        order: u32,
    },
    /// Normalize, then evaluate the Gauss-Codazzi residual.
    GaussCodazzi {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        germ: PathBuf,
        #[arg(long)]
        order: u32,
    },
    /// Kernel check for Σ φ_j ψ_j divisible by ⟨z,ξ⟩_ℓ.
    HuangCheck {
        #[arg(long)]
        input: PathBuf,
    },
    /// Reduce a (φ, ψ) family and verify the certificate.
    ReduceFamily {
        #[arg(long)]
        input: PathBuf,
    },
    /// Normalize at each basepoint and record norms.
    RescaleExperiment {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        germ: PathBuf,
        #[arg(long)]
        points: PathBuf,
        #[arg(long)]
        order: u32,
        /// Squared-norm threshold for growth flags, as `p/q`.
        #[arg(long)]
        threshold: Option<String>,
    },
}

fn read(path: &Path) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::InvalidInput(format!("{}: {e}", path.display())))
}

fn load_germ(path: &Path) -> Result<HypersurfaceGerm> {
    io::germ_from_json(&io::read_json::<GermJson>(&read(path)?)?)
}

fn load_map(path: &Path) -> Result<io::LoadedMap> {
    io::map_from_json(&io::read_json::<MapJson>(&read(path)?)?)
}

/// Returns the report and whether every check passed.
fn run(cmd: &Cmd) -> Result<(Value, bool)> {
    match cmd {
        Cmd::CheckMap { map, germ, order } => {
            let m = load_germ(germ)?;
            let f = load_map(map)?.series(*order)?;
            let r = maps_into_quadric(&m, &f, *order)?;
            let mut v = io::residual_report_json(&r);
            if m.is_quadric() {
                let e = complexified_identity(&f, *order)?;
                let first = e.weighted_components().into_iter().find(|(_, p)| !p.is_zero()).map(|(d, _)| d);
                v["complexified_first_nonzero_degree"] = json!(first);
            }
            Ok((v, r.is_zero()))
        }
        Cmd::Normalize { map, germ, order } => {
            let m = load_germ(germ)?;
            let f = load_map(map)?.series(*order)?;
            let nz = normalize_bh(&f, &m, *order)?;
            Ok((io::normalization_json(&nz), true))
        }
        Cmd::GaussCodazzi { map, germ, order } => {
            let m = load_germ(germ)?;
            let f = load_map(map)?.series(*order)?;
            let nz = normalize_bh(&f, &m, *order)?;
            let r = gauss_codazzi_residual(&nz.f_sharp, &m, &nz.m_sharp)?;
            Ok((json!({"residual": io::poly_value(&r), "zero": r.is_zero()}), r.is_zero()))
        }
        Cmd::HuangCheck { input } => {
            let (sig, phi, cap) = io::huang_from_json(&io::read_json(&read(input)?)?)?;
            let r = huang_kernel_check(&sig, &phi, cap)?;
            Ok((io::kernel_report_json(&r), r.holds()))
        }
        Cmd::ReduceFamily { input } => {
            let (phi, psi) = io::families_from_json(&io::read_json(&read(input)?)?)?;
            let r = reduce_family(&phi, &psi)?;
            Ok((io::reduction_json(&r, &phi, &psi), verify_reduction(&r, &phi, &psi)))
        }
        Cmd::RescaleExperiment { map, germ, points, order, threshold } => {
            let m = load_germ(germ)?;
            let f = load_map(map)?.exact()?;
            let spec = io::points_from_json(&io::read_json(&read(points)?)?)?;
            let th = threshold.as_deref().map_or_else(|| Ok(default_threshold()), parse_rational)?;
            let t = run_rescale_experiment(&f, &m, &spec, *order, &th)?;
            Ok((io::norm_trace_json(&t), t.all_passed()))
        }
    }
}

fn emit(out: &Option<PathBuf>, v: &Value) -> std::io::Result<()> {
    let text = serde_json::to_string_pretty(v).expect("json");
    match out {
        Some(p) => std::fs::write(p, text + "\n"),
        None => match writeln!(std::io::stdout().lock(), "{text}") {
            Err(e) if e.kind() == std::io::ErrorKind::BrokenPipe => Ok(()),
            r => r,
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (value, code) = match run(&cli.cmd) {
        Ok((v, ok)) => (v, if ok { 0 } else { 2 }),
        Err(e) => {
            eprintln!("error: {e}");
            let code = if e.is_check_failure() { 2 } else { 1 };
            (json!({"error": e.to_string(), "check_failed": e.is_check_failure()}), code)
        }
    };
    if let Err(e) = emit(&cli.out, &value) {
        eprintln!("error: {e}");
        return ExitCode::from(1);
    }
    ExitCode::from(code)
}
