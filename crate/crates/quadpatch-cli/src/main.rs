use std::io::Write;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use quadpatch::canonical::tp_to_tri;
use quadpatch::patch::{Patch, PatchFile};
use quadpatch::{analyze, Error, Options, Report, Tolerances};

/// Detect, classify and measure quadric rational Bézier patches.
#[derive(Parser)]
#[command(name = "quadpatch", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full report: type, implicit equation and Euclidean elements.
    Classify(Common),
    /// The ten implicit coefficients.
    Implicit {
        #[command(flatten)]
        common: Common,
        #[arg(long, value_enum, default_value_t = Format::Doc)]
        format: Format,
    },
    /// Principal planes, axes, vertex and revolution tests.
    Elements(Common),
    /// Whether the patch lies on a quadric, with the sampled residual.
    Check(Common),
    /// Triangular net equivalent to a biquadratic one.
    TpToTri(Common),
    /// Echo of the parsed patch document.
    Dump {
        file: PathBuf,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Doc,
    Tuple,
}

#[derive(Args)]
struct Common {
    /// Patch document (TOML or JSON).
    file: PathBuf,
    /// Print a short prose summary instead of JSON.
    #[arg(long)]
    human: bool,
    /// Sample points per edge for the residual check.
    #[arg(long, default_value_t = 15)]
    grid: usize,
    /// TOML file overriding default tolerances.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    tol_infinity: Option<f64>,
    #[arg(long)]
    tol_rank: Option<f64>,
    #[arg(long)]
    tol_root: Option<f64>,
    #[arg(long)]
    tol_cluster: Option<f64>,
    #[arg(long)]
    tol_compat: Option<f64>,
    #[arg(long)]
    tol_lambda: Option<f64>,
    #[arg(long)]
    tol_center: Option<f64>,
    #[arg(long)]
    tol_discriminant: Option<f64>,
    #[arg(long)]
    tol_residual: Option<f64>,
}

impl Common {
    fn options(&self) -> Result<Options, Error> {
        let mut tol = match &self.config {
            Some(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
                Tolerances::from_toml(&text)?
            }
            None => Tolerances::default(),
        };
        let overrides = [
            (self.tol_infinity, &mut tol.tol_infinity),
            (self.tol_rank, &mut tol.tol_rank),
            (self.tol_root, &mut tol.tol_root),
            (self.tol_cluster, &mut tol.tol_cluster),
            (self.tol_compat, &mut tol.tol_compat),
            (self.tol_lambda, &mut tol.tol_lambda),
            (self.tol_center, &mut tol.tol_center),
            (self.tol_discriminant, &mut tol.tol_discriminant),
            (self.tol_residual, &mut tol.tol_residual),
        ];
        for (value, slot) in overrides {
            if let Some(v) = value {
                *slot = v;
            }
        }
        Ok(Options { tol, grid: self.grid })
    }

    fn load(&self) -> Result<(PatchFile, Patch), Error> {
        let file = PatchFile::load(&self.file)?;
        let patch = file.to_patch()?;
        Ok((file, patch))
    }
}

fn json<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string_pretty(value).expect("report types always serialize")
}

fn not_a_quadric(e: &Error) -> bool {
    matches!(e, Error::NotAQuadric(_) | Error::NoSecondIntersection)
}

fn run(cli: Cli) -> Result<String, Error> {
    match cli.command {
        Command::Dump { file } => Ok(PatchFile::load(&file)?.to_toml()),
        Command::Classify(c) => {
            let (file, patch) = c.load()?;
            let report = Report::new(&analyze(&patch, &c.options()?)?, &file);
            Ok(if c.human { report.human() } else { json(&report) })
        }
        Command::Implicit { common, format } => {
            let (file, patch) = common.load()?;
            let report = Report::new(&analyze(&patch, &common.options()?)?, &file);
            let coeffs = report.implicit.coeffs;
            Ok(match format {
                Format::Tuple => {
                    let parts: Vec<String> = coeffs.iter().map(|c| format!("{c:.16e}")).collect();
                    format!("({})", parts.join(", "))
                }
                Format::Doc if common.human => report.human().lines().find(|l| l.starts_with("implicit")).unwrap_or_default().to_string(),
                Format::Doc => json(&report.implicit),
            })
        }
        Command::Elements(c) => {
            let (file, patch) = c.load()?;
            let report = Report::new(&analyze(&patch, &c.options()?)?, &file);
            Ok(if c.human { report.human() } else { json(&report.elements) })
        }
        Command::Check(c) => {
            let (_, patch) = c.load()?;
            let a = analyze(&patch, &c.options()?)?;
            Ok(json(&serde_json::json!({
                "is_quadric": true,
                "kind": a.class.kind,
                "route": a.route,
                "max_residual": a.max_residual,
                "samples": a.samples,
            })))
        }
        Command::TpToTri(c) => {
            let (_, patch) = c.load()?;
            let Patch::Tensor(tp) = patch else {
                return Err(Error::InvalidPatch("tp-to-tri expects a tensor patch".into()));
            };
            let canon = tp_to_tri(&tp, &c.options()?.tol)?;
            let doc = Patch::Triangular(canon.patch.clone()).to_file().to_toml();
            Ok(format!(
                "# omega_u = {}, omega_v = {}, omega_w = {}, w110 = {}\n{doc}",
                canon.omega_u,
                canon.omega_v,
                canon.omega_w,
                canon.patch.weight(1, 1, 0)
            ))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let checking = matches!(cli.command, Command::Check(_));
    match run(cli) {
        Ok(out) => {
            let _ = writeln!(std::io::stdout(), "{}", out.trim_end());
            ExitCode::SUCCESS
        }
        Err(e) if not_a_quadric(&e) => {
            if checking {
                let _ = writeln!(std::io::stdout(), "{}", json(&serde_json::json!({ "is_quadric": false, "reason": e.to_string() })));
            }
            eprintln!("not a quadric: {e}");
            ExitCode::from(2)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(1)
        }
    }
}
