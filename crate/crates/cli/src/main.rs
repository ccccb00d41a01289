//! `mls` — classify metric Lie group models, analyze surface grids, run
//! reconstructions and correspondences, and generate special surfaces.
//!
//! Exit codes: 0 ok, 1 parse error, 2 data integrity, 3 mathematical
//! precondition, 4 integration failure.

use clap::{Args, Parser, Subcommand, ValueEnum};
use mls_core::correspond::{daniel_transform, TargetSpace};
use mls_core::grid::Axes;
use mls_core::io;
use mls_core::model::{make_dim4_model, make_model, FamilyKind, MetricLieGroupModel, ModelPoint, Signature, StructureConstants};
use mls_core::reconstruct::{
    companion_residual, reconstruct_dim4, reconstruct_from_angles, reconstruct_from_t, AngleData,
    Dim4Data, HChoice, ReconstructionOptions, TangentData,
};
use mls_core::special::{
    constant_angle_set, totally_geodesic, vertical_cylinder,
    ConstantAngleSolutionSet, TotallyGeodesic,
};
use mls_core::surface::{compatibility_residuals, derived_fields, extract_fundamental_data, SurfacePatch};
use mls_core::Error;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "mls", version, about = "surfaces in unimodular metric Lie groups")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Structure constants c1,c2,c3
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    c: Option<Vec<f64>>,
    /// Signature eps1,eps2,eps3 (1,1,1 or 1,1,-1)
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    eps: Option<Vec<i8>>,
    /// Two-parameter family (EKT, LKT, LKT_HAT)
    #[arg(long)]
    family: Option<FamilyArg>,
    #[arg(long, allow_hyphen_values = true)]
    kappa: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    tau: Option<f64>,
    /// JSON model spec file ({"c":..,"eps":..} or {"family":..,"kappa":..,"tau":..})
    #[arg(long)]
    spec: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyArg {
    #[value(name = "EKT", alias = "ekt")]
    Ekt,
    #[value(name = "LKT", alias = "lkt")]
    Lkt,
    #[value(name = "LKT_HAT", alias = "lkt_hat")]
    LktHat,
}

impl From<FamilyArg> for FamilyKind {
    fn from(f: FamilyArg) -> FamilyKind {
        match f {
            FamilyArg::Ekt => FamilyKind::Ekt,
            FamilyArg::Lkt => FamilyKind::Lkt,
            FamilyArg::LktHat => FamilyKind::LktHat,
        }
    }
}

impl ModelArgs {
    fn build(&self) -> Result<MetricLieGroupModel, CliError> {
        if let Some(path) = &self.spec {
            let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(e.to_string()))?;
            let spec: io::GroupSpec =
                serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
            return spec.build().map_err(CliError::from);
        }
        if let Some(fam) = self.family {
            let kappa = self.kappa.ok_or_else(|| CliError::Parse("--kappa required".into()))?;
            let tau = self.tau.ok_or_else(|| CliError::Parse("--tau required".into()))?;
            return make_dim4_model(fam.into(), kappa, tau).map_err(CliError::from);
        }
        let c = self.c.as_ref().ok_or_else(|| CliError::Parse("--c or --family required".into()))?;
        let eps = self.eps.clone().unwrap_or_else(|| vec![1, 1, 1]);
        if c.len() != 3 || eps.len() != 3 {
            return Err(CliError::Parse("--c and --eps take three comma-separated values".into()));
        }
        if c.iter().any(|x| !x.is_finite()) {
            return Err(CliError::Data("non-finite structure constants".into()));
        }
        let sig = Signature::new(eps[0], eps[1], eps[2]).map_err(CliError::from)?;
        Ok(make_model(StructureConstants::new(c[0], c[1], c[2]), sig))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Classify a model: group type, isometry dimension, derived constants
    Classify {
        #[command(flatten)]
        model: ModelArgs,
        /// Emit JSON instead of text
        #[arg(long)]
        json: bool,
    },
    /// Analyze a surface grid CSV against a model: extract fundamental data
    /// and report compatibility residuals
    Analyze {
        #[command(flatten)]
        model: ModelArgs,
        /// Input surface grid CSV (u,v,x,y,z); derivatives are taken at the
        /// grid's own spacing
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        /// Output fundamental-data CSV
        #[arg(long)]
        out: Option<PathBuf>,
        /// Hard tolerance on the algebraic invariants
        #[arg(long, default_value_t = 1e-6)]
        tol: f64,
    },
    /// Reconstruct a surface from data extracted from an input grid
    Reconstruct {
        #[command(flatten)]
        model: ModelArgs,
        /// Manifest JSON: {"mode":"from_T"|"from_angles"|"dim4","q0":[..],"h_sign":..}
        #[arg(long)]
        manifest: PathBuf,
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Override the manifest's mean-curvature sign branch
        #[arg(long, allow_hyphen_values = true)]
        h_sign: Option<f64>,
    },
    /// Apply the family correspondence to a CMC surface grid
    Correspond {
        #[command(flatten)]
        model: ModelArgs,
        /// Manifest JSON {"theta": t, "target_family": "auto"}; or use --theta
        #[arg(long)]
        manifest: Option<PathBuf>,
        #[arg(long, allow_hyphen_values = true)]
        theta: Option<f64>,
        #[arg(long, value_name = "FILE")]
        r#in: PathBuf,
        /// Output CSV for the reconstructed sister surface (written when the
        /// target is a metric Lie group)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate special surfaces (constant-angle cosets, totally geodesic
    /// patches, vertical cylinders)
    Special {
        #[command(flatten)]
        model: ModelArgs,
        #[arg(long)]
        mode: SpecialMode,
        /// Constant angle triple nu1,nu2,nu3 for --mode constant-angle
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        nu: Option<Vec<f64>>,
        /// Base point x,y,z
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_value = "0,0,0")]
        q0: Vec<f64>,
        /// Chart extent (patch covers [-extent, extent]^2 or [0, extent]^2)
        #[arg(long, default_value_t = 0.5)]
        extent: f64,
        /// Grid points per direction
        #[arg(long, default_value_t = 41)]
        n: usize,
        /// Flow integrator substep length
        #[arg(long, default_value_t = 1.0 / 400.0)]
        h: f64,
        /// Cylinder radius for --mode cylinder
        #[arg(long, default_value_t = 1.0)]
        r: f64,
        /// Output surface CSV
        #[arg(long)]
        out: Option<PathBuf>,
        /// Also write the companion cylinder next to --out
        #[arg(long)]
        companion: bool,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum SpecialMode {
    #[value(name = "constant-angle")]
    ConstantAngle,
    #[value(name = "totally-geodesic")]
    TotallyGeodesic,
    #[value(name = "cylinder")]
    Cylinder,
}

/// CLI error with the spec'd exit codes.
enum CliError {
    Parse(String),
    Data(String),
    Math(String),
    Integration(String),
}

impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::Data(_) | Error::GridTooSmall { .. } => CliError::Data(e.to_string()),
            Error::Integration { .. } => CliError::Integration(e.to_string()),
            Error::Io(ref io) => CliError::Parse(io.to_string()),
            Error::Json(ref j) => CliError::Parse(j.to_string()),
            _ => CliError::Math(e.to_string()),
        }
    }
}

impl CliError {
    fn exit(self) -> ExitCode {
        let (code, label, msg) = match self {
            CliError::Parse(m) => (1, "parse", m),
            CliError::Data(m) => (2, "data", m),
            CliError::Math(m) => (3, "precondition", m),
            CliError::Integration(m) => (4, "integration", m),
        };
        eprintln!("mls: {label}: {msg}");
        ExitCode::from(code)
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => e.exit(),
    }
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Classify { model, json } => classify(model, json),
        Command::Analyze { model, r#in, out, tol } => analyze(model, r#in, out, tol),
        Command::Reconstruct { model, manifest, r#in, out, h_sign } => {
            reconstruct(model, manifest, r#in, out, h_sign)
        }
        Command::Correspond { model, manifest, theta, r#in, out } => {
            correspond(model, manifest, theta, r#in, out)
        }
        Command::Special { model, mode, nu, q0, extent, n, h, r, out, companion } => {
            special(model, mode, nu, q0, extent, n, h, r, out, companion)
        }
    }
}

fn classify(model: ModelArgs, json: bool) -> Result<(), CliError> {
    let m = model.build()?;
    if json {
        println!("{}", serde_json::to_string_pretty(&m).map_err(|e| CliError::Parse(e.to_string()))?);
    } else {
        println!(
            "{} iso_dim={} global={}",
            m.group_type, m.iso_dim, m.is_global
        );
        println!("c  = ({}, {}, {})", m.c.c1, m.c.c2, m.c.c3);
        println!("eps = ({}, {}, {})", m.eps.eps1, m.eps.eps2, m.eps.eps3);
        println!("mu = ({}, {}, {})", m.mu[0], m.mu[1], m.mu[2]);
        println!("a  = ({}, {}, {})", m.a[0], m.a[1], m.a[2]);
        match &m.family {
            Some(f) => println!(
                "family = {}(kappa={}, tau={}) killing_index={}",
                f.kind,
                f.kappa,
                f.tau,
                f.killing_index + 1
            ),
            None => println!("family = none"),
        }
    }
    Ok(())
}

/// Load a surface CSV as a node-sampled patch: positions snap to grid
/// nodes and derivatives are grid finite differences at the stored spacing.
fn load_patch(
    model: &MetricLieGroupModel,
    path: &PathBuf,
) -> Result<(SurfacePatch, Axes), CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Parse(e.to_string()))?;
    let parsed = io::read_surface_csv(&text).map_err(CliError::from)?;
    let patch = mls_core::surface::sampled_patch(model, &parsed.axes, parsed.positions)
        .map_err(CliError::from)?;
    Ok((patch, parsed.axes))
}

fn analyze(
    model: ModelArgs,
    input: PathBuf,
    out: Option<PathBuf>,
    tol: f64,
) -> Result<(), CliError> {
    let m = model.build()?;
    let (patch, axes) = load_patch(&m, &input)?;
    let grid = extract_fundamental_data(&patch, &axes).map_err(CliError::from)?;
    let report = compatibility_residuals(&grid).map_err(CliError::from)?;
    println!("surface: {} x {} grid, causal type ({}, {}, {})",
        axes.us.len(), axes.vs.len(), grid.ehat[0], grid.ehat[1], grid.ehat[2]);
    print!("{report}");
    let df = derived_fields(&grid).map_err(CliError::from)?;
    let zmin = df.zeta.data.iter().cloned().fold(f64::INFINITY, f64::min);
    let zmax = df.zeta.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let pmin = df.psi.data.iter().cloned().fold(f64::INFINITY, f64::min);
    let pmax = df.psi.data.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    println!("zeta in [{zmin:.6e}, {zmax:.6e}], psi in [{pmin:.6e}, {pmax:.6e}]");
    println!("psi consistency: {}", df.psi_consistency);
    let h_abs_min = grid.data.data.iter().map(|d| d.h.abs()).fold(f64::INFINITY, f64::min);
    if h_abs_min > 1e-10 {
        let rep = companion_residual(&grid, 1e-10).map_err(CliError::from)?;
        println!("companion residual: {}", rep.stats);
    } else {
        println!("companion residual: skipped (H vanishes somewhere)");
    }
    if let Some(path) = out {
        let mut buf = Vec::new();
        io::write_fundamental_csv(&mut buf, &grid).map_err(CliError::from)?;
        std::fs::write(&path, buf).map_err(|e| CliError::Parse(e.to_string()))?;
        println!("wrote {}", path.display());
    }
    if report.algebraic.max > tol {
        return Err(CliError::Math(format!(
            "algebraic invariant violation {:.3e} exceeds --tol {tol:.1e}",
            report.algebraic.max
        )));
    }
    Ok(())
}

fn reconstruct(
    model: ModelArgs,
    manifest: PathBuf,
    input: PathBuf,
    out: PathBuf,
    h_sign: Option<f64>,
) -> Result<(), CliError> {
    let m = model.build()?;
    let text = std::fs::read_to_string(&manifest).map_err(|e| CliError::Parse(e.to_string()))?;
    let man: io::ReconstructManifest =
        serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
    let (patch, axes) = load_patch(&m, &input)?;
    let grid = extract_fundamental_data(&patch, &axes).map_err(CliError::from)?;
    let mut opts = ReconstructionOptions::for_axes(&axes);
    opts.orthonormality_tol = man.tolerances.orthonormality;
    opts.symmetry_tol = man.tolerances.symmetry;
    if let Some(c) = man.tolerances.condition {
        opts.condition_tol = c;
    }
    let q0 = ModelPoint::new(man.q0[0], man.q0[1], man.q0[2]);
    let (rec_model, positions, diag) = match man.mode {
        io::ReconstructMode::FromT => {
            let data = TangentData::from_surface(&grid);
            let rec = reconstruct_from_t(&data, q0, &opts).map_err(CliError::from)?;
            (rec.model, rec.positions, rec.diagnostics)
        }
        io::ReconstructMode::FromAngles => {
            let data = AngleData {
                model: grid.model.clone(),
                axes: grid.axes.clone(),
                ehat: grid.ehat,
                gauge: grid.gauge.clone(),
                nu: [grid.nu_grid(0), grid.nu_grid(1), grid.nu_grid(2)],
            };
            let sign = h_sign.unwrap_or(man.h_sign);
            let rec = reconstruct_from_angles(&data, HChoice::Sign(sign), q0, &opts)
                .map_err(CliError::from)?;
            (
                rec.reconstruction.model,
                rec.reconstruction.positions,
                rec.reconstruction.diagnostics,
            )
        }
        io::ReconstructMode::Dim4 => {
            let data = Dim4Data::from_surface(&grid).map_err(CliError::from)?;
            let rec = reconstruct_dim4(&data, q0, None, &opts).map_err(CliError::from)?;
            (rec.model, rec.positions, rec.diagnostics)
        }
    };
    let mut buf = Vec::new();
    io::write_surface_csv(&mut buf, &axes, &positions).map_err(CliError::from)?;
    std::fs::write(&out, buf).map_err(|e| CliError::Parse(e.to_string()))?;
    println!("wrote {}", out.display());
    println!("model used: c = {:?}, eps = {:?}", rec_model.c_vec(), rec_model.eps_vec());
    if let Some(d) = &diag.darboux {
        println!("darboux residual: {d}");
    }
    println!("path independence gap: {:.6e}", diag.path_independence_gap);
    for (name, s) in &diag.condition_residuals {
        println!("condition {name}: {s}");
    }
    Ok(())
}

fn correspond(
    model: ModelArgs,
    manifest: Option<PathBuf>,
    theta_flag: Option<f64>,
    input: PathBuf,
    out: Option<PathBuf>,
) -> Result<(), CliError> {
    let m = model.build()?;
    let theta = if let Some(path) = manifest {
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::Parse(e.to_string()))?;
        let man: io::CorrespondManifest =
            serde_json::from_str(&text).map_err(|e| CliError::Parse(e.to_string()))?;
        man.theta
    } else {
        theta_flag.ok_or_else(|| CliError::Parse("--theta or --manifest required".into()))?
    };
    let (patch, axes) = load_patch(&m, &input)?;
    let grid = extract_fundamental_data(&patch, &axes).map_err(CliError::from)?;
    let source_report = mls_core::reconstruct::dim4_residuals(
        &mls_core::reconstruct::Dim4Coefficients::from_family(
            mls_core::correspond::family_of(&grid.model).map_err(CliError::from)?.kind,
            mls_core::correspond::family_of(&grid.model).map_err(CliError::from)?.kappa,
            mls_core::correspond::family_of(&grid.model).map_err(CliError::from)?.tau,
            grid.ehat[2],
        ),
        &grid.axes,
        grid.ehat,
        &grid.gauge,
        &grid.data.map(|d| d.s),
        &grid.t_grid(mls_core::reconstruct::distinguished_index(&grid.model).map_err(CliError::from)?),
        &grid.nu_grid(mls_core::reconstruct::distinguished_index(&grid.model).map_err(CliError::from)?),
    )
    .map_err(CliError::from)?;
    let target = daniel_transform(&grid, theta).map_err(CliError::from)?;
    let p = &target.params;
    println!(
        "source: {} (kappa={}, tau={}), H = {:.12e}",
        p.source_kind, p.source.0, p.source.1, p.source.2
    );
    println!(
        "target: kappa~ = {:.12e}, tau~ = {:.12e}, H~ = {:.12e} (theta = {theta})",
        p.target.0, p.target.1, p.target.2
    );
    let report = target.verify().map_err(CliError::from)?;
    println!("source residuals: gauss {} codazzi {} alg {} gradT {} gradNu {}",
        source_report.gauss, source_report.codazzi, source_report.algebraic,
        source_report.grad_t, source_report.grad_nu);
    println!("target residuals: gauss {} codazzi {} alg {} gradT {} gradNu {}",
        report.gauss, report.codazzi, report.algebraic, report.grad_t, report.grad_nu);
    match &target.target {
        TargetSpace::ProductLimit { kind, kappa } => {
            println!("target is the product limit {kind}(kappa={kappa}, tau=0): no reconstruction");
        }
        TargetSpace::Model(tm) => {
            if let Some(path) = out {
                let data = target.dim4_data().map_err(CliError::from)?;
                let opts = ReconstructionOptions::for_axes(&axes);
                let q0 = ModelPoint::new(0.0, 0.0, 0.0);
                let rec = reconstruct_dim4(&data, q0, None, &opts).map_err(CliError::from)?;
                let mut buf = Vec::new();
                io::write_surface_csv(&mut buf, &axes, &rec.positions).map_err(CliError::from)?;
                std::fs::write(&path, buf).map_err(|e| CliError::Parse(e.to_string()))?;
                println!(
                    "wrote sister surface {} in model c = {:?}",
                    path.display(),
                    tm.c_vec()
                );
                println!("darboux residual: {}", rec.diagnostics.darboux.unwrap());
            }
        }
    }
    Ok(())
}

#[allow(clippy::too_many_arguments)]
fn special(
    model: ModelArgs,
    mode: SpecialMode,
    nu: Option<Vec<f64>>,
    q0: Vec<f64>,
    extent: f64,
    n: usize,
    h: f64,
    r: f64,
    out: Option<PathBuf>,
    companion: bool,
) -> Result<(), CliError> {
    let m = model.build()?;
    match mode {
        SpecialMode::ConstantAngle => {
            let set = constant_angle_set(&m, 1.0);
            println!("constant-angle solution set: {}", set.describe());
            match &set {
                ConstantAngleSolutionSet::Points(pts) => {
                    for p in pts {
                        println!("  nu = ({:.12}, {:.12}, {:.12})", p[0], p[1], p[2]);
                    }
                }
                ConstantAngleSolutionSet::Curves(cs) => {
                    for (k, c) in cs.iter().enumerate() {
                        let s = c.sample(0.0);
                        println!(
                            "  curve {k}: sample nu(0) = ({:.12}, {:.12}, {:.12})",
                            s[0], s[1], s[2]
                        );
                    }
                }
                _ => {}
            }
            if let (Some(nu), Some(path)) = (nu, out) {
                let q = ModelPoint::new(q0[0], q0[1], q0[2]);
                let surf = mls_core::special::integral_surface_with_substep(
                    &m, [nu[0], nu[1], nu[2]], q, extent, h,
                )
                .map_err(CliError::from)?;
                println!("flow commutativity defect: {:.3e}", surf.commutativity_defect);
                write_patch_csv(&surf.patch, -extent, extent, n, &path)?;
            }
            Ok(())
        }
        SpecialMode::TotallyGeodesic => {
            match totally_geodesic(&m) {
                TotallyGeodesic::ConstantCurvature => {
                    println!("constant curvature: totally geodesic planes in every direction");
                }
                TotallyGeodesic::Empty => println!("no totally geodesic surfaces"),
                TotallyGeodesic::Distributions(ds) => {
                    for (k, d) in ds.iter().enumerate() {
                        println!(
                            "distribution {k}: span {:?} and {:?}, nu = {:?}",
                            d.span[0], d.span[1], d.nu
                        );
                    }
                    if let Some(path) = out {
                        let q = ModelPoint::new(q0[0], q0[1], q0[2]);
                        let surf = mls_core::special::integral_surface_with_substep(
                            &m, ds[0].nu, q, extent, h,
                        )
                        .map_err(CliError::from)?;
                        write_patch_csv(&surf.patch, -extent, extent, n, &path)?;
                    }
                }
            }
            Ok(())
        }
        SpecialMode::Cylinder => {
            let cyl = vertical_cylinder(&m, r).map_err(CliError::from)?;
            println!("H = {:.12e}, conformal factor = {:.12e}", cyl.h, cyl.conformal_factor);
            if let Some(path) = out {
                write_patch_csv(&cyl.patch, 0.0, extent, n, &path)?;
                if companion {
                    let mut cpath = path.clone();
                    let stem = cpath.file_stem().and_then(|s| s.to_str()).unwrap_or("out");
                    let ext = cpath.extension().and_then(|s| s.to_str()).unwrap_or("csv");
                    cpath.set_file_name(format!("{stem}_companion.{ext}"));
                    write_patch_csv(&cyl.companion, 0.0, extent, n, &cpath)?;
                }
            }
            Ok(())
        }
    }
}

fn write_patch_csv(
    patch: &SurfacePatch,
    lo: f64,
    hi: f64,
    n: usize,
    path: &PathBuf,
) -> Result<(), CliError> {
    let axes = Axes::new(lo, hi, n, lo, hi, n);
    let grid = mls_core::grid::Grid::from_fn(n, n, |i, j| patch.position(axes.us[i], axes.vs[j]));
    if grid.data.iter().any(|p| p.iter().any(|x| !x.is_finite())) {
        return Err(CliError::Integration("patch left the model domain".into()));
    }
    let mut buf = Vec::new();
    io::write_surface_csv(&mut buf, &axes, &grid).map_err(CliError::from)?;
    std::fs::write(path, buf).map_err(|e| CliError::Parse(e.to_string()))?;
    println!("wrote {}", path.display());
    Ok(())
}
