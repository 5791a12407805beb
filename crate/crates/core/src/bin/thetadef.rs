//! Batch command-line surface: deformed products on element files, pairing
//! tables over θ-grids, and a self-contained verification harness.
//!
//! Every flag can also be set through the environment with the `THETADEF_`
//! prefix (`THETADEF_THETA`, `THETADEF_CUTOFF`, ...). Exit codes: 0 on
//! success, 2 when a validation or verification check fails, 3 when input
//! files cannot be read or parsed.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;

use thetadef::io;
use thetadef::{
    bimodule_check, bott_projection, build_truncation, combined_cocycle_eval, crossed_multiply,
    deform_operator, deformed_product, k0_pairing, kernel_map_element, powers_rieffel,
    represent_lattice, star, trace_tau, u0_conjugation_check, verify_projection, zeta_partial,
    BumpProfile, CrossedElement, CyclicCochain, Derivation, GradedElement, MatrixGradedElement,
    PairingReport, Weight,
};

const EXIT_VALIDATION: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum CocycleKind {
    /// The canonical trace.
    Tau,
    /// The doubly contracted trace (first Chern pairing).
    Contracted,
    /// The lattice Chern character at the configured cutoff.
    Chern,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum BuiltinProjection {
    /// Bump-profile projection of trace θ, rebuilt at each grid point.
    PowersRieffel,
    /// The reference rank-one bundle with first Chern number one.
    Bott,
}

/// Shared run configuration; every field mirrors a THETADEF_ variable.
#[derive(Debug, Args)]
struct RunConfig {
    /// Deformation parameter.
    #[arg(long, env = "THETADEF_THETA")]
    theta: Option<f64>,

    /// Comma-separated deformation grid; table commands use it in order.
    #[arg(long, env = "THETADEF_THETA_GRID", value_delimiter = ',')]
    theta_grid: Vec<f64>,

    /// Lattice truncation radius.
    #[arg(long, env = "THETADEF_CUTOFF", default_value_t = 16)]
    cutoff: u32,

    /// Fourier cutoff for bump-profile projections.
    #[arg(long, env = "THETADEF_FOURIER_CUTOFF", default_value_t = 64)]
    fourier_cutoff: u32,

    /// Interior window radius for traces; defaults to the full lattice.
    #[arg(long, env = "THETADEF_WINDOW")]
    window: Option<u32>,

    /// Tolerance for validation checks.
    #[arg(long, env = "THETADEF_TOL", default_value_t = 1e-10)]
    tol: f64,

    /// Output format for tables.
    #[arg(long, env = "THETADEF_FORMAT", value_enum, default_value_t = Format::Json)]
    format: Format,

    /// Seed for randomized property checks.
    #[arg(long, env = "THETADEF_SEED", default_value_t = 1)]
    seed: u64,

    /// Output file; stdout when omitted.
    #[arg(long, env = "THETADEF_OUT")]
    out: Option<PathBuf>,
}

impl RunConfig {
    fn validate(&self) -> Result<(), String> {
        if !(self.tol > 0.0) {
            return Err(format!("tolerance must be positive, got {}", self.tol));
        }
        for t in self.theta_grid.iter().chain(self.theta.iter()) {
            if !t.is_finite() {
                return Err(format!("deformation parameter must be finite, got {t}"));
            }
        }
        Ok(())
    }

    /// The grid to tabulate: explicit grid, else the single θ, else a
    /// small default sweep.
    fn grid(&self) -> Vec<f64> {
        if !self.theta_grid.is_empty() {
            self.theta_grid.clone()
        } else if let Some(t) = self.theta {
            vec![t]
        } else {
            vec![0.25, 1.0 / 3.0, 0.7]
        }
    }

    fn emit(&self, body: &str) -> Result<(), String> {
        match &self.out {
            Some(path) => std::fs::write(path, body)
                .map_err(|e| format!("cannot write {}: {e}", path.display())),
            None => {
                println!("{body}");
                Ok(())
            }
        }
    }
}

#[derive(Debug, Parser)]
#[command(
    name = "thetadef",
    about = "Deformed torus algebra toolkit",
    version,
    propagate_version = true
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Multiply two element files under the deformed product.
    Product {
        #[command(flatten)]
        config: RunConfig,
        /// Left factor (element JSON).
        a: PathBuf,
        /// Right factor (element JSON).
        b: PathBuf,
        /// At θ = 0, also require the two orders to agree.
        #[arg(long)]
        check_commutativity: bool,
    },
    /// Pair a cocycle with a projection across the θ-grid.
    Pair {
        #[command(flatten)]
        config: RunConfig,
        /// Projection file (matrix JSON, or a bare element for 1×1).
        #[arg(required_unless_present = "builtin", conflicts_with = "builtin")]
        projection: Option<PathBuf>,
        /// Use a built-in projection, rebuilt at each grid point.
        #[arg(long, value_enum)]
        builtin: Option<BuiltinProjection>,
        /// Which cocycle to pair with.
        #[arg(long, value_enum, default_value_t = CocycleKind::Tau)]
        cocycle: CocycleKind,
    },
    /// Run the module invariant suite and report pass/fail per check.
    Verify {
        #[command(flatten)]
        config: RunConfig,
        /// Echo the resolved configuration and exit without checking.
        #[arg(long)]
        smoke: bool,
        /// Corrupt the product phase to prove the suite catches it.
        #[arg(long)]
        inject_phase_bug: bool,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.command {
        Command::Product {
            config,
            a,
            b,
            check_commutativity,
        } => cmd_product(&config, &a, &b, check_commutativity),
        Command::Pair {
            config,
            projection,
            builtin,
            cocycle,
        } => cmd_pair(&config, projection.as_deref(), builtin, cocycle),
        Command::Verify {
            config,
            smoke,
            inject_phase_bug,
        } => cmd_verify(&config, smoke, inject_phase_bug),
    };
    match code {
        Ok(()) => ExitCode::SUCCESS,
        Err((status, msg)) => {
            eprintln!("thetadef: {msg}");
            ExitCode::from(status)
        }
    }
}

type CmdResult = Result<(), (u8, String)>;

fn validated(config: &RunConfig) -> CmdResult {
    config.validate().map_err(|m| (EXIT_VALIDATION, m))
}

fn read_file(path: &PathBuf) -> Result<String, (u8, String)> {
    std::fs::read_to_string(path)
        .map_err(|e| (EXIT_INPUT, format!("cannot read {}: {e}", path.display())))
}

fn cmd_product(config: &RunConfig, a: &PathBuf, b: &PathBuf, check: bool) -> CmdResult {
    validated(config)?;
    let theta = config.theta.unwrap_or(0.0);
    let ea = io::parse_element(&read_file(a)?).map_err(|e| (EXIT_INPUT, e.to_string()))?;
    let eb = io::parse_element(&read_file(b)?).map_err(|e| (EXIT_INPUT, e.to_string()))?;
    let ab = deformed_product(&ea, &eb, theta);
    if check {
        if theta != 0.0 {
            return Err((
                EXIT_VALIDATION,
                "commutativity check is only meaningful at theta = 0".to_string(),
            ));
        }
        let ba = deformed_product(&eb, &ea, theta);
        let defect = ab.sub(&ba).norm_inf();
        if defect > config.tol {
            return Err((
                EXIT_VALIDATION,
                format!("undeformed product failed to commute: defect {defect:.3e}"),
            ));
        }
        eprintln!("commutativity check passed (defect {defect:.3e})");
    }
    config
        .emit(&io::render_element(&ab))
        .map_err(|m| (EXIT_INPUT, m))
}

fn cmd_pair(
    config: &RunConfig,
    projection: Option<&std::path::Path>,
    builtin: Option<BuiltinProjection>,
    kind: CocycleKind,
) -> CmdResult {
    validated(config)?;
    let from_file = match projection {
        Some(path) => Some(
            io::parse_matrix_or_element(&read_file(&path.to_path_buf())?)
                .map_err(|e| (EXIT_INPUT, e.to_string()))?,
        ),
        None => None,
    };
    let mut reports: Vec<PairingReport> = Vec::new();
    for theta in config.grid() {
        let p = match (&from_file, builtin) {
            (Some(p), _) => p.clone(),
            (None, Some(BuiltinProjection::PowersRieffel)) => {
                if !(theta > 0.0 && theta < 1.0) {
                    return Err((
                        EXIT_VALIDATION,
                        format!("builtin bump projection needs 0 < theta < 1, got {theta}"),
                    ));
                }
                powers_rieffel(theta, &bump_profile(config.fourier_cutoff))
                    .map_err(|e| (EXIT_VALIDATION, e.to_string()))?
            }
            (None, Some(BuiltinProjection::Bott)) => bott_projection(config.fourier_cutoff)
                .map_err(|e| (EXIT_VALIDATION, e.to_string()))?,
            (None, None) => unreachable!("clap enforces one projection source"),
        };
        let phi = match kind {
            CocycleKind::Tau => CyclicCochain::trace(theta),
            CocycleKind::Contracted => CyclicCochain::trace(theta)
                .contract(Derivation::D2)
                .and_then(|c| c.contract(Derivation::D1))
                .expect("trace contraction is always defined"),
            CocycleKind::Chern => CyclicCochain::chern(config.cutoff, theta),
        };
        let report = k0_pairing(&phi, &p, theta)
            .map_err(|e| (EXIT_VALIDATION, format!("theta={theta}: {e}")))?;
        reports.push(report);
    }
    let stable = integer_stable(&reports, config.tol.max(5e-3));
    eprintln!(
        "integer-stability across grid: {}",
        if stable { "yes" } else { "no" }
    );
    let body = match config.format {
        Format::Json => io::render_pairings_json(&reports),
        Format::Csv => io::render_pairings_csv(&reports),
    };
    config.emit(&body).map_err(|m| (EXIT_INPUT, m))
}

/// Bump profile for the builtin projection. Short Fourier windows need a
/// wider mollifier plus a sharpening round to keep the idempotency defect
/// small; past that the plain mollified profile is better.
fn bump_profile(fourier_cutoff: u32) -> BumpProfile {
    let profile = BumpProfile::mollified(fourier_cutoff);
    if fourier_cutoff <= 24 {
        profile.with_sigma_frac(5.0).with_sharpen(1)
    } else {
        profile
    }
}

/// True when every normalized pairing sits near one common integer.
fn integer_stable(reports: &[PairingReport], tol: f64) -> bool {
    let Some(first) = reports.first() else {
        return true;
    };
    let target = first.normalized.re.round();
    reports
        .iter()
        .all(|r| r.integer_distance < tol && r.normalized.re.round() == target)
}

/// Deterministic element stream for the randomized checks.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }

    fn element(&mut self, terms: usize, radius: i32) -> GradedElement {
        let mut a = GradedElement::zero();
        let span = 2.0 * radius as f64 + 1.0;
        for _ in 0..terms {
            let m = ((self.next() * span) as i32) - radius;
            let n = ((self.next() * span) as i32) - radius;
            a.add_term(Weight::new(m, n), Complex64::new(self.next() - 0.5, self.next() - 0.5));
        }
        a
    }
}

/// The deformed product with an optional injected phase corruption: the
/// corrupted exponent is the sign-preserving square of the true one, which
/// is no longer bilinear in the weights, so associativity must fail.
fn product_under_test(a: &GradedElement, b: &GradedElement, theta: f64, bug: bool) -> GradedElement {
    if !bug {
        return deformed_product(a, b, theta);
    }
    let mut out = GradedElement::zero();
    for (wa, ca) in a.iter_terms() {
        for (wb, cb) in b.iter_terms() {
            let k = i64::from(wa.m) * i64::from(wb.n) - i64::from(wa.n) * i64::from(wb.m);
            let corrupted = k.saturating_mul(k.abs());
            let ang = std::f64::consts::PI * theta * corrupted as f64;
            let phase = Complex64::new(ang.cos(), ang.sin());
            out.add_term(Weight::new(wa.m + wb.m, wa.n + wb.n), ca * cb * phase);
        }
    }
    out
}

struct Check {
    name: &'static str,
    defect: f64,
    tol: f64,
}

impl Check {
    fn pass(&self) -> bool {
        self.defect <= self.tol
    }
}

fn cmd_verify(config: &RunConfig, smoke: bool, inject_phase_bug: bool) -> CmdResult {
    validated(config)?;
    if smoke {
        let echo = serde_echo(config);
        return config.emit(&echo).map_err(|m| (EXIT_INPUT, m));
    }
    let mut checks: Vec<Check> = Vec::new();
    let theta = config.theta.unwrap_or(0.3);
    let mut rng = Lcg(config.seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(1));

    // Generator relation u ∗ v = e^{2πiθ} v ∗ u across the grid.
    let mut worst = 0.0f64;
    for t in config.grid() {
        let uv = deformed_product(&GradedElement::u(), &GradedElement::v(), t);
        let vu = deformed_product(&GradedElement::v(), &GradedElement::u(), t);
        let ang = 2.0 * std::f64::consts::PI * t;
        let defect = uv
            .sub(&vu.scale(Complex64::new(ang.cos(), ang.sin())))
            .norm_inf();
        worst = worst.max(defect);
    }
    checks.push(Check {
        name: "generator relation",
        defect: worst,
        tol: 1e-12,
    });

    // Associativity and star antihomomorphism on random triples. The
    // injected phase bug lands here.
    let mut assoc = 0.0f64;
    let mut star_defect = 0.0f64;
    for _ in 0..100 {
        let a = rng.element(4, 3);
        let b = rng.element(4, 3);
        let c = rng.element(4, 3);
        let left = product_under_test(&product_under_test(&a, &b, theta, inject_phase_bug), &c, theta, inject_phase_bug);
        let right = product_under_test(&a, &product_under_test(&b, &c, theta, inject_phase_bug), theta, inject_phase_bug);
        assoc = assoc.max(left.sub(&right).norm_inf());
        let lhs = star(&product_under_test(&a, &b, theta, inject_phase_bug));
        let rhs = product_under_test(&star(&b), &star(&a), theta, inject_phase_bug);
        star_defect = star_defect.max(lhs.sub(&rhs).norm_inf());
    }
    checks.push(Check {
        name: "product associativity",
        defect: assoc,
        tol: 1e-12,
    });
    checks.push(Check {
        name: "star antihomomorphism",
        defect: star_defect,
        tol: 1e-12,
    });

    // Deformed representation matches the represented deformed product on
    // the interior window.
    let n = config.cutoff.clamp(6, 16);
    let window = config.window.unwrap_or(n / 2).min(n / 2);
    let (_, dirac, _) = build_truncation(n).expect("cutoff validated");
    let a = rng.element(3, 2);
    let b = rng.element(3, 2);
    let qa = deform_operator(&represent_lattice(&a, n), theta);
    let qb = deform_operator(&represent_lattice(&b, n), theta);
    let qab = deform_operator(&represent_lattice(&deformed_product(&a, &b, theta), n), theta);
    let interior = qa.mul(&qb).sub(&qab).mask_columns(window);
    checks.push(Check {
        name: "operator compatibility",
        defect: interior.entry_norm_inf(),
        tol: 1e-10,
    });

    // Deforming twice composes additively in the parameter.
    let (t1, t2) = (0.21, 0.34);
    let once = deform_operator(&deform_operator(&represent_lattice(&a, n), t1), t2);
    let both = deform_operator(&represent_lattice(&a, n), t1 + t2);
    checks.push(Check {
        name: "iterated deformation",
        defect: once.sub(&both).entry_norm_inf(),
        tol: 1e-12,
    });

    // Spectral zeta sums ignore the deformation bit for bit.
    let mut zeta_defect = 0.0f64;
    for s in [
        Complex64::new(3.0, 0.0),
        Complex64::new(4.0, 0.0),
        Complex64::new(5.0, 2.0),
    ] {
        let t_op = represent_lattice(&rng.element(4, 2), n);
        let z0 = zeta_partial(&t_op, s, &dirac);
        let z1 = zeta_partial(&deform_operator(&t_op, theta), s, &dirac);
        if z0 != z1 {
            zeta_defect = zeta_defect.max((z0 - z1).norm().max(f64::MIN_POSITIVE));
        }
    }
    checks.push(Check {
        name: "zeta deformation invariance",
        defect: zeta_defect,
        tol: 0.0,
    });

    // Bump projection trace reads back the deformation parameter.
    let m = config.fourier_cutoff.max(16);
    let pr_theta = if theta > 0.0 && theta < 1.0 { theta } else { 0.3 };
    let profile = BumpProfile::mollified(m);
    match powers_rieffel(pr_theta, &profile) {
        Ok(p) => {
            let report = verify_projection(&p, pr_theta, 1e-2).expect("dims agree");
            let tau = trace_tau(p.entry(0, 0));
            checks.push(Check {
                name: "projection trace reads theta",
                defect: (tau.re - pr_theta).abs().max(tau.im.abs()),
                tol: 1e-6,
            });
            checks.push(Check {
                name: "projection defect",
                defect: report.idempotency_defect.max(report.star_defect),
                tol: 1e-2,
            });
        }
        Err(e) => {
            return Err((EXIT_VALIDATION, format!("projection construction failed: {e}")));
        }
    }

    // Cyclic symmetry of the doubly contracted trace.
    let phi = CyclicCochain::trace(theta)
        .contract(Derivation::D2)
        .and_then(|c| c.contract(Derivation::D1))
        .expect("trace contraction is always defined");
    let mut cyclic = 0.0f64;
    for _ in 0..10 {
        let tri = [rng.element(2, 2), rng.element(2, 2), rng.element(2, 2)];
        let v0 = phi
            .evaluate_scalar(&[tri[0].clone(), tri[1].clone(), tri[2].clone()])
            .expect("degree matches");
        let v1 = phi
            .evaluate_scalar(&[tri[2].clone(), tri[0].clone(), tri[1].clone()])
            .expect("degree matches");
        cyclic = cyclic.max((v0 - v1).norm());
    }
    checks.push(Check {
        name: "cocycle cyclic symmetry",
        defect: cyclic,
        tol: 1e-12,
    });

    // Combined pairing on the trivial projection is exactly one.
    let one = MatrixGradedElement::from_scalar(GradedElement::one());
    let combined = combined_cocycle_eval(&CyclicCochain::trace(0.0), theta, &one)
        .expect("unit is a projection");
    checks.push(Check {
        name: "combined pairing on unit",
        defect: (combined - Complex64::new(1.0, 0.0)).norm(),
        tol: 1e-12,
    });

    // Kernel correspondence transports products on a generator grid.
    let mut hom = 0.0f64;
    for (k1, l1, m1, n1) in [(1, 0, 2, 1), (0, 1, -1, 2), (-1, 1, 0, -1)] {
        for (k2, l2, m2, n2) in [(0, 2, 1, -1), (2, -1, -1, 0)] {
            let x = CrossedElement::generator(k1, l1, GradedElement::monomial(Weight::new(m1, n1), Complex64::new(0.7, -0.2)));
            let y = CrossedElement::generator(k2, l2, GradedElement::monomial(Weight::new(m2, n2), Complex64::new(-0.4, 0.6)));
            let (xy, mask) = crossed_multiply(&x, &y, theta);
            if mask.dropped_terms > 0 {
                continue;
            }
            let lhs = kernel_map_element(&xy, theta);
            let rhs = kernel_map_element(&x, theta).multiply(&kernel_map_element(&y, theta), theta);
            hom = hom.max(lhs.sub(&rhs).norm_inf());
        }
    }
    checks.push(Check {
        name: "kernel map homomorphism",
        defect: hom,
        tol: 1e-12,
    });

    // Conjugating unitary and bimodule axioms.
    let conj = u0_conjugation_check(1, 0, 2, theta, 3);
    checks.push(Check {
        name: "conjugation identities",
        defect: if conj.pass { 0.0 } else { 1.0 },
        tol: 0.0,
    });
    let samples = vec![rng.element(1, 2), rng.element(1, 2), rng.element(2, 2)];
    let bim = bimodule_check(theta, &samples);
    checks.push(Check {
        name: "bimodule axioms",
        defect: bim.max_defect,
        tol: 1e-12,
    });

    let all_pass = checks.iter().all(Check::pass);
    let body = render_checks(&checks, config.format);
    config.emit(&body).map_err(|m| (EXIT_INPUT, m))?;
    if all_pass {
        Ok(())
    } else {
        let failed: Vec<&str> = checks
            .iter()
            .filter(|c| !c.pass())
            .map(|c| c.name)
            .collect();
        Err((
            EXIT_VALIDATION,
            format!("verification failed: {}", failed.join(", ")),
        ))
    }
}

fn render_checks(checks: &[Check], format: Format) -> String {
    match format {
        Format::Json => {
            let rows: Vec<serde_json::Value> = checks
                .iter()
                .map(|c| {
                    serde_json::json!({
                        "name": c.name,
                        "pass": c.pass(),
                        "defect": c.defect,
                        "tol": c.tol,
                    })
                })
                .collect();
            serde_json::to_string_pretty(&rows).expect("plain data")
        }
        Format::Csv => {
            let mut out = String::from("name,pass,defect,tol\n");
            for c in checks {
                out.push_str(&format!("{},{},{},{}\n", c.name, c.pass(), c.defect, c.tol));
            }
            out
        }
    }
}

fn serde_echo(config: &RunConfig) -> String {
    serde_json::to_string_pretty(&serde_json::json!({
        "theta": config.theta,
        "theta_grid": config.theta_grid,
        "cutoff": config.cutoff,
        "fourier_cutoff": config.fourier_cutoff,
        "window": config.window,
        "tol": config.tol,
        "format": match config.format { Format::Json => "json", Format::Csv => "csv" },
        "seed": config.seed,
        "out": config.out.as_ref().map(|p| p.display().to_string()),
    }))
    .expect("plain data")
}
