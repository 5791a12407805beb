//! Cyclic cochain machinery over the deformed torus algebra: the canonical
//! trace, derivation contractions i_δφ, deformed and combined evaluations,
//! Chern character cocycles on the truncated triple, and the K₀ pairings
//! that tie them to a Fredholm index oracle.
//!
//! Cochains are stored structurally (base functional, ordered contraction
//! tags, deformation parameter, amplification) rather than as opaque
//! callables, so contraction and deformation compose symbolically and the
//! algebraic identities (cyclicity, Leibniz reduction, coboundary
//! vanishing) are testable term by term.

use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;
use thiserror::Error;

use crate::graded_core::{
    from_normal_order, verify_projection, GradedElement, GradedError, MatrixGradedElement,
    Weight,
};
use crate::projections::{bott_projection, ProjectionError};
use crate::spectral::{
    build_truncation, commutator, deform_operator, represent_lattice, represent_matrix,
    sites, trace_product, DiracTruncation, SpectralError, TruncatedOperator,
};

/// Errors from cochain evaluation and pairings.
#[derive(Debug, Error)]
pub enum CocycleError {
    /// Argument tuple length does not match degree + 1.
    #[error("cochain of degree {degree} takes {} arguments, got {got}", degree + 1)]
    DegreeMismatch { degree: usize, got: usize },
    /// Argument matrix dimension differs from the cochain amplification.
    #[error("cochain amplification {amp} does not accept dimension-{got} arguments")]
    AmpMismatch { amp: usize, got: usize },
    /// The pairing candidate is not a projection to working tolerance.
    #[error("argument is not a projection: defect {defect:.3e}")]
    NotProjection { defect: f64 },
    /// Operation undefined for this base functional.
    #[error("operation not supported for base {base}")]
    UnsupportedBase { base: String },
    /// Chern evaluation is defined for even degree 0 or 2 only.
    #[error("chern evaluation undefined at degree {degree}")]
    UnsupportedDegree { degree: usize },
    /// Operator arguments disagree in cutoff or block structure.
    #[error("operator arguments disagree in shape: {0}")]
    ShapeMismatch(String),
    #[error(transparent)]
    Graded(#[from] GradedError),
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Projection(#[from] ProjectionError),
}

/// The two commuting derivations generating the torus action on weights:
/// δ₁ scales the weight-(m,n) coefficient by 2πi·m, δ₂ by 2πi·n.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Derivation {
    D1,
    D2,
}

impl Derivation {
    /// Applies the derivation termwise.
    pub fn apply(&self, a: &GradedElement) -> GradedElement {
        let mut out = GradedElement::zero();
        for (w, c) in a.iter_terms() {
            let k = match self {
                Derivation::D1 => w.m,
                Derivation::D2 => w.n,
            };
            if k != 0 {
                out.add_term(w, c * Complex64::new(0.0, 2.0 * PI * k as f64));
            }
        }
        out
    }

    /// Entrywise application to a matrix element.
    pub fn apply_matrix(&self, p: &MatrixGradedElement) -> MatrixGradedElement {
        let d = p.dim();
        let entries: Vec<GradedElement> = (0..d * d)
            .map(|k| self.apply(p.entry(k / d, k % d)))
            .collect();
        MatrixGradedElement::from_entries(d, entries).expect("dimension preserved")
    }

    fn tag(&self) -> &'static str {
        match self {
            Derivation::D1 => "d1",
            Derivation::D2 => "d2",
        }
    }
}

/// The canonical trace τ(a) = a_{(0,0)}.
///
/// Tracial for ∗_θ at every θ: the phase on (w, −w) is symmetric in the
/// factors, so τ(a∗_θb) = τ(b∗_θa).
pub fn trace_tau(a: &GradedElement) -> Complex64 {
    a.coeff(Weight::ZERO)
}

/// Trace composed with the matrix trace: Σ_i τ(p_ii).
pub fn trace_tau_matrix(p: &MatrixGradedElement) -> Complex64 {
    (0..p.dim())
        .map(|i| p.entry(i, i).coeff(Weight::ZERO))
        .sum()
}

/// Base functional of a cochain.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CochainBase {
    /// The canonical trace; evaluation reduces argument forms to a single
    /// element and applies [`trace_tau_matrix`].
    Tau,
    /// The degree-2 Chern character of the truncated triple at the given
    /// lattice cutoff, evaluated through operator deformation.
    ChernPhase { cutoff: u32 },
}

/// A cyclic cochain: base functional, ordered derivation insertions
/// (outermost contraction last), deformation parameter for the products
/// used during evaluation, and matrix amplification degree.
#[derive(Debug, Clone)]
pub struct CyclicCochain {
    /// Base functional.
    pub base: CochainBase,
    /// Degree n: evaluation takes n+1 arguments.
    pub degree: usize,
    /// Deformation parameter for products during evaluation, and for the
    /// operator deformation under a Chern base.
    pub theta: f64,
    /// Amplification d: arguments are d×d matrices, paired entrywise with
    /// the matrix trace.
    pub amp: usize,
    insertions: Vec<Derivation>,
}

impl CyclicCochain {
    /// The trace cochain τ of degree 0 over the θ-deformed algebra.
    pub fn trace(theta: f64) -> Self {
        CyclicCochain {
            base: CochainBase::Tau,
            degree: 0,
            theta,
            amp: 1,
            insertions: Vec::new(),
        }
    }

    /// The degree-2 Chern character cochain of the truncated triple at
    /// lattice cutoff `cutoff`, over the θ-deformed algebra.
    pub fn chern(cutoff: u32, theta: f64) -> Self {
        CyclicCochain {
            base: CochainBase::ChernPhase { cutoff },
            degree: 2,
            theta,
            amp: 1,
            insertions: Vec::new(),
        }
    }

    /// Sets the amplification degree: arguments become d×d matrices.
    pub fn with_amplification(mut self, d: usize) -> Self {
        assert!(d >= 1);
        self.amp = d;
        self
    }

    /// The ordered insertion tags, outermost contraction last.
    pub fn insertions(&self) -> &[Derivation] {
        &self.insertions
    }

    /// Short stable label naming the cochain in reports, outermost
    /// contraction first (e.g. "i[d1]i[d2]tau").
    pub fn label(&self) -> String {
        let mut s = String::new();
        for d in self.insertions.iter().rev() {
            s.push_str(&format!("i[{}]", d.tag()));
        }
        match self.base {
            CochainBase::Tau => s.push_str("tau"),
            CochainBase::ChernPhase { cutoff } => s.push_str(&format!("ch2(N={cutoff})")),
        }
        s
    }

    /// The contraction i_δφ, a cochain of degree n+1:
    ///
    /// i_δφ(a₀ da₁ … da_{n+1}) = Σ_{j=1}^{n+1} (−1)^j φ(a₀ da₁ … δ(a_j) … da_{n+1}),
    ///
    /// with non-standard forms reduced by the Leibniz rewrite
    /// a·(db)·c ↦ a·d(bc) − a·b·dc before base evaluation.
    pub fn contract(mut self, delta: Derivation) -> Result<Self, CocycleError> {
        match self.base {
            CochainBase::Tau => {
                self.insertions.push(delta);
                self.degree += 1;
                Ok(self)
            }
            CochainBase::ChernPhase { .. } => Err(CocycleError::UnsupportedBase {
                base: self.label(),
            }),
        }
    }

    /// Evaluates the cochain on matrix arguments of dimension `amp`.
    pub fn evaluate(&self, args: &[MatrixGradedElement]) -> Result<Complex64, CocycleError> {
        if args.len() != self.degree + 1 {
            return Err(CocycleError::DegreeMismatch {
                degree: self.degree,
                got: args.len(),
            });
        }
        for a in args {
            if a.dim() != self.amp {
                return Err(CocycleError::AmpMismatch {
                    amp: self.amp,
                    got: a.dim(),
                });
            }
        }
        match self.base {
            CochainBase::Tau => {
                // Every contraction consumes exactly one differential, so a
                // trace base needs exactly degree-many insertions.
                debug_assert_eq!(self.insertions.len(), self.degree);
                let mut form: Vec<Factor> = Vec::with_capacity(args.len());
                form.push(Factor::Fun(args[0].clone()));
                for a in &args[1..] {
                    form.push(Factor::D(a.clone()));
                }
                eval_standard(&form, &self.insertions, self.theta)
            }
            CochainBase::ChernPhase { cutoff } => {
                if self.degree != 2 || !self.insertions.is_empty() {
                    return Err(CocycleError::UnsupportedBase { base: self.label() });
                }
                let q: Vec<TruncatedOperator> = args
                    .iter()
                    .map(|a| deform_operator(&represent_matrix(a, cutoff), self.theta))
                    .collect();
                Ok(chern_collapse(&q[0], &q[1], &q[2], cutoff))
            }
        }
    }

    /// Convenience wrapper for scalar (1×1) arguments.
    pub fn evaluate_scalar(&self, args: &[GradedElement]) -> Result<Complex64, CocycleError> {
        let wrapped: Vec<MatrixGradedElement> = args
            .iter()
            .map(|a| MatrixGradedElement::from_scalar(a.clone()))
            .collect();
        self.evaluate(&wrapped)
    }
}

/// A factor of a noncommutative differential form: a plain element or a
/// differential slot.
#[derive(Clone)]
enum Factor {
    Fun(MatrixGradedElement),
    D(MatrixGradedElement),
}

/// Reduces a form to a linear combination of standard forms
/// x₀ dx₁ … dx_k by merging adjacent plain factors and applying the Leibniz
/// rewrite (db)·c ↦ d(bc) − b·dc wherever a plain factor sits right of a
/// differential. Terminates because each step either removes a plain factor
/// or moves one strictly leftward.
fn reduce_to_standard(
    form: Vec<Factor>,
    theta: f64,
) -> Result<Vec<(f64, Vec<Factor>)>, CocycleError> {
    let mut work = vec![(1.0, form)];
    let mut done = Vec::new();
    while let Some((sign, f)) = work.pop() {
        let mut rewritten = false;
        for i in 0..f.len().saturating_sub(1) {
            match (&f[i], &f[i + 1]) {
                (Factor::Fun(a), Factor::Fun(b)) => {
                    let merged = a.deformed_product(b, theta)?;
                    let mut nf = f.clone();
                    nf.splice(i..i + 2, [Factor::Fun(merged)]);
                    work.push((sign, nf));
                    rewritten = true;
                }
                (Factor::D(b), Factor::Fun(c)) => {
                    let bc = b.deformed_product(c, theta)?;
                    let mut keep = f.clone();
                    keep.splice(i..i + 2, [Factor::D(bc)]);
                    let mut move_out = f.clone();
                    move_out.splice(i..i + 2, [Factor::Fun(b.clone()), Factor::D(c.clone())]);
                    work.push((sign, keep));
                    work.push((-sign, move_out));
                    rewritten = true;
                }
                _ => continue,
            }
            break;
        }
        if !rewritten {
            done.push((sign, f));
        }
    }
    Ok(done)
}

/// Evaluates a standard form against the remaining insertions: the last
/// (outermost) insertion replaces each differential slot in turn with the
/// derived element, signed (−1)^j by slot ordinal, and recursion continues
/// on the reduced forms. With no insertions left the form is a single
/// plain factor and the trace applies.
fn eval_standard(
    form: &[Factor],
    insertions: &[Derivation],
    theta: f64,
) -> Result<Complex64, CocycleError> {
    if let Some((delta, rest)) = insertions.split_last() {
        let mut total = Complex64::new(0.0, 0.0);
        let mut ordinal = 0usize;
        for (i, fac) in form.iter().enumerate() {
            if let Factor::D(x) = fac {
                ordinal += 1;
                let sgn = if ordinal % 2 == 1 { -1.0 } else { 1.0 };
                let mut nf = form.to_vec();
                nf[i] = Factor::Fun(delta.apply_matrix(x));
                for (s2, f2) in reduce_to_standard(nf, theta)? {
                    total += sgn * s2 * eval_standard(&f2, rest, theta)?;
                }
            }
        }
        Ok(total)
    } else {
        match form {
            [Factor::Fun(x)] => Ok(trace_tau_matrix(x)),
            // Insertion count equals differential count by construction.
            _ => unreachable!("standard form fully contracted"),
        }
    }
}

/// Evaluates the θ-deformed cochain φ^(θ) on scalar arguments:
///
/// Σ over weight tuples with Σm_j = 0 and Σl_j = 0 of
/// φ((a₀)_{w₀}, b₁, …, bₙ) with b_k = e^{2πiθ(Σ_{j<k} m_j) l_k} (a_k)_{w_k},
///
/// the inner φ evaluated with the cochain's own product parameter
/// (usually 0: deforming an undeformed cochain).
pub fn deformed_cocycle_eval(
    phi: &CyclicCochain,
    theta: f64,
    args: &[GradedElement],
) -> Result<Complex64, CocycleError> {
    if args.len() != phi.degree + 1 {
        return Err(CocycleError::DegreeMismatch {
            degree: phi.degree,
            got: args.len(),
        });
    }
    if phi.amp != 1 {
        return Err(CocycleError::AmpMismatch { amp: phi.amp, got: 1 });
    }
    let supports: Vec<Vec<(Weight, Complex64)>> =
        args.iter().map(|a| a.iter_terms().collect()).collect();
    let mut total = Complex64::new(0.0, 0.0);
    let mut picks: Vec<usize> = vec![0; args.len()];
    'outer: loop {
        let tuple: Vec<(Weight, Complex64)> = picks
            .iter()
            .zip(&supports)
            .map(|(&i, s)| s[i])
            .collect();
        let msum: i64 = tuple.iter().map(|(w, _)| i64::from(w.m)).sum();
        let lsum: i64 = tuple.iter().map(|(w, _)| i64::from(w.n)).sum();
        if msum == 0 && lsum == 0 {
            // Twist exponent Σ_k (m₀+…+m_{k−1})·l_k, an integer multiple
            // of 2πθ; zero exponent keeps the term bit-exact.
            let mut prefix = 0i64;
            let mut exponent = 0i64;
            for (w, _) in &tuple[..] {
                exponent += prefix * i64::from(w.n);
                prefix += i64::from(w.m);
            }
            let phase = if exponent == 0 {
                Complex64::new(1.0, 0.0)
            } else {
                let ang = 2.0 * PI * theta * exponent as f64;
                Complex64::new(ang.cos(), ang.sin())
            };
            let components: Vec<GradedElement> = tuple
                .iter()
                .map(|&(w, c)| GradedElement::monomial(w, c))
                .collect();
            total += phase * phi.evaluate_scalar(&components)?;
        }
        // Odometer over the support lists.
        for k in (0..picks.len()).rev() {
            picks[k] += 1;
            if picks[k] < supports[k].len() {
                continue 'outer;
            }
            picks[k] = 0;
        }
        break;
    }
    Ok(total)
}

/// Per-degree normalization constant turning cochain values into pairing
/// numbers: identity at degree 0, −1/(2πi) at degree 2 (so the doubly
/// contracted trace pairs to first Chern numbers with the sign that makes
/// the reference bundle pair positively).
fn degree_normalizer(degree: usize) -> Result<Complex64, CocycleError> {
    match degree {
        0 => Ok(Complex64::new(1.0, 0.0)),
        // −1/(2πi) = i/(2π)
        2 => Ok(Complex64::new(0.0, 1.0 / (2.0 * PI))),
        _ => Err(CocycleError::UnsupportedDegree { degree }),
    }
}

/// Evaluates the combined (nonhomogeneous) cochain
/// φ + θ·i_{δ1}i_{δ2}φ on the tuples (p,…,p) of matching degrees from a
/// single K₀ representative, each summand normalized per degree.
///
/// On a rank-one projection over the commutative torus this reproduces
/// rank + θ·(first Chern pairing): the Bott class gives 1 + θ.
pub fn combined_cocycle_eval(
    phi: &CyclicCochain,
    theta: f64,
    p: &MatrixGradedElement,
) -> Result<Complex64, CocycleError> {
    let report = verify_projection(p, phi.theta, PAIRING_DEFECT_TOL)?;
    if !report.pass {
        return Err(CocycleError::NotProjection {
            defect: report.idempotency_defect.max(report.star_defect),
        });
    }
    let base = phi.clone().with_amplification(p.dim());
    let contracted = base
        .clone()
        .contract(Derivation::D2)?
        .contract(Derivation::D1)?;
    let first = base.evaluate(&vec![p.clone(); base.degree + 1])?;
    let second = contracted.evaluate(&vec![p.clone(); contracted.degree + 1])?;
    let n0 = degree_normalizer(base.degree)?;
    let n2 = degree_normalizer(contracted.degree)?;
    Ok(n0 * first + theta * n2 * second)
}

/// Maximum projection defect accepted by the pairings.
pub const PAIRING_DEFECT_TOL: f64 = 0.05;

/// Maximum projection defect accepted by the index oracle.
pub const ORACLE_DEFECT_TOL: f64 = 0.1;

/// Report of a K₀ pairing: raw cochain value, normalized value, and its
/// distance to the nearest integer.
#[derive(Debug, Clone)]
pub struct PairingReport {
    /// Label of the cochain that was paired.
    pub cocycle: String,
    /// Deformation parameter of the evaluation.
    pub theta: f64,
    /// Raw cochain value on (p,…,p).
    pub value: Complex64,
    /// Value after the degree (and Chern calibration) normalization.
    pub normalized: Complex64,
    /// |normalized − nearest integer|.
    pub integer_distance: f64,
}

/// Pairs a cochain with a projection: evaluates on (p,…,p) with matrix
/// amplification at deformation `theta`, normalizes (degree constant for
/// trace bases, calibrated Chern constant for the character), and reports
/// the distance to the nearest integer.
///
/// The candidate must satisfy p = p∗_θp = p* within
/// [`PAIRING_DEFECT_TOL`]; the defect is reported otherwise.
pub fn k0_pairing(
    phi: &CyclicCochain,
    p: &MatrixGradedElement,
    theta: f64,
) -> Result<PairingReport, CocycleError> {
    let report = verify_projection(p, theta, PAIRING_DEFECT_TOL)?;
    if !report.pass {
        return Err(CocycleError::NotProjection {
            defect: report.idempotency_defect.max(report.star_defect),
        });
    }
    let mut cochain = phi.clone().with_amplification(p.dim());
    cochain.theta = theta;
    let args = vec![p.clone(); cochain.degree + 1];
    let value = cochain.evaluate(&args)?;
    let normalized = match cochain.base {
        CochainBase::Tau => degree_normalizer(cochain.degree)? * value,
        CochainBase::ChernPhase { .. } => value / chern_normalizer(),
    };
    let nearest = normalized.re.round();
    let integer_distance = (normalized - Complex64::new(nearest, 0.0)).norm();
    Ok(PairingReport {
        cocycle: phi.label(),
        theta,
        value,
        normalized,
        integer_distance,
    })
}

/// The spinor-lattice Chern character evaluation
/// Tr_s(γ·f₀·[F,f₁]·…·[F,fₙ]) over the interior window of the given
/// radius, for degree n ∈ {0, 2}.
///
/// Arguments are operators on the spinor lattice amplified by a fiber of
/// dimension d (block index = spin·d + fiber); F and γ amplify to match.
pub fn chern_cocycle_eval(
    n: usize,
    dirac: &DiracTruncation,
    args: &[TruncatedOperator],
    window: u32,
) -> Result<Complex64, CocycleError> {
    if n != 0 && n != 2 {
        return Err(CocycleError::UnsupportedDegree { degree: n });
    }
    if args.len() != n + 1 {
        return Err(CocycleError::DegreeMismatch {
            degree: n,
            got: args.len(),
        });
    }
    let block = args[0].block_dim();
    if block % 2 != 0 {
        return Err(CocycleError::ShapeMismatch(format!(
            "spinor arguments need even block dimension, got {block}"
        )));
    }
    for a in args {
        if a.cutoff() != dirac.cutoff() || a.block_dim() != block {
            return Err(CocycleError::ShapeMismatch(format!(
                "argument shape ({}, {}) vs expected ({}, {})",
                a.cutoff(),
                a.block_dim(),
                dirac.cutoff(),
                block
            )));
        }
    }
    let d = block / 2;
    let t = if n == 0 {
        args[0].clone()
    } else {
        let f_amp = dirac.f.amplified(d);
        let c1 = commutator(&f_amp, &args[1]);
        let c2 = commutator(&f_amp, &args[2]);
        args[0].mul(&c1).mul(&c2)
    };
    Ok(supertrace_windowed(&t, d, window))
}

/// γ-graded windowed trace of a spinor⊗fiber operator: fiber blocks under
/// the first spinor slot count +1, under the second −1.
fn supertrace_windowed(t: &TruncatedOperator, d: usize, window: u32) -> Complex64 {
    let n = t.cutoff();
    let mut acc = Complex64::new(0.0, 0.0);
    for ((dm, dn, bi, bj), vals) in t.iter_bands() {
        if dm != 0 || dn != 0 || bi != bj {
            continue;
        }
        let sign = if (bi as usize) < d { 1.0 } else { -1.0 };
        for (idx, (m, nn)) in sites(n).enumerate() {
            if m.unsigned_abs() <= window && nn.unsigned_abs() <= window {
                acc += sign * vals[idx];
            }
        }
    }
    acc
}

fn fplus_site(m: i32, n: i32) -> Complex64 {
    DiracTruncation::fplus_phase(Weight::new(m, n))
}

/// Degree-2 Chern evaluation collapsed to the scalar lattice:
///
/// Tr_s(γA₀[F,A₁][F,A₂]) = Tr(A₀·(B₁⁻B₂⁺ − B₁⁺B₂⁻)),
///
/// where B⁺ scales entries by the difference of the F-phase between row and
/// column sites and B⁻ uses its conjugate. The spin-diagonal kernel
/// correction at the origin cancels in the supertrace, so the identity is
/// exact on the truncation.
pub fn chern_collapse(
    a0: &TruncatedOperator,
    a1: &TruncatedOperator,
    a2: &TruncatedOperator,
    window: u32,
) -> Complex64 {
    let plus = |r: (i32, i32), c: (i32, i32)| fplus_site(r.0, r.1) - fplus_site(c.0, c.1);
    let minus =
        |r: (i32, i32), c: (i32, i32)| (fplus_site(r.0, r.1) - fplus_site(c.0, c.1)).conj();
    let b1m = a1.site_weighted(minus);
    let b1p = a1.site_weighted(plus);
    let b2m = a2.site_weighted(minus);
    let b2p = a2.site_weighted(plus);
    let x = b1m.mul(&b2p).sub(&b1p.mul(&b2m));
    trace_product_windowed(a0, &x, window)
}

/// Tr(A·B) restricted to diagonal slots whose site lies inside the window.
fn trace_product_windowed(a: &TruncatedOperator, b: &TruncatedOperator, window: u32) -> Complex64 {
    if window >= a.cutoff() {
        return trace_product(a, b);
    }
    let n = a.cutoff();
    let ni = n as i32;
    let side = (2 * n + 1) as usize;
    let mut acc = Complex64::new(0.0, 0.0);
    let b_bands: std::collections::BTreeMap<(i32, i32, u8, u8), &[Complex64]> =
        b.iter_bands().collect();
    for ((dm, dn, bi, bj), va) in a.iter_bands() {
        let Some(vb) = b_bands.get(&(-dm, -dn, bj, bi)) else {
            continue;
        };
        for (idx, (m, nn)) in sites(n).enumerate() {
            let x = va[idx];
            if x == Complex64::new(0.0, 0.0) {
                continue;
            }
            let (rm, rn) = (m + dm, nn + dn);
            // Diagonal slot of the product sits at the row site.
            if rm.unsigned_abs() > window || rn.unsigned_abs() > window {
                continue;
            }
            if rm < -ni || rm > ni || rn < -ni || rn > ni {
                continue;
            }
            let ridx = ((rm + ni) as usize) * side + (rn + ni) as usize;
            acc += x * vb[ridx];
        }
    }
    acc
}

static CHERN_NORMALIZER: OnceLock<f64> = OnceLock::new();

/// Calibration constant relating the raw degree-2 Chern evaluation on
/// (p,p,p) to the integer Fredholm index, fixed once against the index
/// oracle on the reference rank-one bundle (cutoffs 16/16) and cached for
/// the process lifetime.
pub fn chern_normalizer() -> f64 {
    *CHERN_NORMALIZER.get_or_init(|| {
        let p = bott_projection(16).expect("reference bundle profile");
        let (_, dirac, _) = build_truncation(16).expect("calibration truncation");
        let oracle =
            fredholm_index_oracle(&p, 0.0, &dirac).expect("calibration index");
        assert!(oracle.index != 0, "reference bundle index degenerate");
        let q = represent_matrix(&p, 16);
        let value = chern_collapse(&q, &q, &q, 16);
        value.re / oracle.index as f64
    })
}

/// Outcome of the Fredholm index oracle: graded kernel counts of the
/// compressed phase with the spectral diagnostics backing them.
#[derive(Debug, Clone)]
pub struct IndexReport {
    /// count_plus − count_minus.
    pub index: i64,
    /// Eigenvalues above the counting threshold on the positive side.
    pub count_plus: usize,
    /// Eigenvalues above the counting threshold on the negative side.
    pub count_minus: usize,
    /// Converged Ritz values (descending) of the positive-side test operator.
    pub ritz_plus: Vec<f64>,
    /// Converged Ritz values (descending) of the negative-side test operator.
    pub ritz_minus: Vec<f64>,
    /// Ritz values inside the ambiguity window on each side.
    pub midzone_plus: usize,
    pub midzone_minus: usize,
    /// Whether the computed blocks reach below the ambiguity window on both
    /// sides, so the midzone census cannot be missing eigenvalues.
    pub census_complete: bool,
    /// Smallest distance of any Ritz value to the counting threshold.
    pub threshold_margin: f64,
    /// Set when any Ritz value falls in the ambiguity window or iteration
    /// did not converge: the raw counts are then threshold-sensitive.
    pub unreliable: bool,
    /// Idempotency defect of the input.
    pub projection_defect: f64,
    /// Subspace iterations spent (max of the two sides).
    pub iterations: usize,
}

/// Counting threshold: eigenvalues of the test operator above 3/4
/// correspond to compression singular values below 1/2.
const COUNT_THRESHOLD: f64 = 0.75;
/// Ambiguity window: eigenvalues here correspond to singular values in
/// [1/4, 3/4], where counting is threshold-sensitive.
const AMBIGUITY_LO: f64 = 0.4375;
const AMBIGUITY_HI: f64 = 0.9375;
const SUBSPACE_BLOCK: usize = 8;
const SUBSPACE_MAX_ITERS: usize = 300;
const SUBSPACE_STABLE_ITERS: usize = 10;
const SUBSPACE_RITZ_TOL: f64 = 1e-6;

/// Fredholm index of the compression p·F⁺·p between the graded ranges of a
/// projection, as a rank difference: on each side the test operator
/// G = Q − Q·F∓·Q·F±·Q (Q the deformed lattice action of p, F± the
/// diagonal phase fields) has one eigenvalue near 1 per kernel dimension;
/// eigenvalues above 3/4 are counted via Hermitian subspace iteration on
/// the symmetrized operator, and the difference of counts is the index.
///
/// Eigenvalues inside the ambiguity window mark the counts as unreliable;
/// the report carries the full converged Ritz spectra for inspection.
pub fn fredholm_index_oracle(
    p: &MatrixGradedElement,
    theta: f64,
    dirac: &DiracTruncation,
) -> Result<IndexReport, CocycleError> {
    let report = verify_projection(p, theta, ORACLE_DEFECT_TOL)?;
    if !report.pass {
        return Err(CocycleError::NotProjection {
            defect: report.idempotency_defect.max(report.star_defect),
        });
    }
    let n = dirac.cutoff();
    let d = p.dim();
    let q = deform_operator(&represent_matrix(p, n), theta);
    let qa = q.adjoint();
    let dim = q.dim();
    let mut fp = vec![Complex64::new(0.0, 0.0); dim];
    for (idx, (m, nn)) in sites(n).enumerate() {
        let phase = fplus_site(m, nn);
        for b in 0..d {
            fp[idx * d + b] = phase;
        }
    }
    let fm: Vec<Complex64> = fp.iter().map(|c| c.conj()).collect();

    let side = |first: &[Complex64], second: &[Complex64]| {
        let apply = |x: &[Complex64]| -> Vec<Complex64> {
            let g = g_chain(&q, first, second, x);
            let ga = g_chain(&qa, first, second, x);
            g.iter()
                .zip(ga)
                .map(|(a, b)| 0.5 * (a + b))
                .collect()
        };
        subspace_iteration(dim, SUBSPACE_BLOCK, apply)
    };
    let plus = side(&fp, &fm);
    let minus = side(&fm, &fp);

    let count = |ritz: &[f64]| ritz.iter().filter(|&&r| r > COUNT_THRESHOLD).count();
    let midzone = |ritz: &[f64]| {
        ritz.iter()
            .filter(|&&r| (AMBIGUITY_LO..=AMBIGUITY_HI).contains(&r))
            .count()
    };
    let count_plus = count(&plus.ritz);
    let count_minus = count(&minus.ritz);
    let midzone_plus = midzone(&plus.ritz);
    let midzone_minus = midzone(&minus.ritz);
    let reaches_below = |ritz: &[f64]| ritz.last().is_some_and(|&r| r < AMBIGUITY_LO);
    let census_complete = reaches_below(&plus.ritz) && reaches_below(&minus.ritz);
    let margin = plus
        .ritz
        .iter()
        .chain(minus.ritz.iter())
        .map(|r| (r - COUNT_THRESHOLD).abs())
        .fold(f64::INFINITY, f64::min);
    let unreliable =
        midzone_plus + midzone_minus > 0 || !plus.converged || !minus.converged;
    Ok(IndexReport {
        index: count_plus as i64 - count_minus as i64,
        count_plus,
        count_minus,
        ritz_plus: plus.ritz,
        ritz_minus: minus.ritz,
        midzone_plus,
        midzone_minus,
        census_complete,
        threshold_margin: margin,
        unreliable,
        projection_defect: report.idempotency_defect,
        iterations: plus.iterations.max(minus.iterations),
    })
}

/// One application of G = Q − Q·diag(second)·Q·diag(first)·Q. The same
/// chain against the adjoint operator realizes G†, because reversing the
/// factors swaps and conjugates the diagonals back into this order.
fn g_chain(
    q: &TruncatedOperator,
    first: &[Complex64],
    second: &[Complex64],
    x: &[Complex64],
) -> Vec<Complex64> {
    let t1 = q.apply(x);
    let t2: Vec<Complex64> = t1.iter().zip(first).map(|(v, f)| v * f).collect();
    let t3 = q.apply(&t2);
    let t4: Vec<Complex64> = t3.iter().zip(second).map(|(v, f)| v * f).collect();
    let t5 = q.apply(&t4);
    t1.iter().zip(t5).map(|(a, b)| a - b).collect()
}

struct SubspaceResult {
    ritz: Vec<f64>,
    iterations: usize,
    converged: bool,
}

/// Deterministic LCG stream in [0,1): the fixed start block makes every
/// oracle run bit-reproducible.
struct Lcg(u64);

impl Lcg {
    fn next(&mut self) -> f64 {
        self.0 = self
            .0
            .wrapping_mul(6364136223846793005)
            .wrapping_add(1442695040888963407);
        (self.0 >> 11) as f64 / (1u64 << 53) as f64
    }
}

fn seeded_column(dim: usize, seed: u64) -> Vec<Complex64> {
    let mut rng = Lcg(seed);
    (0..dim)
        .map(|_| Complex64::new(rng.next() - 0.5, rng.next() - 0.5))
        .collect()
}

/// Modified Gram-Schmidt; near-null columns are deterministically reseeded
/// so rank deficiencies in the operator cannot stall the block.
fn orthonormalize(cols: &mut [Vec<Complex64>], reseed_base: u64) {
    let dim = cols[0].len();
    for i in 0..cols.len() {
        for attempt in 0..3u64 {
            for j in 0..i {
                let proj: Complex64 = cols[j]
                    .iter()
                    .zip(cols[i].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                let (head, tail) = cols.split_at_mut(i);
                for (dst, src) in tail[0].iter_mut().zip(head[j].iter()) {
                    *dst -= proj * src;
                }
            }
            let norm: f64 = cols[i].iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if norm > 1e-12 {
                for c in cols[i].iter_mut() {
                    *c /= norm;
                }
                break;
            }
            cols[i] = seeded_column(dim, reseed_base + i as u64 * 7919 + attempt + 1);
        }
    }
}

/// Hermitian block subspace iteration with deterministic start: returns the
/// leading Ritz values in descending order. Convergence requires the
/// above-threshold and ambiguity-window counts to hold still while the
/// values themselves settle.
fn subspace_iteration(
    dim: usize,
    block: usize,
    apply: impl Fn(&[Complex64]) -> Vec<Complex64>,
) -> SubspaceResult {
    let block = block.min(dim);
    let mut cols: Vec<Vec<Complex64>> = Vec::with_capacity(block);
    let scale = 1.0 / (dim as f64).sqrt();
    cols.push(vec![Complex64::new(scale, 0.0); dim]);
    for k in 1..block {
        cols.push(seeded_column(dim, 0x5eed + k as u64));
    }
    orthonormalize(&mut cols, 0x9e37);

    let mut prev_ritz: Vec<f64> = vec![f64::INFINITY; block];
    let mut prev_counts = (usize::MAX, usize::MAX);
    let mut stable = 0usize;
    for iter in 1..=SUBSPACE_MAX_ITERS {
        let images: Vec<Vec<Complex64>> = cols.iter().map(|c| apply(c)).collect();
        // Rayleigh block X†(SX), hermitized against iteration noise.
        let mut r = vec![Complex64::new(0.0, 0.0); block * block];
        for i in 0..block {
            for j in 0..block {
                let v: Complex64 = cols[i]
                    .iter()
                    .zip(images[j].iter())
                    .map(|(a, b)| a.conj() * b)
                    .sum();
                r[i * block + j] = v;
            }
        }
        for i in 0..block {
            for j in (i + 1)..block {
                let h = 0.5 * (r[i * block + j] + r[j * block + i].conj());
                r[i * block + j] = h;
                r[j * block + i] = h.conj();
            }
            r[i * block + i] = Complex64::new(r[i * block + i].re, 0.0);
        }
        let ritz = hermitian_eigenvalues(&r, block);

        let counts = (
            ritz.iter().filter(|&&x| x > COUNT_THRESHOLD).count(),
            ritz.iter()
                .filter(|&&x| (AMBIGUITY_LO..=AMBIGUITY_HI).contains(&x))
                .count(),
        );
        let delta = ritz
            .iter()
            .zip(prev_ritz.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        stable = if counts == prev_counts { stable + 1 } else { 0 };
        prev_counts = counts;
        prev_ritz = ritz.clone();

        cols = images;
        orthonormalize(&mut cols, 0x9e37 + iter as u64);

        if stable >= SUBSPACE_STABLE_ITERS && delta < SUBSPACE_RITZ_TOL {
            return SubspaceResult {
                ritz,
                iterations: iter,
                converged: true,
            };
        }
    }
    SubspaceResult {
        ritz: prev_ritz,
        iterations: SUBSPACE_MAX_ITERS,
        converged: false,
    }
}

/// Eigenvalues of a Hermitian b×b matrix (row-major), descending: embeds
/// into the real symmetric 2b×2b form [[Re, −Im], [Im, Re]] (each
/// eigenvalue doubled) and runs cyclic Jacobi.
fn hermitian_eigenvalues(r: &[Complex64], b: usize) -> Vec<f64> {
    let n = 2 * b;
    let mut a = vec![0.0f64; n * n];
    for i in 0..b {
        for j in 0..b {
            let v = r[i * b + j];
            a[i * n + j] = v.re;
            a[i * n + (b + j)] = -v.im;
            a[(b + i) * n + j] = v.im;
            a[(b + i) * n + (b + j)] = v.re;
        }
    }
    let mut eigs = jacobi_symmetric_eigenvalues(&mut a, n);
    eigs.sort_by(|x, y| y.partial_cmp(x).unwrap());
    (0..b).map(|i| 0.5 * (eigs[2 * i] + eigs[2 * i + 1])).collect()
}

/// Cyclic Jacobi eigenvalue iteration for a real symmetric matrix stored
/// row-major; returns unsorted eigenvalues.
fn jacobi_symmetric_eigenvalues(a: &mut [f64], n: usize) -> Vec<f64> {
    let frob: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let tol = (1e-14 * frob).max(f64::MIN_POSITIVE);
    for _sweep in 0..100 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off += a[p * n + q] * a[p * n + q];
            }
        }
        if off.sqrt() <= tol {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[p * n + q];
                if apq.abs() <= tol / (n as f64) {
                    continue;
                }
                let tau = (a[q * n + q] - a[p * n + p]) / (2.0 * apq);
                let t = tau.signum() / (tau.abs() + (1.0 + tau * tau).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = t * c;
                for k in 0..n {
                    let akp = a[k * n + p];
                    let akq = a[k * n + q];
                    a[k * n + p] = c * akp - s * akq;
                    a[k * n + q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[p * n + k];
                    let aqk = a[q * n + k];
                    a[p * n + k] = c * apk - s * aqk;
                    a[q * n + k] = s * apk + c * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i * n + i]).collect()
}

/// Operator-side evaluation of the doubly contracted trace cochain on the
/// deformed lattice actions: the arguments pass through the normal-order
/// presentation change, act on the scalar lattice, deform, and the value is
/// the interior-window normalized trace of
/// A₀·(δ₁A₁·δ₂A₂ − δ₂A₁·δ₁A₂) with δᵢ = [hᵢ, ·].
pub fn double_contraction_operator_side(
    args: &[GradedElement; 3],
    theta: f64,
    n: u32,
    window: u32,
) -> Complex64 {
    let two_pi = 2.0 * PI;
    let h1 = TruncatedOperator::site_diagonal(n, 1, |m, _, _, _| {
        Complex64::new(0.0, two_pi * m as f64)
    });
    let h2 = TruncatedOperator::site_diagonal(n, 1, |_, nn, _, _| {
        Complex64::new(0.0, two_pi * nn as f64)
    });
    let ops: Vec<TruncatedOperator> = args
        .iter()
        .map(|a| deform_operator(&represent_lattice(&from_normal_order(a, theta), n), theta))
        .collect();
    let d1a1 = commutator(&h1, &ops[1]);
    let d2a2 = commutator(&h2, &ops[2]);
    let d2a1 = commutator(&h2, &ops[1]);
    let d1a2 = commutator(&h1, &ops[2]);
    let t = ops[0].mul(&d1a1.mul(&d2a2).sub(&d2a1.mul(&d1a2)));
    let sites_in_window = (2 * window as usize + 1).pow(2);
    t.windowed_trace(window) / sites_in_window as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::{deformed_product, star};
    use crate::projections::{powers_rieffel, BumpProfile};
    use crate::spectral::represent_matrix_spinor;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn monomial(m: i32, n: i32, re: f64, im: f64) -> GradedElement {
        GradedElement::monomial(Weight::new(m, n), c(re, im))
    }

    /// Deterministic homogeneous element stream.
    fn random_monomials(seed: u64, count: usize, radius: i32) -> Vec<GradedElement> {
        let mut rng = Lcg(seed);
        (0..count)
            .map(|_| {
                let span = 2.0 * radius as f64 + 1.0;
                let m = ((rng.next() * span) as i32) - radius;
                let n = ((rng.next() * span) as i32) - radius;
                monomial(m, n, rng.next() - 0.5, rng.next() - 0.5)
            })
            .collect()
    }

    fn closed_form_double(
        a0: &GradedElement,
        a1: &GradedElement,
        a2: &GradedElement,
        theta: f64,
    ) -> Complex64 {
        let d1 = Derivation::D1;
        let d2 = Derivation::D2;
        let first = deformed_product(&d1.apply(a1), &d2.apply(a2), theta);
        let second = deformed_product(&d2.apply(a1), &d1.apply(a2), theta);
        trace_tau(&deformed_product(a0, &first.sub(&second), theta))
    }

    fn double_contraction(theta: f64) -> CyclicCochain {
        CyclicCochain::trace(theta)
            .contract(Derivation::D2)
            .unwrap()
            .contract(Derivation::D1)
            .unwrap()
    }

    #[test]
    fn trace_basics() {
        assert_eq!(trace_tau(&GradedElement::one()), c(1.0, 0.0));
        assert_eq!(trace_tau(&GradedElement::u()), c(0.0, 0.0));
        let a = monomial(2, -1, 0.3, 0.4);
        assert_eq!(trace_tau(&a), c(0.0, 0.0));
    }

    #[test]
    fn trace_is_tracial_under_deformed_product() {
        let theta = 0.37;
        let xs = random_monomials(11, 12, 3);
        for pair in xs.chunks(2) {
            let ab = deformed_product(&pair[0], &pair[1], theta);
            let ba = deformed_product(&pair[1], &pair[0], theta);
            assert!((trace_tau(&ab) - trace_tau(&ba)).norm() < 1e-12);
        }
    }

    #[test]
    fn single_contraction_on_generators() {
        let phi = CyclicCochain::trace(0.25).contract(Derivation::D1).unwrap();
        // i_δτ(1, a) = −τ(δa) = 0: derivations kill weight (0,0).
        let a = monomial(1, 2, 0.7, -0.1);
        let v = phi
            .evaluate_scalar(&[GradedElement::one(), a])
            .unwrap();
        assert!(v.norm() < 1e-15);
        // i_{δ1}τ(u*, u) = −τ(u*·2πi·u) = −2πi.
        let v = phi
            .evaluate_scalar(&[star(&GradedElement::u()), GradedElement::u()])
            .unwrap();
        assert!((v - c(0.0, -2.0 * PI)).norm() < 1e-13, "got {v}");
    }

    #[test]
    fn double_contraction_matches_leibniz_closed_form() {
        let theta = 0.37;
        let phi = double_contraction(theta);
        let xs = random_monomials(5, 30, 4);
        for tri in xs.chunks(3) {
            let engine = phi
                .evaluate_scalar(&[tri[0].clone(), tri[1].clone(), tri[2].clone()])
                .unwrap();
            let closed = closed_form_double(&tri[0], &tri[1], &tri[2], theta);
            assert!(
                (engine - closed).norm() < 1e-12,
                "engine {engine} vs closed {closed}"
            );
        }
    }

    #[test]
    fn double_contraction_is_cyclic() {
        let theta = 0.61;
        let phi = double_contraction(theta);
        let xs = random_monomials(23, 30, 3);
        for tri in xs.chunks(3) {
            let v012 = phi
                .evaluate_scalar(&[tri[0].clone(), tri[1].clone(), tri[2].clone()])
                .unwrap();
            let v201 = phi
                .evaluate_scalar(&[tri[2].clone(), tri[0].clone(), tri[1].clone()])
                .unwrap();
            assert!((v012 - v201).norm() < 1e-12, "{v012} vs {v201}");
        }
    }

    #[test]
    fn double_contraction_is_torus_invariant() {
        let theta = 0.3;
        let phi = double_contraction(theta);
        let xs = random_monomials(71, 15, 3);
        let (t1, t2) = (0.217, -0.83);
        for tri in xs.chunks(3) {
            let plain = phi
                .evaluate_scalar(&[tri[0].clone(), tri[1].clone(), tri[2].clone()])
                .unwrap();
            let rotated = phi
                .evaluate_scalar(&[
                    tri[0].rotated(t1, t2),
                    tri[1].rotated(t1, t2),
                    tri[2].rotated(t1, t2),
                ])
                .unwrap();
            assert!((plain - rotated).norm() < 1e-12);
        }
    }

    #[test]
    fn hochschild_coboundary_vanishes() {
        let theta = 0.37;
        // bτ(a₀,a₁) = τ(a₀∗a₁) − τ(a₁∗a₀) = 0 is the trace property; for the
        // degree-2 cochain the alternating sum over quadruples must vanish.
        let phi = double_contraction(theta);
        let xs = random_monomials(42, 16, 2);
        for quad in xs.chunks(4) {
            let (a0, a1, a2, a3) = (&quad[0], &quad[1], &quad[2], &quad[3]);
            let p01 = deformed_product(a0, a1, theta);
            let p12 = deformed_product(a1, a2, theta);
            let p23 = deformed_product(a2, a3, theta);
            let p30 = deformed_product(a3, a0, theta);
            let b = phi.evaluate_scalar(&[p01, a2.clone(), a3.clone()]).unwrap()
                - phi.evaluate_scalar(&[a0.clone(), p12, a3.clone()]).unwrap()
                + phi.evaluate_scalar(&[a0.clone(), a1.clone(), p23]).unwrap()
                - phi.evaluate_scalar(&[p30, a1.clone(), a2.clone()]).unwrap();
            assert!(b.norm() < 1e-12, "coboundary {b}");
        }
    }

    #[test]
    fn deformed_eval_degenerates_correctly() {
        // θ=0 keeps the plain value; degree 0 ignores θ entirely.
        let phi = double_contraction(0.0);
        let args = [monomial(1, 1, 0.5, 0.0), monomial(2, -1, 1.0, 0.2), monomial(-3, 0, -0.4, 0.1)];
        let plain = phi.evaluate_scalar(&args).unwrap();
        let twisted = deformed_cocycle_eval(&phi, 0.0, &args).unwrap();
        assert!((plain - twisted).norm() < 1e-15);

        let tau = CyclicCochain::trace(0.0);
        let mut a = GradedElement::one();
        a.add_term(Weight::new(1, 1), c(0.3, -0.2));
        for &theta in &[0.0, 0.3, 0.77] {
            let v = deformed_cocycle_eval(&tau, theta, &[a.clone()]).unwrap();
            assert_eq!(v, trace_tau(&a));
        }
    }

    #[test]
    fn deformed_eval_matches_operator_side() {
        // Small-lattice version of the full homogeneous-tuple sweep: the
        // twisted formula must equal the deformed-operator trace.
        let theta = 0.3;
        let phi = double_contraction(0.0);
        let triples = [
            [monomial(1, 0, 1.0, 0.0), monomial(0, 1, 1.0, 0.0), monomial(-1, -1, 1.0, 0.0)],
            [monomial(-1, -1, 0.5, 0.5), monomial(1, 0, 1.0, -1.0), monomial(0, 1, -0.3, 0.2)],
            [monomial(2, -1, 0.8, 0.1), monomial(-1, 2, 0.9, 0.0), monomial(-1, -1, 1.1, -0.4)],
        ];
        for args in &triples {
            let formula = deformed_cocycle_eval(&phi, theta, args).unwrap();
            let windowed = double_contraction_operator_side(args, theta, 8, 4);
            assert!(
                (formula - windowed).norm() < 1e-11,
                "formula {formula} vs operator {windowed}"
            );
        }
    }

    #[test]
    fn combined_on_trivial_projection() {
        let one = MatrixGradedElement::from_scalar(GradedElement::one());
        let tau = CyclicCochain::trace(0.0);
        for &theta in &[0.0, 0.25, 0.7] {
            let v = combined_cocycle_eval(&tau, theta, &one).unwrap();
            assert!((v - c(1.0, 0.0)).norm() < 1e-15);
        }
    }

    #[test]
    fn combined_on_reference_bundle_tracks_theta() {
        let p = bott_projection(16).unwrap();
        let tau = CyclicCochain::trace(0.0);
        for &theta in &[0.1, 0.5, 0.7] {
            let v = combined_cocycle_eval(&tau, theta, &p).unwrap();
            assert!(
                (v - c(1.0 + theta, 0.0)).norm() < 5e-3,
                "theta={theta}: {v}"
            );
        }
    }

    #[test]
    fn contracted_pairing_counts_the_reference_chern_number() {
        let p = bott_projection(32).unwrap();
        let phi = double_contraction(0.0);
        let report = k0_pairing(&phi, &p, 0.0).unwrap();
        assert!(
            (report.normalized - c(1.0, 0.0)).norm() < 1e-6,
            "normalized {}",
            report.normalized
        );
        assert!(report.integer_distance < 1e-6);
    }

    #[test]
    fn trace_pairing_reads_the_bump_mean() {
        let theta = 1.0 / 3.0;
        let p = powers_rieffel(theta, &BumpProfile::mollified(64)).unwrap();
        let tau = CyclicCochain::trace(theta);
        let report = k0_pairing(&tau, &p, theta).unwrap();
        assert!((report.normalized.re - theta).abs() < 1e-9);
        assert!(report.normalized.im.abs() < 1e-12);
    }

    #[test]
    fn pairing_rejects_non_projections() {
        let tau = CyclicCochain::trace(0.0);
        let not_p = MatrixGradedElement::from_scalar(GradedElement::u());
        match k0_pairing(&tau, &not_p, 0.0) {
            Err(CocycleError::NotProjection { defect }) => assert!(defect > 0.5),
            other => panic!("expected rejection, got {other:?}"),
        }
    }

    #[test]
    fn chern_generic_matches_collapsed_path() {
        // The collapse is an operator identity, so any argument works; use
        // a non-projection element on a small lattice.
        let n = 6;
        let theta = 0.3;
        let (hilb, dirac, _) = build_truncation(n).unwrap();
        let mut a = GradedElement::u();
        a.add_term(Weight::new(0, 1), c(0.5, 0.25));
        a.add_term(Weight::new(-1, 1), c(-0.3, 0.1));
        let p = MatrixGradedElement::from_scalar(a);
        let spinor = deform_operator(&represent_matrix_spinor(&p, &hilb), theta);
        let generic = chern_cocycle_eval(
            2,
            &dirac,
            &[spinor.clone(), spinor.clone(), spinor],
            n,
        )
        .unwrap();
        let q = deform_operator(&represent_matrix(&p, n), theta);
        let collapsed = chern_collapse(&q, &q, &q, n);
        assert!(
            (generic - collapsed).norm() < 1e-12,
            "generic {generic} vs collapsed {collapsed}"
        );
    }

    #[test]
    fn chern_trivial_cases() {
        let n = 4;
        let (hilb, dirac, _) = build_truncation(n).unwrap();
        let one = MatrixGradedElement::from_scalar(GradedElement::one());
        let id_spinor = represent_matrix_spinor(&one, &hilb);
        // Graded dimension vanishes: equal spinor components.
        let v = chern_cocycle_eval(0, &dirac, &[id_spinor.clone()], n).unwrap();
        assert!(v.norm() < 1e-15);
        // [F, 1] = 0 kills the degree-2 value.
        let mut b = GradedElement::u();
        b.add_term(Weight::new(0, -1), c(0.3, 0.1));
        let pb = MatrixGradedElement::from_scalar(b);
        let b_spinor = represent_matrix_spinor(&pb, &hilb);
        let v = chern_cocycle_eval(2, &dirac, &[b_spinor, id_spinor.clone(), id_spinor], n)
            .unwrap();
        assert!(v.norm() < 1e-13);
    }

    #[test]
    fn index_oracle_identity_projection_is_zero() {
        let (_, dirac, _) = build_truncation(8).unwrap();
        let one = MatrixGradedElement::from_scalar(GradedElement::one());
        let report = fredholm_index_oracle(&one, 0.3, &dirac).unwrap();
        assert_eq!(report.index, 0);
        assert_eq!(report.count_plus, 1);
        assert_eq!(report.count_minus, 1);
        assert!(report.census_complete);
    }

    #[test]
    fn index_oracle_reference_bundle() {
        let p = bott_projection(16).unwrap();
        let (_, dirac, _) = build_truncation(16).unwrap();
        let report = fredholm_index_oracle(&p, 0.0, &dirac).unwrap();
        assert_eq!(report.index, 1, "ritz+ {:?} ritz- {:?}", report.ritz_plus, report.ritz_minus);
        assert!(report.threshold_margin > 0.01);
    }

    #[test]
    fn jacobi_agrees_with_reference_eigensolver() {
        let b = 8;
        let mut rng = Lcg(99);
        let mut r = vec![c(0.0, 0.0); b * b];
        for i in 0..b {
            for j in i..b {
                let v = if i == j {
                    c(rng.next() - 0.5, 0.0)
                } else {
                    c(rng.next() - 0.5, rng.next() - 0.5)
                };
                r[i * b + j] = v;
                r[j * b + i] = v.conj();
            }
        }
        let mine = hermitian_eigenvalues(&r, b);
        let na = nalgebra::DMatrix::from_fn(b, b, |i, j| r[i * b + j]);
        let mut reference: Vec<f64> = na.symmetric_eigen().eigenvalues.iter().copied().collect();
        reference.sort_by(|x, y| y.partial_cmp(x).unwrap());
        for (a, b) in mine.iter().zip(reference.iter()) {
            assert!((a - b).abs() < 1e-10, "{mine:?} vs {reference:?}");
        }
    }
}
