//! Truncated spectral data for the flat equivariant triple on the 2-torus.
//!
//! The Hilbert space is the spinor lattice: sites (m,n) with max(|m|,|n|) ≤ N
//! carrying `block_dim` components per site (2 spinor slots for the triple
//! itself; other block sizes appear for matrix amplifications).  Operators
//! are stored band-sparse: for each lattice offset (dm,dn) and block pair
//! (bi,bj), a vector of entries indexed by the column site.  Products,
//! commutators and deformations then cost (bands × sites), never dim².
//!
//! The deformation T ↦ T^(θ) multiplies the entry that moves column site
//! (m,n) by lattice offset (dm,dn) with the phase e^{πiθ(dm·n − m·dn)}.
//! Entries with vanishing integer exponent are left untouched (not multiplied
//! by a computed unit), so diagonal data such as zeta sums is bit-identical
//! under deformation.

use crate::graded_core::{phase_factor, GradedElement, MatrixGradedElement, Weight};
use num_complex::Complex64;
use std::collections::BTreeMap;
use std::f64::consts::PI;
use thiserror::Error;

const C_ZERO: Complex64 = Complex64::new(0.0, 0.0);
const C_ONE: Complex64 = Complex64::new(1.0, 0.0);

/// Tolerance used for the internal operator norms inside seminorm and decay
/// evaluation.
const NORM_TOL: f64 = 1e-10;

/// Iteration cap for power iteration.
const NORM_MAX_ITERS: usize = 50_000;

#[derive(Debug, Error)]
pub enum SpectralError {
    #[error("cutoff N must be >= 1: N=0 leaves only the kernel block of the Dirac operator")]
    ZeroCutoff,
    #[error(
        "interior window exhausted at cutoff N={n}: total displacement {displacement} \
         leaves no interior slots; need N >= {required_n}"
    )]
    WindowExhausted {
        n: u32,
        displacement: u32,
        required_n: u32,
    },
    #[error("power iteration did not converge within {iterations} iterations (tol {tol})")]
    NonConvergence { iterations: usize, tol: f64 },
    #[error("tolerance must be positive, got {0}")]
    BadTolerance(f64),
}

fn in_bounds(n: u32, m: i32, nn: i32) -> bool {
    m.unsigned_abs() <= n && nn.unsigned_abs() <= n
}

fn site_index(n: u32, m: i32, nn: i32) -> usize {
    let side = (2 * n + 1) as usize;
    let ni = n as i32;
    (m + ni) as usize * side + (nn + ni) as usize
}

/// Lattice sites in storage order (m outer, n inner, both ascending).
pub fn sites(n: u32) -> impl Iterator<Item = (i32, i32)> {
    let ni = n as i32;
    (-ni..=ni).flat_map(move |m| (-ni..=ni).map(move |nn| (m, nn)))
}

/// Band-sparse complex operator on the truncated lattice with `block_dim`
/// components per site.
///
/// A band keyed by (dm, dn, bi, bj) holds, for every column site (m,n), the
/// matrix entry from slot ((m,n), bj) into slot ((m+dm, n+dn), bi).  Entries
/// whose target site leaves the truncation are identically zero; constructors
/// enforce this clipping, products drop such terms.
#[derive(Clone, Debug, PartialEq)]
pub struct TruncatedOperator {
    n: u32,
    block_dim: usize,
    bands: BTreeMap<(i32, i32, u8, u8), Vec<Complex64>>,
}

impl TruncatedOperator {
    /// The zero operator.
    pub fn new(n: u32, block_dim: usize) -> Self {
        assert!(block_dim >= 1 && block_dim <= u8::MAX as usize);
        TruncatedOperator {
            n,
            block_dim,
            bands: BTreeMap::new(),
        }
    }

    /// The identity.
    pub fn identity(n: u32, block_dim: usize) -> Self {
        let mut t = Self::new(n, block_dim);
        let sites_count = t.site_count();
        for b in 0..block_dim {
            t.insert_band(0, 0, b as u8, b as u8, vec![C_ONE; sites_count]);
        }
        t
    }

    /// Site-diagonal operator from a per-site block function: `f(m, n, bi, bj)`.
    pub fn site_diagonal(
        n: u32,
        block_dim: usize,
        f: impl Fn(i32, i32, usize, usize) -> Complex64,
    ) -> Self {
        let mut t = Self::new(n, block_dim);
        for bi in 0..block_dim {
            for bj in 0..block_dim {
                let vals: Vec<Complex64> =
                    sites(n).map(|(m, nn)| f(m, nn, bi, bj)).collect();
                if vals.iter().any(|c| c.norm_sqr() != 0.0) {
                    t.insert_band(0, 0, bi as u8, bj as u8, vals);
                }
            }
        }
        t
    }

    pub fn cutoff(&self) -> u32 {
        self.n
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    fn side(&self) -> usize {
        (2 * self.n + 1) as usize
    }

    pub fn site_count(&self) -> usize {
        self.side() * self.side()
    }

    /// Total dimension of the carrier space.
    pub fn dim(&self) -> usize {
        self.site_count() * self.block_dim
    }

    /// Adds a band, clipping positions whose row site leaves the truncation.
    ///
    /// `vals` is indexed by column site in storage order and must have one
    /// entry per site.
    pub fn insert_band(&mut self, dm: i32, dn: i32, bi: u8, bj: u8, mut vals: Vec<Complex64>) {
        assert_eq!(vals.len(), self.site_count());
        assert!((bi as usize) < self.block_dim && (bj as usize) < self.block_dim);
        for (idx, (m, nn)) in sites(self.n).enumerate() {
            if !in_bounds(self.n, m + dm, nn + dn) {
                vals[idx] = C_ZERO;
            }
        }
        if vals.iter().all(|c| c.norm_sqr() == 0.0) {
            return;
        }
        match self.bands.entry((dm, dn, bi, bj)) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(vals);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                for (dst, src) in e.get_mut().iter_mut().zip(vals) {
                    *dst += src;
                }
            }
        }
    }

    /// Matrix entry from slot ((cm,cn), bj) into slot ((rm,rn), bi).
    pub fn entry(&self, rm: i32, rn: i32, bi: u8, cm: i32, cn: i32, bj: u8) -> Complex64 {
        if !in_bounds(self.n, rm, rn) || !in_bounds(self.n, cm, cn) {
            return C_ZERO;
        }
        self.bands
            .get(&(rm - cm, rn - cn, bi, bj))
            .map(|v| v[site_index(self.n, cm, cn)])
            .unwrap_or(C_ZERO)
    }

    fn same_shape(&self, other: &Self) {
        assert_eq!(self.n, other.n, "operator cutoffs differ");
        assert_eq!(self.block_dim, other.block_dim, "operator block dims differ");
    }

    pub fn add(&self, other: &Self) -> Self {
        self.same_shape(other);
        let mut out = self.clone();
        for (&k, v) in &other.bands {
            out.insert_band(k.0, k.1, k.2, k.3, v.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(Complex64::new(-1.0, 0.0)))
    }

    pub fn scale(&self, c: Complex64) -> Self {
        TruncatedOperator {
            n: self.n,
            block_dim: self.block_dim,
            bands: self
                .bands
                .iter()
                .map(|(&k, v)| (k, v.iter().map(|x| c * x).collect()))
                .collect(),
        }
    }

    /// Operator composition self·other (both on the same truncation).
    ///
    /// Middle sites that leave the truncation are dropped: this is exactly
    /// the compression of the product to the truncated space.
    pub fn mul(&self, other: &Self) -> Self {
        self.same_shape(other);
        let n = self.n;
        let mut out = Self::new(n, self.block_dim);
        let mut acc: BTreeMap<(i32, i32, u8, u8), Vec<Complex64>> = BTreeMap::new();
        for (&(d1m, d1n, bi, bk), v1) in &self.bands {
            for (&(d2m, d2n, bk2, bj), v2) in &other.bands {
                if bk != bk2 {
                    continue;
                }
                let key = (d1m + d2m, d1n + d2n, bi, bj);
                let dst = acc
                    .entry(key)
                    .or_insert_with(|| vec![C_ZERO; v1.len()]);
                for (idx, (cm, cn)) in sites(n).enumerate() {
                    // mid = column + other's offset must stay inside; the
                    // final row is clipped by insert_band.
                    let (mm, mn) = (cm + d2m, cn + d2n);
                    if !in_bounds(n, mm, mn) {
                        continue;
                    }
                    let x = v2[idx];
                    if x == C_ZERO {
                        continue;
                    }
                    dst[idx] += v1[site_index(n, mm, mn)] * x;
                }
            }
        }
        for ((dm, dn, bi, bj), vals) in acc {
            out.insert_band(dm, dn, bi, bj, vals);
        }
        out
    }

    /// Hermitian adjoint.
    pub fn adjoint(&self) -> Self {
        let n = self.n;
        let mut out = Self::new(n, self.block_dim);
        for (&(dm, dn, bi, bj), v) in &self.bands {
            // (T*)[(c,bj),(c+d,bi)] = conj(T[(c+d,bi),(c,bj)]).
            let mut vals = vec![C_ZERO; v.len()];
            for (idx, (cm, cn)) in sites(n).enumerate() {
                let (sm, sn) = (cm - dm, cn - dn);
                if in_bounds(n, sm, sn) {
                    vals[idx] = v[site_index(n, sm, sn)].conj();
                }
            }
            out.insert_band(-dm, -dn, bj, bi, vals);
        }
        out
    }

    /// Conjugation by the torus unitary U_t: scales the (dm,dn) band by
    /// e^{2πi(dm·t1 + dn·t2)}.
    pub fn rotated(&self, t1: f64, t2: f64) -> Self {
        TruncatedOperator {
            n: self.n,
            block_dim: self.block_dim,
            bands: self
                .bands
                .iter()
                .map(|(&k, v)| {
                    let ph = Complex64::from_polar(
                        1.0,
                        2.0 * PI * (k.0 as f64 * t1 + k.1 as f64 * t2),
                    );
                    (k, v.iter().map(|x| ph * x).collect())
                })
                .collect(),
        }
    }

    /// The weight component T_{(m,n)}: keeps only bands with offset w.
    pub fn component(&self, w: Weight) -> Self {
        TruncatedOperator {
            n: self.n,
            block_dim: self.block_dim,
            bands: self
                .bands
                .iter()
                .filter(|(&(dm, dn, _, _), _)| dm == w.m && dn == w.n)
                .map(|(&k, v)| (k, v.clone()))
                .collect(),
        }
    }

    /// Distinct band offsets present (each a homogeneity weight).
    pub fn weights(&self) -> Vec<Weight> {
        let mut ws: Vec<Weight> = self
            .bands
            .keys()
            .map(|&(dm, dn, _, _)| Weight::new(dm, dn))
            .collect();
        ws.dedup();
        ws.sort_unstable();
        ws.dedup();
        ws
    }

    /// Some(w) when all nonzero bands share the single offset w.
    pub fn homogeneous_weight(&self) -> Option<Weight> {
        let ws = self.weights();
        if ws.len() == 1 {
            Some(ws[0])
        } else {
            None
        }
    }

    /// Largest band displacement max(|dm|,|dn|): the window shrinkage this
    /// operator costs inside identities.
    pub fn band_radius(&self) -> u32 {
        self.bands
            .keys()
            .map(|&(dm, dn, _, _)| dm.unsigned_abs().max(dn.unsigned_abs()))
            .max()
            .unwrap_or(0)
    }

    /// Zeroes all columns at sites with max(|m|,|n|) > r: the interior-window
    /// compression used before norm comparisons near the boundary.
    pub fn mask_columns(&self, r: u32) -> Self {
        let n = self.n;
        let mut out = Self::new(n, self.block_dim);
        for (&(dm, dn, bi, bj), v) in &self.bands {
            let vals: Vec<Complex64> = sites(n)
                .enumerate()
                .map(|(idx, (m, nn))| {
                    if m.unsigned_abs() <= r && nn.unsigned_abs() <= r {
                        v[idx]
                    } else {
                        C_ZERO
                    }
                })
                .collect();
            out.insert_band(dm, dn, bi, bj, vals);
        }
        out
    }

    /// Fraction of band positions clipped because the row site leaves the
    /// truncation; the boundary-mask report for shift operators.
    pub fn boundary_mask_fraction(&self) -> f64 {
        if self.bands.is_empty() {
            return 0.0;
        }
        let mut clipped = 0usize;
        let mut total = 0usize;
        for &(dm, dn, _, _) in self.bands.keys() {
            for (m, nn) in sites(self.n) {
                total += 1;
                if !in_bounds(self.n, m + dm, nn + dn) {
                    clipped += 1;
                }
            }
        }
        clipped as f64 / total as f64
    }

    /// Applies the operator to a coefficient vector indexed slot-major:
    /// index = site_index·block_dim + block.
    pub fn apply(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.dim());
        let n = self.n;
        let d = self.block_dim;
        let mut y = vec![C_ZERO; x.len()];
        for (&(dm, dn, bi, bj), v) in &self.bands {
            for (idx, (cm, cn)) in sites(n).enumerate() {
                let val = v[idx];
                if val == C_ZERO {
                    continue;
                }
                let (rm, rn) = (cm + dm, cn + dn);
                if !in_bounds(n, rm, rn) {
                    continue;
                }
                let row = site_index(n, rm, rn) * d + bi as usize;
                y[row] += val * x[idx * d + bj as usize];
            }
        }
        y
    }

    /// Dense row-major matrix (dim × dim); test and export helper.
    pub fn to_dense(&self) -> Vec<Complex64> {
        let dim = self.dim();
        let n = self.n;
        let d = self.block_dim;
        let mut out = vec![C_ZERO; dim * dim];
        for (&(dm, dn, bi, bj), v) in &self.bands {
            for (idx, (cm, cn)) in sites(n).enumerate() {
                let (rm, rn) = (cm + dm, cn + dn);
                if !in_bounds(n, rm, rn) {
                    continue;
                }
                let row = site_index(n, rm, rn) * d + bi as usize;
                let col = idx * d + bj as usize;
                out[row * dim + col] = v[idx];
            }
        }
        out
    }

    /// Max entry modulus.
    pub fn entry_norm_inf(&self) -> f64 {
        self.bands
            .values()
            .flat_map(|v| v.iter().map(|c| c.norm()))
            .fold(0.0, f64::max)
    }

    /// Removes bands that are entirely zero.
    pub fn pruned(&self) -> Self {
        TruncatedOperator {
            n: self.n,
            block_dim: self.block_dim,
            bands: self
                .bands
                .iter()
                .filter(|(_, v)| v.iter().any(|c| c.norm_sqr() != 0.0))
                .map(|(&k, v)| (k, v.clone()))
                .collect(),
        }
    }

    /// Tensors with the identity on a d-dimensional fiber: block indices
    /// become b·d + j, entries diagonal in j.
    pub fn amplified(&self, d: usize) -> Self {
        let mut out = Self::new(self.n, self.block_dim * d);
        for (&(dm, dn, bi, bj), v) in &self.bands {
            for j in 0..d {
                out.insert_band(
                    dm,
                    dn,
                    (bi as usize * d + j) as u8,
                    (bj as usize * d + j) as u8,
                    v.clone(),
                );
            }
        }
        out
    }

    /// Iterates stored bands as ((dm, dn, bi, bj), column-indexed values).
    pub fn iter_bands(&self) -> impl Iterator<Item = ((i32, i32, u8, u8), &[Complex64])> {
        self.bands.iter().map(|(&k, v)| (k, v.as_slice()))
    }

    /// Sum of diagonal entries over sites with max(|m|,|n|) ≤ window, all
    /// block components included.
    pub fn windowed_trace(&self, window: u32) -> Complex64 {
        let mut acc = C_ZERO;
        for (&(dm, dn, bi, bj), v) in &self.bands {
            if dm != 0 || dn != 0 || bi != bj {
                continue;
            }
            for (idx, (m, nn)) in sites(self.n).enumerate() {
                if m.unsigned_abs() <= window && nn.unsigned_abs() <= window {
                    acc += v[idx];
                }
            }
        }
        acc
    }

    /// Entry-wise reweighting by a function of (row site, column site);
    /// band structure is preserved.
    pub fn site_weighted(
        &self,
        f: impl Fn((i32, i32), (i32, i32)) -> Complex64,
    ) -> Self {
        let n = self.n;
        TruncatedOperator {
            n,
            block_dim: self.block_dim,
            bands: self
                .bands
                .iter()
                .map(|(&k, v)| {
                    let (dm, dn, _, _) = k;
                    let vals: Vec<Complex64> = sites(n)
                        .zip(v.iter())
                        .map(|((m, nn), &x)| {
                            if x == C_ZERO {
                                C_ZERO
                            } else {
                                x * f((m + dm, nn + dn), (m, nn))
                            }
                        })
                        .collect();
                    (k, vals)
                })
                .collect(),
        }
    }
}

/// [A, B] = AB − BA.
pub fn commutator(a: &TruncatedOperator, b: &TruncatedOperator) -> TruncatedOperator {
    a.mul(b).sub(&b.mul(a))
}

/// Tr(A·B) computed band-by-band without forming the product: a band of A
/// with displacement d pairs with the band of B at −d and transposed block
/// indices.
pub fn trace_product(a: &TruncatedOperator, b: &TruncatedOperator) -> Complex64 {
    assert_eq!(a.n, b.n);
    assert_eq!(a.block_dim, b.block_dim);
    let n = a.n;
    let mut acc = C_ZERO;
    for (&(dm, dn, bi, bj), va) in &a.bands {
        let Some(vb) = b.bands.get(&(-dm, -dn, bj, bi)) else {
            continue;
        };
        for (idx, (m, nn)) in sites(n).enumerate() {
            let x = va[idx];
            if x == C_ZERO {
                continue;
            }
            let (rm, rn) = (m + dm, nn + dn);
            if !in_bounds(n, rm, rn) {
                continue;
            }
            acc += x * vb[site_index(n, rm, rn)];
        }
    }
    acc
}

/// The truncated spinor lattice: sites (m,n) with max(|m|,|n|) ≤ N, two
/// spinor slots per site, graded by the slot sign.
#[derive(Clone, Debug)]
pub struct TruncatedHilbert {
    n: u32,
}

impl TruncatedHilbert {
    pub fn cutoff(&self) -> u32 {
        self.n
    }

    /// 2(2N+1)².
    pub fn dim(&self) -> usize {
        2 * ((2 * self.n + 1) as usize).pow(2)
    }

    /// Ordered basis labels (m, n, s) with s = +1 (first slot) or −1.
    pub fn basis(&self) -> Vec<(i32, i32, i8)> {
        sites(self.n)
            .flat_map(|(m, nn)| [(m, nn, 1i8), (m, nn, -1i8)])
            .collect()
    }

    /// The grading γ: diagonal +1 on the first spinor slot, −1 on the second.
    pub fn gamma(&self) -> TruncatedOperator {
        TruncatedOperator::site_diagonal(self.n, 2, |_, _, bi, bj| {
            if bi != bj {
                C_ZERO
            } else if bi == 0 {
                C_ONE
            } else {
                -C_ONE
            }
        })
    }
}

/// Truncated Dirac data: D, |D|, and the phase F = D|D|^{−1} completed by
/// F = +1 on ker D (the two slots at the origin site).
#[derive(Clone, Debug)]
pub struct DiracTruncation {
    /// The Dirac operator: off-diagonal in spin, site-diagonal.
    pub d: TruncatedOperator,
    /// |D|: diagonal with entry 2π√(m²+n²) on both slots of site (m,n).
    pub abs_d: TruncatedOperator,
    /// The phase F, unitary and self-adjoint, F² = 1 on the whole truncation.
    pub f: TruncatedOperator,
    n: u32,
}

impl DiracTruncation {
    pub fn cutoff(&self) -> u32 {
        self.n
    }

    /// The positive-to-negative spinor block of F at site (m,n):
    /// −(m+in)/√(m²+n²), and 0 at the origin (where F is the identity).
    pub fn fplus_phase(w: Weight) -> Complex64 {
        if w.m == 0 && w.n == 0 {
            return C_ZERO;
        }
        let r = ((w.m as f64).powi(2) + (w.n as f64).powi(2)).sqrt();
        Complex64::new(-(w.m as f64) / r, -(w.n as f64) / r)
    }
}

/// The commuting generators h₁, h₂ of the two torus circles: diagonal with
/// entries 2πim and 2πin on both slots of site (m,n).
#[derive(Clone, Debug)]
pub struct GeneratorPair {
    pub h1: TruncatedOperator,
    pub h2: TruncatedOperator,
}

/// Builds the truncated triple data at lattice cutoff N ≥ 1.
///
/// # Example
/// ```
/// use thetadef::spectral::{build_truncation, TruncatedOperator};
/// let (hilb, dirac, _gens) = build_truncation(1).unwrap();
/// assert_eq!(hilb.dim(), 18);
/// let defect = dirac.f.mul(&dirac.f).sub(&TruncatedOperator::identity(1, 2));
/// assert!(defect.entry_norm_inf() < 1e-15);
/// ```
pub fn build_truncation(
    n: u32,
) -> Result<(TruncatedHilbert, DiracTruncation, GeneratorPair), SpectralError> {
    if n == 0 {
        return Err(SpectralError::ZeroCutoff);
    }
    let two_pi = 2.0 * PI;
    let d = TruncatedOperator::site_diagonal(n, 2, |m, nn, bi, bj| match (bi, bj) {
        (0, 1) => two_pi * Complex64::new(-(m as f64), nn as f64),
        (1, 0) => -two_pi * Complex64::new(m as f64, nn as f64),
        _ => C_ZERO,
    });
    let abs_d = TruncatedOperator::site_diagonal(n, 2, |m, nn, bi, bj| {
        if bi == bj {
            Complex64::new(
                two_pi * ((m as f64).powi(2) + (nn as f64).powi(2)).sqrt(),
                0.0,
            )
        } else {
            C_ZERO
        }
    });
    let f = TruncatedOperator::site_diagonal(n, 2, |m, nn, bi, bj| {
        if m == 0 && nn == 0 {
            // Kernel convention: F restricted to ker D is +1.
            if bi == bj {
                C_ONE
            } else {
                C_ZERO
            }
        } else {
            let r = ((m as f64).powi(2) + (nn as f64).powi(2)).sqrt();
            match (bi, bj) {
                (0, 1) => Complex64::new(-(m as f64) / r, nn as f64 / r),
                (1, 0) => Complex64::new(-(m as f64) / r, -(nn as f64) / r),
                _ => C_ZERO,
            }
        }
    });
    let h1 = TruncatedOperator::site_diagonal(n, 2, |m, _, bi, bj| {
        if bi == bj {
            Complex64::new(0.0, two_pi * m as f64)
        } else {
            C_ZERO
        }
    });
    let h2 = TruncatedOperator::site_diagonal(n, 2, |_, nn, bi, bj| {
        if bi == bj {
            Complex64::new(0.0, two_pi * nn as f64)
        } else {
            C_ZERO
        }
    });
    Ok((
        TruncatedHilbert { n },
        DiracTruncation { d, abs_d, f, n },
        GeneratorPair { h1, h2 },
    ))
}

/// Left regular action of an element on the spinor lattice: the weight-w
/// term shifts sites by w, identically on the spinor slots.  Boundary
/// entries whose target leaves the truncation are dropped (see
/// [`TruncatedOperator::boundary_mask_fraction`]).
pub fn represent(a: &GradedElement, hilb: &TruncatedHilbert) -> TruncatedOperator {
    represent_with_blocks(a, hilb.n, 2)
}

/// Same action on the scalar lattice (one component per site).
pub fn represent_lattice(a: &GradedElement, n: u32) -> TruncatedOperator {
    represent_with_blocks(a, n, 1)
}

fn represent_with_blocks(a: &GradedElement, n: u32, block_dim: usize) -> TruncatedOperator {
    let mut t = TruncatedOperator::new(n, block_dim);
    let sites_count = t.site_count();
    for (w, c) in a.iter_terms() {
        for b in 0..block_dim {
            t.insert_band(w.m, w.n, b as u8, b as u8, vec![c; sites_count]);
        }
    }
    t
}

/// Matrix-amplified action on the scalar lattice: block index = matrix index.
pub fn represent_matrix(p: &MatrixGradedElement, n: u32) -> TruncatedOperator {
    let d = p.dim();
    let mut t = TruncatedOperator::new(n, d);
    let sites_count = t.site_count();
    for i in 0..d {
        for j in 0..d {
            for (w, c) in p.entry(i, j).iter_terms() {
                t.insert_band(w.m, w.n, i as u8, j as u8, vec![c; sites_count]);
            }
        }
    }
    t
}

/// Matrix-amplified action on the spinor lattice: block index = s·d + j for
/// spinor slot s and matrix index j.
pub fn represent_matrix_spinor(p: &MatrixGradedElement, hilb: &TruncatedHilbert) -> TruncatedOperator {
    let d = p.dim();
    let mut t = TruncatedOperator::new(hilb.n, 2 * d);
    let sites_count = t.site_count();
    for s in 0..2usize {
        for i in 0..d {
            for j in 0..d {
                for (w, c) in p.entry(i, j).iter_terms() {
                    t.insert_band(
                        w.m,
                        w.n,
                        (s * d + i) as u8,
                        (s * d + j) as u8,
                        vec![c; sites_count],
                    );
                }
            }
        }
    }
    t
}

/// The operator deformation T ↦ T^(θ): the band moving column site (m,n) by
/// (dm,dn) is multiplied by e^{πiθ(dm·n − m·dn)}.
///
/// Entries with vanishing integer exponent (all diagonal bands in
/// particular) are returned bit-identical.
pub fn deform_operator(t: &TruncatedOperator, theta: f64) -> TruncatedOperator {
    if theta == 0.0 {
        return t.clone();
    }
    let n = t.n;
    TruncatedOperator {
        n,
        block_dim: t.block_dim,
        bands: t
            .bands
            .iter()
            .map(|(&k, v)| {
                let (dm, dn, _, _) = k;
                let vals: Vec<Complex64> = sites(n)
                    .zip(v.iter())
                    .map(|((m, nn), &x)| {
                        let kexp = i64::from(dm) * i64::from(nn) - i64::from(m) * i64::from(dn);
                        if kexp == 0 {
                            x
                        } else {
                            x * phase_factor(theta, Weight::new(dm, dn), Weight::new(m, nn))
                        }
                    })
                    .collect();
                (k, vals)
            })
            .collect(),
    }
}

/// Largest singular value by power iteration on T*T with the deterministic
/// normalized all-ones start vector.
pub fn operator_norm(t: &TruncatedOperator, tol: f64) -> Result<f64, SpectralError> {
    if tol <= 0.0 {
        return Err(SpectralError::BadTolerance(tol));
    }
    if t.bands.is_empty() {
        return Ok(0.0);
    }
    let dim = t.dim();
    let adj = t.adjoint();
    let mut x = vec![Complex64::new(1.0 / (dim as f64).sqrt(), 0.0); dim];
    let mut prev = f64::INFINITY;
    for _ in 0..NORM_MAX_ITERS {
        let y = t.apply(&x);
        let sigma2: f64 = y.iter().map(|c| c.norm_sqr()).sum();
        let sigma = sigma2.sqrt();
        if sigma == 0.0 {
            // Start vector lies in the kernel; the deterministic seed has
            // support everywhere, so the operator annihilates it entirely.
            return Ok(0.0);
        }
        if (sigma - prev).abs() <= tol * sigma.max(1.0) {
            return Ok(sigma);
        }
        prev = sigma;
        let z = adj.apply(&y);
        let zn: f64 = z.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if zn == 0.0 {
            return Ok(sigma);
        }
        for (dst, src) in x.iter_mut().zip(z) {
            *dst = src / zn;
        }
    }
    Err(SpectralError::NonConvergence {
        iterations: NORM_MAX_ITERS,
        tol,
    })
}

/// The smoothness seminorm ν_{k,α}(a) =
/// ‖δ^k([h,a]^(α))‖ + ‖δ^k([D,[h,a]^(α)])‖, with δ = [|D|,·] and [h,a]^(α)
/// the iterated torus-generator commutator (all h₁ applied outside all h₂).
///
/// Norms are taken on the interior window of radius
/// N − cutoff(a) − k − |α|, which keeps every iterated commutator exact;
/// the window must be positive.
pub fn seminorm_nu(
    a: &GradedElement,
    k: u32,
    alpha: (u32, u32),
    hilb: &TruncatedHilbert,
    dirac: &DiracTruncation,
    gens: &GeneratorPair,
) -> Result<f64, SpectralError> {
    let n = hilb.cutoff();
    let displacement = a.cutoff() + k + alpha.0 + alpha.1;
    if displacement >= n {
        return Err(SpectralError::WindowExhausted {
            n,
            displacement,
            required_n: displacement + 1,
        });
    }
    let window = n - displacement;
    let mut x = represent(a, hilb);
    for _ in 0..alpha.1 {
        x = commutator(&gens.h2, &x);
    }
    for _ in 0..alpha.0 {
        x = commutator(&gens.h1, &x);
    }
    let mut da = commutator(&dirac.d, &x);
    let mut smooth = x;
    for _ in 0..k {
        smooth = commutator(&dirac.abs_d, &smooth);
        da = commutator(&dirac.abs_d, &da);
    }
    let first = operator_norm(&smooth.mask_columns(window), NORM_TOL)?;
    let second = operator_norm(&da.mask_columns(window), NORM_TOL)?;
    Ok(first + second)
}

/// Weight component decay report: every ‖T_{(m,n)}‖ is compared against
/// C/(m²+n²)^e for e = 2 (the derivation's exponent) and e = 1, with
/// C = ‖(ad₁² + ad₂²)²(T)‖ / 16π⁴.
#[derive(Clone, Debug)]
pub struct DecayReport {
    /// The bound constant C.
    pub c_constant: f64,
    /// Worst ‖T_w‖(m²+n²)²/C over nonzero weights (0 when none).
    pub worst_ratio_quartic: f64,
    /// Worst ‖T_w‖(m²+n²)/C over nonzero weights.
    pub worst_ratio_quadratic: f64,
    /// Per-weight component norms.
    pub component_norms: Vec<(Weight, f64)>,
    /// worst_ratio_quartic ≤ 1 (vacuously true without nonzero weights).
    pub pass_quartic: bool,
    /// Interior window radius used for every norm.
    pub window: u32,
}

/// Checks the component decay bound on the interior window of radius
/// `window`.
pub fn verify_decay(t: &TruncatedOperator, window: u32) -> Result<DecayReport, SpectralError> {
    // (ad₁²+ad₂²)² scales the (dm,dn) band by 16π⁴(dm²+dn²)².
    let quartic = TruncatedOperator {
        n: t.n,
        block_dim: t.block_dim,
        bands: t
            .bands
            .iter()
            .map(|(&k, v)| {
                let r2 = (k.0 as f64).powi(2) + (k.1 as f64).powi(2);
                let s = 16.0 * PI.powi(4) * r2 * r2;
                (k, v.iter().map(|x| x * s).collect::<Vec<_>>())
            })
            .collect(),
    };
    let c_constant = operator_norm(&quartic.mask_columns(window), NORM_TOL)? / (16.0 * PI.powi(4));
    let mut component_norms = Vec::new();
    let mut worst_quartic: f64 = 0.0;
    let mut worst_quadratic: f64 = 0.0;
    for w in t.weights() {
        if w == Weight::ZERO {
            continue;
        }
        let norm = operator_norm(&t.component(w).mask_columns(window), NORM_TOL)?;
        component_norms.push((w, norm));
        let r2 = (w.m as f64).powi(2) + (w.n as f64).powi(2);
        if c_constant > 0.0 {
            worst_quartic = worst_quartic.max(norm * r2 * r2 / c_constant);
            worst_quadratic = worst_quadratic.max(norm * r2 / c_constant);
        }
    }
    Ok(DecayReport {
        c_constant,
        worst_ratio_quartic: worst_quartic,
        worst_ratio_quadratic: worst_quadratic,
        component_norms,
        pass_quartic: worst_quartic <= 1.0 + 1e-9,
        window,
    })
}

/// Truncated zeta sum Tr(T|D|^{−s}) over non-kernel slots: the origin site
/// is excluded, every other slot contributes the diagonal entry of T times
/// (2π√(m²+n²))^{−s}.
///
/// Depends only on diagonal bands, which [`deform_operator`] leaves
/// bit-identical, so the sum is exactly deformation-invariant.
pub fn zeta_partial(t: &TruncatedOperator, s: Complex64, dirac: &DiracTruncation) -> Complex64 {
    assert_eq!(t.n, dirac.n, "operator and Dirac truncations differ");
    let n = t.n;
    let weights: Vec<Complex64> = sites(n)
        .map(|(m, nn)| {
            if m == 0 && nn == 0 {
                C_ZERO
            } else {
                let lam = 2.0 * PI * ((m as f64).powi(2) + (nn as f64).powi(2)).sqrt();
                Complex64::new(lam, 0.0).powc(-s)
            }
        })
        .collect();
    let mut acc = C_ZERO;
    for (&(dm, dn, bi, bj), v) in &t.bands {
        if dm != 0 || dn != 0 || bi != bj {
            continue;
        }
        for (idx, _) in sites(n).enumerate() {
            acc += v[idx] * weights[idx];
        }
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graded_core::deformed_product;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    struct Lcg(u64);

    impl Lcg {
        fn next_f64(&mut self) -> f64 {
            self.0 = self
                .0
                .wrapping_mul(6364136223846793005)
                .wrapping_add(1442695040888963407);
            (self.0 >> 11) as f64 / (1u64 << 53) as f64
        }
        fn next_c64(&mut self) -> Complex64 {
            c(self.next_f64() - 0.5, self.next_f64() - 0.5)
        }
    }

    fn random_element(seed: u64, terms: usize, radius: i32) -> GradedElement {
        let mut rng = Lcg(seed);
        let mut e = GradedElement::zero();
        for _ in 0..terms {
            let m = ((rng.next_f64() * (2.0 * radius as f64 + 1.0)) as i32) - radius;
            let n = ((rng.next_f64() * (2.0 * radius as f64 + 1.0)) as i32) - radius;
            e.add_term(Weight::new(m, n), rng.next_c64());
        }
        e
    }

    fn random_operator(seed: u64, n: u32, block_dim: usize, band_radius: i32) -> TruncatedOperator {
        let mut rng = Lcg(seed);
        let mut t = TruncatedOperator::new(n, block_dim);
        let sc = t.site_count();
        for dm in -band_radius..=band_radius {
            for dn in -band_radius..=band_radius {
                for bi in 0..block_dim {
                    for bj in 0..block_dim {
                        let vals: Vec<Complex64> = (0..sc).map(|_| rng.next_c64()).collect();
                        t.insert_band(dm, dn, bi as u8, bj as u8, vals);
                    }
                }
            }
        }
        t
    }

    fn op_distance(a: &TruncatedOperator, b: &TruncatedOperator) -> f64 {
        a.sub(b).entry_norm_inf()
    }

    #[test]
    fn truncation_n1_spectrum() {
        let (hilb, dirac, _) = build_truncation(1).unwrap();
        assert_eq!(hilb.dim(), 18);
        // |D| diagonal eigenvalues: 2π·{0 ×2, 1 ×8, √2 ×8}.
        let mut eigs: Vec<f64> = Vec::new();
        for (m, nn) in sites(1) {
            for b in 0..2u8 {
                eigs.push(dirac.abs_d.entry(m, nn, b, m, nn, b).re);
            }
        }
        eigs.sort_by(f64::total_cmp);
        let two_pi = 2.0 * PI;
        assert_eq!(eigs.len(), 18);
        assert!(eigs[..2].iter().all(|&x| x == 0.0));
        assert!(eigs[2..10].iter().all(|&x| (x - two_pi).abs() < 1e-12));
        assert!(eigs[10..]
            .iter()
            .all(|&x| (x - two_pi * 2f64.sqrt()).abs() < 1e-12));
        assert!(build_truncation(0).is_err());
    }

    #[test]
    fn dirac_is_odd_self_adjoint_and_equivariant() {
        let (hilb, dirac, _) = build_truncation(2).unwrap();
        let gamma = hilb.gamma();
        let gdg = gamma.mul(&dirac.d).mul(&gamma);
        assert_eq!(op_distance(&gdg, &dirac.d.scale(c(-1.0, 0.0))), 0.0);
        assert_eq!(op_distance(&dirac.d.adjoint(), &dirac.d), 0.0);
        // U_t D U_t* = D: D is site-diagonal, so rotation acts trivially.
        let rot = dirac.d.rotated(0.31, 0.77);
        assert!(op_distance(&rot, &dirac.d) < 1e-15);
    }

    #[test]
    fn phase_squares_to_identity_and_commutes_with_diagonals() {
        let (_, dirac, _) = build_truncation(2).unwrap();
        let ff = dirac.f.mul(&dirac.f);
        assert!(op_distance(&ff, &TruncatedOperator::identity(2, 2)) < 1e-15);
        assert!(op_distance(&dirac.f.adjoint(), &dirac.f) < 1e-15);
        // Weight-(0,0) γ-even diagonal operator commutes with F.
        let diag = TruncatedOperator::site_diagonal(2, 2, |m, nn, bi, bj| {
            if bi == bj {
                c((m * m + nn * nn) as f64, 0.0)
            } else {
                C_ZERO
            }
        });
        assert!(op_distance(&dirac.f.mul(&diag), &diag.mul(&dirac.f)) < 1e-15);
    }

    #[test]
    fn generators_commute_and_are_diagonal() {
        let (_, _, gens) = build_truncation(2).unwrap();
        assert!(commutator(&gens.h1, &gens.h2).pruned().entry_norm_inf() == 0.0);
        assert_eq!(gens.h1.entry(2, -1, 0, 2, -1, 0), c(0.0, 4.0 * PI));
        assert_eq!(gens.h2.entry(2, -1, 1, 2, -1, 1), c(0.0, -2.0 * PI));
    }

    #[test]
    fn represent_unit_and_shift() {
        let (hilb, _, _) = build_truncation(3).unwrap();
        let one = represent(&GradedElement::one(), &hilb);
        assert_eq!(op_distance(&one, &TruncatedOperator::identity(3, 2)), 0.0);
        let u = represent(&GradedElement::u(), &hilb);
        assert_eq!(u.entry(1, 0, 0, 0, 0, 0), c(1.0, 0.0));
        assert_eq!(u.entry(1, 0, 1, 0, 0, 1), c(1.0, 0.0));
        // Boundary drop: nothing maps out of the lattice.
        assert_eq!(u.entry(3, 2, 0, 3, 2, 0), c(0.0, 0.0));
        assert!(u.boundary_mask_fraction() > 0.0);
        // Interior norm is exactly 1.
        let norm = operator_norm(&u.mask_columns(2), 1e-12).unwrap();
        assert!((norm - 1.0).abs() < 1e-10);
        assert_eq!(u.homogeneous_weight(), Some(Weight::new(1, 0)));
    }

    #[test]
    fn represent_is_multiplicative_on_interior_window() {
        let (hilb, _, _) = build_truncation(8).unwrap();
        let a = random_element(5, 6, 2);
        let b = random_element(6, 6, 2);
        let window = 8 - a.cutoff() - b.cutoff();
        let lhs = represent(&a, &hilb)
            .mul(&represent(&b, &hilb))
            .mask_columns(window);
        let rhs = represent(&deformed_product(&a, &b, 0.0), &hilb).mask_columns(window);
        assert!(op_distance(&lhs, &rhs) < 1e-13);
    }

    #[test]
    fn deformation_is_involutive_with_star_and_composes() {
        let t = random_operator(3, 3, 2, 2);
        assert_eq!(deform_operator(&t, 0.0), t);
        let theta = 0.37;
        let lhs = deform_operator(&t, theta).adjoint();
        let rhs = deform_operator(&t.adjoint(), theta);
        assert!(op_distance(&lhs, &rhs) < 1e-14);
        // Homogeneous composition: T hom (1,0), S hom (0,1):
        // T^(θ)S^(θ) = e^{πiθ}(TS)^(θ).
        let (hilb, _, _) = build_truncation(3).unwrap();
        let tu = represent(&GradedElement::u(), &hilb);
        let sv = represent(&GradedElement::v(), &hilb);
        let lhs = deform_operator(&tu, theta).mul(&deform_operator(&sv, theta));
        let rhs = deform_operator(&tu.mul(&sv), theta)
            .scale(Complex64::from_polar(1.0, PI * theta));
        assert!(op_distance(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn deformation_represents_deformed_product() {
        // a^(θ)b^(θ) = (a∗_θb)^(θ) on the interior window.
        let (hilb, _, _) = build_truncation(8).unwrap();
        let theta = 0.41;
        let a = random_element(11, 5, 2);
        let b = random_element(12, 5, 2);
        let window = 8 - a.cutoff() - b.cutoff();
        let lhs = deform_operator(&represent(&a, &hilb), theta)
            .mul(&deform_operator(&represent(&b, &hilb), theta))
            .mask_columns(window);
        let rhs = deform_operator(&represent(&deformed_product(&a, &b, theta), &hilb), theta)
            .mask_columns(window);
        assert!(op_distance(&lhs, &rhs) < 1e-12);
    }

    #[test]
    fn deformation_commutes_with_rotation() {
        let t = random_operator(9, 3, 2, 2);
        let (theta, t1, t2) = (0.29, 0.41, 0.13);
        let lhs = deform_operator(&t.rotated(t1, t2), theta);
        let rhs = deform_operator(&t, theta).rotated(t1, t2);
        assert!(op_distance(&lhs, &rhs) < 1e-14);
    }

    #[test]
    fn adjoint_and_apply_match_dense() {
        let t = random_operator(17, 2, 2, 1);
        let dim = t.dim();
        let dense = t.to_dense();
        // Apply against dense multiply.
        let mut rng = Lcg(99);
        let x: Vec<Complex64> = (0..dim).map(|_| rng.next_c64()).collect();
        let y = t.apply(&x);
        for r in 0..dim {
            let mut want = c(0.0, 0.0);
            for col in 0..dim {
                want += dense[r * dim + col] * x[col];
            }
            assert!((y[r] - want).norm() < 1e-12);
        }
        // Adjoint matches conjugate transpose.
        let at = t.adjoint();
        let dense_at = at.to_dense();
        for r in 0..dim {
            for col in 0..dim {
                assert!((dense_at[r * dim + col] - dense[col * dim + r].conj()).norm() < 1e-15);
            }
        }
        // (AB)* = B*A*.
        let s = random_operator(18, 2, 2, 1);
        assert!(op_distance(&t.mul(&s).adjoint(), &s.adjoint().mul(&t.adjoint())) < 1e-13);
    }

    #[test]
    fn operator_norm_examples() {
        let id = TruncatedOperator::identity(2, 2);
        assert!((operator_norm(&id, 1e-12).unwrap() - 1.0).abs() < 1e-10);
        // Diagonal {3, −4i} block on a single site.
        let mut t = TruncatedOperator::new(0, 2);
        t.insert_band(0, 0, 0, 0, vec![c(3.0, 0.0)]);
        t.insert_band(0, 0, 1, 1, vec![c(0.0, -4.0)]);
        assert!((operator_norm(&t, 1e-12).unwrap() - 4.0).abs() < 1e-10);
        assert!(operator_norm(&t, 0.0).is_err());
    }

    #[test]
    fn operator_norm_matches_svd_oracle() {
        // 50-dimensional: N=2 lattice (25 sites) with 2 blocks.
        let t = random_operator(23, 2, 2, 2);
        assert_eq!(t.dim(), 50);
        let dense = t.to_dense();
        let mat = nalgebra::DMatrix::from_fn(50, 50, |r, cidx| dense[r * 50 + cidx]);
        let top = mat.singular_values()[0];
        let got = operator_norm(&t, 1e-12).unwrap();
        assert!(
            (got - top).abs() < 1e-8 * top,
            "power iteration {got} vs svd {top}"
        );
    }

    #[test]
    fn seminorm_values() {
        let (hilb, dirac, gens) = build_truncation(6).unwrap();
        let one = GradedElement::one();
        let nu = seminorm_nu(&one, 0, (0, 0), &hilb, &dirac, &gens).unwrap();
        assert!((nu - 1.0).abs() < 1e-9);
        let nu = seminorm_nu(&one, 1, (1, 0), &hilb, &dirac, &gens).unwrap();
        assert!(nu.abs() < 1e-12);
        // a = u, k = 0, α = (1,0): 2π(1 + ‖[D,u]‖) with ‖[D,u]‖ = 2π.
        let nu = seminorm_nu(&GradedElement::u(), 0, (1, 0), &hilb, &dirac, &gens).unwrap();
        let want = 2.0 * PI * (1.0 + 2.0 * PI);
        assert!((nu - want).abs() < 1e-7, "nu={nu} want={want}");
        // Window exhaustion names the required cutoff.
        let err = seminorm_nu(&GradedElement::u(), 3, (2, 0), &hilb, &dirac, &gens).unwrap_err();
        match err {
            SpectralError::WindowExhausted { required_n, .. } => assert_eq!(required_n, 7),
            other => panic!("unexpected error {other:?}"),
        }
    }

    #[test]
    fn seminorm_is_rotation_invariant() {
        let (hilb, dirac, gens) = build_truncation(7).unwrap();
        let a = random_element(31, 4, 2);
        let nu = seminorm_nu(&a, 1, (1, 1), &hilb, &dirac, &gens).unwrap();
        let nu_rot =
            seminorm_nu(&a.rotated(0.23, 0.71), 1, (1, 1), &hilb, &dirac, &gens).unwrap();
        assert!((nu - nu_rot).abs() < 1e-7 * nu.max(1.0));
    }

    #[test]
    fn decay_bound_gaussian() {
        let (hilb, _, _) = build_truncation(8).unwrap();
        let mut a = GradedElement::zero();
        for m in -4i32..=4 {
            for n in -4i32..=4 {
                let g = (-0.5 * ((m * m + n * n) as f64)).exp();
                a.add_term(Weight::new(m, n), c(g, 0.0));
            }
        }
        let t = represent(&a, &hilb);
        let report = verify_decay(&t, 4).unwrap();
        assert!(report.pass_quartic, "worst {}", report.worst_ratio_quartic);
        assert!(report.worst_ratio_quartic > 0.0);
        // Identity: bound vacuous.
        let id = TruncatedOperator::identity(8, 2);
        let report = verify_decay(&id, 4).unwrap();
        assert_eq!(report.component_norms.len(), 0);
        assert!(report.pass_quartic);
    }

    #[test]
    fn zeta_values_and_invariance() {
        let (hilb, dirac, _) = build_truncation(1).unwrap();
        let id = TruncatedOperator::identity(1, 2);
        let got = zeta_partial(&id, c(4.0, 0.0), &dirac);
        let two_pi = 2.0 * PI;
        let want = 8.0 * two_pi.powi(-4) + 8.0 * (two_pi * 2f64.sqrt()).powi(-4);
        assert!((got - c(want, 0.0)).norm() < 1e-15);
        // Homogeneous nonzero weight: zero.
        let u = represent(&GradedElement::u(), &hilb);
        assert_eq!(zeta_partial(&u, c(3.0, 0.0), &dirac), c(0.0, 0.0));
        // Bit-identical invariance under deformation.
        let (hilb6, dirac6, _) = build_truncation(6).unwrap();
        let a = random_element(77, 8, 3);
        let t = represent(&a, &hilb6);
        for s in [c(3.0, 0.0), c(4.0, 0.0), c(5.0, 2.0)] {
            let z0 = zeta_partial(&t, s, &dirac6);
            let z1 = zeta_partial(&deform_operator(&t, 0.7312), s, &dirac6);
            assert_eq!(z0, z1);
        }
    }

    #[test]
    fn amplification_tensors_identity() {
        let (_, dirac, _) = build_truncation(2).unwrap();
        let f4 = dirac.f.amplified(2);
        assert_eq!(f4.block_dim(), 4);
        // F⊗1 squares to identity too.
        assert!(op_distance(&f4.mul(&f4), &TruncatedOperator::identity(2, 4)) < 1e-15);
        assert_eq!(f4.entry(1, 0, 0, 1, 0, 2), dirac.f.entry(1, 0, 0, 1, 0, 1));
    }
}
