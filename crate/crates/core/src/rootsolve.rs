//! Univariate reductions of the symbolic layer and numeric root finding.

use nalgebra::DMatrix;
use num_complex::Complex64;
use thiserror::Error;

use crate::instance::{sharp, QubitVector};
use crate::transfer::{MultiPoly, WPoly};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("polynomial is constant")]
    ConstantPolynomial,
    #[error("both components of the pair vanish identically")]
    BothZero,
    #[error("no eigenvalue of the companion matrix meets the residual contract")]
    NoConvergence,
}

/// Default tolerance of the residual contract in [`find_root`].
pub const ROOT_TOL: f64 = 1e-12;
/// Leading coefficients at or below this fraction of the one-norm are treated as zero.
pub const LEADING_CUTOFF: f64 = 1e-12;
/// Relative tolerance for deciding that two polynomials share a root.
pub const COMMON_ROOT_TOL: f64 = 1e-9;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);
const ONE: Complex64 = Complex64::new(1.0, 0.0);

/// `c₀ + c₁x + … + c_d x^d`.
#[derive(Debug, Clone, PartialEq)]
pub struct UniPoly {
    pub coeffs: Vec<Complex64>,
}

impl UniPoly {
    /// Drops negligible leading coefficients.
    pub fn new(mut coeffs: Vec<Complex64>) -> Self {
        let norm: f64 = coeffs.iter().map(|c| c.norm()).sum();
        while coeffs.last().is_some_and(|c| c.norm() <= LEADING_CUTOFF * norm) {
            coeffs.pop();
        }
        UniPoly { coeffs }
    }

    pub fn zero() -> Self {
        UniPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: Complex64) -> Self {
        UniPoly::new(vec![c])
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; the zero polynomial reports 0.
    pub fn degree(&self) -> usize {
        self.coeffs.len().saturating_sub(1)
    }

    pub fn one_norm(&self) -> f64 {
        self.coeffs.iter().map(|c| c.norm()).sum()
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.coeffs.iter().rev().fold(ZERO, |acc, &c| acc * x + c)
    }

    fn derivative(&self) -> UniPoly {
        UniPoly { coeffs: self.coeffs.iter().enumerate().skip(1).map(|(i, &c)| c * i as f64).collect() }
    }

    pub fn add(&self, other: &UniPoly) -> UniPoly {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &UniPoly, i: usize| p.coeffs.get(i).copied().unwrap_or(ZERO);
        UniPoly::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn scale(&self, s: Complex64) -> UniPoly {
        UniPoly::new(self.coeffs.iter().map(|&c| c * s).collect())
    }

    pub fn mul(&self, other: &UniPoly) -> UniPoly {
        if self.is_zero() || other.is_zero() {
            return UniPoly::zero();
        }
        let mut out = vec![ZERO; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        UniPoly::new(out)
    }

    /// Quotient by `(x − r)`, discarding the remainder.
    pub fn deflate(&self, r: Complex64) -> UniPoly {
        if self.coeffs.len() <= 1 {
            return UniPoly::zero();
        }
        let d = self.degree();
        let mut q = vec![ZERO; d];
        let mut carry = ZERO;
        for i in (1..=d).rev() {
            carry = self.coeffs[i] + carry * r;
            q[i - 1] = carry;
        }
        UniPoly::new(q)
    }

    /// Whether `|q(x)| ≤ tol · ‖q‖₁ · max(1, |x|)^deg`.
    pub fn accepts_root(&self, x: Complex64, tol: f64) -> bool {
        self.eval(x).norm() <= tol * self.one_norm() * x.norm().max(1.0).powi(self.degree() as i32)
    }
}

/// Restricts `h` to the affine line where foundation vector `coord` (1-based) moves as
/// `base[coord] + x·direction` and every other vector is fixed at `base`.
pub fn specialize_univariate(h: &MultiPoly, base: &[QubitVector], direction: &QubitVector, coord: usize) -> UniPoly {
    let c = coord - 1;
    let lines = [
        UniPoly { coeffs: vec![base[c].0[0], direction.0[0]] },
        UniPoly { coeffs: vec![base[c].0[1], direction.0[1]] },
    ];
    let mut powers: [Vec<UniPoly>; 2] = [vec![UniPoly::constant(ONE)], vec![UniPoly::constant(ONE)]];
    let mut out = vec![ZERO; 1];
    for (e, coeff) in &h.terms {
        let mut scalar = *coeff;
        for (var, &k) in e.iter().enumerate() {
            if var / 2 != c && k > 0 {
                scalar *= base[var / 2].0[var % 2].powu(k);
            }
        }
        let mut term = UniPoly::constant(scalar);
        for (slot, table) in powers.iter_mut().enumerate() {
            let k = e[2 * c + slot] as usize;
            while table.len() <= k {
                let next = table[table.len() - 1].mul(&lines[slot]);
                table.push(next);
            }
            term = term.mul(&table[k]);
        }
        if out.len() < term.coeffs.len() {
            out.resize(term.coeffs.len(), ZERO);
        }
        for (i, t) in term.coeffs.iter().enumerate() {
            out[i] += t;
        }
    }
    UniPoly::new(out)
}

/// Every root, from companion-matrix eigenvalues refined by Newton steps. Constant
/// polynomials have none.
pub fn all_roots(q: &UniPoly) -> Vec<Complex64> {
    let d = q.degree();
    if q.is_zero() || d == 0 {
        return Vec::new();
    }
    let lead = q.coeffs[d];
    if d == 1 {
        return vec![-q.coeffs[0] / lead];
    }
    let mut companion = DMatrix::<Complex64>::zeros(d, d);
    for i in 1..d {
        companion[(i, i - 1)] = ONE;
    }
    for i in 0..d {
        companion[(i, d - 1)] = -q.coeffs[i] / lead;
    }
    let eig: Vec<Complex64> = match companion.clone().try_schur(1e-15, 100_000) {
        Some(s) => s.unpack().1.diagonal().iter().copied().collect(),
        None => aberth(q),
    };
    let dq = q.derivative();
    eig.into_iter().map(|x| newton_polish(q, &dq, x)).collect()
}

fn newton_polish(q: &UniPoly, dq: &UniPoly, mut x: Complex64) -> Complex64 {
    let mut best = q.eval(x).norm();
    for _ in 0..8 {
        let d = dq.eval(x);
        if d.norm() == 0.0 {
            break;
        }
        let next = x - q.eval(x) / d;
        let val = q.eval(next).norm();
        if val.is_nan() || val >= best {
            break;
        }
        best = val;
        x = next;
    }
    x
}

/// Simultaneous Aberth iteration from points on a circle.
fn aberth(q: &UniPoly) -> Vec<Complex64> {
    let d = q.degree();
    let lead = q.coeffs[d].norm();
    let radius = 1.0 + q.coeffs[..d].iter().map(|c| c.norm() / lead).fold(0.0, f64::max);
    let mut z: Vec<Complex64> = (0..d)
        .map(|i| Complex64::from_polar(radius, 0.4 + std::f64::consts::TAU * i as f64 / d as f64))
        .collect();
    let dq = q.derivative();
    for _ in 0..500 {
        let mut moved = 0.0f64;
        for i in 0..d {
            let ratio = q.eval(z[i]) / dq.eval(z[i]);
            let repulsion: Complex64 = (0..d).filter(|&j| j != i).map(|j| ONE / (z[i] - z[j])).sum();
            let step = ratio / (ONE - ratio * repulsion);
            if step.is_finite() {
                z[i] -= step;
                moved = moved.max(step.norm() / z[i].norm().max(1.0));
            }
        }
        if moved < 1e-15 {
            break;
        }
    }
    z
}

/// Canonical order on roots: nonnegative imaginary part first, then nonnegative real
/// part, then smaller modulus. Imaginary parts within rounding of zero count as zero.
pub fn root_order_key(x: Complex64) -> (bool, bool, f64) {
    let im = if x.im.abs() <= 1e-12 * x.norm().max(1.0) { 0.0 } else { x.im };
    (im < 0.0, x.re < 0.0, x.norm())
}

/// Roots meeting the contract, in canonical order.
pub fn accepted_roots(q: &UniPoly, tol: f64) -> Vec<Complex64> {
    let mut roots: Vec<Complex64> = all_roots(q).into_iter().filter(|&x| q.accepts_root(x, tol)).collect();
    roots.sort_by(|a, b| root_order_key(*a).partial_cmp(&root_order_key(*b)).expect("finite roots"));
    roots
}

/// A root `x` with `|q(x)| ≤ tol · ‖q‖₁ · max(1, |x|)^deg`, the first in canonical order.
pub fn find_root(q: &UniPoly, tol: f64) -> Result<Complex64, RootError> {
    if q.degree() == 0 {
        return Err(RootError::ConstantPolynomial);
    }
    accepted_roots(q, tol).into_iter().next().ok_or(RootError::NoConvergence)
}

/// Independent pair `(w′, w″)` parametrizing the line `w′ + x·w″`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinePair {
    pub w1: QubitVector,
    pub w2: QubitVector,
}

impl Default for LinePair {
    fn default() -> Self {
        LinePair { w1: QubitVector::E0, w2: QubitVector::E1 }
    }
}

impl LinePair {
    pub fn det(&self) -> Complex64 {
        self.w1.0[0] * self.w2.0[1] - self.w1.0[1] * self.w2.0[0]
    }

    pub fn point(&self, x: Complex64) -> QubitVector {
        QubitVector([self.w1.0[0] + x * self.w2.0[0], self.w1.0[1] + x * self.w2.0[1]])
    }

    /// `p·w′ + q·w″`.
    pub fn combine(&self, p: Complex64, q: Complex64) -> QubitVector {
        QubitVector([p * self.w1.0[0] + q * self.w2.0[0], p * self.w1.0[1] + q * self.w2.0[1]])
    }
}

/// `γ(w′ + x·w″) = p(x)·w′ + q(x)·w″`.
#[derive(Debug, Clone, PartialEq)]
pub struct GammaPair {
    pub p: UniPoly,
    pub q: UniPoly,
}

impl GammaPair {
    pub fn eval(&self, line: &LinePair, x: Complex64) -> QubitVector {
        line.combine(self.p.eval(x), self.q.eval(x))
    }

    pub fn degree(&self) -> usize {
        self.p.degree().max(self.q.degree())
    }
}

fn shares_root(other: &UniPoly, x: Complex64) -> bool {
    other.is_zero() || other.accepts_root(x, COMMON_ROOT_TOL)
}

/// Divides out every common linear factor of `p` and `q`.
pub fn strip_common_zeros(g: GammaPair) -> Result<GammaPair, RootError> {
    let GammaPair { mut p, mut q } = g;
    if p.is_zero() && q.is_zero() {
        return Err(RootError::BothZero);
    }
    loop {
        // Roots of the lower-degree nonzero component are the only candidates.
        let (probe, other) = if p.is_zero() || (!q.is_zero() && q.degree() < p.degree()) { (&q, &p) } else { (&p, &q) };
        let Some(r) = all_roots(probe)
            .into_iter()
            .find(|&r| probe.accepts_root(r, COMMON_ROOT_TOL) && shares_root(other, r))
        else {
            break;
        };
        p = p.deflate(r);
        q = q.deflate(r);
    }
    Ok(GammaPair { p, q })
}

/// `γ_i(w) = g_i(v₁, …, v_{b−1}, w)` along `w′ + x·w″`, zero-stripped.
pub fn gamma(g_i: &WPoly, fixed: &[QubitVector], line: &LinePair) -> Result<GammaPair, RootError> {
    let b = fixed.len() + 1;
    let mut base = fixed.to_vec();
    base.push(line.w1);
    let a = specialize_univariate(&g_i.0, &base, &line.w2, b);
    let c = specialize_univariate(&g_i.1, &base, &line.w2, b);
    // Solve [w′ w″]·(p, q)ᵀ = (a, c)ᵀ.
    let det = line.det();
    let p = a.scale(line.w2.0[1] / det).add(&c.scale(-line.w2.0[0] / det));
    let q = c.scale(line.w1.0[0] / det).add(&a.scale(-line.w1.0[1] / det));
    strip_common_zeros(GammaPair { p, q })
}

/// `P_ij(x) = γ_i(w′+xw″)♯(γ_j(w′+xw″))` from already stripped pairs.
pub fn p_from_gammas(gi: &GammaPair, gj: &GammaPair, line: &LinePair) -> UniPoly {
    gi.p.mul(&gj.q).add(&gi.q.mul(&gj.p).scale(-ONE)).scale(line.det())
}

pub fn p_ij(g_i: &WPoly, g_j: &WPoly, fixed: &[QubitVector], line: &LinePair) -> Result<UniPoly, RootError> {
    Ok(p_from_gammas(&gamma(g_i, fixed, line)?, &gamma(g_j, fixed, line)?, line))
}

/// Kernel direction of the functional `f(u) = f[0]u₁ + f[1]u₂`, or `None` when `f = 0`.
pub fn functional_kernel(f: [Complex64; 2]) -> Option<QubitVector> {
    if f[0] == ZERO && f[1] == ZERO {
        return None;
    }
    // v♯ = f  ⇔  v = (f[1], −f[0]).
    let v = QubitVector([f[1], -f[0]]);
    debug_assert!(sharp(&v) == f);
    Some(v)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn poly(real: &[f64]) -> UniPoly {
        UniPoly::new(real.iter().map(|&r| c(r, 0.0)).collect())
    }

    #[test]
    fn x_squared_plus_one_gives_i() {
        let x = find_root(&poly(&[1.0, 0.0, 1.0]), ROOT_TOL).unwrap();
        assert!((x - c(0.0, 1.0)).norm() < 1e-12);
    }

    #[test]
    fn triple_root() {
        // (x − 2)³
        let q = poly(&[-8.0, 12.0, -6.0, 1.0]);
        let x = find_root(&q, ROOT_TOL).unwrap();
        assert!((x - c(2.0, 0.0)).norm() < 1e-4);
    }

    #[test]
    fn constant_rejected() {
        assert_eq!(find_root(&poly(&[3.0]), ROOT_TOL), Err(RootError::ConstantPolynomial));
        assert_eq!(find_root(&UniPoly::zero(), ROOT_TOL), Err(RootError::ConstantPolynomial));
    }

    #[test]
    fn degree_fifty_contract() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(50);
        let q = UniPoly::new((0..=50).map(|_| crate::instance::gaussian(&mut rng)).collect());
        let roots = accepted_roots(&q, ROOT_TOL);
        assert_eq!(roots.len(), 50);
        let x = find_root(&q, ROOT_TOL).unwrap();
        assert!(q.accepts_root(x, ROOT_TOL));
    }

    #[test]
    fn aberth_agrees_with_companion() {
        let q = poly(&[6.0, -5.0, 1.0]);
        let mut r = aberth(&q);
        r.sort_by(|a, b| a.re.partial_cmp(&b.re).unwrap());
        assert!((r[0] - c(2.0, 0.0)).norm() < 1e-10 && (r[1] - c(3.0, 0.0)).norm() < 1e-10);
    }

    #[test]
    fn strip_shared_factor() {
        let g = GammaPair { p: poly(&[0.0, -1.0, 1.0]), q: poly(&[-1.0, 1.0]) };
        let s = strip_common_zeros(g).unwrap();
        assert_eq!(s.q.degree(), 0);
        assert_eq!(s.p.degree(), 1);
        assert!((s.p.coeffs[0] / s.q.coeffs[0]).norm() < 1e-12);
        assert!((s.p.coeffs[1] / s.q.coeffs[0] - c(1.0, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn strip_keeps_coprime_pair() {
        let g = GammaPair { p: poly(&[1.0, 1.0]), q: poly(&[2.0, 0.0, 1.0]) };
        assert_eq!(strip_common_zeros(g.clone()).unwrap(), g);
        assert_eq!(
            strip_common_zeros(GammaPair { p: UniPoly::zero(), q: UniPoly::zero() }),
            Err(RootError::BothZero)
        );
    }

    #[test]
    fn specialize_product_of_coordinates() {
        // x₁·x₄ with v₁ = v₂ = (1,0), v₂ moving along (0,1): x₄ = x.
        let h = MultiPoly::variable(2, 0).mul(&MultiPoly::variable(2, 3));
        let base = [QubitVector::E0, QubitVector::E0];
        let u = specialize_univariate(&h, &base, &QubitVector::E1, 2);
        assert_eq!(u, poly(&[0.0, 1.0]));
    }

    #[test]
    fn gamma_of_free_coordinate_is_identity() {
        let g = WPoly::coordinate(2, 2);
        let fixed = [QubitVector::real(0.3, 0.4)];
        let gp = gamma(&g, &fixed, &LinePair::default()).unwrap();
        assert_eq!(gp.p, poly(&[1.0]));
        assert_eq!(gp.q, poly(&[0.0, 1.0]));
        let same = p_ij(&g, &g, &fixed, &LinePair::default()).unwrap();
        assert!(same.is_zero());
    }

    #[test]
    fn kernel_of_functional() {
        let f = [c(1.0, 2.0), c(-0.5, 0.0)];
        let v = functional_kernel(f).unwrap();
        assert_eq!(f[0] * v.0[0] + f[1] * v.0[1], c(0.0, 0.0));
        assert!(functional_kernel([c(0.0, 0.0); 2]).is_none());
    }
}
