//! Polynomials in the `2b` foundation coordinates: transfer functions `g_i`, qualifiers
//! `h_s` and their degree bookkeeping.

use std::collections::{BTreeMap, HashMap};

use num_complex::Complex64;
use serde::Serialize;

use crate::blowup::Blowup;
use crate::filtration::Step;
use crate::hypergraph::Hypergraph;
use crate::instance::{Constraint, QsatInstance, QubitVector};

/// Coefficients below this fraction of the largest one are dropped.
pub const PRUNE_RELATIVE: f64 = 1e-14;

/// Sparse polynomial over `2b` variables; variables `2j` and `2j + 1` (0-based) are the
/// two components of foundation vector `j + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct MultiPoly {
    pub b: usize,
    pub terms: BTreeMap<Vec<u32>, Complex64>,
}

/// Per-foundation-vector degrees.
pub type DegreeVector = Vec<u32>;

impl MultiPoly {
    pub fn zero(b: usize) -> Self {
        MultiPoly { b, terms: BTreeMap::new() }
    }

    pub fn constant(b: usize, c: Complex64) -> Self {
        let mut p = Self::zero(b);
        if c != Complex64::new(0.0, 0.0) {
            p.terms.insert(vec![0; 2 * b], c);
        }
        p
    }

    /// The coordinate `var` (0-based among the `2b`).
    pub fn variable(b: usize, var: usize) -> Self {
        let mut e = vec![0; 2 * b];
        e[var] = 1;
        MultiPoly { b, terms: BTreeMap::from([(e, Complex64::new(1.0, 0.0))]) }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn term_count(&self) -> usize {
        self.terms.len()
    }

    fn from_accumulator(b: usize, acc: HashMap<Vec<u32>, Complex64>) -> Self {
        let mut p = MultiPoly { b, terms: acc.into_iter().collect() };
        p.prune();
        p
    }

    pub fn prune(&mut self) {
        let max = self.terms.values().map(|c| c.norm()).fold(0.0, f64::max);
        let cut = max * PRUNE_RELATIVE;
        self.terms.retain(|_, c| c.norm() > cut);
    }

    pub fn add(&self, other: &MultiPoly) -> MultiPoly {
        self.combine(other, Complex64::new(1.0, 0.0))
    }

    pub fn sub(&self, other: &MultiPoly) -> MultiPoly {
        self.combine(other, Complex64::new(-1.0, 0.0))
    }

    fn combine(&self, other: &MultiPoly, sign: Complex64) -> MultiPoly {
        let mut acc: HashMap<Vec<u32>, Complex64> = self.terms.iter().map(|(e, c)| (e.clone(), *c)).collect();
        for (e, c) in &other.terms {
            *acc.entry(e.clone()).or_default() += sign * c;
        }
        Self::from_accumulator(self.b, acc)
    }

    pub fn scale(&self, s: Complex64) -> MultiPoly {
        if s == Complex64::new(0.0, 0.0) {
            return Self::zero(self.b);
        }
        MultiPoly { b: self.b, terms: self.terms.iter().map(|(e, c)| (e.clone(), c * s)).collect() }
    }

    pub fn mul(&self, other: &MultiPoly) -> MultiPoly {
        let mut acc: HashMap<Vec<u32>, Complex64> = HashMap::with_capacity(self.terms.len() * other.terms.len());
        for (ea, ca) in &self.terms {
            for (eb, cb) in &other.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(a, b)| a + b).collect();
                *acc.entry(e).or_default() += ca * cb;
            }
        }
        Self::from_accumulator(self.b, acc)
    }

    /// Value at the foundation vectors `v` (length `b`).
    pub fn eval(&self, v: &[QubitVector]) -> Complex64 {
        let coords: Vec<Complex64> = v.iter().flat_map(|q| q.0).collect();
        self.eval_coords(&coords)
    }

    pub fn eval_coords(&self, coords: &[Complex64]) -> Complex64 {
        let mut powers: Vec<Vec<Complex64>> = coords.iter().map(|&x| vec![Complex64::new(1.0, 0.0), x]).collect();
        let mut total = Complex64::new(0.0, 0.0);
        for (e, c) in &self.terms {
            let mut t = *c;
            for (var, &k) in e.iter().enumerate() {
                if k > 0 {
                    let table = &mut powers[var];
                    while table.len() <= k as usize {
                        let next = table[table.len() - 1] * coords[var];
                        table.push(next);
                    }
                    t *= table[k as usize];
                }
            }
            total += t;
        }
        total
    }

    /// `Σ |c| Π |x|^e`: the scale against which a value of this polynomial is small.
    pub fn eval_abs(&self, v: &[QubitVector]) -> f64 {
        let coords: Vec<f64> = v.iter().flat_map(|q| [q.0[0].norm(), q.0[1].norm()]).collect();
        self.terms
            .iter()
            .map(|(e, c)| e.iter().zip(&coords).fold(c.norm(), |acc, (&k, &x)| acc * x.powi(k as i32)))
            .sum()
    }

    /// `∂/∂x_var`.
    pub fn partial(&self, var: usize) -> MultiPoly {
        let mut terms = BTreeMap::new();
        for (e, c) in &self.terms {
            if e[var] > 0 {
                let mut d = e.clone();
                d[var] -= 1;
                terms.insert(d, c * e[var] as f64);
            }
        }
        MultiPoly { b: self.b, terms }
    }

    pub fn degree_vector(&self) -> DegreeVector {
        let mut d = vec![0; self.b];
        for e in self.terms.keys() {
            for (j, dj) in d.iter_mut().enumerate() {
                *dj = (*dj).max(e[2 * j] + e[2 * j + 1]);
            }
        }
        d
    }

    pub fn max_coeff(&self) -> f64 {
        self.terms.values().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Terms sorted by exponent vector, for debug dumps.
    pub fn debug_terms(&self) -> Vec<DebugTerm> {
        self.terms
            .iter()
            .map(|(e, c)| DebugTerm { exponents: e.clone(), coeff: [c.re, c.im] })
            .collect()
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct DebugTerm {
    pub exponents: Vec<u32>,
    pub coeff: [f64; 2],
}

/// `P₁·w₁ + P₂·w₂`.
#[derive(Debug, Clone, PartialEq)]
pub struct WPoly(pub MultiPoly, pub MultiPoly);

impl WPoly {
    /// Foundation vector `j` (1-based) as a polynomial.
    pub fn coordinate(b: usize, j: usize) -> Self {
        WPoly(MultiPoly::variable(b, 2 * (j - 1)), MultiPoly::variable(b, 2 * (j - 1) + 1))
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero() && self.1.is_zero()
    }

    pub fn eval(&self, foundation: &[QubitVector]) -> QubitVector {
        QubitVector([self.0.eval(foundation), self.1.eval(foundation)])
    }

    /// `‖g(v)‖` relative to the absolute-value evaluation of its components.
    pub fn relative_magnitude(&self, foundation: &[QubitVector]) -> f64 {
        let scale = self.0.eval_abs(foundation).hypot(self.1.eval_abs(foundation));
        if scale == 0.0 {
            0.0
        } else {
            self.eval(foundation).norm() / scale
        }
    }

    pub fn degree_vector(&self) -> DegreeVector {
        self.0.degree_vector().iter().zip(self.1.degree_vector()).map(|(a, b)| (*a).max(b)).collect()
    }

    pub fn term_count(&self) -> usize {
        self.0.term_count() + self.1.term_count()
    }

    /// `self♯(other) = a₁b₂ − a₂b₁`.
    pub fn sharp_apply(&self, other: &WPoly) -> MultiPoly {
        self.0.mul(&other.1).sub(&self.1.mul(&other.0))
    }
}

pub fn evaluate_wpoly(g: &WPoly, foundation: &[QubitVector]) -> QubitVector {
    g.eval(foundation)
}

/// Order-`N` Fibonacci numbers: `F_{N−1} = 1`, `F_r = 0` for `r ≤ N − 2`, and
/// `F_r = F_{r−1} + … + F_{r−N}` afterwards. Saturates at `u64::MAX`.
pub fn fibonacci_order(order: usize, r: usize) -> u64 {
    if order == 0 {
        return 0;
    }
    let mut f: Vec<u64> = Vec::with_capacity(r + 1);
    for i in 0..=r {
        let v = if i + 2 <= order {
            0
        } else if i + 1 == order {
            1
        } else {
            f[i - order..i].iter().fold(0u64, |a, &x| a.saturating_add(x))
        };
        f.push(v);
    }
    f[r]
}

/// Functional obtained by contracting every slot of `c` except `free` with the
/// polynomial vectors `slots`; returns its two coefficients `(c₀, c₁)` on the free slot.
fn contract_except(c: &Constraint, slots: &[Option<&WPoly>], free: usize, b: usize) -> (MultiPoly, MultiPoly) {
    let k = c.k;
    // Move the free slot last so the remaining tensor is indexed by it alone.
    let low = k - 1 - free;
    let mut tensor: Vec<MultiPoly> = (0..1usize << k)
        .map(|idx| {
            let (bit, rest) = (idx & 1, idx >> 1);
            let orig = (rest >> low) << (low + 1) | bit << low | (rest & ((1 << low) - 1));
            MultiPoly::constant(b, c.coeffs[orig])
        })
        .collect();
    for slot in (0..k).filter(|&s| s != free) {
        let g = slots[slot].expect("non-free slots are assigned");
        let half = tensor.len() / 2;
        let mut next = Vec::with_capacity(half);
        for lo in 0..half {
            next.push(tensor[lo].mul(&g.0).add(&tensor[half + lo].mul(&g.1)));
        }
        tensor = next;
    }
    let c1 = tensor.pop().expect("two entries remain");
    let c0 = tensor.pop().expect("two entries remain");
    (c0, c1)
}

/// Transfer functions over an arbitrary filtration whose steps each add a vertex.
/// Foundation vertex `foundation[j]` is coordinate `j + 1`; the result is indexed by
/// vertex id minus one. Vertices never reached stay `None`.
pub fn transfer_functions_on(
    h: &Hypergraph,
    constraints: &[Constraint],
    foundation: &[usize],
    steps: &[Step],
) -> Vec<Option<WPoly>> {
    let b = foundation.len();
    let mut g: Vec<Option<WPoly>> = vec![None; h.n];
    for (j, &v) in foundation.iter().enumerate() {
        g[v - 1] = Some(WPoly::coordinate(b, j + 1));
    }
    for s in steps {
        let Some(new) = s.adds else { continue };
        let edge = &h.edges[s.edge];
        let free = edge.iter().position(|&v| v == new).expect("added vertex lies in its edge");
        let slots: Vec<Option<&WPoly>> = edge
            .iter()
            .enumerate()
            .map(|(pos, &v)| if pos == free { None } else { g[v - 1].as_ref() })
            .collect();
        let (c0, c1) = contract_except(&constraints[s.edge], &slots, free, b);
        g[new - 1] = Some(WPoly(c1, c0.scale(Complex64::new(-1.0, 0.0))));
    }
    g
}

/// `g_1, …, g_{m+b}` on the decoupled hypergraph.
pub fn build_transfer_functions(blowup: &Blowup, instance: &QsatInstance) -> Vec<WPoly> {
    let constraints: Vec<Constraint> = blowup.edge_map.iter().map(|&e| instance.constraints[e].clone()).collect();
    let f = &blowup.filtration_tilde;
    transfer_functions_on(&blowup.gtilde, &constraints, &f.foundation, &f.steps)
        .into_iter()
        .map(|g| g.expect("decoupled filtrations reach every vertex"))
        .collect()
}

/// `h_s = g_{i_s}♯(g_{underline(i_s)})` for each duplicate pair.
pub fn build_qualifiers(blowup: &Blowup, g: &[WPoly]) -> Vec<MultiPoly> {
    blowup
        .duplicate_pairs
        .iter()
        .map(|&(i, u)| g[i - 1].sharp_apply(&g[u - 1]))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct DegreeViolation {
    pub index: usize,
    pub degrees: DegreeVector,
    pub bound: u64,
}

/// Transfer-function degree bound `d_ij ≤ F^{(b)}_i`, checked for the non-foundation
/// vertices `i > b`. Foundation coordinates have degree exactly one in their own vector.
pub fn transfer_degree_violations(g: &[WPoly], b: usize) -> Vec<DegreeViolation> {
    g.iter()
        .enumerate()
        .skip(b)
        .filter_map(|(idx, gi)| {
            let bound = fibonacci_order(b, idx + 1);
            let d = gi.degree_vector();
            d.iter().any(|&x| x as u64 > bound).then(|| DegreeViolation { index: idx + 1, degrees: d, bound })
        })
        .collect()
}

/// Qualifier degree bound `d_sr ≤ 2F^{(b)}_{ρ+b+1}`.
pub fn qualifier_degree_violations(h: &[MultiPoly], b: usize, radius: usize) -> Vec<DegreeViolation> {
    let bound = fibonacci_order(b, radius + b + 1).saturating_mul(2);
    h.iter()
        .enumerate()
        .filter_map(|(s, hs)| {
            let d = hs.degree_vector();
            d.iter().any(|&x| x as u64 > bound).then(|| DegreeViolation { index: s + 1, degrees: d, bound })
        })
        .collect()
}
