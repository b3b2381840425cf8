//! Integer linear forms and rational polynomials of degree at most two in the
//! summation indices.

use num_integer::Integer;
use num_rational::Rational64;
use num_traits::{One, Signed, Zero};

/// `coeffs . n + constant` with integer coefficients.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearForm {
    pub coeffs: Vec<i64>,
    pub constant: i64,
}

impl LinearForm {
    pub fn zero(dim: usize) -> Self {
        LinearForm { coeffs: vec![0; dim], constant: 0 }
    }

    pub fn constant(dim: usize, c: i64) -> Self {
        LinearForm { coeffs: vec![0; dim], constant: c }
    }

    /// The `i`-th index.
    pub fn index(dim: usize, i: usize) -> Self {
        let mut f = LinearForm::zero(dim);
        f.coeffs[i] = 1;
        f
    }

    /// Sum of the indices in `range`.
    pub fn index_sum(dim: usize, range: impl IntoIterator<Item = usize>) -> Self {
        let mut f = LinearForm::zero(dim);
        for i in range {
            f.coeffs[i] += 1;
        }
        f
    }

    pub fn eval(&self, p: &[i64]) -> i64 {
        self.coeffs.iter().zip(p).map(|(a, x)| a * x).sum::<i64>() + self.constant
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.iter().all(|&c| c == 0)
    }
}

/// A polynomial of total degree at most 2 with rational coefficients:
/// `Q(n) = n^T S n + b . n + c` with `S` symmetric. In the `½ nᵀAn + nᵀB + C`
/// convention, `A = 2S`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuadForm {
    sym: Vec<Vec<Rational64>>,
    lin: Vec<Rational64>,
    constant: Rational64,
}

fn r(x: i64) -> Rational64 {
    Rational64::from_integer(x)
}

impl QuadForm {
    pub fn zero(dim: usize) -> Self {
        QuadForm {
            sym: vec![vec![Rational64::zero(); dim]; dim],
            lin: vec![Rational64::zero(); dim],
            constant: Rational64::zero(),
        }
    }

    pub fn constant(dim: usize, c: Rational64) -> Self {
        let mut f = QuadForm::zero(dim);
        f.constant = c;
        f
    }

    /// From the `(A, B, C)` data of a Nahm-type exponent `½ nᵀAn + nᵀB + C`.
    pub fn from_abc(a: &[Vec<Rational64>], b: &[Rational64], c: Rational64) -> Self {
        let dim = b.len();
        assert!(a.len() == dim && a.iter().all(|row| row.len() == dim), "A must be square");
        for i in 0..dim {
            for j in 0..dim {
                assert_eq!(a[i][j], a[j][i], "A must be symmetric");
            }
        }
        let half = Rational64::new(1, 2);
        QuadForm {
            sym: a.iter().map(|row| row.iter().map(|x| x * half).collect()).collect(),
            lin: b.to_vec(),
            constant: c,
        }
    }

    pub fn from_linear(f: &LinearForm) -> Self {
        let mut q = QuadForm::zero(f.coeffs.len());
        q.lin = f.coeffs.iter().map(|&c| r(c)).collect();
        q.constant = r(f.constant);
        q
    }

    /// The `i`-th index as a polynomial.
    pub fn index(dim: usize, i: usize) -> Self {
        QuadForm::from_linear(&LinearForm::index(dim, i))
    }

    pub fn dim(&self) -> usize {
        self.lin.len()
    }

    /// `A = 2S`.
    pub fn a_matrix(&self) -> Vec<Vec<Rational64>> {
        self.sym.iter().map(|row| row.iter().map(|x| x * r(2)).collect()).collect()
    }

    pub fn linear_part(&self) -> &[Rational64] {
        &self.lin
    }

    pub fn constant_term(&self) -> Rational64 {
        self.constant
    }

    pub fn degree(&self) -> u32 {
        if self.sym.iter().flatten().any(|x| !x.is_zero()) {
            2
        } else if self.lin.iter().any(|x| !x.is_zero()) {
            1
        } else {
            0
        }
    }

    /// Constant value when the degree is 0.
    pub fn as_constant(&self) -> Option<Rational64> {
        (self.degree() == 0).then_some(self.constant)
    }

    /// Integer linear form when the polynomial is linear with integer coefficients.
    pub fn as_integer_linear(&self) -> Option<LinearForm> {
        if self.degree() == 2 || !self.constant.is_integer() || self.lin.iter().any(|x| !x.is_integer()) {
            return None;
        }
        Some(LinearForm {
            coeffs: self.lin.iter().map(|x| x.to_integer()).collect(),
            constant: self.constant.to_integer(),
        })
    }

    pub fn eval(&self, p: &[i64]) -> Rational64 {
        let mut acc = self.constant;
        for i in 0..self.dim() {
            if p[i] == 0 {
                continue;
            }
            acc += self.lin[i] * p[i];
            for j in 0..self.dim() {
                acc += self.sym[i][j] * (p[i] * p[j]);
            }
        }
        acc
    }

    pub fn add(&self, other: &QuadForm) -> QuadForm {
        let mut out = self.clone();
        for i in 0..self.dim() {
            out.lin[i] += other.lin[i];
            for j in 0..self.dim() {
                out.sym[i][j] += other.sym[i][j];
            }
        }
        out.constant += other.constant;
        out
    }

    pub fn scale(&self, k: Rational64) -> QuadForm {
        QuadForm {
            sym: self.sym.iter().map(|row| row.iter().map(|x| x * k).collect()).collect(),
            lin: self.lin.iter().map(|x| x * k).collect(),
            constant: self.constant * k,
        }
    }

    pub fn neg(&self) -> QuadForm {
        self.scale(r(-1))
    }

    /// Product, or `None` when the degree would exceed 2.
    pub fn mul(&self, other: &QuadForm) -> Option<QuadForm> {
        if self.degree() + other.degree() > 2 {
            return None;
        }
        if let Some(c) = self.as_constant() {
            return Some(other.scale(c));
        }
        if let Some(c) = other.as_constant() {
            return Some(self.scale(c));
        }
        // Both linear.
        let dim = self.dim();
        let mut out = QuadForm::zero(dim);
        let half = Rational64::new(1, 2);
        for i in 0..dim {
            for j in 0..dim {
                out.sym[i][j] = (self.lin[i] * other.lin[j] + other.lin[i] * self.lin[j]) * half;
            }
            out.lin[i] = self.lin[i] * other.constant + other.lin[i] * self.constant;
        }
        out.constant = self.constant * other.constant;
        Some(out)
    }

    /// `binom(self, k)` as a polynomial; `None` above degree 2.
    pub fn binom(&self, k: u32) -> Option<QuadForm> {
        let mut acc = QuadForm::constant(self.dim(), Rational64::one());
        for i in 0..k {
            let factor = self.add(&QuadForm::constant(self.dim(), r(-(i as i64))));
            acc = acc.mul(&factor)?.scale(Rational64::new(1, i as i64 + 1));
        }
        Some(acc)
    }

    pub fn pow(&self, k: u32) -> Option<QuadForm> {
        let mut acc = QuadForm::constant(self.dim(), Rational64::one());
        for _ in 0..k {
            acc = acc.mul(self)?;
        }
        Some(acc)
    }

    /// Smallest `d >= 1` with `d * Q` integer-valued on the integer lattice.
    ///
    /// In the basis `binom(n_i, 2)`, `n_i`, `n_i n_j`, `1` integer-valuedness is
    /// integrality of the coefficients.
    pub fn integrality_scale(&self) -> i64 {
        let mut d = 1i64;
        let mut take = |x: Rational64| d = d.lcm(x.denom());
        for i in 0..self.dim() {
            take(self.sym[i][i] * r(2));
            take(self.sym[i][i] + self.lin[i]);
            for j in (i + 1)..self.dim() {
                take(self.sym[i][j] * r(2));
            }
        }
        take(self.constant);
        d
    }

    /// Positive definiteness of the quadratic part restricted to the coordinates in `idx`.
    pub fn is_positive_definite_on(&self, idx: &[usize]) -> bool {
        let m: Vec<Vec<Rational64>> = idx.iter().map(|&i| idx.iter().map(|&j| self.sym[i][j]).collect()).collect();
        leading_minors_positive(m)
    }

    /// Positive definiteness of the quadratic part restricted to the subspace
    /// spanned by the (rational) column vectors in `basis`.
    pub fn is_positive_definite_on_span(&self, basis: &[Vec<Rational64>]) -> bool {
        let k = basis.len();
        let mut m = vec![vec![Rational64::zero(); k]; k];
        for a in 0..k {
            for b in 0..k {
                let mut acc = Rational64::zero();
                for i in 0..self.dim() {
                    for j in 0..self.dim() {
                        acc += basis[a][i] * self.sym[i][j] * basis[b][j];
                    }
                }
                m[a][b] = acc;
            }
        }
        leading_minors_positive(m)
    }

    /// Real minimizer of the polynomial, when the quadratic part is nonsingular.
    pub fn center(&self) -> Option<Vec<Rational64>> {
        // 2 S n = -b
        let dim = self.dim();
        let mut aug: Vec<Vec<Rational64>> = (0..dim)
            .map(|i| {
                let mut row: Vec<Rational64> = self.sym[i].iter().map(|x| x * r(2)).collect();
                row.push(-self.lin[i]);
                row
            })
            .collect();
        for col in 0..dim {
            let pivot = (col..dim).find(|&i| !aug[i][col].is_zero())?;
            aug.swap(col, pivot);
            let p = aug[col][col];
            for x in aug[col].iter_mut() {
                *x /= p;
            }
            for i in 0..dim {
                if i != col && !aug[i][col].is_zero() {
                    let f = aug[i][col];
                    for j in 0..=dim {
                        let v = aug[col][j];
                        aug[i][j] -= f * v;
                    }
                }
            }
        }
        Some(aug.into_iter().map(|row| row[dim]).collect())
    }

    /// Substitute `n -> q * n` in the value: every coefficient times `k`.
    pub fn rescaled(&self, k: i64) -> QuadForm {
        self.scale(r(k))
    }
}

/// Sylvester's criterion by fraction-exact elimination.
fn leading_minors_positive(mut m: Vec<Vec<Rational64>>) -> bool {
    let n = m.len();
    for k in 0..n {
        // After eliminating the first k columns, m[k][k] is the ratio of the
        // (k+1)-th to the k-th leading principal minor.
        if !m[k][k].is_positive() {
            return false;
        }
        for i in (k + 1)..n {
            let f = m[i][k] / m[k][k];
            for j in k..n {
                let v = m[k][j];
                m[i][j] -= f * v;
            }
        }
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    fn main_form() -> QuadForm {
        // i^2 - i j + j^2
        let i = QuadForm::index(2, 0);
        let j = QuadForm::index(2, 1);
        i.pow(2).unwrap().add(&i.mul(&j).unwrap().neg()).add(&j.pow(2).unwrap())
    }

    #[test]
    fn evaluates_and_reports_matrix() {
        let q = main_form();
        assert_eq!(q.eval(&[2, 1]), r(3));
        assert_eq!(q.a_matrix(), vec![vec![r(2), r(-1)], vec![r(-1), r(2)]]);
        assert!(q.is_positive_definite_on(&[0, 1]));
    }

    #[test]
    fn binomial_exponent_identity_as_polynomials() {
        let i = QuadForm::index(2, 0);
        let j = QuadForm::index(2, 1);
        let one = QuadForm::constant(2, r(1));
        let rhs = i.binom(2).unwrap().add(&j.add(&one).binom(2).unwrap()).add(&j.add(&i.neg()).binom(2).unwrap());
        assert_eq!(rhs, main_form());
    }

    #[test]
    fn degree_overflow_is_detected() {
        let i = QuadForm::index(1, 0);
        assert!(i.pow(3).is_none());
        assert!(i.pow(2).unwrap().binom(2).is_none());
    }

    #[test]
    fn integrality() {
        let i = QuadForm::index(1, 0);
        assert_eq!(i.binom(2).unwrap().integrality_scale(), 1);
        // n^2/2 needs q -> q^2
        assert_eq!(i.pow(2).unwrap().scale(Rational64::new(1, 2)).integrality_scale(), 2);
        assert_eq!(QuadForm::constant(1, Rational64::new(-1, 40)).integrality_scale(), 40);
    }

    #[test]
    fn indefinite_detected() {
        let i = QuadForm::index(2, 0);
        let j = QuadForm::index(2, 1);
        assert!(!i.mul(&j).unwrap().is_positive_definite_on(&[0, 1]));
        assert!(!QuadForm::zero(1).is_positive_definite_on(&[0]));
    }

    #[test]
    fn center_of_shifted_square() {
        // (k - 3)(k - 5) has its minimum at 4
        let k = QuadForm::index(1, 0);
        let f = k.add(&QuadForm::constant(1, r(-3))).mul(&k.add(&QuadForm::constant(1, r(-5)))).unwrap();
        assert_eq!(f.center(), Some(vec![r(4)]));
        assert_eq!(QuadForm::index(1, 0).center(), None);
    }
}
