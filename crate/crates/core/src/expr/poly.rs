use num_complex::Complex64;

use super::Expr;

/// Dense univariate polynomial with complex coefficients, lowest degree first.
#[derive(Clone, Debug, PartialEq)]
pub struct Polynomial {
    coeffs: Vec<Complex64>,
}

impl Polynomial {
    pub fn new(mut coeffs: Vec<Complex64>) -> Polynomial {
        while coeffs.len() > 1 && coeffs.last() == Some(&Complex64::new(0.0, 0.0)) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            coeffs.push(Complex64::new(0.0, 0.0));
        }
        Polynomial { coeffs }
    }

    pub fn constant(c: Complex64) -> Polynomial {
        Polynomial::new(vec![c])
    }

    pub fn identity() -> Polynomial {
        Polynomial::new(vec![Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)])
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    /// Expands `e` when it is a polynomial in `z`: constants, `z`, `+ - *`,
    /// negation, non-negative integer powers and division by a constant.
    pub fn from_expr(e: &Expr) -> Option<Polynomial> {
        Some(match e {
            Expr::Const(c) => Polynomial::constant(*c),
            Expr::Var => Polynomial::identity(),
            Expr::Add(a, b) => Polynomial::from_expr(a)?.add(&Polynomial::from_expr(b)?),
            Expr::Sub(a, b) => Polynomial::from_expr(a)?.add(&Polynomial::from_expr(b)?.scale(Complex64::new(-1.0, 0.0))),
            Expr::Mul(a, b) => Polynomial::from_expr(a)?.mul(&Polynomial::from_expr(b)?),
            Expr::Div(a, b) => {
                let d = b.as_const().filter(|d| *d != Complex64::new(0.0, 0.0))?;
                Polynomial::from_expr(a)?.scale(d.inv())
            }
            Expr::Neg(a) => Polynomial::from_expr(a)?.scale(Complex64::new(-1.0, 0.0)),
            Expr::Pow(a, n) if *n >= 0 => {
                let base = Polynomial::from_expr(a)?;
                let mut acc = Polynomial::constant(Complex64::new(1.0, 0.0));
                for _ in 0..*n {
                    acc = acc.mul(&base);
                }
                acc
            }
            Expr::Pow(..) | Expr::Fun(..) => return None,
        })
    }

    pub fn add(&self, other: &Polynomial) -> Polynomial {
        let n = self.coeffs.len().max(other.coeffs.len());
        let get = |p: &Polynomial, i: usize| p.coeffs.get(i).copied().unwrap_or_default();
        Polynomial::new((0..n).map(|i| get(self, i) + get(other, i)).collect())
    }

    pub fn mul(&self, other: &Polynomial) -> Polynomial {
        let mut out = vec![Complex64::new(0.0, 0.0); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            for (k, b) in other.coeffs.iter().enumerate() {
                out[i + k] += a * b;
            }
        }
        Polynomial::new(out)
    }

    pub fn scale(&self, c: Complex64) -> Polynomial {
        Polynomial::new(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn derivative(&self) -> Polynomial {
        Polynomial::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, a)| a * k as f64)
                .collect(),
        )
    }

    /// Antiderivative vanishing at `z = 0`.
    pub fn antiderivative(&self) -> Polynomial {
        let mut out = vec![Complex64::new(0.0, 0.0)];
        out.extend(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(k, a)| a / (k as f64 + 1.0)),
        );
        Polynomial::new(out)
    }

    pub fn eval(&self, z: Complex64) -> Complex64 {
        self.coeffs
            .iter()
            .rev()
            .fold(Complex64::new(0.0, 0.0), |acc, a| acc * z + a)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse_expr;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn expands_products_and_powers() {
        let p = Polynomial::from_expr(&parse_expr("(z+1)^2 - j*z/2").unwrap()).unwrap();
        assert_eq!(p.coeffs(), &[c(1.0, 0.0), c(2.0, -0.5), c(1.0, 0.0)]);
        assert_eq!(p.degree(), 2);
    }

    #[test]
    fn rejects_non_polynomials() {
        for s in ["exp(z)", "1/z", "z^(-1)", "conj(z)"] {
            assert!(Polynomial::from_expr(&parse_expr(s).unwrap()).is_none(), "{s}");
        }
    }

    #[test]
    fn calculus_round_trip() {
        let p = Polynomial::from_expr(&parse_expr("3*z^3 - z + j").unwrap()).unwrap();
        assert_eq!(p.antiderivative().derivative(), p);
        assert_eq!(p.antiderivative().eval(c(0.0, 0.0)), c(0.0, 0.0));
        let z = c(0.5, -1.5);
        assert!((p.eval(z) - (3.0 * z * z * z - z + c(0.0, 1.0))).norm() < 1e-14);
    }
}
