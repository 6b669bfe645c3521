//! Rotationally invariant potentials `V(s)`, `s = u²`.

use std::collections::BTreeMap;

use crate::expr::{parse_potential_expr, ExprAst};
use crate::jet::Jet2;
use crate::{Error, Result, Scalar};

#[derive(Clone, Debug, PartialEq)]
pub enum PotentialSpec {
    /// Heavy symmetric top: `V(s) = sqrt(1 - s)`.
    BuiltinLagrange,
    /// Body in ideal fluid: `V(s) = 1 + (c - 1)(1 - s)`.
    BuiltinKirchhoff { c: f64 },
    /// Ascending powers of `s`.
    PolynomialInS { coefficients: Vec<f64> },
    /// Parsed expression with its parameter bindings.
    Expression {
        source: String,
        params: BTreeMap<String, f64>,
    },
}

impl PotentialSpec {
    pub fn expression(source: impl Into<String>) -> Self {
        PotentialSpec::Expression {
            source: source.into(),
            params: BTreeMap::new(),
        }
    }

    pub fn describe(&self) -> String {
        match self {
            PotentialSpec::BuiltinLagrange => "lagrange".into(),
            PotentialSpec::BuiltinKirchhoff { c } => format!("kirchhoff(c = {c})"),
            PotentialSpec::PolynomialInS { coefficients } => {
                let cs: Vec<String> = coefficients.iter().map(|c| c.to_string()).collect();
                format!("polynomial[{}]", cs.join(", "))
            }
            PotentialSpec::Expression { source, params } => {
                if params.is_empty() {
                    format!("expr({source})")
                } else {
                    let ps: Vec<String> = params.iter().map(|(k, v)| format!("{k} = {v}")).collect();
                    format!("expr({source}; {})", ps.join(", "))
                }
            }
        }
    }
}

#[derive(Clone, Debug)]
enum Scheme<T> {
    Lagrange,
    Kirchhoff(T),
    Polynomial(Vec<T>),
    Expression(ExprAst),
}

/// A validated potential ready for evaluation on `s ∈ [0, 1)`.
#[derive(Clone, Debug)]
pub struct InvariantPotential<T> {
    spec: PotentialSpec,
    scheme: Scheme<T>,
}

/// Low-order Taylor data at the pole in the normal-form coordinate `v`,
/// where `V(τ(v)²) = f(v²)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NormalFormCoeffs<T> {
    /// f'(0)
    pub fp0: T,
    /// f''(0)
    pub fpp0: T,
    /// V'(0)
    pub vp0: T,
    /// V''(0)
    pub vpp0: T,
}

impl<T: Scalar> InvariantPotential<T> {
    pub fn new(spec: PotentialSpec) -> Result<Self> {
        let scheme = match &spec {
            PotentialSpec::BuiltinLagrange => Scheme::Lagrange,
            PotentialSpec::BuiltinKirchhoff { c } => {
                if !c.is_finite() {
                    return Err(Error::InvalidPotential(format!(
                        "kirchhoff constant must be finite, got {c}"
                    )));
                }
                Scheme::Kirchhoff(T::lit(*c))
            }
            PotentialSpec::PolynomialInS { coefficients } => {
                if coefficients.is_empty() {
                    return Err(Error::InvalidPotential(
                        "polynomial needs at least one coefficient".into(),
                    ));
                }
                if let Some(bad) = coefficients.iter().find(|c| !c.is_finite()) {
                    return Err(Error::InvalidPotential(format!(
                        "non-finite polynomial coefficient {bad}"
                    )));
                }
                Scheme::Polynomial(coefficients.iter().map(|&c| T::lit(c)).collect())
            }
            PotentialSpec::Expression { source, params } => {
                let names: Vec<&str> = params.keys().map(String::as_str).collect();
                let ast = parse_potential_expr(source, &names)?.bind(params)?;
                Scheme::Expression(ast)
            }
        };
        Ok(Self { spec, scheme })
    }

    pub fn lagrange() -> Self {
        Self::new(PotentialSpec::BuiltinLagrange).expect("builtin")
    }

    pub fn kirchhoff(c: f64) -> Result<Self> {
        Self::new(PotentialSpec::BuiltinKirchhoff { c })
    }

    pub fn polynomial(coefficients: &[f64]) -> Result<Self> {
        Self::new(PotentialSpec::PolynomialInS {
            coefficients: coefficients.to_vec(),
        })
    }

    pub fn expression(source: &str) -> Result<Self> {
        Self::new(PotentialSpec::expression(source))
    }

    pub fn spec(&self) -> &PotentialSpec {
        &self.spec
    }

    /// Evaluate `V` on a jet in `s`; the result carries derivatives with
    /// respect to whatever variable `s` was seeded in.
    pub fn eval_jet(&self, s: Jet2<T>) -> Result<Jet2<T>> {
        if !(s.v >= T::zero() && s.v < T::one()) {
            return Err(Error::Domain {
                what: "s",
                value: s.v.to_f64_lossy(),
                domain: "[0, 1)",
            });
        }
        match &self.scheme {
            Scheme::Lagrange => Ok((-s + T::one()).sqrt()),
            Scheme::Kirchhoff(c) => Ok((-s + T::one()) * (*c - T::one()) + T::one()),
            Scheme::Polynomial(coeffs) => {
                let mut acc = Jet2::constant(T::zero());
                for &c in coeffs.iter().rev() {
                    acc = acc * s + c;
                }
                Ok(acc)
            }
            Scheme::Expression(ast) => ast.eval(s),
        }
    }

    /// `(V(s), V'(s), V''(s))`.
    pub fn eval(&self, s: T) -> Result<(T, T, T)> {
        let j = self.eval_jet(Jet2::var(s))?;
        Ok((j.v, j.d1, j.d2))
    }

    pub fn normal_form_coeffs(&self) -> Result<NormalFormCoeffs<T>> {
        let (_, vp0, vpp0) = self.eval(T::zero())?;
        Ok(NormalFormCoeffs {
            fp0: T::lit(4.0) * vp0,
            fpp0: T::lit(8.0) * (vpp0 - vp0),
            vp0,
            vpp0,
        })
    }
}

/// Free-function form of [`InvariantPotential::eval`].
pub fn eval_potential<T: Scalar>(p: &InvariantPotential<T>, s: T) -> Result<(T, T, T)> {
    p.eval(s)
}

pub fn normal_form_coeffs<T: Scalar>(p: &InvariantPotential<T>) -> Result<NormalFormCoeffs<T>> {
    p.normal_form_coeffs()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    type P = InvariantPotential<f64>;

    #[test]
    fn lagrange_values() {
        let p = P::lagrange();
        assert_eq!(p.eval(0.0).unwrap(), (1.0, -0.5, -0.25));
        let (v, d, dd) = p.eval(0.36).unwrap();
        assert_relative_eq!(v, 0.8, epsilon = 1e-15);
        assert_relative_eq!(d, -0.625, epsilon = 1e-15);
        assert_relative_eq!(dd, -0.48828125, epsilon = 1e-15);
    }

    #[test]
    fn kirchhoff_values() {
        let p = P::kirchhoff(2.0).unwrap();
        assert_eq!(p.eval(0.5).unwrap(), (1.5, -1.0, 0.0));
        let flat = P::kirchhoff(1.0).unwrap();
        for s in [0.0, 0.25, 0.9] {
            assert_eq!(flat.eval(s).unwrap(), (1.0, 0.0, 0.0));
        }
        assert!(P::kirchhoff(f64::INFINITY).is_err());
        assert!(P::kirchhoff(f64::NAN).is_err());
    }

    #[test]
    fn normal_forms() {
        let nf = P::lagrange().normal_form_coeffs().unwrap();
        assert_eq!((nf.fp0, nf.fpp0), (-2.0, 2.0));
        let nf = P::kirchhoff(2.0).unwrap().normal_form_coeffs().unwrap();
        assert_eq!((nf.fp0, nf.fpp0), (-4.0, 8.0));
        let nf = P::polynomial(&[0.0, 1.0]).unwrap().normal_form_coeffs().unwrap();
        assert_eq!((nf.fp0, nf.fpp0), (4.0, -8.0));
        assert_eq!(nf.fp0, 4.0 * nf.vp0);
        assert_eq!(nf.fpp0, 8.0 * (nf.vpp0 - nf.vp0));
    }

    #[test]
    fn domain_is_half_open() {
        let p = P::lagrange();
        assert!(matches!(p.eval(-1e-12), Err(Error::Domain { .. })));
        assert!(matches!(p.eval(1.0), Err(Error::Domain { .. })));
        assert!(matches!(p.eval(f64::NAN), Err(Error::Domain { .. })));
        assert!(p.eval(0.999_999).is_ok());
    }

    #[test]
    fn empty_polynomial_rejected() {
        assert!(matches!(
            P::polynomial(&[]),
            Err(Error::InvalidPotential(_))
        ));
    }

    #[test]
    fn expression_matches_builtins() {
        let e = P::expression("sqrt(1-s)").unwrap();
        let l = P::lagrange();
        for s in [0.0, 0.1, 0.5, 0.95] {
            assert_eq!(e.eval(s).unwrap(), l.eval(s).unwrap());
        }
        let mut params = BTreeMap::new();
        params.insert("c".to_string(), 2.0);
        let k = P::new(PotentialSpec::Expression {
            source: "1+(c-1)*(1-s)".into(),
            params,
        })
        .unwrap();
        assert_eq!(k.eval(0.5).unwrap(), (1.5, -1.0, 0.0));
    }

    #[test]
    fn unbound_parameter_fails_at_construction() {
        assert!(matches!(
            P::expression("1 + c*s"),
            Err(Error::UnknownIdentifier { .. })
        ));
    }

    #[test]
    fn negative_sqrt_argument_is_an_evaluation_error() {
        let p = P::expression("sqrt(0.5 - s)").unwrap();
        assert!(p.eval(0.2).is_ok());
        assert!(matches!(p.eval(0.7), Err(Error::Evaluation(_))));
    }

    #[test]
    fn single_precision() {
        let p = InvariantPotential::<f32>::lagrange();
        let (v, d, dd) = p.eval(0.36).unwrap();
        assert!((v - 0.8).abs() < 1e-6);
        assert!((d + 0.625).abs() < 1e-6);
        assert!((dd + 0.488_281_25).abs() < 1e-5);
    }

    // Richardson-extrapolated central differences of the value channel.
    fn fd_derivs(p: &P, s: f64) -> (f64, f64) {
        let v = |x: f64| p.eval(x).unwrap().0;
        let d1 = |h: f64| (v(s + h) - v(s - h)) / (2.0 * h);
        let d2 = |h: f64| (v(s + h) - 2.0 * v(s) + v(s - h)) / (h * h);
        // The second difference loses too many digits at h = 1e-5.
        let (h1, h2) = (1e-5, 1e-3);
        let r1 = (4.0 * d1(h1 / 2.0) - d1(h1)) / 3.0;
        let r2 = (4.0 * d2(h2 / 2.0) - d2(h2)) / 3.0;
        (r1, r2)
    }

    fn close(a: f64, b: f64, rel: f64) -> bool {
        (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
    }

    proptest! {
        #![proptest_config(crate::prop_config())]

        #[test]
        fn lagrange_identity(s in 0.0f64..0.99) {
            let (v, _, _) = P::lagrange().eval(s).unwrap();
            prop_assert!((v * v + s - 1.0).abs() <= 1e-14);
        }

        #[test]
        fn derivatives_match_finite_differences(
            s in 0.01f64..0.9,
            c in -3.0f64..3.0,
            a1 in -2.0f64..2.0,
            a2 in -2.0f64..2.0,
        ) {
            let mut params = BTreeMap::new();
            params.insert("c".to_string(), c);
            let fixtures = [
                P::lagrange(),
                P::kirchhoff(c).unwrap(),
                P::polynomial(&[1.0, a1, a2, 0.5]).unwrap(),
                P::new(PotentialSpec::Expression {
                    source: "sqrt(1-s)*(1 + c*s^2) - s/(2 - s)".into(),
                    params,
                }).unwrap(),
            ];
            for p in &fixtures {
                let (_, d1, d2) = p.eval(s).unwrap();
                let (f1, f2) = fd_derivs(p, s);
                prop_assert!(close(d1, f1, 1e-6), "d1 {} vs {}", d1, f1);
                prop_assert!(close(d2, f2, 1e-6), "d2 {} vs {}", d2, f2);
            }
        }
    }
}
