//! Second-order forward-mode automatic differentiation.
//!
//! A [`Jet2`] carries a value together with its first and second derivative
//! along one seeded direction. Arithmetic propagates both derivatives by the
//! chain rule, so any expression built from jets yields exact-to-rounding
//! `(f, f', f'')`.

use std::ops::{Add, Div, Mul, Neg, Sub};

use crate::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Default)]
pub struct Jet2<T> {
    pub v: T,
    pub d1: T,
    pub d2: T,
}

impl<T: Scalar> Jet2<T> {
    pub fn new(v: T, d1: T, d2: T) -> Self {
        Self { v, d1, d2 }
    }

    /// Independent variable at `x`: derivative one, curvature zero.
    pub fn var(x: T) -> Self {
        Self::new(x, T::one(), T::zero())
    }

    pub fn constant(x: T) -> Self {
        Self::new(x, T::zero(), T::zero())
    }

    pub fn is_constant(&self) -> bool {
        self.d1 == T::zero() && self.d2 == T::zero()
    }

    /// Apply an outer function whose value and two derivatives at `self.v`
    /// are `(f, df, d2f)`.
    pub fn compose(self, f: T, df: T, d2f: T) -> Self {
        Self::new(f, df * self.d1, d2f * self.d1 * self.d1 + df * self.d2)
    }

    pub fn scale(self, k: T) -> Self {
        Self::new(self.v * k, self.d1 * k, self.d2 * k)
    }

    pub fn square(self) -> Self {
        self * self
    }

    /// Square root; derivatives blow up at zero as they should.
    pub fn sqrt(self) -> Self {
        let r = self.v.sqrt();
        let two = T::lit(2.0);
        let df = T::one() / (two * r);
        let d2f = -df / (two * self.v);
        self.compose(r, df, d2f)
    }

    pub fn recip(self) -> Self {
        let r = T::one() / self.v;
        self.compose(r, -r * r, T::lit(2.0) * r * r * r)
    }

    pub fn exp(self) -> Self {
        let e = self.v.exp();
        self.compose(e, e, e)
    }

    pub fn ln(self) -> Self {
        let r = T::one() / self.v;
        self.compose(self.v.ln(), r, -r * r)
    }

    /// Integer power by repeated squaring, exact at a zero base.
    pub fn powi(self, n: i32) -> Self {
        if n < 0 {
            return self.powi(-n).recip();
        }
        let mut base = self;
        let mut acc = Self::constant(T::one());
        let mut k = n as u32;
        while k > 0 {
            if k & 1 == 1 {
                acc = acc * base;
            }
            base = base * base;
            k >>= 1;
        }
        acc
    }

    /// Constant real power.
    pub fn powf(self, p: T) -> Self {
        let one = T::one();
        let f = self.v.powf(p);
        let df = p * self.v.powf(p - one);
        let d2f = p * (p - one) * self.v.powf(p - one - one);
        self.compose(f, df, d2f)
    }
}

impl<T: Scalar> Add for Jet2<T> {
    type Output = Self;
    fn add(self, o: Self) -> Self {
        Self::new(self.v + o.v, self.d1 + o.d1, self.d2 + o.d2)
    }
}

impl<T: Scalar> Sub for Jet2<T> {
    type Output = Self;
    fn sub(self, o: Self) -> Self {
        Self::new(self.v - o.v, self.d1 - o.d1, self.d2 - o.d2)
    }
}

impl<T: Scalar> Mul for Jet2<T> {
    type Output = Self;
    fn mul(self, o: Self) -> Self {
        let two = T::lit(2.0);
        Self::new(
            self.v * o.v,
            self.d1 * o.v + self.v * o.d1,
            self.d2 * o.v + two * self.d1 * o.d1 + self.v * o.d2,
        )
    }
}

impl<T: Scalar> Div for Jet2<T> {
    type Output = Self;
    fn div(self, o: Self) -> Self {
        if o.is_constant() {
            let r = T::one() / o.v;
            return self.scale(r);
        }
        self * o.recip()
    }
}

impl<T: Scalar> Neg for Jet2<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self::new(-self.v, -self.d1, -self.d2)
    }
}

impl<T: Scalar> Add<T> for Jet2<T> {
    type Output = Self;
    fn add(self, k: T) -> Self {
        Self::new(self.v + k, self.d1, self.d2)
    }
}

impl<T: Scalar> Sub<T> for Jet2<T> {
    type Output = Self;
    fn sub(self, k: T) -> Self {
        Self::new(self.v - k, self.d1, self.d2)
    }
}

impl<T: Scalar> Mul<T> for Jet2<T> {
    type Output = Self;
    fn mul(self, k: T) -> Self {
        self.scale(k)
    }
}
