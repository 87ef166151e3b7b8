//! Centralized numerical tolerances.
//!
//! The rational-function layer reads its thresholds through [`current`]. A
//! scoped override ([`with_tolerances`]) lets callers rerun a computation
//! with scaled tolerances without threading a config through every call.

use std::cell::Cell;

use crate::scalar::{lit, Real};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    /// Relative size below which trailing polynomial coefficients are dropped.
    pub trim: f64,
    /// Relative numerator residual at a pole below which the factor cancels.
    pub gcd: f64,
    /// Relative residual accepted for a polished root.
    pub root: f64,
    /// Roots closer than this are merged into one root of higher multiplicity.
    pub cluster: f64,
    /// Evaluation closer than this to a pole is refused.
    pub pole: f64,
    /// Agreement expected of algebraic identities between rational functions.
    pub alg: f64,
    /// Poles closer than this to the real axis count as real.
    pub real: f64,
}

impl Tolerances {
    pub const DOUBLE: Tolerances = Tolerances {
        trim: 1e-12,
        gcd: 1e-10,
        root: 1e-10,
        cluster: 1e-7,
        pole: 1e-9,
        alg: 1e-10,
        real: 1e-9,
    };

    pub const SINGLE: Tolerances = Tolerances {
        trim: 1e-6,
        gcd: 1e-4,
        root: 1e-4,
        cluster: 1e-3,
        pole: 1e-4,
        alg: 1e-4,
        real: 1e-4,
    };

    /// Every tolerance multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Tolerances {
            trim: self.trim * factor,
            gcd: self.gcd * factor,
            root: self.root * factor,
            cluster: self.cluster * factor,
            pole: self.pole * factor,
            alg: self.alg * factor,
            real: self.real * factor,
        }
    }
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances::DOUBLE
    }
}

thread_local! {
    static OVERRIDE: Cell<Option<Tolerances>> = const { Cell::new(None) };
}

/// Tolerances in effect for scalar type `T` on this thread.
pub fn current<T: Real>() -> Tolerances {
    OVERRIDE.with(|o| o.get()).unwrap_or_else(T::default_tolerances)
}

/// Runs `f` with `tol` installed as the tolerances for the current thread.
pub fn with_tolerances<R>(tol: Tolerances, f: impl FnOnce() -> R) -> R {
    struct Restore(Option<Tolerances>);
    impl Drop for Restore {
        fn drop(&mut self) {
            OVERRIDE.with(|o| o.set(self.0));
        }
    }
    let _restore = Restore(OVERRIDE.with(|o| o.replace(Some(tol))));
    f()
}

pub(crate) struct Tol<T> {
    pub trim: T,
    pub gcd: T,
    pub root: T,
    pub cluster: T,
    pub pole: T,
    pub real: T,
}

pub(crate) fn tol<T: Real>() -> Tol<T> {
    let t = current::<T>();
    Tol {
        trim: lit(t.trim),
        gcd: lit(t.gcd),
        root: lit(t.root),
        cluster: lit(t.cluster),
        pole: lit(t.pole),
        real: lit(t.real),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn override_is_scoped() {
        assert_eq!(current::<f64>(), Tolerances::DOUBLE);
        let inner = with_tolerances(Tolerances::DOUBLE.scaled(10.0), current::<f64>);
        assert!((inner.gcd - 1e-9).abs() < 1e-24);
        assert_eq!(current::<f64>(), Tolerances::DOUBLE);
        assert_eq!(current::<f32>(), Tolerances::SINGLE);
    }
}
