//! Composite Simpson rule with panel doubling.

use crate::scalar::Real;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature<T> {
    pub value: T,
    pub panels: usize,
    /// Difference between the last two doublings.
    pub error_estimate: T,
    pub converged: bool,
}

/// Composite Simpson with `panels` (even) subintervals.
pub fn simpson<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T, panels: usize) -> T {
    let n = panels + panels % 2;
    let h = (b - a) / T::from_usize_lossy(n);
    let mut odd = T::zero();
    let mut even = T::zero();
    for i in 1..n {
        let x = a + T::from_usize_lossy(i) * h;
        if i % 2 == 1 {
            odd += f(x);
        } else {
            even += f(x);
        }
    }
    (f(a) + f(b) + T::lit(4.0) * odd + T::lit(2.0) * even) * h / T::lit(3.0)
}

/// Doubles the panel count from `initial` until successive estimates agree to
/// `tol` (absolute) or `max_panels` is reached.
pub fn simpson_adaptive<T: Real, F: Fn(T) -> T>(
    f: F,
    a: T,
    b: T,
    initial: usize,
    tol: T,
    max_panels: usize,
) -> Quadrature<T> {
    let mut panels = initial.max(2);
    let mut prev = simpson(&f, a, b, panels);
    loop {
        let next_panels = panels * 2;
        let next = simpson(&f, a, b, next_panels);
        let err = (next - prev).abs();
        if err <= tol || next_panels >= max_panels {
            return Quadrature {
                value: next,
                panels: next_panels,
                error_estimate: err,
                converged: err <= tol,
            };
        }
        panels = next_panels;
        prev = next;
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_cubics() {
        let v = simpson(|x: f64| x * x * x - 2.0 * x + 1.0, 0.0, 2.0, 2);
        assert!((v - 2.0).abs() < 1e-14);
    }

    #[test]
    fn doubling_converges() {
        let q = simpson_adaptive(|x: f64| x.exp(), 0.0, 1.0, 4, 1e-12, 1 << 20);
        assert!(q.converged);
        assert!((q.value - (1f64.exp() - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn reports_failure() {
        let q = simpson_adaptive(|x: f64| (1e4 * x).sin(), 0.0, 1.0, 2, 1e-14, 64);
        assert!(!q.converged);
    }
}
