//! Closed-form polynomial roots: complex monic cubics (Cardano with a
//! Newton polish) and real cubics/quadratics (trigonometric and hyperbolic
//! forms of the depressed cubic).

use std::f64::consts::PI;

use num_complex::Complex64;

/// Depressed-cubic invariants below `NOISE * scale^k` are treated as zero.
const NOISE: f64 = 64.0 * f64::EPSILON;

/// Depressed form t³ + p t + q of a monic cubic λ³ + aλ² + bλ + c, λ = t − a/3.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DepressedCubic {
    pub shift: Complex64,
    pub p: Complex64,
    pub q: Complex64,
    /// Magnitude scale of the roots, used for relative tolerances.
    pub scale: f64,
}

impl DepressedCubic {
    pub fn from_monic(a: Complex64, b: Complex64, c: Complex64) -> Self {
        let p = b - a * a / 3.0;
        let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + c;
        let scale = a.norm().max(b.norm().sqrt()).max(c.norm().cbrt()).max(f64::MIN_POSITIVE);
        DepressedCubic { shift: -a / 3.0, p, q, scale }
    }

    /// (q/2)² + (p/3)³; zero exactly when two roots coincide.
    pub fn discriminant(&self) -> Complex64 {
        let h = self.q / 2.0;
        let t = self.p / 3.0;
        h * h + t * t * t
    }

    fn is_triple(&self) -> bool {
        self.p.norm() <= NOISE * self.scale.powi(2) && self.q.norm() <= NOISE * self.scale.powi(3)
    }

    fn is_double(&self) -> bool {
        let h = (self.q / 2.0).norm_sqr();
        let t = (self.p / 3.0).norm().powi(3);
        self.discriminant().norm() <= NOISE * (h + t)
    }
}

fn eval_monic(a: Complex64, b: Complex64, c: Complex64, z: Complex64) -> (Complex64, Complex64) {
    let f = ((z + a) * z + b) * z + c;
    let df = (3.0 * z + 2.0 * a) * z + b;
    (f, df)
}

/// All three roots of λ³ + aλ² + bλ + c = 0.
///
/// Exactly coincident roots (within floating-point noise of the depressed
/// invariants) are returned as exact repeats.
pub fn complex_cubic_roots(a: Complex64, b: Complex64, c: Complex64) -> [Complex64; 3] {
    let dc = DepressedCubic::from_monic(a, b, c);
    if dc.is_triple() {
        return [dc.shift; 3];
    }
    if dc.p.norm() > 0.0 && dc.is_double() {
        let single = 3.0 * dc.q / dc.p;
        let double = -1.5 * dc.q / dc.p;
        return [single + dc.shift, double + dc.shift, double + dc.shift];
    }

    let half_q = dc.q / 2.0;
    let sqrt_disc = dc.discriminant().sqrt();
    let w1 = -half_q + sqrt_disc;
    let w2 = -half_q - sqrt_disc;
    let w = if w1.norm() >= w2.norm() { w1 } else { w2 };
    let cbrt = w.powf(1.0 / 3.0);
    let unity = Complex64::from_polar(1.0, 2.0 * PI / 3.0);

    let mut out = [Complex64::new(0.0, 0.0); 3];
    let mut k_root = cbrt;
    for slot in out.iter_mut() {
        let t = if k_root.norm() > 0.0 { k_root - dc.p / (3.0 * k_root) } else { Complex64::new(0.0, 0.0) };
        *slot = t + dc.shift;
        k_root *= unity;
    }
    for z in out.iter_mut() {
        let (f, df) = eval_monic(a, b, c, *z);
        if df.norm() > 0.0 {
            let candidate = *z - f / df;
            if eval_monic(a, b, c, candidate).0.norm() < f.norm() {
                *z = candidate;
            }
        }
    }
    out
}

/// Real roots of c2 x² + c1 x + c0 = 0 in ascending order.
pub fn real_quadratic_roots(c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c2 == 0.0 {
        if c1 == 0.0 {
            return Vec::new();
        }
        return vec![-c0 / c1];
    }
    let disc = c1 * c1 - 4.0 * c2 * c0;
    if disc < 0.0 {
        return Vec::new();
    }
    let s = disc.sqrt();
    // avoids cancellation between -c1 and s
    let sign = if c1 >= 0.0 { 1.0 } else { -1.0 };
    let qv = -0.5 * (c1 + sign * s);
    let mut roots = if qv == 0.0 {
        vec![0.0, 0.0]
    } else {
        vec![qv / c2, c0 / qv]
    };
    roots.sort_by(f64::total_cmp);
    roots
}

/// Real roots of c3 x³ + c2 x² + c1 x + c0 = 0 in ascending order
/// (degenerate leading coefficients fall back to lower degree). Repeated
/// roots appear once per multiplicity as computed.
pub fn real_cubic_roots(c3: f64, c2: f64, c1: f64, c0: f64) -> Vec<f64> {
    if c3 == 0.0 {
        return real_quadratic_roots(c2, c1, c0);
    }
    let (a, b, c) = (c2 / c3, c1 / c3, c0 / c3);
    let p = b - a * a / 3.0;
    let q = a * a * a * (2.0 / 27.0) - a * b / 3.0 + c;
    let shift = -a / 3.0;
    let scale = a.abs().max(b.abs().sqrt()).max(c.abs().cbrt()).max(f64::MIN_POSITIVE);

    let mut ts: Vec<f64> = if p.abs() <= NOISE * scale * scale && q.abs() <= NOISE * scale.powi(3) {
        vec![0.0]
    } else if p == 0.0 {
        vec![(-q).cbrt()]
    } else if p > 0.0 {
        let r = (p / 3.0).sqrt();
        let arg = 1.5 * q / (p * r);
        vec![-2.0 * r * (arg.asinh() / 3.0).sinh()]
    } else {
        let r = (-p / 3.0).sqrt();
        let disc = (q / 2.0).powi(2) + (p / 3.0).powi(3);
        if disc <= 0.0 {
            let arg = (1.5 * q / (p * r)).clamp(-1.0, 1.0);
            let theta = arg.acos() / 3.0;
            (0..3).map(|k| 2.0 * r * (theta - 2.0 * PI * k as f64 / 3.0).cos()).collect()
        } else {
            let arg = (-1.5 * q.abs() / (p * r)).max(1.0);
            vec![-2.0 * q.signum() * r * (arg.acosh() / 3.0).cosh()]
        }
    };

    for t in ts.iter_mut() {
        let mut x = *t + shift;
        for _ in 0..4 {
            let f = ((x + a) * x + b) * x + c;
            let df = (3.0 * x + 2.0 * a) * x + b;
            if df == 0.0 || f == 0.0 {
                break;
            }
            let next = x - f / df;
            let fn_ = ((next + a) * next + b) * next + c;
            if fn_.abs() < f.abs() {
                x = next;
            } else {
                break;
            }
        }
        *t = x;
    }
    ts.sort_by(f64::total_cmp);
    ts
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn monic_from_roots(r: [Complex64; 3]) -> (Complex64, Complex64, Complex64) {
        let a = -(r[0] + r[1] + r[2]);
        let b = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
        let cc = -(r[0] * r[1] * r[2]);
        (a, b, cc)
    }

    fn matched(found: [Complex64; 3], expected: [Complex64; 3], tol: f64) -> bool {
        let mut used = [false; 3];
        for e in expected {
            let best = (0..3)
                .filter(|&i| !used[i])
                .min_by(|&i, &j| (found[i] - e).norm().total_cmp(&(found[j] - e).norm()))
                .unwrap();
            if (found[best] - e).norm() > tol {
                return false;
            }
            used[best] = true;
        }
        true
    }

    #[test]
    fn triple_root_is_exact() {
        let r = c(0.0, -2.0_f64.sqrt());
        let (a, b, cc) = monic_from_roots([r; 3]);
        let roots = complex_cubic_roots(a, b, cc);
        for z in roots {
            assert!((z - r).norm() < 1e-14, "{z}");
        }
    }

    #[test]
    fn double_root_snaps() {
        let (a, b, cc) = monic_from_roots([c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.5)]);
        let roots = complex_cubic_roots(a, b, cc);
        assert!(matched(roots, [c(1.0, 0.0), c(1.0, 0.0), c(-2.0, 0.5)], 1e-12));
    }

    #[test]
    fn real_cubic_cases() {
        assert_eq!(real_cubic_roots(4.0, 0.0, 0.0, -4.0), vec![1.0]);
        let r = real_cubic_roots(1.0, -6.0, 11.0, -6.0);
        assert_eq!(r.len(), 3);
        for (x, e) in r.iter().zip([1.0, 2.0, 3.0]) {
            assert!((x - e).abs() < 1e-13);
        }
        assert_eq!(real_cubic_roots(0.0, 0.0, 2.0, -3.0), vec![1.5]);
        assert!(real_cubic_roots(0.0, 0.0, 0.0, -3.0).is_empty());
        // one real root with a dominant linear term: x ≈ I / c1
        let r = real_cubic_roots(4e-32, 0.0, 1.0, -5e5);
        assert_eq!(r.len(), 1);
        let x = r[0];
        assert!(((4e-32 * x * x * x + x - 5e5) / 5e5).abs() < 1e-14);
    }

    #[test]
    fn quadratic_roots() {
        let r = real_quadratic_roots(3.0, -6.0, 2.0);
        assert!((r[0] - (1.0 - 1.0 / 3f64.sqrt())).abs() < 1e-15);
        assert!((r[1] - (1.0 + 1.0 / 3f64.sqrt())).abs() < 1e-15);
        assert!(real_quadratic_roots(1.0, 0.0, 1.0).is_empty());
        let r = real_quadratic_roots(1.0, 1e8, 1.0);
        assert!((r[1] + 1e-8).abs() < 1e-22);
    }

    proptest! {
        #[test]
        fn complex_roots_have_small_residual(
            re in proptest::array::uniform3(-3.0f64..3.0),
            im in proptest::array::uniform3(-3.0f64..3.0),
        ) {
            let r = [c(re[0], im[0]), c(re[1], im[1]), c(re[2], im[2])];
            let (a, b, cc) = monic_from_roots(r);
            let roots = complex_cubic_roots(a, b, cc);
            let scale = 1.0 + a.norm() + b.norm() + cc.norm();
            for z in roots {
                let (f, _) = eval_monic(a, b, cc, z);
                prop_assert!(f.norm() <= 1e-12 * scale * (1.0 + z.norm()).powi(3));
            }
        }

        #[test]
        fn real_roots_recovered(mut r in proptest::array::uniform3(-50.0f64..50.0)) {
            r.sort_by(f64::total_cmp);
            prop_assume!(r[1] - r[0] > 1e-3 && r[2] - r[1] > 1e-3);
            let a = -(r[0] + r[1] + r[2]);
            let b = r[0] * r[1] + r[0] * r[2] + r[1] * r[2];
            let cc = -r[0] * r[1] * r[2];
            let found = real_cubic_roots(2.0, 2.0 * a, 2.0 * b, 2.0 * cc);
            prop_assert_eq!(found.len(), 3);
            for (x, e) in found.iter().zip(r) {
                prop_assert!((x - e).abs() <= 1e-8 * (1.0 + e.abs()));
            }
        }
    }
}
