use num_complex::Complex64;

/// `exp(z) - 1` without cancellation for small `|z|`.
pub fn expm1_complex(z: Complex64) -> Complex64 {
    if z.norm() > 0.5 {
        return z.exp() - 1.0;
    }
    // exp(x + iy) - 1 = expm1(x) cos y + (cos y - 1) + i e^x sin y,
    // with cos y - 1 = -2 sin^2(y/2).
    let (x, y) = (z.re, z.im);
    let s = (0.5 * y).sin();
    let cosm1 = -2.0 * s * s;
    Complex64::new(x.exp_m1() * y.cos() + cosm1, x.exp() * y.sin())
}

/// `(exp(d t) - 1) / d`, continuous through `d = 0` where it equals `t`.
pub fn phi_expm1(d: Complex64, t: f64) -> Complex64 {
    let z = d * t;
    if z.norm() < 1e-5 {
        // Taylor tail: t (1 + z/2 + z^2/6 + z^3/24)
        return t * (1.0 + z * (0.5 + z * (1.0 / 6.0 + z / 24.0)));
    }
    expm1_complex(z) / d
}
