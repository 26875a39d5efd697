/// Central first and second differences of `f` at `x` with step `h`.
/// Both are accurate to O(h²).
pub fn finite_diff_derivatives<F: Fn(f64) -> f64>(f: F, x: f64, h: f64) -> (f64, f64) {
    let fp = f(x + h);
    let f0 = f(x);
    let fm = f(x - h);
    ((fp - fm) / (2.0 * h), (fp - 2.0 * f0 + fm) / (h * h))
}
