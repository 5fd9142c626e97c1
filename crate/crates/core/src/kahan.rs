//! Compensated (Kahan-Babuska-Neumaier) summation.
//!
//! Every accumulation with a quoted tolerance runs through these types in a
//! fixed order, so results are bit-identical across platforms and thread
//! counts.

use num_complex::Complex64;

/// Running compensated sum of `f64` terms.
#[derive(Clone, Copy, Debug, Default)]
pub struct Kahan {
    sum: f64,
    comp: f64,
}

impl Kahan {
    pub fn new() -> Self {
        Self::default()
    }

    /// Adds one term, tracking the rounding error of the addition.
    #[inline]
    pub fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.comp += (self.sum - t) + x;
        } else {
            self.comp += (x - t) + self.sum;
        }
        self.sum = t;
    }

    /// Current compensated value.
    #[inline]
    pub fn value(&self) -> f64 {
        self.sum + self.comp
    }

    /// Folds another accumulator into this one (fixed-order reductions).
    pub fn merge(&mut self, other: Kahan) {
        self.add(other.sum);
        self.add(other.comp);
    }
}

/// Compensated sum of complex terms (independent real/imaginary tracks).
#[derive(Clone, Copy, Debug, Default)]
pub struct KahanComplex {
    re: Kahan,
    im: Kahan,
}

impl KahanComplex {
    pub fn new() -> Self {
        Self::default()
    }

    #[inline]
    pub fn add(&mut self, z: Complex64) {
        self.re.add(z.re);
        self.im.add(z.im);
    }

    #[inline]
    pub fn value(&self) -> Complex64 {
        Complex64::new(self.re.value(), self.im.value())
    }

    pub fn merge(&mut self, other: KahanComplex) {
        self.re.merge(other.re);
        self.im.merge(other.im);
    }
}

/// Compensated sum of an iterator in its iteration order.
pub fn kahan_sum<I: IntoIterator<Item = f64>>(xs: I) -> f64 {
    let mut acc = Kahan::new();
    for x in xs {
        acc.add(x);
    }
    acc.value()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn recovers_small_term_next_to_large() {
        assert_eq!(kahan_sum([1e16, 1.0, -1e16]), 1.0);
    }

    #[test]
    fn tenth_times_ten() {
        let s = kahan_sum(std::iter::repeat(0.1).take(10));
        assert!((s - 1.0).abs() < 1e-15, "sum = {s}");
    }

    #[test]
    fn merge_matches_sequential() {
        let xs: Vec<f64> = (0..1000).map(|i| ((i * 2654435761u64 as usize) % 997) as f64 * 0.37 - 180.0).collect();
        let mut a = Kahan::new();
        for &x in &xs[..500] {
            a.add(x);
        }
        let mut b = Kahan::new();
        for &x in &xs[500..] {
            b.add(x);
        }
        let mut whole = Kahan::new();
        for &x in &xs {
            whole.add(x);
        }
        a.merge(b);
        assert!((a.value() - whole.value()).abs() <= 1e-12 * whole.value().abs().max(1.0));
    }

    proptest! {
        // Scaled integers are exactly representable, so the true sum is known
        // exactly; the compensated sum must hit it to the last bit after the
        // final rounding.
        #[test]
        fn matches_exact_integer_sum(vals in proptest::collection::vec(-1_000_000i64..1_000_000, 1..200)) {
            let scale = 2f64.powi(-20);
            let exact: i64 = vals.iter().sum();
            let s = kahan_sum(vals.iter().map(|&v| v as f64 * scale));
            prop_assert_eq!(s, exact as f64 * scale);
        }

        #[test]
        fn complex_tracks_components(vals in proptest::collection::vec((-1000i32..1000, -1000i32..1000), 1..100)) {
            let mut acc = KahanComplex::new();
            let mut re = Kahan::new();
            let mut im = Kahan::new();
            for &(a, b) in &vals {
                let z = Complex64::new(a as f64 * 0.125, b as f64 * 0.125);
                acc.add(z);
                re.add(z.re);
                im.add(z.im);
            }
            prop_assert_eq!(acc.value(), Complex64::new(re.value(), im.value()));
        }
    }
}
