//! Fixed-order Gauss-Legendre panels shared by the special-function
//! quadratures and the deterministic integration oracle.

/// Positive abscissae of the 16-point Gauss-Legendre rule on [-1, 1].
const GL16_NODES: [f64; 8] = [
    0.095_012_509_837_637_440_185,
    0.281_603_550_779_258_913_230,
    0.458_016_777_657_227_386_342,
    0.617_876_244_402_643_748_447,
    0.755_404_408_355_003_033_895,
    0.865_631_202_387_831_743_880,
    0.944_575_023_073_232_576_078,
    0.989_400_934_991_649_932_596,
];

/// Weights matching `GL16_NODES`.
const GL16_WEIGHTS: [f64; 8] = [
    0.189_450_610_455_068_496_285,
    0.182_603_415_044_923_588_867,
    0.169_156_519_395_002_538_189,
    0.149_595_988_816_576_732_081,
    0.124_628_971_255_533_872_052,
    0.095_158_511_682_492_784_810,
    0.062_253_523_938_647_892_863,
    0.027_152_459_411_754_094_852,
];

/// 16-point Gauss-Legendre estimate of ∫_a^b f.
pub fn gl16<F: FnMut(f64) -> f64>(a: f64, b: f64, mut f: F) -> f64 {
    let mid = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let mut acc = 0.0;
    for i in 0..8 {
        let dx = half * GL16_NODES[i];
        acc += GL16_WEIGHTS[i] * (f(mid + dx) + f(mid - dx));
    }
    acc * half
}

/// Composite rule: [a, b] split into `panels` equal panels, GL-16 on each.
pub fn gl16_panels<F: FnMut(f64) -> f64>(a: f64, b: f64, panels: usize, mut f: F) -> f64 {
    let n = panels.max(1);
    let width = (b - a) / n as f64;
    let mut acc = 0.0;
    for i in 0..n {
        let lo = a + i as f64 * width;
        acc += gl16(lo, lo + width, &mut f);
    }
    acc
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exact_for_polynomials() {
        // GL-16 is exact through degree 31.
        for k in 0..=31u32 {
            let exact = (2.0f64.powi(k as i32 + 1) - 1.0) / (k as f64 + 1.0);
            let got = gl16(1.0, 2.0, |x| x.powi(k as i32));
            assert!(
                (got - exact).abs() < 1e-13 * exact.abs(),
                "degree {k}: {got} vs {exact}"
            );
        }
    }

    #[test]
    fn weights_sum_to_two() {
        let total: f64 = GL16_WEIGHTS.iter().sum::<f64>() * 2.0;
        assert!((total - 2.0).abs() < 1e-15);
    }

    #[test]
    fn oscillatory_panel_accuracy() {
        // ∫_0^{10π} sin = 0, and ∫_0^{π} sin = 2.
        let zero = gl16_panels(0.0, 10.0 * std::f64::consts::PI, 20, f64::sin);
        assert!(zero.abs() < 1e-12);
        let two = gl16_panels(0.0, std::f64::consts::PI, 2, f64::sin);
        assert!((two - 2.0).abs() < 1e-13);
    }
}
