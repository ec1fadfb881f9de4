use num_complex::Complex64;

/// Laurent coefficients of `℘(z) = z⁻² + Σ_{k≥2} c_k z^{2k−2}`.
///
/// Index `k` holds `c_k`; entries 0 and 1 are zero. Built from
/// `c₂ = g₂/20`, `c₃ = g₃/28` and
/// `c_k = 3/((2k+1)(k−3)) · Σ_{m=2}^{k−2} c_m c_{k−m}` for `k ≥ 4`.
pub fn laurent_coefficients(g2: Complex64, g3: Complex64, kmax: usize) -> Vec<Complex64> {
    let mut c = vec![Complex64::new(0.0, 0.0); kmax.max(3) + 1];
    c[2] = g2 / 20.0;
    c[3] = g3 / 28.0;
    for k in 4..=kmax {
        let mut s = Complex64::new(0.0, 0.0);
        for m in 2..=k - 2 {
            s += c[m] * c[k - m];
        }
        c[k] = s * (3.0 / ((2 * k + 1) as f64 * (k - 3) as f64));
    }
    c.truncate(kmax + 1);
    c
}

/// Taylor coefficients `b_N` of `σ(z) = Σ_N b_N z^{2N+1}`.
///
/// Collapses the two-index expansion
/// `σ(z) = Σ a_{m,n} (g₂/2)^m (2g₃)^n z^{4m+6n+1} / (4m+6n+1)!` with
/// `a₀₀ = 1` and
/// `a_{m,n} = 3(m+1) a_{m+1,n−1} + 16/3 (n+1) a_{m−2,n+1}
///            − 1/3 (2m+3n−1)(4m+6n−1) a_{m−1,n}`.
/// The recurrence is run on `a_{m,n}/(4m+6n+1)!` so nothing overflows.
pub fn sigma_coefficients(g2: Complex64, g3: Complex64, nmax: usize) -> Vec<Complex64> {
    let mdim = nmax / 2 + 3;
    let ndim = nmax / 3 + 3;
    // scaled[m][n] = a_{m,n} / (2N+1)!, N = 2m + 3n
    let mut scaled = vec![vec![0.0f64; ndim]; mdim];
    let get = |t: &Vec<Vec<f64>>, m: i64, n: i64| -> f64 {
        if m < 0 || n < 0 || m as usize >= mdim || n as usize >= ndim {
            0.0
        } else {
            t[m as usize][n as usize]
        }
    };
    scaled[0][0] = 1.0;
    let half_g2 = g2 / 2.0;
    let twice_g3 = g3 * 2.0;
    let mut b = vec![Complex64::new(0.0, 0.0); nmax + 1];
    b[0] = Complex64::new(1.0, 0.0);
    for big_n in 1..=nmax {
        let nf = big_n as f64;
        let r1 = (2.0 * nf + 1.0) * (2.0 * nf);
        let r2 = r1 * (2.0 * nf - 1.0) * (2.0 * nf - 2.0);
        let mut acc = Complex64::new(0.0, 0.0);
        for m in 0..=big_n / 2 {
            let rest = big_n - 2 * m;
            if rest % 3 != 0 {
                continue;
            }
            let n = rest / 3;
            let (mi, ni) = (m as i64, n as i64);
            let mut v = 3.0 * (mi + 1) as f64 * get(&scaled, mi + 1, ni - 1) / r1
                + 16.0 / 3.0 * (ni + 1) as f64 * get(&scaled, mi - 2, ni + 1) / r1;
            if r2 != 0.0 {
                let w = (2 * mi + 3 * ni - 1) as f64 * (4 * mi + 6 * ni - 1) as f64 / 3.0;
                v -= w * get(&scaled, mi - 1, ni) / r2;
            }
            scaled[m][n] = v;
            if v != 0.0 {
                acc += half_g2.powi(m as i32) * twice_g3.powi(n as i32) * v;
            }
        }
        b[big_n] = acc;
    }
    b
}
