//! Independent reference computations shared by the integration tests.
//!
//! Nothing here calls the library's numerical kernels: the right-hand side is
//! a literal triple loop, admissibility is read off the index pattern, and the
//! quadrature is written out separately.
#![allow(dead_code)]

use mkdv_series::{CoeffSeq, Complex64};

pub fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn sigma_ref(n1: i64, n2: i64, n3: i64) -> f64 {
    let n = (n1 + n2 + n3) as f64;
    let (a, b, d) = (n1 as f64, n2 as f64, n3 as f64);
    n.powi(3) - a.powi(3) - b.powi(3) - d.powi(3)
}

/// Interaction-picture right-hand side of the modified equation by a direct
/// loop over all ordered triples in the window.
pub fn brute_rhs(a: &CoeffSeq, t: f64) -> CoeffSeq {
    let n_max = a.cutoff() as i64;
    CoeffSeq::from_fn(a.cutoff(), |n| {
        let mut acc = c(0.0, 0.0);
        for n1 in -n_max..=n_max {
            for n2 in -n_max..=n_max {
                let n3 = n - n1 - n2;
                if n3.abs() > n_max {
                    continue;
                }
                let prod = a.get(n1) * a.get(n2) * a.get(n3);
                if n1 != n && n2 != n && n3 != n {
                    let phase = Complex64::from_polar(1.0, sigma_ref(n1, n2, n3) * t);
                    acc += c(0.0, -(n as f64) / 3.0) * phase * prod;
                } else if n1 == n && n2 == -n && n3 == n {
                    acc += c(0.0, n as f64) * prod;
                }
            }
        }
        acc
    })
}

/// `∫_0^{x_i} f` at every node of a uniform grid: composite Simpson at even
/// nodes, Simpson plus a final 3/8 panel at odd nodes `≥ 3`, and the
/// quadratic-interpolant rule on the first panel.
pub fn running_integral(f: &[Complex64], h: f64) -> Vec<Complex64> {
    let len = f.len();
    assert!(len >= 4);
    let simpson = |lo: usize, hi: usize| -> Complex64 {
        let mut acc = c(0.0, 0.0);
        let mut i = lo;
        while i < hi {
            acc += (f[i] + 4.0 * f[i + 1] + f[i + 2]) * (h / 3.0);
            i += 2;
        }
        acc
    };
    (0..len)
        .map(|i| match i {
            0 => c(0.0, 0.0),
            1 => (5.0 * f[0] + 8.0 * f[1] - f[2]) * (h / 12.0),
            _ if i % 2 == 0 => simpson(0, i),
            _ => simpson(0, i - 3) + (f[i - 3] + 3.0 * f[i - 2] + 3.0 * f[i - 1] + f[i]) * (3.0 * h / 8.0),
        })
        .collect()
}

/// `iterations` rounds of `a ↦ a0 + ∫_0^· RHS(a(s), s) ds` started from the
/// constant trajectory, on `points` uniform nodes of `[0, t]`. Returns `a(t)`.
pub fn picard_quadrature(a0: &CoeffSeq, t: f64, iterations: usize, points: usize) -> CoeffSeq {
    let h = t / (points - 1) as f64;
    let mut traj = vec![a0.clone(); points];
    for _ in 0..iterations {
        let rhs: Vec<CoeffSeq> = traj.iter().enumerate().map(|(i, a)| brute_rhs(a, i as f64 * h)).collect();
        let mut next = vec![a0.clone(); points];
        for (slot, (n, z0)) in a0.modes().enumerate() {
            let samples: Vec<Complex64> = rhs.iter().map(|r| r.values()[slot]).collect();
            for (i, integral) in running_integral(&samples, h).into_iter().enumerate() {
                next[i].set(n, z0 + integral);
            }
        }
        traj = next;
    }
    traj.pop().expect("nonempty grid")
}

/// Hermitian random data with prescribed `l^{1/2,2}`-type decay, from a
/// small xorshift generator independent of the library's sampler.
pub fn hermitian_sample(cutoff: usize, seed: u64) -> CoeffSeq {
    let mut state = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    let mut a = CoeffSeq::zeros(cutoff);
    a.set(0, c(next(), 0.0));
    for n in 1..=cutoff as i64 {
        let z = c(next(), next()) / (1.0 + (n * n) as f64);
        a.set(n, z);
        a.set(-n, z.conj());
    }
    a
}

/// General complex data in `[-1/2, 1/2]²` per mode.
pub fn complex_sample(cutoff: usize, seed: u64) -> CoeffSeq {
    let mut state = seed.wrapping_mul(0xD1B5_4A32_D192_ED03) | 1;
    let mut next = move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 - 0.5
    };
    CoeffSeq::from_fn(cutoff, |_| c(next(), next()))
}

/// `max_n |a(-n) - conj(a(n))| / max_n |a(n)|`.
pub fn relative_hermitian_defect(a: &CoeffSeq) -> f64 {
    let scale = a.sup_norm();
    if scale == 0.0 {
        0.0
    } else {
        a.hermitian_defect() / scale
    }
}
