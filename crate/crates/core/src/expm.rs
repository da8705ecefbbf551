//! Matrix exponential by scaling and squaring with diagonal Padé
//! approximants (degrees 3 to 13), applied to a diagonally balanced matrix.

use alloc::vec;
use alloc::vec::Vec;

use crate::dense::Matrix;

const PADE3: [f64; 4] = [120.0, 60.0, 12.0, 1.0];
const PADE5: [f64; 6] = [30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0];
const PADE7: [f64; 8] = [17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0];
const PADE9: [f64; 10] = [
    17643225600.0,
    8821612800.0,
    2075673600.0,
    302702400.0,
    30270240.0,
    2162160.0,
    110880.0,
    3960.0,
    90.0,
    1.0,
];
const PADE13: [f64; 14] = [
    64764752532480000.0,
    32382376266240000.0,
    7771770303897600.0,
    1187353796428800.0,
    129060195264000.0,
    10559470521600.0,
    670442572800.0,
    33522128640.0,
    1323241920.0,
    40840800.0,
    960960.0,
    16380.0,
    182.0,
    1.0,
];

// Largest 1-norms for which each degree meets unit round-off.
const THETA3: f64 = 1.495585217958292e-2;
const THETA5: f64 = 2.539_398_330_063_23e-1;
const THETA7: f64 = 9.504178996162932e-1;
const THETA9: f64 = 2.097847961257068e0;
const THETA13: f64 = 5.371920351148152e0;

/// `exp(a)`.
///
/// Panics if the Padé denominator is singular, which cannot happen for a
/// finite input scaled below the degree-13 threshold.
pub fn expm(a: &Matrix) -> Matrix {
    let n = a.dim();
    if n == 0 {
        return Matrix::zeros(0);
    }
    let (balanced, scale) = balance(a);
    let e = expm_unbalanced(&balanced);
    let mut out = Matrix::zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[(i, j)] = scale[i] * e[(i, j)] / scale[j];
        }
    }
    out
}

fn expm_unbalanced(a: &Matrix) -> Matrix {
    let n = a.dim();
    let norm = a.norm1();
    for (theta, coeffs) in [
        (THETA3, &PADE3[..]),
        (THETA5, &PADE5[..]),
        (THETA7, &PADE7[..]),
        (THETA9, &PADE9[..]),
    ] {
        if norm <= theta {
            let (u, v) = pade_low(a, coeffs);
            return plus_identity(pade_increment(&u, &v));
        }
    }
    let squarings = if norm > THETA13 {
        libm::ceil(libm::log2(norm / THETA13)).max(0.0) as i32
    } else {
        0
    };
    let scaled = a.scaled(libm::exp2(-(squarings as f64)));
    let (u, v) = pade13(&scaled, n);
    // Square X = R - I instead of R: (I + X)^2 = I + (2X + X^2). Squaring R
    // directly amplifies the round-off of entries close to 1 by 2^s.
    let mut x = pade_increment(&u, &v);
    for _ in 0..squarings {
        let mut next = x.mul(&x);
        next.add_scaled(2.0, &x);
        x = next;
    }
    plus_identity(x)
}

fn plus_identity(mut x: Matrix) -> Matrix {
    for i in 0..x.dim() {
        x[(i, i)] += 1.0;
    }
    x
}

fn pade_low(a: &Matrix, b: &[f64]) -> (Matrix, Matrix) {
    let n = a.dim();
    let a2 = a.mul(a);
    let mut odd = Matrix::identity(n).scaled(b[1]);
    let mut even = Matrix::identity(n).scaled(b[0]);
    let mut power = Matrix::identity(n);
    let mut k = 2;
    while k < b.len() {
        power = power.mul(&a2);
        even.add_scaled(b[k], &power);
        if k + 1 < b.len() {
            odd.add_scaled(b[k + 1], &power);
        }
        k += 2;
    }
    (a.mul(&odd), even)
}

fn pade13(a: &Matrix, n: usize) -> (Matrix, Matrix) {
    let b = &PADE13;
    let a2 = a.mul(a);
    let a4 = a2.mul(&a2);
    let a6 = a4.mul(&a2);

    let mut inner_u = a6.scaled(b[13]);
    inner_u.add_scaled(b[11], &a4);
    inner_u.add_scaled(b[9], &a2);
    let mut u = a6.mul(&inner_u);
    u.add_scaled(b[7], &a6);
    u.add_scaled(b[5], &a4);
    u.add_scaled(b[3], &a2);
    u.add_scaled(b[1], &Matrix::identity(n));
    let u = a.mul(&u);

    let mut inner_v = a6.scaled(b[12]);
    inner_v.add_scaled(b[10], &a4);
    inner_v.add_scaled(b[8], &a2);
    let mut v = a6.mul(&inner_v);
    v.add_scaled(b[6], &a6);
    v.add_scaled(b[4], &a4);
    v.add_scaled(b[2], &a2);
    v.add_scaled(b[0], &Matrix::identity(n));
    (u, v)
}

/// `(V - U)^-1 (V + U) - I = (V - U)^-1 (2U)`.
fn pade_increment(u: &Matrix, v: &Matrix) -> Matrix {
    let mut den = v.clone();
    den.add_scaled(-1.0, u);
    den.solve(&u.scaled(2.0)).expect("Padé denominator is singular")
}

/// Diagonal similarity `D^-1 A D` with power-of-two entries that roughly
/// equalises row and column norms. Returns the balanced matrix and `D`.
pub fn balance(a: &Matrix) -> (Matrix, Vec<f64>) {
    const RADIX: f64 = 2.0;
    const RADIX2: f64 = RADIX * RADIX;
    let n = a.dim();
    let mut b = a.clone();
    let mut scale = vec![1.0; n];
    let mut converged = false;
    let mut sweeps = 0;
    while !converged && sweeps < 100 {
        converged = true;
        sweeps += 1;
        for i in 0..n {
            let mut c = 0.0;
            let mut r = 0.0;
            for j in 0..n {
                if j != i {
                    c += b[(j, i)].abs();
                    r += b[(i, j)].abs();
                }
            }
            if c == 0.0 || r == 0.0 {
                continue;
            }
            let total = c + r;
            let mut f = 1.0;
            let mut g = r / RADIX;
            while c < g {
                f *= RADIX;
                c *= RADIX2;
            }
            g = r * RADIX;
            while c >= g {
                f /= RADIX;
                c /= RADIX2;
            }
            if (c + r) / f < 0.95 * total {
                converged = false;
                scale[i] *= f;
                for j in 0..n {
                    b[(i, j)] /= f;
                    b[(j, i)] *= f;
                }
            }
        }
    }
    (b, scale)
}
