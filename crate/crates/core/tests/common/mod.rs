//! Test-only oracles that share no code with the library's closed forms.
#![allow(dead_code)]

use num_complex::Complex64;

// Gauss–Kronrod 7/15 nodes and weights on [-1, 1]
const XGK: [f64; 8] = [
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
];
const WGK: [f64; 8] = [
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
];
const WG: [f64; 4] = [
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
];

/// Kronrod estimate, error estimate and `∫|f|` on `[a, b]`.
fn gk15(f: &dyn Fn(f64) -> Complex64, a: f64, b: f64) -> (Complex64, f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kron = fc * WGK[7];
    let mut gauss = fc * WG[3];
    let mut abs = fc.norm() * WGK[7];
    for j in 0..7 {
        let x = h * XGK[j];
        let (fl, fr) = (f(c - x), f(c + x));
        kron += (fl + fr) * WGK[j];
        abs += (fl.norm() + fr.norm()) * WGK[j];
        if j % 2 == 1 {
            gauss += (fl + fr) * WG[j / 2];
        }
    }
    (kron * h, ((kron - gauss) * h).norm(), abs * h.abs())
}

struct Part {
    lo: f64,
    hi: f64,
    value: Complex64,
    err: f64,
}

impl PartialEq for Part {
    fn eq(&self, other: &Self) -> bool {
        self.err == other.err
    }
}
impl Eq for Part {}
impl PartialOrd for Part {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Part {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.err.total_cmp(&other.err)
    }
}

/// Globally adaptive Gauss–Kronrod integral of a complex function over `[a, b]`
/// (oriented: `b < a` flips the sign). The interval with the largest error
/// estimate is bisected until the total estimate drops below `tol`, below the
/// roundoff floor `1e-14·∫|f|`, or the subdivision budget runs out.
pub fn integrate(f: impl Fn(f64) -> Complex64, a: f64, b: f64, tol: f64) -> Complex64 {
    if b < a {
        return -integrate(f, b, a, tol);
    }
    use std::collections::BinaryHeap;
    // a fixed pre-split keeps oscillatory integrands from fooling the first estimate
    let pieces = 64;
    let h = (b - a) / pieces as f64;
    let mut heap = BinaryHeap::new();
    let mut err = 0.0;
    let mut abs = 0.0;
    for j in 0..pieces {
        let (lo, hi) = (a + j as f64 * h, a + (j + 1) as f64 * h);
        let (v, e, m) = gk15(&f, lo, hi);
        err += e;
        abs += m;
        heap.push(Part {
            lo,
            hi,
            value: v,
            err: e,
        });
    }
    for _ in 0..20_000 {
        if err <= tol.max(1e-14 * abs) {
            break;
        }
        let part = heap.pop().unwrap();
        let mid = 0.5 * (part.lo + part.hi);
        let (v1, e1, _) = gk15(&f, part.lo, mid);
        let (v2, e2, _) = gk15(&f, mid, part.hi);
        err += e1 + e2 - part.err;
        heap.push(Part {
            lo: part.lo,
            hi: mid,
            value: v1,
            err: e1,
        });
        heap.push(Part {
            lo: mid,
            hi: part.hi,
            value: v2,
            err: e2,
        });
    }
    heap.iter().map(|p| p.value).sum()
}

/// Eigenvalues of a real 2×2 matrix by the textbook quadratic formula.
pub fn eig2(m: [[f64; 2]; 2]) -> (f64, f64) {
    let tr = m[0][0] + m[1][1];
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let disc = (tr * tr - 4.0 * det).sqrt();
    ((tr + disc) / 2.0, (tr - disc) / 2.0)
}

pub fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

pub fn cexp(theta: f64) -> Complex64 {
    Complex64::new(theta.cos(), theta.sin())
}

#[test]
fn oracle_integrates_known_integrals() {
    let v = integrate(|t| cexp(37.0 * t), 0.0, 2.0, 1e-13);
    let want = (cexp(74.0) - 1.0) / Complex64::new(0.0, 37.0);
    assert!((v - want).norm() < 1e-12);
    let p = integrate(|t| Complex64::new(t * t, 0.0), 1.0, -1.0, 1e-14);
    assert!((p.re + 2.0 / 3.0).abs() < 1e-14);
}

/// `e^{iSt}` for a real 2×2 matrix by Sylvester's formula on its eigenvalues.
pub fn propagator(s: [[f64; 2]; 2], t: f64) -> [[Complex64; 2]; 2] {
    let (l1, l2) = eig2(s);
    let one = Complex64::new(1.0, 0.0);
    if (l1 - l2).abs() < 1e-300 {
        // only S = 0 has a double eigenvalue here
        return [
            [one, Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), one],
        ];
    }
    let (e1, e2) = (cexp(l1 * t), cexp(l2 * t));
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            let id = if i == j { 1.0 } else { 0.0 };
            out[i][j] = (e1 * (s[i][j] - l2 * id) - e2 * (s[i][j] - l1 * id)) / (l1 - l2);
        }
    }
    out
}

pub fn apply(m: &[[Complex64; 2]; 2], v: [Complex64; 2]) -> [Complex64; 2] {
    [
        m[0][0] * v[0] + m[0][1] * v[1],
        m[1][0] * v[0] + m[1][1] * v[1],
    ]
}

/// The per-mode symbol, written out independently of the library.
pub fn symbol(a: f64, c: f64, d: f64, r: f64, k: i64) -> [[f64; 2]; 2] {
    let kf = k as f64;
    let k3 = kf * kf * kf;
    [[k3, a * k3], [d * k3 / c, (k3 - r * kf) / c]]
}

/// Fourier coefficient at time `t` of the solution forced by `f δ_{x₀}` and
/// `g δ_{x₀}`, by quadrature of the Duhamel formula.
pub fn duhamel_mode(
    s: [[f64; 2]; 2],
    k: i64,
    z0: [Complex64; 2],
    f: &dyn Fn(f64) -> Complex64,
    g: &dyn Fn(f64) -> Complex64,
    x0: f64,
    t: f64,
) -> [Complex64; 2] {
    let free = apply(&propagator(s, t), z0);
    let phase = cexp(-(k as f64) * x0) / (2.0 * std::f64::consts::PI);
    let forced = |comp: usize| {
        integrate(
            |tau| {
                let p = propagator(s, t - tau);
                apply(&p, [f(tau) * phase, g(tau) * phase])[comp]
            },
            0.0,
            t,
            1e-13,
        )
    };
    [free[0] + forced(0), free[1] + forced(1)]
}
