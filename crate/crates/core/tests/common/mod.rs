#![allow(dead_code)]

use setreach::{Activation, Interval, IntervalBox, Network};

/// 2 -> 5 -> 2 tanh/linear network whose interval Jacobian determinant
/// excludes zero on all of [0,1]^2.
pub fn invertible_2_5_2() -> Network {
    Network::generate(7, &[2, 5, 2], Activation::Tanh, 0.5).unwrap()
}

/// 2 -> 7 -> 2 tanh/linear network whose Jacobian determinant changes sign on [-1,1]^2.
pub fn folding_2_7_2() -> Network {
    Network::generate(17, &[2, 7, 2], Activation::Tanh, 1.0).unwrap()
}

pub fn unit_square() -> IntervalBox {
    IntervalBox::cube(2, 0.0, 1.0).unwrap()
}

pub fn sym_square() -> IntervalBox {
    IntervalBox::cube(2, -1.0, 1.0).unwrap()
}

/// Widens every dimension by `frac` of its width on each side.
pub fn inflate_rel(b: &IntervalBox, frac: f64) -> IntervalBox {
    let dims = b
        .iter()
        .map(|d| {
            let pad = frac * (d.hi() - d.lo()).max(1e-12);
            Interval::new(d.lo() - pad, d.hi() + pad).unwrap()
        })
        .collect();
    IntervalBox::new(dims).unwrap()
}

/// `b` inflated by `eps` per endpoint contains `a`.
pub fn within(a: &IntervalBox, b: &IntervalBox, eps: f64) -> bool {
    a.iter().zip(b.iter()).all(|(x, y)| x.lo() >= y.lo() - eps && x.hi() <= y.hi() + eps)
}

/// Leibniz-formula determinant and the sum of absolute term magnitudes.
pub fn leibniz_det(m: &[Vec<f64>]) -> (f64, f64) {
    let n = m.len();
    let mut perm: Vec<usize> = (0..n).collect();
    let (mut det, mut mag) = (0.0, 0.0);
    permute(&mut perm, 0, m, &mut det, &mut mag);
    (det, mag)
}

fn permute(p: &mut Vec<usize>, k: usize, m: &[Vec<f64>], det: &mut f64, mag: &mut f64) {
    let n = p.len();
    if k == n {
        let mut inversions = 0;
        for i in 0..n {
            for j in i + 1..n {
                if p[i] > p[j] {
                    inversions += 1;
                }
            }
        }
        let term: f64 = (0..n).map(|i| m[i][p[i]]).product();
        *det += if inversions % 2 == 0 { term } else { -term };
        *mag += term.abs();
        return;
    }
    for i in k..n {
        p.swap(k, i);
        permute(p, k + 1, m, det, mag);
        p.swap(k, i);
    }
}

pub fn det2(m: &[Vec<f64>]) -> f64 {
    m[0][0] * m[1][1] - m[0][1] * m[1][0]
}

/// Straightforward evaluator kept independent of `Network::forward_point`.
pub fn reference_forward(net: &Network, x: &[f64]) -> Vec<f64> {
    let mut v = x.to_vec();
    for layer in net.layers() {
        let mut next = Vec::new();
        for (row, b) in layer.weights.iter().zip(&layer.bias) {
            let mut z = *b;
            for (w, xi) in row.iter().zip(&v) {
                z += w * xi;
            }
            next.push(match layer.activation {
                Activation::Tanh => (z.exp() - (-z).exp()) / (z.exp() + (-z).exp()),
                Activation::Sigmoid => 1.0 / (1.0 + (-z).exp()),
                Activation::Linear => z,
            });
        }
        v = next;
    }
    v
}

/// Central finite-difference Jacobian.
pub fn fd_jacobian(net: &Network, x: &[f64], h: f64) -> Vec<Vec<f64>> {
    let n = x.len();
    let m = net.output_dim();
    let mut jac = vec![vec![0.0; n]; m];
    for j in 0..n {
        let mut xp = x.to_vec();
        let mut xm = x.to_vec();
        xp[j] += h;
        xm[j] -= h;
        let (yp, ym) = (net.forward_point(&xp).unwrap(), net.forward_point(&xm).unwrap());
        for i in 0..m {
            jac[i][j] = (yp[i] - ym[i]) / (2.0 * h);
        }
    }
    jac
}
