//! Small reference instances with known verdicts.
//!
//! These tables back the test suites and the CLI sample data. Verdicts and
//! closed-form channels for them have been worked out by hand or through
//! the brute-force oracles, so they anchor the pipeline end to end.

use alloc::vec::Vec;

use crate::fmath::sqrt;
use crate::linalg::Matrix;
use crate::pmf::{Channel, JointPmf};

/// A 2x2x3 joint PMF (entries in hundredths) for which a simulating
/// channel exists; [`known_attack_channel_2x2x3`] is one closed-form
/// witness.
pub fn simulatable_2x2x3() -> JointPmf {
    let hundredths: [[[f64; 3]; 2]; 2] = [
        [[6.0, 9.0, 15.0], [36.0, 9.0, 0.0]],
        [[4.0, 6.0, 10.0], [4.0, 1.0, 0.0]],
    ];
    JointPmf::from_fn(2, 2, 3, |x, y, z| hundredths[x][y][z] / 100.0)
        .expect("reference table is a valid PMF")
}

/// The closed-form simulating channel for [`simulatable_2x2x3`]. It is
/// also the unique minimizer of the cost `[2, 2, 2, 1, 1, 1]`, where it
/// achieves objective 4.5.
pub fn known_attack_channel_2x2x3() -> Channel {
    Channel::new(3, 2, alloc::vec![1.0, 0.0, 0.5, 0.5, 0.5, 0.5], 1e-12)
        .expect("closed-form channel is stochastic")
}

/// Marginal pair `(A, C)` with `|Y| = 3`, `|Z| = 4`, `|X| = 5` for which no
/// simulating channel exists even though the stacked system is consistent:
/// the sign test must come back negative.
///
/// Built from per-symbol conditionals with exact `sqrt(3)` terms so that
/// both marginals share P_Y to machine precision.
pub fn nonsimulatable_pair_3y_4z_5x() -> (Matrix, Matrix) {
    let r3 = sqrt(3.0);
    // (P_Z(k), P(y1 | z_k), P(y2 | z_k)); the y3 share is the remainder.
    let z_side: [(f64, f64, f64); 4] = [
        (0.3, 0.0, 0.0),
        (0.3, 0.5, 0.0),
        (0.3, 0.25, r3 / 4.0),
        (0.1, 0.25, r3 / 12.0),
    ];
    // (P_X(j), P(y1 | x_j), P(y2 | x_j)).
    let x_side: [(f64, f64, f64); 5] = [
        (0.3, 0.25, 0.0),
        (0.3, 0.375, r3 / 8.0),
        (0.3, 0.125, r3 / 8.0),
        (0.05, 0.24, r3 / 12.0),
        (0.05, 0.26, r3 / 12.0),
    ];
    let a = Matrix::from_fn(3, 4, |i, k| {
        let (pz, y1, y2) = z_side[k];
        pz * match i {
            0 => y1,
            1 => y2,
            _ => 1.0 - y1 - y2,
        }
    });
    let c = Matrix::from_fn(3, 5, |i, j| {
        let (px, y1, y2) = x_side[j];
        px * match i {
            0 => y1,
            1 => y2,
            _ => 1.0 - y1 - y2,
        }
    });
    (a, c)
}

/// [`nonsimulatable_pair_3y_4z_5x`] lifted to a full joint PMF through the
/// conditional-independence coupling; the verdict stays negative.
pub fn nonsimulatable_pmf_3y_4z_5x() -> JointPmf {
    let (a, c) = nonsimulatable_pair_3y_4z_5x();
    crate::pmf::couple_marginals(&a, &c).expect("pair shares its Y marginal")
}

/// [`simulatable_pair_4y_6z_4x`] lifted to a full joint PMF; the verdict
/// stays positive.
pub fn simulatable_pmf_4y_6z_4x() -> JointPmf {
    let (a, c) = simulatable_pair_4y_6z_4x();
    crate::pmf::couple_marginals(&a, &c).expect("pair shares its Y marginal")
}

const PAIR_4Y_A: [[f64; 6]; 4] = [
    [0.0315, 0.0203, 0.0056, 0.0690, 0.0295, 0.0720],
    [0.0169, 0.0779, 0.1003, 0.0377, 0.0568, 0.0278],
    [0.0673, 0.0555, 0.0133, 0.0352, 0.0085, 0.1113],
    [0.0446, 0.0117, 0.0421, 0.0085, 0.0260, 0.0307],
];

const PAIR_4Y_C: [[f64; 4]; 4] = [
    [0.0464, 0.0335, 0.0502, 0.0979],
    [0.0995, 0.0962, 0.0632, 0.0585],
    [0.0535, 0.0492, 0.0922, 0.0962],
    [0.0609, 0.0392, 0.0300, 0.0335],
];

/// Marginal pair `(A, C)` with `|Y| = 4`, `|Z| = 6`, `|X| = 4` for which a
/// simulating channel exists.
///
/// The raw four-decimal tables carry a ~1e-4 marginal mismatch from
/// rounding, which the strict shared-P_Y precondition rejects; each row of
/// C is rescaled onto the corresponding row sum of A to restore it. The
/// rescaling moves entries by well under 1e-3.
pub fn simulatable_pair_4y_6z_4x() -> (Matrix, Matrix) {
    let a = Matrix::from_fn(4, 6, |i, k| PAIR_4Y_A[i][k]);
    let mut c = Matrix::from_fn(4, 4, |i, j| PAIR_4Y_C[i][j]);
    for i in 0..4 {
        let a_sum: f64 = a.row(i).iter().sum();
        let c_sum: f64 = c.row(i).iter().sum();
        let scale = a_sum / c_sum;
        for j in 0..4 {
            c[(i, j)] *= scale;
        }
    }
    (a, c)
}

/// A four-decimal channel known to solve [`simulatable_pair_4y_6z_4x`] up
/// to its rounding, i.e. it validates at tolerance 1e-3 but not much
/// tighter.
pub fn reference_channel_4y_6z_4x() -> Channel {
    let rows: [[f64; 4]; 6] = [
        [0.4979, 0.1504, 0.2038, 0.1479],
        [0.0148, 0.3751, 0.5618, 0.0483],
        [0.5210, 0.4391, 0.0254, 0.0144],
        [0.1302, 0.0917, 0.0301, 0.7481],
        [0.5638, 0.2674, 0.0161, 0.1527],
        [0.0261, 0.0622, 0.4110, 0.5006],
    ];
    let probs: Vec<f64> = rows.iter().flatten().copied().collect();
    Channel::new(6, 4, probs, 1e-3).expect("reference channel rows sum to 1 within 1e-3")
}
