//! Constant quaternionic structure on `R^{4m}`.
//!
//! Coordinates are ordered `(x_1, y_1, x_2, y_2, ..., x_{2m}, y_{2m})` with
//! `z_j = x_j + i y_j`. In each block of four real coordinates, identified with
//! `(z_1, z_2)` and the quaternion `z_1 + z_2 j`:
//!
//! ```text
//! J1 (z1, z2) = (i z1, i z2)
//! J2 (z1, z2) = (-conj z2, conj z1)
//! J3 (z1, z2) = (-i conj z2, i conj z1)
//! ```
//!
//! so `J1` is the standard complex structure and `J2`, `J3` are antilinear.

use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;

use crate::error::{Error, Result};

pub type AmbientVector = DVector<f64>;
pub type AmbientMatrix = DMatrix<f64>;

const J1_BLOCK: [[i32; 4]; 4] = [
    [0, -1, 0, 0],
    [1, 0, 0, 0],
    [0, 0, 0, -1],
    [0, 0, 1, 0],
];

const J2_BLOCK: [[i32; 4]; 4] = [
    [0, 0, -1, 0],
    [0, 0, 0, 1],
    [1, 0, 0, 0],
    [0, -1, 0, 0],
];

const J3_BLOCK: [[i32; 4]; 4] = [
    [0, 0, 0, -1],
    [0, 0, -1, 0],
    [0, 1, 0, 0],
    [1, 0, 0, 0],
];

/// The three complex structures `J1`, `J2`, `J3` on `R^{4m}` with the
/// Euclidean metric.
#[derive(Debug, Clone, PartialEq)]
pub struct QuaternionicStructure {
    m: usize,
    integer: [DMatrix<i32>; 3],
    real: [AmbientMatrix; 3],
}

impl QuaternionicStructure {
    /// Block-diagonal structure with `m` copies of the fixed 4x4 blocks.
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::ZeroDimension);
        }
        let integer = [J1_BLOCK, J2_BLOCK, J3_BLOCK].map(|block| block_diagonal(&block, m));
        let real = integer.clone().map(|j| j.map(f64::from));
        Ok(Self { m, integer, real })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Real dimension `4m`.
    pub fn real_dim(&self) -> usize {
        4 * self.m
    }

    /// Complex dimension `2m` with respect to `J1`.
    pub fn complex_dim(&self) -> usize {
        2 * self.m
    }

    /// Integer matrix of `J_a`, `a` in `{1, 2, 3}`.
    pub fn integer_matrix(&self, a: usize) -> Result<&DMatrix<i32>> {
        check_index(a)?;
        Ok(&self.integer[a - 1])
    }

    /// Real matrix of `J_a`, `a` in `{1, 2, 3}`.
    pub fn matrix(&self, a: usize) -> Result<&AmbientMatrix> {
        check_index(a)?;
        Ok(&self.real[a - 1])
    }

    pub fn j1(&self) -> &AmbientMatrix {
        &self.real[0]
    }

    pub fn j2(&self) -> &AmbientMatrix {
        &self.real[1]
    }

    pub fn j3(&self) -> &AmbientMatrix {
        &self.real[2]
    }

    /// `J_a X`.
    pub fn apply(&self, a: usize, x: &AmbientVector) -> Result<AmbientVector> {
        let j = self.matrix(a)?;
        self.check_len(x.len())?;
        Ok(j * x)
    }

    /// Complex coordinates `z_j = x_j + i y_j` of an ambient vector.
    pub fn complex_coords(&self, x: &AmbientVector) -> Result<Vec<Complex64>> {
        self.check_len(x.len())?;
        Ok((0..self.complex_dim())
            .map(|j| Complex64::new(x[2 * j], x[2 * j + 1]))
            .collect())
    }

    /// Inverse of [`complex_coords`](Self::complex_coords).
    pub fn real_coords(&self, z: &[Complex64]) -> Result<AmbientVector> {
        if z.len() != self.complex_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.complex_dim(),
                found: z.len(),
            });
        }
        Ok(AmbientVector::from_iterator(
            self.real_dim(),
            z.iter().flat_map(|c| [c.re, c.im]),
        ))
    }

    pub(crate) fn check_len(&self, len: usize) -> Result<()> {
        if len != self.real_dim() {
            return Err(Error::DimensionMismatch {
                expected: self.real_dim(),
                found: len,
            });
        }
        Ok(())
    }
}

fn check_index(a: usize) -> Result<()> {
    if (1..=3).contains(&a) {
        Ok(())
    } else {
        Err(Error::StructureIndex(a))
    }
}

fn block_diagonal(block: &[[i32; 4]; 4], m: usize) -> DMatrix<i32> {
    let mut out = DMatrix::zeros(4 * m, 4 * m);
    for k in 0..m {
        for (r, row) in block.iter().enumerate() {
            for (c, &entry) in row.iter().enumerate() {
                out[(4 * k + r, 4 * k + c)] = entry;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn max_abs(m: &DMatrix<i32>) -> i32 {
        m.iter().map(|x| x.abs()).max().unwrap_or(0)
    }

    #[test]
    fn rejects_zero_dimension() {
        assert_eq!(QuaternionicStructure::new(0), Err(Error::ZeroDimension));
    }

    #[test]
    fn quaternion_product_m1() {
        let q = QuaternionicStructure::new(1).unwrap();
        let [j1, j2, j3] = [1, 2, 3].map(|a| q.integer_matrix(a).unwrap().clone());
        // Multiply the blocks directly rather than trusting the comments above.
        assert_eq!(max_abs(&(&j1 * &j2 - &j3)), 0);
        assert_eq!(&j1 * &j2 * &j3, -DMatrix::<i32>::identity(4, 4));
    }

    #[test]
    fn j2_skew_orthogonal_m2() {
        let q = QuaternionicStructure::new(2).unwrap();
        let j2 = q.integer_matrix(2).unwrap();
        assert_eq!(j2.transpose(), -j2);
        assert_eq!(j2.transpose() * j2, DMatrix::<i32>::identity(8, 8));
    }

    #[test]
    fn j1_is_multiplication_by_i() {
        let q = QuaternionicStructure::new(2).unwrap();
        let x = AmbientVector::from_vec(vec![0.3, -1.2, 2.0, 0.5, -0.7, 0.1, 1.4, -2.2]);
        let z = q.complex_coords(&x).unwrap();
        let jz = q.complex_coords(&q.apply(1, &x).unwrap()).unwrap();
        for (a, b) in z.iter().zip(&jz) {
            assert_eq!(*b, Complex64::i() * a);
        }
        assert_eq!(q.real_coords(&z).unwrap(), x);
    }

    #[test]
    fn first_basis_vector_is_z1() {
        let q = QuaternionicStructure::new(2).unwrap();
        let mut e = AmbientVector::zeros(8);
        e[0] = 1.0;
        let z = q.complex_coords(&e).unwrap();
        assert_eq!(z[0], Complex64::new(1.0, 0.0));
        assert!(z[1..].iter().all(|c| *c == Complex64::new(0.0, 0.0)));
    }

    #[test]
    fn apply_rejects_bad_index_and_length() {
        let q = QuaternionicStructure::new(1).unwrap();
        let x = AmbientVector::zeros(4);
        assert_eq!(q.apply(4, &x), Err(Error::StructureIndex(4)));
        assert_eq!(q.apply(0, &x), Err(Error::StructureIndex(0)));
        assert!(matches!(
            q.apply(1, &AmbientVector::zeros(8)),
            Err(Error::DimensionMismatch { expected: 4, found: 8 })
        ));
        assert!(q.real_coords(&[Complex64::new(1.0, 0.0)]).is_err());
    }
}
