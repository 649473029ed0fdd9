use std::sync::Arc;

use num::{BigRational, Zero};

use super::{MatrixLieModel, SpecialLinear};
use crate::error::{Error, Result};
use crate::numerics::{Matrix, Vector};

/// A run of equal diagonal entries of H.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Block {
    pub value: f64,
    pub multiplicity: usize,
}

/// Subspaces determined by a chamber element H.
///
/// `n_of_h` spans the positive root spaces not vanishing on H, `theta_n_of_h` is its
/// image under the Cartan involution, `z_of_h`/`z_k_of_h` are the centralizers of H
/// in g and k, and `m_of_h` is the Killing-orthogonal complement of `z_k_of_h` in k.
#[derive(Debug, Clone, Default)]
pub struct ChamberBases {
    pub n_of_h: Vec<Matrix>,
    pub theta_n_of_h: Vec<Matrix>,
    pub z_of_h: Vec<Matrix>,
    pub z_k_of_h: Vec<Matrix>,
    pub m_of_h: Vec<Matrix>,
}

/// A real hyperbolic element in the closed positive Weyl chamber together with its
/// block structure and derived subspaces.
#[derive(Debug, Clone)]
pub struct ChamberElement {
    model: Arc<dyn MatrixLieModel>,
    entries: Vec<f64>,
    h: Matrix,
    blocks: Vec<Block>,
    block_index: Vec<usize>,
    bases: ChamberBases,
}

/// Builds the sl(n, ℝ) chamber element `diag(entries)`.
pub fn chamber_element(entries: &[f64]) -> Result<ChamberElement> {
    let model = Arc::new(SpecialLinear::new(entries.len())?);
    ChamberElement::from_f64(model, entries)
}

fn check_len(model: &dyn MatrixLieModel, len: usize) -> Result<()> {
    if len != model.matrix_size() {
        return Err(Error::NotInChamber(format!(
            "expected {} entries, got {len}",
            model.matrix_size()
        )));
    }
    Ok(())
}

impl ChamberElement {
    /// Validates weak decrease and zero sum with exact comparisons on the given
    /// floats; entries that compare equal form one block.
    pub fn from_f64(model: Arc<dyn MatrixLieModel>, entries: &[f64]) -> Result<Self> {
        check_len(model.as_ref(), entries.len())?;
        if let Some(bad) = entries.iter().find(|v| !v.is_finite()) {
            return Err(Error::NotInChamber(format!("entry {bad} is not finite")));
        }
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotInChamber("H not weakly decreasing".into()));
        }
        // Floats are dyadic rationals, so the sum can be checked exactly.
        let sum = entries
            .iter()
            .map(|&v| BigRational::from_float(v).expect("finite"))
            .fold(BigRational::zero(), |acc, v| acc + v);
        if !sum.is_zero() {
            return Err(Error::NotInChamber("entries do not sum to zero".into()));
        }
        let labels = block_labels(entries, |a, b| a == b);
        Ok(Self::assemble(model, entries.to_vec(), labels))
    }

    /// Same validation on exact rationals; blocks are decided on the rationals, so
    /// distinct rationals with equal `f64` images stay in different blocks.
    pub fn from_rationals(model: Arc<dyn MatrixLieModel>, entries: &[BigRational]) -> Result<Self> {
        check_len(model.as_ref(), entries.len())?;
        if entries.windows(2).any(|w| w[0] < w[1]) {
            return Err(Error::NotInChamber("H not weakly decreasing".into()));
        }
        let sum = entries.iter().fold(BigRational::zero(), |acc, v| acc + v);
        if !sum.is_zero() {
            return Err(Error::NotInChamber("entries do not sum to zero".into()));
        }
        let labels = block_labels(entries, |a, b| a == b);
        let floats = entries.iter().map(rational_to_f64).collect();
        Ok(Self::assemble(model, floats, labels))
    }

    fn assemble(
        model: Arc<dyn MatrixLieModel>,
        entries: Vec<f64>,
        block_index: Vec<usize>,
    ) -> Self {
        let mut blocks: Vec<Block> = Vec::new();
        for (pos, &label) in block_index.iter().enumerate() {
            if label == blocks.len() {
                blocks.push(Block {
                    value: entries[pos],
                    multiplicity: 1,
                });
            } else {
                blocks[label].multiplicity += 1;
            }
        }
        let h = Matrix::from_diagonal(&Vector::from_vec(entries.clone()));
        let bases = model.chamber_bases(&block_index);
        Self {
            model,
            entries,
            h,
            blocks,
            block_index,
            bases,
        }
    }

    pub fn model(&self) -> &dyn MatrixLieModel {
        self.model.as_ref()
    }

    pub fn model_arc(&self) -> Arc<dyn MatrixLieModel> {
        Arc::clone(&self.model)
    }

    pub fn n(&self) -> usize {
        self.entries.len()
    }

    pub fn entries(&self) -> &[f64] {
        &self.entries
    }

    /// H as a diagonal matrix.
    pub fn h(&self) -> &Matrix {
        &self.h
    }

    pub fn blocks(&self) -> &[Block] {
        &self.blocks
    }

    pub fn block_index(&self) -> &[usize] {
        &self.block_index
    }

    pub fn bases(&self) -> &ChamberBases {
        &self.bases
    }

    pub fn n_of_h(&self) -> &[Matrix] {
        &self.bases.n_of_h
    }

    pub fn theta_n_of_h(&self) -> &[Matrix] {
        &self.bases.theta_n_of_h
    }

    pub fn z_of_h(&self) -> &[Matrix] {
        &self.bases.z_of_h
    }

    pub fn z_k_of_h(&self) -> &[Matrix] {
        &self.bases.z_k_of_h
    }

    pub fn m_of_h(&self) -> &[Matrix] {
        &self.bases.m_of_h
    }

    pub fn is_regular(&self) -> bool {
        self.blocks.len() == self.n()
    }

    /// Dimension of the adjoint orbit through H.
    pub fn orbit_dim(&self) -> usize {
        2 * self.bases.n_of_h.len()
    }

    /// Dimension of the flag manifold Ad(K)H.
    pub fn flag_dim(&self) -> usize {
        self.bases.m_of_h.len()
    }

    pub fn killing(&self, x: &Matrix, y: &Matrix) -> f64 {
        self.model.killing(x, y)
    }

    /// Matrix of Killing pairings `⟨Yᵢ, E_a⟩` between the n(H)-basis (rows) and the
    /// m(H)-basis (columns).
    pub fn pairing_matrix(&self) -> Matrix {
        let rows = &self.bases.n_of_h;
        let cols = &self.bases.m_of_h;
        Matrix::from_fn(rows.len(), cols.len(), |i, a| {
            self.model.killing(&rows[i], &cols[a])
        })
    }
}

fn block_labels<T>(entries: &[T], same: impl Fn(&T, &T) -> bool) -> Vec<usize> {
    let mut labels = Vec::with_capacity(entries.len());
    let mut current = 0;
    for (i, e) in entries.iter().enumerate() {
        if i > 0 && !same(&entries[i - 1], e) {
            current += 1;
        }
        labels.push(current);
    }
    labels
}

fn rational_to_f64(r: &BigRational) -> f64 {
    use num::ToPrimitive;
    r.to_f64().unwrap_or(f64::NAN)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lie_model::elementary;
    use num::BigInt;

    fn ratio(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn regular_element_in_sl3() {
        let c = chamber_element(&[1.0, 0.0, -1.0]).unwrap();
        assert_eq!(
            c.n_of_h(),
            &[
                elementary(3, 0, 1),
                elementary(3, 0, 2),
                elementary(3, 1, 2)
            ]
        );
        assert_eq!(c.m_of_h().len(), 3);
        assert!(c.z_k_of_h().is_empty());
        assert_eq!(c.z_of_h().len(), 2);
        assert!(c.is_regular());
        assert_eq!(c.orbit_dim(), 6);
    }

    #[test]
    fn wall_element_in_sl3() {
        let c = chamber_element(&[1.0, 1.0, -2.0]).unwrap();
        assert_eq!(c.n_of_h(), &[elementary(3, 0, 2), elementary(3, 1, 2)]);
        assert_eq!(c.m_of_h().len(), 2);
        assert_eq!(c.z_k_of_h(), &[elementary(3, 0, 1) - elementary(3, 1, 0)]);
        assert_eq!(
            c.blocks(),
            &[
                Block {
                    value: 1.0,
                    multiplicity: 2
                },
                Block {
                    value: -2.0,
                    multiplicity: 1
                }
            ]
        );
        assert_eq!(c.orbit_dim(), 4);
    }

    #[test]
    fn zero_element_has_a_point_orbit() {
        let c = chamber_element(&[0.0, 0.0]).unwrap();
        assert!(c.n_of_h().is_empty());
        assert_eq!(c.orbit_dim(), 0);
        assert_eq!(c.z_of_h().len(), 3);
    }

    #[test]
    fn dimension_identities_hold() {
        for entries in [
            vec![3.0, 1.0, -1.0, -3.0],
            vec![1.0, 1.0, -1.0, -1.0],
            vec![2.0, 2.0, 2.0, -6.0],
            vec![0.5, 0.5, 0.0, -0.5, -0.5],
        ] {
            let c = chamber_element(&entries).unwrap();
            let n = c.n();
            let expected: usize = {
                let m: Vec<usize> = c.blocks().iter().map(|b| b.multiplicity).collect();
                (0..m.len())
                    .flat_map(|i| ((i + 1)..m.len()).map(move |j| (i, j)))
                    .map(|(i, j)| m[i] * m[j])
                    .sum()
            };
            assert_eq!(c.n_of_h().len(), expected);
            assert_eq!(c.m_of_h().len(), c.n_of_h().len());
            assert_eq!(c.z_of_h().len() + 2 * c.n_of_h().len(), n * n - 1);
        }
    }

    #[test]
    fn rejects_points_outside_the_chamber() {
        assert_eq!(
            chamber_element(&[-1.0, 1.0]).unwrap_err(),
            Error::NotInChamber("H not weakly decreasing".into())
        );
        assert!(matches!(
            chamber_element(&[1.0, 0.0]),
            Err(Error::NotInChamber(_))
        ));
        // 0.1 + 0.2 − 0.3 is not exactly zero in binary.
        assert!(chamber_element(&[0.3, -0.1, -0.2]).is_err());
    }

    #[test]
    fn rational_blocks_are_exact() {
        let model: Arc<dyn MatrixLieModel> = Arc::new(SpecialLinear::new(3).unwrap());
        let c = ChamberElement::from_rationals(
            Arc::clone(&model),
            &[ratio(1, 3), ratio(1, 3), ratio(-2, 3)],
        )
        .unwrap();
        assert_eq!(c.blocks().len(), 2);
        assert!(
            ChamberElement::from_rationals(model, &[ratio(1, 10), ratio(1, 5), ratio(-3, 10)])
                .is_err()
        );
    }

    #[test]
    fn pairing_is_nondegenerate() {
        for entries in [vec![1.0, -1.0], vec![1.0, 0.0, -1.0], vec![1.0, 1.0, -2.0]] {
            let c = chamber_element(&entries).unwrap();
            let s = crate::numerics::singular_values(&c.pairing_matrix()).unwrap();
            assert!(s.last().copied().unwrap() > 1e-8);
        }
    }
}
