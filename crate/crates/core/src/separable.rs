//! Finitely decomposable separable states `sum_i p_i alpha_i^1 ⊗ ... ⊗ alpha_i^n`.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::layout::SubsystemLayout;
use crate::matrix::CMatrix;
use crate::operator::{marginals, tensor_all, HermitianOperator};
use crate::pure::{schmidt_bipartite, PureState};
use crate::random::Sampler;

const WEIGHT_TOL: f64 = 1e-10;

/// One term `p (alpha^1 ⊗ ... ⊗ alpha^n)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductAtom {
    pub weight: f64,
    pub parties: Vec<HermitianOperator>,
}

impl ProductAtom {
    pub fn assemble(&self) -> HermitianOperator {
        tensor_all(&self.parties)
    }
}

/// Separable state as a finite mixture of product states.
#[derive(Debug, Clone, PartialEq)]
pub struct ProductEnsemble {
    layout: SubsystemLayout,
    atoms: Vec<ProductAtom>,
}

impl ProductEnsemble {
    /// Checks weights (positive, summing to one within `1e-10`) and that each
    /// local operator is a density operator of the right dimension.
    pub fn new(layout: SubsystemLayout, atoms: Vec<ProductAtom>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::EmptySupport);
        }
        let mut total = 0.0;
        for atom in &atoms {
            if !(atom.weight > 0.0 && atom.weight.is_finite()) {
                return Err(Error::Domain {
                    what: "ensemble weight",
                    value: atom.weight,
                });
            }
            total += atom.weight;
            if atom.parties.len() != layout.parties() {
                return Err(Error::LengthMismatch {
                    expected: layout.parties(),
                    found: atom.parties.len(),
                });
            }
            for (alpha, &d) in atom.parties.iter().zip(layout.dims()) {
                if alpha.dim() != d {
                    return Err(Error::DimensionMismatch {
                        expected: d,
                        found: alpha.dim(),
                    });
                }
                alpha.check_density()?;
            }
        }
        if (total - 1.0).abs() > WEIGHT_TOL {
            return Err(Error::Domain {
                what: "sum of ensemble weights",
                value: total,
            });
        }
        Ok(ProductEnsemble { layout, atoms })
    }

    pub(crate) fn from_parts_unchecked(layout: SubsystemLayout, atoms: Vec<ProductAtom>) -> Self {
        ProductEnsemble { layout, atoms }
    }

    /// Mixture of pure product vectors; `vectors[i][s]` is party `s` of atom `i`.
    pub fn from_pure(
        layout: SubsystemLayout,
        weights: &[f64],
        vectors: &[Vec<Vec<Complex64>>],
    ) -> Result<Self> {
        if weights.len() != vectors.len() {
            return Err(Error::LengthMismatch {
                expected: weights.len(),
                found: vectors.len(),
            });
        }
        let atoms = weights
            .iter()
            .zip(vectors)
            .map(|(&weight, parts)| ProductAtom {
                weight,
                parties: parts
                    .iter()
                    .map(|v| HermitianOperator::projector(v))
                    .collect(),
            })
            .collect();
        Self::new(layout, atoms)
    }

    pub fn layout(&self) -> &SubsystemLayout {
        &self.layout
    }

    pub fn atoms(&self) -> &[ProductAtom] {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.atoms.iter().map(|a| a.weight).collect()
    }

    /// `p * self + (1 - p) * other` as a concatenated ensemble.
    pub fn mix(&self, p: f64, other: &ProductEnsemble) -> Result<ProductEnsemble> {
        if self.layout != other.layout {
            return Err(Error::DimensionMismatch {
                expected: self.layout.total_dim(),
                found: other.layout.total_dim(),
            });
        }
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::Domain {
                what: "mixing weight",
                value: p,
            });
        }
        let atoms = self
            .atoms
            .iter()
            .map(|a| (a, p))
            .chain(other.atoms.iter().map(|a| (a, 1.0 - p)))
            .map(|(a, s)| ProductAtom {
                weight: a.weight * s,
                parties: a.parties.clone(),
            })
            .collect();
        Ok(ProductEnsemble {
            layout: self.layout.clone(),
            atoms,
        })
    }

    pub fn assemble(&self) -> HermitianOperator {
        assemble(self)
    }

    /// Maps every local operator through `alpha -> V alpha V^dagger`.
    pub(crate) fn embed(&self, isometries: &[CMatrix], layout: SubsystemLayout) -> ProductEnsemble {
        let atoms = self
            .atoms
            .iter()
            .map(|a| ProductAtom {
                weight: a.weight,
                parties: a
                    .parties
                    .iter()
                    .zip(isometries)
                    .map(|(alpha, v)| embed_operator(alpha, v))
                    .collect(),
            })
            .collect();
        ProductEnsemble { layout, atoms }
    }
}

fn embed_operator(alpha: &HermitianOperator, v: &CMatrix) -> HermitianOperator {
    HermitianOperator::from_hermitian_unchecked(v.matmul(alpha.matrix()).matmul_adjoint(v))
}

/// `sum_i p_i alpha_i^1 ⊗ ... ⊗ alpha_i^n`.
pub fn assemble(e: &ProductEnsemble) -> HermitianOperator {
    let d = e.layout.total_dim();
    let mut out = HermitianOperator::zeros(d);
    for atom in &e.atoms {
        out.axpy(atom.weight, &atom.assemble());
    }
    out
}

/// Separable state with the same single-party marginals as the pure state
/// `omega`, built from iterated Schmidt decompositions across the cuts
/// `1 | 2..n`, `2 | 3..n`, ...
///
/// `order` optionally relabels which party is split off first, second, and
/// so on; the default is `0, 1, ..., n-1`.
pub fn lemma_omega_state(
    omega: &PureState,
    layout: &SubsystemLayout,
    order: Option<&[usize]>,
) -> Result<ProductEnsemble> {
    layout.check_dim(omega.dim())?;
    let n = layout.parties();
    if n < 2 {
        return Err(Error::TooFewParties {
            required: 2,
            found: n,
        });
    }
    let order: Vec<usize> = match order {
        Some(o) => {
            let mut sorted = o.to_vec();
            sorted.sort_unstable();
            if sorted != (0..n).collect::<Vec<_>>() {
                return Err(Error::InvalidWeights(
                    "order must be a permutation of the parties",
                ));
            }
            o.to_vec()
        }
        None => (0..n).collect(),
    };
    let permuted = permute_vector(omega.amplitudes(), layout, &order);
    let dims: Vec<usize> = order.iter().map(|&s| layout.dim(s)).collect();

    let mut chains: Vec<(f64, Vec<Vec<Complex64>>)> = Vec::new();
    schmidt_chain(&permuted, &dims, 1.0, Vec::new(), &mut chains)?;

    let atoms = chains
        .into_iter()
        .map(|(weight, vectors)| {
            let mut parties = alloc::vec![HermitianOperator::zeros(1); n];
            for (pos, v) in vectors.iter().enumerate() {
                parties[order[pos]] = HermitianOperator::projector(v);
            }
            ProductAtom { weight, parties }
        })
        .collect::<Vec<_>>();
    let total: f64 = atoms.iter().map(|a| a.weight).sum();
    let atoms = atoms
        .into_iter()
        .map(|a| ProductAtom {
            weight: a.weight / total,
            ..a
        })
        .collect();
    Ok(ProductEnsemble {
        layout: layout.clone(),
        atoms,
    })
}

fn schmidt_chain(
    amps: &[Complex64],
    dims: &[usize],
    weight: f64,
    prefix: Vec<Vec<Complex64>>,
    out: &mut Vec<(f64, Vec<Vec<Complex64>>)>,
) -> Result<()> {
    if dims.len() == 1 {
        let mut vectors = prefix;
        vectors.push(amps.to_vec());
        out.push((weight, vectors));
        return Ok(());
    }
    let sd = schmidt_bipartite(amps, dims[0])?;
    for ((c, u), v) in sd
        .coefficients
        .iter()
        .zip(sd.left_vectors)
        .zip(sd.right_vectors)
    {
        let mut next = prefix.clone();
        next.push(u);
        schmidt_chain(&v, &dims[1..], weight * c * c, next, out)?;
    }
    Ok(())
}

/// Reorders tensor factors so that position `k` of the result holds party `order[k]`.
fn permute_vector(amps: &[Complex64], layout: &SubsystemLayout, order: &[usize]) -> Vec<Complex64> {
    let new_layout = SubsystemLayout::new(order.iter().map(|&s| layout.dim(s)).collect())
        .expect("permuted layout of a valid layout");
    let mut out = alloc::vec![Complex64::new(0.0, 0.0); amps.len()];
    let mut digits = alloc::vec![0usize; order.len()];
    for (i, slot) in out.iter_mut().enumerate() {
        let nd = new_layout.digits(i);
        for (k, &s) in order.iter().enumerate() {
            digits[s] = nd[k];
        }
        *slot = amps[layout.flat_index(&digits)];
    }
    out
}

/// `m` atoms with full-rank random local states and random weights.
pub fn random_separable(layout: &SubsystemLayout, m: usize, seed: u64) -> Result<ProductEnsemble> {
    if m == 0 {
        return Err(Error::InvalidRank {
            rank: 0,
            dim: layout.total_dim(),
        });
    }
    let mut sampler = Sampler::new(seed);
    let raw: Vec<f64> = (0..m)
        .map(|_| -crate::math::ln(1.0 - sampler.uniform()))
        .collect();
    let total: f64 = raw.iter().sum();
    let mut atoms = Vec::with_capacity(m);
    for w in raw {
        let parties = layout
            .dims()
            .iter()
            .map(|&d| sampler.density(d, d))
            .collect::<Result<Vec<_>>>()?;
        atoms.push(ProductAtom {
            weight: w / total,
            parties,
        });
    }
    Ok(ProductEnsemble {
        layout: layout.clone(),
        atoms,
    })
}

/// Compression `X -> Q X Q + Tr[(I - Q) X] tau` onto `⊗_s supp rho_{A_s}`,
/// with `tau` the product of the top eigenvectors of the marginals.
pub fn support_compress(
    sigma: &ProductEnsemble,
    rho: &HermitianOperator,
) -> Result<ProductEnsemble> {
    let layout = sigma.layout();
    layout.check_dim(rho.dim())?;
    let mut projectors = Vec::with_capacity(layout.parties());
    let mut tau = Vec::with_capacity(layout.parties());
    for m in marginals(rho, layout)? {
        let e = m.eig();
        let rank = e.numerical_rank();
        if rank == 0 {
            return Err(Error::EmptySupport);
        }
        projectors.push(e.top_projector(rank));
        tau.push(HermitianOperator::projector(&e.vector(0)));
    }

    let mut atoms = Vec::with_capacity(sigma.len() + 1);
    let mut lost = 0.0;
    for atom in sigma.atoms() {
        let mut kept = 1.0;
        let mut parties = Vec::with_capacity(layout.parties());
        for (alpha, p) in atom.parties.iter().zip(&projectors) {
            let c = HermitianOperator::from_hermitian_unchecked(
                p.matrix().matmul(alpha.matrix()).matmul(p.matrix()),
            );
            let t = c.trace();
            kept *= t.max(0.0);
            parties.push(c);
        }
        lost += atom.weight * (1.0 - kept);
        if kept > 0.0 {
            let parties = parties.into_iter().map(|c| {
                let t = c.trace();
                c.scale(1.0 / t)
            });
            atoms.push(ProductAtom {
                weight: atom.weight * kept,
                parties: parties.collect(),
            });
        }
    }
    if lost > 0.0 {
        atoms.push(ProductAtom {
            weight: lost,
            parties: tau,
        });
    }
    Ok(ProductEnsemble {
        layout: layout.clone(),
        atoms,
    })
}

/// Orthonormal bases `V_s` (`d_s x k_s`) of the supports of the marginals.
#[derive(Debug, Clone)]
pub struct LocalSupports {
    pub isometries: Vec<CMatrix>,
    pub reduced: SubsystemLayout,
}

impl LocalSupports {
    pub fn of(rho: &HermitianOperator, layout: &SubsystemLayout) -> Result<Self> {
        let mut isometries = Vec::with_capacity(layout.parties());
        let mut dims = Vec::with_capacity(layout.parties());
        for m in marginals(rho, layout)? {
            let e = m.eig();
            let k = e.numerical_rank().max(1);
            let d = m.dim();
            isometries.push(CMatrix::from_fn(d, k, |i, j| e.vectors.get(i, j)));
            dims.push(k);
        }
        Ok(LocalSupports {
            isometries,
            reduced: SubsystemLayout::new(dims)?,
        })
    }

    /// True when every marginal already has full rank.
    pub fn is_trivial(&self) -> bool {
        self.isometries.iter().all(|v| v.rows() == v.cols())
    }

    fn full_isometry(&self) -> CMatrix {
        let mut w = CMatrix::identity(1);
        for v in &self.isometries {
            w = w.kron(v);
        }
        w
    }

    /// `W^dagger X W` with `W = ⊗_s V_s`.
    pub fn compress(&self, x: &HermitianOperator) -> HermitianOperator {
        x.conjugate_adjoint(&self.full_isometry())
    }

    /// `W X W^dagger`
    pub fn expand(&self, x: &HermitianOperator) -> HermitianOperator {
        x.conjugate(&self.full_isometry())
    }

    pub fn expand_ensemble(
        &self,
        e: &ProductEnsemble,
        layout: &SubsystemLayout,
    ) -> ProductEnsemble {
        e.embed(&self.isometries, layout.clone())
    }
}
