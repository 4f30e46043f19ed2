//! Photon registers: named photons over a joint mode space.
//!
//! A register is pure ([`PhotonRegister`]) until a beamsplitter with q < 1
//! forces a mixture ([`MixedRegister`]). Both keep one subsystem per photon
//! (2 modes for a polarization-only photon, 4 for a dual-rail photon) and
//! evolve by element operators; post-selected elements shrink the norm, and
//! the squared norm (or trace) is the running success probability.

use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::hilbert::{embed_operator, DensityMatrix, HybridState};
use crate::photonics::elements::{resolve_op, Interference, OpticalElement};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Photon {
    pub label: String,
    pub dual_rail: bool,
}

impl Photon {
    pub fn pol(label: &str) -> Self {
        Self {
            label: label.into(),
            dual_rail: false,
        }
    }

    pub fn dual(label: &str) -> Self {
        Self {
            label: label.into(),
            dual_rail: true,
        }
    }

    pub fn dim(&self) -> usize {
        if self.dual_rail {
            4
        } else {
            2
        }
    }
}

fn dims_of(photons: &[Photon]) -> Vec<usize> {
    photons.iter().map(Photon::dim).collect()
}

fn index_of(photons: &[Photon], label: &str) -> Result<usize> {
    photons
        .iter()
        .position(|p| p.label == label)
        .ok_or_else(|| Error::Register(format!("no photon labelled {label}")))
}

/// Pure register state.
#[derive(Debug, Clone)]
pub struct PhotonRegister {
    photons: Vec<Photon>,
    state: HybridState,
}

impl PhotonRegister {
    pub fn new(photons: Vec<Photon>, state: HybridState) -> Result<Self> {
        if state.dims() != dims_of(&photons).as_slice() {
            return Err(Error::Register(format!(
                "state dims {:?} do not match photons {:?}",
                state.dims(),
                dims_of(&photons)
            )));
        }
        Ok(Self { photons, state })
    }

    pub fn photons(&self) -> &[Photon] {
        &self.photons
    }

    pub fn state(&self) -> &HybridState {
        &self.state
    }

    pub fn photon_index(&self, label: &str) -> Result<usize> {
        index_of(&self.photons, label)
    }

    /// Squared norm: the probability of having survived all post-selected
    /// elements so far.
    pub fn success_probability(&self) -> f64 {
        self.state.norm_sqr()
    }

    /// Applies one element in the coherent regime, where every element is a
    /// single operator.
    pub fn apply_element(&self, element: &OpticalElement) -> Result<Self> {
        let (kraus, labels) = element.kraus(Interference::Coherent);
        debug_assert_eq!(kraus.len(), 1);
        let targets: Vec<usize> = labels
            .iter()
            .map(|l| self.photon_index(l))
            .collect::<Result<_>>()?;
        self.check_element_targets(element, &targets)?;
        let op = self.resolve_for_targets(kraus.into_iter().next().expect("one"), &targets)?;
        let tdims: Vec<usize> = targets.iter().map(|&t| self.state.dims()[t]).collect();
        let gate = crate::hilbert::GateMatrix::operator(&tdims, op)?;
        let out = crate::hilbert::apply(&self.state, &gate, &targets)?;
        Ok(Self {
            photons: self.photons.clone(),
            state: out,
        })
    }

    pub fn apply_circuit(&self, elements: &[OpticalElement]) -> Result<Self> {
        let mut reg = self.clone();
        for e in elements {
            reg = reg.apply_element(e)?;
        }
        Ok(reg)
    }

    fn check_element_targets(&self, element: &OpticalElement, targets: &[usize]) -> Result<()> {
        check_targets(&self.photons, element, targets)
    }

    fn resolve_for_targets(
        &self,
        op: DMatrix<Complex64>,
        targets: &[usize],
    ) -> Result<DMatrix<Complex64>> {
        if targets.len() == 1 {
            resolve_op(op, self.state.dims()[targets[0]])
        } else {
            Ok(op)
        }
    }

    /// Contracts one photon with `⟨bra|` (a post-selected detection) and
    /// removes it; the register norm shrinks by the branch amplitude.
    pub fn project_photon(&self, label: &str, bra: &[Complex64]) -> Result<Self> {
        let idx = self.photon_index(label)?;
        let (state, _) = self.state.project_subsystem(idx, bra)?;
        let mut photons = self.photons.clone();
        photons.remove(idx);
        Ok(Self { photons, state })
    }

    /// Keeps only the listed modes of one photon, reindexed in order; a
    /// dual-rail photon restricted to two modes becomes polarization-only.
    pub fn restrict_photon(&self, label: &str, keep: &[usize]) -> Result<Self> {
        let idx = self.photon_index(label)?;
        let state = self.state.restrict_subsystem(idx, keep)?;
        let mut photons = self.photons.clone();
        if keep.len() == 2 {
            photons[idx].dual_rail = false;
        } else if keep.len() != 4 {
            return Err(Error::Register(format!(
                "cannot keep {} modes of a photon",
                keep.len()
            )));
        }
        Ok(Self { photons, state })
    }
}

/// Mixed register state for partially-distinguishable photons.
#[derive(Debug, Clone)]
pub struct MixedRegister {
    photons: Vec<Photon>,
    rho: DensityMatrix,
}

impl MixedRegister {
    pub fn new(photons: Vec<Photon>, rho: DensityMatrix) -> Result<Self> {
        if rho.dims() != dims_of(&photons).as_slice() {
            return Err(Error::Register(format!(
                "density dims {:?} do not match photons {:?}",
                rho.dims(),
                dims_of(&photons)
            )));
        }
        Ok(Self { photons, rho })
    }

    pub fn from_pure(reg: &PhotonRegister) -> Self {
        let weight = reg.state().norm_sqr();
        let normalized = DensityMatrix::from_pure(reg.state());
        let rho = DensityMatrix::unnormalized(
            reg.state().dims(),
            normalized.matrix() * Complex64::new(weight, 0.0),
        )
        .expect("valid by construction");
        Self {
            photons: reg.photons().to_vec(),
            rho,
        }
    }

    pub fn photons(&self) -> &[Photon] {
        &self.photons
    }

    pub fn rho(&self) -> &DensityMatrix {
        &self.rho
    }

    pub fn photon_index(&self, label: &str) -> Result<usize> {
        index_of(&self.photons, label)
    }

    pub fn success_probability(&self) -> f64 {
        self.rho.trace()
    }

    pub fn apply_element(&self, element: &OpticalElement, regime: Interference) -> Result<Self> {
        let (kraus, labels) = element.kraus(regime);
        let targets: Vec<usize> = labels
            .iter()
            .map(|l| self.photon_index(l))
            .collect::<Result<_>>()?;
        check_targets(&self.photons, element, &targets)?;
        let resolved: Vec<DMatrix<Complex64>> = kraus
            .into_iter()
            .map(|k| {
                if targets.len() == 1 {
                    resolve_op(k, self.rho.dims()[targets[0]])
                } else {
                    Ok(k)
                }
            })
            .collect::<Result<_>>()?;
        let rho = self.rho.apply_kraus(&resolved, &targets)?;
        Ok(Self {
            photons: self.photons.clone(),
            rho,
        })
    }

    pub fn apply_circuit(&self, elements: &[OpticalElement], regime: Interference) -> Result<Self> {
        let mut reg = self.clone();
        for e in elements {
            reg = reg.apply_element(e, regime)?;
        }
        Ok(reg)
    }

    /// Contracts one photon with `⟨bra|` and removes it from the register.
    pub fn project_photon(&self, label: &str, bra: &[Complex64]) -> Result<Self> {
        let idx = self.photon_index(label)?;
        let dims = self.rho.dims().to_vec();
        let d = dims[idx];
        if bra.len() != d {
            return Err(Error::LengthMismatch {
                expected: d,
                got: bra.len(),
            });
        }
        // selection operator ⟨bra| ⊗ identity on the rest, as a full-space
        // rectangular map built index-wise
        let mut rem_dims = dims.clone();
        rem_dims.remove(idx);
        let rem_total: usize = rem_dims.iter().product();
        let total: usize = dims.iter().product();
        let mut sel = DMatrix::<Complex64>::zeros(rem_total, total);
        let mut levels = vec![0usize; dims.len()];
        for i in 0..total {
            crate::hilbert::unflatten(&dims, i, &mut levels);
            let l = levels[idx];
            let mut rem_levels = levels.clone();
            rem_levels.remove(idx);
            let r = crate::hilbert::flat_index(&rem_dims, &rem_levels);
            sel[(r, i)] += bra[l].conj();
        }
        let out = &sel * self.rho.matrix() * sel.adjoint();
        let rho = DensityMatrix::unnormalized(&rem_dims, out)?;
        let mut photons = self.photons.clone();
        photons.remove(idx);
        Ok(Self { photons, rho })
    }

    /// Keeps only the listed modes of one photon.
    pub fn restrict_photon(&self, label: &str, keep: &[usize]) -> Result<Self> {
        let idx = self.photon_index(label)?;
        let dims = self.rho.dims().to_vec();
        let d = dims[idx];
        if keep.iter().any(|&m| m >= d) {
            return Err(Error::Register("mode out of range".into()));
        }
        let mut new_dims = dims.clone();
        new_dims[idx] = keep.len();
        let total: usize = dims.iter().product();
        let new_total: usize = new_dims.iter().product();
        let mut sel = DMatrix::<Complex64>::zeros(new_total, total);
        let mut levels = vec![0usize; dims.len()];
        for i in 0..total {
            crate::hilbert::unflatten(&dims, i, &mut levels);
            if let Some(pos) = keep.iter().position(|&m| m == levels[idx]) {
                let mut new_levels = levels.clone();
                new_levels[idx] = pos;
                sel[(crate::hilbert::flat_index(&new_dims, &new_levels), i)] =
                    Complex64::new(1.0, 0.0);
            }
        }
        let out = &sel * self.rho.matrix() * sel.adjoint();
        let rho = DensityMatrix::unnormalized(&new_dims, out)?;
        let mut photons = self.photons.clone();
        if keep.len() == 2 {
            photons[idx].dual_rail = false;
        }
        Ok(Self { photons, rho })
    }

    /// Applies a plain operator on selected photons (for decoding steps).
    pub fn apply_operator(&self, op: &DMatrix<Complex64>, targets: &[usize]) -> Result<Self> {
        let full = embed_operator(self.rho.dims(), op, targets);
        let out = &full * self.rho.matrix() * full.adjoint();
        let rho = DensityMatrix::unnormalized(self.rho.dims(), out)?;
        Ok(Self {
            photons: self.photons.clone(),
            rho,
        })
    }
}

fn check_targets(photons: &[Photon], element: &OpticalElement, targets: &[usize]) -> Result<()> {
    match element {
        OpticalElement::Ppbs { control, target, rail } => {
            if photons[targets[0]].dual_rail {
                return Err(Error::Register(format!(
                    "beamsplitter control {control} must be polarization-only"
                )));
            }
            if !photons[targets[1]].dual_rail {
                return Err(Error::Register(format!(
                    "beamsplitter target {target} must be dual-rail"
                )));
            }
            if *rail > 1 {
                return Err(Error::Register(format!("rail {rail} out of range")));
            }
        }
        OpticalElement::Hwp { photon, rail, .. }
        | OpticalElement::Qwp { photon, rail, .. }
        | OpticalElement::PhaseShift { photon, rail, .. }
        | OpticalElement::Loss { photon, rail, .. } => {
            if rail.is_some() && !photons[targets[0]].dual_rail {
                return Err(Error::Register(format!(
                    "rail condition on polarization-only photon {photon}"
                )));
            }
        }
        OpticalElement::Bd { photon, .. } => {
            if !photons[targets[0]].dual_rail {
                return Err(Error::Register(format!(
                    "beam displacer needs a dual-rail photon, got {photon}"
                )));
            }
        }
    }
    let _ = element.wants_dual_rail();
    Ok(())
}
