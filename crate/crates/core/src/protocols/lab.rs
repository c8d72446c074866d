//! A shared pure state together with who holds each qubit and the true
//! frames, so that protocols can be written as sequences of local actions.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::frames::{
    apply_local_gate, measure_local, ChargeMap, FrameAssignment, Party, PartyLayout,
};
use crate::hilbert::{gates, MixedState, Operator, PureState, QuantumState, UnitaryOp};

#[derive(Clone, Debug)]
pub struct Lab {
    state: PureState,
    layout: PartyLayout,
    charges: ChargeMap,
    frame: FrameAssignment,
    norm_defect: f64,
    uses: ChannelUses,
}

/// Channel uses spent so far.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ChannelUses {
    pub qubits: u32,
    pub cobits: u32,
    pub cbits: u32,
}

fn other(party: Party) -> Party {
    match party {
        Party::Alice => Party::Bob,
        _ => Party::Alice,
    }
}

impl Lab {
    pub fn new(frame: FrameAssignment) -> Self {
        Self {
            state: PureState::basis(0, 0).expect("empty register"),
            layout: PartyLayout::new(Vec::new()),
            charges: ChargeMap::new(Vec::new()),
            frame,
            norm_defect: 0.0,
            uses: ChannelUses::default(),
        }
    }

    pub fn state(&self) -> &PureState {
        &self.state
    }

    pub fn layout(&self) -> &PartyLayout {
        &self.layout
    }

    pub fn charges(&self) -> &ChargeMap {
        &self.charges
    }

    pub fn frame(&self) -> &FrameAssignment {
        &self.frame
    }

    pub fn n_qubits(&self) -> usize {
        self.state.n_qubits()
    }

    /// Largest deviation of the squared norm from one seen so far.
    pub fn norm_defect(&self) -> f64 {
        self.norm_defect
    }

    pub fn uses(&self) -> ChannelUses {
        self.uses
    }

    fn track(&mut self) {
        let d = (self.state.norm_sqr() - 1.0).abs();
        if d > self.norm_defect {
            self.norm_defect = d;
        }
    }

    /// Appends `sub` with one owner and one charge per qubit; returns the new
    /// qubit indices.
    pub fn add_shared(&mut self, sub: &PureState, owners: &[Party], charges: &[u32]) -> Result<Vec<usize>> {
        let k = sub.n_qubits();
        if owners.len() != k || charges.len() != k {
            return Err(Error::DimensionMismatch(owners.len(), k));
        }
        let start = self.n_qubits();
        self.state = self.state.tensor(sub)?;
        for (&o, &c) in owners.iter().zip(charges) {
            self.layout.push(o);
            self.charges.push(c);
        }
        self.track();
        Ok((start..start + k).collect())
    }

    /// Appends a state held entirely by `party`, charge 1 per qubit.
    pub fn add(&mut self, party: Party, sub: &PureState) -> Result<Vec<usize>> {
        let k = sub.n_qubits();
        self.add_shared(sub, &alloc::vec![party; k], &alloc::vec![1; k])
    }

    /// A fresh `|0>` for `party`.
    pub fn fresh(&mut self, party: Party) -> Result<usize> {
        Ok(self.add(party, &PureState::basis(1, 0)?)?[0])
    }

    /// `party` applies `u` on `targets` in her own frame.
    pub fn local(&mut self, party: Party, u: &UnitaryOp, targets: &[usize]) -> Result<()> {
        self.state = apply_local_gate(
            &self.state,
            u,
            targets,
            party,
            &self.frame,
            &self.layout,
            &self.charges,
        )?;
        self.track();
        Ok(())
    }

    /// One use of a noiseless quantum channel.
    pub fn send(&mut self, qubit: usize, to: Party) {
        self.layout.transfer(qubit, to);
        self.uses.qubits += 1;
    }

    /// Relabels the owner of `qubit` without spending anything; used for
    /// bookkeeping of resources that are handed over by definition.
    pub fn reassign(&mut self, qubit: usize, to: Party) {
        self.layout.transfer(qubit, to);
    }

    /// Applies `u` without any frame, as a channel or the environment would.
    pub fn apply_raw(&mut self, u: &UnitaryOp, targets: &[usize]) -> Result<()> {
        self.state = self.state.apply_unitary(u, targets)?;
        self.track();
        Ok(())
    }

    /// The lab state with qubits reordered as listed.
    pub fn permuted(&self, order: &[usize]) -> Result<PureState> {
        self.state.permute(order)
    }

    /// One cobit from the owner of `src` to the other party: a coherent copy
    /// of `src` in the sender's basis onto a fresh qubit. Returns that qubit.
    pub fn cobit(&mut self, src: usize) -> Result<usize> {
        let sender = self.layout.owner(src);
        let copy = self.fresh(sender)?;
        self.local(sender, &gates::cnot(), &[src, copy])?;
        self.reassign(copy, other(sender));
        self.uses.cobits += 1;
        Ok(copy)
    }

    /// One cbit from the owner of `src`: a cobit into the environment whose
    /// computational value is copied to the receiver. The environment qubit
    /// stays in the register (owned by `Environment`) so that the state
    /// remains pure; trace it out when evaluating. Returns the receiver's qubit.
    pub fn cbit(&mut self, src: usize) -> Result<usize> {
        let sender = self.layout.owner(src);
        let env = self.fresh(sender)?;
        self.local(sender, &gates::cnot(), &[src, env])?;
        self.reassign(env, Party::Environment);
        let out = self.fresh(Party::Environment)?;
        self.apply_raw(&gates::cnot(), &[env, out])?;
        self.reassign(out, other(sender));
        self.uses.cbits += 1;
        Ok(out)
    }

    /// Measurement by `party` with one lab per outcome (`None` when the
    /// outcome cannot occur).
    pub fn branches(
        &self,
        party: Party,
        operators: &[Operator],
        targets: &[usize],
    ) -> Result<Vec<(f64, Option<Lab>)>> {
        let out = measure_local(
            &self.state,
            party,
            &self.frame,
            &self.layout,
            &self.charges,
            targets,
            operators,
        )?;
        Ok(out
            .into_iter()
            .map(|b| {
                let lab = b.state.map(|state| {
                    let mut next = self.clone();
                    next.state = state;
                    next.track();
                    next
                });
                (b.probability, lab)
            })
            .collect())
    }

    /// Keeps only the outcome `op` (written in `party`'s frame); returns its
    /// probability. The family this belongs to is the caller's concern.
    pub fn postselect(&mut self, party: Party, op: &Operator, targets: &[usize]) -> Result<f64> {
        self.layout.check_owned(party, targets)?;
        let local = crate::frames::frame_conjugate_operator(
            op,
            self.frame.phase(party),
            &self.charges,
            targets,
        )?;
        let (p, post) = self.state.apply_kraus(&local, targets)?;
        match post {
            Some(s) => {
                self.state = s;
                self.track();
                Ok(p)
            }
            None => Err(Error::ZeroVector),
        }
    }

    pub fn reduced(&self, qubits: &[usize]) -> Result<MixedState> {
        self.state.reduced(qubits)
    }

    /// `<target| ρ_qubits |target>` for the reduced state on `qubits`.
    pub fn fidelity_on(&self, qubits: &[usize], target: &PureState) -> Result<f64> {
        crate::hilbert::fidelity(target, &self.reduced(qubits)?)
    }

    /// The pure factor on `qubits`, assuming the lab state factorizes across
    /// `qubits` and the rest. Check with [`Lab::fidelity_on`] before relying on it.
    pub fn factor(&self, qubits: &[usize]) -> Result<PureState> {
        let rest: Vec<usize> = (0..self.n_qubits()).filter(|q| !qubits.contains(q)).collect();
        let order: Vec<usize> = qubits.iter().chain(&rest).copied().collect();
        let permuted = self.state.permute(&order)?;
        let inner = 1usize << rest.len();
        // Take the column with the largest weight as the factor.
        let best = (0..inner)
            .max_by(|&a, &b| {
                let w = |c: usize| -> f64 {
                    (0..1usize << qubits.len())
                        .map(|r| permuted.amplitude(r * inner + c).norm_sqr())
                        .sum()
                };
                w(a).partial_cmp(&w(b)).unwrap_or(core::cmp::Ordering::Equal)
            })
            .unwrap_or(0);
        let amps = (0..1usize << qubits.len())
            .map(|r| permuted.amplitude(r * inner + best))
            .collect();
        PureState::normalized(qubits.len(), amps)
    }
}
