use std::fmt;

use crate::error::{Error, Result};

/// A partition of the slots `{1..m}` into `k` blocks, stored as the
/// surjective map slot -> block (both 1-based).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    assignment: Vec<usize>,
    blocks: usize,
}

impl Partition {
    /// Validates a 1-based block assignment. The map must hit every block
    /// `1..=k`, where `k` is the largest label used.
    pub fn new(assignment: Vec<usize>) -> Result<Self> {
        if assignment.is_empty() {
            return Err(Error::InvalidPartition("assignment is empty".into()));
        }
        if assignment.contains(&0) {
            return Err(Error::InvalidPartition("block labels start at 1".into()));
        }
        let k = *assignment.iter().max().expect("nonempty");
        let mut seen = vec![false; k];
        for &b in &assignment {
            seen[b - 1] = true;
        }
        if let Some(missing) = seen.iter().position(|&s| !s) {
            return Err(Error::InvalidPartition(format!(
                "map {assignment:?} is not surjective: block {} is empty",
                missing + 1
            )));
        }
        Ok(Self {
            assignment,
            blocks: k,
        })
    }

    /// Slot count `m`.
    pub fn slots(&self) -> usize {
        self.assignment.len()
    }

    /// Block count `k`.
    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    /// 0-based block of the 0-based slot `p`.
    pub fn block_of(&self, p: usize) -> usize {
        self.assignment[p] - 1
    }

    /// Slots (0-based) of every block, blocks in label order.
    pub fn block_members(&self) -> Vec<Vec<usize>> {
        let mut out = vec![Vec::new(); self.blocks];
        for (p, &b) in self.assignment.iter().enumerate() {
            out[b - 1].push(p);
        }
        out
    }

    pub fn is_pair_partition(&self) -> bool {
        self.block_members().iter().all(|b| b.len() == 2)
    }
}

impl fmt::Debug for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{")?;
        for (i, b) in self.assignment.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{b}")?;
        }
        write!(f, "}}")
    }
}

impl fmt::Display for Partition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Validating constructor, mirroring [`Partition::new`].
pub fn make_partition(assignment: Vec<usize>) -> Result<Partition> {
    Partition::new(assignment)
}

pub fn is_pair_partition(p: &Partition) -> bool {
    p.is_pair_partition()
}

/// Largest slot count accepted by [`enumerate_partitions`].
pub const MAX_ENUMERATED_SLOTS: usize = 6;

/// All set partitions of `{1..m}` as restricted growth strings, in
/// lexicographic order.
pub fn enumerate_partitions(m: usize) -> Result<Vec<Partition>> {
    if m == 0 || m > MAX_ENUMERATED_SLOTS {
        return Err(Error::InvalidArgument(format!(
            "partition enumeration supports 1..={MAX_ENUMERATED_SLOTS} slots, got {m}"
        )));
    }
    let mut out = Vec::new();
    // a[i] is the 0-based block of slot i; a[0] = 0 and
    // a[i] <= 1 + max(a[..i]).
    let mut a = vec![0usize; m];
    loop {
        out.push(Partition::new(a.iter().map(|&b| b + 1).collect())?);
        // Find the rightmost slot that can still grow.
        let mut i = m - 1;
        loop {
            if i == 0 {
                return Ok(out);
            }
            let prefix_max = *a[..i].iter().max().expect("nonempty prefix");
            if a[i] <= prefix_max {
                a[i] += 1;
                for x in &mut a[i + 1..] {
                    *x = 0;
                }
                break;
            }
            i -= 1;
        }
    }
}
