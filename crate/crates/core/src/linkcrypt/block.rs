//! Toy block ciphers used as link keys: a balanced Feistel network and the linear
//! (Hill) cipher over GF(2) together with its chosen-plaintext key recovery.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{gf2, GroupElement, GroupError, GroupSpec};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BlockError {
    #[error("half width {0} must be between 1 and 32 bits")]
    BadWidth(u32),
    #[error("block {block:#x} does not fit in {width} bits")]
    BlockTooWide { block: u64, width: u32 },
    #[error("chosen plaintexts span only rank {rank} of {dim}")]
    Underdetermined { rank: usize, dim: u32 },
    #[error("plaintext/ciphertext pairs are not consistent with any linear map")]
    Inconsistent,
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// 4-bit S-box of the PRESENT cipher.
pub const SBOX: [u8; 16] = [
    0xC, 0x5, 0x6, 0xB, 0x9, 0x0, 0xA, 0xD, 0x3, 0xE, 0xF, 0x8, 0x4, 0x7, 0x1, 0x2,
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FeistelKey {
    pub round_keys: Vec<u64>,
    /// Width of each half in bits; blocks are `2 * half_width` bits wide.
    pub half_width: u32,
}

fn mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

/// Round function on a `h`-bit half:
/// `F(r, k) = rotl_h(S(r ^ k), 1)` where `S` substitutes every complete low nibble
/// through [`SBOX`] and leaves a trailing partial nibble unchanged.
pub fn round_function(right: u64, key: u64, h: u32) -> u64 {
    let x = (right ^ key) & mask(h);
    let mut s = x;
    for nib in 0..h / 4 {
        let shift = nib * 4;
        let v = (x >> shift) & 0xF;
        s = (s & !(0xF << shift)) | (u64::from(SBOX[v as usize]) << shift);
    }
    if h == 1 {
        return s;
    }
    ((s << 1) | (s >> (h - 1))) & mask(h)
}

impl FeistelKey {
    pub fn new(round_keys: Vec<u64>, half_width: u32) -> Result<Self, BlockError> {
        if half_width == 0 || half_width > 32 {
            return Err(BlockError::BadWidth(half_width));
        }
        let round_keys = round_keys
            .into_iter()
            .map(|k| k & mask(half_width))
            .collect();
        Ok(Self {
            round_keys,
            half_width,
        })
    }

    pub fn random<R: Rng + ?Sized>(
        rng: &mut R,
        rounds: usize,
        half_width: u32,
    ) -> Result<Self, BlockError> {
        let keys = (0..rounds).map(|_| rng.random::<u64>()).collect();
        Self::new(keys, half_width)
    }

    pub fn block_width(&self) -> u32 {
        2 * self.half_width
    }

    fn run(&self, block: u64, keys: impl Iterator<Item = u64>) -> Result<u64, BlockError> {
        let h = self.half_width;
        if block & !mask(2 * h) != 0 {
            return Err(BlockError::BlockTooWide {
                block,
                width: 2 * h,
            });
        }
        let (mut left, mut right) = (block >> h, block & mask(h));
        for k in keys {
            let next = left ^ round_function(right, k, h);
            left = right;
            right = next;
        }
        // final swap of the halves
        Ok((right << h) | left)
    }

    /// The high half is `LE`, the low half `RE`.
    pub fn encrypt(&self, block: u64) -> Result<u64, BlockError> {
        self.run(block, self.round_keys.iter().copied())
    }

    /// Encryption with the round keys in reverse order.
    pub fn decrypt(&self, block: u64) -> Result<u64, BlockError> {
        self.run(block, self.round_keys.iter().rev().copied())
    }
}

/// Hill encryption `c = M p` over GF(2); `key` is a `MatGl(n)` element and blocks are
/// `n`-bit vectors (bit `r` is coordinate `r`).
pub fn hill_encrypt(key: &GroupElement, block: u64) -> Result<u64, BlockError> {
    let n = match key.spec().kind() {
        crate::groups::GroupKind::MatGl { n } => n,
        _ => {
            return Err(
                GroupError::InvalidParameter("Hill keys are GL(n,2) matrices".into()).into(),
            )
        }
    };
    if block & !mask(n) != 0 {
        return Err(BlockError::BlockTooWide { block, width: n });
    }
    Ok(gf2::apply(n, key.value(), block))
}

/// Chosen-plaintext recovery of the Hill matrix by elimination over GF(2). Every
/// pair is used, so pairs that no single linear map explains are rejected.
pub fn hill_recover_key(dim: u32, pairs: &[(u64, u64)]) -> Result<GroupElement, BlockError> {
    let spec = GroupSpec::mat_gl(dim)?;
    let m = mask(dim);
    let mut rows: Vec<(u64, u64)> = pairs.iter().map(|&(p, c)| (p & m, c & m)).collect();
    let mut rank = 0usize;
    for col in 0..dim {
        let Some(pivot) = (rank..rows.len()).find(|&r| (rows[r].0 >> col) & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let (pp, pc) = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && (row.0 >> col) & 1 == 1 {
                row.0 ^= pp;
                row.1 ^= pc;
            }
        }
        rank += 1;
    }
    if rows[rank..].iter().any(|&(p, c)| p == 0 && c != 0) {
        return Err(BlockError::Inconsistent);
    }
    if rank < dim as usize {
        return Err(BlockError::Underdetermined { rank, dim });
    }
    // rows[k] now reads M e_k = c_k: column k of M is c_k
    let mut matrix = 0u64;
    for (k, &(_, c)) in rows[..rank].iter().enumerate() {
        for r in 0..dim {
            if (c >> r) & 1 == 1 {
                matrix |= 1u64 << (r * dim + k as u32);
            }
        }
    }
    spec.element(matrix).map_err(|_| BlockError::Inconsistent)
}
