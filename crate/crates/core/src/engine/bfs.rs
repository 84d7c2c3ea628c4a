//! Exhaustive closure of a generating set; only for small images.

use rustc_hash::FxHashSet;

use super::modmat::{MatRing, ModMat};

/// Result of a bounded closure.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BfsOutcome {
    Order(u64),
    /// More than `cap` elements were found.
    Exceeded,
}

fn bits_per_entry(m: u64) -> u32 {
    if m <= 1 {
        1
    } else {
        64 - (m - 1).leading_zeros()
    }
}

fn pack(a: &[u64], bits: u32) -> u128 {
    a.iter().fold(0u128, |acc, &x| (acc << bits) | x as u128)
}

fn unpack(mut key: u128, bits: u32, len: usize) -> ModMat {
    let mask = (1u128 << bits) - 1;
    let mut out: ModMat = smallvec::smallvec![0; len];
    for slot in out.iter_mut().rev() {
        *slot = (key & mask) as u64;
        key >>= bits;
    }
    out
}

/// Order of `<gens>` inside `SL(n, Z/m)` by breadth-first closure under
/// right multiplication, giving up after `cap` elements.
pub fn closure_order(ring: &MatRing, gens: &[ModMat], cap: usize) -> BfsOutcome {
    let n = ring.degree();
    let gens: Vec<&ModMat> = gens.iter().filter(|g| !ring.is_identity(g)).collect();
    if gens.is_empty() {
        return BfsOutcome::Order(1);
    }
    let bits = bits_per_entry(ring.modulus());
    if bits as usize * n * n <= 128 {
        let mut seen: FxHashSet<u128> = FxHashSet::default();
        let mut queue: Vec<u128> = Vec::new();
        let id = pack(&ring.identity(), bits);
        seen.insert(id);
        queue.push(id);
        let mut head = 0;
        while head < queue.len() {
            let x = unpack(queue[head], bits, n * n);
            head += 1;
            for g in &gens {
                let y = pack(&ring.mul(&x, g), bits);
                if seen.insert(y) {
                    if seen.len() > cap {
                        return BfsOutcome::Exceeded;
                    }
                    queue.push(y);
                }
            }
        }
        BfsOutcome::Order(seen.len() as u64)
    } else {
        let mut seen: FxHashSet<ModMat> = FxHashSet::default();
        let mut queue: Vec<ModMat> = vec![ring.identity()];
        seen.insert(ring.identity());
        let mut head = 0;
        while head < queue.len() {
            let x = queue[head].clone();
            head += 1;
            for g in &gens {
                let y = ring.mul(&x, g);
                if !seen.contains(&y) {
                    seen.insert(y.clone());
                    if seen.len() > cap {
                        return BfsOutcome::Exceeded;
                    }
                    queue.push(y);
                }
            }
        }
        BfsOutcome::Order(seen.len() as u64)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use smallvec::smallvec;

    #[test]
    fn single_transvection_mod_3() {
        let r = MatRing::new(3, 3).unwrap();
        let t: ModMat = smallvec![1, 1, 0, 0, 1, 0, 0, 0, 1];
        assert_eq!(closure_order(&r, &[t], 100), BfsOutcome::Order(3));
    }

    #[test]
    fn sl2_mod_5() {
        let r = MatRing::new(2, 5).unwrap();
        let a: ModMat = smallvec![1, 1, 0, 1];
        let b: ModMat = smallvec![1, 0, 1, 1];
        assert_eq!(closure_order(&r, &[a.clone(), b.clone()], 1000), BfsOutcome::Order(120));
        assert_eq!(closure_order(&r, &[a, b], 50), BfsOutcome::Exceeded);
    }

    #[test]
    fn wide_keys_fall_back() {
        // 4x4 mod 2^9 needs 144 bits
        let r = MatRing::new(4, 512).unwrap();
        let mut t = r.identity();
        t[1] = 1;
        assert_eq!(closure_order(&r, &[t], 10_000), BfsOutcome::Order(512));
    }

    #[test]
    fn pack_roundtrip() {
        let a = [5u64, 0, 17, 3];
        assert_eq!(unpack(pack(&a, 5), 5, 4).as_slice(), &a);
    }
}
