//! Fixed-magnetization configuration bases.
//!
//! A configuration is an `L`-bit occupation word: bit `j - 1` is set when
//! site `j` carries an up-spin (a magnon on the all-down vacuum). Sites are
//! 1-based in the public API, bit positions 0-based.

use crate::error::{Error, Result};

/// Largest supported chain length; occupation words fit in a `u32`.
pub const MAX_SITES: usize = 28;

/// Default cap on the sector dimension.
pub const DEFAULT_SECTOR_CAP: usize = 1 << 24;

pub type Config = u32;

/// `n choose k` in `u64`, saturating on overflow.
pub fn binomial(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u64 = 1;
    for i in 0..k {
        // exact at every step: acc * (n - i) is divisible by (i + 1)
        acc = match acc.checked_mul((n - i) as u64) {
            Some(v) => v / (i as u64 + 1),
            None => return u64::MAX,
        };
    }
    acc
}

/// Occupation of 1-based `site` in `config`.
#[inline]
pub fn occupied(config: Config, site: usize) -> bool {
    config >> (site - 1) & 1 == 1
}

/// Occupation as `0.0` / `1.0`.
#[inline]
pub fn occupation(config: Config, site: usize) -> f64 {
    (config >> (site - 1) & 1) as f64
}

/// `S^z` eigenvalue (±1/2) of `site`.
#[inline]
pub fn sz(config: Config, site: usize) -> f64 {
    occupation(config, site) - 0.5
}

/// Move the particle on `from` to `to` (the action of `S^+_to S^-_from`).
///
/// Returns `None` when `from` is empty or `to` is occupied.
#[inline]
pub fn apply_hop(config: Config, from: usize, to: usize) -> Option<Config> {
    debug_assert!(from != to && from >= 1 && to >= 1);
    if occupied(config, from) && !occupied(config, to) {
        Some(config ^ (1 << (from - 1)) ^ (1 << (to - 1)))
    } else {
        None
    }
}

/// Sum of occupied site indices, `Σ_{occupied} j`.
#[inline]
pub fn site_sum(config: Config) -> u32 {
    let mut c = config;
    let mut acc = 0;
    while c != 0 {
        acc += c.trailing_zeros() + 1;
        c &= c - 1;
    }
    acc
}

/// Image of `config` under the site inversion `j -> L + 1 - j`.
#[inline]
pub fn reverse_sites(config: Config, l: usize) -> Config {
    if l == 0 {
        return 0;
    }
    config.reverse_bits() >> (32 - l)
}

/// Binary rendering with site `L` leftmost and site 1 rightmost.
pub fn config_bits(config: Config, l: usize) -> String {
    format!("{config:0l$b}")
}

/// Ordered basis of all `L`-site words with exactly `M` set bits.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SectorBasis {
    l: usize,
    m: usize,
    configs: Vec<Config>,
}

impl SectorBasis {
    pub fn l(&self) -> usize {
        self.l
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn dim(&self) -> usize {
        self.configs.len()
    }

    pub fn configs(&self) -> &[Config] {
        &self.configs
    }

    pub fn config(&self, index: usize) -> Config {
        self.configs[index]
    }

    /// Ordinal of `config`, if it belongs to the sector.
    pub fn index_of(&self, config: Config) -> Option<usize> {
        self.configs.binary_search(&config).ok()
    }

    /// Permutation `perm[i] = index_of(reverse(configs[i]))`.
    pub fn inversion_permutation(&self) -> Vec<usize> {
        self.configs
            .iter()
            .map(|&c| {
                self.index_of(reverse_sites(c, self.l))
                    .expect("inversion preserves the sector")
            })
            .collect()
    }

    /// The right-packed domain wall: sites `L-M+1..=L` occupied.
    pub fn right_domain_wall(&self) -> Config {
        if self.m == 0 {
            0
        } else {
            (((1u64 << self.m) - 1) << (self.l - self.m)) as Config
        }
    }
}

/// Build the `(L, M)` sector with the default dimension cap.
pub fn build_sector(l: usize, m: usize) -> Result<SectorBasis> {
    build_sector_with_cap(l, m, DEFAULT_SECTOR_CAP)
}

/// Build the `(L, M)` sector, refusing dimensions above `cap`.
pub fn build_sector_with_cap(l: usize, m: usize, cap: usize) -> Result<SectorBasis> {
    if m > l {
        return Err(Error::invalid(format!("M = {m} exceeds L = {l}")));
    }
    if l > MAX_SITES {
        return Err(Error::Capacity {
            what: "L",
            value: l as u64,
            limit: MAX_SITES as u64,
        });
    }
    let dim = binomial(l, m);
    if dim > cap as u64 {
        return Err(Error::Capacity {
            what: "sector dimension",
            value: dim,
            limit: cap as u64,
        });
    }

    let mut configs = Vec::with_capacity(dim as usize);
    if m == 0 {
        configs.push(0);
    } else {
        // Gosper's hack walks the fixed-popcount words in increasing order.
        let limit: u64 = 1 << l;
        let mut c: u64 = (1 << m) - 1;
        while c < limit {
            configs.push(c as Config);
            let t = c & c.wrapping_neg();
            let r = c + t;
            c = (((r ^ c) >> 2) / t) | r;
        }
    }
    debug_assert_eq!(configs.len() as u64, dim);
    Ok(SectorBasis { l, m, configs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Pascal-triangle binomial, independent of the multiplicative formula.
    fn pascal(n: usize, k: usize) -> u64 {
        let mut row = vec![1u64];
        for _ in 0..n {
            let mut next = vec![1u64; row.len() + 1];
            for i in 1..row.len() {
                next[i] = row[i - 1] + row[i];
            }
            row = next;
        }
        row.get(k).copied().unwrap_or(0)
    }

    #[test]
    fn four_choose_two_in_ascending_order() {
        let b = build_sector(4, 2).unwrap();
        assert_eq!(
            b.configs(),
            &[0b0011, 0b0101, 0b0110, 0b1001, 0b1010, 0b1100]
        );
    }

    #[test]
    fn empty_sector_has_single_vacuum() {
        let b = build_sector(1, 0).unwrap();
        assert_eq!(b.configs(), &[0]);
    }

    #[test]
    fn twenty_choose_ten() {
        let b = build_sector(20, 10).unwrap();
        assert_eq!(b.dim(), 184_756);
        assert_eq!(pascal(20, 10), 184_756);
        assert!(b.configs().windows(2).all(|w| w[0] < w[1]));
        assert!(b.configs().iter().all(|c| c.count_ones() == 10));
    }

    #[test]
    fn sector_sizes_sum_to_full_space() {
        for l in 1..=8 {
            let total: usize = (0..=l).map(|m| build_sector(l, m).unwrap().dim()).sum();
            assert_eq!(total, 1 << l);
            for m in 0..=l {
                assert_eq!(binomial(l, m), pascal(l, m));
            }
        }
    }

    #[test]
    fn argument_and_capacity_errors() {
        assert!(matches!(build_sector(4, 5), Err(Error::InvalidArgument(_))));
        assert!(matches!(build_sector(29, 1), Err(Error::Capacity { .. })));
        assert!(matches!(
            build_sector_with_cap(20, 10, 1000),
            Err(Error::Capacity { value: 184_756, .. })
        ));
        assert!(build_sector(28, 1).is_ok());
    }

    #[test]
    fn hop_examples() {
        assert_eq!(apply_hop(0b0011, 1, 3), Some(0b0110));
        assert_eq!(apply_hop(0b0011, 3, 4), None);
        assert_eq!(apply_hop(0b0011, 1, 2), None);
    }

    #[test]
    fn site_helpers() {
        assert_eq!(site_sum(0b101001), 1 + 4 + 6);
        assert_eq!(reverse_sites(0b000111, 6), 0b111000);
        assert_eq!(config_bits(0b0011, 4), "0011");
        let b = build_sector(6, 3).unwrap();
        assert_eq!(b.right_domain_wall(), 0b111000);
        assert_eq!(build_sector(5, 0).unwrap().right_domain_wall(), 0);
    }

    proptest! {
        #[test]
        fn index_of_inverts_configs(l in 1usize..=12, frac in 0.0f64..=1.0) {
            let m = ((l as f64) * frac).round() as usize;
            let b = build_sector(l, m).unwrap();
            for (i, &c) in b.configs().iter().enumerate() {
                prop_assert_eq!(b.index_of(c), Some(i));
            }
        }

        #[test]
        fn hop_is_injective_and_reversible(
            config in 0u32..(1 << 10),
            from in 1usize..=10,
            to in 1usize..=10,
        ) {
            prop_assume!(from != to);
            if let Some(img) = apply_hop(config, from, to) {
                prop_assert_eq!(apply_hop(img, to, from), Some(config));
                prop_assert_eq!(img.count_ones(), config.count_ones());
            }
        }

        #[test]
        fn inversion_permutation_is_an_involution(l in 2usize..=10, m in 0usize..=10) {
            prop_assume!(m <= l);
            let b = build_sector(l, m).unwrap();
            let p = b.inversion_permutation();
            for i in 0..b.dim() {
                prop_assert_eq!(p[p[i]], i);
            }
        }
    }
}
