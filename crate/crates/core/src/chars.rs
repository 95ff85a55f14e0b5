//! Dirichlet characters modulo an odd prime.
//!
//! Characters are indexed against the smallest primitive root `g`: the
//! character with index `j` sends `g^k` to `exp(2 pi i j k / (p - 1))`.
//! All bookkeeping is done on exponents modulo `p - 1`; balls only appear
//! when a value is requested.

use alloc::vec;
use alloc::vec::Vec;

use crate::arith::{check_odd_prime, primitive_root};
use crate::ball::{Ball, ComplexBall};
use crate::Result;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Character {
    pub p: u64,
    pub j: u64,
    pub parity: Parity,
}

impl Character {
    pub fn new(p: u64, j: u64) -> Character {
        assert!(j < p - 1, "character index {j} out of range mod {p}");
        let parity = if j % 2 == 1 { Parity::Odd } else { Parity::Even };
        Character { p, j, parity }
    }

    pub fn is_principal(&self) -> bool {
        self.j == 0
    }

    pub fn is_odd(&self) -> bool {
        self.parity == Parity::Odd
    }

    pub fn conj(&self) -> Character {
        Character::new(self.p, (self.p - 1 - self.j) % (self.p - 1))
    }
}

/// Discrete logarithms modulo `p` with respect to the smallest primitive
/// root.
#[derive(Clone, Debug)]
pub struct CharacterTable {
    p: u64,
    g: u64,
    // dlog[n] for 1 <= n < p; dlog[0] is unused
    dlog: Vec<u32>,
    // pow[k] = g^k mod p for 0 <= k < p - 1
    pow: Vec<u32>,
}

impl CharacterTable {
    pub fn new(p: u64) -> Result<CharacterTable> {
        check_odd_prime(p)?;
        let g = primitive_root(p)?;
        let mut dlog = vec![0u32; p as usize];
        let mut pow = vec![0u32; (p - 1) as usize];
        let mut x = 1u64;
        for k in 0..p - 1 {
            pow[k as usize] = x as u32;
            dlog[x as usize] = k as u32;
            x = x * g % p;
        }
        Ok(CharacterTable { p, g, dlog, pow })
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn generator(&self) -> u64 {
        self.g
    }

    /// Order of the character group, `p - 1`.
    pub fn order(&self) -> u64 {
        self.p - 1
    }

    /// `k` with `g^k ≡ n (mod p)`, or `None` when `p | n`.
    pub fn dlog(&self, n: u64) -> Option<u64> {
        let r = n % self.p;
        if r == 0 {
            None
        } else {
            Some(u64::from(self.dlog[r as usize]))
        }
    }

    /// `g^k mod p`.
    pub fn power(&self, k: u64) -> u64 {
        u64::from(self.pow[(k % (self.p - 1)) as usize])
    }

    /// Exponent `e` with `chi(n) = exp(2 pi i e / (p - 1))`, or `None`
    /// when `chi(n) = 0`.
    pub fn exponent(&self, chi: &Character, n: u64) -> Option<u64> {
        assert_eq!(chi.p, self.p);
        self.dlog(n)
            .map(|k| ((u128::from(k) * u128::from(chi.j)) % u128::from(self.p - 1)) as u64)
    }

    pub fn value(&self, chi: &Character, n: u64, prec: u32) -> (Option<u64>, ComplexBall) {
        match self.exponent(chi, n) {
            None => (None, ComplexBall::zero(prec)),
            Some(e) => (Some(e), root_of_unity(e, self.p - 1, prec)),
        }
    }

    /// `exp(2 pi i k / (p - 1))` for every `k < p - 1`, with
    /// `roots[p - 1 - k]` the exact conjugate of `roots[k]`.
    pub fn roots_of_unity(&self, prec: u32) -> Vec<ComplexBall> {
        let n = self.p - 1;
        let mut roots = vec![ComplexBall::zero(prec); n as usize];
        for k in 0..=n / 2 {
            let z = root_of_unity(k, n, prec);
            if k != 0 && k != n - k {
                roots[(n - k) as usize] = z.conj();
            }
            roots[k as usize] = z;
        }
        roots
    }
}

/// `exp(2 pi i e / n)`; exact at multiples of a quarter turn.
pub fn root_of_unity(e: u64, n: u64, prec: u32) -> ComplexBall {
    let e = e % n;
    let zero = || Ball::zero(prec);
    let one = |s: i64| Ball::from_i64(s, prec);
    if e == 0 {
        return ComplexBall::one(prec);
    }
    if 2 * e == n {
        return ComplexBall::from_real(one(-1));
    }
    if 4 * e == n {
        return ComplexBall::new(zero(), one(1));
    }
    if 4 * e == 3 * n {
        return ComplexBall::new(zero(), one(-1));
    }
    let theta = Ball::pi(prec + 8)
        .mul_i64(2 * e as i64)
        .div_u64(n)
        .with_prec(prec);
    ComplexBall::cis(&theta)
}

/// Convenience wrapper building a fresh table; prefer
/// [`CharacterTable::value`] in loops.
pub fn character_value(chi: &Character, n: u64, prec: u32) -> Result<(Option<u64>, ComplexBall)> {
    Ok(CharacterTable::new(chi.p)?.value(chi, n, prec))
}

/// The `(p - 1) / 2` odd characters in ascending index order.
pub fn odd_characters(p: u64) -> Result<Vec<Character>> {
    check_odd_prime(p)?;
    Ok((1..p - 1).step_by(2).map(|j| Character::new(p, j)).collect())
}

/// The Legendre symbol as a character, index `(p - 1) / 2`.
pub fn quadratic_character(p: u64) -> Result<Character> {
    check_odd_prime(p)?;
    Ok(Character::new(p, (p - 1) / 2))
}

/// Legendre symbol `(n / p)` by Euler's criterion.
pub fn legendre(n: u64, p: u64) -> i8 {
    let r = n % p;
    if r == 0 {
        return 0;
    }
    if crate::arith::mod_pow(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn table_pairs(p: u64) -> Vec<(u64, u64)> {
        let t = CharacterTable::new(p).unwrap();
        (1..p).map(|n| (n, t.dlog(n).unwrap())).collect()
    }

    #[test]
    fn small_tables() {
        let t5 = CharacterTable::new(5).unwrap();
        assert_eq!(t5.generator(), 2);
        assert_eq!(table_pairs(5), vec![(1, 0), (2, 1), (3, 3), (4, 2)]);
        assert_eq!(CharacterTable::new(3).unwrap().generator(), 2);
        assert_eq!(table_pairs(3), vec![(1, 0), (2, 1)]);
        let t7 = CharacterTable::new(7).unwrap();
        assert_eq!(t7.generator(), 3);
        assert_eq!(
            table_pairs(7),
            vec![(1, 0), (2, 2), (3, 1), (4, 4), (5, 5), (6, 3)]
        );
        assert!(CharacterTable::new(9).is_err());
    }

    #[test]
    fn values_mod_five() {
        let prec = 96;
        let i = ComplexBall::new(Ball::zero(prec), Ball::one(prec));
        let (e, v) = character_value(&Character::new(5, 1), 2, prec).unwrap();
        assert_eq!(e, Some(1));
        assert_eq!(v, i);
        let (e, v) = character_value(&Character::new(5, 2), 2, prec).unwrap();
        assert_eq!(e, Some(2));
        assert_eq!(v, ComplexBall::from_real(Ball::from_i64(-1, prec)));
        let (e, v) = character_value(&Character::new(5, 1), 10, prec).unwrap();
        assert_eq!(e, None);
        assert!(v.contains_zero());
        for n in 1..5 {
            let (_, v) = character_value(&Character::new(5, 0), n, prec).unwrap();
            assert_eq!(v, ComplexBall::one(prec));
        }
    }

    #[test]
    fn odd_families() {
        let idx = |p| odd_characters(p).unwrap().iter().map(|c| c.j).collect::<Vec<_>>();
        assert_eq!(idx(5), vec![1, 3]);
        assert_eq!(idx(3), vec![1]);
        assert_eq!(idx(7), vec![1, 3, 5]);
        assert_eq!(odd_characters(3).unwrap()[0], quadratic_character(3).unwrap());
        for p in [3u64, 5, 7, 11, 13, 101] {
            let odd = odd_characters(p).unwrap();
            assert_eq!(odd.len() as u64, (p - 1) / 2);
            assert!(odd.iter().all(|c| odd.contains(&c.conj())));
        }
    }

    #[test]
    fn quadratic_examples() {
        let q7 = quadratic_character(7).unwrap();
        assert_eq!((q7.j, q7.parity), (3, Parity::Odd));
        let q13 = quadratic_character(13).unwrap();
        assert_eq!((q13.j, q13.parity), (6, Parity::Even));
        let (_, v) = character_value(&quadratic_character(11).unwrap(), 2, 64).unwrap();
        assert_eq!(v, ComplexBall::from_real(Ball::from_i64(-1, 64)));
    }

    #[test]
    fn quadratic_is_euler_criterion() {
        for p in crate::arith::sieve_primes(400).into_iter().skip(1) {
            let t = CharacterTable::new(p).unwrap();
            let q = quadratic_character(p).unwrap();
            for n in 0..2 * p {
                let expected = legendre(n, p);
                match t.exponent(&q, n) {
                    None => assert_eq!(expected, 0),
                    Some(0) => assert_eq!(expected, 1),
                    Some(e) => {
                        assert_eq!(2 * e, p - 1);
                        assert_eq!(expected, -1);
                    }
                }
            }
        }
    }

    #[test]
    fn orthogonality_by_exponents() {
        for p in [3u64, 5, 7, 11, 13, 101, 503] {
            let t = CharacterTable::new(p).unwrap();
            for j in 1..p - 1 {
                let chi = Character::new(p, j);
                // the exponents of a non-principal character hit each coset
                // of its kernel equally often, so the values sum to zero
                let mut counts = vec![0u32; (p - 1) as usize];
                for n in 1..p {
                    counts[t.exponent(&chi, n).unwrap() as usize] += 1;
                }
                let hits: Vec<u32> = counts.iter().copied().filter(|&c| c > 0).collect();
                assert!(hits.len() > 1);
                assert!(hits.iter().all(|&c| c == hits[0]));
            }
        }
    }

    #[test]
    fn numeric_orthogonality_and_parity() {
        let prec = 128;
        for p in [7u64, 11, 13] {
            let t = CharacterTable::new(p).unwrap();
            for j in 0..p - 1 {
                let chi = Character::new(p, j);
                let mut sum = ComplexBall::zero(prec);
                for n in 1..p {
                    sum = sum.add(&t.value(&chi, n, prec).1);
                }
                if j == 0 {
                    assert!(sum.re.contains(&Ball::from_u64(p - 1, prec)));
                } else {
                    assert!(sum.contains_zero(), "p={p} j={j}");
                }
                let minus_one = t.value(&chi, p - 1, prec).1;
                let sign = if chi.is_odd() { -1 } else { 1 };
                assert_eq!(minus_one, ComplexBall::from_real(Ball::from_i64(sign, prec)));
                let conj = t.value(&chi.conj(), 3, prec).1;
                assert!(conj.overlaps(&t.value(&chi, 3, prec).1.conj()));
            }
        }
    }

    #[test]
    fn roots_table_matches_direct_values() {
        let t = CharacterTable::new(29).unwrap();
        let roots = t.roots_of_unity(100);
        for (k, z) in roots.iter().enumerate() {
            assert!(z.overlaps(&root_of_unity(k as u64, 28, 100)));
            assert!(z.norm_sqr().contains(&Ball::one(100)) || z.norm_sqr().overlaps(&Ball::one(100)));
        }
    }

    proptest! {
        #[test]
        fn completely_multiplicative(pi in 1usize..60, j in 0u64..1000, a in 0u64..100_000, b in 0u64..100_000) {
            let p = crate::arith::sieve_primes(300)[pi];
            let t = CharacterTable::new(p).unwrap();
            let chi = Character::new(p, j % (p - 1));
            let ea = t.exponent(&chi, a);
            let eb = t.exponent(&chi, b);
            let eab = t.exponent(&chi, (a % p) * (b % p));
            match (ea, eb) {
                (Some(x), Some(y)) => prop_assert_eq!(eab, Some((x + y) % (p - 1))),
                _ => prop_assert_eq!(eab, None),
            }
            let k = t.dlog(a).unwrap_or(0);
            if a % p != 0 {
                prop_assert_eq!(t.power(k), a % p);
            }
        }
    }
}
