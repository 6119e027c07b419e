//! Prime generation and primality testing.
//!
//! A plain sieve of Eratosthenes covers every sweep in this crate (cutoffs up
//! to about 10^6); `is_prime` is a deterministic Miller-Rabin test valid for
//! all 64-bit inputs.

/// All primes `<= n`, ascending.
pub fn primes_up_to(n: u64) -> Vec<u64> {
    if n < 2 {
        return Vec::new();
    }
    let n = n as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut j = i * i;
            while j <= n {
                composite[j] = true;
                j += i;
            }
        }
    }
    primes
}

/// All primes in the half-open interval `(lo, hi]`, ascending.
pub fn primes_in(lo: u64, hi: u64) -> Vec<u64> {
    primes_up_to(hi).into_iter().filter(|&p| p > lo).collect()
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

fn powmod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1u64;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mulmod(acc, base, m);
        }
        base = mulmod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for u64.
///
/// The base set {2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37} is known to be
/// correct for all n < 3.3 * 10^24, which covers u64.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for &p in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n == p {
            return true;
        }
        if n % p == 0 {
            return false;
        }
    }
    let mut d = n - 1;
    let mut r = 0u32;
    while d & 1 == 0 {
        d >>= 1;
        r += 1;
    }
    'witness: for &a in &[2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = powmod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..r {
            x = mulmod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sieve_small() {
        assert_eq!(primes_up_to(1), Vec::<u64>::new());
        assert_eq!(primes_up_to(13), vec![2, 3, 5, 7, 11, 13]);
        assert_eq!(primes_up_to(100).len(), 25);
        assert_eq!(primes_up_to(100_000).len(), 9592);
    }

    #[test]
    fn interval() {
        assert_eq!(primes_in(10, 20), vec![11, 13, 17, 19]);
        assert_eq!(primes_in(13, 13), Vec::<u64>::new());
    }

    #[test]
    fn miller_rabin_agrees_with_sieve() {
        let sieved = primes_up_to(2000);
        for n in 0..=2000u64 {
            assert_eq!(is_prime(n), sieved.binary_search(&n).is_ok(), "n = {n}");
        }
    }

    #[test]
    fn miller_rabin_large() {
        assert!(is_prime(2_147_483_647)); // 2^31 - 1
        assert!(is_prime(18_446_744_073_709_551_557)); // largest u64 prime
        assert!(!is_prime(18_446_744_073_709_551_555));
        assert!(!is_prime(3_215_031_751)); // strong pseudoprime to bases 2,3,5,7
    }
}
