//! Deterministic integer routines: trial-division primality, factorization,
//! prime-power recognition and a plain Eratosthenes sieve. Everything here
//! stays exact at desk scale (arguments up to ~10^12 for trial division,
//! sieve limits around 10^5).

/// Trial-division primality test.
pub(crate) fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    if n.is_multiple_of(3) {
        return n == 3;
    }
    let mut f = 5u64;
    while f.saturating_mul(f) <= n {
        if n.is_multiple_of(f) || n.is_multiple_of(f + 2) {
            return false;
        }
        f += 6;
    }
    true
}

/// Prime factorization as `(prime, exponent)` pairs, primes ascending.
pub(crate) fn factorize(mut n: u64) -> Vec<(u64, u32)> {
    assert!(n >= 1, "factorize requires n >= 1");
    let mut out = Vec::new();
    let mut push = |p: u64, n: &mut u64| {
        if (*n).is_multiple_of(p) {
            let mut e = 0u32;
            while (*n).is_multiple_of(p) {
                *n /= p;
                e += 1;
            }
            out.push((p, e));
        }
    };
    push(2, &mut n);
    push(3, &mut n);
    let mut f = 5u64;
    while f.saturating_mul(f) <= n {
        push(f, &mut n);
        push(f + 2, &mut n);
        f += 6;
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

/// If `n = p^k` for a prime `p` and `k >= 1`, returns `(p, k)`.
pub(crate) fn prime_power(n: u64) -> Option<(u64, u32)> {
    if n < 2 {
        return None;
    }
    let factors = factorize(n);
    if factors.len() == 1 {
        Some(factors[0])
    } else {
        None
    }
}

/// Eratosthenes sieve with O(1) primality lookups up to a fixed limit.
pub(crate) struct Sieve {
    flags: Vec<bool>,
}

impl Sieve {
    pub(crate) fn up_to(limit: u64) -> Self {
        let limit = limit as usize;
        let mut flags = vec![true; limit + 1];
        flags[0] = false;
        if limit >= 1 {
            flags[1] = false;
        }
        let mut p = 2usize;
        while p * p <= limit {
            if flags[p] {
                let mut m = p * p;
                while m <= limit {
                    flags[m] = false;
                    m += p;
                }
            }
            p += 1;
        }
        Sieve { flags }
    }

    pub(crate) fn is_prime(&self, n: u64) -> bool {
        self.flags[n as usize]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn primality_matches_sieve() {
        let sieve = Sieve::up_to(2000);
        for n in 0..=2000u64 {
            assert_eq!(is_prime(n), sieve.is_prime(n), "disagreement at {n}");
        }
    }

    #[test]
    fn factorization_reassembles() {
        for n in 1..=3000u64 {
            let product: u64 = factorize(n).iter().map(|&(p, e)| p.pow(e)).product();
            assert_eq!(product, n);
        }
    }

    #[test]
    fn prime_power_recognition() {
        assert_eq!(prime_power(8), Some((2, 3)));
        assert_eq!(prime_power(9), Some((3, 2)));
        assert_eq!(prime_power(23), Some((23, 1)));
        assert_eq!(prime_power(12), None);
        assert_eq!(prime_power(1), None);
    }
}
