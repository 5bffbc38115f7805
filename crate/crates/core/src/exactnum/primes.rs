//! Word-sized prime utilities and a best-effort support decomposition for
//! arbitrary-precision integers.

use num_bigint::BigUint;
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

const TRIAL_BOUND: u64 = 10_000;

fn mul_mod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

pub fn pow_mod(mut base: u64, mut exp: u64, m: u64) -> u64 {
    let mut acc = 1 % m;
    base %= m;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = mul_mod(acc, base, m);
        }
        base = mul_mod(base, base, m);
        exp >>= 1;
    }
    acc
}

/// Deterministic Miller-Rabin for 64-bit integers.
pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    const WITNESSES: [u64; 12] = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37];
    for &p in &WITNESSES {
        if n.is_multiple_of(p) {
            return n == p;
        }
    }
    let s = (n - 1).trailing_zeros();
    let d = (n - 1) >> s;
    'witness: for &a in &WITNESSES {
        let mut x = pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mul_mod(x, x, n);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

/// Legendre symbol `(a / p)` for an odd prime `p`, returned as -1, 0 or 1.
pub fn legendre(a: i64, p: u64) -> i32 {
    let r = a.rem_euclid(p as i64) as u64;
    if r == 0 {
        return 0;
    }
    if pow_mod(r, (p - 1) / 2, p) == 1 {
        1
    } else {
        -1
    }
}

/// Smallest nonnegative square root of `a` modulo an odd prime `p`, if any
/// (Tonelli-Shanks).
pub fn sqrt_mod(a: i64, p: u64) -> Option<u64> {
    let a = a.rem_euclid(p as i64) as u64;
    if a == 0 {
        return Some(0);
    }
    if legendre(a as i64, p) != 1 {
        return None;
    }
    let s = (p - 1).trailing_zeros();
    let q = (p - 1) >> s;
    let mut z = 2;
    while legendre(z as i64, p) != -1 {
        z += 1;
    }
    let mut m = s;
    let mut c = pow_mod(z, q, p);
    let mut t = pow_mod(a, q, p);
    let mut r = pow_mod(a, q.div_ceil(2), p);
    while t != 1 {
        let mut i = 0;
        let mut t2 = t;
        while t2 != 1 {
            t2 = mul_mod(t2, t2, p);
            i += 1;
        }
        let b = pow_mod(c, 1 << (m - i - 1), p);
        m = i;
        c = mul_mod(b, b, p);
        t = mul_mod(t, c, p);
        r = mul_mod(r, b, p);
    }
    Some(r.min(p - r))
}

fn small_primes() -> &'static [u64] {
    use std::sync::OnceLock;
    static PRIMES: OnceLock<Vec<u64>> = OnceLock::new();
    PRIMES.get_or_init(|| {
        let n = TRIAL_BOUND as usize;
        let mut sieve = vec![true; n + 1];
        sieve[0] = false;
        sieve[1] = false;
        let mut i = 2;
        while i * i <= n {
            if sieve[i] {
                let mut j = i * i;
                while j <= n {
                    sieve[j] = false;
                    j += i;
                }
            }
            i += 1;
        }
        (0..=n).filter(|&k| sieve[k]).map(|k| k as u64).collect()
    })
}

fn pollard_brent(n: u64) -> u64 {
    if n.is_multiple_of(2) {
        return 2;
    }
    let mut c = 1u64;
    loop {
        let f = |x: u64| (mul_mod(x, x, n) + c) % n;
        let (mut x, mut y, mut g) = (2u64, 2u64, 1u64);
        while g == 1 {
            x = f(x);
            y = f(f(y));
            g = x.abs_diff(y).gcd(&n);
        }
        if g != n {
            return g;
        }
        c += 1;
    }
}

fn factor_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime(n) {
        out.push(n);
        return;
    }
    let d = pollard_brent(n);
    factor_u64(d, out);
    factor_u64(n / d, out);
}

/// One element of a pairwise-coprime support decomposition.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum SupportElem {
    Prime(u64),
    /// An unfactored integer > 1, coprime to every other element. Sums of
    /// local contributions over the primes dividing it are computed as a unit.
    Block(BigUint),
}

fn refine_into(base: &mut Vec<BigUint>, x: BigUint) {
    if x.is_one() || x.is_zero() {
        return;
    }
    for i in 0..base.len() {
        let g = base[i].gcd(&x);
        if !g.is_one() {
            let b = base.swap_remove(i);
            let b_rest = &b / &g;
            let x_rest = &x / &g;
            refine_into(base, g);
            refine_into(base, b_rest);
            refine_into(base, x_rest);
            return;
        }
    }
    base.push(x);
}

/// Pairwise-coprime set of elements such that every input factors over it.
/// Small factors are split off by trial division and word-sized cofactors are
/// fully factored; anything larger stays as a [`SupportElem::Block`].
pub fn support(numbers: &[BigUint]) -> Vec<SupportElem> {
    let mut primes = std::collections::BTreeSet::new();
    let mut leftovers = Vec::new();
    for n in numbers {
        if n.is_zero() {
            continue;
        }
        let mut m = n.clone();
        if let Some(tz) = m.trailing_zeros() {
            if tz > 0 {
                primes.insert(2u64);
                m >>= tz;
            }
        }
        for &p in small_primes().iter().skip(1) {
            if m.is_one() {
                break;
            }
            let pb = BigUint::from(p);
            loop {
                let (q, r) = m.div_rem(&pb);
                if !r.is_zero() {
                    break;
                }
                primes.insert(p);
                m = q;
            }
        }
        if !m.is_one() {
            leftovers.push(m);
        }
    }
    let mut base = Vec::new();
    for m in leftovers {
        refine_into(&mut base, m);
    }
    let mut blocks = Vec::new();
    for b in base {
        match b.to_u64() {
            Some(w) => {
                let mut fs = Vec::new();
                factor_u64(w, &mut fs);
                primes.extend(fs);
            }
            None => blocks.push(b),
        }
    }
    blocks.sort();
    primes
        .into_iter()
        .map(SupportElem::Prime)
        .chain(blocks.into_iter().map(SupportElem::Block))
        .collect()
}

/// Largest `k` with `c^k | n` (n nonzero, c > 1).
pub fn block_exponent(n: &BigUint, c: &BigUint) -> u64 {
    let mut m = n.clone();
    let mut k = 0;
    loop {
        let (q, r) = m.div_rem(c);
        if !r.is_zero() {
            return k;
        }
        m = q;
        k += 1;
    }
}
