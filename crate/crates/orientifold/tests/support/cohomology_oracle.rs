//! Independent brute-force oracle for twisted group cohomology.
//!
//! Deliberately shares no code with the library pipeline beyond the group
//! table itself: its own tuple bookkeeping, its own coboundary matrix, its
//! own diagonalization (plain gcd pivoting, no transform tracking), and a
//! different theorem doing the work.
//!
//! The counting route: every class of Hⁿ(Γ, ℚ/ℤ) is killed by m = |Γ|-many
//! candidates; concretely, for any m, the m-torsion subgroup Hⁿ[m] equals
//! (cocycles with values in (1/m)ℤ/ℤ) modulo (coboundaries of cochains with
//! values in (1/N)ℤ/ℤ that land in (1/m)ℤ/ℤ), with N = 2|Γ|².  Both sets
//! are finite and their sizes follow from the diagonal form of the integer
//! coboundary matrices, so
//!
//!   |Hⁿ[m]| = Z(m) / B(m),
//!
//! and reading |Hⁿ[p^j]| off for prime powers pins down the whole abelian
//! group structure.

use num_bigint::BigUint;
use num_traits::One;

use orientifold::group::OrientifoldGroup;

/// Integer matrix of the twisted coboundary δ: Cᵏ → Cᵏ⁺¹ on the full bar
/// basis, built with independent tuple arithmetic (odometer enumeration).
pub fn oracle_delta_matrix(group: &OrientifoldGroup, k: usize) -> (usize, usize, Vec<i128>) {
    let order = group.order();
    let rows = order.pow(k as u32 + 1);
    let cols = order.pow(k as u32);
    let mut data = vec![0i128; rows * cols];
    // odometer over (k+1)-tuples
    let mut tuple = vec![0usize; k + 1];
    for r in 0..rows {
        let enc = |t: &[usize]| -> usize {
            let mut acc = 0usize;
            for &g in t {
                acc = acc * order + g;
            }
            acc
        };
        // ε(γ₁)-twisted head term
        data[r * cols + enc(&tuple[1..])] += group.epsilon(tuple[0]) as i128;
        // alternating merge terms
        let mut sign = -1i128;
        for i in 0..k {
            let mut merged: Vec<usize> = Vec::with_capacity(k);
            merged.extend_from_slice(&tuple[..i]);
            merged.push(group.mul(tuple[i], tuple[i + 1]));
            merged.extend_from_slice(&tuple[i + 2..]);
            data[r * cols + enc(&merged)] += sign;
            sign = -sign;
        }
        // tail term with sign (−1)^{k+1}
        data[r * cols + enc(&tuple[..k])] += sign;
        // advance odometer (last slot fastest)
        for slot in (0..k + 1).rev() {
            tuple[slot] += 1;
            if tuple[slot] < order {
                break;
            }
            tuple[slot] = 0;
        }
    }
    (rows, cols, data)
}

/// Diagonal entries of an integer matrix under unimodular row/column
/// operations (no chain normalization; solution counts don't need it), plus
/// the number of columns beyond the diagonal.
pub fn oracle_diagonalize(rows: usize, cols: usize, data: &[i128]) -> (Vec<i128>, usize) {
    let mut a = data.to_vec();
    let idx = |i: usize, j: usize| i * cols + j;
    let mut k = 0usize;
    while k < rows.min(cols) {
        // find minimal nonzero |entry|
        let mut best: Option<(usize, usize)> = None;
        for i in k..rows {
            for j in k..cols {
                let x = a[idx(i, j)];
                if x != 0 && best.map_or(true, |(bi, bj)| x.abs() < a[idx(bi, bj)].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        for j in 0..cols {
            a.swap(idx(pi, j), idx(k, j));
        }
        for i in 0..rows {
            a.swap(idx(i, pj), idx(i, k));
        }
        loop {
            let pivot = a[idx(k, k)];
            let mut again = false;
            for i in (k + 1)..rows {
                if a[idx(i, k)] != 0 {
                    let q = a[idx(i, k)] / pivot;
                    for j in k..cols {
                        a[idx(i, j)] -= q * a[idx(k, j)];
                    }
                    if a[idx(i, k)] != 0 {
                        for j in 0..cols {
                            a.swap(idx(i, j), idx(k, j));
                        }
                        again = true;
                        break;
                    }
                }
            }
            if again {
                continue;
            }
            for j in (k + 1)..cols {
                if a[idx(k, j)] != 0 {
                    let q = a[idx(k, j)] / pivot;
                    for i in k..rows {
                        a[idx(i, j)] -= q * a[idx(i, k)];
                    }
                    if a[idx(k, j)] != 0 {
                        for i in 0..rows {
                            a.swap(idx(i, j), idx(i, k));
                        }
                        again = true;
                        break;
                    }
                }
            }
            if !again {
                break;
            }
        }
        k += 1;
    }
    let diag: Vec<i128> = (0..rows.min(cols)).map(|i| a[idx(i, i)].abs()).collect();
    let extra_cols = cols.saturating_sub(rows.min(cols));
    (diag, extra_cols)
}

fn gcd(a: u128, b: u128) -> u128 {
    let (mut a, mut b) = (a, b);
    while b != 0 {
        let r = a % b;
        a = b;
        b = r;
    }
    a
}

/// `#{x ∈ (ℤ_m)^cols : D·x ≡ 0 mod m}` from the diagonal form: each diagonal
/// entry d contributes gcd(d, m) solutions, each free column m.
fn kernel_count(diag: &[i128], extra_cols: usize, m: u128) -> BigUint {
    let mut count = BigUint::one();
    for &d in diag {
        count *= BigUint::from(gcd(d.unsigned_abs(), m).max(1));
    }
    for _ in 0..extra_cols {
        count *= BigUint::from(m);
    }
    count
}

/// `#{z ∈ (ℤ_N)^cols : D·z ≡ 0 mod L}` for L | N: per diagonal entry d the
/// solutions of d·z ≡ 0 (mod L) among z mod N number N·gcd(d, L)/L; free
/// columns give N.
fn relaxed_kernel_count(diag: &[i128], extra_cols: usize, n_mod: u128, l: u128) -> BigUint {
    let mut count = BigUint::one();
    for &d in diag {
        let g = gcd(d.unsigned_abs(), l).max(1);
        count *= BigUint::from(n_mod * g / l);
    }
    for _ in 0..extra_cols {
        count *= BigUint::from(n_mod);
    }
    count
}

/// |Hⁿ[m]| by counting: cocycles with (1/m)-values divided by coboundaries
/// reachable from (1/N)-cochains that land in (1/m)-values.
pub fn torsion_subgroup_order(group: &OrientifoldGroup, n: usize, m: u128) -> BigUint {
    assert!(n >= 1);
    let big_n = 2 * (group.order() as u128) * (group.order() as u128);
    assert_eq!(big_n % m, 0, "m must divide N");
    // Z(m): cocycles with values in (1/m)Z/Z
    let (rows_n, cols_n, dn) = oracle_delta_matrix(group, n);
    let (diag_n, extra_n) = oracle_diagonalize(rows_n, cols_n, &dn);
    let z = kernel_count(&diag_n, extra_n, m);
    // B(m): image of (1/N)-cochains inside (1/m)-valued cochains
    //   preimages: z mod N with D z ≡ 0 mod N/m; divided by the full kernel
    let (rows_b, cols_b, db) = oracle_delta_matrix(group, n - 1);
    let (diag_b, extra_b) = oracle_diagonalize(rows_b, cols_b, &db);
    let pre = relaxed_kernel_count(&diag_b, extra_b, big_n, big_n / m);
    let ker = kernel_count(&diag_b, extra_b, big_n);
    let b = &pre / &ker;
    debug_assert!((&b * &ker) == pre, "exact division");
    let h = &z / &b;
    debug_assert!((&h * &b) == z, "exact division");
    h
}

/// Full order |Hⁿ| (= |Hⁿ[|Γ|]| since the whole group is |Γ|-torsion).
pub fn group_order(group: &OrientifoldGroup, n: usize) -> BigUint {
    torsion_subgroup_order(group, n, group.order() as u128)
}

/// Invariant factors of Hⁿ, reconstructed from prime-power torsion counts:
/// for each prime p | |Γ| and j ≥ 1, the number of cyclic summands of order
/// ≥ p^j is log_p |H[p^j]| − log_p |H[p^{j−1}]|.
pub fn invariant_factors(group: &OrientifoldGroup, n: usize) -> Vec<u64> {
    let m = group.order() as u128;
    let mut primes: Vec<u128> = Vec::new();
    {
        let mut rest = m;
        let mut p = 2;
        while p * p <= rest {
            if rest % p == 0 {
                primes.push(p);
                while rest % p == 0 {
                    rest /= p;
                }
            }
            p += 1;
        }
        if rest > 1 {
            primes.push(rest);
        }
    }
    // per prime: multiset of exponents of cyclic p-power summands.  The whole
    // group is |Γ|-torsion, so probing p^j | |Γ| is enough.
    let mut per_prime: Vec<(u128, Vec<u32>)> = Vec::new();
    for &p in &primes {
        let mut counts: Vec<u32> = Vec::new(); // counts[j-1] = #summands of order >= p^j
        let mut prev = BigUint::one();
        let mut pj: u128 = p;
        while m % pj == 0 {
            let t = torsion_subgroup_order(group, n, pj);
            let ratio = &t / &prev;
            debug_assert!(&ratio * &prev == t);
            // r = log_p ratio
            let mut r = 0u32;
            let mut acc = BigUint::one();
            let pbig = BigUint::from(p);
            while acc < ratio {
                acc *= &pbig;
                r += 1;
            }
            debug_assert!(acc == ratio, "torsion ratio must be a p-power");
            counts.push(r);
            prev = t;
            if r == 0 {
                break;
            }
            pj *= p;
        }
        // counts[j-1] − counts[j] summands of order exactly p^j
        let mut exps: Vec<u32> = Vec::new();
        for j in 0..counts.len() {
            let next = counts.get(j + 1).copied().unwrap_or(0);
            for _ in 0..counts[j].saturating_sub(next) {
                exps.push(j as u32 + 1);
            }
        }
        exps.sort_unstable();
        per_prime.push((p, exps));
    }
    // assemble invariant factors: align largest exponents across primes
    let max_len = per_prime.iter().map(|(_, e)| e.len()).max().unwrap_or(0);
    let mut factors: Vec<u64> = Vec::new();
    for slot in 0..max_len {
        let mut f: u64 = 1;
        for (p, exps) in &per_prime {
            // align from the top: slot 0 = smallest factor
            let skip = max_len - exps.len();
            if slot >= skip {
                let e = exps[slot - skip];
                f *= (*p as u64).pow(e);
            }
        }
        if f > 1 {
            factors.push(f);
        }
    }
    factors
}
