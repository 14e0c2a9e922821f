#pragma once

#include <cstdint>
#include <utility>
#include <vector>

namespace hopfian {

using i64 = long long;

bool is_prime(i64 n);

// 1-based: nth_prime(1) == 2, nth_prime(2) == 3, ...
i64 nth_prime(i64 n);

// Inverse of nth_prime.  p must be prime.
i64 prime_index(i64 p);

// Exponent of p in n (n != 0).
i64 valuation(i64 n, i64 p);

// Prime factorization of n >= 1 as (prime, exponent) pairs, ascending.
std::vector<std::pair<i64, i64>> factorize(i64 n);

// p^e with overflow check.
i64 ipow_checked(i64 p, i64 e);

// a*b with overflow check.
i64 mul_checked(i64 a, i64 b);

i64 ceil_div(i64 a, i64 b);   // b > 0
i64 floor_div(i64 a, i64 b);  // b > 0, rounds toward -infinity

}  // namespace hopfian
