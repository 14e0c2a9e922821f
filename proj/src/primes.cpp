#include "hopfian/primes.hpp"

#include <stdexcept>

#include "hopfian/errors.hpp"

namespace hopfian {

bool is_prime(i64 n) {
    if (n < 2) return false;
    if (n % 2 == 0) return n == 2;
    for (i64 d = 3; d * d <= n; d += 2)
        if (n % d == 0) return false;
    return true;
}

namespace {
std::vector<i64>& prime_cache() {
    static std::vector<i64> cache{2, 3, 5, 7, 11, 13};
    return cache;
}

void extend_primes_to(std::size_t count) {
    auto& cache = prime_cache();
    i64 candidate = cache.back();
    while (cache.size() < count) {
        candidate += (candidate == 2) ? 1 : 2;
        if (is_prime(candidate)) cache.push_back(candidate);
    }
}
}  // namespace

i64 nth_prime(i64 n) {
    if (n < 1) throw std::invalid_argument("nth_prime: index must be >= 1");
    extend_primes_to(static_cast<std::size_t>(n));
    return prime_cache()[static_cast<std::size_t>(n - 1)];
}

i64 prime_index(i64 p) {
    if (!is_prime(p)) throw std::invalid_argument("prime_index: not a prime");
    auto& cache = prime_cache();
    for (std::size_t i = 0;; ++i) {
        if (i == cache.size()) extend_primes_to(cache.size() + 64);
        if (cache[i] == p) return static_cast<i64>(i + 1);
        if (cache[i] > p) throw std::invalid_argument("prime_index: not a prime");
    }
}

i64 valuation(i64 n, i64 p) {
    if (n == 0) throw std::invalid_argument("valuation of 0 is undefined");
    if (p < 2) throw std::invalid_argument("valuation: p must be >= 2");
    if (n < 0) n = -n;
    i64 v = 0;
    while (n % p == 0) {
        n /= p;
        ++v;
    }
    return v;
}

std::vector<std::pair<i64, i64>> factorize(i64 n) {
    if (n < 1) throw std::invalid_argument("factorize: n must be >= 1");
    std::vector<std::pair<i64, i64>> out;
    for (i64 d = 2; d * d <= n; d += (d == 2) ? 1 : 2) {
        if (n % d) continue;
        i64 e = 0;
        while (n % d == 0) {
            n /= d;
            ++e;
        }
        out.emplace_back(d, e);
    }
    if (n > 1) out.emplace_back(n, 1);
    return out;
}

i64 ipow_checked(i64 p, i64 e) {
    if (e < 0) throw std::invalid_argument("ipow_checked: negative exponent");
    i64 r = 1;
    for (i64 i = 0; i < e; ++i) {
        __int128 next = static_cast<__int128>(r) * p;
        if (next > INT64_MAX) throw OverflowError("prime power too large");
        r = static_cast<i64>(next);
    }
    return r;
}

i64 mul_checked(i64 a, i64 b) {
    __int128 r = static_cast<__int128>(a) * b;
    if (r > INT64_MAX || r < INT64_MIN) throw OverflowError("product too large");
    return static_cast<i64>(r);
}

i64 ceil_div(i64 a, i64 b) {
    if (b <= 0) throw std::invalid_argument("ceil_div: denominator must be positive");
    if (a <= 0) return -((-a) / b);
    return (a + b - 1) / b;
}

i64 floor_div(i64 a, i64 b) {
    if (b <= 0) throw std::invalid_argument("floor_div: denominator must be positive");
    i64 q = a / b;
    if (a % b != 0 && a < 0) --q;
    return q;
}

}  // namespace hopfian
