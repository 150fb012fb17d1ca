/*
 * Copyright 2026 The pcosync Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

// Scalar types used for transition probabilities. Models are built either in
// double precision or with exact rationals; the analysis layer works on doubles.

#include <boost/multiprecision/cpp_int.hpp>

#include <cstdint>
#include <type_traits>

namespace pcosync {

using Rational = boost::multiprecision::cpp_rational;

template <class S>
inline constexpr bool is_exact_v = std::is_same_v<S, Rational>;

/// Converts a double to a scalar. For rationals the conversion is exact
/// (the binary value of the double, not its decimal spelling).
template <class S>
S from_double(double x) {
    if constexpr (is_exact_v<S>) {
        return Rational(x);
    } else {
        return static_cast<S>(x);
    }
}

template <class S>
double to_double(const S& x) {
    if constexpr (is_exact_v<S>) {
        return x.template convert_to<double>();
    } else {
        return static_cast<double>(x);
    }
}

template <class S>
S power(const S& base, int exponent) {
    S result(1);
    for (int i = 0; i < exponent; ++i) result *= base;
    return result;
}

/// Binomial coefficient C(n, k) as a scalar. Exact for rationals and, for
/// doubles, exact whenever the result fits in 53 bits.
template <class S>
S binomial(int n, int k) {
    if (k < 0 || k > n) return S(0);
    if (k > n - k) k = n - k;
    S result(1);
    for (int i = 1; i <= k; ++i) {
        result *= S(n - k + i);
        result /= S(i);
    }
    return result;
}

/// Rising factorial x^(n) = x (x+1) ... (x+n-1).
inline std::uint64_t rising_factorial(std::uint64_t x, unsigned n) {
    std::uint64_t r = 1;
    for (unsigned i = 0; i < n; ++i) r *= x + i;
    return r;
}

inline std::uint64_t binomial_u64(unsigned n, unsigned k) {
    if (k > n) return 0;
    if (k > n - k) k = n - k;
    std::uint64_t r = 1;
    for (unsigned i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

} // namespace pcosync
