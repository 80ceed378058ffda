// Copyright 2026 The Phonlat Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
// Weights over the tropical and log semirings.  Values are negated natural
// logarithms of probabilities, so semiring one is 0.0 and semiring zero is
// +infinity in both rings.  The rings differ only in plus:
//
//   tropical:  a (+) b = min(a, b)            (Viterbi)
//   log:       a (+) b = -log(e^-a + e^-b)    (full sum)
//
// Times is ordinary addition in both.  Every Weight carries its ring tag;
// combining weights from different rings is a usage error and throws.

#ifndef PHONLAT_SEMIRING_HPP_
#define PHONLAT_SEMIRING_HPP_

#include <cmath>
#include <limits>
#include <string>

#include "phonlat/error.hpp"

namespace phonlat {

enum class Semiring { kTropical, kLog };

inline std::string semiring_name(Semiring s) {
  return s == Semiring::kTropical ? "tropical" : "log";
}

inline Semiring parse_semiring(const std::string& name) {
  if (name == "tropical") return Semiring::kTropical;
  if (name == "log") return Semiring::kLog;
  throw DataError("unknown semiring: " + name);
}

constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct Weight {
  double value = kInfinity;
  Semiring ring = Semiring::kTropical;

  Weight() = default;
  Weight(double v, Semiring r) : value(v), ring(r) {}

  static Weight zero(Semiring r) { return Weight(kInfinity, r); }
  static Weight one(Semiring r) { return Weight(0.0, r); }

  bool is_zero() const { return std::isinf(value) && value > 0.0; }

  friend bool operator==(const Weight& a, const Weight& b) {
    return a.ring == b.ring && a.value == b.value;
  }
};

namespace detail {
inline void check_same_ring(const Weight& a, const Weight& b,
                            const char* op) {
  if (a.ring != b.ring) {
    throw Error(std::string("semiring mismatch in ") + op + ": " +
                semiring_name(a.ring) + " vs " + semiring_name(b.ring));
  }
}
}  // namespace detail

// -log(e^-a + e^-b), stable for any finite magnitudes.
inline double neg_log_sum(double a, double b) {
  if (std::isinf(a) && a > 0.0) return b;
  if (std::isinf(b) && b > 0.0) return a;
  double lo = a < b ? a : b;
  double hi = a < b ? b : a;
  return lo - std::log1p(std::exp(lo - hi));
}

inline Weight semiring_plus(const Weight& a, const Weight& b) {
  detail::check_same_ring(a, b, "semiring_plus");
  if (a.ring == Semiring::kTropical) {
    return Weight(a.value < b.value ? a.value : b.value, a.ring);
  }
  return Weight(neg_log_sum(a.value, b.value), a.ring);
}

inline Weight semiring_times(const Weight& a, const Weight& b) {
  detail::check_same_ring(a, b, "semiring_times");
  if (a.is_zero() || b.is_zero()) return Weight::zero(a.ring);
  return Weight(a.value + b.value, a.ring);
}

}  // namespace phonlat

#endif  // PHONLAT_SEMIRING_HPP_
