// Copyright 2026 The bce-lab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef BCE_RATIONAL_H_
#define BCE_RATIONAL_H_

#include <gmpxx.h>

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace bce {

// Exact rational number. mpq_class keeps values canonical (lowest terms,
// positive denominator) after every arithmetic operation.
using Rational = mpq_class;

// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Malformed input: bad file, unknown label, shape mismatch.
class InputError : public Error {
 public:
  explicit InputError(const std::string& what) : Error(what) {}
};

// A configurable enumeration limit was exceeded.
class CapExceeded : public Error {
 public:
  explicit CapExceeded(const std::string& what) : Error(what) {}
};

// Parses "p", "-p", "p/q" (q != 0). Whitespace is not accepted.
Rational ParseRational(std::string_view text);

// Always "num/den"; integers are written "num/1" only when `force_den` is set.
std::string FormatRational(const Rational& value, bool force_den = true);

std::string FormatVector(const std::vector<Rational>& values,
                         std::string_view sep = ",");

// n/d in lowest terms. The two-argument mpq_class constructor does not
// reduce, and arithmetic on unreduced operands is undefined.
inline Rational Ratio(long n, long d) {
  Rational r(n, d);
  r.canonicalize();
  return r;
}

inline bool IsZero(const Rational& r) { return sgn(r) == 0; }

}  // namespace bce

#endif  // BCE_RATIONAL_H_
