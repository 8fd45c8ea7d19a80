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

#include "bce/rational.h"

#include <cctype>

namespace bce {
namespace {

bool IsInteger(std::string_view s) {
  if (s.empty()) return false;
  size_t start = (s[0] == '-' || s[0] == '+') ? 1 : 0;
  if (start == s.size()) return false;
  for (size_t i = start; i < s.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
  }
  return true;
}

}  // namespace

Rational ParseRational(std::string_view text) {
  const size_t slash = text.find('/');
  std::string_view num = text.substr(0, slash);
  std::string_view den =
      slash == std::string_view::npos ? std::string_view("1")
                                      : text.substr(slash + 1);
  if (!IsInteger(num) || !IsInteger(den) || den[0] == '-' || den[0] == '+') {
    throw InputError("malformed rational: '" + std::string(text) + "'");
  }
  mpz_class n{std::string(num[0] == '+' ? num.substr(1) : num)};
  mpz_class d{std::string(den)};
  if (d == 0) throw InputError("zero denominator: '" + std::string(text) + "'");
  Rational r(n, d);
  r.canonicalize();
  return r;
}

std::string FormatRational(const Rational& value, bool force_den) {
  if (!force_den && value.get_den() == 1) return value.get_num().get_str();
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

std::string FormatVector(const std::vector<Rational>& values,
                         std::string_view sep) {
  std::string out;
  for (size_t i = 0; i < values.size(); ++i) {
    if (i > 0) out += sep;
    out += FormatRational(values[i]);
  }
  return out;
}

}  // namespace bce
