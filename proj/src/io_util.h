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

#ifndef BCE_SRC_IO_UTIL_H_
#define BCE_SRC_IO_UTIL_H_

#include <string>
#include <vector>

#include "bce/rational.h"
#include "json.hpp"

namespace bce::io {

using Json = nlohmann::json;
// Output documents keep keys in insertion order.
using OJson = nlohmann::ordered_json;

// Throws InputError on malformed JSON.
Json Parse(const std::string& text);
const Json& Field(const Json& j, const char* key, const std::string& where);
Rational Number(const Json& j, const std::string& where);
std::string Label(const Json& j, const std::string& where);
std::vector<std::string> Labels(const Json& j, const std::string& where);
// Position of `label` in `set`; "*" gives -1.
int Index(const std::vector<std::string>& set, const std::string& label,
          const std::string& where);
int Integer(const Json& j, const std::string& where);

}  // namespace bce::io

#endif  // BCE_SRC_IO_UTIL_H_
