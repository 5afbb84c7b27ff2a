// Copyright 2026 The semigrav Authors
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

#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace semigrav::io {

/// Shortest-safe representation: 17 significant digits, '.' decimal
/// separator regardless of locale. Parsing the result with parse_double
/// reproduces the input bit for bit.
std::string format_double(double value);

/// Locale-independent strict parse; throws std::invalid_argument on
/// trailing garbage or an empty field.
double parse_double(std::string_view text);

/// Writes one RFC-4180 record. Fields containing ',', '"' or line breaks
/// are quoted.
void write_csv_row(std::ostream& out, const std::vector<std::string>& fields);

/// Splits one RFC-4180 record (no embedded line breaks).
std::vector<std::string> split_csv_row(std::string_view line);

}  // namespace semigrav::io
