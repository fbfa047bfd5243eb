// Copyright 2026 The CEPP Authors
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


// JSON documents for graphs and contracts. Objects are written with their
// fields in a fixed order so that output is byte-stable.

#ifndef CEPP_IPCG_JSON_HPP
#define CEPP_IPCG_JSON_HPP

#include <filesystem>
#include <string>
#include <string_view>

#include "cepp/ipcg.hpp"
#include "json.hpp"

namespace cepp {

using Json = nlohmann::ordered_json;

Json contract_to_json(const Contract& c);
Contract contract_from_json(const Json& j, const std::string& where = "contract");

Json ipcg_to_json(const Ipcg& g);
/// Throws Error(kParseError) naming the offending field.
Ipcg ipcg_from_json(const Json& j);

Json report_to_json(const ValidationReport& report);

/// Parses text into a Json value, mapping syntax errors to kParseError.
Json parse_json_text(std::string_view text, const std::string& source);
Json read_json_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, const std::string& text);

Ipcg parse_ipcg(std::string_view text);
std::string serialize_ipcg(const Ipcg& g);
Ipcg load_ipcg(const std::filesystem::path& path);

}  // namespace cepp

#endif  // CEPP_IPCG_JSON_HPP
