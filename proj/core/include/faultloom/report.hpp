// Copyright 2026 The FaultLoom Authors.
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

#include <filesystem>
#include <map>
#include <string>

#include "faultloom/evaluation.hpp"

namespace faultloom {

// Flat tables keyed by file name (relative to the tables/ directory).
std::map<std::string, std::string> render_tables(const EvalReport& report);

// Human-readable summary.
std::string render_summary(const EvalReport& report);

// Serialized report document (pretty-printed, newline-terminated).
std::string render_report_json(const EvalReport& report);

// Writes report.json, summary.md and tables/*.csv under `dir`. Output is a
// pure function of `report`.
void write_report(const EvalReport& report, const std::filesystem::path& dir);

}  // namespace faultloom
