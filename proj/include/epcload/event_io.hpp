// Copyright 2026 The epcload Authors
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
#include <ostream>
#include <string>

#include "epcload/traffic.hpp"

namespace epcload {

/// Shortest decimal text that parses back to exactly `x`.
std::string format_double(double x);

/// CSV with header `timestamp_s,source_id`; unknown source ids are left empty.
void write_events_csv(std::ostream& out, const EventStream& stream);
void write_events_csv(const std::filesystem::path& path, const EventStream& stream);

/// Length-prefixed binary stream: little-endian uint64 count, then `count`
/// little-endian IEEE-754 float64 timestamps (seconds).
void write_events_binary(std::ostream& out, const EventStream& stream);
void write_events_binary(const std::filesystem::path& path, const EventStream& stream);
EventStream read_events_binary(std::istream& in);
EventStream read_events_binary(const std::filesystem::path& path);

}  // namespace epcload
