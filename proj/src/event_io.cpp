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

#include "epcload/event_io.hpp"

#include <array>
#include <charconv>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "epcload/errors.hpp"

namespace epcload {
namespace {

template <typename T>
void put_le(std::ostream& out, T value) {
  static_assert(sizeof(T) == 8);
  std::uint64_t bits;
  std::memcpy(&bits, &value, 8);
  std::array<char, 8> buf;
  for (int i = 0; i < 8; ++i) buf[static_cast<std::size_t>(i)] = static_cast<char>((bits >> (8 * i)) & 0xffu);
  out.write(buf.data(), 8);
}

template <typename T>
T get_le(std::istream& in) {
  std::array<unsigned char, 8> buf;
  in.read(reinterpret_cast<char*>(buf.data()), 8);
  if (in.gcount() != 8) throw IoError("truncated binary event stream");
  std::uint64_t bits = 0;
  for (int i = 0; i < 8; ++i) bits |= static_cast<std::uint64_t>(buf[static_cast<std::size_t>(i)]) << (8 * i);
  T value;
  std::memcpy(&value, &bits, 8);
  return value;
}

std::ofstream open_out(const std::filesystem::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream f(path, mode);
  if (!f) throw IoError("cannot open '" + path.string() + "' for writing");
  return f;
}

}  // namespace

std::string format_double(double x) {
  std::array<char, 32> buf;
  auto [end, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), x);
  return std::string(buf.data(), end);
}

void write_events_csv(std::ostream& out, const EventStream& stream) {
  out << "timestamp_s,source_id\n";
  for (const auto& e : stream.events()) {
    out << format_double(e.time) << ',';
    if (e.source_id >= 0) out << e.source_id;
    out << '\n';
  }
}

void write_events_csv(const std::filesystem::path& path, const EventStream& stream) {
  auto f = open_out(path);
  write_events_csv(f, stream);
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

void write_events_binary(std::ostream& out, const EventStream& stream) {
  put_le<std::uint64_t>(out, static_cast<std::uint64_t>(stream.size()));
  for (const auto& e : stream.events()) put_le<double>(out, e.time);
}

void write_events_binary(const std::filesystem::path& path, const EventStream& stream) {
  auto f = open_out(path, std::ios::out | std::ios::binary);
  write_events_binary(f, stream);
  if (!f) throw IoError("failed writing '" + path.string() + "'");
}

EventStream read_events_binary(std::istream& in) {
  const auto count = get_le<std::uint64_t>(in);
  std::vector<Event> ev;
  ev.reserve(static_cast<std::size_t>(std::min<std::uint64_t>(count, 1u << 24)));
  for (std::uint64_t i = 0; i < count; ++i) ev.push_back({get_le<double>(in), -1});
  return EventStream::from_sorted(std::move(ev));
}

EventStream read_events_binary(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw IoError("cannot open '" + path.string() + "'");
  return read_events_binary(f);
}

}  // namespace epcload
