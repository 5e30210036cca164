#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace partmotion {

// A versioned binary file: 8-byte magic, format version, a JSON header and a
// flat payload of little-endian float64 values.
struct BinaryContainer {
  std::string magic;
  std::uint32_t version = 1;
  nlohmann::json header;
  std::vector<double> payload;
};

void writeContainer(const std::filesystem::path& path, const BinaryContainer& container);
BinaryContainer readContainer(const std::filesystem::path& path, const std::string& expectedMagic);

std::string readTextFile(const std::filesystem::path& path);
void writeTextFile(const std::filesystem::path& path, const std::string& text);

// Newline-delimited JSON helpers. Blank lines are skipped on read.
std::vector<nlohmann::json> readNdjson(const std::filesystem::path& path);
void writeNdjson(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows);

}  // namespace partmotion
