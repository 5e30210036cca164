#include "partmotion/common/binary_io.hpp"

#include <algorithm>
#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include "partmotion/common/error.hpp"

namespace partmotion {
namespace {

template <typename T>
void putLittle(std::ostream& out, T value) {
  unsigned char bytes[sizeof(T)];
  std::memcpy(bytes, &value, sizeof(T));
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  out.write(reinterpret_cast<const char*>(bytes), sizeof(T));
}

template <typename T>
T getLittle(std::istream& in, const std::filesystem::path& path) {
  unsigned char bytes[sizeof(T)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof(T))) {
    throw Error(ErrorCode::kFormat, "truncated container", path.string());
  }
  if constexpr (std::endian::native == std::endian::big) {
    std::reverse(bytes, bytes + sizeof(T));
  }
  T value;
  std::memcpy(&value, bytes, sizeof(T));
  return value;
}

}  // namespace

void writeContainer(const std::filesystem::path& path, const BinaryContainer& container) {
  if (container.magic.size() != 8) {
    throw Error(ErrorCode::kFormat, "container magic must be 8 bytes", container.magic);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot open for writing", path.string());
  }
  out.write(container.magic.data(), 8);
  putLittle<std::uint32_t>(out, container.version);
  const std::string header = container.header.dump();
  putLittle<std::uint64_t>(out, header.size());
  out.write(header.data(), static_cast<std::streamsize>(header.size()));
  putLittle<std::uint64_t>(out, container.payload.size());
  for (double v : container.payload) {
    putLittle<double>(out, v);
  }
  if (!out) {
    throw Error(ErrorCode::kIo, "write failed", path.string());
  }
}

BinaryContainer readContainer(const std::filesystem::path& path, const std::string& expectedMagic) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open for reading", path.string());
  }
  BinaryContainer c;
  c.magic.resize(8);
  if (!in.read(c.magic.data(), 8) || c.magic != expectedMagic) {
    throw Error(ErrorCode::kFormat, "bad magic, expected " + expectedMagic, path.string());
  }
  c.version = getLittle<std::uint32_t>(in, path);
  const auto headerSize = getLittle<std::uint64_t>(in, path);
  std::string header(headerSize, '\0');
  if (!in.read(header.data(), static_cast<std::streamsize>(headerSize))) {
    throw Error(ErrorCode::kFormat, "truncated header", path.string());
  }
  try {
    c.header = nlohmann::json::parse(header);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("bad container header: ") + e.what(), path.string());
  }
  const auto count = getLittle<std::uint64_t>(in, path);
  c.payload.resize(count);
  for (auto& v : c.payload) {
    v = getLittle<double>(in, path);
  }
  return c;
}

std::string readTextFile(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open for reading", path.string());
  }
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void writeTextFile(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot open for writing", path.string());
  }
  out << text;
}

std::vector<nlohmann::json> readNdjson(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw Error(ErrorCode::kIo, "cannot open for reading", path.string());
  }
  std::vector<nlohmann::json> rows;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    try {
      rows.push_back(nlohmann::json::parse(line));
    } catch (const nlohmann::json::exception& e) {
      throw Error(ErrorCode::kFormat,
                  path.string() + ":" + std::to_string(lineNo) + ": " + e.what(), line.substr(0, 200));
    }
  }
  return rows;
}

void writeNdjson(const std::filesystem::path& path, const std::vector<nlohmann::json>& rows) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIo, "cannot open for writing", path.string());
  }
  for (const auto& row : rows) {
    out << row.dump() << '\n';
  }
}

}  // namespace partmotion
