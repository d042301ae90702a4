#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

namespace catou::io {

using json = nlohmann::json;

class IoError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

void ensure_directory(const std::filesystem::path& dir);
// whole-file write; throws IoError when the file cannot be written
void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);
json read_json(const std::filesystem::path& path);
// two-space indent plus a trailing newline
std::string dump(const json& j);

// Compiler and library versions. Contains nothing that varies between runs
// of the same binary (no host name, clock or thread count).
json environment_fingerprint();

}  // namespace catou::io
