#ifndef VARHSMM_MANIFEST_HPP
#define VARHSMM_MANIFEST_HPP

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include <json.hpp>

namespace varhsmm {

inline constexpr const char* kToolVersion = "0.1.0";

/// Hex SHA-256 of a byte string / of a file's contents.
std::string sha256_hex(const std::string& bytes);
std::string sha256_file(const std::filesystem::path& path);

/// What a run consumed and how it was configured. Contains no timestamps or
/// host details, so equal invocations produce equal manifests.
struct RunManifest {
  std::string command;
  std::vector<std::string> arguments;
  std::map<std::string, std::string> inputs;  // path -> sha256
  nlohmann::ordered_json config = nlohmann::ordered_json::object();
  std::string tool_version = kToolVersion;
  std::string rng_algorithm;
  std::uint64_t seed = 0;

  void add_input(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;
};

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest);

}  // namespace varhsmm

#endif  // VARHSMM_MANIFEST_HPP
