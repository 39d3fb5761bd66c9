#include "varhsmm/manifest.hpp"

#include <fmt/format.h>
#include <openssl/evp.h>

#include <memory>

#include "varhsmm/csv.hpp"
#include "varhsmm/errors.hpp"

namespace varhsmm {

std::string sha256_hex(const std::string& bytes) {
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), &EVP_MD_CTX_free);
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int length = 0;
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1 ||
      EVP_DigestUpdate(ctx.get(), bytes.data(), bytes.size()) != 1 ||
      EVP_DigestFinal_ex(ctx.get(), digest, &length) != 1)
    throw IoError("SHA-256 computation failed");
  std::string out;
  for (unsigned int i = 0; i < length; ++i) out += fmt::format("{:02x}", digest[i]);
  return out;
}

std::string sha256_file(const std::filesystem::path& path) { return sha256_hex(read_text(path)); }

void RunManifest::add_input(const std::filesystem::path& path) { inputs[path.string()] = sha256_file(path); }

nlohmann::ordered_json RunManifest::to_json() const {
  nlohmann::ordered_json doc;
  doc["command"] = command;
  doc["arguments"] = arguments;
  doc["inputs"] = nlohmann::ordered_json::object();
  for (const auto& [path, hash] : inputs) doc["inputs"][path] = {{"sha256", hash}};
  doc["config"] = config;
  doc["tool_version"] = tool_version;
  doc["rng"] = {{"algorithm", rng_algorithm}, {"seed", seed}};
  return doc;
}

void write_manifest(const std::filesystem::path& path, const RunManifest& manifest) {
  write_text_atomic(path, manifest.to_json().dump(2) + "\n");
}

}  // namespace varhsmm
