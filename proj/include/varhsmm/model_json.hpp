#ifndef VARHSMM_MODEL_JSON_HPP
#define VARHSMM_MODEL_JSON_HPP

#include <filesystem>
#include <string>

#include <json.hpp>

#include "varhsmm/model.hpp"

namespace varhsmm {

struct StoredModel {
  ModelSpec spec;
  ModelParams params;
};

/// {spec: {M, d, p, D}, delta, Q, r, mu, Sigma, A}; matrices are row-major
/// nested arrays, A is indexed [state][lag].
nlohmann::ordered_json model_to_json(const ModelSpec& spec, const ModelParams& params);

/// Throws ValidationError naming the offending field on a missing field, a
/// wrong shape, a non-number, or parameters that fail validate_params.
StoredModel model_from_json(const nlohmann::ordered_json& doc);

std::string dump_model(const ModelSpec& spec, const ModelParams& params);
StoredModel parse_model(const std::string& text, const std::string& source = "model");

StoredModel read_model(const std::filesystem::path& path);
void write_model(const std::filesystem::path& path, const ModelSpec& spec, const ModelParams& params);

/// Row-major nested arrays, shared with the other JSON writers.
nlohmann::ordered_json matrix_to_json(const Matrix& m);

}  // namespace varhsmm

#endif  // VARHSMM_MODEL_JSON_HPP
