#include "varhsmm/model_json.hpp"

#include <fmt/format.h>

#include "varhsmm/csv.hpp"
#include "varhsmm/errors.hpp"

namespace varhsmm {

namespace {

using Json = nlohmann::ordered_json;

const Json& field(const Json& obj, const char* key, const std::string& path) {
  if (!obj.is_object()) throw ValidationError(fmt::format("model JSON: '{}' must be an object", path));
  const auto it = obj.find(key);
  if (it == obj.end()) throw ValidationError(fmt::format("model JSON: missing field '{}{}'", path.empty() ? "" : path + ".", key));
  return *it;
}

int read_int(const Json& value, const std::string& path) {
  if (!value.is_number_integer()) throw ValidationError(fmt::format("model JSON: '{}' must be an integer", path));
  return value.get<int>();
}

double read_number(const Json& value, const std::string& path) {
  if (!value.is_number()) throw ValidationError(fmt::format("model JSON: '{}' must be a number", path));
  return value.get<double>();
}

const Json& read_array(const Json& value, std::size_t size, const std::string& path) {
  if (!value.is_array()) throw ValidationError(fmt::format("model JSON: '{}' must be an array", path));
  if (value.size() != size)
    throw ValidationError(fmt::format("model JSON: '{}' has {} entries, expected {}", path, value.size(), size));
  return value;
}

Vector read_vector(const Json& value, int n, const std::string& path) {
  read_array(value, n, path);
  Vector out(n);
  for (int i = 0; i < n; ++i) out(i) = read_number(value[i], fmt::format("{}[{}]", path, i));
  return out;
}

Matrix read_matrix(const Json& value, int rows, int cols, const std::string& path) {
  read_array(value, rows, path);
  Matrix out(rows, cols);
  for (int r = 0; r < rows; ++r) out.row(r) = read_vector(value[r], cols, fmt::format("{}[{}]", path, r)).transpose();
  return out;
}

Json vector_to_json(const Vector& v) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(v(i));
  return out;
}

}  // namespace

Json matrix_to_json(const Matrix& m) {
  Json out = Json::array();
  for (Eigen::Index r = 0; r < m.rows(); ++r) out.push_back(vector_to_json(m.row(r).transpose()));
  return out;
}

Json model_to_json(const ModelSpec& spec, const ModelParams& params) {
  require_valid(spec, params);
  Json doc;
  doc["spec"] = {{"M", spec.states}, {"d", spec.dim}, {"p", spec.order}, {"D", spec.max_duration}};
  doc["delta"] = vector_to_json(params.initial);
  doc["Q"] = matrix_to_json(params.transition);
  doc["r"] = matrix_to_json(params.duration);
  Json mu = Json::array();
  Json sigma = Json::array();
  Json a = Json::array();
  for (int j = 0; j < spec.states; ++j) {
    mu.push_back(vector_to_json(params.intercept[j]));
    sigma.push_back(matrix_to_json(params.covariance[j]));
    Json lags = Json::array();
    for (const Matrix& lag : params.ar[j]) lags.push_back(matrix_to_json(lag));
    a.push_back(std::move(lags));
  }
  doc["mu"] = std::move(mu);
  doc["Sigma"] = std::move(sigma);
  doc["A"] = std::move(a);
  return doc;
}

StoredModel model_from_json(const Json& doc) {
  const Json& s = field(doc, "spec", "");
  StoredModel out;
  out.spec.states = read_int(field(s, "M", "spec"), "spec.M");
  out.spec.dim = read_int(field(s, "d", "spec"), "spec.d");
  out.spec.order = read_int(field(s, "p", "spec"), "spec.p");
  out.spec.max_duration = read_int(field(s, "D", "spec"), "spec.D");
  validate_spec(out.spec);
  const int m = out.spec.states;
  const int d = out.spec.dim;
  const int p = out.spec.order;

  ModelParams& params = out.params;
  params.initial = read_vector(field(doc, "delta", ""), m, "delta");
  params.transition = read_matrix(field(doc, "Q", ""), m, m, "Q");
  params.duration = read_matrix(field(doc, "r", ""), m, out.spec.max_duration, "r");
  const Json& mu = read_array(field(doc, "mu", ""), m, "mu");
  const Json& sigma = read_array(field(doc, "Sigma", ""), m, "Sigma");
  const Json& a = read_array(field(doc, "A", ""), m, "A");
  for (int j = 0; j < m; ++j) {
    params.intercept.push_back(read_vector(mu[j], d, fmt::format("mu[{}]", j)));
    params.covariance.push_back(read_matrix(sigma[j], d, d, fmt::format("Sigma[{}]", j)));
    read_array(a[j], p, fmt::format("A[{}]", j));
    std::vector<Matrix> lags;
    for (int k = 0; k < p; ++k) lags.push_back(read_matrix(a[j][k], d, d, fmt::format("A[{}][{}]", j, k)));
    params.ar.push_back(std::move(lags));
  }
  require_valid(out.spec, params);
  return out;
}

std::string dump_model(const ModelSpec& spec, const ModelParams& params) {
  return model_to_json(spec, params).dump(2) + "\n";
}

StoredModel parse_model(const std::string& text, const std::string& source) {
  Json doc;
  try {
    doc = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ValidationError(fmt::format("{}: malformed JSON: {}", source, e.what()));
  }
  try {
    return model_from_json(doc);
  } catch (const ValidationError& e) {
    throw ValidationError(fmt::format("{}: {}", source, e.what()));
  }
}

StoredModel read_model(const std::filesystem::path& path) { return parse_model(read_text(path), path.string()); }

void write_model(const std::filesystem::path& path, const ModelSpec& spec, const ModelParams& params) {
  write_text_atomic(path, dump_model(spec, params));
}

}  // namespace varhsmm
