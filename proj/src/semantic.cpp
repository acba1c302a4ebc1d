#include "seal/semantic.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <numbers>

#include <nlohmann/json.hpp>

#include "seal/drbg.hpp"
#include "seal/errors.hpp"
#include "seal/hash.hpp"
#include "seal/kernels.hpp"

namespace seal {

double norm(const SemanticVector& v) {
  return std::sqrt(kernels::dot(v.values, v.values));
}

double dot(const SemanticVector& a, const SemanticVector& b) {
  if (a.dim() != b.dim()) {
    throw ValidationError("semantic vector dimension mismatch: " +
                          std::to_string(a.dim()) + " vs " + std::to_string(b.dim()));
  }
  return kernels::dot(a.values, b.values);
}

void validate(const SemanticVector& v) {
  if (v.values.empty()) {
    throw ValidationError("semantic vector is empty");
  }
  for (double x : v.values) {
    if (!std::isfinite(x)) {
      throw ValidationError("semantic vector contains a non-finite entry");
    }
  }
  if (norm(v) <= 0.0) {
    throw ValidationError("semantic vector has zero norm");
  }
}

double angle_degrees(const SemanticVector& a, const SemanticVector& b) {
  validate(a);
  validate(b);
  const double cosine = dot(a, b) / (norm(a) * norm(b));
  const double clamped = std::clamp(cosine, -1.0, 1.0);
  return std::acos(clamped) * 180.0 / std::numbers::pi;
}

SemanticVector perturb_by_angle(const SemanticVector& v, double theta_deg,
                                const Seed256& seed) {
  validate(v);
  if (theta_deg < 0.0 || theta_deg > 180.0) {
    throw ValidationError("rotation angle must lie in [0, 180] degrees");
  }
  const std::size_t d = v.dim();
  const double inv_norm = 1.0 / norm(v);
  std::vector<double> unit(d);
  for (std::size_t i = 0; i < d; ++i) unit[i] = v.values[i] * inv_norm;

  Drbg drbg(seed);
  std::vector<double> ortho(d);
  double ortho_norm = 0.0;
  do {
    drbg.fill_normals(std::span<double>(ortho));
    const double along = kernels::dot(ortho, unit);
    for (std::size_t i = 0; i < d; ++i) ortho[i] -= along * unit[i];
    ortho_norm = std::sqrt(kernels::dot(ortho, ortho));
  } while (ortho_norm < 1e-12);  // re-draw a direction parallel to v

  const double theta = theta_deg * std::numbers::pi / 180.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  SemanticVector out;
  out.values.resize(d);
  for (std::size_t i = 0; i < d; ++i) {
    out.values[i] = c * unit[i] + s * ortho[i] / ortho_norm;
  }
  return out;
}

namespace {

std::vector<std::string> tokenize_lower(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    if (std::isspace(static_cast<unsigned char>(ch))) {
      if (!current.empty()) {
        tokens.push_back(std::move(current));
        current.clear();
      }
    } else {
      current.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(ch))));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

}  // namespace

SemanticVector embed_text(std::string_view text, const ProviderSpec& spec,
                          std::size_t dim) {
  if (spec.kind != ProviderSpec::Kind::mock) {
    throw ValidationError("embed_text requires the mock provider; file providers supply vectors directly");
  }
  if (dim == 0) {
    throw ValidationError("embedding dimension must be positive");
  }
  const auto tokens = tokenize_lower(text);
  if (tokens.empty()) {
    throw ValidationError("cannot embed empty text");
  }

  std::vector<double> sum(dim, 0.0);
  std::vector<double> token_vec(dim);
  for (const auto& token : tokens) {
    const auto* bytes = reinterpret_cast<const std::uint8_t*>(token.data());
    Seed256 seed = sha256({std::span<const std::uint8_t>(spec.mock_seed_salt),
                           std::span<const std::uint8_t>(bytes, token.size())});
    Drbg drbg(seed);
    drbg.fill_normals(std::span<double>(token_vec));
    for (std::size_t i = 0; i < dim; ++i) sum[i] += token_vec[i];
  }

  SemanticVector out{std::move(sum)};
  const double n = norm(out);
  if (n <= 0.0) {
    throw ValidationError("token vectors cancelled to a zero embedding");
  }
  for (double& x : out.values) x /= n;
  return out;
}

SemanticVector load_vector(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) {
    throw IoError("cannot open vector file: " + path.string());
  }
  nlohmann::json doc;
  try {
    in >> doc;
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed vector file " + path.string() + ": " + e.what());
  }
  if (!doc.contains("dim") || !doc.contains("values")) {
    throw IoError("vector file missing \"dim\" or \"values\": " + path.string());
  }
  SemanticVector v;
  v.values = doc["values"].get<std::vector<double>>();
  const auto declared = doc["dim"].get<std::size_t>();
  if (declared != v.dim()) {
    throw ValidationError("vector file dimension mismatch: dim=" +
                          std::to_string(declared) + " but " +
                          std::to_string(v.dim()) + " values");
  }
  validate(v);
  return v;
}

void save_vector(const std::filesystem::path& path, const SemanticVector& v) {
  validate(v);
  nlohmann::json doc;
  doc["dim"] = v.dim();
  doc["values"] = v.values;
  std::ofstream out(path);
  if (!out) {
    throw IoError("cannot write vector file: " + path.string());
  }
  out << doc.dump(2) << '\n';
}

}  // namespace seal
