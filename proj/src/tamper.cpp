#include "seal/tamper.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <memory>
#include <numeric>

#include <nlohmann/json.hpp>

#include "seal/errors.hpp"
#include "seal/kernels.hpp"
#include "seal/parallel.hpp"

namespace seal {

namespace {

void check_recovery_bits(int bit_count) {
  if (bit_count < 1 || bit_count > kMaxBitsPerPatch) {
    throw ValidationError("exhaustive bit recovery requires bit_count in [1, " +
                          std::to_string(kMaxBitsPerPatch) + "]");
  }
}

}  // namespace

BitRecovery recover_patch_bits(std::span<const float> patch_values,
                               std::size_t patch_index, const Salt& salt,
                               int bit_count) {
  check_recovery_bits(bit_count);
  const std::size_t p = patch_values.size();
  const std::uint32_t patterns = 1u << bit_count;

  BitRecovery best;
  best.distance = std::numeric_limits<double>::infinity();
  std::vector<float> candidate(p);
  for (std::uint32_t pattern = 0; pattern < patterns; ++pattern) {
    KeyBits bits{pattern, bit_count, patch_index};
    patch_noise_f32(patch_seed(bits, salt), std::span<float>(candidate));
    const double d2 = kernels::l2_distance_sq(candidate, patch_values);
    if (d2 < best.distance) {
      best.distance = d2;
      best.bits = bits;
    }
  }
  best.distance = std::sqrt(best.distance);
  return best;
}

CandidateTable::CandidateTable(const Salt& salt, const Layout& layout,
                               int bit_count)
    : salt_(salt), layout_(layout), bit_count_(bit_count) {
  check_recovery_bits(bit_count);
  layout_.validate();
  const std::size_t patterns = std::size_t{1} << bit_count;
  const std::size_t p = layout_.patch_len();
  noise_.resize(layout_.num_patches() * patterns * p);
  parallel_for(layout_.num_patches(), [&](std::size_t i) {
    float* base = noise_.data() + i * patterns * p;
    for (std::uint32_t pattern = 0; pattern < patterns; ++pattern) {
      KeyBits bits{pattern, bit_count_, i};
      patch_noise_f32(patch_seed(bits, salt_),
                      std::span<float>(base + pattern * p, p));
    }
  });
}

std::span<const float> CandidateTable::noise(std::size_t patch,
                                             std::uint32_t pattern) const {
  const std::size_t patterns = std::size_t{1} << bit_count_;
  const std::size_t p = layout_.patch_len();
  if (patch >= layout_.num_patches() || pattern >= patterns) {
    throw ValidationError("candidate table index out of range");
  }
  return {noise_.data() + (patch * patterns + pattern) * p, p};
}

Heatmap compute_heatmap(const NoiseField& recovered, const Salt& salt,
                        int bit_count, const CandidateTable* table) {
  check_recovery_bits(bit_count);
  recovered.layout.validate();
  if (table != nullptr && (!(table->layout() == recovered.layout) ||
                           table->bit_count() != bit_count)) {
    throw ValidationError("candidate table does not cover this context");
  }

  const Layout& L = recovered.layout;
  // A transient table pays off whenever it fits; cap at 256 MiB.
  const std::size_t table_bytes =
      L.num_patches() * (std::size_t{1} << bit_count) * L.patch_len() * 4;
  std::unique_ptr<CandidateTable> local;
  if (table == nullptr && table_bytes <= (std::size_t{256} << 20)) {
    local = std::make_unique<CandidateTable>(salt, L, bit_count);
    table = local.get();
  }

  Heatmap heatmap;
  heatmap.rows = L.patch_rows;
  heatmap.cols = L.patch_cols;
  heatmap.values.assign(L.num_patches(), 0.0);

  const std::size_t p = L.patch_len();
  const std::uint32_t patterns = 1u << bit_count;
  parallel_for(L.num_patches(), [&](std::size_t i) {
    std::vector<float> observed(p);
    patch_slice(recovered, i, std::span<float>(observed));
    if (table != nullptr) {
      double best = std::numeric_limits<double>::infinity();
      for (std::uint32_t pattern = 0; pattern < patterns; ++pattern) {
        best = std::min(best, kernels::l2_distance_sq(table->noise(i, pattern),
                                                      observed));
      }
      heatmap.values[i] = std::sqrt(best);
    } else {
      heatmap.values[i] = recover_patch_bits(observed, i, salt, bit_count).distance;
    }
  });
  return heatmap;
}

ComponentStats label_components(std::span<const std::uint8_t> mask,
                                std::size_t rows, std::size_t cols) {
  if (mask.size() != rows * cols) {
    throw ValidationError("mask size does not match grid dimensions");
  }
  std::vector<std::size_t> parent(mask.size());
  std::iota(parent.begin(), parent.end(), 0);

  const auto find = [&](std::size_t x) {
    while (parent[x] != x) {
      parent[x] = parent[parent[x]];
      x = parent[x];
    }
    return x;
  };
  const auto merge = [&](std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a != b) parent[std::max(a, b)] = std::min(a, b);
  };

  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) {
      const std::size_t idx = r * cols + c;
      if (!mask[idx]) continue;
      if (c > 0 && mask[idx - 1]) merge(idx, idx - 1);
      if (r > 0 && mask[idx - cols]) merge(idx, idx - cols);
    }
  }

  std::vector<std::size_t> area(mask.size(), 0);
  ComponentStats stats;
  for (std::size_t idx = 0; idx < mask.size(); ++idx) {
    if (!mask[idx]) continue;
    const std::size_t root = find(idx);
    if (area[root]++ == 0) ++stats.count;
    stats.largest = std::max(stats.largest, area[root]);
  }
  return stats;
}

namespace {

// Nearest-rank percentile: the ceil(q * N)-th smallest value.
double nearest_rank_percentile(std::vector<double> values, double q) {
  const auto rank = static_cast<std::size_t>(
      std::ceil(q * static_cast<double>(values.size())));
  const std::size_t index = std::max<std::size_t>(rank, 1) - 1;
  std::nth_element(values.begin(),
                   values.begin() + static_cast<std::ptrdiff_t>(index),
                   values.end());
  return values[index];
}

}  // namespace

TamperReport spatial_test(const Heatmap& heatmap, std::size_t max_cluster_count) {
  if (heatmap.values.empty() ||
      heatmap.values.size() !=
          static_cast<std::size_t>(heatmap.rows) * heatmap.cols) {
    throw ValidationError("heatmap dimensions are inconsistent");
  }
  TamperReport report;
  report.threshold_value = nearest_rank_percentile(heatmap.values, 0.80);

  std::vector<std::uint8_t> mask(heatmap.values.size());
  for (std::size_t i = 0; i < mask.size(); ++i) {
    mask[i] = heatmap.values[i] > report.threshold_value ? 1 : 0;
  }
  const ComponentStats stats = label_components(mask, heatmap.rows, heatmap.cols);
  report.cluster_count = stats.count;
  report.largest_cluster_area = stats.largest;
  report.tampered = stats.count > 0 && stats.count <= max_cluster_count;
  return report;
}

double tamper_score(const Heatmap& heatmap) {
  const TamperReport report = spatial_test(heatmap);
  const double cells = static_cast<double>(heatmap.values.size());
  if (report.cluster_count == 0) {
    return -(cells + 1.0);
  }
  return -static_cast<double>(report.cluster_count) +
         static_cast<double>(report.largest_cluster_area) / (cells + 1.0);
}

std::string render_heatmap_text(const Heatmap& heatmap) {
  long max_value = 0;
  for (double v : heatmap.values) {
    max_value = std::max(max_value, std::lround(v));
  }
  const int width = static_cast<int>(std::to_string(max_value).size());
  std::string out;
  for (std::uint32_t r = 0; r < heatmap.rows; ++r) {
    for (std::uint32_t c = 0; c < heatmap.cols; ++c) {
      const std::string cell = std::to_string(std::lround(heatmap.at(r, c)));
      if (c > 0) out.push_back(' ');
      out.append(static_cast<std::size_t>(width) - cell.size(), ' ');
      out += cell;
    }
    out.push_back('\n');
  }
  return out;
}

void to_json(nlohmann::json& j, const Heatmap& h) {
  j = nlohmann::json{{"rows", h.rows}, {"cols", h.cols}, {"values", h.values}};
}

void to_json(nlohmann::json& j, const TamperReport& r) {
  j = nlohmann::json{{"cluster_count", r.cluster_count},
                     {"largest_cluster_area", r.largest_cluster_area},
                     {"threshold_value", r.threshold_value},
                     {"tampered", r.tampered}};
}

}  // namespace seal
