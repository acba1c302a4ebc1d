#include "seal/noisefield.hpp"

#include <zlib.h>

#include <cmath>
#include <cstring>
#include <fstream>

#include "seal/drbg.hpp"
#include "seal/errors.hpp"
#include "seal/parallel.hpp"

namespace seal {

void Layout::validate() const {
  if (channels == 0 || height == 0 || width == 0 || patch_rows == 0 ||
      patch_cols == 0) {
    throw ValidationError("layout dimensions must be positive");
  }
  if (height % patch_rows != 0 || width % patch_cols != 0) {
    throw ValidationError("patch grid must divide the spatial dimensions");
  }
}

namespace {

void check_patch_index(const Layout& layout, std::size_t patch) {
  if (patch >= layout.num_patches()) {
    throw ValidationError("patch index " + std::to_string(patch) +
                          " out of range [0, " +
                          std::to_string(layout.num_patches()) + ")");
  }
}

}  // namespace

void patch_slice(const NoiseField& field, std::size_t patch,
                 std::span<float> out) {
  const Layout& L = field.layout;
  check_patch_index(L, patch);
  const std::size_t ph = L.height / L.patch_rows;
  const std::size_t pw = L.width / L.patch_cols;
  const std::size_t row0 = (patch / L.patch_cols) * ph;
  const std::size_t col0 = (patch % L.patch_cols) * pw;
  std::size_t k = 0;
  for (std::size_t ch = 0; ch < L.channels; ++ch) {
    const std::size_t base = ch * L.height * L.width;
    for (std::size_t dr = 0; dr < ph; ++dr) {
      const std::size_t row_base = base + (row0 + dr) * L.width + col0;
      for (std::size_t dc = 0; dc < pw; ++dc) {
        out[k++] = field.values[row_base + dc];
      }
    }
  }
}

std::vector<float> patch_slice(const NoiseField& field, std::size_t patch) {
  std::vector<float> out(field.layout.patch_len());
  patch_slice(field, patch, std::span<float>(out));
  return out;
}

void scatter_patch(NoiseField& field, std::size_t patch,
                   std::span<const float> values) {
  const Layout& L = field.layout;
  check_patch_index(L, patch);
  const std::size_t ph = L.height / L.patch_rows;
  const std::size_t pw = L.width / L.patch_cols;
  const std::size_t row0 = (patch / L.patch_cols) * ph;
  const std::size_t col0 = (patch % L.patch_cols) * pw;
  std::size_t k = 0;
  for (std::size_t ch = 0; ch < L.channels; ++ch) {
    const std::size_t base = ch * L.height * L.width;
    for (std::size_t dr = 0; dr < ph; ++dr) {
      const std::size_t row_base = base + (row0 + dr) * L.width + col0;
      for (std::size_t dc = 0; dc < pw; ++dc) {
        field.values[row_base + dc] = values[k++];
      }
    }
  }
}

NoiseField generate_watermarked_noise(const SemanticVector& v, const Salt& salt,
                                      const Layout& layout, int bit_count,
                                      const ProjectionTable* table) {
  layout.validate();
  validate(v);
  if (table != nullptr &&
      (table->dim() != v.dim() || table->num_patches() < layout.num_patches() ||
       table->bit_count() != bit_count)) {
    throw ValidationError("projection table does not cover this context");
  }
  NoiseField field;
  field.layout = layout;
  field.values.resize(layout.field_len());
  const std::size_t p = layout.patch_len();

  parallel_for(layout.num_patches(), [&](std::size_t i) {
    const KeyBits bits = table != nullptr ? key_bits(v, i, *table)
                                          : key_bits(v, i, salt, bit_count);
    std::vector<float> patch(p);
    patch_noise_f32(patch_seed(bits, salt), std::span<float>(patch));
    scatter_patch(field, i, patch);
  });
  return field;
}

NoiseField random_noise(const Layout& layout, const Seed256& seed) {
  layout.validate();
  NoiseField field;
  field.layout = layout;
  field.values.resize(layout.field_len());
  Drbg drbg(seed);
  drbg.fill_normals(std::span<float>(field.values));
  return field;
}

namespace {

constexpr char kMagic[8] = {'S', 'E', 'A', 'L', 'N', 'F', '0', '1'};

void put_u32le(std::vector<std::uint8_t>& out, std::uint32_t v) {
  out.push_back(static_cast<std::uint8_t>(v));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
  out.push_back(static_cast<std::uint8_t>(v >> 16));
  out.push_back(static_cast<std::uint8_t>(v >> 24));
}

std::uint32_t get_u32le(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 |
         static_cast<std::uint32_t>(p[3]) << 24;
}

std::uint32_t payload_crc(std::span<const std::uint8_t> payload) {
  return static_cast<std::uint32_t>(
      ::crc32(0L, payload.data(), static_cast<uInt>(payload.size())));
}

}  // namespace

void save(const NoiseField& field, const std::filesystem::path& path) {
  field.layout.validate();
  if (field.values.size() != field.layout.field_len()) {
    throw ValidationError("field value count does not match its layout");
  }
  static_assert(sizeof(float) == 4);

  std::vector<std::uint8_t> payload(field.values.size() * 4);
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    std::uint32_t bits;
    std::memcpy(&bits, &field.values[i], 4);
    payload[i * 4] = static_cast<std::uint8_t>(bits);
    payload[i * 4 + 1] = static_cast<std::uint8_t>(bits >> 8);
    payload[i * 4 + 2] = static_cast<std::uint8_t>(bits >> 16);
    payload[i * 4 + 3] = static_cast<std::uint8_t>(bits >> 24);
  }

  std::vector<std::uint8_t> header;
  header.reserve(kFieldHeaderBytes);
  header.insert(header.end(), kMagic, kMagic + 8);
  put_u32le(header, field.layout.channels);
  put_u32le(header, field.layout.height);
  put_u32le(header, field.layout.width);
  put_u32le(header, field.layout.patch_rows);
  put_u32le(header, field.layout.patch_cols);
  put_u32le(header, payload_crc(payload));

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw IoError("cannot open for writing: " + path.string());
  }
  out.write(reinterpret_cast<const char*>(header.data()),
            static_cast<std::streamsize>(header.size()));
  out.write(reinterpret_cast<const char*>(payload.data()),
            static_cast<std::streamsize>(payload.size()));
  if (!out) {
    throw IoError("write failed: " + path.string());
  }
}

NoiseField load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw IoError("cannot open: " + path.string());
  }
  std::uint8_t header[kFieldHeaderBytes];
  in.read(reinterpret_cast<char*>(header), kFieldHeaderBytes);
  if (in.gcount() != static_cast<std::streamsize>(kFieldHeaderBytes)) {
    throw IoError("truncated header: " + path.string());
  }
  if (std::memcmp(header, kMagic, 8) != 0) {
    throw IoError("bad magic, not a noise field file: " + path.string());
  }

  NoiseField field;
  field.layout.channels = get_u32le(header + 8);
  field.layout.height = get_u32le(header + 12);
  field.layout.width = get_u32le(header + 16);
  field.layout.patch_rows = get_u32le(header + 20);
  field.layout.patch_cols = get_u32le(header + 24);
  const std::uint32_t stored_crc = get_u32le(header + 28);
  field.layout.validate();

  const std::size_t payload_len = field.layout.field_len() * 4;
  std::vector<std::uint8_t> payload(payload_len);
  in.read(reinterpret_cast<char*>(payload.data()),
          static_cast<std::streamsize>(payload_len));
  if (in.gcount() != static_cast<std::streamsize>(payload_len)) {
    throw IoError("truncated payload: " + path.string());
  }
  if (payload_crc(payload) != stored_crc) {
    throw IoError("payload checksum mismatch: " + path.string());
  }

  field.values.resize(field.layout.field_len());
  for (std::size_t i = 0; i < field.values.size(); ++i) {
    const std::uint32_t bits = get_u32le(payload.data() + i * 4);
    std::memcpy(&field.values[i], &bits, 4);
  }
  for (float v : field.values) {
    if (!std::isfinite(v)) {
      throw IoError("field contains non-finite values: " + path.string());
    }
  }
  return field;
}

}  // namespace seal
