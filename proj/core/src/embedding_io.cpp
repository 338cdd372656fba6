#include "corpusforge/embedding_io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <unordered_set>

#include "corpusforge/error.hpp"

namespace corpusforge {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

std::uint32_t load_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

float load_f32le(const unsigned char* p) {
  const std::uint32_t bits = load_u32le(p);
  return std::bit_cast<float>(bits);
}

FeatureMatrix load_binary(std::ifstream& in, const std::string& path,
                          std::optional<std::size_t> expected_dim) {
  unsigned char hdr[12];
  if (!in.read(reinterpret_cast<char*>(hdr), 12))
    throw ValidationError(path + ": truncated embedding header");
  const std::size_t dim = load_u32le(hdr + 4);
  const std::size_t count = load_u32le(hdr + 8);
  if (dim == 0) throw ValidationError(path + ": embedding dim is zero");
  if (expected_dim && dim != *expected_dim)
    throw ValidationError(path + ": embedding dim " + std::to_string(dim) +
                          " does not match expected " + std::to_string(*expected_dim));

  FeatureMatrix out;
  out.dim = dim;
  out.ids.reserve(count);
  out.data.reserve(count * dim);
  std::unordered_set<std::string> seen;
  std::vector<unsigned char> buf(dim * 4);
  for (std::size_t r = 0; r < count; ++r) {
    unsigned char len_bytes[2];
    if (!in.read(reinterpret_cast<char*>(len_bytes), 2))
      throw ValidationError(path + ": row count in header exceeds stored rows");
    const std::size_t id_len = static_cast<std::size_t>(len_bytes[0] | (len_bytes[1] << 8));
    std::string id(id_len, '\0');
    if (!in.read(id.data(), static_cast<std::streamsize>(id_len)))
      throw ValidationError(path + ": truncated id in row " + std::to_string(r));
    if (!seen.insert(id).second)
      throw ValidationError(path + ": duplicate id '" + id + "'");
    if (!in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size())))
      throw ValidationError(path + ": truncated values in row " + std::to_string(r));
    for (std::size_t c = 0; c < dim; ++c) {
      const float v = load_f32le(buf.data() + c * 4);
      if (!std::isfinite(v))
        throw ValidationError(path + ": non-finite value in row '" + id + "'");
      out.data.push_back(static_cast<double>(v));
    }
    out.ids.push_back(std::move(id));
  }
  // Anything left over means the header undercounted.
  if (in.peek() != std::char_traits<char>::eof())
    throw ValidationError(path + ": stored rows exceed row count in header");
  return out;
}

FeatureMatrix load_tsv(const std::string& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw ValidationError(path + ": cannot open");
  FeatureMatrix out;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::istringstream ss(line);
    std::string id;
    if (!std::getline(ss, id, '\t') || id.empty())
      throw ValidationError(path + ":" + std::to_string(line_no) + ": missing id");
    if (!seen.insert(id).second)
      throw ValidationError(path + ": duplicate id '" + id + "'");
    std::vector<double> values;
    std::string tok;
    while (std::getline(ss, tok, '\t')) {
      double v;
      try {
        v = std::stod(tok);
      } catch (const std::exception&) {
        throw ValidationError(path + ":" + std::to_string(line_no) + ": bad value '" + tok + "'");
      }
      if (!std::isfinite(v))
        throw ValidationError(path + ": non-finite value in row '" + id + "'");
      values.push_back(v);
    }
    if (values.empty())
      throw ValidationError(path + ":" + std::to_string(line_no) + ": row has no values");
    if (out.dim == 0) {
      out.dim = values.size();
      if (expected_dim && out.dim != *expected_dim)
        throw ValidationError(path + ": embedding dim " + std::to_string(out.dim) +
                              " does not match expected " + std::to_string(*expected_dim));
    } else if (values.size() != out.dim) {
      throw ValidationError(path + ":" + std::to_string(line_no) + ": row '" + id + "' has " +
                            std::to_string(values.size()) + " values, expected " +
                            std::to_string(out.dim));
    }
    out.ids.push_back(std::move(id));
    out.data.insert(out.data.end(), values.begin(), values.end());
  }
  if (expected_dim && out.dim == 0) out.dim = *expected_dim;  // empty file
  return out;
}

}  // namespace

FeatureMatrix load_embedding_matrix(const std::string& path,
                                    std::optional<std::size_t> expected_dim) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open");
  char magic[4] = {};
  in.read(magic, 4);
  if (in.gcount() == 4 && std::memcmp(magic, kMagic, 4) == 0) {
    in.seekg(0, std::ios::beg);
    return load_binary(in, path, expected_dim);
  }
  return load_tsv(path, expected_dim);
}

void write_embedding_matrix(const FeatureMatrix& features, const std::string& path) {
  features.validate();
  if (features.dim == 0) throw ValidationError("write_embedding_matrix: zero dim");
  if (features.rows() > 0xFFFFFFFFull)
    throw ValidationError("write_embedding_matrix: too many rows for the container");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(path + ": cannot open for writing");

  auto put_u32 = [&](std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };

  out.write(kMagic, 4);
  put_u32(static_cast<std::uint32_t>(features.dim));
  put_u32(static_cast<std::uint32_t>(features.rows()));
  for (std::size_t r = 0; r < features.rows(); ++r) {
    const std::string& id = features.ids[r];
    if (id.size() > 0xFFFF) throw ValidationError("id too long for the container: " + id);
    const unsigned char len_bytes[2] = {static_cast<unsigned char>(id.size()),
                                        static_cast<unsigned char>(id.size() >> 8)};
    out.write(reinterpret_cast<const char*>(len_bytes), 2);
    out.write(id.data(), static_cast<std::streamsize>(id.size()));
    const double* row = features.row(r);
    for (std::size_t c = 0; c < features.dim; ++c) {
      const auto bits = std::bit_cast<std::uint32_t>(static_cast<float>(row[c]));
      const unsigned char b[4] = {
          static_cast<unsigned char>(bits), static_cast<unsigned char>(bits >> 8),
          static_cast<unsigned char>(bits >> 16), static_cast<unsigned char>(bits >> 24)};
      out.write(reinterpret_cast<const char*>(b), 4);
    }
  }
  if (!out) throw Error(path + ": write failed");
}

}  // namespace corpusforge
