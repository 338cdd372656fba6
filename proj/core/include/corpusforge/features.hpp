#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corpusforge/manifest.hpp"

namespace corpusforge {

// Frame/filterbank parameters for the 13-coefficient MFCC front end.
// Frozen defaults: 25 ms / 10 ms frames, Hamming window, HTK mel scale over
// 0 Hz..Nyquist, 26 triangular filters, natural log with floor, orthonormal
// DCT-II keeping c0..c12, regression deltas with window 2.
struct MfccConfig {
  double frame_length_ms = 25.0;
  double frame_shift_ms = 10.0;
  int num_mel_filters = 26;
  int num_ceps = 13;
  double pre_emphasis = 0.97;
  double log_floor = 1e-10;
  int delta_window = 2;

  int frame_length_samples(std::uint32_t sample_rate_hz) const;
  int frame_shift_samples(std::uint32_t sample_rate_hz) const;
  // Next power of two >= frame length in samples.
  int fft_size(std::uint32_t sample_rate_hz) const;

  void validate() const;
};

// Row-major frames-by-coefficients buffer.
struct FrameMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  FrameMatrix() = default;
  FrameMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  double* row(std::size_t r) { return data.data() + r * cols; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
};

// Per-utterance vectors, row-aligned with `ids`.
struct FeatureMatrix {
  std::vector<std::string> ids;
  std::size_t dim = 0;
  std::vector<double> data;  // rows() x dim, row-major

  std::size_t rows() const { return ids.size(); }
  double* row(std::size_t r) { return data.data() + r * dim; }
  const double* row(std::size_t r) const { return data.data() + r * dim; }
  // Checks row/id alignment and that every entry is finite.
  void validate() const;
};

// Static MFCCs, one row per frame: pre-emphasis -> Hamming -> magnitude
// spectrum -> triangular mel filterbank -> log with floor -> DCT-II
// (orthonormal), keeping coefficients 0..num_ceps-1.
// Pre-emphasis runs within each frame; the first sample is scaled by
// (1 - pre_emphasis), the HTK convention.
FrameMatrix mfcc_frames(std::span<const double> samples, std::uint32_t sample_rate_hz,
                        const MfccConfig& config);

// [static | delta | delta-delta] columns. Delta is the regression formula
// sum_n n*(c[t+n]-c[t-n]) / (2*sum_n n^2) with replicated edge frames;
// delta-delta is delta applied to delta.
FrameMatrix append_deltas(const FrameMatrix& frames, int delta_window);

// Arithmetic mean per column.
std::vector<double> mean_pool(const FrameMatrix& frames);

struct FeaturizeReport {
  struct Item {
    std::string id;
    std::string message;
  };
  std::vector<Item> errors;  // records omitted from the matrix
};

// 39-dimensional utterance vectors in manifest order:
// mean_pool(append_deltas(mfcc_frames(audio))). Unreadable or too-short audio
// is reported and omitted. Rows are computed concurrently into pre-assigned
// slots, so the output does not depend on scheduling.
FeatureMatrix acoustic_vectors(const Manifest& manifest, const MfccConfig& config,
                               const std::string& base_dir = "",
                               FeaturizeReport* report = nullptr);

// Column-wise z-scoring (population variance); zero-variance columns go to 0.
FeatureMatrix standardize(const FeatureMatrix& features);

}  // namespace corpusforge
