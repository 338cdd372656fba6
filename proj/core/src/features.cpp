#include "corpusforge/features.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <filesystem>
#include <thread>

#include "corpusforge/error.hpp"
#include "corpusforge/wave.hpp"

namespace corpusforge {

namespace {

constexpr double kPi = 3.141592653589793238462643;

// In-place iterative radix-2 Cooley-Tukey; n must be a power of two.
void fft_radix2(std::vector<std::complex<double>>& a) {
  const std::size_t n = a.size();
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(ang), std::sin(ang));
    for (std::size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (std::size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = a[i + k];
        const std::complex<double> v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

double hz_to_mel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }
double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

// Triangular filter weights evaluated at the exact FFT bin frequencies.
// weights[m][k] covers spectrum bins 0..fft_size/2.
std::vector<std::vector<double>> mel_filterbank(int num_filters, int fft_size,
                                                std::uint32_t sample_rate_hz) {
  const int num_bins = fft_size / 2 + 1;
  const double nyquist = static_cast<double>(sample_rate_hz) / 2.0;
  const double mel_high = hz_to_mel(nyquist);
  std::vector<double> edges_hz(static_cast<std::size_t>(num_filters) + 2);
  for (int j = 0; j < num_filters + 2; ++j)
    edges_hz[j] = mel_to_hz(mel_high * static_cast<double>(j) / static_cast<double>(num_filters + 1));

  std::vector<std::vector<double>> weights(num_filters, std::vector<double>(num_bins, 0.0));
  for (int m = 0; m < num_filters; ++m) {
    const double left = edges_hz[m];
    const double center = edges_hz[m + 1];
    const double right = edges_hz[m + 2];
    for (int k = 0; k < num_bins; ++k) {
      const double f = static_cast<double>(k) * static_cast<double>(sample_rate_hz) /
                       static_cast<double>(fft_size);
      if (f <= left || f >= right) continue;
      weights[m][k] = f <= center ? (f - left) / (center - left) : (right - f) / (right - center);
    }
  }
  return weights;
}

}  // namespace

int MfccConfig::frame_length_samples(std::uint32_t sample_rate_hz) const {
  return static_cast<int>(std::llround(frame_length_ms * 1e-3 * sample_rate_hz));
}

int MfccConfig::frame_shift_samples(std::uint32_t sample_rate_hz) const {
  return static_cast<int>(std::llround(frame_shift_ms * 1e-3 * sample_rate_hz));
}

int MfccConfig::fft_size(std::uint32_t sample_rate_hz) const {
  int n = 1;
  while (n < frame_length_samples(sample_rate_hz)) n <<= 1;
  return n;
}

void MfccConfig::validate() const {
  if (!(frame_length_ms > 0) || !(frame_shift_ms > 0))
    throw ValidationError("mfcc: frame length and shift must be positive");
  if (frame_shift_ms > frame_length_ms)
    throw ValidationError("mfcc: frame_shift_ms must not exceed frame_length_ms");
  if (num_mel_filters <= 0) throw ValidationError("mfcc: num_mel_filters must be positive");
  if (num_ceps <= 0 || num_ceps > num_mel_filters)
    throw ValidationError("mfcc: need 0 < num_ceps <= num_mel_filters");
  if (!(log_floor > 0)) throw ValidationError("mfcc: log_floor must be positive");
  if (delta_window <= 0) throw ValidationError("mfcc: delta_window must be positive");
}

FrameMatrix mfcc_frames(std::span<const double> samples, std::uint32_t sample_rate_hz,
                        const MfccConfig& config) {
  config.validate();
  if (sample_rate_hz == 0) throw ValidationError("mfcc: sample_rate_hz must be positive");
  const int frame_len = config.frame_length_samples(sample_rate_hz);
  const int shift = config.frame_shift_samples(sample_rate_hz);
  if (frame_len <= 0 || shift <= 0) throw ValidationError("mfcc: degenerate frame geometry");
  if (samples.size() < static_cast<std::size_t>(frame_len))
    throw ValidationError("mfcc: input shorter than one frame");

  const int fft_n = config.fft_size(sample_rate_hz);
  const int num_bins = fft_n / 2 + 1;
  const std::size_t num_frames = 1 + (samples.size() - static_cast<std::size_t>(frame_len)) /
                                         static_cast<std::size_t>(shift);

  std::vector<double> window(frame_len);
  for (int n = 0; n < frame_len; ++n)
    window[n] = 0.54 - 0.46 * std::cos(2.0 * kPi * n / static_cast<double>(frame_len - 1));

  const auto filters = mel_filterbank(config.num_mel_filters, fft_n, sample_rate_hz);

  // Orthonormal DCT-II: c_k = s_k * sum_m x_m cos(pi k (m + 0.5) / M).
  const int num_mel = config.num_mel_filters;
  std::vector<double> dct(static_cast<std::size_t>(config.num_ceps) * num_mel);
  for (int k = 0; k < config.num_ceps; ++k) {
    const double scale = k == 0 ? std::sqrt(1.0 / num_mel) : std::sqrt(2.0 / num_mel);
    for (int m = 0; m < num_mel; ++m)
      dct[static_cast<std::size_t>(k) * num_mel + m] =
          scale * std::cos(kPi * k * (m + 0.5) / static_cast<double>(num_mel));
  }

  FrameMatrix out(num_frames, static_cast<std::size_t>(config.num_ceps));
  std::vector<double> frame(frame_len);
  std::vector<std::complex<double>> spectrum(fft_n);
  std::vector<double> mel_log(num_mel);

  for (std::size_t t = 0; t < num_frames; ++t) {
    const double* src = samples.data() + t * static_cast<std::size_t>(shift);
    frame[0] = src[0] - config.pre_emphasis * src[0];
    for (int n = 1; n < frame_len; ++n) frame[n] = src[n] - config.pre_emphasis * src[n - 1];
    for (int n = 0; n < frame_len; ++n) frame[n] *= window[n];

    std::fill(spectrum.begin(), spectrum.end(), std::complex<double>(0.0, 0.0));
    for (int n = 0; n < frame_len; ++n) spectrum[n] = frame[n];
    fft_radix2(spectrum);

    for (int m = 0; m < num_mel; ++m) {
      double acc = 0.0;
      const auto& w = filters[m];
      for (int k = 0; k < num_bins; ++k)
        if (w[k] != 0.0) acc += w[k] * std::abs(spectrum[k]);
      mel_log[m] = std::log(std::max(acc, config.log_floor));
    }

    double* row = out.row(t);
    for (int k = 0; k < config.num_ceps; ++k) {
      double acc = 0.0;
      const double* d = dct.data() + static_cast<std::size_t>(k) * num_mel;
      for (int m = 0; m < num_mel; ++m) acc += d[m] * mel_log[m];
      row[k] = acc;
    }
  }
  return out;
}

namespace {

FrameMatrix regression_delta(const FrameMatrix& frames, int window) {
  FrameMatrix out(frames.rows, frames.cols);
  double norm = 0.0;
  for (int n = 1; n <= window; ++n) norm += static_cast<double>(n) * n;
  norm *= 2.0;
  const auto last = static_cast<long>(frames.rows) - 1;
  for (std::size_t t = 0; t < frames.rows; ++t) {
    for (std::size_t c = 0; c < frames.cols; ++c) {
      double acc = 0.0;
      for (int n = 1; n <= window; ++n) {
        const long fwd = std::min(static_cast<long>(t) + n, last);
        const long bwd = std::max(static_cast<long>(t) - n, 0L);
        acc += n * (frames.at(static_cast<std::size_t>(fwd), c) -
                    frames.at(static_cast<std::size_t>(bwd), c));
      }
      out.at(t, c) = acc / norm;
    }
  }
  return out;
}

}  // namespace

FrameMatrix append_deltas(const FrameMatrix& frames, int delta_window) {
  if (frames.rows == 0) throw ValidationError("append_deltas: no frames");
  if (delta_window <= 0) throw ValidationError("append_deltas: window must be positive");
  const FrameMatrix d1 = regression_delta(frames, delta_window);
  const FrameMatrix d2 = regression_delta(d1, delta_window);
  FrameMatrix out(frames.rows, frames.cols * 3);
  for (std::size_t t = 0; t < frames.rows; ++t) {
    double* row = out.row(t);
    std::copy(frames.row(t), frames.row(t) + frames.cols, row);
    std::copy(d1.row(t), d1.row(t) + frames.cols, row + frames.cols);
    std::copy(d2.row(t), d2.row(t) + frames.cols, row + 2 * frames.cols);
  }
  return out;
}

std::vector<double> mean_pool(const FrameMatrix& frames) {
  if (frames.rows == 0) throw ValidationError("mean_pool: no frames");
  std::vector<double> mean(frames.cols, 0.0);
  for (std::size_t t = 0; t < frames.rows; ++t) {
    const double* row = frames.row(t);
    for (std::size_t c = 0; c < frames.cols; ++c) mean[c] += row[c];
  }
  for (double& v : mean) v /= static_cast<double>(frames.rows);
  return mean;
}

void FeatureMatrix::validate() const {
  if (data.size() != ids.size() * dim)
    throw ValidationError("feature matrix: row/id count mismatch");
  for (const double v : data)
    if (!std::isfinite(v)) throw ValidationError("feature matrix: non-finite entry");
}

FeatureMatrix acoustic_vectors(const Manifest& manifest, const MfccConfig& config,
                               const std::string& base_dir, FeaturizeReport* report) {
  config.validate();
  const std::size_t n = manifest.records.size();
  const std::size_t dim = static_cast<std::size_t>(config.num_ceps) * 3;

  struct Slot {
    std::vector<double> row;
    std::string error;
  };
  std::vector<Slot> slots(n);

  auto worker = [&](std::size_t begin, std::size_t end) {
    for (std::size_t i = begin; i < end; ++i) {
      const auto& rec = manifest.records[i];
      try {
        std::filesystem::path p(rec.audio_path);
        if (p.is_relative() && !base_dir.empty()) p = std::filesystem::path(base_dir) / p;
        WaveInfo info;
        const std::vector<double> samples = read_wave_mono(p.string(), &info);
        const FrameMatrix frames = mfcc_frames(samples, info.sample_rate_hz, config);
        slots[i].row = mean_pool(append_deltas(frames, config.delta_window));
      } catch (const Error& e) {
        slots[i].error = e.what();
      }
    }
  };

  const std::size_t hw = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  const std::size_t num_threads = std::min(hw, std::max<std::size_t>(1, n));
  if (num_threads <= 1 || n < 16) {
    worker(0, n);
  } else {
    std::vector<std::thread> threads;
    const std::size_t chunk = (n + num_threads - 1) / num_threads;
    for (std::size_t t = 0; t < num_threads; ++t) {
      const std::size_t begin = t * chunk;
      const std::size_t end = std::min(n, begin + chunk);
      if (begin >= end) break;
      threads.emplace_back(worker, begin, end);
    }
    for (auto& th : threads) th.join();
  }

  FeatureMatrix out;
  out.dim = dim;
  for (std::size_t i = 0; i < n; ++i) {
    if (!slots[i].error.empty()) {
      if (report) report->errors.push_back({manifest.records[i].id, slots[i].error});
      continue;
    }
    out.ids.push_back(manifest.records[i].id);
    out.data.insert(out.data.end(), slots[i].row.begin(), slots[i].row.end());
  }
  out.validate();
  return out;
}

FeatureMatrix standardize(const FeatureMatrix& features) {
  const std::size_t n = features.rows();
  if (n < 2) throw ValidationError("standardize: need at least 2 rows");
  const std::size_t dim = features.dim;

  std::vector<double> mean(dim, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = features.row(r);
    for (std::size_t c = 0; c < dim; ++c) mean[c] += row[c];
  }
  for (double& v : mean) v /= static_cast<double>(n);

  std::vector<double> var(dim, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    const double* row = features.row(r);
    for (std::size_t c = 0; c < dim; ++c) {
      const double d = row[c] - mean[c];
      var[c] += d * d;
    }
  }
  for (double& v : var) v /= static_cast<double>(n);

  FeatureMatrix out = features;
  for (std::size_t c = 0; c < dim; ++c) {
    const double sd = std::sqrt(var[c]);
    if (sd == 0.0) {
      for (std::size_t r = 0; r < n; ++r) out.row(r)[c] = 0.0;
    } else {
      for (std::size_t r = 0; r < n; ++r) out.row(r)[c] = (features.row(r)[c] - mean[c]) / sd;
    }
  }
  return out;
}

}  // namespace corpusforge
