#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace corpusforge {

// Linear-PCM RIFF/WAVE container access. Anything else must supply its
// duration in the manifest; no codec dependencies.
struct WaveInfo {
  std::uint32_t sample_rate_hz = 0;
  std::uint16_t num_channels = 0;
  std::uint16_t bits_per_sample = 0;
  std::uint64_t num_frames = 0;  // data bytes / block align

  double duration_s() const {
    return static_cast<double>(num_frames) / static_cast<double>(sample_rate_hz);
  }
};

// Reads only the container headers. Throws ValidationError on malformed or
// non-PCM files.
WaveInfo probe_wave(const std::string& path);

// Decodes 16-bit PCM samples of the first channel, scaled to [-1, 1].
std::vector<double> read_wave_mono(const std::string& path, WaveInfo* info = nullptr);

// Writes mono/stereo 16-bit PCM; used by fixtures and the ingest round trip.
void write_wave_pcm16(const std::string& path, const std::vector<std::int16_t>& interleaved,
                      std::uint32_t sample_rate_hz, std::uint16_t num_channels = 1);

}  // namespace corpusforge
