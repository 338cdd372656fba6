#include "corpusforge/wave.hpp"

#include <cstring>
#include <fstream>

#include "corpusforge/error.hpp"

namespace corpusforge {

namespace {

std::uint32_t read_u32le(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t read_u16le(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

struct ChunkWalk {
  WaveInfo info;
  std::uint64_t data_offset = 0;
  std::uint64_t data_bytes = 0;
  std::uint16_t block_align = 0;
};

ChunkWalk walk_wave(std::ifstream& in, const std::string& path) {
  unsigned char hdr[12];
  if (!in.read(reinterpret_cast<char*>(hdr), 12))
    throw ValidationError(path + ": truncated RIFF header");
  if (std::memcmp(hdr, "RIFF", 4) != 0 || std::memcmp(hdr + 8, "WAVE", 4) != 0)
    throw ValidationError(path + ": not a RIFF/WAVE file");

  ChunkWalk walk;
  bool have_fmt = false;
  bool have_data = false;
  unsigned char chdr[8];
  while (in.read(reinterpret_cast<char*>(chdr), 8)) {
    const std::uint32_t chunk_size = read_u32le(chdr + 4);
    if (std::memcmp(chdr, "fmt ", 4) == 0) {
      if (chunk_size < 16) throw ValidationError(path + ": fmt chunk too small");
      unsigned char fmt[16];
      if (!in.read(reinterpret_cast<char*>(fmt), 16))
        throw ValidationError(path + ": truncated fmt chunk");
      const std::uint16_t audio_format = read_u16le(fmt);
      if (audio_format != 1)
        throw ValidationError(path + ": unsupported audio format " +
                              std::to_string(audio_format) + " (linear PCM only)");
      walk.info.num_channels = read_u16le(fmt + 2);
      walk.info.sample_rate_hz = read_u32le(fmt + 4);
      walk.block_align = read_u16le(fmt + 12);
      walk.info.bits_per_sample = read_u16le(fmt + 14);
      if (walk.info.num_channels == 0 || walk.info.sample_rate_hz == 0 || walk.block_align == 0)
        throw ValidationError(path + ": invalid fmt fields");
      in.seekg(static_cast<std::streamoff>(chunk_size - 16 + (chunk_size & 1)), std::ios::cur);
      have_fmt = true;
    } else if (std::memcmp(chdr, "data", 4) == 0) {
      walk.data_offset = static_cast<std::uint64_t>(in.tellg());
      walk.data_bytes = chunk_size;
      have_data = true;
      // Chunks after data are irrelevant here.
      break;
    } else {
      in.seekg(static_cast<std::streamoff>(chunk_size + (chunk_size & 1)), std::ios::cur);
    }
    if (!in) throw ValidationError(path + ": truncated chunk list");
  }
  if (!have_fmt) throw ValidationError(path + ": missing fmt chunk");
  if (!have_data) throw ValidationError(path + ": missing data chunk");
  walk.info.num_frames = walk.data_bytes / walk.block_align;
  return walk;
}

}  // namespace

WaveInfo probe_wave(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open");
  return walk_wave(in, path).info;
}

std::vector<double> read_wave_mono(const std::string& path, WaveInfo* info_out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ValidationError(path + ": cannot open");
  const ChunkWalk walk = walk_wave(in, path);
  if (walk.info.bits_per_sample != 16)
    throw ValidationError(path + ": only 16-bit PCM samples are decoded (got " +
                          std::to_string(walk.info.bits_per_sample) + "-bit)");
  if (info_out) *info_out = walk.info;

  const std::uint64_t frames = walk.info.num_frames;
  const std::uint16_t channels = walk.info.num_channels;
  std::vector<unsigned char> raw(static_cast<std::size_t>(frames) * walk.block_align);
  in.seekg(static_cast<std::streamoff>(walk.data_offset), std::ios::beg);
  if (!in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size())))
    throw ValidationError(path + ": truncated data chunk");

  std::vector<double> samples(frames);
  for (std::uint64_t t = 0; t < frames; ++t) {
    const unsigned char* p = raw.data() + t * channels * 2;
    const auto v = static_cast<std::int16_t>(read_u16le(p));
    samples[t] = static_cast<double>(v) / 32768.0;
  }
  return samples;
}

void write_wave_pcm16(const std::string& path, const std::vector<std::int16_t>& interleaved,
                      std::uint32_t sample_rate_hz, std::uint16_t num_channels) {
  if (num_channels == 0) throw ValidationError("write_wave_pcm16: zero channels");
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError(path + ": cannot open for writing");

  const std::uint32_t data_bytes = static_cast<std::uint32_t>(interleaved.size() * 2);
  const std::uint16_t block_align = static_cast<std::uint16_t>(num_channels * 2);
  const std::uint32_t byte_rate = sample_rate_hz * block_align;

  auto put_u32 = [&](std::uint32_t v) {
    const unsigned char b[4] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
                                static_cast<unsigned char>(v >> 16),
                                static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(b), 4);
  };
  auto put_u16 = [&](std::uint16_t v) {
    const unsigned char b[2] = {static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8)};
    out.write(reinterpret_cast<const char*>(b), 2);
  };

  out.write("RIFF", 4);
  put_u32(36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  put_u32(16);
  put_u16(1);  // linear PCM
  put_u16(num_channels);
  put_u32(sample_rate_hz);
  put_u32(byte_rate);
  put_u16(block_align);
  put_u16(16);
  out.write("data", 4);
  put_u32(data_bytes);
  for (const std::int16_t s : interleaved) put_u16(static_cast<std::uint16_t>(s));
  if (!out) throw Error(path + ": write failed");
}

}  // namespace corpusforge
