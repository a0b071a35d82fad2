#include "adamine/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

#include "adamine/errors.hpp"

namespace adamine {

namespace {

uint32_t rd_u32(const uint8_t* p) {
  return static_cast<uint32_t>(p[0]) | (static_cast<uint32_t>(p[1]) << 8) |
         (static_cast<uint32_t>(p[2]) << 16) |
         (static_cast<uint32_t>(p[3]) << 24);
}

uint16_t rd_u16(const uint8_t* p) {
  return static_cast<uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::ofstream& out, uint32_t v) {
  uint8_t b[4] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8),
                  static_cast<uint8_t>(v >> 16), static_cast<uint8_t>(v >> 24)};
  out.write(reinterpret_cast<char*>(b), 4);
}

void wr_u16(std::ofstream& out, uint16_t v) {
  uint8_t b[2] = {static_cast<uint8_t>(v), static_cast<uint8_t>(v >> 8)};
  out.write(reinterpret_cast<char*>(b), 2);
}

}  // namespace

WavInfo wav_probe(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);

  uint8_t hdr[12];
  in.read(reinterpret_cast<char*>(hdr), 12);
  if (in.gcount() != 12 || std::memcmp(hdr, "RIFF", 4) != 0 ||
      std::memcmp(hdr + 8, "WAVE", 4) != 0)
    throw DecodeError("not a RIFF/WAVE file: " + path);

  WavInfo info;
  bool have_fmt = false, have_data = false;
  uint16_t block_align = 0;
  uint64_t data_bytes = 0;

  while (!have_data) {
    uint8_t ch[8];
    in.read(reinterpret_cast<char*>(ch), 8);
    if (in.gcount() != 8) {
      if (have_fmt && have_data) break;
      throw DecodeError("truncated chunk header: " + path);
    }
    uint32_t size = rd_u32(ch + 4);
    if (std::memcmp(ch, "fmt ", 4) == 0) {
      if (size < 16) throw DecodeError("short fmt chunk: " + path);
      uint8_t fmt[16];
      in.read(reinterpret_cast<char*>(fmt), 16);
      if (in.gcount() != 16) throw DecodeError("truncated fmt chunk: " + path);
      uint16_t audio_format = rd_u16(fmt);
      uint16_t channels = rd_u16(fmt + 2);
      info.sample_rate = rd_u32(fmt + 4);
      block_align = rd_u16(fmt + 12);
      info.bit_depth = rd_u16(fmt + 14);
      if (audio_format != 1)
        throw DecodeError("not PCM (format tag " +
                          std::to_string(audio_format) + "): " + path);
      if (channels != 1)
        throw DecodeError("not mono (" + std::to_string(channels) +
                          " channels): " + path);
      if (info.bit_depth != 16 && info.bit_depth != 24)
        throw DecodeError("unsupported bit depth " +
                          std::to_string(info.bit_depth) + ": " + path);
      if (info.sample_rate == 0) throw DecodeError("zero sample rate: " + path);
      have_fmt = true;
      in.seekg(size - 16 + (size & 1), std::ios::cur);
    } else if (std::memcmp(ch, "data", 4) == 0) {
      if (!have_fmt) throw DecodeError("data chunk before fmt: " + path);
      data_bytes = size;
      info.data_offset = static_cast<uint64_t>(in.tellg());
      have_data = true;
    } else {
      in.seekg(size + (size & 1), std::ios::cur);
      if (!in) throw DecodeError("truncated chunk body: " + path);
    }
  }
  if (!have_fmt || !have_data)
    throw DecodeError("missing fmt or data chunk: " + path);

  unsigned bytes_per = static_cast<unsigned>(info.bit_depth) / 8;
  if (block_align != bytes_per)
    throw DecodeError("block align mismatch: " + path);
  info.n_samples = data_bytes / bytes_per;
  if (info.n_samples == 0) throw DecodeError("empty data chunk: " + path);

  // the payload must actually be present
  in.seekg(0, std::ios::end);
  uint64_t file_size = static_cast<uint64_t>(in.tellg());
  if (info.data_offset + data_bytes > file_size)
    throw DecodeError("data chunk extends past end of file: " + path);
  return info;
}

std::vector<double> wav_read(const std::string& path, const WavInfo& info,
                             uint64_t first, uint64_t count) {
  if (first + count > info.n_samples)
    throw ArgumentError("sample range past end of file: " + path);
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open: " + path);
  unsigned bytes_per = static_cast<unsigned>(info.bit_depth) / 8;
  in.seekg(static_cast<std::streamoff>(info.data_offset + first * bytes_per));
  std::vector<uint8_t> raw(count * bytes_per);
  in.read(reinterpret_cast<char*>(raw.data()),
          static_cast<std::streamsize>(raw.size()));
  if (in.gcount() != static_cast<std::streamsize>(raw.size()))
    throw DecodeError("truncated sample payload: " + path);

  std::vector<double> out(count);
  if (info.bit_depth == 16) {
    for (uint64_t i = 0; i < count; ++i) {
      int16_t v = static_cast<int16_t>(raw[2 * i] | (raw[2 * i + 1] << 8));
      out[i] = v / 32768.0;
    }
  } else {
    for (uint64_t i = 0; i < count; ++i) {
      int32_t v = raw[3 * i] | (raw[3 * i + 1] << 8) | (raw[3 * i + 2] << 16);
      if (v & 0x800000) v |= ~0xFFFFFF;  // sign extend
      out[i] = v / 8388608.0;
    }
  }
  return out;
}

void wav_write(const std::string& path, const std::vector<double>& samples,
               uint32_t sample_rate, int bit_depth) {
  if (bit_depth != 16 && bit_depth != 24)
    throw ArgumentError("unsupported bit depth " + std::to_string(bit_depth));
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);

  unsigned bytes_per = static_cast<unsigned>(bit_depth) / 8;
  uint32_t data_bytes = static_cast<uint32_t>(samples.size() * bytes_per);

  out.write("RIFF", 4);
  wr_u32(out, 36 + data_bytes);
  out.write("WAVE", 4);
  out.write("fmt ", 4);
  wr_u32(out, 16);
  wr_u16(out, 1);  // PCM
  wr_u16(out, 1);  // mono
  wr_u32(out, sample_rate);
  wr_u32(out, sample_rate * bytes_per);
  wr_u16(out, static_cast<uint16_t>(bytes_per));
  wr_u16(out, static_cast<uint16_t>(bit_depth));
  out.write("data", 4);
  wr_u32(out, data_bytes);

  const double full_scale = bit_depth == 16 ? 32768.0 : 8388608.0;
  const long long lo = bit_depth == 16 ? -32768 : -8388608;
  const long long hi = bit_depth == 16 ? 32767 : 8388607;
  for (double s : samples) {
    long long q = std::llround(std::clamp(s, -1.0, 1.0) * full_scale);
    q = std::clamp(q, lo, hi);
    if (bit_depth == 16) {
      uint8_t b[2] = {static_cast<uint8_t>(q), static_cast<uint8_t>(q >> 8)};
      out.write(reinterpret_cast<char*>(b), 2);
    } else {
      uint8_t b[3] = {static_cast<uint8_t>(q), static_cast<uint8_t>(q >> 8),
                      static_cast<uint8_t>(q >> 16)};
      out.write(reinterpret_cast<char*>(b), 3);
    }
  }
  if (!out) throw IoError("short write: " + path);
}

}  // namespace adamine
