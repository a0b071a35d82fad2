#ifndef ADAMINE_WAV_HPP
#define ADAMINE_WAV_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace adamine {

// Mono PCM WAV, 16- or 24-bit. Anything else is a DecodeError.
struct WavInfo {
  uint32_t sample_rate = 0;
  int bit_depth = 0;
  uint64_t n_samples = 0;
  uint64_t data_offset = 0;  // byte offset of the first payload sample
};

// Parses RIFF/fmt/data headers without touching the payload.
WavInfo wav_probe(const std::string& path);

// Samples normalized by the full scale of the bit depth:
// 16-bit s/32768, 24-bit s/8388608. Reads [first, first+count).
std::vector<double> wav_read(const std::string& path, const WavInfo& info,
                             uint64_t first, uint64_t count);

// Clamps to [-1, 1] and quantizes with llround.
void wav_write(const std::string& path, const std::vector<double>& samples,
               uint32_t sample_rate, int bit_depth);

}  // namespace adamine

#endif  // ADAMINE_WAV_HPP
