#ifndef ADAMINE_PGM_HPP
#define ADAMINE_PGM_HPP

#include <cstdint>
#include <string>
#include <vector>

namespace adamine {

// 8-bit binary portable graymap (P5), maxval 255.
struct PgmImage {
  size_t rows = 0;
  size_t cols = 0;
  std::vector<uint8_t> pixels;  // row-major

  uint8_t at(size_t r, size_t c) const { return pixels[r * cols + c]; }
};

void write_pgm(const std::string& path, const PgmImage& img);

// Throws FormatError on anything that is not a P5 maxval<=255 graymap.
PgmImage read_pgm(const std::string& path);

}  // namespace adamine

#endif  // ADAMINE_PGM_HPP
